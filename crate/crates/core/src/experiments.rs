//! Sweeps over `r_ω`, peak search, relative-creation analysis, acceleration
//! conversion and the canonical figure datasets.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::StateParams;
use crate::fock::Statistics;
use crate::negativity::{converged_negativity, converged_pair, Side};
use crate::rindler::{RindlerConfig, SPEED_OF_LIGHT};

/// Standard gravity in m/s².
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Bosonic convergence target used by sweeps unless overridden.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Bosonic convergence target inside `find_peak` and `creation_report`.
pub const ANALYSIS_EPSILON: f64 = 1e-10;

pub const DEFAULT_PEAK_TOL: f64 = 1e-4;

/// Below this inertial negativity no relative increase is reported.
pub const INERTIAL_FLOOR: f64 = 1e-12;

/// Absolute creation above this counts as entanglement from nothing.
pub const CREATION_FLOOR: f64 = 1e-8;

const PEAK_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub params: StateParams,
    /// `r_omega` of the template is ignored.
    pub template: RindlerConfig,
    pub r_grid: Vec<f64>,
    pub epsilon: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.r_grid.is_empty() {
            return Err(Error::OutOfRange("r grid is empty".into()));
        }
        if self.r_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::OutOfRange("r grid must be strictly increasing".into()));
        }
        for &r in &self.r_grid {
            self.template.with_r(r)?;
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::OutOfRange(format!(
                "epsilon = {} must be positive",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// `count` evenly spaced points on `[lo, hi]` (or `[lo, hi)` when
/// `include_end` is false).
pub fn linear_grid(lo: f64, hi: f64, count: usize, include_end: bool) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let steps = if include_end { count - 1 } else { count } as f64;
            (0..count).map(|k| lo + (hi - lo) * k as f64 / steps).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r_omega: f64,
    pub n_ar: f64,
    pub n_arbar: f64,
    /// Largest cutoff used by either reduction (0 for fermions).
    pub n_max_used: u32,
    pub tail_bound: f64,
    pub converged_ar: bool,
    pub converged_arbar: bool,
}

impl SweepRow {
    pub fn converged(&self) -> bool {
        self.converged_ar && self.converged_arbar
    }
}

fn row_at(sp: &StateParams, template: &RindlerConfig, r: f64, epsilon: f64) -> Result<SweepRow> {
    let rc = template.with_r(r)?;
    let (ar, arbar) = converged_pair(sp, &rc, epsilon)?;
    Ok(SweepRow {
        r_omega: r,
        n_ar: ar.value,
        n_arbar: arbar.value,
        n_max_used: ar.n_max_used.max(arbar.n_max_used),
        tail_bound: ar.tail_bound.max(arbar.tail_bound),
        converged_ar: ar.converged,
        converged_arbar: arbar.converged,
    })
}

/// One row per grid point, in grid order. Points run in parallel.
pub fn sweep_r(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    spec.r_grid
        .par_iter()
        .map(|&r| row_at(&spec.params, &spec.template, r, spec.epsilon))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub r_star: f64,
    pub n_star: f64,
    /// The maximum sits on an end of the search interval.
    pub at_boundary: bool,
}

fn n_ar_at(sp: &StateParams, template: &RindlerConfig, r: f64) -> Result<f64> {
    Ok(converged_negativity(sp, &template.with_r(r)?, ANALYSIS_EPSILON, Side::Rob)?.value)
}

/// Maximum of `N_AR(r)` on `[r_lo, r_hi]`: a 64-point scan, then
/// golden-section refinement around the best interior grid point.
pub fn find_peak(sp: &StateParams, template: &RindlerConfig, r_lo: f64, r_hi: f64, tol: f64) -> Result<Peak> {
    if !(r_lo < r_hi) || !(tol > 0.0) {
        return Err(Error::OutOfRange(format!(
            "need r_lo < r_hi and tol > 0 (got {r_lo}, {r_hi}, {tol})"
        )));
    }
    template.with_r(r_lo)?;
    template.with_r(r_hi)?;

    let grid = linear_grid(r_lo, r_hi, PEAK_GRID_POINTS, true);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&r| n_ar_at(sp, template, r))
        .collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > values[best] { i } else { best });
    if best == 0 || best == grid.len() - 1 {
        return Ok(Peak {
            r_star: grid[best],
            n_star: values[best],
            at_boundary: true,
        });
    }

    let f = |r: f64| n_ar_at(sp, template, r);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (mut r_star, mut n_star) = if fc > fd { (c, fc) } else { (d, fd) };
    if values[best] > n_star {
        r_star = grid[best];
        n_star = values[best];
    }
    Ok(Peak {
        r_star,
        n_star,
        at_boundary: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreationReport {
    pub inertial_n: f64,
    pub n_at_r: f64,
    pub absolute_creation: f64,
    /// Present only when the inertial negativity exceeds [`INERTIAL_FLOOR`].
    pub relative_percent: Option<f64>,
    /// Entanglement appeared from a (numerically) separable inertial state.
    pub unbounded: bool,
}

/// `N_AR` at `r` against its inertial value.
pub fn creation_report(sp: &StateParams, template: &RindlerConfig, r: f64) -> Result<CreationReport> {
    let inertial_n = n_ar_at(sp, template, 0.0)?;
    let n_at_r = n_ar_at(sp, template, r)?;
    let absolute_creation = n_at_r - inertial_n;
    let relative_percent = (inertial_n > INERTIAL_FLOOR).then(|| 100.0 * absolute_creation / inertial_n);
    Ok(CreationReport {
        inertial_n,
        n_at_r,
        absolute_creation,
        relative_percent,
        unbounded: inertial_n <= INERTIAL_FLOOR && absolute_creation > CREATION_FLOOR,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acceleration {
    pub meters_per_s2: f64,
    pub in_g: f64,
}

/// Proper acceleration giving squeezing `r` at frequency `omega` (Hz):
/// `a = −πcω / ln(tan r)` (fermion) or `−πcω / ln(tanh r)` (boson).
pub fn acceleration_for_r(r: f64, omega: f64, statistics: Statistics) -> Result<Acceleration> {
    if !(omega > 0.0) {
        return Err(Error::OutOfRange(format!("frequency {omega} must be positive")));
    }
    if !(r > 0.0) {
        return Err(Error::OutOfRange(format!(
            "r = {r}: the inertial limit corresponds to a → 0"
        )));
    }
    let x = match statistics {
        Statistics::Fermion if r < FRAC_PI_4 => r.tan(),
        Statistics::Boson if r.is_finite() => r.tanh(),
        _ => return Err(Error::OutOfRange(format!("r = {r}: at or beyond the a → ∞ limit"))),
    };
    let meters_per_s2 = -PI * SPEED_OF_LIGHT * omega / x.ln();
    Ok(Acceleration {
        meters_per_s2,
        in_g: meters_per_s2 / STANDARD_GRAVITY,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Grassman field, `N` against `r_ω`.
    Fig2,
    /// Bosonic field, `N` against `r_ω`.
    Fig3,
    /// Grassman field, creation against inertial negativity.
    Fig4,
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

/// State shared by the fig2 and fig3 presets.
pub fn caption_state() -> StateParams {
    StateParams {
        p: 0.4,
        alpha: 0.0,
        beta: 1.0,
    }
}

pub const FIGURE_Q_R: [f64; 2] = [0.85, FRAC_1_SQRT_2];
pub const FIGURE_POINTS: usize = 200;
pub const FIG3_R_MAX: f64 = 1.5;
pub const FIG4_R: f64 = 0.15;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub q_r: f64,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreationPoint {
    pub alpha: f64,
    pub report: CreationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureData {
    Sweeps(Vec<Series>),
    /// Sorted by ascending inertial negativity.
    Creation(Vec<CreationPoint>),
}

/// Sweep spec of fig2/fig3 at one `q_R`.
pub fn figure_sweep_spec(id: FigureId, q_r: f64) -> Result<SweepSpec> {
    let (statistics, grid) = match id {
        FigureId::Fig2 => (Statistics::Fermion, linear_grid(0.0, FRAC_PI_4, FIGURE_POINTS, false)),
        FigureId::Fig3 => (Statistics::Boson, linear_grid(0.0, FIG3_R_MAX, FIGURE_POINTS, true)),
        FigureId::Fig4 => return Err(Error::UnknownPreset("fig4 is not an r sweep".into())),
    };
    Ok(SweepSpec {
        params: caption_state(),
        template: RindlerConfig::new(statistics, 0.0, q_r, CUTOFF_START)?,
        r_grid: grid,
        epsilon: DEFAULT_EPSILON,
    })
}

const CUTOFF_START: u32 = crate::negativity::CUTOFF_SCHEDULE[0];

/// `α` values approaching `β` geometrically from 0.
pub fn fig4_alpha_grid(beta: f64) -> Vec<f64> {
    (0..100)
        .map(|k| beta * (1.0 - 10f64.powf(-4.0 * k as f64 / 99.0)))
        .collect()
}

pub fn fig4_points() -> Result<Vec<CreationPoint>> {
    let beta = 0.8;
    let template = RindlerConfig::new(Statistics::Fermion, 0.0, FRAC_1_SQRT_2, 1)?;
    let mut points = fig4_alpha_grid(beta)
        .into_par_iter()
        .map(|alpha| {
            let sp = StateParams::new(0.4, alpha, beta)?;
            Ok(CreationPoint {
                alpha,
                report: creation_report(&sp, &template, FIG4_R)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    points.sort_by(|a, b| a.report.inertial_n.total_cmp(&b.report.inertial_n));
    Ok(points)
}

pub fn figure_preset(id: FigureId) -> Result<FigureData> {
    match id {
        FigureId::Fig2 | FigureId::Fig3 => FIGURE_Q_R
            .iter()
            .map(|&q_r| {
                Ok(Series {
                    q_r,
                    rows: sweep_r(&figure_sweep_spec(id, q_r)?)?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(FigureData::Sweeps),
        FigureId::Fig4 => fig4_points().map(FigureData::Creation),
    }
}
