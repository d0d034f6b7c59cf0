//! Negativity of the Alice–Rob and Alice–AntiRob states.
//!
//! `N(ρ) = Σ_{λ<0} |λ|` over the spectrum of the partial transpose on
//! Alice's factor. Bosonic results come from a cutoff schedule that doubles
//! `n_max` until both the value and the vacuum tail bound settle.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::eigen::{hermitian_eigenvalues, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::family::{self, FamilyState, StateParams};
use crate::fock::{DensityMatrix, Statistics};
use crate::rindler::{bosonic_tail_bound, RindlerConfig};

/// Eigenvalues in `(-NEGATIVE_FLOOR, 0)` count as zero.
pub const NEGATIVE_FLOOR: f64 = 1e-10;

/// Bosonic cutoff schedule.
pub const CUTOFF_SCHEDULE: [u32; 7] = [8, 16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityResult {
    /// Sum of the magnitudes of the negative eigenvalues.
    pub value: f64,
    pub min_eigenvalue: f64,
    /// `(‖ρ^T_A‖₁ − Tr ρ) / 2`; agrees with `value` for a healthy pipeline.
    pub trace_norm_value: f64,
    /// Cutoff that produced `value` (0 for fermions).
    pub n_max_used: u32,
    pub tail_bound: f64,
    pub converged: bool,
}

/// Which accelerated observer Alice is paired with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Rob, region I.
    Rob,
    /// AntiRob, region IV.
    AntiRob,
}

/// Partial transpose on factor 0. All other factors are flattened.
pub fn partial_transpose_a(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    if rho.dims().len() < 2 {
        return Err(Error::InvalidFactors(
            "partial transpose needs at least two factors".into(),
        ));
    }
    let da = rho.dims()[0];
    let rest = rho.dim() / da;
    let m = rho.matrix();
    Ok(DMatrix::from_fn(rho.dim(), rho.dim(), |row, col| {
        let (a, i) = (row / rest, row % rest);
        let (a2, j) = (col / rest, col % rest);
        m[(a2 * rest + i, a * rest + j)]
    }))
}

pub fn negativity(rho: &DensityMatrix) -> Result<NegativityResult> {
    let pt = partial_transpose_a(rho)?;
    let eig = hermitian_eigenvalues(&pt, DEFAULT_TOL)?;
    let value = eig.iter().filter(|&&l| l < -NEGATIVE_FLOOR).fold(0.0, |acc, l| acc - l);
    let abs_sum: f64 = eig.iter().map(|l| l.abs()).sum();
    Ok(NegativityResult {
        value,
        min_eigenvalue: eig.first().copied().unwrap_or(0.0),
        trace_norm_value: 0.5 * (abs_sum - rho.trace().re),
        n_max_used: 0,
        tail_bound: 0.0,
        converged: true,
    })
}

fn side_of(fs: &FamilyState, side: Side) -> Result<NegativityResult> {
    let rho = match side {
        Side::Rob => family::rho_ar(fs)?,
        Side::AntiRob => family::rho_arbar(fs)?,
    };
    let mut res = negativity(&rho)?;
    if fs.statistics == Statistics::Boson {
        res.n_max_used = fs.n_max;
        res.tail_bound = fs.tail_bound;
    }
    Ok(res)
}

/// Both negativities at the configuration's own cutoff, no convergence loop.
pub fn negativity_pair(sp: &StateParams, rc: &RindlerConfig) -> Result<(NegativityResult, NegativityResult)> {
    let fs = family::build_state(sp, rc)?;
    Ok((side_of(&fs, Side::Rob)?, side_of(&fs, Side::AntiRob)?))
}

pub fn converged_negativity(
    sp: &StateParams,
    rc: &RindlerConfig,
    epsilon: f64,
    side: Side,
) -> Result<NegativityResult> {
    converged_sides(sp, rc, epsilon, &[side]).map(|v| v[0])
}

/// `(N_AR, N_AR̄)` with cutoff control.
pub fn converged_pair(
    sp: &StateParams,
    rc: &RindlerConfig,
    epsilon: f64,
) -> Result<(NegativityResult, NegativityResult)> {
    converged_sides(sp, rc, epsilon, &[Side::Rob, Side::AntiRob]).map(|v| (v[0], v[1]))
}

fn converged_sides(
    sp: &StateParams,
    rc: &RindlerConfig,
    epsilon: f64,
    sides: &[Side],
) -> Result<Vec<NegativityResult>> {
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} must be positive")));
    }
    if rc.statistics == Statistics::Fermion {
        let fs = family::build_state(sp, rc)?;
        return sides.iter().map(|&s| side_of(&fs, s)).collect();
    }

    let mut previous: Option<Vec<NegativityResult>> = None;
    for &n_max in &CUTOFF_SCHEDULE {
        let fs = family::build_state(sp, &rc.with_n_max(n_max))?;
        let mut current: Vec<NegativityResult> = sides.iter().map(|&s| side_of(&fs, s)).collect::<Result<_>>()?;
        let tail = bosonic_tail_bound(rc.r_omega, n_max);
        let settled = previous.as_ref().is_some_and(|prev| {
            prev.iter()
                .zip(&current)
                .all(|(p, c)| (c.value - p.value).abs() < epsilon)
        });
        for r in current.iter_mut() {
            r.converged = false;
        }
        if settled && tail < epsilon {
            for r in current.iter_mut() {
                r.converged = true;
            }
            return Ok(current);
        }
        previous = Some(current);
    }
    Ok(previous.expect("schedule is non-empty"))
}
