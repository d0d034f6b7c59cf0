//! The Minkowski vacuum and Unruh excitations in the Rindler basis.
//!
//! Bosonic field: two truncated modes `(a_I, a_IV)`. The Unruh annihilators
//!
//! ```text
//! C_R = cosh r · a_I  − sinh r · a_IV†
//! C_L = cosh r · a_IV − sinh r · a_I†
//! ```
//!
//! annihilate the two-mode squeezed vacuum `Σ tanhⁿr / cosh r |n⟩_I |n⟩_IV`.
//!
//! Grassman field: four modes in the fixed order `(c_I, d_IV, c_IV, d_I)`
//! (particle/antiparticle per region). The vacuum is the joint kernel of
//!
//! ```text
//! C_R = cos r · c_I  − sin r · d_IV†     D_R = cos r · d_I  + sin r · c_IV†
//! C_L = cos r · c_IV − sin r · d_I†      D_L = cos r · d_IV + sin r · c_I†
//! ```
//!
//! The antiparticle operators carry `+sin r`: that sign is forced by
//! `{C_R, D_L} = {C_L, D_R} = 0`, without which the four operators have no
//! common vacuum.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{operator_matrix, Ladder, ModeDescriptor, ModeRegistry, Region, Role, StateVector, Statistics};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 2.998e8;

/// Mode positions in the fermionic field registry.
pub mod fermion_modes {
    pub const C_I: usize = 0;
    pub const D_IV: usize = 1;
    pub const C_IV: usize = 2;
    pub const D_I: usize = 3;
}

/// Mode positions in the bosonic field registry.
pub mod boson_modes {
    pub const A_I: usize = 0;
    pub const A_IV: usize = 1;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnruhKind {
    L,
    R,
}

impl UnruhKind {
    pub fn swapped(self) -> Self {
        match self {
            UnruhKind::L => UnruhKind::R,
            UnruhKind::R => UnruhKind::L,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RindlerConfig {
    pub statistics: Statistics,
    pub r_omega: f64,
    pub q_r: f64,
    pub q_l: f64,
    /// Bosonic occupation cutoff, ignored for fermions.
    pub n_max: u32,
}

impl RindlerConfig {
    /// `q_l` is derived as `√(1 − q_r²)`.
    pub fn new(statistics: Statistics, r_omega: f64, q_r: f64, n_max: u32) -> Result<Self> {
        let q_l = (1.0 - q_r * q_r).max(0.0).sqrt();
        let rc = Self {
            statistics,
            r_omega,
            q_r,
            q_l,
            n_max,
        };
        rc.validate()?;
        Ok(rc)
    }

    pub fn validate(&self) -> Result<()> {
        check_r(self.statistics, self.r_omega)?;
        // 1/√2 itself must pass even after decimal round trips
        if !(self.q_r >= FRAC_1_SQRT_2 - 1e-15 && self.q_r <= 1.0) {
            return Err(Error::OutOfRange(format!("q_R = {} outside [1/√2, 1]", self.q_r)));
        }
        if (self.q_r * self.q_r + self.q_l * self.q_l - 1.0).abs() > 1e-12 || self.q_l < 0.0 {
            return Err(Error::OutOfRange(format!(
                "q_R² + q_L² = {} must equal 1",
                self.q_r * self.q_r + self.q_l * self.q_l
            )));
        }
        if self.statistics == Statistics::Boson && self.n_max < 1 {
            return Err(Error::OutOfRange("bosonic n_max must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn with_r(&self, r_omega: f64) -> Result<Self> {
        let rc = Self { r_omega, ..*self };
        rc.validate()?;
        Ok(rc)
    }

    pub fn with_n_max(&self, n_max: u32) -> Self {
        Self { n_max, ..*self }
    }

    /// Same configuration with the roles of the L and R kinds exchanged.
    pub fn with_weights_swapped(&self) -> Self {
        Self {
            q_r: self.q_l,
            q_l: self.q_r,
            ..*self
        }
    }

    /// Upper end of the allowed `r_omega` range (exclusive for fermions).
    pub fn r_max(&self) -> f64 {
        r_upper(self.statistics)
    }
}

pub fn r_upper(statistics: Statistics) -> f64 {
    match statistics {
        Statistics::Fermion => FRAC_PI_4,
        Statistics::Boson => f64::INFINITY,
    }
}

fn check_r(statistics: Statistics, r: f64) -> Result<()> {
    let ok = match statistics {
        Statistics::Fermion => (0.0..FRAC_PI_4).contains(&r),
        Statistics::Boson => r >= 0.0 && r.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        let range = match statistics {
            Statistics::Fermion => "[0, π/4)",
            Statistics::Boson => "[0, ∞)",
        };
        Err(Error::OutOfRange(format!("r_omega = {r} outside {range}")))
    }
}

/// `r_ω` from `tan r = e^(−πcω/a)` (fermion) or `tanh r = e^(−πcω/a)`
/// (boson), with `ω` in Hz and `a` in m/s².
pub fn r_from_acceleration(omega: f64, acceleration: f64, statistics: Statistics) -> Result<f64> {
    if !(omega > 0.0) || !(acceleration > 0.0) {
        return Err(Error::OutOfRange(format!(
            "frequency ({omega}) and acceleration ({acceleration}) must be positive"
        )));
    }
    let x = (-PI * SPEED_OF_LIGHT * omega / acceleration).exp();
    Ok(match statistics {
        Statistics::Fermion => x.atan(),
        Statistics::Boson => x.atanh(),
    })
}

/// A field state together with the squared norm its truncation discards.
#[derive(Debug, Clone)]
pub struct FieldState {
    pub state: StateVector,
    /// Zero for fermions.
    pub tail_bound: f64,
}

/// Registry of the field modes for the given statistics.
pub fn field_registry(statistics: Statistics, n_max: u32) -> Arc<ModeRegistry> {
    let modes = match statistics {
        Statistics::Boson => vec![
            ModeDescriptor::boson(Region::I, n_max),
            ModeDescriptor::boson(Region::IV, n_max),
        ],
        Statistics::Fermion => vec![
            ModeDescriptor::fermion(Region::I, Role::Particle),
            ModeDescriptor::fermion(Region::IV, Role::Antiparticle),
            ModeDescriptor::fermion(Region::IV, Role::Particle),
            ModeDescriptor::fermion(Region::I, Role::Antiparticle),
        ],
    };
    Arc::new(ModeRegistry::new(modes).expect("field registry cutoffs are valid"))
}

/// Squared norm of the two-mode squeezed vacuum beyond `n_max`.
pub fn bosonic_tail_bound(r: f64, n_max: u32) -> f64 {
    r.tanh().powi(2 * (n_max as i32 + 1))
}

/// `α · a_lower + β · a_raise†` on one field registry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnruhOperator {
    pub lower: usize,
    pub lower_coef: f64,
    pub raise: usize,
    pub raise_coef: f64,
}

impl UnruhOperator {
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let a = state.apply_annihilation(self.lower)?;
        let b = state.apply_creation(self.raise)?;
        StateVector::combine(&[(self.lower_coef, &a), (self.raise_coef, &b)])
    }

    pub fn apply_adjoint(&self, state: &StateVector) -> Result<StateVector> {
        let a = state.apply_creation(self.lower)?;
        let b = state.apply_annihilation(self.raise)?;
        StateVector::combine(&[(self.lower_coef, &a), (self.raise_coef, &b)])
    }

    pub fn matrix(&self, registry: &Arc<ModeRegistry>) -> Result<DMatrix<Complex64>> {
        let a = operator_matrix(registry, self.lower, Ladder::Annihilate)?;
        let b = operator_matrix(registry, self.raise, Ladder::Create)?;
        Ok(a * Complex64::new(self.lower_coef, 0.0) + b * Complex64::new(self.raise_coef, 0.0))
    }
}

/// Particle Unruh annihilator `C_kind`.
pub fn unruh_operator(statistics: Statistics, r: f64, kind: UnruhKind) -> UnruhOperator {
    match statistics {
        Statistics::Boson => {
            use boson_modes::*;
            let (lower, raise) = match kind {
                UnruhKind::R => (A_I, A_IV),
                UnruhKind::L => (A_IV, A_I),
            };
            UnruhOperator {
                lower,
                lower_coef: r.cosh(),
                raise,
                raise_coef: -r.sinh(),
            }
        }
        Statistics::Fermion => {
            use fermion_modes::*;
            let (lower, raise) = match kind {
                UnruhKind::R => (C_I, D_IV),
                UnruhKind::L => (C_IV, D_I),
            };
            UnruhOperator {
                lower,
                lower_coef: r.cos(),
                raise,
                raise_coef: -r.sin(),
            }
        }
    }
}

/// Fermionic antiparticle Unruh annihilator `D_kind`.
pub fn antiparticle_operator(r: f64, kind: UnruhKind) -> UnruhOperator {
    use fermion_modes::*;
    let (lower, raise) = match kind {
        UnruhKind::R => (D_I, C_IV),
        UnruhKind::L => (D_IV, C_I),
    };
    UnruhOperator {
        lower,
        lower_coef: r.cos(),
        raise,
        raise_coef: r.sin(),
    }
}

/// All annihilators that define the vacuum for `statistics`.
pub fn vacuum_annihilators(statistics: Statistics, r: f64) -> Vec<UnruhOperator> {
    let mut ops = vec![
        unruh_operator(statistics, r, UnruhKind::R),
        unruh_operator(statistics, r, UnruhKind::L),
    ];
    if statistics == Statistics::Fermion {
        ops.push(antiparticle_operator(r, UnruhKind::R));
        ops.push(antiparticle_operator(r, UnruhKind::L));
    }
    ops
}

pub fn bosonic_vacuum(r: f64, n_max: u32) -> Result<FieldState> {
    check_r(Statistics::Boson, r)?;
    if n_max < 1 {
        return Err(Error::OutOfRange("n_max must be ≥ 1".into()));
    }
    let (th, ch) = (r.tanh(), r.cosh());
    let terms = (0..=n_max).map(|n| (vec![n, n], Complex64::new(th.powi(n as i32) / ch, 0.0)));
    Ok(FieldState {
        state: StateVector::from_amplitudes(field_registry(Statistics::Boson, n_max), terms)?,
        tail_bound: bosonic_tail_bound(r, n_max),
    })
}

/// `C_kind† |0⟩` for the bosonic field, truncated at `n_max`.
pub fn bosonic_excitation(r: f64, n_max: u32, kind: UnruhKind) -> Result<FieldState> {
    check_r(Statistics::Boson, r)?;
    if n_max < 1 {
        return Err(Error::OutOfRange("n_max must be ≥ 1".into()));
    }
    let (th, ch) = (r.tanh(), r.cosh());
    let terms = (0..n_max).map(|n| {
        let occ = match kind {
            UnruhKind::R => vec![n + 1, n],
            UnruhKind::L => vec![n, n + 1],
        };
        let amp = ((n + 1) as f64).sqrt() * th.powi(n as i32) / (ch * ch);
        (occ, Complex64::new(amp, 0.0))
    });
    Ok(FieldState {
        state: StateVector::from_amplitudes(field_registry(Statistics::Boson, n_max), terms)?,
        tail_bound: bosonic_tail_bound(r, n_max),
    })
}

/// Grassman vacuum. All four amplitudes are non-negative in this mode order.
pub fn fermionic_vacuum(r: f64) -> Result<StateVector> {
    check_r(Statistics::Fermion, r)?;
    let (s, c) = r.sin_cos();
    let terms = [
        (vec![0, 0, 0, 0], c * c),
        (vec![1, 1, 0, 0], s * c),
        (vec![0, 0, 1, 1], s * c),
        (vec![1, 1, 1, 1], s * s),
    ];
    StateVector::from_amplitudes(
        field_registry(Statistics::Fermion, 1),
        terms.into_iter().map(|(o, a)| (o, Complex64::new(a, 0.0))),
    )
}

/// `C_kind† |0⟩` for the Grassman field.
pub fn fermionic_excitation(r: f64, kind: UnruhKind) -> Result<StateVector> {
    let vacuum = fermionic_vacuum(r)?;
    let excited = unruh_operator(Statistics::Fermion, r, kind).apply_adjoint(&vacuum)?;
    debug_assert!((excited.norm_sqr() - 1.0).abs() < 1e-12);
    Ok(excited)
}

pub fn vacuum(rc: &RindlerConfig) -> Result<FieldState> {
    match rc.statistics {
        Statistics::Boson => bosonic_vacuum(rc.r_omega, rc.n_max),
        Statistics::Fermion => Ok(FieldState {
            state: fermionic_vacuum(rc.r_omega)?,
            tail_bound: 0.0,
        }),
    }
}

pub fn excitation(rc: &RindlerConfig, kind: UnruhKind) -> Result<FieldState> {
    match rc.statistics {
        Statistics::Boson => bosonic_excitation(rc.r_omega, rc.n_max, kind),
        Statistics::Fermion => Ok(FieldState {
            state: fermionic_excitation(rc.r_omega, kind)?,
            tail_bound: 0.0,
        }),
    }
}

/// The one-particle state `q_R |1⟩_R + q_L |1⟩_L`.
pub fn unruh_particle(rc: &RindlerConfig) -> Result<FieldState> {
    rc.validate()?;
    let r = excitation(rc, UnruhKind::R)?;
    if rc.q_l == 0.0 {
        return Ok(r);
    }
    let l = excitation(rc, UnruhKind::L)?;
    let state = StateVector::combine(&[(rc.q_r, &r.state), (rc.q_l, &l.state)])?;
    Ok(FieldState {
        state,
        tail_bound: r.tail_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Statistics::{Boson, Fermion};

    #[test]
    fn config_validation() {
        assert!(RindlerConfig::new(Fermion, FRAC_PI_4, 1.0, 1).is_err());
        assert!(RindlerConfig::new(Fermion, -0.1, 1.0, 1).is_err());
        assert!(RindlerConfig::new(Boson, 3.0, 1.0, 8).is_ok());
        assert!(RindlerConfig::new(Boson, 0.1, 0.6, 8).is_err());
        assert!(RindlerConfig::new(Boson, 0.1, 1.2, 8).is_err());
        assert!(RindlerConfig::new(Boson, 0.1, 1.0, 0).is_err());
        let rc = RindlerConfig::new(Fermion, 0.2, FRAC_1_SQRT_2, 1).unwrap();
        assert!((rc.q_l - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn r_from_acceleration_limits() {
        for stat in [Fermion, Boson] {
            assert!(r_from_acceleration(1e9, 1e-3, stat).unwrap() < 1e-300);
        }
        let f = r_from_acceleration(1e9, 1e40, Fermion).unwrap();
        assert!((f - FRAC_PI_4).abs() < 1e-12);
        let b = r_from_acceleration(1e9, 1e40, Boson).unwrap();
        assert!(b > 10.0);
        assert!(r_from_acceleration(0.0, 1.0, Boson).is_err());
        assert!(r_from_acceleration(1.0, -1.0, Fermion).is_err());
    }

    #[test]
    fn r_from_acceleration_unit_exponent() {
        // πcω/a = 1
        let omega = 1e6;
        let a = PI * SPEED_OF_LIGHT * omega;
        let f = r_from_acceleration(omega, a, Fermion).unwrap();
        let b = r_from_acceleration(omega, a, Boson).unwrap();
        let e = (-1.0f64).exp();
        assert!((f.tan() - e).abs() < 1e-14);
        assert!((b.tanh() - e).abs() < 1e-14);
        assert!((f - 0.352513).abs() < 1e-6);
        assert!((b - 0.385968).abs() < 1e-6);
    }

    #[test]
    fn bosonic_vacuum_coefficients() {
        let v = bosonic_vacuum(0.0, 4).unwrap();
        assert_eq!(v.state.nnz(), 1);
        assert_eq!(v.state.amplitude(&[0, 0]).re, 1.0);

        let v = bosonic_vacuum(0.5, 12).unwrap();
        assert!((v.state.amplitude(&[0, 0]).re - 0.88681).abs() < 1e-5);
        for n in 0..12u32 {
            let ratio = v.state.amplitude(&[n + 1, n + 1]).re / v.state.amplitude(&[n, n]).re;
            assert!((ratio - 0.5f64.tanh()).abs() < 1e-14);
        }
        let expected = 1.0 - 0.5f64.tanh().powi(26);
        assert!((v.state.norm_sqr() - expected).abs() < 1e-14);
        assert_eq!(v.tail_bound, 0.5f64.tanh().powi(26));
    }

    #[test]
    fn bosonic_excitation_at_rest_and_series_norm() {
        let e = bosonic_excitation(0.0, 3, UnruhKind::R).unwrap();
        assert_eq!(e.state.nnz(), 1);
        assert_eq!(e.state.amplitude(&[1, 0]).re, 1.0);
        let e = bosonic_excitation(0.0, 3, UnruhKind::L).unwrap();
        assert_eq!(e.state.amplitude(&[0, 1]).re, 1.0);

        let r = 0.4f64;
        let series: f64 = (0..200).map(|n| (n + 1) as f64 * r.tanh().powi(2 * n)).sum::<f64>() / r.cosh().powi(4);
        assert!((series - 1.0).abs() < 1e-14);
        let e = bosonic_excitation(r, 60, UnruhKind::R).unwrap();
        assert!((e.state.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bosonic_excitation_matches_operator_route() {
        let (r, n_max) = (0.5, 30);
        let vac = bosonic_vacuum(r, n_max).unwrap();
        for kind in [UnruhKind::R, UnruhKind::L] {
            let closed = bosonic_excitation(r, n_max, kind).unwrap();
            let via_ops = unruh_operator(Boson, r, kind).apply_adjoint(&vac.state).unwrap();
            let diff = closed.state.add_scaled(Complex64::new(-1.0, 0.0), &via_ops).unwrap();
            assert!(diff.norm() < 1e-10 + closed.tail_bound, "{kind:?}: {}", diff.norm());
        }
    }

    #[test]
    fn bosonic_vacuum_annihilation_residual() {
        for &r in &[0.1, 0.5, 1.0] {
            let v = bosonic_vacuum(r, 40).unwrap();
            for kind in [UnruhKind::R, UnruhKind::L] {
                let res = unruh_operator(Boson, r, kind).apply(&v.state).unwrap();
                assert!(res.norm() <= 2.0 * v.tail_bound + 1e-12);
            }
        }
    }

    #[test]
    fn fermionic_vacuum_limits() {
        let v = fermionic_vacuum(0.0).unwrap();
        assert_eq!(v.nnz(), 1);
        assert_eq!(v.amplitude(&[0, 0, 0, 0]).re, 1.0);

        let v = fermionic_vacuum(FRAC_PI_4 - 1e-9).unwrap();
        for occ in [[0, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [1, 1, 1, 1]] {
            assert!((v.amplitude(&occ).norm() - 0.5).abs() < 1e-8);
        }
        assert!(fermionic_vacuum(FRAC_PI_4).is_err());
    }

    #[test]
    fn fermionic_vacuum_is_annihilated() {
        for &r in &[0.0, 0.1, 0.4, 0.7] {
            let v = fermionic_vacuum(r).unwrap();
            assert!((v.norm_sqr() - 1.0).abs() < 1e-14);
            for op in vacuum_annihilators(Fermion, r) {
                assert!(op.apply(&v).unwrap().norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fermionic_excitations() {
        let r0 = fermionic_excitation(0.0, UnruhKind::R).unwrap();
        assert_eq!(r0.nnz(), 1);
        assert_eq!(r0.amplitude(&[1, 0, 0, 0]).re, 1.0);
        let l0 = fermionic_excitation(0.0, UnruhKind::L).unwrap();
        assert_eq!(l0.amplitude(&[0, 0, 1, 0]).re, 1.0);

        let r = 0.3f64;
        let er = fermionic_excitation(r, UnruhKind::R).unwrap();
        let el = fermionic_excitation(r, UnruhKind::L).unwrap();
        assert_eq!(er.nnz(), 2);
        assert_eq!(el.nnz(), 2);
        for (occ, a) in er.iter() {
            assert_eq!(occ[fermion_modes::C_I], 1);
            assert!((a.norm() - r.cos()).abs() < 1e-14 || (a.norm() - r.sin()).abs() < 1e-14);
        }
        for (occ, _) in el.iter() {
            assert_eq!(occ[fermion_modes::C_IV], 1);
        }
        assert!(er.inner_product(&el).unwrap().norm() < 1e-15);
        let vac = fermionic_vacuum(r).unwrap();
        assert!(er.inner_product(&vac).unwrap().norm() < 1e-15);
    }

    #[test]
    fn unruh_particle_combinations() {
        let rc = RindlerConfig::new(Fermion, 0.3, 1.0, 1).unwrap();
        let p = unruh_particle(&rc).unwrap();
        let r = fermionic_excitation(0.3, UnruhKind::R).unwrap();
        let diff = p.state.add_scaled(Complex64::new(-1.0, 0.0), &r).unwrap();
        assert!(diff.norm() == 0.0);

        for stat in [Fermion, Boson] {
            for &(q, r) in &[(FRAC_1_SQRT_2, 0.2), (0.85, 0.6), (0.93, 0.05)] {
                let rc = RindlerConfig::new(stat, r, q, 60).unwrap();
                let p = unruh_particle(&rc).unwrap();
                assert!((p.state.norm_sqr() - 1.0).abs() < 1e-12, "{stat:?} {q} {r}");
            }
        }
    }
}
