//! Invariant suite run by `rindler-ent selfcheck`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::Result;
use crate::experiments::acceleration_for_r;
use crate::family::StateParams;
use crate::fock::{operator_matrix, Ladder, ModeRegistry, SignRule, StateVector, Statistics};
use crate::negativity::{converged_pair, negativity, negativity_pair};
use crate::rindler::{
    bosonic_vacuum, fermionic_vacuum, field_registry, r_from_acceleration, unruh_operator, vacuum_annihilators,
    RindlerConfig, UnruhKind,
};

#[derive(Debug, Clone, Copy, Default)]
pub struct SelfcheckOptions {
    /// Drop the Jordan–Wigner string from the fermionic ladder operators.
    /// Negative control: the algebra checks must then fail.
    pub inject_sign_fault: bool,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&Arc<ModeRegistry>) -> Result<(bool, String)>;

pub fn run_checks(opts: SelfcheckOptions) -> Vec<CheckOutcome> {
    let rule = if opts.inject_sign_fault {
        SignRule::Unsigned
    } else {
        SignRule::JordanWigner
    };
    let fermions = Arc::new((*field_registry(Statistics::Fermion, 1)).clone().with_sign_rule(rule));
    let checks: [(&'static str, Check); 9] = [
        ("fermionic anticommutators", fermionic_anticommutators),
        ("Unruh operator algebra", unruh_algebra),
        ("fermionic vacuum annihilation", fermionic_vacuum_residuals),
        ("bosonic vacuum annihilation", |_| bosonic_vacuum_residuals()),
        ("two-qubit Schmidt oracle", |_| schmidt_oracle()),
        ("inertial 3x3 block oracle", |_| block_oracle()),
        ("eigen-sum vs trace norm", |_| trace_norm_agreement()),
        ("product family has zero negativity", |_| product_family()),
        ("acceleration round trip", |_| conversion_round_trip()),
    ];
    checks
        .iter()
        .map(|(name, check)| {
            let (passed, detail) = check(&fermions).unwrap_or_else(|e| (false, format!("error: {e}")));
            CheckOutcome { name, passed, detail }
        })
        .collect()
}

fn anticommutator(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a * b + b * a
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn fermionic_anticommutators(reg: &Arc<ModeRegistry>) -> Result<(bool, String)> {
    let n = reg.len();
    let dim = reg.basis_dim();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let ann: Vec<_> = (0..n)
        .map(|k| operator_matrix(reg, k, Ladder::Annihilate))
        .collect::<Result<_>>()?;
    let cre: Vec<_> = (0..n)
        .map(|k| operator_matrix(reg, k, Ladder::Create))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { id.clone() } else { DMatrix::zeros(dim, dim) };
            worst = worst.max(max_abs(&(anticommutator(&ann[i], &cre[j]) - expect)));
            worst = worst.max(max_abs(&anticommutator(&ann[i], &ann[j])));
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.1e}")))
}

fn unruh_algebra(reg: &Arc<ModeRegistry>) -> Result<(bool, String)> {
    let dim = reg.basis_dim();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let mut worst = 0.0f64;
    for &r in &[0.0, 0.2, 0.5, 0.78] {
        let ops: Vec<_> = vacuum_annihilators(Statistics::Fermion, r)
            .iter()
            .map(|op| op.matrix(reg))
            .collect::<Result<_>>()?;
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let expect = if i == j { id.clone() } else { DMatrix::zeros(dim, dim) };
                worst = worst.max(max_abs(&(anticommutator(a, &b.adjoint()) - expect)));
                worst = worst.max(max_abs(&anticommutator(a, b)));
            }
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.1e}")))
}

fn fermionic_vacuum_residuals(reg: &Arc<ModeRegistry>) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &r in &[0.0, 0.1, 0.4, 0.7, 0.785] {
        let closed = fermionic_vacuum(r)?;
        let vac = StateVector::from_amplitudes(reg.clone(), closed.iter().map(|(o, a)| (o.clone(), *a)))?;
        for op in vacuum_annihilators(Statistics::Fermion, r) {
            worst = worst.max(op.apply(&vac)?.norm());
        }
    }
    Ok((worst < 1e-12, format!("max residual {worst:.1e}")))
}

fn bosonic_vacuum_residuals() -> Result<(bool, String)> {
    let mut ok = true;
    let mut worst = 0.0f64;
    for &r in &[0.1, 0.5, 1.0, 1.5] {
        let v = bosonic_vacuum(r, 64)?;
        for kind in [UnruhKind::R, UnruhKind::L] {
            let res = unruh_operator(Statistics::Boson, r, kind).apply(&v.state)?.norm();
            ok &= res <= 2.0 * v.tail_bound + 1e-12;
            worst = worst.max(res);
        }
    }
    Ok((ok, format!("max residual {worst:.1e}")))
}

fn schmidt_oracle() -> Result<(bool, String)> {
    // P|0⟩|0⟩ + √(1−P²)|1⟩|1_R⟩ at r = 0 is a two-qubit pure state
    let sp = StateParams::new(0.4, 0.0, 1.0)?;
    let rc = RindlerConfig::new(Statistics::Fermion, 0.0, 1.0, 1)?;
    let (ar, _) = negativity_pair(&sp, &rc)?;
    let expect = 0.4 * 0.84f64.sqrt();
    let err = (ar.value - expect).abs();
    Ok((err < 1e-10, format!("N = {:.10}, oracle {expect:.10}", ar.value)))
}

fn block_oracle() -> Result<(bool, String)> {
    let sp = StateParams::new(0.4, 0.0, 1.0)?;
    let q = FRAC_1_SQRT_2;
    let c = 0.4 * 0.84f64.sqrt() * q;
    let d = 0.84 * (1.0 - q * q);
    let expect = -(d - (d * d + 4.0 * c * c).sqrt()) / 2.0;
    let mut worst = 0.0f64;
    for stat in [Statistics::Fermion, Statistics::Boson] {
        let rc = RindlerConfig::new(stat, 0.0, q, 8)?;
        let (ar, arbar) = negativity_pair(&sp, &rc)?;
        worst = worst.max((ar.value - expect).abs()).max((arbar.value - expect).abs());
    }
    Ok((worst < 1e-10, format!("oracle {expect:.10}, max error {worst:.1e}")))
}

fn trace_norm_agreement() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let sp = StateParams::new(0.3, 0.2, 0.9)?;
    for (stat, r) in [
        (Statistics::Fermion, 0.3),
        (Statistics::Fermion, 0.7),
        (Statistics::Boson, 0.4),
    ] {
        let rc = RindlerConfig::new(stat, r, 0.8, 32)?;
        let fs = crate::family::build_state(&sp, &rc)?;
        for rho in [crate::family::rho_ar(&fs)?, crate::family::rho_arbar(&fs)?] {
            let n = negativity(&rho)?;
            worst = worst.max((n.value - n.trace_norm_value).abs());
        }
    }
    Ok((worst < 1e-10, format!("max disagreement {worst:.1e}")))
}

fn product_family() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (i, &w) in [0.0, 0.3, 0.77, 1.0].iter().enumerate() {
        let sp = StateParams::new(0.25 * i as f64, w, w)?;
        for (stat, r) in [(Statistics::Fermion, 0.6), (Statistics::Boson, 0.8)] {
            let rc = RindlerConfig::new(stat, r, 0.75, 8)?;
            let (ar, arbar) = converged_pair(&sp, &rc, 1e-8)?;
            worst = worst.max(ar.value).max(arbar.value);
        }
    }
    Ok((worst == 0.0, format!("max N {worst:.1e}")))
}

fn conversion_round_trip() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for stat in [Statistics::Fermion, Statistics::Boson] {
        for &omega in &[1e6, 1e9] {
            for &r in &[0.05, 0.15, 0.191, 0.6] {
                let a = acceleration_for_r(r, omega, stat)?;
                let back = r_from_acceleration(omega, a.meters_per_s2, stat)?;
                worst = worst.max(((back - r) / r).abs());
            }
        }
    }
    Ok((worst < 1e-10, format!("max relative error {worst:.1e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        for c in run_checks(SelfcheckOptions::default()) {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn sign_fault_is_caught() {
        let out = run_checks(SelfcheckOptions {
            inject_sign_fault: true,
        });
        let anti = out.iter().find(|c| c.name == "fermionic anticommutators").unwrap();
        assert!(!anti.passed);
    }
}
