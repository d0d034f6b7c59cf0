//! The Alice–field state family
//!
//! ```text
//! |Ψ⟩ = P |0⟩_A (α|1_ω⟩ + √(1−α²)|0_ω⟩) + √(1−P²) |1⟩_A (β|1_ω⟩ + √(1−β²)|0_ω⟩)
//! ```
//!
//! written over `A ⊗ (region I) ⊗ (region IV)`, and its reductions to
//! Alice–Rob (trace region IV) and Alice–AntiRob (trace region I).

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, ModeDescriptor, ModeRegistry, Region, StateVector, Statistics};
use crate::rindler::{self, RindlerConfig};

/// Mode index of Alice in the tripartite registry.
pub const ALICE: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateParams {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl StateParams {
    pub fn new(p: f64, alpha: f64, beta: f64) -> Result<Self> {
        let sp = Self { p, alpha, beta };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("P", self.p), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Tripartite state plus its bookkeeping.
#[derive(Debug, Clone)]
pub struct FamilyState {
    pub state: StateVector,
    pub statistics: Statistics,
    /// Factor the truncated bosonic state was multiplied by (1 for fermions).
    pub norm_correction: f64,
    pub tail_bound: f64,
    pub n_max: u32,
}

impl FamilyState {
    /// Factor groups `[A], [region I modes], [region IV modes]`.
    pub fn groups(&self) -> [Vec<usize>; 3] {
        let reg = self.state.registry();
        [vec![ALICE], reg.indices_in(Region::I), reg.indices_in(Region::IV)]
    }
}

pub fn build_state(sp: &StateParams, rc: &RindlerConfig) -> Result<FamilyState> {
    sp.validate()?;
    rc.validate()?;
    let alice = Arc::new(ModeRegistry::new(vec![ModeDescriptor::qubit(
        Region::Alice,
        rc.statistics,
    )])?);
    let a0 = StateVector::basis(alice.clone(), &[0])?;
    let a1 = StateVector::basis(alice, &[1])?;

    let zero = rindler::vacuum(rc)?;
    let one = rindler::unruh_particle(rc)?;
    let field = |w: f64| StateVector::combine(&[(w, &one.state), ((1.0 - w * w).max(0.0).sqrt(), &zero.state)]);

    let p0 = sp.p;
    let p1 = (1.0 - sp.p * sp.p).max(0.0).sqrt();
    let psi = StateVector::combine(&[(p0, &a0.tensor(&field(sp.alpha)?)), (p1, &a1.tensor(&field(sp.beta)?))])?;

    let (state, norm_correction) = match rc.statistics {
        Statistics::Fermion => {
            let n = psi.norm_sqr();
            if (n - 1.0).abs() > 1e-12 {
                return Err(Error::OutOfRange(format!("fermionic family state has norm² {n}")));
            }
            (psi, 1.0)
        }
        Statistics::Boson => psi.normalized(),
    };
    Ok(FamilyState {
        state,
        statistics: rc.statistics,
        norm_correction,
        tail_bound: zero.tail_bound,
        n_max: rc.n_max,
    })
}

/// Alice–Rob state: region IV traced out. Factors `(A, region I)`.
pub fn rho_ar(fs: &FamilyState) -> Result<DensityMatrix> {
    fs.state.reduced_density(&fs.groups(), &[0, 1])
}

/// Alice–AntiRob state: region I traced out. Factors `(A, region IV)`.
pub fn rho_arbar(fs: &FamilyState) -> Result<DensityMatrix> {
    fs.state.reduced_density(&fs.groups(), &[0, 2])
}
