use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use rindler_ent::eigen::{hermitian_eigenvalues, symmetric_eigenvalues, DEFAULT_TOL};
use rindler_ent::family::{self, FamilyState, StateParams};
use rindler_ent::fock::{operator_matrix, Ladder};
use rindler_ent::negativity::negativity;
use rindler_ent::rindler::{excitation, field_registry, vacuum, vacuum_annihilators};
use rindler_ent::{
    Complex64, DensityMatrix, ModeDescriptor, ModeRegistry, Region, RindlerConfig, Role, StateVector, Statistics,
    UnruhKind,
};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn statistics() -> impl Strategy<Value = Statistics> {
    prop_oneof![Just(Statistics::Fermion), Just(Statistics::Boson)]
}

/// `r` in the allowed range of either statistics.
fn config() -> impl Strategy<Value = (Statistics, f64, f64)> {
    (statistics(), 0.0..0.999f64, FRAC_1_SQRT_2..=1.0f64).prop_map(|(s, u, q)| {
        let r = match s {
            Statistics::Fermion => u * 0.78,
            Statistics::Boson => u * 1.2,
        };
        (s, r, q)
    })
}

fn params() -> impl Strategy<Value = StateParams> {
    (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(p, a, b)| StateParams { p, alpha: a, beta: b })
}

/// Family state assembled from arbitrary (unvalidated) kind weights.
fn family_with_weights(sp: &StateParams, rc: &RindlerConfig, q_r: f64, q_l: f64) -> FamilyState {
    let alice = Arc::new(ModeRegistry::new(vec![ModeDescriptor::qubit(Region::Alice, rc.statistics)]).unwrap());
    let a0 = StateVector::basis(alice.clone(), &[0]).unwrap();
    let a1 = StateVector::basis(alice, &[1]).unwrap();
    let zero = vacuum(rc).unwrap();
    let er = excitation(rc, UnruhKind::R).unwrap();
    let el = excitation(rc, UnruhKind::L).unwrap();
    let one = StateVector::combine(&[(q_r, &er.state), (q_l, &el.state)]).unwrap();
    let field = |w: f64| StateVector::combine(&[(w, &one), ((1.0 - w * w).max(0.0).sqrt(), &zero.state)]).unwrap();
    let p1 = (1.0 - sp.p * sp.p).sqrt();
    let psi = StateVector::combine(&[(sp.p, &a0.tensor(&field(sp.alpha))), (p1, &a1.tensor(&field(sp.beta)))]).unwrap();
    let (state, norm_correction) = psi.normalized();
    FamilyState {
        state,
        statistics: rc.statistics,
        norm_correction,
        tail_bound: zero.tail_bound,
        n_max: rc.n_max,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn creation_is_adjoint_of_annihilation(cutoff in 1u32..5, fermions in 1usize..4, mode_seed in 0usize..16) {
        let mut modes = vec![ModeDescriptor::boson(Region::I, cutoff)];
        modes.extend((0..fermions).map(|_| ModeDescriptor::fermion(Region::IV, Role::Particle)));
        let reg = Arc::new(ModeRegistry::new(modes).unwrap());
        let mode = mode_seed % reg.len();
        let up = operator_matrix(&reg, mode, Ladder::Create).unwrap();
        let down = operator_matrix(&reg, mode, Ladder::Annihilate).unwrap();
        prop_assert!(max_abs(&(up - down.adjoint())) < 1e-15);
    }

    #[test]
    fn unruh_operators_anticommute(r in 0.0..0.785f64) {
        let reg = field_registry(Statistics::Fermion, 1);
        let dim = reg.basis_dim();
        let ops: Vec<_> = vacuum_annihilators(Statistics::Fermion, r).iter().map(|o| o.matrix(&reg).unwrap()).collect();
        for (i, a) in ops.iter().enumerate() {
            for (j, b) in ops.iter().enumerate() {
                let id = if i == j { DMatrix::identity(dim, dim) } else { DMatrix::zeros(dim, dim) };
                prop_assert!(max_abs(&(a * b.adjoint() + b.adjoint() * a - id)) < 1e-12);
                prop_assert!(max_abs(&(a * b + b * a)) < 1e-12);
            }
        }
    }

    #[test]
    fn negativity_is_invariant_under_local_unitaries(
        (stat, r, q) in config(),
        sp in params(),
        theta in 0.0..std::f64::consts::PI,
        phi in 0.0..std::f64::consts::TAU,
    ) {
        let rc = RindlerConfig::new(stat, r, q, 24).unwrap();
        let rho = family::rho_ar(&family::build_state(&sp, &rc).unwrap()).unwrap();
        let (s, co) = theta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        let u = DMatrix::from_row_slice(2, 2, &[c(co, 0.0), -e.conj() * s, e * s, c(co, 0.0)]);
        let big = u.kronecker(&DMatrix::identity(rho.dim() / 2, rho.dim() / 2));
        let rotated = DensityMatrix::new(rho.dims().to_vec(), &big * rho.matrix() * big.adjoint()).unwrap();
        let before = negativity(&rho).unwrap().value;
        let after = negativity(&rotated).unwrap().value;
        prop_assert!((before - after).abs() < 1e-10, "{before} vs {after}");
    }

    #[test]
    fn swapping_kind_weights_exchanges_rob_and_antirob((stat, r, q) in config(), sp in params()) {
        let rc = RindlerConfig::new(stat, r, q, 24).unwrap();
        let original = family_with_weights(&sp, &rc, rc.q_r, rc.q_l);
        let swapped = family_with_weights(&sp, &rc, rc.q_l, rc.q_r);
        let n_ar = negativity(&family::rho_ar(&swapped).unwrap()).unwrap().value;
        let n_arbar = negativity(&family::rho_arbar(&original).unwrap()).unwrap().value;
        prop_assert!((n_ar - n_arbar).abs() < 1e-10, "{n_ar} vs {n_arbar}");
    }

    #[test]
    fn partial_trace_order_does_not_matter(amps in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 12)) {
        let v: Vec<Complex64> = amps.iter().map(|&(a, b)| c(a, b)).collect();
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let m = DMatrix::from_fn(12, 12, |i, j| v[i] * v[j].conj() / (norm * norm));
        let rho = DensityMatrix::new(vec![2, 3, 2], m).unwrap();
        let direct = rho.partial_trace(&[1]).unwrap();
        let via_first = rho.partial_trace(&[1, 2]).unwrap().partial_trace(&[0]).unwrap();
        let via_last = rho.partial_trace(&[0, 1]).unwrap().partial_trace(&[1]).unwrap();
        prop_assert!(max_abs(&(direct.matrix() - via_first.matrix())) < 1e-14);
        prop_assert!(max_abs(&(direct.matrix() - via_last.matrix())) < 1e-14);
        // kept order follows `keep`
        let swapped = rho.partial_trace(&[2, 0]).unwrap();
        let forward = rho.partial_trace(&[0, 2]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let (ti, tj) = ((i % 2) * 2 + i / 2, (j % 2) * 2 + j / 2);
                prop_assert!((swapped.matrix()[(i, j)] - forward.matrix()[(ti, tj)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn jacobi_matches_reference_symmetric(n in 1usize..12, entries in prop::collection::vec(-1.0..1.0f64, 144)) {
        let m = DMatrix::from_fn(n, n, |i, j| entries[i.min(j) * 12 + i.max(j)]);
        let ours = symmetric_eigenvalues(m.transpose().as_slice().to_vec(), n, DEFAULT_TOL).unwrap();
        let mut reference: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&reference) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn large_blocks_match_reference(n in 65usize..140, seed in any::<u64>(), graded in any::<bool>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        // graded matrices mix O(1) entries with entries near rounding noise
        let scale: Vec<f64> = (0..n).map(|i| if graded && i % 3 == 0 { 1e-20 } else { 1.0 }).collect();
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = rng.gen_range(-1.0..1.0) * scale[i] * scale[j];
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let ours = symmetric_eigenvalues(m.as_slice().to_vec(), n, DEFAULT_TOL).unwrap();
        let mut reference: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        let tol = 1e-12 * m.norm().max(1.0);
        for (a, b) in ours.iter().zip(&reference) {
            prop_assert!((a - b).abs() < tol, "{a} vs {b}");
        }
    }

    #[test]
    fn jacobi_matches_reference_hermitian(
        n in 1usize..8,
        re in prop::collection::vec(-1.0..1.0f64, 64),
        im in prop::collection::vec(-1.0..1.0f64, 64),
    ) {
        let m = DMatrix::from_fn(n, n, |i, j| {
            let k = i.min(j) * 8 + i.max(j);
            match i.cmp(&j) {
                std::cmp::Ordering::Equal => c(re[k], 0.0),
                std::cmp::Ordering::Less => c(re[k], im[k]),
                std::cmp::Ordering::Greater => c(re[k], -im[k]),
            }
        });
        let ours = hermitian_eigenvalues(&m, DEFAULT_TOL).unwrap();
        let mut reference: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&reference) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}
