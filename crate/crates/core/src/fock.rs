//! Occupation-number (Fock) space over an ordered set of field modes.
//!
//! States are stored sparsely, keyed by occupation tuples. Fermionic ladder
//! operators carry the Jordan–Wigner string: acting on mode `k` picks up a
//! factor `(-1)^m` where `m` counts the occupied fermionic modes strictly
//! before `k` in registry order. Bosonic modes are truncated at their cutoff;
//! amplitude pushed past the cutoff is dropped and recorded as lost norm.
//!
//! Dense matrices only appear after reduction. Their basis is row-major over
//! the factor list and, inside a factor, row-major over its modes (first mode
//! most significant, digit base `cutoff + 1`).

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes smaller than this are dropped after every operator application.
pub const PRUNE_THRESHOLD: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistics {
    Boson,
    Fermion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    Alice,
    I,
    IV,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Particle,
    Antiparticle,
    AbstractQubit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeDescriptor {
    pub region: Region,
    pub role: Role,
    pub statistics: Statistics,
    /// Maximum occupation.
    pub cutoff: u32,
}

impl ModeDescriptor {
    pub fn fermion(region: Region, role: Role) -> Self {
        Self {
            region,
            role,
            statistics: Statistics::Fermion,
            cutoff: 1,
        }
    }

    pub fn boson(region: Region, cutoff: u32) -> Self {
        Self {
            region,
            role: Role::Particle,
            statistics: Statistics::Boson,
            cutoff,
        }
    }

    /// Two-level mode (occupations 0 and 1) used for Alice.
    pub fn qubit(region: Region, statistics: Statistics) -> Self {
        Self {
            region,
            role: Role::AbstractQubit,
            statistics,
            cutoff: 1,
        }
    }

    pub fn dim(&self) -> usize {
        self.cutoff as usize + 1
    }
}

/// How fermionic ladder operators pick up signs.
///
/// `Unsigned` drops the Jordan–Wigner string. It is physically wrong and
/// exists only so the self-check can prove that it detects a broken sign
/// convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignRule {
    #[default]
    JordanWigner,
    Unsigned,
}

pub type Occupation = Vec<u32>;

/// Ordered, immutable list of modes. The order fixes the fermionic signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegistry {
    modes: Vec<ModeDescriptor>,
    sign_rule: SignRule,
}

impl ModeRegistry {
    pub fn new(modes: Vec<ModeDescriptor>) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            match m.statistics {
                Statistics::Fermion if m.cutoff != 1 => {
                    return Err(Error::OutOfRange(format!(
                        "fermionic mode {i} must have cutoff 1, got {}",
                        m.cutoff
                    )))
                }
                Statistics::Boson if m.cutoff < 1 => {
                    return Err(Error::OutOfRange(format!("bosonic mode {i} has cutoff 0")))
                }
                _ => {}
            }
        }
        Ok(Self {
            modes,
            sign_rule: SignRule::JordanWigner,
        })
    }

    pub fn with_sign_rule(mut self, rule: SignRule) -> Self {
        self.sign_rule = rule;
        self
    }

    pub fn sign_rule(&self) -> SignRule {
        self.sign_rule
    }

    pub fn modes(&self) -> &[ModeDescriptor] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn mode(&self, index: usize) -> Result<&ModeDescriptor> {
        self.modes.get(index).ok_or(Error::InvalidMode {
            index,
            len: self.modes.len(),
        })
    }

    /// Indices of the modes living in `region`, in registry order.
    pub fn indices_in(&self, region: Region) -> Vec<usize> {
        self.modes
            .iter()
            .enumerate()
            .filter(|(_, m)| m.region == region)
            .map(|(i, _)| i)
            .collect()
    }

    /// Dimension of the full (truncated) occupation basis.
    pub fn basis_dim(&self) -> usize {
        self.modes.iter().map(ModeDescriptor::dim).product()
    }

    /// Registry with `self`'s modes followed by `other`'s.
    pub fn concat(&self, other: &ModeRegistry) -> ModeRegistry {
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        ModeRegistry {
            modes,
            sign_rule: self.sign_rule,
        }
    }

    /// Row-major position of `occ` in the full basis.
    pub fn index_of(&self, occ: &[u32]) -> usize {
        occ.iter()
            .zip(&self.modes)
            .fold(0, |acc, (&n, m)| acc * m.dim() + n as usize)
    }

    pub fn occupation_at(&self, mut index: usize) -> Occupation {
        let mut occ = vec![0; self.modes.len()];
        for (slot, m) in occ.iter_mut().zip(&self.modes).rev() {
            *slot = (index % m.dim()) as u32;
            index /= m.dim();
        }
        occ
    }

    fn check_occupation(&self, occ: &[u32]) -> Result<()> {
        if occ.len() != self.modes.len() {
            return Err(Error::OutOfRange(format!(
                "occupation tuple has {} entries, registry has {} modes",
                occ.len(),
                self.modes.len()
            )));
        }
        for (i, (&n, m)) in occ.iter().zip(&self.modes).enumerate() {
            if n > m.cutoff {
                return Err(Error::OutOfRange(format!(
                    "occupation {n} of mode {i} exceeds cutoff {}",
                    m.cutoff
                )));
            }
        }
        Ok(())
    }

    /// Jordan–Wigner sign for acting on mode `k` of `occ`.
    fn string_sign(&self, occ: &[u32], k: usize) -> f64 {
        if self.sign_rule == SignRule::Unsigned || self.modes[k].statistics != Statistics::Fermion {
            return 1.0;
        }
        let occupied = occ[..k]
            .iter()
            .zip(&self.modes[..k])
            .filter(|(&n, m)| m.statistics == Statistics::Fermion && n == 1)
            .count();
        if occupied % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Sparse state over a mode registry.
#[derive(Debug, Clone)]
pub struct StateVector {
    registry: Arc<ModeRegistry>,
    amplitudes: BTreeMap<Occupation, Complex64>,
    lost_norm: f64,
}

impl StateVector {
    pub fn zero(registry: Arc<ModeRegistry>) -> Self {
        Self {
            registry,
            amplitudes: BTreeMap::new(),
            lost_norm: 0.0,
        }
    }

    /// The all-empty occupation tuple with amplitude 1.
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let occ = vec![0; registry.len()];
        let mut s = Self::zero(registry);
        s.amplitudes.insert(occ, Complex64::new(1.0, 0.0));
        s
    }

    pub fn basis(registry: Arc<ModeRegistry>, occ: &[u32]) -> Result<Self> {
        Self::from_amplitudes(registry, [(occ.to_vec(), Complex64::new(1.0, 0.0))])
    }

    pub fn from_amplitudes<I>(registry: Arc<ModeRegistry>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut s = Self::zero(registry);
        for (occ, amp) in terms {
            s.registry.check_occupation(&occ)?;
            *s.amplitudes.entry(occ).or_default() += amp;
        }
        s.prune();
        Ok(s)
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn amplitude(&self, occ: &[u32]) -> Complex64 {
        self.amplitudes.get(occ).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    /// Number of stored (non-pruned) terms.
    pub fn nnz(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Squared norm dropped by creation operators at a bosonic cutoff.
    pub fn lost_norm(&self) -> f64 {
        self.lost_norm
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Returns the normalized state and the factor it was multiplied by.
    pub fn normalized(&self) -> (Self, f64) {
        let n = self.norm();
        if n == 0.0 {
            return (self.clone(), 1.0);
        }
        let factor = 1.0 / n;
        (self.scale(Complex64::new(factor, 0.0)), factor)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.registry.clone());
        out.amplitudes = self.amplitudes.iter().map(|(k, &v)| (k.clone(), v * c)).collect();
        out.lost_norm = self.lost_norm * c.norm_sqr();
        out.prune();
        out
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: Complex64, other: &StateVector) -> Result<Self> {
        if self.registry != other.registry {
            return Err(Error::RegistryMismatch);
        }
        let mut out = self.clone();
        for (k, &v) in &other.amplitudes {
            *out.amplitudes.entry(k.clone()).or_default() += c * v;
        }
        out.lost_norm += c.norm_sqr() * other.lost_norm;
        out.prune();
        Ok(out)
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.add_scaled(Complex64::new(1.0, 0.0), other)
    }

    /// Linear combination `Σ c_i ψ_i` of states on a common registry.
    pub fn combine(terms: &[(f64, &StateVector)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::OutOfRange("empty linear combination".into()))?;
        let mut acc = Self::zero(first.registry.clone());
        for &(c, s) in terms {
            acc = acc.add_scaled(Complex64::new(c, 0.0), s)?;
        }
        Ok(acc)
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    pub fn apply(&self, mode: usize, ladder: Ladder) -> Result<Self> {
        match ladder {
            Ladder::Create => self.apply_creation(mode),
            Ladder::Annihilate => self.apply_annihilation(mode),
        }
    }

    /// Applies the creation operator of `mode`.
    pub fn apply_creation(&self, mode: usize) -> Result<Self> {
        let m = *self.registry.mode(mode)?;
        let mut out = Self::zero(self.registry.clone());
        out.lost_norm = self.lost_norm;
        for (occ, &amp) in &self.amplitudes {
            let n = occ[mode];
            let factor = match m.statistics {
                Statistics::Boson => ((n + 1) as f64).sqrt(),
                Statistics::Fermion if n == 0 => self.registry.string_sign(occ, mode),
                Statistics::Fermion => continue,
            };
            if n + 1 > m.cutoff {
                out.lost_norm += (amp * factor).norm_sqr();
                continue;
            }
            let mut raised = occ.clone();
            raised[mode] = n + 1;
            *out.amplitudes.entry(raised).or_default() += amp * factor;
        }
        out.prune();
        Ok(out)
    }

    /// Applies the annihilation operator of `mode`.
    pub fn apply_annihilation(&self, mode: usize) -> Result<Self> {
        let m = *self.registry.mode(mode)?;
        let mut out = Self::zero(self.registry.clone());
        out.lost_norm = self.lost_norm;
        for (occ, &amp) in &self.amplitudes {
            let n = occ[mode];
            if n == 0 {
                continue;
            }
            let factor = match m.statistics {
                Statistics::Boson => (n as f64).sqrt(),
                Statistics::Fermion => self.registry.string_sign(occ, mode),
            };
            let mut lowered = occ.clone();
            lowered[mode] = n - 1;
            *out.amplitudes.entry(lowered).or_default() += amp * factor;
        }
        out.prune();
        Ok(out)
    }

    /// `⟨self|ket⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, ket: &StateVector) -> Result<Complex64> {
        if self.registry != ket.registry {
            return Err(Error::RegistryMismatch);
        }
        // iterate the sparser side
        let (small, large, conj_small) = if self.nnz() <= ket.nnz() {
            (self, ket, true)
        } else {
            (ket, self, false)
        };
        let mut acc = Complex64::default();
        for (occ, &a) in &small.amplitudes {
            if let Some(&b) = large.amplitudes.get(occ) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Tensor product; the result's registry lists `self`'s modes first.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let registry = Arc::new(self.registry.concat(&other.registry));
        let mut out = Self::zero(registry);
        for (oa, &a) in &self.amplitudes {
            for (ob, &b) in &other.amplitudes {
                let mut occ = oa.clone();
                occ.extend_from_slice(ob);
                out.amplitudes.insert(occ, a * b);
            }
        }
        out.lost_norm = self.lost_norm * other.norm_sqr() + other.lost_norm * self.norm_sqr();
        out.prune();
        out
    }

    /// Dense vector over the full basis, row-major in registry order.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::default(); self.registry.basis_dim()];
        for (occ, &a) in &self.amplitudes {
            v[self.registry.index_of(occ)] = a;
        }
        v
    }

    /// `|ψ⟩⟨ψ|` as a dense matrix factorized by `groups`.
    pub fn density_from_pure(&self, groups: &[Vec<usize>]) -> Result<DensityMatrix> {
        let layout = GroupLayout::new(&self.registry, groups)?;
        let dim: usize = layout.dims.iter().product();
        let mut v = vec![Complex64::default(); dim];
        for (occ, &a) in &self.amplitudes {
            v[layout.full_index(occ)] = a;
        }
        let matrix = DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj());
        DensityMatrix::new(layout.dims, matrix)
    }

    /// Reduced density matrix of the groups listed in `keep`, computed
    /// directly from the sparse amplitudes without building `|ψ⟩⟨ψ|`.
    pub fn reduced_density(&self, groups: &[Vec<usize>], keep: &[usize]) -> Result<DensityMatrix> {
        let layout = GroupLayout::new(&self.registry, groups)?;
        check_keep(keep, groups.len())?;
        let kept_dims: Vec<usize> = keep.iter().map(|&g| layout.dims[g]).collect();
        let traced: Vec<usize> = (0..groups.len()).filter(|g| !keep.contains(g)).collect();
        let dim: usize = kept_dims.iter().product();

        let mut buckets: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
        for (occ, &a) in &self.amplitudes {
            let digits = layout.group_digits(occ);
            let k = keep.iter().fold(0, |acc, &g| acc * layout.dims[g] + digits[g]);
            let t = traced.iter().fold(0, |acc, &g| acc * layout.dims[g] + digits[g]);
            buckets.entry(t).or_default().push((k, a));
        }
        let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
        for terms in buckets.values() {
            for &(i, a) in terms {
                for &(j, b) in terms {
                    matrix[(i, j)] += a * b.conj();
                }
            }
        }
        DensityMatrix::new(kept_dims, matrix)
    }
}

/// Maps occupation tuples to factor digits for a partition of the registry.
struct GroupLayout {
    /// group index and position inside the group, per mode
    placement: Vec<(usize, usize)>,
    groups: Vec<Vec<usize>>,
    mode_dims: Vec<usize>,
    dims: Vec<usize>,
}

impl GroupLayout {
    fn new(registry: &ModeRegistry, groups: &[Vec<usize>]) -> Result<Self> {
        let n = registry.len();
        let mut placement = vec![None; n];
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::NotAPartition(format!("group {g} is empty")));
            }
            for (pos, &m) in group.iter().enumerate() {
                if m >= n {
                    return Err(Error::InvalidMode { index: m, len: n });
                }
                if placement[m].replace((g, pos)).is_some() {
                    return Err(Error::NotAPartition(format!("mode {m} appears twice")));
                }
            }
        }
        let placement = placement
            .into_iter()
            .enumerate()
            .map(|(m, p)| p.ok_or_else(|| Error::NotAPartition(format!("mode {m} is in no group"))))
            .collect::<Result<Vec<_>>>()?;
        let mode_dims: Vec<usize> = registry.modes().iter().map(ModeDescriptor::dim).collect();
        let dims = groups
            .iter()
            .map(|g| g.iter().map(|&m| mode_dims[m]).product())
            .collect();
        Ok(Self {
            placement,
            groups: groups.to_vec(),
            mode_dims,
            dims,
        })
    }

    fn group_digits(&self, occ: &[u32]) -> Vec<usize> {
        self.groups
            .iter()
            .map(|g| g.iter().fold(0, |acc, &m| acc * self.mode_dims[m] + occ[m] as usize))
            .collect()
    }

    fn full_index(&self, occ: &[u32]) -> usize {
        debug_assert_eq!(self.placement.len(), occ.len());
        self.group_digits(occ)
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&d, &dim)| acc * dim + d)
    }
}

fn check_keep(keep: &[usize], nfactors: usize) -> Result<()> {
    if keep.is_empty() {
        return Err(Error::InvalidFactors("keep set is empty".into()));
    }
    for (i, &k) in keep.iter().enumerate() {
        if k >= nfactors {
            return Err(Error::InvalidFactors(format!(
                "factor {k} out of range ({nfactors} factors)"
            )));
        }
        if keep[..i].contains(&k) {
            return Err(Error::InvalidFactors(format!("factor {k} listed twice")));
        }
    }
    Ok(())
}

/// Dense matrix of one ladder operator on the full truncated basis.
pub fn operator_matrix(registry: &Arc<ModeRegistry>, mode: usize, ladder: Ladder) -> Result<DMatrix<Complex64>> {
    let dim = registry.basis_dim();
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let basis = StateVector::basis(registry.clone(), &registry.occupation_at(col))?;
        for (occ, &a) in basis.apply(mode, ladder)?.iter() {
            m[(registry.index_of(occ), col)] = a;
        }
    }
    Ok(m)
}

/// Dense density matrix with an ordered factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if dims.is_empty() || matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidFactors(format!(
                "factor dims {dims:?} do not match a {}x{} matrix",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        max_hermitian_deviation(&self.matrix)
    }

    /// `self ⊗ other`, factors concatenated.
    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix {
            dims,
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Traces out every factor not listed in `keep`. Kept factors retain
    /// the order given in `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_keep(keep, self.dims.len())?;
        let nf = self.dims.len();
        let mut strides = vec![1usize; nf];
        for f in (0..nf.saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * self.dims[f + 1];
        }
        let traced: Vec<usize> = (0..nf).filter(|f| !keep.contains(f)).collect();
        let offsets = |factors: &[usize]| -> Vec<usize> {
            let mut out = vec![0usize];
            for &f in factors {
                let (dim, stride) = (self.dims[f], strides[f]);
                out = out
                    .iter()
                    .flat_map(|&base| (0..dim).map(move |d| base + d * stride))
                    .collect();
            }
            out
        };
        let kept_off = offsets(keep);
        let traced_off = offsets(&traced);
        let dims: Vec<usize> = keep.iter().map(|&f| self.dims[f]).collect();
        let n = kept_off.len();
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            traced_off
                .iter()
                .map(|&t| self.matrix[(kept_off[i] + t, kept_off[j] + t)])
                .sum()
        });
        DensityMatrix::new(dims, matrix)
    }
}

pub(crate) fn max_hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
