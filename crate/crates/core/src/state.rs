//! Pure states, density matrices and the tensor bookkeeping between them.
//!
//! Subsystem ordering is big-endian: party 0 is the leftmost label of a ket
//! such as `|1000⟩`, so its index varies slowest in the amplitude vector.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::linalg::{hermitian_eigensystem, CMatrix, Eigensystem, LinalgError, C64, ZERO};

/// Tolerance on `Σ|a|² = 1` enforced after construction.
pub const NORM_TOL: f64 = 1e-12;
/// Deviation from unit norm that [`PureState::new`] silently corrects.
pub const RENORMALIZE_TOL: f64 = 1e-6;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as round-off; below is an error.
pub const PSD_TOL: f64 = 1e-10;
/// Hermiticity and trace tolerance for density matrices.
pub const DENSITY_TOL: f64 = 1e-10;
/// Largest total Hilbert-space dimension handled.
pub const MAX_TOTAL_DIM: usize = 1 << 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("subsystem dimensions must be positive and non-empty")]
    BadDims,
    #[error("total dimension {0} exceeds the supported maximum {MAX_TOTAL_DIM}")]
    TooLarge(usize),
    #[error("expected {expected} amplitudes for the given dims, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state norm² = {0} deviates from 1 by more than {RENORMALIZE_TOL}")]
    NotNormalized(f64),
    #[error("zero vector is not a state")]
    ZeroVector,
    #[error("subsystem index {index} out of range for {parties} parties")]
    IndexOutOfRange { index: usize, parties: usize },
    #[error("subsystem index {0} listed twice")]
    DuplicateIndex(usize),
    #[error("kept subsystem set is empty")]
    EmptyKeep,
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("state file: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn total_dim(dims: &[usize]) -> Result<usize, StateError> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(StateError::BadDims);
    }
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or(StateError::TooLarge(usize::MAX))?;
    if total > MAX_TOTAL_DIM {
        return Err(StateError::TooLarge(total));
    }
    Ok(total)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Flat offsets of every multi-index over `parties`, enumerated big-endian in
/// the given party order.
fn offsets(dims: &[usize], parties: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let mut out = vec![0usize];
    for &p in parties {
        let mut next = Vec::with_capacity(out.len() * dims[p]);
        for &base in &out {
            for digit in 0..dims[p] {
                next.push(base + digit * st[p]);
            }
        }
        out = next;
    }
    out
}

/// Reshapes a vector over `dims` into a `d_keep × d_rest` matrix.
pub(crate) fn bipartite_reshape(amps: &[C64], dims: &[usize], cut: &PartitionSpec) -> CMatrix {
    let rows = offsets(dims, cut.keep());
    let cols = offsets(dims, cut.rest());
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| amps[rows[i] + cols[j]])
}

/// An ordered bipartition of the parties: `keep` is the A-side, `rest` the
/// complement in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionSpec {
    keep: Vec<usize>,
    rest: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(keep: &[usize], parties: usize) -> Result<Self, StateError> {
        if keep.is_empty() {
            return Err(StateError::EmptyKeep);
        }
        let mut seen = vec![false; parties];
        for &k in keep {
            if k >= parties {
                return Err(StateError::IndexOutOfRange { index: k, parties });
            }
            if seen[k] {
                return Err(StateError::DuplicateIndex(k));
            }
            seen[k] = true;
        }
        let rest = (0..parties).filter(|&i| !seen[i]).collect();
        Ok(Self {
            keep: keep.to_vec(),
            rest,
        })
    }

    pub fn keep(&self) -> &[usize] {
        &self.keep
    }

    pub fn rest(&self) -> &[usize] {
        &self.rest
    }

    pub fn parties(&self) -> usize {
        self.keep.len() + self.rest.len()
    }
}

#[derive(Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
}

impl PureState {
    /// Accepts amplitudes whose norm² is within `1e-6` of one and rescales
    /// them to unit norm.
    pub fn new(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self, StateError> {
        let total = total_dim(&dims)?;
        if amplitudes.len() != total {
            return Err(StateError::LengthMismatch {
                expected: total,
                got: amplitudes.len(),
            });
        }
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (n2 - 1.0).abs() > RENORMALIZE_TOL {
            return Err(StateError::NotNormalized(n2));
        }
        Ok(Self::rescaled(amplitudes, dims, n2))
    }

    /// Normalizes any nonzero vector.
    pub fn from_unnormalized(amplitudes: Vec<C64>, dims: Vec<usize>) -> Result<Self, StateError> {
        let total = total_dim(&dims)?;
        if amplitudes.len() != total {
            return Err(StateError::LengthMismatch {
                expected: total,
                got: amplitudes.len(),
            });
        }
        let n2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(StateError::ZeroVector);
        }
        Ok(Self::rescaled(amplitudes, dims, n2))
    }

    fn rescaled(mut amplitudes: Vec<C64>, dims: Vec<usize>, n2: f64) -> Self {
        let inv = 1.0 / n2.sqrt();
        for a in &mut amplitudes {
            *a *= inv;
        }
        Self { amplitudes, dims }
    }

    /// Computational basis state; `digits[k]` is the level of party `k`.
    pub fn basis(digits: &[usize], dims: Vec<usize>) -> Result<Self, StateError> {
        let total = total_dim(&dims)?;
        if digits.len() != dims.len() {
            return Err(StateError::LengthMismatch {
                expected: dims.len(),
                got: digits.len(),
            });
        }
        let st = strides(&dims);
        let mut idx = 0;
        for (k, (&d, &dim)) in digits.iter().zip(&dims).enumerate() {
            if d >= dim {
                return Err(StateError::IndexOutOfRange { index: d, parties: k });
            }
            idx += d * st[k];
        }
        let mut amps = vec![ZERO; total];
        amps[idx] = C64::new(1.0, 0.0);
        Ok(Self {
            amplitudes: amps,
            dims,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes),
            dims: self.dims.clone(),
        }
    }

    /// Reshapes the amplitudes into a `d_keep × d_rest` matrix for the given
    /// bipartition, rows enumerated in `keep` order.
    pub fn bipartite_matrix(&self, cut: &PartitionSpec) -> CMatrix {
        bipartite_reshape(&self.amplitudes, &self.dims, cut)
    }

    /// Reduced state on `keep`, computed as `M M†` without forming `|ψ⟩⟨ψ|`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        let cut = PartitionSpec::new(keep, self.parties())?;
        let m = self.bipartite_matrix(&cut);
        let mut rho = &m * &m.adjoint();
        rho.hermitize();
        Ok(DensityMatrix {
            matrix: rho,
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    /// Applies a single-party unitary (or any operator) to party `k`.
    pub fn apply_local(&self, k: usize, op: &CMatrix) -> Result<Self, StateError> {
        if k >= self.parties() {
            return Err(StateError::IndexOutOfRange {
                index: k,
                parties: self.parties(),
            });
        }
        let d = self.dims[k];
        assert_eq!((op.rows(), op.cols()), (d, d), "operator shape");
        let stride = strides(&self.dims)[k];
        let mut out = vec![ZERO; self.dim()];
        for (idx, slot) in out.iter_mut().enumerate() {
            let digit = (idx / stride) % d;
            let base = idx - digit * stride;
            *slot = (0..d)
                .map(|j| op[(digit, j)] * self.amplitudes[base + j * stride])
                .sum();
        }
        Self::from_unnormalized(out, self.dims.clone())
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &PureState) -> Result<Self, StateError> {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        let dims = self.dims.iter().chain(&other.dims).copied().collect();
        Self::from_unnormalized(amps, dims)
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

impl fmt::Debug for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PureState")
            .field("dims", &self.dims)
            .field("amplitudes", &self.amplitudes)
            .finish()
    }
}

/// Parses the plain-text state format: a `dims: d0 d1 ...` header followed by
/// one `re im` line per amplitude in row-major order. Blank lines and lines
/// starting with `#` are ignored.
impl FromStr for PureState {
    type Err = StateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| StateError::Parse("empty input".into()))?;
        let dims_text = header
            .strip_prefix("dims:")
            .ok_or_else(|| StateError::Parse(format!("expected `dims:` header, got `{header}`")))?;
        let dims = dims_text
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|e| StateError::Parse(format!("bad dimension `{t}`: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut amps = Vec::new();
        for (lineno, line) in lines {
            let mut parts = line.split_whitespace();
            let mut num = |what: &str| -> Result<f64, StateError> {
                let tok = parts
                    .next()
                    .ok_or_else(|| StateError::Parse(format!("line {}: missing {what} part", lineno + 1)))?;
                tok.parse::<f64>()
                    .map_err(|e| StateError::Parse(format!("line {}: `{tok}`: {e}", lineno + 1)))
            };
            let re = num("real")?;
            let im = num("imaginary")?;
            if parts.next().is_some() {
                return Err(StateError::Parse(format!(
                    "line {}: expected two numbers",
                    lineno + 1
                )));
            }
            amps.push(C64::new(re, im));
        }
        PureState::new(amps, dims)
    }
}

/// Writes a state in the format read by [`PureState::from_str`].
pub fn format_state(psi: &PureState) -> String {
    let mut out = String::from("dims:");
    for d in psi.dims() {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    for a in psi.amplitudes() {
        out.push_str(&format!("{:e} {:e}\n", a.re, a.im));
    }
    out
}

#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity, then stores the
    /// Hermitian part.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self, StateError> {
        let total = total_dim(&dims)?;
        if matrix.rows() != total || matrix.cols() != total {
            return Err(StateError::LengthMismatch {
                expected: total,
                got: matrix.rows(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > DENSITY_TOL {
            return Err(StateError::InvalidDensity(format!(
                "not Hermitian (deviation {dev:.3e})"
            )));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(StateError::InvalidDensity(format!("trace {tr}")));
        }
        let mut matrix = matrix;
        matrix.hermitize();
        let eig = hermitian_eigensystem(&matrix)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(StateError::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`; weights are normalized to sum to one.
    pub fn mixture(components: &[(f64, &PureState)]) -> Result<Self, StateError> {
        let first = components.first().ok_or(StateError::ZeroVector)?.1;
        let dims = first.dims().to_vec();
        let n = first.dim();
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if total <= 0.0 {
            return Err(StateError::ZeroVector);
        }
        let mut m = CMatrix::zeros(n, n);
        for (p, psi) in components {
            if psi.dims() != dims.as_slice() {
                return Err(StateError::BadDims);
            }
            m = m.add(&psi.density().matrix.scale(C64::new(p / total, 0.0)));
        }
        Self::new(m, dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ.
        self.matrix.frobenius_norm_sqr()
    }

    /// `T(ρ) = 1 − Tr ρ²`, clamped at zero against round-off.
    pub fn linear_entropy(&self) -> f64 {
        (1.0 - self.purity()).max(0.0)
    }

    pub fn eigensystem(&self) -> Result<Eigensystem, StateError> {
        Ok(hermitian_eigensystem(&self.matrix)?)
    }

    /// Traces out every party not listed in `keep`. The output's parties
    /// follow the order of `keep`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, StateError> {
        let cut = PartitionSpec::new(keep, self.parties())?;
        let kept = offsets(&self.dims, cut.keep());
        let traced = offsets(&self.dims, cut.rest());
        let n = kept.len();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = traced
                    .iter()
                    .map(|&t| self.matrix[(kept[i] + t, kept[j] + t)])
                    .sum();
            }
        }
        out.hermitize();
        Ok(DensityMatrix {
            matrix: out,
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    /// `|ψ⟩` such that `ρ ≈ |ψ⟩⟨ψ|`, if the state is pure to within
    /// `linear_entropy ≤ tol`.
    pub fn as_pure(&self, tol: f64) -> Option<PureState> {
        if self.linear_entropy() > tol {
            return None;
        }
        let eig = self.eigensystem().ok()?;
        let v = eig.vector(0);
        // Fix the global phase so the largest amplitude is real positive.
        let (_, pivot) = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))?;
        let phase = pivot.conj() / pivot.norm();
        let amps = v.iter().map(|a| a * phase).collect();
        PureState::from_unnormalized(amps, self.dims.clone()).ok()
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix")
            .field("dims", &self.dims)
            .field("matrix", &self.matrix)
            .finish()
    }
}

/// Either kind of global state; the monogamy engine and the measures accept
/// both.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn dims(&self) -> &[usize] {
        match self {
            Self::Pure(p) => p.dims(),
            Self::Mixed(r) => r.dims(),
        }
    }

    pub fn parties(&self) -> usize {
        self.dims().len()
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            Self::Pure(p) => p.density(),
            Self::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            Self::Pure(p) => Some(p),
            Self::Mixed(_) => None,
        }
    }

    /// Reduced state on `keep` (in that order). Keeping every party of a
    /// pure state in its original order returns it unchanged.
    pub fn marginal(&self, keep: &[usize]) -> Result<QuantumState, StateError> {
        let identity = keep.len() == self.parties() && keep.iter().enumerate().all(|(i, &k)| i == k);
        match self {
            Self::Pure(p) if identity => Ok(Self::Pure(p.clone())),
            Self::Pure(p) => Ok(Self::Mixed(p.reduced(keep)?)),
            Self::Mixed(r) if identity => Ok(Self::Mixed(r.clone())),
            Self::Mixed(r) => Ok(Self::Mixed(r.partial_trace(keep)?)),
        }
    }
}

impl From<PureState> for QuantumState {
    fn from(p: PureState) -> Self {
        Self::Pure(p)
    }
}

impl From<DensityMatrix> for QuantumState {
    fn from(r: DensityMatrix) -> Self {
        Self::Mixed(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn fs() -> PureState {
        let s = 1.0 / 3f64.sqrt();
        let mut amps = vec![ZERO; 16];
        amps[0b0000] = c(s);
        amps[0b0010] = c(s);
        amps[0b1011] = c(s);
        PureState::new(amps, vec![2; 4]).unwrap()
    }

    fn w4() -> PureState {
        let mut amps = vec![ZERO; 16];
        for k in 0..4 {
            amps[1 << k] = c(0.5);
        }
        PureState::new(amps, vec![2; 4]).unwrap()
    }

    /// Index-contraction oracle: sums ρ over matching traced digits by
    /// decoding every basis index, independent of the offset tables.
    fn brute_partial_trace(rho: &DensityMatrix, keep: &[usize]) -> CMatrix {
        let dims = rho.dims();
        let decode = |mut idx: usize| -> Vec<usize> {
            let mut d = vec![0; dims.len()];
            for k in (0..dims.len()).rev() {
                d[k] = idx % dims[k];
                idx /= dims[k];
            }
            d
        };
        let out_dim: usize = keep.iter().map(|&k| dims[k]).product();
        let encode_keep =
            |digits: &[usize]| -> usize { keep.iter().fold(0, |acc, &k| acc * dims[k] + digits[k]) };
        let mut out = CMatrix::zeros(out_dim, out_dim);
        for i in 0..rho.dim() {
            for j in 0..rho.dim() {
                let di = decode(i);
                let dj = decode(j);
                let traced_equal = (0..dims.len())
                    .filter(|k| !keep.contains(k))
                    .all(|k| di[k] == dj[k]);
                if traced_equal {
                    out[(encode_keep(&di), encode_keep(&dj))] += rho.matrix()[(i, j)];
                }
            }
        }
        out
    }

    #[test]
    fn basis_projector() {
        let zero = PureState::basis(&[0], vec![2]).unwrap();
        let rho = zero.density();
        assert_eq!(rho.matrix(), &CMatrix::diagonal(&[1.0, 0.0]));
        assert!(rho.linear_entropy() < 1e-15);
    }

    #[test]
    fn w_density_is_rank_one_unit_trace() {
        let rho = w4().density();
        assert_eq!(rho.dim(), 16);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        let eig = rho.eigensystem().unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!(eig.values[1].abs() < 1e-12);
    }

    #[test]
    fn fs_density_entries() {
        let rho = fs().density();
        assert!((rho.matrix()[(0, 0)] - c(1.0 / 3.0)).norm() < 1e-15);
        assert!((rho.matrix()[(0, 2)] - c(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn fs_trace_out_b() {
        let rho = fs().density().partial_trace(&[0, 2, 3]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        let mut v = vec![ZERO; 8];
        v[0b000] = c(s);
        v[0b010] = c(s);
        v[0b111] = c(s);
        let expect = CMatrix::outer(&v, &v);
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
        assert!(rho.linear_entropy() < 1e-12);
    }

    #[test]
    fn w_single_party_marginal() {
        let rho = w4().density().partial_trace(&[0]).unwrap();
        let oracle = brute_partial_trace(&w4().density(), &[0]);
        assert!(rho.matrix().max_abs_diff(&oracle) < 1e-15);
        assert!(rho.matrix().max_abs_diff(&CMatrix::diagonal(&[0.75, 0.25])) < 1e-15);
    }

    #[test]
    fn product_marginal() {
        let rho = PureState::basis(&[0, 0], vec![2, 2]).unwrap().density();
        let a = rho.partial_trace(&[0]).unwrap();
        assert_eq!(a.matrix(), &CMatrix::diagonal(&[1.0, 0.0]));
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        let rho = fs().density();
        let dc = rho.partial_trace(&[3, 2]).unwrap();
        let oracle = brute_partial_trace(&rho, &[3, 2]);
        assert!(dc.matrix().max_abs_diff(&oracle) < 1e-15);
        let cd = rho.partial_trace(&[2, 3]).unwrap();
        assert!(dc.matrix().max_abs_diff(cd.matrix()) > 0.1);
    }

    #[test]
    fn pure_reduction_matches_density_partial_trace() {
        let psi = fs();
        for keep in [&[0usize][..], &[1, 3], &[3, 0, 2], &[0, 1, 2, 3]] {
            let a = psi.reduced(keep).unwrap();
            let b = psi.density().partial_trace(keep).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-15);
        }
    }

    #[test]
    fn linear_entropy_values() {
        let mixed = DensityMatrix::new(CMatrix::diagonal(&[0.5, 0.5]), vec![2]).unwrap();
        assert!((mixed.linear_entropy() - 0.5).abs() < 1e-15);
        let ab = fs().reduced(&[0, 1]).unwrap();
        assert!((ab.linear_entropy() - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn partition_errors() {
        assert_eq!(PartitionSpec::new(&[], 3), Err(StateError::EmptyKeep));
        assert!(matches!(
            PartitionSpec::new(&[3], 3),
            Err(StateError::IndexOutOfRange { .. })
        ));
        assert_eq!(PartitionSpec::new(&[1, 1], 3), Err(StateError::DuplicateIndex(1)));
        let p = PartitionSpec::new(&[2, 0], 4).unwrap();
        assert_eq!(p.rest(), &[1, 3]);
        assert!(fs().density().partial_trace(&[4]).is_err());
    }

    #[test]
    fn density_validation() {
        let bad_trace = CMatrix::diagonal(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace, vec![2]).is_err());
        let negative = CMatrix::diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(negative, vec![2]).is_err());
        let tiny_negative = CMatrix::diagonal(&[1.0 + 1e-11, -1e-11]);
        assert!(DensityMatrix::new(tiny_negative, vec![2]).is_ok());
        let non_herm = CMatrix::from_real_rows(&[&[0.5, 0.3], &[0.0, 0.5]]);
        assert!(DensityMatrix::new(non_herm, vec![2]).is_err());
    }

    #[test]
    fn parse_state_file() {
        let text = "# bell\ndims: 2 2\n0.70710678 0\n0 0\n0 0\n0.70710678 0\n";
        let psi: PureState = text.parse().unwrap();
        assert_eq!(psi.dims(), &[2, 2]);
        let n2: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
        assert!((n2 - 1.0).abs() < NORM_TOL);
        let back: PureState = format_state(&psi).parse().unwrap();
        assert!(back
            .amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-15));
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!("dims: 2\n1 0\n1 0\n".parse::<PureState>().is_err());
        assert!("dims: 2\n1 0\n".parse::<PureState>().is_err());
        assert!("2\n1 0\n0 0\n".parse::<PureState>().is_err());
        assert!("dims: 2\n1 0 0\n0 0\n".parse::<PureState>().is_err());
        assert!("dims: 2\nfoo 0\n0 0\n".parse::<PureState>().is_err());
        assert!("".parse::<PureState>().is_err());
    }

    #[test]
    fn apply_local_flip() {
        let x = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let psi = PureState::basis(&[0, 0, 0], vec![2; 3]).unwrap();
        let flipped = psi.apply_local(1, &x).unwrap();
        let expect = PureState::basis(&[0, 1, 0], vec![2; 3]).unwrap();
        assert!((flipped.inner(&expect).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn as_pure_recovers_marginal_vector() {
        let acd = fs().reduced(&[0, 2, 3]).unwrap();
        let psi = acd.as_pure(1e-12).unwrap();
        assert!((psi.density().matrix().max_abs_diff(acd.matrix())) < 1e-12);
        let ab = fs().reduced(&[0, 3]).unwrap();
        assert!(ab.as_pure(1e-12).is_none());
    }
}
