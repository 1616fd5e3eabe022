//! Bipartite correlation measures: concurrence, concurrence of assistance and
//! entanglement of formation.
//!
//! Pure states of any local dimension and two-qubit mixed states are
//! evaluated in closed form and tagged [`Status::Exact`]. Other mixed states
//! fall through to the convex-roof oracle and come back as
//! [`Status::Estimate`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex_roof::{convex_roof_oracle, Direction, OracleConfig, OracleError};
use crate::linalg::{hermitian_eigensystem, CMatrix, LinalgError, C64};
use crate::state::{DensityMatrix, PartitionSpec, PureState, QuantumState, StateError};

/// A marginal with linear entropy at or below this is treated as pure.
pub const PURE_TOL: f64 = 1e-12;
/// Cuts whose smaller side exceeds this use the Gram-matrix form of the
/// pure-state concurrence instead of the minor sum.
const MINOR_SUM_MAX_SIDE: usize = 8;
/// Eigenvalues of ρ below this are dropped when factoring `ρ = W W†`.
const RANK_TOL: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("{0} requires a two-qubit state, got dims {1:?}")]
    NotTwoQubit(&'static str, Vec<usize>),
    #[error("cut must leave at least one party on each side")]
    DegenerateCut,
    #[error("no exact evaluator for a mixed {0:?} state and the oracle is disabled")]
    NoEvaluator(Vec<usize>),
    #[error("unknown measure `{0}` (expected concurrence or eof)")]
    UnknownMeasure(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Concurrence,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Exact,
    Estimate,
}

impl Status {
    /// Estimate if either side is an estimate.
    pub fn join(self, other: Status) -> Status {
        self.max(other)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Exact => "exact",
            Status::Estimate => "estimate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PureState,
    PureMarginal,
    ProductFactor,
    Wootters,
    AssistanceClosedForm,
    EofWootters,
    ConvexRoofMin,
    ConvexRoofMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub value: f64,
    pub status: Status,
    pub method: Method,
}

impl MeasureValue {
    pub fn exact(value: f64, method: Method) -> Self {
        Self {
            value,
            status: Status::Exact,
            method,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::Exact
    }
}

/// A correlation measure together with its monogamy exponent β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureDescriptor {
    pub kind: MeasureKind,
    pub beta: f64,
}

impl MeasureDescriptor {
    pub const CONCURRENCE: Self = Self {
        kind: MeasureKind::Concurrence,
        beta: 2.0,
    };
    pub const EOF: Self = Self {
        kind: MeasureKind::Eof,
        beta: std::f64::consts::SQRT_2,
    };

    pub fn from_name(name: &str) -> Result<Self, MeasureError> {
        match name.to_ascii_lowercase().as_str() {
            "concurrence" | "c" => Ok(Self::CONCURRENCE),
            "eof" | "e" => Ok(Self::EOF),
            _ => Err(MeasureError::UnknownMeasure(name.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Eof => "eof",
        }
    }

    /// Short symbol used in printed labels (`C(AB)`, `E(AB)`).
    pub fn symbol(&self) -> &'static str {
        match self.kind {
            MeasureKind::Concurrence => "C",
            MeasureKind::Eof => "E",
        }
    }
}

/// Base-2 entropy of a probability vector, `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)`
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

/// Spectrum of a small Hermitian PSD matrix, closed form for 2×2.
pub(crate) fn psd_spectrum(g: &CMatrix) -> Vec<f64> {
    if g.rows() == 1 {
        return vec![g[(0, 0)].re.max(0.0)];
    }
    if g.rows() == 2 {
        let a = g[(0, 0)].re;
        let d = g[(1, 1)].re;
        let b = g[(0, 1)].norm_sqr();
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b).sqrt();
        return vec![(mean + disc).max(0.0), (mean - disc).max(0.0)];
    }
    match hermitian_eigensystem(g) {
        Ok(eig) => eig.values.into_iter().map(|l| l.max(0.0)).collect(),
        Err(_) => Vec::new(),
    }
}

/// `M M†` or `M† M`, whichever is smaller; both share the nonzero spectrum.
pub(crate) fn small_gram(m: &CMatrix) -> CMatrix {
    if m.rows() <= m.cols() {
        m * &m.adjoint()
    } else {
        &m.adjoint() * m
    }
}

/// Weighted pure-state value `‖ψ‖² · Q(ψ/‖ψ‖)` for the unnormalized state
/// whose bipartite coefficient matrix is `m`.
pub(crate) fn weighted_pure_value(kind: MeasureKind, m: &CMatrix) -> f64 {
    let n2 = m.frobenius_norm_sqr();
    if n2 == 0.0 {
        return 0.0;
    }
    match kind {
        MeasureKind::Concurrence => 2.0 * schmidt_pair_sum(m).sqrt(),
        MeasureKind::Eof => {
            let probs: Vec<f64> = psd_spectrum(&small_gram(m)).into_iter().map(|l| l / n2).collect();
            n2 * shannon_entropy(&probs)
        }
    }
}

/// Second elementary symmetric polynomial of the (unnormalized) Schmidt
/// weights of `m`, so that the weighted concurrence is `2√·`.
pub(crate) fn schmidt_pair_sum(m: &CMatrix) -> f64 {
    if m.rows().min(m.cols()) <= MINOR_SUM_MAX_SIDE {
        minor_square_sum(m)
    } else {
        let n2 = m.frobenius_norm_sqr();
        (0.5 * (n2 * n2 - small_gram(m).frobenius_norm_sqr())).max(0.0)
    }
}

/// `Σ |M_ik M_jl − M_il M_jk|²` over all 2×2 minors of `M`.
///
/// By Cauchy–Binet this is the second elementary symmetric polynomial of the
/// Schmidt weights, i.e. `(‖M‖⁴ − Tr (MM†)²)/2`, but summed from
/// nonnegative terms so nearly-product states keep full relative accuracy.
fn minor_square_sum(m: &CMatrix) -> f64 {
    let (rows, cols) = (m.rows(), m.cols());
    let mut total = 0.0;
    for i in 0..rows {
        for j in i + 1..rows {
            let (ri, rj) = (m.row(i), m.row(j));
            for k in 0..cols {
                for l in k + 1..cols {
                    total += (ri[k] * rj[l] - ri[l] * rj[k]).norm_sqr();
                }
            }
        }
    }
    total
}

/// `C(|ψ⟩) = √(2[1 − Tr ρ_A²])` across the given cut.
pub fn concurrence_pure(psi: &PureState, cut: &PartitionSpec) -> Result<MeasureValue, MeasureError> {
    pure_value(MeasureKind::Concurrence, psi, cut)
}

/// Von Neumann entropy (base 2) of the reduced state across the cut.
pub fn eof_pure(psi: &PureState, cut: &PartitionSpec) -> Result<MeasureValue, MeasureError> {
    pure_value(MeasureKind::Eof, psi, cut)
}

fn pure_value(kind: MeasureKind, psi: &PureState, cut: &PartitionSpec) -> Result<MeasureValue, MeasureError> {
    if cut.parties() != psi.parties() {
        return Err(StateError::IndexOutOfRange {
            index: cut.parties(),
            parties: psi.parties(),
        }
        .into());
    }
    if cut.rest().is_empty() {
        return Err(MeasureError::DegenerateCut);
    }
    let m = psi.bipartite_matrix(cut);
    Ok(MeasureValue::exact(
        weighted_pure_value(kind, &m),
        Method::PureState,
    ))
}

fn require_two_qubit(what: &'static str, rho: &DensityMatrix) -> Result<(), MeasureError> {
    if rho.dims() != [2, 2] {
        return Err(MeasureError::NotTwoQubit(what, rho.dims().to_vec()));
    }
    Ok(())
}

/// The descending `λ_i` shared by the Wootters concurrence and the
/// concurrence of assistance: square roots of the eigenvalues of `ρ ρ̃`.
///
/// With `ρ = W W†` (eigenvectors scaled by `√λ`), the `λ_i` are the singular
/// values of the symmetric matrix `Wᵀ (σ_y⊗σ_y) W`. They are read off as the
/// positive eigenvalues of the Hermitian embedding `[[0, τ], [τ†, 0]]`, which
/// avoids square-rooting near-zero eigenvalues of `√ρ ρ̃ √ρ`.
pub fn spin_flip_lambdas(rho: &DensityMatrix) -> Result<[f64; 4], MeasureError> {
    require_two_qubit("spin-flip spectrum", rho)?;
    let eig = rho.eigensystem()?;
    let cols: Vec<usize> = (0..4).filter(|&k| eig.values[k] > RANK_TOL).collect();
    let r = cols.len();
    let mut lambdas = [0.0; 4];
    if r == 0 {
        return Ok(lambdas);
    }
    let w = CMatrix::from_fn(4, r, |i, j| {
        eig.vectors[(i, cols[j])] * eig.values[cols[j]].sqrt()
    });
    // σ_y ⊗ σ_y in the |00⟩,|01⟩,|10⟩,|11⟩ basis.
    let yy = CMatrix::from_real_rows(&[
        &[0.0, 0.0, 0.0, -1.0],
        &[0.0, 0.0, 1.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[-1.0, 0.0, 0.0, 0.0],
    ]);
    let tau = &(&w.transpose() * &yy) * &w;
    let embed = CMatrix::from_fn(2 * r, 2 * r, |i, j| match (i < r, j < r) {
        (true, false) => tau[(i, j - r)],
        (false, true) => tau[(j, i - r)].conj(),
        _ => C64::new(0.0, 0.0),
    });
    let spec = hermitian_eigensystem(&embed)?;
    for (slot, v) in lambdas.iter_mut().zip(spec.values.iter().take(r)) {
        *slot = v.max(0.0);
    }
    Ok(lambdas)
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue, MeasureError> {
    let l = spin_flip_lambdas(rho)?;
    Ok(MeasureValue::exact(
        (l[0] - l[1] - l[2] - l[3]).max(0.0),
        Method::Wootters,
    ))
}

/// Concurrence of assistance `λ₁ + λ₂ + λ₃ + λ₄`.
pub fn concurrence_assistance_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue, MeasureError> {
    let l = spin_flip_lambdas(rho)?;
    Ok(MeasureValue::exact(l.iter().sum(), Method::AssistanceClosedForm))
}

/// `E = h((1 + √(1 − C²))/2)` from a concurrence value.
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue, MeasureError> {
    let c = concurrence_two_qubit(rho)?.value;
    Ok(MeasureValue::exact(eof_from_concurrence(c), Method::EofWootters))
}

/// Entanglement of formation of a pure state (any cut) or a two-qubit mixed
/// state (the cut is then party 0 | party 1).
pub fn eof(state: &QuantumState, cut: &PartitionSpec) -> Result<MeasureValue, MeasureError> {
    match state {
        QuantumState::Pure(psi) => eof_pure(psi, cut),
        QuantumState::Mixed(rho) => eof_two_qubit(rho),
    }
}

/// Evaluates `Q` across `cut` (A-side = `cut.keep()`), choosing the exact
/// route where one exists:
///
/// * pure input, or a mixed input whose linear entropy is below `1e-12`;
/// * parties whose own marginal is pure factor out of the state and are
///   dropped before looking further;
/// * two-qubit mixed states use the spin-flip closed forms.
///
/// Anything else goes to the convex-roof oracle (minimum direction) when
/// `oracle` is given, and is an error otherwise.
pub fn measure_eval(
    q: &MeasureDescriptor,
    state: &QuantumState,
    cut: &PartitionSpec,
    oracle: Option<&OracleConfig>,
) -> Result<MeasureValue, MeasureError> {
    match state {
        QuantumState::Pure(psi) => pure_value(q.kind, psi, cut),
        QuantumState::Mixed(rho) => mixed_value(q.kind, rho, cut, oracle),
    }
}

fn mixed_value(
    kind: MeasureKind,
    rho: &DensityMatrix,
    cut: &PartitionSpec,
    oracle: Option<&OracleConfig>,
) -> Result<MeasureValue, MeasureError> {
    if cut.parties() != rho.parties() {
        return Err(StateError::IndexOutOfRange {
            index: cut.parties(),
            parties: rho.parties(),
        }
        .into());
    }
    if cut.rest().is_empty() {
        return Err(MeasureError::DegenerateCut);
    }
    if let Some(psi) = rho.as_pure(PURE_TOL) {
        let v = pure_value(kind, &psi, cut)?;
        return Ok(MeasureValue::exact(v.value, Method::PureMarginal));
    }

    // ρ = ρ_k ⊗ ρ_rest whenever ρ_k is pure; such parties carry no
    // correlation across any cut.
    let n = rho.parties();
    let factored: Vec<usize> = if n > 1 {
        (0..n)
            .filter(|&k| {
                rho.partial_trace(&[k])
                    .map(|m| m.linear_entropy() <= PURE_TOL)
                    .unwrap_or(false)
            })
            .collect()
    } else {
        Vec::new()
    };
    if !factored.is_empty() {
        let keep: Vec<usize> = cut
            .keep()
            .iter()
            .copied()
            .filter(|k| !factored.contains(k))
            .collect();
        let rest: Vec<usize> = cut
            .rest()
            .iter()
            .copied()
            .filter(|k| !factored.contains(k))
            .collect();
        if keep.is_empty() || rest.is_empty() {
            return Ok(MeasureValue::exact(0.0, Method::ProductFactor));
        }
        let order: Vec<usize> = keep.iter().chain(&rest).copied().collect();
        let reduced = rho.partial_trace(&order)?;
        let new_keep: Vec<usize> = (0..keep.len()).collect();
        let new_cut = PartitionSpec::new(&new_keep, order.len())?;
        let v = mixed_value(kind, &reduced, &new_cut, oracle)?;
        let method = match v.method {
            Method::PureState | Method::PureMarginal => Method::ProductFactor,
            m => m,
        };
        return Ok(MeasureValue { method, ..v });
    }

    if rho.dims() == [2, 2] {
        return match kind {
            MeasureKind::Concurrence => concurrence_two_qubit(rho),
            MeasureKind::Eof => eof_two_qubit(rho),
        };
    }

    match oracle {
        Some(cfg) => Ok(convex_roof_oracle(rho, cut, kind, Direction::Min, cfg)?),
        None => Err(MeasureError::NoEvaluator(rho.dims().to_vec())),
    }
}

/// Concurrence of assistance of the two-party marginal; only two-qubit
/// marginals have a closed form.
pub fn assistance_eval(rho: &DensityMatrix) -> Result<MeasureValue, MeasureError> {
    concurrence_assistance_two_qubit(rho)
}
