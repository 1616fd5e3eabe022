//! Monogamy bounds, residual recursions and their certification.
//!
//! Party 0 is always the focus `A`; parties `1..N` are `B₁ … B_{N−1}`.
//! Every measure value is fetched through an [`Evaluator`], which caches
//! values per (focus, subset) so that sweeping α reuses the same numbers.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::convex_roof::OracleConfig;
use crate::measures::{
    assistance_eval, measure_eval, MeasureDescriptor, MeasureError, MeasureKind, MeasureValue, Status,
};
use crate::rng::derive_seed;
use crate::state::{PartitionSpec, QuantumState, StateError};

/// A lower bound is satisfied when `lhs − rhs ≥ −SATISFY_TOL`.
pub const SATISFY_TOL: f64 = 1e-9;
/// `|gap|` at or below this marks the bound as saturated.
pub const SATURATE_TOL: f64 = 1e-7;
/// Slack used when checking ordering hypotheses.
pub const PREMISE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("alpha {alpha} is below beta {beta}")]
    AlphaBelowBeta { alpha: f64, beta: f64 },
    #[error("exponent must be finite and positive")]
    BadExponent,
    #[error("needs at least {needed} parties, state has {got}")]
    TooFewParties { needed: usize, got: usize },
    #[error("needs exactly {needed} parties, state has {got}")]
    WrongPartyCount { needed: usize, got: usize },
    #[error("split index {m} outside 0..={max}")]
    SplitOutOfRange { m: usize, max: usize },
    #[error("requires a pure global state")]
    NotPure,
    #[error("requires every party to be a qubit")]
    NotQubits,
    #[error("defined for concurrence only")]
    ConcurrenceOnly,
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    State(#[from] StateError),
}

/// The power α applied to measure values, with the measure's exponent β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ExponentParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, EngineError> {
        if !(beta.is_finite() && beta > 0.0 && alpha.is_finite()) {
            return Err(EngineError::BadExponent);
        }
        if alpha < beta {
            return Err(EngineError::AlphaBelowBeta { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    pub fn for_measure(alpha: f64, measure: &MeasureDescriptor) -> Result<Self, EngineError> {
        Self::new(alpha, measure.beta)
    }

    /// `α/β`
    pub fn ratio(&self) -> f64 {
        self.alpha / self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundId {
    Score,
    Theorem1,
    Theorem2,
    Theorem3,
    Corollary1,
    Lemma,
    Theorem4,
    Theorem5,
    CaUpper,
    Theorem6,
    Corollary2,
}

impl BoundId {
    pub fn name(&self) -> &'static str {
        match self {
            BoundId::Score => "score",
            BoundId::Theorem1 => "theorem1",
            BoundId::Theorem2 => "theorem2",
            BoundId::Theorem3 => "theorem3",
            BoundId::Corollary1 => "corollary1",
            BoundId::Lemma => "lemma",
            BoundId::Theorem4 => "theorem4",
            BoundId::Theorem5 => "theorem5",
            BoundId::CaUpper => "ca_upper",
            BoundId::Theorem6 => "theorem6",
            BoundId::Corollary2 => "corollary2",
        }
    }

    /// Upper bounds compare `rhs − lhs` instead of `lhs − rhs`.
    pub fn is_upper(&self) -> bool {
        matches!(self, BoundId::CaUpper)
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A value assembled from measure values, carrying their joint status.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub value: f64,
    pub status: Status,
}

impl Term {
    fn zero() -> Self {
        Term {
            value: 0.0,
            status: Status::Exact,
        }
    }

    fn add(self, other: Term, weight: f64) -> Term {
        Term {
            value: self.value + weight * other.value,
            status: self.status.join(other.status),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundResult {
    pub id: BoundId,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub satisfied: bool,
    pub premise_ok: bool,
    pub status: Status,
    pub saturated: bool,
    /// Exponent applied to the measure values in this row (α, or 2 for the
    /// squared-concurrence bounds).
    pub power: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl BoundResult {
    fn new(id: BoundId, lhs: f64, rhs: Term, lhs_status: Status, power: f64) -> Self {
        let gap = if id.is_upper() {
            rhs.value - lhs
        } else {
            lhs - rhs.value
        };
        Self {
            id,
            lhs,
            rhs: rhs.value,
            gap,
            satisfied: gap >= -SATISFY_TOL,
            premise_ok: true,
            status: lhs_status.join(rhs.status),
            saturated: gap.abs() <= SATURATE_TOL,
            power,
            detail: None,
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }

    /// A certified counterexample: exact, premise holds, inequality fails.
    pub fn is_violation(&self) -> bool {
        self.status == Status::Exact && self.premise_ok && !self.satisfied
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Max,
    Mean,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    /// Party indices of the subset, in recursion order.
    pub subset: Vec<usize>,
    pub value: f64,
    pub status: Status,
}

/// One level of the recursion: all candidate subsets of a given size and the
/// term carried forward (the arg-max under [`Policy::Max`], the mean under
/// [`Policy::Mean`]).
#[derive(Debug, Clone, Serialize)]
pub struct ResidualLevel {
    pub size: usize,
    pub candidates: Vec<ResidualEntry>,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected: Option<Vec<usize>>,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualTable {
    pub policy: Policy,
    pub focus: usize,
    /// Ordered parties the recursion walks over.
    pub parties: Vec<usize>,
    pub weighted: bool,
    pub alpha: f64,
    pub levels: Vec<ResidualLevel>,
}

impl ResidualTable {
    /// Sum of the carried terms over all levels.
    pub fn total(&self) -> Term {
        self.levels.iter().fold(Term::zero(), |acc, l| {
            acc.add(
                Term {
                    value: l.value,
                    status: l.status,
                },
                1.0,
            )
        })
    }

    pub fn entry(&self, subset: &[usize]) -> Option<&ResidualEntry> {
        let mut want = subset.to_vec();
        want.sort_unstable();
        self.levels.iter().flat_map(|l| &l.candidates).find(|e| {
            let mut s = e.subset.clone();
            s.sort_unstable();
            s == want
        })
    }

    /// Whether any residual came out negative (reported raw, never clamped).
    pub fn has_negative(&self) -> bool {
        self.levels
            .iter()
            .flat_map(|l| &l.candidates)
            .any(|e| e.value < -SATISFY_TOL)
    }
}

/// Choice of the split index `m` for the weighted bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    /// Scan every `m` and keep the largest right-hand side whose ordering
    /// hypothesis holds.
    Auto,
    Fixed(usize),
}

/// One side of the two-party-focus bound: `focus` plays `A`, `partner` is
/// relabelled `C₀`, and the remaining parties follow in ascending order.
#[derive(Debug, Clone, Serialize)]
pub struct Branch {
    pub focus: usize,
    pub partner: usize,
    /// `C₀, C₁, …` as party indices.
    pub order: Vec<usize>,
    pub pair_sum: f64,
    pub residual: f64,
    pub status: Status,
    pub table: ResidualTable,
}

impl Branch {
    pub fn value(&self) -> f64 {
        self.pair_sum + self.residual
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem6Outcome {
    pub bound: BoundResult,
    pub branches: Vec<Branch>,
    /// Larger branch pair sum without residual terms.
    pub comparison: f64,
}

/// Cached measure evaluation over the marginals of one state.
pub struct Evaluator {
    state: QuantumState,
    measure: MeasureDescriptor,
    oracle: OracleConfig,
    cuts: RefCell<HashMap<(usize, Vec<usize>), MeasureValue>>,
    assists: RefCell<HashMap<(usize, usize), MeasureValue>>,
}

impl Evaluator {
    /// `oracle.seed` is the master seed; each marginal derives its own.
    pub fn new(state: impl Into<QuantumState>, measure: MeasureDescriptor, oracle: OracleConfig) -> Self {
        Self {
            state: state.into(),
            measure,
            oracle,
            cuts: RefCell::new(HashMap::new()),
            assists: RefCell::new(HashMap::new()),
        }
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    pub fn measure(&self) -> &MeasureDescriptor {
        &self.measure
    }

    pub fn parties(&self) -> usize {
        self.state.parties()
    }

    fn need(&self, needed: usize) -> Result<(), EngineError> {
        let got = self.parties();
        if got < needed {
            Err(EngineError::TooFewParties { needed, got })
        } else {
            Ok(())
        }
    }

    fn need_pure_qubits(&self) -> Result<(), EngineError> {
        if self.measure.kind != MeasureKind::Concurrence {
            return Err(EngineError::ConcurrenceOnly);
        }
        if self.state.as_pure().is_none() {
            return Err(EngineError::NotPure);
        }
        if self.state.dims().iter().any(|&d| d != 2) {
            return Err(EngineError::NotQubits);
        }
        Ok(())
    }

    /// `Q_{focus|others}` on the marginal over `focus ∪ others`.
    pub fn cut(&self, focus: usize, others: &[usize]) -> Result<MeasureValue, EngineError> {
        let mut others = others.to_vec();
        others.sort_unstable();
        let key = (focus, others);
        if let Some(v) = self.cuts.borrow().get(&key) {
            return Ok(*v);
        }
        let mut keep = vec![key.0];
        keep.extend(&key.1);
        let marginal = self.state.marginal(&keep)?;
        let spec = PartitionSpec::new(&[0], keep.len())?;
        let mut tags: Vec<u64> = vec![self.measure.kind as u64, keep.len() as u64];
        tags.extend(keep.iter().map(|&k| k as u64));
        let oracle = self.oracle.with_seed(derive_seed(self.oracle.seed, &tags));
        let v = measure_eval(&self.measure, &marginal, &spec, Some(&oracle))?;
        self.cuts.borrow_mut().insert(key, v);
        Ok(v)
    }

    pub fn pair(&self, i: usize, j: usize) -> Result<MeasureValue, EngineError> {
        self.cut(i, &[j])
    }

    /// Concurrence of assistance of the two-qubit marginal `ρ_ij`.
    pub fn assistance(&self, i: usize, j: usize) -> Result<MeasureValue, EngineError> {
        let key = (i.min(j), i.max(j));
        if let Some(v) = self.assists.borrow().get(&key) {
            return Ok(*v);
        }
        let rho = self.state.marginal(&[key.0, key.1])?.density();
        let v = assistance_eval(&rho)?;
        self.assists.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn powered(&self, focus: usize, others: &[usize], power: f64) -> Result<Term, EngineError> {
        let v = self.cut(focus, others)?;
        Ok(Term {
            value: v.value.powf(power),
            status: v.status,
        })
    }

    fn whole_cut(&self, power: f64) -> Result<Term, EngineError> {
        let rest: Vec<usize> = (1..self.parties()).collect();
        self.powered(0, &rest, power)
    }

    /// `Σ_i w_i Q^α_{AB_i}` with unit weights when `weights` is `None`.
    fn pair_sum(&self, power: f64, weights: Option<&[f64]>) -> Result<Term, EngineError> {
        let mut acc = Term::zero();
        for j in 1..self.parties() {
            let w = weights.map_or(1.0, |w| w[j - 1]);
            acc = acc.add(self.powered(0, &[j], power)?, w);
        }
        Ok(acc)
    }

    /// `Q^α_{A|B₁⋯} − Σ Q^α_{AB_i}` reported as a lower-bound row.
    pub fn score(&self, p: &ExponentParams) -> Result<BoundResult, EngineError> {
        self.need(3)?;
        let lhs = self.whole_cut(p.alpha)?;
        let rhs = self.pair_sum(p.alpha, None)?;
        Ok(BoundResult::new(
            BoundId::Score,
            lhs.value,
            rhs,
            lhs.status,
            p.alpha,
        ))
    }

    pub fn theorem1(&self, p: &ExponentParams) -> Result<BoundResult, EngineError> {
        self.need(3)?;
        let lhs = self.whole_cut(p.alpha)?;
        let rhs = self.pair_sum(p.alpha, None)?;
        Ok(BoundResult::new(
            BoundId::Theorem1,
            lhs.value,
            rhs,
            lhs.status,
            p.alpha,
        ))
    }

    /// `Q^α_{A|BC} − Q^α_{AB} − Q^α_{AC}` for `triple = [A, B, C]`, unclamped.
    pub fn residual_tripartite(&self, triple: [usize; 3], alpha: f64) -> Result<Term, EngineError> {
        let [a, b, c] = triple;
        let whole = self.powered(a, &[b, c], alpha)?;
        let ab = self.powered(a, &[b], alpha)?;
        let ac = self.powered(a, &[c], alpha)?;
        Ok(whole.add(ab, -1.0).add(ac, -1.0))
    }

    /// Residual recursion over `parties` with `focus` as `A`.
    ///
    /// Under [`Policy::Max`], level `k = 2 … n−1` considers the `k+1`
    /// subsets of size `k` obtained by omitting one of the first `k+1`
    /// parties; each candidate subtracts its weighted pair terms and every
    /// previously selected residual, and the largest one is carried (ties go
    /// to the lexicographically first subset). Under [`Policy::Mean`] the
    /// same candidates are averaged instead: level `k = 3 … n` is the mean
    /// over the `(k−1)`-subsets of the first `k` parties.
    pub fn residuals_over(
        &self,
        focus: usize,
        parties: &[usize],
        policy: Policy,
        alpha: f64,
        weights: Option<&[f64]>,
    ) -> Result<ResidualTable, EngineError> {
        let n = parties.len();
        if n < 3 {
            return Err(EngineError::TooFewParties {
                needed: 4,
                got: n + 1,
            });
        }
        let weight = |pos: usize| weights.map_or(1.0, |w| w[pos]);
        let mut carried = Term::zero();
        let mut levels = Vec::with_capacity(n - 2);
        for size in 2..n {
            let window = size + 1;
            let mut candidates = Vec::with_capacity(window);
            let mut level_status = carried.status;
            // Omitting the last party first yields lexicographic order.
            for omit in (0..window).rev() {
                let positions: Vec<usize> = (0..window).filter(|&q| q != omit).collect();
                let subset: Vec<usize> = positions.iter().map(|&q| parties[q]).collect();
                let mut r = self.powered(focus, &subset, alpha)?;
                for (&q, &party) in positions.iter().zip(&subset) {
                    r = r.add(self.powered(focus, &[party], alpha)?, -weight(q));
                }
                r = r.add(carried, -1.0);
                level_status = level_status.join(r.status);
                candidates.push(ResidualEntry {
                    subset,
                    value: r.value,
                    status: r.status,
                });
            }
            let (value, selected) = match policy {
                Policy::Max => {
                    let mut best = 0;
                    for (i, c) in candidates.iter().enumerate() {
                        if c.value > candidates[best].value {
                            best = i;
                        }
                    }
                    (candidates[best].value, Some(candidates[best].subset.clone()))
                }
                Policy::Mean => {
                    let mean = candidates.iter().map(|c| c.value).sum::<f64>() / candidates.len() as f64;
                    (mean, None)
                }
            };
            carried = carried.add(
                Term {
                    value,
                    status: level_status,
                },
                1.0,
            );
            levels.push(ResidualLevel {
                size,
                candidates,
                value,
                selected,
                status: level_status,
            });
        }
        Ok(ResidualTable {
            policy,
            focus,
            parties: parties.to_vec(),
            weighted: weights.is_some(),
            alpha,
            levels,
        })
    }

    /// Residual table with `A` = party 0 over `B₁ … B_{N−1}`.
    pub fn residual_table(&self, p: &ExponentParams, policy: Policy) -> Result<ResidualTable, EngineError> {
        self.need(4)?;
        let parties: Vec<usize> = (1..self.parties()).collect();
        self.residuals_over(0, &parties, policy, p.alpha, None)
    }

    /// Pair sum plus the carried residual terms: `theorem2` (N = 4) or
    /// `theorem3` under the max policy, `corollary1` under the mean policy.
    pub fn with_residuals(&self, p: &ExponentParams, policy: Policy) -> Result<BoundResult, EngineError> {
        let table = self.residual_table(p, policy)?;
        let id = match (policy, self.parties()) {
            (Policy::Max, 4) => BoundId::Theorem2,
            (Policy::Max, _) => BoundId::Theorem3,
            (Policy::Mean, _) => BoundId::Corollary1,
        };
        let lhs = self.whole_cut(p.alpha)?;
        let rhs = self.pair_sum(p.alpha, None)?.add(table.total(), 1.0);
        let mut row = BoundResult::new(id, lhs.value, rhs, lhs.status, p.alpha);
        if table.has_negative() {
            row = row.with_detail("negative residual entries".into());
        }
        Ok(row)
    }

    /// Three-party bound `Q^α_{A|BC} ≥ Q^α_{AB} + (α/β) Q^α_{AC}` with `B`
    /// and `C` ordered so that `Q_{AB} ≥ Q_{AC}`.
    pub fn lemma(&self, p: &ExponentParams) -> Result<BoundResult, EngineError> {
        let got = self.parties();
        if got != 3 {
            return Err(EngineError::WrongPartyCount { needed: 3, got });
        }
        let (mut b, mut c) = (1, 2);
        let swapped = self.pair(0, 1)?.value < self.pair(0, 2)?.value;
        if swapped {
            std::mem::swap(&mut b, &mut c);
        }
        let lhs = self.whole_cut(p.alpha)?;
        let rhs = self
            .powered(0, &[b], p.alpha)?
            .add(self.powered(0, &[c], p.alpha)?, p.ratio());
        let row = BoundResult::new(BoundId::Lemma, lhs.value, rhs, lhs.status, p.alpha);
        Ok(if swapped {
            row.with_detail("B and C swapped".into())
        } else {
            row
        })
    }

    /// Coefficients of `Q^α_{AB_i}`, `i = 1 … N−1`, for split index `m`:
    /// `r^{i−1}` for `i ≤ m`, `r^{m+1}` for `m < i ≤ N−2`, `r^m` for the last.
    pub fn split_weights(&self, p: &ExponentParams, m: usize) -> Result<Vec<f64>, EngineError> {
        self.need(4)?;
        let n = self.parties();
        if m > n - 2 {
            return Err(EngineError::SplitOutOfRange { m, max: n - 2 });
        }
        let r = p.ratio();
        Ok((1..n)
            .map(|i| {
                if i <= m {
                    r.powi(i as i32 - 1)
                } else if i <= n - 2 {
                    r.powi(m as i32 + 1)
                } else {
                    r.powi(m as i32)
                }
            })
            .collect())
    }

    /// Ordering hypothesis for split `m`: `Q_{AB_i} ≥ Q_{A|B_{i+1}⋯}` for
    /// `i ≤ m` and `Q_{AB_j} ≤ Q_{A|B_{j+1}⋯}` for `m < j ≤ N−2`. The second
    /// value reports whether every compared quantity was exact.
    pub fn split_premise(&self, m: usize) -> Result<(bool, Status), EngineError> {
        let n = self.parties();
        let mut ok = true;
        let mut status = Status::Exact;
        for i in 1..=n - 2 {
            let tail: Vec<usize> = (i + 1..n).collect();
            let pair = self.pair(0, i)?;
            let rest = self.cut(0, &tail)?;
            status = status.join(pair.status).join(rest.status);
            ok &= if i <= m {
                pair.value >= rest.value - PREMISE_TOL
            } else {
                pair.value <= rest.value + PREMISE_TOL
            };
        }
        Ok((ok, status))
    }

    fn resolve_split(&self, p: &ExponentParams, split: Split) -> Result<usize, EngineError> {
        match split {
            Split::Fixed(m) => {
                self.split_weights(p, m)?;
                Ok(m)
            }
            Split::Auto => {
                let mut best: Option<(usize, f64)> = None;
                for m in 0..=self.parties() - 2 {
                    if !self.split_premise(m)?.0 {
                        continue;
                    }
                    let rhs = self.pair_sum(p.alpha, Some(&self.split_weights(p, m)?))?.value;
                    if best.is_none_or(|(_, b)| rhs > b) {
                        best = Some((m, rhs));
                    }
                }
                Ok(best.map_or(0, |(m, _)| m))
            }
        }
    }

    fn split_row(
        &self,
        id: BoundId,
        p: &ExponentParams,
        m: usize,
        rhs: Term,
    ) -> Result<BoundResult, EngineError> {
        let (ok, premise_status) = self.split_premise(m)?;
        let lhs = self.whole_cut(p.alpha)?;
        let mut row = BoundResult::new(id, lhs.value, rhs, lhs.status, p.alpha);
        row.premise_ok = ok;
        let mut detail = format!("m={m}");
        if premise_status == Status::Estimate {
            detail.push_str(", premise from estimates");
        }
        Ok(row.with_detail(detail))
    }

    /// Weighted pair sum with the split-index coefficient pattern.
    pub fn theorem4(&self, p: &ExponentParams, split: Split) -> Result<BoundResult, EngineError> {
        self.need(4)?;
        let m = self.resolve_split(p, split)?;
        let rhs = self.pair_sum(p.alpha, Some(&self.split_weights(p, m)?))?;
        self.split_row(BoundId::Theorem4, p, m, rhs)
    }

    /// [`Evaluator::theorem4`] for every admissible split index.
    pub fn theorem4_scan(&self, p: &ExponentParams) -> Result<Vec<BoundResult>, EngineError> {
        self.need(4)?;
        (0..=self.parties() - 2)
            .map(|m| self.theorem4(p, Split::Fixed(m)))
            .collect()
    }

    /// Weighted residual table: the max-policy recursion with the
    /// split-index coefficients on the subtracted pair terms.
    pub fn weighted_residual_table(
        &self,
        p: &ExponentParams,
        m: usize,
    ) -> Result<ResidualTable, EngineError> {
        let weights = self.split_weights(p, m)?;
        let parties: Vec<usize> = (1..self.parties()).collect();
        self.residuals_over(0, &parties, Policy::Max, p.alpha, Some(&weights))
    }

    /// Weighted pair sum plus weighted residual terms.
    pub fn theorem5(&self, p: &ExponentParams, split: Split) -> Result<BoundResult, EngineError> {
        self.need(4)?;
        let m = self.resolve_split(p, split)?;
        let weights = self.split_weights(p, m)?;
        let table = self.weighted_residual_table(p, m)?;
        let rhs = self.pair_sum(p.alpha, Some(&weights))?.add(table.total(), 1.0);
        self.split_row(BoundId::Theorem5, p, m, rhs)
    }

    /// `C²_{A|B₁⋯} ≤ Σ_i C_a²(ρ_{AB_i})` for pure multi-qubit states.
    pub fn ca_upper(&self) -> Result<BoundResult, EngineError> {
        self.need(3)?;
        self.need_pure_qubits()?;
        let lhs = self.whole_cut(2.0)?;
        let mut rhs = Term::zero();
        for j in 1..self.parties() {
            let ca = self.assistance(0, j)?;
            rhs = rhs.add(
                Term {
                    value: ca.value * ca.value,
                    status: ca.status,
                },
                1.0,
            );
        }
        Ok(BoundResult::new(
            BoundId::CaUpper,
            lhs.value,
            rhs,
            lhs.status,
            2.0,
        ))
    }

    /// `2(1 − Tr ρ_S²)`, the squared concurrence across `S | rest` of a pure
    /// state.
    fn squared_block(&self, block: &[usize]) -> Result<Term, EngineError> {
        let rho = self.state.marginal(block)?.density();
        Ok(Term {
            value: 2.0 * rho.linear_entropy(),
            status: Status::Exact,
        })
    }

    fn squared_assistance(&self, i: usize, j: usize) -> Result<Term, EngineError> {
        let ca = self.assistance(i, j)?;
        Ok(Term {
            value: ca.value * ca.value,
            status: ca.status,
        })
    }

    /// Branch with `focus` as `A` and `partner` relabelled `C₀`: squared pair
    /// concurrences minus the partner's squared assistance, plus the
    /// max-policy residual terms at power 2.
    pub fn branch(&self, focus: usize, partner: usize) -> Result<Branch, EngineError> {
        let mut order = vec![partner];
        order.extend((0..self.parties()).filter(|&k| k != focus && k != partner));
        let mut pairs = Term::zero();
        for &c in &order {
            let other = if c == partner { focus } else { c };
            pairs = pairs
                .add(self.powered(focus, &[c], 2.0)?, 1.0)
                .add(self.squared_assistance(partner, other)?, -1.0);
        }
        let table = self.residuals_over(focus, &order, Policy::Max, 2.0, None)?;
        let residual = table.total();
        Ok(Branch {
            focus,
            partner,
            order,
            pair_sum: pairs.value,
            residual: residual.value,
            status: pairs.status.join(residual.status),
            table,
        })
    }

    /// Lower bound on `C²_{AB|C₁⋯}` from the larger of the two branches.
    pub fn theorem6(&self) -> Result<Theorem6Outcome, EngineError> {
        self.need(4)?;
        self.need_pure_qubits()?;
        let lhs = self.squared_block(&[0, 1])?;
        let a = self.branch(0, 1)?;
        let b = self.branch(1, 0)?;
        let chosen = if b.value() > a.value() { &b } else { &a };
        let rhs = Term {
            value: chosen.value(),
            status: a.status.join(b.status),
        };
        let comparison = a.pair_sum.max(b.pair_sum);
        let order: Vec<String> = chosen.order.iter().map(|k| k.to_string()).collect();
        let row = BoundResult::new(BoundId::Theorem6, lhs.value, rhs, lhs.status, 2.0).with_detail(format!(
            "focus={} order={} comparison={comparison}",
            chosen.focus,
            order.join(",")
        ));
        Ok(Theorem6Outcome {
            bound: row,
            branches: vec![a, b],
            comparison,
        })
    }

    /// Lower bound on `C²_{ABC₁|C₂⋯}`: the larger branch value minus
    /// `J_{C₁} = Σ_x C_a²(C₁, x)`.
    pub fn corollary2(&self) -> Result<BoundResult, EngineError> {
        self.need(6)?;
        self.need_pure_qubits()?;
        let lhs = self.squared_block(&[0, 1, 2])?;
        let a = self.branch(0, 1)?;
        let b = self.branch(1, 0)?;
        let mut jc = Term::zero();
        for x in (0..self.parties()).filter(|&x| x != 2) {
            jc = jc.add(self.squared_assistance(2, x)?, 1.0);
        }
        let rhs = Term {
            value: a.value().max(b.value()) - jc.value,
            status: a.status.join(b.status).join(jc.status),
        };
        Ok(
            BoundResult::new(BoundId::Corollary2, lhs.value, rhs, lhs.status, 2.0).with_detail(format!(
                "J_A={} J_B={} J_C1={}",
                a.value(),
                b.value(),
                jc.value
            )),
        )
    }

    /// Every applicable bound at every α. Bounds whose preconditions fail
    /// are skipped with a note.
    pub fn report(&self, label: &str, alphas: &[f64], split: Split) -> MonogamyReport {
        let n = self.parties();
        let mut notes = Vec::new();
        let squared_rows: Vec<BoundResult> = if n >= 3 && self.need_pure_qubits().is_ok() {
            let mut rows = Vec::new();
            collect(&mut rows, &mut notes, "ca_upper", self.ca_upper());
            if n >= 4 {
                collect(
                    &mut rows,
                    &mut notes,
                    "theorem6",
                    self.theorem6().map(|t| t.bound),
                );
            }
            if n >= 6 {
                collect(&mut rows, &mut notes, "corollary2", self.corollary2());
            }
            rows
        } else {
            Vec::new()
        };

        let mut rows = Vec::with_capacity(alphas.len());
        for &alpha in alphas {
            let mut row = AlphaReport {
                state: label.to_string(),
                measure: self.measure.name().to_string(),
                alpha,
                bounds: Vec::new(),
                residuals: Vec::new(),
                notes: notes.clone(),
            };
            if n < 3 {
                row.notes.push("monogamy bounds need at least 3 parties".into());
                rows.push(row);
                continue;
            }
            let p = match ExponentParams::for_measure(alpha, &self.measure) {
                Ok(p) => p,
                Err(e) => {
                    row.notes.push(e.to_string());
                    rows.push(row);
                    continue;
                }
            };
            let (b, nt) = (&mut row.bounds, &mut row.notes);
            collect(b, nt, "score", self.score(&p));
            collect(b, nt, "theorem1", self.theorem1(&p));
            if n == 3 {
                collect(b, nt, "lemma", self.lemma(&p));
            }
            if n >= 4 {
                collect(b, nt, "theorem3", self.with_residuals(&p, Policy::Max));
                collect(b, nt, "corollary1", self.with_residuals(&p, Policy::Mean));
                collect(b, nt, "theorem4", self.theorem4(&p, split));
                collect(b, nt, "theorem5", self.theorem5(&p, split));
                for policy in [Policy::Max, Policy::Mean] {
                    match self.residual_table(&p, policy) {
                        Ok(t) => row.residuals.push(t),
                        Err(e) => row.notes.push(format!("residuals: {e}")),
                    }
                }
                if let Ok(m) = self.resolve_split(&p, split) {
                    if let Ok(t) = self.weighted_residual_table(&p, m) {
                        row.residuals.push(t);
                    }
                }
            }
            row.bounds.extend(squared_rows.iter().cloned());
            rows.push(row);
        }
        MonogamyReport {
            state: label.to_string(),
            measure: self.measure.name().to_string(),
            alphas: alphas.to_vec(),
            rows,
        }
    }
}

fn collect(
    rows: &mut Vec<BoundResult>,
    notes: &mut Vec<String>,
    name: &str,
    r: Result<BoundResult, EngineError>,
) {
    match r {
        Ok(b) => rows.push(b),
        Err(e) => notes.push(format!("{name} skipped: {e}")),
    }
}

/// Rows for one α.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaReport {
    pub state: String,
    pub measure: String,
    pub alpha: f64,
    pub bounds: Vec<BoundResult>,
    pub residuals: Vec<ResidualTable>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl AlphaReport {
    pub fn bound(&self, id: BoundId) -> Option<&BoundResult> {
        self.bounds.iter().find(|b| b.id == id)
    }
}

#[derive(Debug, Clone)]
pub struct MonogamyReport {
    pub state: String,
    pub measure: String,
    pub alphas: Vec<f64>,
    pub rows: Vec<AlphaReport>,
}

impl MonogamyReport {
    /// Certified violations as `(α, row)`.
    pub fn violations(&self) -> Vec<(f64, &BoundResult)> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.bounds
                    .iter()
                    .filter(|b| b.is_violation())
                    .map(move |b| (r.alpha, b))
            })
            .collect()
    }

    /// Unsatisfied rows that are not certified (estimates or failed premise).
    pub fn warnings(&self) -> Vec<(f64, &BoundResult)> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.bounds
                    .iter()
                    .filter(|b| !b.satisfied && !b.is_violation())
                    .map(move |b| (r.alpha, b))
            })
            .collect()
    }

    /// JSON array with one object per α.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("report serializes")
    }
}
