//! Monte-Carlo search over pure-state decompositions of a mixed state.
//!
//! Every ensemble `{p_i, |ψ_i⟩}` with `m` members realizing a rank-`r`
//! state `ρ = Σ_k λ_k |e_k⟩⟨e_k|` is of the form
//! `√p_i |ψ_i⟩ = Σ_k U_ik √λ_k |e_k⟩` for an `m×r` isometry `U`. The oracle
//! draws Haar-random isometries, keeps the best few, and polishes them with
//! gradient descent on the isometry manifold. Any returned value is
//! attained by an actual decomposition, so the minimum direction is an upper
//! bound on the convex roof and the maximum direction a lower bound on the
//! assistance value.

use thiserror::Error;

use crate::linalg::{CMatrix, C64, ZERO};
use crate::measures::{schmidt_pair_sum, weighted_pure_value, MeasureKind, MeasureValue, Method, Status};
use crate::rng::{complex_normal, rng_from_seed, StateRng};
use crate::state::{bipartite_reshape, DensityMatrix, PartitionSpec, StateError};

pub const MAX_ORACLE_RANK: usize = 8;
/// Eigenvalues of ρ below this are not part of its support.
const SUPPORT_TOL: f64 = 1e-13;
/// Number of best random starts handed to the local search.
const POLISHED_STARTS: usize = 4;
const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-12;
const FD_STEP: f64 = 1e-7;
const SMOOTHING: [f64; 4] = [1e-2, 1e-3, 1e-5, 0.0];

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("state rank {0} exceeds the oracle limit of {MAX_ORACLE_RANK}")]
    RankTooHigh(usize),
    #[error("oracle needs at least one trial")]
    ZeroTrials,
    #[error("cut must leave at least one party on each side")]
    DegenerateCut,
    #[error(transparent)]
    State(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Random decompositions sampled.
    pub trials: usize,
    pub seed: u64,
    /// Gradient iterations spent polishing each of the best starts.
    pub polish_steps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            trials: 2000,
            seed: 0,
            polish_steps: 200,
        }
    }
}

impl OracleConfig {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Detailed oracle output, including the ensemble size used.
#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub value: f64,
    pub rank: usize,
    pub components: usize,
    pub evaluations: usize,
}

struct Problem {
    kind: MeasureKind,
    /// `√λ_k |e_k⟩` reshaped across the cut, flattened row-major.
    basis: Vec<Vec<C64>>,
    rows: usize,
    cols: usize,
    components: usize,
}

impl Problem {
    fn rank(&self) -> usize {
        self.basis.len()
    }

    fn objective(&self, u: &[C64]) -> f64 {
        self.smoothed(u, 0.0)
    }

    /// Objective with each concurrence term `2√S` replaced by
    /// `2(√(S + ε²n⁴) − εn²)`, which is differentiable at product components.
    fn smoothed(&self, u: &[C64], eps: f64) -> f64 {
        let r = self.rank();
        let len = self.rows * self.cols;
        let mut buf = vec![ZERO; len];
        let mut total = 0.0;
        for i in 0..self.components {
            buf.iter_mut().for_each(|z| *z = ZERO);
            for k in 0..r {
                let coeff = u[i * r + k];
                for (b, v) in buf.iter_mut().zip(&self.basis[k]) {
                    *b += coeff * v;
                }
            }
            let m = CMatrix::from_vec(self.rows, self.cols, buf.clone());
            total += match self.kind {
                MeasureKind::Concurrence if eps > 0.0 => {
                    let n2 = m.frobenius_norm_sqr();
                    let en = eps * n2;
                    2.0 * ((schmidt_pair_sum(&m) + en * en).sqrt() - en)
                }
                kind => weighted_pure_value(kind, &m),
            };
        }
        total
    }
}

/// Orthonormalizes the columns of the `m×r` row-major matrix in place
/// (modified Gram–Schmidt).
fn orthonormalize_columns(u: &mut [C64], m: usize, r: usize) {
    for j in 0..r {
        for p in 0..j {
            let dot: C64 = (0..m).map(|i| u[i * r + p].conj() * u[i * r + j]).sum();
            for i in 0..m {
                let up = u[i * r + p];
                u[i * r + j] -= dot * up;
            }
        }
        let norm = (0..m).map(|i| u[i * r + j].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..m {
            u[i * r + j] /= norm;
        }
    }
}

fn random_isometry(rng: &mut StateRng, m: usize, r: usize) -> Vec<C64> {
    let mut u: Vec<C64> = (0..m * r).map(|_| complex_normal(rng)).collect();
    orthonormalize_columns(&mut u, m, r);
    u
}

fn better(direction: Direction, a: f64, b: f64) -> bool {
    match direction {
        Direction::Min => a < b,
        Direction::Max => a > b,
    }
}

/// Projected gradient descent (finite differences, Armijo backtracking,
/// Gram–Schmidt retraction) over a decreasing smoothing schedule. Returns the
/// best exact objective seen at any visited isometry.
fn polish(problem: &Problem, direction: Direction, u: Vec<C64>, value: f64, iterations: usize) -> f64 {
    let sign = match direction {
        Direction::Min => 1.0,
        Direction::Max => -1.0,
    };
    let (m, r) = (problem.components, problem.rank());
    let schedule: &[f64] = match problem.kind {
        MeasureKind::Concurrence => &SMOOTHING,
        MeasureKind::Eof => &[0.0],
    };
    let per_stage = (iterations / schedule.len()).max(1);
    let mut best = value;
    let mut u = u;
    for &eps in schedule {
        let f = |x: &[C64]| sign * problem.smoothed(x, eps);
        let mut fu = f(&u);
        let mut t = INITIAL_STEP;
        for _ in 0..per_stage {
            let grad = tangent(&u, gradient(&f, &u), m, r);
            let gnorm2: f64 = grad.iter().map(|g| g.norm_sqr()).sum();
            if gnorm2 < 1e-30 {
                break;
            }
            let mut accepted = false;
            while t > MIN_STEP {
                let mut trial: Vec<C64> = u.iter().zip(&grad).map(|(x, g)| x - g * t).collect();
                orthonormalize_columns(&mut trial, m, r);
                let ft = f(&trial);
                if ft < fu - 1e-4 * t * gnorm2 {
                    u = trial;
                    fu = ft;
                    t *= 2.0;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
            let exact = problem.objective(&u);
            if better(direction, exact, best) {
                best = exact;
            }
        }
    }
    best
}

/// Removes the component of `g` normal to the isometry manifold at `u`:
/// `g − u·herm(u†g)`.
fn tangent(u: &[C64], mut g: Vec<C64>, m: usize, r: usize) -> Vec<C64> {
    let mut a = vec![ZERO; r * r];
    for p in 0..r {
        for q in 0..r {
            a[p * r + q] = (0..m).map(|i| u[i * r + p].conj() * g[i * r + q]).sum();
        }
    }
    for i in 0..m {
        for q in 0..r {
            let corr: C64 = (0..r)
                .map(|p| u[i * r + p] * (a[p * r + q] + a[q * r + p].conj()) * 0.5)
                .sum();
            g[i * r + q] -= corr;
        }
    }
    g
}

/// Central-difference gradient with respect to real and imaginary parts.
fn gradient(f: &impl Fn(&[C64]) -> f64, u: &[C64]) -> Vec<C64> {
    let mut x = u.to_vec();
    let mut grad = vec![ZERO; u.len()];
    for i in 0..u.len() {
        let orig = x[i];
        x[i] = orig + C64::new(FD_STEP, 0.0);
        let fp = f(&x);
        x[i] = orig - C64::new(FD_STEP, 0.0);
        let fm = f(&x);
        x[i] = orig + C64::new(0.0, FD_STEP);
        let gp = f(&x);
        x[i] = orig - C64::new(0.0, FD_STEP);
        let gm = f(&x);
        x[i] = orig;
        grad[i] = C64::new(fp - fm, gp - gm) / (2.0 * FD_STEP);
    }
    grad
}

/// Runs the decomposition search and returns the full outcome.
pub fn convex_roof_search(
    rho: &DensityMatrix,
    cut: &PartitionSpec,
    kind: MeasureKind,
    direction: Direction,
    config: &OracleConfig,
) -> Result<OracleOutcome, OracleError> {
    if config.trials == 0 {
        return Err(OracleError::ZeroTrials);
    }
    if cut.parties() != rho.parties() {
        return Err(StateError::IndexOutOfRange {
            index: cut.parties(),
            parties: rho.parties(),
        }
        .into());
    }
    if cut.rest().is_empty() {
        return Err(OracleError::DegenerateCut);
    }
    let eig = rho.eigensystem()?;
    let support: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > SUPPORT_TOL)
        .collect();
    let rank = support.len();
    if rank > MAX_ORACLE_RANK {
        return Err(OracleError::RankTooHigh(rank));
    }
    let mut rows = 0;
    let mut cols = 0;
    let basis: Vec<Vec<C64>> = support
        .iter()
        .map(|&k| {
            let scale = eig.values[k].sqrt();
            let v: Vec<C64> = eig.vector(k).into_iter().map(|z| z * scale).collect();
            let m = bipartite_reshape(&v, rho.dims(), cut);
            rows = m.rows();
            cols = m.cols();
            m.as_slice().to_vec()
        })
        .collect();
    let components = if rank <= 1 { rank } else { rank + 2 };
    let problem = Problem {
        kind,
        basis,
        rows,
        cols,
        components,
    };
    if rank <= 1 {
        let value = if rank == 0 {
            0.0
        } else {
            problem.objective(&[C64::new(1.0, 0.0)])
        };
        return Ok(OracleOutcome {
            value,
            rank,
            components,
            evaluations: 1,
        });
    }

    let mut rng = rng_from_seed(config.seed);
    let mut best: Vec<(f64, Vec<C64>)> = Vec::with_capacity(POLISHED_STARTS + 1);
    for _ in 0..config.trials {
        let u = random_isometry(&mut rng, components, rank);
        let v = problem.objective(&u);
        let pos = best
            .iter()
            .position(|(bv, _)| better(direction, v, *bv))
            .unwrap_or(best.len());
        if pos < POLISHED_STARTS {
            best.insert(pos, (v, u));
            best.truncate(POLISHED_STARTS);
        }
    }
    let mut evaluations = config.trials;
    let mut value = best[0].0;
    for (v, u) in best {
        let polished = polish(&problem, direction, u, v, config.polish_steps);
        evaluations += config.polish_steps;
        if better(direction, polished, value) {
            value = polished;
        }
    }
    Ok(OracleOutcome {
        value,
        rank,
        components,
        evaluations,
    })
}

/// Best ensemble-average pure-state value found across `cut`.
///
/// Rank-one input has a unique decomposition and is reported as exact.
pub fn convex_roof_oracle(
    rho: &DensityMatrix,
    cut: &PartitionSpec,
    kind: MeasureKind,
    direction: Direction,
    config: &OracleConfig,
) -> Result<MeasureValue, OracleError> {
    let out = convex_roof_search(rho, cut, kind, direction, config)?;
    let method = match direction {
        Direction::Min => Method::ConvexRoofMin,
        Direction::Max => Method::ConvexRoofMax,
    };
    let status = if out.rank <= 1 {
        Status::Exact
    } else {
        Status::Estimate
    };
    Ok(MeasureValue {
        value: out.value,
        status,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{concurrence_assistance_two_qubit, concurrence_two_qubit};
    use crate::state::PureState;

    fn w(n: usize) -> PureState {
        let mut amps = vec![ZERO; 1 << n];
        for k in 0..n {
            amps[1 << k] = C64::new(1.0, 0.0);
        }
        PureState::from_unnormalized(amps, vec![2; n]).unwrap()
    }

    #[test]
    fn isometry_columns_orthonormal() {
        let mut rng = rng_from_seed(3);
        let u = random_isometry(&mut rng, 6, 4);
        for a in 0..4 {
            for b in 0..4 {
                let dot: C64 = (0..6).map(|i| u[i * 4 + a].conj() * u[i * 4 + b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_one_is_exact_pure_value() {
        let bell = PureState::from_unnormalized(
            vec![C64::new(1.0, 0.0), ZERO, ZERO, C64::new(1.0, 0.0)],
            vec![2, 2],
        )
        .unwrap();
        let cut = PartitionSpec::new(&[0], 2).unwrap();
        for dir in [Direction::Min, Direction::Max] {
            let v = convex_roof_oracle(
                &bell.density(),
                &cut,
                MeasureKind::Concurrence,
                dir,
                &OracleConfig::default(),
            )
            .unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
            assert_eq!(v.status, Status::Exact);
        }
    }

    #[test]
    fn w_pair_marginal_matches_closed_forms() {
        let rho = w(4).reduced(&[0, 1]).unwrap();
        let cut = PartitionSpec::new(&[0], 2).unwrap();
        let cfg = OracleConfig::default();
        let min = convex_roof_oracle(&rho, &cut, MeasureKind::Concurrence, Direction::Min, &cfg).unwrap();
        let wootters = concurrence_two_qubit(&rho).unwrap().value;
        assert!(min.value >= wootters - 1e-10, "{} {}", min.value, wootters);
        assert!((min.value - 0.5).abs() < 5e-3, "{}", min.value);
        let max = convex_roof_oracle(&rho, &cut, MeasureKind::Concurrence, Direction::Max, &cfg).unwrap();
        let coa = concurrence_assistance_two_qubit(&rho).unwrap().value;
        assert!(max.value <= coa + 1e-10);
        assert!((max.value - coa).abs() < 5e-3);
    }

    #[test]
    fn w_three_party_marginal() {
        let rho = w(4).reduced(&[0, 1, 2]).unwrap();
        let cut = PartitionSpec::new(&[0], 3).unwrap();
        let v = convex_roof_oracle(
            &rho,
            &cut,
            MeasureKind::Concurrence,
            Direction::Min,
            &OracleConfig::default(),
        )
        .unwrap();
        assert_eq!(v.status, Status::Estimate);
        assert!((v.value - 2f64.sqrt() / 2.0).abs() < 5e-3);
    }

    #[test]
    fn errors() {
        let rho = w(3).reduced(&[0, 1]).unwrap();
        let cut = PartitionSpec::new(&[0], 2).unwrap();
        let zero = OracleConfig {
            trials: 0,
            ..OracleConfig::default()
        };
        assert!(matches!(
            convex_roof_oracle(&rho, &cut, MeasureKind::Concurrence, Direction::Min, &zero),
            Err(OracleError::ZeroTrials)
        ));
        // Maximally mixed 2⊗2⊗2⊗2 has rank 16.
        let mixed = DensityMatrix::new(CMatrix::diagonal(&[1.0 / 16.0; 16]), vec![2; 4]).unwrap();
        let cut4 = PartitionSpec::new(&[0], 4).unwrap();
        assert!(matches!(
            convex_roof_oracle(
                &mixed,
                &cut4,
                MeasureKind::Concurrence,
                Direction::Min,
                &OracleConfig::default()
            ),
            Err(OracleError::RankTooHigh(16))
        ));
    }
}
