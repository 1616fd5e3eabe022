//! Named test states and seeded random-state generators.

use std::f64::consts::SQRT_2;

use crate::convex_roof::OracleConfig;
use crate::linalg::{C64, ZERO};
use crate::measures::{assistance_eval, measure_eval, MeasureDescriptor, MeasureError, MeasureValue};
use crate::rng::{complex_normal, rng_from_seed};
use crate::state::{DensityMatrix, PartitionSpec, PureState, QuantumState, StateError};

/// Uniform superposition of the `n` single-excitation basis states.
pub fn w_state(n: usize) -> Result<PureState, StateError> {
    if n < 3 {
        return Err(StateError::BadDims);
    }
    let mut amps = vec![ZERO; 1 << n];
    for k in 0..n {
        amps[1 << k] = C64::new(1.0, 0.0);
    }
    PureState::from_unnormalized(amps, vec![2; n])
}

/// `(|0000⟩ + |0010⟩ + |1011⟩)/√3`
pub fn fs_state() -> PureState {
    let mut amps = vec![ZERO; 16];
    for idx in [0b0000, 0b0010, 0b1011] {
        amps[idx] = C64::new(1.0, 0.0);
    }
    PureState::from_unnormalized(amps, vec![2; 4]).expect("fixed state")
}

/// `(|0…0⟩ + |1…1⟩)/√2`
pub fn ghz_state(n: usize) -> Result<PureState, StateError> {
    if n < 2 {
        return Err(StateError::BadDims);
    }
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = C64::new(1.0, 0.0);
    amps[(1 << n) - 1] = C64::new(1.0, 0.0);
    PureState::from_unnormalized(amps, vec![2; n])
}

/// `|0…0⟩` on `n` qubits.
pub fn product_state(n: usize) -> Result<PureState, StateError> {
    PureState::basis(&vec![0; n], vec![2; n])
}

/// Normalized vector of independent complex Gaussians, which is
/// Haar-distributed on the unit sphere.
pub fn haar_random_pure(dims: &[usize], seed: u64) -> Result<PureState, StateError> {
    let total: usize = dims.iter().product();
    let mut rng = rng_from_seed(seed);
    let amps = (0..total).map(|_| complex_normal(&mut rng)).collect();
    PureState::from_unnormalized(amps, dims.to_vec())
}

/// Marginal of a Haar-random purification with a `rank`-dimensional ancilla.
pub fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    let total: usize = dims.iter().product();
    if rank == 0 || rank > total {
        return Err(StateError::BadDims);
    }
    let mut full = dims.to_vec();
    full.push(rank);
    let psi = haar_random_pure(&full, seed)?;
    let keep: Vec<usize> = (0..dims.len()).collect();
    psi.reduced(&keep)
}

/// Seeded Haar state on `n` qubits.
pub fn random_qubits(n: usize, seed: u64) -> Result<PureState, StateError> {
    haar_random_pure(&vec![2; n], seed)
}

/// A quantity whose value for a catalog state is known in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    /// Measure of the two-party marginal `ρ_{ij}` (party `i` on the A-side).
    Pair(usize, usize),
    /// Measure of the marginal over `focus ∪ others` across `focus | others`.
    Cut { focus: usize, others: Vec<usize> },
    /// Concurrence of assistance of `ρ_{ij}`.
    Assistance(usize, usize),
    /// `1 − Tr ρ²` of the marginal on the listed parties.
    LinearEntropy(Vec<usize>),
}

impl Quantity {
    pub fn evaluate(
        &self,
        state: &PureState,
        measure: &MeasureDescriptor,
        oracle: Option<&OracleConfig>,
    ) -> Result<MeasureValue, MeasureError> {
        let global = QuantumState::Pure(state.clone());
        match self {
            Quantity::Pair(i, j) => {
                let m = global.marginal(&[*i, *j])?;
                measure_eval(measure, &m, &PartitionSpec::new(&[0], 2)?, oracle)
            }
            Quantity::Cut { focus, others } => {
                let mut keep = vec![*focus];
                keep.extend(others);
                let m = global.marginal(&keep)?;
                measure_eval(measure, &m, &PartitionSpec::new(&[0], keep.len())?, oracle)
            }
            Quantity::Assistance(i, j) => assistance_eval(&state.reduced(&[*i, *j])?),
            Quantity::LinearEntropy(parties) => Ok(MeasureValue::exact(
                state.reduced(parties)?.linear_entropy(),
                crate::measures::Method::PureState,
            )),
        }
    }

    pub fn label(&self, names: &[String], symbol: &str) -> String {
        let join = |ps: &[usize]| ps.iter().map(|&p| names[p].as_str()).collect::<String>();
        match self {
            Quantity::Pair(i, j) => format!("{symbol}({}{})", names[*i], names[*j]),
            Quantity::Cut { focus, others } => format!("{symbol}({}|{})", names[*focus], join(others)),
            Quantity::Assistance(i, j) => format!("Ca({}{})", names[*i], names[*j]),
            Quantity::LinearEntropy(ps) => format!("T({})", join(ps)),
        }
    }
}

/// Where an expected value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Quoted from the reference worked examples.
    Reference,
    /// Hand computation from closed forms.
    Derived,
    Trivial,
}

#[derive(Debug, Clone)]
pub struct ExpectedValue {
    pub quantity: Quantity,
    pub value: f64,
    pub source: Source,
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub label: String,
    pub description: String,
    pub state: PureState,
    pub party_names: Vec<String>,
    /// Concurrence values.
    pub expected: Vec<ExpectedValue>,
}

/// `A, B1, B2, …`
pub fn default_party_names(n: usize) -> Vec<String> {
    std::iter::once("A".to_string())
        .chain((1..n).map(|i| format!("B{i}")))
        .collect()
}

/// `A, B, C, …`
pub fn letter_party_names(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
}

fn ev(quantity: Quantity, value: f64, source: Source) -> ExpectedValue {
    ExpectedValue {
        quantity,
        value,
        source,
    }
}

fn cut(focus: usize, others: &[usize]) -> Quantity {
    Quantity::Cut {
        focus,
        others: others.to_vec(),
    }
}

fn w_entry(n: usize) -> Result<CatalogEntry, StateError> {
    let state = w_state(n)?;
    let nf = n as f64;
    // Pair marginals are ((n−2)/n)|00⟩⟨00| + (2/n)|Ψ⁺⟩⟨Ψ⁺|, so C = Ca = 2/n.
    let pair = 2.0 / nf;
    let mut expected = Vec::new();
    for j in 1..n {
        let source = if n == 4 {
            Source::Reference
        } else {
            Source::Derived
        };
        expected.push(ev(Quantity::Pair(0, j), pair, source));
        expected.push(ev(Quantity::Assistance(0, j), pair, Source::Derived));
    }
    // C_{A|rest} = 2√((1/n)(1 − 1/n)) for the pure global state.
    let full = 2.0 * ((1.0 / nf) * (1.0 - 1.0 / nf)).sqrt();
    let rest: Vec<usize> = (1..n).collect();
    expected.push(ev(
        cut(0, &rest),
        full,
        if n == 4 {
            Source::Reference
        } else {
            Source::Derived
        },
    ));
    if n == 4 {
        for others in [[1, 2], [1, 3], [2, 3]] {
            expected.push(ev(cut(0, &others), SQRT_2 / 2.0, Source::Reference));
        }
    }
    if n == 3 {
        expected.push(ev(cut(0, &[1, 2]), 2.0 * SQRT_2 / 3.0, Source::Derived));
    }
    if n == 6 {
        expected.push(ev(Quantity::LinearEntropy(vec![0, 1, 2]), 0.5, Source::Derived));
    }
    Ok(CatalogEntry {
        label: format!("w{n}"),
        description: format!("{n}-qubit W state"),
        state,
        party_names: default_party_names(n),
        expected,
    })
}

fn fs_entry() -> CatalogEntry {
    let r = Source::Reference;
    let two_root_two = 2.0 * SQRT_2 / 3.0;
    CatalogEntry {
        label: "fs".into(),
        description: "(|0000> + |0010> + |1011>)/sqrt(3)".into(),
        state: fs_state(),
        party_names: letter_party_names(4),
        expected: vec![
            ev(Quantity::Pair(0, 1), 0.0, r),
            ev(Quantity::Pair(0, 2), 0.0, r),
            ev(Quantity::Pair(0, 3), 2.0 / 3.0, r),
            ev(Quantity::Pair(1, 2), 0.0, r),
            ev(Quantity::Pair(1, 3), 0.0, r),
            ev(cut(0, &[1, 2]), 0.0, r),
            ev(cut(0, &[1, 3]), 2.0 / 3.0, r),
            ev(cut(0, &[2, 3]), two_root_two, r),
            ev(cut(0, &[1, 2, 3]), two_root_two, r),
            ev(Quantity::Assistance(1, 2), 0.0, Source::Derived),
            ev(Quantity::LinearEntropy(vec![0, 1]), 4.0 / 9.0, Source::Derived),
        ],
    }
}

fn ghz_entry(n: usize) -> Result<CatalogEntry, StateError> {
    let state = ghz_state(n)?;
    let rest: Vec<usize> = (1..n).collect();
    let mut expected = vec![ev(cut(0, &rest), 1.0, Source::Derived)];
    if n >= 3 {
        for j in 1..n {
            expected.push(ev(Quantity::Pair(0, j), 0.0, Source::Derived));
        }
    } else {
        expected.push(ev(Quantity::Pair(0, 1), 1.0, Source::Trivial));
    }
    Ok(CatalogEntry {
        label: format!("ghz{n}"),
        description: format!("{n}-qubit GHZ state"),
        state,
        party_names: letter_party_names(n),
        expected,
    })
}

fn product_entry(n: usize) -> Result<CatalogEntry, StateError> {
    let state = product_state(n)?;
    let rest: Vec<usize> = (1..n).collect();
    let mut expected = vec![ev(cut(0, &rest), 0.0, Source::Trivial)];
    for j in 1..n {
        expected.push(ev(Quantity::Pair(0, j), 0.0, Source::Trivial));
    }
    Ok(CatalogEntry {
        label: format!("prod{n}"),
        description: format!("{n}-qubit product state |0...0>"),
        state,
        party_names: letter_party_names(n),
        expected,
    })
}

/// Labels accepted by [`lookup`] for the standard sizes.
pub const STANDARD_LABELS: &[&str] = &[
    "w3", "w4", "w5", "w6", "fs", "ghz2", "ghz3", "ghz4", "prod2", "prod3", "prod4", "prod6",
];

/// Resolves a catalog label such as `w4`, `fs`, `ghz3` or `prod6`. Sizes up
/// to ten qubits are accepted for the parametric families.
pub fn lookup(label: &str) -> Option<CatalogEntry> {
    let label = label.trim().to_ascii_lowercase();
    if label == "fs" {
        return Some(fs_entry());
    }
    if label == "bell" {
        let mut e = ghz_entry(2).ok()?;
        e.label = "bell".into();
        e.description = "Bell state (|00> + |11>)/sqrt(2)".into();
        return Some(e);
    }
    let split = label.find(|c: char| c.is_ascii_digit())?;
    let (family, digits) = label.split_at(split);
    let n: usize = digits.parse().ok()?;
    if n > 10 {
        return None;
    }
    match family {
        "w" => w_entry(n).ok(),
        "ghz" => ghz_entry(n).ok(),
        "prod" | "product" => product_entry(n).ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w4_amplitudes() {
        let w = w_state(4).unwrap();
        for (i, a) in w.amplitudes().iter().enumerate() {
            let expect = if i.count_ones() == 1 { 0.5 } else { 0.0 };
            assert!((a.re - expect).abs() < 1e-15 && a.im == 0.0);
        }
        assert!(w_state(2).is_err());
    }

    #[test]
    fn w3_amplitudes() {
        let w = w_state(3).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for idx in [0b100, 0b010, 0b001] {
            assert!((w.amplitudes()[idx].re - s).abs() < 1e-15);
        }
    }

    #[test]
    fn w6_pair_marginal_structure() {
        let rho = w_state(6).unwrap().reduced(&[0, 1]).unwrap();
        let m = rho.matrix();
        assert!((m[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
        assert!((m[(1, 1)].re - 1.0 / 6.0).abs() < 1e-15);
        assert!((m[(2, 2)].re - 1.0 / 6.0).abs() < 1e-15);
        assert!((m[(1, 2)].re - 1.0 / 6.0).abs() < 1e-15);
        assert!(m[(3, 3)].norm() < 1e-15);
    }

    #[test]
    fn ghz_and_product() {
        let g = ghz_state(3).unwrap();
        assert!((g.amplitudes()[0].re - 1.0 / SQRT_2).abs() < 1e-15);
        assert!((g.amplitudes()[7].re - 1.0 / SQRT_2).abs() < 1e-15);
        assert!(ghz_state(1).is_err());
        let p = product_state(3).unwrap();
        assert_eq!(p.amplitudes()[0], C64::new(1.0, 0.0));
    }

    #[test]
    fn haar_is_deterministic_and_normalized() {
        let a = haar_random_pure(&[2, 2, 2], 42).unwrap();
        let b = haar_random_pure(&[2, 2, 2], 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, haar_random_pure(&[2, 2, 2], 43).unwrap());
        for seed in 0..1000 {
            let psi = haar_random_pure(&[2, 3], seed).unwrap();
            let n2: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert!((n2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_marginal_purity_moment() {
        // E[Tr ρ_A²] = (dA + dB)/(dA·dB + 1) = 4/5 for a Haar 2⊗2 state.
        let n = 5000;
        let mean: f64 = (0..n)
            .map(|s| {
                haar_random_pure(&[2, 2], s)
                    .unwrap()
                    .reduced(&[0])
                    .unwrap()
                    .purity()
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.8).abs() < 0.02, "{mean}");
    }

    #[test]
    fn random_mixed_properties() {
        let r1 = random_mixed(&[2, 2], 1, 5).unwrap();
        assert!(r1.linear_entropy() < 1e-12);
        for seed in 0..500 {
            let rho = random_mixed(&[2, 2], 4, seed).unwrap();
            assert!((rho.trace() - 1.0).abs() < 1e-12);
            let eig = rho.eigensystem().unwrap();
            assert!(*eig.values.last().unwrap() >= -1e-10);
        }
        assert!(random_mixed(&[2, 2], 5, 0).is_err());
    }

    #[test]
    fn lookup_labels() {
        for label in STANDARD_LABELS {
            let e = lookup(label).unwrap_or_else(|| panic!("{label}"));
            assert_eq!(&e.label, label);
        }
        assert!(lookup("w11").is_none());
        assert!(lookup("nope").is_none());
        assert_eq!(lookup("FS").unwrap().party_names, vec!["A", "B", "C", "D"]);
        assert_eq!(lookup("bell").unwrap().state.dims(), &[2, 2]);
    }
}
