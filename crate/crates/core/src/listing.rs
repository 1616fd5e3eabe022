//! Plain-text listing of the measure values of a state.

use crate::engine::{EngineError, Evaluator};
use crate::figures::format_fixed;
use crate::measures::{MeasureKind, MeasureValue};

#[derive(Debug, Clone)]
pub struct ListingLine {
    pub label: String,
    pub value: MeasureValue,
}

impl ListingLine {
    /// `C(A|CD) = 0.9428090416 [exact]`
    pub fn render(&self) -> String {
        format!(
            "{} = {} [{}]",
            self.label,
            format_fixed(self.value.value, 10),
            self.value.status
        )
    }
}

/// Every pairwise value, every cut `A|S` with `|S| ≥ 2` (party 0 as `A`),
/// and for all-qubit states under concurrence the pairwise assistance values.
pub fn measure_listing(eval: &Evaluator, names: &[String]) -> Result<Vec<ListingLine>, EngineError> {
    let n = eval.parties();
    let sym = eval.measure().symbol();
    let mut lines = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            lines.push(ListingLine {
                label: format!("{sym}({}{})", names[i], names[j]),
                value: eval.pair(i, j)?,
            });
        }
    }
    let rest: Vec<usize> = (1..n).collect();
    let mut subsets: Vec<Vec<usize>> = (1u32..1 << rest.len())
        .map(|mask| {
            rest.iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &p)| p)
                .collect::<Vec<usize>>()
        })
        .filter(|s| s.len() >= 2)
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    for s in subsets {
        let joined: String = s.iter().map(|&p| names[p].as_str()).collect();
        lines.push(ListingLine {
            label: format!("{sym}({}|{joined})", names[0]),
            value: eval.cut(0, &s)?,
        });
    }
    let qubits = eval.state().dims().iter().all(|&d| d == 2);
    if qubits && eval.measure().kind == MeasureKind::Concurrence {
        for i in 0..n {
            for j in i + 1..n {
                lines.push(ListingLine {
                    label: format!("Ca({}{})", names[i], names[j]),
                    value: eval.assistance(i, j)?,
                });
            }
        }
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::convex_roof::OracleConfig;
    use crate::measures::MeasureDescriptor;

    fn render(label: &str) -> Vec<String> {
        let entry = lookup(label).unwrap();
        let eval = Evaluator::new(
            entry.state,
            MeasureDescriptor::CONCURRENCE,
            OracleConfig::default(),
        );
        measure_listing(&eval, &entry.party_names)
            .unwrap()
            .iter()
            .map(ListingLine::render)
            .collect()
    }

    #[test]
    fn fs_listing() {
        let lines = render("fs");
        assert!(
            lines.contains(&"C(A|CD) = 0.9428090416 [exact]".to_string()),
            "{lines:?}"
        );
        assert!(lines.contains(&"C(AD) = 0.6666666667 [exact]".to_string()));
        assert!(lines.contains(&"C(A|BCD) = 0.9428090416 [exact]".to_string()));
    }

    #[test]
    fn w4_and_ghz_listing() {
        let w = render("w4");
        assert!(w.contains(&"C(AB1) = 0.5 [exact]".to_string()), "{w:?}");
        assert!(w
            .iter()
            .any(|l| l.starts_with("C(A|B1B2) = 0.7071067") && l.ends_with("[estimate]")));
        let g = render("ghz3");
        assert!(g.iter().any(|l| l.starts_with("C(AB) = 0 ")), "{g:?}");
    }
}
