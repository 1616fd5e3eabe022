//! α-sweeps of the W and FS bounds, α grids and number formatting.

use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::catalog::{fs_state, w_state};
use crate::convex_roof::OracleConfig;
use crate::engine::{EngineError, Evaluator, ExponentParams, Policy, Split};
use crate::measures::MeasureDescriptor;

#[derive(Debug, Error)]
pub enum FigureError {
    #[error("unknown figure {0} (expected 1, 2 or 3)")]
    UnknownFigure(u32),
    #[error("bad alpha grid `{0}` (expected start:stop:step or a single value)")]
    BadGrid(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Inclusive arithmetic grid `start, start + step, …, ≤ stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AlphaGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self, FigureError> {
        let ok = start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start;
        if !ok {
            return Err(FigureError::BadGrid(format!("{start}:{stop}:{step}")));
        }
        Ok(Self { start, stop, step })
    }

    pub fn single(alpha: f64) -> Self {
        Self {
            start: alpha,
            stop: alpha,
            step: 1.0,
        }
    }

    /// `β` to 5 in steps of 0.05.
    pub fn default_for(measure: &MeasureDescriptor) -> Self {
        Self {
            start: measure.beta,
            stop: 5.0,
            step: 0.05,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for AlphaGrid {
    type Err = FigureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || FigureError::BadGrid(s.to_string());
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match parts[..] {
            [a] if a.is_finite() => Ok(Self::single(a)),
            [a, b, c] => Self::new(a, b, c).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

/// One figure row: `α, y₁, y₂, y₃`.
pub type FigureRow = [f64; 4];

/// Curves for figure `id`, all read off engine bound rows:
///
/// 1. W₄: `C^α_{A|B₁B₂B₃}`, the plain pair sum, the residual-augmented sum.
/// 2. FS: `C^α_{A|BCD}`, the plain pair sum, the mean-residual sum.
/// 3. W₄: `C^α_{A|B₁B₂B₃}`, weighted sum with weighted residuals, weighted sum.
pub fn figure(id: u32, alphas: &[f64], oracle: &OracleConfig) -> Result<Vec<FigureRow>, FigureError> {
    let state = match id {
        1 | 3 => w_state(4).expect("fixed size"),
        2 => fs_state(),
        other => return Err(FigureError::UnknownFigure(other)),
    };
    let eval = Evaluator::new(state, MeasureDescriptor::CONCURRENCE, oracle.clone());
    alphas
        .iter()
        .map(|&alpha| {
            let p = ExponentParams::for_measure(alpha, eval.measure())?;
            let t1 = eval.theorem1(&p)?;
            let (y2, y3) = match id {
                1 => (t1.rhs, eval.with_residuals(&p, Policy::Max)?.rhs),
                2 => (t1.rhs, eval.with_residuals(&p, Policy::Mean)?.rhs),
                _ => (
                    eval.theorem5(&p, Split::Auto)?.rhs,
                    eval.theorem4(&p, Split::Auto)?.rhs,
                ),
            };
            Ok([alpha, t1.lhs, y2, y3])
        })
        .collect()
}

pub fn figure_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from("alpha,y1,y2,y3\n");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| format_significant(x, 12)).collect();
        writeln!(out, "{}", cells.join(",")).expect("string write");
    }
    out
}

/// `x` rounded to `digits` significant digits without trailing zeros; plain
/// decimal notation unless `|x| < 1e-4`.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let magnitude = x.abs().log10().floor() as i64;
    if magnitude < -4 {
        let s = format!("{x:.*e}", digits - 1);
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        return format!("{}e{exp}", trim_zeros(mantissa.to_string()));
    }
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    trim_zeros(format!("{x:.decimals$}"))
}

/// `x` with `places` decimals, trailing zeros removed (`0.5`, `0`).
pub fn format_fixed(x: f64, places: usize) -> String {
    trim_zeros(format!("{x:.places$}"))
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}
