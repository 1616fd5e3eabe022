use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use monogamy::catalog::{default_party_names, letter_party_names, lookup, random_qubits, Quantity};
use monogamy::convex_roof::{convex_roof_search, Direction, OracleConfig};
use monogamy::engine::{Evaluator, MonogamyReport, Split};
use monogamy::figures::{figure, figure_csv, format_fixed, format_significant, AlphaGrid};
use monogamy::listing::measure_listing;
use monogamy::measures::{concurrence_assistance_two_qubit, measure_eval, MeasureDescriptor, MeasureKind};
use monogamy::rng::derive_seed;
use monogamy::state::{PartitionSpec, PureState, QuantumState};

#[derive(Parser)]
#[command(
    name = "monogamy",
    version,
    about = "Entanglement monogamy relations for multi-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print every pairwise and cut measure value of a state
    Compute {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate all monogamy bounds; exits nonzero on a certified violation
    Verify {
        #[command(flatten)]
        common: Common,
        /// Random ensemble instead of --state, e.g. `pure:4qubits`
        #[arg(long, conflicts_with = "state")]
        random: Option<String>,
        /// Number of random states
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Emit the α-sweep curves of figure 1, 2 or 3 as CSV
    Figure {
        /// Figure number
        id: u32,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the convex-roof oracle with closed forms on a marginal
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Parties of the marginal; the first one is the A side of the cut
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        keep: Vec<usize>,
    },
}

#[derive(Args)]
struct Common {
    /// Catalog label (w4, fs, ghz3, ...) or path to a state file
    #[arg(long)]
    state: Option<String>,
    #[arg(long, default_value = "concurrence")]
    measure: String,
    /// Exponent grid `start:stop:step` or a single value (default β:5:0.05)
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random starts per oracle call
    #[arg(long, default_value_t = 2000)]
    trials: usize,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Common {
    fn measure(&self) -> Result<MeasureDescriptor> {
        Ok(MeasureDescriptor::from_name(&self.measure)?)
    }

    fn oracle(&self) -> OracleConfig {
        OracleConfig {
            trials: self.trials,
            seed: self.seed,
            ..OracleConfig::default()
        }
    }

    fn alphas(&self) -> Result<Vec<f64>> {
        let measure = self.measure()?;
        let grid = match &self.alpha {
            Some(s) => s.parse::<AlphaGrid>()?,
            None => AlphaGrid::default_for(&measure),
        };
        if grid.start < measure.beta {
            bail!(
                "alpha grid starts at {} below beta = {}",
                grid.start,
                measure.beta
            );
        }
        Ok(grid.values())
    }

    fn source(&self) -> Result<Source> {
        let label = self
            .state
            .as_deref()
            .ok_or_else(|| anyhow!("--state is required"))?;
        load_state(label)
    }
}

struct Source {
    label: String,
    state: PureState,
    names: Vec<String>,
    expected: Vec<(Quantity, f64)>,
}

fn load_state(label: &str) -> Result<Source> {
    if let Some(entry) = lookup(label) {
        return Ok(Source {
            label: entry.label,
            state: entry.state,
            names: entry.party_names,
            expected: entry
                .expected
                .into_iter()
                .map(|e| (e.quantity, e.value))
                .collect(),
        });
    }
    let path = PathBuf::from(label);
    if !path.exists() {
        bail!("`{label}` is neither a catalog label nor a readable file");
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let state: PureState = text
        .parse()
        .with_context(|| format!("parsing {}", path.display()))?;
    let n = state.parties();
    Ok(Source {
        label: path
            .file_stem()
            .map_or(label.into(), |s| s.to_string_lossy().into_owned()),
        names: if n <= 26 {
            letter_party_names(n)
        } else {
            default_party_names(n)
        },
        state,
        expected: Vec::new(),
    })
}

fn emit(output: &Output, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn cmd_compute(common: &Common) -> Result<ExitCode> {
    let src = common.source()?;
    let eval = Evaluator::new(src.state, common.measure()?, common.oracle());
    let mut out = io::stdout().lock();
    for line in measure_listing(&eval, &src.names)? {
        writeln!(out, "{}", line.render())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn report_csv(reports: &[MonogamyReport]) -> String {
    let mut out = String::from("state,measure,alpha,id,lhs,rhs,gap,satisfied,premise_ok,status,saturated\n");
    for rep in reports {
        for row in &rep.rows {
            for b in &row.bounds {
                let num = |x: f64| format_significant(x, 12);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    row.state,
                    row.measure,
                    num(row.alpha),
                    b.id,
                    num(b.lhs),
                    num(b.rhs),
                    num(b.gap),
                    b.satisfied,
                    b.premise_ok,
                    b.status,
                    b.saturated
                )
                .expect("string write");
            }
        }
    }
    out
}

fn report_json(reports: &[MonogamyReport]) -> String {
    match reports {
        [single] => single.to_json(),
        many => {
            let parts: Vec<String> = many.iter().map(MonogamyReport::to_json).collect();
            format!("[{}]", parts.join(",\n"))
        }
    }
}

fn parse_random(spec: &str) -> Result<usize> {
    let err = || anyhow!("unsupported --random `{spec}` (expected pure:<n>qubits)");
    let rest = spec.strip_prefix("pure:").ok_or_else(err)?;
    let n: usize = rest
        .strip_suffix("qubits")
        .ok_or_else(err)?
        .parse()
        .map_err(|_| err())?;
    if !(2..=10).contains(&n) {
        bail!("random states support 2 to 10 qubits");
    }
    Ok(n)
}

fn cmd_verify(common: &Common, random: Option<&str>, count: usize, output: &Output) -> Result<ExitCode> {
    let measure = common.measure()?;
    let alphas = common.alphas()?;
    let inputs: Vec<(String, PureState)> = match random {
        Some(spec) => {
            let n = parse_random(spec)?;
            (0..count as u64)
                .map(|i| {
                    let seed = derive_seed(common.seed, &[n as u64, i]);
                    Ok((format!("random{n}q-{i}"), random_qubits(n, seed)?))
                })
                .collect::<Result<_>>()?
        }
        None => {
            let src = common.source()?;
            vec![(src.label, src.state)]
        }
    };
    let reports: Vec<MonogamyReport> = inputs
        .into_iter()
        .enumerate()
        .map(|(i, (label, state))| {
            let oracle = common.oracle().with_seed(derive_seed(common.seed, &[i as u64]));
            Evaluator::new(state, measure, oracle).report(&label, &alphas, Split::Auto)
        })
        .collect();

    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => report_json(&reports) + "\n",
        Format::Csv => report_csv(&reports),
    };
    emit(output, &text)?;

    let rows: usize = reports.iter().flat_map(|r| &r.rows).map(|r| r.bounds.len()).sum();
    let mut violations = 0;
    let mut warnings = 0;
    for rep in &reports {
        for (alpha, b) in rep.violations() {
            violations += 1;
            eprintln!("violation: {} alpha={alpha} {} gap={:e}", rep.state, b.id, b.gap);
        }
        for (alpha, b) in rep.warnings() {
            warnings += 1;
            eprintln!(
                "warning: {} alpha={alpha} {} gap={:e} ({}, premise_ok={})",
                rep.state, b.id, b.gap, b.status, b.premise_ok
            );
        }
    }
    eprintln!(
        "{} state(s), {} alpha value(s), {rows} rows: {violations} violations, {warnings} uncertified warnings",
        reports.len(),
        alphas.len()
    );
    Ok(if violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_figure(id: u32, common: &Common, output: &Output) -> Result<ExitCode> {
    if output.format == Some(Format::Json) {
        bail!("figure data is emitted as CSV only");
    }
    let rows = figure(id, &common.alphas()?, &common.oracle())?;
    emit(output, &figure_csv(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(common: &Common, keep: &[usize]) -> Result<ExitCode> {
    let src = common.source()?;
    let measure = common.measure()?;
    if keep.len() < 2 {
        bail!("--keep needs at least two parties");
    }
    let marginal = QuantumState::Pure(src.state.clone()).marginal(keep)?;
    let rho = marginal.density();
    let cut = PartitionSpec::new(&[0], keep.len())?;
    let names: Vec<&str> = keep.iter().map(|&k| src.names[k].as_str()).collect();
    println!("state: {}  cut: {}|{}", src.label, names[0], names[1..].concat());

    let fmt = |x: f64| format_fixed(x, 10);
    let closed = measure_eval(&measure, &marginal, &cut, None).ok();
    let assistance = if rho.dims() == [2, 2] && measure.kind == MeasureKind::Concurrence {
        Some(concurrence_assistance_two_qubit(&rho)?.value)
    } else {
        None
    };
    let quantity = Quantity::Cut {
        focus: keep[0],
        others: keep[1..].to_vec(),
    };
    let reference = src
        .expected
        .iter()
        .find(|(q, _)| *q == quantity || (keep.len() == 2 && *q == Quantity::Pair(keep[0], keep[1])))
        .map(|(_, v)| *v);
    let target = closed.map(|v| v.value).or(reference);
    match (closed, reference) {
        (Some(v), _) => println!(
            "closed form {} = {} [{}]",
            measure.symbol(),
            fmt(v.value),
            v.status
        ),
        (None, Some(r)) => println!("reference {} = {}", measure.symbol(), fmt(r)),
        (None, None) => println!("closed form {}: none for dims {:?}", measure.symbol(), rho.dims()),
    }
    if let Some(ca) = assistance {
        println!("closed form Ca = {}", fmt(ca));
    }

    let oracle = common.oracle();
    let lo = convex_roof_search(&rho, &cut, measure.kind, Direction::Min, &oracle)?;
    println!(
        "oracle min = {} (rank {}, {} members, {} trials)",
        fmt(lo.value),
        lo.rank,
        lo.components,
        oracle.trials
    );
    if let Some(t) = target {
        println!("discrepancy min = {:.3e}", (lo.value - t).abs());
    }
    if measure.kind == MeasureKind::Concurrence {
        let hi = convex_roof_search(&rho, &cut, measure.kind, Direction::Max, &oracle)?;
        println!("oracle max = {}", fmt(hi.value));
        if let Some(ca) = assistance {
            println!("discrepancy max = {:.3e}", (hi.value - ca).abs());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Compute { common } => cmd_compute(common),
        Command::Verify {
            common,
            random,
            count,
            output,
        } => cmd_verify(common, random.as_deref(), *count, output),
        Command::Figure { id, common, output } => cmd_figure(*id, common, output),
        Command::Oracle { common, keep } => cmd_oracle(common, keep),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
