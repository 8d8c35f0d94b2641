use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lcsud::assignment::{cyclic_assignment, AvailabilityRealization, SystemParams};
use lcsud::costs::{cost_table, cost_table_csv, fig2_csv, fig2_curves, CostParams};
use lcsud::error::Error;
use lcsud::ffield::PrimeField;
use lcsud::lagrange::{generate_points, PointRule};
use lcsud::matrix::{matrices_equal, reference_matmul, Axis, FieldMatrix};
use lcsud::schemes::{run_round, storage_plan, Dims, Download, SchemeId};
use lcsud::sim::{run_simulation, SimConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "lcsud",
    version,
    about = "Coded-storage matrix multiplication on elastic clusters"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-machine CSV ledger.
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Print every cost row as CSV.
    Costs {
        /// Number of available machines.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        v: usize,
        #[arg(long)]
        r: usize,
    },
    /// Print system storage against the preemption tolerance as CSV.
    Fig2 {
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        l: usize,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = 15)]
        umax: usize,
    },
    /// Trace one of the six-machine worked examples.
    Demo {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        example: u8,
        /// Machine whose results never arrive.
        #[arg(long)]
        straggler: Option<usize>,
    },
}

enum Failure {
    Config(String),
    Step(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("LCSUD_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Failure::Config(format!(
            "LCSUD_THREADS must be a positive integer, got `{value}`"
        ))
    })?;
    // A second initialization only happens in-process, where the first one wins.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn simulate(
    config: &PathBuf,
    out: Option<&PathBuf>,
    ledger: Option<&PathBuf>,
) -> Result<(), Failure> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::Config(format!("{}: {e}", config.display())))?;
    let config = SimConfig::from_json(&text)?;
    config.validate()?;
    eprintln!(
        "config: {}",
        serde_json::to_string(&config).expect("config serializes")
    );
    let report = run_simulation(&config)?;
    let mut json = report.to_json();
    json.push('\n');
    write_output(out, &json)?;
    if let Some(path) = ledger {
        write_output(Some(path), &report.ledger_csv())?;
    }
    let failed: Vec<String> = report
        .steps
        .iter()
        .filter(|s| !s.passed())
        .map(|s| s.step.to_string())
        .collect();
    eprintln!(
        "steps: {} passed: {} replacements: {}",
        report.steps.len(),
        report.steps.len() - failed.len(),
        report.replacements
    );
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Step(format!(
            "failed steps: {}",
            failed.join(", ")
        )))
    }
}

fn costs(p: CostParams) -> Result<(), Failure> {
    eprintln!(
        "config: {}",
        json!({ "n": p.m, "l": p.l, "s": p.s, "q": p.q, "v": p.v, "r": p.r })
    );
    print!("{}", cost_table_csv(&cost_table(&p)?));
    Ok(())
}

fn fig2(n: usize, l: usize, s: usize, umax: usize) -> Result<(), Failure> {
    eprintln!(
        "config: {}",
        json!({ "n": n, "l": l, "s": s, "umax": umax })
    );
    print!("{}", fig2_csv(&fig2_curves(n, l, s, umax)?));
    Ok(())
}

fn braces(items: impl IntoIterator<Item = usize>) -> String {
    let items: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn demo_trace(example: u8, straggler: Option<usize>) -> Result<(String, bool), Error> {
    const N: usize = 6;
    const L: usize = 2;
    const S: usize = 1;
    let dims = Dims {
        q: 12,
        v: 12,
        r: 12,
    };
    let scheme = SchemeId::ALL[usize::from(example) - 1];
    let field = PrimeField::P65537;
    let params = SystemParams::new(N, L, S, 0)?;
    let realization = AvailabilityRealization::full(N);
    let points = generate_points(field, N, L, PointRule::Consecutive)?;
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from(example));
    let a = FieldMatrix::random(field, dims.q, dims.v, &mut rng);
    let b = FieldMatrix::random(field, dims.v, dims.r, &mut rng);
    let stragglers: BTreeSet<usize> = straggler.into_iter().collect();
    if let Some(x) = straggler.filter(|x| !realization.contains(*x)) {
        return Err(Error::InvalidParams(format!("machine {x} does not exist")));
    }

    let placement = storage_plan(scheme, &params, &realization, &points, &a, dims.r)?;
    let outcome = run_round(
        &placement,
        &params,
        &realization,
        &points,
        &b,
        &stragglers,
        None,
    )?;
    let assignment = cyclic_assignment(&realization, L, S)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "example {example}: {scheme}, N = {N}, L = {L}, S = {S}, q = v = r = 12, p = {}",
        field.modulus()
    );
    for (g, w) in assignment.groups().iter().enumerate() {
        let _ = writeln!(out, "W_{} = {}", g + 1, braces(w.iter().copied()));
    }
    out.push_str("storage:\n");
    for n in realization.members() {
        let units: Vec<String> = placement.plan.units[n]
            .iter()
            .map(|u| {
                let axis = match u.axis {
                    Axis::Rows => "rows",
                    Axis::Cols => "cols",
                };
                format!("{axis} {}..{}", u.range.start, u.range.end)
            })
            .collect();
        let size = placement.plan.normalized_size(*n, dims, L);
        let _ = writeln!(out, "  machine {n}: {} of A ({})", size, units.join(", "));
    }
    out.push_str("download:\n");
    for (n, ledger) in realization.members().iter().zip(&outcome.ledger) {
        let what = match &outcome.downloads.per_machine[n] {
            Download::Blocks(blocks) => format!("blocks {} of B", braces(blocks.iter().copied())),
            Download::Entire => "all of B".to_string(),
        };
        let _ = writeln!(
            out,
            "  machine {n}: {what} ({} symbols)",
            ledger.download_symbols
        );
    }
    let _ = writeln!(out, "stragglers: {}", braces(stragglers.iter().copied()));
    let ok = match &outcome.decoded {
        Ok(decoded) => {
            for (g, set) in decoded.decode_sets.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "group {} decoded from {}",
                    g + 1,
                    braces(set.iter().copied())
                );
            }
            matrices_equal(&decoded.product, &reference_matmul(&a, &b)?)
        }
        Err(e) => {
            let _ = writeln!(out, "decode failed: {e}");
            false
        }
    };
    let _ = writeln!(out, "decoded == A·B: {ok}");
    Ok((out, ok))
}

fn demo(example: u8, straggler: Option<usize>) -> Result<(), Failure> {
    eprintln!(
        "config: {}",
        json!({ "example": example, "straggler": straggler })
    );
    let (trace, ok) = demo_trace(example, straggler)?;
    print!("{trace}");
    if ok {
        Ok(())
    } else {
        Err(Failure::Step("decoded product differs from A·B".into()))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Simulate {
            config,
            out,
            ledger,
        } => simulate(&config, out.as_ref(), ledger.as_ref()),
        Command::Costs { n, l, s, q, v, r } => costs(CostParams {
            m: n,
            l,
            s,
            q,
            v,
            r,
        }),
        Command::Fig2 { n, l, s, umax } => fig2(n, l, s, umax),
        Command::Demo { example, straggler } => demo(example, straggler),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Step(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
