use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cdsp_core::report::{AtStage, Stage};
use cdsp_core::sweep::{parse_weight_triples, write_csv};
use cdsp_core::{
    analyze, kernel_values, paper_check, parse_measure, run_oracle, sweep, Decision, Measure, NumericPolicy, Report,
    SweepSpec, C64,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cdsp", version, about = "Cauchy dual subnormality tests on Dirichlet spaces D(μ)")]
struct Cli {
    #[command(flatten)]
    policy: PolicyArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PolicyArgs {
    /// Numeric policy as JSON (`@file.json` or a path).
    #[arg(long, global = true, value_name = "@FILE")]
    policy: Option<String>,
    /// Seed for the random test vectors.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest power `l` in the truncated positivity probes.
    #[arg(long, global = true)]
    lmax: Option<usize>,
    /// Truncation size of the positivity probes.
    #[arg(long, global = true)]
    ntrunc: Option<usize>,
    /// Run every positivity probe instead of stopping at the first violation.
    #[arg(long, global = true)]
    exhaustive_psd: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one measure and print a JSON report.
    Analyze {
        #[arg(short, long, value_name = "SPEC")]
        measure: String,
        /// Add the monomial-model operator checks.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall-clock stage timings (the report is no longer byte-stable).
        #[arg(long)]
        timings: bool,
    },
    /// Check the three equally spaced unit atoms against the closed-form constants.
    PaperCheck {
        #[arg(short, long, value_name = "SPEC")]
        measure: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep `δ_1 + δ_θ2 + δ_θ3` over a grid of turns and write CSV.
    Sweep {
        /// Grid size n: angles are i/n turns.
        #[arg(long, default_value_t = 12)]
        grid: i64,
        /// Weight triples, `w1,w2,w3;w1,w2,w3`.
        #[arg(long, default_value = "1,1,1")]
        weights: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the kernels of D(μ) and of H(B) at one pair of points.
    Kernel {
        #[arg(short, long, value_name = "SPEC")]
        measure: String,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// `re,im`
        #[arg(long, allow_hyphen_values = true)]
        lam: String,
    },
}

fn read_arg(spec: &str) -> Result<String, String> {
    match spec.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(spec.to_string()),
    }
}

fn load_policy(args: &PolicyArgs) -> Result<NumericPolicy, String> {
    let mut policy = match &args.policy {
        Some(p) => {
            let path = p.strip_prefix('@').unwrap_or(p);
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| format!("[policy] {e}"))?
        }
        None => NumericPolicy::default(),
    };
    if let Some(seed) = args.seed {
        policy.seed = seed;
    }
    if let Some(l) = args.lmax {
        policy.l_max = l;
    }
    if let Some(n) = args.ntrunc {
        policy.n_trunc = n;
    }
    policy.exhaustive_psd |= args.exhaustive_psd;
    policy.validate().at(Stage::Policy).map_err(|e| e.to_string())?;
    Ok(policy)
}

fn load_measure(spec: &str) -> Result<Measure, String> {
    let text = read_arg(spec)?;
    parse_measure(&text).at(Stage::Measure).map_err(|e| e.to_string())
}

fn parse_point(text: &str) -> Result<C64, String> {
    let (re, im) = text.split_once(',').ok_or_else(|| format!("expected `re,im`, got {text:?}"))?;
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?}"));
    Ok(C64::new(num(re)?, num(im)?))
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| e.to_string())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    let policy = load_policy(&cli.policy)?;
    match cli.command {
        Command::Analyze { measure, oracle, out, timings } => {
            let m = load_measure(&measure)?;
            let a = analyze(&m, &policy).map_err(|e| e.to_string())?;
            let summary = if oracle { Some(run_oracle(&a, &policy).map_err(|e| e.to_string())?) } else { None };
            emit(&Report::new(&a, summary, &policy, timings).to_json(), out.as_ref())?;
            Ok(true)
        }
        Command::PaperCheck { measure, out } => {
            let m = match measure {
                Some(spec) => load_measure(&spec)?,
                None => Measure::equispaced_three(),
            };
            let pc = paper_check(&m, &policy);
            emit(&pc.to_json(), out.as_ref())?;
            for item in pc.items.iter().filter(|i| i.status == cdsp_core::CheckStatus::Fail) {
                eprintln!("FAIL {}: deviation {:?} > {:e} {}", item.name, item.deviation, item.tolerance, item.detail);
            }
            Ok(pc.passed)
        }
        Command::Sweep { grid, weights, out } => {
            if grid < 2 {
                return Err("grid must be at least 2".into());
            }
            let weights = parse_weight_triples(&weights).map_err(|e| e.to_string())?;
            let rows = sweep(&SweepSpec { grid, weights }, &policy);
            let mut buf = Vec::new();
            write_csv(&rows, &mut buf).map_err(|e| e.to_string())?;
            let text = String::from_utf8(buf).map_err(|e| e.to_string())?;
            emit(text.trim_end(), out.as_ref())?;
            let flagged: Vec<_> =
                rows.iter().filter(|r| r.verdict == Some(Decision::SubnormalNumeric)).collect();
            if !flagged.is_empty() {
                eprintln!("WARNING: {} cell(s) classified SubnormalNumeric; review:", flagged.len());
                for r in flagged {
                    eprintln!("  theta2={} theta3={} weights=({}, {}, {})", r.theta2, r.theta3, r.w1, r.w2, r.w3);
                }
            }
            Ok(true)
        }
        Command::Kernel { measure, z, lam } => {
            let m = load_measure(&measure)?;
            let z = parse_point(&z)?;
            let lam = parse_point(&lam)?;
            let a = analyze(&m, &policy).map_err(|e| e.to_string())?;
            let kv = kernel_values(&a, z, lam).map_err(|e| e.to_string())?;
            emit(&serde_json::to_string_pretty(&kv).map_err(|e| e.to_string())?, None)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
