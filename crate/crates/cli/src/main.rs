//! `afr`: build, combine and check aggregated feasible regions from the command line.
//!
//! Exit codes: 0 success, 1 semantic failure, 2 input error, 3 guard refusal.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use afr_core::afr::io::{afr_from_json, afr_to_csv, afr_to_json, allocation_to_json, parse_profile};
use afr_core::afr::{build_afr_with, disaggregate, AfrError, AfrModel, BuildOptions};
use afr_core::flex::{parse_resource_list, parse_resources, resources_to_csv, resources_to_json, Format, ParseOptions};
use afr_core::flex::{FlexError, FlexResource, ResourceSet};
use afr_core::fme::{aggregate_projection_oracle_with, FmeError, OracleOptions};
use afr_core::linear::system_equivalent;
use afr_core::rational::format_rational;
use afr_core::scaling::{exp2_fit, linear_fit, time_build};
use afr_core::theorem::{report_to_json, run_suite, SuiteOptions};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(name = "afr", version, about = "Exact aggregated feasible regions of flexible resources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check every resource against the three hypotheses.
    Validate {
        input: PathBuf,
        /// Repair violations and write the repaired resources to --out.
        #[arg(long, requires = "out")]
        tighten: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the AFR of a resource file.
    Build {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Keep per-resource contributions (needed by `remove`-style edits).
        #[arg(long)]
        contributions: bool,
        /// Leave out the stats block, so documents compare byte for byte.
        #[arg(long)]
        omit_stats: bool,
        /// Repair hypothesis violations before building.
        #[arg(long)]
        tighten: bool,
    },
    /// Sum several AFR documents of the same horizon.
    Merge {
        #[arg(required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add every resource of a resource file to an AFR document.
    Add {
        afr: PathBuf,
        resources: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test an aggregate profile against an AFR document.
    Check { afr: PathBuf, profile: PathBuf },
    /// Split an aggregate profile into per-resource trajectories.
    Disaggregate {
        resources: PathBuf,
        profile: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the AFR with the Fourier-Motzkin projection of the joint system.
    CompareOracle {
        resources: PathBuf,
        /// Compare this AFR document instead of a fresh build.
        #[arg(long)]
        afr: Option<PathBuf>,
        /// Refuse instances with N*T above this.
        #[arg(long, default_value_t = 12)]
        max_nt: usize,
        /// Print the oracle system to stderr.
        #[arg(long)]
        dump_lp: bool,
    },
    /// Run the redundancy checks on seeded random instances.
    Theorems {
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        first_seed: u64,
        /// Comma-separated NxT sizes, e.g. 2x3,3x4.
        #[arg(long, default_value = "2x3,3x3,2x4,3x4")]
        sizes: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        mutant: bool,
    },
    /// Time builds over a grid of fleet sizes and horizons.
    Bench {
        #[arg(long = "N", value_delimiter = ',', default_value = "100,200,400,800")]
        n: Vec<usize>,
        #[arg(long = "T", value_delimiter = ',', default_value = "10")]
        t: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn semantic(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<FlexError> for Failure {
    fn from(e: FlexError) -> Self {
        match e {
            FlexError::Hypothesis { .. } | FlexError::Empty { .. } => Failure::semantic(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<AfrError> for Failure {
    fn from(e: AfrError) -> Self {
        match e {
            AfrError::Flex(f) => f.into(),
            AfrError::Malformed(_)
            | AfrError::HorizonTooLarge(_)
            | AfrError::HorizonMismatch { .. }
            | AfrError::ProfileLength { .. } => Failure::input(e.to_string()),
            _ => Failure::semantic(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_resources(path: &Path, tighten: bool) -> Result<ResourceSet, Failure> {
    let opts = ParseOptions { tighten, ..ParseOptions::default() };
    Ok(parse_resources(&read(path)?, Format::from_path(path), &opts)?)
}

fn load_afr(path: &Path) -> Result<AfrModel, Failure> {
    Ok(afr_from_json(&read(path)?)?)
}

fn validate(input: &Path, tighten: bool, out: Option<&Path>) -> Outcome {
    let format = Format::from_path(input);
    let list = parse_resource_list(&read(input)?, format, &ParseOptions::default())?;
    let mut bad = 0;
    for r in &list {
        let report = r.validate();
        if report.is_valid() {
            println!("{}: ok", r.id());
        } else {
            bad += 1;
            for v in &report.violations {
                println!("{}: {v}", r.id());
            }
        }
    }
    if tighten {
        let repaired: Vec<FlexResource> = list.iter().map(FlexResource::tighten).collect::<Result<_, _>>()?;
        ResourceSet::new(repaired.clone())?;
        let text = match format {
            Format::Json => resources_to_json(&repaired),
            Format::Csv => resources_to_csv(&repaired)?,
        };
        emit(out, &text)?;
        println!("repaired {bad} of {} resources", list.len());
        return Ok(());
    }
    ResourceSet::new(list.clone())?;
    if bad > 0 {
        return Err(Failure::semantic(format!("{bad} of {} resources violate the hypotheses", list.len())));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn build(
    input: &Path,
    out: Option<&Path>,
    format: OutFormat,
    threads: Option<usize>,
    contributions: bool,
    omit_stats: bool,
    tighten: bool,
) -> Outcome {
    let rs = load_resources(input, tighten)?;
    let opts = BuildOptions { threads, contributions };
    let start = Instant::now();
    let model = build_afr_with(&rs, &opts)?;
    let elapsed = start.elapsed();
    let text = match format {
        OutFormat::Csv => afr_to_csv(&model),
        OutFormat::Json => {
            let stats = (!omit_stats).then(|| {
                json!({
                    "directions": model.len(),
                    "inequalities": model.inequality_count(),
                    "build_ms": elapsed.as_secs_f64() * 1e3,
                    "threads": threads.unwrap_or_else(rayon_threads),
                })
            });
            afr_to_json(&model, stats)
        }
    };
    emit(out, &text)
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn merge(inputs: &[PathBuf], out: Option<&Path>) -> Outcome {
    let mut models = inputs.iter().map(|p| load_afr(p));
    let first = models.next().expect("clap requires one input")?;
    let total = models.try_fold(first, |acc, m| acc.merge(&m?).map_err(Failure::from))?;
    emit(out, &afr_to_json(&total, None))
}

fn add(afr: &Path, resources: &Path, out: Option<&Path>) -> Outcome {
    let model = load_afr(afr)?;
    let rs = load_resources(resources, false)?;
    let total = rs.iter().try_fold(model, |acc, r| acc.add_resource(r))?;
    emit(out, &afr_to_json(&total, None))
}

fn check(afr: &Path, profile: &Path) -> Outcome {
    let model = load_afr(afr)?;
    let e = parse_profile(&read(profile)?)?;
    let verdict = model.check_membership(&e)?;
    let violations: Vec<_> = verdict
        .violations
        .iter()
        .map(|v| {
            json!({
                "S": v.direction.intervals(),
                "side": v.side.to_string(),
                "value": format_rational(&v.value),
                "bound": format_rational(&v.bound),
            })
        })
        .collect();
    let doc = json!({ "inside": verdict.is_inside(), "violations": violations });
    println!("{}", serde_json::to_string_pretty(&doc).expect("plain json"));
    if verdict.is_inside() {
        Ok(())
    } else {
        Err(Failure::semantic(format!("profile violates {} rows", verdict.violations.len())))
    }
}

fn split(resources: &Path, profile: &Path, out: Option<&Path>) -> Outcome {
    let rs = load_resources(resources, false)?;
    let e = parse_profile(&read(profile)?)?;
    let allocation = disaggregate(&rs, &e)?;
    emit(out, &allocation_to_json(&allocation))
}

fn compare_oracle(resources: &Path, afr: Option<&Path>, max_nt: usize, dump_lp: bool) -> Outcome {
    let rs = load_resources(resources, false)?;
    let opts = OracleOptions { max_nt, ..OracleOptions::default() };
    let oracle = match aggregate_projection_oracle_with(&rs, &opts) {
        Ok(s) => s,
        Err(e @ FmeError::GuardExceeded { .. }) => return Err(Failure { code: 3, message: e.to_string() }),
        Err(e) => return Err(Failure::semantic(e.to_string())),
    };
    if dump_lp {
        eprint!("{}", oracle.dump());
    }
    let model = match afr {
        Some(p) => load_afr(p)?,
        None => build_afr_with(&rs, &BuildOptions { threads: Some(1), contributions: false })?,
    };
    if model.horizon() != rs.horizon() {
        return Err(Failure::input(format!(
            "AFR horizon {} does not match resources horizon {}",
            model.horizon(),
            rs.horizon()
        )));
    }
    let equal = system_equivalent(&model.as_system(), &oracle).map_err(|e| Failure::semantic(e.to_string()))?;
    println!("{}", json!({ "equivalent": equal, "afr_rows": model.inequality_count(), "oracle_rows": oracle.len() }));
    if equal {
        Ok(())
    } else {
        Err(Failure::semantic("AFR differs from the oracle projection"))
    }
}

fn parse_sizes(spec: &str) -> Result<Vec<(usize, usize)>, Failure> {
    spec.split(',')
        .map(|item| {
            let (n, t) = item
                .trim()
                .split_once(['x', 'X'])
                .ok_or_else(|| Failure::input(format!("bad size `{item}`, expected NxT")))?;
            let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| Failure::input(format!("bad size `{item}`")));
            Ok((parse(n)?, parse(t)?))
        })
        .collect()
}

fn theorems(seeds: u64, first_seed: u64, sizes: &str, out: Option<&Path>, mutant: bool) -> Outcome {
    let opts = SuiteOptions { seeds, first_seed, sizes: parse_sizes(sizes)?, mutant };
    let records = run_suite(&opts);
    let mut failed = 0;
    let mut names: Vec<&str> = records.iter().map(|r| r.check.as_str()).collect();
    names.dedup();
    for name in names {
        let of: Vec<_> = records.iter().filter(|r| r.check == name).collect();
        let pass = of.iter().filter(|r| r.pass).count();
        failed += of.len() - pass;
        eprintln!("{name:<22} {pass}/{}", of.len());
        for r in of.iter().filter(|r| !r.pass).take(3) {
            eprintln!("  seed {} failed: {}", r.seed, r.detail.as_deref().unwrap_or(""));
        }
    }
    emit(out, &report_to_json(&records))?;
    if failed > 0 {
        Err(Failure::semantic(format!("{failed} checks failed")))
    } else {
        Ok(())
    }
}

fn bench(ns: &[usize], ts: &[usize], reps: usize, seed: u64) -> Outcome {
    println!("{:>6} {:>4} {:>8} {:>12} {:>16}", "N", "T", "rows", "build_ms", "per_direction_us");
    let mut runs = Vec::new();
    for &t in ts {
        for &n in ns {
            let m = time_build(n, t, seed, reps)?;
            println!(
                "{:>6} {:>4} {:>8} {:>12.3} {:>16.3}",
                m.n,
                m.horizon,
                m.rows,
                m.time.as_secs_f64() * 1e3,
                m.per_direction().as_secs_f64() * 1e6
            );
            runs.push(m);
        }
    }
    if ns.len() >= 3 {
        for &t in ts {
            let of: Vec<_> = runs.iter().filter(|m| m.horizon == t).collect();
            let xs: Vec<f64> = of.iter().map(|m| m.n as f64).collect();
            let ys: Vec<f64> = of.iter().map(|m| m.time.as_secs_f64()).collect();
            println!("T={t}: time ~ a + b*N, R^2 = {:.4}", linear_fit(&xs, &ys).r_squared);
        }
    }
    if ts.len() >= 3 {
        for &n in ns {
            let of: Vec<_> = runs.iter().filter(|m| m.n == n).collect();
            let hs: Vec<usize> = of.iter().map(|m| m.horizon).collect();
            let ys: Vec<f64> = of.iter().map(|m| m.time.as_secs_f64()).collect();
            println!("N={n}: time ~ c*2^T, R^2 (log scale) = {:.4}", exp2_fit(&hs, &ys).r_squared);
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { input, tighten, out } => validate(&input, tighten, out.as_deref()),
        Command::Build { input, out, format, threads, contributions, omit_stats, tighten } => {
            build(&input, out.as_deref(), format, threads, contributions, omit_stats, tighten)
        }
        Command::Merge { inputs, out } => merge(&inputs, out.as_deref()),
        Command::Add { afr, resources, out } => add(&afr, &resources, out.as_deref()),
        Command::Check { afr, profile } => check(&afr, &profile),
        Command::Disaggregate { resources, profile, out } => split(&resources, &profile, out.as_deref()),
        Command::CompareOracle { resources, afr, max_nt, dump_lp } => {
            compare_oracle(&resources, afr.as_deref(), max_nt, dump_lp)
        }
        Command::Theorems { seeds, first_seed, sizes, out, mutant } => {
            theorems(seeds, first_seed, &sizes, out.as_deref(), mutant)
        }
        Command::Bench { n, t, reps, seed } => bench(&n, &t, reps, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
