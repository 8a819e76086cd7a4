use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hookinj::builders::{build, build_memory, InjectionSpec, Protocol, State};
use hookinj::circuit::{apply_noise, transpile_to_cz, NoiseParams, Pauli};
use hookinj::dem::{alternative_floor, analytic_floor, detection_fraction, distance1_floor};
use hookinj::harness::{
    census, deadline_success, expected_cost, half_life, pareto_frontier, read_csv, run_experiment, sweep, write_csv,
    write_json, CostPoint, Limits, StatsRow, SweepPlan, TrialStats,
};

#[derive(Parser)]
#[command(name = "hookinj", version, about = "Simulate magic state injection into rotated surface codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a protocol circuit in the text format.
    Gen(GenArgs),
    /// Run one experiment and report its statistics.
    Sample(SampleArgs),
    /// Run a grid of experiments.
    Sweep(SweepArgs),
    /// Count undetectable distance-1 and distance-2 error mechanisms.
    Enumerate(EnumerateArgs),
    /// Keep the rows of a statistics CSV that are not dominated in cost and error rate.
    Frontier(FrontierArgs),
    /// Detection event fraction of memory experiments.
    Detfrac(DetfracArgs),
    /// Chance of finishing a repeat-until-success injection within a budget.
    Deadline(DeadlineArgs),
}

#[derive(Args, Clone)]
struct SpecArgs {
    #[arg(long, default_value = "hook", value_parser = parse_protocol)]
    protocol: Protocol,
    #[arg(long = "dinject", default_value_t = 5)]
    d_inject: usize,
    #[arg(long = "rinject", default_value_t = 2)]
    r_inject: usize,
    #[arg(long, default_value_t = 7)]
    d: usize,
    #[arg(long = "rhold", default_value_t = 7)]
    r_hold: usize,
    #[arg(long, default_value = "i", value_parser = parse_state)]
    state: State,
}

impl SpecArgs {
    fn spec(&self) -> InjectionSpec {
        InjectionSpec::new(self.protocol, self.d_inject, self.r_inject, self.d, self.r_hold, self.state)
    }
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-shots", default_value_t = 1_000_000)]
    max_shots: u64,
    #[arg(long = "max-errors", default_value_t = 1000)]
    max_errors: u64,
}

impl RunArgs {
    fn limits(&self) -> Limits {
        Limits { max_shots: self.max_shots, max_errors: self.max_errors }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Output file. Standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format. Defaults to JSON for `.json` files and CSV otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl OutArgs {
    fn format(&self) -> Format {
        self.format.unwrap_or(match self.out.as_deref().and_then(Path::extension) {
            Some(ext) if ext == "json" => Format::Json,
            _ => Format::Csv,
        })
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => {
                Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
            }
            None => Box::new(io::stdout().lock()),
        })
    }

    fn write_rows(&self, rows: &[StatsRow]) -> Result<()> {
        let mut w = self.writer()?;
        match self.format() {
            Format::Csv => write_csv(rows, &mut w)?,
            Format::Json => write_json(rows, &mut w)?,
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Transpile to CZ and add SI1000 noise of this strength.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0.001)]
    p: f64,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated protocols.
    #[arg(long, default_value = "hook", value_delimiter = ',', value_parser = parse_protocol)]
    protocol: Vec<Protocol>,
    /// Injection distances, as `2..7` (inclusive) or a single value.
    #[arg(long = "dinject", default_value = "2..7", value_parser = parse_range)]
    d_inject: RangeInclusive<usize>,
    #[arg(long = "rinject", default_value = "1..6", value_parser = parse_range)]
    r_inject: RangeInclusive<usize>,
    #[arg(long, default_value_t = 7)]
    d: usize,
    #[arg(long = "rhold", default_value_t = 7)]
    r_hold: usize,
    /// Comma-separated states.
    #[arg(long, default_value = "i", value_delimiter = ',', value_parser = parse_state)]
    state: Vec<State>,
    /// Comma-separated noise strengths.
    #[arg(long, default_value = "0.001", value_delimiter = ',')]
    p: Vec<f64>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    spec: SpecArgs,
    #[arg(long, default_value_t = 0.001)]
    p: f64,
    /// Write the full census as JSON to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrontierArgs {
    /// Statistics CSV written by `sample` or `sweep`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Ignore rows with fewer logical errors than this.
    #[arg(long = "min-errors", default_value_t = 0)]
    min_errors: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DetfracArgs {
    /// Comma-separated code distances.
    #[arg(long, default_value = "3,5,7,9", value_delimiter = ',')]
    d: Vec<usize>,
    /// Comma-separated noise strengths.
    #[arg(long, default_value = "0.0001,0.0003,0.001,0.003,0.01", value_delimiter = ',')]
    p: Vec<f64>,
    /// Rounds per memory experiment. Defaults to the distance.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    shots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeadlineArgs {
    /// Expected cost in qubit·rounds. Computed from the injection parameters and `--discard` when absent.
    #[arg(long)]
    cost: Option<f64>,
    #[arg(long = "dinject", default_value_t = 5)]
    d_inject: usize,
    #[arg(long = "rinject", default_value_t = 2)]
    r_inject: usize,
    #[arg(long, default_value_t = 0.0)]
    discard: f64,
    /// Available qubit·rounds.
    #[arg(long)]
    budget: f64,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: hookinj::builders::BuildError| e.to_string())
}

fn parse_state(s: &str) -> Result<State, String> {
    s.parse().map_err(|e: hookinj::builders::BuildError| e.to_string())
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => {
            let v = num(s)?;
            Ok(v..=v)
        }
    }
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn gen(args: &GenArgs) -> Result<()> {
    let spec = args.spec.spec();
    let built = build(&spec)?;
    let circuit = match args.p {
        Some(p) => apply_noise(&transpile_to_cz(&built.circuit)?, NoiseParams::si1000(p))?,
        None => built.circuit,
    };
    write_text(args.out.as_deref(), &format!("{circuit}"))
}

fn progress(stats: &TrialStats) {
    let row = stats.row();
    eprintln!(
        "{} {} d_inject={} r_inject={} p={}: {} shots, {} discards, {} errors",
        row.protocol, row.state, row.d_inject, row.r_inject, row.p, row.shots, row.discards, row.errors
    );
}

fn sample(args: &SampleArgs) -> Result<()> {
    let stats = run_experiment(&args.spec.spec(), args.p, args.run.limits(), args.run.seed)?;
    progress(&stats);
    args.out.write_rows(&[stats.row()])
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let plan = SweepPlan {
        protocols: args.protocol.clone(),
        states: args.state.clone(),
        d_inject: args.d_inject.clone(),
        r_inject: args.r_inject.clone(),
        d: args.d,
        r_hold: args.r_hold,
        ps: args.p.clone(),
        limits: args.run.limits(),
        seed: args.run.seed,
    };
    let stats = sweep(&plan, progress)?;
    let rows: Vec<StatsRow> = stats.iter().map(TrialStats::row).collect();
    args.out.write_rows(&rows)
}

fn enumerate(args: &EnumerateArgs) -> Result<()> {
    let spec = args.spec.spec();
    let c = census(&spec, args.p)?;
    println!("{} state={} d_inject={} r_inject={} d={} p={}", spec.protocol, spec.state, spec.d_inject, spec.r_inject, spec.d, args.p);
    println!("mechanisms: {}", c.mechanisms);
    println!("distance-1: {}", c.distance1.len());
    for m in &c.distance1 {
        println!("  {}", m.provenance);
    }
    let floor = distance1_floor(&c.distance1, 0);
    println!("distance-1 floor: {floor:.6e} = {:.4}·p", floor / args.p);
    println!("distance-2 pairs: {}", c.distance2.pairs);
    println!("distance-2 participating: {}", c.distance2.participating);
    println!("distance-2 c2: {:.3}", c.distance2.c2);
    let (a, b) = (analytic_floor(spec.state), alternative_floor(spec.state));
    println!("analytic floor: {:.6e} ({}·p + {}·p²)", a.at(args.p), a.linear, a.quadratic);
    println!("alternative pairing: {:.6e} ({}·p + {}·p²)", b.at(args.p), b.linear, b.quadratic);
    if let Some(path) = &args.out {
        let file = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
        serde_json::to_writer_pretty(file, &c)?;
    }
    Ok(())
}

fn frontier(args: &FrontierArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("opening {}", args.input.display()))?;
    let rows = read_csv(file)?;
    let mut groups: Vec<((String, String, String), Vec<CostPoint>)> = Vec::new();
    for row in rows.iter().filter(|r| r.errors >= args.min_errors) {
        let (Some(error_rate), Some(cost), Some(lo), Some(hi), Some(discard)) =
            (row.error_rate, row.expected_cost_qubit_rounds, row.err_lo, row.err_hi, row.discard_rate)
        else {
            continue;
        };
        let key = (row.protocol.clone(), row.state.clone(), row.p.to_string());
        let point = CostPoint {
            protocol: row.protocol.clone(),
            state: row.state.clone(),
            r_inject: row.r_inject,
            d_inject: row.d_inject,
            expected_cost: cost,
            error_rate,
            err_lo: lo,
            err_hi: hi,
            discard_rate: discard,
        };
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => g.1.push(point),
            None => groups.push((key, vec![point])),
        }
    }
    let mut text = String::from("protocol,state,p,r_inject,d_inject,expected_cost_qubit_rounds,error_rate,err_lo,err_hi,discard_rate\n");
    for ((_, _, p), points) in &groups {
        for f in pareto_frontier(points) {
            text += &format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                f.protocol, f.state, p, f.r_inject, f.d_inject, f.expected_cost, f.error_rate, f.err_lo, f.err_hi, f.discard_rate
            );
        }
    }
    write_text(args.out.as_deref(), &text)
}

fn detfrac(args: &DetfracArgs) -> Result<()> {
    let mut text = String::from("d,rounds,p,shots,detection_fraction,seed\n");
    for &d in &args.d {
        let rounds = args.rounds.unwrap_or(d);
        let built = build_memory(d, rounds, Pauli::Z)?;
        let circuit = transpile_to_cz(&built.circuit)?;
        for &p in &args.p {
            let noisy = apply_noise(&circuit, NoiseParams::si1000(p))?;
            let f = detection_fraction(&noisy, args.shots, args.seed)?;
            eprintln!("d={d} p={p}: {f:.5}");
            text += &format!("{d},{rounds},{p},{},{f},{}\n", args.shots, args.seed);
        }
    }
    write_text(args.out.as_deref(), &text)
}

fn deadline(args: &DeadlineArgs) -> Result<()> {
    let cost = match args.cost {
        Some(c) => c,
        None => {
            let spec = InjectionSpec::new(Protocol::Hook, args.d_inject, args.r_inject, args.d_inject, 0, State::I);
            expected_cost(&spec, args.discard)?
        }
    };
    if args.budget < 0.0 {
        bail!("budget must be nonnegative");
    }
    let success = deadline_success(cost, args.budget)?;
    println!("expected_cost_qubit_rounds,half_life,budget,half_lives,success_probability");
    println!("{cost},{},{},{},{success}", half_life(cost), args.budget, args.budget / half_life(cost));
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen(a) => gen(&a),
        Command::Sample(a) => sample(&a),
        Command::Sweep(a) => run_sweep(&a),
        Command::Enumerate(a) => enumerate(&a),
        Command::Frontier(a) => frontier(&a),
        Command::Detfrac(a) => detfrac(&a),
        Command::Deadline(a) => deadline(&a),
    }
}
