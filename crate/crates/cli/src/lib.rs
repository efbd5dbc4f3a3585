//! The `dsum` command line.
//!
//! Exit codes: 0 on success, 1 when a verification or certification fails,
//! 2 on usage or input errors.

pub mod cache;
pub mod record;

use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{value_parser, Args, Parser, Subcommand, ValueEnum};
use dsum_core::certify::{
    certified_bounds, descent_scan, forward_invariance_scan, three_digit_identity_check,
    threshold_inequality_check, verify_range, AttractorAtlas, AttractorId, VerificationReport,
};
use dsum_core::dynamics::{classify_within, default_max_steps, default_max_steps_for};
use dsum_core::gridsort::{
    format_grid, parse_grid, trace_bubble, verify_exhaustive, verify_random, GridReport, Shape,
};
use dsum_core::{
    bubble_column_sort, enumerate_attractors, sort_cols, sort_rows, step_until_repeat,
    DigitSystem, Grid, Natural,
};
use serde::Serialize;

use crate::cache::{default_cache_dir, load_or_compute};
use crate::record::AtlasCacheRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dsum", version, about = "Digit-power-sum dynamics and grid sorting checks")]
pub struct Cli {
    /// Digit base (≥ 2)
    #[arg(long, global = true, default_value_t = 10, value_parser = value_parser!(u32).range(2..))]
    pub base: u32,
    /// Digit exponent (≥ 1)
    #[arg(long = "exp", global = true, default_value_t = 2, value_parser = value_parser!(u32).range(1..))]
    pub exponent: u32,
    /// Emit one canonical JSON object instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory for atlas cache files [default: $XDG_CACHE_HOME/dsum]
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Do not read or write the atlas cache
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Step budget for orbit iteration
    #[arg(long, global = true, value_parser = value_parser!(u64).range(1..))]
    pub max_steps: Option<u64>,
    /// Seed for random grid generation
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel verification
    #[arg(long, global = true, value_parser = value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the orbit of N up to its first repeated value
    Traj { n: Natural },
    /// Name the attractor the orbit of N falls into
    Classify { n: Natural },
    /// Whether the orbit of N reaches 1
    Happy { n: Natural },
    /// List every fixed point and cycle, with the certification constants
    Attractors,
    /// Run every certification stage for the system
    Certify(CertifyArgs),
    /// Row/column sorting of integer grids
    #[command(subcommand)]
    Grid(GridCommand),
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Start of the range checked against the atlas [default: 0]
    #[arg(long)]
    pub lo: Option<Natural>,
    /// End of the range checked against the atlas [default: B]
    #[arg(long)]
    pub hi: Option<Natural>,
    /// Largest digit count for the threshold inequality check [default: max(100, p0)]
    #[arg(long)]
    pub p_max: Option<u32>,
    /// Delete the attractor with this minimum member before verifying.
    #[arg(long, hide = true)]
    pub drop_attractor: Option<Natural>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SortMode {
    Rows,
    Cols,
    Both,
    Bubble,
}

#[derive(Debug, Subcommand)]
pub enum GridCommand {
    /// Sort a grid read from FILE (or stdin)
    Sort {
        file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SortMode::Both)]
        mode: SortMode,
        /// With bubble mode, print the grid after every two-row merge
        #[arg(long)]
        trace: bool,
    },
    /// Check the sorting theorem on random or exhaustively enumerated grids
    #[command(allow_negative_numbers = true)]
    Verify {
        #[arg(long, default_value_t = 3, value_parser = value_parser!(u64).range(1..))]
        rows: u64,
        #[arg(long, default_value_t = 5, value_parser = value_parser!(u64).range(1..))]
        cols: u64,
        #[arg(long, default_value_t = 10_000, value_parser = value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = -1000)]
        min: i64,
        #[arg(long, default_value_t = 1000)]
        max: i64,
        /// Draw each grid's size uniformly up to --rows × --cols
        #[arg(long)]
        random_shape: bool,
        /// Enumerate every grid with entries in 0..alphabet instead
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 3, value_parser = value_parser!(i64).range(1..))]
        alphabet: i64,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Verification(format!("i/o error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

/// Execute a parsed command line, writing results to `out` and diagnostics
/// to `err`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32 {
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n as usize).build() {
            Ok(pool) => pool.install(|| dispatch(cli, out, err)),
            Err(e) => Err(Failure::Usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(cli, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Verification(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_VERIFICATION
        }
    }
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Outcome {
    let sys = DigitSystem::new(cli.base, cli.exponent).map_err(|e| Failure::Usage(e.to_string()))?;
    match &cli.command {
        Command::Traj { n } => cmd_traj(cli, sys, n, out),
        Command::Classify { n } => cmd_classify(cli, sys, n, false, out, err),
        Command::Happy { n } => cmd_classify(cli, sys, n, true, out, err),
        Command::Attractors => cmd_attractors(cli, sys, out, err),
        Command::Certify(args) => cmd_certify(cli, sys, args, out),
        Command::Grid(GridCommand::Sort { file, mode, trace }) => {
            cmd_grid_sort(cli, file.as_deref(), *mode, *trace, out)
        }
        Command::Grid(GridCommand::Verify {
            rows,
            cols,
            trials,
            min,
            max,
            random_shape,
            exhaustive,
            alphabet,
        }) => {
            let (rows, cols) = (*rows as usize, *cols as usize);
            if *exhaustive {
                let report = verify_exhaustive(rows, cols, *alphabet);
                let label = format!("{rows}×{cols}, alphabet {alphabet}");
                emit_grid_report(cli, "exhaustive", &label, &report, out)
            } else {
                if min > max {
                    return Err(Failure::Usage(format!("--min {min} exceeds --max {max}")));
                }
                let shape = if *random_shape {
                    Shape::UpTo { rows, cols }
                } else {
                    Shape::Fixed { rows, cols }
                };
                let report = verify_random(shape, *trials, cli.seed, *min, *max);
                let size = if *random_shape { "up to " } else { "" };
                let label = format!("{size}{rows}×{cols}, seed {}, entries in [{min}, {max}]", cli.seed);
                emit_grid_report(cli, "random", &label, &report, out)
            }
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    out.write_all(s.as_bytes())
}

fn join(values: &[Natural]) -> String {
    values.iter().map(Natural::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct TrajOutput<'a> {
    base: u32,
    cycle: &'a [Natural],
    cycle_length: usize,
    exponent: u32,
    start: &'a Natural,
    steps: &'a [Natural],
    transient: usize,
}

fn cmd_traj(cli: &Cli, sys: DigitSystem, n: &Natural, out: &mut dyn Write) -> Outcome {
    let budget = cli.max_steps.unwrap_or_else(|| default_max_steps_for(n, sys));
    let t = step_until_repeat(n, sys, budget).map_err(|e| Failure::Verification(e.to_string()))?;
    if cli.json {
        write_json(
            out,
            &TrajOutput {
                base: sys.base(),
                cycle: t.terminal.members(),
                cycle_length: t.terminal.len(),
                exponent: sys.exponent(),
                start: &t.start,
                steps: &t.steps,
                transient: t.transient_length(),
            },
        )?;
    } else {
        writeln!(out, "start: {}", t.start)?;
        writeln!(out, "steps: {}", join(&t.steps))?;
        writeln!(out, "transient: {}", t.transient_length())?;
        let kind = if t.terminal.is_fixed_point() { "fixed point" } else { "cycle" };
        writeln!(out, "{kind} (length {}): {}", t.terminal.len(), join(t.terminal.members()))?;
    }
    Ok(())
}

fn atlas_for(cli: &Cli, sys: DigitSystem, err: &mut dyn Write) -> Result<AttractorAtlas, Failure> {
    let dir = if cli.no_cache { None } else { cli.cache_dir.clone().or_else(default_cache_dir) };
    load_or_compute(dir.as_deref(), sys, err)
        .map(|(atlas, _)| atlas)
        .map_err(|e| Failure::Verification(e.to_string()))
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    attractor: &'a [Natural],
    base: u32,
    exponent: u32,
    happy: bool,
    kind: &'static str,
    n: &'a Natural,
}

fn cmd_classify(
    cli: &Cli,
    sys: DigitSystem,
    n: &Natural,
    happy_only: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let atlas = atlas_for(cli, sys, err)?;
    let budget = cli.max_steps.unwrap_or_else(|| default_max_steps(n, sys, atlas.brute_bound()));
    let id = classify_within(n, sys, &atlas, budget).map_err(|e| Failure::Verification(e.to_string()))?;
    let attractor = atlas.attractor(id);
    let happy = attractor.members() == [Natural::one()];
    let kind = if attractor.is_fixed_point() { "fixed-point" } else { "cycle" };
    if cli.json {
        write_json(
            out,
            &ClassifyOutput { attractor: attractor.members(), base: sys.base(), exponent: sys.exponent(), happy, kind, n },
        )?;
    } else if happy_only {
        writeln!(out, "{n}: {}", if happy { "happy" } else { "not happy" })?;
    } else if attractor.is_fixed_point() {
        writeln!(out, "{n}: fixed point {}", attractor.min())?;
    } else {
        writeln!(out, "{n}: cycle (length {}) {}", attractor.len(), join(attractor.members()))?;
    }
    Ok(())
}

fn cmd_attractors(cli: &Cli, sys: DigitSystem, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let atlas = atlas_for(cli, sys, err)?;
    let record = AtlasCacheRecord::from_atlas(&atlas);
    if cli.json {
        out.write_all(record.to_json().as_bytes())?;
        return Ok(());
    }
    writeln!(out, "system: base {}, exponent {}", record.base, record.exponent)?;
    writeln!(out, "p0: {}", record.p0)?;
    writeln!(out, "brute bound: {}", record.brute_bound)?;
    writeln!(out, "max transient: {}", record.max_transient)?;
    writeln!(out, "fixed points: {}", join(&record.fixed_points))?;
    writeln!(out, "cycles: {}", record.cycles.len())?;
    for c in &record.cycles {
        writeln!(out, "  {} (length {})", join(c), c.len())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifyOutput<'a> {
    base: u32,
    brute_bound: &'a Natural,
    exponent: u32,
    p0: u32,
    stages: &'a [VerificationReport],
    success: bool,
}

fn describe_stage(r: &VerificationReport) -> String {
    let range = format!("{} values in [{},{}]", r.checked, r.lo, r.hi);
    let mut line = match &r.failure {
        None => format!("{}: ok, {range} verified", r.stage.name()),
        Some(f) => format!("{}: FAILED, {range} checked; n = {}: {}", r.stage.name(), f.n, f.reason),
    };
    if let Some(t) = r.max_transient {
        line.push_str(&format!(", max transient {t}"));
    }
    if let Some(g) = &r.min_gap {
        line.push_str(&format!(", min n - f(n) = {g}"));
    }
    line
}

fn cmd_certify(cli: &Cli, sys: DigitSystem, args: &CertifyArgs, out: &mut dyn Write) -> Outcome {
    let verification = |e: dsum_core::CertifyError| Failure::Verification(e.to_string());
    let (p0, bound) = certified_bounds(sys);
    let p_max = args.p_max.unwrap_or(p0.max(100));
    if p_max < p0 {
        return Err(Failure::Usage(format!("--p-max {p_max} is below the threshold p0 = {p0}")));
    }
    let lo = args.lo.clone().unwrap_or_else(Natural::zero);
    let hi = args.hi.clone().unwrap_or_else(|| bound.clone());
    if lo > hi {
        return Err(Failure::Usage(format!("--lo {lo} exceeds --hi {hi}")));
    }

    let mut atlas = enumerate_attractors(sys).map_err(verification)?;
    if let Some(min) = &args.drop_attractor {
        let id = (0..atlas.attractors().len() as u32)
            .map(AttractorId)
            .find(|&id| atlas.attractor(id).min() == min)
            .ok_or_else(|| Failure::Usage(format!("no attractor has minimum {min}")))?;
        atlas = atlas.without_attractor(id);
    }

    let mut stages = vec![
        threshold_inequality_check(sys, p_max).map_err(verification)?,
        forward_invariance_scan(sys, &bound).map_err(verification)?,
    ];
    if sys == DigitSystem::decimal_squares() {
        stages.push(three_digit_identity_check());
        stages.push(descent_scan(sys, &100u64.into(), &999u64.into()).map_err(verification)?);
        stages.push(verify_range(sys, &atlas, &Natural::zero(), &99u64.into()).map_err(verification)?);
    }
    stages.push(verify_range(sys, &atlas, &lo, &hi).map_err(verification)?);

    let first_failure = stages.iter().find_map(|r| r.failure.as_ref().map(|f| (r.stage.name(), f)));
    if cli.json {
        write_json(
            out,
            &CertifyOutput {
                base: sys.base(),
                brute_bound: &bound,
                exponent: sys.exponent(),
                p0,
                stages: &stages,
                success: first_failure.is_none(),
            },
        )?;
    } else {
        writeln!(out, "system: base {}, exponent {}; p0 = {p0}, B = {bound}", sys.base(), sys.exponent())?;
        for r in &stages {
            writeln!(out, "{}", describe_stage(r))?;
        }
        if first_failure.is_none() {
            writeln!(out, "certified: {} attractors, every orbit reaches one", atlas.attractors().len())?;
        }
    }
    match first_failure {
        None => Ok(()),
        Some((stage, f)) => Err(Failure::Verification(format!(
            "certification failed at stage {stage}, n = {}: {}",
            f.n, f.reason
        ))),
    }
}

#[derive(Serialize)]
struct GridStep {
    grid: Vec<Vec<i64>>,
    label: String,
}

#[derive(Serialize)]
struct GridSortOutput {
    mode: SortMode,
    passes: Option<usize>,
    steps: Vec<GridStep>,
}

fn read_grid(file: Option<&std::path::Path>) -> Result<Grid, Failure> {
    let (name, text) = match file {
        Some(p) if p.as_os_str() != "-" => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
            (p.display().to_string(), text)
        }
        _ => {
            let mut text = String::new();
            io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
            ("<stdin>".to_string(), text)
        }
    };
    parse_grid(&text).map_err(|e| Failure::Usage(format!("{name}: {e}")))
}

fn cmd_grid_sort(
    cli: &Cli,
    file: Option<&std::path::Path>,
    mode: SortMode,
    trace: bool,
    out: &mut dyn Write,
) -> Outcome {
    if trace && mode != SortMode::Bubble {
        return Err(Failure::Usage("--trace requires --mode bubble".into()));
    }
    let grid = read_grid(file)?;
    let mut steps = Vec::new();
    let mut passes = None;
    match mode {
        SortMode::Rows => steps.push(("rows".to_string(), sort_rows(&grid))),
        SortMode::Cols => steps.push(("cols".to_string(), sort_cols(&grid))),
        SortMode::Both => {
            let rows = sort_rows(&grid);
            let cols = sort_cols(&rows);
            steps.push(("rows".to_string(), rows));
            steps.push(("cols".to_string(), cols));
        }
        SortMode::Bubble => {
            let (sorted, count) = bubble_column_sort(&grid);
            passes = Some(count);
            if trace {
                for s in trace_bubble(&grid) {
                    let label = format!("pass {}, rows {}-{}", s.step.pass, s.step.upper + 1, s.step.upper + 2);
                    steps.push((label, s.snapshot));
                }
            }
            if steps.is_empty() {
                steps.push(("bubble".to_string(), sorted));
            }
        }
    }
    if cli.json {
        let steps = steps.into_iter().map(|(label, g)| GridStep { grid: g.to_rows(), label }).collect();
        return Ok(write_json(out, &GridSortOutput { mode, passes, steps })?);
    }
    for (i, (label, g)) in steps.iter().enumerate() {
        if i > 0 {
            writeln!(out)?;
        }
        if trace {
            writeln!(out, "# {label}")?;
        }
        out.write_all(format_grid(g).as_bytes())?;
    }
    if let (true, Some(p)) = (trace, passes) {
        writeln!(out, "\n# {p} passes")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CounterexampleOutput {
    grid: Vec<Vec<i64>>,
    index: u64,
    seed: u64,
    violation: String,
}

#[derive(Serialize)]
struct GridVerifyOutput {
    checked: u64,
    counterexample: Option<CounterexampleOutput>,
    mode: &'static str,
    success: bool,
}

fn emit_grid_report(
    cli: &Cli,
    mode: &'static str,
    label: &str,
    report: &GridReport,
    out: &mut dyn Write,
) -> Outcome {
    if cli.json {
        write_json(
            out,
            &GridVerifyOutput {
                checked: report.checked,
                counterexample: report.counterexample.as_ref().map(|c| CounterexampleOutput {
                    grid: c.grid.to_rows(),
                    index: c.index,
                    seed: cli.seed,
                    violation: c.violation.to_string(),
                }),
                mode,
                success: report.is_success(),
            },
        )?;
    } else {
        match &report.counterexample {
            None => writeln!(out, "{} grids checked ({label}): no counterexample", report.checked)?,
            Some(c) => {
                writeln!(out, "counterexample after {} grids ({label})", report.checked)?;
                writeln!(out, "seed {} index {}: {}", cli.seed, c.index, c.violation)?;
                out.write_all(format_grid(&c.grid).as_bytes())?;
            }
        }
    }
    match &report.counterexample {
        None => Ok(()),
        Some(c) => Err(Failure::Verification(format!(
            "grid property violated at index {} (seed {}): {}",
            c.index, cli.seed, c.violation
        ))),
    }
}
