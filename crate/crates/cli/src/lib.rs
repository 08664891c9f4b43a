//! The `binet` command-line interpreter.

mod dot;

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use binet::rho::{nat_rules, RhoError};
use binet::{
    check_ruleset, compile_rho, iso, parse_binet, parse_rho, parse_rules, print_binet, reduce,
    Binet, Limits, ReductionTrace, RuleSet, Strategy, StrategyKind, Termination,
};
use clap::{Args, Parser, Subcommand};

pub use dot::export_dot;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for parse or validation failures and bad arguments.
pub const EXIT_INVALID: i32 = 1;
/// Exit status when a reduction stops at a pass or step limit.
pub const EXIT_LIMIT: i32 = 2;

const DEFAULT_MAX_PASSES: usize = 10_000;

#[derive(Parser, Debug)]
#[command(name = "binet", version, about = "Interpreter for bigraphical nets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate nets, rule files and ρ terms.
    Check {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, env = "BINET_RULES")]
        rules: Option<PathBuf>,
    },
    /// Reduce to normal form and print the result with statistics.
    Run(RunArgs),
    /// Apply a number of passes and print the snapshot reached.
    Step {
        #[command(flatten)]
        run: RunArgs,
        #[arg(short = 'n', long, default_value_t = 1)]
        passes: usize,
    },
    /// Print the per-firing log of a reduction.
    Trace(RunArgs),
    /// Compile a ρ term to a binet.
    Rho {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Count interactions across strategies and seeds.
    Bench {
        input: PathBuf,
        #[arg(long, env = "BINET_RULES")]
        rules: Option<PathBuf>,
        /// `all` or a comma-separated list of strategy names.
        #[arg(long, default_value = "all")]
        strategies: String,
        /// Stochastic runs use seeds 0..N.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long)]
        max_passes: Option<usize>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    input: PathBuf,
    #[arg(long, env = "BINET_RULES")]
    rules: Option<PathBuf>,
    #[arg(long, default_value = "deterministic")]
    strategy: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a rule priority, as `rule=N`. Repeatable.
    #[arg(long = "priority", value_name = "RULE=N")]
    priorities: Vec<String>,
    /// Fire one redex per pass.
    #[arg(long)]
    single: bool,
    #[arg(long)]
    max_passes: Option<usize>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Write every snapshot to this directory.
    #[arg(long, value_name = "DIR")]
    snapshots: Option<PathBuf>,
    /// Write the resulting binet as DOT.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
}

/// A fully resolved reduction request.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub rules: RuleSet,
    pub strategy: Strategy,
    pub limits: Limits,
    pub snapshots: Option<PathBuf>,
    pub dot: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure(i32, String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(EXIT_INVALID, e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn is_rho(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "rho")
}

fn located(path: &Path, e: impl std::fmt::Display) -> Failure {
    let e = e.to_string();
    let sep = if e.starts_with(|c: char| c.is_ascii_digit()) {
        ":"
    } else {
        ": "
    };
    Failure(EXIT_INVALID, format!("{}{sep}{e}", path.display()))
}

fn compile(path: &Path, src: &str) -> Result<Binet, Failure> {
    let term = parse_rho(src).map_err(|e| located(path, e))?;
    compile_rho(&term).map_err(|e: RhoError| located(path, e))
}

/// Loads a `.binet` or, by extension, a `.rho` file.
fn load_net(path: &Path) -> Result<Binet, Failure> {
    let src = read(path)?;
    if is_rho(path) {
        compile(path, &src)
    } else {
        parse_binet(&src).map_err(|e| located(path, e))
    }
}

fn bundled_rules(name: &str) -> Option<RuleSet> {
    match name {
        "rho.rules" => Some(binet::rho_rules()),
        "nat.rules" => Some(nat_rules()),
        _ => None,
    }
}

/// Reads a rule file. A missing path that names a bundled file loads the
/// bundled copy.
fn load_rules(path: &Path) -> Result<RuleSet, Failure> {
    if !path.exists() {
        if let Some(rs) = path.to_str().and_then(bundled_rules) {
            return Ok(rs);
        }
    }
    let rs = parse_rules(&read(path)?).map_err(|e| located(path, e))?;
    let report = check_ruleset(&rs);
    if !report.is_valid() {
        let mut msg = format!("{}: invalid rule set", path.display());
        for v in &report.violations {
            let _ = write!(msg, "\n  {v}");
        }
        return Err(Failure(EXIT_INVALID, msg));
    }
    Ok(rs)
}

fn resolve_rules(rules: Option<&Path>, input: &Path) -> Result<RuleSet, Failure> {
    match rules {
        Some(p) => load_rules(p),
        None if is_rho(input) => Ok(binet::rho_rules()),
        None => Err(Failure(
            EXIT_INVALID,
            "no rules given: pass --rules or set BINET_RULES".into(),
        )),
    }
}

fn parse_strategy(name: &str, seed: Option<u64>) -> Result<Strategy, Failure> {
    let kind: StrategyKind = name.parse()?;
    match (kind, seed) {
        (StrategyKind::Stochastic { .. }, Some(seed)) => Ok(Strategy::stochastic(seed)),
        (StrategyKind::Stochastic { .. }, None) => Err(Failure(
            EXIT_INVALID,
            "--strategy stochastic requires --seed".into(),
        )),
        (_, Some(_)) => Err(Failure(
            EXIT_INVALID,
            "--seed applies only to --strategy stochastic".into(),
        )),
        (StrategyKind::Deterministic, None) => Ok(Strategy::deterministic()),
        (StrategyKind::Weighted, None) => Ok(Strategy::weighted()),
    }
}

fn apply_priorities(rs: &mut RuleSet, specs: &[String]) -> Result<(), Failure> {
    for spec in specs {
        let bad = || {
            Failure(
                EXIT_INVALID,
                format!("bad --priority `{spec}`: expected RULE=N"),
            )
        };
        let (id, n) = spec.split_once('=').ok_or_else(bad)?;
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let rule = rs
            .rules
            .iter_mut()
            .find(|r| r.id == id.trim())
            .ok_or_else(|| Failure(EXIT_INVALID, format!("--priority: no rule `{id}`")))?;
        rule.priority = Some(n);
    }
    Ok(())
}

fn limits(max_passes: Option<usize>, max_steps: Option<usize>) -> Limits {
    Limits {
        max_passes: Some(max_passes.unwrap_or(DEFAULT_MAX_PASSES)),
        max_steps,
    }
}

impl RunConfig {
    fn from_args(a: &RunArgs) -> Result<Self, Failure> {
        let mut rules = resolve_rules(a.rules.as_deref(), &a.input)?;
        apply_priorities(&mut rules, &a.priorities)?;
        let mut strategy = parse_strategy(&a.strategy, a.seed)?;
        if a.single {
            strategy = strategy.single();
        }
        Ok(RunConfig {
            input: a.input.clone(),
            rules,
            strategy,
            limits: limits(a.max_passes, a.max_steps),
            snapshots: a.snapshots.clone(),
            dot: a.dot.clone(),
        })
    }

    fn reduce(&self) -> Result<ReductionTrace, Failure> {
        let net = load_net(&self.input)?;
        let trace = reduce(&net, &self.rules, self.strategy, self.limits)?;
        if let Some(dir) = &self.snapshots {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", dir.display())))?;
            for (i, s) in trace.snapshots.iter().enumerate() {
                let path = dir.join(format!("pass_{i:04}.binet"));
                std::fs::write(&path, print_binet(s))
                    .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))?;
            }
        }
        if let Some(path) = &self.dot {
            std::fs::write(path, export_dot(trace.final_binet()))
                .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", path.display())))?;
        }
        Ok(trace)
    }
}

fn status(trace: &ReductionTrace) -> i32 {
    match trace.termination {
        Termination::NormalForm => EXIT_OK,
        Termination::StepLimit => EXIT_LIMIT,
    }
}

fn stats(trace: &ReductionTrace, strategy: Strategy) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# strategy: {strategy}");
    let _ = writeln!(s, "# passes: {}", trace.passes.len());
    let _ = writeln!(
        s,
        "# interactions: {} ({} active, {} inactive)",
        trace.interactions(),
        trace.active_count(),
        trace.inactive_count()
    );
    let term = match trace.termination {
        Termination::NormalForm => "normal form",
        Termination::StepLimit => "limit reached",
    };
    let _ = writeln!(s, "# termination: {term}");
    if !trace.stuck.is_empty() {
        let labels: Vec<&str> = trace.stuck.iter().map(|l| l.as_str()).collect();
        let _ = writeln!(s, "# stuck pairs: {}", labels.join(", "));
    }
    s
}

fn check(inputs: &[PathBuf], rules: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let mut ok = true;
    let mut errors = String::new();
    if let Some(r) = rules {
        match load_rules(r) {
            Ok(rs) => writeln!(out, "{}: ok ({} rules)", r.display(), rs.rules.len())?,
            Err(Failure(_, msg)) => {
                ok = false;
                let _ = writeln!(errors, "{msg}");
            }
        }
    }
    for path in inputs {
        let result = if path.extension().is_some_and(|e| e == "rules") {
            load_rules(path).map(|rs| format!("{} rules", rs.rules.len()))
        } else {
            load_net(path).map(|b| format!("{} agents", b.agent_count()))
        };
        match result {
            Ok(what) => writeln!(out, "{}: ok ({what})", path.display())?,
            Err(Failure(_, msg)) => {
                ok = false;
                let _ = writeln!(errors, "{msg}");
            }
        }
    }
    if ok {
        Ok(EXIT_OK)
    } else {
        Err(Failure(EXIT_INVALID, errors.trim_end().to_string()))
    }
}

fn bench_strategies(spec: &str, seeds: u64) -> Result<Vec<Strategy>, Failure> {
    let names: Vec<&str> = if spec == "all" {
        vec!["deterministic", "weighted", "stochastic"]
    } else {
        spec.split(',').map(str::trim).collect()
    };
    let mut out = Vec::new();
    for name in names {
        match name.parse::<StrategyKind>()? {
            StrategyKind::Deterministic => out.push(Strategy::deterministic()),
            StrategyKind::Weighted => out.push(Strategy::weighted()),
            StrategyKind::Stochastic { .. } => out.extend((0..seeds).map(Strategy::stochastic)),
        }
    }
    Ok(out)
}

fn bench(
    input: &Path,
    rules: Option<&Path>,
    strategies: &str,
    seeds: u64,
    limits: Limits,
    out: &mut dyn Write,
) -> CmdResult {
    let rs = resolve_rules(rules, input)?;
    let net = load_net(input)?;
    writeln!(
        out,
        "strategy\tseed\tpasses\tinteractions\tactive\tinactive\tnormal_form\tiso_first"
    )?;
    let mut first: Option<Binet> = None;
    let mut counts = Vec::new();
    let mut code = EXIT_OK;
    for s in bench_strategies(strategies, seeds)? {
        let trace = reduce(&net, &rs, s, limits)?;
        let seed = match s.kind {
            StrategyKind::Stochastic { seed } => seed.to_string(),
            _ => "-".into(),
        };
        let nf = trace.termination == Termination::NormalForm;
        if !nf {
            code = EXIT_LIMIT;
        }
        let result = trace.final_binet();
        let same = first.get_or_insert_with(|| result.clone());
        writeln!(
            out,
            "{}\t{seed}\t{}\t{}\t{}\t{}\t{}\t{}",
            s.name(),
            trace.passes.len(),
            trace.interactions(),
            trace.active_count(),
            trace.inactive_count(),
            if nf { "yes" } else { "no" },
            if iso(same, result) { "yes" } else { "no" },
        )?;
        counts.push(trace.interactions());
    }
    counts.sort_unstable();
    counts.dedup();
    let verdict = if counts.len() == 1 {
        "identical"
    } else {
        "differ"
    };
    writeln!(out, "# interaction counts {verdict} across runs")?;
    Ok(code)
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Check { inputs, rules } => check(&inputs, rules.as_deref(), out),
        Command::Run(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let trace = cfg.reduce()?;
            write!(out, "{}", print_binet(trace.final_binet()))?;
            write!(out, "{}", stats(&trace, cfg.strategy))?;
            Ok(status(&trace))
        }
        Command::Step { mut run, passes } => {
            run.max_passes = Some(passes);
            let cfg = RunConfig::from_args(&run)?;
            let trace = cfg.reduce()?;
            write!(out, "{}", print_binet(trace.final_binet()))?;
            writeln!(out, "# passes: {}", trace.passes.len())?;
            Ok(EXIT_OK)
        }
        Command::Trace(a) => {
            let cfg = RunConfig::from_args(&a)?;
            let trace = cfg.reduce()?;
            writeln!(out, "pass\trule\tpath\tinteractions")?;
            write!(out, "{}", trace.log())?;
            Ok(status(&trace))
        }
        Command::Rho { input, output } => {
            let net = compile(&input, &read(&input)?)?;
            let text = print_binet(&net);
            match output {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| Failure(EXIT_INVALID, format!("{}: {e}", p.display())))?,
                None => write!(out, "{text}")?,
            }
            Ok(EXIT_OK)
        }
        Command::Bench {
            input,
            rules,
            strategies,
            seeds,
            max_passes,
            max_steps,
        } => bench(
            &input,
            rules.as_deref(),
            &strategies,
            seeds,
            limits(max_passes, max_steps),
            out,
        ),
    }
}

/// Runs one command. Results go to `out`, diagnostics to `err`. Returns
/// the exit status.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let stream: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(stream, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
