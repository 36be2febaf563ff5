//! `qfa`: construct, analyze, generate, verify and game subcommands.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage error.

mod config;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::One;
use serde_json::{json, Value};

use qfa_core::analysis::*;
use qfa_core::constructions::ConstructionId;
use qfa_core::contextuality::*;
use qfa_core::machines::{compile, emit_spec, parse_spec, MachineSpec, ModelClass};
use qfa_core::problems::{generate, GenRequest, Problem, Status};
use qfa_core::verify::{run_suite, Suite};
use qfa_core::Rational;

use input::{build_instance, parse_input, problem_for, Input, InstanceParams};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "qfa", version, about = "Exact simulation and verification of quantum finite automata")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit the machine-spec document of a builtin construction.
    Construct {
        /// Construction id, e.g. AW_PAL or EVENODD_MCQFA (with --k) or EVENODD_MCQFA(3).
        id: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analyze a machine on one input.
    Analyze(AnalyzeArgs),
    /// Generate promise-problem instances as JSON lines.
    Generate {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Block count for EXPPromiseTWINPAL.
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, value_enum)]
        status: Option<WantStatus>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Play the magic-square or memory game.
    Game {
        #[command(subcommand)]
        game: Game,
    },
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Builtin construction id, or a path to a machine-spec document.
    machine: String,
    /// Parameter of EVENODD_MCQFA / EVENODD_DFA.
    #[arg(long)]
    k: Option<u32>,
    /// Input word; digits make it run-length shorthand (`a8` = aaaaaaaa).
    #[arg(long)]
    input: Option<String>,
    /// Promise problem, for instance parameters and the promise check.
    #[arg(long)]
    problem: Option<String>,
    /// First half of a PAL or TWINPAL instance.
    #[arg(long)]
    u: Option<String>,
    /// Second half of a PAL or TWINPAL instance.
    #[arg(long)]
    v: Option<String>,
    /// EXPPromiseTWINPAL block count (default 25^|u|).
    #[arg(long)]
    t: Option<u64>,
    /// PromiseEQ repeated block length.
    #[arg(long)]
    m: Option<u64>,
    /// PromiseEQ odd block length.
    #[arg(long)]
    n: Option<u64>,
    /// EVENODD multiplier: the input is a^(i * 2^k).
    #[arg(long)]
    i: Option<u64>,
    /// PromiseEQ: put the odd block in the middle (a^m b a^n b a^m).
    #[arg(long)]
    swap: bool,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Run even when the input violates the promise.
    #[arg(long)]
    allow_unpromised: bool,
    /// Monte Carlo trial count.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Required in mc mode.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-trial step limit in mc mode.
    #[arg(long, default_value_t = 1_000_000)]
    step_cap: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Bits for certified sin^2 enclosures.
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    precision_bits: u32,
    /// Sweep budget for one iteration in sweep mode.
    #[arg(long, default_value_t = 10_000)]
    max_sweeps: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Subcommand, Debug)]
enum Game {
    /// Peres–Mermin magic-square game.
    MagicSquare {
        #[arg(long, value_enum, default_value_t = Strategy::Quantum)]
        strategy: Strategy,
        /// Classical Alice rows, e.g. `+++/+++/+++`.
        #[arg(long)]
        alice: Option<String>,
        /// Classical Bob columns (top to bottom), e.g. `+++/+++/++-`.
        #[arg(long)]
        bob: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// EVENODD memory-verification game.
    Memory {
        #[arg(long = "bob", value_enum)]
        bob: BobKind,
        #[arg(long = "q", visible_alias = "Q", default_value_t = 8)]
        q: u32,
        /// Classical state budget: decimal or `2^e`.
        #[arg(long = "n", visible_alias = "N")]
        n: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Restart,
    Sweep,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WantStatus {
    Yes,
    No,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Quantum,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BobKind {
    Quantum,
    Classical,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// Failures carry the exit code they map to.
enum Failure {
    Usage(anyhow::Error),
    Check(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Check(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct { id, k, out } => construct(&id, k, out),
        Command::Analyze(a) => analyze(a),
        Command::Generate { problem, size, count, seed, t, status, out } => gen(&problem, size, count, seed, t, status, out),
        Command::Verify { suite, workers, out } => verify(suite, workers, out),
        Command::Game { game } => match game {
            Game::MagicSquare { strategy, alice, bob, rounds, seed, out } => magic(strategy, alice, bob, rounds, seed, out),
            Game::Memory { bob, q, n, seed, out } => memory(bob, q, n, seed, out),
        },
    }
}

fn construction(id: &str, k: Option<u32>) -> Result<ConstructionId, Failure> {
    let parsed = if id.contains('(') { id.parse() } else { ConstructionId::parse(id, k) };
    parsed.map_err(|e| usage(anyhow!("{e} (known ids: {})", ConstructionId::NAMES.join(", "))))
}

fn construct(id: &str, k: Option<u32>, out: Option<PathBuf>) -> Outcome {
    let spec = construction(id, k)?.build().map_err(usage)?;
    output::write(out.as_deref(), emit_spec(&spec).as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| usage(anyhow!("{what} is stochastic: pass an explicit --seed")))
}

fn emit(out: &OutArgs, doc: &Value, csv: impl FnOnce() -> anyhow::Result<Vec<u8>>) -> Result<(), Failure> {
    let bytes = match out.format {
        Format::Json => output::json_bytes(doc)?,
        Format::Csv => csv()?,
    };
    output::write(out.out.as_deref(), &bytes)?;
    Ok(())
}

fn to_value(x: &impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("serialisable")
}

// ---------------------------------------------------------------- analyze

fn load_machine(a: &AnalyzeArgs) -> Result<(MachineSpec, String, Option<Problem>), Failure> {
    if let Ok(id) = construction(&a.machine, a.k) {
        let spec = id.build().map_err(usage)?;
        return Ok((spec, id.to_string(), problem_for(id)));
    }
    let path = PathBuf::from(&a.machine);
    if !path.exists() {
        return Err(usage(anyhow!(
            "`{}` is neither a builtin construction ({}) nor a spec file",
            a.machine,
            ConstructionId::NAMES.join(", ")
        )));
    }
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let spec = parse_spec(&text).map_err(|e| usage(anyhow!("{}: {e}", path.display())))?;
    let name = spec.name.clone();
    Ok((spec, name, None))
}

fn analysis_failure(e: AnalysisError) -> Failure {
    match e {
        AnalysisError::WrongClass { .. } | AnalysisError::Machine(_) => usage(e),
        other => Failure::Check(other.into()),
    }
}

fn analyze(a: AnalyzeArgs) -> Outcome {
    let (spec, name, builtin_problem) = load_machine(&a)?;
    let machine = compile(&spec).map_err(usage)?;
    let explicit = a.problem.as_deref().map(str::parse::<Problem>).transpose().map_err(usage)?;
    let problem = explicit.or(builtin_problem);
    let params = InstanceParams { u: a.u.clone(), v: a.v.clone(), t: a.t, m: a.m, n: a.n, i: a.i, swap: a.swap };
    let input = match (&a.input, params.any()) {
        (Some(_), true) => return Err(usage(anyhow!("give either --input or instance parameters, not both"))),
        (Some(raw), false) => parse_input(raw).map_err(usage)?,
        (None, true) => {
            let p = explicit.or(problem).ok_or_else(|| usage(anyhow!("instance parameters need --problem")))?;
            build_instance(p, &params).map_err(usage)?
        }
        (None, false) => return Err(usage(anyhow!("no input: pass --input or --problem with its parameters"))),
    };
    let status = match problem {
        Some(p) => Some(input.status(p).map_err(usage)?),
        None => None,
    };
    if status == Some(Status::OutsidePromise) && !a.allow_unpromised {
        let p = problem.expect("status implies problem");
        return Err(usage(anyhow!("input {} is outside the promise of {p}; pass --allow-unpromised to run anyway", input.describe())));
    }

    let class = machine.class();
    let (result, certified) = match a.mode {
        Mode::Exact => {
            if !class.is_realtime() {
                return Err(usage(anyhow!("exact mode needs a realtime machine, got {class}; try --mode sweep or --mode mc")));
            }
            let unary = matches!(class, ModelClass::Mcqfa | ModelClass::RtDfa) && machine.spec.alphabet.len() == 1;
            let fast = match (&input, unary) {
                (Input::Unary(_, n), true) => match run_exact_unary(&machine, n) {
                    Ok(d) => Some(d),
                    Err(AnalysisError::NeedsCertified) => None,
                    Err(e) => return Err(analysis_failure(e)),
                },
                _ => None,
            };
            match fast {
                Some(d) => (to_value(&d), false),
                None => {
                    let text = input.materialise().map_err(usage)?;
                    match run_exact_realtime(&machine, &text) {
                        Ok(d) => (to_value(&d), false),
                        Err(AnalysisError::NeedsCertified) => (
                            to_value(&run_certified_realtime(&machine, &text, a.precision_bits).map_err(analysis_failure)?),
                            true,
                        ),
                        Err(e) => return Err(analysis_failure(e)),
                    }
                }
            }
        }
        Mode::Restart => {
            let text = input.materialise().map_err(usage)?;
            match analyze_restarting(&machine, &text) {
                Ok(r) => (to_value(&r), false),
                Err(AnalysisError::NeedsCertified) => (
                    to_value(&analyze_restarting_certified(&machine, &text, a.precision_bits).map_err(analysis_failure)?),
                    true,
                ),
                Err(e) => return Err(analysis_failure(e)),
            }
        }
        Mode::Sweep => {
            let text = input.materialise().map_err(usage)?;
            (to_value(&analyze_sweeping(&machine, &text, a.max_sweeps).map_err(analysis_failure)?), false)
        }
        Mode::Mc => {
            let seed = require_seed(a.seed, "Monte Carlo analysis")?;
            let text = input.materialise().map_err(usage)?;
            let mut cfg = McConfig::new(a.trials, seed, a.step_cap).with_workers(a.workers);
            cfg.precision_bits = a.precision_bits;
            (to_value(&run_monte_carlo(&machine, &text, &cfg).map_err(analysis_failure)?), false)
        }
    };
    let doc = json!({
        "machine": name,
        "model_class": class.to_string(),
        "input": input.describe(),
        "length": input.length().to_string(),
        "problem": problem.map(|p| p.to_string()),
        "status": status,
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "certified": certified,
        "result": result,
    });
    emit(&a.out, &doc, || output::flat_csv(&doc))?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- generate

fn gen(problem: &str, size: usize, count: usize, seed: Option<u64>, t: Option<u64>, status: Option<WantStatus>, out: OutArgs) -> Outcome {
    let problem: Problem = problem.parse().map_err(usage)?;
    let seed = require_seed(seed, "instance generation")?;
    let mut req = GenRequest::new(problem, size, count, seed);
    req.t = t;
    req.want = status.map(|s| match s {
        WantStatus::Yes => Status::Yes,
        WantStatus::No => Status::No,
        WantStatus::Outside => Status::OutsidePromise,
    });
    let instances = generate(&req).map_err(usage)?;
    let bytes = match out.format {
        Format::Json => {
            let mut b = Vec::new();
            for inst in &instances {
                serde_json::to_writer(&mut b, inst).context("serialising instance")?;
                b.push(b'\n');
            }
            b
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = instances
                .iter()
                .map(|i| vec![i.problem.to_string(), i.string.clone(), format!("{:?}", i.status)])
                .collect();
            output::table_csv(&["problem", "string", "status"], &rows)?
        }
    };
    output::write(out.out.as_deref(), &bytes)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- verify

fn verify(suite: Suite, workers: usize, out: OutArgs) -> Outcome {
    let report = run_suite(suite, workers);
    for c in &report.checks {
        eprintln!("{}", c.line());
    }
    let doc = to_value(&report);
    emit(&out, &doc, || {
        let rows: Vec<Vec<String>> = report
            .checks
            .iter()
            .map(|c| {
                let vals: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
                vec![
                    c.criterion.to_string(),
                    c.name.clone(),
                    c.passed.to_string(),
                    c.cases.to_string(),
                    vals.join(" "),
                    c.counterexample.clone().unwrap_or_default(),
                ]
            })
            .collect();
        output::table_csv(&["criterion", "name", "passed", "cases", "values", "counterexample"], &rows)
    })?;
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

// ---------------------------------------------------------------- games

fn parse_table(s: &str) -> anyhow::Result<[[i8; 3]; 3]> {
    let parts: Vec<&str> = s.split('/').collect();
    if parts.len() != 3 {
        bail!("table `{s}` needs three groups separated by `/`");
    }
    let mut t = [[0i8; 3]; 3];
    for (r, p) in parts.iter().enumerate() {
        let cells: Vec<i8> = p
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(anyhow!("table `{s}`: use only + and -")),
            })
            .collect::<anyhow::Result<_>>()?;
        if cells.len() != 3 {
            bail!("table `{s}`: each group needs three entries");
        }
        t[r].copy_from_slice(&cells);
    }
    Ok(t)
}

fn signs(t: &[i8; 3]) -> String {
    t.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect()
}

fn magic(strategy: Strategy, alice: Option<String>, bob: Option<String>, rounds: u64, seed: Option<u64>, out: OutArgs) -> Outcome {
    let seed = require_seed(seed, "the magic-square game")?;
    let strat = match strategy {
        Strategy::Quantum => MagicStrategy::QuantumBell,
        Strategy::Classical => {
            let alice = parse_table(alice.as_deref().unwrap_or("+++/+++/+++")).map_err(usage)?;
            let bob = parse_table(bob.as_deref().unwrap_or("+++/+++/++-")).map_err(usage)?;
            MagicStrategy::ClassicalDeterministic(StrategyTables { alice, bob })
        }
    };
    let transcript = play_magic_square(&strat, rounds, seed).map_err(usage)?;
    let doc = to_value(&transcript);
    emit(&out, &doc, || {
        let rows: Vec<Vec<String>> = transcript
            .rounds
            .iter()
            .enumerate()
            .map(|(n, r)| vec![n.to_string(), r.i.to_string(), r.j.to_string(), signs(&r.alice), signs(&r.bob), r.win.to_string()])
            .collect();
        output::table_csv(&["round", "i", "j", "alice", "bob", "win"], &rows)
    })?;
    Ok(ExitCode::SUCCESS)
}

fn parse_budget(s: &str) -> anyhow::Result<BigUint> {
    if let Some((base, exp)) = s.split_once('^') {
        let base: BigUint = base.trim().parse()?;
        let exp: u32 = exp.trim().parse()?;
        return Ok(base.pow(exp));
    }
    Ok(s.trim().parse()?)
}

fn memory(bob: BobKind, q: u32, n: Option<String>, seed: Option<u64>, out: OutArgs) -> Outcome {
    let seed = require_seed(seed, "the memory game")?;
    let budget = match (&n, bob) {
        (Some(s), _) => Some(parse_budget(s).map_err(usage)?),
        (None, BobKind::Classical) => return Err(usage(anyhow!("a classical Bob needs a state budget --N"))),
        (None, BobKind::Quantum) => None,
    };
    let b = match bob {
        BobKind::Quantum => MemoryBob::QuantumQubit,
        BobKind::Classical => MemoryBob::ClassicalBounded(budget.clone().expect("checked")),
    };
    let report = memory_game(&b, q, seed).map_err(usage)?;
    let table = inequality_table(q, &budget.unwrap_or_else(|| BigUint::one() << 1u32)).map_err(usage)?;
    let doc = json!({ "report": to_value(&report), "table": to_value(&table) });
    emit(&out, &doc, || {
        let rows: Vec<Vec<String>> = table
            .iter()
            .map(|r| {
                let exact = r.exact.as_ref().map(Rational::to_string).unwrap_or_default();
                let dec = r.exact.as_ref().map(|x| x.to_decimal_string(15)).unwrap_or_default();
                vec![r.problem.clone(), r.model.clone(), r.memory.clone(), r.value.clone(), exact, dec]
            })
            .collect();
        output::table_csv(&["problem", "model", "memory", "value", "exact", "decimal"], &rows)
    })?;
    Ok(ExitCode::SUCCESS)
}
