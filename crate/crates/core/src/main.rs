use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hyperskolem::game::build_game;
use hyperskolem::modelcheck::{eval_matrix, model_check, TraceAssignment};
use hyperskolem::pipeline::{decide, Decision, Instance};
use hyperskolem::server::{serve, AppState};
use hyperskolem::session::{format_lasso, parse_lasso, simulate};
use hyperskolem::solver::SolveOptions;
use hyperskolem::syntax::{parse_formula, HyperFormula};
use hyperskolem::transducer::{verify_skolem, SkolemWitness};
use hyperskolem::ts::TransitionSystem;
use hyperskolem::Error;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "hyperskolem", version, about = "Computable Skolem functions for HyperLTL")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// Limit on states of every automaton, arena and product built
    #[arg(long, default_value_t = 2_000_000)]
    budget_states: usize,
    /// Print one JSON object instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Model-check a sentence against a system
    Check {
        system: PathBuf,
        formula: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide whether satisfaction has computable Skolem functions and extract them
    Skolem {
        system: PathBuf,
        formula: PathBuf,
        /// Where to write the witness on YES
        #[arg(short, long, default_value = "witness.json")]
        out: PathBuf,
        /// Write equivalence diagnostics as JSON
        #[arg(long)]
        dump_equivalence: Option<PathBuf>,
        /// Write the explicit game as JSON
        #[arg(long)]
        dump_game: Option<PathBuf>,
        /// Write the strategy machines as JSON
        #[arg(long)]
        dump_strategy: Option<PathBuf>,
        /// Limit on Player-1 strategies tried for four alternations
        #[arg(long, default_value_t = 64)]
        attempts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run a witness on lasso inputs, one `VAR=PREFIX(CYCLE)` per universal variable
    Simulate {
        witness: PathBuf,
        system: PathBuf,
        #[arg(required = true)]
        inputs: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Serve explanation sessions over HTTP on loopback
    Serve {
        witness: PathBuf,
        system: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory of built UI assets
        #[arg(long)]
        assets: Option<PathBuf>,
        #[arg(long, default_value_t = 2_000_000)]
        budget_states: usize,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    Ok(std::fs::read_to_string(path)?)
}

fn load(system: &Path, formula: &Path) -> Result<(TransitionSystem, HyperFormula), Error> {
    Ok((TransitionSystem::parse(&read(system)?)?, parse_formula(&read(formula)?)?))
}

fn fail(e: &Error, common_json: bool, command: &str) -> ExitCode {
    let (status, code) = match e {
        Error::Budget { .. } => ("BUDGET", 3),
        Error::Incomplete(_) => ("INCOMPLETE", 3),
        _ => ("ERROR", 2),
    };
    if common_json {
        println!("{}", json!({ "schema": SCHEMA, "command": command, "status": status, "message": e.to_string() }));
    } else {
        println!("{status}: {e}");
    }
    ExitCode::from(code)
}

fn emit(json: bool, value: Value, text: &str) {
    if json {
        println!("{value}");
    } else {
        print!("{text}");
    }
}

fn check(system: &Path, formula: &Path, c: &Common) -> Result<ExitCode, Error> {
    let (ts, f) = load(system, formula)?;
    let holds = model_check(&ts, &f, c.budget_states)?;
    let status = if holds { "HOLDS" } else { "FAILS" };
    emit(c.json, json!({ "schema": SCHEMA, "command": "check", "status": status }), &format!("{status}\n"));
    Ok(ExitCode::from(if holds { 0 } else { 1 }))
}

#[allow(clippy::too_many_arguments)]
fn skolem(
    system: &Path,
    formula: &Path,
    out: &Path,
    dump_equivalence: Option<&Path>,
    dump_game: Option<&Path>,
    dump_strategy: Option<&Path>,
    attempts: usize,
    c: &Common,
) -> Result<ExitCode, Error> {
    let (ts, f) = load(system, formula)?;
    let mut notes = Vec::new();
    let target = if model_check(&ts, &f, c.budget_states)? {
        f
    } else {
        notes.push("the sentence fails; looking for counterexample Skolem functions of its negation".to_string());
        f.negate()
    };
    let inst = Instance::prepare(&ts, &target, c.budget_states)?;
    if let Some(p) = dump_equivalence {
        std::fs::write(p, serde_json::to_string_pretty(&inst.equivalence)?)?;
    }
    if let Some(p) = dump_game {
        match build_game(&inst.game()?, c.budget_states) {
            Ok(g) => std::fs::write(p, g.to_json())?,
            Err(e) => notes.push(format!("game not dumped: {e}")),
        }
    }
    let opts = SolveOptions { budget: c.budget_states, attempts };
    let summary = inst.summary();
    let mut text = String::new();
    for n in &notes {
        text.push_str(&format!("note: {n}\n"));
    }
    match decide(&inst, opts)? {
        Decision::No => {
            text.push_str("NO-COMPUTABLE-WITNESS\n");
            emit(c.json, json!({ "schema": SCHEMA, "command": "skolem", "status": "NO", "formula": target.to_string(), "summary": summary, "notes": notes }), &text);
            Ok(ExitCode::from(1))
        }
        Decision::Yes { profile, witness } => {
            if let Some(p) = dump_strategy {
                std::fs::write(p, profile.to_json())?;
            }
            if !verify_skolem(&witness, &inst.outcome.dpa, &ts, c.budget_states)? {
                return Err(Error::Internal("extracted witness does not verify".into()));
            }
            std::fs::write(out, witness.to_json())?;
            let delays: Vec<Value> = witness.transducers.iter().map(|t| json!({ "outputs": t.outputs, "delay": t.delay })).collect();
            text.push_str(&format!("YES\nformula: {target}\nell: {}\ndelta: {:?}\n", summary.ell, summary.delta));
            for t in &witness.transducers {
                text.push_str(&format!("delay bound for {}: {}\n", t.outputs.join(", "), t.delay));
            }
            text.push_str(&format!("witness: {}\n", out.display()));
            emit(
                c.json,
                json!({ "schema": SCHEMA, "command": "skolem", "status": "YES", "formula": target.to_string(), "summary": summary, "delays": delays, "witness": out, "notes": notes }),
                &text,
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_simulate(witness: &Path, system: &Path, inputs: &[String], c: &Common) -> Result<ExitCode, Error> {
    let w = SkolemWitness::from_json(&read(witness)?)?;
    let ts = TransitionSystem::parse(&read(system)?)?;
    w.check_system(&ts)?;
    let mut given = BTreeMap::new();
    for s in inputs {
        let (var, lasso) = s.split_once('=').ok_or_else(|| Error::Format(format!("`{s}`: expected VAR=LASSO")))?;
        given.insert(var.trim().to_string(), parse_lasso(&ts, lasso)?);
    }
    let expected = w.universal_inputs();
    for v in given.keys() {
        if !expected.contains(v) {
            return Err(Error::Format(format!("`{v}` is not a universal input of the witness")));
        }
    }
    if let Some(v) = expected.iter().find(|v| !given.contains_key(*v)) {
        return Err(Error::Unassigned(v.clone()));
    }
    let (outs, lags) = simulate(&w, &ts, &given)?;
    let formula = parse_formula(&w.formula)?;
    let mut asg = TraceAssignment::new(&ts.aps);
    let canonical = ts.canonical_lasso();
    for v in &w.variables {
        let l = given.get(v).or_else(|| outs.get(v)).cloned().unwrap_or_else(|| canonical.clone());
        asg = asg.with(v, l);
    }
    let escaped: Vec<&String> = given.iter().filter(|(_, l)| !ts.accepts_lasso(l)).map(|(v, _)| v).collect();
    let sat = eval_matrix(&formula.matrix, &asg)?;
    let pass = sat || !escaped.is_empty();
    let mut text = String::new();
    for (v, l) in &outs {
        text.push_str(&format!("{v} = {}\n", format_lasso(&ts, l)));
    }
    let verdict = if pass { "PASS" } else { "FAIL" };
    if !escaped.is_empty() && !sat {
        text.push_str(&format!("{verdict} (inputs outside the system: {})\n", escaped.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")));
    } else {
        text.push_str(&format!("{verdict}\n"));
    }
    let shown: BTreeMap<&String, String> = outs.iter().map(|(v, l)| (v, format_lasso(&ts, l))).collect();
    emit(
        c.json,
        json!({ "schema": SCHEMA, "command": "simulate", "status": verdict, "outputs": shown, "lags": lags, "matrix": sat, "escaped": escaped }),
        &text,
    );
    Ok(ExitCode::from(if pass { 0 } else { 1 }))
}

fn run_serve(witness: &Path, system: &Path, port: u16, assets: Option<PathBuf>, budget: usize) -> Result<ExitCode, Error> {
    let w = SkolemWitness::from_json(&read(witness)?)?;
    let ts = TransitionSystem::parse(&read(system)?)?;
    w.check_system(&ts)?;
    let state = AppState::new(Some(w), Some(ts), budget, assets);
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(serve(state, SocketAddr::from(([127, 0, 0, 1], port))))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (res, json, name) = match &cli.cmd {
        Cmd::Check { system, formula, common } => (check(system, formula, common), common.json, "check"),
        Cmd::Skolem { system, formula, out, dump_equivalence, dump_game, dump_strategy, attempts, common } => (
            skolem(system, formula, out, dump_equivalence.as_deref(), dump_game.as_deref(), dump_strategy.as_deref(), *attempts, common),
            common.json,
            "skolem",
        ),
        Cmd::Simulate { witness, system, inputs, common } => (run_simulate(witness, system, inputs, common), common.json, "simulate"),
        Cmd::Serve { witness, system, port, assets, budget_states } => (run_serve(witness, system, *port, assets.clone(), *budget_states), false, "serve"),
    };
    res.unwrap_or_else(|e| fail(&e, json, name))
}
