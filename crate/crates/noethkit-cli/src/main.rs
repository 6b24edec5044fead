//! `noethkit`: batch front end. Every command prints one JSON document on
//! stdout; errors go to stderr with exit code 2 for malformed input and 1
//! for everything else.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use noethkit::expanders::{self, Config, ExpanderSpec};
use noethkit::inductive::{self, DivisibilityTable, FunctorExpr};
use noethkit::sets::{self, OpenExpr};
use noethkit::space;
use noethkit::syntax;
use noethkit::wsts::{self, Schedule, SystemFile};
use noethkit::{Error, Ordinal, Result};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "noethkit", version, about = "Noetherian topologies, expanders and coverability")]
struct Cli {
    /// Oracle bound for extents (word length, tree size, largest natural).
    #[arg(long, global = true, env = "NOETHKIT_ORACLE_BOUND", default_value_t = 4)]
    bound: usize,
    /// Seed for randomized schedules.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Step or insertion limit.
    #[arg(long, global = true)]
    fuel: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a query over a space.
    Eval {
        #[command(subcommand)]
        query: Query,
    },
    /// Iterate an expander from the trivial topology.
    Iterate {
        #[command(flatten)]
        expander: ExpanderArgs,
        #[arg(long, default_value_t = 3)]
        steps: usize,
        #[arg(long, default_value_t = 256)]
        cap: usize,
        /// Graphviz Hasse diagram of the last stage.
        #[arg(long)]
        dot_out: Option<PathBuf>,
        /// Copy of the JSON report.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Search for a strictly increasing chain of stage generators.
    Badchain {
        #[command(flatten)]
        expander: ExpanderArgs,
        #[arg(long, default_value_t = 5)]
        length: usize,
        #[arg(long, default_value_t = 1 << 14)]
        cap: usize,
    },
    /// First index of a sequence of opens covered by its predecessors.
    Good {
        /// File with one open expression per entry.
        file: PathBuf,
        #[arg(long)]
        space: String,
    },
    /// Backward coverability for a system description file.
    Cover { file: PathBuf },
    /// Divisibility preorder checks for a functor.
    Divisibility {
        functor: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum)]
        check: DivCheck,
        /// Largest element size enumerated.
        #[arg(long, default_value_t = 4)]
        size: usize,
    },
    /// Run the three-counter program from `(a, b, c)`.
    Alg {
        a: u64,
        b: u64,
        c: u64,
        /// `l`, `r`, `lr`, `rl`, `cycle:<rules>`, `random` (uses --seed) or `random:<seed>`.
        #[arg(long, default_value = "lr")]
        schedule: String,
    },
}

#[derive(Subcommand)]
enum Query {
    /// Whether a point lies in an open set.
    Member {
        point: String,
        open: String,
        #[arg(long)]
        space: String,
    },
    /// Whether one open set is included in another.
    Includes {
        left: String,
        right: String,
        #[arg(long)]
        space: String,
    },
    /// The quasi-order between two points.
    Leq {
        left: String,
        right: String,
        #[arg(long)]
        space: String,
    },
    /// The closure of a point, with its extent at the bound.
    Closure {
        point: String,
        #[arg(long)]
        space: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DivCheck {
    Stability,
    Coincidence,
    Embedding,
}

#[derive(clap::Args)]
struct ExpanderArgs {
    /// div, baditer, regsubexp, treeexp, regsubexpord, treeexpom or divexp.
    expander: String,
    /// Letter space for word and tree expanders.
    #[arg(long, default_value = "(fin a b)")]
    base: String,
    /// Ordinal length bound for the ordinal expanders.
    #[arg(long, default_value = "w")]
    alpha: String,
    /// Functor for divexp; defaults to words over the base.
    #[arg(long)]
    functor: Option<String>,
}

impl ExpanderArgs {
    fn spec(&self) -> Result<ExpanderSpec> {
        let base = || syntax::space_from_str(&self.base);
        let alpha = || self.alpha.parse::<Ordinal>().map_err(Error::from);
        Ok(match self.expander.as_str() {
            "div" => ExpanderSpec::Div,
            "baditer" => ExpanderSpec::BadIterator(base()?),
            "regsubexp" => ExpanderSpec::RegSubExp(base()?),
            "treeexp" => ExpanderSpec::TreeExp(base()?),
            "regsubexpord" => ExpanderSpec::reg_sub_exp_ord(base()?, alpha()?),
            "treeexpom" => ExpanderSpec::TreeExpOm(base()?, alpha()?),
            "divexp" => ExpanderSpec::DivExpOf(match &self.functor {
                Some(f) => syntax::functor_from_str(f)?,
                None => FunctorExpr::words(base()?),
            }),
            other => return Err(Error::Parse { line: 1, col: 1, message: format!("unknown expander {other:?}") }),
        })
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn eval(query: &Query, bound: usize) -> Result<Value> {
    Ok(match query {
        Query::Member { point, open, space } => {
            let s = syntax::space_from_str(space)?;
            let p = syntax::point_from_str(&s, point)?;
            let u = syntax::open_from_str(&s, open)?;
            json!({ "query": "member", "point": p.to_string(), "open": u.to_string(), "result": sets::member_open(&s, &p, &u)? })
        }
        Query::Includes { left, right, space } => {
            let s = syntax::space_from_str(space)?;
            let a = syntax::open_from_str(&s, left)?;
            let b = syntax::open_from_str(&s, right)?;
            let inc = sets::includes(&s, &a, &b, bound)?;
            json!({ "query": "includes", "left": a.to_string(), "right": b.to_string(), "result": to_json(&inc) })
        }
        Query::Leq { left, right, space } => {
            let s = syntax::space_from_str(space)?;
            let x = syntax::point_from_str(&s, left)?;
            let y = syntax::point_from_str(&s, right)?;
            json!({ "query": "leq", "left": x.to_string(), "right": y.to_string(), "result": space::point_leq(&s, &x, &y)? })
        }
        Query::Closure { point, space } => {
            let s = syntax::space_from_str(space)?;
            let p = syntax::point_from_str(&s, point)?;
            let c = sets::closure_point(&s, &p)?;
            let extent: Vec<String> = sets::extent_closed(&s, &c, bound)?.iter().map(|x| x.to_string()).collect();
            json!({ "query": "closure", "point": p.to_string(), "closure": c.to_string(), "bound": bound, "extent": extent })
        }
    })
}

fn run(cli: &Cli) -> Result<Value> {
    let bound = cli.bound;
    match &cli.command {
        Command::Eval { query } => eval(query, bound),
        Command::Iterate { expander, steps, cap, dot_out, json_out } => {
            let e = expander.spec()?;
            let cfg = Config { bound, cap: *cap, ..Config::default() };
            let it = expanders::iterate(&e, *steps, &cfg)?;
            let stages = it.stages[1..].iter().map(|s| expanders::dump_stage(s, bound).map(|d| to_json(&d))).collect::<Result<Vec<_>>>()?;
            let report = json!({
                "expander": e.name(),
                "space": e.space().to_string(),
                "steps": steps,
                "bound": bound,
                "cap": cap,
                "fixed_point": it.fixed_point,
                "stages": stages,
            });
            if let Some(path) = dot_out {
                write(path, &expanders::export_dot(it.stages.last().expect("stage 0"), bound)?)?;
            }
            if let Some(path) = json_out {
                write(path, &format!("{}\n", serde_json::to_string_pretty(&report).expect("json")))?;
            }
            Ok(report)
        }
        Command::Badchain { expander, length, cap } => {
            let e = expander.spec()?;
            let cfg = Config { bound, cap: *cap, ..Config::default() };
            let chain = expanders::find_bad_chain(&e, *length, &cfg)?;
            Ok(json!({
                "expander": e.name(),
                "length": length,
                "bound": bound,
                "chain": chain.map(|c| c.iter().map(|o| o.to_string()).collect::<Vec<_>>()),
            }))
        }
        Command::Good { file, space } => {
            let s = syntax::space_from_str(space)?;
            let seq = noethkit::sexpr::parse_many(&read(file)?)?
                .iter()
                .map(|x| syntax::parse_open(&s, x))
                .collect::<Result<Vec<OpenExpr>>>()?;
            let index = expanders::find_good_index(&s, &seq, bound)?;
            Ok(json!({ "length": seq.len(), "bound": bound, "index": index }))
        }
        Command::Cover { file } => {
            let sys: SystemFile =
                serde_json::from_str(&read(file)?).map_err(|e| Error::Parse { line: e.line(), col: e.column(), message: e.to_string() })?;
            let fuel = cli.fuel.unwrap_or(wsts::DEFAULT_FUEL);
            let verdict = wsts::backward_coverability(&sys.system, &sys.init_state()?, &sys.target_set()?, fuel)?;
            let mut out = to_json(&verdict);
            out["fuel"] = json!(fuel);
            out["space"] = json!(sys.system.state_space().to_string());
            Ok(out)
        }
        Command::Divisibility { functor, depth, check, size } => {
            let f = syntax::functor_from_str(functor)?;
            Ok(match check {
                DivCheck::Coincidence => {
                    let mut out = to_json(&inductive::coincidence(&f, *depth, *size)?);
                    out["check"] = json!("coincidence");
                    out
                }
                DivCheck::Stability => {
                    let table = DivisibilityTable::build(&f, *depth, *size)?;
                    let stages: Vec<bool> = (1..=table.depth()).map(|n| table.is_stable(n)).collect();
                    json!({ "check": "stability", "holds": stages.iter().all(|&b| b), "stages": stages, "size": size })
                }
                DivCheck::Embedding => {
                    let table = DivisibilityTable::build(&f, *depth, *size)?;
                    json!({
                        "check": "embedding",
                        "holds": table.is_conservative() && table.is_preorder(),
                        "elements": table.elements.len(),
                        "size": size,
                    })
                }
            })
        }
        Command::Alg { a, b, c, schedule } => {
            let sched = match schedule.as_str() {
                "random" => Schedule::Random(cli.seed),
                s => s.parse()?,
            };
            let fuel = cli.fuel.unwrap_or(1 << 24);
            let trace = wsts::run_alg([*a, *b, *c], &sched, fuel)?;
            Ok(json!({
                "start": [a, b, c],
                "schedule": schedule,
                "seed": cli.seed,
                "length": trace.len(),
                "bad": wsts::is_bad(&trace),
                "trace": trace,
            }))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(v) => {
            let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&v).expect("json"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("noethkit: {e}");
            ExitCode::from(if e.is_parse() { 2 } else { 1 })
        }
    }
}
