//! Command-line front end: reads a JSON model, dispatches to the kernel and
//! renders the result as a JSON envelope or an aligned table.

pub mod commands;
pub mod fixtures;
pub mod table;

use std::fmt;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use credal_kernel::json::{envelope, parse_document, SCHEMA};
use credal_kernel::Error;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "credal-kernel", version, about = "Interval and credal probability on event domains")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Fractional digits in table output.
    #[arg(long, default_value_t = 4, global = true)]
    pub precision: usize,
    /// Absolute tolerance for Beta distribution functions without their own `tol`.
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub beta_tol: f64,
    /// Dyadic depth of threshold grids in `logic`.
    #[arg(long, default_value_t = 10, global = true)]
    pub grid_depth: u32,
    /// Cylinder depth in `ifs`.
    #[arg(long, default_value_t = 12, global = true)]
    pub ifs_depth: u32,
    /// Write the bundled example documents into this directory and exit.
    #[arg(long, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Valuation of open sets and event probabilities.
    Eval(Input),
    /// Conditional probability interval of an event given an event.
    Cond(Input),
    /// Interval Bayes posterior.
    Bayes(Input),
    /// Credal-set conditionals and posteriors.
    Credal(Input),
    /// Conditional independence checks and combinations.
    Ci {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = CiMode::Compare)]
        mode: CiMode,
    },
    /// Inference rules: forward application, witness search, soundness sweeps.
    Logic {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = LogicMode::Apply)]
        mode: LogicMode,
    },
    /// Iterated function systems with interval weights.
    Ifs(Input),
    /// Stationary bounds of interval Markov chains.
    Markov {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = MarkovMode::Vertices)]
        mode: MarkovMode,
        /// Report only this state (1-based).
        #[arg(long)]
        state: Option<usize>,
        /// Hill-climbing steps in refine mode.
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
}

#[derive(clap::Args, Debug)]
pub struct Input {
    /// Path of a JSON document, `-` for standard input, or inline JSON.
    pub input: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CiMode {
    /// Classical, Fréchet and strong combinations side by side.
    Compare,
    CombineFrechet,
    CombineStrong,
    /// Check `I(U⫫V|W)` on a joint valuation.
    Check,
    /// Graphoid rules CI1 to CI4 on event tuples.
    Graphoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogicMode {
    Apply,
    Backward,
    Sweep,
    /// Grid approximation of interval endpoints through the threshold predicates.
    Complete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MarkovMode {
    Exact,
    Vertices,
    Refine,
}

/// A failed run: the exit status and a diagnostic document.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub diagnostic: Value,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure { code: 1, diagnostic: envelope("error", json!({ "class": "input", "message": msg.into() })) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, class) = if e.is_precondition() { (2, "precondition") } else { (1, "input") };
        let mut body = json!({ "class": class, "message": e.to_string() });
        if let Error::Parse { path, .. } = &e {
            body["path"] = json!(path);
        }
        Failure { code, diagnostic: envelope("error", body) }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string_pretty(&self.diagnostic).unwrap_or_default())
    }
}

/// The result of a subcommand in both renderings.
pub struct Report {
    pub kind: &'static str,
    pub body: Value,
    pub table: String,
}

/// Options shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub precision: usize,
    pub beta_tol: f64,
    pub grid_depth: u32,
    pub ifs_depth: u32,
    /// 1-based state filter for `markov`.
    pub state: Option<usize>,
    /// Hill-climbing steps for `markov` in refine mode.
    pub steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { precision: 4, beta_tol: 1e-12, grid_depth: 10, ifs_depth: 12, state: None, steps: 64 }
    }
}

fn read_input(input: &str) -> Result<String, Failure> {
    let trimmed = input.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(input.to_string());
    }
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::input(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(input).map_err(|e| Failure::input(format!("reading {input}: {e}")))
}

/// Gives every Beta law without an explicit `tol` the configured tolerance.
fn apply_beta_tolerance(v: &mut Value, tol: f64) {
    match v {
        Value::Object(m) => {
            if m.get("law").and_then(Value::as_str) == Some("beta") && !m.contains_key("tol") {
                m.insert("tol".into(), json!(tol));
            }
            m.values_mut().for_each(|x| apply_beta_tolerance(x, tol));
        }
        Value::Array(a) => a.iter_mut().for_each(|x| apply_beta_tolerance(x, tol)),
        _ => {}
    }
}

fn parse_mode<M: ValueEnum>(mode: Option<&str>, default: M) -> Result<M, Failure> {
    match mode {
        None => Ok(default),
        Some(m) => M::from_str(m, true).map_err(|_| Failure::input(format!("unknown mode \"{m}\""))),
    }
}

/// Runs one subcommand, named as on the command line, on a parsed document.
pub fn run_document(command: &str, mode: Option<&str>, mut doc: Value, opts: &Options) -> Result<Report, Failure> {
    if let Some(s) = doc.get("schema") {
        if s.as_str() != Some(SCHEMA) {
            return Err(Error::Parse { path: "/schema".into(), msg: format!("unsupported schema {s}") }.into());
        }
    }
    if !doc.is_object() {
        return Err(Error::Parse { path: "/".into(), msg: "expected a JSON object".into() }.into());
    }
    apply_beta_tolerance(&mut doc, opts.beta_tol);
    let no_mode = |r: Result<Report, Failure>| match mode {
        Some(m) => Err(Failure::input(format!("{command} takes no mode, got \"{m}\""))),
        None => r,
    };
    match command {
        "eval" => no_mode(commands::eval(&doc, opts)),
        "cond" => no_mode(commands::cond(&doc, opts)),
        "bayes" => no_mode(commands::bayes(&doc, opts)),
        "credal" => no_mode(commands::credal(&doc, opts)),
        "ifs" => no_mode(commands::ifs(&doc, opts)),
        "ci" => commands::ci(&doc, parse_mode(mode, CiMode::Compare)?, opts),
        "logic" => commands::logic(&doc, parse_mode(mode, LogicMode::Apply)?, opts),
        "markov" => commands::markov(&doc, parse_mode(mode, MarkovMode::Vertices)?, opts),
        other => Err(Failure::input(format!("unknown command \"{other}\""))),
    }
}

fn mode_name<M: ValueEnum>(m: &M) -> String {
    m.to_possible_value().expect("every mode is visible").get_name().to_string()
}

/// Runs the parsed command line and returns the text to print.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    if let Some(dir) = &cli.fixtures {
        let written = fixtures::write_all(dir).map_err(|e| Failure::input(format!("writing fixtures: {e}")))?;
        return Ok(written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join("\n") + "\n");
    }
    let Some(command) = &cli.command else {
        return Err(Failure::input("no subcommand given; see --help"));
    };
    let mut opts = Options {
        precision: cli.precision,
        beta_tol: cli.beta_tol,
        grid_depth: cli.grid_depth,
        ifs_depth: cli.ifs_depth,
        ..Options::default()
    };
    let (name, input, mode) = match command {
        Command::Eval(i) => ("eval", i, None),
        Command::Cond(i) => ("cond", i, None),
        Command::Bayes(i) => ("bayes", i, None),
        Command::Credal(i) => ("credal", i, None),
        Command::Ifs(i) => ("ifs", i, None),
        Command::Ci { input, mode } => ("ci", input, Some(mode_name(mode))),
        Command::Logic { input, mode } => ("logic", input, Some(mode_name(mode))),
        Command::Markov { input, mode, state, steps } => {
            opts.state = *state;
            opts.steps = *steps;
            ("markov", input, Some(mode_name(mode)))
        }
    };
    let doc = parse_document(&read_input(&input.input)?)?;
    let report = run_document(name, mode.as_deref(), doc, &opts)?;
    Ok(match cli.format {
        Format::Json => serde_json::to_string_pretty(&envelope(report.kind, report.body)).expect("serializable") + "\n",
        Format::Table => report.table,
    })
}
