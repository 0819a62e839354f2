//! Command-line front end. `run` does all the work and returns the exit code
//! together with the stdout payload, so the binary is a thin wrapper.

use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::braid::{parse_braid, BraidError, BraidWord};
use crate::conventions::{
    boundary_q_degree, negative, positive, symmetric_limit, weyl_balanced, ConventionError, ConventionTag, Shift,
};
use crate::oracle::{alexander_check, rt_two_route, yang_baxter_report, OracleError, OracleReport};
use crate::qseries::specialize;
use crate::trace::{reduced_trace, reduced_trace_y1, TraceError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVALID_BRAID: i32 = 2;
pub const EXIT_NON_KNOT: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "fksl3", about = "Two-variable sl3 series of positive braid knots")]
pub struct Cli {
    /// Worker threads for the state sum.
    #[arg(long, global = true, env = "FKSL3_THREADS", default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the reduced trace and convert it to a normalization.
    Compute(ComputeArgs),
    /// Run an independent cross-check.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ShiftArg {
    Down,
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Alexander,
    YangBaxter,
    Rt,
}

/// A pair `n,m` of naturals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Weight(pub i64, pub i64);

impl FromStr for Weight {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(',').ok_or_else(|| format!("expected n,m, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<i64>().ok().filter(|v| *v >= 0).ok_or_else(|| format!("bad natural {t:?}"));
        Ok(Weight(parse(a)?, parse(b)?))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

#[derive(Args, Debug, Clone)]
pub struct BraidArgs {
    /// Positive braid word, e.g. "1 1 1" or "1^3".
    #[arg(long)]
    pub braid: String,
    #[arg(long, default_value_t = 2)]
    pub strands: usize,
    #[arg(long, default_value_t = 3)]
    pub dx: u32,
    #[arg(long, default_value_t = 3)]
    pub dy: u32,
}

#[derive(Args, Debug, Clone)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub braid: BraidArgs,
    #[arg(long, default_value = "raw")]
    pub convention: ConventionTag,
    /// Substitute x = q^n, y = q^m into the raw series.
    #[arg(long)]
    pub specialize: Option<Weight>,
    #[arg(long, value_enum, default_value = "down")]
    pub shift: ShiftArg,
    /// Highest q-power of the balanced series; defaults to the deepest certified one.
    #[arg(long)]
    pub max_q: Option<i64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub check: Check,
    #[arg(long)]
    pub braid: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub strands: usize,
    #[arg(long, default_value_t = 3)]
    pub dx: u32,
    #[arg(long, default_value_t = 3)]
    pub dy: u32,
    /// Finite module highest weight n,m.
    #[arg(long, default_value = "1,0")]
    pub spec: Weight,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// Exit code plus stdout payload and stderr diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl fmt::Display) -> Self {
        Outcome { code, stdout: String::new(), stderr: format!("error: {msg}") }
    }
}

fn braid_failure(e: &BraidError) -> Outcome {
    let code = if e.is_non_knot() { EXIT_NON_KNOT } else { EXIT_INVALID_BRAID };
    Outcome::fail(code, e)
}

fn load_braid(text: &str, strands: usize) -> Result<BraidWord, Outcome> {
    parse_braid(text, strands).map_err(|e| braid_failure(&e))
}

fn trace_failure(e: TraceError) -> Outcome {
    match e {
        TraceError::Braid(b) => braid_failure(&b),
        other => Outcome::fail(EXIT_USAGE, other),
    }
}

fn convention_failure(e: ConventionError) -> Outcome {
    match e {
        ConventionError::Incomplete { .. } => Outcome::fail(EXIT_INCOMPLETE, e),
        other => Outcome::fail(EXIT_USAGE, other),
    }
}

fn oracle_failure(e: OracleError) -> Outcome {
    match e {
        OracleError::Braid(b) => braid_failure(&b),
        other => Outcome::fail(EXIT_USAGE, other),
    }
}

pub fn cmd_compute(a: &ComputeArgs) -> Outcome {
    if a.specialize.is_some() && a.convention != ConventionTag::Raw {
        return Outcome::fail(EXIT_USAGE, "--specialize applies to the raw convention only");
    }
    let b = match load_braid(&a.braid.braid, a.braid.strands) {
        Ok(b) => b,
        Err(o) => return o,
    };
    let (dx, dy) = (a.braid.dx, a.braid.dy);
    let dir = match a.shift {
        ShiftArg::Down => Shift::Down,
        ShiftArg::Up => Shift::Up,
    };
    let text = a.format == Format::Text;
    if a.convention == ConventionTag::Symmetric {
        let s = match reduced_trace_y1(&b, dx) {
            Ok(s) => s,
            Err(e) => return trace_failure(e),
        };
        return match symmetric_limit(&s) {
            Ok(sym) if text => Outcome::ok(format!("{sym}\n")),
            Ok(sym) => Outcome::ok(format!("{}\n", sym.to_json())),
            Err(e) => convention_failure(e),
        };
    }
    let raw = match reduced_trace(&b, dx, dy) {
        Ok(s) => s,
        Err(e) => return trace_failure(e),
    };
    let payload = match a.convention {
        ConventionTag::Raw => match a.specialize {
            None if text => raw.to_text(),
            None => raw.to_json().to_string(),
            Some(Weight(n, m)) => {
                let e = specialize(&raw.to_elem(), n, m);
                let framing = raw.framing.specialize(n, m);
                if text {
                    format!("{e}\nframing: {framing}")
                } else {
                    json!({
                        "braid": raw.braid,
                        "specialize": [n, m],
                        "truncation": [dx, dy],
                        "series": e.to_json(),
                        "framing": framing.to_json(),
                    })
                    .to_string()
                }
            }
        },
        ConventionTag::Negative => {
            let s = negative(&raw, dir);
            if text {
                s.to_text()
            } else {
                s.to_json().to_string()
            }
        }
        ConventionTag::Positive => {
            let e = positive(&raw, dir);
            if text {
                e.to_string()
            } else {
                json!({"convention": "positive", "braid": raw.braid, "truncation": [dx, dy], "series": e.to_json()})
                    .to_string()
            }
        }
        ConventionTag::Balanced => {
            let neg = negative(&raw, dir);
            let max_q = match a.max_q {
                Some(q) => q,
                None => match boundary_q_degree(&neg) {
                    Some(b) => b - 1,
                    None => return Outcome::fail(EXIT_INCOMPLETE, "empty window"),
                },
            };
            match weyl_balanced(&neg, max_q) {
                Ok(w) if text => w.to_string(),
                Ok(w) => w.to_json().to_string(),
                Err(e) => return convention_failure(e),
            }
        }
        ConventionTag::Symmetric => unreachable!("handled above"),
    };
    Outcome::ok(payload + "\n")
}

fn report_outcome(r: &OracleReport, format: Format) -> Outcome {
    let stdout = match format {
        Format::Json => format!("{}\n", r.to_json()),
        Format::Text => {
            let mut s = format!("{}: {}\n", r.check, if r.passed { "pass" } else { "FAIL" });
            if let Some(u) = &r.unit_normalization {
                s += &format!("unit normalization: {u}\n");
            }
            for m in &r.mismatches {
                s += &format!("  {}: expected {}, got {}\n", m.location, m.expected, m.got);
            }
            s
        }
    };
    Outcome { code: if r.passed { EXIT_OK } else { EXIT_MISMATCH }, stdout, stderr: String::new() }
}

pub fn cmd_oracle(a: &OracleArgs) -> Outcome {
    let need_braid = || match &a.braid {
        Some(t) => load_braid(t, a.strands),
        None => Err(Outcome::fail(EXIT_USAGE, "--braid is required for this check")),
    };
    let Weight(n, m) = a.spec;
    let report = match a.check {
        Check::YangBaxter => yang_baxter_report(n, m),
        Check::Rt => match need_braid() {
            Ok(b) => rt_two_route(&b, n, m),
            Err(o) => return o,
        },
        Check::Alexander => {
            let b = match need_braid() {
                Ok(b) => b,
                Err(o) => return o,
            };
            match reduced_trace(&b, a.dx, a.dy) {
                Ok(s) => alexander_check(&s, &b),
                Err(e) => return trace_failure(e),
            }
        }
    };
    match report {
        Ok(r) => report_outcome(&r, a.format),
        Err(e) => oracle_failure(e),
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    let go = || match &cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool.install(go),
        Err(e) => Outcome::fail(EXIT_USAGE, e),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            }
        }
    }
}
