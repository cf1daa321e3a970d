//! Command-line front end.
//!
//! Every command computes its full output before writing anything, so an
//! error never leaves a partial table behind. Errors are reported as one JSON
//! line on stderr; exit code 2 means the input was rejected, 3 means a
//! numerical failure, and 1 means `check` found a failing identity.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::calculus::{self, ScaleFunction, ToleranceConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::logexp::{self, LegacyKind, LogVariant};
use crate::multivalue::Complex;
use crate::timescale::TimeScale;

/// Environment variable overriding the default quadrature tolerance.
pub const TOL_ENV: &str = "CHRONOLOG_TOL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "chronolog", version, about = "Logarithms and exponentials on time scales")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one logarithm between two points.
    Eval(EvalArgs),
    /// Run the identity suite and report residuals.
    Check(CheckArgs),
    /// Tabulate a quantity over a range of points.
    Table(TableArgs),
    /// Evaluate one of the legacy logarithms.
    Legacy(LegacyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Delta derivative of the logarithm, with p'/p alongside.
    Logderiv,
    /// The logarithm from `--s` to each row's t.
    Log,
    /// The exponential e_p(t, s) with p as coefficient.
    Exp,
    /// The delta derivative of p.
    Deriv,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Time scale: r | hz:<h>[:<anchor>] | q:<q> | alt:<a>,<b> | union:[lo,hi];... | set:p1,p2,...
    #[arg(long, allow_hyphen_values = true)]
    pub timescale: String,
    /// Quadrature tolerance (overrides CHRONOLOG_TOL).
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run without the thread pool.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// delta-multi, delta-principal, nabla-multi, nabla-principal,
    /// cayley-multi, cayley-principal, eta:<v> (or eta with --eta), legacy:<kind>
    #[arg(long, default_value = "delta-multi")]
    pub variant: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub p: String,
    #[arg(long, value_enum, default_value = "logderiv")]
    pub quantity: Quantity,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    /// Sampling step on dense parts of the scale; scattered points are always listed.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub step: f64,
    /// Base point for `log` and `exp`; defaults to the first row.
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, default_value = "delta-multi")]
    pub variant: String,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LegacyArgs {
    #[command(flatten)]
    pub common: Common,
    /// huff, euler-cauchy, integral-quotient, jackson, mozyrska
    #[arg(long, allow_hyphen_values = true)]
    pub kind: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    #[arg(long = "t0", alias = "s", allow_hyphen_values = true, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `args` and run the command, writing results to `out` (unless
/// `--out` is given) and errors to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(err, "{}", json!({"error": "UsageError", "message": first}));
            return EXIT_VALIDATION;
        }
    };
    match dispatch(&cli.command) {
        Ok((text, code)) => {
            let common = common(&cli.command);
            let written = match &common.out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| Error::InvalidConfig(format!("cannot write {}: {e}", path.display()))),
                None => out.write_all(text.as_bytes()).map_err(|e| Error::InvalidConfig(e.to_string())),
            };
            match written {
                Ok(()) => code,
                Err(e) => report(err, &e),
            }
        }
        Err(e) => report(err, &e),
    }
}

fn report(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "{}", json!({"error": e.kind(), "message": e.to_string()}));
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Eval(a) => &a.common,
        Command::Check(a) => &a.common,
        Command::Table(a) => &a.common,
        Command::Legacy(a) => &a.common,
    }
}

/// Tolerances from defaults, then `CHRONOLOG_TOL`, then `--tol`.
pub fn tolerances(common: &Common) -> Result<ToleranceConfig> {
    let mut cfg = ToleranceConfig::default();
    if let Ok(text) = std::env::var(TOL_ENV) {
        cfg.quad_tol = text
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{TOL_ENV} is not a number: `{text}`")))?;
    }
    if let Some(tol) = common.tol {
        cfg.quad_tol = tol;
    }
    if common.sequential {
        cfg.execution = Execution::Sequential;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_variant(name: &str, eta: Option<f64>) -> Result<LogVariant> {
    match (name, eta) {
        ("eta", Some(v)) => format!("eta:{v}").parse(),
        ("eta", None) => Err(Error::InvalidConfig("variant `eta` needs --eta".into())),
        (_, _) => name.parse(),
    }
}

fn require_point(ts: &TimeScale, name: &str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::InvalidConfig(format!("--{name} must be finite")));
    }
    if !ts.contains(x) {
        return Err(Error::PointNotInScale { t: x });
    }
    Ok(())
}

/// Run a parsed command, returning the serialized output and exit code.
pub fn dispatch(cmd: &Command) -> Result<(String, i32)> {
    let cfg = tolerances(common(cmd))?;
    let ts: TimeScale = common(cmd).timescale.parse()?;
    let format = common(cmd).format;
    match cmd {
        Command::Eval(a) => cmd_eval(a, &ts, &cfg, format).map(|s| (s, EXIT_OK)),
        Command::Check(a) => cmd_check(a, &ts, &cfg, format),
        Command::Table(a) => cmd_table(a, &ts, &cfg, format).map(|s| (s, EXIT_OK)),
        Command::Legacy(a) => cmd_legacy(a, &ts, &cfg, format).map(|s| (s, EXIT_OK)),
    }
}

/// Format a double with 17 significant digits.
pub fn csv_number(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct EvalRecord {
    variant: String,
    rep_re: f64,
    rep_im: f64,
    period: &'static str,
    scattered_contributed: bool,
}

fn render_eval(r: &EvalRecord, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string(r).expect("plain record")),
        Format::Csv => format!(
            "variant,rep_re,rep_im,period,scattered_contributed\n{},{},{},{},{}\n",
            r.variant,
            csv_number(r.rep_re),
            csv_number(r.rep_im),
            r.period,
            r.scattered_contributed
        ),
    }
}

fn cmd_eval(a: &EvalArgs, ts: &TimeScale, cfg: &ToleranceConfig, format: Format) -> Result<String> {
    let variant = parse_variant(&a.variant, a.eta)?;
    let p = ScaleFunction::parse(&a.p)?;
    require_point(ts, "s", a.s)?;
    require_point(ts, "t", a.t)?;
    let v = logexp::log_ts(variant, &p, ts, a.s, a.t, cfg)?;
    let record = EvalRecord {
        variant: variant.to_string(),
        rep_re: v.value.re,
        rep_im: v.value.im,
        period: if v.multivalued { "2pi*i" } else { "none" },
        scattered_contributed: v.scattered_contributed,
    };
    Ok(render_eval(&record, format))
}

fn cmd_check(a: &CheckArgs, ts: &TimeScale, cfg: &ToleranceConfig, format: Format) -> Result<(String, i32)> {
    let p = ScaleFunction::parse(&a.p)?;
    let q = ScaleFunction::parse(&a.q)?;
    require_point(ts, "s", a.s)?;
    require_point(ts, "t", a.t)?;
    if !a.alpha.is_finite() {
        return Err(Error::InvalidConfig("--alpha must be finite".into()));
    }
    let rows = logexp::identity_suite(&p, &q, ts, a.s, a.t, a.alpha, cfg)?;
    let code = if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_CHECK_FAILED };
    let text = match format {
        Format::Json => format!("{}\n", serde_json::to_string(&rows).expect("plain rows")),
        Format::Csv => {
            let mut s = String::from("identity,lhs_re,lhs_im,rhs_re,rhs_im,residual,lattice_k,pass\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.identity,
                    csv_number(r.lhs.re),
                    csv_number(r.lhs.im),
                    csv_number(r.rhs.re),
                    csv_number(r.rhs.im),
                    csv_number(r.residual),
                    r.lattice_k,
                    r.pass
                );
            }
            s
        }
    };
    Ok((text, code))
}

/// One row of a table: `t`, the value, and for `logderiv` the companion `p'/p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub t: f64,
    pub value: Complex,
    pub companion: Option<Complex>,
}

/// Compute the rows of a table, failing as a whole if any row fails.
pub fn table_rows(
    quantity: Quantity,
    p: &ScaleFunction,
    ts: &TimeScale,
    points: &[f64],
    base: f64,
    variant: LogVariant,
    cfg: &ToleranceConfig,
) -> Result<Vec<TableRow>> {
    let row = |&t: &f64| -> Result<TableRow> {
        let (value, companion) = match quantity {
            Quantity::Logderiv => {
                let v = logexp::log_delta_derivative(p, ts, t, cfg)?;
                let pv = p.nonvanishing(t, cfg.eps_min)?;
                (v, Some(p.derivative_at(t)? / pv))
            }
            Quantity::Log => (logexp::log_ts(variant, p, ts, base, t, cfg)?.value, None),
            Quantity::Exp => (logexp::exp_delta(p, ts, base, t, cfg)?, None),
            Quantity::Deriv => (calculus::delta_derivative(p, ts, t)?, None),
        };
        Ok(TableRow { t, value, companion })
    };
    exec::map(cfg.execution, points, row).into_iter().collect()
}

fn cmd_table(a: &TableArgs, ts: &TimeScale, cfg: &ToleranceConfig, format: Format) -> Result<String> {
    let p = ScaleFunction::parse(&a.p)?;
    let variant = parse_variant(&a.variant, a.eta)?;
    if !(a.from.is_finite() && a.to.is_finite()) || a.from > a.to {
        return Err(Error::InvalidConfig("need finite --from <= --to".into()));
    }
    if !(a.step.is_finite() && a.step > 0.0) {
        return Err(Error::InvalidConfig("--step must be positive".into()));
    }
    let points = ts.points(a.from, a.to, a.step)?;
    if points.is_empty() {
        return Err(Error::InvalidConfig(format!("no points of {ts} in [{}, {}]", a.from, a.to)));
    }
    let base = match a.s {
        Some(s) => {
            require_point(ts, "s", s)?;
            s
        }
        None => points[0],
    };
    let rows = table_rows(a.quantity, &p, ts, &points, base, variant, cfg)?;
    let with_companion = a.quantity == Quantity::Logderiv;
    Ok(match format {
        Format::Csv => {
            let mut s = String::from("t,value_re,value_im");
            if with_companion {
                s.push_str(",companion_re,companion_im");
            }
            s.push('\n');
            for r in &rows {
                let _ = write!(s, "{},{},{}", csv_number(r.t), csv_number(r.value.re), csv_number(r.value.im));
                if let Some(c) = r.companion {
                    let _ = write!(s, ",{},{}", csv_number(c.re), csv_number(c.im));
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let list: Vec<_> = rows
                .iter()
                .map(|r| {
                    let mut obj = json!({"t": r.t, "value": {"re": r.value.re, "im": r.value.im}});
                    if let Some(c) = r.companion {
                        obj["companion"] = json!({"re": c.re, "im": c.im});
                    }
                    obj
                })
                .collect();
            format!("{}\n", serde_json::Value::Array(list))
        }
    })
}

fn cmd_legacy(a: &LegacyArgs, ts: &TimeScale, cfg: &ToleranceConfig, format: Format) -> Result<String> {
    let kind: LegacyKind = a.kind.parse()?;
    let p = a.p.as_deref().map(ScaleFunction::parse).transpose()?;
    if kind.needs_function() && p.is_none() {
        return Err(Error::InvalidConfig(format!("the {} logarithm needs --p", kind.name())));
    }
    require_point(ts, "t", a.t)?;
    if kind != LegacyKind::Mozyrska && kind != LegacyKind::Jackson {
        require_point(ts, "t0", a.t0)?;
    }
    let value = logexp::legacy_log(kind, p.as_ref(), ts, a.t0, a.t, cfg)?;
    let from = if kind == LegacyKind::Mozyrska { 1.0 } else { a.t0 };
    let scattered = kind != LegacyKind::Jackson && ts.decompose(from.min(a.t), from.max(a.t))?.has_jumps();
    let record = EvalRecord {
        variant: LogVariant::Legacy(kind).to_string(),
        rep_re: value.re,
        rep_im: value.im,
        period: "none",
        scattered_contributed: scattered,
    };
    Ok(render_eval(&record, format))
}
