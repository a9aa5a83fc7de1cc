//! Command-line front end for `wvlogic`.
//!
//! Everything goes through [`run`], which takes the argument list and two
//! writers so the binary and the tests share one code path.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wvlogic::audit::{classify_exprs, AuditEntry};
use wvlogic::expr::evaluate_projector;
use wvlogic::format::{complex, real};
use wvlogic::meter::{measure_pointer, reading, weak_limit_sweep, MeterConfig};
use wvlogic::scenario::CATALOG;
use wvlogic::{
    abl_prob, audit_all, born_prob, catalog, cond_prob_post, load_scenario, weak_value_expr, Amplitude,
    AuditKind, AuditPair, AuditVerdict, ErrorKind, Scenario, WeakValue,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_PHYSICS: i32 = 2;

const DEFAULT_SWEEP: &str = "0.1,0.01,0.001,0.0001";

#[derive(Parser, Debug)]
#[command(name = "wvlogic", version, about = "Weak values and the logic of pre- and postselected systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in scenarios
    List {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Describe a scenario: states, overlap, channels and audit pairs
    Show(Common),
    /// Born, postselected and ABL probabilities of a projector expression
    Strong(WithExpr),
    /// ABL probability of a projector expression
    Abl(WithExpr),
    /// Weak value of an operator expression
    Weak(WithExpr),
    /// Audit `a OR b` through the weak values of a, b and a + b
    AuditSum(WithPair),
    /// Audit `a AND b` through the weak values of a, b and a*b
    AuditProduct(WithPair),
    /// Run every audit pair stored with the scenario
    AuditAll(Common),
    /// Simulate a von Neumann pointer coupled to a projector expression
    Meter(MeterArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in scenario name
    #[arg(long)]
    scenario: Option<String>,
    /// Scenario file (JSON)
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    source: Source,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct WithExpr {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    expr: String,
}

#[derive(Args, Debug)]
struct WithPair {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    expr: String,
    #[arg(long)]
    expr2: String,
}

#[derive(Args, Debug)]
struct MeterArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    expr: String,
    /// Single coupling strength
    #[arg(long, conflicts_with = "sweep", allow_negative_numbers = true)]
    g: Option<f64>,
    /// Pointer spread
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma: f64,
    /// Decreasing couplings, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    sweep: Option<Vec<f64>>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Json,
}

#[derive(Debug)]
enum Failure {
    Core(wvlogic::Error),
    /// Core error raised while handling a named expression.
    InExpr(String, wvlogic::Error),
    Io(PathBuf, std::io::Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Core(e) | Failure::InExpr(_, e) => code_of(e),
            Failure::Io(..) => EXIT_USER,
        }
    }
}

fn code_of(e: &wvlogic::Error) -> i32 {
    match e.kind() {
        ErrorKind::User => EXIT_USER,
        ErrorKind::Physics => EXIT_PHYSICS,
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::InExpr(text, e) => write!(f, "in expression `{text}`: {e}"),
            Failure::Io(path, e) => write!(f, "cannot read {}: {e}", path.display()),
        }
    }
}

impl From<wvlogic::Error> for Failure {
    fn from(e: wvlogic::Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<i32, Failure>;

fn in_expr(text: &str) -> impl FnOnce(wvlogic::Error) -> Failure + '_ {
    move |e| Failure::InExpr(text.to_string(), e)
}

/// Run the CLI on `args` (including the program name). Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            let text = e.render().to_string();
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USER
                }
            };
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    match cmd {
        Command::List { format } => list(format, out),
        Command::Show(c) => show(&load(&c)?, c.format, out),
        Command::Strong(a) => strong(&load(&a.common)?, &a.expr, a.common.format, out),
        Command::Abl(a) => abl(&load(&a.common)?, &a.expr, a.common.format, out),
        Command::Weak(a) => weak(&load(&a.common)?, &a.expr, a.common.format, out, err),
        Command::AuditSum(a) => audit_one(&load(&a.common)?, AuditPair::new(&a.expr, &a.expr2, AuditKind::Sum), a.common.format, out),
        Command::AuditProduct(a) => {
            audit_one(&load(&a.common)?, AuditPair::new(&a.expr, &a.expr2, AuditKind::Product), a.common.format, out)
        }
        Command::AuditAll(c) => audit_many(&load(&c)?, c.format, out, err),
        Command::Meter(a) => meter(&load(&a.common)?, &a, out),
    }
}

fn load(c: &Common) -> std::result::Result<Scenario, Failure> {
    match (&c.source.scenario, &c.source.file) {
        (Some(name), _) => Ok(catalog(name)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.clone(), e))?;
            Ok(load_scenario(&text)?)
        }
        (None, None) => unreachable!("clap enforces a scenario source"),
    }
}

fn emit_json(out: &mut dyn Write, value: &impl Serialize) -> Outcome {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    let _ = writeln!(out, "{text}");
    Ok(EXIT_OK)
}

fn table(out: &mut dyn Write, rows: &[(&str, String)]) {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
}

#[derive(Serialize)]
struct Complex {
    re: f64,
    im: f64,
}

impl From<Amplitude> for Complex {
    fn from(z: Amplitude) -> Self {
        Complex { re: z.re, im: z.im }
    }
}

fn list(format: Format, out: &mut dyn Write) -> Outcome {
    match format {
        Format::Json => emit_json(out, &CATALOG),
        Format::Table => {
            for name in CATALOG {
                let _ = writeln!(out, "{name}");
            }
            Ok(EXIT_OK)
        }
    }
}

#[derive(Serialize)]
struct ShowReport<'a> {
    scenario: &'a str,
    dim: usize,
    labels: &'a [String],
    pre: Vec<Complex>,
    post: Vec<Complex>,
    evolution: bool,
    overlap: Complex,
    channels: Vec<ChannelInfo<'a>>,
    audits: &'a [AuditPair],
}

#[derive(Serialize)]
struct ChannelInfo<'a> {
    name: &'a str,
    rank: usize,
}

fn show(s: &Scenario, format: Format, out: &mut dyn Write) -> Outcome {
    let amps = |v: &[Amplitude]| v.iter().map(|z| Complex::from(*z)).collect::<Vec<_>>();
    let channels: Vec<_> = s.channels().iter().map(|(n, p)| ChannelInfo { name: n, rank: p.rank().round() as usize }).collect();
    if format == Format::Json {
        return emit_json(
            out,
            &ShowReport {
                scenario: s.name(),
                dim: s.dim(),
                labels: s.labels(),
                pre: amps(s.pre_state().amps()),
                post: amps(s.post_state().amps()),
                evolution: s.evolution().is_some(),
                overlap: s.overlap().into(),
                channels,
                audits: s.audits(),
            },
        );
    }
    let state = |v: &[Amplitude], labels: &[String]| {
        v.iter()
            .zip(labels)
            .filter(|(z, _)| z.norm() > 0.0)
            .map(|(z, l)| format!("({})|{l}>", complex(*z)))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    table(
        out,
        &[
            ("scenario", s.name().to_string()),
            ("dim", s.dim().to_string()),
            ("labels", s.labels().join(" ")),
            ("pre", state(s.pre_state().amps(), s.pre_state().labels())),
            ("post", state(s.post_state().amps(), s.post_state().labels())),
            ("evolution", if s.evolution().is_some() { "yes" } else { "none" }.to_string()),
            ("<f|U|in>", complex(s.overlap())),
            (
                "channels",
                channels.iter().map(|c| format!("{}(rank {})", c.name, c.rank)).collect::<Vec<_>>().join(" "),
            ),
        ],
    );
    for pair in s.audits() {
        let _ = writeln!(out, "audit     {} {} / {}", pair.kind, pair.a, pair.b);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct StrongReport<'a> {
    scenario: &'a str,
    expr: &'a str,
    born: f64,
    cond_prob_post: f64,
    /// `None` when the ABL denominator vanishes.
    abl: Option<f64>,
}

fn strong(s: &Scenario, expr: &str, format: Format, out: &mut dyn Write) -> Outcome {
    let p = evaluate_projector(expr, s.channels()).map_err(in_expr(expr))?;
    let born = born_prob(s.pre_state(), &p)?;
    let cond = cond_prob_post(s, &p)?;
    let abl = match abl_prob(s, &p) {
        Ok(v) => Some(v),
        Err(wvlogic::Error::PostselectionImpossible) => None,
        Err(e) => return Err(e.into()),
    };
    if format == Format::Json {
        return emit_json(out, &StrongReport { scenario: s.name(), expr, born, cond_prob_post: cond, abl });
    }
    table(
        out,
        &[
            ("scenario", s.name().to_string()),
            ("expression", expr.to_string()),
            ("born", real(born)),
            ("cond-prob", real(cond)),
            ("abl", abl.map_or_else(|| "undefined".to_string(), real)),
        ],
    );
    Ok(EXIT_OK)
}

fn abl(s: &Scenario, expr: &str, format: Format, out: &mut dyn Write) -> Outcome {
    let p = evaluate_projector(expr, s.channels()).map_err(in_expr(expr))?;
    let v = abl_prob(s, &p).map_err(in_expr(expr))?;
    if format == Format::Json {
        return emit_json(out, &serde_json::json!({ "scenario": s.name(), "expr": expr, "abl": v }));
    }
    table(out, &[("scenario", s.name().to_string()), ("expression", expr.to_string()), ("abl", real(v))]);
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct WeakEntry<'a> {
    expr: &'a str,
    re: f64,
    im: f64,
    is_zero: bool,
}

impl<'a> WeakEntry<'a> {
    fn new(expr: &'a str, w: &WeakValue) -> Self {
        WeakEntry { expr, re: w.value.re, im: w.value.im, is_zero: w.is_zero }
    }
}

#[derive(Serialize)]
struct WeakReport<'a> {
    scenario: &'a str,
    #[serde(flatten)]
    value: WeakEntry<'a>,
    numerator: Complex,
    denominator: Complex,
    near_pole: bool,
}

fn weak(s: &Scenario, expr: &str, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let w = weak_value_expr(s, expr).map_err(in_expr(expr))?;
    if w.near_pole {
        let _ = writeln!(
            err,
            "warning: |<f|U|in>| = {} is close to zero; the weak value of `{expr}` is ill-conditioned",
            real(w.denominator.norm())
        );
    }
    if format == Format::Json {
        return emit_json(
            out,
            &WeakReport {
                scenario: s.name(),
                value: WeakEntry::new(expr, &w),
                numerator: w.numerator.into(),
                denominator: w.denominator.into(),
                near_pole: w.near_pole,
            },
        );
    }
    table(
        out,
        &[
            ("scenario", s.name().to_string()),
            ("expression", expr.to_string()),
            ("weak value", complex(w.value)),
            ("numerator", complex(w.numerator)),
            ("denominator", complex(w.denominator)),
            ("is_zero", w.is_zero.to_string()),
            ("near_pole", w.near_pole.to_string()),
        ],
    );
    Ok(EXIT_OK)
}

fn combined(pair: &AuditPair) -> String {
    match pair.kind {
        AuditKind::Sum => format!("{} + {}", pair.a, pair.b),
        AuditKind::Product => {
            let wrap = |e: &str| if e.contains('+') { format!("({e})") } else { e.to_string() };
            format!("{}*{}", wrap(&pair.a), wrap(&pair.b))
        }
    }
}

#[derive(Serialize)]
struct PairReport<'a> {
    a: &'a str,
    b: &'a str,
    kind: AuditKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    weak_values: Option<[WeakEntry<'a>; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    consistent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    narrative: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    born: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cond_prob_post: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn pair_report<'a>(pair: &'a AuditPair, joint: &'a str, outcome: &'a Result<AuditVerdict, wvlogic::Error>) -> PairReport<'a> {
    let mut r = PairReport {
        a: &pair.a,
        b: &pair.b,
        kind: pair.kind,
        weak_values: None,
        case: None,
        consistent: None,
        narrative: None,
        born: None,
        cond_prob_post: None,
        error: None,
    };
    match outcome {
        Ok(v) => {
            let [wa, wb, wj] = &v.weak_values;
            r.weak_values = Some([WeakEntry::new(&pair.a, wa), WeakEntry::new(&pair.b, wb), WeakEntry::new(joint, wj)]);
            r.case = Some(v.case.label());
            r.consistent = Some(v.consistent);
            r.narrative = Some(&v.narrative);
            r.born = Some(v.strong.born);
            r.cond_prob_post = Some(v.strong.cond_post);
        }
        Err(e) => r.error = Some(e.to_string()),
    }
    r
}

fn write_verdict(out: &mut dyn Write, pair: &AuditPair, v: &AuditVerdict) {
    let joint = combined(pair);
    let _ = writeln!(out, "audit {}: a = {}, b = {}", pair.kind, pair.a, pair.b);
    let names = [pair.a.as_str(), pair.b.as_str(), joint.as_str()];
    let width = names.iter().map(|n| n.len()).max().unwrap_or(0);
    for (n, w) in names.iter().zip(&v.weak_values) {
        let flag = if w.is_zero { "zero" } else { "nonzero" };
        let _ = writeln!(out, "  weak {n:<width$}  {:<24} {flag}", complex(w.value));
    }
    let fmt3 = |x: &[f64; 3]| x.iter().map(|p| real(*p)).collect::<Vec<_>>().join(" / ");
    let _ = writeln!(out, "  born       {}", fmt3(&v.strong.born));
    let _ = writeln!(out, "  cond-prob  {}", fmt3(&v.strong.cond_post));
    let verdict = if v.consistent { "consistent" } else { "inconsistent" };
    let _ = writeln!(out, "  verdict    {} ({verdict})", v.case);
    let _ = writeln!(out, "  {}", v.narrative);
}

fn audit_one(s: &Scenario, pair: AuditPair, format: Format, out: &mut dyn Write) -> Outcome {
    let v = classify_exprs(s, &pair).map_err(|e| Failure::InExpr(format!("{} / {}", pair.a, pair.b), e))?;
    if format == Format::Json {
        let joint = combined(&pair);
        let outcome = Ok(v);
        let report = pair_report(&pair, &joint, &outcome);
        return emit_json(out, &serde_json::json!({ "scenario": s.name(), "pairs": [report] }));
    }
    let _ = writeln!(out, "scenario {}", s.name());
    write_verdict(out, &pair, &v);
    Ok(EXIT_OK)
}

/// Exit code for a batch: the most severe entry failure.
fn batch_code(entries: &[AuditEntry]) -> i32 {
    entries
        .iter()
        .filter_map(|e| e.outcome.as_ref().err())
        .map(code_of)
        .max()
        .unwrap_or(EXIT_OK)
}

fn audit_many(s: &Scenario, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let report = audit_all(s, s.audits());
    if format == Format::Json {
        let joints: Vec<String> = report.entries.iter().map(|e| combined(&e.pair)).collect();
        let pairs: Vec<_> = report
            .entries
            .iter()
            .zip(&joints)
            .map(|(e, j)| pair_report(&e.pair, j, &e.outcome))
            .collect();
        emit_json(
            out,
            &serde_json::json!({
                "scenario": report.scenario,
                "dim": report.dim,
                "overlap": Complex::from(report.overlap),
                "pairs": pairs,
            }),
        )?;
    } else {
        let _ = writeln!(out, "scenario {}  <f|U|in> = {}", report.scenario, complex(report.overlap));
        if report.entries.is_empty() {
            let _ = writeln!(out, "no audit pairs");
        }
        for e in &report.entries {
            match &e.outcome {
                Ok(v) => write_verdict(out, &e.pair, v),
                Err(x) => {
                    let _ = writeln!(out, "audit {}: a = {}, b = {}", e.pair.kind, e.pair.a, e.pair.b);
                    let _ = writeln!(out, "  error: {x}");
                }
            }
        }
    }
    for (pair, x) in report.errors() {
        let _ = writeln!(err, "error: audit {} / {}: {x}", pair.a, pair.b);
    }
    Ok(batch_code(&report.entries))
}

#[derive(Serialize)]
struct MeterPoint {
    g: f64,
    mean_q: f64,
    mean_p: f64,
    success_prob: f64,
    reading: Complex,
}

fn meter(s: &Scenario, a: &MeterArgs, out: &mut dyn Write) -> Outcome {
    let expr = a.expr.as_str();
    let p = evaluate_projector(expr, s.channels()).map_err(in_expr(expr))?;
    let exact = weak_value_expr(s, expr).map_err(in_expr(expr))?;
    let format = a.common.format;

    if let Some(g) = a.g {
        let stats = measure_pointer(s, &p, &MeterConfig::new(a.sigma, g))?;
        let r = reading(&stats, a.sigma, g);
        if format == Format::Json {
            let point = MeterPoint { g, mean_q: stats.mean_q, mean_p: stats.mean_p, success_prob: stats.success_prob, reading: r.into() };
            return emit_json(
                out,
                &serde_json::json!({ "scenario": s.name(), "expr": expr, "sigma": a.sigma, "point": point, "weak_value": Complex::from(exact.value) }),
            );
        }
        table(
            out,
            &[
                ("scenario", s.name().to_string()),
                ("expression", expr.to_string()),
                ("sigma", real(a.sigma)),
                ("g", real(g)),
                ("<q>", real(stats.mean_q)),
                ("<p>", real(stats.mean_p)),
                ("success", real(stats.success_prob)),
                ("reading", complex(r)),
                ("weak value", complex(exact.value)),
            ],
        );
        return Ok(EXIT_OK);
    }

    let default_sweep;
    let sweep = match &a.sweep {
        Some(v) => v.as_slice(),
        None => {
            default_sweep = DEFAULT_SWEEP.split(',').map(|x| x.parse().expect("default sweep")).collect::<Vec<f64>>();
            default_sweep.as_slice()
        }
    };
    let limit = weak_limit_sweep(s, &p, a.sigma, sweep)?;
    if format == Format::Json {
        let readings: Vec<_> = limit
            .readings
            .iter()
            .map(|(g, r)| serde_json::json!({ "g": g, "reading": Complex::from(*r) }))
            .collect();
        return emit_json(
            out,
            &serde_json::json!({
                "scenario": s.name(),
                "expr": expr,
                "sigma": a.sigma,
                "readings": readings,
                "estimate": Complex::from(limit.estimate),
                "weak_value": Complex::from(exact.value),
                "error": (limit.estimate - exact.value).norm(),
            }),
        );
    }
    let _ = writeln!(out, "scenario {}  expression {}  sigma {}", s.name(), expr, real(a.sigma));
    for (g, r) in &limit.readings {
        let _ = writeln!(out, "  g = {:<10} reading {}", real(*g), complex(*r));
    }
    table(
        out,
        &[
            ("estimate", complex(limit.estimate)),
            ("weak value", complex(exact.value)),
            ("difference", real((limit.estimate - exact.value).norm())),
        ],
    );
    Ok(EXIT_OK)
}
