//! The `welfare` command line tool.
//!
//! Exit codes: 0 on success, 1 for domain errors and failed verifications,
//! 2 for malformed arguments or input.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use welfare_core::elicitation::{answer_from_levels, ElicitationAnswer, Question, Session, Step, TranscriptEntry};
use welfare_core::lab::VerificationReport;
use welfare_core::{Distribution, Error, Income, SwfFamily};

use crate::config::{ServiceConfig, DEFAULT_BIND, DEFAULT_GRID, DEFAULT_SESSION_TTL_SECS};
use crate::curve::{self, Spacing};
use crate::verify::{self, VerifyError};
use crate::wire::{self, Malformed, SessionView};

#[derive(Debug, Parser)]
#[command(
    name = "welfare",
    version,
    about = "Protected income and welfare evaluation for additively separable SWFs"
)]
pub struct Cli {
    /// Emit machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate welfare and the equally-distributed equivalent.
    Eval {
        /// Family as JSON, e.g. '{"family":"kolm_atkinson","eta":2}'.
        #[arg(long)]
        family: String,
        /// A CSV file of incomes or an inline list such as 50,200.
        #[arg(long, allow_hyphen_values = true)]
        dist: String,
    },
    /// Protected income, collateral damage and optionally the trade-off income.
    Protect {
        #[arg(long)]
        family: String,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, default_value_t = 1)]
        rivals: u32,
        /// Finite rival income for the trade-off curve.
        #[arg(long, allow_negative_numbers = true)]
        y2: Option<f64>,
    },
    /// Protection curve as CSV (or JSON with --json).
    Curve {
        #[arg(long)]
        family: String,
        #[arg(long = "y-min", allow_negative_numbers = true)]
        y_min: f64,
        #[arg(long = "y-max", allow_negative_numbers = true)]
        y_max: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Linear)]
        spacing: Spacing,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elicitation session on stdin, or a replay of a saved transcript.
    Elicit {
        /// JSON transcript: a list of entries or a session view.
        #[arg(long)]
        transcript: Option<PathBuf>,
    },
    /// Numerical verification of a proposition.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=8))]
        prop: u8,
        /// JSON parameters; may include a family.
        #[arg(long)]
        params: Option<String>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        points: usize,
    },
    /// Run the HTTP service. PORT overrides the port of --bind.
    Serve {
        #[arg(long, default_value = DEFAULT_BIND)]
        bind: String,
        #[arg(long, default_value_t = DEFAULT_SESSION_TTL_SECS)]
        session_ttl: u64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        default_grid: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    /// Verification ran and at least one report failed; output already written.
    Unverified,
}

impl From<Malformed> for Failure {
    fn from(m: Malformed) -> Self {
        Failure::Usage(m.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(format!("io error: {e}"))
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Params(m) => m.into(),
            VerifyError::Domain(e) => e.into(),
        }
    }
}

struct Io<'a> {
    input: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
}

impl Io<'_> {
    /// Prompts go where they do not corrupt machine output.
    fn prompt(&mut self, text: &str) -> std::io::Result<()> {
        let sink: &mut dyn Write = if self.json { &mut *self.err } else { &mut *self.out };
        write!(sink, "{text}")?;
        sink.flush()
    }

    fn read_line(&mut self) -> Result<Option<String>, Failure> {
        let mut line = String::new();
        if self.input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        Ok(Some(line.trim().to_string()))
    }
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let mut io = Io {
        input,
        out,
        err,
        json: cli.json,
    };
    match dispatch(cli.command, &mut io) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(io.err, "error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(io.err, "error: {msg}");
            1
        }
        Err(Failure::Unverified) => 1,
    }
}

fn parse_family(text: &str) -> Result<SwfFamily, Failure> {
    Ok(wire::parse("family", text)?)
}

fn dispatch(command: Command, io: &mut Io<'_>) -> Result<(), Failure> {
    match command {
        Command::Eval { family, dist } => {
            let req = wire::EvaluateRequest {
                family: parse_family(&family)?,
                distribution: Distribution::from_values(&read_distribution(&dist)?)?,
            };
            let res = wire::evaluate(&req)?;
            if io.json {
                writeln!(io.out, "{}", wire::to_json(&res))?;
            } else {
                writeln!(io.out, "welfare = {}\nede = {}", res.welfare, res.ede)?;
            }
        }
        Command::Protect { family, y, rivals, y2 } => {
            let req = wire::ProtectRequest {
                family: parse_family(&family)?,
                y: Income::new(y)?,
                rivals,
                y2: y2.map(Income::new).transpose()?,
            };
            let res = wire::protect(&req)?;
            if io.json {
                writeln!(io.out, "{}", wire::to_json(&res))?;
            } else {
                let r = &res.result;
                writeln!(io.out, "protected_income = {}", r.protected_income)?;
                writeln!(io.out, "collateral_damage = {}", r.collateral_damage)?;
                writeln!(io.out, "relative_damage = {}", r.relative_damage)?;
                writeln!(io.out, "positive = {}", r.positive)?;
                writeln!(io.out, "has_positive_protection = {}", res.has_positive_protection)?;
                writeln!(io.out, "method = {}", method_name(r.method))?;
                if let Some(t) = res.tradeoff_income {
                    writeln!(io.out, "tradeoff_income = {t}")?;
                }
            }
        }
        Command::Curve {
            family,
            y_min,
            y_max,
            points,
            spacing,
            out,
        } => {
            let family = parse_family(&family)?;
            let pts = curve::protection_curve(&family, y_min, y_max, points, spacing)?;
            let text = if io.json {
                #[derive(Serialize)]
                struct Body<'a> {
                    points: &'a [curve::CurvePoint],
                }
                format!("{}\n", wire::to_json(&Body { points: &pts }))
            } else {
                curve::to_csv(&pts)
            };
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => write!(io.out, "{text}")?,
            }
        }
        Command::Elicit { transcript } => elicit(transcript.as_deref(), io)?,
        Command::Verify { prop, params, points } => {
            let params = match params {
                Some(p) => verify::parse_params(&p)?,
                None => verify::VerifyParams::default(),
            };
            let reports = verify::run(prop, &params, points)?;
            if io.json {
                #[derive(Serialize)]
                struct Body<'a> {
                    reports: &'a [VerificationReport],
                }
                writeln!(io.out, "{}", wire::to_json(&Body { reports: &reports }))?;
            } else {
                write!(io.out, "{}", verify::render_table(&reports))?;
            }
            if reports.iter().any(|r| !r.pass) {
                return Err(Failure::Unverified);
            }
        }
        Command::Serve {
            bind,
            session_ttl,
            default_grid,
        } => {
            let config = ServiceConfig::new(bind, session_ttl, default_grid)
                .and_then(|c| c.with_port(std::env::var("PORT").ok().as_deref()))
                .map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(io.err, "listening on {}", config.bind_address)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::service::serve(config))?;
        }
    }
    Ok(())
}

fn method_name(m: welfare_core::ProtectionMethod) -> &'static str {
    match m {
        welfare_core::ProtectionMethod::ClosedForm => "closed_form",
        welfare_core::ProtectionMethod::NumericLimit => "numeric_limit",
    }
}

fn parse_number(token: &str) -> Result<f64, Failure> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Failure::Usage(format!("{token:?} is not a number")))
}

/// Incomes from a CSV file (every numeric cell, header row allowed) or from
/// an inline comma-separated list.
fn read_distribution(dist: &str) -> Result<Vec<f64>, Failure> {
    let path = Path::new(dist);
    if !path.is_file() {
        return dist.split(',').map(parse_number).collect();
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::Usage(format!("cannot read {dist}: {e}")))?;
    let mut incomes = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::Usage(format!("{dist}: {e}")))?;
        for cell in record.iter().filter(|c| !c.is_empty()) {
            match cell.parse::<f64>() {
                Ok(v) => incomes.push(v),
                Err(_) if row == 0 => {}
                Err(_) => return Err(Failure::Usage(format!("{dist}: {cell:?} is not a number"))),
            }
        }
    }
    Ok(incomes)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TranscriptFile {
    View {
        id: String,
        transcript: Vec<TranscriptEntry>,
    },
    Entries(Vec<TranscriptEntry>),
}

fn elicit(transcript: Option<&Path>, io: &mut Io<'_>) -> Result<(), Failure> {
    let session = match transcript {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let (id, entries) = match wire::parse::<TranscriptFile>("transcript", &text)? {
                TranscriptFile::View { id, transcript } => (id, transcript),
                TranscriptFile::Entries(entries) => ("cli".to_string(), entries),
            };
            Session::replay(id, &entries)?
        }
        None => interactive(io)?,
    };
    if io.json {
        writeln!(io.out, "{}", wire::to_json(&SessionView::of(&session)))?;
    } else if let Some(p) = session.inferred_preference() {
        let d = &p.diagnostics;
        writeln!(io.out, "family = {}", p.family.name())?;
        writeln!(io.out, "coefficient = {}", p.coefficient)?;
        writeln!(io.out, "consistent = {}", d.consistent)?;
        writeln!(io.out, "inconsistency = {:.3e}", d.inconsistency)?;
        if d.ordering_violation {
            writeln!(io.out, "warning = two-rival damage does not exceed one-rival damage")?;
        }
        if let Some(eta) = d.leaky_bucket {
            writeln!(io.out, "leaky_bucket_eta = {eta}")?;
        }
    } else {
        writeln!(
            io.out,
            "session incomplete: {} answers recorded",
            session.transcript().len()
        )?;
    }
    Ok(())
}

fn ask_number(io: &mut Io<'_>, prompt: &str) -> Result<f64, Failure> {
    loop {
        io.prompt(prompt)?;
        let line = io
            .read_line()?
            .ok_or_else(|| Failure::Usage("input ended before the session completed".into()))?;
        match parse_number(&line) {
            Ok(v) => return Ok(v),
            Err(_) => io.prompt(&format!("{line:?} is not a number, try again.\n"))?,
        }
    }
}

fn one_rival_answer(io: &mut Io<'_>, incomes: [f64; 2]) -> Result<ElicitationAnswer, Failure> {
    let p0 = ask_number(io, &format!("  protected income at y = {}: ", incomes[0]))?;
    let p1 = ask_number(io, &format!("  protected income at y = {}: ", incomes[1]))?;
    match answer_from_levels(incomes, [p0, p1], None) {
        Ok(a) => Ok(a),
        Err(_) => {
            let c = ask_number(io, "  neither a fixed fraction nor a fixed loss; income floor c: ")?;
            Ok(answer_from_levels(incomes, [p0, p1], Some(c))?)
        }
    }
}

fn two_rival_answer(q: &Question, p: f64) -> ElicitationAnswer {
    let y = q.incomes()[0];
    match *q {
        Question::TwoRivalDamage { .. } => ElicitationAnswer::ConstantDamageTwoRivals { omega: y - p },
        Question::TwoRivalElasticity { floor_c, .. } => ElicitationAnswer::ElasticityTwoRivals {
            beta: (p / floor_c).ln() / (y / floor_c).ln(),
        },
        _ => ElicitationAnswer::ProtectedFractionTwoRivals { mu: p / y },
    }
}

fn interactive(io: &mut Io<'_>) -> Result<Session, Failure> {
    let mut session = Session::new("cli");
    io.prompt("Leaky bucket (optional): ratio and take separated by a space, blank to skip: ")?;
    if let Some(line) = io.read_line()? {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() == 2 {
            let answer = ElicitationAnswer::LeakyBucket {
                ratio: parse_number(parts[0])?,
                take: parse_number(parts[1])?,
            };
            session.answer(answer)?;
        } else if !parts.is_empty() {
            return Err(Failure::Usage("expected two numbers: ratio take".into()));
        }
    }
    loop {
        let q = session.next_question().map_err(Error::from)?;
        io.prompt(&format!("\n{}\n", q.prompt()))?;
        let answer = match q {
            Question::OneRival { incomes } => one_rival_answer(io, incomes)?,
            _ => {
                let p = ask_number(io, &format!("  protected income at y = {}: ", q.incomes()[0]))?;
                two_rival_answer(&q, p)
            }
        };
        match session.answer(answer) {
            Ok(Step::Complete(_)) => return Ok(session),
            Ok(Step::Next(_)) => {}
            Err(e) => io.prompt(&format!("  {e}; please answer again.\n"))?,
        }
    }
}
