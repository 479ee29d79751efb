//! Command-line front end: parse, validate, execute, report.

pub mod commands;
pub mod parse;
pub mod report;
pub mod selftest;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::splitting::SearchBudget;
use report::{Report, Section, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// Two rank-4 forms: genus-1 cover and section verdict.
    Elliptic,
    /// Two rank-5 forms: function-field isotropy.
    Delpezzo,
    /// Two rank-6 forms: genus-2 cover and common planes.
    Fourfold,
}

impl Scenario {
    pub fn rank(self) -> usize {
        match self {
            Scenario::Elliptic => 4,
            Scenario::Delpezzo => 5,
            Scenario::Fourfold => 6,
        }
    }
    pub fn default_pencil(self) -> &'static str {
        match self {
            Scenario::Elliptic => "field=Q; n=4; q1=diag(1,-1,2,-2); q2=diag(3,-1,-5,3)",
            Scenario::Delpezzo => "field=Fp:5; n=5; q1=diag(1,1,1,1,1); q2=diag(0,1,2,3,4)",
            Scenario::Fourfold => "field=Fp:5; n=6; q1=diag(1,1,1,1,1,0); q2=diag(0,1,2,3,4,1)",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Reduce,
    Pencil,
    Lagrangian,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Reduce => "reduce",
            Command::Pencil => "pencil",
            Command::Lagrangian => "lagrangian",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub height: u64,
    pub degree: usize,
    pub enumeration: u64,
}

impl Budget {
    pub fn search(&self) -> SearchBudget {
        SearchBudget {
            height: self.height,
            degree: self.degree,
            enumeration: self.enumeration,
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        let b = SearchBudget::default();
        Budget {
            height: b.height,
            degree: b.degree,
            enumeration: b.enumeration,
        }
    }
}

/// A validated job. Literals are stored after `@path` expansion, so the
/// input block of a report reproduces the job exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub command: Command,
    pub field: Option<String>,
    pub form: Option<String>,
    pub pencil: Option<String>,
    pub scenario: Option<Scenario>,
    pub dim: Option<usize>,
    pub budget: Budget,
    pub format: Format,
    pub fault_inject: Option<String>,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            field: None,
            form: None,
            pencil: None,
            scenario: None,
            dim: None,
            budget: Budget::default(),
            format: Format::Machine,
            fault_inject: None,
        }
    }

    pub fn input_block(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }

    /// Recover the job from the `input` block of a machine report.
    pub fn from_report(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        serde_json::from_value(v["input"].clone()).map_err(|e| Error::Parse {
            pos: 0,
            msg: e.to_string(),
        })
    }
}

#[derive(Debug, Parser)]
#[command(name = "quadrics", version, about = "Exact analysis of quadratic forms, Clifford algebras and pencils of quadrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Sub>,
    /// Run the self-test suite (same as the `selftest` subcommand).
    #[arg(long)]
    pub selftest: bool,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    /// Field descriptor: Q, Fp:5, F3^2, Fp:3(t), Q(t).
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Bound on coordinate heights for searches over Q.
    #[arg(long, global = true)]
    pub budget_height: Option<u64>,
    /// Degree bound D for searches over k(t).
    #[arg(long, global = true)]
    pub budget_degree: Option<usize>,
    /// Cap on enumerated candidates.
    #[arg(long, global = true)]
    pub budget_enum: Option<u64>,
    /// Test hook: structure-constant | split-witness.
    #[arg(long, global = true)]
    pub fault_inject: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Discriminant, radical, degeneration and C0 summary of a form.
    Analyze {
        /// Form literal, or @path.
        #[arg(long)]
        form: String,
    },
    /// Split off hyperbolic planes with explicit witnesses.
    Reduce {
        #[arg(long)]
        form: String,
    },
    /// Discriminant, cover and verdicts for a pencil s·q1 + t·q2.
    Pencil {
        /// Pencil literal (`field=...; q1=...; q2=...`), or @path.
        #[arg(long)]
        pencil: Option<String>,
        #[arg(long, value_enum)]
        scenario: Option<Scenario>,
    },
    /// Totally isotropic subspaces, rulings and the center comparison.
    Lagrangian {
        #[arg(long)]
        form: String,
        /// Subspace dimension minus one (default: lagrangians).
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Run the acceptance checks.
    Selftest,
}

fn expand(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(PathBuf::from(path))
            .map(|s| s.trim().to_string())
            .map_err(|e| Error::Parse {
                pos: 0,
                msg: format!("cannot read {path}: {e}"),
            }),
        None => Ok(arg.to_string()),
    }
}

impl Cli {
    pub fn job(&self) -> Result<JobSpec> {
        let command = match (&self.command, self.selftest) {
            (None, true) | (Some(Sub::Selftest), _) => Command::Selftest,
            (None, false) => {
                return Err(Error::Parse {
                    pos: 0,
                    msg: "no command given (try --help)".into(),
                })
            }
            (Some(Sub::Analyze { .. }), _) => Command::Analyze,
            (Some(Sub::Reduce { .. }), _) => Command::Reduce,
            (Some(Sub::Pencil { .. }), _) => Command::Pencil,
            (Some(Sub::Lagrangian { .. }), _) => Command::Lagrangian,
        };
        let mut job = JobSpec::new(command);
        job.field = self.field.clone();
        job.format = self.format;
        job.fault_inject = self.fault_inject.clone();
        let d = Budget::default();
        job.budget = Budget {
            height: self.budget_height.unwrap_or(d.height),
            degree: self.budget_degree.unwrap_or(d.degree),
            enumeration: self.budget_enum.unwrap_or(d.enumeration),
        };
        match &self.command {
            Some(Sub::Analyze { form }) | Some(Sub::Reduce { form }) => job.form = Some(expand(form)?),
            Some(Sub::Lagrangian { form, dim }) => {
                job.form = Some(expand(form)?);
                job.dim = *dim;
            }
            Some(Sub::Pencil { pencil, scenario }) => {
                job.scenario = *scenario;
                job.pencil = match (pencil, scenario) {
                    (Some(p), _) => Some(expand(p)?),
                    (None, Some(s)) => Some(s.default_pencil().to_string()),
                    (None, None) => {
                        return Err(Error::Parse {
                            pos: 0,
                            msg: "pencil needs --pencil or --scenario".into(),
                        })
                    }
                };
            }
            _ => {}
        }
        Ok(job)
    }
}

pub fn status_of(e: &Error) -> Status {
    match e {
        Error::BudgetExceeded(_) => Status::Inconclusive,
        Error::Falsified(_) | Error::UnexpectedCenter(_) => Status::Falsified,
        _ => Status::Invalid,
    }
}

/// Execute a job. Errors become reports too, with the matching status.
pub fn execute(job: &JobSpec) -> Report {
    let result = match job.command {
        Command::Analyze => commands::analyze(job),
        Command::Reduce => commands::reduce(job),
        Command::Pencil => commands::pencil(job),
        Command::Lagrangian => commands::lagrangian(job),
        Command::Selftest => selftest::run(job.fault_inject.as_deref()),
    };
    let (status, body, notes) = match result {
        Ok(out) => (out.status, out.body, out.notes),
        Err(e) => {
            let mut s = Section::new();
            s.str("error", e.to_string());
            if let Error::Parse { pos, .. } = &e {
                s.num("position", pos);
            }
            (status_of(&e), s, Vec::new())
        }
    };
    Report {
        command: job.command.name().to_string(),
        status,
        input: job.input_block(),
        body,
        notes,
    }
}

/// Result of a command before it is wrapped into a report.
pub struct Outcome {
    pub status: Status,
    pub body: Section,
    pub notes: Vec<String>,
}

/// Entry point for the binary; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let job = match cli.job() {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return Status::Invalid.exit_code();
        }
    };
    let report = execute(&job);
    match job.format {
        Format::Machine => print!("{}", report.machine()),
        Format::Human => print!("{}", report.human()),
    }
    report.status.exit_code()
}
