//! `cubic-ode`: classify second-order equations cubic in `y'`.
//!
//! Exit codes: 0 success, 1 corpus expectations not met, 2 input error,
//! 3 probe exhausted.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cubic_ode::classify::DEFAULT_TOL;
use cubic_ode::corpus::{parse_binding, parse_corpus, run_corpus, run_record, CorpusRecord, RunError, RunOptions};
use cubic_ode::expr::{Bindings, Probe, Rational, SampleBox};
use cubic_ode::ode::normalize_to_cubic;
use cubic_ode::report::{dump_invariants, RecordReport, Report, Status};

#[derive(Parser)]
#[command(
    name = "cubic-ode",
    version,
    about = "Point classification of y'' = P + 3Qy' + 3Ry'^2 + Sy'^3"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one equation.
    Classify(EquationArgs),
    /// Run every record of a corpus file and compare against expectations.
    Corpus(CorpusArgs),
    /// Print the invariants of one equation without classifying it.
    Invariants(EquationArgs),
}

#[derive(Args)]
struct Common {
    /// Probe seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample box `x0,x1,y0,y1`.
    #[arg(long = "box", value_name = "X0,X1,Y0,Y1", allow_hyphen_values = true)]
    sample_box: Option<SampleBox>,
    /// Tolerance for matching invariant values.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EquationArgs {
    /// The equation, e.g. "y'' = 6*y^2" or "y*y'' + a*(y'^2 + 1) = 0".
    #[arg(long, allow_hyphen_values = true)]
    ode: String,
    /// Parameter binding `name=rational`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_binding, allow_hyphen_values = true)]
    params: Vec<(String, Rational)>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file.
    path: PathBuf,
    /// Leave out wall times and the timestamp, for byte-comparable output.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    common: Common,
}

const EXIT_MISMATCH: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_PROBE: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify(args) => classify(args),
        Command::Corpus(args) => corpus(args),
        Command::Invariants(args) => invariants(args),
    }
}

fn options(c: &Common, timing: bool) -> RunOptions {
    RunOptions {
        seed: c.seed,
        sample_box: c.sample_box.unwrap_or_default(),
        tol: c.tol,
        timing,
    }
}

fn status_code(s: Status) -> u8 {
    match s {
        Status::Ok => 0,
        Status::InputError => EXIT_INPUT,
        Status::ProbeExhausted => EXIT_PROBE,
    }
}

fn classify(args: EquationArgs) -> ExitCode {
    let opts = options(&args.common, true);
    let rec = CorpusRecord {
        id: "ode".to_string(),
        line: 0,
        equation: args.ode.clone(),
        params: args.params.into_iter().collect(),
        sample_box: None,
        expected: None,
        assertions: Vec::new(),
    };
    let report: RecordReport = run_record(&rec, opts.seed, &opts);
    if let Some(err) = &report.error {
        eprintln!("cubic-ode: {} (equation `{}`)", err, args.ode);
    }
    if args.common.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else if report.status == Status::Ok {
        print!("{}", report.to_text());
    }
    ExitCode::from(status_code(report.status))
}

fn corpus(args: CorpusArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cubic-ode: cannot read {}: {e}", args.path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let corpus = parse_corpus(&text);
    let report: Report = run_corpus(&corpus, &options(&args.common, !args.no_timing));
    if args.common.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    ExitCode::from(if report.all_passed() { 0 } else { EXIT_MISMATCH })
}

fn invariants(args: EquationArgs) -> ExitCode {
    let c = &args.common;
    let probe = Probe {
        seed: c.seed,
        sample_box: c.sample_box.unwrap_or_default(),
        ..Probe::default()
    };
    let bindings: Bindings = args.params.into_iter().collect();
    let result = normalize_to_cubic(&args.ode, &bindings, &probe)
        .map_err(RunError::Normalize)
        .and_then(|ode| dump_invariants(&args.ode, &ode, &probe).map_err(RunError::Probe));
    match result {
        Ok(dump) => {
            if c.json {
                println!("{}", dump.to_json());
            } else {
                print!("{}", dump.to_text());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("cubic-ode: {e} (equation `{}`)", args.ode);
            ExitCode::from(status_code(e.status()))
        }
    }
}
