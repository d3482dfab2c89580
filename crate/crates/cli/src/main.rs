use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use groupcode::control::analysis_json;
use groupcode::sweep::SweepOptions;
use groupcode::{
    decide_controllability, evaluate_predicates, export_dot, sweep_theorems, Encoder, EncoderSpec,
    Error, FiniteAbelianGroup, GroupElement, PredicateReport,
};

const AFTER_HELP: &str = "\
Elements are written as dot-separated coordinates (1.0.3), a single integer for cyclic groups, \
or one digit per coordinate (101). In encoder specs the generators of G are the unit vectors of \
U ⊕ S with the U coordinates first, then the S coordinates.

Exit codes: 0 success, 1 predicate violation, 2 user error, 3 I/O error.";

#[derive(Parser)]
#[command(name = "groupcode", version, about = "Encoders over group extensions and the controllability of their codes", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide controllability and evaluate the structural predicates.
    Analyze { spec: PathBuf },
    /// Run the encoder on an input word.
    Encode {
        spec: PathBuf,
        /// Initial state (default: identity).
        #[arg(long)]
        state: Option<String>,
        /// Comma-separated input symbols.
        #[arg(long, default_value = "")]
        inputs: String,
        /// Append the shortest padding that returns the state to the identity.
        #[arg(long)]
        zero_tail: bool,
    },
    /// Export the state diagram (0 sections) or an unrolled trellis as DOT.
    Trellis {
        spec: PathBuf,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        sections: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check every predicate on every encoder over Z_p ⊠ S, 2 ≤ |S| ≤ max.
    Sweep {
        #[arg(long = "p", value_delimiter = ',', required = true)]
        p: Vec<u32>,
        #[arg(long, default_value_t = 8)]
        max_s_order: usize,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep every order-p subgroup instead of one per automorphism class.
        #[arg(long)]
        no_dedup: bool,
    },
}

enum Failure {
    Violation(String),
    User(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::User(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Violation(m) | Failure::User(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::PredicateViolation { .. } => Failure::Violation(e.to_string()),
            _ => Failure::User(e.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<Encoder, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let spec = EncoderSpec::from_json(&text)?;
    Ok(Encoder::from_spec(&spec)?)
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_element(g: &FiniteAbelianGroup, token: &str) -> Result<GroupElement, Failure> {
    let token = token.trim();
    let bad = || Failure::User(format!("'{token}' is not an element of {g}"));
    let coords: Vec<i64> = if g.rank() == 0 && (token.is_empty() || token == "e" || token == "0") {
        Vec::new()
    } else if token.contains('.') || g.rank() == 1 {
        token
            .split('.')
            .map(|c| c.parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    } else if token.len() == g.rank() && token.bytes().all(|b| b.is_ascii_digit()) {
        token.bytes().map(|b| (b - b'0') as i64).collect()
    } else {
        return Err(bad());
    };
    if coords.len() != g.rank()
        || coords
            .iter()
            .zip(g.moduli())
            .any(|(&c, &m)| c < 0 || c >= m as i64)
    {
        return Err(bad());
    }
    g.element_from(&coords).map_err(|_| bad())
}

fn analyze(spec: &Path) -> Result<(), Failure> {
    let enc = load(spec)?;
    let verdict = decide_controllability(&enc);
    let report = match evaluate_predicates(&enc) {
        Ok(r) => r,
        Err(Error::NotApplicable(_)) => PredicateReport::default(),
        Err(e) => return Err(e.into()),
    };
    let doc = analysis_json(&enc, &verdict, &report)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&doc).expect("plain data")
    );
    if let Some((name, c)) = report.violations().next() {
        return Err(Failure::Violation(format!("{name} violated: {c}")));
    }
    Ok(())
}

fn encode(spec: &Path, state: Option<&str>, inputs: &str, zero_tail: bool) -> Result<(), Failure> {
    let enc = load(spec)?;
    let s0 = match state {
        Some(t) => parse_element(enc.s(), t)?,
        None => enc.s().identity(),
    };
    let mut word: Vec<GroupElement> = if inputs.trim().is_empty() {
        Vec::new()
    } else {
        inputs
            .split(',')
            .map(|t| parse_element(enc.u(), t))
            .collect::<Result<_, _>>()?
    };
    let message_len = word.len();
    if zero_tail {
        let (states, _) = enc.encode_forward(&s0, &word)?;
        let last = states.last().unwrap_or(&s0);
        match enc.zero_tail(last, enc.s().order())? {
            Some(pad) => word.extend(pad),
            None => eprintln!("state {} cannot be driven to the identity", last.compact()),
        }
    }
    let (states, outputs) = enc.encode_forward(&s0, &word)?;
    println!("{:>4}  {:>6}  {:>6}  {:>6}", "i", "u_i", "s_i", "y_i");
    println!("{:>4}  {:>6}  {:>6}  {:>6}", 0, "", s0.compact(), "");
    for (i, ((u, s), y)) in word.iter().zip(&states).zip(&outputs).enumerate() {
        let mark = if i >= message_len { "  pad" } else { "" };
        println!(
            "{:>4}  {:>6}  {:>6}  {:>6}{mark}",
            i + 1,
            u.compact(),
            s.compact(),
            y.compact()
        );
    }
    Ok(())
}

fn trellis(spec: &Path, sections: i64, out: Option<&Path>) -> Result<(), Failure> {
    if sections < 0 {
        return Err(Failure::User(format!(
            "--sections must be non-negative, got {sections}"
        )));
    }
    let enc = load(spec)?;
    let dot = export_dot(&enc, sections as usize);
    match out {
        Some(path) => write_out(path, &dot),
        None => {
            print!("{dot}");
            Ok(())
        }
    }
}

fn jobs() -> Result<usize, Failure> {
    match std::env::var("GROUPCODE_JOBS") {
        Err(_) => Ok(1),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(Failure::User(format!(
                "GROUPCODE_JOBS must be a positive integer, got '{v}'"
            ))),
        },
    }
}

fn sweep(p: &[u32], max_s_order: usize, out: Option<&Path>, no_dedup: bool) -> Result<(), Failure> {
    let options = SweepOptions {
        dedup: !no_dedup,
        jobs: jobs()?,
    };
    let start = Instant::now();
    let report = sweep_theorems(p, max_s_order, &options)?;
    let json = report.to_json();
    match out {
        Some(path) => write_out(path, &(json + "\n"))?,
        None => println!("{json}"),
    }
    print!("{}", report.summary_table());
    eprintln!(
        "checked {} encoders over {} extensions in {:.2}s",
        report.tallies.encoders,
        report.tallies.instances,
        start.elapsed().as_secs_f64()
    );
    match report.violations.first() {
        Some(v) => Err(Failure::Violation(format!(
            "{} predicate violations, first: {} ({})",
            report.violations.len(),
            v.predicate,
            v.counterexample
        ))),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Analyze { spec } => analyze(spec),
        Command::Encode {
            spec,
            state,
            inputs,
            zero_tail,
        } => encode(spec, state.as_deref(), inputs, *zero_tail),
        Command::Trellis {
            spec,
            sections,
            out,
        } => trellis(spec, *sections, out.as_deref()),
        Command::Sweep {
            p,
            max_s_order,
            out,
            no_dedup,
        } => sweep(p, *max_s_order, out.as_deref(), *no_dedup),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
