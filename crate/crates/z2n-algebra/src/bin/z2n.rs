//! Command-line front end: parse sessions, run the algebra operations and
//! emit results in the same textual format. Exit codes: 0 on success, 1 on
//! verification failure or a domain error, 2 on usage, file or parse
//! errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use z2n_algebra::atlas::run_all_checks;
use z2n_algebra::session::{parse_atlas, parse_morphism, parse_session, Session};
use z2n_algebra::{realize_sign_rule, Error, Result, SignTable};

#[derive(Parser)]
#[command(name = "z2n", version, about = "Z2^n-graded formal power series calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multiply two series (names or inline expressions) from a session
    Mul {
        #[arg(long)]
        session: PathBuf,
        a: String,
        b: String,
        /// Override the session truncation order
        #[arg(long)]
        order: Option<usize>,
        /// Write the result here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Invert a series
    Inv {
        #[arg(long)]
        session: PathBuf,
        a: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Pull a series over the target back through a morphism file
    Pullback {
        #[arg(long)]
        morphism: PathBuf,
        /// Expression in the target coordinates
        expr: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Split a series into homogeneous components by degree
    Decompose {
        #[arg(long)]
        session: PathBuf,
        a: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Polynomial part of the Taylor split at a given adic order
    Approx {
        #[arg(long)]
        session: PathBuf,
        a: String,
        k: usize,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Print the adic orders of a series
    Order {
        #[arg(long)]
        session: PathBuf,
        a: String,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Realize a sign-table file as a Z2^(2m) degree assignment
    RealizeSigns {
        table: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Verify transitions, cocycles and witness sections of an atlas file
    CheckAtlas {
        atlas: PathBuf,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_session(path: &Path, order: Option<usize>) -> Result<Session> {
    parse_session(&read(path)?, order)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        None => {
            println!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Mul {
            session,
            a,
            b,
            order,
            output,
        } => {
            let s = load_session(&session, order)?;
            let result = s.operand(&a)?.mul(&s.operand(&b)?)?;
            emit(output.as_deref(), &result.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Inv {
            session,
            a,
            order,
            output,
        } => {
            let s = load_session(&session, order)?;
            let result = s.operand(&a)?.invert()?;
            emit(output.as_deref(), &result.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pullback {
            morphism,
            expr,
            order,
            output,
        } => {
            let m = parse_morphism(&read(&morphism)?, order)?;
            let g = z2n_algebra::parse::parse_series(m.target().formal(), &expr)?;
            let result = m.pullback(&g)?;
            emit(output.as_deref(), &result.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose {
            session,
            a,
            order,
            output,
        } => {
            let s = load_session(&session, order)?;
            let components = s.operand(&a)?.homogeneous_components();
            let text = if components.is_empty() {
                "0".to_string()
            } else {
                components
                    .iter()
                    .map(|(d, part)| format!("{d}: {part}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            emit(output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Approx {
            session,
            a,
            k,
            order,
            output,
        } => {
            let s = load_session(&session, order)?;
            let result = s.operand(&a)?.polynomial_approximation(k)?;
            emit(output.as_deref(), &result.to_string())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Order {
            session,
            a,
            order,
            output,
        } => {
            let s = load_session(&session, order)?;
            let series = s.operand(&a)?;
            let text = format!(
                "j_adic_order = {}\nm_adic_order = {}",
                series.j_adic_order(),
                series.m_adic_order()
            );
            emit(output.as_deref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::RealizeSigns { table, output } => {
            let table = SignTable::from_text(&read(&table)?)?;
            let assignment = realize_sign_rule(&table)?;
            let ok = assignment.realizes(&table);
            let m = table.size();
            let text = format!(
                "n = {}\n{}\ncheck = {} ({} pairs)",
                assignment.grading_length(),
                assignment,
                if ok { "ok" } else { "failed" },
                m * m,
            );
            emit(output.as_deref(), &text)?;
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::CheckAtlas {
            atlas,
            order,
            output,
        } => {
            let base_dir = atlas.parent().unwrap_or(Path::new(".")).to_path_buf();
            let (atlas, witnesses) = parse_atlas(&read(&atlas)?, &base_dir, order)?;
            let reports = run_all_checks(&atlas, &witnesses)?;
            let failed = reports.iter().any(|r| !r.passed());
            let text = reports
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n");
            emit(output.as_deref(), &text)?;
            Ok(if failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
