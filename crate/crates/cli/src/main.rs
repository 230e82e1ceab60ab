#![allow(clippy::result_large_err)]

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use islands_cli::commands::{
    cmd_generate, cmd_render, cmd_run, cmd_verify, Algorithm, Family, GenerateParams,
};
use islands_cli::report::cmd_report;
use islands_cli::solution::SolutionKind;
use islands_cli::CliError;

#[derive(Parser)]
#[command(
    name = "islands",
    version,
    about = "Monochromatic island partitions of colored point sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    FlatTree,
    CheckerboardCross,
    GridRectangles,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    DisjointGreedy,
    OverlapGreedy,
    Bold,
    LineGreedy,
    ExactPartition,
    ExactCover,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Partition,
    Cover,
    Lines,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance and its witness solutions.
    Generate {
        #[arg(value_enum)]
        family: FamilyArg,
        /// Instance path; witnesses go to `<stem>.<name>.json` beside it.
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        ell: Option<u32>,
        /// Red points per leaf square of a flat tree.
        #[arg(long, default_value_t = 64)]
        r_base: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 2)]
        colors: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reject random points collinear with two earlier ones.
        #[arg(long)]
        general_position: bool,
    },
    /// Run an algorithm and write a solution file.
    Run {
        #[arg(value_enum)]
        algorithm: AlgorithmArg,
        instance: PathBuf,
        /// Solution path; stdout when absent.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Skip exact optima even when the instance is small enough.
        #[arg(long)]
        no_exact: bool,
    },
    /// Re-verify a solution file against its instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Check the islands as this kind instead of the recorded one.
        #[arg(long = "as", value_enum)]
        as_kind: Option<KindArg>,
    },
    /// Draw an instance, optionally with a solution, as SVG.
    Render {
        instance: PathBuf,
        solution: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Tabulate all algorithms over a directory of instances.
    Report {
        dir: PathBuf,
        /// Also write the table as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate {
            family,
            out,
            k,
            ell,
            r_base,
            n,
            colors,
            seed,
            general_position,
        } => {
            let family = match family {
                FamilyArg::FlatTree => Family::FlatTree,
                FamilyArg::CheckerboardCross => Family::CheckerboardCross,
                FamilyArg::GridRectangles => Family::GridRectangles,
                FamilyArg::Random => Family::Random,
            };
            let params = GenerateParams {
                k,
                ell,
                r_base,
                n,
                colors,
                seed,
                general_position,
            };
            for p in cmd_generate(family, &params, &out)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Run {
            algorithm,
            instance,
            out,
            no_exact,
        } => {
            let algo = match algorithm {
                AlgorithmArg::DisjointGreedy => Algorithm::DisjointGreedy,
                AlgorithmArg::OverlapGreedy => Algorithm::OverlapGreedy,
                AlgorithmArg::Bold => Algorithm::Bold,
                AlgorithmArg::LineGreedy => Algorithm::LineGreedy,
                AlgorithmArg::ExactPartition => Algorithm::ExactPartition,
                AlgorithmArg::ExactCover => Algorithm::ExactCover,
            };
            let sol = cmd_run(algo, &instance, out.as_deref(), !no_exact)?;
            if let Some(p) = out {
                println!(
                    "{}: {} islands, wrote {}",
                    algo.name(),
                    sol.islands.len(),
                    p.display()
                );
            }
        }
        Command::Verify {
            instance,
            solution,
            as_kind,
        } => {
            let kind = as_kind.map(|k| match k {
                KindArg::Partition => SolutionKind::Partition,
                KindArg::Cover => SolutionKind::Cover,
                KindArg::Lines => SolutionKind::Lines,
            });
            let v = cmd_verify(&instance, &solution, kind)?;
            for (flag, ok) in &v.validity {
                println!("{flag}: {}", if *ok { "pass" } else { "fail" });
            }
            for m in &v.messages {
                println!("violation: {m}");
            }
            if !v.passed() {
                return Err(CliError::Validation(v.messages[0].clone()));
            }
        }
        Command::Render {
            instance,
            solution,
            out,
        } => cmd_render(&instance, solution.as_deref(), &out)?,
        Command::Report { dir, json } => {
            let table = cmd_report(&dir)?;
            print!("{}", table.to_text());
            if let Some(p) = json {
                std::fs::write(&p, table.to_json())
                    .map_err(|source| CliError::Io { path: p, source })?;
            }
            if table.failed() {
                return Err(CliError::Validation("report contains failed checks".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
