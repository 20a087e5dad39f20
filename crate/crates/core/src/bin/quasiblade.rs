use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::LevelFilter;

use quasiblade::geometry::read_contour_csv;
use quasiblade::pipeline::{
    parse_config, position_contours, run_pipeline, write_artifacts, PositioningConfig, RunReport,
};
use quasiblade::positioning::{ShiftBox, ShiftMethod};
use quasiblade::{Contour, Error, Result};

#[derive(Parser)]
#[command(
    name = "quasiblade",
    version,
    about = "Inverse design of stacked blade sections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the design pipeline and write artifacts.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the configured one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the design pipeline and print the verdicts only.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Place the second contour relative to the first.
    Position {
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        contours: Vec<PathBuf>,
        #[arg(long, default_value = "lsq")]
        method: ShiftMethod,
        #[arg(long = "box", num_args = 4, value_names = ["X0", "Y0", "X1", "Y1"], allow_negative_numbers = true)]
        bounds: Option<Vec<f64>>,
        /// Number of leading nodes on the lower surface.
        #[arg(long)]
        partition: Option<usize>,
        /// Transversal spacing used by the area objective.
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
    },
}

fn init_logging() {
    let level = match std::env::var("BLADE_LOG").as_deref() {
        Ok("debug") => LevelFilter::Debug,
        Ok("quiet") => LevelFilter::Off,
        Ok("info") => LevelFilter::Info,
        _ => LevelFilter::Warn,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn print_verdicts(report: &RunReport) {
    for s in &report.sections {
        if let Some(e) = &s.error {
            println!("{}: FAIL error: {e}", s.id);
        }
        for v in &s.verdicts {
            let tag = if v.pass { "PASS" } else { "FAIL" };
            println!(
                "{}: {tag} {} = {:e} (tolerance {:e})",
                s.id, v.name, v.value, v.tolerance
            );
        }
    }
    println!("overall: {}", if report.all_pass { "PASS" } else { "FAIL" });
}

fn read_contour(path: &Path) -> Result<(Contour, Option<Vec<f64>>)> {
    let (points, speeds) = read_contour_csv(path)?;
    Ok((Contour::closed(points)?, speeds))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { config, out } => {
            let cfg = parse_config(&config)?;
            let dir = out
                .or_else(|| cfg.output_directory.clone())
                .ok_or_else(|| Error::MissingField("/output/directory".into()))?;
            let result = run_pipeline(&cfg);
            for s in &result.report.sections {
                log::info!("section {} took {:.3} s", s.id, s.elapsed.as_secs_f64());
            }
            write_artifacts(&result, &cfg.formats, &dir)?;
            print_verdicts(&result.report);
            Ok(result.report.all_pass)
        }
        Command::Verify { config } => {
            let cfg = parse_config(&config)?;
            let result = run_pipeline(&cfg);
            print_verdicts(&result.report);
            Ok(result.report.all_pass)
        }
        Command::Position {
            contours,
            method,
            bounds,
            partition,
            spacing,
        } => {
            let (c1, v1) = read_contour(&contours[0])?;
            let (c2, v2) = read_contour(&contours[1])?;
            let bounds = match bounds {
                Some(b) => Some(ShiftBox::new(b[0], b[1], b[2], b[3])?),
                None => None,
            };
            let cfg = PositioningConfig {
                method,
                bounds,
                partition,
                spacing,
            };
            let speeds = v1.zip(v2);
            let shift = position_contours(&c1, &c2, &cfg, speeds)?;
            println!("{}", shift.to_json());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
