use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tandemgrip::commands::{self, Format, GraspArgs, NutForce, Output, SimulateArgs, XRange};
use tandemgrip::core::grasp::{ActuationMode, PullType};
use tandemgrip::{Error, GripperConfig};

#[derive(Parser)]
#[command(
    name = "tandemgrip",
    version,
    about = "Design and evaluation tools for a suction + cam-finger fruit gripper"
)]
struct Cli {
    /// Gripper configuration JSON. Defaults to the built-in prototype.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write every artifact to this directory instead of printing one.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact printed to stdout.
    #[arg(long, global = true, value_enum)]
    format: Option<OutFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Transmission ratio, nut force and motor torque over the nut travel.
    Transmission {
        /// START:END[:STEP] or a single X, mm. Defaults to the configured travel.
        #[arg(long)]
        x_range: Option<XRange>,
        /// Pad force to hold, N.
        #[arg(long, default_value_t = 30.0)]
        f_out: f64,
    },
    /// Pad force over the travel for a fixed nut force.
    Bruise {
        /// `F@X` (pad force F N at travel X mm) or a nut force in N.
        #[arg(long, default_value = "18@58")]
        f_nut: NutForce,
        /// Travel step, mm.
        #[arg(long, default_value_t = 0.1)]
        step: f64,
    },
    /// Finger path along the cam tracks.
    Campath {
        /// mm. Defaults to the configured fruit.
        #[arg(long)]
        fruit_diameter: Option<f64>,
        /// Finger-to-fruit clearance while sweeping, mm.
        #[arg(long)]
        clearance: Option<f64>,
        /// Poses sampled along the path.
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// Worker threads. Defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Largest pull the grasp resists.
    Grasp {
        /// suction, fingers or dual.
        #[arg(long, default_value = "dual", value_parser = parse_mode)]
        mode: ActuationMode,
        /// Fruit offset from the palm, mm.
        #[arg(long, default_value_t = 0.0)]
        offset: f64,
        /// Pull angle from the gripper axis, deg.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        /// axial or rotational.
        #[arg(long, default_value = "axial", value_parser = parse_pull)]
        pull: PullType,
        /// mm. Defaults to the configured fruit.
        #[arg(long)]
        fruit_diameter: Option<f64>,
    },
    /// Fit the grasp model to measured strengths.
    Calibrate {
        /// CSV of measured strengths.
        #[arg(long)]
        data: PathBuf,
    },
    /// Monte Carlo pick campaign.
    Simulate {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// suction, fingers or dual.
        #[arg(long, default_value = "dual", value_parser = parse_mode)]
        mode: ActuationMode,
        /// Worker threads. Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Extra attempts after a failed pick, each with a new fruit offset.
        #[arg(long, default_value_t = 0)]
        retries: u32,
        /// Field log CSV to draw trial variables from.
        #[arg(long)]
        field_log: Option<PathBuf>,
    },
    /// Five-number summary of every column of a CSV.
    Stats {
        #[arg(long)]
        csv: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<ActuationMode, String> {
    s.parse()
}

fn parse_pull(s: &str) -> Result<PullType, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<Output, Error> {
    let cfg = match &cli.config {
        Some(p) => GripperConfig::load(p)?,
        None => GripperConfig::prototype(),
    };
    match cli.command {
        Command::Transmission { x_range, f_out } => commands::transmission(&cfg, x_range, f_out),
        Command::Bruise { f_nut, step } => commands::bruise(&cfg, f_nut, step),
        Command::Campath {
            fruit_diameter,
            clearance,
            samples,
            threads,
        } => commands::campath(&cfg, fruit_diameter, clearance, samples, threads),
        Command::Grasp {
            mode,
            offset,
            angle,
            pull,
            fruit_diameter,
        } => commands::grasp(
            &cfg,
            &GraspArgs {
                mode,
                offset,
                angle,
                pull,
                fruit_diameter,
            },
        ),
        Command::Calibrate { data } => commands::calibrate(&cfg, &data),
        Command::Simulate {
            trials,
            seed,
            mode,
            threads,
            retries,
            field_log,
        } => commands::simulate(
            &cfg,
            &SimulateArgs {
                trials,
                seed,
                mode,
                threads,
                retries,
                field_log: field_log.as_deref(),
            },
        ),
        Command::Stats { csv } => commands::stats(&csv),
    }
}

fn emit(
    output: &Output,
    out_dir: Option<&PathBuf>,
    format: Option<OutFormat>,
) -> Result<(), Error> {
    let wanted = format.map(|f| match f {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
        OutFormat::Svg => Format::Svg,
    });
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        for (f, contents) in &output.artifacts {
            if wanted.is_some_and(|w| w != *f) {
                continue;
            }
            let path = dir.join(format!("{}.{}", output.stem, f.extension()));
            fs::write(&path, contents).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            eprintln!("wrote {}", path.display());
        }
        return Ok(());
    }
    let text = match wanted {
        Some(w) => output.get(w).ok_or_else(|| {
            Error::Usage(format!("`{}` has no {} output", output.stem, w.extension()))
        })?,
        None => output.primary(),
    };
    let mut stdout = std::io::stdout().lock();
    // A closed pipe is not worth an error message.
    let _ = stdout.write_all(text.as_bytes());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli.out.clone();
    let format = cli.format;
    let result = run(cli).and_then(|output| {
        emit(&output, out_dir.as_ref(), format)?;
        for note in &output.notes {
            eprintln!("warning: {note}");
        }
        match output.failure {
            Some(e) => Err(e),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
