use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lfd_cli::config::{Format, OffsetsChoice, RunConfig};
use lfd_cli::pipeline::{self, PipelineError};
use lfd_cli::{export, presets};

/// Polyhedral fundamental domains for finite-level groups on the universal
/// cover of SU(1,1).
#[derive(Parser)]
#[command(name = "lfd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Preset catalog operations.
    Presets {
        #[command(subcommand)]
        action: PresetsAction,
    },
    /// Build a group, carve its fundamental domain and export artifacts.
    Compute(RunArgs),
    /// Run a verification pass without exporting meshes.
    Verify {
        #[command(subcommand)]
        check: VerifyCheck,
    },
    /// One-dimensional demo constructions.
    Analogue {
        #[command(subcommand)]
        which: AnalogueKind,
    },
    /// Compute and export only the chosen formats.
    Export(RunArgs),
}

#[derive(Subcommand)]
enum PresetsAction {
    /// Print the catalog with realizability tags.
    List {
        /// Largest series index to include.
        #[arg(long, default_value_t = 30)]
        max_n: u32,
    },
}

#[derive(Subcommand)]
enum VerifyCheck {
    /// Sample group points and check they are tiled exactly once.
    Tiling(RunArgs),
}

#[derive(Subcommand)]
enum AnalogueKind {
    /// Tangent polygon of the order-m circle subgroup.
    So2 {
        #[arg(long, default_value_t = 6)]
        m: u32,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Strip construction for the hyperbola subgroup with spacing d.
    So11 {
        #[arg(long, default_value_t = 0.7)]
        d: f64,
        #[arg(long, default_value_t = 6)]
        branches: i64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Preset name, e.g. E_12; fills signature, level and offsets.
    #[arg(long)]
    preset: Option<String>,
    /// Cone orders, e.g. 2,3,7.
    #[arg(long)]
    signature: Option<String>,
    /// Target level.
    #[arg(long)]
    level: Option<u32>,
    /// Deck offsets: `auto` or s1,s2,s3.
    #[arg(long)]
    offsets: Option<String>,
    /// Base vertex: `auto` or 1|2|3.
    #[arg(long)]
    vertex: Option<String>,
    /// Initial orbit cutoff.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Tiling sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Export formats, e.g. obj,json,svg.
    #[arg(long)]
    format: Option<String>,
    /// Flat key = value configuration file, applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn build_config(args: &RunArgs) -> Result<RunConfig, PipelineError> {
    let mut cfg = RunConfig::default();
    if let Ok(seed) = std::env::var("LFD_SEED") {
        cfg.seed = seed
            .parse()
            .map_err(|_| PipelineError::Config(format!("LFD_SEED {seed:?} is not an integer")))?;
    }
    if let Some(path) = &args.config {
        cfg.apply_file(path).map_err(|e| PipelineError::Config(e.0))?;
    }
    if let Some(name) = &args.preset {
        let preset = presets::find(name)
            .ok_or_else(|| PipelineError::Config(format!("unknown preset {name:?}")))?;
        cfg.signature = preset.signature;
        cfg.level = preset.level;
        cfg.offsets = match preset.offsets {
            Some(s) => OffsetsChoice::Explicit(s),
            None => OffsetsChoice::Auto, // surfaces as unrealizable downstream
        };
    }
    if let Some(s) = &args.signature {
        cfg.apply("signature", s).map_err(|e| PipelineError::Config(e.0))?;
    }
    if let Some(k) = args.level {
        cfg.level = k;
    }
    if let Some(o) = &args.offsets {
        cfg.apply("offsets", o).map_err(|e| PipelineError::Config(e.0))?;
    }
    if let Some(v) = &args.vertex {
        cfg.apply("vertex", v).map_err(|e| PipelineError::Config(e.0))?;
    }
    if let Some(e) = args.epsilon {
        cfg.apply("epsilon", &e.to_string()).map_err(|e| PipelineError::Config(e.0))?;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(dir) = &args.out {
        cfg.out_dir = dir.clone();
    }
    if let Some(f) = &args.format {
        cfg.formats = Format::parse_list(f).map_err(|e| PipelineError::Config(e.0))?;
    }
    cfg.validate().map_err(|e| PipelineError::Config(e.0))?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Presets { action: PresetsAction::List { max_n } } => {
            println!("{:<6} {:>2} {:>5}  {:<12} {:<12} offsets", "name", "n", "level", "signature", "realizable");
            for p in presets::catalog(max_n) {
                let offsets = p
                    .offsets
                    .map(|s| format!("{},{},{}", s[0], s[1], s[2]))
                    .unwrap_or_else(|| "-".to_string());
                println!(
                    "{:<6} {:>2} {:>5}  ({},{},{})      {:<12} {}",
                    p.name, p.n, p.level, p.signature[0], p.signature[1], p.signature[2],
                    if p.realizable { "yes" } else { "UNREALIZABLE" },
                    offsets
                );
            }
            Ok(())
        }
        Command::Compute(args) | Command::Export(args) => {
            let cfg = build_config(&args)?;
            match lfd_cli::run_and_export(&cfg) {
                Ok(out) => {
                    let report = out.report;
                    let carve = report.carve.as_ref().expect("complete report");
                    println!(
                        "carved {} cells, {} boundary facets, invariant volume {:.6}",
                        carve.cells, carve.boundary_facets, carve.invariant_volume
                    );
                    println!("artifacts written to {}", cfg.out_dir.display());
                    Ok(())
                }
                Err(e @ PipelineError::Unrealizable { .. }) => {
                    // Still record the outcome for the run directory.
                    std::fs::create_dir_all(&cfg.out_dir)
                        .map_err(|io| PipelineError::Io(io.to_string()))?;
                    export::write_report(
                        &cfg.out_dir.join("report.json"),
                        &pipeline::unrealizable_report(),
                    )?;
                    Err(e)
                }
                Err(e) => Err(e),
            }
        }
        Command::Verify { check: VerifyCheck::Tiling(args) } => {
            let cfg = build_config(&args)?;
            let out = pipeline::run_pipeline(&cfg)?;
            let tiling = out.report.tiling.expect("complete report");
            println!(
                "tiling: {}/{} covered, {} interior double covers",
                tiling.covered, tiling.samples, tiling.interior_double
            );
            Ok(())
        }
        Command::Analogue { which } => match which {
            AnalogueKind::So2 { m, out } => {
                let domain = lfd::analogue::circle_domain(m)
                    .map_err(|e| PipelineError::Config(e.to_string()))?;
                std::fs::create_dir_all(&out).map_err(|e| PipelineError::Io(e.to_string()))?;
                let path = out.join(format!("so2_m{m}.svg"));
                std::fs::write(&path, export::svg_circle_domain(&domain))
                    .map_err(|e| PipelineError::Io(e.to_string()))?;
                println!("wrote {}", path.display());
                Ok(())
            }
            AnalogueKind::So11 { d, branches, out } => {
                let domain = lfd::analogue::hyperbola_domain(d, branches)
                    .map_err(|e| PipelineError::Config(e.to_string()))?;
                std::fs::create_dir_all(&out).map_err(|e| PipelineError::Io(e.to_string()))?;
                let path = out.join(format!("so11_d{d}.svg"));
                std::fs::write(&path, export::svg_hyperbola_domain(&domain))
                    .map_err(|e| PipelineError::Io(e.to_string()))?;
                println!("wrote {}", path.display());
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
