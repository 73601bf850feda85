//! `dasc`: batch front end for scene scoring, DoF rendering, dataset
//! characterization, study analysis and radius prediction.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;

use dasc_core::characterize::characterize;
use dasc_core::dasc::compute_dasc_from_manifest;
use dasc_core::display_model::{capture_angular_resolution, optimal_radius, CaptureParams, DisplayParams};
use dasc_core::dof_render::render_all_with;
use dasc_core::lightfield::load_from_manifest;
use dasc_core::predictor::{fit_sigmoid, predict_radius, read_points, SigmoidModel};
use dasc_core::study_analysis::{analyze_scene, ingest_votes, BtConfig, STUDY_RADII};
use dasc_core::{Execution, Manifest};

#[derive(Parser, Debug)]
#[command(name = "dasc", version, about = "Depth-of-field aware scene complexity tools")]
struct Cli {
    /// Run every data-parallel loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Score a scene and write the per-object breakdown as JSON.
    Dasc {
        /// Scene manifest (JSON).
        manifest: PathBuf,
        /// Output JSON file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write raw and normalized per-object factors as CSV.
        #[arg(long, value_name = "PATH")]
        factors_csv: Option<PathBuf>,
    },
    /// Apply the circular angular filter to every view.
    Render {
        /// Filter radius in views.
        #[arg(long)]
        radius: u32,
        /// Scene manifest (JSON).
        manifest: PathBuf,
        /// Directory for the filtered views, named by the manifest's view pattern.
        outdir: PathBuf,
    },
    /// Per-view SI, TI, colorfulness and contrast as CSV.
    Characterize {
        /// Scene manifest (JSON).
        manifest: PathBuf,
        /// Output CSV file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bradley-Terry scores, likelihood-ratio tests and preferred radius per scene.
    Analyze {
        /// Votes CSV with columns participant,scene,radius_a,radius_b,choice.
        #[arg(long)]
        votes: PathBuf,
        /// Display-optimal radius; derived from the reference display and capture when omitted.
        #[arg(long)]
        r_hat: Option<u32>,
        /// Radii accepted in the votes file.
        #[arg(long, value_delimiter = ',', default_values_t = STUDY_RADII)]
        radii: Vec<u32>,
        /// Add 0.5 pseudo-votes per ordered pair so never-winning stimuli get a finite score.
        #[arg(long)]
        smoothing: bool,
        /// Output JSON file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fit the sigmoid radius model to (f, radius) points.
    Fit {
        /// CSV with columns f,radius.
        #[arg(long)]
        points: PathBuf,
        /// Output model JSON; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Predict a filter radius from a scene score.
    #[command(group(ArgGroup::new("model_src").required(true).args(["model", "preset"])))]
    #[command(group(ArgGroup::new("score_src").required(true).args(["f", "manifest"])))]
    Predict {
        /// Model JSON with kappa, beta, gamma.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Built-in coefficients (`reference`).
        #[arg(long)]
        preset: Option<String>,
        /// Scene score.
        #[arg(long, allow_negative_numbers = true)]
        f: Option<f64>,
        /// Score this scene first.
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Radii the prediction snaps to.
        #[arg(long, value_delimiter = ',', default_values_t = STUDY_RADII)]
        radii: Vec<u32>,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn load_manifest(path: &Path) -> Result<Manifest> {
    Manifest::load(path).with_context(|| format!("manifest {}", path.display()))
}

fn reference_r_hat() -> Result<u32> {
    let alpha_c = capture_angular_resolution(&CaptureParams::default());
    Ok(optimal_radius(
        DisplayParams::default().angular_resolution_deg,
        alpha_c,
    )?)
}

#[derive(Serialize)]
struct RenderSummary<'a> {
    radius: u32,
    views: usize,
    pattern: &'a str,
}

#[derive(Serialize)]
struct PredictOutput {
    model: SigmoidModel,
    f: f64,
    raw_radius: f64,
    radius: u32,
    radii: Vec<u32>,
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Dasc {
            manifest,
            output,
            factors_csv,
        } => {
            let m = load_manifest(&manifest)?;
            let result = compute_dasc_from_manifest(&m, exec)?;
            if let Some(p) = factors_csv {
                let file = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
                result.write_factors_csv(BufWriter::new(file))?;
            }
            write_text(output.as_deref(), &result.to_json()?)
        }
        Command::Render {
            radius,
            manifest,
            outdir,
        } => {
            let m = load_manifest(&manifest)?;
            let lf = load_from_manifest(&m, exec)?;
            let rendered = render_all_with(&lf, radius, exec);
            rendered.write_views(&outdir, &m.view_pattern)?;
            let summary = RenderSummary {
                radius,
                views: rendered.views().len(),
                pattern: &m.view_pattern,
            };
            write_text(None, &serde_json::to_string(&summary)?)
        }
        Command::Characterize { manifest, output } => {
            let m = load_manifest(&manifest)?;
            let lf = load_from_manifest(&m, exec)?;
            let report = characterize(&lf, &m.scene_name(), exec);
            let mut out = open_output(output.as_deref())?;
            report.write_csv(&mut out)?;
            Ok(())
        }
        Command::Analyze {
            votes,
            r_hat,
            radii,
            smoothing,
            output,
        } => {
            let r_hat = match r_hat {
                Some(r) => r,
                None => reference_r_hat()?,
            };
            let cfg = if smoothing {
                BtConfig::smoothed()
            } else {
                BtConfig::default()
            };
            let matrices = ingest_votes(&votes, &radii)?;
            let analyses = matrices
                .iter()
                .map(|m| analyze_scene(m, &cfg, r_hat).with_context(|| format!("scene `{}`", m.scene)))
                .collect::<Result<Vec<_>>>()?;
            write_text(output.as_deref(), &serde_json::to_string_pretty(&analyses)?)
        }
        Command::Fit { points, output } => {
            let samples = read_points(&points)?;
            let report = fit_sigmoid(&samples)?;
            write_text(output.as_deref(), &serde_json::to_string_pretty(&report.model)?)
        }
        Command::Predict {
            model,
            preset,
            f,
            manifest,
            radii,
        } => {
            let model = match (model, preset) {
                (Some(p), _) => SigmoidModel::load(&p).with_context(|| format!("--model {}", p.display()))?,
                (None, Some(name)) => match SigmoidModel::preset(&name) {
                    Some(m) => m,
                    None => bail!("--preset: unknown preset `{name}` (known: reference)"),
                },
                (None, None) => unreachable!("clap enforces one model source"),
            };
            let f = match (f, manifest) {
                (Some(f), _) => f,
                (None, Some(p)) => compute_dasc_from_manifest(&load_manifest(&p)?, exec)?.f,
                (None, None) => unreachable!("clap enforces one score source"),
            };
            if radii.is_empty() {
                bail!("--radii must list at least one radius");
            }
            let p = predict_radius(&model, f, &radii)?;
            let out = PredictOutput {
                model,
                f,
                raw_radius: p.raw_radius,
                radius: p.radius,
                radii,
            };
            write_text(None, &serde_json::to_string(&out)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
