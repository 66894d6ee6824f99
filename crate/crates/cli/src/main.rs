//! `skelevo` command line: analyze, compare, synth and render.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use skelevo::creation_time::Smoothing;
use skelevo::indicators::VivacityMode;
use skelevo::pipeline::{self, FilterMode, PipelineConfig, RenderMode};
use skelevo::skeletonize::{InputFormat, Polarity};
use skelevo::synthgen::{self, GrowthScript};
use skelevo::Error;

#[derive(Parser)]
#[command(
    name = "skelevo",
    version,
    about = "Temporal analysis of evolving 2D skeletons"
)]
struct Cli {
    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline over a frame sequence.
    Analyze(AnalyzeArgs),
    /// DTW distances between the activity curves of two runs.
    Compare {
        run_a: PathBuf,
        run_b: PathBuf,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Generate a synthetic sequence from a JSON growth script.
    Synth {
        /// Growth script (JSON).
        script: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw overlays from the exports of an existing run.
    Render {
        run: PathBuf,
        #[arg(long, default_value = "creation-time")]
        mode: RenderMode,
        /// Defaults to `<run>/render`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    /// JSON configuration; flags given here override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Frame directory or JSON frame list.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<InputFormat>,
    #[arg(long)]
    threshold: Option<u8>,
    #[arg(long)]
    polarity: Option<Polarity>,
    #[arg(long, conflicts_with = "smooth_at_export")]
    no_smooth: bool,
    /// Propagate unsmoothed times and smooth only the exported fields.
    #[arg(long)]
    smooth_at_export: bool,
    #[arg(long)]
    filter: Option<FilterMode>,
    #[arg(long)]
    bi_threshold: Option<u32>,
    #[arg(long)]
    age_threshold: Option<u32>,
    #[arg(long = "t-g")]
    t_g: Option<u32>,
    #[arg(long)]
    vivacity: Option<VivacityMode>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    render: Option<RenderMode>,
    /// Also write timings.json.
    #[arg(long)]
    timings: bool,
}

impl AnalyzeArgs {
    fn config(&self) -> Result<PipelineConfig, Error> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
                PipelineConfig::from_json(&text)?
            }
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.input {
            c.input = v.clone();
        }
        if let Some(v) = self.format {
            c.format = v;
        }
        if let Some(v) = self.threshold {
            c.threshold = v;
        }
        if let Some(v) = self.polarity {
            c.polarity = v;
        }
        if self.no_smooth {
            c.smoothing = Smoothing::Off;
        }
        if self.smooth_at_export {
            c.smoothing = Smoothing::AtExport;
        }
        if let Some(v) = self.filter {
            c.filter = v;
        }
        if let Some(v) = self.bi_threshold {
            c.bi_threshold = v;
        }
        if let Some(v) = self.age_threshold {
            c.age_threshold = v;
        }
        if let Some(v) = self.t_g {
            c.t_g = v;
        }
        if let Some(v) = self.vivacity {
            c.vivacity = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = self.jobs {
            c.jobs = v;
        }
        if self.render.is_some() {
            c.render = self.render;
        }
        if self.timings {
            c.export.timings = true;
        }
        Ok(c)
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Analyze(args) => {
            let config = args.config()?;
            let analysis = pipeline::run(&config)?;
            println!(
                "analyzed {} steps into {}",
                analysis.steps.len(),
                config.out.display()
            );
        }
        Command::Compare { run_a, run_b, json } => {
            let reports = pipeline::compare(&run_a, &run_b)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&reports)?);
            } else {
                for r in reports {
                    println!("{}\t{}\t{}", r.a, r.b, r.distance);
                }
            }
        }
        Command::Synth { script, out } => {
            let text = std::fs::read_to_string(&script)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", script.display())))?;
            let script: GrowthScript = serde_json::from_str(&text)?;
            let (frames, truth) = synthgen::generate(&script)?;
            synthgen::write_sequence(&out, &frames, &truth)?;
            println!("wrote {} frames to {}", frames.len(), out.display());
        }
        Command::Render { run, mode, out } => {
            let out = out.unwrap_or_else(|| run.join("render"));
            let n = pipeline::render_run(&run, mode, &out)?;
            println!("rendered {n} steps into {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
    }
}
