use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsearch::bench::settings::{Format, Settings};
use qsearch::bench::table::write_csv;
use qsearch::bench::{
    depth_report, run_trial, success_vs_nfev, summarize, sweep, Mode, RunRecord, SweepSpec,
};
use qsearch::Error;

#[derive(Parser)]
#[command(name = "qsearch", version, about = "VQE search vs. Grover search on ideal and noisy simulators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one VQE search trial.
    VqeRun(Common),
    /// Run one Grover search trial.
    GroverRun(Common),
    /// Success probability over n, modes and backends.
    Sweep(Common),
    /// Success probability versus evaluations, in units of ⌊√N⌋.
    Curve(Common),
    /// Circuit depth table for the ansatz and Grover.
    DepthReport(Common),
}

#[derive(Args, Debug, Default)]
struct Common {
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Qubit count; sweep and depth-report also take lists (3,5,7) and ranges (2-12).
    #[arg(long)]
    n: Option<String>,
    /// Explicit target bit string, qubit 0 first.
    #[arg(long)]
    target: Option<String>,
    #[arg(long, value_name = "ideal|noisy")]
    backend: Option<String>,
    /// Backends for sweep.
    #[arg(long, value_name = "LIST")]
    backends: Option<String>,
    /// Modes for sweep.
    #[arg(long, value_name = "LIST")]
    modes: Option<String>,
    #[arg(long, value_name = "spsa|one-eval")]
    optimizer: Option<String>,
    #[arg(long, value_name = "simulation|hardware")]
    profile: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    /// Trial index for single runs.
    #[arg(long)]
    trial: Option<String>,
    #[arg(long)]
    shots_eval: Option<String>,
    #[arg(long)]
    shots_final: Option<String>,
    #[arg(long)]
    p1: Option<String>,
    #[arg(long)]
    p2: Option<String>,
    #[arg(long)]
    p_ro: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Override the iteration budget.
    #[arg(long)]
    iterations: Option<String>,
    /// Optimize the exact expectation instead of a shot estimate (ideal only).
    #[arg(long)]
    exact: bool,
    /// Curve checkpoints in units of ⌊√N⌋ evaluations.
    #[arg(long, value_name = "LIST")]
    checkpoints: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
}

impl Common {
    fn settings(&self) -> Result<Settings, Error> {
        let mut s = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs = [
            ("n", &self.n),
            ("target", &self.target),
            ("backend", &self.backend),
            ("backends", &self.backends),
            ("modes", &self.modes),
            ("optimizer", &self.optimizer),
            ("profile", &self.profile),
            ("trials", &self.trials),
            ("trial", &self.trial),
            ("shots-eval", &self.shots_eval),
            ("shots-final", &self.shots_final),
            ("p1", &self.p1),
            ("p2", &self.p2),
            ("p-ro", &self.p_ro),
            ("seed", &self.seed),
            ("iterations", &self.iterations),
            ("checkpoints", &self.checkpoints),
            ("format", &self.format),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                flags.set(k, v.clone())?;
            }
        }
        if self.exact {
            flags.set("exact", "true")?;
        }
        if let Some(p) = &self.out {
            flags.set("out", p.to_string_lossy())?;
        }
        s.merge(&flags);
        Ok(s)
    }
}

fn output(settings: &Settings) -> Result<Box<dyn Write>, Error> {
    Ok(match settings.out() {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn summary_line(r: &RunRecord) -> String {
    let mut line = format!(
        "{} n={} backend={} target={} success={:.4} depth={}",
        r.config.mode, r.config.n, r.config.backend, r.target, r.success_probability, r.depth.logical
    );
    if let Some(e) = r.best_expectation {
        line += &format!(" nfev={} best<H>={e:.4}", r.nfev_total);
    }
    line
}

fn single_run(settings: &Settings, mode: Mode) -> Result<(), Error> {
    let trial = settings.trial()?;
    let config = settings.experiment(mode, trial + 1)?;
    config.validate()?;
    let record = run_trial(&config, trial)?;
    eprintln!("{}", summary_line(&record));
    let mut out = output(settings)?;
    match settings.format()? {
        Format::Json => serde_json::to_writer_pretty(&mut out, &record)?,
        Format::Csv if mode == Mode::Vqe => write_csv(&record.trace_points(), &mut out)?,
        Format::Csv => write_csv(&[record.sweep_row()], &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::VqeRun(c) => single_run(&c.settings()?, Mode::Vqe),
        Command::GroverRun(c) => single_run(&c.settings()?, Mode::Grover),
        Command::Sweep(c) => {
            let s = c.settings()?;
            let ns = s.n_list()?;
            let mut base_settings = s.clone();
            base_settings.set("n", ns[0].to_string())?;
            let spec = SweepSpec {
                ns,
                modes: s.modes()?,
                backends: s.backends()?,
                base: base_settings.experiment(Mode::Vqe, 10)?,
            };
            let rows = sweep(&spec)?;
            for summary in summarize(&rows) {
                eprintln!(
                    "n={:<2} {:<6} {:<5} median={:.4} mean={:.4} (trials={})",
                    summary.n,
                    summary.mode,
                    summary.backend,
                    summary.median_success,
                    summary.mean_success,
                    summary.trials
                );
            }
            let mut out = output(&s)?;
            match s.format()? {
                Format::Csv => write_csv(&rows, &mut out)?,
                Format::Json => serde_json::to_writer_pretty(&mut out, &rows)?,
            }
            out.flush()?;
            Ok(())
        }
        Command::Curve(c) => {
            let s = c.settings()?;
            let config = s.experiment(Mode::Vqe, 10)?;
            let checkpoints = s
                .checkpoints()?
                .unwrap_or_else(|| (0..=40).map(|k| k as f64 * 0.5).collect());
            let rows = success_vs_nfev(&config, &checkpoints)?;
            let mut out = output(&s)?;
            match s.format()? {
                Format::Csv => write_csv(&rows, &mut out)?,
                Format::Json => serde_json::to_writer_pretty(&mut out, &rows)?,
            }
            out.flush()?;
            Ok(())
        }
        Command::DepthReport(c) => {
            let mut s = c.settings()?;
            if s.get("n").is_none() {
                s.set("n", "1-14")?;
            }
            let rows = depth_report(&s.n_list()?)?;
            let mut out = output(&s)?;
            match s.format()? {
                Format::Csv => write_csv(&rows, &mut out)?,
                Format::Json => serde_json::to_writer_pretty(&mut out, &rows)?,
            }
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidArgument(_) | Error::InvalidTarget(_) => 2,
                Error::ResourceLimit(_) => 3,
                _ => 1,
            })
        }
    }
}
