use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use slipgrip::harness::{
    compute_report, read_trace_dir, run_sweep, simulate, write_plot, write_processed, write_run, write_sweep,
    ProcessConfig, RunReport, ScenarioConfig, SweepConfig,
};

#[derive(Parser)]
#[command(name = "slipgrip", version, about = "Slip-aware grasp control for a cable-driven hand")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Where outputs go (default: ./out/<command>).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Sample rate in Hz: overrides the scenario rate, or is checked
    /// against the recording.
    #[arg(long, global = true)]
    fs: Option<f64>,
    /// Also write a PNG of power, duty and bend.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run a closed-loop scenario.
    Simulate { config: PathBuf },
    /// Filter a recorded raw PVDF trace and detect slip events.
    Process {
        csv: PathBuf,
        /// TOML with [signal] and [detector] sections.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Cable elasticity sweep.
    Sweep { config: PathBuf },
    /// Recompute a run's report from its trace files.
    Report { trace_dir: PathBuf },
}

fn print_report(r: &RunReport) {
    println!(
        "{}: {} samples, {} slip events ({} false), {} duty steps, max duty {:.3}, max slip {:.3} mm",
        r.scenario,
        r.samples,
        r.slip_events.len(),
        r.false_events,
        r.duty_step_count,
        r.max_duty,
        r.max_slip_mm
    );
    if let Some(b) = r.final_bend_deg {
        println!("final bend {b:.2} deg");
    }
    if let Some(f) = &r.fault {
        println!("FAULT {f}");
    }
    for c in &r.checks {
        println!("{} {}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
    }
}

fn out_dir(cli: &Cli, default: &str) -> PathBuf {
    cli.out_dir.clone().unwrap_or_else(|| Path::new("out").join(default))
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Simulate { config } => {
            let mut cfg = ScenarioConfig::load(config)?;
            if let Some(seed) = cli.seed {
                cfg.scenario.seed = seed;
            }
            if let Some(fs) = cli.fs {
                cfg.scenario.sample_rate = fs;
            }
            cfg.validate()?;
            let dir = out_dir(cli, &cfg.scenario.name);
            let run = simulate(&cfg)?;
            let report = write_run(&cfg, &run, &dir)?;
            if cli.plot {
                write_plot(&run.columns, &dir.join("plot.png"))?;
            }
            print_report(&report);
            println!("wrote {}", dir.display());
            Ok(report.passed)
        }
        Command::Process { csv, config } => {
            let mut cfg = match config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    ProcessConfig::from_toml(&text)?
                }
                None => ProcessConfig::default(),
            };
            if cli.fs.is_some() {
                cfg.sample_rate = cli.fs;
            }
            let dir = out_dir(cli, "process");
            let out = write_processed(csv, &cfg, &dir)?;
            println!("{} slip events", out.events.len());
            for e in &out.events {
                println!("  {:.3} .. {:.3} s, peak {:.2} V^2", e.onset, e.end, e.peak_power);
            }
            println!("wrote {}", dir.display());
            Ok(true)
        }
        Command::Sweep { config } => {
            let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
            let cfg = SweepConfig::from_toml(&text)?;
            let dir = out_dir(cli, "sweep");
            let out = run_sweep(&cfg)?;
            write_sweep(&cfg, &out, &dir)?;
            println!("{:>10} {:>10} {:>10}", "E", "travel_mm", "bend_deg");
            for r in &out.rows {
                let flag = if r.converged { "" } else { "  (not settled)" };
                println!("{:>10.1} {:>10.3} {:>10.2}{flag}", r.youngs_modulus, r.slider_travel, r.index_bend);
            }
            let s = &out.summary;
            match s.band {
                Some([lo, hi]) => println!("travel band maps to E in [{lo:.0}, {hi:.0}] N/mm^2"),
                None => println!("travel band not crossed"),
            }
            if s.degenerate {
                println!("no grid point inside the travel band");
            }
            for c in &s.checks {
                println!("{} {}: {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value, c.limit);
            }
            println!("wrote {}", dir.display());
            Ok(s.passed)
        }
        Command::Report { trace_dir } => {
            let (cfg, cols, fault) = read_trace_dir(trace_dir)?;
            let report = compute_report(&cfg.scenario.name, &cols, &cfg.checks, fault);
            let stored = trace_dir.join("report.json");
            if stored.exists() {
                let text = std::fs::read_to_string(&stored)?;
                let saved: RunReport = serde_json::from_str(&text).context("parsing report.json")?;
                if saved != report {
                    bail!("{} does not match the traces", stored.display());
                }
                println!("report.json matches the traces");
            }
            print_report(&report);
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
