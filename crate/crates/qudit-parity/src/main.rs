use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qudit_parity::commands;
use qudit_parity::config::{DelayGrid, Format, NoisePreset, RunConfig, SettingsChoice};
use qudit_parity::formats::{read_json, NoiseJson};

/// Seeded simulations of one-query qudit parity determination and its
/// two-photon realization.
#[derive(Parser, Debug)]
#[command(name = "qudit-parity", version)]
struct Cli {
    /// Random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (standard output if omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct NoiseArgs {
    /// Noise starting point.
    #[arg(long, value_enum)]
    noise: Option<NoisePreset>,
    /// JSON file {beta, mz_dephasing, readout_flip}, overriding the preset.
    #[arg(long)]
    noise_file: Option<PathBuf>,
    /// Wavepacket overlap.
    #[arg(long)]
    beta: Option<f64>,
    /// Interferometer arm coherence.
    #[arg(long)]
    mz_dephasing: Option<f64>,
    /// Per-photon readout flip probability.
    #[arg(long)]
    readout_flip: Option<f64>,
}

impl NoiseArgs {
    fn apply(&self, cfg: &mut RunConfig) -> anyhow::Result<()> {
        cfg.noise_preset = self.noise;
        let mut n = NoiseJson::default();
        if let Some(path) = &self.noise_file {
            n = read_json(path)?;
        }
        cfg.noise = n.merged_under(NoiseJson {
            beta: self.beta,
            mz_dephasing: self.mz_dephasing,
            readout_flip: self.readout_flip,
        });
        Ok(())
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the algorithm on one permutation (ideal unless noise is given).
    Run {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        /// `+` or `-`.
        #[arg(long, allow_hyphen_values = true)]
        sign: Option<String>,
        /// Post-selected events (photonic model).
        #[arg(long)]
        shots: Option<u64>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// All eight four-level permutations on the photonic model, or every
    /// permutation of a dimension range with --dims.
    Sweep {
        /// Inclusive range, e.g. 3-12.
        #[arg(long, value_parser = parse_range)]
        dims: Option<[usize; 2]>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        shots: Option<u64>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// HOM coincidence against relative delay.
    Hom {
        /// start:stop:step
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        delays: Option<DelayGrid>,
        #[arg(long)]
        beta0: Option<f64>,
        #[arg(long)]
        tau_c: Option<f64>,
    },
    /// Exhaustive classical one-query certificate.
    LowerBound {
        #[arg(long)]
        d: Option<usize>,
    },
    /// Tomography of the CNOT output, from a counts file or simulated.
    Tomo {
        /// Counts file.
        #[arg(long)]
        counts: Option<PathBuf>,
        /// Simulate counts from the noisy CNOT.
        #[arg(long)]
        simulate: bool,
        #[arg(long)]
        shots_per_setting: Option<u64>,
        #[arg(long, value_enum)]
        settings: Option<SettingsChoice>,
        /// Also write the simulated counts here.
        #[arg(long)]
        emit_counts: Option<PathBuf>,
        #[arg(long)]
        mle_tolerance: Option<f64>,
        #[arg(long)]
        mle_max_iterations: Option<usize>,
        #[command(flatten)]
        noise: NoiseArgs,
    },
    /// Post-selected map of the submodule at any plate angle, or the
    /// transform of a network file.
    Explore {
        #[arg(long)]
        theta_deg: Option<f64>,
        #[arg(long)]
        network: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['-', ':']).ok_or("expected LOW-HIGH")?;
    let lo = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok([lo, hi])
}

fn parse_grid(s: &str) -> Result<DelayGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts[..] else {
        return Err("expected start:stop:step".into());
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{e}"));
    Ok(DelayGrid { start: num(a)?, stop: num(b)?, step: num(c)? })
}

fn flags(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = RunConfig {
        seed: cli.seed,
        out: cli.out.clone(),
        format: cli.format,
        ..Default::default()
    };
    match &cli.command {
        Command::Run { d, m, sign, shots, noise } => {
            (cfg.d, cfg.m, cfg.sign, cfg.shots) = (*d, *m, sign.clone(), *shots);
            noise.apply(&mut cfg)?;
        }
        Command::Sweep { dims, d, shots, noise } => {
            (cfg.dims, cfg.d, cfg.shots) = (*dims, *d, *shots);
            noise.apply(&mut cfg)?;
        }
        Command::Hom { delays, beta0, tau_c } => {
            (cfg.delays, cfg.beta0, cfg.tau_c) = (*delays, *beta0, *tau_c);
        }
        Command::LowerBound { d } => cfg.d = *d,
        Command::Tomo {
            counts,
            simulate,
            shots_per_setting,
            settings,
            emit_counts,
            mle_tolerance,
            mle_max_iterations,
            noise,
        } => {
            cfg.counts_file = counts.clone();
            cfg.simulate = simulate.then_some(true);
            cfg.shots_per_setting = *shots_per_setting;
            cfg.settings = *settings;
            cfg.emit_counts = emit_counts.clone();
            cfg.mle_tolerance = *mle_tolerance;
            cfg.mle_max_iterations = *mle_max_iterations;
            noise.apply(&mut cfg)?;
        }
        Command::Explore { theta_deg, network } => {
            (cfg.theta_deg, cfg.network_file) = (*theta_deg, network.clone());
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let top = flags(&cli)?;
    let base = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.overlaid_by(top);
    cfg.seed.get_or_insert(0);
    let artifact = match cli.command {
        Command::Run { .. } => commands::cmd_run(&mut cfg),
        Command::Sweep { .. } => commands::cmd_sweep(&mut cfg),
        Command::Hom { .. } => commands::cmd_hom(&mut cfg),
        Command::LowerBound { .. } => commands::cmd_lower_bound(&mut cfg),
        Command::Tomo { .. } => commands::cmd_tomo(&mut cfg),
        Command::Explore { .. } => commands::cmd_explore(&mut cfg),
    }?;
    match &cfg.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            artifact.write_to(&cfg, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            artifact.write_to(&cfg, &mut lock)?;
        }
    }
    Ok(())
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away, e.g. piped into `head`
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
