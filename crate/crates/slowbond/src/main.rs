//! Thin command-line front end; all substance lives in the library.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use slowbond::harness::{self, ExperimentConfig};
use slowbond::lattice::{initial_from_profile, simulate, DynamicsSpec};
use slowbond::pde::{solve_perturbed, solve_symmetric};
use slowbond::rate::{j_hat, rate_closed_form};
use slowbond::{build_h, DensityField, Result};

#[derive(Parser)]
#[command(name = "slowbond", about = "Exclusion process with a slow bond: simulation and numerics lab", version)]
struct Cli {
    /// Worker threads (falls back to SLOWBOND_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Override the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trajectory and export CSV + packed binary snapshots.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the hydrodynamic equation and export (t,u,ρ) CSV.
    Pde {
        #[arg(long)]
        config: PathBuf,
    },
    /// Evaluate Ĵ_H and the closed-form rate breakdown on the solved path.
    Rate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Reconstruct the driving field from the solved path; export its grid.
    Invert {
        #[arg(long)]
        config: PathBuf,
    },
    /// Estimate the specific relative entropy across lattice sizes.
    Entropy {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configured verification protocol and write a report.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a JSON array of configs; reports land in per-run directories.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config: ExperimentConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
    if let Some(s) = seed {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| {
            std::env::var("SLOWBOND_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0);
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .ok();
    }
    match dispatch(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool> {
    match &cli.command {
        Command::Simulate { config } => {
            let c = load_config(config, cli.seed)?;
            let n = c.lattice_sizes[0];
            let spec = if c.field.is_zero() {
                DynamicsSpec::symmetric(n, c.t_end, c.seed)
            } else {
                DynamicsSpec::weakly_asymmetric(n, c.field.clone(), c.t_end, c.seed)
            };
            let init = initial_from_profile(&c.gamma, n)?;
            let observe: Vec<f64> = (0..=8).map(|i| c.t_end * i as f64 / 8.0).collect();
            let traj = simulate(&spec, &init, &observe)?;
            let dir = out_dir(&cli.out);
            fs::create_dir_all(&dir)?;
            let mut csv = Vec::new();
            traj.write_csv(&mut csv)?;
            fs::write(dir.join("trajectory.csv"), csv)?;
            let mut bin = Vec::new();
            traj.write_binary(&mut bin)?;
            fs::write(dir.join("trajectory.bin"), bin)?;
            println!(
                "simulated N={} T={} events={} -> {}",
                n,
                c.t_end,
                traj.events.len(),
                dir.display()
            );
            Ok(true)
        }
        Command::Pde { config } => {
            let c = load_config(config, cli.seed)?;
            let initial = DensityField::from_profile(&c.gamma, c.grid_m);
            let sol = if c.field.is_zero() {
                solve_symmetric(&initial, c.t_end, c.dt_or_default(), c.snapshots)?
            } else {
                solve_perturbed(&initial, &c.field, c.t_end, c.dt_or_default(), c.snapshots)?
            };
            let dir = out_dir(&cli.out);
            fs::create_dir_all(&dir)?;
            let mut csv = Vec::new();
            sol.path.write_csv(&mut csv)?;
            fs::write(dir.join("pde.csv"), csv)?;
            println!(
                "solved m={} to T={}; mass drift {:e} -> {}",
                c.grid_m,
                c.t_end,
                (sol.path.terminal().mass() - sol.path.initial().mass()).abs(),
                dir.display()
            );
            Ok(true)
        }
        Command::Rate { config } => {
            let c = load_config(config, cli.seed)?;
            let initial = DensityField::from_profile(&c.gamma, c.grid_m);
            let sol = solve_perturbed(&initial, &c.field, c.t_end, c.dt_or_default(), c.snapshots)?;
            let breakdown = rate_closed_form(&sol.path, &c.field);
            let j = j_hat(&sol.path, &c.field);
            let dir = out_dir(&cli.out);
            fs::create_dir_all(&dir)?;
            fs::write(
                dir.join("rate_breakdown.json"),
                serde_json::to_string_pretty(&breakdown)?,
            )?;
            println!(
                "J_hat = {j:.8}, closed form = {:.8} (grad {:.3e}, plus {:.3e}, minus {:.3e})",
                breakdown.total, breakdown.grad_term, breakdown.plus_term, breakdown.minus_term
            );
            Ok(true)
        }
        Command::Invert { config } => {
            let c = load_config(config, cli.seed)?;
            let initial = DensityField::from_profile(&c.gamma, c.grid_m);
            let sol = solve_perturbed(&initial, &c.field, c.t_end, c.dt_or_default(), c.snapshots)?;
            let built = build_h(&sol.path, 1e-9)?;
            let dir = out_dir(&cli.out);
            fs::create_dir_all(&dir)?;
            let mut csv = Vec::new();
            built.write_csv(&mut csv)?;
            fs::write(dir.join("built_field.csv"), csv)?;
            println!("reconstructed field on {} time slices -> {}", built.times().len(), dir.display());
            Ok(true)
        }
        Command::Entropy { config } => {
            let c = load_config(config, cli.seed)?;
            let (estimates, rate) = harness::entropy_trend(
                &c.gamma,
                &c.field,
                &c.lattice_sizes,
                c.replicas,
                c.t_end,
                c.grid_m,
                c.seed,
            )?;
            let dir = out_dir(&cli.out);
            fs::create_dir_all(&dir)?;
            fs::write(
                dir.join("entropy.json"),
                serde_json::to_string_pretty(&serde_json::json!({
                    "rate": rate,
                    "estimates": estimates,
                }))?,
            )?;
            for e in &estimates {
                println!(
                    "N={:4}  (1/N)H = {:.6} ± {:.6}   I(rho^H) = {rate:.6}",
                    e.n, e.mean_per_site, e.std_error
                );
            }
            Ok(true)
        }
        Command::Verify { config } => {
            let c = load_config(config, cli.seed)?;
            let report = harness::run(&c, Some(&out_dir(&cli.out)))?;
            for check in &report.checks {
                println!(
                    "{} {}: value {:.6e}, tolerance {:.6e}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.value,
                    check.tolerance
                );
            }
            Ok(report.all_pass())
        }
        Command::Sweep { config } => {
            let configs: Vec<ExperimentConfig> =
                serde_json::from_str(&fs::read_to_string(config)?)?;
            let reports = harness::sweep(&configs, Some(&out_dir(&cli.out)))?;
            let mut all = true;
            for (i, r) in reports.iter().enumerate() {
                let pass = r.all_pass();
                all &= pass;
                println!("run {i}: {}", if pass { "PASS" } else { "FAIL" });
            }
            Ok(all)
        }
    }
}
