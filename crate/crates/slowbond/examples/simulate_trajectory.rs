//! Simulate one symmetric and one weakly asymmetric trajectory, print event
//! statistics, and export snapshots as CSV and packed binary.
//!
//!     cargo run --release --example simulate_trajectory

use slowbond::field::FieldSpec;
use slowbond::lattice::{initial_from_profile, simulate, DynamicsSpec};
use slowbond::profile::DensityProfile;

fn main() -> slowbond::Result<()> {
    let n = 256;
    let t_end = 0.1;
    let gamma = DensityProfile::CosineStep {
        left: 0.8,
        right: 0.2,
        center: 0.5,
        width: 0.2,
    };
    let init = initial_from_profile(&gamma, n)?;
    let observe: Vec<f64> = (0..=4).map(|i| t_end * i as f64 / 4.0).collect();

    let sym = DynamicsSpec::symmetric(n, t_end, 7);
    let traj = simulate(&sym, &init, &observe)?;
    println!(
        "symmetric:        {:6} events, {:2} through the slow bond, {} particles conserved",
        traj.events.len(),
        traj.slow_bond_events(),
        init.particles()
    );

    // drift toward the cut from the left; jump of H across the bond is -1
    let asym = DynamicsSpec::weakly_asymmetric(n, FieldSpec::linear_u(1.0), t_end, 7);
    let traj_h = simulate(&asym, &init, &observe)?;
    println!(
        "weakly asymmetric: {:6} events, {:2} through the slow bond",
        traj_h.events.len(),
        traj_h.slow_bond_events()
    );

    let dir = std::path::Path::new("out/simulate");
    std::fs::create_dir_all(dir)?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    std::fs::write(dir.join("trajectory.csv"), csv)?;
    let mut bin = Vec::new();
    traj.write_binary(&mut bin)?;
    std::fs::write(dir.join("trajectory.bin"), bin)?;
    println!("snapshots written to {}", dir.display());
    Ok(())
}
