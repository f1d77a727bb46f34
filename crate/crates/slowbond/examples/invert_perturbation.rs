//! The elliptic inverse problem: drive the system with a known field H₀,
//! then reconstruct the perturbation from the density path alone and compare.
//!
//!     cargo run --release --example invert_perturbation

use slowbond::field::PerturbationField;
use slowbond::harness::invert_round_trip;
use slowbond::inverse::{build_h, coefficients, solve_root};
use slowbond::pde::{cfl_limit, solve_perturbed};
use slowbond::profile::DensityProfile;
use slowbond::{DensityField, FieldSpec};

fn main() -> slowbond::Result<()> {
    let gamma = DensityProfile::CosineStep {
        left: 0.7,
        right: 0.3,
        center: 0.5,
        width: 0.3,
    };
    let h0 = FieldSpec::linear_u(0.8);
    let (m, t_end) = (512, 0.25);

    let init = DensityField::from_profile(&gamma, m);
    let path = solve_perturbed(&init, &h0, t_end, cfl_limit(m), 128)?.path;

    let ti = path.times.len() / 2;
    let c = coefficients(&path, ti, 1e-9)?;
    let root = solve_root(&c);
    println!(
        "t = {:.3}: alpha = {:.4}, A = {:+.4}, B = {:.4}, C = {:.4}",
        path.times[ti], c.alpha, c.a, c.b, c.c
    );
    println!(
        "transcendental root z0 = {:+.6} (residual {:.1e}, {} iterations)",
        root.z0, root.residual, root.iterations
    );

    let built = build_h(&path, 1e-9)?;
    println!(
        "jump recovered at mid-time: {:+.4} (driving field: {:+.4})",
        built.jump(path.times[ti]),
        h0.jump(path.times[ti])
    );

    let q = invert_round_trip(&gamma, &h0, t_end, m, 128)?;
    println!(
        "relative L2 errors: gradient {:.2}%, jump {:.2}%",
        100.0 * q.grad_rel_l2,
        100.0 * q.jump_rel_l2
    );
    Ok(())
}
