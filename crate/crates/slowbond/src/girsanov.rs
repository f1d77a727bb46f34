//! Log Radon–Nikodym derivative of the weakly asymmetric law with respect to
//! the symmetric law along a simulated trajectory, and Monte Carlo estimation
//! of the specific relative entropy.
//!
//! Along a path η_· on [0,T] the log-likelihood ratio is
//!
//!   log dP^H/dP = N[⟨π_T,H_T⟩ − ⟨π_0,H_0⟩] − N∫⟨π_t,∂_tH_t⟩dt
//!      − N²∫ Σ_x ξ_x { η(x)(1−η(x+1))(e^{δ_N H_x}−1)
//!                      + η(x+1)(1−η(x))(e^{−δ_N H_x}−1) } dt.
//!
//! Between events the configuration is frozen, so the time integral splits
//! into per-site occupied intervals where ∫∂_tH dt telescopes to exact
//! differences of H, and the compensators split into per-bond constant-state
//! segments integrated by composite two-point Gauss quadrature (exactly, when
//! H does not depend on time). The accumulator is deterministic given the
//! trajectory.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::PerturbationField;
use crate::lattice::{simulate_replica, BondRates, Configuration, DynamicsSpec, Mode, Trajectory};
use crate::{Error, Result};

/// The additive pieces of log dP^H/dP; total = boundary − time integral −
/// compensators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GirsanovAccumulator {
    /// N[⟨π_T,H_T⟩ − ⟨π_0,H_0⟩]
    pub boundary_term: f64,
    /// N∫⟨π_t,∂_tH_t⟩dt (identically 0 for time-independent H)
    pub time_integral: f64,
    /// N²∫Σ_x ξ_x[…(e^{±δ_N H_x}−1)]dt, all bonds
    pub jump_compensators: f64,
    /// The slow bond's share of `jump_compensators`.
    pub slow_bond_compensator: f64,
    pub total: f64,
}

const GAUSS_NODE: f64 = 0.288_675_134_594_812_9; // 1/(2√3)

/// ∫_a^b f dt by composite 2-point Gauss with chunks no longer than `max_len`.
fn gauss_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, max_len: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let chunks = ((b - a) / max_len).ceil().max(1.0) as usize;
    let len = (b - a) / chunks as f64;
    let mut acc = 0.0;
    for i in 0..chunks {
        let mid = a + (i as f64 + 0.5) * len;
        acc += 0.5 * (f(mid - GAUSS_NODE * len) + f(mid + GAUSS_NODE * len)) * len;
    }
    acc
}

/// Exact log dP^H/dP along a trajectory (simulated under either law).
pub fn log_rn(traj: &Trajectory, h: &dyn PerturbationField) -> GirsanovAccumulator {
    let n = traj.spec.n;
    let t_end = traj.spec.horizon;
    let rates = BondRates::new(n);
    let speed = (n * n) as f64;
    let u_of = |x: usize| (x % n) as f64 / n as f64;
    let time_dep = h.time_dependent();
    let chunk = t_end / 256.0;

    let mut cfg = traj.initial.clone();

    // boundary: initial part
    let mut boundary = 0.0;
    for x in 0..n {
        if cfg.occ(x) {
            boundary -= h.h(0.0, u_of(x));
        }
    }

    // per-site occupied-interval starts (time integral telescoping)
    let mut occupied_since = vec![0.0f64; n];
    let mut time_integral = 0.0;

    // per-bond constant-state segments
    let bond_state = |c: &Configuration, x: usize| -> i8 {
        let (a, b) = (c.occ(x), c.occ((x + 1) % n));
        match (a, b) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    };
    let mut seg_start = vec![0.0f64; n];
    let mut seg_state: Vec<i8> = (0..n).map(|x| bond_state(&cfg, x)).collect();
    let mut compensators = 0.0;
    let mut slow_comp = 0.0;

    let close_segment = |x: usize, state: i8, a: f64, b: f64, acc: &mut f64, slow: &mut f64| {
        if state == 0 || b <= a {
            return;
        }
        let s = state as f64;
        let (u1, u2) = (u_of(x), u_of(x + 1));
        let weight = speed * rates.xi(x);
        let value = if time_dep {
            weight * gauss_integrate(|t| (s * (h.h(t, u2) - h.h(t, u1))).exp() - 1.0, a, b, chunk)
        } else {
            let d = s * (h.h(0.0, u2) - h.h(0.0, u1));
            weight * (b - a) * (d.exp() - 1.0)
        };
        *acc += value;
        if x == n - 1 {
            *slow += value;
        }
    };

    for &(t, bond) in &traj.events {
        // the two flipped sites: occupied intervals open/close
        if time_dep {
            for x in [bond, (bond + 1) % n] {
                if cfg.occ(x) {
                    time_integral += h.h(t, u_of(x)) - h.h(occupied_since[x], u_of(x));
                } else {
                    occupied_since[x] = t;
                }
            }
        }
        // bonds whose state may change
        for b in [(bond + n - 1) % n, bond, (bond + 1) % n] {
            close_segment(b, seg_state[b], seg_start[b], t, &mut compensators, &mut slow_comp);
            seg_start[b] = t;
        }
        cfg.exchange_in_place(bond);
        for b in [(bond + n - 1) % n, bond, (bond + 1) % n] {
            seg_state[b] = bond_state(&cfg, b);
        }
    }

    // close everything at the horizon
    if time_dep {
        for x in 0..n {
            if cfg.occ(x) {
                time_integral += h.h(t_end, u_of(x)) - h.h(occupied_since[x], u_of(x));
            }
        }
    }
    for x in 0..n {
        close_segment(x, seg_state[x], seg_start[x], t_end, &mut compensators, &mut slow_comp);
    }

    for x in 0..n {
        if cfg.occ(x) {
            boundary += h.h(t_end, u_of(x));
        }
    }

    GirsanovAccumulator {
        boundary_term: boundary,
        time_integral,
        jump_compensators: compensators,
        slow_bond_compensator: slow_comp,
        total: boundary - time_integral - compensators,
    }
}

/// log dP/dP^H along the same path: the pathwise negation of [`log_rn`].
pub fn log_rn_reverse(traj: &Trajectory, h: &dyn PerturbationField) -> f64 {
    -log_rn(traj, h).total
}

/// Independent estimator of the relative entropy along one trajectory: for
/// jump processes H(P^H|P) = E^H ∫ Σ_jumps {λ^H log(λ^H/λ) − λ^H + λ} dt,
/// which for tilted exchange rates collapses to
/// N²∫Σ_x ξ_x[η(x)(1−η(x+1))Γ(δ_N H_x) + η(x+1)(1−η(x))Γ(−δ_N H_x)]dt with
/// Γ(y) = 1 − e^y + y·e^y. Same mean as [`log_rn`] under the perturbed law,
/// very different variance; used as a cross-check oracle.
pub fn entropy_rate_oracle(traj: &Trajectory, h: &dyn PerturbationField) -> f64 {
    let n = traj.spec.n;
    let t_end = traj.spec.horizon;
    let rates = BondRates::new(n);
    let speed = (n * n) as f64;
    let u_of = |x: usize| (x % n) as f64 / n as f64;
    let time_dep = h.time_dependent();
    let chunk = t_end / 256.0;
    let gamma_fn = |y: f64| 1.0 - y.exp() + y * y.exp();

    let mut cfg = traj.initial.clone();
    let bond_state = |c: &Configuration, x: usize| -> i8 {
        match (c.occ(x), c.occ((x + 1) % n)) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    };
    let mut seg_start = vec![0.0f64; n];
    let mut seg_state: Vec<i8> = (0..n).map(|x| bond_state(&cfg, x)).collect();
    let mut acc = 0.0;

    let close = |x: usize, state: i8, a: f64, b: f64, acc: &mut f64| {
        if state == 0 || b <= a {
            return;
        }
        let s = state as f64;
        let (u1, u2) = (u_of(x), u_of(x + 1));
        let weight = speed * rates.xi(x);
        *acc += if time_dep {
            weight * gauss_integrate(|t| gamma_fn(s * (h.h(t, u2) - h.h(t, u1))), a, b, chunk)
        } else {
            weight * (b - a) * gamma_fn(s * (h.h(0.0, u2) - h.h(0.0, u1)))
        };
    };

    for &(t, bond) in &traj.events {
        for b in [(bond + n - 1) % n, bond, (bond + 1) % n] {
            close(b, seg_state[b], seg_start[b], t, &mut acc);
            seg_start[b] = t;
        }
        cfg.exchange_in_place(bond);
        for b in [(bond + n - 1) % n, bond, (bond + 1) % n] {
            seg_state[b] = bond_state(&cfg, b);
        }
    }
    for x in 0..n {
        close(x, seg_state[x], seg_start[x], t_end, &mut acc);
    }
    acc
}

/// Envelope constant C(H,T) with |log dP^H/dP| ≤ C(H,T)·N for every path,
/// assembled from the sup norms of H (Taylor remainders bounded crudely but
/// rigorously, uniformly in N).
pub fn envelope_constant(h: &dyn PerturbationField, t_end: f64) -> f64 {
    let s = h.sup_norms(t_end);
    let regular = 2.0 * s.du + s.d2u + 0.5 * s.du * s.du * s.du.exp();
    let slow = 2.0 * ((s.jump + s.du).exp() - 1.0);
    2.0 * s.h + t_end * (s.dt + regular + slow)
}

/// Monte Carlo estimate of the specific relative entropy
/// (1/N)·H(P^H|P) = (1/N)·E^H[log dP^H/dP].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub n: usize,
    pub replicas: usize,
    pub mean_per_site: f64,
    pub std_error: f64,
}

/// Simulates `replicas` independent trajectories under the perturbed law of
/// `spec` and averages log dP^H/dP over them.
pub fn estimate_entropy(
    spec: &DynamicsSpec,
    initial: &Configuration,
    replicas: usize,
) -> Result<EntropyEstimate> {
    spec.validate()?;
    if spec.mode != Mode::WeaklyAsymmetric {
        return Err(Error::InvalidSpec(
            "entropy estimation runs under the weakly asymmetric law".into(),
        ));
    }
    if replicas == 0 {
        return Err(Error::InvalidSpec("need at least one replica".into()));
    }
    let field = spec.perturbation.clone().unwrap();
    let samples: Vec<f64> = (0..replicas as u64)
        .into_par_iter()
        .map(|r| {
            let traj = simulate_replica(spec, initial, &[], r)?;
            Ok(log_rn(&traj, &field).total / spec.n as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = samples.iter().sum::<f64>() / replicas as f64;
    let var = if replicas > 1 {
        samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (replicas - 1) as f64
    } else {
        0.0
    };
    Ok(EntropyEstimate {
        n: spec.n,
        replicas,
        mean_per_site: mean,
        std_error: (var / replicas as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, SpaceShape, TimeShape, ZeroField};
    use crate::lattice::simulate;
    use crate::profile::DensityProfile;
    use approx::assert_abs_diff_eq;

    fn sine_time_field() -> FieldSpec {
        FieldSpec {
            space: SpaceShape::Sine {
                amplitude: 0.4,
                mode: 1,
            },
            time: TimeShape::Cosine {
                omega: 5.0,
                phase: 0.3,
            },
        }
    }

    #[test]
    fn zero_field_gives_zero_log_rn() {
        let spec = DynamicsSpec::symmetric(24, 0.05, 3);
        let init =
            crate::lattice::initial_from_profile(&DensityProfile::Constant { value: 0.5 }, 24)
                .unwrap();
        let traj = simulate(&spec, &init, &[]).unwrap();
        let acc = log_rn(&traj, &ZeroField);
        assert_eq!(acc.total, 0.0);
        assert_eq!(acc.jump_compensators, 0.0);
    }

    #[test]
    fn frozen_full_lattice_cancels_exactly() {
        // all-ones: no active bonds, compensators vanish, and the boundary
        // term cancels the time integral by the fundamental theorem of
        // calculus — exactly, because the time integral telescopes.
        let spec = DynamicsSpec::symmetric(16, 0.1, 1);
        let init = Configuration::full(16);
        let traj = simulate(&spec, &init, &[]).unwrap();
        assert!(traj.events.is_empty());
        let field = sine_time_field();
        let acc = log_rn(&traj, &field);
        assert_eq!(acc.jump_compensators, 0.0);
        assert_abs_diff_eq!(acc.boundary_term, acc.time_integral, epsilon = 1e-12);
        assert_abs_diff_eq!(acc.total, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn accumulator_internally_consistent_and_antisymmetric() {
        let field = FieldSpec::linear_u(0.5);
        let spec = DynamicsSpec::weakly_asymmetric(16, field.clone(), 0.05, 7);
        let init =
            crate::lattice::initial_from_profile(&DensityProfile::Constant { value: 0.5 }, 16)
                .unwrap();
        let traj = simulate(&spec, &init, &[]).unwrap();
        let acc = log_rn(&traj, &field);
        assert_abs_diff_eq!(
            acc.total,
            acc.boundary_term - acc.time_integral - acc.jump_compensators,
            epsilon = 1e-12
        );
        // law swap at fixed H negates the accumulator pathwise
        assert_eq!(log_rn_reverse(&traj, &field), -acc.total);
        assert!(acc.total.is_finite());
    }

    #[test]
    fn slow_bond_term_isolated_by_interior_supported_fields() {
        let field = FieldSpec {
            space: SpaceShape::Window {
                amplitude: 0.8,
                center: 0.5,
                width: 0.4,
            },
            time: TimeShape::Constant,
        };
        let spec = DynamicsSpec::weakly_asymmetric(32, field.clone(), 0.05, 11);
        let init = crate::lattice::initial_from_profile(
            &DensityProfile::Step {
                left: 1.0,
                right: 0.0,
                center: 0.5,
            },
            32,
        )
        .unwrap();
        let traj = simulate(&spec, &init, &[]).unwrap();
        let acc = log_rn(&traj, &field);
        assert_eq!(acc.slow_bond_compensator, 0.0);
        assert_eq!(acc.time_integral, 0.0);
    }

    #[test]
    fn scaling_bound_holds_over_random_trajectories() {
        let field = sine_time_field();
        let c = envelope_constant(&field, 0.05);
        let spec = DynamicsSpec::weakly_asymmetric(32, field.clone(), 0.05, 13);
        let init =
            crate::lattice::initial_from_profile(&DensityProfile::Constant { value: 0.5 }, 32)
                .unwrap();
        for r in 0..1000 {
            let traj = simulate_replica(&spec, &init, &[], r).unwrap();
            let acc = log_rn(&traj, &field);
            assert!(
                acc.total.abs() / 32.0 <= c,
                "replica {r}: |total|/N = {} exceeds C = {c}",
                acc.total.abs() / 32.0
            );
        }
    }

    #[test]
    fn entropy_of_zero_perturbation_is_exactly_zero() {
        let spec = DynamicsSpec::weakly_asymmetric(16, FieldSpec::zero(), 0.05, 5);
        let init =
            crate::lattice::initial_from_profile(&DensityProfile::Constant { value: 0.5 }, 16)
                .unwrap();
        let est = estimate_entropy(&spec, &init, 50).unwrap();
        assert_eq!(est.mean_per_site, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert!(estimate_entropy(&spec, &init, 0).is_err());
    }

    #[test]
    fn entropy_estimate_nonnegative_within_noise() {
        let field = FieldSpec::linear_u(0.8);
        let spec = DynamicsSpec::weakly_asymmetric(32, field, 0.1, 29);
        let init =
            crate::lattice::initial_from_profile(&DensityProfile::Constant { value: 0.5 }, 32)
                .unwrap();
        let est = estimate_entropy(&spec, &init, 200).unwrap();
        assert!(
            est.mean_per_site >= -3.0 * est.std_error,
            "relative entropy estimate {} below −3·SE = {}",
            est.mean_per_site,
            -3.0 * est.std_error
        );
    }

    #[test]
    fn log_rn_mean_matches_entropy_rate_oracle() {
        // E^H[log dP^H/dP] equals E^H[∫Γ-rate dt]; the two estimators must
        // agree within combined Monte Carlo noise.
        let field = FieldSpec {
            space: SpaceShape::Sine {
                amplitude: 1.0,
                mode: 1,
            },
            time: TimeShape::Constant,
        };
        let spec = DynamicsSpec::weakly_asymmetric(32, field.clone(), 0.2, 404);
        let init = crate::lattice::initial_from_profile(
            &DensityProfile::Constant { value: 0.5 },
            32,
        )
        .unwrap();
        let reps = 400usize;
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for r in 0..reps as u64 {
            let traj = simulate_replica(&spec, &init, &[], r).unwrap();
            a.push(log_rn(&traj, &field).total);
            b.push(entropy_rate_oracle(&traj, &field));
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let var = |v: &[f64]| {
            let m = mean(v);
            v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
        };
        let se = ((var(&a) + var(&b)) / reps as f64).sqrt();
        let gap = (mean(&a) - mean(&b)).abs();
        assert!(
            gap <= 4.0 * se,
            "estimators disagree: {} vs {} (4se = {})",
            mean(&a),
            mean(&b),
            4.0 * se
        );
        // the oracle has far lower variance than the likelihood accumulator
        assert!(var(&b) < var(&a));
    }

    #[test]
    fn martingale_mean_one_smoke() {
        // small-sample version of the mean-one property; the acceptance suite
        // runs the full M = 2000 protocol
        let field = FieldSpec::linear_u(0.5);
        let spec = DynamicsSpec::symmetric(16, 0.05, 101);
        let init =
            crate::lattice::initial_from_profile(&DensityProfile::Constant { value: 0.5 }, 16)
                .unwrap();
        let reps = 400usize;
        let samples: Vec<f64> = (0..reps as u64)
            .map(|r| {
                let traj = simulate_replica(&spec, &init, &[], r).unwrap();
                log_rn(&traj, &field).total.exp()
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / reps as f64;
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (reps - 1) as f64;
        let se = (var / reps as f64).sqrt();
        assert!(
            (mean - 1.0).abs() <= 4.0 * se.max(1e-3),
            "E[exp(log RN)] = {mean} ± {se}"
        );
    }
}
