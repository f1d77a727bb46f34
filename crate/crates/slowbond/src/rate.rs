//! Large-deviations functionals for the exclusion process with a slow bond.
//!
//! For a density path π = ρ_t(u)du and a perturbation H, the linear part is
//!
//!   ℓ_H(π) = ⟨ρ_T,H_T⟩ − ⟨ρ_0,H_0⟩ − ∫⟨ρ_t,(∂_t+Δ)H_t⟩dt
//!            − ∫{ρ_t(0⁺)∂_uH_t(0⁺) − ρ_t(0⁻)∂_uH_t(0⁻)}dt
//!            + ∫(ρ_t(0⁺) − ρ_t(0⁻))·δH_t(0)dt,
//!
//! the convex part is
//!
//!   Φ_H(π) = ∫⟨χ(ρ_t),(∂_uH_t)²⟩dt + ∫ρ(0⁻)(1−ρ(0⁺))ψ(δH)dt
//!            + ∫ρ(0⁺)(1−ρ(0⁻))ψ(−δH)dt,      ψ(x) = eˣ − x − 1,
//!
//! and Ĵ_H = ℓ_H − Φ_H. On the solution ρ^H of the perturbed hydrodynamic
//! equation the supremum over perturbations is attained at H itself, with the
//! closed-form value
//!
//!   I(ρ^H) = ∫⟨χ(ρ^H),(∂_uH)²⟩dt + ∫ρ(0⁻)(1−ρ(0⁺))Γ(δH)dt
//!            + ∫ρ(0⁺)(1−ρ(0⁻))Γ(−δH)dt,      Γ(y) = 1 − e^y + y·e^y.
//!
//! The energy functional over compactly supported test fields is
//! 𝓔_H(π) = ⟨⟨∂_uH,ρ⟩⟩ − 2⟨⟨H,H⟩⟩, maximised by H* = −∂_uρ/4 with value
//! (1/8)‖∂_uρ‖²_{L²}.
//!
//! All quadratures are trapezoid in t over the path instants and midpoint in
//! u over the grid cells, matching the solver's order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::{random_test_field, FieldSpec, PerturbationField};
use crate::grid::DensityPath;
use crate::{Error, Result};

/// Mobility χ(a) = a(1−a).
pub fn chi(a: f64) -> f64 {
    a * (1.0 - a)
}

/// ψ(x) = eˣ − x − 1 ≥ 0.
pub fn psi(x: f64) -> f64 {
    x.exp() - x - 1.0
}

/// Γ(y) = 1 − e^y + y·e^y = ∫₀^y s·eˢ ds ≥ 0.
pub fn big_gamma(y: f64) -> f64 {
    1.0 - y.exp() + y * y.exp()
}

/// ℓ_H(π): the linear-in-H part of the rate functional.
pub fn ell(path: &DensityPath, h: &dyn PerturbationField) -> f64 {
    let t_end = path.horizon();
    let boundary = path.terminal().integral_against(|u| h.h(t_end, u))
        - path.initial().integral_against(|u| h.h(0.0, u));
    let bulk = path.time_integral(|t, f| {
        let (plus, minus) = f.side_values();
        f.integral_against(|u| h.dh_dt(t, u) + h.d2h_du2(t, u))
            + (plus * h.dh_du(t, 0.0) - minus * h.dh_du(t, 1.0))
            - (plus - minus) * h.jump(t)
    });
    boundary - bulk
}

/// Φ_H(π) ≥ 0: the quadratic/exponential cost of the perturbation.
pub fn phi(path: &DensityPath, h: &dyn PerturbationField) -> f64 {
    path.time_integral(|t, f| {
        let (plus, minus) = f.side_values();
        let d = h.jump(t);
        let m = f.m() as f64;
        let grad: f64 = f
            .values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let u = (j as f64 + 0.5) / m;
                let g = h.dh_du(t, u);
                chi(v) * g * g
            })
            .sum::<f64>()
            / m;
        grad + minus * (1.0 - plus) * psi(d) + plus * (1.0 - minus) * psi(-d)
    })
}

/// Ĵ_H(π) = ℓ_H(π) − Φ_H(π).
pub fn j_hat(path: &DensityPath, h: &dyn PerturbationField) -> f64 {
    ell(path, h) - phi(path, h)
}

/// 𝓔_H(π) for a test field vanishing at both ends of the cut interval.
pub fn energy_of(path: &DensityPath, h_test: &dyn PerturbationField) -> Result<f64> {
    let t_end = path.horizon();
    let sup = h_test.sup_norms(t_end).h;
    for i in 0..=8 {
        let t = t_end * i as f64 / 8.0;
        if h_test.h(t, 0.0).abs() > 1e-8 * (1.0 + sup)
            || h_test.h(t, 1.0).abs() > 1e-8 * (1.0 + sup)
        {
            return Err(Error::Support(
                "energy test field must vanish at u = 0 and u = 1".into(),
            ));
        }
    }
    Ok(path.time_integral(|t, f| {
        let m = f.m() as f64;
        let grad_pairing = f.integral_against(|u| h_test.dh_du(t, u));
        let square: f64 = (0..f.m())
            .map(|j| {
                let u = (j as f64 + 0.5) / m;
                let v = h_test.h(t, u);
                v * v
            })
            .sum::<f64>()
            / m;
        grad_pairing - 2.0 * square
    }))
}

/// 𝓔(π) = sup_H 𝓔_H(π) = (1/8)‖∂_uρ‖²_{L²([0,T]×𝕋)}, from interior face
/// differences of the grid (paths on grids always have finite energy).
pub fn energy(path: &DensityPath) -> f64 {
    path.time_integral(|_, f| {
        let m = f.m() as f64;
        let v = f.values();
        (1..f.m())
            .map(|j| {
                let d = (v[j] - v[j - 1]) * m;
                d * d
            })
            .sum::<f64>()
            / m
    }) / 8.0
}

/// The three nonnegative terms of the closed-form rate value.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct RateBreakdown {
    /// ∫⟨χ(ρ),(∂_uH)²⟩dt
    pub grad_term: f64,
    /// ∫ρ(0⁻)(1−ρ(0⁺))Γ(δH)dt
    pub plus_term: f64,
    /// ∫ρ(0⁺)(1−ρ(0⁻))Γ(−δH)dt
    pub minus_term: f64,
    pub total: f64,
}

/// Closed-form rate value; equals I(ρ) when ρ solves the perturbed equation
/// driven by H.
pub fn rate_closed_form(path: &DensityPath, h: &dyn PerturbationField) -> RateBreakdown {
    let grad_term = path.time_integral(|t, f| {
        let m = f.m() as f64;
        f.values()
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let u = (j as f64 + 0.5) / m;
                let g = h.dh_du(t, u);
                chi(v) * g * g
            })
            .sum::<f64>()
            / m
    });
    let plus_term = path.time_integral(|t, f| {
        let (plus, minus) = f.side_values();
        minus * (1.0 - plus) * big_gamma(h.jump(t))
    });
    let minus_term = path.time_integral(|t, f| {
        let (plus, minus) = f.side_values();
        plus * (1.0 - minus) * big_gamma(-h.jump(t))
    });
    RateBreakdown {
        grad_term,
        plus_term,
        minus_term,
        total: grad_term + plus_term + minus_term,
    }
}

/// A fixed, seeded family of test perturbations; its Ĵ-supremum is a lower
/// bound for the rate functional usable on arbitrary paths.
#[derive(Debug, Clone)]
pub struct TestFieldFamily {
    pub fields: Vec<FieldSpec>,
}

impl TestFieldFamily {
    pub fn seeded(seed: u64, count: usize, scale: f64, horizon: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fields = (0..count)
            .map(|_| random_test_field(&mut rng, scale, horizon))
            .collect();
        TestFieldFamily { fields }
    }

    pub fn push(&mut self, f: FieldSpec) {
        self.fields.push(f);
    }

    /// max(0, max_i Ĵ_{G_i}(π)); the zero field contributes the 0.
    pub fn rate_lower_bound(&self, path: &DensityPath) -> f64 {
        self.fields
            .iter()
            .map(|f| j_hat(path, f))
            .fold(0.0, f64::max)
    }
}

/// Outcome of the convex-combination inequality check
/// I(θρ+(1−θ)λ) ≤ θI(ρ) + (1−θ)I(λ) on a finite test family.
#[derive(Debug, Clone, Copy)]
pub enum ConvexityCheck {
    /// The side-sign hypothesis (ρ(0⁺)−λ(0⁺))(ρ(0⁻)−λ(0⁻)) ≥ 0 fails.
    Inapplicable { worst_product: f64 },
    Checked { lhs: f64, rhs: f64, pass: bool },
}

pub fn rate_convex_combination_check(
    rho: &DensityPath,
    lambda: &DensityPath,
    theta: f64,
    family: &TestFieldFamily,
    tolerance: f64,
) -> ConvexityCheck {
    let mut worst = f64::INFINITY;
    for (a, b) in rho.fields.iter().zip(&lambda.fields) {
        let (ap, am) = a.side_values();
        let (bp, bm) = b.side_values();
        worst = worst.min((ap - bp) * (am - bm));
    }
    if worst < -1e-9 {
        return ConvexityCheck::Inapplicable {
            worst_product: worst,
        };
    }
    let mix = rho.convex_with(lambda, theta);
    let lhs = family.rate_lower_bound(&mix);
    let rhs = theta * family.rate_lower_bound(rho) + (1.0 - theta) * family.rate_lower_bound(lambda);
    ConvexityCheck::Checked {
        lhs,
        rhs,
        pass: lhs <= rhs + tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ClosureField, LinearCombination, SpaceShape, SpaceTerm, TimeShape, Trig};
    use approx::assert_abs_diff_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn scalar_helpers() {
        assert_eq!(chi(0.5), 0.25);
        for i in 0..=100 {
            let a = i as f64 / 100.0;
            assert!(chi(a) <= 0.25 + 1e-15);
        }
        assert_eq!(psi(0.0), 0.0);
        assert_eq!(big_gamma(0.0), 0.0);
        for i in 0..=200 {
            let y = -5.0 + 10.0 * i as f64 / 200.0;
            assert!(psi(y) >= 0.0, "ψ({y}) < 0");
            assert!(big_gamma(y) >= -1e-15, "Γ({y}) < 0");
            if y.abs() > 1e-3 {
                assert!(psi(y) > 0.0);
                assert!(big_gamma(y) > 0.0);
            }
        }
        assert_abs_diff_eq!(big_gamma(1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(big_gamma(-1.0), 1.0 - 2.0 / std::f64::consts::E, epsilon = 1e-15);
    }

    fn constant_path(value: f64) -> DensityPath {
        DensityPath::from_fn(|_, _| value, 256, 1.0, 64)
    }

    #[test]
    fn ell_vanishes_for_constant_field() {
        // H constant in space and time on a mass-conserving path
        let path = DensityPath::from_fn(|t, u| 0.5 + 0.2 * (2.0 * PI * (u - 0.1 * t)).sin(), 128, 1.0, 32);
        let constant = FieldSpec {
            space: SpaceShape::Terms {
                terms: vec![SpaceTerm {
                    coef: 0.8,
                    k: 0,
                    l: 0,
                    trig: Trig::One,
                }],
            },
            time: TimeShape::Constant,
        };
        // the sine path conserves mass exactly at every instant
        assert!(ell(&path, &constant).abs() < 1e-12);
    }

    #[test]
    fn ell_is_linear_in_h() {
        let path = DensityPath::from_fn(|t, u| 0.4 + 0.3 * u * (1.0 - u) + 0.05 * t, 64, 0.7, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..5 {
            let h1 = random_test_field(&mut rng, 0.6, 0.7);
            let h2 = random_test_field(&mut rng, 0.6, 0.7);
            let (a, b) = (1.7, -0.9);
            let combo = LinearCombination {
                parts: vec![(a, &h1 as &dyn PerturbationField), (b, &h2)],
            };
            let lhs = ell(&path, &combo);
            let rhs = a * ell(&path, &h1) + b * ell(&path, &h2);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn phi_frozen_value_half_density_linear_field() {
        // ρ ≡ 1/2, H = u, T = 1: Φ = 1/4 + (1/4)ψ(−1) + (1/4)ψ(1)
        let path = constant_path(0.5);
        let h = FieldSpec::linear_u(1.0);
        let expect = 0.25 + 0.25 * psi(-1.0) + 0.25 * psi(1.0);
        assert_abs_diff_eq!(expect, 0.521_540_317_407_62, epsilon = 1e-12);
        assert_abs_diff_eq!(phi(&path, &h), expect, epsilon = 1e-12);
    }

    #[test]
    fn phi_spatially_constant_field_is_free() {
        let path = DensityPath::from_fn(|_, u| 0.3 + 0.4 * u * u * (1.0 - u), 64, 1.0, 16);
        let c = FieldSpec {
            space: SpaceShape::Terms {
                terms: vec![SpaceTerm {
                    coef: 1.3,
                    k: 0,
                    l: 0,
                    trig: Trig::One,
                }],
            },
            time: TimeShape::Cosine {
                omega: 2.0,
                phase: 0.1,
            },
        };
        assert_abs_diff_eq!(phi(&path, &c), 0.0, epsilon = 1e-14);
        assert!(phi(&path, &FieldSpec::linear_u(0.8)) >= 0.0);
    }

    #[test]
    fn phi_is_convex_in_h() {
        let path = DensityPath::from_fn(|t, u| 0.45 + 0.25 * (2.0 * PI * u).cos() * (1.0 - 0.3 * t), 64, 0.8, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let h1 = random_test_field(&mut rng, 0.8, 0.8);
            let h2 = random_test_field(&mut rng, 0.8, 0.8);
            let mid = LinearCombination {
                parts: vec![(0.5, &h1 as &dyn PerturbationField), (0.5, &h2)],
            };
            let lhs = phi(&path, &mid);
            let rhs = 0.5 * phi(&path, &h1) + 0.5 * phi(&path, &h2);
            assert!(
                lhs <= rhs + 1e-12,
                "convexity violated: Φ(mid) = {lhs}, average = {rhs}"
            );
        }
    }

    #[test]
    fn rate_closed_form_frozen_value() {
        // ρ ≡ 1/2, H = u, T = 1: total = 1/4 + (1/4)Γ(−1) + (1/4)Γ(1)
        let path = constant_path(0.5);
        let h = FieldSpec::linear_u(1.0);
        let br = rate_closed_form(&path, &h);
        let expect = 0.25 + 0.25 * big_gamma(-1.0) + 0.25 * big_gamma(1.0);
        assert_abs_diff_eq!(expect, 0.566_060_279_414_3, epsilon = 1e-12);
        assert_abs_diff_eq!(br.total, expect, epsilon = 1e-12);
        assert!(br.grad_term >= 0.0 && br.plus_term >= 0.0 && br.minus_term >= 0.0);
        // H ≡ 0 costs nothing
        let zero = rate_closed_form(&path, &FieldSpec::zero());
        assert_eq!(zero.total, 0.0);
    }

    #[test]
    fn energy_of_constant_path_is_zero_at_any_field() {
        let path = constant_path(0.7);
        assert_abs_diff_eq!(energy(&path), 0.0, epsilon = 1e-15);
        let w = FieldSpec {
            space: SpaceShape::Window {
                amplitude: 0.5,
                center: 0.5,
                width: 0.4,
            },
            time: TimeShape::Constant,
        };
        // 𝓔_H = −2⟨⟨H,H⟩⟩ ≤ 0 for constant ρ (⟨∂_uH, c⟩ = 0)
        assert!(energy_of(&path, &w).unwrap() <= 0.0);
        // support violation rejected
        assert!(energy_of(&path, &FieldSpec::linear_u(1.0)).is_err());
    }

    #[test]
    fn energy_maximizer_attains_closed_form() {
        // ρ(t,u) = 0.5 + a·sin²(π(u−c)/w)-style window bump, constant near the
        // cut; H* = −∂_uρ/4 attains (1/8)‖∂_uρ‖².
        let (a, c, w) = (0.3, 0.5, 0.5);
        let bump = move |u: f64| {
            let z = PI * (u - c) / w;
            if z.abs() >= PI / 2.0 {
                0.0
            } else {
                z.cos().powi(4)
            }
        };
        let dbump = move |u: f64| {
            let z = PI * (u - c) / w;
            if z.abs() >= PI / 2.0 {
                0.0
            } else {
                -4.0 * (PI / w) * z.cos().powi(3) * z.sin()
            }
        };
        let d2bump = move |u: f64| {
            let z = PI * (u - c) / w;
            if z.abs() >= PI / 2.0 {
                0.0
            } else {
                4.0 * (PI / w) * (PI / w)
                    * (3.0 * z.cos().powi(2) * z.sin().powi(2) - z.cos().powi(4))
            }
        };
        let path = DensityPath::from_fn(move |t, u| 0.4 + a * (1.0 - 0.5 * t) * bump(u), 4096, 1.0, 48);
        let h_star = ClosureField {
            h: move |t: f64, u: f64| -a * (1.0 - 0.5 * t) * dbump(u) / 4.0,
            du: move |t: f64, u: f64| -a * (1.0 - 0.5 * t) * d2bump(u) / 4.0,
            dt: move |t: f64, u: f64| {
                let _ = t;
                0.5 * a * dbump(u) / 4.0
            },
            d2u: move |_t: f64, _u: f64| 0.0, // unused by the energy functional
        };
        let attained = energy_of(&path, &h_star).unwrap();
        let closed = energy(&path);
        assert_abs_diff_eq!(attained, closed, epsilon = 1e-6);
        // any admissible field stays below the supremum
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let g = random_test_field(&mut rng, 0.5, 1.0);
            // force endpoint vanishing: multiply basis terms by u(1−u)
            let g = match g.space {
                SpaceShape::Terms { terms } => FieldSpec {
                    space: SpaceShape::Terms {
                        terms: terms
                            .into_iter()
                            .map(|mut t| {
                                t.k += 1;
                                t.l += 1;
                                t
                            })
                            .collect(),
                    },
                    time: g.time,
                },
                _ => unreachable!(),
            };
            let v = energy_of(&path, &g).unwrap();
            assert!(v <= closed + 1e-9, "𝓔_G = {v} exceeds sup {closed}");
        }
    }

    #[test]
    fn gauge_invariance_of_j_hat() {
        // adding a time-dependent spatial constant to H leaves Ĵ unchanged on
        // mass-conserving paths
        let path = DensityPath::from_fn(|t, u| 0.5 + 0.2 * (2.0 * PI * (u + 0.2 * t)).sin(), 128, 0.9, 32);
        let h = FieldSpec::linear_u(0.6);
        // time-linear gauge keeps the trapezoid rule exact in t
        let gauge = ClosureField {
            h: |t: f64, _u: f64| 0.3 + 0.45 * t,
            du: |_, _| 0.0,
            dt: |_, _| 0.45,
            d2u: |_, _| 0.0,
        };
        let shifted = LinearCombination {
            parts: vec![(1.0, &h as &dyn PerturbationField), (1.0, &gauge)],
        };
        let a = j_hat(&path, &h);
        let b = j_hat(&path, &shifted);
        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
    }

    #[test]
    fn convexity_check_trivial_equality() {
        let path = DensityPath::from_fn(|_, u| 0.4 + 0.2 * u * (1.0 - u), 64, 0.5, 12);
        let family = TestFieldFamily::seeded(5, 8, 0.5, 0.5);
        match rate_convex_combination_check(&path, &path, 0.3, &family, 1e-12) {
            ConvexityCheck::Checked { lhs, rhs, pass } => {
                assert!(pass);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
            ConvexityCheck::Inapplicable { .. } => panic!("equal paths are always applicable"),
        }
    }
}
