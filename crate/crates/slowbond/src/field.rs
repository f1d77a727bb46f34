//! Space-time fields H : [0,T] × [0,1] → ℝ used as dynamic perturbations and
//! as weak-form test functions.
//!
//! The torus is cut at the slow bond and parametrised by u ∈ [0,1]; u = 0 is
//! the right limit 0⁺ and u = 1 the left limit 0⁻, so a field may jump across
//! the bond with δH(t) = H(t,0) − H(t,1). Fields are C^{1,2} on the closed
//! cut interval and right continuous at zero by this parametrisation.
//!
//! Named analytic fields ([`FieldSpec`]) keep harness configs reproducible:
//! every spec is a product S(u)·g(t) with exact derivatives. Arbitrary fields
//! (e.g. the reconstruction of [`crate::inverse::build_h`]) implement
//! [`PerturbationField`] directly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;

/// Sup norms of a field over [0,T] × [0,1], used for thinning bounds and the
/// Radon–Nikodym envelope constant.
#[derive(Debug, Clone, Copy)]
pub struct FieldSups {
    pub h: f64,
    pub du: f64,
    pub dt: f64,
    pub d2u: f64,
    pub jump: f64,
}

/// Evaluator bundle for a perturbation field and its derivatives.
pub trait PerturbationField: Send + Sync {
    fn h(&self, t: f64, u: f64) -> f64;
    fn dh_du(&self, t: f64, u: f64) -> f64;
    fn dh_dt(&self, t: f64, u: f64) -> f64;
    fn d2h_du2(&self, t: f64, u: f64) -> f64;

    /// Jump across the slow bond, δH(t) = H(t,0⁺) − H(t,0⁻).
    fn jump(&self, t: f64) -> f64 {
        self.h(t, 0.0) - self.h(t, 1.0)
    }

    /// False only when ∂_t H ≡ 0; lets hot loops cache spatial data.
    fn time_dependent(&self) -> bool {
        true
    }

    /// Upper bound for sup_{t ∈ [0,horizon]} |H(t,u2) − H(t,u1)|.
    ///
    /// The default scans a dense time grid and inflates the result; analytic
    /// fields override it with a rigorous bound. Thinning asserts the bound
    /// at every proposal, so a too-small value is detected, not silently
    /// accepted.
    fn bond_diff_bound(&self, horizon: f64, u1: f64, u2: f64) -> f64 {
        if !self.time_dependent() {
            return (self.h(0.0, u2) - self.h(0.0, u1)).abs();
        }
        let scan = 1024;
        let mut max = 0.0f64;
        for i in 0..=scan {
            let t = horizon * i as f64 / scan as f64;
            max = max.max((self.h(t, u2) - self.h(t, u1)).abs());
        }
        max * 1.05 + 1e-9
    }

    /// Sup norms over [0,horizon] × [0,1] by dense scan.
    fn sup_norms(&self, horizon: f64) -> FieldSups {
        let (nt, nu) = if self.time_dependent() { (129, 513) } else { (1, 513) };
        let mut s = FieldSups {
            h: 0.0,
            du: 0.0,
            dt: 0.0,
            d2u: 0.0,
            jump: 0.0,
        };
        for i in 0..nt {
            let t = if nt == 1 {
                0.0
            } else {
                horizon * i as f64 / (nt - 1) as f64
            };
            s.jump = s.jump.max(self.jump(t).abs());
            for j in 0..nu {
                let u = j as f64 / (nu - 1) as f64;
                s.h = s.h.max(self.h(t, u).abs());
                s.du = s.du.max(self.dh_du(t, u).abs());
                s.dt = s.dt.max(self.dh_dt(t, u).abs());
                s.d2u = s.d2u.max(self.d2h_du2(t, u).abs());
            }
        }
        s
    }

    /// Finite-difference cross-check of the derivative evaluators: first
    /// derivatives at 1e−6·scale; the second derivative at 1e−4·scale, the
    /// best a centered difference can certify at f64 roundoff.
    fn check_consistency(&self, horizon: f64) -> Result<()> {
        let scale = 1.0 + self.sup_norms(horizon).h;
        let du = 1e-5;
        let du2 = 1e-4;
        let dt = 1e-5 * horizon.max(1e-3);
        for i in 1..8 {
            let t = horizon * i as f64 / 8.0;
            for j in 1..16 {
                let u = j as f64 / 16.0;
                let fd_u = (self.h(t, u + du) - self.h(t, u - du)) / (2.0 * du);
                let fd_t = (self.h(t + dt.min(horizon - t), u) - self.h(t - dt.min(t), u))
                    / (dt.min(horizon - t) + dt.min(t));
                let fd_uu = (self.h(t, u + du2) - 2.0 * self.h(t, u) + self.h(t, u - du2))
                    / (du2 * du2);
                if (fd_u - self.dh_du(t, u)).abs() > 1e-6 * scale
                    || (fd_t - self.dh_dt(t, u)).abs() > 1e-6 * scale
                    || (fd_uu - self.d2h_du2(t, u)).abs() > 1e-4 * scale
                {
                    return Err(Error::Domain(format!(
                        "field evaluators inconsistent near (t,u) = ({t},{u})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// The zero field; turns the weakly asymmetric generator back into the
/// symmetric one.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroField;

impl PerturbationField for ZeroField {
    fn h(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dh_du(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn dh_dt(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn d2h_du2(&self, _: f64, _: f64) -> f64 {
        0.0
    }
    fn time_dependent(&self) -> bool {
        false
    }
    fn bond_diff_bound(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// One monomial-times-trig term c·u^k(1−u)^l·τ(2πm u).
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SpaceTerm {
    pub coef: f64,
    pub k: u32,
    pub l: u32,
    #[serde(default)]
    pub trig: Trig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    #[default]
    One,
    Sin {
        mode: u32,
    },
    Cos {
        mode: u32,
    },
}

impl Trig {
    fn eval(&self, u: f64) -> (f64, f64, f64) {
        match self {
            Trig::One => (1.0, 0.0, 0.0),
            Trig::Sin { mode } => {
                let w = TWO_PI * *mode as f64;
                ((w * u).sin(), w * (w * u).cos(), -w * w * (w * u).sin())
            }
            Trig::Cos { mode } => {
                let w = TWO_PI * *mode as f64;
                ((w * u).cos(), -w * (w * u).sin(), -w * w * (w * u).cos())
            }
        }
    }
}

fn poly_eval(k: u32, l: u32, u: f64) -> (f64, f64, f64) {
    let powk = |e: i64| if e < 0 { 0.0 } else { u.powi(e as i32) };
    let powl = |e: i64| if e < 0 { 0.0 } else { (1.0 - u).powi(e as i32) };
    let (k, l) = (k as i64, l as i64);
    let p = powk(k) * powl(l);
    let dp = k as f64 * powk(k - 1) * powl(l) - l as f64 * powk(k) * powl(l - 1);
    let d2p = (k * (k - 1)) as f64 * powk(k - 2) * powl(l)
        - 2.0 * (k * l) as f64 * powk(k - 1) * powl(l - 1)
        + (l * (l - 1)) as f64 * powk(k) * powl(l - 2);
    (p, dp, d2p)
}

/// Spatial factor S(u) of a named analytic field.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SpaceShape {
    Zero,
    /// slope·u; jumps by −slope across the bond.
    Linear { slope: f64 },
    /// amplitude·sin(2π·mode·u); continuous across the bond.
    Sine { amplitude: f64, mode: u32 },
    /// amplitude·cos⁴(π(u−center)/width), compactly supported inside (0,1).
    Window {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Σ terms, each c·u^k(1−u)^l·trig.
    Terms { terms: Vec<SpaceTerm> },
}

impl SpaceShape {
    /// (S, S′, S″) at u.
    pub fn eval(&self, u: f64) -> (f64, f64, f64) {
        match self {
            SpaceShape::Zero => (0.0, 0.0, 0.0),
            SpaceShape::Linear { slope } => (slope * u, *slope, 0.0),
            SpaceShape::Sine { amplitude, mode } => {
                let w = TWO_PI * *mode as f64;
                (
                    amplitude * (w * u).sin(),
                    amplitude * w * (w * u).cos(),
                    -amplitude * w * w * (w * u).sin(),
                )
            }
            SpaceShape::Window {
                amplitude,
                center,
                width,
            } => {
                let z = PI * (u - center) / width;
                if z.abs() >= PI / 2.0 {
                    return (0.0, 0.0, 0.0);
                }
                let (c, s) = (z.cos(), z.sin());
                let dz = PI / width;
                (
                    amplitude * c.powi(4),
                    -4.0 * amplitude * dz * c.powi(3) * s,
                    4.0 * amplitude * dz * dz * (3.0 * c * c * s * s - c.powi(4)),
                )
            }
            SpaceShape::Terms { terms } => {
                let mut acc = (0.0, 0.0, 0.0);
                for t in terms {
                    let (p, dp, d2p) = poly_eval(t.k, t.l, u);
                    let (g, dg, d2g) = t.trig.eval(u);
                    acc.0 += t.coef * p * g;
                    acc.1 += t.coef * (dp * g + p * dg);
                    acc.2 += t.coef * (d2p * g + 2.0 * dp * dg + p * d2g);
                }
                acc
            }
        }
    }
}

/// Time factor g(t) with |g| ≤ 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Default)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum TimeShape {
    #[default]
    Constant,
    /// cos(omega·t + phase).
    Cosine { omega: f64, phase: f64 },
}

impl TimeShape {
    fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            TimeShape::Constant => (1.0, 0.0),
            TimeShape::Cosine { omega, phase } => {
                ((omega * t + phase).cos(), -omega * (omega * t + phase).sin())
            }
        }
    }
}

/// Serializable analytic field H(t,u) = S(u)·g(t).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FieldSpec {
    pub space: SpaceShape,
    #[serde(default)]
    pub time: TimeShape,
}

impl FieldSpec {
    pub fn zero() -> Self {
        FieldSpec {
            space: SpaceShape::Zero,
            time: TimeShape::Constant,
        }
    }

    /// H(t,u) = slope·u, the simplest field with a nonzero jump (δH = −slope).
    pub fn linear_u(slope: f64) -> Self {
        FieldSpec {
            space: SpaceShape::Linear { slope },
            time: TimeShape::Constant,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.space, SpaceShape::Zero)
    }

    pub fn validate(&self) -> Result<()> {
        if let SpaceShape::Window { center, width, .. } = self.space {
            if width <= 0.0 || center - width / 2.0 <= 0.0 || center + width / 2.0 >= 1.0 {
                return Err(Error::Domain(
                    "window field support must lie strictly inside (0,1)".into(),
                ));
            }
        }
        Ok(())
    }
}

impl PerturbationField for FieldSpec {
    fn h(&self, t: f64, u: f64) -> f64 {
        self.space.eval(u).0 * self.time.eval(t).0
    }
    fn dh_du(&self, t: f64, u: f64) -> f64 {
        self.space.eval(u).1 * self.time.eval(t).0
    }
    fn dh_dt(&self, t: f64, u: f64) -> f64 {
        self.space.eval(u).0 * self.time.eval(t).1
    }
    fn d2h_du2(&self, t: f64, u: f64) -> f64 {
        self.space.eval(u).2 * self.time.eval(t).0
    }
    fn time_dependent(&self) -> bool {
        !matches!(self.time, TimeShape::Constant) && !self.is_zero()
    }
    fn bond_diff_bound(&self, _horizon: f64, u1: f64, u2: f64) -> f64 {
        // |g| ≤ 1 for both time shapes, so |S(u2) − S(u1)| is rigorous.
        (self.space.eval(u2).0 - self.space.eval(u1).0).abs()
    }
}

/// Field backed by explicit closures for the value and each derivative.
pub struct ClosureField<F0, F1, F2, F3>
where
    F0: Fn(f64, f64) -> f64 + Send + Sync,
    F1: Fn(f64, f64) -> f64 + Send + Sync,
    F2: Fn(f64, f64) -> f64 + Send + Sync,
    F3: Fn(f64, f64) -> f64 + Send + Sync,
{
    pub h: F0,
    pub du: F1,
    pub dt: F2,
    pub d2u: F3,
}

impl<F0, F1, F2, F3> PerturbationField for ClosureField<F0, F1, F2, F3>
where
    F0: Fn(f64, f64) -> f64 + Send + Sync,
    F1: Fn(f64, f64) -> f64 + Send + Sync,
    F2: Fn(f64, f64) -> f64 + Send + Sync,
    F3: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn h(&self, t: f64, u: f64) -> f64 {
        (self.h)(t, u)
    }
    fn dh_du(&self, t: f64, u: f64) -> f64 {
        (self.du)(t, u)
    }
    fn dh_dt(&self, t: f64, u: f64) -> f64 {
        (self.dt)(t, u)
    }
    fn d2h_du2(&self, t: f64, u: f64) -> f64 {
        (self.d2u)(t, u)
    }
}

/// Weighted sum Σ aᵢ·Hᵢ of fields; used by linearity and gauge tests.
pub struct LinearCombination<'a> {
    pub parts: Vec<(f64, &'a dyn PerturbationField)>,
}

impl PerturbationField for LinearCombination<'_> {
    fn h(&self, t: f64, u: f64) -> f64 {
        self.parts.iter().map(|(a, f)| a * f.h(t, u)).sum()
    }
    fn dh_du(&self, t: f64, u: f64) -> f64 {
        self.parts.iter().map(|(a, f)| a * f.dh_du(t, u)).sum()
    }
    fn dh_dt(&self, t: f64, u: f64) -> f64 {
        self.parts.iter().map(|(a, f)| a * f.dh_dt(t, u)).sum()
    }
    fn d2h_du2(&self, t: f64, u: f64) -> f64 {
        self.parts.iter().map(|(a, f)| a * f.d2h_du2(t, u)).sum()
    }
    fn time_dependent(&self) -> bool {
        self.parts.iter().any(|(_, f)| f.time_dependent())
    }
}

/// Seeded random test field from the fixed low-order basis
/// {u^k(1−u)^l · trig}, optionally modulated in time.
pub fn random_test_field<R: Rng>(rng: &mut R, scale: f64, horizon: f64) -> FieldSpec {
    let n_terms = rng.gen_range(2..=4);
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let trig = match rng.gen_range(0..3) {
            0 => Trig::One,
            1 => Trig::Sin {
                mode: rng.gen_range(1..=2),
            },
            _ => Trig::Cos {
                mode: rng.gen_range(1..=2),
            },
        };
        terms.push(SpaceTerm {
            coef: rng.gen_range(-scale..scale),
            k: rng.gen_range(0..=3),
            l: rng.gen_range(0..=3),
            trig,
        });
    }
    let time = if rng.gen_bool(0.5) {
        TimeShape::Constant
    } else {
        TimeShape::Cosine {
            omega: PI / horizon.max(1e-9),
            phase: rng.gen_range(0.0..PI),
        }
    };
    FieldSpec {
        space: SpaceShape::Terms { terms },
        time,
    }
}
