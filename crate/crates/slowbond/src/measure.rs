//! Empirical measures, local particle averages, and the two mollification
//! kernels.
//!
//! The box kernel ι_ε(u,v) is the sliding window 1_{(v,v+ε]}(u)/ε, except for
//! v in the strip [−ε, 0) before the cut, where the window is frozen to
//! [−ε, 0) so that it never straddles the slow bond. With the effective width
//! snapped to ⌊εN⌋/N on lattice data, the identity
//! (π^N∗ι_ε)(x/N) = η^{εN}(x) holds exactly at every site.
//!
//! The smooth kernel ι_γˢ(z) = f(z/γ)/γ uses the C¹ bump
//! f(u) = 2(1 + cos 4πu) on |u| ≤ 1/4, which satisfies 0 ≤ f ≤ 4, f(0) > 0,
//! ∫f = 1 and f(u) = f(−u). Its first and second antiderivatives are closed
//! form, so convolutions and the composition (π∗ι_γˢ)∗ι_ε are evaluated
//! analytically, never by quadrature.

use crate::grid::DensityField;
use crate::lattice::Configuration;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// View of a configuration as the measure π^N = (1/N) Σ η(x) δ_{x/N}.
#[derive(Debug, Clone, Copy)]
pub struct EmpiricalMeasure<'a> {
    cfg: &'a Configuration,
}

impl<'a> EmpiricalMeasure<'a> {
    pub fn new(cfg: &'a Configuration) -> Self {
        EmpiricalMeasure { cfg }
    }

    pub fn n(&self) -> usize {
        self.cfg.n()
    }

    /// Total mass, always ≤ 1.
    pub fn mass(&self) -> f64 {
        self.cfg.particles() as f64 / self.cfg.n() as f64
    }

    /// ⟨π^N, G⟩ = (1/N) Σ_x G(x/N) η(x).
    pub fn pair(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = self.cfg.n();
        (0..n)
            .filter(|&x| self.cfg.occ(x))
            .map(|x| g(x as f64 / n as f64))
            .sum::<f64>()
            / n as f64
    }
}

/// The cut-respecting box kernel ι_ε.
#[derive(Debug, Clone, Copy)]
pub struct BoxKernel {
    pub eps: f64,
}

impl BoxKernel {
    pub fn new(eps: f64) -> Result<Self> {
        if !(0.0 < eps && eps < 1.0) {
            return Err(Error::Domain(format!("box width {eps} outside (0,1)")));
        }
        Ok(BoxKernel { eps })
    }

    /// Window (a, b] of the kernel at v, and whether v sits in the frozen
    /// strip [−ε, 0) ≡ [1−ε, 1).
    pub fn window(&self, v: f64) -> (f64, f64) {
        if v >= 1.0 - self.eps {
            (1.0 - self.eps, 1.0)
        } else {
            (v, v + self.eps)
        }
    }

    /// ∫ ι_ε(u, v) du, identically 1.
    pub fn normalization(&self, v: f64) -> f64 {
        let (a, b) = self.window(v);
        (b - a) / self.eps
    }
}

/// Local particle average η^{εN}(x): the mean occupation over the box of
/// ⌊εN⌋ sites to the right of x, or over the frozen box {−⌊εN⌋,…,−1} when the
/// sliding box would straddle the slow bond.
pub fn local_average(c: &Configuration, x: usize, eps: f64) -> Result<f64> {
    let n = c.n();
    let k = (eps * n as f64).floor() as usize;
    if k < 1 {
        return Err(Error::Domain(format!(
            "εN = {} < 1: box is empty",
            eps * n as f64
        )));
    }
    assert!(x < n);
    let count: usize = if x + k >= n {
        (n - k..n).filter(|&y| c.occ(y)).count()
    } else {
        (x + 1..=x + k).filter(|&y| c.occ(y)).count()
    };
    Ok(count as f64 / k as f64)
}

/// Exact (π^N∗ι_ε)(v), with the kernel width snapped to ⌊εN⌋/N so lattice
/// atoms are counted consistently with [`local_average`].
pub fn box_at(pi: &EmpiricalMeasure, eps: f64, v: f64) -> f64 {
    let n = pi.n();
    let k = (eps * n as f64).floor() as usize;
    assert!(k >= 1, "εN < 1");
    let eff = k as f64 / n as f64;
    let kernel = BoxKernel { eps: eff };
    let (a, b) = kernel.window(v);
    let mut count = 0usize;
    for x in 0..n {
        let u = x as f64 / n as f64;
        // half-open (a, b], with the frozen window closed on the left
        let inside = if v >= 1.0 - eff {
            u >= a && u < b
        } else {
            u > a && u <= b + 1e-15
        };
        if inside && pi.cfg.occ(x) {
            count += 1;
        }
    }
    count as f64 / k as f64
}

/// (π^N∗ι_ε) sampled at the m cell centers of the solver grid.
pub fn convolve_box(pi: &EmpiricalMeasure, eps: f64, m: usize) -> DensityField {
    let mut field = DensityField::new(
        (0..m)
            .map(|j| box_at(pi, eps, (j as f64 + 0.5) / m as f64))
            .collect(),
    );
    field.set_side(box_at(pi, eps, 0.0), box_at(pi, eps, 1.0 - 1e-12));
    field
}

/// ∫_a^b ρ for a piecewise-constant field, exact.
fn integral_pc(rho: &DensityField, a: f64, b: f64) -> f64 {
    debug_assert!(a <= b && a >= -1e-12 && b <= 1.0 + 1e-12);
    let m = rho.m() as f64;
    let mut acc = 0.0;
    let j0 = ((a * m).floor() as isize).clamp(0, rho.m() as isize - 1) as usize;
    let j1 = ((b * m).ceil() as isize).clamp(1, rho.m() as isize) as usize;
    for j in j0..j1 {
        let lo = (j as f64 / m).max(a);
        let hi = ((j + 1) as f64 / m).min(b);
        if hi > lo {
            acc += rho.values()[j] * (hi - lo);
        }
    }
    acc
}

/// (ρ∗ι_ε) for a grid density, evaluated exactly per cell and sampled on the
/// same grid.
pub fn convolve_box_field(rho: &DensityField, eps: f64) -> DensityField {
    let kernel = BoxKernel { eps };
    let m = rho.m();
    let at = |v: f64| {
        let (a, b) = kernel.window(v);
        integral_pc(rho, a, b) / eps
    };
    let mut out = DensityField::new((0..m).map(|j| at((j as f64 + 0.5) / m as f64)).collect());
    out.set_side(at(0.0), at(1.0 - 1e-12));
    out
}

/// The smooth approximation of identity ι_γˢ.
#[derive(Debug, Clone, Copy)]
pub struct SmoothKernel {
    pub gamma: f64,
}

impl SmoothKernel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0 < gamma && gamma < 1.0) {
            return Err(Error::Domain(format!("γ = {gamma} outside (0,1)")));
        }
        Ok(SmoothKernel { gamma })
    }

    /// Base bump f(u) = 2(1 + cos 4πu) on |u| ≤ 1/4.
    pub fn base(u: f64) -> f64 {
        if u.abs() >= 0.25 {
            0.0
        } else {
            2.0 * (1.0 + (4.0 * PI * u).cos())
        }
    }

    /// ι_γˢ(z) = f(z/γ)/γ, supported on |z| ≤ γ/4.
    pub fn value(&self, z: f64) -> f64 {
        Self::base(z / self.gamma) / self.gamma
    }

    /// ∫_{−∞}^z ι_γˢ.
    pub fn cdf(&self, z: f64) -> f64 {
        let x = z / self.gamma;
        if x <= -0.25 {
            0.0
        } else if x >= 0.25 {
            1.0
        } else {
            2.0 * x + 0.5 + (4.0 * PI * x).sin() / (2.0 * PI)
        }
    }

}

/// Kernel images of a torus point: shifts making |v − c| computations valid
/// on the real line for supports narrower than 1/2.
fn images(c: f64) -> [f64; 3] {
    [c - 1.0, c, c + 1.0]
}

/// (π^N∗ι_γˢ)(v): continuous mollification of the empirical measure.
pub fn smooth_at(pi: &EmpiricalMeasure, gamma: f64, v: f64) -> f64 {
    let kernel = SmoothKernel { gamma };
    let n = pi.n();
    let mut acc = 0.0;
    for x in 0..n {
        if !pi.cfg.occ(x) {
            continue;
        }
        for c in images(x as f64 / n as f64) {
            acc += kernel.value(v - c);
        }
    }
    acc / n as f64
}

/// (π^N∗ι_γˢ) sampled at the m cell centers.
pub fn convolve_smooth(pi: &EmpiricalMeasure, gamma: f64, m: usize) -> DensityField {
    let mut field = DensityField::new(
        (0..m)
            .map(|j| smooth_at(pi, gamma, (j as f64 + 0.5) / m as f64))
            .collect(),
    );
    field.set_side(smooth_at(pi, gamma, 0.0), smooth_at(pi, gamma, 1.0));
    field
}

/// (ρ∗ι_γˢ) for a grid density, exact per cell (torus convolution).
pub fn convolve_smooth_field(rho: &DensityField, gamma: f64) -> DensityField {
    let kernel = SmoothKernel { gamma };
    let m = rho.m();
    let h = 1.0 / m as f64;
    let at = |v: f64| {
        let mut acc = 0.0;
        for j in 0..m {
            let l = j as f64 * h;
            for c in [l - 1.0, l, l + 1.0] {
                let w = kernel.cdf(v - c) - kernel.cdf(v - c - h);
                if w != 0.0 {
                    acc += rho.values()[j] * w;
                }
            }
        }
        acc
    };
    let mut out = DensityField::new((0..m).map(|j| at((j as f64 + 0.5) / m as f64)).collect());
    out.set_side(at(0.0), at(1.0));
    out
}

/// Exact composition ((π^N∗ι_γˢ)∗ι_ε)(v): the box integral of the smoothed
/// measure reduces to differences of the smooth kernel's CDF at the window
/// ends.
pub fn smooth_then_box(pi: &EmpiricalMeasure, gamma: f64, eps: f64, v: f64) -> f64 {
    let n = pi.n();
    let k = (eps * n as f64).floor() as usize;
    assert!(k >= 1, "εN < 1");
    let eff = k as f64 / n as f64;
    let box_kernel = BoxKernel { eps: eff };
    let smooth = SmoothKernel { gamma };
    let (a, b) = box_kernel.window(v);
    let mut acc = 0.0;
    for x in 0..n {
        if !pi.cfg.occ(x) {
            continue;
        }
        for c in images(x as f64 / n as f64) {
            acc += smooth.cdf(b - c) - smooth.cdf(a - c);
        }
    }
    acc / (n as f64 * eff)
}

/// The bond observables g₁(η) = η(0)(1−η(1)), g₂(η) = η(1)(1−η(0)) and their
/// continuum versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondObservable {
    G1,
    G2,
}

impl BondObservable {
    /// Value on a pair of occupancies (η(0), η(1)).
    pub fn microscopic(&self, eta0: bool, eta1: bool) -> f64 {
        match self {
            BondObservable::G1 => f64::from(eta0 && !eta1),
            BondObservable::G2 => f64::from(eta1 && !eta0),
        }
    }

    /// g̃ᵢ(α, β): g̃₁ = α(1−β), g̃₂ = β(1−α).
    pub fn continuum(&self, alpha: f64, beta: f64) -> f64 {
        match self {
            BondObservable::G1 => alpha * (1.0 - beta),
            BondObservable::G2 => beta * (1.0 - alpha),
        }
    }
}
