//! The elliptic inverse problem: given a smooth strictly interior density
//! path ρ, construct the unique perturbation H that makes ρ the solution of
//! the perturbed hydrodynamic equation.
//!
//! For each time t the construction is explicit:
//!
//!   α = ∫₀¹ dv/(2χ(ρ_t(v))),
//!   A = ∫₀¹ [∂_uρ_t(v) − ∂_t∫₀^v ρ_t(w)dw]/(2χ(ρ_t(v))) dv,
//!   B = ρ_t(1)(1−ρ_t(0)),   C = ρ_t(0)(1−ρ_t(1)),
//!
//! z₀ the unique root of z = (B e^{−z} − C e^{z})α + A, and
//!
//!   H_t(u) = (B e^{−z₀} − C e^{z₀}) ∫₀^u dv/(2χ) + ∫₀^u [∂_uρ − ∂_t∫ρ]/(2χ) dv,
//!
//! gauge-fixed by H_t(0) = 0. Here u = 0 is the side 0⁺ of the cut and u = 1
//! the side 0⁻, so the jump is δH(t) = −H_t(1) = −z₀(t): the root equation
//! makes the quadrature value of H_t(1) equal z₀ identically.
//!
//! g(z) = z − (Be^{−z} − Ce^{z})α − A has g′ = 1 + α(Be^{−z} + Ce^{z}) > 0, so
//! bisection on an expanding bracket always converges; two Newton polish
//! steps push the residual to ~1e−15.

use crate::field::PerturbationField;
use crate::grid::DensityPath;
use crate::rate::chi;
use crate::{Error, Result};

/// Per-time data of the elliptic system.
#[derive(Debug, Clone, Copy)]
pub struct EllipticCoefficients {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Root of the transcendental boundary equation.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub z0: f64,
    pub residual: f64,
    pub iterations: u32,
}

fn g(c: &EllipticCoefficients, z: f64) -> f64 {
    z - (c.b * (-z).exp() - c.c * z.exp()) * c.alpha - c.a
}

fn g_prime(c: &EllipticCoefficients, z: f64) -> f64 {
    1.0 + c.alpha * (c.b * (-z).exp() + c.c * z.exp())
}

/// Bisection to ~1e−13 on an expanding bracket, then Newton polish.
pub fn solve_root(coeff: &EllipticCoefficients) -> RootResult {
    assert!(
        coeff.b >= 0.0 && coeff.c >= 0.0 && coeff.alpha > 0.0,
        "invalid elliptic coefficients"
    );
    let mut lo = -(coeff.a.abs() + coeff.alpha * coeff.b + 1.0);
    let mut hi = coeff.a.abs() + coeff.alpha * coeff.c + 1.0;
    let mut grow = hi - lo;
    let mut iterations = 0u32;
    while g(coeff, lo) > 0.0 {
        lo -= grow;
        grow *= 2.0;
        iterations += 1;
        assert!(iterations < 200, "bracket expansion failed (g monotone?)");
    }
    grow = hi - lo;
    while g(coeff, hi) < 0.0 {
        hi += grow;
        grow *= 2.0;
        iterations += 1;
        assert!(iterations < 200, "bracket expansion failed (g monotone?)");
    }
    let mut z = 0.5 * (lo + hi);
    while hi - lo > 1e-13 * (1.0 + z.abs()) {
        z = 0.5 * (lo + hi);
        if g(coeff, z) > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        iterations += 1;
    }
    for _ in 0..2 {
        let step = g(coeff, z) / g_prime(coeff, z);
        let next = z - step;
        if next.is_finite() && next >= lo - 1.0 && next <= hi + 1.0 {
            z = next;
        }
        iterations += 1;
    }
    RootResult {
        z0: z,
        residual: g(coeff, z).abs(),
        iterations,
    }
}

/// Bisection-only variant, used to cross-check the hybrid solver.
pub fn solve_root_bisection(coeff: &EllipticCoefficients) -> RootResult {
    let mut lo = -(coeff.a.abs() + coeff.alpha * coeff.b + 1.0);
    let mut hi = coeff.a.abs() + coeff.alpha * coeff.c + 1.0;
    let mut grow = hi - lo;
    let mut iterations = 0u32;
    while g(coeff, lo) > 0.0 {
        lo -= grow;
        grow *= 2.0;
        iterations += 1;
    }
    grow = hi - lo;
    while g(coeff, hi) < 0.0 {
        hi += grow;
        grow *= 2.0;
        iterations += 1;
    }
    for _ in 0..200 {
        let z = 0.5 * (lo + hi);
        if g(coeff, z) > 0.0 {
            hi = z;
        } else {
            lo = z;
        }
        iterations += 1;
    }
    let z = 0.5 * (lo + hi);
    RootResult {
        z0: z,
        residual: g(coeff, z).abs(),
        iterations,
    }
}

/// Per-time slice data extracted from a grid path.
struct Slice {
    /// ρ at cell centers.
    rho: Vec<f64>,
    /// ∂_uρ at cell centers (central differences, one-sided at the ends).
    drho: Vec<f64>,
    /// ∂_t ∫₀^{u_j} ρ dw at cell centers (centered differences in t).
    dt_cum: Vec<f64>,
    /// side values (ρ(0⁺), ρ(0⁻)).
    sides: (f64, f64),
}

fn cumulative_at_centers(values: &[f64]) -> Vec<f64> {
    // ∫₀^{u_j}ρ = (Σ_{i<j} ρ_i + ρ_j/2)·h for piecewise-constant cells
    let h = 1.0 / values.len() as f64;
    let mut acc = 0.0;
    values
        .iter()
        .map(|&v| {
            let c = acc + 0.5 * v * h;
            acc += v * h;
            c
        })
        .collect()
}

fn slice(path: &DensityPath, ti: usize, interior_tol: f64) -> Result<Slice> {
    let f = &path.fields[ti];
    let v = f.values().to_vec();
    let m = v.len();
    let hm = m as f64;
    let lo = f.min().min(f.side_values().0).min(f.side_values().1);
    let hi = f.max().max(f.side_values().0).max(f.side_values().1);
    if lo < interior_tol || hi > 1.0 - interior_tol {
        return Err(Error::Domain(format!(
            "density touches [0,1] boundary (range [{lo}, {hi}], tol {interior_tol})"
        )));
    }
    let mut drho = vec![0.0; m];
    for j in 0..m {
        drho[j] = if j == 0 {
            (-1.5 * v[0] + 2.0 * v[1] - 0.5 * v[2]) * hm
        } else if j == m - 1 {
            (1.5 * v[m - 1] - 2.0 * v[m - 2] + 0.5 * v[m - 3]) * hm
        } else {
            (v[j + 1] - v[j - 1]) * 0.5 * hm
        };
    }
    // centered time difference of the cumulative integral
    let cum = cumulative_at_centers(&v);
    let (i0, i1) = if ti == 0 {
        (0, 1)
    } else if ti == path.times.len() - 1 {
        (ti - 1, ti)
    } else {
        (ti - 1, ti + 1)
    };
    let dt = path.times[i1] - path.times[i0];
    let cum0 = cumulative_at_centers(path.fields[i0].values());
    let cum1 = cumulative_at_centers(path.fields[i1].values());
    let dt_cum = cum0
        .iter()
        .zip(&cum1)
        .map(|(a, b)| (b - a) / dt)
        .collect();
    let _ = cum;
    Ok(Slice {
        rho: v,
        drho,
        dt_cum,
        sides: f.side_values(),
    })
}

/// α, A, B, C of the elliptic system at path instant `ti`.
pub fn coefficients(path: &DensityPath, ti: usize, interior_tol: f64) -> Result<EllipticCoefficients> {
    let s = slice(path, ti, interior_tol)?;
    let m = s.rho.len() as f64;
    let mut alpha = 0.0;
    let mut a = 0.0;
    for j in 0..s.rho.len() {
        let w = 1.0 / (2.0 * chi(s.rho[j]));
        alpha += w / m;
        a += (s.drho[j] - s.dt_cum[j]) * w / m;
    }
    let (plus, minus) = s.sides;
    Ok(EllipticCoefficients {
        alpha,
        a,
        b: minus * (1.0 - plus),
        c: plus * (1.0 - minus),
    })
}

/// The reconstructed perturbation: tabulated H and ∂_uH on the path grid,
/// gauge-fixed by H_t(0) = 0, with δH(t) = −z₀(t) exact by construction.
#[derive(Debug, Clone)]
pub struct BuiltPerturbation {
    times: Vec<f64>,
    /// H at the m+1 face nodes k/m, per time.
    h_nodes: Vec<Vec<f64>>,
    /// ∂_uH at cell centers, per time (the elliptic integrand, no numerical
    /// differentiation of H).
    du_cells: Vec<Vec<f64>>,
    z0: Vec<f64>,
}

impl BuiltPerturbation {
    pub fn z0(&self) -> &[f64] {
        &self.z0
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    fn time_bracket(&self, t: f64) -> (usize, usize, f64) {
        let times = &self.times;
        if t <= times[0] {
            return (0, 0, 0.0);
        }
        if t >= *times.last().unwrap() {
            let i = times.len() - 1;
            return (i, i, 0.0);
        }
        let mut i = match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return (i, i, 0.0),
            Err(i) => i,
        };
        i = i.max(1);
        let w = (t - times[i - 1]) / (times[i] - times[i - 1]);
        (i - 1, i, w)
    }

    fn h_at(&self, ti: usize, u: f64) -> f64 {
        let nodes = &self.h_nodes[ti];
        let m = nodes.len() - 1;
        let x = (u.clamp(0.0, 1.0)) * m as f64;
        let k = (x.floor() as usize).min(m - 1);
        let w = x - k as f64;
        nodes[k] * (1.0 - w) + nodes[k + 1] * w
    }

    fn du_at(&self, ti: usize, u: f64) -> f64 {
        let cells = &self.du_cells[ti];
        let m = cells.len();
        let x = u.clamp(0.0, 1.0) * m as f64 - 0.5;
        if x <= 0.0 {
            return cells[0];
        }
        if x >= (m - 1) as f64 {
            return cells[m - 1];
        }
        let k = x.floor() as usize;
        let w = x - k as f64;
        cells[k] * (1.0 - w) + cells[k + 1] * w
    }

    /// CSV rows `t,u,h,dh_du` on the tabulation grid.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,u,h,dh_du")?;
        for (i, t) in self.times.iter().enumerate() {
            let m = self.du_cells[i].len();
            for k in 0..=m {
                let u = k as f64 / m as f64;
                writeln!(w, "{},{},{},{}", t, u, self.h_nodes[i][k], self.du_at(i, u))?;
            }
        }
        Ok(())
    }
}

impl PerturbationField for BuiltPerturbation {
    fn h(&self, t: f64, u: f64) -> f64 {
        let (i0, i1, w) = self.time_bracket(t);
        (1.0 - w) * self.h_at(i0, u) + w * self.h_at(i1, u)
    }

    fn dh_du(&self, t: f64, u: f64) -> f64 {
        let (i0, i1, w) = self.time_bracket(t);
        (1.0 - w) * self.du_at(i0, u) + w * self.du_at(i1, u)
    }

    fn dh_dt(&self, t: f64, u: f64) -> f64 {
        // centered difference of the tabulated H in t
        let (i0, i1, _) = self.time_bracket(t);
        let (a, b) = if i0 == i1 {
            if i0 == 0 {
                (0, 1)
            } else if i0 == self.times.len() - 1 {
                (i0 - 1, i0)
            } else {
                (i0 - 1, i0 + 1)
            }
        } else {
            (i0, i1)
        };
        (self.h_at(b, u) - self.h_at(a, u)) / (self.times[b] - self.times[a])
    }

    fn d2h_du2(&self, t: f64, u: f64) -> f64 {
        // difference of the tabulated gradient; adequate for quadrature use
        let du = 1e-4;
        (self.dh_du(t, (u + du).min(1.0)) - self.dh_du(t, (u - du).max(0.0)))
            / ((u + du).min(1.0) - (u - du).max(0.0))
    }

    fn jump(&self, t: f64) -> f64 {
        let (i0, i1, w) = self.time_bracket(t);
        -((1.0 - w) * self.z0[i0] + w * self.z0[i1])
    }
}

/// Construct the perturbation H driving the path ρ, per time slice.
pub fn build_h(path: &DensityPath, interior_tol: f64) -> Result<BuiltPerturbation> {
    let mut h_nodes = Vec::with_capacity(path.times.len());
    let mut du_cells = Vec::with_capacity(path.times.len());
    let mut z0s = Vec::with_capacity(path.times.len());
    for ti in 0..path.times.len() {
        let s = slice(path, ti, interior_tol)?;
        let coeff = coefficients(path, ti, interior_tol)?;
        let root = solve_root(&coeff);
        let k = coeff.b * (-root.z0).exp() - coeff.c * root.z0.exp();
        let m = s.rho.len();
        let h = 1.0 / m as f64;
        let mut nodes = Vec::with_capacity(m + 1);
        let mut cells = Vec::with_capacity(m);
        let mut acc = 0.0;
        nodes.push(0.0); // gauge H_t(0) = 0
        for j in 0..m {
            let integrand = (k + s.drho[j] - s.dt_cum[j]) / (2.0 * chi(s.rho[j]));
            cells.push(integrand);
            acc += integrand * h;
            nodes.push(acc);
        }
        h_nodes.push(nodes);
        du_cells.push(cells);
        z0s.push(root.z0);
    }
    Ok(BuiltPerturbation {
        times: path.times.clone(),
        h_nodes,
        du_cells,
        z0: z0s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn coefficients_of_constant_paths() {
        let path = DensityPath::from_fn(|_, _| 0.5, 512, 1.0, 8);
        let c = coefficients(&path, 4, 1e-6).unwrap();
        assert_abs_diff_eq!(c.alpha, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.a, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.b, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c, 0.25, epsilon = 1e-12);

        let path = DensityPath::from_fn(|_, _| 0.3, 512, 1.0, 8);
        let c = coefficients(&path, 4, 1e-6).unwrap();
        assert_abs_diff_eq!(c.alpha, 1.0 / (2.0 * 0.3 * 0.7), epsilon = 1e-12);
        assert_abs_diff_eq!(c.b, 0.21, epsilon = 1e-12);
        assert_abs_diff_eq!(c.c, 0.21, epsilon = 1e-12);
        // α ≥ 2 always, since χ ≤ 1/4
        assert!(c.alpha >= 2.0);
    }

    #[test]
    fn rejects_paths_touching_bounds() {
        let path = DensityPath::from_fn(|_, u| 0.5 + 0.5 * (2.0 * PI * u).sin(), 256, 1.0, 4);
        assert!(coefficients(&path, 2, 0.05).is_err());
        assert!(build_h(&path, 0.05).is_err());
    }

    #[test]
    fn root_examples() {
        // α=2, A=0, B=C=1/4: z = −sinh z forces z = 0
        let r = solve_root(&EllipticCoefficients {
            alpha: 2.0,
            a: 0.0,
            b: 0.25,
            c: 0.25,
        });
        assert_abs_diff_eq!(r.z0, 0.0, epsilon = 1e-14);
        assert!(r.residual <= 1e-12);
        // B = C = 0: z = A
        let r = solve_root(&EllipticCoefficients {
            alpha: 3.0,
            a: -1.7,
            b: 0.0,
            c: 0.0,
        });
        assert_abs_diff_eq!(r.z0, -1.7, epsilon = 1e-14);
    }

    #[test]
    fn random_roots_unique_and_bracketed() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let coeff = EllipticCoefficients {
                alpha: 2.0 + 8.0 * rng.gen::<f64>(),
                a: -3.0 + 6.0 * rng.gen::<f64>(),
                b: 0.25 * rng.gen::<f64>(),
                c: 0.25 * rng.gen::<f64>(),
            };
            let hybrid = solve_root(&coeff);
            let bisect = solve_root_bisection(&coeff);
            assert!(hybrid.residual <= 1e-12, "residual {}", hybrid.residual);
            assert!((hybrid.z0 - bisect.z0).abs() <= 1e-10);
            assert!(g(&coeff, hybrid.z0 - 1e-6) < 0.0);
            assert!(g(&coeff, hybrid.z0 + 1e-6) > 0.0);
        }
    }

    #[test]
    fn stationary_half_density_builds_zero_field() {
        let path = DensityPath::from_fn(|_, _| 0.5, 256, 0.5, 8);
        let built = build_h(&path, 1e-6).unwrap();
        for &z in built.z0() {
            assert_abs_diff_eq!(z, 0.0, epsilon = 1e-13);
        }
        for t in [0.0, 0.2, 0.5] {
            for u in [0.0, 0.3, 0.7, 1.0] {
                assert_abs_diff_eq!(built.h(t, u), 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!(built.dh_du(t, u), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn quadrature_self_convergence() {
        let rho = |t: f64, u: f64| 0.5 + 0.25 * (2.0 * PI * u).cos() * (1.0 - 0.4 * t);
        let coarse = DensityPath::from_fn(rho, 2048, 0.5, 16);
        let fine = DensityPath::from_fn(rho, 4096, 0.5, 16);
        let c0 = coefficients(&coarse, 8, 1e-6).unwrap();
        let c1 = coefficients(&fine, 8, 1e-6).unwrap();
        assert!((c0.alpha - c1.alpha).abs() <= 1e-6);
        assert!((c0.a - c1.a).abs() <= 1e-6);
        assert!((c0.b - c1.b).abs() <= 1e-8);
    }

    #[test]
    fn elliptic_equation_residual_on_analytic_profile() {
        // substitute (ρ, built H) into
        // ∂²_uH + (∂_uχ(ρ)/χ(ρ))∂_uH = (Δρ − ∂_tρ)/(2χ(ρ))
        let rho = |t: f64, u: f64| 0.5 + 0.2 * (2.0 * PI * u).cos() * (1.0 + 0.5 * t);
        let drho_du = |t: f64, u: f64| -0.4 * PI * (2.0 * PI * u).sin() * (1.0 + 0.5 * t);
        let d2rho = |t: f64, u: f64| -0.8 * PI * PI * (2.0 * PI * u).cos() * (1.0 + 0.5 * t);
        let drho_dt = |_t: f64, u: f64| 0.1 * (2.0 * PI * u).cos();
        let m = 2048;
        let path = DensityPath::from_fn(rho, m, 0.25, 32);
        let built = build_h(&path, 1e-6).unwrap();
        let t = 0.125;
        let mut worst = 0.0f64;
        for j in 1..m - 1 {
            let u = (j as f64 + 0.5) / m as f64;
            let r = rho(t, u);
            let du = built.dh_du(t, u);
            let d2 = (built.dh_du(t, u + 1.0 / m as f64) - built.dh_du(t, u - 1.0 / m as f64))
                / (2.0 / m as f64);
            let lhs = d2 + (1.0 - 2.0 * r) * drho_du(t, u) / chi(r) * du;
            let rhs = (d2rho(t, u) - drho_dt(t, u)) / (2.0 * chi(r));
            worst = worst.max((lhs - rhs).abs());
        }
        assert!(worst <= 1e-3, "elliptic residual {worst} too large");
    }

    #[test]
    fn z0_continuous_in_time() {
        let rho = |t: f64, u: f64| 0.5 + 0.2 * (2.0 * PI * u).cos() * (1.0 - 0.6 * t);
        let path = DensityPath::from_fn(rho, 512, 0.5, 64);
        let built = build_h(&path, 1e-6).unwrap();
        for w in built.z0().windows(2) {
            assert!((w[1] - w[0]).abs() < 0.02, "z0 jumps by {}", w[1] - w[0]);
        }
    }
}
