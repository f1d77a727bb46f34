//! Grid functions on the torus cut at the slow bond.
//!
//! A [`DensityField`] stores cell-center values ρ(u_j), u_j = (j+½)/m on
//! (0,1), together with the two side values ρ(0⁺) (u → 0) and ρ(0⁻) (u → 1).
//! Side values are either set exactly (analytic constructions) or
//! extrapolated linearly from the two adjacent cells.

use std::io::Write;

use crate::profile::DensityProfile;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    values: Vec<f64>,
    /// Exact (ρ(0⁺), ρ(0⁻)) when known; otherwise extrapolated on demand.
    side: Option<(f64, f64)>,
}

impl DensityField {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2, "field needs at least two cells");
        DensityField { values, side: None }
    }

    pub fn constant(value: f64, m: usize) -> Self {
        let mut f = DensityField::new(vec![value; m]);
        f.side = Some((value, value));
        f
    }

    /// Cell-center sampling of a named profile; side values from the profile
    /// limits at u → 0⁺ and u → 1⁻.
    pub fn from_profile(profile: &DensityProfile, m: usize) -> Self {
        let mut f = Self::from_fn(|u| profile.value(u), m);
        f.side = Some((profile.value(0.0), profile.value(1.0 - 1e-12)));
        f
    }

    pub fn from_fn(f: impl Fn(f64) -> f64, m: usize) -> Self {
        let values = (0..m).map(|j| f((j as f64 + 0.5) / m as f64)).collect();
        let mut field = DensityField::new(values);
        field.side = Some((f(0.0), f(1.0)));
        field
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        self.side = None;
        &mut self.values
    }

    pub fn center(&self, j: usize) -> f64 {
        (j as f64 + 0.5) / self.values.len() as f64
    }

    pub fn set_side(&mut self, plus: f64, minus: f64) {
        self.side = Some((plus, minus));
    }

    /// (ρ(0⁺), ρ(0⁻)): exact when set, otherwise linear extrapolation from
    /// the two adjacent cell centers, clamped to [0,1].
    pub fn side_values(&self) -> (f64, f64) {
        if let Some(s) = self.side {
            return s;
        }
        let v = &self.values;
        let m = v.len();
        let plus = (1.5 * v[0] - 0.5 * v[1]).clamp(0.0, 1.0);
        let minus = (1.5 * v[m - 1] - 0.5 * v[m - 2]).clamp(0.0, 1.0);
        (plus, minus)
    }

    /// Total mass ∫ρ = (1/m)Σρ_j (midpoint rule, exact for cell averages).
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// ∫ρ(u)G(u)du by the midpoint rule on cells.
    pub fn integral_against(&self, g: impl Fn(f64) -> f64) -> f64 {
        let m = self.values.len() as f64;
        self.values
            .iter()
            .enumerate()
            .map(|(j, &v)| v * g((j as f64 + 0.5) / m))
            .sum::<f64>()
            / m
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// L¹ distance between two fields; the finer grid must be an integer
    /// refinement of the coarser one (cells are averaged down).
    pub fn l1_distance(&self, other: &DensityField) -> f64 {
        let (coarse, fine) = if self.m() <= other.m() {
            (self, other)
        } else {
            (other, self)
        };
        assert!(
            fine.m() % coarse.m() == 0,
            "grids must nest for L1 comparison"
        );
        let r = fine.m() / coarse.m();
        let mut acc = 0.0;
        for (j, &c) in coarse.values.iter().enumerate() {
            let avg = fine.values[j * r..(j + 1) * r].iter().sum::<f64>() / r as f64;
            acc += (c - avg).abs();
        }
        acc / coarse.m() as f64
    }

    /// Pointwise convex combination θ·self + (1−θ)·other.
    pub fn convex_with(&self, other: &DensityField, theta: f64) -> DensityField {
        assert_eq!(self.m(), other.m());
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| theta * a + (1.0 - theta) * b)
            .collect();
        let mut f = DensityField::new(values);
        let (ap, am) = self.side_values();
        let (bp, bm) = other.side_values();
        f.side = Some((theta * ap + (1.0 - theta) * bp, theta * am + (1.0 - theta) * bm));
        f
    }

    pub fn check_bounds(&self, t: f64) -> Result<()> {
        for &v in &self.values {
            if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                return Err(Error::BoundsViolated { t, value: v });
            }
        }
        Ok(())
    }

    /// CSV rows `u,value` on the cell-center grid.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "u,value")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.center(j), v)?;
        }
        Ok(())
    }
}

/// A density trajectory: fields at increasing times, the discrete analogue of
/// a path measure t ↦ ρ_t(u)du.
#[derive(Debug, Clone)]
pub struct DensityPath {
    pub times: Vec<f64>,
    pub fields: Vec<DensityField>,
}

impl DensityPath {
    pub fn new(times: Vec<f64>, fields: Vec<DensityField>) -> Self {
        assert_eq!(times.len(), fields.len());
        assert!(times.len() >= 2, "path needs at least two instants");
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        DensityPath { times, fields }
    }

    /// Sample an analytic space-time density on an m-cell grid at `nt`+1
    /// uniformly spaced instants of [0, t_end].
    pub fn from_fn(rho: impl Fn(f64, f64) -> f64, m: usize, t_end: f64, nt: usize) -> Self {
        let times: Vec<f64> = (0..=nt).map(|i| t_end * i as f64 / nt as f64).collect();
        let fields = times
            .iter()
            .map(|&t| DensityField::from_fn(|u| rho(t, u), m))
            .collect();
        DensityPath::new(times, fields)
    }

    pub fn m(&self) -> usize {
        self.fields[0].m()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn initial(&self) -> &DensityField {
        &self.fields[0]
    }

    pub fn terminal(&self) -> &DensityField {
        self.fields.last().unwrap()
    }

    /// Pointwise convex combination of two paths on identical grids.
    pub fn convex_with(&self, other: &DensityPath, theta: f64) -> DensityPath {
        assert_eq!(self.times.len(), other.times.len());
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.convex_with(b, theta))
            .collect();
        DensityPath::new(self.times.clone(), fields)
    }

    /// The ε-interpolation ε·1̃ + (1−2ε)·ρ + ε·0̃ = ε + (1−2ε)ρ.
    pub fn interior_interpolation(&self, eps: f64) -> DensityPath {
        let fields = self
            .fields
            .iter()
            .map(|f| {
                let values = f.values().iter().map(|v| eps + (1.0 - 2.0 * eps) * v).collect();
                let mut g = DensityField::new(values);
                let (p, m) = f.side_values();
                g.set_side(eps + (1.0 - 2.0 * eps) * p, eps + (1.0 - 2.0 * eps) * m);
                g
            })
            .collect();
        DensityPath::new(self.times.clone(), fields)
    }

    /// ∫₀^T f(t, ρ_t) dt by the trapezoid rule over the stored instants.
    pub fn time_integral(&self, f: impl Fn(f64, &DensityField) -> f64) -> f64 {
        let mut acc = 0.0;
        let mut prev: Option<(f64, f64)> = None;
        for (t, field) in self.times.iter().zip(&self.fields) {
            let v = f(*t, field);
            if let Some((tp, vp)) = prev {
                acc += 0.5 * (v + vp) * (t - tp);
            }
            prev = Some((*t, v));
        }
        acc
    }

    /// CSV rows `t,u,rho`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "t,u,rho")?;
        for (t, field) in self.times.iter().zip(&self.fields) {
            for (j, v) in field.values().iter().enumerate() {
                writeln!(w, "{},{},{}", t, field.center(j), v)?;
            }
        }
        Ok(())
    }
}

/// Trapezoid rule over sampled (x, y) pairs.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn mass_and_integrals() {
        let f = DensityField::from_fn(|u| u, 1000);
        assert_abs_diff_eq!(f.mass(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.integral_against(|u| u), 1.0 / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn side_extrapolation_is_linear() {
        let f = DensityField::new(vec![0.1, 0.2, 0.3, 0.4]);
        let (plus, minus) = f.side_values();
        assert_abs_diff_eq!(plus, 0.05, epsilon = 1e-15);
        assert_abs_diff_eq!(minus, 0.45, epsilon = 1e-15);
    }

    #[test]
    fn l1_distance_with_nested_grids() {
        let coarse = DensityField::constant(0.5, 4);
        let fine = DensityField::constant(0.5, 8);
        assert_abs_diff_eq!(coarse.l1_distance(&fine), 0.0, epsilon = 1e-15);
        let g = DensityField::constant(0.75, 8);
        assert_abs_diff_eq!(coarse.l1_distance(&g), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn time_integral_trapezoid() {
        let path = DensityPath::from_fn(|t, _| t, 4, 2.0, 8);
        // ∫₀² mass(t) dt = ∫ t dt = 2
        let v = path.time_integral(|_, f| f.mass());
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }
}
