//! Exact continuous-time simulation of the exclusion process with a slow
//! bond, in symmetric or weakly asymmetric mode, under diffusive scaling.
//!
//! Sites live on the discrete torus {0,…,N−1} with site −1 identified with
//! N−1. Bond x connects sites x and x+1 (mod N); the slow bond is x = N−1 and
//! carries the exchange-rate factor 1/N, all other bonds factor 1. The whole
//! generator is speeded up by N².
//!
//! Symmetric dynamics are simulated event-driven with a Fenwick tree over the
//! per-bond rates. Weakly asymmetric dynamics have time-dependent rates
//! e^{±δ_N H_x}; they are simulated by thinning against a per-bond bound
//! N²·ξ_x·exp(sup_t |δ_N H_x|), which preserves statistical exactness (the
//! acceptance ratio is asserted ≤ 1 at every proposal). Each trajectory is
//! deterministic given (seed, replica index): replicas are independent
//! ChaCha streams.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fenwick::RateTree;
use crate::field::{FieldSpec, PerturbationField};
use crate::profile::DensityProfile;
use crate::{Error, Result};

/// Occupancy configuration η ∈ {0,1}^{𝕋_N}, one particle per site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    occ: Vec<bool>,
}

impl Configuration {
    pub fn new(occ: Vec<bool>) -> Result<Self> {
        if occ.len() < 2 {
            return Err(Error::InvalidSpec("lattice needs at least 2 sites".into()));
        }
        Ok(Configuration { occ })
    }

    pub fn empty(n: usize) -> Self {
        Configuration { occ: vec![false; n] }
    }

    pub fn full(n: usize) -> Self {
        Configuration { occ: vec![true; n] }
    }

    /// Exact Bernoulli(α) product sample.
    pub fn bernoulli<R: Rng>(n: usize, alpha: f64, rng: &mut R) -> Self {
        Configuration {
            occ: (0..n).map(|_| rng.gen::<f64>() < alpha).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.occ.len()
    }

    pub fn occ(&self, x: usize) -> bool {
        self.occ[x]
    }

    pub fn occupancies(&self) -> &[bool] {
        &self.occ
    }

    pub fn particles(&self) -> usize {
        self.occ.iter().filter(|&&b| b).count()
    }

    /// True when the bond (x, x+1 mod N) joins different occupancies.
    pub fn bond_active(&self, x: usize) -> bool {
        let n = self.occ.len();
        self.occ[x] != self.occ[(x + 1) % n]
    }

    pub fn exchange_in_place(&mut self, x: usize) {
        let n = self.occ.len();
        self.occ.swap(x, (x + 1) % n);
    }

    /// Packed LSB-first bitset, ⌈N/8⌉ bytes.
    pub fn to_bitset(&self) -> Vec<u8> {
        let mut bytes = vec![0u8; self.occ.len().div_ceil(8)];
        for (x, &b) in self.occ.iter().enumerate() {
            if b {
                bytes[x / 8] |= 1 << (x % 8);
            }
        }
        bytes
    }
}

/// η^{x,x+1}: exchange the occupancies at the ends of bond x.
pub fn exchange(c: &Configuration, x: usize) -> Configuration {
    assert!(x < c.n(), "bond index out of range");
    let mut next = c.clone();
    next.exchange_in_place(x);
    next
}

/// The exchange-rate factors ξ_x: 1 everywhere except 1/N at the slow bond.
#[derive(Debug, Clone, Copy)]
pub struct BondRates {
    n: usize,
}

impl BondRates {
    pub fn new(n: usize) -> Self {
        BondRates { n }
    }

    /// Index of the slow bond (between sites N−1 ≡ −1 and 0).
    pub fn slow_bond(&self) -> usize {
        self.n - 1
    }

    pub fn xi(&self, x: usize) -> f64 {
        assert!(x < self.n);
        if x == self.n - 1 {
            1.0 / self.n as f64
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Symmetric,
    WeaklyAsymmetric,
}

/// Everything needed to reproduce one simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsSpec {
    pub n: usize,
    pub mode: Mode,
    /// Present exactly when mode is weakly asymmetric.
    pub perturbation: Option<FieldSpec>,
    pub horizon: f64,
    pub seed: u64,
}

impl DynamicsSpec {
    pub fn symmetric(n: usize, horizon: f64, seed: u64) -> Self {
        DynamicsSpec {
            n,
            mode: Mode::Symmetric,
            perturbation: None,
            horizon,
            seed,
        }
    }

    pub fn weakly_asymmetric(n: usize, field: FieldSpec, horizon: f64, seed: u64) -> Self {
        DynamicsSpec {
            n,
            mode: Mode::WeaklyAsymmetric,
            perturbation: Some(field),
            horizon,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec("lattice needs at least 2 sites".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidSpec("horizon must be positive".into()));
        }
        match (self.mode, &self.perturbation) {
            (Mode::Symmetric, None) | (Mode::WeaklyAsymmetric, Some(_)) => {}
            (Mode::Symmetric, Some(_)) => {
                return Err(Error::InvalidSpec(
                    "symmetric mode must not carry a perturbation".into(),
                ))
            }
            (Mode::WeaklyAsymmetric, None) => {
                return Err(Error::InvalidSpec(
                    "weakly asymmetric mode requires a perturbation".into(),
                ))
            }
        }
        if let Some(f) = &self.perturbation {
            f.validate()?;
        }
        Ok(())
    }
}

/// One simulated path: the initial configuration, every exchange event, and
/// configuration snapshots on the requested observation schedule.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: DynamicsSpec,
    pub initial: Configuration,
    /// (time, bond) of every accepted exchange, strictly increasing times.
    pub events: Vec<(f64, usize)>,
    pub snapshots: Vec<(f64, Configuration)>,
}

impl Trajectory {
    pub fn final_configuration(&self) -> Configuration {
        let mut c = self.initial.clone();
        for &(_, bond) in &self.events {
            c.exchange_in_place(bond);
        }
        c
    }

    pub fn slow_bond_events(&self) -> usize {
        let slow = self.spec.n - 1;
        self.events.iter().filter(|&&(_, b)| b == slow).count()
    }

    /// CSV rows `time,site,occupancy`, one block per snapshot.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "time,site,occupancy")?;
        for (t, c) in &self.snapshots {
            for x in 0..c.n() {
                writeln!(w, "{},{},{}", t, x, u8::from(c.occ(x)))?;
            }
        }
        Ok(())
    }

    /// Packed binary snapshots. Header: N (u64 LE), T (f64 LE), snapshot
    /// count (u64 LE); then per snapshot the time (f64 LE) followed by the
    /// LSB-first occupancy bitset (⌈N/8⌉ bytes).
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.spec.n as u64).to_le_bytes())?;
        w.write_all(&self.spec.horizon.to_le_bytes())?;
        w.write_all(&(self.snapshots.len() as u64).to_le_bytes())?;
        for (t, c) in &self.snapshots {
            w.write_all(&t.to_le_bytes())?;
            w.write_all(&c.to_bitset())?;
        }
        Ok(())
    }
}

fn site_u(x: usize, n: usize) -> f64 {
    (x % n) as f64 / n as f64
}

/// δ_N H_x = H_t((x+1)/N) − H_t(x/N), with site N wrapped to u = 0 so that the
/// slow bond picks up the jump of H across the cut.
fn delta_h(field: &dyn PerturbationField, t: f64, x: usize, n: usize) -> f64 {
    field.h(t, site_u(x + 1, n)) - field.h(t, site_u(x, n))
}

/// Jump rate of bond x at time t, including the N² speed-up.
pub fn bond_rate(c: &Configuration, x: usize, t: f64, spec: &DynamicsSpec) -> Result<f64> {
    spec.validate()?;
    if !(0.0..=spec.horizon).contains(&t) {
        return Err(Error::InvalidSpec(format!(
            "time {t} outside [0, {}]",
            spec.horizon
        )));
    }
    let n = spec.n;
    assert!(x < n && c.n() == n);
    let speed = (n * n) as f64;
    let xi = BondRates::new(n).xi(x);
    let (a, b) = (c.occ(x), c.occ((x + 1) % n));
    Ok(match spec.mode {
        Mode::Symmetric => {
            if a != b {
                speed * xi
            } else {
                0.0
            }
        }
        Mode::WeaklyAsymmetric => {
            let field = spec.perturbation.as_ref().unwrap();
            let d = delta_h(field, t, x, n);
            let right = if a && !b { d.exp() } else { 0.0 };
            let left = if b && !a { (-d).exp() } else { 0.0 };
            speed * xi * (right + left)
        }
    })
}

/// Deterministic configuration associated to a profile γ by cumulative
/// rounding: occ[x] = ⌊N·F((x+1)/N)⌋ − ⌊N·F(x/N)⌋ with F the cumulative
/// integral of γ.
pub fn initial_from_profile(gamma: &DensityProfile, n: usize) -> Result<Configuration> {
    gamma.validate()?;
    if n < 2 {
        return Err(Error::InvalidSpec("lattice needs at least 2 sites".into()));
    }
    let nf = n as f64;
    let occ = (0..n)
        .map(|x| {
            let lo = (nf * gamma.cumulative(x as f64 / nf)).floor();
            let hi = (nf * gamma.cumulative((x + 1) as f64 / nf)).floor();
            (hi - lo) >= 0.5
        })
        .collect();
    Configuration::new(occ)
}

/// Statistically exact sample of the process; replica 0 stream.
pub fn simulate(
    spec: &DynamicsSpec,
    initial: &Configuration,
    observe_at: &[f64],
) -> Result<Trajectory> {
    simulate_replica(spec, initial, observe_at, 0)
}

/// Like [`simulate`], drawing randomness from the ChaCha stream
/// (spec.seed, replica): independent replicas for parallel Monte Carlo.
pub fn simulate_replica(
    spec: &DynamicsSpec,
    initial: &Configuration,
    observe_at: &[f64],
    replica: u64,
) -> Result<Trajectory> {
    spec.validate()?;
    if initial.n() != spec.n {
        return Err(Error::InvalidSpec(format!(
            "initial configuration has {} sites, spec demands {}",
            initial.n(),
            spec.n
        )));
    }
    if observe_at.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidSpec("observation times must be sorted".into()));
    }
    if observe_at
        .iter()
        .any(|&t| !(0.0..=spec.horizon).contains(&t))
    {
        return Err(Error::InvalidSpec(
            "observation times must lie in [0, horizon]".into(),
        ));
    }

    let n = spec.n;
    let horizon = spec.horizon;
    let rates = BondRates::new(n);
    let speed = (n * n) as f64;
    let field: Option<&FieldSpec> = spec.perturbation.as_ref();

    // Per-bond proposal bound: N²·ξ_x·exp(sup_t |δ_N H_x|) while active.
    let bounds: Vec<f64> = (0..n)
        .map(|x| {
            let envelope = match field {
                None => 1.0,
                Some(f) => f
                    .bond_diff_bound(horizon, site_u(x, n), site_u(x + 1, n))
                    .exp(),
            };
            speed * rates.xi(x) * envelope
        })
        .collect();

    let mut cfg = initial.clone();
    let weights: Vec<f64> = (0..n)
        .map(|x| if cfg.bond_active(x) { bounds[x] } else { 0.0 })
        .collect();
    let mut tree = RateTree::new(&weights);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(replica);

    let mut events = Vec::new();
    let mut snapshots = Vec::with_capacity(observe_at.len());
    let mut obs = observe_at.iter().copied().peekable();
    let mut t = 0.0;

    loop {
        let total = tree.total();
        if total <= 0.0 {
            // frozen configuration; flush remaining observations
            while let Some(&tau) = obs.peek() {
                snapshots.push((tau, cfg.clone()));
                obs.next();
            }
            break;
        }
        let dt = -(1.0 - rng.gen::<f64>()).ln() / total;
        let t_next = t + dt;
        while let Some(&tau) = obs.peek() {
            if tau < t_next.min(horizon) || (t_next > horizon && tau <= horizon) {
                snapshots.push((tau, cfg.clone()));
                obs.next();
            } else {
                break;
            }
        }
        if t_next > horizon {
            break;
        }
        t = t_next;
        let bond = tree.sample(rng.gen::<f64>() * total);
        let accept = match field {
            None => true,
            Some(f) => {
                let d = delta_h(f, t, bond, n);
                let actual = if cfg.occ(bond) { d.exp() } else { (-d).exp() };
                let ratio = speed * rates.xi(bond) * actual / bounds[bond];
                assert!(
                    ratio <= 1.0 + 1e-9,
                    "thinning bound violated at bond {bond}: ratio {ratio}"
                );
                rng.gen::<f64>() < ratio
            }
        };
        if accept {
            cfg.exchange_in_place(bond);
            events.push((t, bond));
            for b in [bond + n - 1, bond, bond + 1] {
                let b = b % n;
                let w = if cfg.bond_active(b) { bounds[b] } else { 0.0 };
                tree.set(b, w);
            }
        }
    }
    // observations exactly at the horizon (or any stragglers)
    while let Some(&tau) = obs.peek() {
        snapshots.push((tau, cfg.clone()));
        obs.next();
    }

    Ok(Trajectory {
        spec: spec.clone(),
        initial: initial.clone(),
        events,
        snapshots,
    })
}
