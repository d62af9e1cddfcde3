//! Step initial data on a large window: density profiles, second-class
//! particles and the single-walker duality.
//!
//! The lattice simulator here stores only per-site species counts and runs
//! rate-1 Poisson clocks on bonds, so it scales to windows of a few hundred
//! sites and thousands of trajectories.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{evolve_rows, SemigroupApprox};

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("q = {q} must lie in (0, 1)")))
    }
}

/// `m·d(y)`: the limiting density of step initial data at speed `y`.
pub fn limit_density(y: f64, q: f64, m: u32) -> Result<f64> {
    check_q(q)?;
    if m == 0 {
        return Err(Error::Domain("m must be positive".into()));
    }
    let v = 1.0 - q;
    let d = if y >= v {
        0.0
    } else if y <= -v {
        1.0
    } else {
        0.5 * (1.0 - y / v)
    };
    Ok(m as f64 * d)
}

/// Limit of the expected number of second-class particles at or left of `yt`.
///
/// Equals `m·d(-y)`: zero for `y ≤ -(1-q)`, `(m/2)(1 + y/(1-q))` inside the
/// fan, `m` for `y ≥ 1-q`.
pub fn second_class_limit(y: f64, q: f64, m: u32) -> Result<f64> {
    limit_density(-y, q, m)
}

/// Smallest half-width `W` keeping the fan and a `6√t` margin inside `[-W, W]`.
pub fn min_window(q: f64, t: f64) -> usize {
    ((1.0 - q) * t).ceil() as usize + (6.0 * t.sqrt()).ceil() as usize
}

/// Independent stream for trajectory `id`.
pub fn trajectory_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Rate tables of ASEP(q, m) with every site of capacity `m`.
#[derive(Debug, Clone)]
pub struct BondRates {
    q: f64,
    m: u32,
    qpow: Vec<f64>,
    /// `[n]_q / [m]_q`.
    frac: Vec<f64>,
}

impl BondRates {
    pub fn new(q: f64, m: u32) -> Result<Self> {
        check_q(q)?;
        let qpow: Vec<f64> = (0..=2 * m + 1).map(|k| q.powi(k as i32)).collect();
        let qint = |n: u32| (0..n).map(|k| qpow[k as usize]).sum::<f64>();
        let frac = (0..=m).map(|n| qint(n) / qint(m)).collect();
        Ok(Self { q, m, qpow, frac })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Rate bound per bond.
    pub fn clock(&self) -> f64 {
        self.q.max(1.0)
    }
}

/// Species counts on the sites `x_min, x_min + 1, ...`; label 0 is the hole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    x_min: i64,
    labels: usize,
    counts: Vec<u32>,
}

impl Lattice {
    /// Builds a lattice from a per-site list of counts for labels `1..labels`;
    /// holes fill the remaining capacity.
    pub fn new(x_min: i64, sites: usize, labels: usize, m: u32, fill: impl Fn(i64) -> Vec<u32>) -> Result<Self> {
        if labels < 2 {
            return Err(Error::Domain("need at least one particle species besides holes".into()));
        }
        let mut counts = vec![0u32; sites * labels];
        for s in 0..sites {
            let x = x_min + s as i64;
            let parts = fill(x);
            if parts.len() != labels - 1 {
                return Err(Error::Structural(format!(
                    "site {x}: {} species given, expected {}",
                    parts.len(),
                    labels - 1
                )));
            }
            let total: u32 = parts.iter().sum();
            if total > m {
                return Err(Error::Domain(format!("site {x} holds {total} particles, capacity {m}")));
            }
            counts[s * labels] = m - total;
            counts[s * labels + 1..(s + 1) * labels].copy_from_slice(&parts);
        }
        Ok(Self { x_min, labels, counts })
    }

    pub fn x_min(&self) -> i64 {
        self.x_min
    }

    pub fn sites(&self) -> usize {
        self.counts.len() / self.labels
    }

    pub fn x_max(&self) -> i64 {
        self.x_min + self.sites() as i64 - 1
    }

    /// Count of `label` at site `x`.
    pub fn count(&self, x: i64, label: usize) -> u32 {
        let s = (x - self.x_min) as usize;
        self.counts[s * self.labels + label]
    }

    /// Resolves one bond ring with mark `u ∈ [0,1)`; returns whether anything moved.
    pub fn ring(&mut self, bond: usize, u: f64, r: &BondRates) -> bool {
        let k = self.labels;
        let (a, b) = (bond * k, (bond + 1) * k);
        let mut target = u * r.clock();
        // larger label `i` at the left site moves right (rate 1) or at the right site moves left (rate q)
        for i in 1..k {
            for j in 0..i {
                let (ai, aj, bi, bj) = (self.counts[a + i], self.counts[a + j], self.counts[b + i], self.counts[b + j]);
                if ai > 0 && bj > 0 {
                    let above: u32 = self.counts[a + i + 1..a + k].iter().sum();
                    let below: u32 = self.counts[b..b + j].iter().sum();
                    let rate =
                        r.qpow[above as usize] * r.frac[ai as usize] * r.qpow[below as usize] * r.frac[bj as usize];
                    if target < rate {
                        self.swap(a, b, i, j);
                        return true;
                    }
                    target -= rate;
                }
                if aj > 0 && bi > 0 {
                    let above: u32 = self.counts[a + j + 1..a + k].iter().sum();
                    let below: u32 = self.counts[b..b + i].iter().sum();
                    let rate = r.q
                        * r.qpow[above as usize]
                        * r.frac[aj as usize]
                        * r.qpow[below as usize]
                        * r.frac[bi as usize];
                    if target < rate {
                        self.swap(a, b, j, i);
                        return true;
                    }
                    target -= rate;
                }
            }
        }
        false
    }

    /// Moves `from_left` from the left site to the right one and `from_right` back.
    fn swap(&mut self, a: usize, b: usize, from_left: usize, from_right: usize) {
        self.counts[a + from_left] -= 1;
        self.counts[b + from_left] += 1;
        self.counts[b + from_right] -= 1;
        self.counts[a + from_right] += 1;
    }

    /// Runs the closed-window dynamics for time `t`; returns the number of rings.
    pub fn run<R: Rng + ?Sized>(&mut self, t: f64, r: &BondRates, rng: &mut R) -> u64 {
        let bonds = self.sites().saturating_sub(1);
        if bonds == 0 || t <= 0.0 {
            return 0;
        }
        let exp = Exp::new(r.clock() * bonds as f64).expect("positive rate");
        let mut time = 0.0;
        let mut rings = 0;
        loop {
            time += exp.sample(rng);
            if time > t {
                return rings;
            }
            let bond = rng.gen_range(0..bonds);
            let u: f64 = rng.gen();
            self.ring(bond, u, r);
            rings += 1;
        }
    }
}

/// Step initial data `k_x = m·1_{x ≤ shift}` on `[-W, W]`.
pub fn step_lattice(window: usize, m: u32, shift: i64) -> Lattice {
    let w = window as i64;
    Lattice::new(-w, 2 * window + 1, 2, m, |x| vec![if x <= shift { m } else { 0 }]).expect("valid step data")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HydroConfig {
    pub q: f64,
    pub m: u32,
    pub t: f64,
    pub trajectories: usize,
    pub seed: u64,
    /// Half-width; defaults to [`min_window`].
    pub window: Option<usize>,
    /// Number of `y` bins over `[-1.25(1-q), 1.25(1-q)]`.
    pub bins: usize,
}

impl HydroConfig {
    pub fn new(q: f64, m: u32, t: f64, trajectories: usize, seed: u64) -> Self {
        Self { q, m, t, trajectories, seed, window: None, bins: 50 }
    }

    fn validate(&self) -> Result<usize> {
        check_q(self.q)?;
        if self.m == 0 || self.trajectories < 2 || self.bins == 0 || !(self.t >= 0.0) {
            return Err(Error::Config(format!(
                "need m >= 1, trajectories >= 2, bins >= 1, t >= 0 (got m={}, trajectories={}, bins={}, t={})",
                self.m, self.trajectories, self.bins, self.t
            )));
        }
        let need = min_window(self.q, self.t);
        let w = self.window.unwrap_or(need);
        if w < need {
            return Err(Error::Config(format!(
                "window {w} too small: need at least {need} for q={}, t={}",
                self.q, self.t
            )));
        }
        Ok(w)
    }
}

/// One bin of a density profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub y: f64,
    pub rho_hat: f64,
    pub stderr: f64,
    pub rho_limit: f64,
    pub n_traj: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityProfile {
    pub window: usize,
    pub rows: Vec<DensityRow>,
}

impl DensityProfile {
    /// Fraction of bins with `|y| < y_max` where `|ρ̂ - limit| ≤ k·stderr`.
    pub fn fraction_within(&self, k: f64, y_max: f64) -> (usize, usize) {
        let inner: Vec<&DensityRow> = self.rows.iter().filter(|r| r.y.abs() < y_max).collect();
        let ok = inner.iter().filter(|r| (r.rho_hat - r.rho_limit).abs() <= k * r.stderr).count();
        (ok, inner.len())
    }
}

/// `|diff|` over the combined standard error; exact agreement scores 0.
fn z_score(diff: f64, se1: f64, se2: f64) -> f64 {
    let se = (se1 * se1 + se2 * se2).sqrt();
    if diff == 0.0 {
        0.0
    } else if se == 0.0 {
        f64::INFINITY
    } else {
        diff.abs() / se
    }
}

/// Mean and standard error of the mean.
fn mean_se(values: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n.max(2) - 1) as f64;
    (mean, (var / n as f64).sqrt(), n)
}

/// Monte Carlo density profile of step initial data, binned in `y = (x - 1/2)/t`.
///
/// Runs in the current rayon pool; results do not depend on its size.
pub fn run_hydro(cfg: &HydroConfig) -> Result<DensityProfile> {
    let w = cfg.validate()?;
    let rates = BondRates::new(cfg.q, cfg.m)?;
    let t = cfg.t;
    let half = 1.25 * (1.0 - cfg.q);
    let width = 2.0 * half / cfg.bins as f64;
    // sites of each bin
    let mut bins: Vec<(f64, Vec<i64>)> = Vec::new();
    for b in 0..cfg.bins {
        let lo = -half + b as f64 * width;
        let hi = lo + width;
        let sites: Vec<i64> = if t > 0.0 {
            (-(w as i64)..=w as i64)
                .filter(|&x| {
                    let y = (x as f64 - 0.5) / t;
                    y >= lo && y < hi
                })
                .collect()
        } else {
            Vec::new()
        };
        if !sites.is_empty() {
            bins.push((lo + 0.5 * width, sites));
        }
    }
    let per_traj: Vec<Vec<f64>> = (0..cfg.trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = trajectory_rng(cfg.seed, id);
            let mut lat = step_lattice(w, cfg.m, 0);
            lat.run(t, &rates, &mut rng);
            bins.iter()
                .map(|(_, sites)| sites.iter().map(|&x| lat.count(x, 1) as f64).sum::<f64>() / sites.len() as f64)
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(bins.len());
    for (b, (y, sites)) in bins.iter().enumerate() {
        let (rho_hat, stderr, n) = mean_se(per_traj.iter().map(|r| r[b]));
        let limit = sites.iter().map(|&x| limit_density((x as f64 - 0.5) / t, cfg.q, cfg.m)).sum::<Result<f64>>()?
            / sites.len() as f64;
        rows.push(DensityRow { y: *y, rho_hat, stderr, rho_limit: limit, n_traj: n });
    }
    Ok(DensityProfile { window: w, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondClassConfig {
    pub q: f64,
    pub m: u32,
    pub t: f64,
    pub trajectories: usize,
    pub seed: u64,
    pub window: Option<usize>,
    pub thresholds: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondClassRow {
    pub x: i64,
    pub count_direct: f64,
    pub stderr_direct: f64,
    pub rho0_shifted: f64,
    pub stderr_shifted: f64,
}

impl SecondClassRow {
    /// `|direct - shifted|` in units of the combined standard error.
    pub fn z_score(&self) -> f64 {
        z_score(self.count_direct - self.rho0_shifted, self.stderr_direct, self.stderr_shifted)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondClassStats {
    pub window: usize,
    pub n_traj: usize,
    pub rows: Vec<SecondClassRow>,
}

/// Second-class particles from the deformed step, against the density at 0
/// of the step shifted to each threshold.
///
/// Labels: 2 first class, 1 second class, 0 hole. The direct run starts with
/// `m` first-class particles on every `x < 0` and `m` second-class particles
/// at 0. The shifted run starts from `k_y = m·1_{y ≤ x}` and reads site 0.
pub fn second_class_counts(cfg: &SecondClassConfig) -> Result<SecondClassStats> {
    let hc = HydroConfig { window: cfg.window, ..HydroConfig::new(cfg.q, cfg.m, cfg.t, cfg.trajectories, cfg.seed) };
    let w = hc.validate()?;
    let wi = w as i64;
    if let Some(x) = cfg.thresholds.iter().find(|x| x.abs() >= wi) {
        return Err(Error::Config(format!("threshold {x} outside the window [-{w}, {w}]")));
    }
    let rates = BondRates::new(cfg.q, cfg.m)?;
    let m = cfg.m;
    let per_traj: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = trajectory_rng(cfg.seed, 2 * id);
            let mut lat = Lattice::new(-wi, 2 * w + 1, 3, m, |x| match x.cmp(&0) {
                std::cmp::Ordering::Less => vec![0, m],
                std::cmp::Ordering::Equal => vec![m, 0],
                std::cmp::Ordering::Greater => vec![0, 0],
            })
            .expect("valid deformed step");
            lat.run(cfg.t, &rates, &mut rng);
            let direct =
                cfg.thresholds.iter().map(|&x| (-wi..=x).map(|y| lat.count(y, 1) as f64).sum::<f64>()).collect();
            let mut rng = trajectory_rng(cfg.seed, 2 * id + 1);
            let shifted = cfg
                .thresholds
                .iter()
                .map(|&x| {
                    let mut s = step_lattice(w, m, x);
                    s.run(cfg.t, &rates, &mut rng);
                    s.count(0, 1) as f64
                })
                .collect();
            (direct, shifted)
        })
        .collect();
    let rows = cfg
        .thresholds
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let (count_direct, stderr_direct, _) = mean_se(per_traj.iter().map(|(d, _)| d[k]));
            let (rho0_shifted, stderr_shifted, _) = mean_se(per_traj.iter().map(|(_, s)| s[k]));
            SecondClassRow { x, count_direct, stderr_direct, rho0_shifted, stderr_shifted }
        })
        .collect();
    Ok(SecondClassStats { window: w, n_traj: cfg.trajectories, rows })
}

/// Expected second-class count at `x = yt` for a grid of `y`, against the limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondClassProfileRow {
    pub y: f64,
    pub x: i64,
    pub count: f64,
    pub stderr: f64,
    pub limit: f64,
}

/// Direct second-class counts at `x = round(y t)` for each `y` in `ys`.
pub fn second_class_profile(cfg: &SecondClassConfig, ys: &[f64]) -> Result<Vec<SecondClassProfileRow>> {
    let xs: Vec<i64> = ys.iter().map(|y| (y * cfg.t).round() as i64).collect();
    let hc = HydroConfig { window: cfg.window, ..HydroConfig::new(cfg.q, cfg.m, cfg.t, cfg.trajectories, cfg.seed) };
    let w = hc.validate()? as i64;
    let rates = BondRates::new(cfg.q, cfg.m)?;
    let m = cfg.m;
    let per_traj: Vec<Vec<f64>> = (0..cfg.trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = trajectory_rng(cfg.seed, id);
            let mut lat = Lattice::new(-w, 2 * w as usize + 1, 3, m, |x| match x.cmp(&0) {
                std::cmp::Ordering::Less => vec![0, m],
                std::cmp::Ordering::Equal => vec![m, 0],
                std::cmp::Ordering::Greater => vec![0, 0],
            })
            .expect("valid deformed step");
            lat.run(cfg.t, &rates, &mut rng);
            // cumulative second-class counts
            let mut cum = Vec::with_capacity(2 * w as usize + 1);
            let mut acc = 0.0;
            for y in -w..=w {
                acc += lat.count(y, 1) as f64;
                cum.push(acc);
            }
            xs.iter().map(|&x| cum[(x.clamp(-w, w) + w) as usize]).collect()
        })
        .collect();
    ys.iter()
        .zip(&xs)
        .enumerate()
        .map(|(k, (&y, &x))| {
            let (count, stderr, _) = mean_se(per_traj.iter().map(|r| r[k]));
            // limit evaluated at the lattice point actually used, half-site centred
            let limit = second_class_limit((x as f64 + 0.5) / cfg.t, cfg.q, m)?;
            Ok(SecondClassProfileRow { y, x, count, stderr, limit })
        })
        .collect()
}

/// All single-species configurations `η ∈ {0..m}^L`, lexicographic.
fn occupations(sites: usize, m: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..sites {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=m).map(move |k| {
                    let mut w = v.clone();
                    w.push(k);
                    w
                })
            })
            .collect();
    }
    out
}

/// `N_x(η) = Σ_{y ≥ x} η_y` on sites `1..=L`; `x = L + 1` gives 0.
fn tail_count(eta: &[u32], x: usize) -> u32 {
    eta[x - 1..].iter().sum()
}

/// Generator of ASEP(q, m) on `L` sites with closed ends, as sparse rows.
fn single_species_rows(sites: usize, q: f64, m: u32) -> Result<(Vec<Vec<u32>>, Vec<Vec<(usize, f64)>>)> {
    let rates = BondRates::new(q, m)?;
    let states = occupations(sites, m);
    let index: std::collections::HashMap<Vec<u32>, usize> =
        states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let rows = states
        .iter()
        .enumerate()
        .map(|(r, eta)| {
            let mut row: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
            let mut exit = 0.0;
            for x in 0..sites.saturating_sub(1) {
                let (a, b) = (eta[x], eta[x + 1]);
                let right = rates.frac[a as usize] * rates.frac[(m - b) as usize];
                let left = q * rates.qpow[(a + m - b) as usize] * rates.frac[(m - a) as usize] * rates.frac[b as usize];
                for (rate, da) in [(right, -1i32), (left, 1)] {
                    if rate > 0.0 {
                        let mut e = eta.clone();
                        e[x] = (a as i32 + da) as u32;
                        e[x + 1] = (b as i32 - da) as u32;
                        *row.entry(index[&e]).or_insert(0.0) += rate;
                        exit += rate;
                    }
                }
            }
            if exit > 0.0 {
                row.insert(r, -exit);
            }
            row.into_iter().collect()
        })
        .collect();
    Ok((states, rows))
}

/// Generator of the dual walker on `1..=L+1`, absorbed at both ends:
/// left at rate `1/[m]_q`, right at rate `q^m/[m]_q`.
fn walker_rows(sites: usize, q: f64, m: u32) -> Vec<Vec<(usize, f64)>> {
    let qm: f64 = (0..m).map(|k| q.powi(k as i32)).sum();
    let (left, right) = (1.0 / qm, q.powi(m as i32) / qm);
    (1..=sites + 1)
        .map(|x| {
            if x == 1 || x == sites + 1 {
                Vec::new()
            } else {
                // walker positions 1..=L+1 stored at index x-1
                vec![(x - 2, left), (x - 1, -(left + right)), (x, right)]
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub sites: usize,
    pub m: u32,
    pub t: f64,
    pub max_discrepancy: f64,
    pub approx: SemigroupApprox,
}

/// Exact check of `E_η[q^{N_x(η_t)}] = E_x[q^{N_{x(t)}(η)}]` for every `η` and `x`
/// on a closed window of `sites` sites.
pub fn check_duality_exact(sites: usize, q: f64, m: u32, t: f64, eps: f64) -> Result<DualityReport> {
    check_q(q)?;
    let (states, rows) = single_species_rows(sites, q, m)?;
    let walk = walker_rows(sites, q, m);
    let mut worst: f64 = 0.0;
    let mut approx = SemigroupApprox { lambda: 0.0, terms: 0, eps: 0.0 };
    let mut keep = |a: SemigroupApprox| {
        if a.eps >= approx.eps {
            approx = a;
        }
    };
    let mut lhs_laws = Vec::with_capacity(states.len());
    for i in 0..states.len() {
        let mut e = vec![0.0; states.len()];
        e[i] = 1.0;
        let (law, a) = evolve_rows(&rows, &e, t, eps, None)?;
        keep(a);
        lhs_laws.push(law);
    }
    let mut walker_laws = Vec::with_capacity(sites + 1);
    for x in 1..=sites + 1 {
        let mut e = vec![0.0; sites + 1];
        e[x - 1] = 1.0;
        let (law, a) = evolve_rows(&walk, &e, t, eps, None)?;
        keep(a);
        walker_laws.push(law);
    }
    for (i, eta) in states.iter().enumerate() {
        for x in 1..=sites + 1 {
            let lhs: f64 = states.iter().zip(&lhs_laws[i]).map(|(e2, p)| p * q.powi(tail_count(e2, x) as i32)).sum();
            let rhs: f64 = (1..=sites + 1).map(|y| walker_laws[x - 1][y - 1] * q.powi(tail_count(eta, y) as i32)).sum();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(DualityReport { sites, m, t, max_discrepancy: worst, approx })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityMcReport {
    pub x: usize,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
}

impl DualityMcReport {
    pub fn z_score(&self) -> f64 {
        z_score(self.lhs - self.rhs, self.lhs_stderr, self.rhs_stderr)
    }
}

/// Two-sided Monte Carlo check of the duality from step data `η = m·1_{y ≤ L/2}`
/// on `sites` sites, at walker start `x`.
pub fn check_duality_mc(
    sites: usize,
    q: f64,
    m: u32,
    t: f64,
    x: usize,
    trajectories: usize,
    seed: u64,
) -> Result<DualityMcReport> {
    let rates = BondRates::new(q, m)?;
    if x == 0 || x > sites + 1 || sites < 2 {
        return Err(Error::Config(format!("walker start {x} outside 1..={}", sites + 1)));
    }
    let half = sites / 2;
    let eta: Vec<u32> = (1..=sites).map(|y| if y <= half { m } else { 0 }).collect();
    let lhs: Vec<f64> = (0..trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = trajectory_rng(seed, 2 * id);
            let mut lat = Lattice::new(1, sites, 2, m, |y| vec![eta[(y - 1) as usize]]).expect("valid window");
            lat.run(t, &rates, &mut rng);
            let n: u32 = (x..=sites).map(|y| lat.count(y as i64, 1)).sum();
            q.powi(n as i32)
        })
        .collect();
    let qm: f64 = (0..m).map(|k| q.powi(k as i32)).sum();
    let (left, right) = (1.0 / qm, q.powi(m as i32) / qm);
    let rhs: Vec<f64> = (0..trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = trajectory_rng(seed, 2 * id + 1);
            let mut pos = x;
            let mut time = 0.0;
            let exp = Exp::new(left + right).expect("positive rate");
            while pos > 1 && pos < sites + 1 {
                time += exp.sample(&mut rng);
                if time > t {
                    break;
                }
                if rng.gen::<f64>() * (left + right) < left {
                    pos -= 1;
                } else {
                    pos += 1;
                }
            }
            q.powi(tail_count(&eta, pos) as i32)
        })
        .collect();
    let (l, lse, _) = mean_se(lhs.into_iter());
    let (r, rse, _) = mean_se(rhs.into_iter());
    Ok(DualityMcReport { x, lhs: l, lhs_stderr: lse, rhs: r, rhs_stderr: rse })
}
