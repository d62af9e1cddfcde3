//! Exact small-instance verification.
//!
//! Generators are stored as sparse rows over an enumerated state space.
//! Transition laws are computed by uniformization with a certified Poisson
//! tail; the same series can be truncated in exact rational arithmetic.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::config::{
    dcoset_to_config, enumerate_space, push_down, theta1, theta2, LatticeSpec, ParticleConfig, Variant,
};
use crate::coxeter::{
    double_coset_rep, enumerate_coset_reps, enumerate_dcoset_reps, enumerate_group, min_coset_rep, CoxeterType,
    ParabolicSpec, Side, SignedPermutation,
};
use crate::dynamics::{build_generator, Boundary, ProcessSpec};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Largest number of Poisson terms a uniformization may use.
pub const TERM_CAP: usize = 2_000_000;

/// Sparse generator over an indexed set of configurations.
#[derive(Debug, Clone)]
pub struct RateMatrix<S> {
    states: Vec<ParticleConfig>,
    index: HashMap<ParticleConfig, usize>,
    /// Sorted by column; the diagonal is stored explicitly.
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> RateMatrix<S> {
    /// Builds the generator from off-diagonal rates; the diagonal is `-row sum`.
    pub fn from_transitions(states: Vec<ParticleConfig>, rates: Vec<Vec<(ParticleConfig, S)>>) -> Result<Self> {
        let index = Self::make_index(&states)?;
        let mut rows = Vec::with_capacity(states.len());
        for (r, out) in rates.into_iter().enumerate() {
            let mut row: BTreeMap<usize, S> = BTreeMap::new();
            let mut exit = S::zero();
            for (target, rate) in out {
                let col = *index
                    .get(&target)
                    .ok_or_else(|| Error::Structural(format!("transition to {target} leaves the state space")))?;
                if col == r {
                    continue;
                }
                exit = exit + rate.clone();
                let slot = row.entry(col).or_insert_with(S::zero);
                *slot = slot.clone() + rate;
            }
            if !exit.is_zero() {
                row.insert(r, S::zero() - exit);
            }
            rows.push(row.into_iter().collect());
        }
        Ok(Self { states, index, rows })
    }

    /// Wraps a dense matrix, dropping zeros.
    pub fn from_dense(states: Vec<ParticleConfig>, dense: Vec<Vec<S>>) -> Result<Self> {
        let index = Self::make_index(&states)?;
        if dense.len() != states.len() || dense.iter().any(|r| r.len() != states.len()) {
            return Err(Error::Structural("dense matrix does not match the state count".into()));
        }
        let rows =
            dense.into_iter().map(|r| r.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()).collect();
        Ok(Self { states, index, rows })
    }

    fn make_index(states: &[ParticleConfig]) -> Result<HashMap<ParticleConfig, usize>> {
        let index: HashMap<_, _> = states.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        if index.len() != states.len() {
            return Err(Error::Structural("state dictionary has duplicates".into()));
        }
        Ok(index)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[ParticleConfig] {
        &self.states
    }

    pub fn index_of(&self, c: &ParticleConfig) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn row(&self, i: usize) -> &[(usize, S)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> S {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let n = self.dim();
        let mut out = vec![vec![S::zero(); n]; n];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    /// Largest exit rate `max_i -Q_ii`.
    pub fn max_exit_rate(&self) -> S {
        let mut m = S::zero();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                if *j == i && (S::zero() - v.clone()) > m {
                    m = S::zero() - v.clone();
                }
            }
        }
        m
    }

    /// `max_i |Σ_j Q_ij|` and whether all off-diagonals are non-negative.
    pub fn validate(&self) -> (S, bool) {
        let mut worst = S::zero();
        let mut nonneg = true;
        for (i, row) in self.rows.iter().enumerate() {
            let mut s = S::zero();
            for (j, v) in row {
                if *j != i && *v < S::zero() {
                    nonneg = false;
                }
                s = s + v.clone();
            }
            if s.abs_val() > worst {
                worst = s.abs_val();
            }
        }
        (worst, nonneg)
    }

    /// Row vector times matrix, `μQ`.
    pub fn left_mul(&self, mu: &[S]) -> Result<Vec<S>> {
        if mu.len() != self.dim() {
            return Err(Error::Structural(format!("vector of length {} against {} states", mu.len(), self.dim())));
        }
        let mut out = vec![S::zero(); self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            if mu[i].is_zero() {
                continue;
            }
            for (j, v) in row {
                out[*j] = out[*j].clone() + mu[i].clone() * v.clone();
            }
        }
        Ok(out)
    }

    /// Point mass at `c` in this state ordering.
    pub fn delta(&self, c: &ParticleConfig) -> Result<Vec<S>> {
        let i = self.index_of(c).ok_or_else(|| Error::Structural(format!("{c} is not a state")))?;
        let mut v = vec![S::zero(); self.dim()];
        v[i] = S::one();
        Ok(v)
    }
}

/// `max_j |(μQ)_j|`.
pub fn check_stationarity<S: Scalar>(q: &RateMatrix<S>, mu: &[S]) -> Result<S> {
    let r = q.left_mul(mu)?;
    Ok(r.into_iter().map(|v| v.abs_val()).fold(S::zero(), |a, b| if b > a { b } else { a }))
}

/// Parameters of one uniformized evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SemigroupApprox {
    /// Uniformization rate.
    pub lambda: f64,
    /// Highest Poisson term used.
    pub terms: usize,
    /// Certified bound on the dropped Poisson mass.
    pub eps: f64,
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// `μ e^{tQ}` by uniformization at rate `lambda` (at least the largest exit rate).
pub fn evolve(
    q: &RateMatrix<f64>,
    mu: &[f64],
    t: f64,
    eps: f64,
    lambda: Option<f64>,
) -> Result<(Vec<f64>, SemigroupApprox)> {
    evolve_rows(&q.rows, mu, t, eps, lambda)
}

/// [`evolve`] for a generator given as raw sparse rows (diagonal included).
pub fn evolve_rows(
    rows: &[Vec<(usize, f64)>],
    mu: &[f64],
    t: f64,
    eps: f64,
    lambda: Option<f64>,
) -> Result<(Vec<f64>, SemigroupApprox)> {
    if !(t >= 0.0) || !(eps > 0.0) {
        return Err(Error::Domain(format!("need t >= 0 and eps > 0, got t={t}, eps={eps}")));
    }
    if mu.len() != rows.len() {
        return Err(Error::Structural("initial vector does not match the state count".into()));
    }
    let exit = rows
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().filter(move |(j, _)| *j == i).map(|(_, v)| -v))
        .fold(0.0, f64::max);
    let lam = lambda.unwrap_or(exit).max(exit);
    let n = rows.len();
    let x = lam * t;
    if x == 0.0 {
        return Ok((mu.to_vec(), SemigroupApprox { lambda: lam, terms: 0, eps: 0.0 }));
    }
    let mut out = vec![0.0; n];
    let mut v = mu.to_vec();
    let mut cum = 0.0;
    let mut k = 0;
    loop {
        let w = (-x + k as f64 * x.ln() - ln_factorial_inc(k)).exp();
        cum += w;
        for (o, vi) in out.iter_mut().zip(&v) {
            *o += w * vi;
        }
        let tail = (1.0 - cum).max(0.0);
        if tail <= eps && k as f64 >= x {
            return Ok((out, SemigroupApprox { lambda: lam, terms: k, eps: tail }));
        }
        if k >= TERM_CAP {
            return Err(Error::Resource(format!("eps = {eps} not reached within {TERM_CAP} terms")));
        }
        // v <- v (I + Q / lambda)
        let mut next = v.clone();
        for (i, row) in rows.iter().enumerate() {
            if v[i] != 0.0 {
                for (j, r) in row {
                    next[*j] += v[i] * r / lam;
                }
            }
        }
        v = next;
        k += 1;
    }
}

fn ln_factorial_inc(k: usize) -> f64 {
    if k < 256 {
        ln_factorial(k)
    } else {
        // Stirling with two correction terms; error far below f64 resolution here
        let n = k as f64;
        n * n.ln() - n + 0.5 * (2.0 * std::f64::consts::PI * n).ln() + 1.0 / (12.0 * n) - 1.0 / (360.0 * n.powi(3))
    }
}

/// Dense `e^{tQ}`, one uniformized row per state.
pub fn transition_matrix(q: &RateMatrix<f64>, t: f64, eps: f64) -> Result<(Vec<Vec<f64>>, SemigroupApprox)> {
    let mut rows = Vec::with_capacity(q.dim());
    let mut info = SemigroupApprox { lambda: q.max_exit_rate(), terms: 0, eps: 0.0 };
    for i in 0..q.dim() {
        let mut e = vec![0.0; q.dim()];
        e[i] = 1.0;
        let (row, a) = evolve(q, &e, t, eps, None)?;
        info.terms = info.terms.max(a.terms);
        info.eps = info.eps.max(a.eps);
        rows.push(row);
    }
    Ok((rows, info))
}

/// `Σ_{k≤K} x^k/k! · μ (I + Q/λ)^k`, exactly; multiplying by `e^{-x}` with
/// `x = λt` gives the truncated uniformization series.
pub fn truncated_series<S: Scalar>(q: &RateMatrix<S>, mu: &[S], lambda: &S, x: &S, terms: usize) -> Result<Vec<S>> {
    if *lambda <= S::zero() {
        return Err(Error::Domain("uniformization rate must be positive".into()));
    }
    let mut out: Vec<S> = mu.to_vec();
    let mut v = mu.to_vec();
    let mut coef = S::one();
    for k in 1..=terms {
        let qv = q.left_mul(&v)?;
        for (vi, d) in v.iter_mut().zip(qv) {
            *vi = vi.clone() + d / lambda.clone();
        }
        coef = coef * x.clone() / S::from_int(k as i64);
        for (o, vi) in out.iter_mut().zip(&v) {
            *o = o.clone() + coef.clone() * vi.clone();
        }
    }
    Ok(out)
}

/// Parabolic pair read off a lattice shape: sites give `H'`, species give `H`.
pub fn pair_of(spec: &LatticeSpec) -> Result<(ParabolicSpec, ParabolicSpec)> {
    let ct = spec.ctype();
    let hp = ParabolicSpec::new(ct, spec.m().to_vec(), spec.flavor().has_mirror())?;
    let h = ParabolicSpec::new(ct, spec.blocks().to_vec(), spec.flavor().has_zero())?;
    Ok((hp, h))
}

/// Pushforward of `q^{l(w)}` on `W` to the states of `p`, normalised.
pub fn q_exchangeable_measure<S: Scalar>(gen: &RateMatrix<S>, p: &ProcessSpec<S>) -> Result<Vec<S>> {
    let (hp, h) = pair_of(p.spec())?;
    let mut mu = vec![S::zero(); gen.dim()];
    let mut z = S::zero();
    for w in enumerate_group(hp.ctype())? {
        let c = push_down(&theta1(&w), &hp, &h)?;
        let i = gen.index_of(&c).ok_or_else(|| Error::Structural(format!("{c} missing from the generator")))?;
        let wt = p.q().powi(w.length() as u32);
        mu[i] = mu[i].clone() + wt.clone();
        z = z + wt;
    }
    Ok(mu.into_iter().map(|v| v / z.clone()).collect())
}

/// Residuals of `L̂ = Λ L Φ` and of the three q-exchangeability statements.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport<S> {
    pub states: usize,
    pub group_order: usize,
    /// `max |L̂ - Λ L Φ|` entrywise.
    pub generator: S,
    /// `max |μ Λ - π|` with `π ∝ q^{l(w)}`.
    pub lambda: S,
    /// `max |π L|`.
    pub unit: S,
    /// `max |π Φ - μ|`.
    pub phi: S,
}

impl<S: Scalar> FactorizationReport<S> {
    pub fn max(&self) -> S {
        [&self.generator, &self.lambda, &self.unit, &self.phi].into_iter().cloned().fold(S::zero(), |a, b| {
            if b > a {
                b
            } else {
                a
            }
        })
    }
}

/// Assembles `Λ L Φ` from the walk on `W` and compares it with [`build_generator`].
///
/// `L` moves `w` to `s w` at rate 1 when this shortens `w` and at rate `q`
/// otherwise; `s_0` is included exactly when the process has a boundary.
/// `Λ` spreads a configuration over its fibre in `W` with weights `q^{l(w)}`.
pub fn check_factorization<S: Scalar>(p: &ProcessSpec<S>) -> Result<FactorizationReport<S>> {
    let direct = build_generator(p)?;
    let (hp, h) = pair_of(p.spec())?;
    let ct = hp.ctype();
    let group = enumerate_group(ct)?;
    let widx: HashMap<&SignedPermutation, usize> = group.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let phi: Vec<usize> = group
        .iter()
        .map(|w| {
            let c = push_down(&theta1(w), &hp, &h)?;
            direct.index_of(&c).ok_or_else(|| Error::Structural(format!("{c} missing from the generator")))
        })
        .collect::<Result<_>>()?;
    let q = p.q().clone();
    let weight: Vec<S> = group.iter().map(|w| q.powi(w.length() as u32)).collect();
    let mut fiber_mass = vec![S::zero(); direct.dim()];
    for (wi, &c) in phi.iter().enumerate() {
        fiber_mass[c] = fiber_mass[c].clone() + weight[wi].clone();
    }
    let gens: Vec<usize> = ct.generators().into_iter().filter(|&g| g != 0 || p.boundary() != Boundary::None).collect();
    // L on W as sparse rows
    let unit_rows: Vec<Vec<(usize, S)>> = group
        .iter()
        .map(|w| {
            gens.iter()
                .map(|&g| {
                    let sw = w.left_mul_gen(g);
                    let rate = if sw.length() < w.length() { S::one() } else { q.clone() };
                    (widx[&sw], rate)
                })
                .collect()
        })
        .collect();
    let n = direct.dim();
    let mut assembled = vec![vec![S::zero(); n]; n];
    for (wi, row) in unit_rows.iter().enumerate() {
        let c = phi[wi];
        let lam = weight[wi].clone() / fiber_mass[c].clone();
        for (wj, rate) in row {
            let v = lam.clone() * rate.clone();
            assembled[c][phi[*wj]] = assembled[c][phi[*wj]].clone() + v.clone();
            assembled[c][c] = assembled[c][c].clone() - v;
        }
    }
    let dense = direct.to_dense();
    let mut generator = S::zero();
    for i in 0..n {
        for j in 0..n {
            let d = (dense[i][j].clone() - assembled[i][j].clone()).abs_val();
            if d > generator {
                generator = d;
            }
        }
    }
    // q-exchangeability, factor by factor
    let z = weight.iter().cloned().fold(S::zero(), |a, b| a + b);
    let pi: Vec<S> = weight.iter().map(|w| w.clone() / z.clone()).collect();
    let mu: Vec<S> = fiber_mass.iter().map(|m| m.clone() / z.clone()).collect();
    let mut lambda = S::zero();
    for (wi, &c) in phi.iter().enumerate() {
        let image = mu[c].clone() * weight[wi].clone() / fiber_mass[c].clone();
        lambda = max_of(lambda, (image - pi[wi].clone()).abs_val());
    }
    let mut flow = vec![S::zero(); group.len()];
    for (wi, row) in unit_rows.iter().enumerate() {
        for (wj, rate) in row {
            let f = pi[wi].clone() * rate.clone();
            flow[*wj] = flow[*wj].clone() + f.clone();
            flow[wi] = flow[wi].clone() - f;
        }
    }
    let unit = flow.into_iter().fold(S::zero(), |a, b| max_of(a, b.abs_val()));
    let mut pushed = vec![S::zero(); n];
    for (wi, &c) in phi.iter().enumerate() {
        pushed[c] = pushed[c].clone() + pi[wi].clone();
    }
    let phi_res = pushed.into_iter().zip(&mu).fold(S::zero(), |a, (x, y)| max_of(a, (x - y.clone()).abs_val()));
    Ok(FactorizationReport { states: n, group_order: group.len(), generator, lambda, unit, phi: phi_res })
}

fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

/// The four choices of `(H', H)` over a pair of compositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum P2Case {
    /// `S(m)`, `S(N)`.
    A,
    /// `S(m)`, `S⁽⁰⁾(N)`.
    B,
    /// `S⁽⁰⁾(m)`, `S(N)`.
    C,
    /// `S⁽⁰⁾(m)`, `S⁽⁰⁾(N)`.
    D,
}

impl P2Case {
    pub const ALL: [P2Case; 4] = [P2Case::A, P2Case::B, P2Case::C, P2Case::D];

    pub fn pair(self, rank: usize, m: &[usize], n: &[usize]) -> Result<(ParabolicSpec, ParabolicSpec)> {
        let ct = CoxeterType::bc(rank);
        let (s0p, s0) = match self {
            P2Case::A => (false, false),
            P2Case::B => (false, true),
            P2Case::C => (true, false),
            P2Case::D => (true, true),
        };
        Ok((ParabolicSpec::new(ct, m.to_vec(), s0p)?, ParabolicSpec::new(ct, n.to_vec(), s0)?))
    }
}

/// Verdicts for one commutative diagram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagramReport {
    pub instance: String,
    pub checks: Vec<(String, bool)>,
}

impl DiagramReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|(_, ok)| !ok).count()
    }
}

fn bijective(images: &[ParticleConfig], target: &HashSet<ParticleConfig>) -> bool {
    let set: HashSet<&ParticleConfig> = images.iter().collect();
    set.len() == images.len() && set.len() == target.len() && images.iter().all(|c| target.contains(c))
}

/// Exhaustive check of both columns of the diagram for `(H', H)`.
///
/// `θ₁'` is `Π ∘ θ₁` on `D_H`, `θ₁''` is `Φ ∘ Π ∘ θ₁` on `D_{H',H}`, and
/// likewise on the `θ₂` side with `D_H^{-1}` and `D_{H,H'}`.
pub fn certify_pair(hp: &ParabolicSpec, h: &ParabolicSpec) -> Result<DiagramReport> {
    let ct = hp.ctype();
    let trivial = ParabolicSpec::trivial(ct);
    let spec_a = Arc::new(LatticeSpec::for_pair(hp, h)?);
    let spec_b = Arc::new(LatticeSpec::for_pair(&trivial, h)?);
    let set_a: HashSet<ParticleConfig> = enumerate_space(&spec_a).into_iter().collect();
    let set_b: HashSet<ParticleConfig> = enumerate_space(&spec_b).into_iter().collect();
    let project = |c: &ParticleConfig| crate::config::project_colors(c, h.blocks(), h.includes_s0());
    let fuse = |c: &ParticleConfig| crate::config::fuse_sites(c, hp.blocks(), hp.includes_s0());
    let group = enumerate_group(ct)?;
    let mut checks = Vec::new();

    let d_h = enumerate_coset_reps(h, Side::Right)?;
    let d_h_inv = enumerate_coset_reps(h, Side::Left)?;
    let d_hp_h = enumerate_dcoset_reps(hp, h)?;
    let d_h_hp = enumerate_dcoset_reps(h, hp)?;

    let theta1p = |s: &SignedPermutation| project(&theta1(s));
    let theta2p = |s: &SignedPermutation| project(&theta2(s));

    // θ₁ and θ₂ are bijections onto S(1,1)
    let unit = Arc::new(LatticeSpec::for_pair(&trivial, &trivial)?);
    let set_unit: HashSet<ParticleConfig> = enumerate_space(&unit).into_iter().collect();
    let t1: Vec<_> = group.iter().map(theta1).collect();
    let t2: Vec<_> = group.iter().map(theta2).collect();
    checks.push(("theta1 bijective".into(), bijective(&t1, &set_unit)));
    checks.push(("theta2 bijective".into(), bijective(&t2, &set_unit)));

    // middle level
    let b1: Vec<_> = d_h.iter().map(theta1p).collect::<Result<_>>()?;
    let b2: Vec<_> = d_h_inv.iter().map(theta2p).collect::<Result<_>>()?;
    checks.push(("theta1' bijective".into(), bijective(&b1, &set_b)));
    checks.push(("theta2' bijective".into(), bijective(&b2, &set_b)));
    let mut top1 = true;
    let mut top2 = true;
    for w in &group {
        top1 &= project(&theta1(w))? == theta1p(&min_coset_rep(w, h, Side::Right))?;
        top2 &= project(&theta2(w))? == theta2p(&min_coset_rep(w, h, Side::Left))?;
    }
    checks.push(("upper square, theta1 side".into(), top1));
    checks.push(("upper square, theta2 side".into(), top2));

    // bottom level
    let a1: Vec<_> = d_hp_h.iter().map(|x| dcoset_to_config(x, hp, h, Variant::One)).collect::<Result<_>>()?;
    let a2: Vec<_> = d_h_hp.iter().map(|x| dcoset_to_config(x, hp, h, Variant::Two)).collect::<Result<_>>()?;
    checks.push(("theta1'' bijective".into(), bijective(&a1, &set_a)));
    checks.push(("theta2'' bijective".into(), bijective(&a2, &set_a)));
    let mut low1 = true;
    for s in &d_h {
        low1 &= fuse(&theta1p(s)?)? == dcoset_to_config(&double_coset_rep(s, hp, h), hp, h, Variant::One)?;
    }
    let mut low2 = true;
    for s in &d_h_inv {
        low2 &= fuse(&theta2p(s)?)? == dcoset_to_config(&double_coset_rep(s, h, hp), hp, h, Variant::Two)?;
    }
    checks.push(("lower square, theta1 side".into(), low1));
    checks.push(("lower square, theta2 side".into(), low2));
    checks.push(("|D_{H',H}| = |A|".into(), d_hp_h.len() == set_a.len()));

    Ok(DiagramReport {
        instance: format!("{ct} m={:?}{} N={:?}{}", hp.blocks(), s0_tag(hp), h.blocks(), s0_tag(h)),
        checks,
    })
}

fn s0_tag(h: &ParabolicSpec) -> &'static str {
    if h.includes_s0() {
        "+s0"
    } else {
        ""
    }
}

/// [`certify_pair`] over a list of pairs.
pub fn certify_diagrams(pairs: &[(ParabolicSpec, ParabolicSpec)]) -> Result<Vec<DiagramReport>> {
    pairs.iter().map(|(hp, h)| certify_pair(hp, h)).collect()
}

/// Pointwise comparison of the forward and swapped-role laws at each time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColPosCertificate {
    pub instance: String,
    pub times: Vec<f64>,
    pub discrepancy: Vec<f64>,
    pub approx: Vec<SemigroupApprox>,
}

impl ColPosCertificate {
    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancy.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_eps(&self) -> f64 {
        self.approx.iter().map(|a| a.eps).fold(0.0, f64::max)
    }
}

/// Both processes of a colour–position comparison, with their initial states.
struct ColPosPair<S> {
    fwd: RateMatrix<S>,
    rev: RateMatrix<S>,
    fwd_init: Vec<S>,
    rev_init: Vec<S>,
    /// Reverse state index to forward state index through `ι`.
    iota: Vec<usize>,
}

fn colpos_pair<S: Scalar>(hp: &ParabolicSpec, h: &ParabolicSpec, q: S) -> Result<ColPosPair<S>> {
    let e = SignedPermutation::identity(hp.ctype());
    let pf = ProcessSpec::for_pair(hp, h, q.clone())?;
    let pr = ProcessSpec::for_pair(h, hp, q)?;
    let fwd = build_generator(&pf)?;
    let rev = build_generator(&pr)?;
    let fwd_init = fwd.delta(&dcoset_to_config(&e, hp, h, Variant::One)?)?;
    let rev_init = rev.delta(&dcoset_to_config(&e, h, hp, Variant::One)?)?;
    let iota = rev
        .states()
        .iter()
        .map(|c| {
            let y = crate::config::config_to_dcoset(c, h, hp, Variant::One)?;
            let x = y.inverse();
            let image = dcoset_to_config(&x, hp, h, Variant::One)?;
            fwd.index_of(&image).ok_or_else(|| Error::Structural(format!("{image} missing")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ColPosPair { fwd, rev, fwd_init, rev_init, iota })
}

fn compare<S: Scalar>(pair: &ColPosPair<S>, a: &[S], b: &[S]) -> S {
    let mut mapped = vec![S::zero(); a.len()];
    for (j, v) in b.iter().enumerate() {
        mapped[pair.iota[j]] = mapped[pair.iota[j]].clone() + v.clone();
    }
    a.iter().zip(mapped).fold(S::zero(), |m, (x, y)| max_of(m, (x.clone() - y).abs_val()))
}

/// Forward process on `D_{H',H}` against the swapped-role process on
/// `D_{H,H'}` pulled back through `ι(x) = x⁻¹`, both started from the
/// identity coset and evolved with a shared uniformization rate.
pub fn certify_colpos(
    hp: &ParabolicSpec,
    h: &ParabolicSpec,
    q: f64,
    times: &[f64],
    eps: f64,
) -> Result<ColPosCertificate> {
    let pair = colpos_pair(hp, h, q)?;
    let lam = pair.fwd.max_exit_rate().max(pair.rev.max_exit_rate());
    let mut discrepancy = Vec::new();
    let mut approx = Vec::new();
    for &t in times {
        let (a, ia) = evolve(&pair.fwd, &pair.fwd_init, t, eps, Some(lam))?;
        let (b, ib) = evolve(&pair.rev, &pair.rev_init, t, eps, Some(lam))?;
        discrepancy.push(compare(&pair, &a, &b));
        approx.push(if ia.eps >= ib.eps { ia } else { ib });
    }
    Ok(ColPosCertificate {
        instance: format!("{} m={:?}{} N={:?}{} q={q}", hp.ctype(), hp.blocks(), s0_tag(hp), h.blocks(), s0_tag(h)),
        times: times.to_vec(),
        discrepancy,
        approx,
    })
}

/// Exact version: both sides truncated at the same order with a shared
/// rational rate `lambda` and `x = λt`; returns the exact discrepancy.
pub fn certify_colpos_exact(
    hp: &ParabolicSpec,
    h: &ParabolicSpec,
    q: Rational,
    lambda: Rational,
    x: Rational,
    terms: usize,
) -> Result<Rational> {
    let pair = colpos_pair(hp, h, q)?;
    let a = truncated_series(&pair.fwd, &pair.fwd_init, &lambda, &x, terms)?;
    let b = truncated_series(&pair.rev, &pair.rev_init, &lambda, &x, terms)?;
    Ok(compare(&pair, &a, &b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Flavor};
    use crate::scalar::rat;

    fn two_state(q: f64) -> RateMatrix<f64> {
        let s = Arc::new(LatticeSpec::new(vec![1, 1], vec![1, 1], Flavor::Plain, false).unwrap());
        build_generator(&ProcessSpec::new(s, q, Boundary::None).unwrap()).unwrap()
    }

    #[test]
    fn two_state_closed_form() {
        let q = 0.5;
        let g = two_state(q);
        let t = 1.3;
        let (p, info) = transition_matrix(&g, t, 1e-13).unwrap();
        // [1|2] leaves at rate q, [2|1] at rate 1
        let s = Arc::new(LatticeSpec::new(vec![1, 1], vec![1, 1], Flavor::Plain, false).unwrap());
        let a = g.index_of(&parse_config(s.clone(), "[1|2]").unwrap()).unwrap();
        let b = g.index_of(&parse_config(s, "[2|1]").unwrap()).unwrap();
        let r = 1.0 + q;
        let pab = q / r * (1.0 - (-r * t).exp());
        assert!((p[a][b] - pab).abs() < 1e-12, "{} vs {pab}", p[a][b]);
        assert!(info.eps <= 1e-13);
        let (id, _) = transition_matrix(&g, 0.0, 1e-10).unwrap();
        assert_eq!(id, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn eps_shrinks_with_terms() {
        let g = two_state(0.3);
        let (_, a) = evolve(&g, &[1.0, 0.0], 4.0, 1e-4, None).unwrap();
        let (_, b) = evolve(&g, &[1.0, 0.0], 4.0, 1e-12, None).unwrap();
        assert!(b.terms > a.terms && b.eps < a.eps);
        assert!(evolve(&g, &[1.0, 0.0], 1.0, 0.0, None).is_err());
    }

    #[test]
    fn stationarity_small() {
        let s = Arc::new(LatticeSpec::new(vec![1, 1], vec![1, 1], Flavor::MirrorZero, true).unwrap());
        let q = rat(1, 3);
        let p = ProcessSpec::new(s.clone(), q, Boundary::Case2).unwrap();
        let g = build_generator(&p).unwrap();
        let mu = q_exchangeable_measure(&g, &p).unwrap();
        assert_eq!(check_stationarity(&g, &mu).unwrap(), rat(0, 1));
        let uniform = vec![rat(1, 3); 3];
        assert!(check_stationarity(&g, &uniform).unwrap() > rat(0, 1));
        let c = parse_config(s, "[-1,1|0]").unwrap();
        assert!(g.index_of(&c).is_some());
    }

    #[test]
    fn factorization_type_a() {
        let ct = CoxeterType::a(3);
        let hp = ParabolicSpec::new(ct, vec![2, 1], false).unwrap();
        let h = ParabolicSpec::new(ct, vec![1, 1, 1], false).unwrap();
        let p = ProcessSpec::for_pair(&hp, &h, rat(2, 5)).unwrap();
        let r = check_factorization(&p).unwrap();
        assert_eq!(r.max(), rat(0, 1), "{r:?}");
    }

    #[test]
    fn diagrams_small() {
        let a4 = CoxeterType::a(4);
        let hp = ParabolicSpec::new(a4, vec![2, 2], false).unwrap();
        let r = certify_pair(&hp, &hp).unwrap();
        assert!(r.all_pass(), "{r:?}");
        for case in P2Case::ALL {
            let (hp, h) = case.pair(2, &[1, 1], &[2]).unwrap();
            let r = certify_pair(&hp, &h).unwrap();
            assert!(r.all_pass(), "{case:?} {r:?}");
        }
    }

    #[test]
    fn colpos_free_s3() {
        let t = ParabolicSpec::trivial(CoxeterType::a(3));
        let c = certify_colpos(&t, &t, 0.5, &[0.0, 1.0], 1e-12).unwrap();
        assert!(c.max_discrepancy() <= 1e-10, "{c:?}");
        let d = certify_colpos_exact(&t, &t, rat(1, 2), rat(3, 1), rat(3, 1), 12).unwrap();
        assert_eq!(d, rat(0, 1));
    }
}
