//! Particle configurations and their correspondence with (double) cosets.
//!
//! A configuration stores the occupation numbers `k_x^{(i)}` for sites
//! `x = 1..L` and signed species labels `i`. Four state spaces are
//! distinguished by [`Flavor`]:
//!
//! * `Plain`: `m_x` particles at site `x`, `N_i` particles of species `±i`.
//! * `Zero`: labels shifted down by one, block 1 collapses onto species 0.
//! * `Mirror`: site 1 also carries the negated copy of each of its particles
//!   (the reflection through the left boundary), so it holds `2 m_1` labels.
//! * `MirrorZero`: both modifications.
//!
//! The maps `theta1`, `theta2`, [`project_colors`] and [`fuse_sites`] realise
//! the projections `W -> D_H -> D_{H',H}` on the particle side.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coxeter::{double_coset_rep, is_min_left, is_min_right, CoxeterType, ParabolicSpec, SignedPermutation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    Plain,
    Zero,
    Mirror,
    MirrorZero,
}

impl Flavor {
    pub fn has_zero(self) -> bool {
        matches!(self, Flavor::Zero | Flavor::MirrorZero)
    }

    pub fn has_mirror(self) -> bool {
        matches!(self, Flavor::Mirror | Flavor::MirrorZero)
    }

    pub fn from_flags(zero: bool, mirror: bool) -> Self {
        match (zero, mirror) {
            (false, false) => Flavor::Plain,
            (true, false) => Flavor::Zero,
            (false, true) => Flavor::Mirror,
            (true, true) => Flavor::MirrorZero,
        }
    }
}

/// Shape of a configuration space: site capacities, species blocks and flavor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    m: Vec<usize>,
    blocks: Vec<usize>,
    flavor: Flavor,
    signed: bool,
}

impl LatticeSpec {
    pub fn new(m: Vec<usize>, blocks: Vec<usize>, flavor: Flavor, signed: bool) -> Result<Self> {
        if m.is_empty() || m.contains(&0) || blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::Domain(format!(
                "compositions must be non-empty with positive parts: m={m:?}, N={blocks:?}"
            )));
        }
        let (sm, sn): (usize, usize) = (m.iter().sum(), blocks.iter().sum());
        if sm != sn {
            return Err(Error::Structural(format!("sum(m)={sm} differs from sum(N)={sn}")));
        }
        if flavor != Flavor::Plain && !signed {
            return Err(Error::Domain(format!("{flavor:?} configurations carry signed species")));
        }
        Ok(Self { m, blocks, flavor, signed })
    }

    /// The space `S(N,m)` (or `S̄(N,m)` in type A) matching the parabolic pair `(H', H)`.
    pub fn for_pair(hp: &ParabolicSpec, h: &ParabolicSpec) -> Result<Self> {
        if hp.ctype() != h.ctype() {
            return Err(Error::Structural("parabolic subgroups of different groups".into()));
        }
        Self::new(
            hp.blocks().to_vec(),
            h.blocks().to_vec(),
            Flavor::from_flags(h.includes_s0(), hp.includes_s0()),
            h.ctype().is_bc(),
        )
    }

    /// One particle per site, one letter per species: the target of `theta1`.
    pub fn unit(ctype: CoxeterType) -> Self {
        let n = ctype.rank;
        Self { m: vec![1; n], blocks: vec![1; n], flavor: Flavor::Plain, signed: ctype.is_bc() }
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn sites(&self) -> usize {
        self.m.len()
    }

    pub fn total(&self) -> usize {
        self.m.iter().sum()
    }

    /// Largest absolute species label.
    pub fn max_label(&self) -> i32 {
        let n = self.blocks.len() as i32;
        if self.flavor.has_zero() {
            n - 1
        } else {
            n
        }
    }

    pub fn slots(&self) -> usize {
        2 * self.max_label() as usize + 1
    }

    fn slot(&self, label: i32) -> usize {
        (label + self.max_label()) as usize
    }

    /// Labels a particle may carry, in increasing order.
    pub fn labels(&self) -> Vec<i32> {
        let k = self.max_label();
        (-k..=k).filter(|&l| (l != 0 || self.flavor.has_zero()) && (l >= 0 || self.signed)).collect()
    }

    /// Number of labels stored at site `x` (1-based).
    pub fn stored_at(&self, x: usize) -> usize {
        if x == 1 && self.flavor.has_mirror() {
            2 * self.m[0]
        } else {
            self.m[x - 1]
        }
    }

    /// Whether the configuration lives on the unit lattice with one letter per species.
    pub fn is_fine(&self) -> bool {
        self.blocks.iter().all(|&b| b == 1) && !self.flavor.has_zero()
    }

    pub fn is_unit_lattice(&self) -> bool {
        self.m.iter().all(|&v| v == 1)
    }

    /// Group family implied by the signs.
    pub fn ctype(&self) -> CoxeterType {
        if self.signed {
            CoxeterType::bc(self.total())
        } else {
            CoxeterType::a(self.total())
        }
    }

    /// Same shape and species, all capacities 1, no mirror.
    pub fn unit_lattice(&self) -> Self {
        Self {
            m: vec![1; self.total()],
            blocks: self.blocks.clone(),
            flavor: Flavor::from_flags(self.flavor.has_zero(), false),
            signed: self.signed,
        }
    }

    /// Species block index (0-based) represented by `label`.
    fn block_of_label(&self, label: i32) -> usize {
        if self.flavor.has_zero() {
            label.unsigned_abs() as usize
        } else {
            label.unsigned_abs() as usize - 1
        }
    }
}

/// Occupation numbers `k_x^{(i)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParticleConfig {
    spec: Arc<LatticeSpec>,
    counts: Vec<u32>,
}

impl PartialOrd for LatticeSpec {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LatticeSpec {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.m, &self.blocks, self.flavor as u8, self.signed).cmp(&(
            &other.m,
            &other.blocks,
            other.flavor as u8,
            other.signed,
        ))
    }
}

impl ParticleConfig {
    /// Validates the flavor invariants and wraps the counts.
    pub fn new(spec: Arc<LatticeSpec>, counts: Vec<u32>) -> Result<Self> {
        let c = Self { spec, counts };
        c.validate()?;
        Ok(c)
    }

    /// Builds a configuration from the multiset of labels at every site.
    pub fn from_site_labels(spec: Arc<LatticeSpec>, sites: &[Vec<i32>]) -> Result<Self> {
        if sites.len() != spec.sites() {
            return Err(Error::Structural(format!("{} sites given, lattice has {}", sites.len(), spec.sites())));
        }
        let k = spec.max_label();
        let mut counts = vec![0u32; spec.sites() * spec.slots()];
        for (x, labels) in sites.iter().enumerate() {
            for &l in labels {
                if l.abs() > k {
                    return Err(Error::Domain(format!("label {l} outside -{k}..{k}")));
                }
                counts[x * spec.slots() + spec.slot(l)] += 1;
            }
        }
        Self::new(spec, counts)
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn spec_arc(&self) -> &Arc<LatticeSpec> {
        &self.spec
    }

    /// `k_x^{(label)}` for a 1-based site.
    pub fn count(&self, x: usize, label: i32) -> u32 {
        if label.abs() > self.spec.max_label() {
            return 0;
        }
        self.counts[(x - 1) * self.spec.slots() + self.spec.slot(label)]
    }

    /// Counts at site `x`, indexed by slot (label `l` at slot `l + max_label`).
    pub fn site_counts(&self, x: usize) -> &[u32] {
        let s = self.spec.slots();
        &self.counts[(x - 1) * s..x * s]
    }

    pub(crate) fn site_counts_mut(&mut self, x: usize) -> &mut [u32] {
        let s = self.spec.slots();
        &mut self.counts[(x - 1) * s..x * s]
    }

    /// Sorted labels at site `x`.
    pub fn site_labels(&self, x: usize) -> Vec<i32> {
        let k = self.spec.max_label();
        let mut out = Vec::new();
        for (slot, &c) in self.site_counts(x).iter().enumerate() {
            for _ in 0..c {
                out.push(slot as i32 - k);
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let spec = &self.spec;
        let k = spec.max_label();
        if self.counts.len() != spec.sites() * spec.slots() {
            return Err(Error::Structural("count array has the wrong shape".into()));
        }
        let bad = |msg: String| Err(Error::Domain(format!("{msg} in {self}")));
        for x in 1..=spec.sites() {
            for l in -k..=k {
                if self.count(x, l) > 0 && !spec.labels().contains(&l) {
                    return bad(format!("label {l} not allowed for {:?}", spec.flavor));
                }
            }
            let total: u32 = self.site_counts(x).iter().sum();
            if total as usize != spec.stored_at(x) {
                return bad(format!("site {x} holds {total} particles, expected {}", spec.stored_at(x)));
            }
        }
        if spec.flavor.has_mirror() {
            for l in 1..=k {
                if self.count(1, l) != self.count(1, -l) {
                    return bad(format!("site 1 is not mirror-symmetric in species {l}"));
                }
            }
            if self.count(1, 0) % 2 == 1 {
                return bad("odd number of species-0 labels at the mirrored site".into());
            }
        }
        // species totals, counting mirrored site-1 labels once
        let mut per_block = vec![0u32; spec.blocks.len()];
        for x in 1..=spec.sites() {
            for l in spec.labels() {
                let c = self.count(x, l);
                per_block[spec.block_of_label(l)] += c;
            }
        }
        if spec.flavor.has_mirror() {
            for l in spec.labels() {
                if l >= 0 {
                    let half = if l == 0 { self.count(1, 0) / 2 } else { self.count(1, l) };
                    per_block[spec.block_of_label(l)] -= half;
                }
            }
        }
        for (i, (&got, &want)) in per_block.iter().zip(&spec.blocks).enumerate() {
            if got as usize != want {
                return bad(format!("species block {} has {got} particles, expected {want}", i + 1));
            }
        }
        Ok(())
    }

    /// Total of all stored labels (mirror copies included).
    pub fn stored_total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

impl fmt::Display for ParticleConfig {
    /// Site-major, species-sorted: `[1,2|-1|3]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for x in 1..=self.spec.sites() {
            if x > 1 {
                f.write_str("|")?;
            }
            let labels: Vec<String> = self.site_labels(x).iter().map(|l| l.to_string()).collect();
            f.write_str(&labels.join(","))?;
        }
        f.write_str("]")
    }
}

/// Parses the canonical text form against a known lattice shape.
pub fn parse_config(spec: Arc<LatticeSpec>, s: &str) -> Result<ParticleConfig> {
    let bad = || Error::Domain(format!("cannot parse configuration {s:?}"));
    let body = s.trim().strip_prefix('[').and_then(|b| b.strip_suffix(']')).ok_or_else(bad)?;
    let sites = body
        .split('|')
        .map(|site| {
            if site.trim().is_empty() {
                Ok(Vec::new())
            } else {
                site.split(',').map(|t| t.trim().parse::<i32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()
            }
        })
        .collect::<Result<Vec<_>>>()?;
    ParticleConfig::from_site_labels(spec, &sites)
}

/// Particle of species `w^{-1}(x)` at site `x`.
pub fn theta1(w: &SignedPermutation) -> ParticleConfig {
    let spec = Arc::new(LatticeSpec::unit(w.ctype()));
    let inv = w.inverse();
    let sites: Vec<Vec<i32>> = inv.window().iter().map(|&v| vec![v]).collect();
    ParticleConfig::from_site_labels(spec, &sites).expect("theta1 image is a valid unit configuration")
}

/// Particle of species `w(x)` at site `x`; equal to `theta1(w^{-1})`.
pub fn theta2(w: &SignedPermutation) -> ParticleConfig {
    theta1(&w.inverse())
}

/// Label of a unit-lattice letter under a colour-blind projection.
fn coarse_label(v: i32, blocks: &[usize], zero: bool) -> i32 {
    let a = v.unsigned_abs() as usize;
    let mut acc = 0;
    let mut b = 0;
    for (k, &size) in blocks.iter().enumerate() {
        acc += size;
        if a <= acc {
            b = k;
            break;
        }
    }
    let idx = if zero { b as i32 } else { b as i32 + 1 };
    v.signum() * idx
}

/// Colour-blind projection `Π_N`: letters of the same block become one species.
///
/// With `zero` set, block 1 together with its negatives collapses onto
/// species 0 and the remaining blocks are relabelled `±1, ..., ±(n-1)`.
pub fn project_colors(c: &ParticleConfig, blocks: &[usize], zero: bool) -> Result<ParticleConfig> {
    let spec = c.spec();
    if !spec.is_fine() {
        return Err(Error::Structural("colour projection needs one letter per species".into()));
    }
    let out_spec = LatticeSpec::new(
        spec.m.clone(),
        blocks.to_vec(),
        Flavor::from_flags(zero, spec.flavor.has_mirror()),
        spec.signed,
    )?;
    let sites: Vec<Vec<i32>> = (1..=spec.sites())
        .map(|x| c.site_labels(x).into_iter().map(|v| coarse_label(v, blocks, zero)).collect())
        .collect();
    ParticleConfig::from_site_labels(Arc::new(out_spec), &sites)
}

/// Site fusion `Φ_m`: consecutive unit sites merge into sites of capacity `m_x`.
///
/// With `mirror` set, the first fused site also receives the negated copy of
/// each of its particles.
pub fn fuse_sites(c: &ParticleConfig, m: &[usize], mirror: bool) -> Result<ParticleConfig> {
    let spec = c.spec();
    if !spec.is_unit_lattice() || spec.flavor.has_mirror() {
        return Err(Error::Structural("site fusion needs an unfused unit lattice".into()));
    }
    if m.iter().sum::<usize>() != spec.sites() {
        return Err(Error::Structural(format!("composition {m:?} does not cover {} sites", spec.sites())));
    }
    let out_spec = LatticeSpec::new(
        m.to_vec(),
        spec.blocks.clone(),
        Flavor::from_flags(spec.flavor.has_zero(), mirror),
        spec.signed,
    )?;
    let mut sites = Vec::with_capacity(m.len());
    let mut unit = 1;
    for (x, &size) in m.iter().enumerate() {
        let mut labels = Vec::new();
        for u in unit..unit + size {
            labels.extend(c.site_labels(u));
        }
        if x == 0 && mirror {
            let copy: Vec<i32> = labels.iter().map(|l| -l).collect();
            labels.extend(copy);
        }
        unit += size;
        sites.push(labels);
    }
    ParticleConfig::from_site_labels(Arc::new(out_spec), &sites)
}

/// Which of the two bijections of the commutative diagram to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `θ₁'' : D_{H',H} -> A`.
    One,
    /// `θ₂'' : D_{H,H'} -> A`.
    Two,
}

/// `θ₁''` or `θ₂''`. `hp` carries the site composition `m` (and `s_0` for a
/// mirrored boundary), `h` carries the species composition `N` (and `s_0` for
/// a species-0 block).
pub fn dcoset_to_config(
    x: &SignedPermutation,
    hp: &ParabolicSpec,
    h: &ParabolicSpec,
    variant: Variant,
) -> Result<ParticleConfig> {
    let distinguished = match variant {
        Variant::One => is_min_left(x, hp) && is_min_right(x, h),
        Variant::Two => is_min_left(x, h) && is_min_right(x, hp),
    };
    if !distinguished {
        return Err(Error::Domain(format!("{x} is not a distinguished double coset representative")));
    }
    let fine = match variant {
        Variant::One => theta1(x),
        Variant::Two => theta2(x),
    };
    push_down(&fine, hp, h)
}

/// `Φ_m ∘ Π_N` applied to a unit configuration.
pub fn push_down(fine: &ParticleConfig, hp: &ParabolicSpec, h: &ParabolicSpec) -> Result<ParticleConfig> {
    let coarse = project_colors(fine, h.blocks(), h.includes_s0())?;
    fuse_sites(&coarse, hp.blocks(), hp.includes_s0())
}

/// Picks one unit-lattice configuration with fine species above `c`, and the
/// group element it encodes through `theta1`.
pub fn lift(c: &ParticleConfig) -> Result<SignedPermutation> {
    let spec = c.spec();
    let ctype = spec.ctype();
    // coarse label on every unit site
    let mut unit_labels = Vec::with_capacity(spec.total());
    for x in 1..=spec.sites() {
        if x == 1 && spec.flavor.has_mirror() {
            for l in c.site_labels(1) {
                if l > 0 {
                    unit_labels.push(l);
                }
            }
            for _ in 0..c.count(1, 0) / 2 {
                unit_labels.push(0);
            }
        } else {
            unit_labels.extend(c.site_labels(x));
        }
    }
    // hand out letters of each block in increasing order
    let mut next_letter: Vec<i32> = Vec::with_capacity(spec.blocks.len());
    let mut acc = 0;
    for &b in &spec.blocks {
        next_letter.push(acc + 1);
        acc += b as i32;
    }
    let mut winv = Vec::with_capacity(unit_labels.len());
    for &l in &unit_labels {
        let b = spec.block_of_label(l);
        let letter = next_letter[b];
        next_letter[b] += 1;
        winv.push(if l < 0 { -letter } else { letter });
    }
    Ok(SignedPermutation::from_window(ctype, winv)?.inverse())
}

/// Inverse of [`dcoset_to_config`].
pub fn config_to_dcoset(
    c: &ParticleConfig,
    hp: &ParabolicSpec,
    h: &ParabolicSpec,
    variant: Variant,
) -> Result<SignedPermutation> {
    let expected = LatticeSpec::for_pair(hp, h)?;
    if *c.spec() != expected {
        return Err(Error::Structural(format!("configuration shape {:?} does not match the parabolic pair", c.spec())));
    }
    let rep = double_coset_rep(&lift(c)?, hp, h);
    Ok(match variant {
        Variant::One => rep,
        Variant::Two => rep.inverse(),
    })
}

/// Every configuration of a lattice shape, by brute force over site contents.
pub fn enumerate_space(spec: &Arc<LatticeSpec>) -> Vec<ParticleConfig> {
    let labels = spec.labels();
    let k = spec.max_label();
    let slots = spec.slots();
    // per-site candidate count vectors
    let per_site: Vec<Vec<Vec<u32>>> = (1..=spec.sites())
        .map(|x| {
            if x == 1 && spec.flavor.has_mirror() {
                let half: Vec<i32> = labels.iter().copied().filter(|&l| l >= 0).collect();
                multisets(&half, spec.m[0])
                    .into_iter()
                    .map(|ms| {
                        let mut v = vec![0u32; slots];
                        for (l, c) in half.iter().zip(ms) {
                            v[(l + k) as usize] += c;
                            v[(-l + k) as usize] += c;
                        }
                        v
                    })
                    .collect()
            } else {
                multisets(&labels, spec.m[x - 1])
                    .into_iter()
                    .map(|ms| {
                        let mut v = vec![0u32; slots];
                        for (l, c) in labels.iter().zip(ms) {
                            v[(l + k) as usize] += c;
                        }
                        v
                    })
                    .collect()
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut counts = Vec::with_capacity(spec.sites() * slots);
    fn rec(
        site: usize,
        per_site: &[Vec<Vec<u32>>],
        counts: &mut Vec<u32>,
        spec: &Arc<LatticeSpec>,
        out: &mut Vec<ParticleConfig>,
    ) {
        if site == per_site.len() {
            if let Ok(c) = ParticleConfig::new(spec.clone(), counts.clone()) {
                out.push(c);
            }
            return;
        }
        for cand in &per_site[site] {
            let len = counts.len();
            counts.extend_from_slice(cand);
            rec(site + 1, per_site, counts, spec, out);
            counts.truncate(len);
        }
    }
    rec(0, &per_site, &mut counts, spec, &mut out);
    out.sort();
    out
}

/// All count vectors of length `labels.len()` summing to `size`.
fn multisets(labels: &[i32], size: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, left: u32, n: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            go(i + 1, left - c, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if labels.is_empty() {
        if size == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(0, size as u32, labels.len(), &mut Vec::new(), &mut out);
    out
}
