//! Multi-species ASEP(q, m) on a finite segment, with the two left boundaries.
//!
//! Rates follow the q-exchangeable picture: a particle leaving site `x` to the
//! right is the rightmost one of a q-exchangeable ordering of site `x`, and it
//! meets the leftmost one of site `x + 1`. Swaps that put the larger species on
//! the right happen at rate 1, the others carry an extra factor `q`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::config::{enumerate_space, LatticeSpec, ParticleConfig};
use crate::coxeter::ParabolicSpec;
use crate::error::{Error, Result};
use crate::exact::RateMatrix;
use crate::scalar::{q_int, Scalar};

/// Maximal number of states [`build_generator`] will assemble.
pub const STATE_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    /// Closed segment.
    None,
    /// `s_0 ∉ H'`: the leftmost particle of site 1 flips its sign.
    Case1,
    /// `s_0 ∈ H'`: site 1 holds mirrored pairs and has capacity `2 m_1`.
    Case2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessSpec<S> {
    spec: Arc<LatticeSpec>,
    q: S,
    boundary: Boundary,
}

impl<S: Scalar> ProcessSpec<S> {
    pub fn new(spec: Arc<LatticeSpec>, q: S, boundary: Boundary) -> Result<Self> {
        if q <= S::zero() {
            return Err(Error::Domain(format!("q = {q:?} must be positive")));
        }
        let mirror = spec.flavor().has_mirror();
        match boundary {
            Boundary::Case2 if !mirror => return Err(Error::Structural("Case 2 needs a mirrored first site".into())),
            Boundary::None | Boundary::Case1 if mirror => {
                return Err(Error::Structural("a mirrored first site needs the Case 2 boundary".into()))
            }
            Boundary::Case1 if !spec.signed() => {
                return Err(Error::Structural("Case 1 flips signs and needs signed species".into()))
            }
            _ => {}
        }
        Ok(Self { spec, q, boundary })
    }

    /// The boundary process on `D_{H',H}`; type A pairs give the closed segment.
    pub fn for_pair(hp: &ParabolicSpec, h: &ParabolicSpec, q: S) -> Result<Self> {
        let spec = Arc::new(LatticeSpec::for_pair(hp, h)?);
        let boundary = if !hp.ctype().is_bc() {
            Boundary::None
        } else if hp.includes_s0() {
            Boundary::Case2
        } else {
            Boundary::Case1
        };
        Self::new(spec, q, boundary)
    }

    pub fn spec(&self) -> &Arc<LatticeSpec> {
        &self.spec
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Same process with the parameter converted to `f64`.
    pub fn to_f64(&self) -> ProcessSpec<f64> {
        ProcessSpec { spec: self.spec.clone(), q: self.q.to_f64(), boundary: self.boundary }
    }

    /// Clock locations: every bond, plus the flip site in Case 1.
    pub fn locations(&self) -> Vec<Location> {
        let mut out = Vec::new();
        if self.boundary == Boundary::Case1 {
            out.push(Location::Boundary);
        }
        out.extend((1..self.spec.sites()).map(Location::Bond));
        out
    }
}

/// Which particle of a bulk swap moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// Species `i` at `x` moves to `x + 1`, species `j < i` moves back.
    Rightward,
    /// Species `i` at `x + 1` moves to `x`, species `j < i` moves forward.
    Leftward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    BulkSwap { x: usize, i: i32, j: i32, direction: Direction },
    BoundaryFlip { j: i32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateEvent<S> {
    pub kind: EventKind,
    pub rate: S,
}

/// `P(rightmost particle at x has species i)` under the q-exchangeable ordering.
fn rightmost<S: Scalar>(c: &ParticleConfig, x: usize, i: i32, q: &S) -> S {
    let k = c.count(x, i);
    if k == 0 {
        return S::zero();
    }
    let above: u32 = c.spec().labels().iter().filter(|&&s| s > i).map(|&s| c.count(x, s)).sum();
    q.powi(above) * q_int(q, k) / q_int(q, c.spec().stored_at(x) as u32)
}

/// `P(leftmost particle at x has species j)`.
fn leftmost<S: Scalar>(c: &ParticleConfig, x: usize, j: i32, q: &S) -> S {
    let k = c.count(x, j);
    if k == 0 {
        return S::zero();
    }
    let below: u32 = c.spec().labels().iter().filter(|&&r| r < j).map(|&r| c.count(x, r)).sum();
    q.powi(below) * q_int(q, k) / q_int(q, c.spec().stored_at(x) as u32)
}

/// Rate of the bulk swap of species `i > j` across bond `(x, x + 1)`.
pub fn bulk_rate<S: Scalar>(c: &ParticleConfig, q: &S, x: usize, i: i32, j: i32, direction: Direction) -> Result<S> {
    if i <= j {
        return Err(Error::Domain(format!("bulk swap needs i > j, got i={i}, j={j}")));
    }
    if x == 0 || x >= c.spec().sites() {
        return Err(Error::Domain(format!("bond {x} outside 1..{}", c.spec().sites())));
    }
    Ok(match direction {
        Direction::Rightward => rightmost(c, x, i, q) * leftmost(c, x + 1, j, q),
        Direction::Leftward => q.clone() * rightmost(c, x, j, q) * leftmost(c, x + 1, i, q),
    })
}

fn bond_events<S: Scalar>(c: &ParticleConfig, q: &S, x: usize, out: &mut Vec<RateEvent<S>>) {
    let labels = c.spec().labels();
    for &i in &labels {
        for &j in labels.iter().filter(|&&j| j < i) {
            for direction in [Direction::Rightward, Direction::Leftward] {
                let rate = bulk_rate(c, q, x, i, j, direction).expect("i > j on an interior bond");
                if !rate.is_zero() {
                    out.push(RateEvent { kind: EventKind::BulkSwap { x, i, j, direction }, rate });
                }
            }
        }
    }
}

fn flip_events<S: Scalar>(c: &ParticleConfig, q: &S, out: &mut Vec<RateEvent<S>>) {
    for j in c.spec().labels() {
        if j == 0 {
            continue;
        }
        let p = leftmost(c, 1, j, q);
        if p.is_zero() {
            continue;
        }
        let rate = if j < 0 { p } else { q.clone() * p };
        out.push(RateEvent { kind: EventKind::BoundaryFlip { j }, rate });
    }
}

/// Boundary transitions out of `c`: sign flips in Case 1, the mirrored
/// swaps across bond `(1, 2)` in Case 2.
pub fn boundary_rates<S: Scalar>(c: &ParticleConfig, p: &ProcessSpec<S>) -> Vec<RateEvent<S>> {
    let mut out = Vec::new();
    match p.boundary {
        Boundary::None => {}
        Boundary::Case1 => flip_events(c, &p.q, &mut out),
        Boundary::Case2 => {
            if c.spec().sites() > 1 {
                bond_events(c, &p.q, 1, &mut out);
            }
        }
    }
    out
}

/// Events available at one clock location, in a fixed order.
pub fn location_events<S: Scalar>(c: &ParticleConfig, p: &ProcessSpec<S>, loc: Location) -> Vec<RateEvent<S>> {
    let mut out = Vec::new();
    match loc {
        Location::Boundary => {
            if p.boundary == Boundary::Case1 {
                flip_events(c, &p.q, &mut out);
            }
        }
        Location::Bond(x) => bond_events(c, &p.q, x, &mut out),
    }
    out
}

/// Every transition out of `c`.
pub fn all_events<S: Scalar>(c: &ParticleConfig, p: &ProcessSpec<S>) -> Vec<RateEvent<S>> {
    let mut out = Vec::new();
    for loc in p.locations() {
        out.extend(location_events(c, p, loc));
    }
    out
}

fn move_label(c: &mut ParticleConfig, x: usize, from: i32, to: i32) {
    let k = c.spec().max_label();
    let site = c.site_counts_mut(x);
    site[(from + k) as usize] -= 1;
    site[(to + k) as usize] += 1;
}

/// Result of an event; the Case 2 mirror update is part of the same step.
pub fn apply_event(c: &ParticleConfig, kind: EventKind) -> ParticleConfig {
    let mut out = c.clone();
    let mirror = c.spec().flavor().has_mirror();
    match kind {
        EventKind::BulkSwap { x, i, j, direction } => {
            let (left_out, left_in) = match direction {
                Direction::Rightward => (i, j),
                Direction::Leftward => (j, i),
            };
            move_label(&mut out, x, left_out, left_in);
            move_label(&mut out, x + 1, left_in, left_out);
            if mirror && x == 1 {
                move_label(&mut out, 1, -left_out, -left_in);
            }
        }
        EventKind::BoundaryFlip { j } => move_label(&mut out, 1, j, -j),
    }
    out
}

/// Outgoing transitions aggregated by target, self-loops dropped.
pub fn transitions<S: Scalar>(c: &ParticleConfig, p: &ProcessSpec<S>) -> Vec<(ParticleConfig, S)> {
    let mut acc: BTreeMap<ParticleConfig, S> = BTreeMap::new();
    for ev in all_events(c, p) {
        let target = apply_event(c, ev.kind);
        if &target == c {
            continue;
        }
        let slot = acc.entry(target).or_insert_with(S::zero);
        *slot = slot.clone() + ev.rate;
    }
    acc.into_iter().collect()
}

/// Generator on the full state space of `p`, built from the displayed rates.
pub fn build_generator<S: Scalar>(p: &ProcessSpec<S>) -> Result<RateMatrix<S>> {
    let states = enumerate_space(p.spec());
    if states.len() > STATE_CAP {
        return Err(Error::Resource(format!("{} states exceed the cap {STATE_CAP}", states.len())));
    }
    let rows = states.iter().map(|c| transitions(c, p)).collect::<Vec<_>>();
    RateMatrix::from_transitions(states, rows)
}

/// Exact law of the within-site orderings: a distribution on the unit lattice.
///
/// Only defined away from a mirrored site.
pub fn lambda_law<S: Scalar>(c: &ParticleConfig, q: &S) -> Result<Vec<(ParticleConfig, S)>> {
    let spec = c.spec();
    if spec.flavor().has_mirror() {
        return Err(Error::Domain("within-site splitting of a mirrored site is not a product law".into()));
    }
    let mut partial: Vec<(Vec<i32>, S)> = vec![(Vec::new(), S::one())];
    for x in 1..=spec.sites() {
        let words = site_words(c.site_labels(x), q);
        let mut next = Vec::with_capacity(partial.len() * words.len());
        for (prefix, p) in &partial {
            for (w, pw) in &words {
                let mut v = prefix.clone();
                v.extend_from_slice(w);
                next.push((v, p.clone() * pw.clone()));
            }
        }
        partial = next;
    }
    let unit = Arc::new(spec.unit_lattice());
    partial
        .into_iter()
        .map(|(word, p)| {
            let sites: Vec<Vec<i32>> = word.into_iter().map(|l| vec![l]).collect();
            Ok((ParticleConfig::from_site_labels(unit.clone(), &sites)?, p))
        })
        .collect()
}

/// Distinct orderings of a multiset with their q-exchangeable probabilities.
fn site_words<S: Scalar>(labels: Vec<i32>, q: &S) -> Vec<(Vec<i32>, S)> {
    if labels.is_empty() {
        return vec![(Vec::new(), S::one())];
    }
    let mut distinct = labels.clone();
    distinct.dedup();
    let m = labels.len() as u32;
    let mut out = Vec::new();
    for &j in &distinct {
        let k = labels.iter().filter(|&&l| l == j).count() as u32;
        let below = labels.iter().filter(|&&l| l < j).count() as u32;
        let p = q.powi(below) * q_int(q, k) / q_int(q, m);
        let mut rest = labels.clone();
        let pos = rest.iter().position(|&l| l == j).expect("label present");
        rest.remove(pos);
        for (mut w, pw) in site_words(rest, q) {
            w.insert(0, j);
            out.push((w, p.clone() * pw));
        }
    }
    out
}

/// Samples the within-site orderings: leftmost particle first.
pub fn lambda_expand<R: Rng + ?Sized>(c: &ParticleConfig, q: f64, rng: &mut R) -> Result<ParticleConfig> {
    let spec = c.spec();
    if spec.flavor().has_mirror() {
        return Err(Error::Domain("within-site splitting of a mirrored site is not a product law".into()));
    }
    let mut sites = Vec::with_capacity(spec.total());
    for x in 1..=spec.sites() {
        let mut labels = c.site_labels(x);
        while !labels.is_empty() {
            let m = labels.len() as u32;
            let total = q_int(&q, m);
            let mut u = rng.gen::<f64>() * total;
            let mut distinct = labels.clone();
            distinct.dedup();
            let mut chosen = *distinct.last().expect("non-empty site");
            let mut below = 0u32;
            for &j in &distinct {
                let k = labels.iter().filter(|&&l| l == j).count() as u32;
                let w = q.powi(below as i32) * q_int(&q, k);
                if u < w {
                    chosen = j;
                    break;
                }
                u -= w;
                below += k;
            }
            let pos = labels.iter().position(|&l| l == chosen).expect("label present");
            labels.remove(pos);
            sites.push(vec![chosen]);
        }
    }
    ParticleConfig::from_site_labels(Arc::new(spec.unit_lattice()), &sites)
}

/// Where a Poisson clock lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Location {
    /// The Case 1 flip at site 1.
    Boundary,
    /// Bond `(x, x + 1)`.
    Bond(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheduler {
    /// One rate-`c` Poisson clock per location; rings may be no-ops.
    PoissonClock,
    /// Exact next-event sampling; only effective events are recorded.
    Gillespie,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockEvent {
    pub time: f64,
    pub location: Location,
    /// Uniform in `[0, 1)`; selects the outcome among the rates at `location`.
    pub mark: f64,
}

/// Clock rings of one trajectory, enough for bit-exact replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphicalRecord {
    pub version: u32,
    pub horizon: f64,
    pub clock_rate: f64,
    pub scheduler: Scheduler,
    pub events: Vec<ClockEvent>,
}

impl GraphicalRecord {
    pub const VERSION: u32 = 1;

    /// Maps every ring at time `t` to `T - t`.
    pub fn reflected(&self) -> Self {
        let events = self.events.iter().rev().map(|e| ClockEvent { time: self.horizon - e.time, ..*e }).collect();
        Self { events, ..self.clone() }
    }
}

/// Per-location clock rate; bounds every location's total rate.
pub fn clock_rate(q: f64) -> f64 {
    q.max(1.0)
}

/// Outcome of a ring with mark `u` at `loc`, or `None` for a no-op.
pub fn resolve_mark(c: &ParticleConfig, p: &ProcessSpec<f64>, loc: Location, u: f64, rate: f64) -> Option<EventKind> {
    let mut target = u * rate;
    for ev in location_events(c, p, loc) {
        if target < ev.rate {
            return Some(ev.kind);
        }
        target -= ev.rate;
    }
    None
}

/// Runs the process up to time `horizon` from `init`.
pub fn simulate<R: Rng + ?Sized>(
    p: &ProcessSpec<f64>,
    init: &ParticleConfig,
    horizon: f64,
    scheduler: Scheduler,
    rng: &mut R,
) -> Result<(ParticleConfig, GraphicalRecord)> {
    if !(horizon >= 0.0) {
        return Err(Error::Domain(format!("horizon {horizon} must be non-negative")));
    }
    if init.spec() != p.spec().as_ref() {
        return Err(Error::Structural("initial state does not match the process".into()));
    }
    let rate = clock_rate(p.q);
    let locations = p.locations();
    let mut state = init.clone();
    let mut events = Vec::new();
    let mut t = 0.0;
    match scheduler {
        Scheduler::PoissonClock => {
            if !locations.is_empty() {
                let exp = Exp::new(rate * locations.len() as f64).expect("positive clock rate");
                loop {
                    t += exp.sample(rng);
                    if t > horizon {
                        break;
                    }
                    let location = locations[rng.gen_range(0..locations.len())];
                    let mark: f64 = rng.gen();
                    if let Some(kind) = resolve_mark(&state, p, location, mark, rate) {
                        state = apply_event(&state, kind);
                    }
                    events.push(ClockEvent { time: t, location, mark });
                }
            }
        }
        Scheduler::Gillespie => loop {
            let per_loc: Vec<(Location, Vec<RateEvent<f64>>)> =
                locations.iter().map(|&l| (l, location_events(&state, p, l))).collect();
            let total: f64 = per_loc.iter().flat_map(|(_, evs)| evs.iter().map(|e| e.rate)).sum();
            if total <= 0.0 {
                break;
            }
            t += Exp::new(total).expect("positive total rate").sample(rng);
            if t > horizon {
                break;
            }
            let mut u = rng.gen::<f64>() * total;
            'pick: for (location, evs) in &per_loc {
                let mut before = 0.0;
                for ev in evs {
                    if u < ev.rate {
                        let mark = ((before + u) / rate).min(f64::from_bits(1.0f64.to_bits() - 1));
                        state = apply_event(&state, ev.kind);
                        events.push(ClockEvent { time: t, location: *location, mark });
                        break 'pick;
                    }
                    u -= ev.rate;
                    before += ev.rate;
                }
            }
        },
    }
    let record = GraphicalRecord { version: GraphicalRecord::VERSION, horizon, clock_rate: rate, scheduler, events };
    Ok((state, record))
}

/// Applies the rings of `rec` in time order, starting from `init`.
pub fn replay(rec: &GraphicalRecord, init: &ParticleConfig, p: &ProcessSpec<f64>) -> Result<ParticleConfig> {
    if rec.version != GraphicalRecord::VERSION {
        return Err(Error::Structural(format!("record version {} is not supported", rec.version)));
    }
    let mut state = init.clone();
    for e in &rec.events {
        if let Some(kind) = resolve_mark(&state, p, e.location, e.mark, rec.clock_rate) {
            state = apply_event(&state, kind);
        }
    }
    Ok(state)
}

/// Replays the time-reflected clock record from `init`.
pub fn reverse_replay(rec: &GraphicalRecord, init: &ParticleConfig, p: &ProcessSpec<f64>) -> Result<ParticleConfig> {
    if rec.scheduler != Scheduler::PoissonClock {
        return Err(Error::Domain("reversal needs the full clock record of the Poisson-clock scheduler".into()));
    }
    replay(&rec.reflected(), init, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Flavor};
    use crate::scalar::{rat, Rational};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(m: Vec<usize>, n: Vec<usize>, flavor: Flavor, signed: bool) -> Arc<LatticeSpec> {
        Arc::new(LatticeSpec::new(m, n, flavor, signed).unwrap())
    }

    #[test]
    fn unit_rates() {
        let s = spec(vec![1, 1], vec![1, 1], Flavor::Plain, false);
        let c = parse_config(s, "[2|1]").unwrap();
        let q = rat(1, 3);
        assert_eq!(bulk_rate(&c, &q, 1, 2, 1, Direction::Rightward).unwrap(), rat(1, 1));
        assert_eq!(bulk_rate(&c, &q, 1, 2, 1, Direction::Leftward).unwrap(), rat(0, 1));
        assert!(matches!(bulk_rate(&c, &q, 1, 1, 2, Direction::Rightward), Err(Error::Domain(_))));
        let d = apply_event(&c, EventKind::BulkSwap { x: 1, i: 2, j: 1, direction: Direction::Rightward });
        assert_eq!(d.to_string(), "[1|2]");
        assert_eq!(bulk_rate(&d, &q, 1, 2, 1, Direction::Leftward).unwrap(), q);
    }

    #[test]
    fn fused_rate_by_hand() {
        let s = spec(vec![2, 2], vec![2, 1, 1], Flavor::Plain, false);
        let c = parse_config(s, "[2,3|1,1]").unwrap();
        let q = rat(1, 2);
        // q^1 [1]/[2] * q^0 [2]/[2]
        assert_eq!(bulk_rate(&c, &q, 1, 2, 1, Direction::Rightward).unwrap(), rat(1, 2) / rat(3, 2));
        let q1 = rat(1, 1);
        let s = spec(vec![2, 2], vec![2, 2], Flavor::Plain, false);
        let c = parse_config(s, "[2,2|1,1]").unwrap();
        assert_eq!(bulk_rate(&c, &q1, 1, 2, 1, Direction::Rightward).unwrap(), rat(1, 1));
    }

    #[test]
    fn case1_flip_rates() {
        let s = spec(vec![1, 1], vec![1, 1], Flavor::Plain, true);
        let q = rat(1, 2);
        let p = ProcessSpec::new(s.clone(), q.clone(), Boundary::Case1).unwrap();
        let neg = parse_config(s.clone(), "[-2|1]").unwrap();
        let ev = boundary_rates(&neg, &p);
        assert_eq!(ev, vec![RateEvent { kind: EventKind::BoundaryFlip { j: -2 }, rate: rat(1, 1) }]);
        let pos = parse_config(s, "[2|1]").unwrap();
        assert_eq!(boundary_rates(&pos, &p)[0].rate, q);
        assert_eq!(apply_event(&pos, EventKind::BoundaryFlip { j: 2 }).to_string(), "[-2|1]");
    }

    #[test]
    fn case2_small_example() {
        // BC_2, H' = H = <s_0>: three states
        let s = spec(vec![1, 1], vec![1, 1], Flavor::MirrorZero, true);
        let q = rat(1, 3);
        let p = ProcessSpec::new(s.clone(), q.clone(), Boundary::Case2).unwrap();
        let a = parse_config(s.clone(), "[0,0|1]").unwrap();
        let b = parse_config(s.clone(), "[0,0|-1]").unwrap();
        let c = parse_config(s, "[-1,1|0]").unwrap();
        let one = rat(1, 1);
        assert_eq!(transitions(&a, &p), vec![(c.clone(), q.clone())]);
        assert_eq!(transitions(&b, &p), vec![(c.clone(), one.clone())]);
        let out: BTreeMap<_, _> = transitions(&c, &p).into_iter().collect();
        assert_eq!(out[&a], one.clone() / (one.clone() + q.clone()));
        assert_eq!(out[&b], q.clone() * q.clone() / (one + q));
        let g = build_generator(&p).unwrap();
        assert_eq!(g.dim(), 3);
    }

    #[test]
    fn two_site_generator() {
        let s = spec(vec![1, 1], vec![1, 1], Flavor::Plain, false);
        let q = rat(1, 2);
        let g = build_generator(&ProcessSpec::new(s.clone(), q.clone(), Boundary::None).unwrap()).unwrap();
        let a = g.index_of(&parse_config(s.clone(), "[1|2]").unwrap()).unwrap();
        let b = g.index_of(&parse_config(s, "[2|1]").unwrap()).unwrap();
        assert_eq!((g.entry(a, a), g.entry(a, b)), (-q.clone(), q.clone()));
        assert_eq!((g.entry(b, a), g.entry(b, b)), (rat(1, 1), rat(-1, 1)));
    }

    #[test]
    fn lambda_two_particles() {
        let s = spec(vec![2], vec![1, 1], Flavor::Plain, false);
        let c = parse_config(s, "[1,2]").unwrap();
        let q = rat(1, 2);
        let law: BTreeMap<String, Rational> =
            lambda_law(&c, &q).unwrap().into_iter().map(|(u, p)| (u.to_string(), p)).collect();
        assert_eq!(law["[2|1]"], rat(1, 3));
        assert_eq!(law["[1|2]"], rat(2, 3));
        let single =
            parse_config(Arc::new(LatticeSpec::new(vec![1], vec![1], Flavor::Plain, false).unwrap()), "[1]").unwrap();
        assert_eq!(lambda_law(&single, &q).unwrap().len(), 1);
    }

    #[test]
    fn lambda_sampler_frequencies() {
        let s = spec(vec![2], vec![1, 1], Flavor::Plain, false);
        let c = parse_config(s, "[1,2]").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut hits = 0;
        for _ in 0..n {
            let u = lambda_expand(&c, 0.5, &mut rng).unwrap();
            if u.to_string() == "[2|1]" {
                hits += 1;
            }
            assert_eq!(crate::config::fuse_sites(&u, &[2], false).unwrap(), c);
        }
        let p = 1.0 / 3.0;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn replay_and_reflection() {
        let s = spec(vec![1, 1, 1], vec![1, 1, 1], Flavor::Plain, true);
        let p = ProcessSpec::new(s.clone(), 0.5, Boundary::Case1).unwrap();
        let init = parse_config(s, "[1|2|3]").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (end, rec) = simulate(&p, &init, 2.0, Scheduler::PoissonClock, &mut rng).unwrap();
        assert_eq!(replay(&rec, &init, &p).unwrap(), end);
        let back = rec.reflected().reflected();
        assert_eq!(back.events.len(), rec.events.len());
        for (a, b) in back.events.iter().zip(&rec.events) {
            assert!((a.time - b.time).abs() < 1e-12 && a.location == b.location && a.mark == b.mark);
        }
        assert!(rec.events.windows(2).all(|w| w[0].time < w[1].time));
        let (zero, rec0) = simulate(&p, &init, 0.0, Scheduler::PoissonClock, &mut rng).unwrap();
        assert_eq!(zero, init);
        assert_eq!(reverse_replay(&rec0, &init, &p).unwrap(), init);
    }

    #[test]
    fn case2_mirror_survives_simulation() {
        let s = spec(vec![2, 1], vec![1, 2], Flavor::Mirror, true);
        let p = ProcessSpec::new(s.clone(), 0.7, Boundary::Case2).unwrap();
        let init = parse_config(s, "[-2,-1,1,2|2]").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (end, _) = simulate(&p, &init, 1.0, Scheduler::Gillespie, &mut rng).unwrap();
            ParticleConfig::new(end.spec_arc().clone(), (1..=2).flat_map(|x| end.site_counts(x).to_vec()).collect())
                .unwrap();
        }
    }
}
