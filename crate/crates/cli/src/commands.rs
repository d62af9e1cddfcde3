//! Subcommand bodies. Each returns rendered output and, for checks, the
//! failures that decide the exit code.

use std::collections::{HashMap, VecDeque};

use coxasep::config::{dcoset_to_config, Variant};
use coxasep::coxeter::{enumerate_group, poincare_series, CoxeterType, ParabolicSpec, QSeries, SignedPermutation};
use coxasep::dynamics::{
    apply_event, build_generator, resolve_mark, simulate as run_process, Boundary, ProcessSpec, Scheduler,
};
use coxasep::error::Error;
use coxasep::exact::{
    certify_colpos, certify_pair, check_factorization, check_stationarity, q_exchangeable_measure, P2Case,
};
use coxasep::hydro::{
    check_duality_exact, check_duality_mc, run_hydro, second_class_counts, trajectory_rng, HydroConfig,
    SecondClassConfig,
};
use coxasep::markov_ops::{OpContext, StepSpec};
use coxasep::report::{render, CheckRecord, Format, CHECK_HEADER, HYDRO_HEADER, SECOND_CLASS_HEADER};
use coxasep::scalar::{rat, Rational, Scalar};
use rand::Rng;
use serde::Serialize;

use crate::settings::{KeyError, Settings};
use crate::{Failure, Suite};

pub struct Output {
    pub text: String,
    pub failed: Option<String>,
}

const COLPOS_TOL: f64 = 1e-10;
const EPS: f64 = 1e-12;

fn checks_output(records: Vec<CheckRecord>, format: Format) -> Result<Output, Failure> {
    let failed: Vec<String> =
        records.iter().filter(|r| !r.pass).map(|r| format!("{} [{}]", r.check, r.instance)).collect();
    Ok(Output {
        text: render(&records, &CHECK_HEADER, format)?,
        failed: if failed.is_empty() { None } else { Some(failed.join(", ")) },
    })
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Parabolic pairs selected by `m`, `blocks` and `boundary`; all compositions
/// when unset.
fn pairs(s: &Settings, ct: CoxeterType) -> Result<Vec<(ParabolicSpec, ParabolicSpec)>, Failure> {
    let ms = match &s.m {
        Some(m) => vec![m.clone()],
        None => compositions(ct.rank),
    };
    let ns = match &s.blocks {
        Some(n) => vec![n.clone()],
        None => compositions(ct.rank),
    };
    let cases: Vec<P2Case> = match s.boundary {
        _ if !ct.is_bc() => vec![],
        Some(Boundary::Case1) => vec![P2Case::A, P2Case::B],
        Some(Boundary::Case2) => vec![P2Case::C, P2Case::D],
        Some(Boundary::None) => {
            return Err(KeyError::new("boundary", "type BC processes have a Case 1 or Case 2 boundary").into())
        }
        None => P2Case::ALL.to_vec(),
    };
    let mut out = Vec::new();
    for m in &ms {
        for n in &ns {
            if ct.is_bc() {
                for case in &cases {
                    out.push(case.pair(ct.rank, m, n).map_err(|e| keyed(e, "m"))?);
                }
            } else {
                out.push((
                    ParabolicSpec::new(ct, m.clone(), false).map_err(|e| keyed(e, "m"))?,
                    ParabolicSpec::new(ct, n.clone(), false).map_err(|e| keyed(e, "blocks"))?,
                ));
            }
        }
    }
    Ok(out)
}

fn keyed(e: Error, key: &str) -> KeyError {
    KeyError::new(key, e.to_string())
}

fn bfs_lengths(ct: CoxeterType) -> HashMap<SignedPermutation, usize> {
    let e = SignedPermutation::identity(ct);
    let mut dist = HashMap::from([(e.clone(), 0)]);
    let mut queue = VecDeque::from([e]);
    while let Some(w) = queue.pop_front() {
        let d = dist[&w];
        for g in ct.generators() {
            let v = w.right_mul_gen(g);
            if !dist.contains_key(&v) {
                dist.insert(v.clone(), d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn coxeter_suite(ct: CoxeterType) -> Result<Vec<CheckRecord>, Error> {
    let inst = ct.to_string();
    let group = enumerate_group(ct)?;
    Ok(vec![
        CheckRecord::timed("coxeter.order", inst.clone(), || {
            let d = (group.len() as f64 - ct.order() as f64).abs();
            Ok((d, 0.0, d == 0.0))
        })?,
        CheckRecord::timed("coxeter.length", inst.clone(), || {
            let bfs = bfs_lengths(ct);
            let bad = group.iter().filter(|w| bfs.get(*w) != Some(&w.length())).count() as f64;
            Ok((bad, 0.0, bad == 0.0 && bfs.len() == group.len()))
        })?,
        CheckRecord::timed("coxeter.poincare", inst, || {
            let ok = poincare_series(&group) == QSeries::product_formula(ct);
            Ok((if ok { 0.0 } else { 1.0 }, 0.0, ok))
        })?,
    ])
}

fn diagram_suite(s: &Settings, ct: CoxeterType) -> Result<Vec<CheckRecord>, Failure> {
    let mut out = Vec::new();
    for (hp, h) in pairs(s, ct)? {
        let report = certify_pair(&hp, &h)?;
        out.push(CheckRecord::timed("diagrams", report.instance.clone(), || {
            let bad = report.failures() as f64;
            Ok((bad, 0.0, bad == 0.0))
        })?);
    }
    Ok(out)
}

fn colpos_suite(s: &Settings, ct: CoxeterType) -> Result<Vec<CheckRecord>, Failure> {
    let q = s.q_or("1/2");
    let mut out = Vec::new();
    let ctx = OpContext::new(ct, q.exact.clone())?;
    let mut rng = trajectory_rng(s.seed.unwrap_or(0), 0);
    let gens = ct.generators();
    let sequences = s.trajectories.unwrap_or(200);
    out.push(CheckRecord::timed("colpos.algebraic", format!("{ct} q={} n={sequences}", q.exact), || {
        let mut worst = Rational::from_int(0);
        for _ in 0..sequences {
            let n = rng.gen_range(1..=6);
            let steps: Vec<StepSpec<Rational>> = (0..n)
                .map(|_| {
                    let d = rng.gen_range(1..=12i64);
                    StepSpec::new(gens[rng.gen_range(0..gens.len())], rat(rng.gen_range(0..=d), d))
                })
                .collect();
            let r = ctx.check_colpos(&steps)?.max();
            if r > worst {
                worst = r;
            }
        }
        let zero = worst == Rational::from_int(0);
        Ok((worst.to_f64(), 0.0, zero))
    })?);
    let selected = if s.m.is_some() || s.blocks.is_some() {
        pairs(s, ct)?
    } else if ct.is_bc() {
        vec![(ParabolicSpec::new(ct, vec![1; ct.rank], true)?, ParabolicSpec::new(ct, vec![1; ct.rank], true)?)]
    } else {
        vec![(ParabolicSpec::trivial(ct), ParabolicSpec::trivial(ct))]
    };
    for (hp, h) in selected {
        let times = match s.t {
            Some(t) => vec![t],
            None => vec![0.5, 1.0, 2.0],
        };
        let cert = certify_colpos(&hp, &h, q.value, &times, EPS)?;
        out.push(CheckRecord::timed("colpos.dynamical", cert.instance.clone(), || {
            Ok((cert.max_discrepancy(), cert.max_eps(), cert.max_discrepancy() <= COLPOS_TOL))
        })?);
    }
    Ok(out)
}

fn stationarity_suite(s: &Settings, ct: CoxeterType) -> Result<Vec<CheckRecord>, Failure> {
    let q = s.q_or("1/3");
    let mut out = Vec::new();
    for (hp, h) in pairs(s, ct)? {
        let p = ProcessSpec::for_pair(&hp, &h, q.exact.clone())?;
        let inst = format!("{ct} m={:?} N={:?} {:?} q={}", hp.blocks(), h.blocks(), p.boundary(), q.exact);
        let inst = if h.includes_s0() { format!("{inst} species0") } else { inst };
        out.push(CheckRecord::timed("stationarity", inst.clone(), || {
            let g = build_generator(&p)?;
            let mu = q_exchangeable_measure(&g, &p)?;
            let r = check_stationarity(&g, &mu)?;
            Ok((r.to_f64(), 0.0, r == Rational::from_int(0)))
        })?);
        out.push(CheckRecord::timed("factorization", inst, || {
            let r = check_factorization(&p)?.max();
            Ok((r.to_f64(), 0.0, r == Rational::from_int(0)))
        })?);
    }
    Ok(out)
}

pub fn verify(s: &Settings, suite: Suite, format: Format) -> Result<Output, Failure> {
    let ct = s.coxeter_type(3);
    let want = |x: Suite| suite == Suite::All || suite == x;
    let mut records = Vec::new();
    if want(Suite::Coxeter) {
        records.extend(coxeter_suite(ct)?);
    }
    if want(Suite::Diagrams) {
        records.extend(diagram_suite(s, ct)?);
    }
    if want(Suite::Colpos) {
        records.extend(colpos_suite(s, ct)?);
    }
    if want(Suite::Stationarity) {
        records.extend(stationarity_suite(s, ct)?);
    }
    checks_output(records, format)
}

#[derive(Serialize)]
struct SimRow {
    traj: usize,
    time: f64,
    state: String,
}

pub fn simulate(s: &Settings, format: Format) -> Result<Output, Failure> {
    let ct = s.coxeter_type(3);
    if s.m.is_none() || s.blocks.is_none() {
        return Err(KeyError::new(if s.m.is_none() { "m" } else { "blocks" }, "required for simulate").into());
    }
    let candidates = pairs(s, ct)?;
    let (hp, h) = if ct.is_bc() {
        // Case 1 and Case 2 without a species-0 block
        candidates
            .into_iter()
            .find(|(hp, h)| !h.includes_s0() && hp.includes_s0() == (s.boundary == Some(Boundary::Case2)))
            .expect("non-empty")
    } else {
        candidates.into_iter().next().expect("non-empty")
    };
    let q = s.q_or("0.5");
    let p = ProcessSpec::for_pair(&hp, &h, q.value)?;
    let t = s.t.unwrap_or(1.0);
    let init = dcoset_to_config(&SignedPermutation::identity(ct), &hp, &h, Variant::One)?;
    let mut rows = Vec::new();
    for traj in 0..s.trajectories.unwrap_or(1) {
        let mut rng = trajectory_rng(s.seed.unwrap_or(0), traj as u64);
        let (_, rec) = run_process(&p, &init, t, Scheduler::PoissonClock, &mut rng)?;
        let mut state = init.clone();
        rows.push(SimRow { traj, time: 0.0, state: state.to_string() });
        for e in &rec.events {
            if let Some(kind) = resolve_mark(&state, &p, e.location, e.mark, rec.clock_rate) {
                state = apply_event(&state, kind);
                rows.push(SimRow { traj, time: e.time, state: state.to_string() });
            }
        }
    }
    Ok(Output { text: render(&rows, &["traj", "time", "state"], format)?, failed: None })
}

fn single_m(s: &Settings) -> Result<u32, KeyError> {
    match s.m.as_deref() {
        None => Ok(1),
        Some([m]) if *m >= 1 => Ok(*m as u32),
        Some(other) => Err(KeyError::new("m", format!("expected one positive capacity, got {other:?}"))),
    }
}

pub fn hydro(s: &Settings, format: Format) -> Result<Output, Failure> {
    let mut cfg = HydroConfig::new(
        s.q_or("0.5").value,
        single_m(s)?,
        s.t.unwrap_or(200.0),
        s.trajectories.unwrap_or(200),
        s.seed.unwrap_or(0),
    );
    cfg.window = s.window;
    if let Some(b) = s.bins {
        cfg.bins = b;
    }
    let profile = run_hydro(&cfg)?;
    Ok(Output { text: render(&profile.rows, &HYDRO_HEADER, format)?, failed: None })
}

pub fn secondclass(s: &Settings, format: Format) -> Result<Output, Failure> {
    let cfg = SecondClassConfig {
        q: s.q_or("0.5").value,
        m: single_m(s)?,
        t: s.t.unwrap_or(20.0),
        trajectories: s.trajectories.unwrap_or(1000),
        seed: s.seed.unwrap_or(0),
        window: s.window,
        thresholds: s.thresholds.clone().unwrap_or_else(|| vec![-4, -2, 0, 2, 4]),
    };
    let stats = second_class_counts(&cfg)?;
    Ok(Output { text: render(&stats.rows, &SECOND_CLASS_HEADER, format)?, failed: None })
}

/// Largest state space solved exactly.
const DUALITY_EXACT_CAP: usize = 20_000;

pub fn duality(s: &Settings, format: Format) -> Result<Output, Failure> {
    let q = s.q_or("0.5").value;
    let m = single_m(s)?;
    let sites = s.window.unwrap_or(3);
    let t = s.t.unwrap_or(1.0);
    let mut records = Vec::new();
    if (m as usize + 1).checked_pow(sites as u32).is_some_and(|n| n <= DUALITY_EXACT_CAP) {
        let inst = format!("sites={sites} m={m} q={q} t={t}");
        records.push(CheckRecord::timed("duality.exact", inst, || {
            let r = check_duality_exact(sites, q, m, t, EPS)?;
            Ok((r.max_discrepancy, r.approx.eps, r.max_discrepancy <= COLPOS_TOL))
        })?);
    }
    let n = s.trajectories.unwrap_or(10_000);
    for x in 1..=sites + 1 {
        let inst = format!("sites={sites} m={m} q={q} t={t} x={x} n={n}");
        records.push(CheckRecord::timed("duality.mc", inst, || {
            let r = check_duality_mc(sites, q, m, t, x, n, s.seed.unwrap_or(0))?;
            let z = r.z_score();
            Ok((z, 0.0, z <= 3.0))
        })?);
    }
    checks_output(records, format)
}
