use std::sync::Arc;

use coxasep::config::{config_to_dcoset, dcoset_to_config, parse_config, theta1, theta2, LatticeSpec, Variant};
use coxasep::coxeter::{double_coset_rep, CoxeterType, ParabolicSpec, SignedPermutation};
use coxasep::dynamics::{build_generator, replay, simulate, ProcessSpec, Scheduler};
use coxasep::exact::{evolve, P2Case};
use coxasep::hydro::{limit_density, second_class_counts, trajectory_rng, BondRates, Lattice, SecondClassConfig};
use coxasep::markov_ops::{OpContext, StepSpec};
use coxasep::scalar::{rat, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn ctype_strategy() -> impl Strategy<Value = CoxeterType> {
    prop_oneof![(2usize..=6).prop_map(CoxeterType::a), (1usize..=4).prop_map(CoxeterType::bc)]
}

fn element(ct: CoxeterType) -> impl Strategy<Value = SignedPermutation> {
    let n = ct.rank;
    let letters: Vec<i32> = (1..=n as i32).collect();
    let signed = ct.is_bc();
    (Just(letters).prop_shuffle(), proptest::collection::vec(any::<bool>(), n)).prop_map(move |(w, s)| {
        let w = w.into_iter().zip(s).map(|(v, neg)| if signed && neg { -v } else { v }).collect();
        SignedPermutation::from_window(ct, w).unwrap()
    })
}

fn element_any() -> impl Strategy<Value = SignedPermutation> {
    ctype_strategy().prop_flat_map(element)
}

fn pair_of(ct: CoxeterType) -> impl Strategy<Value = (SignedPermutation, SignedPermutation, SignedPermutation)> {
    (element(ct), element(ct), element(ct))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn length_is_inverse_invariant(w in element_any()) {
        prop_assert_eq!(w.length(), w.inverse().length());
    }

    #[test]
    fn generators_change_length_by_one(w in element_any()) {
        for i in w.ctype().generators() {
            let l = w.length() as i64;
            let r = w.right_mul_gen(i).length() as i64;
            let lft = w.left_mul_gen(i).length() as i64;
            prop_assert_eq!((r - l).abs(), 1);
            prop_assert_eq!((lft - l).abs(), 1);
            prop_assert_eq!(r < l, w.has_right_descent(i));
        }
    }

    #[test]
    fn reduced_word_round_trip(w in element_any()) {
        let word = w.reduced_word();
        prop_assert_eq!(word.len(), w.length());
        prop_assert_eq!(SignedPermutation::from_word(w.ctype(), &word).unwrap(), w);
    }

    #[test]
    fn multiplication_is_associative(
        (a, b, c) in ctype_strategy().prop_flat_map(pair_of)
    ) {
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(a.multiply(&a.inverse()).unwrap().is_identity());
    }

    #[test]
    fn theta2_is_theta1_of_inverse(w in element_any()) {
        prop_assert_eq!(theta2(&w), theta1(&w.inverse()));
        let c = theta1(&w);
        prop_assert_eq!(parse_config(c.spec_arc().clone(), &c.to_string()).unwrap(), c);
    }

    #[test]
    fn dcoset_bijection_round_trips(
        w in element(CoxeterType::bc(3)),
        case in prop::sample::select(P2Case::ALL.to_vec()),
        m in prop::sample::select(vec![vec![1usize, 1, 1], vec![2, 1], vec![1, 2], vec![3]]),
        n in prop::sample::select(vec![vec![1usize, 1, 1], vec![2, 1], vec![1, 2], vec![3]]),
    ) {
        let (hp, h) = case.pair(3, &m, &n).unwrap();
        let x = double_coset_rep(&w, &hp, &h);
        let c = dcoset_to_config(&x, &hp, &h, Variant::One).unwrap();
        prop_assert_eq!(config_to_dcoset(&c, &hp, &h, Variant::One).unwrap(), x.clone());
        let c2 = dcoset_to_config(&x.inverse(), &hp, &h, Variant::Two).unwrap();
        prop_assert_eq!(c2, c);
    }

    #[test]
    fn steps_preserve_mass(
        steps in proptest::collection::vec((1usize..=3, 0i64..=6), 0..6),
        qn in 1i64..=2,
    ) {
        let ct = CoxeterType::a(4);
        let ctx = OpContext::new(ct, rat(qn, 3)).unwrap();
        let mut v = coxasep::markov_ops::GroupVector::identity(ct);
        for (s, x) in &steps {
            v = ctx.left_step(&v, *s, &rat(*x, 6)).unwrap();
        }
        prop_assert_eq!(v.mass(), Rational::from_integer(1.into()));
        let steps: Vec<StepSpec<Rational>> = steps.iter().map(|(s, x)| StepSpec::new(*s, rat(*x, 6))).collect();
        prop_assert!(ctx.check_colpos(&steps).unwrap().max().is_zero());
    }

    #[test]
    fn limit_density_monotone_and_bounded(y1 in -2.0f64..2.0, y2 in -2.0f64..2.0, q in 0.05f64..0.95, m in 1u32..4) {
        let (lo, hi) = if y1 <= y2 { (y1, y2) } else { (y2, y1) };
        let a = limit_density(lo, q, m).unwrap();
        let b = limit_density(hi, q, m).unwrap();
        prop_assert!(a >= b);
        prop_assert!((0.0..=m as f64).contains(&a));
    }

    #[test]
    fn lattice_conserves_species(seed in any::<u64>(), m in 1u32..=3, t in 0.0f64..5.0) {
        let r = BondRates::new(0.4, m).unwrap();
        let mut lat = Lattice::new(-6, 13, 3, m, |x| if x < 0 { vec![0, m] } else if x == 0 { vec![m, 0] } else { vec![0, 0] }).unwrap();
        lat.run(t, &r, &mut trajectory_rng(seed, 0));
        for label in 0..3 {
            let total: u32 = (-6..=6).map(|x| lat.count(x, label)).sum();
            let expected = match label { 0 => 6 * m, 1 => m, _ => 6 * m };
            prop_assert_eq!(total, expected);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_rows_sum_to_zero(case in prop::sample::select(P2Case::ALL.to_vec()), q in 1i64..=4) {
        let (hp, h) = case.pair(2, &[1, 1], &[2]).unwrap();
        let p = ProcessSpec::for_pair(&hp, &h, rat(q, 5)).unwrap();
        let g = build_generator(&p).unwrap();
        let (worst, ok) = g.validate();
        prop_assert!(ok);
        prop_assert!(worst.is_zero());
    }

    #[test]
    fn evolution_keeps_probability(t in 0.0f64..3.0, q in 0.1f64..0.9) {
        let (hp, h) = P2Case::B.pair(2, &[1, 1], &[1, 1]).unwrap();
        let p = ProcessSpec::for_pair(&hp, &h, q).unwrap();
        let g = build_generator(&p).unwrap();
        let mu = vec![1.0 / g.dim() as f64; g.dim()];
        let (out, info) = evolve(&g, &mu, t, 1e-12, None).unwrap();
        prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(out.iter().all(|&v| v >= -1e-12));
        prop_assert!(info.eps <= 1e-12);
    }

    #[test]
    fn replay_reproduces_simulation(seed in any::<u64>(), gillespie in any::<bool>()) {
        let (hp, h) = P2Case::D.pair(2, &[1, 1], &[1, 1]).unwrap();
        let p = ProcessSpec::for_pair(&hp, &h, 0.5).unwrap();
        let x = SignedPermutation::identity(CoxeterType::bc(2));
        let init = dcoset_to_config(&x, &hp, &h, Variant::One).unwrap();
        let sched = if gillespie { Scheduler::Gillespie } else { Scheduler::PoissonClock };
        let (end, rec) = simulate(&p, &init, 3.0, sched, &mut trajectory_rng(seed, 0)).unwrap();
        prop_assert_eq!(replay(&rec, &init, &p).unwrap(), end);
    }

    #[test]
    fn second_class_counts_monotone(seed in any::<u64>(), m in 1u32..=2) {
        let cfg = SecondClassConfig { q: 0.5, m, t: 2.0, trajectories: 20, seed, window: None, thresholds: vec![-3, -1, 0, 1, 3] };
        let s = second_class_counts(&cfg).unwrap();
        for w in s.rows.windows(2) {
            prop_assert!(w[0].count_direct <= w[1].count_direct);
        }
        for r in &s.rows {
            prop_assert!((0.0..=m as f64).contains(&r.count_direct));
            prop_assert!((0.0..=m as f64).contains(&r.rho0_shifted));
        }
    }
}

#[test]
fn lattice_spec_for_pair_matches_unit_total() {
    let ct = CoxeterType::a(4);
    let hp = ParabolicSpec::new(ct, vec![2, 2], false).unwrap();
    let h = ParabolicSpec::new(ct, vec![2, 1, 1], false).unwrap();
    let spec = Arc::new(LatticeSpec::for_pair(&hp, &h).unwrap());
    assert_eq!(spec.total(), 4);
    assert_eq!(spec.sites(), 2);
}
