use std::collections::BTreeMap;
use std::sync::Arc;

use coxasep::config::{parse_config, Flavor, LatticeSpec};
use coxasep::dynamics::{lambda_expand, lambda_law};
use coxasep::hydro::{check_duality_mc, trajectory_rng};
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn lambda_sampler_matches_law() {
    let spec = Arc::new(LatticeSpec::new(vec![2, 2], vec![2, 1, 1], Flavor::Plain, false).unwrap());
    let c = parse_config(spec, "[1,3|1,2]").unwrap();
    let q = 0.4;
    let law = lambda_law(&c, &q).unwrap();
    let n = 40_000;
    let mut rng = trajectory_rng(17, 0);
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..n {
        *seen.entry(lambda_expand(&c, q, &mut rng).unwrap().to_string()).or_default() += 1;
    }
    assert_eq!(seen.len(), law.len());
    let stat: f64 = law
        .iter()
        .map(|(cfg, p)| {
            let e = p * n as f64;
            let o = *seen.get(&cfg.to_string()).unwrap_or(&0) as f64;
            (o - e) * (o - e) / e
        })
        .sum();
    let pval = 1.0 - ChiSquared::new((law.len() - 1) as f64).unwrap().cdf(stat);
    assert!(pval > 1e-3, "chi2 = {stat}, p = {pval}");
}

#[test]
fn duality_mc_time_zero_is_exact() {
    for x in 1..=5 {
        let r = check_duality_mc(4, 0.5, 2, 0.0, x, 50, 1).unwrap();
        assert_eq!(r.lhs, r.rhs);
        assert_eq!(r.z_score(), 0.0);
    }
}
