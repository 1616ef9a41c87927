//! Property checks shared by the `properties` and `acceptance` targets.
//! Each returns `Err(description)` on the first counterexample.

#![allow(dead_code)]

use mimo_coverage::hetnet::{HetNet, TierParams};
use mimo_coverage::mmwave::{gain_actual, gain_cosine, MmWaveBound, MmWaveParams};
use mimo_coverage::montecarlo::{
    mc_connection_outage, mc_coverage_general, mc_hetnet_coverage, mc_secrecy_outage, McEstimate, McOptions,
};
use mimo_coverage::security::{connection_outage, secrecy_outage_ub, stream_distribution, SecurityParams};
use mimo_coverage::specfun::{gauss_2f1, hyp_3f2, reg_lower_inc_gamma};
use mimo_coverage::toeplitz::{convolve, exp_first_column, inv_first_column};
use mimo_coverage::{
    coverage_theorem1, GainLaw, GammaGain, InterfererClass, Radius, Scenario, ServingDistance, ToeplitzLT,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};

pub type Check = std::result::Result<(), String>;

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>) -> Check {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn ok(v: mimo_coverage::Result<f64>) -> std::result::Result<f64, TestCaseError> {
    v.map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn hyp2f1_contiguity() -> Check {
    run(256, (-1.0..3.0f64, 1.0..8.0f64, 0.2..4.0f64, -4.0..0.0f64), |(a, b, c, z)| {
        let f = ok(gauss_2f1(a, b, c, z))?;
        let fa = ok(gauss_2f1(a - 1.0, b, c, z))?;
        let fc = ok(gauss_2f1(a, b, c + 1.0, z))?;
        let terms = [c * (1.0 - z) * f, -c * fa, (c - b) * z * fc];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let r: f64 = terms.iter().sum();
        prop_assert!(r.abs() <= 1e-8 * scale.max(1e-300), "residual {r} at scale {scale}");
        Ok(())
    })
}

pub fn hyp3f2_reduces_to_2f1() -> Check {
    // b1 > a1 > 0 keeps the integral representation in play
    run(256, (0.1..3.0f64, -1.0..2.0f64, 0.3..3.0f64, 0.5..4.0f64, -3.0..0.0f64), |(a1, a2, gap, b2, z)| {
        let b1 = a1 + gap;
        let three = ok(hyp_3f2(a1, a2, b2, b1, b2, z))?;
        let two = ok(gauss_2f1(a1, a2, b1, z))?;
        prop_assert!((three - two).abs() <= 1e-8 * two.abs().max(1e-3), "{three} vs {two}");
        Ok(())
    })
}

pub fn incomplete_gamma_monotone() -> Check {
    run(256, (0.5..20.0f64, 0.0..100.0f64, 0.0..100.0f64), |(m, x, y)| {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let (p, q) = (ok(reg_lower_inc_gamma(m, lo))?, ok(reg_lower_inc_gamma(m, hi))?);
        prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        prop_assert!(p <= q + 1e-15, "P({m}, {lo}) = {p} > P({m}, {hi}) = {q}");
        prop_assert_eq!(ok(reg_lower_inc_gamma(m, 0.0))?, 0.0);
        prop_assert!(ok(reg_lower_inc_gamma(m, 50.0 * m))? > 1.0 - 1e-12);
        Ok(())
    })
}

fn column(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, 1..=max_len)
}

pub fn toeplitz_semigroup() -> Check {
    run(256, column(16).prop_flat_map(|a| (Just(a.clone()), prop::collection::vec(-2.0..2.0f64, a.len()))), |(a, b)| {
        let ea = exp_first_column(&ToeplitzLT::new(a.clone()).unwrap()).unwrap();
        let eb = exp_first_column(&ToeplitzLT::new(b.clone()).unwrap()).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let eab = exp_first_column(&ToeplitzLT::new(sum).unwrap()).unwrap();
        let prod = convolve(ea.as_slice(), eb.as_slice());
        let scale = ea.as_slice().iter().map(|v| v.abs()).sum::<f64>() * eb.as_slice().iter().map(|v| v.abs()).sum::<f64>();
        for (x, y) in prod.iter().zip(eab.as_slice()) {
            prop_assert!((x - y).abs() <= 1e-12 * scale.max(1.0), "{x} vs {y}");
        }
        Ok(())
    })
}

pub fn toeplitz_inverse_identity() -> Check {
    let strat = (prop_oneof![0.5..3.0f64, -3.0..-0.5f64], prop::collection::vec(-2.0..2.0f64, 0..16));
    run(256, strat, |(q0, rest)| {
        let mut col = vec![q0];
        col.extend(rest);
        let q = ToeplitzLT::new(col.clone()).unwrap();
        let inv = inv_first_column(&q).unwrap();
        let prod = convolve(inv.as_slice(), &col);
        let scale = inv.as_slice().iter().map(|v| v.abs()).sum::<f64>() * col.iter().map(|v| v.abs()).sum::<f64>();
        for (i, v) in prod.iter().enumerate() {
            let want = if i == 0 { 1.0 } else { 0.0 };
            prop_assert!((v - want).abs() <= 1e-12 * scale, "entry {i}: {v}");
        }
        Ok(())
    })
}

pub fn coverage_monotone_in_threshold() -> Check {
    run(32, (1u32..=6, 2.5..5.0f64, 0.01..30.0f64, 0.01..30.0f64, 1e-4..1e-1f64), |(m, alpha, g1, g2, lambda)| {
        let scn = Scenario {
            signal: GammaGain { shape: m, scale: 1.0 },
            alpha,
            noise_power: 0.0,
            interferers: vec![InterfererClass {
                density: lambda,
                inner: Radius::Scaled(1.0),
                outer: Radius::Infinite,
                gain: GainLaw::Gamma { shape: 1.0, scale: 1.0 },
            }],
            serving: ServingDistance::Nearest { density: lambda },
        };
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let a = coverage_theorem1(&scn, lo).map_err(|e| TestCaseError::fail(e.to_string()))?.value;
        let b = coverage_theorem1(&scn, hi).map_err(|e| TestCaseError::fail(e.to_string()))?.value;
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(b <= a + 1e-7, "p({hi}) = {b} > p({lo}) = {a}");
        Ok(())
    })
}

fn security(nt: u32, d0: f64) -> SecurityParams {
    SecurityParams { lambda_t: 1e-2, lambda_e: 1e-3, nt, r0: 1.0, d0, alpha: 4.0 }
}

pub fn stream_law_normalized() -> Check {
    run(256, (1u32..=16, 1e-4..1e-1f64, 0.0..10.0f64), |(nt, lambda_t, d0)| {
        let p = SecurityParams { lambda_t, ..security(nt, d0) };
        let pn = stream_distribution(&p);
        prop_assert_eq!(pn.len(), nt as usize);
        prop_assert!(pn.iter().all(|&v| v >= 0.0));
        prop_assert!((pn.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        Ok(())
    })
}

pub fn outage_monotone() -> Check {
    run(48, (1u32..=6, 0.0..6.0f64, 0.05..200.0f64, 0.05..200.0f64), |(nt, d0, g1, g2)| {
        let p = security(nt, d0);
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let (a, b) = (ok(connection_outage(&p, lo))?, ok(connection_outage(&p, hi))?);
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
        prop_assert!(a <= b + 1e-9, "p_co({lo}) = {a} > p_co({hi}) = {b}");
        let (c, d) = (ok(secrecy_outage_ub(&p, lo))?, ok(secrecy_outage_ub(&p, hi))?);
        prop_assert!((0.0..=1.0).contains(&c) && (0.0..=1.0).contains(&d));
        prop_assert!(d <= c + 1e-12, "p_so({hi}) = {d} > p_so({lo}) = {c}");
        Ok(())
    })
}

pub fn hetnet_ranges_and_power_scaling() -> Check {
    let tier = (1e-6..1e-3f64, 0.1..50.0f64, 0.5..4.0f64, 1u32..=6).prop_flat_map(|(lambda, power, bias, antennas)| {
        (1u32..=antennas).prop_map(move |users| TierParams { lambda, power, bias, antennas, users })
    });
    run(48, (tier.clone(), tier, 2.5..5.0f64, 0.05..20.0f64, 0.01..100.0f64), |(a, b, alpha, gamma, c)| {
        let net = HetNet::new(vec![a, b], alpha).unwrap();
        let mut total = 0.0;
        for k in 0..2 {
            let t = ok(net.tier_coverage(k, gamma))?;
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&t), "tier {k}: {t}");
            total += t;
        }
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&total));
        let scaled: Vec<TierParams> = net.tiers.iter().map(|t| TierParams { power: t.power * c, ..*t }).collect();
        let other = HetNet::new(scaled, alpha).unwrap();
        let v = ok(other.coverage(gamma).map(|r| r.value))?;
        prop_assert!((v - total.clamp(0.0, 1.0)).abs() < 1e-10, "{v} vs {total}");
        Ok(())
    })
}

pub fn antenna_gains_in_unit_interval() -> Check {
    run(1024, (-1.0..=1.0f64, 1u32..=256, 0.1..2.0f64), |(phi, nt, spacing)| {
        let a = gain_actual(phi, nt, spacing);
        let c = gain_cosine(phi, nt);
        prop_assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&c));
        if phi.abs() > 1.0 / nt as f64 {
            prop_assert_eq!(c, 0.0);
        }
        Ok(())
    })
}

pub fn mmwave_bound_monotone_in_array_size() -> Check {
    let strat = (1e-4..1e-2f64, 50.0..300.0f64, 1u32..=4, 2.05..4.0f64, 0.1..10.0f64);
    run(16, strat, |(lambda_t, radius, m, alpha, gamma)| {
        let p = MmWaveParams { lambda_t, radius, nt: 1, nakagami: m, alpha, gamma, spacing: 0.5 };
        let b = MmWaveBound::new(&p).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut prev = 0.0;
        for nt in [1u32, 2, 4, 8, 16, 32, 64, 128, 256] {
            let v = ok(b.at(nt))?;
            prop_assert!((0.0..=1.0).contains(&v), "Nt = {nt}: {v}");
            prop_assert!(v >= prev - 1e-12, "Nt = {nt}: {v} < {prev}");
            prev = v;
        }
        Ok(())
    })
}

pub fn rayleigh_baseline() -> Scenario {
    Scenario {
        signal: GammaGain { shape: 1, scale: 1.0 },
        alpha: 4.0,
        noise_power: 0.0,
        interferers: vec![InterfererClass {
            density: 1e-3,
            inner: Radius::Scaled(1.0),
            outer: Radius::Infinite,
            gain: GainLaw::Gamma { shape: 1.0, scale: 1.0 },
        }],
        serving: ServingDistance::Nearest { density: 1e-3 },
    }
}

pub fn hetnet_k2(ratio: f64) -> HetNet {
    HetNet::new(
        vec![
            TierParams { lambda: 1e-5, power: 40.0, bias: 1.0, antennas: 4, users: 2 },
            TierParams { lambda: 1e-5 * ratio, power: 1.0, bias: 2.0, antennas: 2, users: 1 },
        ],
        4.0,
    )
    .unwrap()
}

pub fn fig1(d0: f64) -> SecurityParams {
    security(4, d0)
}

fn well_formed(e: &McEstimate, trials: u64) -> bool {
    (0.0..=1.0).contains(&e.p_hat)
        && e.trials == trials
        && (e.std_err - (e.p_hat * (1.0 - e.p_hat) / trials as f64).sqrt()).abs() < 1e-15
}

pub fn monte_carlo_reproducible() -> Check {
    run(8, (any::<u64>(), 0.1..10.0f64), |(seed, gamma)| {
        let opts = McOptions::new(300, seed);
        let scn = rayleigh_baseline();
        let a = mc_coverage_general(&scn, &[gamma], &opts).unwrap();
        let b = mc_coverage_general(&scn, &[gamma], &opts).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(well_formed(&a[0], 300));
        let net = hetnet_k2(5.0);
        prop_assert_eq!(
            mc_hetnet_coverage(&net, &[gamma], &opts).unwrap(),
            mc_hetnet_coverage(&net, &[gamma], &opts).unwrap()
        );
        let p = fig1(2.0);
        let c = mc_connection_outage(&p, &[gamma], &opts).unwrap();
        prop_assert_eq!(&c, &mc_connection_outage(&p, &[gamma], &opts).unwrap());
        prop_assert!(well_formed(&c[0], 300));
        let s = mc_secrecy_outage(&p, &[gamma], &opts).unwrap();
        prop_assert_eq!(&s, &mc_secrecy_outage(&p, &[gamma], &opts).unwrap());
        Ok(())
    })
}

/// Doubling the far-field window moves each estimate by less than `2σ`.
pub fn truncation_robust() -> Check {
    let trials = 20_000;
    let base = McOptions::new(trials, 99);
    let wide = McOptions { truncation: 2.0 * base.truncation, ..base };
    let mut cases: Vec<(&str, McEstimate, McEstimate)> = Vec::new();
    let scn = rayleigh_baseline();
    let g = [0.1, 1.0, 10.0];
    for (x, y) in mc_coverage_general(&scn, &g, &base).unwrap().into_iter().zip(mc_coverage_general(&scn, &g, &wide).unwrap()) {
        cases.push(("rayleigh baseline", x, y));
    }
    let net = hetnet_k2(5.0);
    for (x, y) in mc_hetnet_coverage(&net, &g, &base).unwrap().into_iter().zip(mc_hetnet_coverage(&net, &g, &wide).unwrap()) {
        cases.push(("two-tier hetnet", x, y));
    }
    let p = fig1(3.0);
    let (gl, ge) = ([85.8], [0.67]);
    cases.push((
        "connection outage",
        mc_connection_outage(&p, &gl, &base).unwrap()[0],
        mc_connection_outage(&p, &gl, &wide).unwrap()[0],
    ));
    cases.push((
        "secrecy outage",
        mc_secrecy_outage(&p, &ge, &base).unwrap()[0],
        mc_secrecy_outage(&p, &ge, &wide).unwrap()[0],
    ));
    for (name, x, y) in cases {
        let sigma = x.std_err.max(y.std_err).max(1.0 / trials as f64);
        if (x.p_hat - y.p_hat).abs() >= 2.0 * sigma {
            return Err(format!("{name}: {} vs {} with the window doubled", x.p_hat, y.p_hat));
        }
    }
    Ok(())
}

pub type Property = (&'static str, fn() -> Check);

pub const PROPERTIES: &[Property] = &[
    ("2F1 contiguity relation", hyp2f1_contiguity),
    ("3F2 reduces to 2F1", hyp3f2_reduces_to_2f1),
    ("incomplete gamma monotone with limits", incomplete_gamma_monotone),
    ("Toeplitz exponential semigroup", toeplitz_semigroup),
    ("Toeplitz inverse identity", toeplitz_inverse_identity),
    ("coverage in [0,1], non-increasing in threshold", coverage_monotone_in_threshold),
    ("stream law normalized", stream_law_normalized),
    ("outage probabilities monotone", outage_monotone),
    ("hetnet ranges and power scaling", hetnet_ranges_and_power_scaling),
    ("antenna gains in [0,1]", antenna_gains_in_unit_interval),
    ("mmWave bound non-decreasing in Nt", mmwave_bound_monotone_in_array_size),
    ("Monte Carlo reproducible", monte_carlo_reproducible),
    ("Monte Carlo truncation robust", truncation_robust),
];
