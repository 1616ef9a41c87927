use super::ppp::{path_loss_sq, poisson_count, radial_arrivals, sub_rng, GainDraw, GammaDraw};
use super::{run_counts, McEstimate, McOptions};
use crate::error::{Error, Result};
use crate::framework::{Radius, Scenario, ServingDistance};
use crate::hetnet::HetNet;
use crate::mmwave::{gain_actual, gain_cosine, MmWaveParams, Pattern};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use std::f64::consts::PI;

fn check_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() || gammas.iter().any(|g| !(*g >= 0.0)) {
        return Err(Error::Usage("thresholds must be a non-empty list of non-negative numbers".into()));
    }
    Ok(())
}

/// Mean interference from a PPP of density `lambda` and mean gain `mean_gain`
/// beyond radius `w`.
fn tail_mean(lambda: f64, mean_gain: f64, alpha: f64, w: f64) -> f64 {
    lambda * mean_gain * 2.0 * PI * w.powf(2.0 - alpha) / (alpha - 2.0)
}

/// `P(SINR > γ)` for each `γ` in `gammas`, simulating `scn` directly.
///
/// Unbounded rings are simulated out to `truncation · max(inner, r)` and the
/// remainder is replaced by its mean. Each interferer class draws from its
/// own child stream in order of distance, so a wider window only appends
/// points to the same realization.
pub fn mc_coverage_general(scn: &Scenario, gammas: &[f64], opts: &McOptions) -> Result<Vec<McEstimate>> {
    scn.validate()?;
    opts.validate()?;
    check_gammas(gammas)?;
    if let ServingDistance::Associated { .. } = scn.serving {
        return Err(Error::Usage(
            "association-weighted serving laws are simulated by mc_hetnet_coverage".into(),
        ));
    }
    let alpha = scn.alpha;
    let signal = GammaDraw::new(scn.signal.shape as f64, scn.signal.scale);
    let classes: Vec<_> = scn
        .interferers
        .iter()
        .map(|c| (c, GainDraw::new(&c.gain), c.gain.mean()))
        .collect();
    let trunc = opts.truncation;
    Ok(run_counts(opts, gammas.len(), |rng, hits| {
        let r2 = match scn.serving {
            ServingDistance::Fixed { r0 } => r0 * r0,
            ServingDistance::Nearest { density } => {
                let e: f64 = Exp1.sample(rng);
                e / (PI * density)
            }
            ServingDistance::LosBall { density, radius } => {
                let mass = scn.serving.mass();
                let u: f64 = rng.random();
                if u >= mass {
                    return;
                }
                // nearest-point distance conditioned on lying inside the ball
                let v: f64 = rng.random();
                (-(-v * mass).ln_1p() / (PI * density)).min(radius * radius)
            }
            ServingDistance::Associated { .. } => unreachable!(),
        };
        let r = r2.sqrt();
        let s = signal.sample(rng) * path_loss_sq(r2, alpha);
        let mut interference = scn.noise_power;
        for (c, draw, mean) in &classes {
            // one child stream per class keeps the draws nested in the window
            let mut sub = sub_rng(rng);
            let a = c.inner.at(r);
            let (b, tail) = match c.outer {
                Radius::Infinite => {
                    let w = trunc * a.max(r);
                    (w, tail_mean(c.density, *mean, alpha, w))
                }
                o => (o.at(r), 0.0),
            };
            interference += tail;
            radial_arrivals(c.density, a, b, &mut sub, |d2, g_rng| {
                let g = draw.sample(g_rng);
                if g > 0.0 {
                    interference += g * path_loss_sq(d2, alpha);
                }
            });
        }
        for (h, &g) in hits.iter_mut().zip(gammas) {
            *h += (s > g * interference) as u64;
        }
    }))
}

/// Coverage of the LOS-ball mmWave network with the chosen interferer pattern.
/// A realization with no BS inside the ball counts as not covered.
pub fn mc_mmwave_coverage(p: &MmWaveParams, pattern: Pattern, opts: &McOptions) -> Result<McEstimate> {
    p.validate()?;
    opts.validate()?;
    let m = p.nakagami as f64;
    let fading = GammaDraw::new(m, 1.0 / m);
    let r2max = p.radius * p.radius;
    let mean = p.los_mean();
    let est = run_counts(opts, 1, |rng, hits| {
        let n = poisson_count(mean, rng);
        if n == 0 {
            return;
        }
        let d2s: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * r2max).collect();
        let serving = (0..n).min_by(|&a, &b| d2s[a].total_cmp(&d2s[b])).unwrap();
        let mut interference = 0.0;
        for (i, &d2) in d2s.iter().enumerate() {
            if i != serving {
                let h = beam_gain(pattern, p, rng, &fading);
                if h > 0.0 {
                    interference += h * path_loss_sq(d2, p.alpha);
                }
            }
        }
        let near = d2s[serving];
        let s = fading.sample(rng) * path_loss_sq(near, p.alpha);
        hits[0] += (s > p.gamma * interference) as u64;
    });
    Ok(est[0])
}

fn beam_gain<R: Rng + ?Sized>(pattern: Pattern, p: &MmWaveParams, rng: &mut R, fading: &GammaDraw) -> f64 {
    let phi = 2.0 * rng.random::<f64>() - 1.0;
    let g = match pattern {
        Pattern::Cosine => gain_cosine(p.spacing * phi, p.nt),
        Pattern::Actual => gain_actual(phi, p.nt, p.spacing),
    };
    if g > 0.0 {
        fading.sample(rng) * g
    } else {
        0.0
    }
}

/// Coverage of a K-tier network with biased max-received-power association,
/// simulating every tier in a disk and associating explicitly.
pub fn mc_hetnet_coverage(net: &HetNet, gammas: &[f64], opts: &McOptions) -> Result<Vec<McEstimate>> {
    net.validate()?;
    opts.validate()?;
    check_gammas(gammas)?;
    let alpha = net.alpha;
    let sparsest = net.tiers.iter().map(|t| t.lambda).fold(f64::INFINITY, f64::min);
    let w = opts.truncation / (PI * sparsest).sqrt();
    let tail: f64 = net.tiers.iter().map(|t| tail_mean(t.lambda, t.power, alpha, w)).sum();
    let interf: Vec<GammaDraw> = net
        .tiers
        .iter()
        .map(|t| GammaDraw::new(t.users as f64, t.power / t.users as f64))
        .collect();
    let signal: Vec<GammaDraw> = net
        .tiers
        .iter()
        .map(|t| GammaDraw::new((t.antennas - t.users + 1) as f64, t.power / t.users as f64))
        .collect();
    Ok(run_counts(opts, gammas.len(), |rng, hits| {
        // (tier, d², interferer gain) of every BS; association by max P B d^-α
        let mut bs: Vec<(usize, f64, f64)> = Vec::new();
        for (j, t) in net.tiers.iter().enumerate() {
            let mut sub = sub_rng(rng);
            radial_arrivals(t.lambda, 0.0, w, &mut sub, |d2, g_rng| bs.push((j, d2, interf[j].sample(g_rng))));
        }
        let metric = |&(j, d2, _): &(usize, f64, f64)| net.tiers[j].power * net.tiers[j].bias * path_loss_sq(d2, alpha);
        let Some(best) = (0..bs.len()).max_by(|&x, &y| metric(&bs[x]).total_cmp(&metric(&bs[y]))) else {
            return;
        };
        let mut interference = tail;
        for (i, &(_, d2, g)) in bs.iter().enumerate() {
            if i != best {
                interference += g * path_loss_sq(d2, alpha);
            }
        }
        let (k, d2, _) = bs[best];
        let s = signal[k].sample(rng) * path_loss_sq(d2, alpha);
        for (h, &g) in hits.iter_mut().zip(gammas) {
            *h += (s > g * interference) as u64;
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::{coverage_theorem1, GainLaw, GammaGain, InterfererClass};

    fn rayleigh(m: u32) -> Scenario {
        Scenario {
            signal: GammaGain { shape: m, scale: 1.0 },
            alpha: 4.0,
            noise_power: 0.0,
            interferers: vec![InterfererClass {
                density: 1e-2,
                inner: Radius::Scaled(1.0),
                outer: Radius::Infinite,
                gain: GainLaw::Gamma { shape: 1.0, scale: 1.0 },
            }],
            serving: ServingDistance::Nearest { density: 1e-2 },
        }
    }

    #[test]
    fn tiny_threshold_is_always_covered() {
        let e = mc_coverage_general(&rayleigh(1), &[0.0], &McOptions::new(2000, 1)).unwrap();
        assert_eq!(e[0].p_hat, 1.0);
    }

    #[test]
    fn reproducible() {
        let opts = McOptions::new(3000, 11);
        let a = mc_coverage_general(&rayleigh(2), &[0.5, 2.0], &opts).unwrap();
        let b = mc_coverage_general(&rayleigh(2), &[0.5, 2.0], &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn agrees_with_analytic_small_run() {
        let scn = rayleigh(2);
        let e = mc_coverage_general(&scn, &[1.0], &McOptions::new(20_000, 5)).unwrap();
        let a = coverage_theorem1(&scn, 1.0).unwrap().value;
        assert!(e[0].agrees_with(a, 4.0), "{:?} vs {a}", e[0]);
    }

    #[test]
    fn associated_law_is_rejected() {
        let mut scn = rayleigh(1);
        scn.serving = ServingDistance::Associated { density: 1e-2, effective_density: 2e-2 };
        assert!(mc_coverage_general(&scn, &[1.0], &McOptions::new(10, 1)).is_err());
    }

    #[test]
    fn dense_los_ball_almost_always_has_a_server() {
        let p = MmWaveParams {
            lambda_t: 1e-3,
            radius: 200.0,
            nt: 64,
            nakagami: 1,
            alpha: 2.1,
            gamma: 1e-9,
            spacing: 0.5,
        };
        let e = mc_mmwave_coverage(&p, Pattern::Cosine, &McOptions::new(2000, 3)).unwrap();
        assert_eq!(e.p_hat, 1.0);
        let sparse = MmWaveParams { lambda_t: 1e-5, ..p };
        let e = mc_mmwave_coverage(&sparse, Pattern::Cosine, &McOptions::new(20_000, 3)).unwrap();
        assert!(e.agrees_with(sparse.los_probability(), 4.0));
    }
}
