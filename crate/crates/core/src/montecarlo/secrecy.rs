use super::ppp::{path_loss_sq, radial_arrivals, sub_rng, GammaDraw};
use super::{run_counts, McEstimate, McOptions};
use crate::error::{Error, Result};
use crate::security::{stream_distribution, SecurityParams};
use crate::specfun::ln_gamma;
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Excluded-region budget for the eavesdropper disk.
const EAVESDROPPER_BUDGET: f64 = 1e-4;

type Pt = [f64; 2];

fn offset<R: Rng + ?Sized>(p: Pt, dist: f64, rng: &mut R) -> Pt {
    let th = 2.0 * PI * rng.random::<f64>();
    [p[0] + dist * th.cos(), p[1] + dist * th.sin()]
}

fn dist2(a: Pt, b: Pt) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Request counts `K_i` of every transmitter, and which transmitters
/// receiver 0 asked. Receiver `j` belongs to transmitter `j` and asks every
/// other transmitter within `d0`.
fn requests(tx: &[Pt], rx: &[Pt], d0: f64, half_width: f64) -> (Vec<u32>, Vec<bool>) {
    let n = tx.len();
    let mut k = vec![0u32; n];
    let mut ours = vec![false; n];
    if d0 <= 0.0 || n == 0 {
        return (k, ours);
    }
    // bucket transmitters on a grid of cell size d0 (CSR layout)
    let cells = ((2.0 * half_width / d0).ceil() as usize).max(1);
    let cell_of = |p: Pt| -> (usize, usize) {
        let cx = (((p[0] + half_width) / d0) as isize).clamp(0, cells as isize - 1) as usize;
        let cy = (((p[1] + half_width) / d0) as isize).clamp(0, cells as isize - 1) as usize;
        (cx, cy)
    };
    let mut start = vec![0usize; cells * cells + 1];
    let keys: Vec<usize> = tx
        .iter()
        .map(|&p| {
            let (cx, cy) = cell_of(p);
            cy * cells + cx
        })
        .collect();
    for &key in &keys {
        start[key + 1] += 1;
    }
    for c in 0..cells * cells {
        start[c + 1] += start[c];
    }
    let mut fill = start.clone();
    let mut order = vec![0usize; n];
    for (i, &key) in keys.iter().enumerate() {
        order[fill[key]] = i;
        fill[key] += 1;
    }
    let d02 = d0 * d0;
    for (j, &y) in rx.iter().enumerate() {
        let (cx, cy) = cell_of(y);
        for gy in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
            for gx in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                let c = gy * cells + gx;
                for &i in &order[start[c]..start[c + 1]] {
                    if i != j && dist2(tx[i], y) <= d02 {
                        k[i] += 1;
                        if j == 0 {
                            ours[i] = true;
                        }
                    }
                }
            }
        }
    }
    (k, ours)
}

fn streams(nt: u32, k: u32) -> u32 {
    nt - k.min(nt - 1)
}

/// Transmitters (with the typical one at index 0) and their receivers, the
/// others in order of distance from the origin.
fn legitimate_network<R: Rng + ?Sized>(p: &SecurityParams, tx0: Pt, rx0: Pt, radius: f64, rng: &mut R) -> (Vec<Pt>, Vec<Pt>) {
    let mut tx = vec![tx0];
    let mut rx = vec![rx0];
    radial_arrivals(p.lambda_t, 0.0, radius, rng, |d2, r| {
        let x = offset([0.0, 0.0], d2.sqrt(), r);
        tx.push(x);
        rx.push(offset(x, p.r0, r));
    });
    (tx, rx)
}

fn tail_mean(p: &SecurityParams, w: f64) -> f64 {
    // every transmitter radiates unit total power
    p.lambda_t * 2.0 * PI * w.powf(2.0 - p.alpha) / (p.alpha - 2.0)
}

fn stream_gains(nt: u32) -> Vec<GammaDraw> {
    (1..=nt).map(|n| GammaDraw::new(n as f64, 1.0 / n as f64)).collect()
}

/// How a transmitter with `K >= Nt` requests picks the receivers it nulls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nulling {
    /// `Nt - 1` of the requesting receivers, chosen uniformly at random.
    #[default]
    RandomSelection,
    /// Every request is honored. The analytic outage assumes this for the
    /// typical receiver.
    AllHonored,
}

/// `P(SIR < γ_l)` of the typical receiver under the full request, nulling
/// and jamming scheme.
pub fn mc_connection_outage(p: &SecurityParams, gammas: &[f64], opts: &McOptions) -> Result<Vec<McEstimate>> {
    mc_connection_outage_with(p, gammas, opts, Nulling::RandomSelection)
}

/// [`mc_connection_outage`] with an explicit nulling policy.
pub fn mc_connection_outage_with(
    p: &SecurityParams,
    gammas: &[f64],
    opts: &McOptions,
    nulling: Nulling,
) -> Result<Vec<McEstimate>> {
    p.validate()?;
    opts.validate()?;
    if gammas.is_empty() {
        return Err(Error::Usage("need at least one threshold".into()));
    }
    let nt = p.nt;
    let w = opts.truncation * p.d0.max(p.r0);
    let w2 = w * w;
    let radius = w + p.d0 + p.r0;
    let half_width = radius + p.r0 + p.d0;
    let tail = tail_mean(p, w);
    let gains = stream_gains(nt);
    let signal: Vec<GammaDraw> = (1..=nt).map(|n| GammaDraw::new(n as f64, 1.0 / n as f64)).collect();
    let sig_loss = p.r0.powf(-p.alpha);
    Ok(run_counts(opts, gammas.len(), |rng, hits| {
        let tx0 = offset([0.0, 0.0], p.r0, rng);
        let mut net_rng = sub_rng(rng);
        let mut gain_rng = sub_rng(rng);
        let (tx, rx) = legitimate_network(p, tx0, [0.0, 0.0], radius, &mut net_rng);
        let (k, ours) = requests(&tx, &rx, p.d0, half_width);
        let mut interference = tail;
        for i in 1..tx.len() {
            let d2 = tx[i][0] * tx[i][0] + tx[i][1] * tx[i][1];
            if d2 > w2 {
                continue;
            }
            if ours[i] {
                let nulled = nulling == Nulling::AllHonored
                    || k[i] < nt
                    || gain_rng.random::<f64>() * (k[i] as f64) < (nt - 1) as f64;
                if nulled {
                    continue;
                }
            }
            let n = streams(nt, k[i]);
            interference += gains[n as usize - 1].sample(&mut gain_rng) * path_loss_sq(d2, p.alpha);
        }
        let n0 = streams(nt, k[0]);
        let s = signal[n0 as usize - 1].sample(rng) * sig_loss;
        for (h, &g) in hits.iter_mut().zip(gammas) {
            *h += (s < g * interference) as u64;
        }
    }))
}

/// Radius beyond which eavesdroppers at threshold `gamma_e` contribute less
/// than `1e-4` to the secrecy outage probability.
///
/// An eavesdropper at distance `z` beats `γ_e` with probability at most
/// `exp(-c z²)`, `c = λ_t π Γ(1-δ) E[(g/N)^δ] γ_e^δ`, so the expected number
/// of successful ones beyond `R` is `λ_e π/c · e^{-cR²}`.
pub fn eavesdropper_radius(p: &SecurityParams, gamma_e: f64) -> Result<f64> {
    let d = p.delta();
    let pn = stream_distribution(p);
    let mut moment = 0.0;
    for (idx, &wgt) in pn.iter().enumerate() {
        let n = (idx + 1) as f64;
        moment += wgt * (ln_gamma(n + d)? - ln_gamma(n)? - d * n.ln()).exp();
    }
    let c = p.lambda_t * PI * ln_gamma(1.0 - d)?.exp() * moment * gamma_e.powf(d);
    if !(c > 0.0) {
        return Err(Error::Usage("eavesdropper radius needs λ_t > 0 and γ_e > 0".into()));
    }
    let r2 = (p.lambda_e * PI / (c * EAVESDROPPER_BUDGET)).ln() / c;
    Ok(r2.max(0.0).sqrt().max(p.r0))
}

/// Probability that at least one eavesdropper decodes the typical
/// transmitter's message at SIR above `γ_e`.
pub fn mc_secrecy_outage(p: &SecurityParams, gammas: &[f64], opts: &McOptions) -> Result<Vec<McEstimate>> {
    p.validate()?;
    opts.validate()?;
    if gammas.is_empty() || gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::Usage("eavesdropper thresholds must be positive".into()));
    }
    if p.lambda_e == 0.0 {
        return Ok(gammas.iter().map(|_| McEstimate::from_counts(0, opts.trials, opts.seed)).collect());
    }
    let nt = p.nt;
    let g_min = gammas.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_e = eavesdropper_radius(p, g_min)?;
    let w = opts.truncation * p.d0.max(p.r0);
    let w2 = w * w;
    let radius = r_e + w + p.d0 + p.r0;
    let half_width = radius + p.r0 + p.d0;
    let tail = tail_mean(p, w);
    let gains = stream_gains(nt);
    let self_gain: Vec<GammaDraw> = (1..nt).map(|n| GammaDraw::new(n as f64, 1.0)).collect();
    Ok(run_counts(opts, gammas.len(), |rng, hits| {
        let rx0 = offset([0.0, 0.0], p.r0, rng);
        let mut net_rng = sub_rng(rng);
        let mut eve_rng = sub_rng(rng);
        let (tx, rx) = legitimate_network(p, [0.0, 0.0], rx0, radius, &mut net_rng);
        let (k, _) = requests(&tx, &rx, p.d0, half_width);
        let n0 = streams(nt, k[0]);
        let mut eves = Vec::new();
        radial_arrivals(p.lambda_e, 0.0, r_e, &mut eve_rng, |d2, r| {
            eves.push((offset([0.0, 0.0], d2.sqrt(), r), sub_rng(r)));
        });
        let mut best = 0.0f64;
        for (z, mut g_rng) in eves {
            let loss0 = path_loss_sq(z[0] * z[0] + z[1] * z[1], p.alpha);
            let e: f64 = Exp1.sample(&mut g_rng);
            let signal = e / n0 as f64 * loss0;
            let mut interference = tail;
            if n0 > 1 {
                interference += self_gain[n0 as usize - 2].sample(&mut g_rng) / n0 as f64 * loss0;
            }
            for i in 1..tx.len() {
                // drawn for every transmitter so the stream does not depend on the window
                let n = streams(nt, k[i]);
                let g = gains[n as usize - 1].sample(&mut g_rng);
                let d2 = dist2(tx[i], z);
                if d2 <= w2 {
                    interference += g * path_loss_sq(d2, p.alpha);
                }
            }
            best = best.max(signal / interference);
        }
        for (h, &g) in hits.iter_mut().zip(gammas) {
            *h += (best > g) as u64;
        }
    }))
}
