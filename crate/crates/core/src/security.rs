//! Joint jamming and interference nulling in a Poisson network of
//! multi-antenna transmitters with Poisson eavesdroppers.
//!
//! Every receiver asks all transmitters within the coordination range `d0`
//! to null their signal towards it. A transmitter honours at most `Nt - 1`
//! requests and spends its remaining `N_x = Nt - min(K_x, Nt - 1)` streams on
//! the message plus artificial noise, each at power `1/N_x`.

use crate::error::{domain, Error, Result};
use crate::framework::laplace::gamma_tail;
use crate::framework::solve_threshold;
use crate::specfun::{gauss_2f1, ln_gamma, rising_over_factorial};
use crate::toeplitz::{l1_exp, ToeplitzLT};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityParams {
    pub lambda_t: f64,
    pub lambda_e: f64,
    pub nt: u32,
    pub r0: f64,
    pub d0: f64,
    pub alpha: f64,
}

impl SecurityParams {
    pub fn validate(&self) -> Result<()> {
        let fin = |v: f64| v.is_finite();
        if !(self.lambda_t >= 0.0 && fin(self.lambda_t) && self.lambda_e >= 0.0 && fin(self.lambda_e)) {
            return Err(Error::Model("densities must be finite and non-negative".into()));
        }
        if self.nt == 0 {
            return Err(Error::Model("Nt must be at least 1".into()));
        }
        if !(self.r0 > 0.0 && fin(self.r0)) {
            return Err(Error::Model("link distance r0 must be positive".into()));
        }
        if !(self.d0 >= 0.0 && fin(self.d0)) {
            return Err(Error::Model("coordination range d0 must be non-negative".into()));
        }
        if !(self.alpha > 2.0 && fin(self.alpha)) {
            return Err(Error::Model(format!("path-loss exponent must exceed 2, got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    pub fn with_d0(&self, d0: f64) -> Self {
        Self { d0, ..*self }
    }

    /// Mean number of other receivers inside a coordination disk.
    pub fn request_mean(&self) -> f64 {
        PI * self.d0 * self.d0 * self.lambda_t
    }
}

/// `[p_N(1), ..., p_N(Nt)]`: law of the number of streams of a transmitter.
pub fn stream_distribution(p: &SecurityParams) -> Vec<f64> {
    let nt = p.nt as usize;
    let m = p.request_mean();
    let mut out = vec![0.0; nt];
    // p_N(n) = Poisson(m) mass at Nt - n, for n >= 2
    for n in 2..=nt {
        let j = nt - n;
        let ln_mass = if m == 0.0 {
            if j == 0 { 0.0 } else { f64::NEG_INFINITY }
        } else {
            j as f64 * m.ln() - m - ln_gamma(j as f64 + 1.0).unwrap()
        };
        out[n - 1] = ln_mass.exp();
    }
    let tail: f64 = out[1..].iter().sum();
    out[0] = (1.0 - tail).max(0.0);
    out
}

/// `p_N(n)` for `1 <= n <= Nt`.
pub fn p_requests(n: u32, p: &SecurityParams) -> Result<f64> {
    if n == 0 || n > p.nt {
        return Err(Error::Usage(format!("stream count {n} outside 1..={}", p.nt)));
    }
    Ok(stream_distribution(p)[n as usize - 1])
}

/// Entry `q_k` (before the `-πλ_t d0²` scaling) of the matrix for a serving
/// transmitter with `nx0` streams. `k = 0` uses the same sum, where the
/// power and `δ/(δ-k)` factors equal one.
pub fn security_qk(k: usize, nx0: u32, p: &SecurityParams, gamma_l: f64) -> Result<f64> {
    if !(p.d0 > 0.0) {
        return Err(domain("security_qk", "needs d0 > 0; d0 = 0 is the no-nulling limit"));
    }
    let d = p.delta();
    let kf = k as f64;
    let base = (p.r0 / p.d0).powf(p.alpha) * gamma_l * nx0 as f64;
    let pn = stream_distribution(p);
    let mut acc = 0.0;
    for (idx, &w) in pn.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let n = (idx + 1) as f64;
        let u = base / n;
        acc += w
            * rising_over_factorial(n, k)
            * d
            / (d - kf)
            * u.powi(k as i32)
            * gauss_2f1(kf - d, kf + n, kf + 1.0 - d, -u)?;
    }
    Ok(acc)
}

/// First column of the matrix whose exponential gives `1 - p_co(N_x0)`.
pub fn connection_column(nx0: u32, p: &SecurityParams, gamma_l: f64) -> Result<Vec<f64>> {
    let order = nx0 as usize;
    if p.d0 == 0.0 {
        // no nulling: every interferer sends Nt streams over the whole plane
        let nt = p.nt as f64;
        let s = gamma_l * p.r0.powf(p.alpha) * nx0 as f64;
        return (0..order)
            .map(|k| gamma_tail(p.lambda_t, nt, 1.0 / nt, s, p.alpha, 0.0, k))
            .collect();
    }
    let scale = -PI * p.lambda_t * p.d0 * p.d0;
    let mut col = Vec::with_capacity(order);
    for k in 0..order {
        let q = security_qk(k, nx0, p, gamma_l)?;
        col.push(if k == 0 { scale * (q - 1.0) } else { scale * q });
    }
    Ok(col)
}

/// Connection outage probability `P(SIR < γ_l)` of the typical receiver.
pub fn connection_outage(p: &SecurityParams, gamma_l: f64) -> Result<f64> {
    p.validate()?;
    if !(gamma_l >= 0.0) {
        return Err(domain("connection_outage", "threshold must be non-negative"));
    }
    if gamma_l == 0.0 {
        return Ok(0.0);
    }
    let pn = stream_distribution(p);
    let mut covered = 0.0;
    for (idx, &w) in pn.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let col = connection_column((idx + 1) as u32, p, gamma_l)?;
        covered += w * l1_exp(&ToeplitzLT::new(col)?)?;
    }
    Ok((1.0 - covered).clamp(0.0, 1.0))
}

/// Upper bound on the secrecy outage probability at eavesdropper threshold `γ_e`.
pub fn secrecy_outage_ub(p: &SecurityParams, gamma_e: f64) -> Result<f64> {
    p.validate()?;
    let d = p.delta();
    if d >= 1.0 {
        return Err(domain("secrecy_outage_ub", "requires δ < 1 (α > 2)"));
    }
    if !(gamma_e > 0.0) {
        return Err(domain("secrecy_outage_ub", format!("γ_e must be positive, got {gamma_e}")));
    }
    if p.lambda_e == 0.0 {
        return Ok(0.0);
    }
    if p.lambda_t == 0.0 {
        return Err(domain("secrecy_outage_ub", "needs λ_t > 0"));
    }
    let pn = stream_distribution(p);
    let mut denom = 0.0;
    for (idx, &w) in pn.iter().enumerate() {
        let n = (idx + 1) as f64;
        denom += w * (ln_gamma(n + d)? - ln_gamma(n)? - d * n.ln()).exp();
    }
    denom *= ln_gamma(1.0 - d)?.exp();
    let ratio = p.lambda_e / p.lambda_t;
    let mut safe = 0.0;
    for (idx, &w) in pn.iter().enumerate() {
        let nx0 = (idx + 1) as f64;
        let ln_num = (1.0 - nx0) * gamma_e.ln_1p() - d * gamma_e.ln() - d * nx0.ln();
        safe += w * (-ratio * ln_num.exp() / denom).exp();
    }
    Ok((1.0 - safe).clamp(0.0, 1.0))
}

/// Solves `g(exp(x)) = target` for increasing or decreasing `g`, widening the
/// log-space bracket until it straddles the target.
fn log_threshold<F>(mut g: F, target: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (-8.0f64, 8.0f64);
    for _ in 0..8 {
        let flo = g(lo.exp())? - target;
        let fhi = g(hi.exp())? - target;
        if flo.signum() != fhi.signum() {
            return Ok(solve_threshold(|x| g(x.exp()), target, lo, hi)?.exp());
        }
        lo -= 8.0;
        hi += 8.0;
    }
    let (flo, fhi) = (g(lo.exp())?, g(hi.exp())?);
    Err(Error::Bracket { lo, hi, flo: flo - target, fhi: fhi - target })
}

/// `γ_l^th` solving `p_co(γ_l) = μ`.
pub fn legitimate_threshold(p: &SecurityParams, mu: f64) -> Result<f64> {
    log_threshold(|g| connection_outage(p, g), mu)
}

/// `γ_e^th` solving `p_so_ub(γ_e) = ε`; zero without eavesdroppers.
pub fn eavesdropper_threshold(p: &SecurityParams, eps: f64) -> Result<f64> {
    if p.lambda_e == 0.0 {
        return Ok(0.0);
    }
    log_threshold(|g| secrecy_outage_ub(p, g), eps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyCapacity {
    pub d0: f64,
    /// bit/s/Hz per m².
    pub capacity: f64,
    pub gamma_l: f64,
    pub gamma_e: f64,
    /// False when a threshold could not be bracketed; `capacity` is then 0.
    pub feasible: bool,
}

/// Secrecy transmission capacity `(1-μ) λ_t [log2((1+γ_l)/(1+γ_e))]⁺` at `d0`.
pub fn secrecy_capacity(p: &SecurityParams, d0: f64, mu: f64, eps: f64) -> Result<SecrecyCapacity> {
    let q = p.with_d0(d0);
    q.validate()?;
    for (name, v) in [("mu", mu), ("eps", eps)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Model(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    let infeasible = SecrecyCapacity { d0, capacity: 0.0, gamma_l: f64::NAN, gamma_e: f64::NAN, feasible: false };
    let gamma_l = match legitimate_threshold(&q, mu) {
        Ok(g) => g,
        Err(Error::Bracket { .. }) => return Ok(infeasible),
        Err(e) => return Err(e),
    };
    let gamma_e = match eavesdropper_threshold(&q, eps) {
        Ok(g) => g,
        Err(Error::Bracket { .. }) => return Ok(SecrecyCapacity { gamma_l, ..infeasible }),
        Err(e) => return Err(e),
    };
    let rate = ((1.0 + gamma_l) / (1.0 + gamma_e)).log2().max(0.0);
    Ok(SecrecyCapacity {
        d0,
        capacity: (1.0 - mu) * q.lambda_t * rate,
        gamma_l,
        gamma_e,
        feasible: true,
    })
}

/// Grid search for the capacity-maximizing `d0` followed by golden-section
/// refinement between the neighbours of the best grid point. Ties go to the
/// smallest `d0`.
pub fn optimize_d0(p: &SecurityParams, mu: f64, eps: f64, grid: &[f64]) -> Result<SecrecyCapacity> {
    if grid.is_empty() {
        return Err(Error::Usage("d0 grid must not be empty".into()));
    }
    let evals = grid
        .iter()
        .map(|&d| secrecy_capacity(p, d, mu, eps))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, e) in evals.iter().enumerate() {
        if e.capacity > evals[best].capacity {
            best = i;
        }
    }
    if grid.len() == 1 {
        return Ok(evals[0]);
    }
    let lo = if best > 0 { grid[best - 1] } else { grid[best] };
    let hi = if best + 1 < grid.len() { grid[best + 1] } else { grid[best] };
    let f = |d: f64| secrecy_capacity(p, d, mu, eps);
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a) > 1e-4 * (1.0 + b.abs()) {
        if fc.capacity >= fd.capacity {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d)?;
        }
    }
    let refined = if fc.capacity >= fd.capacity { fc } else { fd };
    Ok(if refined.capacity > evals[best].capacity { refined } else { evals[best] })
}
