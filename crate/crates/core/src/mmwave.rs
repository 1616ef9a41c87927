//! Downlink mmWave coverage under a LOS-ball blockage model with analog
//! beamforming at the base stations.
//!
//! Only BSs within `R` are visible. The user is served by the nearest one
//! with the beam aligned; every other visible BS points its beam in a
//! uniformly random direction `φ ∈ [-1, 1]`, so its gain is
//! `|ρ|² G(spacing · φ)` with `|ρ|² ~ Gamma(M, 1/M)`.
//! Under the cosine main-lobe pattern, coverage is bounded below by
//! `P · e^{β₀ t} (1 + Σ_n β_n t^n)` in `t = 1/Nt`.

use crate::error::{domain, Error, Result};
use crate::framework::laplace::j_k;
use crate::framework::{
    adaptive_quadrature, CoverageResult, GainLaw, GammaGain, InterfererClass, Method, Radius,
    Scenario, ServingDistance,
};
use crate::specfun::rising_over_factorial;
use crate::toeplitz::{nilpotent_power_l1, ToeplitzLT};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MmWaveParams {
    pub lambda_t: f64,
    /// LOS radius (m).
    pub radius: f64,
    pub nt: u32,
    /// Nakagami parameter of the single path.
    pub nakagami: u32,
    pub alpha: f64,
    /// Linear SIR threshold.
    pub gamma: f64,
    /// Element spacing in wavelengths.
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Actual,
    Cosine,
}

impl MmWaveParams {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !(self.lambda_t >= 0.0 && self.lambda_t.is_finite()) {
            return Err(Error::Model("BS density must be non-negative".into()));
        }
        if !pos(self.radius) {
            return Err(Error::Model("LOS radius must be positive".into()));
        }
        if self.nt == 0 || self.nakagami == 0 {
            return Err(Error::Model("Nt and the Nakagami parameter must be at least 1".into()));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::Model(format!("path-loss exponent must exceed 2, got {}", self.alpha)));
        }
        if !pos(self.gamma) || !pos(self.spacing) {
            return Err(Error::Model("threshold and spacing must be positive".into()));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// `πλ_t R²`, the mean number of LOS base stations.
    pub fn los_mean(&self) -> f64 {
        PI * self.lambda_t * self.radius * self.radius
    }

    /// Probability that at least one BS is in LOS.
    pub fn los_probability(&self) -> f64 {
        -(-self.los_mean()).exp_m1()
    }

    pub fn with_nt(&self, nt: u32) -> Self {
        Self { nt, ..*self }
    }

    /// The exact cosine-pattern model as a generic scenario.
    pub fn cosine_scenario(&self) -> Result<Scenario> {
        let m = self.nakagami;
        let scn = Scenario {
            signal: GammaGain::new(m, 1.0 / m as f64)?,
            alpha: self.alpha,
            noise_power: 0.0,
            interferers: vec![InterfererClass {
                density: self.lambda_t,
                inner: Radius::Scaled(1.0),
                outer: Radius::Fixed(self.radius),
                gain: GainLaw::CosineArray { nakagami: m as f64, nt: self.nt, spacing: self.spacing },
            }],
            serving: ServingDistance::LosBall { density: self.lambda_t, radius: self.radius },
        };
        scn.validate()?;
        Ok(scn)
    }
}

/// Uniform-linear-array power gain `sin²(Nt π s φ) / (Nt² sin²(π s φ))`.
pub fn gain_actual(phi: f64, nt: u32, spacing: f64) -> f64 {
    let x = PI * spacing * phi;
    let den = x.sin();
    if den.abs() < 1e-12 {
        return 1.0;
    }
    let n = nt as f64;
    let num = (n * x).sin();
    (num * num / (n * n * den * den)).min(1.0)
}

/// Cosine main-lobe pattern `cos²(π Nt x / 2)` for `|x| <= 1/Nt`, else 0.
pub fn gain_cosine(x: f64, nt: u32) -> f64 {
    let n = nt as f64;
    if x.abs() * n > 1.0 {
        return 0.0;
    }
    (PI * n * x / 2.0).cos().powi(2)
}

/// `J_k(x) = 3F2(k+1/2, k-δ, k+M; k+1, k+1-δ; x)` for `x <= 0`.
pub fn mmwave_j(k: usize, x: f64, m: u32, delta: f64) -> Result<f64> {
    if x > 0.0 {
        return Err(domain("mmwave_j", format!("argument must be non-positive, got {x}")));
    }
    j_k(k, x, m as f64, delta)
}

/// `y_k(x) = J_k(x)[1 - e^{-L}(1+L)] + 1(k=0)(L - 1 + e^{-L})`, `L = πλ_t R²`.
pub fn mmwave_y(k: usize, x: f64, lambda_t: f64, radius: f64, m: u32, delta: f64) -> Result<f64> {
    let l = PI * lambda_t * radius * radius;
    let e = (-l).exp();
    let first = -(-l).exp_m1() - l * e;
    let mut y = mmwave_j(k, x, m, delta)? * first;
    if k == 0 {
        y += l + (-l).exp_m1();
    }
    Ok(y)
}

/// Prefactor of `q̂_k` without the bracket.
fn qhat_prefactor(k: usize, p: &MmWaveParams) -> f64 {
    let kf = k as f64;
    2.0 / p.spacing
        * rising_over_factorial(0.5, k)
        * rising_over_factorial(p.nakagami as f64, k)
        * p.gamma.powi(k as i32)
        / (p.alpha * kf - 2.0)
}

/// `q̂_k`, the serving-distance average of `q_k(r) · Nt`.
///
/// The inner integral is taken in the dimensionless form
/// `L² ∫_0^1 e^{-Lw} w^{αk/2} J_k(-γ w^{α/2}) dw`.
pub fn mmwave_qhat(k: usize, p: &MmWaveParams) -> Result<f64> {
    p.validate()?;
    let d = p.delta();
    let m = p.nakagami;
    let l = p.los_mean();
    if l == 0.0 {
        return Ok(0.0);
    }
    let y = mmwave_y(k, -p.gamma, p.lambda_t, p.radius, m, d)?;
    let ak2 = p.alpha * k as f64 / 2.0;
    let half_alpha = p.alpha / 2.0;
    let tol = 1e-12 * y.abs().max(1.0) / (l * l);
    let mut err: Option<Error> = None;
    let mut f = |w: f64| {
        if w == 0.0 {
            return if k == 0 { 1.0 } else { 0.0 };
        }
        match mmwave_j(k, -p.gamma * w.powf(half_alpha), m, d) {
            Ok(j) => (-l * w).exp() * w.powf(ak2) * j,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    // the weight e^{-Lw} lives on [0, ~40/L]
    let knee = (40.0 / l).min(1.0);
    let (mut inner, _) = adaptive_quadrature(&mut f, 0.0, knee, tol)?;
    if knee < 1.0 {
        inner += adaptive_quadrature(&mut f, knee, 1.0, tol)?.0;
    }
    if let Some(e) = err {
        return Err(e);
    }
    Ok(qhat_prefactor(k, p) * (y - l * l * inner))
}

/// `q̂_0, ..., q̂_{M-1}` and the LOS probability; independent of `Nt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmWaveBound {
    pub p_los: f64,
    pub qhat: Vec<f64>,
}

impl MmWaveBound {
    pub fn new(p: &MmWaveParams) -> Result<Self> {
        p.validate()?;
        let qhat = (0..p.nakagami as usize)
            .map(|k| mmwave_qhat(k, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { p_los: p.los_probability(), qhat })
    }

    /// `β₀, β₁, ..., β_{M-1}`.
    pub fn betas(&self) -> Result<Vec<f64>> {
        if self.p_los == 0.0 {
            return Ok(vec![0.0; self.qhat.len()]);
        }
        let q = ToeplitzLT::new(self.qhat.clone())?;
        let mut out = vec![self.qhat[0] / self.p_los];
        let mut fact = 1.0;
        for n in 1..self.qhat.len() {
            fact *= n as f64;
            out.push(nilpotent_power_l1(&q, n) / (fact * self.p_los));
        }
        Ok(out)
    }

    /// The lower bound at array size `nt`.
    pub fn at(&self, nt: u32) -> Result<f64> {
        if nt == 0 {
            return Err(Error::Usage("Nt must be at least 1".into()));
        }
        let t = 1.0 / nt as f64;
        let b = self.betas()?;
        let poly: f64 = 1.0 + b[1..].iter().enumerate().map(|(i, bn)| bn * t.powi(i as i32 + 1)).sum::<f64>();
        Ok(self.p_los * (b[0] * t).exp() * poly)
    }
}

/// Lower bound on cosine-pattern coverage at `p.nt`.
pub fn mmwave_coverage_lb(p: &MmWaveParams) -> Result<CoverageResult> {
    let v = MmWaveBound::new(p)?.at(p.nt)?;
    Ok(CoverageResult::new(v, Method::BoundLower, 0.0))
}
