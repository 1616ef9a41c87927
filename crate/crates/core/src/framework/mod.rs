//! General coverage evaluator.
//!
//! With signal gain `Gamma(M, θ)` and `s = γ r^α / θ`,
//! `P(SINR > γ | r) = Σ_{n<M} (-s)^n/n! · L^{(n)}(s)`, which is the first-column
//! sum of `exp(Q_M(r))` with `Q_M` built from `q_k = (-s)^k/k! · η^{(k)}(s)`.
//! Averaging over the serving distance gives the coverage probability.

pub mod laplace;
pub mod quadrature;
pub mod roots;

use crate::error::{domain, Error, Result};
use crate::toeplitz::{exp_first_column, ToeplitzLT};
use serde::{Deserialize, Serialize};
use std::cell::Cell;
use std::f64::consts::PI;

pub use quadrature::{adaptive_quadrature, try_adaptive_quadrature};
pub use roots::solve_threshold;

/// Absolute tolerance of the serving-distance integral.
pub const COVERAGE_ABS_TOL: f64 = 1e-7;
/// Clamping beyond this distance from `[0, 1]` raises the warning flag.
pub const CLAMP_WARN: f64 = 1e-6;

/// Signal gain `Gamma(M, θ)` with integer shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaGain {
    pub shape: u32,
    pub scale: f64,
}

impl GammaGain {
    pub fn new(shape: u32, scale: f64) -> Result<Self> {
        let g = Self { shape, scale };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape == 0 {
            return Err(Error::Model("signal gain shape must be at least 1".into()));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Model("signal gain scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaComponent {
    pub weight: f64,
    pub shape: f64,
    pub scale: f64,
}

/// Distribution of an interferer's channel gain (transmit power folded in).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum GainLaw {
    Gamma { shape: f64, scale: f64 },
    /// Finite mixture; weights sum to one.
    GammaMixture(Vec<GammaComponent>),
    /// `h · G(spacing · φ)` with `h ~ Gamma(nakagami, 1/nakagami)`, `φ` uniform
    /// on `[-1, 1]` and `G` the cosine main-lobe pattern of an `nt`-element array.
    CosineArray { nakagami: f64, nt: u32, spacing: f64 },
}

impl GainLaw {
    pub fn mean(&self) -> f64 {
        match self {
            GainLaw::Gamma { shape, scale } => shape * scale,
            GainLaw::GammaMixture(parts) => parts.iter().map(|c| c.weight * c.shape * c.scale).sum(),
            // E[cos²] over the lobe is 1/2
            GainLaw::CosineArray { nt, spacing, .. } => 0.5 / (*nt as f64 * spacing).max(1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Model(m.into()));
        match self {
            GainLaw::Gamma { shape, scale } => {
                if !(*shape > 0.0 && *scale > 0.0 && shape.is_finite() && scale.is_finite()) {
                    return bad("gamma gain needs positive finite shape and scale");
                }
            }
            GainLaw::GammaMixture(parts) => {
                if parts.is_empty() {
                    return bad("gamma mixture needs at least one component");
                }
                for c in parts {
                    if !(c.weight >= 0.0 && c.shape > 0.0 && c.scale > 0.0) {
                        return bad("gamma mixture components need weight >= 0, shape > 0, scale > 0");
                    }
                }
                let w: f64 = parts.iter().map(|c| c.weight).sum();
                if (w - 1.0).abs() > 1e-9 {
                    return bad("gamma mixture weights must sum to one");
                }
            }
            GainLaw::CosineArray { nakagami, nt, spacing } => {
                if !(*nakagami > 0.0) || *nt == 0 || !(*spacing > 0.0) {
                    return bad("cosine array needs nakagami > 0, nt >= 1, spacing > 0");
                }
                laplace::cosine_lobe_probability(*nt, *spacing)?;
            }
        }
        Ok(())
    }
}

/// Radius of a ring boundary, possibly proportional to the serving distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Radius {
    Zero,
    Fixed(f64),
    /// `c · r` for serving distance `r`.
    Scaled(f64),
    Infinite,
}

impl Radius {
    pub fn at(&self, r: f64) -> f64 {
        match *self {
            Radius::Zero => 0.0,
            Radius::Fixed(v) => v,
            Radius::Scaled(c) => c * r,
            Radius::Infinite => f64::INFINITY,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Radius::Fixed(v) | Radius::Scaled(v) if !(v >= 0.0 && v.is_finite()) => {
                Err(Error::Model(format!("ring radius must be finite and non-negative, got {v}")))
            }
            _ => Ok(()),
        }
    }
}

/// Poisson interferers of one kind on a ring around the receiver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfererClass {
    pub density: f64,
    pub inner: Radius,
    pub outer: Radius,
    pub gain: GainLaw,
}

/// Law of the distance to the serving transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ServingDistance {
    Fixed { r0: f64 },
    /// Nearest point of a PPP.
    Nearest { density: f64 },
    /// Tier with density `density` wins the association; `effective_density`
    /// is the bias- and power-weighted total seen from this tier.
    Associated { density: f64, effective_density: f64 },
    /// Nearest point of a PPP restricted to a ball of radius `radius`.
    LosBall { density: f64, radius: f64 },
}

impl ServingDistance {
    /// Probability that a serving transmitter of this kind exists.
    pub fn mass(&self) -> f64 {
        match *self {
            ServingDistance::Fixed { .. } | ServingDistance::Nearest { .. } => 1.0,
            ServingDistance::Associated { density, effective_density } => density / effective_density,
            ServingDistance::LosBall { density, radius } => -(-PI * density * radius * radius).exp_m1(),
        }
    }

    fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        let ok = match *self {
            ServingDistance::Fixed { r0 } => pos(r0),
            ServingDistance::Nearest { density } => pos(density),
            ServingDistance::Associated { density, effective_density } => {
                pos(density) && pos(effective_density) && effective_density >= density * (1.0 - 1e-12)
            }
            ServingDistance::LosBall { density, radius } => pos(density) && pos(radius),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Model(format!("invalid serving-distance law {self:?}")))
        }
    }
}

/// Density of the serving distance, conditioned on a server existing.
pub fn serving_distance_pdf(model: &ServingDistance, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("serving_distance_pdf", format!("r must be non-negative, got {r}")));
    }
    let nearest = |lambda: f64| 2.0 * PI * lambda * r * (-PI * lambda * r * r).exp();
    match *model {
        ServingDistance::Fixed { .. } => {
            Err(Error::Usage("a fixed serving distance has no density; evaluate at r0".into()))
        }
        ServingDistance::Nearest { density } => Ok(nearest(density)),
        ServingDistance::Associated { effective_density, .. } => Ok(nearest(effective_density)),
        ServingDistance::LosBall { density, radius } => {
            if r > radius {
                Ok(0.0)
            } else {
                Ok(nearest(density) / model.mass())
            }
        }
    }
}

/// A complete single-receiver network model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub signal: GammaGain,
    pub alpha: f64,
    #[serde(default)]
    pub noise_power: f64,
    pub interferers: Vec<InterfererClass>,
    pub serving: ServingDistance,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.signal.validate()?;
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::Model(format!(
                "path-loss exponent must exceed 2, got {}",
                self.alpha
            )));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::Model("noise power must be non-negative".into()));
        }
        for c in &self.interferers {
            if !(c.density >= 0.0 && c.density.is_finite()) {
                return Err(Error::Model("interferer density must be non-negative".into()));
            }
            c.inner.validate()?;
            c.outer.validate()?;
            let ordered = match (c.inner, c.outer) {
                (_, Radius::Infinite) | (Radius::Zero, _) => true,
                (Radius::Infinite, _) => false,
                (Radius::Fixed(a), Radius::Fixed(b)) | (Radius::Scaled(a), Radius::Scaled(b)) => a <= b,
                // mixed fixed/scaled rings are clipped at evaluation time
                _ => true,
            };
            if !ordered {
                return Err(Error::Model("interferer ring must satisfy inner <= outer".into()));
            }
            c.gain.validate()?;
            if matches!(c.gain, GainLaw::CosineArray { .. }) && c.inner == Radius::Zero {
                return Err(Error::Model("cosine-pattern interferers need a positive inner radius".into()));
            }
        }
        self.serving.validate()
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// Laplace variable at serving distance `r` and threshold `gamma`.
    pub fn s_at(&self, r: f64, gamma: f64) -> f64 {
        gamma * r.powf(self.alpha) / self.signal.scale
    }
}

/// Supplies the first column `(q_0, ..., q_{M-1})` of `Q_M(r)` at threshold `γ`.
///
/// Implementations include the noise terms (`-sσ²` in `q_0`, `+sσ²` in `q_1`).
pub trait QkProvider {
    fn order(&self) -> usize;
    fn q_column(&self, r: f64, gamma: f64) -> Result<Vec<f64>>;
}

impl QkProvider for Scenario {
    fn order(&self) -> usize {
        self.signal.shape as usize
    }

    fn q_column(&self, r: f64, gamma: f64) -> Result<Vec<f64>> {
        let m = self.order();
        let s = self.s_at(r, gamma);
        let mut q = vec![0.0; m];
        for c in &self.interferers {
            let (a, b) = (c.inner.at(r), c.outer.at(r));
            for (k, qk) in q.iter_mut().enumerate() {
                *qk += laplace::ring(&c.gain, c.density, s, self.alpha, a, b, k)?;
            }
        }
        let sn = s * self.noise_power;
        q[0] -= sn;
        if m > 1 {
            q[1] += sn;
        }
        Ok(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    MonteCarlo,
    BoundLower,
    BoundUpper,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::MonteCarlo => "monte_carlo",
            Method::BoundLower => "bound_lower",
            Method::BoundUpper => "bound_upper",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub value: f64,
    pub method: Method,
    pub abs_error: f64,
    /// The raw value left `[0, 1]` by more than [`CLAMP_WARN`].
    pub clamped: bool,
    /// Some first-column entry of `exp(Q)` was negative.
    pub negative_terms: bool,
}

impl CoverageResult {
    pub fn new(raw: f64, method: Method, abs_error: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self {
            value,
            method,
            abs_error,
            clamped: (raw - value).abs() > CLAMP_WARN,
            negative_terms: false,
        }
    }
}

/// Coverage probability `P(SINR > γ)` of a scenario.
pub fn coverage_theorem1(scn: &Scenario, gamma: f64) -> Result<CoverageResult> {
    scn.validate()?;
    coverage_with_provider(scn, &scn.serving, gamma)
}

/// Coverage for an arbitrary `q_k` source.
pub fn coverage_with_provider<P: QkProvider + ?Sized>(
    provider: &P,
    serving: &ServingDistance,
    gamma: f64,
) -> Result<CoverageResult> {
    if !(gamma > 0.0) || gamma.is_nan() {
        return Err(domain("coverage_theorem1", format!("threshold must be positive, got {gamma}")));
    }
    let negative = Cell::new(false);
    let conditional = |r: f64| -> Result<f64> {
        let q = ToeplitzLT::new(provider.q_column(r, gamma)?)?;
        let x = exp_first_column(&q)?;
        if x.0.iter().any(|&v| v < 0.0) {
            negative.set(true);
        }
        Ok(x.sum())
    };
    let (raw, err) = match *serving {
        ServingDistance::Fixed { r0 } => (conditional(r0)?, 0.0),
        ServingDistance::Nearest { density } => nearest_average(&conditional, density, f64::INFINITY)?,
        ServingDistance::Associated { effective_density, .. } => {
            nearest_average(&conditional, effective_density, f64::INFINITY)?
        }
        ServingDistance::LosBall { density, radius } => nearest_average(&conditional, density, radius)?,
    };
    let mass = serving.mass();
    let mut res = CoverageResult::new(mass * raw, Method::Analytic, mass * err);
    res.negative_terms = negative.get();
    Ok(res)
}

/// `E[f(r)]` for the nearest point of a PPP of density `lambda` conditioned
/// to lie within `radius`, via `u = πλr²` so the weight becomes `e^{-u}`.
fn nearest_average<F>(f: &F, lambda: f64, radius: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let u_max = PI * lambda * radius * radius;
    let norm = if u_max.is_finite() { -(-u_max).exp_m1() } else { 1.0 };
    let (v, e) = try_adaptive_quadrature(
        |u| Ok((-u).exp() * f((u / (PI * lambda)).sqrt())?),
        0.0,
        u_max,
        COVERAGE_ABS_TOL * norm,
    )?;
    Ok((v / norm, e / norm))
}
