//! K-tier multiuser MIMO heterogeneous networks with space-division multiple
//! access and biased max-received-power association.
//!
//! A tier-`k` BS with `M_k` antennas serves `U_k` users by zero-forcing, so
//! the signal gain is `Gamma(M_k - U_k + 1, P_k/U_k)` and a tier-`j`
//! interferer contributes `Gamma(U_j, P_j/U_j)`. Because every entry of
//! `Q_k(r)` is proportional to `r²`, averaging `exp(Q_k(r))` against the
//! association-weighted distance law collapses to an inverse:
//! `p_k = ‖Q_k^{-1}‖₁`.

use crate::error::{Error, Result};
use crate::framework::{
    coverage_theorem1, CoverageResult, GainLaw, GammaGain, InterfererClass, Method, Radius,
    Scenario, ServingDistance,
};
use crate::specfun::{gauss_2f1, rising_over_factorial};
use crate::toeplitz::{inv_first_column, ToeplitzLT};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierParams {
    pub lambda: f64,
    pub power: f64,
    pub bias: f64,
    pub antennas: u32,
    pub users: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HetNet {
    pub tiers: Vec<TierParams>,
    pub alpha: f64,
}

impl HetNet {
    pub fn new(tiers: Vec<TierParams>, alpha: f64) -> Result<Self> {
        let net = Self { tiers, alpha };
        net.validate()?;
        Ok(net)
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(Error::Model("at least one tier is required".into()));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::Model(format!("path-loss exponent must exceed 2, got {}", self.alpha)));
        }
        for (k, t) in self.tiers.iter().enumerate() {
            let pos = |v: f64| v > 0.0 && v.is_finite();
            if !(pos(t.lambda) && pos(t.power) && pos(t.bias)) || t.antennas == 0 || t.users == 0 {
                return Err(Error::Model(format!("tier {k}: density, power, bias, antennas and users must be positive")));
            }
            if t.users > t.antennas {
                return Err(Error::Model(format!(
                    "tier {k}: users per BS ({}) must not exceed antennas ({})",
                    t.users, t.antennas
                )));
            }
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    fn tier(&self, k: usize) -> Result<&TierParams> {
        self.tiers
            .get(k)
            .ok_or_else(|| Error::Usage(format!("tier index {k} out of range (K = {})", self.tiers.len())))
    }

    /// `(P_j B_j / (P_k B_k))^δ`, the area scaling of tier `j` seen from tier `k`.
    fn area_ratio(&self, k: usize, j: usize) -> f64 {
        let (tk, tj) = (&self.tiers[k], &self.tiers[j]);
        (tj.power * tj.bias / (tk.power * tk.bias)).powf(self.delta())
    }

    /// `Σ_j λ_j (P_j B_j / (P_k B_k))^δ`.
    pub fn effective_density(&self, k: usize) -> f64 {
        (0..self.tiers.len()).map(|j| self.tiers[j].lambda * self.area_ratio(k, j)).sum()
    }

    /// Probability that the typical user associates with tier `k`.
    pub fn association_probability(&self, k: usize) -> f64 {
        self.tiers[k].lambda / self.effective_density(k)
    }

    fn z(&self, k: usize, j: usize, gamma: f64) -> f64 {
        let (tk, tj) = (&self.tiers[k], &self.tiers[j]);
        tk.users as f64 * tk.bias * gamma / (tj.users as f64 * tj.bias)
    }

    /// Off-diagonal entry `q_{k,i}`, `i >= 1`.
    pub fn qki(&self, k: usize, i: usize, gamma: f64) -> Result<f64> {
        self.tier(k)?;
        if i == 0 {
            return Err(Error::Usage("q_{k,i} is defined for i >= 1; use diagonal() for i = 0".into()));
        }
        let d = self.delta();
        let fi = i as f64;
        let mut acc = 0.0;
        for (j, tj) in self.tiers.iter().enumerate() {
            let z = self.z(k, j, gamma);
            let uj = tj.users as f64;
            acc += tj.lambda
                * self.area_ratio(k, j)
                * rising_over_factorial(uj, i)
                * d
                / (fi - d)
                * z.powi(i as i32)
                * gauss_2f1(fi - d, uj + fi, fi + 1.0 - d, -z)?;
        }
        Ok(acc)
    }

    /// Diagonal `Σ_j λ_j (P_jB_j/(P_kB_k))^δ 2F1(-δ, U_j; 1-δ; -z_j)`, which is
    /// the effective density plus the interference term at order zero.
    pub fn diagonal(&self, k: usize, gamma: f64) -> Result<f64> {
        self.tier(k)?;
        let d = self.delta();
        let mut acc = 0.0;
        for (j, tj) in self.tiers.iter().enumerate() {
            let z = self.z(k, j, gamma);
            acc += tj.lambda * self.area_ratio(k, j) * gauss_2f1(-d, tj.users as f64, 1.0 - d, -z)?;
        }
        Ok(acc)
    }

    /// First column of `Q_k`, normalized by `λ_k`.
    pub fn q_column(&self, k: usize, gamma: f64) -> Result<Vec<f64>> {
        let t = self.tier(k)?;
        let order = (t.antennas - t.users + 1) as usize;
        let mut col = Vec::with_capacity(order);
        col.push(self.diagonal(k, gamma)? / t.lambda);
        for i in 1..order {
            col.push(-self.qki(k, i, gamma)? / t.lambda);
        }
        Ok(col)
    }

    /// Coverage of users associated with tier `k` (unconditional, i.e. it
    /// already includes the association probability).
    pub fn tier_coverage(&self, k: usize, gamma: f64) -> Result<f64> {
        let q = ToeplitzLT::new(self.q_column(k, gamma)?)?;
        match inv_first_column(&q) {
            Ok(c) => Ok(c.sum()),
            Err(Error::Singular(m)) => Err(Error::Model(format!("tier {k}: {m}"))),
            Err(e) => Err(e),
        }
    }

    /// Closed-form coverage `Σ_k ‖Q_k^{-1}‖₁`.
    pub fn coverage(&self, gamma: f64) -> Result<CoverageResult> {
        self.validate()?;
        let mut total = 0.0;
        for k in 0..self.tiers.len() {
            total += self.tier_coverage(k, gamma)?;
        }
        Ok(CoverageResult::new(total, Method::Analytic, 0.0))
    }

    /// The tier-`k` conditional model as a generic [`Scenario`].
    pub fn tier_scenario(&self, k: usize) -> Result<Scenario> {
        let tk = *self.tier(k)?;
        let interferers = self
            .tiers
            .iter()
            .enumerate()
            .map(|(j, tj)| InterfererClass {
                density: tj.lambda,
                inner: Radius::Scaled(self.area_ratio(k, j).powf(0.5)),
                outer: Radius::Infinite,
                gain: GainLaw::Gamma {
                    shape: tj.users as f64,
                    scale: tj.power / tj.users as f64,
                },
            })
            .collect();
        Ok(Scenario {
            signal: GammaGain::new(tk.antennas - tk.users + 1, tk.power / tk.users as f64)?,
            alpha: self.alpha,
            noise_power: 0.0,
            interferers,
            serving: ServingDistance::Associated {
                density: tk.lambda,
                effective_density: self.effective_density(k),
            },
        })
    }

    /// Coverage through the general serving-distance quadrature.
    pub fn coverage_numeric(&self, gamma: f64) -> Result<CoverageResult> {
        self.validate()?;
        let mut total = 0.0;
        let mut err = 0.0;
        for k in 0..self.tiers.len() {
            let r = coverage_theorem1(&self.tier_scenario(k)?, gamma)?;
            total += r.value;
            err += r.abs_error;
        }
        Ok(CoverageResult::new(total, Method::Analytic, err))
    }
}

/// `q_{k,i}` for tier `k` (0-based), `i >= 1`.
pub fn hetnet_qki(tiers: &[TierParams], alpha: f64, k: usize, i: usize, gamma: f64) -> Result<f64> {
    HetNet::new(tiers.to_vec(), alpha)?.qki(k, i, gamma)
}

/// Closed-form coverage of the whole network.
pub fn hetnet_coverage(tiers: &[TierParams], alpha: f64, gamma: f64) -> Result<CoverageResult> {
    HetNet::new(tiers.to_vec(), alpha)?.coverage(gamma)
}
