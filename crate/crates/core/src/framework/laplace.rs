//! Scaled derivatives `q_k = (-s)^k / k! · η^(k)(s)` of the Laplace exponent
//! contributed by one Poisson interferer class on an annulus.
//!
//! For gains `g` and the ring `[a, b]`,
//! `η(s) = -λ ∫_a^b 2πx (1 - E e^{-s g x^-α}) dx`, so
//! `q_k = λ ∫_a^b 2πx E[(s g x^-α)^k / k! · e^{-s g x^-α}] dx` for `k >= 1`.
//! Every law below has a closed form for the tail `[a, ∞)`; a ring is the
//! difference of two tails.

use super::GainLaw;
use crate::error::{domain, Result};
use crate::specfun::{gauss_2f1, hyp_3f2, ln_gamma, rising_over_factorial};
use std::f64::consts::PI;

/// `q_k` contribution of a Gamma(m, ψ) class of density `lambda` on `[a, ∞)`.
pub fn gamma_tail(lambda: f64, m: f64, psi: f64, s: f64, alpha: f64, a: f64, k: usize) -> Result<f64> {
    if lambda == 0.0 || a.is_infinite() || s == 0.0 {
        return Ok(0.0);
    }
    let delta = 2.0 / alpha;
    let kf = k as f64;
    if a == 0.0 {
        let c = s * psi;
        if k == 0 {
            let lg = ln_gamma(1.0 - delta)? + ln_gamma(m + delta)? - ln_gamma(m)?;
            return Ok(-lambda * PI * c.powf(delta) * lg.exp());
        }
        let ln_beta = ln_gamma(kf - delta)? + ln_gamma(m + delta)? - ln_gamma(kf + m)?;
        return Ok(lambda * rising_over_factorial(m, k) * PI * delta * c.powf(delta) * ln_beta.exp());
    }
    let u = s * psi * a.powf(-alpha);
    let area = lambda * PI * a * a;
    if k == 0 {
        return Ok(-area * (gauss_2f1(-delta, m, 1.0 - delta, -u)? - 1.0));
    }
    Ok(area
        * rising_over_factorial(m, k)
        * delta
        / (kf - delta)
        * u.powi(k as i32)
        * gauss_2f1(kf - delta, m + kf, kf + 1.0 - delta, -u)?)
}

/// Main-lobe probability of the cosine pattern evaluated at `spacing · φ`
/// with `φ` uniform on `[-1, 1]`.
pub fn cosine_lobe_probability(nt: u32, spacing: f64) -> Result<f64> {
    let w = nt as f64 * spacing;
    if !(w >= 1.0) {
        return Err(domain(
            "cosine_lobe_probability",
            format!("main lobe wider than the angular range (Nt·spacing = {w} < 1)"),
        ));
    }
    Ok(1.0 / w)
}

/// `J_k(x) = 3F2(k+1/2, k-δ, k+m; k+1, k+1-δ; x)`.
pub fn j_k(k: usize, x: f64, m: f64, delta: f64) -> Result<f64> {
    let kf = k as f64;
    hyp_3f2(kf + 0.5, kf - delta, kf + m, kf + 1.0, kf + 1.0 - delta, x)
}

/// Same as [`gamma_tail`] for gains `h · cos²(·)`, `h ~ Gamma(m, 1/m)`, where
/// the cosine-squared factor is Beta(1/2, 1/2) inside the main lobe.
pub fn cosine_tail(
    lambda: f64,
    m: f64,
    p_lobe: f64,
    s: f64,
    alpha: f64,
    a: f64,
    k: usize,
) -> Result<f64> {
    if lambda == 0.0 || a.is_infinite() || s == 0.0 {
        return Ok(0.0);
    }
    if a == 0.0 {
        return Err(domain("cosine_tail", "cosine-pattern interferers need a positive inner radius"));
    }
    let delta = 2.0 / alpha;
    let kf = k as f64;
    let u = s / m * a.powf(-alpha);
    let area = p_lobe * lambda * PI * a * a;
    if k == 0 {
        return Ok(-area * (j_k(0, -u, m, delta)? - 1.0));
    }
    let a_k = rising_over_factorial(0.5, k) * rising_over_factorial(m, k);
    Ok(area * a_k * delta / (kf - delta) * u.powi(k as i32) * j_k(k, -u, m, delta)?)
}

/// Tail contribution for any supported gain law.
pub fn law_tail(law: &GainLaw, lambda: f64, s: f64, alpha: f64, a: f64, k: usize) -> Result<f64> {
    match law {
        GainLaw::Gamma { shape, scale } => gamma_tail(lambda, *shape, *scale, s, alpha, a, k),
        GainLaw::GammaMixture(parts) => parts.iter().try_fold(0.0, |acc, c| {
            Ok(acc + gamma_tail(lambda * c.weight, c.shape, c.scale, s, alpha, a, k)?)
        }),
        GainLaw::CosineArray { nakagami, nt, spacing } => {
            let p = cosine_lobe_probability(*nt, *spacing)?;
            cosine_tail(lambda, *nakagami, p, s, alpha, a, k)
        }
    }
}

/// `q_k` on the ring `[a, b]` (`b` may be infinite).
pub fn ring(law: &GainLaw, lambda: f64, s: f64, alpha: f64, a: f64, b: f64, k: usize) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    Ok(law_tail(law, lambda, s, alpha, a, k)? - law_tail(law, lambda, s, alpha, b, k)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framework::quadrature::adaptive_quadrature;
    use crate::framework::GammaComponent;
    use crate::specfun::gamma;

    /// Direct quadrature of the defining integral for a Gamma(m, ψ) law,
    /// using the closed-form Gamma moment
    /// `E[g^k e^{-t g}] = Γ(m+k)/Γ(m) ψ^k (1+tψ)^{-(m+k)}`.
    fn gamma_ring_by_quadrature(lambda: f64, m: f64, psi: f64, s: f64, alpha: f64, a: f64, b: f64, k: usize) -> f64 {
        let kf = k as f64;
        let f = |x: f64| {
            let t = s * x.powf(-alpha);
            let moment = if k == 0 {
                -(-m * (t * psi).ln_1p()).exp_m1()
            } else {
                gamma(m + kf) / gamma(m) / gamma(kf + 1.0) * (t * psi).powi(k as i32) * (1.0 + t * psi).powf(-(m + kf))
            };
            2.0 * PI * x * moment
        };
        let sign = if k == 0 { -1.0 } else { 1.0 };
        let mut total = 0.0;
        // split at the natural scale so the mapped tail is smooth
        let knee = (s * psi).powf(1.0 / alpha).max(a);
        let tol = 1e-12 * knee.max(1.0).powi(2);
        if knee > a {
            total += adaptive_quadrature(f, a, knee.min(b), tol).unwrap().0;
        }
        if b > knee {
            total += adaptive_quadrature(f, knee, b, tol).unwrap().0;
        }
        sign * lambda * total
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn gamma_law_matches_quadrature() {
        let cases = [
            (1e-2, 1.0, 1.0, 2.0, 4.0, 1.0, f64::INFINITY),
            (1e-3, 3.0, 0.5, 40.0, 3.0, 2.0, f64::INFINITY),
            (5e-3, 2.0, 0.25, 7.0, 2.5, 0.5, 30.0),
            (2e-2, 4.0, 0.25, 1.0, 4.0, 0.0, f64::INFINITY),
        ];
        for &(lambda, m, psi, s, alpha, a, b) in &cases {
            for k in 0..5 {
                let law = GainLaw::Gamma { shape: m, scale: psi };
                let got = ring(&law, lambda, s, alpha, a, b, k).unwrap();
                let want = gamma_ring_by_quadrature(lambda, m, psi, s, alpha, a, b, k);
                assert!(close(got, want, 1e-8), "k={k} a={a} b={b}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_radius_is_the_limit_of_small_radius() {
        let law = GainLaw::Gamma { shape: 2.0, scale: 0.5 };
        for k in 0..4 {
            let z = law_tail(&law, 1e-2, 3.0, 4.0, 0.0, k).unwrap();
            let eps = law_tail(&law, 1e-2, 3.0, 4.0, 1e-4, k).unwrap();
            assert!(close(eps, z, 1e-6), "k={k}: {eps} vs {z}");
        }
    }

    #[test]
    fn mixture_is_weighted_sum() {
        let mix = GainLaw::GammaMixture(vec![
            GammaComponent { weight: 0.25, shape: 1.0, scale: 1.0 },
            GammaComponent { weight: 0.75, shape: 3.0, scale: 1.0 / 3.0 },
        ]);
        let a = GainLaw::Gamma { shape: 1.0, scale: 1.0 };
        let b = GainLaw::Gamma { shape: 3.0, scale: 1.0 / 3.0 };
        for k in 0..3 {
            let got = law_tail(&mix, 0.01, 2.0, 4.0, 1.5, k).unwrap();
            let want = 0.25 * law_tail(&a, 0.01, 2.0, 4.0, 1.5, k).unwrap()
                + 0.75 * law_tail(&b, 0.01, 2.0, 4.0, 1.5, k).unwrap();
            assert!(close(got, want, 1e-14));
        }
    }

    #[test]
    fn cosine_law_matches_quadrature_over_the_lobe() {
        // average the Gamma(m, 1/m) ring over c = cos²(πθ/2), θ uniform on [-1, 1]
        let (lambda, m, s, alpha, a, b) = (1e-3, 2.0, 5.0, 2.1, 1.0, 200.0);
        let (nt, spacing) = (8u32, 0.5);
        let p = cosine_lobe_probability(nt, spacing).unwrap();
        let law = GainLaw::CosineArray { nakagami: m, nt, spacing };
        for k in 0..4 {
            let got = ring(&law, lambda, s, alpha, a, b, k).unwrap();
            let (avg, _) = adaptive_quadrature(
                |th| {
                    let c = (PI * th / 2.0).cos().powi(2);
                    gamma_ring_by_quadrature(lambda, m, c / m, s, alpha, a, b, k)
                },
                0.0,
                1.0,
                1e-12,
            )
            .unwrap();
            let want = p * avg;
            assert!(close(got, want, 1e-7), "k={k}: {got} vs {want}");
        }
    }

    #[test]
    fn lobe_wider_than_range_is_rejected() {
        assert!(cosine_lobe_probability(1, 0.5).is_err());
        assert_eq!(cosine_lobe_probability(1, 1.0).unwrap(), 1.0);
        assert_eq!(cosine_lobe_probability(8, 0.5).unwrap(), 0.25);
    }

    #[test]
    fn empty_rings_vanish() {
        let law = GainLaw::Gamma { shape: 1.0, scale: 1.0 };
        assert_eq!(ring(&law, 0.01, 1.0, 4.0, 3.0, 3.0, 1).unwrap(), 0.0);
        assert_eq!(ring(&law, 0.0, 1.0, 4.0, 0.0, 3.0, 0).unwrap(), 0.0);
        assert_eq!(ring(&law, 0.01, 0.0, 4.0, 1.0, 3.0, 2).unwrap(), 0.0);
    }
}
