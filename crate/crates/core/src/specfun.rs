//! Scalar special functions: log-gamma, Gauss `2F1`, generalized `3F2` and
//! the regularized lower incomplete gamma function.
//!
//! Everything is evaluated in double precision. Tolerances: `ln_gamma` and
//! `reg_lower_inc_gamma` about 1e-12 relative, `gauss_2f1` about 1e-10
//! relative, `hyp_3f2` about 1e-8 relative (it integrates `2F1`).

use crate::error::{domain, ensure_finite, Error, Result};

/// Series stop when `|term / sum|` falls below this for three consecutive terms.
const SERIES_EPS: f64 = 1e-16;
const SERIES_MAX_TERMS: usize = 10_000;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma", format!("argument must be positive and finite, got {x}")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

/// Gamma function on the real line (poles return an infinity).
pub fn gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    statrs::function::gamma::gamma(x)
}

/// `1 / Γ(x)`, exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / statrs::function::gamma::gamma(x)
    }
}

/// Rising factorial `(a)_n / n!`, the generalized binomial coefficient that
/// shows up in every derivative of `(1 + u)^(-a)`.
pub fn rising_over_factorial(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (a + i as f64) / (i as f64 + 1.0))
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < 1e-9
}

/// Regularized lower incomplete gamma `P(m, x)`.
pub fn reg_lower_inc_gamma(m: f64, x: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(domain("reg_lower_inc_gamma", format!("shape must be positive, got {m}")));
    }
    if !(x >= 0.0) {
        return Err(domain("reg_lower_inc_gamma", format!("argument must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(statrs::function::gamma::gamma_lr(m, x).clamp(0.0, 1.0))
}

/// Plain hypergeometric series `pFq(a; b; z)`.
fn series(func: &'static str, a: &[f64], b: &[f64], z: f64) -> Result<f64> {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut small = 0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        let num: f64 = a.iter().map(|&ai| ai + nf).product();
        let den: f64 = b.iter().map(|&bi| bi + nf).product();
        term *= num / den * z / (nf + 1.0);
        sum += term;
        if !sum.is_finite() {
            return Err(Error::Convergence {
                func,
                terms: n + 1,
                partial: sum,
                last_term: term,
            });
        }
        if term == 0.0 || (term / sum).abs() < SERIES_EPS {
            small += 1;
            if small == 3 || term == 0.0 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Convergence {
        func,
        terms: SERIES_MAX_TERMS,
        partial: sum,
        last_term: term,
    })
}

/// Gauss hypergeometric function `2F1(a, b; c; z)` for real `z < 1`.
///
/// Negative arguments are mapped into `[0, 1/2]`: Pfaff's transformation
/// `z -> z/(z-1)` on `[-1, 0)`, and the `1/z` connection formula followed by
/// Pfaff below `-1` (when `b - a` is not an integer; otherwise Pfaff alone).
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    const F: &str = "gauss_2f1";
    for (name, v) in [("a", a), ("b", b), ("c", c), ("z", z)] {
        ensure_finite(F, name, v)?;
    }
    if is_nonpositive_integer(c) {
        return Err(domain(F, format!("c = {c} is a non-positive integer")));
    }
    if z >= 1.0 {
        return Err(domain(F, format!("z = {z} outside z < 1")));
    }
    if z == 0.0 || a == 0.0 || b == 0.0 {
        return Ok(1.0);
    }
    if z > 0.0 {
        return series(F, &[a, b], &[c], z);
    }
    if z >= -1.0 {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * series(F, &[a, c - b], &[c], w)?);
    }
    if near_integer(b - a) {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * series(F, &[a, c - b], &[c], w)?);
    }
    // DLMF 15.8.2
    let inv = 1.0 / z;
    let mz = -z;
    let t1 = if is_nonpositive_integer(c - a) || is_nonpositive_integer(b) {
        0.0
    } else {
        gamma(c) * gamma(b - a) * rgamma(b) * rgamma(c - a)
            * mz.powf(-a)
            * gauss_2f1(a, a - c + 1.0, a - b + 1.0, inv)?
    };
    let t2 = if is_nonpositive_integer(c - b) || is_nonpositive_integer(a) {
        0.0
    } else {
        gamma(c) * gamma(a - b) * rgamma(a) * rgamma(c - b)
            * mz.powf(-b)
            * gauss_2f1(b, b - c + 1.0, b - a + 1.0, inv)?
    };
    let v = t1 + t2;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Range {
            func: F,
            msg: format!("connection formula overflowed at ({a}, {b}; {c}; {z})"),
        })
    }
}

/// Generalized hypergeometric function `3F2(a1, a2, a3; b1, b2; z)`.
///
/// Direct summation for `|z| <= 1/2`. Otherwise the Euler integral
/// `3F2 = Γ(b)/(Γ(a)Γ(b-a)) ∫ t^(a-1) (1-t)^(b-a-1) 2F1(..; z t) dt` over a
/// pair with `b > a > 0` gives the continuation to all `z < 1`; the integral
/// is evaluated by tanh-sinh quadrature, which absorbs the algebraic endpoint
/// singularities. Without such a pair, an upper parameter equal to a lower
/// one reduces the function to `2F1`; otherwise only `|z| < 1` is supported.
pub fn hyp_3f2(a1: f64, a2: f64, a3: f64, b1: f64, b2: f64, z: f64) -> Result<f64> {
    const F: &str = "hyp_3f2";
    for (name, v) in [("a1", a1), ("a2", a2), ("a3", a3), ("b1", b1), ("b2", b2), ("z", z)] {
        ensure_finite(F, name, v)?;
    }
    if is_nonpositive_integer(b1) || is_nonpositive_integer(b2) {
        return Err(domain(F, "lower parameters must not be non-positive integers"));
    }
    if z >= 1.0 {
        return Err(domain(F, format!("z = {z} outside z < 1")));
    }
    let a = [a1, a2, a3];
    let b = [b1, b2];
    if z == 0.0 || a.contains(&0.0) {
        return Ok(1.0);
    }
    if z.abs() <= 0.5 {
        return series(F, &a, &b, z);
    }

    // Pick the (a_i, b_j) pair whose weight t^(a-1)(1-t)^(b-a-1) is least singular.
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            if ai > 0.0 && bj > ai {
                let score = ai.min(bj - ai);
                if best.is_none_or(|(_, _, s)| score > s) {
                    best = Some((i, j, score));
                }
            }
        }
    }
    let Some((i, j, _)) = best else {
        // a matching upper/lower pair cancels
        for (i, &ai) in a.iter().enumerate() {
            if let Some(j) = b.iter().position(|&bj| bj == ai) {
                let rest: Vec<f64> = a.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect();
                return gauss_2f1(rest[0], rest[1], b[1 - j], z);
            }
        }
        if z.abs() < 1.0 {
            return series(F, &a, &b, z);
        }
        return Err(domain(F, format!("no convergent representation at z = {z}")));
    };
    let (p, bj) = (a[i], b[j]);
    let q = bj - p;
    let rest: Vec<f64> = a.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect();
    let c = b[1 - j];
    let prefactor = (ln_gamma(bj)? - ln_gamma(p)? - ln_gamma(q)?).exp();
    let integral = tanh_sinh_beta(p, q, |t| gauss_2f1(rest[0], rest[1], c, z * t))?;
    Ok(prefactor * integral)
}

/// `∫_0^1 t^(p-1) (1-t)^(q-1) f(t) dt` for `p, q > 0` by tanh-sinh quadrature.
///
/// The map `t = 1 / (1 + exp(-π sinh u))` keeps both `t` and `1 - t` exact
/// near the endpoints.
fn tanh_sinh_beta<F>(p: f64, q: f64, f: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    use std::f64::consts::PI;
    let softplus = |v: f64| if v > 0.0 { v + (-v).exp().ln_1p() } else { v.exp().ln_1p() };
    let node = |u: f64| -> Result<f64> {
        let v = PI * u.sinh();
        let ln_t = -softplus(-v);
        let ln_1mt = -softplus(v);
        let w = (p * ln_t + q * ln_1mt).exp() * PI * u.cosh();
        if w == 0.0 {
            return Ok(0.0);
        }
        Ok(w * f(ln_t.exp())?)
    };
    let min_exp = p.min(q);
    // exp(-min(p,q) π sinh(u_max)) < 1e-20
    let u_max = (46.0 / (PI * min_exp)).asinh();

    let mut h = 0.5;
    let mut sum = node(0.0)?;
    let mut k = 1;
    while (k as f64) * h <= u_max {
        let u = k as f64 * h;
        sum += node(u)? + node(-u)?;
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..10 {
        h *= 0.5;
        // new nodes are the odd multiples of the halved step
        let mut k = 1;
        while (k as f64) * h <= u_max {
            let u = k as f64 * h;
            sum += node(u)? + node(-u)?;
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= 1e-13 * estimate.abs().max(1e-300) {
            return Ok(estimate);
        }
    }
    Err(Error::Convergence {
        func: "hyp_3f2",
        terms: 10,
        partial: estimate,
        last_term: f64::NAN,
    })
}
