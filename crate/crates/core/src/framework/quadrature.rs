//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{domain, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SUBDIVISIONS: usize = 2000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: k * h,
        err: ((k - g) * h).abs(),
    }
}

/// `∫_a^b f` with `b` possibly `+∞`, to absolute tolerance `abs_tol`.
///
/// Returns `(value, error_estimate)`. An infinite upper limit is mapped to
/// `[0, 1)` by `x = a + t / (1 - t)`.
pub fn adaptive_quadrature<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if !(abs_tol > 0.0) {
        return Err(domain("adaptive_quadrature", "tolerance must be positive"));
    }
    if !a.is_finite() || b.is_nan() || b < a {
        return Err(domain("adaptive_quadrature", format!("bad interval [{a}, {b}]")));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }
    if b.is_infinite() {
        let g = move |t: f64| {
            let one_m = 1.0 - t;
            let x = a + t / one_m;
            let v = f(x) / (one_m * one_m);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        return integrate_finite(g, 0.0, 1.0, abs_tol);
    }
    integrate_finite(f, a, b, abs_tol)
}

fn integrate_finite<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let mut segments = vec![kronrod(&mut f, a, b)];
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.err).sum();
        if !total.is_finite() {
            return Err(Error::Quadrature { achieved: f64::INFINITY, requested: abs_tol });
        }
        if err <= abs_tol {
            return Ok((total, err));
        }
        if segments.len() >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature { achieved: err, requested: abs_tol });
        }
        let (idx, worst) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .map(|(i, s)| (i, *s))
            .unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Quadrature { achieved: err, requested: abs_tol });
        }
        segments[idx] = kronrod(&mut f, worst.a, mid);
        segments.push(kronrod(&mut f, mid, worst.b));
    }
}

/// Fallible-integrand wrapper: the first error raised by `f` aborts the integral.
pub fn try_adaptive_quadrature<F>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut first_err: Option<Error> = None;
    let out = adaptive_quadrature(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                first_err.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        abs_tol,
    );
    if let Some(e) = first_err {
        return Err(e);
    }
    out
}
