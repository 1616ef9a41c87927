use crate::framework::GainLaw;
use crate::mmwave::gain_cosine;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson};
use std::f64::consts::PI;

/// Points of one realization, in metres.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointSet {
    pub points: Vec<(f64, f64)>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).expect("finite positive mean").sample(rng) as usize
}

/// Squared radii of a PPP of density `lambda` on the ring `[a, b]`, appended
/// to `out`. Angles are not drawn.
pub fn sample_ring_radii_sq<R: Rng + ?Sized>(lambda: f64, a: f64, b: f64, rng: &mut R, out: &mut Vec<f64>) {
    let (a2, b2) = (a * a, b * b);
    let n = poisson_count(lambda * PI * (b2 - a2), rng);
    out.extend((0..n).map(|_| a2 + rng.random::<f64>() * (b2 - a2)));
}

/// Visits the points of a PPP of density `lambda` on the ring `[a, b]` in
/// order of increasing radius, calling `visit(d², rng)` for each.
///
/// Points are generated as arrivals `π λ (d² - a²) = E₁ + E₂ + ...`, so the
/// run for a larger `b` extends the run for a smaller one draw for draw, as
/// long as `visit` consumes the same stream.
pub(crate) fn radial_arrivals<R, F>(lambda: f64, a: f64, b: f64, rng: &mut R, mut visit: F)
where
    R: Rng + ?Sized,
    F: FnMut(f64, &mut R),
{
    if !(lambda > 0.0) || !(b > a) {
        return;
    }
    let (a2, b2) = (a * a, b * b);
    let step = 1.0 / (PI * lambda);
    let mut d2 = a2;
    loop {
        let e: f64 = Exp1.sample(rng);
        d2 += e * step;
        if d2 > b2 {
            return;
        }
        visit(d2, rng);
    }
}

/// Child generator seeded from `rng`, so that what it produces does not
/// depend on how much the parent is used afterwards.
pub(crate) fn sub_rng<R: Rng + ?Sized>(rng: &mut R) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(rng.random())
}

/// Homogeneous PPP of density `lambda` on the ring `[a, b]` around the origin.
pub fn sample_ppp<R: Rng + ?Sized>(lambda: f64, a: f64, b: f64, rng: &mut R) -> PointSet {
    assert!(0.0 <= a && a <= b && b.is_finite(), "sample_ppp: need 0 <= a <= b < inf");
    let mut r2 = Vec::new();
    sample_ring_radii_sq(lambda, a, b, rng, &mut r2);
    let points = r2
        .into_iter()
        .map(|q| {
            let r = q.sqrt();
            let th = 2.0 * PI * rng.random::<f64>();
            (r * th.cos(), r * th.sin())
        })
        .collect();
    PointSet { points }
}

/// Gamma draws with the unit-shape case short-circuited to `Exp(1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaDraw {
    dist: Option<Gamma<f64>>,
    scale: f64,
}

impl GammaDraw {
    pub fn new(shape: f64, scale: f64) -> Self {
        let dist = if shape == 1.0 { None } else { Some(Gamma::new(shape, 1.0).expect("valid gamma")) };
        Self { dist, scale }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g: f64 = match &self.dist {
            None => Exp1.sample(rng),
            Some(d) => d.sample(rng),
        };
        g * self.scale
    }
}

/// Sampler for a [`GainLaw`].
#[derive(Debug, Clone)]
pub(crate) enum GainDraw {
    Gamma(GammaDraw),
    Mixture(Vec<(f64, GammaDraw)>),
    Cosine { fading: GammaDraw, nt: u32, spacing: f64 },
}

impl GainDraw {
    pub fn new(law: &GainLaw) -> Self {
        match law {
            GainLaw::Gamma { shape, scale } => GainDraw::Gamma(GammaDraw::new(*shape, *scale)),
            GainLaw::GammaMixture(parts) => {
                let mut cum = 0.0;
                GainDraw::Mixture(
                    parts
                        .iter()
                        .map(|c| {
                            cum += c.weight;
                            (cum, GammaDraw::new(c.shape, c.scale))
                        })
                        .collect(),
                )
            }
            GainLaw::CosineArray { nakagami, nt, spacing } => GainDraw::Cosine {
                fading: GammaDraw::new(*nakagami, 1.0 / nakagami),
                nt: *nt,
                spacing: *spacing,
            },
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            GainDraw::Gamma(g) => g.sample(rng),
            GainDraw::Mixture(parts) => {
                let u: f64 = rng.random();
                let idx = parts.iter().position(|(c, _)| u < *c).unwrap_or(parts.len() - 1);
                parts[idx].1.sample(rng)
            }
            GainDraw::Cosine { fading, nt, spacing } => {
                let phi = 2.0 * rng.random::<f64>() - 1.0;
                let g = gain_cosine(spacing * phi, *nt);
                if g == 0.0 {
                    0.0
                } else {
                    fading.sample(rng) * g
                }
            }
        }
    }
}

/// `(d²)^{-α/2}` with a fast path for `α = 4`.
#[inline]
pub(crate) fn path_loss_sq(d2: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        1.0 / (d2 * d2)
    } else {
        d2.powf(-0.5 * alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::trial_rng;

    #[test]
    fn empty_for_zero_density() {
        let mut rng = trial_rng(1, 0);
        assert!(sample_ppp(0.0, 0.0, 10.0, &mut rng).is_empty());
    }

    #[test]
    fn mean_count() {
        let (lambda, a, b) = (0.01, 2.0, 12.0);
        let mean = lambda * PI * (b * b - a * a);
        let n = 10_000u64;
        let total: usize = (0..n).map(|i| sample_ppp(lambda, a, b, &mut trial_rng(3, i)).len()).sum();
        let avg = total as f64 / n as f64;
        assert!((avg - mean).abs() < 3.0 * (mean / n as f64).sqrt(), "{avg} vs {mean}");
    }

    #[test]
    fn radial_law_passes_ks() {
        let (a, b) = (1.0, 5.0);
        let mut r: Vec<f64> = Vec::new();
        for i in 0..400 {
            for (x, y) in sample_ppp(0.05, a, b, &mut trial_rng(9, i)).points {
                let d = (x * x + y * y).sqrt();
                assert!(d >= a - 1e-12 && d <= b + 1e-12);
                r.push(d);
            }
        }
        r.sort_by(f64::total_cmp);
        let n = r.len() as f64;
        let cdf = |x: f64| (x * x - a * a) / (b * b - a * a);
        let d = r
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        // Kolmogorov critical value at the 1% level
        let crit = 1.628 / n.sqrt();
        assert!(d < crit, "D = {d}, critical {crit}, n = {n}");
    }

    #[test]
    fn arrivals_are_nested_and_poisson() {
        let mut near = Vec::new();
        radial_arrivals(0.01, 1.0, 20.0, &mut trial_rng(4, 0), |d2, _| near.push(d2));
        let mut far = Vec::new();
        radial_arrivals(0.01, 1.0, 40.0, &mut trial_rng(4, 0), |d2, _| far.push(d2));
        assert_eq!(near[..], far[..near.len()]);
        assert!(near.windows(2).all(|w| w[0] < w[1]));
        let (a, b, n) = (1.0, 20.0, 5000u64);
        let mut total = 0usize;
        for i in 0..n {
            radial_arrivals(0.01, a, b, &mut trial_rng(6, i), |_, _| total += 1);
        }
        let mean = 0.01 * PI * (b * b - a * a);
        let avg = total as f64 / n as f64;
        assert!((avg - mean).abs() < 3.0 * (mean / n as f64).sqrt(), "{avg} vs {mean}");
    }

    #[test]
    fn gain_means() {
        let mut rng = trial_rng(5, 0);
        let n = 200_000;
        for law in [
            GainLaw::Gamma { shape: 1.0, scale: 2.0 },
            GainLaw::Gamma { shape: 3.0, scale: 0.5 },
            GainLaw::GammaMixture(vec![
                crate::framework::GammaComponent { weight: 0.5, shape: 1.0, scale: 1.0 },
                crate::framework::GammaComponent { weight: 0.5, shape: 2.0, scale: 2.0 },
            ]),
            GainLaw::CosineArray { nakagami: 2.0, nt: 8, spacing: 0.5 },
        ] {
            let d = GainDraw::new(&law);
            let m: f64 = (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64;
            assert!((m - law.mean()).abs() < 0.02 * law.mean().max(0.1), "{law:?}: {m}");
        }
    }
}
