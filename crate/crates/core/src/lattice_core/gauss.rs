//! Discrete Gaussian sampling over Z with density ∝ exp(−(x−c)²/(2σ²)).
//!
//! Small widths with integer centers use an inverse-CDF table; everything
//! else goes through rejection sampling on the tail-cut window.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub const DEFAULT_TAILCUT: f64 = 13.0;
const TABLE_MAX_SIGMA: f64 = 20.0;

#[derive(Clone, Debug)]
pub struct GaussianSampler {
    pub sigma: f64,
    pub tailcut: f64,
    /// Cumulative probabilities over [−T, T] for center 0, when σ is small.
    cdt: Option<(i64, Vec<f64>)>,
}

impl GaussianSampler {
    pub fn new(sigma: f64) -> Self {
        Self::with_tailcut(sigma, DEFAULT_TAILCUT)
    }

    pub fn with_tailcut(sigma: f64, tailcut: f64) -> Self {
        assert!(sigma > 0.0, "gaussian width must be positive");
        let cdt = (sigma <= TABLE_MAX_SIGMA).then(|| {
            let t = (tailcut * sigma).ceil() as i64;
            let weights: Vec<f64> = (-t..=t).map(|x| rho(x as f64, 0.0, sigma)).collect();
            let total: f64 = weights.iter().sum();
            let mut acc = 0.0;
            let cum = weights
                .iter()
                .map(|w| {
                    acc += w / total;
                    acc
                })
                .collect();
            (t, cum)
        });
        GaussianSampler { sigma, tailcut, cdt }
    }

    /// One sample of D_{Z, σ, c}.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, center: f64) -> i64 {
        if let Some((t, cum)) = &self.cdt {
            if center.fract() == 0.0 {
                let u: f64 = rng.gen();
                let idx = cum.partition_point(|&c| c < u).min(cum.len() - 1);
                return idx as i64 - t + center as i64;
            }
        }
        sample_rejection(rng, self.sigma, center, self.tailcut)
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, rng: &mut R, dim: usize) -> Vec<i64> {
        (0..dim).map(|_| self.sample(rng, 0.0)).collect()
    }
}

#[inline]
fn rho(x: f64, c: f64, sigma: f64) -> f64 {
    let d = x - c;
    (-(d * d) / (2.0 * sigma * sigma)).exp()
}

/// Rejection sampling from the uniform proposal on the tail-cut window.
pub fn sample_rejection<R: Rng + ?Sized>(rng: &mut R, sigma: f64, center: f64, tailcut: f64) -> i64 {
    let lo = (center - tailcut * sigma).ceil() as i64;
    let hi = (center + tailcut * sigma).floor() as i64;
    if lo >= hi {
        return center.round() as i64;
    }
    loop {
        let x = rng.gen_range(lo..=hi);
        if rng.gen::<f64>() < rho(x as f64, center, sigma) {
            return x;
        }
    }
}

/// Continuous standard normal sample.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
