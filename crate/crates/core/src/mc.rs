//! Reproducible parallel Monte Carlo over axis-aligned boxes.
//!
//! Samples are split into fixed-size shards. Shard `s` draws from ChaCha8
//! keyed by the user seed with stream number `s`, so every sample is a
//! function of `(seed, sample index)` alone. Shard statistics are merged in
//! shard order, which makes the result bit-identical for any thread count.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples per shard. Changing it changes every estimate.
pub const SHARD_SIZE: u64 = 1 << 14;

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: u64 = 10_000;

/// A Monte Carlo integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`, in the units of `mean`.
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// An estimate with no sampling noise.
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            stderr: 0.0,
            samples: 0,
            seed: 0,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mean: s * self.mean,
            stderr: s.abs() * self.stderr,
            ..*self
        }
    }

    pub fn relative_stderr(&self) -> f64 {
        self.stderr / self.mean.abs()
    }

    /// `self / other` for independent estimates, first-order error propagation.
    pub fn ratio(&self, other: &MCEstimate) -> (f64, f64) {
        let r = self.mean / other.mean;
        let rel = self.relative_stderr().hypot(other.relative_stderr());
        (r, r.abs() * rel)
    }
}

/// Whether `|a − b| ≤ n_sigma · stderr`.
pub fn within_sigma(a: f64, b: f64, stderr: f64, n_sigma: f64) -> bool {
    (a - b).abs() <= n_sigma * stderr
}

/// Running mean and centered second moment (Chan et al. merge).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        Moments {
            count,
            mean: self.mean + delta * nb / count as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / count as f64,
        }
    }
}

/// An axis-aligned box `center ± half_widths`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub center: Vec<f64>,
    pub half_widths: Vec<f64>,
}

impl SampleBox {
    pub fn new(center: Vec<f64>, half_widths: Vec<f64>) -> Self {
        assert_eq!(center.len(), half_widths.len());
        Self { center, half_widths }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn volume(&self) -> f64 {
        self.half_widths.iter().map(|w| 2.0 * w).product()
    }
}

fn check_samples(samples: u64) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParams(format!(
            "at least {MIN_SAMPLES} samples are required, got {samples}"
        )));
    }
    Ok(())
}

fn shard_rng(seed: u64, shard: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    rng
}

/// Fills `out` with uniform points in the box for every sample of a shard and
/// hands each to `visit`.
fn for_each_sample<V>(bx: &SampleBox, seed: u64, shard: u64, count: u64, mut visit: V)
where
    V: FnMut(&[f64]),
{
    let mut rng = shard_rng(seed, shard);
    let mut x = vec![0.0; bx.dim()];
    for _ in 0..count {
        for (l, xl) in x.iter_mut().enumerate() {
            let u: f64 = rng.random();
            *xl = bx.center[l] + bx.half_widths[l] * (2.0 * u - 1.0);
        }
        visit(&x);
    }
}

fn shard_counts(samples: u64) -> Vec<(u64, u64)> {
    let shards = samples.div_ceil(SHARD_SIZE);
    (0..shards)
        .map(|s| (s, SHARD_SIZE.min(samples - s * SHARD_SIZE)))
        .collect()
}

/// `∫_box f dL` by uniform sampling. The integrand receives the sample
/// coordinates.
pub fn integrate<F>(bx: &SampleBox, samples: u64, seed: u64, f: F) -> Result<MCEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(integrate_many(bx, samples, seed, 1, |x, out| out[0] = f(x))?[0])
}

/// Several integrals over the same samples. `f` writes `outputs` values per
/// sample.
pub fn integrate_many<F>(bx: &SampleBox, samples: u64, seed: u64, outputs: usize, f: F) -> Result<Vec<MCEstimate>>
where
    F: Fn(&[f64], &mut [f64]) + Sync,
{
    check_samples(samples)?;
    let per_shard: Vec<Vec<Moments>> = shard_counts(samples)
        .into_par_iter()
        .map(|(shard, count)| {
            let mut acc = vec![Moments::default(); outputs];
            let mut vals = vec![0.0; outputs];
            for_each_sample(bx, seed, shard, count, |x| {
                vals.iter_mut().for_each(|v| *v = 0.0);
                f(x, &mut vals);
                for (a, &v) in acc.iter_mut().zip(&vals) {
                    a.push(v);
                }
            });
            acc
        })
        .collect();
    let mut total = vec![Moments::default(); outputs];
    for shard in per_shard {
        for (t, m) in total.iter_mut().zip(shard) {
            *t = t.merge(m);
        }
    }
    let vol = bx.volume();
    Ok(total
        .into_iter()
        .map(|m| {
            let var = if m.count > 1 { m.m2 / (m.count - 1) as f64 } else { 0.0 };
            MCEstimate {
                mean: vol * m.mean,
                stderr: vol * (var / m.count as f64).sqrt(),
                samples: m.count,
                seed,
            }
        })
        .collect())
}

/// `count` uniform points in the box, reproducible from `seed`.
pub fn uniform_points(bx: &SampleBox, count: u64, seed: u64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count as usize);
    for (shard, n) in shard_counts(count) {
        for_each_sample(bx, seed, shard, n, |x| out.push(x.to_vec()));
    }
    out
}

/// Derives an independent seed for a sub-computation.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    // SplitMix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
