use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::JointDistribution;
use crate::mechanisms::Mechanism;
use crate::model::item_profile;
use crate::rational::Rational;

/// Number of generator streams; fixed so results do not depend on thread count.
pub const STREAMS: u64 = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub samples: u64,
    pub seed: u64,
    pub welfare_mean: f64,
    pub welfare_stderr: f64,
    pub revenue_mean: f64,
    pub revenue_stderr: f64,
}

/// Inverse-CDF sampler over a finite list of outcomes.
struct Sampler<T> {
    cdf: Vec<f64>,
    items: Vec<T>,
}

impl<T: Clone> Sampler<T> {
    fn new(weighted: Vec<(T, Rational)>) -> Self {
        let mut acc = 0.0;
        let mut cdf = Vec::with_capacity(weighted.len());
        let mut items = Vec::with_capacity(weighted.len());
        for (x, p) in weighted {
            acc += p.to_f64();
            cdf.push(acc);
            items.push(x);
        }
        Sampler { cdf, items }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> T {
        let u: f64 = rng.gen::<f64>() * self.cdf.last().copied().unwrap_or(1.0);
        let k = self.cdf.partition_point(|&c| c <= u).min(self.items.len() - 1);
        self.items[k].clone()
    }
}

enum ProfileSampler {
    Product(Vec<Sampler<Rational>>),
    Joint(Sampler<Vec<Rational>>),
}

impl ProfileSampler {
    fn new(dist: &JointDistribution) -> Self {
        if dist.is_product() {
            ProfileSampler::Product((0..dist.n_agents()).map(|i| Sampler::new(dist.marginal(i))).collect())
        } else {
            ProfileSampler::Joint(Sampler::new(dist.support()))
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<Rational> {
        match self {
            ProfileSampler::Product(s) => s.iter().map(|m| m.draw(rng)).collect(),
            ProfileSampler::Joint(s) => s.draw(rng),
        }
    }
}

#[derive(Default, Clone, Copy)]
struct Moments {
    n: u64,
    w: f64,
    w2: f64,
    r: f64,
    r2: f64,
}

/// Seeded Monte Carlo estimate of expected welfare and revenue.
///
/// Stream `s` of ChaCha8 seeded with `seed` draws samples `s, s + STREAMS, ...`.
pub fn monte_carlo_metrics<M: Mechanism + ?Sized>(
    mech: &M,
    dist: &JointDistribution,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    let sampler = ProfileSampler::new(dist);
    let parts = (0..STREAMS)
        .into_par_iter()
        .map(|s| -> Result<Moments> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let count = samples / STREAMS + u64::from(s < samples % STREAMS);
            let mut m = Moments::default();
            for _ in 0..count {
                let profile = item_profile(&sampler.draw(&mut rng));
                let d = mech.evaluate(&profile)?;
                let w = d.welfare(&profile).to_f64();
                let r = d.revenue().to_f64();
                m.n += 1;
                m.w += w;
                m.w2 += w * w;
                m.r += r;
                m.r2 += r * r;
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    let t = parts.iter().fold(Moments::default(), |a, b| Moments {
        n: a.n + b.n,
        w: a.w + b.w,
        w2: a.w2 + b.w2,
        r: a.r + b.r,
        r2: a.r2 + b.r2,
    });
    let n = t.n.max(1) as f64;
    let stderr = |sum: f64, sq: f64| {
        let mean = sum / n;
        let var = (sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        (var / n).sqrt()
    };
    Ok(MonteCarloEstimate {
        samples: t.n,
        seed,
        welfare_mean: t.w / n,
        welfare_stderr: stderr(t.w, t.w2),
        revenue_mean: t.r / n,
        revenue_stderr: stderr(t.r, t.r2),
    })
}
