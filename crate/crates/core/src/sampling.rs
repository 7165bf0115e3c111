//! Deterministic sampling of chart points and tangent vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{basis, ChartPoint, Vector};

/// Per-coordinate closed intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub intervals: Vec<(f64, f64)>,
}

impl DomainBox {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::Invalid("empty domain box".into()));
        }
        for (lo, hi) in &intervals {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Invalid(format!("bad interval [{lo}, {hi}]")));
            }
        }
        Ok(Self { intervals })
    }

    /// `[-r, r]` in every coordinate.
    pub fn cube(dim: usize, r: f64) -> Self {
        Self { intervals: vec![(-r, r); dim] }
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    /// Product with one more interval.
    pub fn extended(&self, lo: f64, hi: f64) -> Self {
        let mut intervals = self.intervals.clone();
        intervals.push((lo, hi));
        Self { intervals }
    }

    pub fn center(&self) -> Vec<f64> {
        self.intervals.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

/// How many points and vectors to draw, and from which seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub points: usize,
    /// Random unit vectors per point.
    pub vectors: usize,
    pub seed: u64,
    /// Also test with every coordinate basis vector at each point.
    pub include_basis: bool,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self { points: 100, vectors: 8, seed: 0, include_basis: true }
    }
}

/// One sampled point together with the tangent vectors tested there.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub point: ChartPoint,
    pub vectors: Vec<Vector>,
}

impl SamplingPlan {
    pub fn new(points: usize, vectors: usize, seed: u64) -> Self {
        Self { points, vectors, seed, include_basis: true }
    }

    /// Same seed, `factor` times as many points and vectors.
    pub fn denser(&self, factor: usize) -> Self {
        Self { points: self.points * factor, vectors: self.vectors * factor, ..*self }
    }

    /// Points uniform in the box; vectors uniform on the Euclidean unit
    /// sphere of the coordinates. The sequence depends only on the seed.
    pub fn draw(&self, domain: &DomainBox) -> Vec<Sample> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let d = domain.dim();
        (0..self.points)
            .map(|_| {
                let coords = domain
                    .intervals
                    .iter()
                    .map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                    .collect();
                let mut vectors: Vec<Vector> =
                    if self.include_basis { (0..d).map(|i| basis(d, i)).collect() } else { Vec::new() };
                vectors.extend((0..self.vectors).map(|_| unit_vector(&mut rng, d)));
                Sample { point: ChartPoint::new(coords).expect("box coordinates are finite"), vectors }
            })
            .collect()
    }

    /// Draw points, then overwrite the last coordinate of each with the
    /// given values in rotation (used to pin the cone's `t`).
    pub fn draw_with_last(&self, domain: &DomainBox, pinned: &[f64]) -> Vec<Sample> {
        let mut samples = self.draw(domain);
        if !pinned.is_empty() {
            for (i, s) in samples.iter_mut().enumerate() {
                if let Some(&t) = pinned.get(i) {
                    let mut c = s.point.coords().to_vec();
                    *c.last_mut().expect("nonempty") = t;
                    s.point = ChartPoint::new(c).expect("finite");
                }
            }
        }
        samples
    }
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    loop {
        let v: Vector = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}
