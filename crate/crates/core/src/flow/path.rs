use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Independent generator for stream `index` under `master`.
///
/// Streams do not depend on how work is scheduled, so parallel runs are
/// reproducible.
pub fn path_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Sampled Brownian path with `dim` independent coordinates, each with
/// variance `sigma2` per unit time.
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    times: Vec<f64>,
    /// Row-major, `dim` values per time.
    values: Vec<f64>,
    dim: usize,
    sigma2: f64,
    seed: u64,
    level: u32,
}

pub fn sample_path(dim: usize, horizon: f64, dt: f64, sigma2: f64, seed: u64) -> Result<BrownianPath> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if horizon < dt {
        return Err(Error::InvalidArgument(format!("horizon {horizon} shorter than dt {dt}")));
    }
    if !(dim == 1 || dim == 2) {
        return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma2 must be positive, got {sigma2}")));
    }
    let steps = (horizon / dt - 1e-9).ceil() as usize;
    let mut times: Vec<f64> = (0..steps).map(|i| i as f64 * dt).collect();
    times.push(horizon);
    let mut rng = path_rng(seed, 0);
    let mut values = vec![0.0; dim];
    for i in 1..times.len() {
        let sd = (sigma2 * (times[i] - times[i - 1])).sqrt();
        for c in 0..dim {
            let z: f64 = rng.sample(StandardNormal);
            let prev = values[(i - 1) * dim + c];
            values.push(prev + sd * z);
        }
    }
    Ok(BrownianPath {
        times,
        values,
        dim,
        sigma2,
        seed,
        level: 0,
    })
}

impl BrownianPath {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("paths have at least two points")
    }

    pub fn value(&self, i: usize, coord: usize) -> f64 {
        self.values[i * self.dim + coord]
    }

    pub fn component(&self, coord: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i, coord)).collect()
    }

    pub fn max_increment(&self, coord: usize) -> f64 {
        (1..self.len())
            .map(|i| (self.value(i, coord) - self.value(i - 1, coord)).abs())
            .fold(0.0, f64::max)
    }

    /// `W_t`, linearly interpolated between samples.
    pub fn at(&self, t: f64, coord: usize) -> Result<f64> {
        if !(0.0..=self.horizon()).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "time {t} outside [0, {}]",
                self.horizon()
            )));
        }
        let i = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if i + 1 >= self.len() {
            return Ok(self.value(self.len() - 1, coord));
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.value(i, coord) * (1.0 - w) + self.value(i + 1, coord) * w)
    }

    /// Inserts a Brownian-bridge midpoint into every interval. Existing
    /// samples are kept.
    pub fn refine(&self) -> BrownianPath {
        let level = self.level + 1;
        let mut rng = path_rng(self.seed, level as u64);
        let n = self.len();
        let mut times = Vec::with_capacity(2 * n - 1);
        let mut values = Vec::with_capacity((2 * n - 1) * self.dim);
        for i in 0..n {
            times.push(self.times[i]);
            values.extend_from_slice(&self.values[i * self.dim..(i + 1) * self.dim]);
            if i + 1 < n {
                let (t0, t1) = (self.times[i], self.times[i + 1]);
                times.push(0.5 * (t0 + t1));
                let sd = (self.sigma2 * (t1 - t0) / 4.0).sqrt();
                for c in 0..self.dim {
                    let z: f64 = rng.sample(StandardNormal);
                    let mid = 0.5 * (self.value(i, c) + self.value(i + 1, c));
                    values.push(mid + sd * z);
                }
            }
        }
        BrownianPath {
            times,
            values,
            dim: self.dim,
            sigma2: self.sigma2,
            seed: self.seed,
            level,
        }
    }

    /// CSV with header `t,w1[,w2]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.dim == 1 { "t,w1\n" } else { "t,w1,w2\n" });
        for i in 0..self.len() {
            write!(out, "{:e}", self.times[i]).expect("writing to String");
            for c in 0..self.dim {
                write!(out, ",{:e}", self.value(i, c)).expect("writing to String");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_path() {
        let a = sample_path(2, 1.0, 0.01, 1.0, 7).unwrap();
        let b = sample_path(2, 1.0, 0.01, 1.0, 7).unwrap();
        assert_eq!(a, b);
        let c = sample_path(2, 1.0, 0.01, 1.0, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn starts_at_zero_and_ends_at_horizon() {
        let p = sample_path(1, 0.95, 0.1, 2.0, 1).unwrap();
        assert_eq!(p.value(0, 0), 0.0);
        assert_eq!(p.horizon(), 0.95);
        assert_eq!(p.len(), 11);
    }

    #[test]
    fn increment_variance() {
        let dt = 0.01;
        let sigma2 = 2.0;
        let p = sample_path(1, 1000.0, dt, sigma2, 3).unwrap();
        let w = p.component(0);
        let inc: Vec<f64> = w.windows(2).map(|x| x[1] - x[0]).collect();
        let n = inc.len() as f64;
        let var = inc.iter().map(|x| x * x).sum::<f64>() / n;
        let want = sigma2 * dt;
        // sd of the sample variance is want·√(2/n)
        assert!((var - want).abs() < 3.0 * want * (2.0 / n).sqrt(), "{var} vs {want}");
    }

    #[test]
    fn refinement_keeps_samples() {
        let p = sample_path(2, 1.0, 0.125, 1.0, 11).unwrap();
        let r = p.refine();
        assert_eq!(r.len(), 2 * p.len() - 1);
        for i in 0..p.len() {
            assert_eq!(r.times()[2 * i], p.times()[i]);
            assert_eq!(r.value(2 * i, 1), p.value(i, 1));
        }
        assert_eq!(r.level(), 1);
        assert_eq!(r, p.refine());
    }

    #[test]
    fn rejects_bad_dt() {
        assert!(sample_path(1, 1.0, 0.0, 1.0, 0).is_err());
        assert!(sample_path(1, 0.01, 0.1, 1.0, 0).is_err());
    }
}
