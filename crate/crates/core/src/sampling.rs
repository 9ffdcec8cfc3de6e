//! Seeded sample points in the domain box.
//!
//! Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so the
//! result does not depend on evaluation order or thread count. Candidates
//! where the metric is degenerate, has the wrong signature, or a component
//! cannot be evaluated are rejected and redrawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{evaluate_point, GeometryError, ManifoldInstance, PointData};
use crate::tensor::Vec3;

/// Redraws allowed per sample after the first candidate.
pub const MAX_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SampleError {
    #[error("sample count must be at least 1")]
    Empty,
    #[error("sample {index}: no admissible point after {MAX_RETRIES} retries (last: {last})")]
    Exhausted { index: usize, last: GeometryError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub index: usize,
    pub point: Vec3,
    /// Candidates rejected before this one.
    pub rejected: usize,
    pub data: PointData,
}

fn candidate(rng: &mut ChaCha8Rng, domain: &[[f64; 2]; 3]) -> Vec3 {
    std::array::from_fn(|i| {
        let [lo, hi] = domain[i];
        let u: f64 = rng.random();
        lo + (hi - lo) * u
    })
}

/// Points only, without evaluation (for callers that evaluate themselves).
pub fn candidate_points(domain: &[[f64; 2]; 3], seed: u64, index: usize, count: usize) -> Vec<Vec3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    (0..count).map(|_| candidate(&mut rng, domain)).collect()
}

pub fn sample_one(m: &ManifoldInstance, seed: u64, index: usize) -> Result<Sample, SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let mut last = None;
    for rejected in 0..=MAX_RETRIES {
        let point = candidate(&mut rng, &m.domain);
        match evaluate_point(m, point) {
            Ok(data) => {
                return Ok(Sample {
                    index,
                    point,
                    rejected,
                    data,
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(SampleError::Exhausted {
        index,
        last: last.expect("at least one attempt"),
    })
}

/// `count` evaluated samples, in index order. Runs on the current rayon pool.
pub fn sample_points(m: &ManifoldInstance, count: usize, seed: u64) -> Result<Vec<Sample>, SampleError> {
    if count == 0 {
        return Err(SampleError::Empty);
    }
    (0..count).into_par_iter().map(|i| sample_one(m, seed, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{build_example, ZooId, ZooParams};

    #[test]
    fn samples_are_reproducible_and_inside_the_box() {
        let (m, _) = build_example(ZooId::E5, ZooParams::default()).unwrap();
        let a = sample_points(&m, 8, 3).unwrap();
        let b = sample_points(&m, 8, 3).unwrap();
        assert_eq!(a, b);
        for s in &a {
            assert!(m.contains(s.point));
        }
        let c = sample_points(&m, 8, 4).unwrap();
        assert_ne!(a[0].point, c[0].point);
        assert_eq!(sample_points(&m, 0, 0).unwrap_err(), SampleError::Empty);
    }
}
