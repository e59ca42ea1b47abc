//! Uniform point generation on the unit square and exact star discrepancy.

mod discrepancy;
mod sobol;

pub use discrepancy::{star_discrepancy, star_discrepancy_in_window, WindowDiscrepancy};
pub use sobol::{sobol_point, SOBOL_DIM2_INIT};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source of uniform pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SequenceKind {
    /// ChaCha8 stream seeded with `seed`; each pair consumes two 64-bit
    /// outputs, mapped to `[0, 1)` through their upper 53 bits.
    PseudoRandom { seed: u64 },
    /// Gray-code ordered 2-D Sobol sequence starting at index `skip`.
    Sobol { skip: u64 },
}

impl SequenceKind {
    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceKind::Sobol { skip: 0 } => Err(Error::InvalidInput(
                "Sobol skip must be at least 1 (the origin is always discarded)".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_quasi(&self) -> bool {
        matches!(self, SequenceKind::Sobol { .. })
    }
}

/// Points in `[0, 1)^2`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointSet2D {
    pub points: Vec<(f64, f64)>,
}

impl PointSet2D {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        let ok = |c: f64| (0.0..1.0).contains(&c);
        if let Some(p) = points.iter().find(|(u, w)| !ok(*u) || !ok(*w)) {
            return Err(Error::InvalidInput(format!("point {p:?} outside [0,1)^2")));
        }
        Ok(PointSet2D { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[inline]
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// First `n` pairs of the sequence. Deterministic in `kind`.
pub fn generate_pairs(kind: SequenceKind, n: usize) -> Result<PointSet2D> {
    kind.validate()?;
    let points = match kind {
        SequenceKind::PseudoRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n)
                .map(|_| {
                    let u = unit_f64(rng.next_u64());
                    let w = unit_f64(rng.next_u64());
                    (u, w)
                })
                .collect()
        }
        SequenceKind::Sobol { skip } => {
            if skip.checked_add(n as u64).is_none_or(|end| end > 1u64 << 32) {
                return Err(Error::InvalidInput("Sobol index exceeds 2^32".into()));
            }
            crate::par::map_range(n, |i| sobol_point(skip + i as u64))
        }
    };
    Ok(PointSet2D { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_random_is_deterministic() {
        let a = generate_pairs(SequenceKind::PseudoRandom { seed: 7 }, 2).unwrap();
        let b = generate_pairs(SequenceKind::PseudoRandom { seed: 7 }, 2).unwrap();
        assert_eq!(a, b);
        let c = generate_pairs(SequenceKind::PseudoRandom { seed: 8 }, 2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn pseudo_random_in_unit_square() {
        let a = generate_pairs(SequenceKind::PseudoRandom { seed: 1 }, 10_000).unwrap();
        assert!(PointSet2D::new(a.points).is_ok());
    }

    #[test]
    fn sobol_skip_zero_is_rejected() {
        assert!(generate_pairs(SequenceKind::Sobol { skip: 0 }, 4).is_err());
    }

    #[test]
    fn point_set_rejects_out_of_range() {
        assert!(PointSet2D::new(vec![(1.0, 0.5)]).is_err());
        assert!(PointSet2D::new(vec![(0.0, 0.999)]).is_ok());
    }
}
