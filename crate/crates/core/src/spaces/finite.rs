use super::{MeasureModel, Point};
use crate::{Error, Result};

/// A finite coset space with the discrete metric and uniform probability
/// measure. Permutation actions are exact isometries.
#[derive(Clone, Copy, Debug)]
pub struct FiniteCoset {
    size: usize,
}

impl FiniteCoset {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config("coset space must be nonempty".into()));
        }
        Ok(FiniteCoset { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn basepoint(&self) -> Point {
        Point::Index(0)
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            0.0
        } else {
            1.0
        }
    }

    pub fn measure_model(&self) -> MeasureModel {
        MeasureModel {
            rho: 1.0,
            mass_coefficient: 1.0 / self.size as f64,
            epsilon_max: 1.0,
            uniformly_full_support: true,
            total_mass: 1.0,
            is_probability: true,
        }
    }

    /// Exact enumeration: every point with uniform weight.
    pub fn sample(&self) -> Vec<(Point, f64)> {
        let w = 1.0 / self.size as f64;
        (0..self.size).map(|i| (Point::Index(i), w)).collect()
    }
}
