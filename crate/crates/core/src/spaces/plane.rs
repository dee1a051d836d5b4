use super::{MeasureModel, Point};
use crate::sampler::kronecker_2d;
use crate::{Error, Result};

/// The punctured plane with Lebesgue measure, filtered by the annuli
/// `X_r = { 1/r <= |v| <= r }`. The origin is excluded: it is a fixed
/// point of the linear action and concentrates infinite mass under the
/// limit density, so the filtration keeps a safety margin around it.
#[derive(Clone, Copy, Debug)]
pub struct PlaneAnnulus {
    r: f64,
}

impl PlaneAnnulus {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 1.5) {
            return Err(Error::Config(format!("annulus radius must be >= 1.5, got {r}")));
        }
        Ok(PlaneAnnulus { r })
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn inner(&self) -> f64 {
        1.0 / self.r
    }

    pub fn basepoint(&self) -> Point {
        Point::Vec2([1.0, 0.0])
    }

    pub fn distance(&self, x: &[f64; 2], y: &[f64; 2]) -> f64 {
        ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
    }

    pub fn in_annulus(&self, v: &[f64; 2]) -> bool {
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        n >= self.inner() && n <= self.r
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * (self.r * self.r - self.inner() * self.inner())
    }

    /// Half-disc bounds at either boundary circle give
    /// `mass >= 0.5 eps^2` for `eps` up to the annulus width (capped at
    /// one): the inner hole is convex so it removes at most half a disc,
    /// and the outer circle cuts less than a half-disc plus a cubic
    /// correction.
    pub fn measure_model(&self) -> MeasureModel {
        MeasureModel {
            rho: 2.0,
            mass_coefficient: 0.5,
            epsilon_max: (self.r - self.inner()).min(1.0),
            uniformly_full_support: true,
            total_mass: self.area(),
            is_probability: false,
        }
    }

    /// Area-uniform deterministic sample of the annulus; weights sum to
    /// the annulus area.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(Point, f64)> {
        let w = self.area() / n as f64;
        let (r0sq, r1sq) = (self.inner() * self.inner(), self.r * self.r);
        kronecker_2d(n, seed)
            .into_iter()
            .map(|[u, v]| {
                let rad = (r0sq + u * (r1sq - r0sq)).sqrt();
                let phi = std::f64::consts::TAU * v;
                (Point::Vec2([rad * phi.cos(), rad * phi.sin()]), w)
            })
            .collect()
    }
}
