use super::{MeasureModel, Point};
use crate::matgroup::{mat3_apply, Mat3};
use crate::sampler::kronecker_2d;
use crate::{Error, Result};

/// The upper sheet of the quadric `x^2 + y^2 - z^2 = -1` with its
/// invariant Riemannian metric and the (infinite) invariant area
/// measure, filtered by geodesic balls around `(0, 0, 1)`. Actions by
/// isometries of the form renormalize points back onto the quadric to
/// control float drift.
#[derive(Clone, Copy, Debug)]
pub struct DeSitterSheet {
    r: f64,
}

/// Lorentz pairing of signature (2,1).
fn pairing(x: &[f64; 3], y: &[f64; 3]) -> f64 {
    x[0] * y[0] + x[1] * y[1] - x[2] * y[2]
}

impl DeSitterSheet {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::Config(format!("ball radius must be positive, got {r}")));
        }
        Ok(DeSitterSheet { r })
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn basepoint(&self) -> Point {
        Point::Vec3([0.0, 0.0, 1.0])
    }

    /// Deviation from the quadric; the space invariant keeps this below
    /// 1e-9 after every action.
    pub fn quadric_residual(v: &[f64; 3]) -> f64 {
        (pairing(v, v) + 1.0).abs()
    }

    /// Pull a nearby point back onto the sheet along the ray from the
    /// origin. The identity component preserves the upper sheet, so the
    /// last coordinate stays positive.
    pub fn renormalize(v: &[f64; 3]) -> [f64; 3] {
        let q = -pairing(v, v);
        let s = 1.0 / q.max(f64::MIN_POSITIVE).sqrt();
        [v[0] * s, v[1] * s, v[2] * s]
    }

    /// Geodesic distance `acosh(-<x, y>)`, computed through the Lorentz
    /// chord `q = <x - y, x - y> = -2 - 2 <x, y>` so nearby points do
    /// not suffer cancellation.
    pub fn distance(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
        let q = (d[0] * d[0] + d[1] * d[1] - d[2] * d[2]).max(0.0);
        (1.0 + q / 2.0).acosh()
    }

    pub fn in_ball(&self, v: &[f64; 3]) -> bool {
        self.distance(v, &[0.0, 0.0, 1.0]) <= self.r + 1e-12
    }

    pub fn act(&self, m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
        let w = mat3_apply(m, v);
        Self::renormalize(&w)
    }

    /// Invariant area of the ball of radius `r` is `2 pi (cosh r - 1)`.
    pub fn ball_area(r: f64) -> f64 {
        std::f64::consts::TAU * (r.cosh() - 1.0)
    }

    /// Geodesic discs have area `2 pi (cosh eps - 1) >= pi eps^2`;
    /// boundary points of the filtration keep at least a convex half.
    pub fn measure_model(&self) -> MeasureModel {
        MeasureModel {
            rho: 2.0,
            mass_coefficient: 1.0,
            epsilon_max: 1.0,
            uniformly_full_support: true,
            total_mass: Self::ball_area(self.r),
            is_probability: false,
        }
    }

    /// Deterministic area-uniform sample of the geodesic ball, in polar
    /// coordinates `(s, phi)` with density `sinh s`.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(Point, f64)> {
        let w = Self::ball_area(self.r) / n as f64;
        let span = self.r.cosh() - 1.0;
        kronecker_2d(n, seed)
            .into_iter()
            .map(|[u, v]| {
                let s = (1.0 + u * span).acosh();
                let phi = std::f64::consts::TAU * v;
                let rho = s.sinh();
                (Point::Vec3([rho * phi.cos(), rho * phi.sin(), s.cosh()]), w)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::adjoint_so21;

    #[test]
    fn sample_points_satisfy_quadric() {
        let s = DeSitterSheet::new(3.0).unwrap();
        for (p, _) in s.sample(2_000, 4) {
            assert!(DeSitterSheet::quadric_residual(&p.as_vec3().unwrap()) < 1e-9);
        }
    }

    #[test]
    fn action_preserves_quadric_and_distance() {
        let s = DeSitterSheet::new(3.0).unwrap();
        let g = adjoint_so21(&[[1.0, 1.0], [0.0, 1.0]]).unwrap().as_mat3();
        let sample = s.sample(200, 8);
        for pair in sample.windows(2) {
            let (x, y) = (pair[0].0.as_vec3().unwrap(), pair[1].0.as_vec3().unwrap());
            let (gx, gy) = (s.act(&g, &x), s.act(&g, &y));
            assert!(DeSitterSheet::quadric_residual(&gx) < 1e-9);
            assert!((s.distance(&gx, &gy) - s.distance(&x, &y)).abs() < 1e-9);
        }
    }

    #[test]
    fn distance_from_basepoint_matches_parameter() {
        let s = DeSitterSheet::new(2.0).unwrap();
        let base = [0.0, 0.0, 1.0];
        let p = [1.0f64.sinh(), 0.0, 1.0f64.cosh()];
        assert!((s.distance(&base, &p) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_sample_mass_is_invariant_area() {
        let s = DeSitterSheet::new(2.0).unwrap();
        let mass: f64 = s.sample(5_000, 1).iter().map(|(_, w)| w).sum();
        assert!((mass - DeSitterSheet::ball_area(2.0)).abs() < 1e-9);
    }
}
