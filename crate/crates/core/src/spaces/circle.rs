use super::{MeasureModel, Point};
use crate::matgroup::{mat2_apply, Mat2f};
use crate::sampler::kronecker_1d;

/// The projective line of directions in the plane, coordinatized by the
/// angle mod pi, under the fractional-linear action of 2x2 unimodular
/// matrices. The action factors through the center, so the angle
/// coordinate has no sign ambiguity. Lebesgue probability measure
/// `d(theta)/pi` is quasi-invariant, not invariant.
#[derive(Clone, Copy, Debug, Default)]
pub struct Circle;

impl Circle {
    pub fn new() -> Self {
        Circle
    }

    pub fn basepoint(&self) -> Point {
        Point::Angle(0.0)
    }

    pub fn normalize(theta: f64) -> f64 {
        theta.rem_euclid(std::f64::consts::PI)
    }

    pub fn distance(&self, a: f64, b: f64) -> f64 {
        let d = (Self::normalize(a) - Self::normalize(b)).abs();
        d.min(std::f64::consts::PI - d)
    }

    /// Image of a direction line under the linear map.
    pub fn act(&self, m: &Mat2f, theta: f64) -> f64 {
        let v = [theta.cos(), theta.sin()];
        let w = mat2_apply(m, &v);
        Self::normalize(w[1].atan2(w[0]))
    }

    /// Arc mass is `2 eps / pi` around any angle, certified with
    /// coefficient `1/pi` on `eps <= 1`.
    pub fn measure_model(&self) -> MeasureModel {
        MeasureModel {
            rho: 1.0,
            mass_coefficient: 1.0 / std::f64::consts::PI,
            epsilon_max: 1.0,
            uniformly_full_support: true,
            total_mass: 1.0,
            is_probability: true,
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Vec<(Point, f64)> {
        let w = 1.0 / n as f64;
        kronecker_1d(n, seed)
            .into_iter()
            .map(|u| (Point::Angle(u * std::f64::consts::PI), w))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::Sl2Raw;

    #[test]
    fn action_factors_through_center() {
        let c = Circle::new();
        let g = Sl2Raw::new(2, 1, 1, 1).unwrap();
        let theta = 0.73;
        let a = c.act(&g.to_float(), theta);
        let b = c.act(&g.neg().to_float(), theta);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn identity_fixes_angles() {
        let c = Circle::new();
        for theta in [0.0, 0.5, 1.5, 3.0] {
            assert!(c.distance(c.act(&[[1.0, 0.0], [0.0, 1.0]], theta), theta) < 1e-12);
        }
    }

    #[test]
    fn projective_distance_wraps() {
        let c = Circle::new();
        assert!(c.distance(0.01, std::f64::consts::PI - 0.01) - 0.02 < 1e-12);
    }

    #[test]
    fn quasi_invariance_bounded_factor() {
        // transformed arc masses stay within a bounded, continuous factor
        let c = Circle::new();
        let g = Sl2Raw::new(2, 1, 1, 1).unwrap().to_float();
        let sample = c.sample(20_000, 3);
        let eps = 0.1;
        for center in [0.3f64, 1.2, 2.4] {
            let mass: f64 = sample
                .iter()
                .filter(|(p, _)| c.distance(p.as_angle().unwrap(), center) < eps)
                .map(|(_, w)| w)
                .sum();
            let image_center = c.act(&g, center);
            // image of the eps-arc under g
            let lo = c.act(&g, center - eps);
            let hi = c.act(&g, center + eps);
            let image_radius = c.distance(lo, image_center).max(c.distance(hi, image_center));
            let image_mass: f64 = sample
                .iter()
                .filter(|(p, _)| c.distance(p.as_angle().unwrap(), image_center) < image_radius)
                .map(|(_, w)| w)
                .sum();
            let factor = image_mass / mass;
            assert!(
                factor > 0.05 && factor < 20.0,
                "quasi-invariance factor {factor} out of range"
            );
        }
    }
}
