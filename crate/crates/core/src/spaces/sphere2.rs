use super::{MeasureModel, Point};
use crate::sampler::kronecker_2d;

/// The unit sphere in 3-space with the geodesic metric and the
/// rotation-invariant probability measure. Compact: the filtration is
/// the whole sphere.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sphere2;

impl Sphere2 {
    pub fn new() -> Self {
        Sphere2
    }

    pub fn basepoint(&self) -> Point {
        Point::Vec3([0.0, 0.0, 1.0])
    }

    pub fn distance(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        dot.clamp(-1.0, 1.0).acos()
    }

    /// `1 - cos(eps) >= 2 eps^2 / pi^2` on `(0, pi]` gives the certified
    /// cap-mass bound `mass >= eps^2 / pi^2`.
    pub fn measure_model(&self) -> MeasureModel {
        MeasureModel {
            rho: 2.0,
            mass_coefficient: 1.0 / (std::f64::consts::PI * std::f64::consts::PI),
            epsilon_max: 1.0,
            uniformly_full_support: true,
            total_mass: 1.0,
            is_probability: true,
        }
    }

    /// Area-preserving map of the unit square onto the sphere applied to
    /// a 2D low-discrepancy sequence; weights are uniform.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(Point, f64)> {
        let w = 1.0 / n as f64;
        kronecker_2d(n, seed)
            .into_iter()
            .map(|[u, v]| {
                let z = 2.0 * u - 1.0;
                let phi = std::f64::consts::TAU * v;
                let r = (1.0 - z * z).max(0.0).sqrt();
                (Point::Vec3([r * phi.cos(), r * phi.sin(), z]), w)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_points_lie_on_sphere() {
        let s = Sphere2::new();
        for (p, _) in s.sample(500, 1) {
            let v = p.as_vec3().unwrap();
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_is_geodesic() {
        let s = Sphere2::new();
        let north = [0.0, 0.0, 1.0];
        let south = [0.0, 0.0, -1.0];
        let equator = [1.0, 0.0, 0.0];
        assert!((s.distance(&north, &south) - std::f64::consts::PI).abs() < 1e-12);
        assert!((s.distance(&north, &equator) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn empirical_cap_mass_respects_certificate() {
        let s = Sphere2::new();
        let model = s.measure_model();
        let sample = s.sample(40_000, 5);
        for eps in [0.25f64, 0.5, 1.0] {
            let mass: f64 = sample
                .iter()
                .filter(|(p, _)| s.distance(&p.as_vec3().unwrap(), &[0.0, 0.0, 1.0]) < eps)
                .map(|(_, w)| w)
                .sum();
            assert!(
                mass >= 0.5 * model.mass_coefficient * eps.powf(model.rho),
                "cap mass {mass} under certificate at eps {eps}"
            );
        }
    }
}
