//! Concrete metric measure spaces carrying the group actions: the unit
//! sphere under rotations, the boundary circle under fractional-linear
//! maps, the punctured plane under linear maps, the invariant sheet of
//! `x^2 + y^2 - z^2 = -1`, finite coset spaces and truncated profinite
//! completions.
//!
//! Every space fixes a basepoint and a filtration `X_r` by metric balls
//! around it; compact spaces use a radius that already covers
//! everything. Measure models certify a ball-mass lower bound
//! `mass(B_eps(x)) >= m_r * eps^rho` analytically; sampling only audits
//! the certificate.

mod circle;
mod desitter;
mod finite;
mod plane;
mod profinite_space;
mod sphere2;

pub use circle::Circle;
pub use desitter::DeSitterSheet;
pub use finite::FiniteCoset;
pub use plane::PlaneAnnulus;
pub use profinite_space::ProfiniteSpace;
pub use sphere2::Sphere2;

use serde::{Deserialize, Serialize};

use crate::matgroup::{mat3_apply, Mat2f, Mat3, Sl2Raw};
use crate::{Error, Result};

/// A point of one of the concrete spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    /// Unit 3-vector (sphere) or a point on the de Sitter quadric sheet.
    Vec3([f64; 3]),
    /// Projective angle in `[0, pi)`.
    Angle(f64),
    /// Plane point, never the origin.
    Vec2([f64; 2]),
    /// Index into a finite coset space.
    Index(usize),
}

impl Point {
    pub fn as_vec3(&self) -> Result<[f64; 3]> {
        match self {
            Point::Vec3(v) => Ok(*v),
            _ => Err(Error::Config("expected a 3-vector point".into())),
        }
    }

    pub fn as_vec2(&self) -> Result<[f64; 2]> {
        match self {
            Point::Vec2(v) => Ok(*v),
            _ => Err(Error::Config("expected a plane point".into())),
        }
    }

    pub fn as_angle(&self) -> Result<f64> {
        match self {
            Point::Angle(a) => Ok(*a),
            _ => Err(Error::Config("expected an angle point".into())),
        }
    }

    pub fn as_index(&self) -> Result<usize> {
        match self {
            Point::Index(i) => Ok(*i),
            _ => Err(Error::Config("expected a coset index point".into())),
        }
    }
}

/// A group element paired with [`Space::act`]. Hot loops bypass this
/// enum and use the typed per-space actions directly.
#[derive(Clone, Debug)]
pub enum GroupElement {
    Rotation3(Mat3),
    Sl2(Sl2Raw),
    Sl2Float(Mat2f),
    Lorentz(Mat3),
    Permutation(Vec<usize>),
}

/// Analytic measure certificate for a space filtration piece.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureModel {
    /// Local dimension: `mass(B_eps(x)) >= mass_coefficient * eps^rho`.
    pub rho: f64,
    pub mass_coefficient: f64,
    /// Largest epsilon the certificate is stated for.
    pub epsilon_max: f64,
    pub uniformly_full_support: bool,
    /// Measure of `X_r` (1 for probability spaces).
    pub total_mass: f64,
    pub is_probability: bool,
}

/// Weighted sample of a metric ball.
#[derive(Clone, Debug)]
pub struct BallSample {
    pub points: Vec<(Point, f64)>,
    /// Empirical mass: sum of the weights.
    pub mass: f64,
}

/// One of the concrete spaces.
#[derive(Clone, Debug)]
pub enum Space {
    Sphere2(Sphere2),
    Circle(Circle),
    Plane(PlaneAnnulus),
    DeSitter(DeSitterSheet),
    Finite(FiniteCoset),
    Profinite(ProfiniteSpace),
}

impl Space {
    pub fn kind_tag(&self) -> &'static str {
        match self {
            Space::Sphere2(_) => "sphere2",
            Space::Circle(_) => "circle",
            Space::Plane(_) => "plane_annulus",
            Space::DeSitter(_) => "desitter_sheet",
            Space::Finite(_) => "finite_coset",
            Space::Profinite(_) => "profinite_level",
        }
    }

    pub fn basepoint(&self) -> Point {
        match self {
            Space::Sphere2(s) => s.basepoint(),
            Space::Circle(s) => s.basepoint(),
            Space::Plane(s) => s.basepoint(),
            Space::DeSitter(s) => s.basepoint(),
            Space::Finite(s) => s.basepoint(),
            Space::Profinite(s) => s.basepoint(),
        }
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        match self {
            Space::Sphere2(s) => Ok(s.distance(&x.as_vec3()?, &y.as_vec3()?)),
            Space::Circle(s) => Ok(s.distance(x.as_angle()?, y.as_angle()?)),
            Space::Plane(s) => Ok(s.distance(&x.as_vec2()?, &y.as_vec2()?)),
            Space::DeSitter(s) => Ok(s.distance(&x.as_vec3()?, &y.as_vec3()?)),
            Space::Finite(s) => Ok(s.distance(x.as_index()?, y.as_index()?)),
            Space::Profinite(s) => Ok(s.distance(x.as_index()?, y.as_index()?)),
        }
    }

    /// Membership in the filtration piece `X_r`.
    pub fn in_filtration(&self, x: &Point) -> Result<bool> {
        match self {
            Space::Plane(s) => Ok(s.in_annulus(&x.as_vec2()?)),
            Space::DeSitter(s) => Ok(s.in_ball(&x.as_vec3()?)),
            _ => Ok(true),
        }
    }

    pub fn filtration_radius(&self) -> f64 {
        match self {
            Space::Sphere2(_) => std::f64::consts::PI,
            Space::Circle(_) => std::f64::consts::FRAC_PI_2,
            Space::Plane(s) => s.radius(),
            Space::DeSitter(s) => s.radius(),
            Space::Finite(_) | Space::Profinite(_) => 1.0,
        }
    }

    pub fn measure_model(&self) -> MeasureModel {
        match self {
            Space::Sphere2(s) => s.measure_model(),
            Space::Circle(s) => s.measure_model(),
            Space::Plane(s) => s.measure_model(),
            Space::DeSitter(s) => s.measure_model(),
            Space::Finite(s) => s.measure_model(),
            Space::Profinite(s) => s.measure_model(),
        }
    }

    /// Flag for spaces whose action is isometric for the stated metric.
    pub fn is_isometric(&self) -> bool {
        matches!(
            self,
            Space::Sphere2(_) | Space::DeSitter(_) | Space::Finite(_) | Space::Profinite(_)
        )
    }

    /// Deterministic weighted sample of `X_r`; weights sum to the total
    /// mass of the measure model. Finite spaces enumerate exactly.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<(Point, f64)> {
        match self {
            Space::Sphere2(s) => s.sample(n, seed),
            Space::Circle(s) => s.sample(n, seed),
            Space::Plane(s) => s.sample(n, seed),
            Space::DeSitter(s) => s.sample(n, seed),
            Space::Finite(s) => s.sample(),
            Space::Profinite(s) => s.sample(),
        }
    }

    /// Point grid for sup-norm audits (unweighted).
    pub fn grid(&self, n: usize, seed: u64) -> Vec<Point> {
        self.sample(n, seed).into_iter().map(|(p, _)| p).collect()
    }

    /// Apply a group element; errors on a group/space type mismatch.
    pub fn act(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        match (self, g) {
            (Space::Sphere2(_), GroupElement::Rotation3(m)) => {
                Ok(Point::Vec3(mat3_apply(m, &x.as_vec3()?)))
            }
            (Space::Circle(s), GroupElement::Sl2(g)) => {
                Ok(Point::Angle(s.act(&g.to_float(), x.as_angle()?)))
            }
            (Space::Circle(s), GroupElement::Sl2Float(m)) => {
                Ok(Point::Angle(s.act(m, x.as_angle()?)))
            }
            (Space::Plane(_), GroupElement::Sl2(g)) => {
                Ok(Point::Vec2(crate::matgroup::mat2_apply(&g.to_float(), &x.as_vec2()?)))
            }
            (Space::Plane(_), GroupElement::Sl2Float(m)) => {
                Ok(Point::Vec2(crate::matgroup::mat2_apply(m, &x.as_vec2()?)))
            }
            (Space::DeSitter(s), GroupElement::Lorentz(m)) => {
                Ok(Point::Vec3(s.act(m, &x.as_vec3()?)))
            }
            (Space::Finite(_), GroupElement::Permutation(p)) => {
                let i = x.as_index()?;
                if i >= p.len() {
                    return Err(Error::Config("point outside permutation degree".into()));
                }
                Ok(Point::Index(p[i]))
            }
            (Space::Profinite(_), GroupElement::Permutation(p)) => {
                let i = x.as_index()?;
                if i >= p.len() {
                    return Err(Error::Config("point outside permutation degree".into()));
                }
                Ok(Point::Index(p[i]))
            }
            _ => Err(Error::Config(format!(
                "group element {g:?} cannot act on space {}",
                self.kind_tag()
            ))),
        }
    }
}

/// Weighted sample of the open metric ball of radius `eps` at `x`.
///
/// Discrete spaces enumerate the ball exactly; continuous spaces filter
/// the deterministic sample. The open-ball convention `d < eps` matches
/// the dyadic mass identities of the profinite metric and agrees with
/// the closed ball up to measure zero everywhere else.
pub fn ball_points(space: &Space, x: &Point, eps: f64, n: usize, seed: u64) -> Result<BallSample> {
    if eps <= 0.0 {
        return Err(Error::Config("ball radius must be positive".into()));
    }
    let sample = space.sample(n, seed);
    let mut points = Vec::new();
    let mut mass = 0.0;
    for (p, w) in sample {
        if space.distance(x, &p)? < eps {
            mass += w;
            points.push((p, w));
        }
    }
    if points.is_empty() {
        return Err(Error::Resolution(format!(
            "no sample points within {eps} of the center; sampler resolution too coarse"
        )));
    }
    Ok(BallSample { points, mass })
}

/// Report of a local-dimension audit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DimensionCertificate {
    /// Smallest exponent on the candidate grid with no decay trend.
    pub rho: f64,
    /// Realized coefficient: min over the grid of `mass / eps^rho`.
    pub mass_coefficient: f64,
    /// Fitted slope of `log min-mass` against `log eps`.
    pub slope: f64,
    /// Worst `(eps, mass)` pairs when every candidate fails.
    pub violations: Vec<(f64, f64)>,
}

/// Audit the ball-mass lower bound on an `(x, eps)` grid and return the
/// smallest exponent from `rho_grid` for which `mass / eps^rho` shows no
/// decay toward small scales, with the realized coefficient.
pub fn local_dimension_certificate(
    space: &Space,
    eps_grid: &[f64],
    rho_grid: &[f64],
    centers: usize,
    n: usize,
    seed: u64,
) -> Result<DimensionCertificate> {
    if eps_grid.len() < 2 {
        return Err(Error::Config("need at least two epsilon values".into()));
    }
    let xs = space.grid(centers, seed ^ 0x5ca1e);
    let mut min_mass: Vec<f64> = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let mut worst = f64::INFINITY;
        for x in &xs {
            let mass = ball_points(space, x, eps, n, seed)?.mass;
            worst = worst.min(mass);
        }
        if worst <= 0.0 {
            return Err(Error::CertificateViolation(format!(
                "empty ball mass at eps {eps}: measure is not of full support on the grid"
            )));
        }
        min_mass.push(worst);
    }
    // slope of log(min mass) against log(eps)
    let logs: Vec<(f64, f64)> =
        eps_grid.iter().zip(&min_mass).map(|(&e, &m)| (e.ln(), m.ln())).collect();
    let n_pts = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n_pts;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n_pts;
    let slope = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum::<f64>()
        / logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum::<f64>();

    let (i_min, i_max) = {
        let mut lo = 0;
        let mut hi = 0;
        for (i, &e) in eps_grid.iter().enumerate() {
            if e < eps_grid[lo] {
                lo = i;
            }
            if e > eps_grid[hi] {
                hi = i;
            }
        }
        (lo, hi)
    };
    let mut sorted_rho: Vec<f64> = rho_grid.to_vec();
    sorted_rho.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &rho in &sorted_rho {
        let at_small = min_mass[i_min] / eps_grid[i_min].powf(rho);
        let at_large = min_mass[i_max] / eps_grid[i_max].powf(rho);
        if at_small >= 0.7 * at_large {
            let m_r = eps_grid
                .iter()
                .zip(&min_mass)
                .map(|(&e, &m)| m / e.powf(rho))
                .fold(f64::INFINITY, f64::min);
            return Ok(DimensionCertificate { rho, mass_coefficient: m_r, slope, violations: vec![] });
        }
    }
    Ok(DimensionCertificate {
        rho: f64::INFINITY,
        mass_coefficient: 0.0,
        slope,
        violations: eps_grid.iter().copied().zip(min_mass).collect(),
    })
}
