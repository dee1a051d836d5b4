use crate::holder::TestFunction;
use crate::spaces::{Point, Space};
use crate::{Error, Result};

/// The operator ball averages converge to. Three concrete forms.
#[derive(Clone, Debug)]
pub enum LimitOperator {
    /// `f -> integral of f` against the space measure: the classical
    /// mean. Linear, positive, fixes constants.
    MeanProjection,
    /// The free-group even-ball limit: the mean plus an alternating
    /// correction `((r-1)/r) <f, f0> f0` when the even-word subgroup has
    /// two orbits. With `f0` absent this is the mean projection.
    FreeParity { rank: usize, f0: Option<Vec<f64>> },
    /// Infinite-measure limit: `f -> integral of f(y) H(y)^-alpha` with
    /// the archimedean height, carrying the basepoint factor
    /// `H(x)^-alpha`. Strictly positive weights on the support of `f`.
    DensityIntegral { alpha: f64 },
}

/// Apply a limit operator at a point. Finite spaces evaluate exactly;
/// continuous spaces use the deterministic quadrature with `quad_n`
/// nodes (ignored when the function carries an exact mean).
pub fn limit_apply(
    op: &LimitOperator,
    space: &Space,
    f: &TestFunction,
    x: &Point,
    quad_n: usize,
    seed: u64,
) -> Result<f64> {
    match op {
        LimitOperator::MeanProjection => mean_value(space, f, quad_n, seed),
        LimitOperator::FreeParity { rank, f0 } => {
            let mean = mean_value(space, f, quad_n, seed)?;
            match f0 {
                None => Ok(mean),
                Some(f0) => {
                    let degree = f0.len();
                    let sized = match space {
                        Space::Finite(fc) => fc.size(),
                        Space::Profinite(p) => p.size(),
                        _ => {
                            return Err(Error::Config(
                                "the parity correction needs a finite coset space".into(),
                            ))
                        }
                    };
                    if degree != sized {
                        return Err(Error::Config("parity vector size mismatch".into()));
                    }
                    let xi = x.as_index()?;
                    let inner: f64 = (0..degree)
                        .map(|i| f.eval(&Point::Index(i)) * f0[i])
                        .sum::<f64>()
                        / degree as f64;
                    let weight = (*rank as f64 - 1.0) / *rank as f64;
                    Ok(mean + weight * inner * f0[xi])
                }
            }
        }
        LimitOperator::DensityIntegral { alpha } => {
            let height_x = height(space, x)?;
            let mut acc = 0.0;
            for (p, w) in space.sample(quad_n, seed) {
                let v = f.eval(&p);
                if v != 0.0 {
                    let h = height(space, &p)?;
                    if h <= 0.0 {
                        return Err(Error::Config(
                            "density weight must be strictly positive on the support".into(),
                        ));
                    }
                    acc += v * h.powf(-alpha) * w;
                }
            }
            Ok(acc * height_x.powf(-alpha))
        }
    }
}

fn mean_value(space: &Space, f: &TestFunction, quad_n: usize, seed: u64) -> Result<f64> {
    if let Some(m) = f.exact_mean {
        return Ok(m);
    }
    let mut acc = 0.0;
    for (p, w) in space.sample(quad_n, seed) {
        acc += f.eval(&p) * w;
    }
    if !acc.is_finite() {
        return Err(Error::NonFinite("mean quadrature produced a non-finite value".into()));
    }
    Ok(acc)
}

/// The archimedean height of an orbit point: the Euclidean norm on the
/// plane.
fn height(space: &Space, p: &Point) -> Result<f64> {
    match space {
        Space::Plane(_) => {
            let v = p.as_vec2()?;
            Ok((v[0] * v[0] + v[1] * v[1]).sqrt())
        }
        other => Err(Error::Config(format!(
            "density integral heights are defined on the plane, not {}",
            other.kind_tag()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{GroupHom, HomImages};
    use crate::holder::{parity_vector, TestFunction};
    use crate::spaces::{FiniteCoset, PlaneAnnulus};

    #[test]
    fn mean_projection_of_constant() {
        let space = Space::Finite(FiniteCoset::new(9).unwrap());
        let f = TestFunction::constant(0.7, "c");
        let v = limit_apply(&LimitOperator::MeanProjection, &space, &f, &Point::Index(2), 0, 0)
            .unwrap();
        assert_eq!(v, 0.7);
    }

    #[test]
    fn parity_operator_on_its_own_vector() {
        let m = 6usize;
        let shift: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
        let hom = GroupHom::new(
            2,
            HomImages::Permutation { degree: m, gens: vec![shift.clone(), shift] },
        )
        .unwrap();
        let f0 = parity_vector(&hom).unwrap().unwrap();
        let space = Space::Finite(FiniteCoset::new(m).unwrap());
        let fvals = TestFunction::from_values(f0.clone(), "f0");
        let op = LimitOperator::FreeParity { rank: 2, f0: Some(f0.clone()) };
        for x in 0..m {
            let v = limit_apply(&op, &space, &fvals, &Point::Index(x), 0, 0).unwrap();
            // zero mean plus (r-1)/r with unit inner product
            assert!((v - 0.5 * f0[x]).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_absent_reduces_to_mean() {
        let space = Space::Finite(FiniteCoset::new(5).unwrap());
        let f = TestFunction::from_values(vec![0.0, 1.0, 2.0, 3.0, 4.0], "f");
        let a = limit_apply(&LimitOperator::FreeParity { rank: 2, f0: None }, &space, &f, &Point::Index(0), 0, 0)
            .unwrap();
        let b = limit_apply(&LimitOperator::MeanProjection, &space, &f, &Point::Index(0), 0, 0)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn density_integral_scales_with_basepoint() {
        let space = Space::Plane(PlaneAnnulus::new(4.0).unwrap());
        let f = crate::holder::make_bump(&space, Point::Vec2([2.0, 0.0]), 0.5, 1.0).unwrap();
        let op = LimitOperator::DensityIntegral { alpha: 1.0 };
        let x1 = Point::Vec2([1.0, 0.0]);
        let x2 = Point::Vec2([2.0, 0.0]);
        let v1 = limit_apply(&op, &space, &f, &x1, 100_000, 3).unwrap();
        let v2 = limit_apply(&op, &space, &f, &x2, 100_000, 3).unwrap();
        assert!(v1 > 0.0 && v2 > 0.0);
        assert!((v1 / v2 - 2.0).abs() < 1e-9);
    }
}
