use serde::{Deserialize, Serialize};

use super::{BallAverageSpec, GroupSource};
use crate::freegroup::ball_size;
use crate::matgroup::norm_sq_threshold;
use crate::spaces::{Point, Space};
use crate::{Error, Result};

/// A target set for orbit counting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum OrbitSet {
    /// Metric ball around a point.
    Ball { center: Point, radius: f64 },
    /// Annulus sector on the plane: radii in `[r_lo, r_hi]`, angle in
    /// `[phi_lo, phi_hi]`.
    Sector { r_lo: f64, r_hi: f64, phi_lo: f64, phi_hi: f64 },
    /// Explicit index set on a finite space.
    Indices(Vec<usize>),
}

impl OrbitSet {
    pub fn contains(&self, space: &Space, p: &Point) -> Result<bool> {
        match self {
            OrbitSet::Ball { center, radius } => Ok(space.distance(center, p)? < *radius),
            OrbitSet::Sector { r_lo, r_hi, phi_lo, phi_hi } => {
                let v = p.as_vec2()?;
                let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                let phi = v[1].atan2(v[0]).rem_euclid(std::f64::consts::TAU);
                Ok(r >= *r_lo && r <= *r_hi && phi >= *phi_lo && phi <= *phi_hi)
            }
            OrbitSet::Indices(set) => Ok(set.contains(&p.as_index()?)),
        }
    }

    /// Cardinality on a finite space.
    pub fn size_on(&self, space: &Space) -> Result<usize> {
        let n = match space {
            Space::Finite(f) => f.size(),
            Space::Profinite(p) => p.size(),
            _ => return Err(Error::Config("set size needs a finite space".into())),
        };
        let mut count = 0;
        for i in 0..n {
            if self.contains(space, &Point::Index(i))? {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// Orbit-count ratio data along a time grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RatioStat {
    /// `(t, hits of A1 from x1, hits of A2 from x2)`.
    pub counts: Vec<(f64, u64, u64)>,
    pub outcome: RatioOutcome,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioOutcome {
    Converged,
    /// The denominator set was never hit within the budget; reported,
    /// not an error.
    Inconclusive,
}

impl RatioStat {
    pub fn ratios(&self) -> Vec<(f64, f64)> {
        self.counts
            .iter()
            .filter(|&&(_, _, n2)| n2 > 0)
            .map(|&(t, n1, n2)| (t, n1 as f64 / n2 as f64))
            .collect()
    }
}

/// Exact orbit-count ratios `#\{g in B_t : g^-1 x1 in A1\}` over the
/// same count for `(x2, A2)`, by one enumeration of the largest ball.
pub fn ratio_statistic(
    spec: &BallAverageSpec,
    x1: &Point,
    x2: &Point,
    a1: &OrbitSet,
    a2: &OrbitSet,
    t_grid: &[f64],
) -> Result<RatioStat> {
    let mut sorted = t_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let counts = match &spec.source {
        GroupSource::Lattice { family, quotient } => {
            let thresholds: Vec<i128> =
                sorted.iter().map(|&t| norm_sq_threshold(t.exp())).collect();
            let ball = family.ball(*sorted.last().unwrap())?;
            let space = spec.space.clone();
            let q = quotient.clone();
            let per_bucket = ball.fold(
                spec.budget,
                || vec![(0u64, 0u64); sorted.len()],
                |acc, g| {
                    let gi = g.inverse();
                    let hit = |x: &Point, a: &OrbitSet| -> bool {
                        let ind = |p: &Point| -> f64 {
                            a.contains(&space, p).map(|b| if b { 1.0 } else { 0.0 }).unwrap_or(0.0)
                        };
                        // evaluate the indicator at g^-1 x via the space pairing
                        let v = match &space {
                            Space::Plane(_) => {
                                let w = crate::matgroup::mat2_apply(
                                    &gi.to_float(),
                                    &x.as_vec2().expect("plane point"),
                                );
                                ind(&Point::Vec2(w))
                            }
                            Space::Circle(c) => ind(&Point::Angle(
                                c.act(&gi.to_float(), x.as_angle().expect("angle")),
                            )),
                            Space::Finite(_) | Space::Profinite(_) => {
                                let qq = q.as_deref().expect("quotient reduction");
                                ind(&Point::Index(
                                    qq.mul(qq.reduce_raw(&gi), x.as_index().expect("index")),
                                ))
                            }
                            _ => 0.0,
                        };
                        v > 0.5
                    };
                    let bucket = thresholds.partition_point(|&th| th < g.norm_sq());
                    if bucket < acc.len() {
                        if hit(x1, a1) {
                            acc[bucket].0 += 1;
                        }
                        if hit(x2, a2) {
                            acc[bucket].1 += 1;
                        }
                    }
                },
                |a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        x.0 += y.0;
                        x.1 += y.1;
                    }
                },
            )?;
            let mut acc = (0u64, 0u64);
            sorted
                .iter()
                .zip(per_bucket)
                .map(|(&t, (h1, h2))| {
                    acc.0 += h1;
                    acc.1 += h2;
                    (t, acc.0, acc.1)
                })
                .collect::<Vec<_>>()
        }
        GroupSource::Words(hom) => {
            let radii: Vec<usize> = sorted
                .iter()
                .map(|&t| {
                    if t < 0.0 || t.fract() != 0.0 {
                        Err(Error::Config("word times must be integer radii".into()))
                    } else {
                        Ok(t as usize)
                    }
                })
                .collect::<Result<_>>()?;
            let max_radius = *radii.iter().max().unwrap();
            let op = super::FiniteWordOperator::new(hom, max_radius, spec.budget)?;
            let degree = match &spec.space {
                Space::Finite(f) => f.size(),
                Space::Profinite(p) => p.size(),
                _ => return Err(Error::Config("word ratios need a finite space".into())),
            };
            let ind = |a: &OrbitSet| -> Result<Vec<f64>> {
                (0..degree)
                    .map(|i| {
                        Ok(if a.contains(&spec.space, &Point::Index(i))? { 1.0 } else { 0.0 })
                    })
                    .collect()
            };
            let s1 = op.sphere_sums(&ind(a1)?);
            let s2 = op.sphere_sums(&ind(a2)?);
            let (i1, i2) = (x1.as_index()?, x2.as_index()?);
            radii
                .iter()
                .map(|&m| {
                    let n1: f64 = (0..=m).map(|k| s1[k][i1]).sum();
                    let n2: f64 = (0..=m).map(|k| s2[k][i2]).sum();
                    debug_assert!(n1.fract() == 0.0 && n2.fract() == 0.0);
                    let _ = ball_size(hom.rank(), m);
                    (m as f64, n1 as u64, n2 as u64)
                })
                .collect()
        }
    };
    let outcome = if counts.last().map(|&(_, _, n2)| n2 == 0).unwrap_or(true) {
        RatioOutcome::Inconclusive
    } else {
        RatioOutcome::Converged
    };
    Ok(RatioStat { counts, outcome })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::BallAverageSpec;
    use crate::freegroup::{GroupHom, HomImages};
    use crate::spaces::FiniteCoset;

    fn shift_spec(m: usize) -> BallAverageSpec {
        let shift: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
        let hom = GroupHom::new(
            2,
            HomImages::Permutation { degree: m, gens: vec![shift.clone(), shift] },
        )
        .unwrap();
        BallAverageSpec::words(Space::Finite(FiniteCoset::new(m).unwrap()), hom, 1 << 24)
    }

    #[test]
    fn identical_data_gives_ratio_one() {
        let spec = shift_spec(8);
        let a = OrbitSet::Indices(vec![0, 3]);
        let stat = ratio_statistic(
            &spec,
            &Point::Index(2),
            &Point::Index(2),
            &a,
            &a,
            &[0.0, 2.0, 4.0, 6.0],
        )
        .unwrap();
        assert_eq!(stat.outcome, RatioOutcome::Converged);
        for (t, r) in stat.ratios() {
            if t >= 2.0 {
                assert_eq!(r, 1.0);
            }
        }
    }

    #[test]
    fn counts_are_monotone_in_time() {
        let spec = shift_spec(6);
        let a1 = OrbitSet::Indices(vec![1]);
        let a2 = OrbitSet::Indices(vec![4]);
        let stat = ratio_statistic(
            &spec,
            &Point::Index(0),
            &Point::Index(0),
            &a1,
            &a2,
            &[1.0, 3.0, 5.0, 7.0],
        )
        .unwrap();
        for w in stat.counts.windows(2) {
            assert!(w[1].1 >= w[0].1);
            assert!(w[1].2 >= w[0].2);
        }
    }

    #[test]
    fn inconclusive_when_denominator_never_hit() {
        let spec = shift_spec(6);
        let a1 = OrbitSet::Indices(vec![1]);
        let a2 = OrbitSet::Indices(vec![]);
        let stat = ratio_statistic(
            &spec,
            &Point::Index(0),
            &Point::Index(0),
            &a1,
            &a2,
            &[1.0, 2.0],
        )
        .unwrap();
        assert_eq!(stat.outcome, RatioOutcome::Inconclusive);
        assert!(stat.ratios().is_empty());
    }
}
