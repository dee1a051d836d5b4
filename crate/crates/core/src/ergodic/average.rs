use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{BallAverageSpec, GroupSource};
use crate::freegroup::{ball_size, check_budget, walk_ball, BallVisitor, GroupHom, Letter};
use crate::holder::TestFunction;
use crate::matgroup::{CongruenceQuotient, Mat3, NormBallFamily, Normalization, Sl2Raw};
use crate::spaces::{Point, Space};
use crate::{Error, Result};

/// Closure of the generator images inside the symmetric group of the
/// coset space, with right-multiplication tables per letter. Word walks
/// track the image element by one table lookup per node, and averages
/// fold the per-element word counts against the function afterwards.
struct PermGroupClosure {
    perms: Vec<Vec<usize>>,
    inv_perms: Vec<Vec<usize>>,
    right_mul: Vec<Vec<usize>>,
    identity: usize,
}

const MAX_CLOSURE: usize = 20_000;

impl PermGroupClosure {
    fn new(letter_tables: &[Vec<usize>]) -> Result<Self> {
        let degree = letter_tables[0].len();
        let id: Vec<usize> = (0..degree).collect();
        let mut perms = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0usize)]);
        let mut right_mul: Vec<Vec<usize>> = vec![Vec::new(); letter_tables.len()];
        let mut frontier = vec![0usize];
        while let Some(g) = frontier.pop() {
            for (l, table) in letter_tables.iter().enumerate() {
                // (g * h_l)(x) = g(h_l(x))
                let prod: Vec<usize> = (0..degree).map(|x| perms[g][table[x]]).collect();
                let idx = match index.get(&prod) {
                    Some(&i) => i,
                    None => {
                        let i = perms.len();
                        if i >= MAX_CLOSURE {
                            return Err(Error::Config(format!(
                                "image group closure exceeds {MAX_CLOSURE} permutations"
                            )));
                        }
                        perms.push(prod.clone());
                        index.insert(prod, i);
                        frontier.push(i);
                        i
                    }
                };
                while right_mul[l].len() <= g {
                    right_mul[l].push(usize::MAX);
                }
                right_mul[l][g] = idx;
            }
        }
        for l in 0..letter_tables.len() {
            right_mul[l].resize(perms.len(), usize::MAX);
            for g in 0..perms.len() {
                if right_mul[l][g] == usize::MAX {
                    let prod: Vec<usize> =
                        (0..degree).map(|x| perms[g][letter_tables[l][x]]).collect();
                    right_mul[l][g] = index[&prod];
                }
            }
        }
        let inv_perms = perms
            .iter()
            .map(|p| {
                let mut inv = vec![0; p.len()];
                for (i, &pi) in p.iter().enumerate() {
                    inv[pi] = i;
                }
                inv
            })
            .collect();
        Ok(PermGroupClosure { perms, inv_perms, right_mul, identity: 0 })
    }

    fn len(&self) -> usize {
        self.perms.len()
    }
}

/// Word-count visitor over the image group: counts per depth and image
/// element, one right-multiplication lookup per walk node.
struct CountVisitor {
    right_mul: Arc<Vec<Vec<usize>>>,
    counts: Vec<Vec<u64>>,
}

impl BallVisitor for CountVisitor {
    type Point = usize;

    fn apply(&self, letter: Letter, g: &usize) -> usize {
        self.right_mul[letter as usize][*g]
    }

    fn visit(&mut self, depth: usize, g: &usize) {
        self.counts[depth][*g] += 1;
    }

    fn split(&self) -> Self {
        CountVisitor {
            right_mul: Arc::clone(&self.right_mul),
            counts: self.counts.iter().map(|c| vec![0; c.len()]).collect(),
        }
    }

    fn merge(&mut self, other: Self) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

/// Exact word-ball averaging operator on a finite coset space: the walk
/// enumerates every reduced word once, counting words per image group
/// element; averages for every point and radius are folded from the
/// counts.
pub struct FiniteWordOperator {
    rank: usize,
    degree: usize,
    max_radius: usize,
    closure: PermGroupClosure,
    /// `counts[k][g]`: reduced words of length `k` with image `g`.
    pub counts: Vec<Vec<u64>>,
}

impl FiniteWordOperator {
    pub fn new(hom: &GroupHom, max_radius: usize, budget: u64) -> Result<Self> {
        let tables = hom
            .letter_perms()
            .ok_or_else(|| Error::Config("finite word averaging needs a permutation action".into()))?;
        let degree = tables[0].len();
        let closure = PermGroupClosure::new(&tables)?;
        check_budget(hom.rank(), max_radius, budget)?;
        let right_mul = Arc::new(closure.right_mul.clone());
        let visitor = CountVisitor {
            right_mul: Arc::clone(&right_mul),
            counts: vec![vec![0; closure.len()]; max_radius + 1],
        };
        let visitor = walk_ball(hom.rank(), max_radius, budget, closure.identity, visitor)?;
        Ok(FiniteWordOperator {
            rank: hom.rank(),
            degree,
            max_radius,
            closure,
            counts: visitor.counts,
        })
    }

    pub fn max_radius(&self) -> usize {
        self.max_radius
    }

    /// Sphere sums `sum over words of length k of f(w^-1 x)` for every
    /// point `x`, from the image counts: `sum_g count[g] f(g^-1 x)`.
    pub fn sphere_sums(&self, f_values: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(f_values.len(), self.degree);
        (0..=self.max_radius)
            .map(|k| {
                let mut out = vec![0.0f64; self.degree];
                for (g, &c) in self.counts[k].iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let c = c as f64;
                    let inv = &self.closure.inv_perms[g];
                    for (x, o) in out.iter_mut().enumerate() {
                        *o += c * f_values[inv[x]];
                    }
                }
                out
            })
            .collect()
    }

    /// Exact sphere-sum operator matrix at radius `k`, row major:
    /// entry `(x, y)` counts the words `w` of length `k` with
    /// `w^-1 x = y` under the action. Integer-valued.
    pub fn operator_matrix(&self, k: usize) -> Vec<u64> {
        let d = self.degree;
        let mut out = vec![0u64; d * d];
        for (g, &c) in self.counts[k].iter().enumerate() {
            if c == 0 {
                continue;
            }
            let inv = &self.closure.inv_perms[g];
            for x in 0..d {
                out[x * d + inv[x]] += c;
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Word counts per image of a base point: entry `[k][y]` counts the
    /// words of length `k` whose image moves `base` to `y`. For a group
    /// acting on itself by left translation with `base` the identity,
    /// this is the count per group element.
    pub fn counts_by_image_of(&self, base: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0u64; self.degree]; self.max_radius + 1];
        for (g, perm) in self.closure.perms.iter().enumerate() {
            let target = perm[base];
            for (k, row) in out.iter_mut().enumerate() {
                row[target] += self.counts[k][g];
            }
        }
        out
    }

    /// Ball averages at every radius `m <= max_radius` and every point:
    /// cumulative sphere sums over the exact ball cardinality.
    pub fn ball_averages(&self, f_values: &[f64]) -> Vec<Vec<f64>> {
        let spheres = self.sphere_sums(f_values);
        let mut cumulative = vec![0.0f64; self.degree];
        let mut out = Vec::with_capacity(self.max_radius + 1);
        for (m, sphere) in spheres.iter().enumerate() {
            for (c, s) in cumulative.iter_mut().zip(sphere) {
                *c += s;
            }
            let v = ball_size(self.rank, m) as f64;
            out.push(cumulative.iter().map(|&s| s / v).collect());
        }
        out
    }
}

/// Per-depth sums of `f(w^-1 x)` over reduced words acting through
/// rotations, by the depth-first walk with incremental points.
pub fn sphere_word_sums(
    letter_mats: &[Mat3],
    x: [f64; 3],
    max_radius: usize,
    budget: u64,
    f: impl Fn(&[f64; 3]) -> f64 + Sync + Send + Copy,
) -> Result<Vec<f64>> {
    let rank = letter_mats.len() / 2;
    let mats: Vec<Mat3> = (0..letter_mats.len())
        .map(|l| letter_mats[l ^ 1]) // acting by the inverse letter
        .collect();
    let mats = &mats;
    crate::freegroup::walk_ball_with(
        rank,
        max_radius,
        budget,
        x,
        move |l: Letter, p: &[f64; 3]| crate::matgroup::mat3_apply(&mats[l as usize], p),
        f,
    )
}

fn word_radius(t: f64) -> Result<usize> {
    if t < 0.0 || t.fract() != 0.0 {
        return Err(Error::Config(format!(
            "word-ball time must be a nonnegative integer radius, got {t}"
        )));
    }
    Ok(t as usize)
}

fn normalization_value(
    normalization: &Normalization,
    source: &GroupSource,
    t: f64,
    cardinality: u64,
) -> f64 {
    let _ = source;
    normalization.value(t, cardinality)
}

/// Evaluate `f(g^-1 x)` for a lattice element against the concrete
/// space pairing.
fn lattice_orbit_eval(
    space: &Space,
    quotient: Option<&CongruenceQuotient>,
    f: &dyn Fn(&Point) -> f64,
    x: &Point,
    g: &Sl2Raw,
) -> f64 {
    let gi = g.inverse();
    match space {
        Space::Plane(_) => {
            let v = x.as_vec2().expect("plane point");
            let w = crate::matgroup::mat2_apply(&gi.to_float(), &v);
            f(&Point::Vec2(w))
        }
        Space::Circle(c) => {
            let a = x.as_angle().expect("circle point");
            f(&Point::Angle(c.act(&gi.to_float(), a)))
        }
        Space::DeSitter(ds) => {
            let v = x.as_vec3().expect("sheet point");
            let ad = crate::matgroup::adjoint_so21(&gi.to_float())
                .expect("unimodular")
                .as_mat3();
            f(&Point::Vec3(ds.act(&ad, &v)))
        }
        Space::Finite(_) | Space::Profinite(_) => {
            let q = quotient.expect("finite lattice action needs a congruence quotient");
            let xi = x.as_index().expect("coset point");
            f(&Point::Index(q.mul(q.reduce_raw(&gi), xi)))
        }
        Space::Sphere2(_) => f64::NAN,
    }
}

/// Exact ball average `(1/V(t)) sum over the ball of f(g^-1 x)`.
pub fn ball_average(spec: &BallAverageSpec, f: &TestFunction, x: &Point, t: f64) -> Result<f64> {
    let rows = batch_ball_averages(spec, f, std::slice::from_ref(x), &[t])?;
    Ok(rows[0][0])
}

/// Ball averages for a batch of points at every time in the grid;
/// returns `out[point][time]`. The group is enumerated exactly: once per
/// point for continuous orbits, once in total on finite coset spaces
/// (through the image-count fold), and once per point with per-depth
/// accumulation for word balls on the sphere.
pub fn batch_ball_averages(
    spec: &BallAverageSpec,
    f: &TestFunction,
    points: &[Point],
    t_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if t_grid.is_empty() || points.is_empty() {
        return Err(Error::Config("empty grid in ball averaging".into()));
    }
    let out = match &spec.source {
        GroupSource::Words(hom) => match &spec.space {
            Space::Finite(_) | Space::Profinite(_) => {
                let radii: Vec<usize> =
                    t_grid.iter().map(|&t| word_radius(t)).collect::<Result<_>>()?;
                let max_radius = *radii.iter().max().unwrap();
                let op = FiniteWordOperator::new(hom, max_radius, spec.budget)?;
                let degree = match &spec.space {
                    Space::Finite(fc) => fc.size(),
                    Space::Profinite(p) => p.size(),
                    _ => unreachable!(),
                };
                let values: Vec<f64> = (0..degree).map(|i| f.eval(&Point::Index(i))).collect();
                let averages = op.ball_averages(&values);
                points
                    .iter()
                    .map(|p| {
                        let i = p.as_index()?;
                        Ok(radii
                            .iter()
                            .map(|&m| {
                                let raw = averages[m][i];
                                let card = ball_size(hom.rank(), m) as u64;
                                raw * card as f64
                                    / normalization_value(
                                        &spec.normalization,
                                        &spec.source,
                                        m as f64,
                                        card,
                                    )
                            })
                            .collect())
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            Space::Sphere2(_) => {
                let mats = hom.letter_rotations().ok_or_else(|| {
                    Error::Config("sphere word averaging needs rotation images".into())
                })?;
                let radii: Vec<usize> =
                    t_grid.iter().map(|&t| word_radius(t)).collect::<Result<_>>()?;
                let max_radius = *radii.iter().max().unwrap();
                let eval = |p: &[f64; 3]| f.eval(&Point::Vec3(*p));
                points
                    .par_iter()
                    .map(|p| {
                        let v = p.as_vec3()?;
                        let sums = sphere_word_sums(&mats, v, max_radius, spec.budget, &eval)?;
                        let mut cumulative = Vec::with_capacity(max_radius + 1);
                        let mut acc = 0.0;
                        for s in &sums {
                            acc += s;
                            cumulative.push(acc);
                        }
                        Ok(radii
                            .iter()
                            .map(|&m| {
                                let card = ball_size(hom.rank(), m) as u64;
                                cumulative[m]
                                    / normalization_value(
                                        &spec.normalization,
                                        &spec.source,
                                        m as f64,
                                        card,
                                    )
                            })
                            .collect())
                    })
                    .collect::<Result<Vec<_>>>()?
            }
            other => {
                return Err(Error::Config(format!(
                    "word balls do not act on space {}",
                    other.kind_tag()
                )))
            }
        },
        GroupSource::Lattice { family, quotient } => {
            lattice_batch(spec, family, quotient.as_deref(), f, points, t_grid)?
        }
    };
    for row in &out {
        for &v in row {
            if !v.is_finite() {
                return Err(Error::NonFinite(
                    "ball average produced a non-finite value".into(),
                ));
            }
        }
    }
    Ok(out)
}

/// Lattice-ball averages: one enumeration of the largest ball per point,
/// bucketed by the first time-grid entry containing each element.
fn lattice_batch(
    spec: &BallAverageSpec,
    family: &NormBallFamily,
    quotient: Option<&CongruenceQuotient>,
    f: &TestFunction,
    points: &[Point],
    t_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let mut sorted: Vec<f64> = t_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t_max = *sorted.last().unwrap();
    let ball = family.ball(t_max)?;
    let thresholds: Vec<i128> = sorted
        .iter()
        .map(|&t| crate::matgroup::norm_sq_threshold(t.exp()))
        .collect();
    let counts = cumulative_counts(family, &sorted)?;

    points
        .par_iter()
        .map(|x| {
            let evalf = |p: &Point| f.eval(p);
            let sums = ball.fold(
                spec.budget,
                || vec![(0.0f64, 0.0f64); sorted.len()],
                |acc, g| {
                    let v = lattice_orbit_eval(&spec.space, quotient, &evalf, x, &g);
                    let ns = g.norm_sq();
                    let bucket = thresholds.partition_point(|&th| th < ns);
                    if bucket < acc.len() {
                        // Neumaier add into the bucket
                        let (s, c) = acc[bucket];
                        let t = s + v;
                        let comp = if s.abs() >= v.abs() { (s - t) + v } else { (v - t) + s };
                        acc[bucket] = (t, c + comp);
                    }
                },
                |a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        let (s, c) = *x;
                        let t = s + y.0;
                        let comp = if s.abs() >= y.0.abs() { (s - t) + y.0 } else { (y.0 - t) + s };
                        *x = (t, c + comp + y.1);
                    }
                },
            )?;
            let mut acc = 0.0;
            let mut per_sorted = Vec::with_capacity(sorted.len());
            for (i, &(s, c)) in sums.iter().enumerate() {
                acc += s + c;
                let v = spec.normalization.value(sorted[i], counts[i]);
                per_sorted.push(acc / v);
            }
            // map back to the caller's grid order
            Ok(t_grid
                .iter()
                .map(|t| {
                    let i = sorted.iter().position(|s| s == t).unwrap();
                    per_sorted[i]
                })
                .collect())
        })
        .collect()
}

/// Exact ball cardinalities along an ascending time grid.
fn cumulative_counts(family: &NormBallFamily, sorted: &[f64]) -> Result<Vec<u64>> {
    sorted.iter().map(|&t| Ok(family.ball(t)?.count())).collect()
}

/// The mass-bound audit: normalized measure of
/// `{ g in B_t : g^-1 y inside the filtration piece }`. Exactly one on
/// compact spaces with the cardinality normalization.
pub fn mass_bound(spec: &BallAverageSpec, y: &Point, t: f64) -> Result<f64> {
    match &spec.source {
        GroupSource::Words(hom) => {
            let m = word_radius(t)?;
            // compact coset spaces and the sphere: every element returns
            // the point into the space
            let card = ball_size(hom.rank(), m) as u64;
            let inside = match &spec.space {
                Space::Finite(_) | Space::Profinite(_) | Space::Sphere2(_) => card as f64,
                other => {
                    return Err(Error::Config(format!(
                        "word mass bound undefined on {}",
                        other.kind_tag()
                    )))
                }
            };
            Ok(inside / spec.normalization.value(m as f64, card))
        }
        GroupSource::Lattice { family, quotient } => {
            let ball = family.ball(t)?;
            let count = ball.count();
            let space = spec.space.clone();
            let q = quotient.clone();
            let inside = ball.fold(
                spec.budget,
                || 0u64,
                |acc, g| {
                    let ind = |p: &Point| -> f64 {
                        match space.in_filtration(p) {
                            Ok(true) => 1.0,
                            _ => 0.0,
                        }
                    };
                    if lattice_orbit_eval(&space, q.as_deref(), &ind, y, &g) > 0.5 {
                        *acc += 1;
                    }
                },
                |a, b| *a += b,
            )?;
            Ok(inside as f64 / spec.normalization.value(t, count))
        }
    }
}
