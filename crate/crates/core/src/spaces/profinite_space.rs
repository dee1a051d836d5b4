use super::{MeasureModel, Point};
use crate::freegroup::SubgroupChain;
use crate::Result;

/// A truncated profinite completion: the coset space of the deepest
/// level of a subgroup chain, metrized by the chain.
///
/// The metric is the one induced from the invariant group metric via the
/// infimum over lifts: two cosets are at distance `1/index_i` where `i`
/// is the coarsest level whose coset partition separates them (zero when
/// no given level does). Left translation permutes every level's coset
/// partition, so the metric is invariant under the action.
///
/// With the uniform probability measure, the open ball of radius
/// `1/index_i` around any point is exactly a level `i` fiber of mass
/// `1/index_i`, which gives local dimension one with coefficient one.
#[derive(Clone, Debug)]
pub struct ProfiniteSpace {
    degree: usize,
    indices: Vec<usize>,
    /// `level_coset[i][x]` is the level `i` coset of the deepest-level
    /// coset `x`.
    level_coset: Vec<Vec<usize>>,
}

impl ProfiniteSpace {
    pub fn from_chain(chain: &SubgroupChain) -> Result<Self> {
        let depth = chain.depth();
        let degree = chain.indices()[depth - 1];
        let mut level_coset = Vec::with_capacity(depth);
        for i in 0..depth {
            level_coset.push((0..degree).map(|x| chain.project(x, i)).collect());
        }
        Ok(ProfiniteSpace { degree, indices: chain.indices().to_vec(), level_coset })
    }

    pub fn size(&self) -> usize {
        self.degree
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn basepoint(&self) -> Point {
        Point::Index(0)
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        for (i, cosets) in self.level_coset.iter().enumerate() {
            if cosets[x] != cosets[y] {
                return 1.0 / self.indices[i] as f64;
            }
        }
        0.0
    }

    pub fn measure_model(&self) -> MeasureModel {
        MeasureModel {
            rho: 1.0,
            mass_coefficient: 1.0,
            epsilon_max: 1.0,
            uniformly_full_support: true,
            total_mass: 1.0,
            is_probability: true,
        }
    }

    pub fn sample(&self) -> Vec<(Point, f64)> {
        let w = 1.0 / self.degree as f64;
        (0..self.degree).map(|i| (Point::Index(i), w)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::{GroupHom, HomImages, ReducedWord};
    use crate::spaces::{ball_points, Space};

    fn chain() -> SubgroupChain {
        let lvl = |m: usize| {
            let s: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
            GroupHom::new(2, HomImages::Permutation { degree: m, gens: vec![s.clone(), s] }).unwrap()
        };
        SubgroupChain::new(vec![lvl(2), lvl(4), lvl(8)]).unwrap()
    }

    #[test]
    fn dyadic_ball_masses_match_reciprocal_indices() {
        let sp = ProfiniteSpace::from_chain(&chain()).unwrap();
        let space = Space::Profinite(sp);
        for (i, &idx) in [2usize, 4, 8].iter().enumerate() {
            let eps = 1.0 / idx as f64;
            let b = ball_points(&space, &Point::Index(3), eps, 0, 0).unwrap();
            assert!(
                (b.mass - eps).abs() < 1e-12,
                "level {i}: mass {} vs eps {eps}",
                b.mass
            );
        }
    }

    #[test]
    fn metric_is_invariant_under_translation() {
        let ch = chain();
        let sp = ProfiniteSpace::from_chain(&ch).unwrap();
        // left translation by a generator at the deepest level
        let tables = ch.level(2).letter_perms().unwrap();
        let g = &tables[0];
        for x in 0..sp.size() {
            for y in 0..sp.size() {
                assert_eq!(sp.distance(x, y), sp.distance(g[x], g[y]));
            }
        }
    }

    #[test]
    fn metric_realizes_infimum_over_lifts() {
        // brute force over short words: the distance between cosets u, v
        // equals the minimum chain distance d(g1, g2) over lifts with
        // g1 * base = u, g2 * base = v, here checked against d(e, w) for
        // words w moving the basepoint between the cosets.
        let ch = chain();
        let sp = ProfiniteSpace::from_chain(&ch).unwrap();
        let mut best = vec![f64::INFINITY; sp.size()];
        // enumerate words of length <= 8 and record chain distance to e
        let mut stack = vec![ReducedWord::identity(2)];
        let mut seen = std::collections::HashSet::new();
        while let Some(w) = stack.pop() {
            if w.len() > 8 || !seen.insert(w.letters().to_vec()) {
                continue;
            }
            let coset = ch.coset(&w, 2);
            let d = crate::freegroup::profinite_metric(&ReducedWord::identity(2), &w, &ch);
            if d.value < best[coset] {
                best[coset] = d.value;
            }
            for l in 0..4u8 {
                stack.push(w.mul(&ReducedWord::from_letters(2, [l]).unwrap()));
            }
        }
        for v in 0..sp.size() {
            assert!(
                (sp.distance(0, v) - best[v]).abs() < 1e-12,
                "coset {v}: induced {} vs infimum {}",
                sp.distance(0, v),
                best[v]
            );
        }
    }
}
