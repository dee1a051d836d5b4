use super::hom::{GroupHom, HomImages};
use super::word::ReducedWord;
use crate::{Error, Result};

/// A decreasing chain of finite index subgroups, each represented by the
/// permutation action on its left coset space. Membership in level `i`
/// is the exact test "the image fixes the base coset".
///
/// The induced invariant metric is
/// `d(w1, w2) = max { 1/index_i : w1^-1 w2 not in level i }`,
/// which for a nested chain is realized at the first level left.
#[derive(Debug)]
pub struct SubgroupChain {
    levels: Vec<GroupHom>,
    indices: Vec<usize>,
    /// `proj[i][v]` maps a level `i+1` coset to its level `i` coset.
    proj: Vec<Vec<usize>>,
}

/// Outcome of a profinite distance computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfiniteDistance {
    /// The distance, zero when the two words agree at every given level.
    pub value: f64,
    /// First (coarsest) level where the words differ, if any.
    pub separating_level: Option<usize>,
    /// Number of levels consulted; distance zero only certifies equality
    /// down to this truncation depth.
    pub truncation_depth: usize,
}

impl SubgroupChain {
    /// Build and validate a chain. Each level must be a transitive
    /// permutation action, indices must be strictly increasing, and
    /// consecutive levels must be nested. Nestedness is checked exactly
    /// by a breadth-first search over the product action: the level
    /// `i+1` coset of a group element must determine its level `i`
    /// coset.
    pub fn new(levels: Vec<GroupHom>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Config("subgroup chain needs at least one level".into()));
        }
        let rank = levels[0].rank();
        let mut indices = Vec::with_capacity(levels.len());
        for hom in &levels {
            if hom.rank() != rank {
                return Err(Error::Config("all chain levels must share the rank".into()));
            }
            let HomImages::Permutation { degree, .. } = hom.images() else {
                return Err(Error::Config("chain levels must be permutation actions".into()));
            };
            indices.push(*degree);
        }
        for w in indices.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Config(format!(
                    "chain indices must strictly increase, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let mut proj = Vec::with_capacity(levels.len().saturating_sub(1));
        for i in 0..levels.len() - 1 {
            proj.push(nested_projection(&levels[i], &levels[i + 1])?);
        }
        Ok(SubgroupChain { levels, indices, proj })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn level(&self, i: usize) -> &GroupHom {
        &self.levels[i]
    }

    /// Map a deepest-level coset to its coset at level `i`.
    pub fn project(&self, deepest_coset: usize, i: usize) -> usize {
        let mut v = deepest_coset;
        for level in (i..self.levels.len() - 1).rev() {
            v = self.proj[level][v];
        }
        v
    }

    /// Exact membership of a word in the level `i` subgroup.
    pub fn member(&self, w: &ReducedWord, i: usize) -> bool {
        self.coset(w, i) == 0
    }

    /// Coset of a word at level `i` (image of the base coset).
    pub fn coset(&self, w: &ReducedWord, i: usize) -> usize {
        let tables = self.levels[i].letter_perms().expect("validated as permutations");
        let mut x = 0usize;
        for &l in w.letters() {
            x = tables[l as usize][x];
        }
        x
    }
}

/// BFS over the product of two coset actions starting at the pair of
/// base cosets. Returns the projection fine -> coarse when it is a
/// function; two pairs sharing the fine coset with different coarse
/// cosets witness a non-nested chain.
fn nested_projection(coarse: &GroupHom, fine: &GroupHom) -> Result<Vec<usize>> {
    let ct = coarse.letter_perms().expect("validated");
    let ft = fine.letter_perms().expect("validated");
    let (HomImages::Permutation { degree: cd, .. }, HomImages::Permutation { degree: fd, .. }) =
        (coarse.images(), fine.images())
    else {
        unreachable!()
    };
    const UNSEEN: usize = usize::MAX;
    let mut proj = vec![UNSEEN; *fd];
    let mut queue = std::collections::VecDeque::new();
    proj[0] = 0;
    queue.push_back((0usize, 0usize));
    let letters = ct.len();
    while let Some((u, v)) = queue.pop_front() {
        for l in 0..letters {
            let (nu, nv) = (ct[l][u], ft[l][v]);
            if proj[nv] == UNSEEN {
                proj[nv] = nu;
                queue.push_back((nu, nv));
            } else if proj[nv] != nu {
                return Err(Error::Config(format!(
                    "chain is not nested: fine coset {nv} reaches coarse cosets {} and {nu}",
                    proj[nv]
                )));
            }
        }
    }
    if proj.iter().any(|&p| p == UNSEEN) {
        return Err(Error::Config(
            "chain level action is not transitive on its coset space".into(),
        ));
    }
    let _ = cd;
    Ok(proj)
}

/// Distance in the invariant profinite metric truncated to the given
/// chain: the reciprocal index of the first level that separates the two
/// words, zero if no given level does.
pub fn profinite_metric(w1: &ReducedWord, w2: &ReducedWord, chain: &SubgroupChain) -> ProfiniteDistance {
    let gamma = w1.inverse().mul(w2);
    for i in 0..chain.depth() {
        if !chain.member(&gamma, i) {
            return ProfiniteDistance {
                value: 1.0 / chain.indices()[i] as f64,
                separating_level: Some(i),
                truncation_depth: chain.depth(),
            };
        }
    }
    ProfiniteDistance { value: 0.0, separating_level: None, truncation_depth: chain.depth() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegroup::ReducedWord;

    /// Chain Z/2 <- Z/4 via generator shifts: both free generators act as
    /// +1, so level subgroups are the words whose exponent sum vanishes
    /// mod 2 and mod 4.
    fn shift_chain() -> SubgroupChain {
        let lvl = |m: usize| {
            let s: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
            GroupHom::new(2, HomImages::Permutation { degree: m, gens: vec![s.clone(), s] }).unwrap()
        };
        SubgroupChain::new(vec![lvl(2), lvl(4)]).unwrap()
    }

    #[test]
    fn equal_words_have_distance_zero() {
        let chain = shift_chain();
        let w = ReducedWord::from_letters(2, [0, 2, 0]).unwrap();
        let d = profinite_metric(&w, &w, &chain);
        assert_eq!(d.value, 0.0);
        assert_eq!(d.truncation_depth, 2);
    }

    #[test]
    fn first_level_exit_gives_top_index() {
        let chain = shift_chain();
        let e = ReducedWord::identity(2);
        let a = ReducedWord::generator(2, 0); // exponent sum 1: leaves level 0
        let d = profinite_metric(&e, &a, &chain);
        assert_eq!(d.value, 0.5);
        assert_eq!(d.separating_level, Some(0));
    }

    #[test]
    fn second_level_separation() {
        let chain = shift_chain();
        let e = ReducedWord::identity(2);
        // a b: exponent sum 2, trivial mod 2 but not mod 4
        let ab = ReducedWord::from_letters(2, [0, 2]).unwrap();
        let d = profinite_metric(&e, &ab, &chain);
        assert_eq!(d.value, 0.25);
        assert_eq!(d.separating_level, Some(1));
    }

    #[test]
    fn metric_is_left_invariant() {
        let chain = shift_chain();
        let u = ReducedWord::from_letters(2, [0, 2]).unwrap();
        let v = ReducedWord::from_letters(2, [3, 1]).unwrap();
        let g = ReducedWord::from_letters(2, [2, 2, 1]).unwrap();
        let d0 = profinite_metric(&u, &v, &chain);
        let d1 = profinite_metric(&g.mul(&u), &g.mul(&v), &chain);
        assert_eq!(d0.value, d1.value);
    }

    #[test]
    fn non_nested_chain_rejected() {
        // level 0: generator a acts as the 2-cycle, b trivially;
        // level 1: a trivial, b a 4-cycle. The kernel conditions are
        // incompatible, so nestedness fails.
        let l0 = GroupHom::new(
            2,
            HomImages::Permutation { degree: 2, gens: vec![vec![1, 0], vec![0, 1]] },
        )
        .unwrap();
        let l1 = GroupHom::new(
            2,
            HomImages::Permutation {
                degree: 4,
                gens: vec![vec![0, 1, 2, 3], vec![1, 2, 3, 0]],
            },
        )
        .unwrap();
        let err = SubgroupChain::new(vec![l0, l1]).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn non_increasing_indices_rejected() {
        let lvl = |m: usize| {
            let s: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
            GroupHom::new(2, HomImages::Permutation { degree: m, gens: vec![s.clone(), s] }).unwrap()
        };
        assert!(SubgroupChain::new(vec![lvl(4), lvl(2)]).is_err());
    }
}
