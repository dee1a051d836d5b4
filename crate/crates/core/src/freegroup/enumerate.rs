use rayon::prelude::*;

use super::word::{invert, Letter, ReducedWord};
use super::check_budget;
use crate::Result;

const NO_LETTER: Letter = 0xff;

/// Streaming enumeration of the sphere of radius `n`: every reduced word
/// of length exactly `n`, emitted once, in depth-first lexicographic
/// order with generator order `g1 < g1^-1 < g2 < ...`.
pub struct SphereIter {
    rank: usize,
    n: usize,
    /// Current path; empty until the first `next`.
    stack: Vec<Letter>,
    started: bool,
    done: bool,
}

impl SphereIter {
    pub fn new(rank: usize, n: usize, budget: u64) -> Result<Self> {
        check_budget(rank, n, budget)?;
        Ok(SphereIter { rank, n, stack: Vec::with_capacity(n), started: false, done: false })
    }

    fn first_allowed(&self, last: Letter) -> Option<Letter> {
        (0..(2 * self.rank) as Letter).find(|&l| last == NO_LETTER || l != invert(last))
    }

    fn next_allowed(&self, last: Letter, current: Letter) -> Option<Letter> {
        ((current + 1)..(2 * self.rank) as Letter).find(|&l| last == NO_LETTER || l != invert(last))
    }

    /// Descend with smallest allowed letters until the stack has length n.
    fn descend(&mut self) {
        while self.stack.len() < self.n {
            let last = self.stack.last().copied().unwrap_or(NO_LETTER);
            let l = self.first_allowed(last).expect("rank >= 2 always has an allowed letter");
            self.stack.push(l);
        }
    }
}

impl Iterator for SphereIter {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.descend();
            return Some(
                ReducedWord::from_letters(self.rank, self.stack.iter().copied())
                    .expect("letters in range"),
            );
        }
        if self.n == 0 {
            self.done = true;
            return None;
        }
        // Backtrack to the deepest position that can advance.
        loop {
            let Some(current) = self.stack.pop() else {
                self.done = true;
                return None;
            };
            let last = self.stack.last().copied().unwrap_or(NO_LETTER);
            if let Some(l) = self.next_allowed(last, current) {
                self.stack.push(l);
                self.descend();
                return Some(
                    ReducedWord::from_letters(self.rank, self.stack.iter().copied())
                        .expect("letters in range"),
                );
            }
        }
    }
}

/// A consumer of the depth-first walk over a word ball.
///
/// `apply` is the action of appending one letter on the right of the
/// current word; for averaging `f(w^-1 x)` over words `w` the caller
/// passes the inverse-letter action, since `(w l)^-1 x = l^-1 (w^-1 x)`.
///
/// `split` produces a fresh accumulator for a parallel shard and `merge`
/// folds shards back; the walk always merges in letter order, so results
/// are reproducible bit-for-bit regardless of thread count.
pub trait BallVisitor: Sized + Send + Sync {
    type Point: Clone + Send + Sync;

    fn apply(&self, letter: Letter, p: &Self::Point) -> Self::Point;
    fn visit(&mut self, depth: usize, p: &Self::Point);
    fn split(&self) -> Self;
    fn merge(&mut self, other: Self);
}

fn dfs<V: BallVisitor>(v: &mut V, rank: usize, radius: usize, p: &V::Point, last: Letter, depth: usize) {
    if depth == radius {
        return;
    }
    for l in 0..(2 * rank) as Letter {
        if last != NO_LETTER && l == invert(last) {
            continue;
        }
        let q = v.apply(l, p);
        v.visit(depth + 1, &q);
        dfs(v, rank, radius, &q, l, depth + 1);
    }
}

/// Walk every reduced word of length `<= radius` exactly once, feeding
/// the visitor the state reached by appending letters to the start
/// point. Subtrees below length-2 prefixes run in parallel.
pub fn walk_ball<V: BallVisitor>(
    rank: usize,
    radius: usize,
    budget: u64,
    start: V::Point,
    mut visitor: V,
) -> Result<V> {
    check_budget(rank, radius, budget)?;
    visitor.visit(0, &start);
    if radius == 0 {
        return Ok(visitor);
    }
    if radius == 1 {
        for l in 0..(2 * rank) as Letter {
            let q = visitor.apply(l, &start);
            visitor.visit(1, &q);
        }
        return Ok(visitor);
    }

    // Length-1 and length-2 prefixes visited up front, deeper subtrees
    // sharded by their length-2 prefix.
    let mut prefixes: Vec<(Letter, Letter, V::Point)> = Vec::new();
    for l1 in 0..(2 * rank) as Letter {
        let p1 = visitor.apply(l1, &start);
        visitor.visit(1, &p1);
        for l2 in 0..(2 * rank) as Letter {
            if l2 == invert(l1) {
                continue;
            }
            let p2 = visitor.apply(l2, &p1);
            visitor.visit(2, &p2);
            prefixes.push((l1, l2, p2));
        }
    }
    if radius == 2 {
        return Ok(visitor);
    }

    let shards: Vec<V> = prefixes
        .par_iter()
        .map(|(_, l2, p2)| {
            let mut shard = visitor.split();
            dfs(&mut shard, rank, radius, p2, *l2, 2);
            shard
        })
        .collect();
    for shard in shards {
        visitor.merge(shard);
    }
    Ok(visitor)
}

/// Convenience wrapper: per-depth compensated sums of `f` over the walk
/// states. Returns `sums[k] = sum over words of length k of f(state)`.
pub fn walk_ball_with<P, AF, F>(
    rank: usize,
    radius: usize,
    budget: u64,
    start: P,
    apply: AF,
    f: F,
) -> Result<Vec<f64>>
where
    P: Clone + Send + Sync,
    AF: Fn(Letter, &P) -> P + Sync + Send + Copy,
    F: Fn(&P) -> f64 + Sync + Send + Copy,
{
    struct SumVisitor<P, AF, F> {
        rank: usize,
        apply: AF,
        f: F,
        sums: Vec<NeumaierSum>,
        _marker: std::marker::PhantomData<P>,
    }
    impl<P, AF, F> BallVisitor for SumVisitor<P, AF, F>
    where
        P: Clone + Send + Sync,
        AF: Fn(Letter, &P) -> P + Sync + Send + Copy,
        F: Fn(&P) -> f64 + Sync + Send + Copy,
    {
        type Point = P;
        fn apply(&self, letter: Letter, p: &P) -> P {
            (self.apply)(letter, p)
        }
        fn visit(&mut self, depth: usize, p: &P) {
            self.sums[depth].add((self.f)(p));
        }
        fn split(&self) -> Self {
            SumVisitor {
                rank: self.rank,
                apply: self.apply,
                f: self.f,
                sums: vec![NeumaierSum::default(); self.sums.len()],
                _marker: std::marker::PhantomData,
            }
        }
        fn merge(&mut self, other: Self) {
            for (a, b) in self.sums.iter_mut().zip(other.sums) {
                a.add_sum(&b);
            }
        }
    }

    let v = SumVisitor {
        rank,
        apply,
        f,
        sums: vec![NeumaierSum::default(); radius + 1],
        _marker: std::marker::PhantomData,
    };
    let v = walk_ball(rank, radius, budget, start, v)?;
    Ok(v.sums.iter().map(|s| s.value()).collect())
}

/// Neumaier compensated summation; merge order is fixed by the walk, so
/// accumulated values are reproducible to the last bit.
#[derive(Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn add_sum(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact count of visits per depth (used to cross-check the closed form).
pub fn walk_count(rank: usize, radius: usize, budget: u64) -> Result<Vec<u64>> {
    struct CountVisitor {
        counts: Vec<u64>,
    }
    impl BallVisitor for CountVisitor {
        type Point = ();
        fn apply(&self, _: Letter, _: &()) {}
        fn visit(&mut self, depth: usize, _: &()) {
            self.counts[depth] += 1;
        }
        fn split(&self) -> Self {
            CountVisitor { counts: vec![0; self.counts.len()] }
        }
        fn merge(&mut self, other: Self) {
            for (a, b) in self.counts.iter_mut().zip(other.counts) {
                *a += b;
            }
        }
    }
    let v = walk_ball(rank, radius, budget, (), CountVisitor { counts: vec![0; radius + 1] })?;
    Ok(v.counts)
}

#[cfg(test)]
mod tests {
    use super::super::{ball_size, sphere_size};
    use super::*;

    #[test]
    fn sphere_iter_counts_and_order() {
        let words: Vec<_> = SphereIter::new(2, 3, 1_000_000).unwrap().collect();
        assert_eq!(words.len(), 36);
        // deterministic lexicographic order, all reduced, all distinct
        let mut sorted = words.clone();
        sorted.sort_by(|a, b| a.letters().cmp(b.letters()));
        assert_eq!(words, sorted);
        for w in &words {
            assert!(w.is_reduced());
            assert_eq!(w.len(), 3);
        }
        let set: std::collections::HashSet<_> = words.iter().map(|w| w.letters().to_vec()).collect();
        assert_eq!(set.len(), 36);
    }

    #[test]
    fn sphere_iter_identity() {
        let words: Vec<_> = SphereIter::new(2, 0, 10).unwrap().collect();
        assert_eq!(words.len(), 1);
        assert!(words[0].is_empty());
        let words: Vec<_> = SphereIter::new(2, 1, 10).unwrap().collect();
        assert_eq!(words.len(), 4);
    }

    #[test]
    fn walk_matches_closed_form() {
        for rank in [2usize, 3] {
            let counts = walk_count(rank, 6, 100_000_000).unwrap();
            for (k, &c) in counts.iter().enumerate() {
                assert_eq!(c as u128, sphere_size(rank, k), "rank {rank} depth {k}");
            }
        }
        assert_eq!(ball_size(2, 6) as u64, walk_count(2, 6, 1 << 30).unwrap().iter().sum::<u64>());
    }

    #[test]
    fn walk_sums_constant_function() {
        // f == 1 summed over the sphere gives the sphere size
        let sums = walk_ball_with(2, 5, 1 << 20, (), |_, _| (), |_| 1.0).unwrap();
        for (k, &s) in sums.iter().enumerate() {
            assert_eq!(s, sphere_size(2, k) as f64);
        }
    }
}
