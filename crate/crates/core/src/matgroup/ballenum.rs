use rayon::prelude::*;

use super::Sl2Raw;
use crate::{Error, Result};

/// Exact enumeration of `{ g in SL2(Z) : |g|_F <= T }`.
///
/// Strategy: every coprime top row `(a, b)` with `a^2 + b^2 <= T^2`
/// determines the solution line `(c, d) = (c0 + k a, d0 + k b)` of
/// `a d - b c = 1`; the norm bound cuts an exact integer range of `k`.
/// Enumeration order is `(a, b, k)` lexicographic, so streams and dumps
/// are deterministic. Sharding for parallel folds is by `a`, merged in
/// `a` order.
#[derive(Clone, Copy, Debug)]
pub struct Sl2Ball {
    norm_bound: f64,
}

/// Integer threshold for `|g|_F <= T`: squared norms of integer matrices
/// are integers, and the nudge keeps `T = sqrt(n)` inclusive despite
/// float rounding. Shared with the brute-force oracle so both sides cut
/// the same set.
pub fn norm_sq_threshold(norm_bound: f64) -> i128 {
    (norm_bound * norm_bound + 1e-9).floor() as i128
}

fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Sl2Ball {
    pub fn new(norm_bound: f64) -> Result<Self> {
        if !norm_bound.is_finite() || norm_sq_threshold(norm_bound) < 2 {
            return Err(Error::Config(format!(
                "norm bound must be at least sqrt(2), got {norm_bound}"
            )));
        }
        Ok(Sl2Ball { norm_bound })
    }

    /// Ball at log-scale time `t`, i.e. norm bound `e^t`.
    pub fn at_log_time(t: f64) -> Result<Self> {
        Sl2Ball::new(t.exp())
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// The `k` range for a fixed coprime top row, from the exact integer
    /// norm condition; float roots are only used as a starting guess and
    /// are corrected by integer checks at the boundary.
    fn k_range(&self, a: i64, b: i64, t2: i128) -> Option<(i64, i64, i64, i64)> {
        let (g, x, y) = egcd(a, b);
        debug_assert_eq!(g.abs(), 1);
        // a*d0 - b*c0 = 1 with d0 = x/g-sign handling: egcd gives a x + b y = g
        let (x, y) = if g < 0 { (-x, -y) } else { (x, y) };
        let d0 = x;
        let c0 = -y;
        let s = a as i128 * a as i128 + b as i128 * b as i128;
        let norm2 = |k: i128| -> i128 {
            let c = c0 as i128 + k * a as i128;
            let d = d0 as i128 + k * b as i128;
            s + c * c + d * d
        };
        // float guess for the quadratic roots in k
        let p = (a as f64) * (c0 as f64) + (b as f64) * (d0 as f64);
        let sf = s as f64;
        let disc = p * p - sf * (sf + (c0 as f64).powi(2) + (d0 as f64).powi(2) - t2 as f64);
        if disc < -sf {
            return None;
        }
        let root = disc.max(0.0).sqrt();
        let mut lo = ((-p - root) / sf).floor() as i64 - 1;
        let mut hi = ((-p + root) / sf).ceil() as i64 + 1;
        while norm2(lo as i128) > t2 && lo <= hi {
            lo += 1;
        }
        while lo > i64::MIN && norm2((lo - 1) as i128) <= t2 {
            lo -= 1;
        }
        while norm2(hi as i128) > t2 && hi >= lo {
            hi -= 1;
        }
        while hi < i64::MAX && norm2((hi + 1) as i128) <= t2 {
            hi += 1;
        }
        if lo > hi {
            return None;
        }
        Some((lo, hi, c0, d0))
    }

    /// Exact cardinality of the ball; O(1) work per coprime top row.
    pub fn count(&self) -> u64 {
        let t2 = self.t2();
        let amax = self.norm_bound.floor() as i64;
        (-amax..=amax)
            .into_par_iter()
            .map(|a| {
                let mut total = 0u64;
                let bcap2 = t2 - (a as i128) * (a as i128);
                if bcap2 < 0 {
                    return 0;
                }
                let bmax = (bcap2 as f64).sqrt().floor() as i64 + 1;
                for b in -bmax..=bmax {
                    if (a as i128) * (a as i128) + (b as i128) * (b as i128) > t2 {
                        continue;
                    }
                    if gcd(a, b) != 1 {
                        continue;
                    }
                    if let Some((lo, hi, _, _)) = self.k_range(a, b, t2) {
                        total += (hi - lo + 1) as u64;
                    }
                }
                total
            })
            .sum()
    }

    fn t2(&self) -> i128 {
        norm_sq_threshold(self.norm_bound)
    }

    /// Parallel fold over the ball in deterministic shard order. The
    /// accumulator is produced per `a`-shard and merged in increasing
    /// `a`; results do not depend on thread count.
    pub fn fold<A, MK, V, MG>(&self, budget: u64, make: MK, visit: V, merge: MG) -> Result<A>
    where
        A: Send,
        MK: Fn() -> A + Sync,
        V: Fn(&mut A, Sl2Raw) + Sync,
        MG: Fn(&mut A, A),
    {
        let required = self.count() as u128;
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let t2 = self.t2();
        let amax = self.norm_bound.floor() as i64;
        let shards: Vec<A> = (-amax..=amax)
            .into_par_iter()
            .map(|a| {
                let mut acc = make();
                let bcap2 = t2 - (a as i128) * (a as i128);
                if bcap2 < 0 {
                    return acc;
                }
                let bmax = (bcap2 as f64).sqrt().floor() as i64 + 1;
                for b in -bmax..=bmax {
                    if (a as i128) * (a as i128) + (b as i128) * (b as i128) > t2 {
                        continue;
                    }
                    if gcd(a, b) != 1 {
                        continue;
                    }
                    if let Some((lo, hi, c0, d0)) = self.k_range(a, b, t2) {
                        for k in lo..=hi {
                            let g = Sl2Raw { a, b, c: c0 + k * a, d: d0 + k * b };
                            debug_assert_eq!(
                                g.a as i128 * g.d as i128 - g.b as i128 * g.c as i128,
                                1
                            );
                            visit(&mut acc, g);
                        }
                    }
                }
                acc
            })
            .collect();
        let mut out = make();
        for s in shards {
            merge(&mut out, s);
        }
        Ok(out)
    }

    /// Sequential visit in `(a, b, k)` order.
    pub fn visit(&self, budget: u64, mut f: impl FnMut(Sl2Raw)) -> Result<()> {
        let required = self.count() as u128;
        if required > budget as u128 {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let t2 = self.t2();
        let amax = self.norm_bound.floor() as i64;
        for a in -amax..=amax {
            let bcap2 = t2 - (a as i128) * (a as i128);
            if bcap2 < 0 {
                continue;
            }
            let bmax = (bcap2 as f64).sqrt().floor() as i64 + 1;
            for b in -bmax..=bmax {
                if (a as i128) * (a as i128) + (b as i128) * (b as i128) > t2 {
                    continue;
                }
                if gcd(a, b) != 1 {
                    continue;
                }
                if let Some((lo, hi, c0, d0)) = self.k_range(a, b, t2) {
                    for k in lo..=hi {
                        f(Sl2Raw { a, b, c: c0 + k * a, d: d0 + k * b });
                    }
                }
            }
        }
        Ok(())
    }

    /// Materialized elements in enumeration order.
    pub fn elements(&self, budget: u64) -> Result<Vec<Sl2Raw>> {
        let mut out = Vec::new();
        self.visit(budget, |g| out.push(g))?;
        Ok(out)
    }
}
