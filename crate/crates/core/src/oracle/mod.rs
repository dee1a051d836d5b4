//! Brute-force and dense linear-algebra reference implementations.
//!
//! Everything here recomputes quantities of the production paths by
//! independent means: letter-string filtering and odometer word lists
//! against the depth-first walk, entry scans against the top-row ball
//! enumeration, and eigendecomposition of the generator-average operator
//! against enumerated averages on finite quotients. Oracles are run by
//! tests and the `oracle` CLI subcommand, never by experiments.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::freegroup::{ball_size, GroupHom, HomImages, Letter, ReducedWord};
use crate::matgroup::{norm_sq_threshold, Sl2Raw};
use crate::{Error, Result};

/// All reduced words of length exactly `n`, found by filtering every
/// length-`n` letter string for reducedness. Exponential; small `n` only.
pub fn sphere_words_by_filter(rank: usize, n: usize) -> Vec<ReducedWord> {
    let letters = (2 * rank) as u64;
    let total = letters.pow(n as u32);
    let mut out = Vec::new();
    'outer: for code in 0..total {
        let mut c = code;
        let mut word = Vec::with_capacity(n);
        for _ in 0..n {
            let l = (c % letters) as Letter;
            c /= letters;
            if let Some(&prev) = word.last() {
                if l == prev ^ 1 {
                    continue 'outer;
                }
            }
            word.push(l);
        }
        // decoding ran least-significant first; reversing gives the
        // lexicographic reading and preserves reducedness
        word.reverse();
        out.push(ReducedWord::from_letters(rank, word).expect("letters in range"));
    }
    out
}

/// Streaming word list of the sphere of radius `n` via an arithmetic
/// odometer over digit vectors: the first digit picks any letter, later
/// digits pick among the `2r - 1` letters that do not cancel. Emits in
/// lexicographic letter order; mechanism independent of the depth-first
/// walk.
pub fn for_each_word(rank: usize, n: usize, mut visit: impl FnMut(&[Letter])) {
    if n == 0 {
        visit(&[]);
        return;
    }
    let base = 2 * rank;
    let mut digits = vec![0usize; n];
    let mut letters = vec![0 as Letter; n];
    loop {
        // decode digits to letters
        letters[0] = digits[0] as Letter;
        for i in 1..n {
            let forbidden = letters[i - 1] ^ 1;
            let cand = digits[i] as Letter;
            letters[i] = if cand < forbidden { cand } else { cand + 1 };
        }
        visit(&letters);
        // increment: last digit fastest
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            let cap = if i == 0 { base } else { base - 1 };
            digits[i] += 1;
            if digits[i] < cap {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Materialized ball word lists `S_0, ..., S_n` by level-by-level
/// extension. A third independent mechanism, for small radii.
pub fn word_list_ball(rank: usize, n: usize) -> Vec<Vec<Vec<Letter>>> {
    let mut levels: Vec<Vec<Vec<Letter>>> = vec![vec![vec![]]];
    for _ in 1..=n {
        let prev = levels.last().unwrap();
        let mut next = Vec::new();
        for w in prev {
            for l in 0..(2 * rank) as Letter {
                if let Some(&last) = w.last() {
                    if l == last ^ 1 {
                        continue;
                    }
                }
                let mut ext = w.clone();
                ext.push(l);
                next.push(ext);
            }
        }
        levels.push(next);
    }
    levels
}

/// Brute-force SL2(Z) ball: scan every integer matrix with entries
/// bounded by the norm, keep determinant one and Frobenius norm within
/// the threshold. Sorted in `(a, b, c, d)` order.
pub fn sl2_entry_scan(norm_bound: f64) -> Vec<Sl2Raw> {
    let t2 = norm_sq_threshold(norm_bound);
    let cap = norm_bound.floor() as i64;
    let mut out = Vec::new();
    for a in -cap..=cap {
        for b in -cap..=cap {
            for c in -cap..=cap {
                for d in -cap..=cap {
                    if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
                        continue;
                    }
                    let g = Sl2Raw { a, b, c, d };
                    if g.norm_sq() <= t2 {
                        out.push(g);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Dense spectral data of the generator-average operator of a finite
/// quotient action: `A = (1/2r) sum over letters of the permutation
/// matrix`. Symmetric because the letter set is closed under inverses.
pub struct QuotientSpectrum {
    pub rank: usize,
    pub size: usize,
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, column `i` for `eigenvalues[i]`,
    /// in the counting inner product.
    pub vectors: DMatrix<f64>,
    /// Whether the alternating eigenvalue -1 is present.
    pub has_parity: bool,
    /// Largest non-trivial ball-average decay base per unit radius.
    pub rho0: f64,
}

const TRIVIAL_TOL: f64 = 1e-9;

impl QuotientSpectrum {
    pub fn new(hom: &GroupHom) -> Result<Self> {
        let HomImages::Permutation { degree, .. } = hom.images() else {
            return Err(Error::Config("spectrum requires a permutation action".into()));
        };
        let size = *degree;
        let rank = hom.rank();
        let tables = hom.letter_perms().expect("permutation target");
        let mut m1 = DMatrix::<f64>::zeros(size, size);
        for t in &tables {
            for x in 0..size {
                // pi(l) f (x) = f(l^-1 x); as a matrix row x has a one at
                // column l^-1 x, and summing over all letters is
                // symmetric under l <-> l^-1
                m1[(x, t[x])] += 1.0;
            }
        }
        let a = m1 / (2.0 * rank as f64);
        let eig = SymmetricEigen::new(a);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::<f64>::zeros(size, size);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        let has_parity = eigenvalues.iter().any(|&l| (l + 1.0).abs() <= TRIVIAL_TOL);
        let rho0 = eigenvalues
            .iter()
            .filter(|&&l| (l - 1.0).abs() > TRIVIAL_TOL && (l + 1.0).abs() > TRIVIAL_TOL)
            .map(|&l| ball_decay_base(rank, l))
            .fold(0.0f64, f64::max);
        Ok(QuotientSpectrum { rank, size, eigenvalues, vectors, has_parity, rho0 })
    }

    /// Scalar sphere-sum values `p_k(lambda)` for `k <= n`: the action of
    /// the radius-`k` sphere sum on a `lambda`-eigenvector, from the
    /// radial recursion.
    pub fn sphere_values(&self, lambda: f64, n: usize) -> Vec<f64> {
        sphere_values(self.rank, lambda, n)
    }

    /// Ball-average spectral value at radius `m` on a
    /// `lambda`-eigenvector.
    pub fn ball_average_value(&self, lambda: f64, m: usize) -> f64 {
        let p = self.sphere_values(lambda, m);
        let total: f64 = p.iter().sum();
        total / ball_size(self.rank, m) as f64
    }

    /// Exact limit of even-radius ball averages as a matrix: projection
    /// onto the invariant eigenspace plus `(r-1)/r` times the projection
    /// onto the alternating eigenspace.
    pub fn even_limit_matrix(&self) -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::zeros(self.size, self.size);
        let parity_weight = (self.rank as f64 - 1.0) / self.rank as f64;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            let w = if (l - 1.0).abs() <= TRIVIAL_TOL {
                1.0
            } else if (l + 1.0).abs() <= TRIVIAL_TOL {
                parity_weight
            } else {
                continue;
            };
            let v = self.vectors.column(i);
            out += w * &v * v.transpose();
        }
        out
    }

    /// Exact ball-average matrix at radius `m` via the radial recursion
    /// on sphere-sum matrices. Entries stay integral over the ball count,
    /// exactly representable for desk radii.
    pub fn ball_average_matrix(&self, hom: &GroupHom, m: usize) -> DMatrix<f64> {
        let mats = sphere_matrices(hom, m);
        let mut sum = DMatrix::<f64>::zeros(self.size, self.size);
        for mk in &mats {
            sum += mk;
        }
        sum / ball_size(self.rank, m) as f64
    }

    /// Spectral coefficients of a function given by its values.
    pub fn coefficients(&self, f: &[f64]) -> DVector<f64> {
        let v = DVector::from_column_slice(f);
        self.vectors.transpose() * v
    }

    /// Exact L2 deviation (uniform probability measure) of the
    /// even-radius-`m` ball average of `f` from the even limit, computed
    /// spectrally.
    pub fn exact_deviation(&self, f: &[f64], m: usize) -> f64 {
        let coeff = self.coefficients(f);
        let mut sum = 0.0;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            if (l - 1.0).abs() <= TRIVIAL_TOL || (l + 1.0).abs() <= TRIVIAL_TOL {
                let limit = if l > 0.0 {
                    1.0
                } else {
                    (self.rank as f64 - 1.0) / self.rank as f64
                };
                let dev = self.ball_average_value(l, m) - limit;
                sum += (dev * coeff[i]).powi(2);
            } else {
                sum += (self.ball_average_value(l, m) * coeff[i]).powi(2);
            }
        }
        // counting-coordinate vectors against the uniform probability
        // measure: norms divide by sqrt(size)
        (sum / self.size as f64).sqrt()
    }

    /// Envelope constant for the decay bound on even radii up to
    /// `max_radius`: deviations of unit vectors are within
    /// `C * rho0^m` with `C` the max spectral envelope times the
    /// orthogonal mass of `f`.
    pub fn envelope_constant(&self, f: &[f64], max_radius: usize) -> f64 {
        let coeff = self.coefficients(f);
        let mut mass = 0.0;
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            if (l - 1.0).abs() > TRIVIAL_TOL && (l + 1.0).abs() > TRIVIAL_TOL {
                mass += coeff[i] * coeff[i];
            }
        }
        let mass = (mass / self.size as f64).sqrt();
        let mut env: f64 = 0.0;
        for &l in &self.eigenvalues {
            if (l - 1.0).abs() <= TRIVIAL_TOL || (l + 1.0).abs() <= TRIVIAL_TOL {
                continue;
            }
            for m in (2..=max_radius).step_by(2) {
                env = env.max(self.ball_average_value(l, m).abs() / self.rho0.powi(m as i32));
            }
        }
        env * mass
    }
}

/// Radial recursion for sphere-sum scalars: `p_0 = 1`, `p_1 = 2r l`,
/// `p_2 = p_1^2 - 2r`, then `p_{k+1} = 2r l p_k - (2r-1) p_{k-1}`.
pub fn sphere_values(rank: usize, lambda: f64, n: usize) -> Vec<f64> {
    let tr = 2.0 * rank as f64;
    let q = tr - 1.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(tr * lambda);
    for k in 1..n {
        let next = if k == 1 {
            tr * lambda * out[1] - tr
        } else {
            tr * lambda * out[k] - q * out[k - 1]
        };
        out.push(next);
    }
    out
}

/// Sphere-sum operator matrices `M_0, ..., M_n` on a finite quotient by
/// the radial recursion `M_2 = M_1^2 - 2r I`,
/// `M_{k+1} = M_1 M_k - (2r-1) M_{k-1}`.
pub fn sphere_matrices(hom: &GroupHom, n: usize) -> Vec<DMatrix<f64>> {
    let HomImages::Permutation { degree, .. } = hom.images() else {
        panic!("sphere matrices need a permutation action");
    };
    let size = *degree;
    let rank = hom.rank();
    let tables = hom.letter_perms().expect("permutation target");
    let mut m1 = DMatrix::<f64>::zeros(size, size);
    for t in &tables {
        for x in 0..size {
            m1[(x, t[x])] += 1.0;
        }
    }
    let mut out = vec![DMatrix::<f64>::identity(size, size)];
    if n == 0 {
        return out;
    }
    out.push(m1.clone());
    for k in 1..n {
        let next = if k == 1 {
            &m1 * &out[1] - 2.0 * rank as f64 * DMatrix::<f64>::identity(size, size)
        } else {
            &m1 * &out[k] - (2.0 * rank as f64 - 1.0) * &out[k - 1]
        };
        out.push(next);
    }
    out
}

/// The per-radius decay base of ball averages on a `lambda`-eigenline:
/// the dominant root of the radial recursion against the ball growth
/// `2r - 1`, floored by the square-root growth of the oscillatory
/// regime.
pub fn ball_decay_base(rank: usize, lambda: f64) -> f64 {
    let r = rank as f64;
    let q = 2.0 * r - 1.0;
    let disc = r * r * lambda * lambda - q;
    let dominant = if disc > 0.0 {
        (r * lambda.abs() + disc.sqrt()).max(q.sqrt())
    } else {
        q.sqrt()
    };
    dominant / q
}
