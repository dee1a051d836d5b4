use super::word::{Letter, ReducedWord};
use crate::matgroup::{mat3_id, mat3_mul, mat3_transpose, LatticeElement, Mat3};
use crate::{Error, Result};

/// Generator images of a homomorphism out of the free group.
#[derive(Clone, Debug)]
pub enum HomImages {
    /// Transitive permutation action on a finite coset space; entry `i`
    /// is the image of generator `i` as a permutation of `0..degree`.
    Permutation { degree: usize, gens: Vec<Vec<usize>> },
    /// Rotations of the 2-sphere.
    Rotation3(Vec<Mat3>),
    /// Exact integer matrices with determinant one.
    IntegerMatrix(Vec<LatticeElement>),
}

/// A homomorphism `F_r -> target`, stored as per-letter images so both a
/// generator and its inverse cost one lookup.
#[derive(Clone, Debug)]
pub struct GroupHom {
    rank: usize,
    images: HomImages,
}

/// A value in the target group of a [`GroupHom`].
#[derive(Clone, Debug)]
pub enum HomValue {
    Perm(Vec<usize>),
    Mat3(Mat3),
    Int(LatticeElement),
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        inv[pi] = i;
    }
    inv
}

fn validate_perm(p: &[usize], degree: usize) -> Result<()> {
    if p.len() != degree {
        return Err(Error::Config(format!(
            "permutation length {} does not match degree {degree}",
            p.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &x in p {
        if x >= degree || seen[x] {
            return Err(Error::Config("image is not a permutation".into()));
        }
        seen[x] = true;
    }
    Ok(())
}

impl GroupHom {
    pub fn new(rank: usize, images: HomImages) -> Result<Self> {
        if rank < 2 {
            return Err(Error::Config(format!("hom rank must be >= 2, got {rank}")));
        }
        match &images {
            HomImages::Permutation { degree, gens } => {
                if gens.len() != rank {
                    return Err(Error::Config("one permutation per generator required".into()));
                }
                for g in gens {
                    validate_perm(g, *degree)?;
                }
            }
            HomImages::Rotation3(gens) => {
                if gens.len() != rank {
                    return Err(Error::Config("one rotation per generator required".into()));
                }
                for m in gens {
                    let r = orthogonality_residual(m);
                    if r > 1e-9 {
                        return Err(Error::Config(format!(
                            "generator image is not orthogonal (residual {r:.2e})"
                        )));
                    }
                }
            }
            HomImages::IntegerMatrix(gens) => {
                if gens.len() != rank {
                    return Err(Error::Config("one matrix per generator required".into()));
                }
            }
        }
        Ok(GroupHom { rank, images })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &HomImages {
        &self.images
    }

    /// Per-letter permutation tables (generators followed by inverses in
    /// packed-letter order), when the target is a permutation group.
    pub fn letter_perms(&self) -> Option<Vec<Vec<usize>>> {
        match &self.images {
            HomImages::Permutation { gens, .. } => {
                let mut out = Vec::with_capacity(2 * self.rank);
                for g in gens {
                    out.push(g.clone());
                    out.push(invert_perm(g));
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Per-letter rotation matrices in packed-letter order.
    pub fn letter_rotations(&self) -> Option<Vec<Mat3>> {
        match &self.images {
            HomImages::Rotation3(gens) => {
                let mut out = Vec::with_capacity(2 * self.rank);
                for m in gens {
                    out.push(*m);
                    out.push(mat3_transpose(m));
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Image of a single packed letter.
    pub fn letter_image(&self, l: Letter) -> HomValue {
        let gen = (l / 2) as usize;
        let inv = l & 1 == 1;
        match &self.images {
            HomImages::Permutation { gens, .. } => {
                let p = &gens[gen];
                HomValue::Perm(if inv { invert_perm(p) } else { p.clone() })
            }
            HomImages::Rotation3(gens) => {
                let m = &gens[gen];
                HomValue::Mat3(if inv { mat3_transpose(m) } else { *m })
            }
            HomImages::IntegerMatrix(gens) => {
                let m = &gens[gen];
                HomValue::Int(if inv { m.inverse() } else { m.clone() })
            }
        }
    }

    /// Image of a reduced word, composed left to right.
    pub fn apply(&self, w: &ReducedWord) -> HomValue {
        let mut acc = match &self.images {
            HomImages::Permutation { degree, .. } => HomValue::Perm((0..*degree).collect()),
            HomImages::Rotation3(_) => HomValue::Mat3(mat3_id()),
            HomImages::IntegerMatrix(_) => HomValue::Int(LatticeElement::identity()),
        };
        for &l in w.letters() {
            acc = acc.mul(&self.letter_image(l));
        }
        acc
    }
}

impl HomValue {
    pub fn mul(&self, other: &HomValue) -> HomValue {
        match (self, other) {
            (HomValue::Perm(a), HomValue::Perm(b)) => {
                // (a*b)(x) = a(b(x)): apply b then a, matching left-to-right
                // word composition acting on the left.
                HomValue::Perm(b.iter().map(|&x| a[x]).collect())
            }
            (HomValue::Mat3(a), HomValue::Mat3(b)) => HomValue::Mat3(mat3_mul(a, b)),
            (HomValue::Int(a), HomValue::Int(b)) => HomValue::Int(a.mul(b)),
            _ => panic!("mixed hom targets"),
        }
    }

    pub fn inverse(&self) -> HomValue {
        match self {
            HomValue::Perm(p) => HomValue::Perm(invert_perm(p)),
            HomValue::Mat3(m) => HomValue::Mat3(mat3_transpose(m)),
            HomValue::Int(m) => HomValue::Int(m.inverse()),
        }
    }

    /// Max absolute entry difference (exact equality for discrete targets).
    pub fn distance(&self, other: &HomValue) -> f64 {
        match (self, other) {
            (HomValue::Perm(a), HomValue::Perm(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            (HomValue::Mat3(a), HomValue::Mat3(b)) => {
                let mut d = 0.0f64;
                for i in 0..3 {
                    for j in 0..3 {
                        d = d.max((a[i][j] - b[i][j]).abs());
                    }
                }
                d
            }
            (HomValue::Int(a), HomValue::Int(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            _ => panic!("mixed hom targets"),
        }
    }
}

fn orthogonality_residual(m: &Mat3) -> f64 {
    let mt = mat3_transpose(m);
    let p = mat3_mul(&mt, m);
    let mut r = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { 1.0 } else { 0.0 };
            r = r.max((p[i][j] - expect).abs());
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift_hom(m: usize) -> GroupHom {
        // both generators act as x -> x + 1 on Z/m
        let shift: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
        GroupHom::new(
            2,
            HomImages::Permutation { degree: m, gens: vec![shift.clone(), shift] },
        )
        .unwrap()
    }

    #[test]
    fn hom_is_multiplicative_on_permutations() {
        let hom = shift_hom(5);
        let a = ReducedWord::generator(2, 0);
        let b = ReducedWord::generator(2, 1);
        let ab = a.mul(&b);
        let lhs = hom.apply(&ab);
        let rhs = hom.apply(&a).mul(&hom.apply(&b));
        assert_eq!(lhs.distance(&rhs), 0.0);
        // inverse law
        assert_eq!(hom.apply(&ab.inverse()).distance(&hom.apply(&ab).inverse()), 0.0);
    }

    #[test]
    fn hom_multiplicative_after_cancellation() {
        let hom = shift_hom(7);
        let u = ReducedWord::from_letters(2, [0, 2, 1]).unwrap(); // a b a^-1
        let v = ReducedWord::from_letters(2, [0, 3, 1]).unwrap(); // a b^-1 a^-1
        let uv = u.mul(&v); // cancellation at the seam
        assert!(uv.len() < u.len() + v.len());
        let lhs = hom.apply(&uv);
        let rhs = hom.apply(&u).mul(&hom.apply(&v));
        assert_eq!(lhs.distance(&rhs), 0.0);
    }

    #[test]
    fn bad_permutation_rejected() {
        let res = GroupHom::new(
            2,
            HomImages::Permutation { degree: 3, gens: vec![vec![0, 0, 1], vec![0, 1, 2]] },
        );
        assert!(res.is_err());
    }
}
