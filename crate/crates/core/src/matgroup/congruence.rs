use std::collections::HashMap;

use super::{LatticeElement, Sl2Raw};
use crate::freegroup::{GroupHom, HomImages};
use crate::{Error, Result};

/// The finite group SL2(Z/N) with exact arithmetic on element indices.
///
/// Elements are enumerated once (all residue tuples with determinant one)
/// and sorted, so indices are stable across runs. Index 0 is the
/// identity is *not* guaranteed; use [`CongruenceQuotient::identity`].
pub struct CongruenceQuotient {
    modulus: u32,
    elements: Vec<[u32; 4]>,
    index_of: HashMap<[u32; 4], usize>,
    identity: usize,
}

const MAX_MODULUS: u32 = 50;

impl CongruenceQuotient {
    pub fn new(modulus: u32) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Config(format!("modulus must be >= 2, got {modulus}")));
        }
        if modulus > MAX_MODULUS {
            return Err(Error::Config(format!(
                "modulus {modulus} too large for dense enumeration (max {MAX_MODULUS})"
            )));
        }
        let n = modulus as u64;
        let mut elements = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        if (a * d % n + n - b * c % n) % n == 1 {
                            elements.push([a as u32, b as u32, c as u32, d as u32]);
                        }
                    }
                }
            }
        }
        elements.sort_unstable();
        let index_of: HashMap<[u32; 4], usize> =
            elements.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let identity = index_of[&[1 % modulus, 0, 0, 1 % modulus]];
        Ok(CongruenceQuotient { modulus, elements, index_of, identity })
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn entries(&self, index: usize) -> [u32; 4] {
        self.elements[index]
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        let n = self.modulus as u64;
        let x = self.elements[i].map(|v| v as u64);
        let y = self.elements[j].map(|v| v as u64);
        let prod = [
            (x[0] * y[0] + x[1] * y[2]) % n,
            (x[0] * y[1] + x[1] * y[3]) % n,
            (x[2] * y[0] + x[3] * y[2]) % n,
            (x[2] * y[1] + x[3] * y[3]) % n,
        ];
        self.index_of[&prod.map(|v| v as u32)]
    }

    /// Inverse from the adjugate: `[[d, -b], [-c, a]]` mod N.
    pub fn inv(&self, i: usize) -> usize {
        let n = self.modulus;
        let [a, b, c, d] = self.elements[i];
        let neg = |v: u32| (n - v % n) % n;
        self.index_of[&[d, neg(b), neg(c), a]]
    }

    /// Reduction of an exact integer matrix, entrywise mod N. This is a
    /// group homomorphism.
    pub fn reduce_raw(&self, g: &Sl2Raw) -> usize {
        let n = self.modulus as i64;
        let r = |v: i64| v.rem_euclid(n) as u32;
        self.index_of[&[r(g.a), r(g.b), r(g.c), r(g.d)]]
    }

    pub fn reduce(&self, g: &LatticeElement) -> usize {
        use num_bigint::BigInt;
        let n = BigInt::from(self.modulus);
        let [a, b, c, d] = g.entries();
        let r = |v: &BigInt| -> u32 {
            let m = ((v % &n) + &n) % &n;
            // entries are < modulus <= 50 after reduction
            m.to_string().parse().unwrap()
        };
        self.index_of[&[r(a), r(b), r(c), r(d)]]
    }

    /// Permutation of the group by left multiplication with element `g`.
    pub fn left_translation(&self, g: usize) -> Vec<usize> {
        (0..self.order()).map(|x| self.mul(g, x)).collect()
    }

    /// Free-group homomorphism acting on this quotient by left
    /// translation of the given integer generator matrices.
    pub fn left_translation_hom(&self, gens: &[Sl2Raw]) -> Result<GroupHom> {
        let perms: Vec<Vec<usize>> =
            gens.iter().map(|g| self.left_translation(self.reduce_raw(g))).collect();
        GroupHom::new(gens.len(), HomImages::Permutation { degree: self.order(), gens: perms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_group_orders_by_direct_enumeration() {
        assert_eq!(CongruenceQuotient::new(2).unwrap().order(), 6);
        assert_eq!(CongruenceQuotient::new(3).unwrap().order(), 24);
        assert_eq!(CongruenceQuotient::new(5).unwrap().order(), 120);
        // multiplicative formula cross-check: N^3 prod (1 - p^-2)
        assert_eq!(CongruenceQuotient::new(4).unwrap().order(), 48);
        assert_eq!(CongruenceQuotient::new(6).unwrap().order(), 144);
    }

    #[test]
    fn group_axioms_on_indices() {
        let q = CongruenceQuotient::new(5).unwrap();
        let e = q.identity();
        for i in 0..q.order() {
            assert_eq!(q.mul(e, i), i);
            assert_eq!(q.mul(i, e), i);
            assert_eq!(q.mul(i, q.inv(i)), e);
        }
        // associativity spot check
        let (x, y, z) = (3, 47, 101);
        assert_eq!(q.mul(q.mul(x, y), z), q.mul(x, q.mul(y, z)));
    }

    #[test]
    fn reduction_is_a_homomorphism() {
        let q = CongruenceQuotient::new(5).unwrap();
        let s = Sl2Raw::new(0, -1, 1, 0).unwrap();
        let t = Sl2Raw::new(1, 1, 0, 1).unwrap();
        let st = Sl2Raw::new(
            s.a * t.a + s.b * t.c,
            s.a * t.b + s.b * t.d,
            s.c * t.a + s.d * t.c,
            s.c * t.b + s.d * t.d,
        )
        .unwrap();
        assert_eq!(q.reduce_raw(&st), q.mul(q.reduce_raw(&s), q.reduce_raw(&t)));
        assert_eq!(q.reduce_raw(&s.inverse()), q.inv(q.reduce_raw(&s)));
        // BigInt path agrees
        assert_eq!(q.reduce(&s.to_lattice()), q.reduce_raw(&s));
    }

    #[test]
    fn unipotent_reduction_mod_2() {
        let q = CongruenceQuotient::new(2).unwrap();
        let t = Sl2Raw::new(1, 1, 0, 1).unwrap();
        let i = q.reduce_raw(&t);
        assert_eq!(q.entries(i), [1, 1, 0, 1]);
        // order two in SL2(Z/2)
        assert_eq!(q.mul(i, i), q.identity());
    }
}
