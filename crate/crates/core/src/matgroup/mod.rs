//! Exact and floating-point matrix groups: SL2(Z) with exact norm-ball
//! enumeration, congruence quotients, the adjoint map onto the identity
//! component of the isometries of `x^2 + y^2 - z^2`, and matrix norms.

mod adjoint;
mod ballenum;
mod congruence;
mod family;

pub use adjoint::adjoint_so21;
pub use ballenum::{norm_sq_threshold, Sl2Ball};
pub use congruence::CongruenceQuotient;
pub use family::{NormBallFamily, Normalization};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// 3x3 float matrix, row major.
pub type Mat3 = [[f64; 3]; 3];
/// 2x2 float matrix, row major.
pub type Mat2f = [[f64; 2]; 2];

pub fn mat3_id() -> Mat3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn mat3_transpose(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn mat3_apply(a: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ]
}

pub fn mat2_mul(a: &Mat2f, b: &Mat2f) -> Mat2f {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat2_apply(a: &Mat2f, v: &[f64; 2]) -> [f64; 2] {
    [a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]]
}

pub fn mat2_det(a: &Mat2f) -> f64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// Rotation about the given axis (0 = x, 1 = y, 2 = z) with the given
/// cosine/sine pair.
pub fn axis_rotation(axis: usize, cos: f64, sin: f64) -> Mat3 {
    let mut m = mat3_id();
    let (i, j) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        2 => (0, 1),
        _ => panic!("axis out of range"),
    };
    m[i][i] = cos;
    m[i][j] = -sin;
    m[j][i] = sin;
    m[j][j] = cos;
    m
}

/// Matrix norm kind: Euclidean (Frobenius) for archimedean places, max
/// entry otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixNorm {
    Euclidean,
    Max,
}

/// An element of SL2(Z) with arbitrary-precision entries. Exact products
/// and inverses; the determinant-one invariant is enforced at
/// construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeElement {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl LatticeElement {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        let det = &a * &d - &b * &c;
        if det != BigInt::from(1) {
            return Err(Error::Config(format!("determinant must be 1, got {det}")));
        }
        Ok(LatticeElement { a, b, c, d })
    }

    pub fn identity() -> Self {
        LatticeElement {
            a: BigInt::from(1),
            b: BigInt::from(0),
            c: BigInt::from(0),
            d: BigInt::from(1),
        }
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, o: &LatticeElement) -> LatticeElement {
        LatticeElement {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    /// Exact inverse `[[d, -b], [-c, a]]` (determinant is one).
    pub fn inverse(&self) -> LatticeElement {
        LatticeElement { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }
    }

    pub fn neg(&self) -> LatticeElement {
        LatticeElement { a: -&self.a, b: -&self.b, c: -&self.c, d: -&self.d }
    }

    pub fn norm(&self, kind: MatrixNorm) -> f64 {
        match kind {
            MatrixNorm::Euclidean => {
                let s = &self.a * &self.a + &self.b * &self.b + &self.c * &self.c + &self.d * &self.d;
                s.to_f64().expect("nonnegative").sqrt()
            }
            MatrixNorm::Max => [&self.a, &self.b, &self.c, &self.d]
                .into_iter()
                .map(|e| e.abs().to_f64().expect("finite"))
                .fold(0.0, f64::max),
        }
    }

    pub fn to_float(&self) -> Mat2f {
        [
            [self.a.to_f64().unwrap(), self.b.to_f64().unwrap()],
            [self.c.to_f64().unwrap(), self.d.to_f64().unwrap()],
        ]
    }
}

/// Compact SL2(Z) element used by the enumeration hot paths. Entries are
/// machine integers; balls up to norm 1e4 stay far inside the i64 range,
/// and products that might not are done through [`LatticeElement`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sl2Raw {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Sl2Raw {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::Config(format!("determinant must be 1, got {det}")));
        }
        Ok(Sl2Raw { a, b, c, d })
    }

    pub fn identity() -> Self {
        Sl2Raw { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn inverse(&self) -> Self {
        Sl2Raw { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn neg(&self) -> Self {
        Sl2Raw { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    pub fn norm_sq(&self) -> i128 {
        let (a, b, c, d) = (self.a as i128, self.b as i128, self.c as i128, self.d as i128);
        a * a + b * b + c * c + d * d
    }

    pub fn norm(&self, kind: MatrixNorm) -> f64 {
        match kind {
            MatrixNorm::Euclidean => (self.norm_sq() as f64).sqrt(),
            MatrixNorm::Max => [self.a, self.b, self.c, self.d]
                .into_iter()
                .map(|e| e.unsigned_abs() as f64)
                .fold(0.0, f64::max),
        }
    }

    /// Largest singular value, in closed form from the Frobenius norm and
    /// the unit determinant. This is the certified submultiplicativity
    /// constant: `|g h|_F <= sigma_max(g) |h|_F`.
    pub fn operator_norm(&self) -> f64 {
        let f2 = self.norm_sq() as f64;
        ((f2 + (f2 * f2 - 4.0).max(0.0).sqrt()) / 2.0).sqrt()
    }

    pub fn to_lattice(&self) -> LatticeElement {
        LatticeElement {
            a: BigInt::from(self.a),
            b: BigInt::from(self.b),
            c: BigInt::from(self.c),
            d: BigInt::from(self.d),
        }
    }

    pub fn to_float(&self) -> Mat2f {
        [[self.a as f64, self.b as f64], [self.c as f64, self.d as f64]]
    }
}

/// Largest singular value of a float 2x2 matrix.
pub fn operator_norm_2x2(m: &Mat2f) -> f64 {
    let f2 = m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1];
    let det = mat2_det(m);
    ((f2 + (f2 * f2 - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

/// Group tag for validated float matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupTag {
    /// 3x3 orthogonal with determinant 1.
    Rotation3,
    /// 2x2 with determinant 1.
    SpecialLinear2,
    /// 3x3 preserving `x^2 + y^2 - z^2`, identity component.
    Lorentz21,
}

/// A float matrix checked against its group relation at construction.
#[derive(Clone, Debug)]
pub struct FloatMatrix {
    pub tag: GroupTag,
    pub dim: usize,
    pub data: Vec<f64>,
}

const RELATION_TOL: f64 = 1e-9;

impl FloatMatrix {
    pub fn rotation3(m: Mat3) -> Result<Self> {
        let fm = FloatMatrix { tag: GroupTag::Rotation3, dim: 3, data: m.iter().flatten().copied().collect() };
        fm.check()?;
        Ok(fm)
    }

    pub fn special_linear2(m: Mat2f) -> Result<Self> {
        let fm = FloatMatrix {
            tag: GroupTag::SpecialLinear2,
            dim: 2,
            data: m.iter().flatten().copied().collect(),
        };
        fm.check()?;
        Ok(fm)
    }

    pub fn lorentz21(m: Mat3) -> Result<Self> {
        let fm = FloatMatrix { tag: GroupTag::Lorentz21, dim: 3, data: m.iter().flatten().copied().collect() };
        fm.check()?;
        Ok(fm)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_mat3(&self) -> Mat3 {
        assert_eq!(self.dim, 3);
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.at(i, j);
            }
        }
        m
    }

    pub fn as_mat2(&self) -> Mat2f {
        assert_eq!(self.dim, 2);
        [[self.at(0, 0), self.at(0, 1)], [self.at(1, 0), self.at(1, 1)]]
    }

    /// Residual of the defining group relation: orthogonality defect,
    /// determinant defect, or defect of preserving the (2,1) form.
    pub fn relation_residual(&self) -> f64 {
        match self.tag {
            GroupTag::Rotation3 => {
                let m = self.as_mat3();
                let p = mat3_mul(&mat3_transpose(&m), &m);
                let mut r: f64 = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        r = r.max((p[i][j] - expect).abs());
                    }
                }
                let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                    - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                r.max((det - 1.0).abs())
            }
            GroupTag::SpecialLinear2 => (mat2_det(&self.as_mat2()) - 1.0).abs(),
            GroupTag::Lorentz21 => {
                let m = self.as_mat3();
                // A^T J A == J with J = diag(1, 1, -1)
                let mut r: f64 = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        let mut s = 0.0;
                        for k in 0..3 {
                            let jk = if k == 2 { -1.0 } else { 1.0 };
                            s += m[k][i] * jk * m[k][j];
                        }
                        let expect = if i == j {
                            if i == 2 {
                                -1.0
                            } else {
                                1.0
                            }
                        } else {
                            0.0
                        };
                        r = r.max((s - expect).abs());
                    }
                }
                // identity component: lower-right entry positive
                if m[2][2] <= 0.0 {
                    r = r.max(1.0);
                }
                r
            }
        }
    }

    fn check(&self) -> Result<()> {
        let r = self.relation_residual();
        if r > RELATION_TOL {
            return Err(Error::CertificateViolation(format!(
                "{:?} relation residual {r:.3e} exceeds {RELATION_TOL:.0e}",
                self.tag
            )));
        }
        Ok(())
    }
}

/// Norm of an exact lattice element (free-function form of the norm
/// operation).
pub fn matrix_norm(m: &LatticeElement, kind: MatrixNorm) -> f64 {
    m.norm(kind)
}
