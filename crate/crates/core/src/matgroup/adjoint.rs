use super::{mat2_det, FloatMatrix, Mat2f, Mat3};
use crate::{Error, Result};

/// Adjoint image of a 2x2 unimodular matrix as an isometry of the
/// quadratic form `Q(x, y, z) = x^2 + y^2 - z^2`.
///
/// Coordinates come from the trace form on traceless 2x2 matrices with
/// the basis `H = [[1,0],[0,-1]]`, `P = [[0,1],[1,0]]`,
/// `K = [[0,1],[-1,0]]`; conjugation `X -> M X M^-1` preserves the form,
/// kills the center `{+-I}` and lands in the identity component.
pub fn adjoint_so21(m: &Mat2f) -> Result<FloatMatrix> {
    let det = mat2_det(m);
    if (det - 1.0).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "adjoint requires determinant 1 within 1e-12, got {det}"
        )));
    }
    let minv = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
    let basis: [Mat2f; 3] = [
        [[1.0, 0.0], [0.0, -1.0]],
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, 1.0], [-1.0, 0.0]],
    ];
    let mut out: Mat3 = [[0.0; 3]; 3];
    for (j, e) in basis.iter().enumerate() {
        let x = conj(m, e, &minv);
        // coordinates of a traceless matrix in (H, P, K)
        out[0][j] = x[0][0];
        out[1][j] = (x[0][1] + x[1][0]) / 2.0;
        out[2][j] = (x[0][1] - x[1][0]) / 2.0;
    }
    FloatMatrix::lorentz21(out)
}

fn conj(m: &Mat2f, x: &Mat2f, minv: &Mat2f) -> Mat2f {
    super::mat2_mul(&super::mat2_mul(m, x), minv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgroup::{mat3_id, mat3_mul};

    fn close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
        a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_and_center() {
        let id = adjoint_so21(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!(close(&id.as_mat3(), &mat3_id(), 1e-14));
        let neg = adjoint_so21(&[[-1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert!(close(&neg.as_mat3(), &mat3_id(), 1e-14));
    }

    #[test]
    fn circle_rotation_doubles_angle() {
        let phi = 0.7f64;
        let (c, s) = (phi.cos(), phi.sin());
        let ad = adjoint_so21(&[[c, -s], [s, c]]).unwrap().as_mat3();
        let (c2, s2) = ((2.0 * phi).cos(), (2.0 * phi).sin());
        let expect: Mat3 = [[c2, -s2, 0.0], [s2, c2, 0.0], [0.0, 0.0, 1.0]];
        assert!(close(&ad, &expect, 1e-12));
    }

    #[test]
    fn adjoint_is_a_homomorphism() {
        let g: Mat2f = [[1.0, 1.0], [0.0, 1.0]];
        let h: Mat2f = [[1.0, 0.0], [0.5, 1.0]];
        let gh = super::super::mat2_mul(&g, &h);
        let lhs = adjoint_so21(&gh).unwrap().as_mat3();
        let rhs = mat3_mul(&adjoint_so21(&g).unwrap().as_mat3(), &adjoint_so21(&h).unwrap().as_mat3());
        assert!(close(&lhs, &rhs, 1e-12));
    }

    #[test]
    fn non_unimodular_rejected() {
        assert!(adjoint_so21(&[[2.0, 0.0], [0.0, 1.0]]).is_err());
    }

    #[test]
    fn form_preserved_on_sampled_elements() {
        // residual is validated inside FloatMatrix construction; exercise
        // a hyperbolic and a parabolic element explicitly
        for m in [[[2.0, 0.0], [0.0, 0.5]], [[1.0, 3.0], [0.0, 1.0]]] {
            let ad = adjoint_so21(&m).unwrap();
            assert!(ad.relation_residual() <= 1e-9);
        }
    }
}
