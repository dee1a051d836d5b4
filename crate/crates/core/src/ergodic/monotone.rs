use serde::{Deserialize, Serialize};

use crate::matgroup::{mat2_mul, Mat2f, NormBallFamily};
use crate::sampler::SeedStream;
use crate::{Error, Result};

/// One row of a coarse-monotonicity audit table.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MonotoneRow {
    pub epsilon: f64,
    /// Smallest time shift making `g B_t` land inside `B_{t + kappa}`
    /// for every sampled `g` and grid time, exact on the enumerated
    /// balls.
    pub kappa: f64,
    /// Sup over the grid of the normalization ratio
    /// `V(t + kappa) / V(t)`.
    pub delta: f64,
    pub samples: usize,
}

/// Audit result: the `(epsilon, kappa, delta)` table together with the
/// Hölder fit `delta = 1 + O(eps^a0)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub rows: Vec<MonotoneRow>,
    /// Fitted exponent of `delta - 1` against `epsilon` (positive when
    /// the family is Hölder coarsely monotone on the sampled range).
    pub fitted_a0: Option<f64>,
    /// Witness of a submultiplicativity violation, if any:
    /// `(epsilon, t, log-norm excess)`.
    pub violation: Option<(f64, f64, f64)>,
}

fn frobenius(m: &Mat2f) -> f64 {
    (m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]).sqrt()
}

/// Deterministic sample of unimodular matrices within Frobenius distance
/// `eps` of the identity: compositions of a small rotation, shear and
/// diagonal stretch with parameters from the seeded stream, rescaled
/// until the distance constraint holds. Includes the identity.
pub fn near_identity_elements(eps: f64, count: usize, seed: u64) -> Vec<Mat2f> {
    let mut out = vec![[[1.0, 0.0], [0.0, 1.0]]];
    let mut stream = SeedStream::new(seed);
    while out.len() < count {
        let alpha = (stream.next_unit() - 0.5) * eps;
        let shear = (stream.next_unit() - 0.5) * eps;
        let stretch = (stream.next_unit() - 0.5) * eps;
        let rot: Mat2f = [[alpha.cos(), -alpha.sin()], [alpha.sin(), alpha.cos()]];
        let sh: Mat2f = [[1.0, shear], [0.0, 1.0]];
        let st: Mat2f = [[stretch.exp(), 0.0], [0.0, (-stretch).exp()]];
        let mut g = mat2_mul(&mat2_mul(&rot, &sh), &st);
        // rescale toward the identity until inside the ball
        let mut guard = 0;
        while frobenius(&[
            [g[0][0] - 1.0, g[0][1]],
            [g[1][0], g[1][1] - 1.0],
        ]) > eps
        {
            let a2 = alpha / 2.0_f64.powi(guard + 1);
            let s2 = shear / 2.0_f64.powi(guard + 1);
            let t2 = stretch / 2.0_f64.powi(guard + 1);
            let rot: Mat2f = [[a2.cos(), -a2.sin()], [a2.sin(), a2.cos()]];
            let sh: Mat2f = [[1.0, s2], [0.0, 1.0]];
            let st: Mat2f = [[t2.exp(), 0.0], [0.0, (-t2).exp()]];
            g = mat2_mul(&mat2_mul(&rot, &sh), &st);
            guard += 1;
            if guard > 60 {
                g = [[1.0, 0.0], [0.0, 1.0]];
                break;
            }
        }
        out.push(g);
    }
    out
}

/// Verify the support inclusion `g B_t` inside `B_{t + kappa_eps}` on
/// exactly enumerated balls for sampled `g` near the identity, and
/// report the realized `(kappa, delta)` per epsilon together with the
/// Hölder fit of `delta - 1`.
///
/// `kappa` is the max over samples of the log-norm excess; the certified
/// submultiplicativity bound is `log(1 + eps) + 0.5 log 2`, and any
/// sampled excess beyond it is returned as a violation witness.
pub fn coarse_monotone_check(
    family: &NormBallFamily,
    eps_grid: &[f64],
    t_grid: &[f64],
    samples_per_eps: usize,
    budget: u64,
    seed: u64,
) -> Result<MonotoneReport> {
    if eps_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::Config("empty grid in the monotonicity audit".into()));
    }
    let mut rows = Vec::with_capacity(eps_grid.len());
    let mut violation = None;
    for (ei, &eps) in eps_grid.iter().enumerate() {
        let gs = near_identity_elements(eps, samples_per_eps, seed ^ (ei as u64) << 8);
        let mut kappa: f64 = 0.0;
        for &t in t_grid {
            let ball = family.ball(t)?;
            let excess = ball.fold(
                budget,
                || 0.0f64,
                |acc, gamma| {
                    let gm = gamma.to_float();
                    for g in &gs {
                        let prod = mat2_mul(g, &gm);
                        let ex = frobenius(&prod).ln() - t;
                        if ex > *acc {
                            *acc = ex;
                        }
                    }
                },
                |a, b| *a = a.max(b),
            )?;
            kappa = kappa.max(excess);
            let certified = (1.0 + eps).ln() + 0.5 * 2.0f64.ln();
            if excess > certified && violation.is_none() {
                violation = Some((eps, t, excess));
            }
        }
        kappa = kappa.max(0.0);
        let mut delta: f64 = 1.0;
        for &t in t_grid {
            let base = family.ball(t)?.count();
            let shifted = family.ball(t + kappa)?.count();
            delta = delta.max(family.normalization.value(t + kappa, shifted)
                / family.normalization.value(t, base));
        }
        rows.push(MonotoneRow { epsilon: eps, kappa, delta, samples: samples_per_eps });
    }
    // Hölder fit: slope of log(delta - 1) against log(eps) over rows
    // with delta strictly above one
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.delta > 1.0)
        .map(|r| (r.epsilon.ln(), (r.delta - 1.0).ln()))
        .collect();
    let fitted_a0 = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(MonotoneReport { rows, fitted_a0, violation })
}
