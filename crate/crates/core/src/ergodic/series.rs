use serde::{Deserialize, Serialize};

use super::{batch_ball_averages, limit_apply, BallAverageSpec, LimitOperator};
use crate::holder::TestFunction;
use crate::spaces::Point;
use crate::{Error, Result};

/// Which norm an error series carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    L1,
    L2,
    /// Max over a declared point grid.
    SupGrid,
}

/// Provenance of a series: everything needed to reproduce it.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub space: String,
    pub function: String,
    pub normalization: String,
    pub sample_size: usize,
    pub seed: u64,
}

/// The error data `(t, |average - limit|_p)` along a time grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorSeries {
    pub norm: NormKind,
    pub entries: Vec<(f64, f64)>,
    pub meta: SeriesMeta,
}

impl ErrorSeries {
    pub fn new(norm: NormKind, entries: Vec<(f64, f64)>, meta: SeriesMeta) -> Result<Self> {
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Config("series times must strictly increase".into()));
            }
        }
        if entries.iter().any(|&(_, e)| e < 0.0 || !e.is_finite()) {
            return Err(Error::Config("series values must be finite and nonnegative".into()));
        }
        Ok(ErrorSeries { norm, entries, meta })
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.1)
    }
}

/// Result of a sup-norm audit over a declared grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupError {
    pub value: f64,
    pub argmax: Point,
    pub grid_size: usize,
    /// Hölder pad for off-grid points: certificate constant times the
    /// grid mesh raised to the exponent (recorded, not added to
    /// `value`).
    pub off_grid_pad: f64,
}

/// The `L^p` error series of ball averages against a limit operator over
/// the filtration piece, on an exact point set (finite spaces) or a
/// quadrature sample of the declared size.
pub fn error_series(
    spec: &BallAverageSpec,
    f: &TestFunction,
    op: &LimitOperator,
    norm: NormKind,
    t_grid: &[f64],
    sample_n: usize,
    seed: u64,
) -> Result<ErrorSeries> {
    let weighted = spec.space.sample(sample_n, seed);
    let points: Vec<Point> = weighted.iter().map(|(p, _)| p.clone()).collect();
    let weights: Vec<f64> = weighted.iter().map(|(_, w)| *w).collect();
    let averages = batch_ball_averages(spec, f, &points, t_grid)?;
    let limits: Vec<f64> = points
        .iter()
        .map(|p| limit_apply(op, &spec.space, f, p, sample_n.max(4096), seed ^ 0x11))
        .collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(t_grid.len());
    for (ti, &t) in t_grid.iter().enumerate() {
        let value = match norm {
            NormKind::L1 => points
                .iter()
                .enumerate()
                .map(|(i, _)| weights[i] * (averages[i][ti] - limits[i]).abs())
                .sum::<f64>(),
            NormKind::L2 => points
                .iter()
                .enumerate()
                .map(|(i, _)| weights[i] * (averages[i][ti] - limits[i]).powi(2))
                .sum::<f64>()
                .sqrt(),
            NormKind::SupGrid => points
                .iter()
                .enumerate()
                .map(|(i, _)| (averages[i][ti] - limits[i]).abs())
                .fold(0.0f64, f64::max),
        };
        entries.push((t, value));
    }
    ErrorSeries::new(
        norm,
        entries,
        SeriesMeta {
            space: spec.space.kind_tag().into(),
            function: f.label.clone(),
            normalization: format!("{:?}", spec.normalization),
            sample_size: points.len(),
            seed,
        },
    )
}

/// Exact maximum of `|average - limit|` over the supplied grid, with the
/// maximizing point and the certificate-derived off-grid pad.
pub fn sup_error(
    spec: &BallAverageSpec,
    f: &TestFunction,
    op: &LimitOperator,
    t: f64,
    grid: &[Point],
    seed: u64,
) -> Result<SupError> {
    if grid.is_empty() {
        return Err(Error::Config("sup audit needs a nonempty grid".into()));
    }
    let averages = batch_ball_averages(spec, f, grid, &[t])?;
    let mut best = -1.0f64;
    let mut argmax = grid[0].clone();
    for (i, p) in grid.iter().enumerate() {
        let lim = limit_apply(op, &spec.space, f, p, 8192, seed ^ 0x11)?;
        let dev = (averages[i][0] - lim).abs();
        if dev > best {
            best = dev;
            argmax = p.clone();
        }
    }
    // mesh estimate: nearest-neighbor spacing scale of the grid on the
    // space, from a subsample
    let mut mesh: f64 = 0.0;
    let step = (grid.len() / 64).max(1);
    for i in (0..grid.len()).step_by(step) {
        let mut nearest = f64::INFINITY;
        for (j, q) in grid.iter().enumerate() {
            if i != j {
                nearest = nearest.min(spec.space.distance(&grid[i], q)?);
            }
        }
        if nearest.is_finite() {
            mesh = mesh.max(nearest);
        }
    }
    let off_grid_pad = if f.is_indicator {
        f64::INFINITY
    } else {
        2.0 * f.holder_constant * mesh.powf(f.exponent)
    };
    Ok(SupError { value: best, argmax, grid_size: grid.len(), off_grid_pad })
}
