use serde::{Deserialize, Serialize};

use crate::matgroup::{norm_sq_threshold, NormBallFamily};
use crate::spaces::{PlaneAnnulus, Point};
use crate::{Error, Result};

/// Polar binning of the annulus: radial times angular cells.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Binning {
    pub radial: usize,
    pub angular: usize,
    pub r_lo: f64,
    pub r_hi: f64,
}

impl Binning {
    pub fn cells(&self) -> usize {
        self.radial * self.angular
    }

    pub fn bin(&self, v: &[f64; 2]) -> Option<usize> {
        let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if r < self.r_lo || r >= self.r_hi {
            return None;
        }
        let ri = ((r - self.r_lo) / (self.r_hi - self.r_lo) * self.radial as f64) as usize;
        let phi = v[1].atan2(v[0]).rem_euclid(std::f64::consts::TAU);
        let ai = ((phi / std::f64::consts::TAU) * self.angular as f64) as usize;
        Some(ri.min(self.radial - 1) * self.angular + ai.min(self.angular - 1))
    }

    /// Lebesgue area of a cell (depends on the radial index only).
    pub fn cell_area(&self, cell: usize) -> f64 {
        let ri = cell / self.angular;
        let dr = (self.r_hi - self.r_lo) / self.radial as f64;
        let r0 = self.r_lo + ri as f64 * dr;
        let r1 = r0 + dr;
        std::f64::consts::PI * (r1 * r1 - r0 * r0) / self.angular as f64
    }

    /// Mean radius of a cell's radial band.
    pub fn cell_radius(&self, cell: usize) -> f64 {
        let ri = cell / self.angular;
        let dr = (self.r_hi - self.r_lo) / self.radial as f64;
        self.r_lo + (ri as f64 + 0.5) * dr
    }
}

/// Orbit histogram at one time: raw counts and `1/V(t)`-weighted bin
/// masses.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityHistogram {
    pub t: f64,
    pub counts: Vec<u64>,
    pub masses: Vec<f64>,
    pub total_count: u64,
}

impl DensityHistogram {
    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Probability-normalized bin vector (empty histogram gives zeros).
    pub fn normalized(&self) -> Vec<f64> {
        let total = self.total_mass();
        if total <= 0.0 {
            return vec![0.0; self.masses.len()];
        }
        self.masses.iter().map(|&m| m / total).collect()
    }
}

/// Total variation distance of two nonnegative bin vectors after
/// probability normalization.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    let (sa, sb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
    if sa <= 0.0 || sb <= 0.0 {
        return 1.0;
    }
    0.5 * a.iter().zip(b).map(|(&x, &y)| (x / sa - y / sb).abs()).sum::<f64>()
}

/// Report of an empirical limit-density run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityReport {
    pub binning: Binning,
    pub histograms: Vec<DensityHistogram>,
    /// Total variation between successive probability-normalized
    /// histograms.
    pub tv_steps: Vec<f64>,
}

impl DensityReport {
    pub fn last(&self) -> &DensityHistogram {
        self.histograms.last().expect("nonempty grid")
    }

    /// Raw L1 distance between the final weighted bin vector and another
    /// report's.
    pub fn raw_l1_to(&self, other: &DensityReport) -> f64 {
        self.last()
            .masses
            .iter()
            .zip(&other.last().masses)
            .map(|(&a, &b)| (a - b).abs())
            .sum()
    }
}

/// Binned measures of the orbit piece `{ g^-1 x : g in B_t }` inside the
/// annulus window, weighted by `1/V(t)`, for each time in the grid; one
/// exact enumeration of the largest ball.
pub fn empirical_limit_density(
    family: &NormBallFamily,
    annulus: &PlaneAnnulus,
    x: &Point,
    binning: Binning,
    t_grid: &[f64],
    budget: u64,
) -> Result<DensityReport> {
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("density time grid must strictly increase".into()));
    }
    if binning.r_lo < annulus.inner() - 1e-12 || binning.r_hi > annulus.radius() + 1e-12 {
        return Err(Error::Config(
            "histogram window must lie inside the annulus filtration piece".into(),
        ));
    }
    let v = x.as_vec2()?;
    if !(v[0] * v[0] + v[1] * v[1] > 0.0) {
        return Err(Error::Config("the origin is excluded from the plane".into()));
    }
    let thresholds: Vec<i128> = t_grid.iter().map(|&t| norm_sq_threshold(t.exp())).collect();
    let ball = family.ball(*t_grid.last().unwrap())?;
    let cells = binning.cells();
    let per_bucket = ball.fold(
        budget,
        || vec![0u64; t_grid.len() * cells],
        |acc, g| {
            let gi = g.inverse();
            let w = crate::matgroup::mat2_apply(&gi.to_float(), &v);
            if let Some(cell) = binning.bin(&w) {
                let bucket = thresholds.partition_point(|&th| th < g.norm_sq());
                if bucket < t_grid.len() {
                    acc[bucket * cells + cell] += 1;
                }
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        },
    )?;
    let counts_cardinality: Vec<u64> =
        t_grid.iter().map(|&t| Ok(family.ball(t)?.count())).collect::<Result<_>>()?;
    let mut cumulative = vec![0u64; cells];
    let mut histograms = Vec::with_capacity(t_grid.len());
    for (i, &t) in t_grid.iter().enumerate() {
        for (c, cell) in cumulative.iter_mut().enumerate() {
            *cell += per_bucket[i * cells + c];
        }
        let vt = family.normalization.value(t, counts_cardinality[i]);
        let masses: Vec<f64> = cumulative.iter().map(|&c| c as f64 / vt).collect();
        histograms.push(DensityHistogram {
            t,
            counts: cumulative.clone(),
            total_count: cumulative.iter().sum(),
            masses,
        });
    }
    let tv_steps = histograms
        .windows(2)
        .map(|w| total_variation(&w[0].masses, &w[1].masses))
        .collect();
    Ok(DensityReport { binning, histograms, tv_steps })
}

/// Chi-square statistic of the final histogram counts against
/// Lebesgue-proportional cell expectations.
pub fn chi_square_against_lebesgue(report: &DensityReport) -> (f64, usize) {
    let hist = report.last();
    let total = hist.total_count as f64;
    let area: f64 = (0..report.binning.cells()).map(|c| report.binning.cell_area(c)).sum();
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    for (c, &obs) in hist.counts.iter().enumerate() {
        let expect = total * report.binning.cell_area(c) / area;
        if expect > 0.0 {
            chi2 += (obs as f64 - expect).powi(2) / expect;
            dof += 1;
        }
    }
    (chi2, dof.saturating_sub(1))
}
