use serde::{Deserialize, Serialize};

use ergolab::freegroup::ball_size;
use ergolab::matgroup::{CongruenceQuotient, Sl2Raw};
use ergolab::{Error, Result};

fn default_budget() -> u64 {
    100_000_000
}

/// A single experiment declaration. The JSON document is schema-checked
/// against the declared fields and validated semantically before any
/// heavy work; the seed is mandatory so every run is reproducible.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(flatten)]
    pub kind: ExperimentKind,
}

/// Experiment kinds with their parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Free-group word-ball averages on a congruence quotient acting on
    /// itself by left translation.
    FreeQuotient {
        modulus: u32,
        /// Integer generator matrices; defaults to the two standard
        /// unipotents.
        #[serde(default = "default_generators")]
        generators: Vec<[i64; 4]>,
        max_radius: usize,
        functions: Vec<FunctionSpec>,
        /// Optional chain of congruence levels for the profinite metric;
        /// must be nested.
        #[serde(default)]
        chain_moduli: Vec<u32>,
    },
    /// Free rotation words acting on the unit sphere.
    FreeSphere2 {
        /// Cosine of the rotation angle about each coordinate axis.
        #[serde(default = "default_rotation_cos")]
        rotation_cos: f64,
        max_radius: usize,
        functions: Vec<FunctionSpec>,
        grid_n: usize,
        sample_n: usize,
    },
    /// Lattice norm-ball averages on a congruence quotient.
    LatticeQuotient {
        modulus: u32,
        t_grid: Vec<f64>,
        functions: Vec<FunctionSpec>,
    },
    /// Lattice orbits on the punctured plane with a sub-cardinality
    /// normalization: empirical limit densities.
    PlaneInfinite {
        annulus_r: f64,
        /// Exponential normalization rate; required.
        alpha: Option<f64>,
        #[serde(default = "default_beta")]
        beta: f64,
        t_grid: Vec<f64>,
        start_points: Vec<[f64; 2]>,
        radial_bins: usize,
        angular_bins: usize,
        window: [f64; 2],
    },
    /// Lattice norm-ball averages on the boundary circle.
    BoundaryCircle {
        t_grid: Vec<f64>,
        functions: Vec<FunctionSpec>,
        sample_n: usize,
    },
    /// Lattice orbit statistics on the invariant sheet of
    /// `x^2 + y^2 - z^2 = -1`.
    Desitter {
        ball_radius: f64,
        alpha: Option<f64>,
        t_grid: Vec<f64>,
        radial_bins: usize,
    },
    /// Orbit-count ratio statistics.
    Ratio {
        domain: RatioDomain,
        /// Congruence modulus for the quotient domain.
        #[serde(default = "default_ratio_modulus")]
        modulus: u32,
        t_grid: Vec<f64>,
        x1: PointSpec,
        x2: PointSpec,
        set1: SetSpec,
        set2: SetSpec,
    },
    /// Coarse-monotonicity audit of the lattice norm-ball family.
    MonotonicityAudit {
        eps_grid: Vec<f64>,
        t_grid: Vec<f64>,
        samples_per_eps: usize,
    },
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum RatioDomain {
    /// On a congruence quotient of the given modulus.
    Quotient,
    /// On the punctured plane.
    Plane,
}

fn default_generators() -> Vec<[i64; 4]> {
    vec![[1, 1, 0, 1], [1, 0, 1, 1]]
}

fn default_rotation_cos() -> f64 {
    0.6
}

fn default_ratio_modulus() -> u32 {
    5
}

fn default_beta() -> f64 {
    1.0
}

/// A point in configuration form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointSpec {
    Index(usize),
    Xy([f64; 2]),
    Xyz([f64; 3]),
    Angle(f64),
}

impl PointSpec {
    pub fn to_point(&self) -> ergolab::spaces::Point {
        match self {
            PointSpec::Index(i) => ergolab::spaces::Point::Index(*i),
            PointSpec::Xy(v) => ergolab::spaces::Point::Vec2(*v),
            PointSpec::Xyz(v) => ergolab::spaces::Point::Vec3(*v),
            PointSpec::Angle(a) => ergolab::spaces::Point::Angle(*a),
        }
    }
}

/// A test function in configuration form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    Bump { center: PointSpec, radius: f64, exponent: f64 },
    /// Continuously differentiable bump; unit Lipschitz class.
    SmoothBump { center: PointSpec, radius: f64 },
    Indicator { indices: Vec<usize> },
    /// The alternating vector of the quotient, when present.
    Parity,
}

/// An orbit-count target set in configuration form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SetSpec {
    Ball { center: PointSpec, radius: f64 },
    Sector { r_lo: f64, r_hi: f64, phi_lo: f64, phi_hi: f64 },
    Indices { indices: Vec<usize> },
}

impl SetSpec {
    pub fn to_orbit_set(&self) -> ergolab::ergodic::OrbitSet {
        match self {
            SetSpec::Ball { center, radius } => {
                ergolab::ergodic::OrbitSet::Ball { center: center.to_point(), radius: *radius }
            }
            SetSpec::Sector { r_lo, r_hi, phi_lo, phi_hi } => ergolab::ergodic::OrbitSet::Sector {
                r_lo: *r_lo,
                r_hi: *r_hi,
                phi_lo: *phi_lo,
                phi_hi: *phi_hi,
            },
            SetSpec::Indices { indices } => ergolab::ergodic::OrbitSet::Indices(indices.clone()),
        }
    }
}

/// Severity of a validation finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

fn err(message: impl Into<String>) -> Diagnostic {
    Diagnostic { severity: Severity::Error, message: message.into() }
}

fn warn(message: impl Into<String>) -> Diagnostic {
    Diagnostic { severity: Severity::Warning, message: message.into() }
}

/// Parse a config document, rejecting unknown fields.
pub fn parse(json: &str) -> Result<ExperimentConfig> {
    serde_json::from_str(json).map_err(|e| Error::Config(format!("config schema: {e}")))
}

/// Semantic validation and budget estimates. Returns diagnostics only;
/// callers decide whether errors abort.
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if config.budget == 0 {
        out.push(err("budget must be positive"));
    }
    match &config.kind {
        ExperimentKind::FreeQuotient { modulus, generators, max_radius, functions, chain_moduli } => {
            if generators.len() < 2 {
                out.push(err("at least two generators required"));
            }
            let rank = generators.len().max(2);
            let predicted = ball_size(rank, *max_radius);
            if predicted > config.budget as u128 {
                out.push(warn(format!(
                    "predicted word-ball size {predicted} exceeds budget {}",
                    config.budget
                )));
            }
            for g in generators {
                if Sl2Raw::new(g[0], g[1], g[2], g[3]).is_err() {
                    out.push(err(format!("generator {g:?} is not unimodular")));
                }
            }
            match CongruenceQuotient::new(*modulus) {
                Ok(q) => {
                    for f in functions {
                        validate_function_indices(f, q.order(), &mut out);
                    }
                }
                Err(e) => out.push(err(format!("modulus: {e}"))),
            }
            if !chain_moduli.is_empty() {
                match build_chain(generators, chain_moduli) {
                    Ok(_) => {}
                    Err(e) => out.push(err(format!("chain: {e}"))),
                }
            }
        }
        ExperimentKind::FreeSphere2 { rotation_cos, max_radius, functions, grid_n, sample_n } => {
            if rotation_cos.abs() >= 1.0 {
                out.push(err("rotation cosine must lie strictly inside (-1, 1)"));
            }
            let predicted = ball_size(3, *max_radius);
            if predicted > config.budget as u128 {
                out.push(warn(format!(
                    "predicted word-ball size {predicted} exceeds budget {}",
                    config.budget
                )));
            }
            if *grid_n == 0 || *sample_n == 0 {
                out.push(err("grid and sample sizes must be positive"));
            }
            if functions.is_empty() {
                out.push(err("at least one test function required"));
            }
        }
        ExperimentKind::LatticeQuotient { modulus, t_grid, functions } => {
            if let Err(e) = CongruenceQuotient::new(*modulus) {
                out.push(err(format!("modulus: {e}")));
            }
            check_t_grid(t_grid, config.budget, &mut out);
            if functions.is_empty() {
                out.push(err("at least one test function required"));
            }
        }
        ExperimentKind::PlaneInfinite {
            annulus_r,
            alpha,
            beta,
            t_grid,
            start_points,
            radial_bins,
            angular_bins,
            window,
        } => {
            if alpha.is_none() {
                out.push(err("plane_infinite requires the normalization exponent alpha"));
            }
            if *beta < 1.0 {
                out.push(err("beta must be at least one"));
            }
            if *annulus_r < 1.5 {
                out.push(err("annulus radius must be at least 1.5"));
            }
            if start_points.is_empty() {
                out.push(err("at least one start point required"));
            }
            for p in start_points {
                if p[0] * p[0] + p[1] * p[1] == 0.0 {
                    out.push(err("start points must avoid the origin"));
                }
            }
            if *radial_bins == 0 || *angular_bins == 0 {
                out.push(err("bin counts must be positive"));
            }
            if window[0] >= window[1] || window[0] < 1.0 / annulus_r || window[1] > *annulus_r {
                out.push(err("histogram window must be an increasing pair inside the annulus"));
            }
            check_t_grid(t_grid, config.budget, &mut out);
        }
        ExperimentKind::BoundaryCircle { t_grid, functions, sample_n } => {
            check_t_grid(t_grid, config.budget, &mut out);
            if functions.is_empty() {
                out.push(err("at least one test function required"));
            }
            if *sample_n == 0 {
                out.push(err("sample size must be positive"));
            }
        }
        ExperimentKind::Desitter { ball_radius, alpha, t_grid, radial_bins } => {
            if alpha.is_none() {
                out.push(err("desitter requires the normalization exponent alpha"));
            }
            if *ball_radius <= 0.0 {
                out.push(err("ball radius must be positive"));
            }
            if *radial_bins == 0 {
                out.push(err("bin count must be positive"));
            }
            check_t_grid(t_grid, config.budget, &mut out);
        }
        ExperimentKind::Ratio { domain, modulus, t_grid, x1, x2, set1, set2 } => {
            if *domain == RatioDomain::Quotient {
                if let Err(e) = CongruenceQuotient::new(*modulus) {
                    out.push(err(format!("modulus: {e}")));
                }
            }
            match domain {
                RatioDomain::Plane => {
                    for (label, p) in [("x1", x1), ("x2", x2)] {
                        if !matches!(p, PointSpec::Xy(_)) {
                            out.push(err(format!("{label} must be a plane point for the plane domain")));
                        }
                    }
                    for (label, s) in [("set1", set1), ("set2", set2)] {
                        if matches!(s, SetSpec::Indices { .. }) {
                            out.push(err(format!("{label}: index sets need the quotient domain")));
                        }
                    }
                    check_t_grid(t_grid, config.budget, &mut out);
                }
                RatioDomain::Quotient => {
                    for (label, p) in [("x1", x1), ("x2", x2)] {
                        if !matches!(p, PointSpec::Index(_)) {
                            out.push(err(format!("{label} must be a coset index for the quotient domain")));
                        }
                    }
                    for &t in t_grid {
                        if t < 0.0 || t.fract() != 0.0 {
                            out.push(err("quotient ratio time grid must be integer radii"));
                        }
                    }
                }
            }
            if t_grid.is_empty() {
                out.push(err("time grid must be nonempty"));
            }
        }
        ExperimentKind::MonotonicityAudit { eps_grid, t_grid, samples_per_eps } => {
            if eps_grid.is_empty() || t_grid.is_empty() {
                out.push(err("epsilon and time grids must be nonempty"));
            }
            if eps_grid.iter().any(|&e| e <= 0.0 || e > 1.0) {
                out.push(err("epsilon values must lie in (0, 1]"));
            }
            if *samples_per_eps == 0 {
                out.push(err("samples per epsilon must be positive"));
            }
            check_t_grid(t_grid, config.budget, &mut out);
        }
    }
    out
}

fn check_t_grid(t_grid: &[f64], budget: u64, out: &mut Vec<Diagnostic>) {
    if t_grid.is_empty() {
        out.push(err("time grid must be nonempty"));
        return;
    }
    if t_grid.windows(2).any(|w| w[1] <= w[0]) {
        out.push(err("time grid must strictly increase"));
    }
    if let Some(&t_max) = t_grid.last() {
        // quadratic norm-ball growth estimate
        let predicted = 6.0 * (2.0 * t_max).exp();
        if predicted > budget as f64 {
            out.push(warn(format!(
                "predicted lattice ball size {predicted:.3e} at t = {t_max} exceeds budget {budget}"
            )));
        }
    }
}

fn validate_function_indices(f: &FunctionSpec, degree: usize, out: &mut Vec<Diagnostic>) {
    match f {
        FunctionSpec::Bump { center, radius, exponent } => {
            if let PointSpec::Index(i) = center {
                if *i >= degree {
                    out.push(err(format!("bump center {i} outside the coset space")));
                }
            }
            if *radius <= 0.0 {
                out.push(err("bump radius must be positive"));
            }
            if !(*exponent > 0.0 && *exponent <= 1.0) {
                out.push(err("bump exponent must lie in (0, 1]"));
            }
        }
        FunctionSpec::SmoothBump { center, radius } => {
            if let PointSpec::Index(i) = center {
                if *i >= degree {
                    out.push(err(format!("bump center {i} outside the coset space")));
                }
            }
            if *radius <= 0.0 {
                out.push(err("bump radius must be positive"));
            }
        }
        FunctionSpec::Indicator { indices } => {
            if indices.iter().any(|&i| i >= degree) {
                out.push(err("indicator index outside the coset space"));
            }
        }
        FunctionSpec::Parity => {}
    }
}

/// Build the subgroup chain of congruence levels for the given
/// generators; nestedness is checked exactly inside.
pub fn build_chain(
    generators: &[[i64; 4]],
    moduli: &[u32],
) -> Result<ergolab::freegroup::SubgroupChain> {
    let gens: Vec<Sl2Raw> = generators
        .iter()
        .map(|g| Sl2Raw::new(g[0], g[1], g[2], g[3]))
        .collect::<Result<_>>()?;
    let levels = moduli
        .iter()
        .map(|&m| {
            let q = CongruenceQuotient::new(m)?;
            q.left_translation_hom(&gens)
        })
        .collect::<Result<Vec<_>>>()?;
    ergolab::freegroup::SubgroupChain::new(levels)
}
