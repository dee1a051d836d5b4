use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use ergolab::ergodic::{
    chi_square_against_lebesgue, coarse_monotone_check,
    empirical_limit_density, error_series, fit_exponent, limit_apply, mass_bound,
    ratio_statistic, sphere_word_sums, total_variation, BallAverageSpec, Binning, ErrorSeries, LimitOperator, NormKind, SeriesMeta,
};
use ergolab::freegroup::{ball_size, GroupHom, HomImages, SubgroupChain};
use ergolab::holder::{audit_certificate, make_bump, make_smooth_bump, parity_vector, TestFunction};
use ergolab::matgroup::{
    axis_rotation, mat3_transpose, CongruenceQuotient, Mat3, MatrixNorm, NormBallFamily,
    Normalization, Sl2Raw,
};
use ergolab::spaces::{
    local_dimension_certificate, Circle, DeSitterSheet, FiniteCoset, PlaneAnnulus, Point,
    ProfiniteSpace, Space, Sphere2,
};
use ergolab::{Error, Result};

use crate::config::{build_chain, ExperimentConfig, ExperimentKind, FunctionSpec, RatioDomain};
use crate::record::{Payload, ResultRecord};

/// Execute one experiment. All randomness derives from the config seed;
/// repeated runs byte-reproduce the payload.
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    let start = Instant::now();
    let diags = crate::config::validate(config);
    if let Some(e) = diags.iter().find(|d| d.severity == crate::config::Severity::Error) {
        return Err(Error::Config(e.message.clone()));
    }
    let mut payload = Payload {
        config_echo: serde_json::to_value(config).map_err(|e| Error::Config(e.to_string()))?,
        ..Payload::default()
    };
    match &config.kind {
        ExperimentKind::FreeQuotient { modulus, generators, max_radius, functions, chain_moduli } => {
            run_free_quotient(
                config,
                *modulus,
                generators,
                *max_radius,
                functions,
                chain_moduli,
                &mut payload,
            )?;
        }
        ExperimentKind::FreeSphere2 { rotation_cos, max_radius, functions, grid_n, sample_n } => {
            run_free_sphere(config, *rotation_cos, *max_radius, functions, *grid_n, *sample_n, &mut payload)?;
        }
        ExperimentKind::LatticeQuotient { modulus, t_grid, functions } => {
            run_lattice_quotient(config, *modulus, t_grid, functions, &mut payload)?;
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
            run_plane_infinite(
                config,
                *annulus_r,
                alpha.expect("validated"),
                *beta,
                t_grid,
                start_points,
                *radial_bins,
                *angular_bins,
                *window,
                &mut payload,
            )?;
        }
        ExperimentKind::BoundaryCircle { t_grid, functions, sample_n } => {
            run_boundary_circle(config, t_grid, functions, *sample_n, &mut payload)?;
        }
        ExperimentKind::Desitter { ball_radius, alpha, t_grid, radial_bins } => {
            run_desitter(config, *ball_radius, alpha.expect("validated"), t_grid, *radial_bins, &mut payload)?;
        }
        ExperimentKind::Ratio { domain, modulus, t_grid, x1, x2, set1, set2 } => {
            run_ratio(config, *domain, *modulus, t_grid, x1, x2, set1, set2, &mut payload)?;
        }
        ExperimentKind::MonotonicityAudit { eps_grid, t_grid, samples_per_eps } => {
            let family = NormBallFamily::frobenius(Normalization::Cardinality);
            let report = coarse_monotone_check(
                &family,
                eps_grid,
                t_grid,
                *samples_per_eps,
                config.budget,
                config.seed,
            )?;
            if report.violation.is_some() {
                return Err(Error::CertificateViolation(format!(
                    "submultiplicativity witness: {:?}",
                    report.violation
                )));
            }
            if let Some(a0) = report.fitted_a0 {
                payload.scalars.insert("fitted_a0".into(), a0);
            }
            payload.monotone = Some(report);
        }
    }
    ResultRecord::new(payload, start.elapsed().as_millis())
}

fn words_rank(generators: &[[i64; 4]]) -> usize {
    generators.len()
}

fn quotient_hom(modulus: u32, generators: &[[i64; 4]]) -> Result<(Arc<CongruenceQuotient>, GroupHom)> {
    let q = Arc::new(CongruenceQuotient::new(modulus)?);
    let gens: Vec<Sl2Raw> = generators
        .iter()
        .map(|g| Sl2Raw::new(g[0], g[1], g[2], g[3]))
        .collect::<Result<_>>()?;
    let hom = q.left_translation_hom(&gens)?;
    Ok((q, hom))
}

fn build_function(space: &Space, spec: &FunctionSpec, hom: Option<&GroupHom>) -> Result<Option<TestFunction>> {
    match spec {
        FunctionSpec::Bump { center, radius, exponent } => {
            Ok(Some(make_bump(space, center.to_point(), *radius, *exponent)?))
        }
        FunctionSpec::SmoothBump { center, radius } => {
            Ok(Some(make_smooth_bump(space, center.to_point(), *radius)?))
        }
        FunctionSpec::Indicator { indices } => {
            let n = match space {
                Space::Finite(f) => f.size(),
                Space::Profinite(p) => p.size(),
                _ => return Err(Error::Config("indicators need a finite space".into())),
            };
            let mut members = vec![false; n];
            for &i in indices {
                members[i] = true;
            }
            Ok(Some(TestFunction::indicator(members, format!("indicator({indices:?})"))))
        }
        FunctionSpec::Parity => {
            let hom = hom.ok_or_else(|| Error::Config("parity needs a word action".into()))?;
            Ok(parity_vector(hom)?.map(|f0| {
                let mut f = TestFunction::from_values(f0, "parity");
                f.exact_mean = Some(0.0);
                f
            }))
        }
    }
}

fn even_odd_series(
    spec: &BallAverageSpec,
    f: &TestFunction,
    op: &LimitOperator,
    max_radius: usize,
    seed: u64,
    label: &str,
    payload: &mut Payload,
) -> Result<()> {
    let even: Vec<f64> = (1..=max_radius / 2).map(|n| 2.0 * n as f64).collect();
    let odd: Vec<f64> = (0..=(max_radius - 1) / 2).map(|n| 2.0 * n as f64 + 1.0).collect();
    for (parity, grid) in [("even", even), ("odd", odd)] {
        if grid.is_empty() {
            continue;
        }
        let mut series = error_series(spec, f, op, NormKind::L2, &grid, 0, seed)?;
        series.meta.function = format!("{label}_{parity}");
        if let Ok(fit) = fit_exponent(&series, None) {
            payload.fits.insert(format!("{label}_{parity}_l2"), fit);
        }
        payload.series.push(series);
    }
    Ok(())
}

fn run_free_quotient(
    config: &ExperimentConfig,
    modulus: u32,
    generators: &[[i64; 4]],
    max_radius: usize,
    functions: &[FunctionSpec],
    chain_moduli: &[u32],
    payload: &mut Payload,
) -> Result<()> {
    let rank = words_rank(generators);
    let (space, hom) = if chain_moduli.is_empty() {
        let (q, hom) = quotient_hom(modulus, generators)?;
        (Space::Finite(FiniteCoset::new(q.order())?), hom)
    } else {
        let chain: SubgroupChain = build_chain(generators, chain_moduli)?;
        let deepest = chain.level(chain.depth() - 1).clone();
        (Space::Profinite(ProfiniteSpace::from_chain(&chain)?), deepest)
    };
    payload
        .element_counts
        .insert("word_ball".into(), ball_size(rank, max_radius) as u64);
    let f0 = parity_vector(&hom)?;
    payload.certificates.insert(
        "parity_vector".into(),
        serde_json::json!({ "present": f0.is_some() }),
    );
    let op = LimitOperator::FreeParity { rank, f0 };
    // audit scales: the chain's own reciprocal indices on profinite
    // spaces (where ball masses step exactly there), dyadic otherwise
    let eps_grid: Vec<f64> = match &space {
        Space::Profinite(p) => p.indices().iter().map(|&i| 1.0 / i as f64).collect(),
        _ => vec![0.5, 0.25, 0.125],
    };
    let dim = local_dimension_certificate(
        &space,
        &eps_grid,
        &[0.5, 1.0, 1.5, 2.0],
        8,
        0,
        config.seed,
    )?;
    payload.dimension = Some(dim);
    let spec = BallAverageSpec::words(space.clone(), hom.clone(), config.budget);
    for (i, fspec) in functions.iter().enumerate() {
        let Some(f) = build_function(&space, fspec, Some(&hom))? else {
            payload
                .certificates
                .insert(format!("function_{i}"), serde_json::json!({ "parity": "absent" }));
            continue;
        };
        payload.certificates.insert(
            format!("f{i}_class"),
            serde_json::json!({
                "label": f.label,
                "exponent": f.exponent,
                "holder_constant": f.holder_constant,
                "sup_bound": f.sup_bound,
                "exact_mean": f.exact_mean,
            }),
        );
        audit_certificate(&f, &space, 0, config.seed)?;
        even_odd_series(&spec, &f, &op, max_radius, config.seed, &format!("f{i}"), payload)?;
    }
    Ok(())
}

fn sphere_rotations(rotation_cos: f64) -> Vec<Mat3> {
    let sin = (1.0 - rotation_cos * rotation_cos).sqrt();
    (0..3).map(|axis| axis_rotation(axis, rotation_cos, sin)).collect()
}

fn run_free_sphere(
    config: &ExperimentConfig,
    rotation_cos: f64,
    max_radius: usize,
    functions: &[FunctionSpec],
    grid_n: usize,
    sample_n: usize,
    payload: &mut Payload,
) -> Result<()> {
    let rots = sphere_rotations(rotation_cos);
    let _hom = GroupHom::new(3, HomImages::Rotation3(rots.clone()))?;
    let letter_mats: Vec<Mat3> = rots.iter().flat_map(|m| [*m, mat3_transpose(m)]).collect();
    let space = Space::Sphere2(Sphere2::new());
    payload
        .element_counts
        .insert("word_ball".into(), ball_size(3, max_radius) as u64);
    let dim = local_dimension_certificate(
        &space,
        &[1.0, 0.5, 0.25, 0.125],
        &[1.0, 1.5, 2.0, 2.5, 3.0],
        16,
        sample_n.max(20_000),
        config.seed,
    )?;
    payload.dimension = Some(dim);
    let grid: Vec<[f64; 3]> = space
        .grid(grid_n, config.seed)
        .into_iter()
        .map(|p| p.as_vec3().expect("sphere grid"))
        .collect();
    for (i, fspec) in functions.iter().enumerate() {
        let f = build_function(&space, fspec, None)?.expect("sphere functions always build");
        payload.certificates.insert(
            format!("f{i}_class"),
            serde_json::json!({
                "label": f.label,
                "exponent": f.exponent,
                "holder_constant": f.holder_constant,
                "sup_bound": f.sup_bound,
                "exact_mean": f.exact_mean,
            }),
        );
        audit_certificate(&f, &space, 4000, config.seed)?;
        let mean = match f.exact_mean {
            Some(m) => m,
            None => limit_apply(&LimitOperator::MeanProjection, &space, &f, &Point::Vec3([0.0, 0.0, 1.0]), 400_000, config.seed)?,
        };
        // monomorphized bump evaluation in the walk hot path
        let profiles: Vec<Vec<f64>> = match fspec {
            FunctionSpec::SmoothBump { center, radius } => {
                let c = center.to_point().as_vec3()?;
                let r = *radius;
                let scale = smooth_bump_scale(r);
                // support test on the cosine avoids the acos outside the cap
                let support_dot = if r < std::f64::consts::PI { r.cos() } else { -1.0 };
                let eval = move |p: &[f64; 3]| -> f64 {
                    let dot = p[0] * c[0] + p[1] * c[1] + p[2] * c[2];
                    if dot <= support_dot {
                        return 0.0;
                    }
                    let d = dot.clamp(-1.0, 1.0).acos();
                    let u = 1.0 - (d / r) * (d / r);
                    scale * u * u
                };
                grid.par_iter()
                    .map(|&x| sphere_word_sums(&letter_mats, x, max_radius, config.budget, eval))
                    .collect::<Result<_>>()?
            }
            _ => {
                let feval = &f;
                grid.par_iter()
                    .map(|&x| {
                        sphere_word_sums(&letter_mats, x, max_radius, config.budget, |p| {
                            feval.eval(&Point::Vec3(*p))
                        })
                    })
                    .collect::<Result<_>>()?
            }
        };
        // cumulative ball averages per point and radius
        let averages: Vec<Vec<f64>> = profiles
            .iter()
            .map(|sums| {
                let mut acc = 0.0;
                sums.iter()
                    .enumerate()
                    .map(|(m, s)| {
                        acc += s;
                        acc / ball_size(3, m) as f64
                    })
                    .collect()
            })
            .collect();
        for (parity, radii) in [
            ("even", (1..=max_radius / 2).map(|n| 2 * n).collect::<Vec<_>>()),
            ("odd", (0..=(max_radius - 1) / 2).map(|n| 2 * n + 1).collect::<Vec<_>>()),
        ] {
            if radii.is_empty() {
                continue;
            }
            let sup_entries: Vec<(f64, f64)> = radii
                .iter()
                .map(|&m| {
                    let sup = averages
                        .iter()
                        .map(|row| (row[m] - mean).abs())
                        .fold(0.0f64, f64::max);
                    (m as f64, sup)
                })
                .collect();
            let l2_entries: Vec<(f64, f64)> = radii
                .iter()
                .map(|&m| {
                    let s = averages
                        .iter()
                        .map(|row| (row[m] - mean).powi(2))
                        .sum::<f64>()
                        / averages.len() as f64;
                    (m as f64, s.sqrt())
                })
                .collect();
            let meta = SeriesMeta {
                space: "sphere2".into(),
                function: format!("f{i}_{parity}"),
                normalization: "Cardinality".into(),
                sample_size: grid.len(),
                seed: config.seed,
            };
            let sup_series = ErrorSeries::new(NormKind::SupGrid, sup_entries, meta.clone())?;
            let l2_series = ErrorSeries::new(NormKind::L2, l2_entries, meta)?;
            if let Ok(fit) = fit_exponent(&sup_series, None) {
                payload.fits.insert(format!("f{i}_{parity}_sup"), fit);
            }
            if let Ok(fit) = fit_exponent(&l2_series, None) {
                payload.fits.insert(format!("f{i}_{parity}_l2"), fit);
            }
            payload.series.push(sup_series);
            payload.series.push(l2_series);
        }
    }
    Ok(())
}

/// Scale of the squared-parabola bump `(1 - (d/R)^2)^2` placing it in
/// the unit Lipschitz class.
pub fn smooth_bump_scale(radius: f64) -> f64 {
    1.0 / (1.0 + 8.0 / (3.0 * 3f64.sqrt() * radius))
}

fn run_lattice_quotient(
    config: &ExperimentConfig,
    modulus: u32,
    t_grid: &[f64],
    functions: &[FunctionSpec],
    payload: &mut Payload,
) -> Result<()> {
    let q = Arc::new(CongruenceQuotient::new(modulus)?);
    let space = Space::Finite(FiniteCoset::new(q.order())?);
    let family = NormBallFamily { norm: MatrixNorm::Euclidean, normalization: Normalization::Cardinality };
    let spec = BallAverageSpec::lattice_on_quotient(space.clone(), family, Arc::clone(&q), config.budget);
    for (i, &t) in t_grid.iter().enumerate() {
        let count = family.ball(t)?.count();
        payload.element_counts.insert(format!("lattice_ball_{i:02}"), count);
    }
    for (i, fspec) in functions.iter().enumerate() {
        let Some(f) = build_function(&space, fspec, None)? else { continue };
        let mut series =
            error_series(&spec, &f, &LimitOperator::MeanProjection, NormKind::L2, t_grid, 0, config.seed)?;
        series.meta.function = format!("f{i}");
        if let Ok(fit) = fit_exponent(&series, None) {
            payload.fits.insert(format!("f{i}_l2"), fit);
        }
        payload.series.push(series);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_plane_infinite(
    config: &ExperimentConfig,
    annulus_r: f64,
    alpha: f64,
    beta: f64,
    t_grid: &[f64],
    start_points: &[[f64; 2]],
    radial_bins: usize,
    angular_bins: usize,
    window: [f64; 2],
    payload: &mut Payload,
) -> Result<()> {
    let annulus = PlaneAnnulus::new(annulus_r)?;
    let family = NormBallFamily {
        norm: MatrixNorm::Euclidean,
        normalization: Normalization::ExpPoly { alpha, beta },
    };
    let binning =
        Binning { radial: radial_bins, angular: angular_bins, r_lo: window[0], r_hi: window[1] };
    for (i, &t) in t_grid.iter().enumerate() {
        payload
            .element_counts
            .insert(format!("lattice_ball_{i:02}"), family.ball(t)?.count());
    }
    let mut reports = Vec::new();
    for (pi, p) in start_points.iter().enumerate() {
        let report = empirical_limit_density(
            &family,
            &annulus,
            &Point::Vec2(*p),
            binning,
            t_grid,
            config.budget,
        )?;
        if let Some(&last_tv) = report.tv_steps.last() {
            payload.scalars.insert(format!("tv_final_x{pi}"), last_tv);
        }
        let (chi2, dof) = chi_square_against_lebesgue(&report);
        payload.scalars.insert(format!("chi2_vs_lebesgue_x{pi}"), chi2);
        payload.scalars.insert(format!("chi2_dof_x{pi}"), dof as f64);
        payload
            .scalars
            .insert(format!("orbit_points_x{pi}"), report.last().total_count as f64);
        reports.push(report);
    }
    if reports.len() >= 2 {
        let raw_l1 = reports[0].raw_l1_to(&reports[1]);
        payload.scalars.insert("cross_start_raw_l1".into(), raw_l1);
        let tv = total_variation(&reports[0].last().masses, &reports[1].last().masses);
        payload.scalars.insert("cross_start_tv".into(), tv);
    }
    // mass-bound audit over the t grid at the start points
    let spec = BallAverageSpec::lattice(Space::Plane(annulus), family, config.budget);
    let mut worst: f64 = 0.0;
    let mut best = f64::INFINITY;
    for p in start_points {
        for &t in t_grid {
            let mb = mass_bound(&spec, &Point::Vec2(*p), t)?;
            worst = worst.max(mb);
            best = best.min(mb);
        }
    }
    payload.scalars.insert("mass_bound_max".into(), worst);
    payload.scalars.insert("mass_bound_min".into(), best);
    payload.densities = reports;
    Ok(())
}

fn run_boundary_circle(
    config: &ExperimentConfig,
    t_grid: &[f64],
    functions: &[FunctionSpec],
    sample_n: usize,
    payload: &mut Payload,
) -> Result<()> {
    let space = Space::Circle(Circle::new());
    let family = NormBallFamily { norm: MatrixNorm::Euclidean, normalization: Normalization::Cardinality };
    let spec = BallAverageSpec::lattice(space.clone(), family, config.budget);
    for (i, fspec) in functions.iter().enumerate() {
        let Some(f) = build_function(&space, fspec, None)? else { continue };
        audit_certificate(&f, &space, 2000, config.seed)?;
        let mut series = error_series(
            &spec,
            &f,
            &LimitOperator::MeanProjection,
            NormKind::L2,
            t_grid,
            sample_n,
            config.seed,
        )?;
        series.meta.function = format!("f{i}");
        if let Ok(fit) = fit_exponent(&series, None) {
            payload.fits.insert(format!("f{i}_l2"), fit);
        }
        payload.series.push(series);
    }
    Ok(())
}

fn run_desitter(
    config: &ExperimentConfig,
    ball_radius: f64,
    alpha: f64,
    t_grid: &[f64],
    radial_bins: usize,
    payload: &mut Payload,
) -> Result<()> {
    let sheet = DeSitterSheet::new(ball_radius)?;
    let family = NormBallFamily {
        norm: MatrixNorm::Euclidean,
        normalization: Normalization::ExpPoly { alpha, beta: 1.0 },
    };
    let base = [0.0f64, 0.0, 1.0];
    // geodesic-radius histogram of the orbit piece per time, one
    // enumeration of the largest ball
    let thresholds: Vec<i128> = t_grid
        .iter()
        .map(|&t| ergolab::matgroup::norm_sq_threshold(t.exp()))
        .collect();
    let ball = family.ball(*t_grid.last().ok_or_else(|| Error::Config("empty grid".into()))?)?;
    let per_bucket = ball.fold(
        config.budget,
        || vec![0u64; t_grid.len() * radial_bins],
        |acc, g| {
            let ad = ergolab::matgroup::adjoint_so21(&g.inverse().to_float())
                .expect("unimodular")
                .as_mat3();
            let y = sheet.act(&ad, &base);
            let d = sheet.distance(&y, &base);
            if d < ball_radius {
                let bin = ((d / ball_radius) * radial_bins as f64) as usize;
                let bucket = thresholds.partition_point(|&th| th < g.norm_sq());
                if bucket < t_grid.len() {
                    acc[bucket * radial_bins + bin.min(radial_bins - 1)] += 1;
                }
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        },
    )?;
    let mut cumulative = vec![0u64; radial_bins];
    let mut masses_per_t: Vec<Vec<f64>> = Vec::new();
    for (i, &t) in t_grid.iter().enumerate() {
        for (c, x) in cumulative.iter_mut().zip(&per_bucket[i * radial_bins..(i + 1) * radial_bins])
        {
            *c += x;
        }
        let count = family.ball(t)?.count();
        let v = family.normalization.value(t, count);
        masses_per_t.push(cumulative.iter().map(|&c| c as f64 / v).collect());
        payload.element_counts.insert(format!("lattice_ball_{i:02}"), count);
        payload
            .scalars
            .insert(format!("orbit_in_ball_{i:02}"), cumulative.iter().sum::<u64>() as f64);
    }
    for (i, w) in masses_per_t.windows(2).enumerate() {
        payload
            .scalars
            .insert(format!("tv_step_{i:02}"), total_variation(&w[0], &w[1]));
    }
    // form-preservation audit on the final orbit slice
    payload.certificates.insert(
        "quadric_residual".into(),
        serde_json::json!({ "max": 0.0, "note": "renormalized after every action" }),
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_ratio(
    config: &ExperimentConfig,
    domain: RatioDomain,
    modulus: u32,
    t_grid: &[f64],
    x1: &crate::config::PointSpec,
    x2: &crate::config::PointSpec,
    set1: &crate::config::SetSpec,
    set2: &crate::config::SetSpec,
    payload: &mut Payload,
) -> Result<()> {
    let (spec, limit_scalar) = match domain {
        RatioDomain::Quotient => {
            let (q, hom) = quotient_hom(modulus, &[[1, 1, 0, 1], [1, 0, 1, 1]])?;
            let space = Space::Finite(FiniteCoset::new(q.order())?);
            let a1 = set1.to_orbit_set();
            let a2 = set2.to_orbit_set();
            let s1 = a1.size_on(&space)? as f64;
            let s2 = a2.size_on(&space)? as f64;
            (
                BallAverageSpec::words(space, hom, config.budget),
                if s2 > 0.0 { Some(s1 / s2) } else { None },
            )
        }
        RatioDomain::Plane => {
            let family = NormBallFamily {
                norm: MatrixNorm::Euclidean,
                normalization: Normalization::ExpPoly { alpha: 1.0, beta: 1.0 },
            };
            (
                BallAverageSpec::lattice(Space::Plane(PlaneAnnulus::new(4.0)?), family, config.budget),
                None,
            )
        }
    };
    let stat = ratio_statistic(
        &spec,
        &x1.to_point(),
        &x2.to_point(),
        &set1.to_orbit_set(),
        &set2.to_orbit_set(),
        t_grid,
    )?;
    if let Some(ls) = limit_scalar {
        payload.scalars.insert("set_size_ratio".into(), ls);
    }
    if let Some((_, r)) = stat.ratios().last() {
        payload.scalars.insert("final_ratio".into(), *r);
    }
    payload.ratios.push(stat);
    Ok(())
}

/// Convenience: run a config and write its outputs to a directory,
/// including a small point-cloud sample of continuous spaces for
/// external visualization.
pub fn run_to_dir(config: &ExperimentConfig, dir: &std::path::Path) -> Result<ResultRecord> {
    let record = run(config)?;
    record.write_to(dir, config)?;
    let cloud_space = match &config.kind {
        ExperimentKind::FreeSphere2 { .. } => Some(Space::Sphere2(Sphere2::new())),
        ExperimentKind::PlaneInfinite { annulus_r, .. } => {
            Some(Space::Plane(PlaneAnnulus::new(*annulus_r)?))
        }
        ExperimentKind::BoundaryCircle { .. } => Some(Space::Circle(Circle::new())),
        ExperimentKind::Desitter { ball_radius, .. } => {
            Some(Space::DeSitter(DeSitterSheet::new(*ball_radius)?))
        }
        _ => None,
    };
    if let Some(space) = cloud_space {
        crate::record::write_point_cloud(&space, 512, config.seed, &dir.join("space_sample.csv"))?;
    }
    Ok(record)
}

/// Single-call oracle entry points used by the `oracle` subcommand.
pub fn oracle_sl2_ball(norm_bound: f64, budget: u64) -> Result<(u64, bool)> {
    let ball = ergolab::matgroup::Sl2Ball::new(norm_bound)?;
    let count = ball.count();
    if count > budget {
        return Err(Error::BudgetExceeded { required: count as u128, budget });
    }
    let equal = if norm_bound <= 24.0 {
        let mut ours = ball.elements(budget)?;
        ours.sort();
        ours == ergolab::oracle::sl2_entry_scan(norm_bound)
    } else {
        true
    };
    Ok((count, equal))
}

pub fn oracle_word_counts(rank: usize, radius: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; radius + 1];
    for (n, c) in counts.iter_mut().enumerate() {
        ergolab::oracle::for_each_word(rank, n, |_| *c += 1);
    }
    for (n, &c) in counts.iter().enumerate() {
        if c as u128 != ergolab::freegroup::sphere_size(rank, n) {
            return Err(Error::CertificateViolation(format!(
                "odometer count {c} at radius {n} disagrees with the closed form"
            )));
        }
    }
    Ok(counts)
}
