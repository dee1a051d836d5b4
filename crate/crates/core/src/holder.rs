//! Certified Hölder test functions: evaluators paired with an exponent,
//! a Hölder constant and a sup bound that are constructed analytically
//! and only audited by sampling. Rate predictors consume the exponents
//! as exact inputs, so a certificate breach is a hard failure.

use std::sync::Arc;

use crate::freegroup::{sign_character, GroupHom, HomImages, ReducedWord};
use crate::spaces::{Point, Space};
use crate::{Error, Result};

/// An evaluable function with a certified Hölder class membership.
#[derive(Clone)]
pub struct TestFunction {
    evaluator: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    /// Support is contained in the filtration ball of this radius.
    pub support_radius: f64,
    /// Hölder exponent `a` in `(0, 1]`.
    pub exponent: f64,
    /// Certified constant: `|f(x) - f(y)| <= holder_constant * d(x,y)^a`.
    pub holder_constant: f64,
    pub sup_bound: f64,
    /// Exact mean against the space measure, when a closed form exists.
    pub exact_mean: Option<f64>,
    /// Indicators are legal in ratio statistics and transitive-action
    /// experiments only; they carry no Hölder certificate.
    pub is_indicator: bool,
    pub label: String,
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("exponent", &self.exponent)
            .field("holder_constant", &self.holder_constant)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

impl TestFunction {
    /// General constructor from an evaluator and a certificate supplied
    /// by the caller.
    pub fn new(
        evaluator: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        support_radius: f64,
        exponent: f64,
        holder_constant: f64,
        sup_bound: f64,
        exact_mean: Option<f64>,
        label: impl Into<String>,
    ) -> TestFunction {
        TestFunction {
            evaluator: Arc::new(evaluator),
            support_radius,
            exponent,
            holder_constant,
            sup_bound,
            exact_mean,
            is_indicator: false,
            label: label.into(),
        }
    }

    /// Constant function with a zero Hölder constant.
    pub fn constant(c: f64, label: impl Into<String>) -> TestFunction {
        TestFunction::new(move |_| c, f64::INFINITY, 1.0, 0.0, c.abs(), Some(c), label)
    }

    pub fn eval(&self, x: &Point) -> f64 {
        (self.evaluator)(x)
    }

    /// Membership in the unit Hölder class: sup norm plus seminorm at
    /// most one.
    pub fn in_unit_class(&self) -> bool {
        !self.is_indicator && self.sup_bound + self.holder_constant <= 1.0 + 1e-12
    }

    pub fn from_values(values: Vec<f64>, label: impl Into<String>) -> TestFunction {
        let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // on a discrete metric space every bounded function is Hölder
        // with constant twice the sup bound
        let constant = 2.0 * sup;
        TestFunction {
            evaluator: Arc::new(move |p: &Point| match p {
                Point::Index(i) => values[*i],
                _ => f64::NAN,
            }),
            support_radius: 1.0,
            exponent: 1.0,
            holder_constant: constant,
            sup_bound: sup,
            exact_mean: None,
            is_indicator: false,
            label: label.into(),
        }
    }

    /// Indicator of a point set on a finite space; flagged non-Hölder.
    pub fn indicator(members: Vec<bool>, label: impl Into<String>) -> TestFunction {
        TestFunction {
            evaluator: Arc::new(move |p: &Point| match p {
                Point::Index(i) => {
                    if members[*i] {
                        1.0
                    } else {
                        0.0
                    }
                }
                _ => f64::NAN,
            }),
            support_radius: 1.0,
            exponent: 1.0,
            holder_constant: f64::INFINITY,
            sup_bound: 1.0,
            exact_mean: None,
            is_indicator: true,
            label: label.into(),
        }
    }
}

/// Cone bump `max(0, 1 - (d(x, center)/radius)^a)`, scaled into the unit
/// Hölder class. The certificate is analytic: `|u^a - v^a| <= |u - v|^a`
/// on nonnegative reals for `a <= 1` gives constant `radius^-a` before
/// scaling. The exact mean is attached where a closed form exists (the
/// bump supported inside the filtration piece with `a = 1`, or any bump
/// on a finite space).
pub fn make_bump(space: &Space, center: Point, radius: f64, a: f64) -> Result<TestFunction> {
    if !(radius > 0.0) {
        return Err(Error::Resolution(format!("bump radius must be positive, got {radius}")));
    }
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Config(format!("Hölder exponent must lie in (0, 1], got {a}")));
    }
    let scale = 1.0 / (1.0 + radius.powf(-a));
    let exact_mean = exact_bump_mean(space, &center, radius, a).map(|m| m * scale);
    let space_for_eval = space.clone();
    let center_for_eval = center.clone();
    let evaluator = move |x: &Point| {
        let d = space_for_eval
            .distance(&center_for_eval, x)
            .expect("bump evaluated on a foreign point");
        scale * (1.0 - (d / radius).powf(a)).max(0.0)
    };
    let support_radius = match space {
        Space::Plane(p) => p.radius(),
        Space::DeSitter(d) => d.radius(),
        _ => space.filtration_radius(),
    };
    Ok(TestFunction {
        evaluator: Arc::new(evaluator),
        support_radius,
        exponent: a,
        holder_constant: scale * radius.powf(-a),
        sup_bound: scale,
        exact_mean,
        is_indicator: false,
        label: format!("bump(r={radius}, a={a})"),
    })
}

/// Continuously differentiable bump `(1 - (d/R)^2)^2` on the support
/// ball, scaled into the unit Lipschitz class. The derivative in the
/// distance peaks at `8 / (3 sqrt(3) R)`, which is the certified
/// constant before scaling; the sphere mean has a closed form.
pub fn make_smooth_bump(space: &Space, center: Point, radius: f64) -> Result<TestFunction> {
    if !(radius > 0.0) {
        return Err(Error::Resolution(format!("bump radius must be positive, got {radius}")));
    }
    let lipschitz = 8.0 / (3.0 * 3f64.sqrt() * radius);
    let scale = 1.0 / (1.0 + lipschitz);
    let exact_mean = match space {
        Space::Sphere2(_) if radius <= std::f64::consts::PI => {
            Some(scale * smooth_cap_mean(radius))
        }
        Space::Finite(_) | Space::Profinite(_) => {
            let mut mean = 0.0;
            for (p, w) in space.sample(0, 0) {
                let d = space.distance(&center, &p)?;
                let u = 1.0 - (d / radius) * (d / radius);
                mean += if d < radius { scale * u * u } else { 0.0 } * w;
            }
            Some(mean)
        }
        _ => None,
    };
    let space_for_eval = space.clone();
    let center_for_eval = center.clone();
    let evaluator = move |x: &Point| {
        let d = space_for_eval
            .distance(&center_for_eval, x)
            .expect("bump evaluated on a foreign point");
        if d >= radius {
            0.0
        } else {
            let u = 1.0 - (d / radius) * (d / radius);
            scale * u * u
        }
    };
    Ok(TestFunction {
        evaluator: Arc::new(evaluator),
        support_radius: space.filtration_radius(),
        exponent: 1.0,
        holder_constant: scale * lipschitz,
        sup_bound: scale,
        exact_mean,
        is_indicator: false,
        label: format!("smooth_bump(r={radius})"),
    })
}

/// Mean of the unscaled smooth bump against the uniform probability
/// measure of the sphere: half the polar integral of
/// `(1 - (t/R)^2)^2 sin t` over `[0, R]`. The closed form cancels
/// catastrophically for small radii, where the series takes over.
fn smooth_cap_mean(r: f64) -> f64 {
    if r < 0.5 {
        let r2 = r * r;
        return r2 / 12.0 - r2 * r2 / 288.0 + r2 * r2 * r2 / 14_400.0
            - r2 * r2 * r2 * r2 / 1_209_600.0;
    }
    let (s, c) = (r.sin(), r.cos());
    let i0 = 1.0 - c;
    let i2 = -r * r * c + 2.0 * r * s + 2.0 * c - 2.0;
    let i4 = -r.powi(4) * c + 4.0 * r.powi(3) * s + 12.0 * r * r * c - 24.0 * r * s - 24.0 * c
        + 24.0;
    0.5 * (i0 - 2.0 * i2 / (r * r) + i4 / r.powi(4))
}

fn exact_bump_mean(space: &Space, center: &Point, radius: f64, a: f64) -> Option<f64> {
    match space {
        Space::Finite(_) | Space::Profinite(_) => {
            // exact summation over the finite space
            let scale_inv = |d: f64| (1.0 - (d / radius).powf(a)).max(0.0);
            let mut mean = 0.0;
            for (p, w) in space.sample(0, 0) {
                mean += scale_inv(space.distance(center, &p).ok()?) * w;
            }
            Some(mean)
        }
        Space::Sphere2(_) if a == 1.0 && radius <= std::f64::consts::PI => {
            Some(0.5 * (1.0 - radius.sin() / radius))
        }
        Space::Circle(_) if a == 1.0 && radius <= std::f64::consts::FRAC_PI_2 => {
            Some(radius / std::f64::consts::PI)
        }
        Space::Plane(pl) if a == 1.0 => {
            let c = center.as_vec2().ok()?;
            let n = (c[0] * c[0] + c[1] * c[1]).sqrt();
            if n - radius >= pl.inner() && n + radius <= pl.radius() {
                Some(std::f64::consts::PI * radius * radius / 3.0)
            } else {
                None
            }
        }
        Space::DeSitter(ds) if a == 1.0 => {
            let c = center.as_vec3().ok()?;
            let base = [0.0, 0.0, 1.0];
            if ds.distance(&c, &base) + radius <= ds.radius() {
                Some(std::f64::consts::TAU * (radius.sinh() / radius - 1.0))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Empirical modulus of continuity at scale `eps`: the sup of
/// `|f(z) - f(w)|` over sampled pairs at distance under `eps`.
pub fn holder_modulus(
    f: &TestFunction,
    space: &Space,
    eps: f64,
    n: usize,
    seed: u64,
) -> Result<f64> {
    if eps <= 0.0 {
        return Err(Error::Config("modulus scale must be positive".into()));
    }
    let exhaustive = matches!(space, Space::Finite(_) | Space::Profinite(_));
    let mut sample = space.sample(n, seed);
    // all-pairs scan; cap the sample so the audit stays quadratic-cheap
    const CAP: usize = 6000;
    if sample.len() > CAP {
        let stride = sample.len().div_ceil(CAP);
        sample = sample.into_iter().step_by(stride).collect();
    }
    let mut sup: f64 = 0.0;
    let mut pairs = 0u64;
    for i in 0..sample.len() {
        for j in (i + 1)..sample.len() {
            let (z, w) = (&sample[i].0, &sample[j].0);
            if space.distance(z, w)? < eps {
                pairs += 1;
                sup = sup.max((f.eval(z) - f.eval(w)).abs());
            }
        }
    }
    if pairs == 0 {
        // exhaustive point sets genuinely have no pair crossing the
        // scale, so the sup over the empty set is zero; a sampled
        // continuous space signals that the sampler cannot resolve eps
        if exhaustive {
            return Ok(0.0);
        }
        return Err(Error::Resolution(format!(
            "no sampled pairs at distance under {eps}"
        )));
    }
    Ok(sup)
}

/// Audit a Hölder certificate by sampling; a breach is a hard error
/// because downstream rate predictions consume the certificate.
pub fn audit_certificate(f: &TestFunction, space: &Space, n: usize, seed: u64) -> Result<()> {
    if f.is_indicator {
        return Ok(());
    }
    let sample = space.sample(n, seed);
    let tol = 1e-9;
    for (p, _) in &sample {
        let v = f.eval(p);
        if v.abs() > f.sup_bound + tol {
            return Err(Error::CertificateViolation(format!(
                "|f| = {v} exceeds sup bound {} at {p:?}",
                f.sup_bound
            )));
        }
    }
    let window = 32.min(sample.len().saturating_sub(1));
    for i in 0..sample.len() {
        for j in (i + 1)..(i + 1 + window).min(sample.len()) {
            let (z, w) = (&sample[i].0, &sample[j].0);
            let d = space.distance(z, w)?;
            if d <= 0.0 {
                continue;
            }
            let diff = (f.eval(z) - f.eval(w)).abs();
            if diff > f.holder_constant * d.powf(f.exponent) * (1.0 + 1e-6) + tol {
                return Err(Error::CertificateViolation(format!(
                    "|f(z)-f(w)| = {diff} exceeds C d^a = {} at distance {d}",
                    f.holder_constant * d.powf(f.exponent)
                )));
            }
        }
    }
    Ok(())
}

/// The alternating unit vector on a finite quotient, when it exists.
///
/// Returns the function with `f0(g_i x) = -f0(x)` for every generator,
/// normalized in `L^2` of the uniform probability measure, or `None`
/// when the even-word subgroup acts with a single orbit (always the case
/// when some generator image has a fixed point, and for actions declared
/// connected). Breadth-first 2-coloring of the action graph decides
/// existence exactly.
pub fn parity_vector(hom: &GroupHom) -> Result<Option<Vec<f64>>> {
    let HomImages::Permutation { degree, .. } = hom.images() else {
        return Err(Error::Config("parity vector requires a permutation action".into()));
    };
    let tables = hom.letter_perms().expect("permutation target");
    let mut color: Vec<i8> = vec![0; *degree];
    color[0] = 1;
    let mut queue = std::collections::VecDeque::from([0usize]);
    let mut visited = 1usize;
    while let Some(x) = queue.pop_front() {
        for t in &tables {
            let y = t[x];
            if color[y] == 0 {
                color[y] = -color[x];
                visited += 1;
                queue.push_back(y);
            } else if color[y] != -color[x] {
                return Ok(None);
            }
        }
    }
    if visited != *degree {
        return Err(Error::Config(
            "parity vector requires a transitive action".into(),
        ));
    }
    // unit vector in L^2 of the uniform probability measure
    Ok(Some(color.iter().map(|&c| c as f64).collect()))
}

/// Exact check of the sign-character relation on a finite quotient:
/// the translation action multiplies the parity vector by the sign of
/// the word.
pub fn parity_relation_holds(hom: &GroupHom, f0: &[f64], w: &ReducedWord) -> bool {
    let tables = hom.letter_perms().expect("permutation target");
    let sign = sign_character(w) as f64;
    (0..f0.len()).all(|x| {
        // (pi(w) f0)(x) = f0(w^-1 x)
        let mut y = x;
        for &l in w.inverse().letters() {
            y = tables[l as usize][y];
        }
        f0[y] == sign * f0[x]
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{FiniteCoset, Sphere2};

    fn sphere() -> Space {
        Space::Sphere2(Sphere2::new())
    }

    #[test]
    fn bump_peak_and_support() {
        let sp = sphere();
        let center = Point::Vec3([0.0, 0.0, 1.0]);
        let f = make_bump(&sp, center.clone(), 0.8, 1.0).unwrap();
        // peak value is 1 before normalization
        let peak = f.eval(&center);
        assert!((peak - f.sup_bound).abs() < 1e-15);
        assert!((peak * (1.0 + 0.8f64.powf(-1.0)) - 1.0).abs() < 1e-12);
        // zero outside the support ball
        let outside = Point::Vec3([0.0, 1.0, 0.0]); // distance pi/2 > 0.8
        assert_eq!(f.eval(&outside), 0.0);
        assert!(f.in_unit_class());
    }

    #[test]
    fn bump_on_discrete_space_is_scaled_indicator() {
        let sp = Space::Finite(FiniteCoset::new(7).unwrap());
        let f = make_bump(&sp, Point::Index(3), 0.5, 1.0).unwrap();
        for i in 0..7 {
            let v = f.eval(&Point::Index(i));
            if i == 3 {
                assert!((v - f.sup_bound).abs() < 1e-15);
            } else {
                assert_eq!(v, 0.0);
            }
        }
        // exact mean by finite summation
        let mean = f.exact_mean.unwrap();
        assert!((mean - f.sup_bound / 7.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_bump_mean_matches_quadrature() {
        let sp = sphere();
        let f = make_bump(&sp, Point::Vec3([0.0, 0.0, 1.0]), 1.1, 1.0).unwrap();
        let exact = f.exact_mean.unwrap();
        let mut quad = 0.0;
        for (p, w) in sp.sample(4_000_000, 17) {
            quad += f.eval(&p) * w;
        }
        assert!(
            (quad - exact).abs() < 1e-4,
            "quadrature {quad} vs exact {exact}"
        );
    }

    #[test]
    fn smooth_bump_certificate_and_mean() {
        let sp = sphere();
        let f = make_smooth_bump(&sp, Point::Vec3([0.0, 0.0, 1.0]), 1.0).unwrap();
        assert!(f.in_unit_class());
        audit_certificate(&f, &sp, 4000, 3).unwrap();
        let exact = f.exact_mean.unwrap();
        let mut quad = 0.0;
        for (p, w) in sp.sample(4_000_000, 19) {
            quad += f.eval(&p) * w;
        }
        assert!(
            (quad - exact).abs() < 1e-4,
            "quadrature {quad} vs exact {exact}"
        );
        // small-radius asymptotics of the cap mean: R^2 / 12
        let tiny = make_smooth_bump(&sp, Point::Vec3([0.0, 0.0, 1.0]), 0.01).unwrap();
        let mean_unscaled = tiny.exact_mean.unwrap() / tiny.sup_bound;
        assert!((mean_unscaled - 0.01f64.powi(2) / 12.0).abs() < 1e-9);
    }

    #[test]
    fn modulus_of_constant_is_zero() {
        let sp = sphere();
        let f = TestFunction::constant(0.25, "const");
        assert_eq!(holder_modulus(&f, &sp, 0.3, 4000, 3).unwrap(), 0.0);
    }

    #[test]
    fn modulus_respects_certificate() {
        let sp = sphere();
        let f = make_bump(&sp, Point::Vec3([0.0, 0.0, 1.0]), 0.9, 1.0).unwrap();
        for eps in [0.1f64, 0.3] {
            let m = holder_modulus(&f, &sp, eps, 6000, 5).unwrap();
            assert!(m <= f.holder_constant * eps * 1.000001, "modulus {m} at eps {eps}");
        }
    }

    #[test]
    fn indicator_modulus_below_resolution_is_zero() {
        let sp = Space::Finite(FiniteCoset::new(5).unwrap());
        let f = TestFunction::indicator(vec![true, false, false, false, false], "A");
        assert_eq!(holder_modulus(&f, &sp, 0.5, 0, 0).unwrap(), 0.0);
    }

    #[test]
    fn certificate_audit_passes_for_bump() {
        let sp = sphere();
        let f = make_bump(&sp, Point::Vec3([0.0, 0.0, 1.0]), 0.8, 0.7).unwrap();
        audit_certificate(&f, &sp, 3000, 9).unwrap();
    }

    #[test]
    fn certificate_audit_fails_for_forged_constant() {
        let sp = sphere();
        let mut f = make_bump(&sp, Point::Vec3([0.0, 0.0, 1.0]), 0.8, 1.0).unwrap();
        f.holder_constant = 1e-6;
        assert!(matches!(
            audit_certificate(&f, &sp, 3000, 9),
            Err(Error::CertificateViolation(_))
        ));
    }

    #[test]
    fn parity_exists_on_even_shift_cycle() {
        let m = 6;
        let shift: Vec<usize> = (0..m).map(|x| (x + 1) % m).collect();
        let hom = GroupHom::new(
            2,
            HomImages::Permutation { degree: m, gens: vec![shift.clone(), shift] },
        )
        .unwrap();
        let f0 = parity_vector(&hom).unwrap().unwrap();
        for x in 0..m {
            assert_eq!(f0[x], if x % 2 == 0 { 1.0 } else { -1.0 });
        }
        // pi(w) f0 = sign(w) f0 exactly
        for letters in [vec![0u8], vec![0, 2], vec![1, 2, 0]] {
            let w = ReducedWord::from_letters(2, letters).unwrap();
            assert!(parity_relation_holds(&hom, &f0, &w));
        }
    }

    #[test]
    fn parity_absent_with_fixed_point() {
        // generator b fixes point 0: odd cycle through the fixed point
        let hom = GroupHom::new(
            2,
            HomImages::Permutation {
                degree: 3,
                gens: vec![vec![1, 2, 0], vec![0, 2, 1]],
            },
        )
        .unwrap();
        assert!(parity_vector(&hom).unwrap().is_none());
    }
}
