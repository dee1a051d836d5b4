use serde::{Deserialize, Serialize};

use super::ErrorSeries;
use crate::{Error, Result};

fn validate_exponents(a: f64, rho: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Config(format!("Hölder exponent must lie in (0, 1], got {a}")));
    }
    if !(rho > 0.0) {
        return Err(Error::Config(format!("local dimension must be positive, got {rho}")));
    }
    Ok(())
}

fn validate_error(e: f64) -> Result<()> {
    if !(e > 0.0 && e < 1.0) {
        return Err(Error::UndefinedRegime(format!(
            "rate prediction needs an error in (0, 1), got {e}"
        )));
    }
    Ok(())
}

/// Predicted sup-norm bound `E^(a / (a + rho))` for isometric actions
/// with local dimension `rho` and Hölder data `a`.
pub fn predict_uniform_rate(a: f64, rho: f64, e: f64) -> Result<f64> {
    validate_exponents(a, rho)?;
    validate_error(e)?;
    Ok(e.powf(a / (a + rho)))
}

/// The balancing scale: `eps = E^(1 / (a + rho))` equalizes the mass
/// term `eps^-rho E` and the modulus term `eps^a`, each equal to the
/// predicted rate.
pub fn balance_epsilon(a: f64, rho: f64, e: f64) -> Result<f64> {
    validate_exponents(a, rho)?;
    validate_error(e)?;
    Ok(e.powf(1.0 / (a + rho)))
}

/// Sup of the piecewise-linear interpolant of a series over `[lo, hi]`.
/// The window must lie inside the recorded time range.
pub fn window_sup(series: &ErrorSeries, lo: f64, hi: f64) -> Result<f64> {
    let first = series.entries.first().ok_or_else(|| Error::Config("empty series".into()))?.0;
    let last = series.entries.last().unwrap().0;
    if lo < first || hi > last || lo > hi {
        return Err(Error::Config(format!(
            "window [{lo}, {hi}] outside the recorded range [{first}, {last}]"
        )));
    }
    let interp = |t: f64| -> f64 {
        let entries = &series.entries;
        let i = entries.partition_point(|&(s, _)| s < t);
        if i == 0 {
            return entries[0].1;
        }
        if i == entries.len() {
            return entries[entries.len() - 1].1;
        }
        let (t0, e0) = entries[i - 1];
        let (t1, e1) = entries[i];
        e0 + (e1 - e0) * (t - t0) / (t1 - t0)
    };
    let mut sup = interp(lo).max(interp(hi));
    for &(t, e) in &series.entries {
        if t >= lo && t <= hi {
            sup = sup.max(e);
        }
    }
    Ok(sup)
}

/// Rate prediction for transitive actions driven by a coarsely monotone
/// family: the windowed sup of the error series raised to
/// `min(a0, a) / (min(a0, a) + rho)`.
pub fn transitive_rate(
    a0: f64,
    a: f64,
    rho: f64,
    series: &ErrorSeries,
    t: f64,
    kappa1: f64,
) -> Result<f64> {
    if !(a0 > 0.0) {
        return Err(Error::Config(format!("monotonicity exponent must be positive, got {a0}")));
    }
    validate_exponents(a, rho)?;
    let bar_e = window_sup(series, t - kappa1, t + kappa1)?;
    validate_error(bar_e)?;
    let m = a0.min(a);
    Ok(bar_e.powf(m / (m + rho)))
}

/// Least-squares exponent fit of a decaying error series.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ExponentFit {
    /// Decay rate: `E(t) ~ C e^(-theta t)`.
    pub theta: f64,
    /// Root-mean-square residual of `log E` against the fitted line.
    pub goodness: f64,
    pub used_points: usize,
}

/// Fit `log E` against `t` by least squares, excluding nonpositive
/// entries and (by default) the earliest fifth of the usable points as
/// transient. Requires at least four positive entries.
pub fn fit_exponent(series: &ErrorSeries, drop_fraction: Option<f64>) -> Result<ExponentFit> {
    let drop = drop_fraction.unwrap_or(0.2);
    if !(0.0..1.0).contains(&drop) {
        return Err(Error::Config(format!("drop fraction must lie in [0, 1), got {drop}")));
    }
    let usable: Vec<(f64, f64)> =
        series.entries.iter().filter(|&&(_, e)| e > 0.0).copied().collect();
    if usable.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 positive error values, got {}",
            usable.len()
        )));
    }
    let skip = ((usable.len() as f64) * drop).floor() as usize;
    let pts: Vec<(f64, f64)> = usable[skip..].iter().map(|&(t, e)| (t, e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate time grid".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = pts
        .iter()
        .map(|p| (p.1 - (my + slope * (p.0 - mx))).powi(2))
        .sum::<f64>()
        / n;
    Ok(ExponentFit { theta: -slope, goodness: resid.sqrt(), used_points: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ergodic::{NormKind, SeriesMeta};

    fn series_from(entries: Vec<(f64, f64)>) -> ErrorSeries {
        ErrorSeries::new(NormKind::L2, entries, SeriesMeta::default()).unwrap()
    }

    #[test]
    fn rate_prediction_values() {
        // a = rho gives the square root
        let v = predict_uniform_rate(1.0, 1.0, 1e-4).unwrap();
        assert!((v - 1e-2).abs() < 1e-15);
        // boundary: E close to one gives no gain
        let v = predict_uniform_rate(0.5, 2.0, 1.0 - 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-11);
        assert!(matches!(
            predict_uniform_rate(1.0, 1.0, 1.0),
            Err(Error::UndefinedRegime(_))
        ));
    }

    #[test]
    fn balanced_sum_identity() {
        // eps^-rho E + eps^a at the balancing scale equals twice the
        // predicted rate; checked on a parameter grid
        for &a in &[0.3, 0.7, 1.0] {
            for &rho in &[0.5, 1.0, 2.0, 3.0] {
                for &e in &[1e-6, 1e-4, 1e-2, 0.3] {
                    let eps = balance_epsilon(a, rho, e).unwrap();
                    let lhs = eps.powf(-rho) * e + eps.powf(a);
                    let rhs = 2.0 * predict_uniform_rate(a, rho, e).unwrap();
                    assert!(
                        ((lhs - rhs) / rhs).abs() < 1e-12,
                        "a={a} rho={rho} e={e}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    #[test]
    fn transitive_rate_reduces_to_uniform() {
        let s = series_from(vec![(0.0, 1e-4), (1.0, 1e-4), (2.0, 1e-4)]);
        // a0 >= a picks a
        let v = transitive_rate(2.0, 1.0, 1.0, &s, 1.0, 0.5).unwrap();
        let u = predict_uniform_rate(1.0, 1.0, 1e-4).unwrap();
        assert!((v - u).abs() < 1e-15);
        // a0 = a = rho = 1 with E = 1e-4 gives 1e-2
        let v = transitive_rate(1.0, 1.0, 1.0, &s, 1.0, 0.5).unwrap();
        assert!((v - 1e-2).abs() < 1e-15);
    }

    #[test]
    fn windowed_sup_dominates_pointwise() {
        let s = series_from(vec![(0.0, 0.5), (1.0, 0.1), (2.0, 0.3), (3.0, 0.05)]);
        for &(t, e) in &s.entries {
            if t >= 0.5 && t <= 2.5 {
                assert!(window_sup(&s, t - 0.5, t + 0.5).unwrap() >= e);
            }
        }
        assert!(window_sup(&s, 0.5, 2.5).unwrap() >= 0.3);
        assert!(matches!(window_sup(&s, -1.0, 2.0), Err(Error::Config(_))));
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let entries: Vec<(f64, f64)> =
            (0..10).map(|k| (k as f64, (-0.3 * k as f64).exp())).collect();
        let fit = fit_exponent(&series_from(entries), None).unwrap();
        assert!((fit.theta - 0.3).abs() < 1e-9, "theta {}", fit.theta);
        assert!(fit.goodness < 1e-12);
    }

    #[test]
    fn fit_recovers_noisy_exponential() {
        let entries: Vec<(f64, f64)> = (0..20)
            .map(|k| {
                let t = k as f64;
                (t, 0.7 * (-0.45 * t).exp() * (1.0 + 0.01 * t.sin()))
            })
            .collect();
        let fit = fit_exponent(&series_from(entries), None).unwrap();
        assert!((fit.theta - 0.45).abs() < 0.02, "theta {}", fit.theta);
    }

    #[test]
    fn fit_rejects_too_few_points() {
        let entries = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.1), (3.0, 0.05)];
        assert!(matches!(fit_exponent(&series_from(entries), None), Err(Error::Fit(_))));
    }
}
