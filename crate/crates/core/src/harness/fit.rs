use crate::error::{Error, Result};

/// C ∝ ε^(−ξ) fitted on (ln ε, ln C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub xi: f64,
    pub xi_err: f64,
    /// ln C at ε = 1.
    pub log_prefactor: f64,
    /// Root-mean-square residual in ln C.
    pub residual_rms: f64,
    pub points: usize,
}

/// y = slope·x + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub slope_err: f64,
    pub intercept: f64,
    pub intercept_err: f64,
    /// Σ ((y − ŷ)/σ)².
    pub chi_square: f64,
    pub points: usize,
}

struct Weighted {
    slope: f64,
    intercept: f64,
    /// Σw, Σwx² and the determinant, for the standard errors.
    s: f64,
    sxx: f64,
    delta: f64,
}

fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> Result<Weighted> {
    let s: f64 = w.iter().sum();
    let sx: f64 = w.iter().zip(x).map(|(w, x)| w * x).sum();
    let sy: f64 = w.iter().zip(y).map(|(w, y)| w * y).sum();
    let sxx: f64 = w.iter().zip(x).map(|(w, x)| w * x * x).sum();
    let sxy: f64 = w.iter().zip(x).zip(y).map(|((w, x), y)| w * x * y).sum();
    let delta = s * sxx - sx * sx;
    let spread = x.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v)) - x.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    if !(spread > 0.0) || !(delta > 0.0) {
        return Err(Error::Fit("all abscissae are equal".into()));
    }
    Ok(Weighted { slope: (s * sxy - sx * sy) / delta, intercept: (sxx * sy - sx * sxy) / delta, s, sxx, delta })
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Fit(format!("non-finite {what}")))
    }
}

fn log_points(points: &[(f64, f64)]) -> Result<(Vec<f64>, Vec<f64>)> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("power-law fit needs at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(e, c)| !(e > 0.0 && c > 0.0)) {
        return Err(Error::Fit("power-law fit needs positive ε and C".into()));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    check_finite(&x, "ε")?;
    check_finite(&y, "cost")?;
    Ok((x, y))
}

fn power_law(x: &[f64], y: &[f64], w: &[f64], scale_by_residuals: bool) -> Result<PowerLawFit> {
    let line = weighted_line(x, y, w)?;
    let residuals: Vec<f64> = x.iter().zip(y).map(|(x, y)| y - (line.slope * x + line.intercept)).collect();
    let n = x.len() as f64;
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let wssr: f64 = residuals.iter().zip(w).map(|(r, w)| w * r * r).sum();
    let var_slope = if scale_by_residuals {
        // unweighted OLS: σ² estimated from the residuals
        wssr / (n - 2.0) * line.s / line.delta
    } else {
        line.s / line.delta
    };
    Ok(PowerLawFit {
        xi: -line.slope,
        xi_err: var_slope.sqrt(),
        log_prefactor: line.intercept,
        residual_rms: (ssr / n).sqrt(),
        points: x.len(),
    })
}

/// Unweighted least squares of ln C against ln ε.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let (x, y) = log_points(points)?;
    power_law(&x, &y, &vec![1.0; x.len()], true)
}

/// Least squares of ln C against ln ε weighted by (C/σ_C)².
pub fn fit_power_law_weighted(points: &[(f64, f64, f64)]) -> Result<PowerLawFit> {
    let (x, y) = log_points(&points.iter().map(|p| (p.0, p.1)).collect::<Vec<_>>())?;
    let w: Vec<f64> = points.iter().map(|&(_, c, s)| (c / s).powi(2)).collect();
    if w.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Fit("weighted fit needs positive finite errors".into()));
    }
    power_law(&x, &y, &w, false)
}

/// Weighted least squares line through (x, y, σ_y).
pub fn fit_linear(points: &[(f64, f64, f64)]) -> Result<LinearFit> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("linear fit needs at least 2 points, got {}", points.len())));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    check_finite(&x, "abscissa")?;
    check_finite(&y, "ordinate")?;
    let w: Vec<f64> = points.iter().map(|p| p.2.powi(-2)).collect();
    if w.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Fit("linear fit needs positive finite errors".into()));
    }
    let line = weighted_line(&x, &y, &w)?;
    let chi_square = points.iter().map(|&(x, y, s)| ((y - line.slope * x - line.intercept) / s).powi(2)).sum();
    Ok(LinearFit {
        slope: line.slope,
        slope_err: (line.s / line.delta).sqrt(),
        intercept: line.intercept,
        intercept_err: (line.sxx / line.delta).sqrt(),
        chi_square,
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID: [f64; 7] = [0.2742, 0.0987, 0.0504, 0.0305, 0.0204, 0.0146, 0.0110];

    #[test]
    fn exact_power_laws() {
        for xi in [0.5, 1.0] {
            let pts: Vec<(f64, f64)> = GRID.iter().map(|&e| (e, e.powf(-xi))).collect();
            let fit = fit_power_law(&pts).unwrap();
            assert!((fit.xi - xi).abs() < 1e-9);
            assert!(fit.xi_err < 1e-9);
        }
    }

    #[test]
    fn weighted_power_law_on_exact_data() {
        let pts: Vec<(f64, f64, f64)> = GRID.iter().map(|&e| (e, 3.0 * e.powf(-0.5), 0.1)).collect();
        let fit = fit_power_law_weighted(&pts).unwrap();
        assert!((fit.xi - 0.5).abs() < 1e-9);
        assert!((fit.log_prefactor - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn power_law_errors() {
        assert!(fit_power_law(&[(0.1, 1.0), (0.2, 2.0)]).is_err());
        assert!(fit_power_law(&[(0.1, 1.0), (0.1, 2.0), (0.1, 3.0)]).is_err());
        assert!(fit_power_law(&[(0.1, 1.0), (0.2, -2.0), (0.3, 3.0)]).is_err());
    }

    #[test]
    fn exact_lines() {
        let identity: Vec<(f64, f64, f64)> = (1..6).map(|i| (i as f64, i as f64, 0.1)).collect();
        let fit = fit_linear(&identity).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-9 && fit.intercept.abs() < 1e-9);

        let shifted: Vec<(f64, f64, f64)> =
            (0..5).map(|i| (i as f64 * 0.5, 1.1 * i as f64 * 0.5 + 0.05, 0.2)).collect();
        let fit = fit_linear(&shifted).unwrap();
        assert!((fit.slope - 1.1).abs() < 1e-9 && (fit.intercept - 0.05).abs() < 1e-9);
    }

    #[test]
    fn linear_standard_errors_match_closed_form() {
        // equal weights: σ_slope = σ/√Σ(x−x̄)²
        let pts: Vec<(f64, f64, f64)> = [0.0, 1.0, 2.0, 3.0].iter().map(|&x| (x, 2.0 * x, 0.5)).collect();
        let fit = fit_linear(&pts).unwrap();
        assert!((fit.slope_err - 0.5 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn linear_errors() {
        assert!(fit_linear(&[(1.0, 1.0, 0.1)]).is_err());
        assert!(fit_linear(&[(1.0, 1.0, 0.1), (1.0, 2.0, 0.1)]).is_err());
        assert!(fit_linear(&[(1.0, 1.0, 0.0), (2.0, 2.0, 0.1)]).is_err());
    }
}
