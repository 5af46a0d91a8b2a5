//! Sequence acceleration and least-squares fits used by the convergence experiments.

use crate::error::{invalid, Result};

/// Richardson table for samples `values[i]` taken at `h_i = h_0 / ratio^i`, assuming
/// an error expansion `Σ_k c_k h^(k·order)`. Returns the most extrapolated entry and
/// the difference to the previous diagonal entry as an error estimate.
pub fn richardson(values: &[f64], ratio: f64, order: f64) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(invalid("richardson needs at least one value"));
    }
    if !(ratio > 1.0) || !(order > 0.0) {
        return Err(invalid("richardson needs ratio > 1 and order > 0"));
    }
    let mut table: Vec<f64> = values.to_vec();
    let mut prev_diag = table[table.len() - 1];
    let mut err = f64::INFINITY;
    let n = table.len();
    for k in 1..n {
        let factor = ratio.powf(order * k as f64);
        let mut next = Vec::with_capacity(table.len() - 1);
        for i in 1..table.len() {
            next.push((factor * table[i] - table[i - 1]) / (factor - 1.0));
        }
        let diag = next[next.len() - 1];
        err = (diag - prev_diag).abs();
        prev_diag = diag;
        table = next;
    }
    Ok((prev_diag, err))
}

/// Aitken Δ² acceleration of the last three terms of a sequence.
pub fn aitken(values: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(invalid("aitken needs at least three values"));
    }
    let n = values.len();
    let (x0, x1, x2) = (values[n - 3], values[n - 2], values[n - 1]);
    let denom = x2 - 2.0 * x1 + x0;
    if denom.abs() < 1e-300 {
        return Ok(x2);
    }
    Ok(x2 - (x2 - x1) * (x2 - x1) / denom)
}

/// Least-squares fit `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("linear_fit needs two equally long samples of length ≥ 2"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("linear_fit needs distinct abscissae"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `log|y|` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    Ok(linear_fit(&lx, &ly)?.0)
}

/// Neville extrapolation of the interpolating polynomial through `(x_i, y_i)` to
/// `x = 0`. Returns the value and the change from the next-lower degree.
pub fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.is_empty() {
        return Err(invalid("extrapolate_to_zero needs equally long nonempty samples"));
    }
    let n = x.len();
    let mut p = y.to_vec();
    let mut prev = p[n - 1];
    let mut err = f64::INFINITY;
    for k in 1..n {
        for i in (k..n).rev() {
            let d = x[i - k] - x[i];
            if d == 0.0 {
                return Err(invalid("extrapolate_to_zero needs distinct abscissae"));
            }
            p[i] = (x[i - k] * p[i] - x[i] * p[i - 1]) / d;
        }
        err = (p[n - 1] - prev).abs();
        prev = p[n - 1];
    }
    Ok((prev, err))
}

/// Bulirsch–Stoer rational extrapolation of `(x_i, y_i)` to `x = 0`, for samples whose
/// dependence on `x` is a rational function with poles away from the origin. Returns
/// the value and the change from the previous diagonal entry.
pub fn rational_extrapolate_to_zero(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.is_empty() {
        return Err(invalid(
            "rational_extrapolate_to_zero needs equally long nonempty samples",
        ));
    }
    if x.iter().any(|v| *v == 0.0) || x.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("rational_extrapolate_to_zero needs distinct nonzero abscissae"));
    }
    let n = x.len();
    // prev2 holds column k-2 (zeros for k = 1), prev column k-1
    let mut prev2 = vec![0.0; n];
    let mut prev = y.to_vec();
    let mut best = y[n - 1];
    let mut err = f64::INFINITY;
    for k in 1..n {
        let mut next = vec![0.0; n];
        for i in k..n {
            let diff = prev[i] - prev[i - 1];
            let back = prev[i] - prev2[i - 1];
            next[i] = if diff == 0.0 {
                prev[i]
            } else if back == 0.0 {
                // infinite bracket: the rational correction vanishes
                prev[i]
            } else {
                let den = (x[i - k] / x[i]) * (1.0 - diff / back) - 1.0;
                if den == 0.0 {
                    prev[i]
                } else {
                    prev[i] + diff / den
                }
            };
        }
        err = (next[n - 1] - best).abs();
        best = next[n - 1];
        prev2 = prev;
        prev = next;
    }
    Ok((best, err))
}
