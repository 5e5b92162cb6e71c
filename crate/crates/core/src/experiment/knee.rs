use serde::{Deserialize, Serialize};

use super::sweep::EntropyCurve;
use crate::error::{Error, Result};

/// Outcome of a knee search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Knee {
    /// Steepest smoothed slope, located at the midpoint of its grid interval.
    At { x_star: f64, max_slope: f64 },
    /// The curve is flat within noise or has constant slope.
    None { max_slope: f64 },
}

impl Knee {
    pub fn max_slope(&self) -> f64 {
        match *self {
            Knee::At { max_slope, .. } | Knee::None { max_slope } => max_slope,
        }
    }

    pub fn x_star(&self) -> Option<f64> {
        match *self {
            Knee::At { x_star, .. } => Some(x_star),
            Knee::None { .. } => None,
        }
    }
}

/// Centered moving average with the window shrunk symmetrically at the
/// ends, so a linear sequence is reproduced exactly.
pub fn moving_average(y: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    (0..y.len())
        .map(|i| {
            let h = half.min(i).min(y.len() - 1 - i);
            let s = &y[i - h..=i + h];
            s.iter().sum::<f64>() / s.len() as f64
        })
        .collect()
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Knee search over raw samples `(x, y)` with per-point standard errors.
///
/// Both coordinates are smoothed with the same window (this keeps straight
/// lines straight on uneven grids), then the steepest discrete slope is
/// reported. Ties go to the smaller `x`.
pub fn knee_of(x: &[f64], y: &[f64], stderr: &[f64], window: usize) -> Result<Knee> {
    if x.len() != y.len() || x.len() != stderr.len() {
        return Err(Error::InvalidArgument("knee input columns differ in length".into()));
    }
    if x.len() < 5 {
        return Err(Error::InvalidArgument(format!("knee search needs at least 5 points, got {}", x.len())));
    }
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("smoothing window must be odd and positive, got {window}")));
    }
    let xs = moving_average(x, window);
    let ys = moving_average(y, window);
    let slopes: Vec<f64> = (0..x.len() - 1).map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])).collect();

    let mut best = 0;
    for (i, &s) in slopes.iter().enumerate() {
        if s > slopes[best] {
            best = i;
        }
    }
    let max_slope = slopes[best];
    let min_slope = slopes.iter().copied().fold(f64::INFINITY, f64::min);

    let noise = 10.0 * median(&mut stderr.to_vec());
    let linear = max_slope - min_slope <= 1e-9 * max_slope.abs().max(min_slope.abs());
    if !(max_slope >= noise) || linear {
        return Ok(Knee::None { max_slope });
    }
    Ok(Knee::At { x_star: 0.5 * (x[best] + x[best + 1]), max_slope })
}

/// Knee of an entropy curve; rows without a value are skipped.
pub fn knee_location(curve: &EntropyCurve, window: usize) -> Result<Knee> {
    let rows: Vec<_> = curve.rows.iter().filter(|r| r.has_value()).collect();
    let x: Vec<f64> = rows.iter().map(|r| r.k_over_n).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.s_tilde_mean).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.s_tilde_stderr).collect();
    knee_of(&x, &y, &e, window)
}

/// Least-squares slope of the curve over rows with `lo <= k/n <= hi`.
pub fn slope_over(curve: &EntropyCurve, lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = curve
        .rows
        .iter()
        .filter(|r| r.has_value() && r.k_over_n >= lo && r.k_over_n <= hi)
        .map(|r| (r.k_over_n, r.s_tilde_mean))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(step: f64, upto: f64) -> Vec<f64> {
        (0..=(upto / step).round() as usize).map(|i| i as f64 * step).collect()
    }

    #[test]
    fn logistic_knee_at_inflection() {
        let x = grid(0.05, 2.0);
        let y: Vec<f64> = x.iter().map(|&v| 1.0 / (1.0 + (-(v - 0.5) / 0.08).exp())).collect();
        let k = knee_of(&x, &y, &vec![1e-3; x.len()], 3).unwrap();
        assert!((k.x_star().unwrap() - 0.5).abs() <= 0.05, "{k:?}");
    }

    #[test]
    fn linear_has_no_knee() {
        let x: Vec<f64> = vec![0.0, 0.1, 0.15, 0.4, 0.7, 1.0, 2.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        let k = knee_of(&x, &y, &vec![0.0; x.len()], 3).unwrap();
        assert!(matches!(k, Knee::None { .. }), "{k:?}");
    }

    #[test]
    fn step_knee() {
        let x = grid(0.05, 1.5);
        let y: Vec<f64> = x.iter().map(|&v| if v >= 0.4 - 1e-9 { 1.0 } else { 0.0 }).collect();
        let k = knee_of(&x, &y, &vec![0.0; x.len()], 1).unwrap();
        assert!((k.x_star().unwrap() - 0.4).abs() <= 0.05, "{k:?}");
    }

    #[test]
    fn noisy_flat_curve_has_no_knee() {
        let x = grid(0.1, 1.0);
        let y: Vec<f64> = (0..x.len()).map(|i| if i % 2 == 0 { 0.01 } else { -0.01 }).collect();
        let k = knee_of(&x, &y, &vec![0.05; x.len()], 1).unwrap();
        assert!(matches!(k, Knee::None { .. }));
    }

    #[test]
    fn ties_go_to_smaller_x() {
        let x = grid(1.0, 6.0);
        let y = vec![0.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0];
        assert_eq!(knee_of(&x, &y, &[0.0; 7], 1).unwrap().x_star(), Some(0.5));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(knee_of(&[0.0; 4], &[0.0; 4], &[0.0; 4], 1).is_err());
        assert!(knee_of(&[0.0; 5], &[0.0; 5], &[0.0; 5], 2).is_err());
        assert!(knee_of(&[0.0; 5], &[0.0; 4], &[0.0; 5], 1).is_err());
    }

    #[test]
    fn moving_average_preserves_lines() {
        let y: Vec<f64> = (0..9).map(|i| 2.0 * i as f64).collect();
        assert_eq!(moving_average(&y, 5), y);
    }
}
