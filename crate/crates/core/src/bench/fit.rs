//! Quadratic fits in log–log coordinates and crossing estimates.

use serde::{Deserialize, Serialize};

use super::CurvePoint;
use crate::error::{Error, Result};
use crate::sampling::unencoded_failure;

/// A point estimate with a one-sigma style uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub uncertainty: f64,
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.4} ± {:.4}", self.value, self.uncertainty)
    }
}

/// Least-squares polynomial of degree ≤ 2, coefficients in ascending order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadratic(pub [f64; 3]);

impl Quadratic {
    pub fn eval(&self, x: f64) -> f64 {
        let [a, b, c] = self.0;
        a + x * (b + x * c)
    }

    /// Fits `y ≈ a + b x + c x²`; falls back to a line for two points.
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let deg = match xs.len() {
            0 | 1 => return Err(Error::InvalidParameter("need at least two points to fit".into())),
            2 => 1,
            _ => 2,
        };
        let m = deg + 1;
        // normal equations
        let mut a = vec![vec![0.0; m + 1]; m];
        for (&x, &y) in xs.iter().zip(ys) {
            let pows: Vec<f64> = (0..m).map(|k| x.powi(k as i32)).collect();
            for i in 0..m {
                for j in 0..m {
                    a[i][j] += pows[i] * pows[j];
                }
                a[i][m] += pows[i] * y;
            }
        }
        for col in 0..m {
            let piv = (col..m)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            if a[piv][col].abs() < 1e-300 {
                return Err(Error::InvalidParameter("degenerate fit (repeated abscissae)".into()));
            }
            a.swap(col, piv);
            for r in 0..m {
                if r != col {
                    let f = a[r][col] / a[col][col];
                    for c in col..=m {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        let mut coef = [0.0; 3];
        for i in 0..m {
            coef[i] = a[i][m] / a[i][i];
        }
        Ok(Quadratic(coef))
    }
}

/// Root of `f` in `[lo, hi]` by bisection, given a sign change.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if !(flo.is_finite() && fhi.is_finite()) || flo * fhi > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn rate(pt: &CurvePoint, per_cycle: bool) -> f64 {
    if per_cycle {
        pt.per_cycle_p_l.unwrap_or(pt.p_l)
    } else {
        pt.p_l
    }
}

/// Points with positive rate, as (log p, log rate), optionally shifted by `sigmas` standard errors.
fn log_points(curve: &[CurvePoint], per_cycle: bool, sigmas: f64) -> Vec<(f64, f64)> {
    curve
        .iter()
        .filter_map(|pt| {
            let r = rate(pt, per_cycle);
            // per-cycle rates reuse the relative error of the total (a slight overestimate)
            let rel = if pt.p_l > 0.0 { pt.stderr / pt.p_l } else { 0.0 };
            let shifted = r * (1.0 + sigmas * rel);
            (r > 0.0 && shifted > 0.0).then(|| (pt.p.ln(), shifted.ln()))
        })
        .collect()
}

/// Fit window: up to `window` points around index `center`.
fn window(points: &[(f64, f64)], center: usize, window: usize) -> (Vec<f64>, Vec<f64>) {
    let w = window.min(points.len());
    let start = center.saturating_sub(w / 2).min(points.len() - w);
    points[start..start + w].iter().copied().unzip()
}

const FIT_WINDOW: usize = 5;

fn pseudo_threshold_once(curve: &[CurvePoint], k: usize, per_cycle: bool, sigmas: f64) -> Result<f64> {
    let pts = log_points(curve, per_cycle, sigmas);
    let diff = |&(x, y): &(f64, f64)| y - unencoded_failure(k, x.exp()).ln();
    let bracket = pts
        .windows(2)
        .position(|w| diff(&w[0]) * diff(&w[1]) <= 0.0)
        .ok_or_else(|| Error::NoCrossing(format!("no bracketed crossing with 1-(1-p)^{k}")))?;
    let (xs, ys) = window(&pts, bracket, FIT_WINDOW);
    let fit = Quadratic::fit(&xs, &ys)?;
    let g = |x: f64| fit.eval(x) - unencoded_failure(k, x.exp()).ln();
    let root = bisect(g, pts[bracket].0, pts[bracket + 1].0)
        .or_else(|| bisect(g, xs[0], xs[xs.len() - 1]))
        .ok_or_else(|| Error::NoCrossing("fitted curve does not cross inside the bracket".into()))?;
    Ok(root.exp())
}

/// Physical rate where the curve meets the unencoded failure `1 − (1−p)^k`.
///
/// A quadratic in (log p, log p_L) is fitted to the points around the first
/// bracketing pair; the uncertainty is half the spread of the crossings
/// obtained with all rates shifted by ±1 standard error.
pub fn pseudo_threshold(curve: &[CurvePoint], k: usize, per_cycle: bool) -> Result<Estimate> {
    let value = pseudo_threshold_once(curve, k, per_cycle, 0.0)?;
    let up = pseudo_threshold_once(curve, k, per_cycle, 1.0).unwrap_or(value);
    let down = pseudo_threshold_once(curve, k, per_cycle, -1.0).unwrap_or(value);
    Ok(Estimate {
        value,
        uncertainty: 0.5 * (up - down).abs(),
    })
}

fn pair_crossing(a: &[CurvePoint], b: &[CurvePoint], sa: f64, sb: f64) -> Result<f64> {
    let pa = log_points(a, false, sa);
    let pb = log_points(b, false, sb);
    let lo = pa.first().map(|p| p.0).unwrap_or(0.0).max(pb.first().map(|p| p.0).unwrap_or(0.0));
    let hi = pa.last().map(|p| p.0).unwrap_or(0.0).min(pb.last().map(|p| p.0).unwrap_or(0.0));
    if pa.len() < 2 || pb.len() < 2 || lo >= hi {
        return Err(Error::NoCrossing("curves do not overlap".into()));
    }
    let inside = |pts: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) {
        pts.iter().filter(|p| p.0 >= lo - 1e-12 && p.0 <= hi + 1e-12).copied().unzip()
    };
    let (xa, ya) = inside(&pa);
    let (xb, yb) = inside(&pb);
    let fa = Quadratic::fit(&xa, &ya)?;
    let fb = Quadratic::fit(&xb, &yb)?;
    let g = |x: f64| fa.eval(x) - fb.eval(x);
    // scan for the first sign change of the fitted difference
    const STEPS: usize = 400;
    let scale = ya.iter().chain(&yb).map(|y| y.abs()).fold(1.0, f64::max);
    let xs: Vec<f64> = (0..=STEPS).map(|i| lo + (hi - lo) * i as f64 / STEPS as f64).collect();
    for w in xs.windows(2) {
        let (g0, g1) = (g(w[0]), g(w[1]));
        if g0.abs() < 1e-12 * scale && g1.abs() < 1e-12 * scale {
            continue;
        }
        if g0 * g1 <= 0.0 {
            if let Some(r) = bisect(g, w[0], w[1]) {
                return Ok(r.exp());
            }
        }
    }
    Err(Error::NoCrossing("fitted curves do not cross".into()))
}

/// Crossing of several logical-error curves.
///
/// Each curve is fitted by a quadratic in log–log coordinates over the
/// common range; the value is the mean of all pairwise crossings and the
/// uncertainty the larger of their spread and the ±1σ refit spread.
pub fn crossing_point(curves: &[Vec<CurvePoint>]) -> Result<Estimate> {
    if curves.len() < 2 {
        return Err(Error::InvalidParameter("crossing needs at least two curves".into()));
    }
    let mut crossings = Vec::new();
    let mut refit_spread: f64 = 0.0;
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let c = pair_crossing(&curves[i], &curves[j], 0.0, 0.0)?;
            let shifted: Vec<f64> = [(1.0, -1.0), (-1.0, 1.0)]
                .iter()
                .filter_map(|&(sa, sb)| pair_crossing(&curves[i], &curves[j], sa, sb).ok())
                .collect();
            if let (Some(lo), Some(hi)) = (
                shifted.iter().copied().reduce(f64::min),
                shifted.iter().copied().reduce(f64::max),
            ) {
                refit_spread = refit_spread.max(0.5 * (hi - lo));
            }
            crossings.push(c);
        }
    }
    let mean = crossings.iter().sum::<f64>() / crossings.len() as f64;
    let spread = if crossings.len() > 1 {
        (crossings.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (crossings.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        value: mean,
        uncertainty: spread.max(refit_spread),
    })
}
