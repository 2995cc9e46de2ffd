//! One-dimensional maximisation on [-1, 1]: dense grid plus parabolic refinement.

use rug::Float;

use crate::error::Result;
use crate::precision::cmp_float;

/// Location and value of a refined maximum.
#[derive(Debug, Clone)]
pub struct SupResult {
    pub x: f64,
    pub value: Float,
    /// Curvature-based estimate of the relative gap to the true maximum.
    pub rel_error: f64,
}

/// Chebyshev extrema of order `size - 1`, ascending, endpoints exact.
pub fn chebyshev_grid(size: usize) -> Vec<f64> {
    let size = size.max(2);
    let m = (size - 1) as f64;
    let mut g: Vec<f64> = (0..size)
        .map(|i| -(std::f64::consts::PI * i as f64 / m).cos())
        .collect();
    g[0] = -1.0;
    g[size - 1] = 1.0;
    if size % 2 == 1 {
        g[size / 2] = 0.0;
    }
    g
}

/// Indices of local maxima of `values`, largest first.
pub fn local_maxima(values: &[f64], count: usize) -> Vec<usize> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n)
        .filter(|&i| {
            let left = i == 0 || values[i] >= values[i - 1];
            let right = i + 1 == n || values[i] >= values[i + 1];
            left && right
        })
        .collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx.truncate(count);
    idx
}

/// Local maxima whose coarse value is further than this below the top are skipped.
const NEAR_TOP: f64 = 0.05;

/// Refines the top `candidates` local maxima of `coarse` using the accurate
/// (non-negative) evaluator `fine`. At least `min_steps` parabolic steps are
/// taken per candidate, at most `max_steps`, stopping once the estimated
/// relative error is below `target`.
pub fn refine_sup<F>(
    grid: &[f64],
    coarse: &[f64],
    fine: F,
    candidates: usize,
    min_steps: usize,
    max_steps: usize,
    target: f64,
) -> Result<SupResult>
where
    F: Fn(f64) -> Result<Float>,
{
    let mut best: Option<SupResult> = None;
    let top = coarse.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let picked = local_maxima(coarse, candidates)
        .into_iter()
        .enumerate()
        .filter(|&(r, i)| r == 0 || coarse[i] >= top * (1.0 - NEAR_TOP));
    for (_, i) in picked {
        let left = if i > 0 { grid[i] - grid[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < grid.len() { grid[i + 1] - grid[i] } else { f64::INFINITY };
        let mut h = left.min(right);
        if !h.is_finite() {
            h = 1.0;
        }
        let r = refine_one(grid[i], h, &fine, min_steps, max_steps, target)?;
        let better = match &best {
            None => true,
            Some(b) => cmp_float(&r.value, &b.value).is_gt(),
        };
        if better {
            best = Some(r);
        }
    }
    match best {
        Some(b) => Ok(b),
        None => {
            let x = grid[0];
            Ok(SupResult {
                x,
                value: fine(x)?,
                rel_error: 0.0,
            })
        }
    }
}

fn refine_one<F>(x0: f64, h0: f64, fine: &F, min_steps: usize, max_steps: usize, target: f64) -> Result<SupResult>
where
    F: Fn(f64) -> Result<Float>,
{
    let f0 = fine(x0)?;
    let mut best_x = x0;
    let mut best = f0;
    let mut c = x0;
    let mut h = h0;
    let mut rel_error = f64::INFINITY;
    for step in 0..max_steps {
        c = c.clamp(-1.0 + h, 1.0 - h);
        let (xa, xb) = (c - h, c + h);
        let fa = fine(xa)?;
        let fc = fine(c)?;
        let fb = fine(xb)?;
        for (x, v) in [(xa, &fa), (c, &fc), (xb, &fb)] {
            if cmp_float(v, &best).is_gt() {
                best = v.clone();
                best_x = x;
            }
        }
        let bits = fc.prec();
        let mut d2 = Float::with_val(bits, &fa + &fb);
        d2 -= Float::with_val(bits, &fc * 2u32);
        let scale = best.to_f64();
        rel_error = if scale > 0.0 {
            (d2.to_f64().abs() / (2.0 * scale)).max(0.0)
        } else if d2.is_zero() {
            0.0
        } else {
            f64::INFINITY
        };
        if d2.is_sign_negative() && !d2.is_zero() {
            let num = Float::with_val(bits, &fa - &fb);
            let offset = (h * (num / (d2 * 2u32)).to_f64()).clamp(-h, h);
            c += offset;
        } else {
            // Not concave: walk towards the best sample.
            c = best_x;
        }
        h /= 10.0;
        if step + 1 >= min_steps && rel_error <= target {
            break;
        }
    }
    let c = c.clamp(-1.0, 1.0);
    let fc = fine(c)?;
    if cmp_float(&fc, &best).is_gt() {
        best = fc;
        best_x = c;
    }
    Ok(SupResult {
        x: best_x,
        value: best,
        rel_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_ascending_with_exact_ends() {
        let g = chebyshev_grid(9);
        assert_eq!(g[0], -1.0);
        assert_eq!(g[8], 1.0);
        assert_eq!(g[4], 0.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn refines_interior_maximum() {
        let grid = chebyshev_grid(101);
        let f = |x: f64| 1.0 - (x - 0.123456789).powi(2);
        let coarse: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let r = refine_sup(&grid, &coarse, |x| Ok(Float::with_val(200, f(x))), 3, 3, 8, 1e-14).unwrap();
        assert!((r.x - 0.123456789).abs() < 1e-6);
        assert!((r.value.to_f64() - 1.0).abs() < 1e-12);
    }
}
