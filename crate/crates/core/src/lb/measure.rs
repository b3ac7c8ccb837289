//! Grid measurement of the neighbor-distance exceptional set.
//!
//! For points `a_1 < ... < a_q` in `[0, L]` and a point `x`, let `l_j` (`r_j`)
//! be the distance from `x` to the j-th point strictly on its left (right),
//! infinite when fewer than `j` points exist on that side, and
//!
//!     q_x = min_j min(l_j / j, r_j / j).
//!
//! The exceptional set `S_c = {x : q_x < c}` has measure at most `2cq` (at
//! most `cq` for either one-sided variant); the left-variant base case for a
//! single point is exactly `[a_1, a_1 + c)`. This module measures `S_c`
//! numerically on a uniform grid, with additive error `2L/resolution` for
//! well-separated point sets.

use crate::error::CondError;

/// Which neighbor distances enter `q_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborSide {
    Left,
    Right,
    Both,
}

/// Measures `{x in [0, L] : q_x < c}` on a uniform grid of `resolution`
/// cells (midpoint rule). `points` must be sorted ascending and distinct.
pub fn s_c_measure(
    points: &[f64],
    c: f64,
    l: f64,
    resolution: u64,
    side: NeighborSide,
) -> Result<f64, CondError> {
    if resolution < 10_000 {
        return Err(CondError::param(format!(
            "grid resolution must be at least 10^4, got {resolution}"
        )));
    }
    if !(c > 0.0) {
        return Err(CondError::param("c must be positive"));
    }
    if !(l > 0.0) {
        return Err(CondError::param("interval length must be positive"));
    }
    if points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CondError::param("points must be sorted and distinct"));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    let q = points.len();
    let step = l / resolution as f64;
    let mut hits = 0u64;
    for i in 0..resolution {
        let x = (i as f64 + 0.5) * step;
        if exceptional(points, x, c, q, side) {
            hits += 1;
        }
    }
    Ok(hits as f64 * step)
}

/// Is `q_x < c`? Checked incrementally; once the j-th distance reaches
/// `c * q` no later neighbor can qualify, since distances grow with `j`.
fn exceptional(points: &[f64], x: f64, c: f64, q: usize, side: NeighborSide) -> bool {
    let split = points.partition_point(|&p| p < x);
    let cutoff = c * q as f64;
    if matches!(side, NeighborSide::Left | NeighborSide::Both) {
        for j in 1..=split {
            let dist = x - points[split - j];
            if dist < c * j as f64 {
                return true;
            }
            if dist >= cutoff {
                break;
            }
        }
    }
    if matches!(side, NeighborSide::Right | NeighborSide::Both) {
        // points at exactly x count as right neighbors at distance zero
        for j in 1..=(points.len() - split) {
            let dist = points[split + j - 1] - x;
            if dist < c * j as f64 {
                return true;
            }
            if dist >= cutoff {
                break;
            }
        }
    }
    false
}

/// Exact `q_x` for one point (test and exploration helper).
pub fn q_x(points: &[f64], x: f64, side: NeighborSide) -> f64 {
    let split = points.partition_point(|&p| p < x);
    let mut best = f64::INFINITY;
    if matches!(side, NeighborSide::Left | NeighborSide::Both) {
        for j in 1..=split {
            best = best.min((x - points[split - j]) / j as f64);
        }
    }
    if matches!(side, NeighborSide::Right | NeighborSide::Both) {
        for j in 1..=(points.len() - split) {
            best = best.min((points[split + j - 1] - x) / j as f64);
        }
    }
    best
}
