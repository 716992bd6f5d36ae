//! Monotone bisection.

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Bisection on an increasing function.
///
/// Brackets are expressed as offsets `u ≥ 0` from an `origin` (the lower
/// endpoint of an income domain), and the function is evaluated at
/// `origin + u`. While the bracket spans more than a factor of four in `u`
/// the midpoint is geometric, so a bracket covering hundreds of orders of
/// magnitude collapses in a handful of steps before the arithmetic phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    /// Stop once `hi − lo ≤ rel_tol · (origin + hi)`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            rel_tol: 1e-12,
            max_iter: 200,
        }
    }
}

impl Bisection {
    /// Solves `f(x) = target` for `x` in `[lo, hi]` with `f(lo) ≤ target ≤ f(hi)`.
    pub fn solve<F: FnMut(f64) -> f64>(&self, f: F, target: f64, lo: f64, hi: f64) -> Result<f64> {
        self.solve_from(0.0, f, target, lo, hi)
    }

    /// As [`Bisection::solve`], with the bracket given as offsets from `origin`.
    pub fn solve_from<F: FnMut(f64) -> f64>(
        &self,
        origin: f64,
        mut f: F,
        target: f64,
        mut lo: f64,
        mut hi: f64,
    ) -> Result<f64> {
        if !(lo <= hi) || lo < 0.0 {
            return Err(Error::invalid("bisection bracket", lo, "0 <= lo <= hi"));
        }
        for _ in 0..self.max_iter {
            if hi - lo <= self.rel_tol * (origin + hi) || hi <= f64::MIN_POSITIVE {
                return Ok(origin + 0.5 * (lo + hi));
            }
            let mid = if lo > 0.0 && hi > 4.0 * lo {
                sqrt(lo) * sqrt(hi)
            } else {
                0.5 * (lo + hi)
            };
            let value = f(origin + mid);
            if value == target {
                return Ok(origin + mid);
            }
            if value < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::NoConvergence {
            iterations: self.max_iter,
        })
    }
}
