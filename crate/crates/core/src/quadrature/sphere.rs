//! Quadrature on the unit sphere `S^{n-1}` for `n = 1, 2, 3`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

use super::gauss::gauss_legendre;
use super::{QuadratureResult, Tolerance};

const MAX_LEVEL: usize = 12;

/// A fixed quadrature rule on `S^{n-1}`; points are padded to three
/// coordinates and only the first `n` are meaningful.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn apply(&self, g: &dyn Fn(&[f64]) -> f64) -> Result<f64> {
        let mut s = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            let v = g(&p[..self.dim]);
            if !v.is_finite() {
                return Err(Error::NonFinite { at: p[0] });
            }
            s += w * v;
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn build(dim: usize, level: usize) -> SphereRule {
    match dim {
        1 => SphereRule { dim, points: vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], weights: vec![1.0, 1.0] },
        2 => {
            let n = 16usize << level;
            let h = 2.0 * PI / n as f64;
            let points = (0..n).map(|i| {
                let th = h * i as f64;
                [th.cos(), th.sin(), 0.0]
            });
            SphereRule { dim, points: points.collect(), weights: vec![h; n] }
        }
        3 => {
            let m = 8usize << level;
            let (z, wz) = gauss_legendre(m);
            let na = 2 * m;
            let h = 2.0 * PI / na as f64;
            let mut points = Vec::with_capacity(m * na);
            let mut weights = Vec::with_capacity(m * na);
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).max(0.0).sqrt();
                for k in 0..na {
                    let ph = h * (k as f64 + 0.5);
                    points.push([s * ph.cos(), s * ph.sin(), *zi]);
                    weights.push(wi * h);
                }
            }
            SphereRule { dim, points, weights }
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Cached rule of the given refinement level. Level `ℓ` uses `16·2^ℓ`
/// nodes on the circle and `8·2^ℓ × 16·2^ℓ` nodes on `S^2`.
pub fn sphere_rule(dim: usize, level: usize) -> &'static SphereRule {
    static CACHE: [[OnceLock<SphereRule>; MAX_LEVEL + 1]; 3] = [const { [const { OnceLock::new() }; MAX_LEVEL + 1] }; 3];
    let level = level.min(MAX_LEVEL);
    CACHE[dim - 1][level].get_or_init(|| build(dim, level))
}

/// Finest level used for a `dim`: large rules on `S^2` get expensive fast.
pub(crate) fn max_level(dim: usize) -> usize {
    match dim {
        1 => 0,
        2 => MAX_LEVEL,
        _ => 5,
    }
}

/// Integrates `g` over `S^{n-1}` with respect to surface measure,
/// doubling the rule until successive estimates agree to `tol`.
pub fn integrate_sphere(n: usize, g: &dyn Fn(&[f64]) -> f64, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
    crate::check_dim(n)?;
    let tol = tol.into();
    if n == 1 {
        let v = sphere_rule(1, 0).apply(g)?;
        return Ok(QuadratureResult::exact(v));
    }
    let mut prev = sphere_rule(n, 0).apply(g)?;
    for level in 1..=max_level(n) {
        let cur = sphere_rule(n, level).apply(g)?;
        let err = (cur - prev).abs();
        if err <= tol.threshold(cur).max(64.0 * f64::EPSILON * cur.abs()) {
            return Ok(QuadratureResult { value: cur, abs_error_estimate: err, tail_bound: 0.0, converged: true });
        }
        prev = cur;
        if level == max_level(n) {
            return Ok(QuadratureResult { value: cur, abs_error_estimate: err, tail_bound: 0.0, converged: false });
        }
    }
    unreachable!()
}
