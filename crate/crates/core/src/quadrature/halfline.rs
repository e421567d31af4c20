//! Integration over `(0, ∞)` by the substitution `t = e^u` and dyadic panels.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

use super::gauss::adaptive;
use super::{QuadratureResult, Tolerance};

const PANEL_LIMIT: i32 = 600;
const SEGMENTS_PER_PANEL: usize = 200;

/// A real integrand on `(0, ∞)` with declared power-law behaviour at the
/// endpoints: `|f(t)| ≲ t^{e0}` as `t → 0` and `|f(t)| ≲ t^{e∞}` as `t → ∞`.
///
/// `e0 = +∞` declares that `f` vanishes near zero and `e∞ = −∞` that it
/// vanishes (or decays faster than any power) near infinity. Interior
/// discontinuities go in `breakpoints`; `support` restricts the integral
/// to `(lo, hi)`.
pub struct RadialIntegrand<'a> {
    eval: Box<dyn Fn(f64) -> f64 + 'a>,
    pub exponent_at_zero: f64,
    pub exponent_at_infinity: f64,
    pub breakpoints: Vec<f64>,
    pub support: (f64, f64),
}

impl<'a> RadialIntegrand<'a> {
    pub fn new(eval: impl Fn(f64) -> f64 + 'a, exponent_at_zero: f64, exponent_at_infinity: f64) -> Self {
        RadialIntegrand {
            eval: Box::new(eval),
            exponent_at_zero,
            exponent_at_infinity,
            breakpoints: Vec::new(),
            support: (0.0, f64::INFINITY),
        }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = (lo.max(0.0), hi);
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }
}

struct Side {
    panels: Vec<f64>,
    error: f64,
    resabs: f64,
    tail: f64,
    converged: bool,
}

/// Integrates `f` over its support within `(0, ∞)`.
///
/// Panels are dyadic in `t` (width `ln 2` in `u = ln t`) and are split at
/// every breakpoint. A fixed core covering `t = 1`, all breakpoints and any
/// finite support endpoint is integrated first; then panels are added
/// outward on each unbounded side until a geometric tail bound, built from
/// the declared exponent and the ratio of the last two panels, falls below
/// the tolerance.
pub fn integrate_halfline(f: &RadialIntegrand<'_>, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
    let tol = tol.into();
    let (e0, einf) = (f.exponent_at_zero, f.exponent_at_infinity);
    if e0.is_nan() || einf.is_nan() {
        return Err(Error::Parameter("integrand exponents must not be NaN".into()));
    }
    let (lo, hi) = f.support;
    if !(hi > lo) || lo.is_nan() || hi.is_nan() {
        return Ok(QuadratureResult::exact(0.0));
    }
    let open_left = lo == 0.0;
    let open_right = hi.is_infinite();
    if open_left && e0 <= -1.0 {
        return Err(Error::Divergent(format!("integrand ~ t^{e0} is not integrable at 0")));
    }
    if open_right && einf >= -1.0 {
        return Err(Error::Divergent(format!("integrand ~ t^{einf} is not integrable at infinity")));
    }

    let g = |u: f64| {
        let t = u.exp();
        f.eval(t) * t
    };

    // Core in dyadic index space.
    let mut marks: Vec<f64> = f.breakpoints.iter().copied().filter(|b| *b > lo && *b < hi && b.is_finite()).collect();
    marks.push(1.0f64.clamp(if open_left { 0.0 } else { lo }, hi));
    if !open_left {
        marks.push(lo);
    }
    if !open_right {
        marks.push(hi);
    }
    let positive: Vec<f64> = marks.iter().copied().filter(|m| *m > 0.0 && m.is_finite()).collect();
    let min_mark = positive.iter().copied().fold(f64::INFINITY, f64::min);
    let max_mark = positive.iter().copied().fold(0.0, f64::max);
    let mut j_lo = min_mark.log2().floor() as i32;
    let mut j_hi = max_mark.log2().ceil() as i32;
    if j_hi == j_lo {
        j_lo -= 1;
        j_hi += 1;
    }
    if j_lo < -PANEL_LIMIT || j_hi > PANEL_LIMIT {
        return Err(Error::Parameter("breakpoints outside the representable panel range".into()));
    }
    let core_lo = if open_left { j_lo as f64 * LN_2 } else { lo.ln() };
    let core_hi = if open_right { j_hi as f64 * LN_2 } else { hi.ln() };
    let mut knots: Vec<f64> = (j_lo..=j_hi).map(|j| j as f64 * LN_2).collect();
    knots.extend(f.breakpoints.iter().filter(|b| **b > 0.0 && b.is_finite()).map(|b| b.ln()));
    knots.push(core_lo);
    knots.push(core_hi);
    knots.retain(|u| *u >= core_lo && *u <= core_hi);
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));

    let core_tol = Tolerance::new(tol.abs * 0.5, tol.rel * 0.5);
    let mut core_value = 0.0;
    let mut core_error = 0.0;
    let mut core_resabs = 0.0;
    let mut converged = true;
    let pieces = (knots.len().max(2) - 1) as f64;
    for w in knots.windows(2) {
        let r = adaptive(&g, w[0], w[1], Tolerance::new(core_tol.abs / pieces, core_tol.rel), SEGMENTS_PER_PANEL)?;
        core_value += r.value;
        core_error += r.error;
        core_resabs += r.resabs;
        converged &= r.converged;
    }

    let base = tol.threshold(core_value);
    let right = if open_right {
        expand(&g, j_hi, 1, -(einf + 1.0), base, tol, core_value)?
    } else {
        Side { panels: vec![], error: 0.0, resabs: 0.0, tail: 0.0, converged: true }
    };
    let left = if open_left {
        expand(&g, j_lo, -1, e0 + 1.0, base, tol, core_value)?
    } else {
        Side { panels: vec![], error: 0.0, resabs: 0.0, tail: 0.0, converged: true }
    };

    let value = core_value + right.panels.iter().sum::<f64>() + left.panels.iter().sum::<f64>();
    let error = core_error + right.error + left.error;
    let tail = right.tail + left.tail;
    let resabs = core_resabs + right.resabs + left.resabs;
    let floor = 64.0 * f64::EPSILON * resabs;
    converged &= right.converged && left.converged && error + tail <= tol.threshold(value).max(floor);
    Ok(QuadratureResult { value, abs_error_estimate: error, tail_bound: tail, converged })
}

/// Adds dyadic panels beyond `start` in direction `dir` (+1 right, −1 left).
/// `decay` is the declared geometric decay exponent: consecutive panels
/// shrink like `2^{−decay}`.
fn expand(
    g: &dyn Fn(f64) -> f64,
    start: i32,
    dir: i32,
    decay: f64,
    base: f64,
    tol: Tolerance,
    core_value: f64,
) -> Result<Side> {
    let declared = if decay.is_infinite() { 0.0 } else { (-decay * LN_2).exp() };
    let mut side = Side { panels: Vec::new(), error: 0.0, resabs: 0.0, tail: f64::INFINITY, converged: true };
    let mut running = core_value;
    let mut j = start;
    let mut zeros = 0;
    let mut nondecay = 0;
    let mut last_ratio: Option<f64> = None;
    for i in 0.. {
        let (a, b) = if dir > 0 { (j, j + 1) } else { (j - 1, j) };
        if a < -PANEL_LIMIT || b > PANEL_LIMIT {
            let achieved = side.error + side.tail;
            return Err(Error::ToleranceNotMet { requested: tol.threshold(running).max(base), achieved });
        }
        let budget = 0.25 * base.max(tol.threshold(running)) * 0.5f64.powi(i + 1);
        let r = adaptive(g, a as f64 * LN_2, b as f64 * LN_2, Tolerance::new(budget, tol.rel * 0.25), SEGMENTS_PER_PANEL)?;
        side.error += r.error;
        side.resabs += r.resabs;
        side.converged &= r.converged;
        running += r.value;
        let current = r.value.abs();
        let prev = side.panels.last().map(|p: &f64| p.abs());
        side.panels.push(r.value);
        j += dir;

        if current == 0.0 {
            zeros += 1;
            if zeros >= 2 {
                side.tail = 0.0;
                return Ok(side);
            }
            continue;
        }
        zeros = 0;
        let Some(prev) = prev else { continue };
        // Power-law growth has a steady panel ratio; a transient bump does not.
        let ratio = current / prev;
        let steady = last_ratio.is_some_and(|r: f64| (ratio / r - 1.0).abs() < 0.1);
        if prev > 0.0 && current >= prev && (nondecay == 0 || steady) {
            nondecay += 1;
        } else if prev > 0.0 && current >= prev {
            nondecay = 1;
        } else {
            nondecay = 0;
        }
        last_ratio = Some(ratio);
        if side.panels.len() >= 4 && nondecay >= 3 {
            return Err(Error::Divergent(format!(
                "panel contributions stopped decaying near t = 2^{}",
                j
            )));
        }
        let empirical = if prev > 0.0 { current / prev } else { 0.0 };
        let rho = declared.max(empirical);
        if rho < 1.0 {
            side.tail = current * rho / (1.0 - rho);
            let target = 0.125 * tol.threshold(running).max(if tol.abs > 0.0 { tol.abs } else { 0.0 });
            let floor = 16.0 * f64::EPSILON * running.abs();
            if side.tail <= target.max(floor) && side.panels.len() >= 2 {
                return Ok(side);
            }
            // Slowly decaying power tail: once the panels follow the declared
            // ratio, sum the remaining geometric series in closed form.
            let n = side.panels.len();
            let same_sign = n >= 2 && side.panels[n - 2].signum() == r.value.signum();
            if declared > 0.0 && n >= 4 && same_sign {
                let spread = (empirical - declared).abs();
                let uncertainty = 4.0 * current * spread / (1.0 - rho).powi(2);
                if uncertainty <= target.max(floor) {
                    side.panels.push(r.value * declared / (1.0 - declared));
                    side.tail = uncertainty;
                    return Ok(side);
                }
            }
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_tail_matches_antiderivative() {
        let f = RadialIntegrand::new(|t: f64| if t > 1.0 { t.powf(-2.5) } else { 0.0 }, f64::INFINITY, -2.5)
            .with_breakpoints([1.0]);
        let r = integrate_halfline(&f, 1e-10).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn harmonic_divergence_is_declared() {
        let f = RadialIntegrand::new(|t: f64| if t < 1.0 { 1.0 / t } else { 0.0 }, -1.0, f64::NEG_INFINITY);
        assert!(integrate_halfline(&f, 1e-10).unwrap_err().is_divergent());
    }

    #[test]
    fn undeclared_growth_is_detected() {
        // Declares decay at infinity but actually behaves like 1/t.
        let f = RadialIntegrand::new(|t: f64| 1.0 / (1.0 + t), 0.0, -2.0);
        assert!(integrate_halfline(&f, 1e-10).unwrap_err().is_divergent());
    }

    #[test]
    fn exponential() {
        let f = RadialIntegrand::new(|t: f64| (-t).exp(), 0.0, f64::NEG_INFINITY);
        let r = integrate_halfline(&f, 1e-12).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn both_singular_ends() {
        // ∫ t^{-1/2}/(1+t) = π
        let f = RadialIntegrand::new(|t: f64| t.powf(-0.5) / (1.0 + t), -0.5, -1.5);
        let r = integrate_halfline(&f, Tolerance::rel(1e-11)).unwrap();
        assert!((r.value - std::f64::consts::PI).abs() < 1e-9, "{r:?}");
        assert!(r.converged);
    }

    #[test]
    fn finite_support() {
        let f = RadialIntegrand::new(|t: f64| t * t, 0.0, 0.0).with_support(0.0, 3.0);
        let r = integrate_halfline(&f, 1e-12).unwrap();
        assert!((r.value - 9.0).abs() < 1e-11);
        let f = RadialIntegrand::new(|t: f64| t.powi(-3), 0.0, -3.0).with_support(2.0, f64::INFINITY);
        let r = integrate_halfline(&f, 1e-12).unwrap();
        assert!((r.value - 0.125).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_dominates_truncated_mass() {
        for a in [-1.2, -1.5, -2.0, -4.0] {
            let f = RadialIntegrand::new(move |t: f64| if t > 1.0 { t.powf(a) } else { 0.0 }, f64::INFINITY, a)
                .with_breakpoints([1.0]);
            let r = integrate_halfline(&f, 1e-9).unwrap();
            let exact = -1.0 / (a + 1.0);
            assert!((r.value - exact).abs() <= r.tail_bound + r.abs_error_estimate + 1e-12, "a={a} {r:?}");
        }
    }
}
