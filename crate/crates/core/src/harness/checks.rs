//! Per-theorem verification: upper-bound ratios over a corpus, extremal
//! lower bounds, the annulus-mass identity and the pointwise Lipschitz bound.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{parse_symbol, CaseSpec, SuiteConfig, Theorem, Tolerances};
use super::corpus::default_corpus;
use super::report::{num, CaseReport, PlotSeries, ReportRow, Verdict};
use crate::bounds::{self, BoundConstant, C5Variant, ConstantValue};
use crate::error::{Error, Result};
use crate::extremals::{herz_extremal, herz_lower_integral, morrey_extremal, morrey_herz_extremal};
use crate::functions::{omega_norm, AngularProfile, LipschitzSymbol, RadialKernel, RadialProfile, Sign, TestFunction};
use crate::operators::{lipschitz_pointwise_bound, CommutatorOperator, HausdorffOperator};
use crate::quadrature::{integrate_region_with, Region, Tolerance};
use crate::spaces::{self, DyadicWindow, NormConfig, NormResult};
use crate::weights::Weight;

type NormFn<'a> = dyn Fn(&TestFunction) -> Result<NormResult> + Sync + 'a;
type ImageFn<'a> = dyn Fn(&TestFunction) -> TestFunction + Sync + 'a;

/// Row and bookkeeping accumulator for one case.
struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    case: &'a CaseSpec,
    tol: Tolerances,
    norm: NormConfig,
    rows: Vec<ReportRow>,
    constants: BTreeMap<String, serde_json::Value>,
    slack: Option<f64>,
    evaluated: usize,
    skipped: usize,
    plots: Vec<PlotSeries>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a SuiteConfig, case: &'a CaseSpec) -> Self {
        let norm = NormConfig { window: cfg.dyadic_window, tol: cfg.tolerances.quadrature_rel, ..NormConfig::default() };
        Ctx {
            cfg,
            case,
            tol: cfg.tolerances,
            norm,
            rows: Vec::new(),
            constants: BTreeMap::new(),
            slack: None,
            evaluated: 0,
            skipped: 0,
            plots: Vec::new(),
        }
    }

    fn image_tol(&self) -> f64 {
        self.tol.quadrature_rel * 0.05
    }

    fn row(&mut self, quantity: &str, value: f64, bound: Option<f64>, margin: Option<f64>, verdict: Verdict, note: impl Into<String>) {
        self.rows.push(ReportRow {
            case_id: self.case.id.clone(),
            theorem: self.case.theorem.name().to_string(),
            quantity: quantity.to_string(),
            value,
            bound,
            margin,
            verdict,
            note: note.into(),
        });
    }

    fn skip(&mut self, quantity: &str, reason: impl Into<String>) {
        self.row(quantity, f64::NAN, None, None, Verdict::Skipped, reason);
    }

    fn fail(&mut self, quantity: &str, reason: impl Into<String>) {
        self.row(quantity, f64::NAN, None, None, Verdict::Fail, reason);
    }

    fn pass_if(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// `value ≤ bound` up to the ratio tolerance.
    fn upper_row(&mut self, quantity: &str, value: f64, bound: f64, note: impl Into<String>) {
        let margin = bound * (1.0 + self.tol.ratio_rel) - value;
        self.row(quantity, value, Some(bound), Some(margin), Self::pass_if(margin >= 0.0), note);
    }

    /// `value ≥ bound` up to the ratio tolerance.
    fn lower_row(&mut self, quantity: &str, value: f64, bound: f64, note: impl Into<String>) {
        let margin = value - bound * (1.0 - self.tol.ratio_rel);
        self.row(quantity, value, Some(bound), Some(margin), Self::pass_if(margin >= 0.0), note);
    }

    /// `value = target` up to the ratio tolerance.
    fn equal_row(&mut self, quantity: &str, value: f64, target: f64, note: impl Into<String>) {
        let margin = self.tol.ratio_rel - (value / target - 1.0).abs();
        self.row(quantity, value, Some(target), Some(margin), Self::pass_if(margin >= 0.0), note);
    }

    fn constant(&mut self, c: &BoundConstant) -> Option<f64> {
        self.constants.insert(c.id.name().to_string(), num::to_json(c.finite().unwrap_or(f64::INFINITY)));
        c.finite()
    }

    fn record(&mut self, name: &str, v: f64) {
        self.constants.insert(name.to_string(), num::to_json(v));
    }

    fn finish(self) -> CaseReport {
        CaseReport {
            id: self.case.id.clone(),
            theorem: self.case.theorem.name().to_string(),
            constants: self.constants,
            slack: self.slack,
            corpus_evaluated: self.evaluated,
            corpus_skipped: self.skipped,
            rows: self.rows,
            plots: self.plots,
        }
    }

    fn corpus(&self, omega: &AngularProfile, r: f64) -> Vec<TestFunction> {
        let size = self.case.corpus.as_ref().map_or(20, |c| c.size);
        default_corpus(omega, r, size)
    }

    fn include_extremal(&self) -> bool {
        self.case.corpus.as_ref().is_some_and(|c| c.include_extremal)
    }

    /// Handles a divergent constant; returns `true` when the case should stop.
    fn divergence_gate(&mut self, name: &str, value: Option<f64>) -> bool {
        match (value, self.case.expect_divergent) {
            (None, true) => {
                self.row(name, f64::INFINITY, None, None, Verdict::DivergentAsPredicted, "constant diverges, as the case predicts");
                false
            }
            (None, false) => {
                self.skip(name, "constant diverges; the upper check is inapplicable");
                true
            }
            (Some(v), true) => {
                self.row(name, v, None, None, Verdict::Fail, "case predicts divergence but the constant is finite");
                true
            }
            (Some(_), false) => false,
        }
    }
}

enum Outcome {
    Ratio(String, f64),
    Skipped(String, String),
    Failed(String, String),
}

fn corpus_ratios(corpus: &[TestFunction], source: &NormFn<'_>, image: &ImageFn<'_>, target: &NormFn<'_>) -> Vec<Outcome> {
    corpus
        .par_iter()
        .map(|f| {
            let label = f.label();
            let s = match source(f) {
                Ok(n) => n.value,
                Err(e) => return Outcome::Skipped(label, format!("source norm: {e}")),
            };
            if !(s > 0.0 && s.is_finite()) {
                return Outcome::Skipped(label, format!("source norm {s} is not in (0, ∞)"));
            }
            match target(&image(f)) {
                Ok(t) if t.value.is_finite() => Outcome::Ratio(label, t.value / s),
                Ok(t) => Outcome::Failed(label, format!("target norm {}", t.value)),
                Err(e) => Outcome::Failed(label, format!("target norm: {e}")),
            }
        })
        .collect()
}

/// One extremal ratio `‖Tf‖/‖f‖`.
fn single_ratio(f: &TestFunction, source: &NormFn<'_>, image: &ImageFn<'_>, target: &NormFn<'_>) -> Result<f64> {
    let s = source(f)?.value;
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("source norm {s} is not in (0, ∞)")));
    }
    Ok(target(&image(f))?.value / s)
}

fn upper_check(ctx: &mut Ctx<'_>, corpus: &[TestFunction], source: &NormFn<'_>, image: &ImageFn<'_>, target: &NormFn<'_>, bound: f64, note: &str) -> Option<f64> {
    let outcomes = corpus_ratios(corpus, source, image, target);
    let mut best: Option<(String, f64)> = None;
    let mut skipped = Vec::new();
    let mut failed = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Ratio(l, r) => {
                ctx.evaluated += 1;
                if best.as_ref().is_none_or(|b| r > b.1) {
                    best = Some((l, r));
                }
            }
            Outcome::Skipped(l, why) => {
                ctx.skipped += 1;
                skipped.push(format!("{l} ({why})"));
            }
            Outcome::Failed(l, why) => failed.push(format!("{l}: {why}")),
        }
    }
    if !failed.is_empty() {
        ctx.fail("upper_max_ratio", format!("target norm failed for {}", failed.join("; ")));
        return None;
    }
    let Some((label, r)) = best else {
        ctx.skip("upper_max_ratio", "no corpus function has a finite nonzero source norm");
        return None;
    };
    let mut text = format!("{note}; max at {label}; {} evaluated", ctx.evaluated);
    if !skipped.is_empty() {
        text.push_str(&format!(", {} skipped", skipped.len()));
    }
    ctx.upper_row("upper_max_ratio", r, bound, text);
    Some(r)
}

fn require<T: Clone>(v: &Option<T>) -> T {
    v.clone().expect("validated before the run")
}

struct Common {
    phi: RadialKernel,
    omega: AngularProfile,
    w: Weight,
    n: usize,
    gamma: f64,
}

fn common(ctx: &Ctx<'_>) -> Result<Common> {
    let c = ctx.case;
    let phi = ctx.cfg.kernel(&require(&c.kernel))?;
    let omega = ctx.cfg.omega(&require(&c.omega))?;
    let w = ctx.cfg.weight(&require(&c.weight))?;
    let (n, gamma) = (w.dim, w.gamma);
    Ok(Common { phi, omega, w, n, gamma })
}

/// `(ω(S)/c)^{1/s}`: the angular part of the proof-chain slack.
fn angular_slack(w: &Weight, s: f64) -> f64 {
    (w.sphere_mass() / w.lower_bound()).powf(1.0 / s)
}

/// Dyadic splitting factor for a dilation exponent `e`: `1 + 2^{|e|}`.
fn dyadic_slack(e: f64) -> f64 {
    1.0 + 2f64.powf(e.abs())
}

fn corollary_gate(ctx: &mut Ctx<'_>, c: &Common) -> bool {
    if !ctx.case.theorem.is_corollary() {
        return true;
    }
    if !c.w.is_power() {
        ctx.skip("hypotheses", "the corollary needs a power weight |x|^γ");
        return false;
    }
    if c.phi.sign != Sign::Nonnegative {
        ctx.skip("hypotheses", "the corollary needs a nonnegative Φ");
        return false;
    }
    true
}

fn lower_gate(ctx: &mut Ctx<'_>, c: &Common, exponent: f64, name: &str) -> bool {
    if !(exponent > 1.0) {
        ctx.skip("lower_bound", format!("the extremal needs {name} > 1"));
        return false;
    }
    if !c.phi.has_constant_sign() {
        ctx.skip("lower_bound", "the necessity argument needs Φ of constant sign");
        return false;
    }
    if !c.omega.nonvanishing {
        ctx.skip("lower_bound", "the extremal needs a nonvanishing Ω");
        return false;
    }
    true
}

fn run_morrey(ctx: &mut Ctx<'_>) -> Result<()> {
    let c = common(ctx)?;
    let (p, lambda) = (require(&ctx.case.p), require(&ctx.case.lambda));
    let nf = c.n as f64;
    if !(p >= 1.0 && p.is_finite()) || !(1.0 + lambda * p > 0.0) || !(c.gamma > -nf) {
        ctx.skip("hypotheses", format!("need 1 ≤ p < ∞, 1 + λp > 0 and γ > −n (p = {p}, λ = {lambda}, γ = {})", c.gamma));
        return Ok(());
    }
    if !corollary_gate(ctx, &c) {
        return Ok(());
    }
    let qt = ctx.tol.quadrature_rel;
    let constant = if ctx.case.theorem.is_corollary() {
        bounds::c1_1(&c.phi, c.n, c.gamma, lambda, qt)?
    } else {
        bounds::c1(&c.phi, c.n, c.gamma, lambda, qt)?
    };
    let value = ctx.constant(&constant);
    if ctx.divergence_gate(constant.id.name(), value) {
        return Ok(());
    }
    let r = crate::conjugate(p);
    let op = HausdorffOperator::new(c.phi.clone(), c.omega.clone());
    let itol = ctx.image_tol();
    let image = |f: &TestFunction| op.image(f, itol);
    let Some(cval) = value else {
        return growth_check(ctx, &c, p, lambda, r, &op);
    };
    let omega_r = omega_norm(&c.omega, r, None, qt)?;
    let k = angular_slack(&c.w, p);
    ctx.slack = Some(k);
    ctx.record("omega_norm", omega_r);
    let sharp = cval * omega_r * k;
    let norm = ctx.norm;
    let w = c.w.clone();
    let morrey = move |f: &TestFunction| spaces::central_morrey_norm(f, p, lambda, &w, &norm);
    let mut corpus = ctx.corpus(&c.omega, r);
    let extremal = if p > 1.0 && c.omega.nonvanishing { morrey_extremal(&c.omega, &c.w, lambda, p, qt).ok() } else { None };
    if ctx.include_extremal() {
        if let Some(e) = &extremal {
            corpus.push(e.function.clone());
        }
    }
    let upper = upper_check(ctx, &corpus, &morrey, &image, &morrey, sharp, &format!("bound K·C·‖Ω‖_{{p'}} with K = {k:.6}"));
    if !lower_gate(ctx, &c, p, "p") {
        return Ok(());
    }
    let ext = match extremal {
        Some(e) => e,
        None => {
            ctx.skip("lower_bound", "extremal construction failed");
            return Ok(());
        }
    };
    let ratio = single_ratio(&ext.function, &morrey, &image, &morrey)?;
    let factor = ext.lower_bound_factor();
    ctx.record("lower_bound_factor", factor);
    let predicted = cval.abs() * factor * c.w.sphere_mass().powf(1.0 / p);
    ctx.equal_row("extremal_ratio", ratio, predicted, "exact value C·factor·ω(S)^{1/p}");
    ctx.lower_row("stated_lower_bound", ratio, cval.abs() * factor, "ratio ≥ C·factor");
    if ctx.case.theorem == Theorem::Cor3_1 {
        let up = upper.unwrap_or(0.0) / sharp - 1.0;
        let dev = (ratio / sharp - 1.0).abs().max(up.max(0.0));
        let margin = ctx.tol.ratio_rel - dev;
        ctx.row(
            "two_sided",
            dev,
            Some(ctx.tol.ratio_rel),
            Some(margin),
            Ctx::pass_if(margin >= 0.0),
            "max deviation of extremal and corpus ratios from C·‖Ω‖_{p'}·|S^{n-1}|^{1/p}",
        );
    }
    Ok(())
}

/// Negative control: with a divergent constant, the corpus max ratio must
/// grow as the dyadic window widens.
fn growth_check(ctx: &mut Ctx<'_>, c: &Common, p: f64, lambda: f64, r: f64, op: &HausdorffOperator) -> Result<()> {
    let windows = ctx.case.windows.clone();
    if windows.len() < 2 {
        ctx.skip("ratio_growth", "needs at least two window sizes");
        return Ok(());
    }
    let corpus = ctx.corpus(&c.omega, r);
    let itol = ctx.image_tol();
    let image = |f: &TestFunction| op.image(f, itol);
    let mut points = Vec::new();
    for &h in &windows {
        let strict = NormConfig { window: DyadicWindow::symmetric(h), ..ctx.norm };
        let lenient = strict.lenient();
        let w = c.w.clone();
        let w2 = c.w.clone();
        let source = move |f: &TestFunction| spaces::central_morrey_norm(f, p, lambda, &w, &strict);
        let target = move |f: &TestFunction| spaces::central_morrey_norm(f, p, lambda, &w2, &lenient);
        let best = corpus_ratios(&corpus, &source, &image, &target)
            .into_iter()
            .filter_map(|o| match o {
                Outcome::Ratio(_, r) => Some(r),
                _ => None,
            })
            .fold(f64::NEG_INFINITY, f64::max);
        points.push((h as f64, best));
    }
    let increasing = points.windows(2).all(|w| w[1].1 > w[0].1);
    let note = points.iter().map(|(h, v)| format!("{h}: {v:.6}")).collect::<Vec<_>>().join(", ");
    let (first, last) = (points[0].1, points[points.len() - 1].1);
    ctx.row(
        "ratio_growth",
        last,
        Some(first),
        Some(last - first),
        Ctx::pass_if(increasing),
        format!("corpus max ratio by window half-width: {note}"),
    );
    ctx.plots.push(PlotSeries { name: "ratio_vs_window".into(), x_label: "window".into(), y_label: "max ratio".into(), points });
    Ok(())
}

fn run_herz(ctx: &mut Ctx<'_>) -> Result<()> {
    let c = common(ctx)?;
    let (p, q, alpha) = (require(&ctx.case.p), require(&ctx.case.q), require(&ctx.case.alpha));
    if c.n != 1 {
        ctx.skip("hypotheses", "the constant's exponent 1−2n−(γ+n)/q matches the proof's change of variables only for n = 1");
        return Ok(());
    }
    if !(q >= 1.0 && q.is_finite()) || !(p >= 1.0 && p.is_finite()) || !(c.gamma > -(c.n as f64)) {
        ctx.skip("hypotheses", format!("need 1 ≤ p, q < ∞ and γ > −n (p = {p}, q = {q}, γ = {})", c.gamma));
        return Ok(());
    }
    if !corollary_gate(ctx, &c) {
        return Ok(());
    }
    let qt = ctx.tol.quadrature_rel;
    let statement = bounds::c2(&c.phi, c.n, c.gamma, q, None, qt)?;
    ctx.constant(&statement);
    let proof = bounds::c2(&c.phi, c.n, c.gamma, q, Some(alpha), qt)?;
    let value = ctx.constant(&proof);
    if ctx.divergence_gate(proof.id.name(), value) {
        return Ok(());
    }
    let Some(cval) = value else {
        ctx.skip("ratio_growth", "growth runs are implemented for the Morrey family");
        return Ok(());
    };
    let r = crate::conjugate(q);
    let omega_r = omega_norm(&c.omega, r, None, qt)?;
    let k = dyadic_slack(alpha) * angular_slack(&c.w, q);
    ctx.slack = Some(k);
    ctx.record("omega_norm", omega_r);
    let op = HausdorffOperator::new(c.phi.clone(), c.omega.clone());
    let itol = ctx.image_tol();
    let image = |f: &TestFunction| op.image(f, itol);
    let norm = ctx.norm;
    let w = c.w.clone();
    let herz = move |f: &TestFunction| spaces::herz_norm(f, alpha, p, q, &w, &norm);
    let k_max = ctx.norm.window.k_max;
    let truncated = |m: u32| -> Result<TestFunction> {
        let ext = herz_extremal(&c.omega, &c.w, q, alpha, m, qt)?;
        let e = -alpha - (c.gamma + c.n as f64) / q - 2f64.powi(-(m as i32));
        let TestFunction::Separable { angular, .. } = &ext.function else { unreachable!("extremals are separable") };
        Ok(TestFunction::separable(RadialProfile::power_on(e, 1.0, 2f64.powi(k_max - 1)), angular.clone()))
    };
    let mut ms = ctx.case.extremal_ms.clone();
    ms.sort_unstable();
    let mut corpus = ctx.corpus(&c.omega, r);
    if ctx.include_extremal() && q > 1.0 && c.omega.nonvanishing {
        if let Ok(g) = truncated(*ms.last().unwrap_or(&10)) {
            corpus.push(g);
        }
    }
    upper_check(ctx, &corpus, &herz, &image, &herz, k * cval * omega_r, &format!("bound K·C2_proof_alpha·‖Ω‖_{{q'}} with K = {k:.6}"));
    if !lower_gate(ctx, &c, q, "q") {
        return Ok(());
    }
    if ms.is_empty() {
        ctx.skip("lower_bound", "no extremal_ms configured");
        return Ok(());
    }
    let factor = herz_extremal(&c.omega, &c.w, q, alpha, ms[0], qt)?.lower_bound_factor();
    ctx.record("lower_bound_factor", factor);
    let results: Vec<Result<(u32, f64, f64)>> = ms
        .par_iter()
        .map(|&m| {
            let l = match herz_lower_integral(&c.phi, c.n, c.gamma, q, m, qt)? {
                ConstantValue::Finite(v) => v * factor,
                ConstantValue::Divergent => f64::INFINITY,
            };
            let g = truncated(m)?;
            Ok((m, single_ratio(&g, &herz, &image, &herz)?, l))
        })
        .collect();
    let mut series = Vec::new();
    for res in results {
        match res {
            Ok(v) => series.push(v),
            Err(e) => {
                ctx.skip("lower_bound", format!("extremal evaluation failed: {e}"));
                return Ok(());
            }
        }
    }
    for &(m, ratio, l) in &series {
        ctx.lower_row(&format!("extremal_ratio_m{m}"), ratio, l, format!("truncated extremal g_{m} = f_{m}·χ(|x| ≤ 2^{}) against factor·∫_(S_{m})", k_max - 1));
    }
    let diffs: Vec<f64> = series.windows(2).map(|w| w[1].2 - w[0].2).collect();
    let worst = diffs.iter().copied().fold(f64::INFINITY, f64::min);
    let monotone = diffs.iter().zip(series.windows(2)).all(|(d, w)| *d >= -1e-12 * w[0].2.abs());
    let ls = series.iter().map(|(m, _, l)| format!("{m}: {l:.6}")).collect::<Vec<_>>().join(", ");
    let rs = series.iter().map(|(m, r, _)| format!("{m}: {r:.6}")).collect::<Vec<_>>().join(", ");
    if series.len() >= 2 {
        ctx.row(
            "lower_integral_monotone",
            worst,
            Some(0.0),
            Some(worst),
            Ctx::pass_if(monotone),
            format!("S_m lower bounds {ls}; extremal ratios {rs}"),
        );
    }
    ctx.plots.push(PlotSeries {
        name: "ratio_vs_m".into(),
        x_label: "m".into(),
        y_label: "extremal ratio".into(),
        points: series.iter().map(|(m, r, _)| (*m as f64, *r)).collect(),
    });
    ctx.plots.push(PlotSeries {
        name: "lower_vs_m".into(),
        x_label: "m".into(),
        y_label: "S_m lower bound".into(),
        points: series.iter().map(|(m, _, l)| (*m as f64, *l)).collect(),
    });
    Ok(())
}

fn run_morrey_herz(ctx: &mut Ctx<'_>) -> Result<()> {
    let c = common(ctx)?;
    let (p, q, alpha, lambda) = (require(&ctx.case.p), require(&ctx.case.q), require(&ctx.case.alpha), require(&ctx.case.lambda));
    if !(q >= 1.0 && q.is_finite()) || !(p >= 1.0 && p.is_finite()) || !(lambda > 0.0) {
        ctx.skip("hypotheses", format!("need 1 ≤ p, q < ∞ and λ > 0 (p = {p}, q = {q}, λ = {lambda})"));
        return Ok(());
    }
    if !corollary_gate(ctx, &c) {
        return Ok(());
    }
    let qt = ctx.tol.quadrature_rel;
    let constant = bounds::c3(&c.phi, c.n, c.gamma, q, lambda, alpha, qt)?;
    let value = ctx.constant(&constant);
    if ctx.divergence_gate("C3", value) {
        return Ok(());
    }
    let Some(cval) = value else {
        ctx.skip("ratio_growth", "growth runs are implemented for the Morrey family");
        return Ok(());
    };
    let r = crate::conjugate(q);
    let omega_r = omega_norm(&c.omega, r, None, qt)?;
    let ks = angular_slack(&c.w, q);
    let k = dyadic_slack(lambda - alpha) * ks;
    ctx.slack = Some(k);
    ctx.record("omega_norm", omega_r);
    let op = HausdorffOperator::new(c.phi.clone(), c.omega.clone());
    let itol = ctx.image_tol();
    let image = |f: &TestFunction| op.image(f, itol);
    let norm = ctx.norm;
    let w = c.w.clone();
    let mk = move |f: &TestFunction| spaces::morrey_herz_norm(f, alpha, lambda, p, q, &w, &norm);
    let extremal = if q > 1.0 && c.omega.nonvanishing { morrey_herz_extremal(&c.omega, &c.w, p, q, alpha, lambda, qt).ok() } else { None };
    let mut corpus = ctx.corpus(&c.omega, r);
    if ctx.include_extremal() {
        if let Some(e) = &extremal {
            corpus.push(e.function.clone());
        }
    }
    upper_check(ctx, &corpus, &mk, &image, &mk, k * cval * omega_r, &format!("bound K·C3·‖Ω‖_{{q'}} with K = {k:.6}"));
    if !lower_gate(ctx, &c, q, "q") {
        return Ok(());
    }
    let Some(ext) = extremal else {
        ctx.skip("lower_bound", "extremal construction failed");
        return Ok(());
    };
    let ratio = single_ratio(&ext.function, &mk, &image, &mk)?;
    let factor = ext.lower_bound_factor();
    ctx.record("lower_bound_factor", factor);
    let predicted = cval.abs() * factor * c.w.sphere_mass().powf(1.0 / q);
    ctx.equal_row("extremal_ratio", ratio, predicted, "exact value C3·factor·ω(S)^{1/q}");
    ctx.lower_row("stated_lower_bound", ratio, cval.abs() * factor, "ratio ≥ C3·factor");
    Ok(())
}

fn run_commutator(ctx: &mut Ctx<'_>) -> Result<()> {
    let c = common(ctx)?;
    let case = ctx.case;
    let w1 = c.w.clone();
    let w2 = match &case.weight2 {
        Some(name) => ctx.cfg.weight(name)?,
        None => c.w.clone(),
    };
    let (n, gamma) = (c.n, c.gamma);
    let nf = n as f64;
    let (p, beta) = (require(&case.p), require(&case.beta));
    if w2.dim != n || w2.gamma != gamma {
        ctx.skip("hypotheses", "both weights must belong to the same class W_γ on the same R^n");
        return Ok(());
    }
    if !(gamma > -nf) || !(beta > 0.0 && beta <= 1.0) || !(p >= 1.0 && p.is_finite()) {
        ctx.skip("hypotheses", format!("need γ > −n, 0 < β ≤ 1 and 1 ≤ p < ∞ (γ = {gamma}, β = {beta}, p = {p})"));
        return Ok(());
    }
    let symbol = match &case.symbol {
        Some(s) => parse_symbol(s)?,
        None => LipschitzSymbol::power(beta)?,
    };
    if symbol.beta != beta {
        ctx.skip("hypotheses", format!("symbol exponent {} differs from β = {beta}", symbol.beta));
        return Ok(());
    }
    let qt = ctx.tol.quadrature_rel;
    let norm = ctx.norm;
    let m1 = w1.sphere_mass() / (nf + gamma);
    type Pair = (Box<NormFn<'static>>, Box<NormFn<'static>>);
    let (constant, k, r, source, target): (BoundConstant, f64, f64, Box<NormFn<'static>>, Box<NormFn<'static>>) = match case.theorem {
        Theorem::T3_4 => {
            let lambda = require(&case.lambda);
            let l1 = bounds::lambda1(n, gamma, p, lambda, beta);
            if !(l1 > 0.0) {
                ctx.skip("hypotheses", format!("λ1 = λ − βp/(n+γ) = {l1} must be positive"));
                return Ok(());
            }
            ctx.record("lambda1", l1);
            let cst = bounds::c4(&c.phi, n, gamma, p, l1, beta, Some(lambda), qt)?;
            let k = angular_slack(&w1, p) * ((nf + gamma) / w2.sphere_mass()).powf(beta / (nf + gamma));
            let (a1, a2, b1, b2) = (w1.clone(), w2.clone(), w1.clone(), w2.clone());
            let pair: Pair = (
                Box::new(move |f| spaces::two_weight_morrey_norm(f, p, l1, &a1, &a2, &norm)),
                Box::new(move |f| spaces::two_weight_morrey_norm(f, p, lambda, &b1, &b2, &norm)),
            );
            (cst, k, crate::conjugate(p), pair.0, pair.1)
        }
        Theorem::T3_5 | Theorem::T3_6 => {
            let q = require(&case.q);
            if !(q >= 1.0 && q.is_finite()) {
                ctx.skip("hypotheses", format!("need 1 ≤ q < ∞, got {q}"));
                return Ok(());
            }
            let alpha2 = require(&case.alpha2);
            let a1v = bounds::alpha1(n, gamma, alpha2, beta);
            ctx.record("alpha1", a1v);
            let scale = 1.0 + gamma / nf;
            let base = (w2.sphere_mass() / w2.lower_bound()).powf(1.0 / q) * m1.powf(-beta / (nf + gamma));
            let (a1, a2, b1, b2) = (w1.clone(), w2.clone(), w1.clone(), w2.clone());
            if case.theorem == Theorem::T3_5 {
                let cst = bounds::c5(&c.phi, n, gamma, q, a1v, beta, Some(alpha2), C5Variant::Herz, qt)?;
                let k = base * dyadic_slack(a1v * scale);
                let pair: Pair = (
                    Box::new(move |f| spaces::two_weight_herz_norm(f, a1v, p, q, &a1, &a2, &norm)),
                    Box::new(move |f| spaces::two_weight_herz_norm(f, alpha2, p, q, &b1, &b2, &norm)),
                );
                (cst, k, crate::conjugate(q), pair.0, pair.1)
            } else {
                let lambda = require(&case.lambda);
                if !(lambda > 0.0) {
                    ctx.skip("hypotheses", format!("need λ > 0, got {lambda}"));
                    return Ok(());
                }
                let cst = bounds::c5(&c.phi, n, gamma, q, a1v, beta, Some(alpha2), C5Variant::MorreyHerz { lambda }, qt)?;
                let k = base * dyadic_slack((lambda - a1v) * scale);
                let pair: Pair = (
                    Box::new(move |f| spaces::two_weight_morrey_herz_norm(f, a1v, lambda, p, q, &a1, &a2, &norm)),
                    Box::new(move |f| spaces::two_weight_morrey_herz_norm(f, alpha2, lambda, p, q, &b1, &b2, &norm)),
                );
                (cst, k, crate::conjugate(q), pair.0, pair.1)
            }
        }
        _ => unreachable!("commutator theorems only"),
    };
    let value = ctx.constant(&constant);
    if ctx.divergence_gate(constant.id.name(), value) {
        return Ok(());
    }
    let Some(cval) = value else {
        ctx.skip("ratio_growth", "growth runs are implemented for the Morrey family");
        return Ok(());
    };
    let omega_r = omega_norm(&c.omega, r, None, qt)?;
    ctx.slack = Some(k);
    ctx.record("omega_norm", omega_r);
    ctx.record("lip_norm", symbol.lip_norm);
    let op = CommutatorOperator::new(HausdorffOperator::new(c.phi.clone(), c.omega.clone()), symbol.clone());
    let itol = ctx.image_tol();
    let image = |f: &TestFunction| op.image(f, itol);
    let corpus = ctx.corpus(&c.omega, r);
    let bound = k * cval * symbol.lip_norm * omega_r;
    upper_check(
        ctx,
        &corpus,
        source.as_ref(),
        &image,
        target.as_ref(),
        bound,
        &format!("bound K·{}·‖b‖·‖Ω‖ with K = {k:.6}; no necessity statement for commutators", constant.id.name()),
    );
    Ok(())
}

/// `max_k |ω(C_k)/ω(B_k) − (1 − 2^{−γ−n})|` with both masses integrated numerically.
pub fn check_lemma_2_1(gamma: f64, n: usize, k_range: (i32, i32), tol: f64) -> Result<f64> {
    let w = Weight::power(gamma, n)?;
    let expected = 1.0 - 2f64.powf(-gamma - n as f64);
    let f = |x: &[f64]| w.eval(x).unwrap_or(f64::NAN);
    let mut worst: f64 = 0.0;
    for k in k_range.0..=k_range.1 {
        let t = Tolerance::new(1e-300, tol);
        let annulus = integrate_region_with(n, &f, Region::Annulus(k), (gamma, gamma), &[], t)?.value;
        let ball = integrate_region_with(n, &f, Region::Ball(2f64.powi(k)), (gamma, gamma), &[], t)?.value;
        worst = worst.max((annulus / ball - expected).abs());
    }
    Ok(worst)
}

fn run_lemma(ctx: &mut Ctx<'_>) -> Result<()> {
    let range = ctx.case.k_range.unwrap_or((-5, 5));
    let jobs: Vec<(f64, usize)> = ctx.case.gammas.iter().flat_map(|g| ctx.case.dims.iter().map(move |n| (*g, *n))).collect();
    let tol = ctx.tol.quadrature_rel.min(1e-11);
    let results: Vec<(f64, usize, Result<f64>)> = jobs.par_iter().map(|&(g, n)| (g, n, check_lemma_2_1(g, n, range, tol))).collect();
    for (g, n, res) in results {
        let q = format!("annulus_ratio_g{g}_n{n}");
        if !(g > -(n as f64)) {
            ctx.skip(&q, format!("γ = {g} ≤ −n: ω is not locally integrable"));
            continue;
        }
        match res {
            Ok(dev) => {
                let bound = 1e-8;
                ctx.row(&q, dev, Some(bound), Some(bound - dev), Ctx::pass_if(dev < bound), format!("k ∈ [{}, {}]", range.0, range.1));
            }
            Err(e) => ctx.fail(&q, e.to_string()),
        }
    }
    Ok(())
}

/// Outcome of sampling the pointwise commutator bound.
#[derive(Debug, Clone)]
pub struct Ineq38Outcome {
    /// Largest `|b(x) − b(|x|y'/t)| / (‖b‖|x|^β(1+1/t)^β)` seen.
    pub max_ratio: f64,
    /// First violating sample, described.
    pub witness: Option<String>,
    pub samples: usize,
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = crate::functions::norm(&v);
        if r > 0.1 && r <= 1.0 {
            return v.iter().map(|c| c / r).collect();
        }
    }
}

/// Samples `(x, t, y')` with `|x|` and `t` log-uniform on `[1e−3, 1e3]`.
pub fn check_ineq_3_8(b: &LipschitzSymbol, n: usize, samples: usize, seed: u64) -> Ineq38Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut witness = None;
    let log_uniform = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-3.0..3.0));
    for _ in 0..samples {
        let radius = log_uniform(&mut rng);
        let x: Vec<f64> = random_direction(&mut rng, n).iter().map(|c| c * radius).collect();
        let t = log_uniform(&mut rng);
        let y = random_direction(&mut rng, n);
        let z: Vec<f64> = y.iter().map(|c| radius * c / t).collect();
        let lhs = (b.eval(&x) - b.eval(&z)).abs();
        match lipschitz_pointwise_bound(b, &x, t, &y) {
            Ok(rhs) => {
                if rhs > 0.0 {
                    worst = worst.max(lhs / rhs);
                }
            }
            Err(Error::LipschitzViolation { lhs, rhs }) => {
                worst = worst.max(if rhs > 0.0 { lhs / rhs } else { f64::INFINITY });
                if witness.is_none() {
                    witness = Some(format!("x = {x:?}, t = {t}, y' = {y:?}: {lhs} > {rhs}"));
                }
            }
            Err(e) => {
                witness.get_or_insert_with(|| e.to_string());
            }
        }
    }
    Ineq38Outcome { max_ratio: worst, witness, samples }
}

fn run_ineq(ctx: &mut Ctx<'_>) -> Result<()> {
    let b = parse_symbol(&require(&ctx.case.symbol))?;
    let n = ctx.case.dim.unwrap_or(2);
    crate::check_dim(n)?;
    let out = check_ineq_3_8(&b, n, ctx.case.samples.unwrap_or(10_000), ctx.case.seed.unwrap_or(0));
    let note = match &out.witness {
        Some(w) => format!("violated at {w}"),
        None => format!("{} samples, β = {}", out.samples, b.beta),
    };
    let ok = out.witness.is_none();
    let margin = if ok { 1.0 - out.max_ratio } else { -out.max_ratio };
    ctx.row("max_slack_ratio", out.max_ratio, Some(1.0), Some(margin), Ctx::pass_if(ok), note);
    Ok(())
}

/// Runs one case; numerical errors become FAIL rows, never panics.
pub fn run_case(cfg: &SuiteConfig, case: &CaseSpec) -> CaseReport {
    let mut ctx = Ctx::new(cfg, case);
    let res = match case.theorem {
        Theorem::T3_1 | Theorem::Cor3_1 => run_morrey(&mut ctx),
        Theorem::T3_2 | Theorem::Cor3_2 => run_herz(&mut ctx),
        Theorem::T3_3 | Theorem::Cor3_3 => run_morrey_herz(&mut ctx),
        Theorem::T3_4 | Theorem::T3_5 | Theorem::T3_6 => run_commutator(&mut ctx),
        Theorem::Lemma2_1 => run_lemma(&mut ctx),
        Theorem::Ineq3_8 => run_ineq(&mut ctx),
    };
    if let Err(e) = res {
        ctx.fail("evaluation", e.to_string());
    }
    ctx.finish()
}
