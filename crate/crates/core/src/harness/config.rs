//! Verification-suite configuration: a JSON document with named weights,
//! kernels and angular symbols that cases refer to by name.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{AngularFn, AngularProfile, LipschitzSymbol, RadialKernel};
use crate::spaces::DyadicWindow;
use crate::weights::Weight;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    pub gamma: f64,
    pub dim: usize,
    #[serde(default = "one")]
    pub angular: String,
    #[serde(default)]
    pub lower_bound: Option<f64>,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum KernelSpec {
    Preset(String),
    Expr {
        expr: String,
        exponent_at_zero: f64,
        exponent_at_infinity: f64,
    },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub dim: usize,
    pub expr: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of every quadrature and norm evaluation.
    #[serde(default = "default_quad")]
    pub quadrature_rel: f64,
    /// Relative slack allowed when comparing a ratio with its bound.
    #[serde(default = "default_ratio")]
    pub ratio_rel: f64,
}

fn default_quad() -> f64 {
    1e-9
}

fn default_ratio() -> f64 {
    1e-3
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quadrature_rel: default_quad(), ratio_rel: default_ratio() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
pub enum Theorem {
    T3_1,
    T3_2,
    T3_3,
    T3_4,
    T3_5,
    T3_6,
    Cor3_1,
    Cor3_2,
    Cor3_3,
    Lemma2_1,
    Ineq3_8,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::T3_1 => "T3_1",
            Theorem::T3_2 => "T3_2",
            Theorem::T3_3 => "T3_3",
            Theorem::T3_4 => "T3_4",
            Theorem::T3_5 => "T3_5",
            Theorem::T3_6 => "T3_6",
            Theorem::Cor3_1 => "Cor3_1",
            Theorem::Cor3_2 => "Cor3_2",
            Theorem::Cor3_3 => "Cor3_3",
            Theorem::Lemma2_1 => "Lemma2_1",
            Theorem::Ineq3_8 => "Ineq3_8",
        }
    }

    pub fn is_corollary(self) -> bool {
        matches!(self, Theorem::Cor3_1 | Theorem::Cor3_2 | Theorem::Cor3_3)
    }

    pub fn is_commutator(self) -> bool {
        matches!(self, Theorem::T3_4 | Theorem::T3_5 | Theorem::T3_6)
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    #[serde(default = "default_corpus_size")]
    pub size: usize,
    /// Adds the theorem's extremal function to the corpus.
    #[serde(default)]
    pub include_extremal: bool,
}

fn default_corpus_size() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    pub theorem: Theorem,
    #[serde(default)]
    pub kernel: Option<String>,
    #[serde(default)]
    pub omega: Option<String>,
    #[serde(default)]
    pub weight: Option<String>,
    #[serde(default)]
    pub weight2: Option<String>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub alpha2: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    /// Lipschitz symbol: `power:<β>`, `constant:<c>:<β>` or `linear:<e1>,<e2>,…`.
    #[serde(default)]
    pub symbol: Option<String>,
    #[serde(default)]
    pub corpus: Option<CorpusSpec>,
    #[serde(default)]
    pub extremal_ms: Vec<u32>,
    /// Symmetric dyadic window half-widths for growth (negative-control) runs.
    #[serde(default)]
    pub windows: Vec<i32>,
    #[serde(default)]
    pub expect_divergent: bool,
    #[serde(default)]
    pub gammas: Vec<f64>,
    #[serde(default)]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub k_range: Option<(i32, i32)>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default)]
    pub weights: BTreeMap<String, WeightSpec>,
    #[serde(default)]
    pub kernels: BTreeMap<String, KernelSpec>,
    #[serde(default)]
    pub omegas: BTreeMap<String, OmegaSpec>,
    #[serde(default)]
    pub cases: Vec<CaseSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub dyadic_window: DyadicWindow,
    /// Source text, kept to locate semantic errors.
    #[serde(skip)]
    source: String,
}

/// Line and column (1-based) of the first occurrence of `needle`.
fn locate(source: &str, needle: &str) -> (usize, usize) {
    match source.find(needle) {
        Some(off) => {
            let before = &source[..off];
            let line = before.matches('\n').count() + 1;
            let col = off - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            (line, col)
        }
        None => (0, 0),
    }
}

impl SuiteConfig {
    pub fn parse(source: &str) -> Result<Self> {
        let mut cfg: SuiteConfig = serde_json::from_str(source)
            .map_err(|e| Error::Config { line: e.line(), column: e.column(), message: e.to_string() })?;
        cfg.source = source.to_string();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { line: 0, column: 0, message: format!("{}: {e}", path.display()) })?;
        SuiteConfig::parse(&text)
    }

    /// The configuration bundled with the crate.
    pub fn bundled() -> Self {
        SuiteConfig::parse(BUNDLED).expect("bundled config is valid")
    }

    /// A configuration error pointing at the first occurrence of `needle`.
    pub fn error_at(&self, needle: &str, message: impl Into<String>) -> Error {
        let (line, column) = locate(&self.source, needle);
        Error::Config { line, column, message: message.into() }
    }

    fn validate(&self) -> Result<()> {
        let t = self.tolerances;
        if !(t.quadrature_rel > 0.0 && t.quadrature_rel < 1e-2 && t.ratio_rel > 0.0 && t.ratio_rel < 1.0) {
            return Err(self.error_at("\"tolerances\"", "tolerances must be positive and small"));
        }
        if self.dyadic_window.k_min >= self.dyadic_window.k_max {
            return Err(self.error_at("\"dyadic_window\"", "dyadic_window needs k_min < k_max"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.cases {
            if !seen.insert(c.id.as_str()) {
                return Err(self.error_at(&format!("\"{}\"", c.id), format!("duplicate case id '{}'", c.id)));
            }
            for (kind, name, known) in [
                ("weight", &c.weight, self.weights.contains_key(c.weight.as_deref().unwrap_or(""))),
                ("weight2", &c.weight2, self.weights.contains_key(c.weight2.as_deref().unwrap_or(""))),
                ("kernel", &c.kernel, self.kernels.contains_key(c.kernel.as_deref().unwrap_or(""))),
                ("omega", &c.omega, self.omegas.contains_key(c.omega.as_deref().unwrap_or(""))),
            ] {
                if let Some(n) = name {
                    if !known {
                        return Err(self.error_at(&format!("\"{n}\""), format!("case '{}': unknown {kind} '{n}'", c.id)));
                    }
                }
            }
        }
        for (name, w) in &self.weights {
            self.build_weight_spec(name, w)?;
        }
        for (name, k) in &self.kernels {
            self.build_kernel_spec(name, k)?;
        }
        for (name, o) in &self.omegas {
            self.build_omega_spec(name, o)?;
        }
        Ok(())
    }

    fn wrap(&self, name: &str, e: Error) -> Error {
        self.error_at(&format!("\"{name}\""), format!("'{name}': {e}"))
    }

    fn build_weight_spec(&self, name: &str, w: &WeightSpec) -> Result<Weight> {
        let angular = AngularFn::from_expr(&w.angular).map_err(|e| self.wrap(name, e))?;
        let lower = match (w.lower_bound, angular.as_constant()) {
            (Some(c), _) => Some(c),
            (None, Some(c)) => Some(c),
            _ => None,
        };
        Weight::new(w.gamma, angular, w.dim, lower).map_err(|e| self.wrap(name, e))
    }

    fn build_kernel_spec(&self, name: &str, k: &KernelSpec) -> Result<RadialKernel> {
        let r = match k {
            KernelSpec::Preset(s) => RadialKernel::preset(s),
            KernelSpec::Expr { expr, exponent_at_zero, exponent_at_infinity } => {
                RadialKernel::from_expr(expr, *exponent_at_zero, *exponent_at_infinity)
            }
        };
        r.map_err(|e| self.wrap(name, e))
    }

    fn build_omega_spec(&self, name: &str, o: &OmegaSpec) -> Result<AngularProfile> {
        let f = AngularFn::from_expr(&o.expr).map_err(|e| self.wrap(name, e))?;
        AngularProfile::new(f, o.dim, false).map_err(|e| self.wrap(name, e))
    }

    pub fn weight(&self, name: &str) -> Result<Weight> {
        let spec = self.weights.get(name).ok_or_else(|| self.error_at(name, format!("unknown weight '{name}'")))?;
        self.build_weight_spec(name, spec)
    }

    pub fn kernel(&self, name: &str) -> Result<RadialKernel> {
        let spec = self.kernels.get(name).ok_or_else(|| self.error_at(name, format!("unknown kernel '{name}'")))?;
        self.build_kernel_spec(name, spec)
    }

    /// Ω, flagged nonvanishing when it is bounded away from zero at the validation nodes.
    pub fn omega(&self, name: &str) -> Result<AngularProfile> {
        let spec = self.omegas.get(name).ok_or_else(|| self.error_at(name, format!("unknown omega '{name}'")))?;
        let base = self.build_omega_spec(name, spec)?;
        let nonvanishing = crate::functions::validation_nodes(spec.dim).iter().all(|y| base.eval(y) != 0.0);
        Ok(AngularProfile { nonvanishing, ..base })
    }
}

/// `power:<β>`, `constant:<c>:<β>` or `linear:<e1>,<e2>,…`.
pub fn parse_symbol(s: &str) -> Result<LipschitzSymbol> {
    let bad = || Error::Parameter(format!("bad symbol '{s}'; expected power:<β>, constant:<c>:<β> or linear:<e1>,…"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["power", b] => LipschitzSymbol::power(num(b)?),
        ["constant", c, b] => LipschitzSymbol::constant(num(c)?, num(b)?),
        ["linear", e] => {
            let v: Result<Vec<f64>> = e.split(',').map(num).collect();
            LipschitzSymbol::linear(&v?)
        }
        _ => Err(bad()),
    }
}

pub const BUNDLED: &str = include_str!("../../data/default_config.json");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_positions() {
        let e = SuiteConfig::parse("{\n  \"cases\": [\n    {\"id\": 1,}\n  ]\n}").unwrap_err();
        match e {
            Error::Config { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_references_are_located() {
        let src = "{\n\"cases\": [\n {\"id\": \"a\", \"theorem\": \"T3_1\",\n  \"weight\": \"nope\"}\n]\n}";
        match SuiteConfig::parse(src).unwrap_err() {
            Error::Config { line, column, message } => {
                assert_eq!((line, column), (4, 13));
                assert!(message.contains("nope"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_config_is_valid() {
        let c = SuiteConfig::parse("{}").unwrap();
        assert!(c.cases.is_empty());
        assert_eq!(c.dyadic_window, DyadicWindow::default());
    }

    #[test]
    fn symbols() {
        assert_eq!(parse_symbol("power:0.5").unwrap().beta, 0.5);
        assert_eq!(parse_symbol("constant:2:1").unwrap().lip_norm, 0.0);
        assert!(parse_symbol("linear:1,0").is_ok());
        assert!(parse_symbol("power:2").is_err());
        assert!(parse_symbol("cubic").is_err());
    }

    #[test]
    fn bundled_parses() {
        let c = SuiteConfig::bundled();
        assert!(!c.cases.is_empty());
    }
}
