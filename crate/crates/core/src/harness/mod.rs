//! Reproducible verification campaigns over the operator theorems.

mod checks;
pub mod config;
pub mod corpus;
pub mod report;

use rayon::prelude::*;

pub use checks::{check_ineq_3_8, check_lemma_2_1, run_case, Ineq38Outcome};
pub use config::{CaseSpec, SuiteConfig, Theorem, Tolerances};
pub use report::{CaseReport, Metadata, PlotSeries, ReportRow, Summary, Verdict, VerificationReport};

use crate::error::Result;

/// Checks that every case carries the fields its theorem needs.
fn validate_cases(cfg: &SuiteConfig) -> Result<()> {
    for c in &cfg.cases {
        let mut missing = Vec::new();
        let mut need = |name: &'static str, present: bool| {
            if !present {
                missing.push(name);
            }
        };
        let operator = |need: &mut dyn FnMut(&'static str, bool)| {
            need("kernel", c.kernel.is_some());
            need("omega", c.omega.is_some());
            need("weight", c.weight.is_some());
            need("p", c.p.is_some());
        };
        match c.theorem {
            Theorem::T3_1 | Theorem::Cor3_1 => {
                operator(&mut need);
                need("lambda", c.lambda.is_some());
            }
            Theorem::T3_2 | Theorem::Cor3_2 => {
                operator(&mut need);
                need("q", c.q.is_some());
                need("alpha", c.alpha.is_some());
            }
            Theorem::T3_3 | Theorem::Cor3_3 => {
                operator(&mut need);
                need("q", c.q.is_some());
                need("alpha", c.alpha.is_some());
                need("lambda", c.lambda.is_some());
            }
            Theorem::T3_4 => {
                operator(&mut need);
                need("lambda", c.lambda.is_some());
                need("beta", c.beta.is_some());
            }
            Theorem::T3_5 => {
                operator(&mut need);
                need("q", c.q.is_some());
                need("alpha2", c.alpha2.is_some());
                need("beta", c.beta.is_some());
            }
            Theorem::T3_6 => {
                operator(&mut need);
                need("q", c.q.is_some());
                need("alpha2", c.alpha2.is_some());
                need("lambda", c.lambda.is_some());
                need("beta", c.beta.is_some());
            }
            Theorem::Lemma2_1 => {
                need("gammas", !c.gammas.is_empty());
                need("dims", !c.dims.is_empty());
            }
            Theorem::Ineq3_8 => need("symbol", c.symbol.is_some()),
        }
        if !missing.is_empty() {
            return Err(cfg.error_at(&format!("\"{}\"", c.id), format!("case '{}' ({}) is missing {}", c.id, c.theorem.name(), missing.join(", "))));
        }
        if let (Some(o), Some(w)) = (&c.omega, &c.weight) {
            let (od, wd) = (cfg.omegas[o].dim, cfg.weights[w].dim);
            if od != wd {
                return Err(cfg.error_at(&format!("\"{}\"", c.id), format!("case '{}': Ω is on S^{} but the weight on R^{wd}", c.id, od - 1)));
            }
        }
    }
    Ok(())
}

/// Runs every case (concurrently) and assembles the report in case order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    validate_cases(cfg)?;
    let cases: Vec<CaseReport> = cfg.cases.par_iter().map(|c| run_case(cfg, c)).collect();
    let rows: Vec<&ReportRow> = cases.iter().flat_map(|c| c.rows.iter()).collect();
    let summary = VerificationReport::summarise(&rows);
    Ok(VerificationReport {
        metadata: Metadata {
            tolerances: cfg.tolerances,
            dyadic_window: cfg.dyadic_window,
            morrey_grid: "R = 2^(j/4), golden-section refinement".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        cases,
        summary,
    })
}
