//! The default test-function corpus: separable functions built from
//! indicator shells, compact power bumps and truncated exponentials.

use crate::functions::{AngularFn, AngularProfile, RadialProfile, TestFunction};

/// Radial parts, chosen to straddle several dyadic annuli on both sides of 1.
fn radials() -> Vec<RadialProfile> {
    vec![
        RadialProfile::indicator(0.0, 1.0),
        RadialProfile::indicator(0.5, 2.0),
        RadialProfile::indicator(2f64.powi(-6), 2f64.powi(-4)),
        RadialProfile::power_on(-0.3, 0.0, 2.0),
        RadialProfile::power_on(0.5, 1.0, 8.0),
        RadialProfile::power_on(1.5, 0.25, 1.0),
        RadialProfile::exp_on(1.0, 0.0, 16.0),
    ]
}

/// Up to `size` functions (at most 21): every radial part paired with the
/// angular parts `1`, `2 + cos θ` and `|Ω|^{r−2}Ω`.
pub fn default_corpus(omega: &AngularProfile, r: f64, size: usize) -> Vec<TestFunction> {
    let matched = if r.is_finite() { omega.func.signed_power(r - 1.0) } else { omega.func.clone() };
    let angulars = [
        AngularFn::constant(1.0),
        AngularFn::from_expr("2+cos(theta)").expect("valid expression"),
        matched,
    ];
    let mut out = Vec::new();
    for g in radials() {
        for h in &angulars {
            out.push(TestFunction::separable(g.clone(), h.clone()));
        }
    }
    out.truncate(size);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_distinct_labels() {
        let om = AngularProfile::new(AngularFn::from_expr("1.5+x1").unwrap(), 2, true).unwrap();
        let c = default_corpus(&om, 2.0, 20);
        assert_eq!(c.len(), 20);
        let mut labels: Vec<String> = c.iter().map(|f| f.label()).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 20);
        assert!(c.iter().all(|f| !f.is_zero()));
    }
}
