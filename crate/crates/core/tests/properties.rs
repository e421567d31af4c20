use proptest::prelude::*;

use rough_hausdorff::bounds::{self, ConstantValue};
use rough_hausdorff::extremals::{herz_lower_integral, morrey_extremal, morrey_herz_extremal};
use rough_hausdorff::functions::omega_norm;
use rough_hausdorff::quadrature::{integrate_halfline, integrate_region, integrate_sphere, RadialIntegrand};
use rough_hausdorff::spaces::{self, DyadicWindow, NormConfig};
use rough_hausdorff::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn aniso(gamma: f64, n: usize) -> Weight {
    let ang = if n == 1 { "2 + x1" } else { "2 + cos(theta)" };
    Weight::new(gamma, AngularFn::from_expr(ang).unwrap(), n, Some(1.0)).unwrap()
}

fn point(n: usize, seed: &[f64]) -> Vec<f64> {
    seed[..n].to_vec()
}

fn radial_part(kind: u8, a: f64) -> RadialProfile {
    match kind % 3 {
        0 => RadialProfile::indicator(0.25, 1.5 + a.abs()),
        1 => RadialProfile::power_on(a, 0.5, 4.0),
        _ => RadialProfile::exp_on(1.0, 0.0, 8.0),
    }
}

fn cheap() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn costly() -> ProptestConfig {
    ProptestConfig { cases: 8, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cheap())]

    #[test]
    fn weights_are_exactly_homogeneous(gamma in -0.9f64..3.0, n in 1usize..=3,
                                       x in prop::array::uniform3(-3.0f64..3.0), t in 0.01f64..100.0) {
        let w = aniso(gamma, n);
        let x = point(n, &x);
        prop_assume!(x.iter().any(|c| c.abs() > 1e-3));
        let tx: Vec<f64> = x.iter().map(|c| t * c).collect();
        let lhs = w.eval(&tx).unwrap();
        let rhs = t.powf(gamma) * w.eval(&x).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-13, "{lhs} vs {rhs}");
    }

    #[test]
    fn ball_mass_matches_quadrature(gamma in -0.8f64..2.5, n in 1usize..=3, radius in 0.05f64..20.0) {
        let w = aniso(gamma, n);
        let f = |x: &[f64]| w.eval(x).unwrap();
        let q = integrate_region(n, &f, Region::Ball(radius), Tolerance::rel(1e-10)).unwrap().value;
        prop_assert!(rel(q, w.ball_mass(radius).unwrap()) < 1e-6);
    }

    #[test]
    fn ball_mass_scales_like_a_power_of_volume(gamma in -0.9f64..3.0, n in 1usize..=3) {
        let w = aniso(gamma, n);
        let ratio = |m: i32| {
            let r = 2f64.powi(m);
            let vol = sphere_area(n) / n as f64 * r.powi(n as i32);
            w.ball_mass(r).unwrap() / vol.powf((gamma + n as f64) / n as f64)
        };
        let c = ratio(0);
        for m in -5..=5 {
            prop_assert!(rel(ratio(m), c) < 1e-10);
        }
    }

    #[test]
    fn annulus_mass_matches_region_integral(gamma in -0.8f64..2.5, n in 1usize..=3, k in -5i32..=5) {
        let w = aniso(gamma, n);
        let f = |x: &[f64]| w.eval(x).unwrap();
        let q = integrate_region(n, &f, Region::Annulus(k), Tolerance::rel(1e-10)).unwrap().value;
        prop_assert!(rel(q, w.annulus_mass(k).unwrap()) < 1e-6);
    }

    #[test]
    fn power_tails_integrate_exactly(a in -4.0f64..-1.2, lo in 0.1f64..10.0) {
        let f = RadialIntegrand::new(move |t: f64| if t > lo { t.powf(a) } else { 0.0 }, f64::INFINITY, a)
            .with_breakpoints([lo]);
        let r = integrate_halfline(&f, Tolerance::rel(1e-11)).unwrap();
        let exact = -lo.powf(a + 1.0) / (a + 1.0);
        prop_assert!(rel(r.value, exact) < 1e-9, "{} vs {exact}", r.value);
        prop_assert!(r.value + r.abs_error_estimate + r.tail_bound >= exact * (1.0 - 1e-12));
    }

    #[test]
    fn trapezoid_on_circle_is_spectral(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        // ∫_{S^1} (c + a cos θ + b sin 2θ) dσ = 2πc for c = 2.
        let g = move |y: &[f64]| 2.0 + a * y[0] + b * 2.0 * y[0] * y[1];
        let r = integrate_sphere(2, &g, Tolerance::new(1e-14, 1e-14)).unwrap();
        prop_assert!((r.value - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn separable_evaluation_is_exact(kind in 0u8..3, a in -1.0f64..1.0,
                                     x in prop::array::uniform2(-5.0f64..5.0)) {
        let radial = radial_part(kind, a);
        let angular = AngularFn::from_expr("2 + cos(theta)").unwrap();
        let f = TestFunction::separable(radial.clone(), angular.clone());
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        prop_assume!(r > 1e-6);
        let y = [x[0] / r, x[1] / r];
        prop_assert_eq!(f.eval(&x), radial.eval(r) * angular.eval(&y));
    }

    #[test]
    fn power_symbols_respect_their_lipschitz_norm(beta in 0.05f64..=1.0, n in 1usize..=3,
                                                  x in prop::array::uniform3(-1.0f64..1.0),
                                                  h in prop::array::uniform3(-1.0f64..1.0),
                                                  scale in -8.0f64..2.0, gap in -10.0f64..0.0) {
        let b = LipschitzSymbol::power(beta).unwrap();
        // Pairs near the origin (small scale) and near the diagonal (small gap).
        let s = 10f64.powf(scale);
        let x: Vec<f64> = x[..n].iter().map(|c| c * s).collect();
        let y: Vec<f64> = x.iter().zip(&h[..n]).map(|(c, d)| c + d * s * 10f64.powf(gap)).collect();
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assume!(dist > 0.0);
        let lhs = (b.eval(&x) - b.eval(&y)).abs();
        prop_assert!(lhs <= b.lip_norm * dist.powf(beta) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn hardy_presets_decay_at_declared_rate(n in 1usize..=3, t0 in 2.0f64..1e3) {
        let phi = RadialKernel::hardy(n);
        let slope = (phi.eval(10.0 * t0).ln() - phi.eval(t0).ln()) / 10f64.ln();
        prop_assert!((slope - phi.exponent_at_infinity).abs() < 0.05);
    }

    #[test]
    fn norms_are_absolutely_homogeneous(kind in 0u8..3, a in -1.0f64..1.0, c in -5.0f64..5.0,
                                        space in 0u8..3) {
        prop_assume!(c.abs() > 1e-3);
        let w = Weight::power(0.4, 2).unwrap();
        let cfg = NormConfig::default();
        let f = TestFunction::separable(radial_part(kind, a), AngularFn::from_expr("2 + cos(theta)").unwrap());
        let cf = TestFunction::separable(radial_part(kind, a).scale(c), AngularFn::from_expr("2 + cos(theta)").unwrap());
        let norm = |g: &TestFunction| match space {
            0 => spaces::herz_norm(g, 0.3, 2.0, 1.5, &w, &cfg).unwrap().value,
            1 => spaces::central_morrey_norm(g, 2.0, -0.2, &w, &cfg).unwrap().value,
            _ => spaces::morrey_herz_norm(g, 0.3, 0.5, 2.0, 1.5, &w, &cfg).unwrap().value,
        };
        prop_assert!(rel(norm(&cf), c.abs() * norm(&f)) < 1e-12);
    }

    #[test]
    fn lq_norm_is_dilation_covariant(gamma in -0.8f64..2.0, q in 1.0f64..4.0, s in 0.1f64..10.0) {
        let w = Weight::power(gamma, 2).unwrap();
        let cfg = NormConfig::default();
        let ang = AngularFn::from_expr("2 + cos(theta)").unwrap();
        let f = TestFunction::separable(RadialProfile::exp_on(1.0, 0.0, f64::INFINITY), ang.clone());
        // f(s x) for the radial part e^{-r}: e^{-s r}.
        let fs = TestFunction::separable(RadialProfile::exp_on(s, 0.0, f64::INFINITY), ang);
        let a = spaces::lq_norm(&fs, q, &w, Region::All, &cfg).unwrap();
        let b = spaces::lq_norm(&f, q, &w, Region::All, &cfg).unwrap();
        prop_assert!(rel(a, s.powf(-(2.0 + gamma) / q) * b) < 1e-8);
    }

    #[test]
    fn herz_with_equal_indices_is_lebesgue(kind in 0u8..3, a in -1.0f64..1.0, p in 1.0f64..4.0, gamma in -0.5f64..1.5) {
        let w = aniso(gamma, 2);
        let cfg = NormConfig::default();
        let f = TestFunction::separable(radial_part(kind, a), AngularFn::from_expr("1 + x1*x1").unwrap());
        let h = spaces::herz_norm(&f, 0.0, p, p, &w, &cfg).unwrap().value;
        let l = spaces::lq_norm(&f, p, &w, Region::All, &cfg).unwrap();
        prop_assert!(rel(h, l) < 1e-10);
    }

    #[test]
    fn morrey_herz_with_zero_lambda_is_herz(kind in 0u8..3, a in -1.0f64..1.0, alpha in -0.5f64..0.5, p in 1.0f64..3.0, q in 1.0f64..3.0) {
        let w = aniso(0.5, 2);
        let cfg = NormConfig::default();
        let f = TestFunction::separable(radial_part(kind, a), AngularFn::from_expr("2 + cos(theta)").unwrap());
        let mk = spaces::morrey_herz_norm(&f, alpha, 0.0, p, q, &w, &cfg);
        let hz = spaces::herz_norm(&f, alpha, p, q, &w, &cfg).unwrap().value;
        // λ = 0 lies outside the Morrey-Herz range, so the identity is checked through the sum itself when accepted.
        if let Ok(mk) = mk {
            prop_assert!(rel(mk.value, hz) < 1e-10);
        }
    }

    #[test]
    fn two_weight_spaces_collapse_when_weights_agree(kind in 0u8..3, a in -1.0f64..1.0, alpha in -0.5f64..0.5,
                                                     lambda in 0.1f64..0.95) {
        let w = Weight::power(0.0, 1).unwrap();
        let cfg = NormConfig::default();
        let f = TestFunction::radial(radial_part(kind, a));
        // With ω1 = ω2 = 1 on R the ball factor ω(B_k)^{α/n} is 2^{(k+1)α}.
        let two = spaces::two_weight_herz_norm(&f, alpha, 2.0, 2.0, &w, &w, &cfg).unwrap().value;
        let one = spaces::herz_norm(&f, alpha, 2.0, 2.0, &w, &cfg).unwrap().value;
        prop_assert!(rel(two, 2f64.powf(alpha) * one) < 1e-10, "{two} vs {one}");
        // ω(B)^{−λ} = (2R)^{−λ} on R, so the two-weight Morrey norm is the central one with 1 + 2μ = λ.
        let two_m = spaces::two_weight_morrey_norm(&f, 2.0, lambda, &w, &w, &cfg).unwrap().value;
        let one_m = spaces::central_morrey_norm(&f, 2.0, (lambda - 1.0) / 2.0, &w, &cfg).unwrap().value;
        prop_assert!(rel(two_m, one_m) < 1e-6, "{two_m} vs {one_m}");
    }

    #[test]
    fn lower_bound_factor_collapses_for_power_weights(p in prop::sample::select(vec![1.5, 2.0, 4.0]),
                                                       gamma in -0.5f64..2.0, n in 1usize..=3) {
        let w = Weight::power(gamma, n).unwrap();
        let omega = if n == 1 {
            AngularProfile::new(AngularFn::from_expr("2 + x1").unwrap(), 1, true).unwrap()
        } else {
            AngularProfile::new(AngularFn::from_expr("2 + cos(theta)").unwrap(), n, true).unwrap()
        };
        let r = conjugate(p);
        let factor = bounds::lower_bound_factor(&omega, r, &w, 1e-13).unwrap();
        let direct = omega_norm(&omega, r, None, 1e-13).unwrap();
        prop_assert!(rel(factor, direct) < 1e-10);
    }

    #[test]
    fn c2_with_zero_alpha_is_c2(q in 1.0f64..4.0, gamma in -0.5f64..2.0) {
        let phi = RadialKernel::hardy(1);
        let a = bounds::c2(&phi, 1, gamma, q, None, 1e-12).unwrap();
        let b = bounds::c2(&phi, 1, gamma, q, Some(0.0), 1e-12).unwrap();
        match (a.finite(), b.finite()) {
            (Some(x), Some(y)) => prop_assert!(rel(x, y) < 1e-10),
            (None, None) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn c1_divergence_matches_power_counting(a in -3.0f64..3.0, lambda in -0.9f64..0.9, gamma in -0.5f64..1.5,
                                            n in 1usize..=3, side in 0u8..2) {
        let e = a - 1.0 - (n as f64 + gamma) * lambda;
        // Keep clear of the borderline exponent −1.
        prop_assume!((e + 1.0).abs() > 0.05);
        let (phi, finite) = if side == 0 {
            (RadialKernel::power(a, 0.0, 1.0).unwrap(), e > -1.0)
        } else {
            (RadialKernel::power(a, 1.0, f64::INFINITY).unwrap(), e < -1.0)
        };
        let c = bounds::c1(&phi, n, gamma, lambda, 1e-10).unwrap();
        prop_assert_eq!(c.finite().is_some(), finite, "{:?}", c.value);
        if let Some(v) = c.finite() {
            let exact = if side == 0 { 1.0 / (e + 1.0) } else { -1.0 / (e + 1.0) };
            prop_assert!(rel(v, exact) < 1e-8);
        }
    }
}

proptest! {
    #![proptest_config(costly())]

    #[test]
    fn operator_is_linear(ka in 0u8..3, kb in 0u8..3, ea in -1.0f64..1.0, eb in -1.0f64..1.0,
                          a in -3.0f64..3.0, b in -3.0f64..3.0, x in prop::array::uniform2(-6.0f64..6.0)) {
        let omega = AngularProfile::new(AngularFn::from_expr("1.5 + cos(theta)").unwrap(), 2, true).unwrap();
        let op = HausdorffOperator::new(RadialKernel::hardy(2), omega);
        let ang = AngularFn::from_expr("2 + sin(theta)").unwrap();
        let f = TestFunction::separable(radial_part(ka, ea), ang.clone());
        let g = TestFunction::separable(radial_part(kb, eb), AngularFn::constant(1.0));
        let (fc, gc) = (f.clone(), g.clone());
        let combo = TestFunction::general(
            "a f + b g",
            move |y: &[f64]| a * fc.eval(y) + b * gc.eval(y),
            (0.0, f64::NEG_INFINITY),
            [f.breakpoints(), g.breakpoints()].concat(),
            (0.0, 10.0),
        );
        prop_assume!(x[0].hypot(x[1]) > 0.05);
        let tol = 1e-11;
        let lhs = op.apply(&combo, &x, tol).unwrap();
        let rhs = a * op.apply(&f, &x, tol).unwrap() + b * op.apply(&g, &x, tol).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }

    #[test]
    fn separable_fast_path_matches_nested(k in 0u8..3, e in -1.0f64..1.0, r in 0.1f64..10.0, th in 0.0f64..6.28,
                                          preset in 0u8..3) {
        let omega = AngularProfile::new(AngularFn::from_expr("1.5 + cos(theta)").unwrap(), 2, true).unwrap();
        let phi = match preset {
            0 => RadialKernel::hardy(2),
            1 => RadialKernel::adjoint_hardy(),
            _ => RadialKernel::gaussian(),
        };
        let op = HausdorffOperator::new(phi, omega);
        let f = TestFunction::separable(radial_part(k, e), AngularFn::from_expr("2 + cos(theta)").unwrap());
        let x = [r * th.cos(), r * th.sin()];
        let fast = op.apply(&f, &x, 1e-12).unwrap();
        let nested = op.apply_nested(&f, &x, 1e-12).unwrap();
        prop_assert!((fast - nested).abs() <= 1e-8 * (1.0 + fast.abs()), "{fast} vs {nested}");
    }

    #[test]
    fn image_depends_only_on_radius(k in 0u8..3, e in -1.0f64..1.0, r in 0.1f64..10.0,
                                    t1 in 0.0f64..6.28, t2 in 0.0f64..6.28) {
        let omega = AngularProfile::new(AngularFn::from_expr("1.5 + cos(theta)").unwrap(), 2, true).unwrap();
        let op = HausdorffOperator::new(RadialKernel::hardy(2), omega);
        let f = TestFunction::separable(radial_part(k, e), AngularFn::from_expr("2 + sin(theta)").unwrap());
        let a = op.apply(&f, &[r * t1.cos(), r * t1.sin()], 1e-12).unwrap();
        let b = op.apply(&f, &[r * t2.cos(), r * t2.sin()], 1e-12).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
    }

    #[test]
    fn widening_the_window_never_decreases_sum_norms(kind in 0u8..3, a in -1.0f64..1.0, alpha in -0.4f64..0.4,
                                                     h in 2i32..12) {
        let w = Weight::power(0.3, 1).unwrap();
        let f = TestFunction::radial(radial_part(kind, a));
        let narrow = NormConfig::default().with_window(DyadicWindow::symmetric(h)).lenient();
        let wide = NormConfig::default().with_window(DyadicWindow::symmetric(h + 4)).lenient();
        let n1 = spaces::herz_norm(&f, alpha, 2.0, 2.0, &w, &narrow).unwrap();
        let n2 = spaces::herz_norm(&f, alpha, 2.0, 2.0, &w, &wide).unwrap();
        prop_assert!(n2.value >= n1.value * (1.0 - 1e-13));
        prop_assert!(n2.value - n1.value <= n1.tail_bound * (1.0 + 1e-9) + 1e-12 * n1.value,
                     "increase {} vs tail bound {}", n2.value - n1.value, n1.tail_bound);
    }

    #[test]
    fn extremal_images_are_pure_powers(gamma in -0.5f64..1.5, lambda in 0.1f64..0.9, p in 1.5f64..4.0, kind in 0u8..2) {
        let w = Weight::power(gamma, 2).unwrap();
        let omega = AngularProfile::new(AngularFn::from_expr("1.5 + cos(theta)").unwrap(), 2, true).unwrap();
        let phi = RadialKernel::hardy(2);
        let fam = if kind == 0 {
            morrey_extremal(&omega, &w, -lambda / p, p, 1e-12).unwrap()
        } else {
            morrey_herz_extremal(&omega, &w, p, p, 0.2, lambda, 1e-12).unwrap()
        };
        let e = fam.closed_form_image_exponent.unwrap();
        let op = HausdorffOperator::new(phi.clone(), omega.clone());
        let amp = |r: f64| op.apply(&fam.function, &[r, 0.0], 1e-12).unwrap() / r.powf(e);
        let (a1, a2) = (amp(0.3), amp(7.0));
        prop_assert!(rel(a1, a2) < 1e-6, "{a1} vs {a2}");
        match fam.image_amplitude(&phi, 1e-12).unwrap() {
            ConstantValue::Finite(v) => prop_assert!(rel(a1, v) < 1e-4, "{a1} vs {v}"),
            ConstantValue::Divergent => prop_assert!(false, "amplitude diverges"),
        }
    }

    #[test]
    fn herz_lower_integrals_increase_with_m(q in 1.2f64..4.0, gamma in -0.5f64..1.5) {
        let phi = RadialKernel::hardy(1);
        let mut last = 0.0;
        for m in [2u32, 4, 6, 8, 10] {
            let v = match herz_lower_integral(&phi, 1, gamma, q, m, 1e-12).unwrap() {
                ConstantValue::Finite(v) => v,
                ConstantValue::Divergent => f64::INFINITY,
            };
            prop_assert!(v >= last, "m = {m}: {v} < {last}");
            last = v;
        }
    }
}
