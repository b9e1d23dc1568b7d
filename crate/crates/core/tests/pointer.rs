use proptest::prelude::*;
use qwork_core::json::PointerJson;
use qwork_core::{pointer_kernel, GaussianPointer};

/// Trapezoid rule over `[-k σ, k σ]` with `n` intervals.
fn trapezoid(f: impl Fn(f64) -> f64, half_width: f64, n: usize) -> f64 {
    let h = 2.0 * half_width / n as f64;
    (0..=n)
        .map(|j| {
            let x = -half_width + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            w * f(x)
        })
        .sum::<f64>()
        * h
}

#[test]
fn pure_kernel_factorizes_on_six_sigma_grid() {
    let p = GaussianPointer::<f64>::pure(0.37, 1.4, 0.9).unwrap();
    let s = p.var_x().sqrt();
    let pts: Vec<f64> = (0..=60).map(|k| -6.0 * s + 0.2 * s * k as f64).collect();
    for &x in &pts {
        for &y in &pts {
            let k = pointer_kernel(&p, x, y);
            let f = p.pure_wavefunction(x) * p.pure_wavefunction(y);
            assert!((k.re - f).abs() < 1e-10 && k.im.abs() < 1e-10);
        }
    }
}

#[test]
fn pure_pointer_has_sigma_nd_four_sigma_e() {
    for s in [1e-6, 0.01, 1.0, 1e4] {
        let e = GaussianPointer::<f64>::pure_with_sigma_e2(s).unwrap().effective_params();
        assert!((e.sigma_nd2 - 4.0 * e.sigma_e2).abs() <= 1e-12 * e.sigma_nd2);
        assert_eq!(e.alpha.re, 0.5);
    }
}

#[test]
fn config_sugar_matches_explicit_moments() {
    let sugar: PointerJson = serde_json::from_str(r#"{"sigma_e2": 0.1, "purity": "pure"}"#).unwrap();
    let p = sugar.build::<f64>().unwrap();
    assert_eq!(p.kappa(), 1.0);
    assert!((p.var_x() * p.var_p() - 0.25).abs() < 1e-15);
    let back = PointerJson::from_pointer(&p).build::<f64>().unwrap();
    assert_eq!(back, p);
}

fn arb_pointer() -> impl Strategy<Value = GaussianPointer<f64>> {
    (0.05f64..3.0, -1.5f64..1.5, 1.0f64..4.0, 0.3f64..3.0, 0.5f64..2.0).prop_map(|(vx, s, mix, kappa, hbar)| {
        let vp = mix * (hbar * hbar + s * s) / (4.0 * vx);
        GaussianPointer::new(vx, vp, s, kappa, hbar).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_hermitian_with_unit_trace(p in arb_pointer(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let a = pointer_kernel(&p, x, y);
        let b = pointer_kernel(&p, y, x).conj();
        prop_assert!((a - b).norm() < 1e-14);
        let diag = pointer_kernel(&p, x, x);
        prop_assert!(diag.re > 0.0 && diag.im == 0.0);
        let half = 10.0 * p.var_x().sqrt();
        let tr = trapezoid(|x| pointer_kernel(&p, x, x).re, half, 2000);
        prop_assert!((tr - 1.0).abs() < 1e-8);
    }

    #[test]
    fn precision_parameters_obey_the_bound(p in arb_pointer()) {
        let e = p.effective_params();
        let ratio = p.sym_xp() / p.hbar();
        prop_assert!((1.0 + ratio * ratio) * e.sigma_nd2 <= 4.0 * e.sigma_e2 + 1e-12);
        prop_assert_eq!(e.alpha.re, 0.5);
        prop_assert!((e.alpha.im + p.sym_xp() / (2.0 * p.hbar())).abs() < 1e-15);
    }

    #[test]
    fn positivity_is_enforced(vx in 0.05f64..3.0, s in -1.5f64..1.5, shrink in 0.1f64..0.99) {
        let vp = shrink * (1.0 + s * s) / (4.0 * vx);
        let err = GaussianPointer::<f64>::new(vx, vp, s, 1.0, 1.0).unwrap_err();
        prop_assert!(err.to_string().contains("positivity"));
    }
}
