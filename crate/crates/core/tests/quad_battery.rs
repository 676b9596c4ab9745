//! Closed-form battery for the adaptive quadrature: ten integrals covering
//! smooth, oscillatory, endpoint-singular and interior-singular integrands,
//! all required to 1e-8 relative accuracy.

use enslab_core::quad::{quad_radial, quad_radial_opts, quad_to_infinity, QuadOpts};
use std::f64::consts::PI;

fn check(name: &str, got: f64, want: f64) {
    let rel = if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    };
    assert!(
        rel < 1e-8,
        "{name}: got {got:.16e}, want {want:.16e} (rel {rel:.3e})"
    );
}

#[test]
fn battery_smooth_and_singular() {
    // 1. Plain polynomial.
    check("int_0^1 s ds", quad_radial(|s| s, 0.0, 1.0, &[]).unwrap(), 0.5);
    // 2. Smooth transcendental.
    check(
        "int_0^pi sin",
        quad_radial(|s| s.sin(), 0.0, PI, &[]).unwrap(),
        2.0,
    );
    // 3. Gaussian over a wide range.
    check(
        "int_0^10 e^{-s^2}",
        quad_radial(|s| (-s * s).exp(), 0.0, 10.0, &[]).unwrap(),
        0.5 * PI.sqrt(),
    );
    // 4. Logarithmic endpoint singularity.
    check(
        "int_0^1 log(1/s)",
        quad_radial(|s| -(s.ln()), 0.0, 1.0, &[0.0]).unwrap(),
        1.0,
    );
    // 5. Algebraic endpoint singularity.
    check(
        "int_0^1 s^{-1/2}",
        quad_radial(|s| 1.0 / s.sqrt(), 0.0, 1.0, &[0.0]).unwrap(),
        2.0,
    );
    // 6. The log-squared reciprocal whose mass extends below the smallest
    // positive double: int_0^{1/3} ds/(s log^2 s) = 1/log 3.
    check(
        "int_0^{1/3} ds/(s log^2 s)",
        quad_radial(|s| 1.0 / (s * s.ln() * s.ln()), 0.0, 1.0 / 3.0, &[0.0]).unwrap(),
        1.0 / 3.0f64.ln(),
    );
    // 7. Interior algebraic singularity: int_0^2 |s-1|^{-1/2} ds = 4.
    check(
        "int_0^2 |s-1|^{-1/2}",
        quad_radial(|s| 1.0 / (s - 1.0).abs().sqrt(), 0.0, 2.0, &[1.0]).unwrap(),
        4.0,
    );
    // 8. Interior logarithm: int_0^2 log|s-1| ds = -2.
    check(
        "int_0^2 log|s-1|",
        quad_radial(|s| (s - 1.0).abs().ln(), 0.0, 2.0, &[1.0]).unwrap(),
        -2.0,
    );
    // 9. Oscillatory with a period cap:
    // int_0^{a} s cos s ds = a sin a + cos a - 1.
    let a = 25.0;
    let opts = QuadOpts {
        max_panel: 0.5,
        ..QuadOpts::default()
    };
    check(
        "int_0^{8pi} s cos s",
        quad_radial_opts(&|s: f64| s * s.cos(), 0.0, a, &[], &opts).unwrap(),
        a * a.sin() + a.cos() - 1.0,
    );
    // 10. Power-law tail to infinity: int_1^inf s^{-3/2} ds = 2.
    check(
        "int_1^inf s^{-3/2}",
        quad_to_infinity(|s| s.powf(-1.5), 1.0, &QuadOpts::default()).unwrap(),
        2.0,
    );
}

#[test]
fn battery_log_power_combination() {
    // int_0^{1/3} ds/(s |log s|^p) = (log 3)^{1-p}/(p-1) for p > 1.
    for p in [1.2, 1.5, 2.5] {
        check(
            "log-power",
            quad_radial(|s| 1.0 / (s * (-s.ln()).powf(p)), 0.0, 1.0 / 3.0, &[0.0]).unwrap(),
            (3.0f64.ln()).powf(1.0 - p) / (p - 1.0),
        );
    }
}

#[test]
fn battery_exponential_tail() {
    check(
        "int_2^inf e^{-s}",
        quad_to_infinity(|s| (-s).exp(), 2.0, &QuadOpts::default()).unwrap(),
        (-2.0f64).exp(),
    );
}

#[test]
fn non_convergence_is_reported() {
    // A genuinely non-integrable singularity must fail loudly, not return junk.
    let r = quad_radial(|s| 1.0 / s, 0.0, 1.0, &[0.0]);
    assert!(r.is_err(), "1/s should not converge, got {r:?}");
}
