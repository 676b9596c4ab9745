//! Velocity-reconstruction oracles: the Rankine closed form, spectral
//! convolution against the radial closed form, axis integrals against a
//! brute-force polar quadrature, and the Poisson extension against arctan
//! closed forms.

use enslab_core::biotsavart::*;
use enslab_core::error::Error;
use enslab_core::fields::{make_grid, sample_radial, GridField, OriginRule, RadialProfile};
use std::f64::consts::PI;

/// Rankine vortex: rho = chi_{s < 1}, speed = r/2 inside and 1/(2r) outside.
fn rankine() -> RadialProfile {
    RadialProfile::from_fn(|s| if s < 1.0 { 1.0 } else { 0.0 }, 1.0, 0.0, vec![1.0]).unwrap()
}

#[test]
fn rankine_speed_closed_form() {
    let p = rankine();
    for r in [0.1, 0.3, 0.5, 0.9, 0.999] {
        let got = velocity_radial(&p, r).unwrap();
        let want = 0.5 * r;
        assert!(
            ((got - want) / want).abs() < 1e-10,
            "inside r={r}: got {got:.12e}, want {want:.12e}"
        );
    }
    for r in [1.0, 1.5, 3.0, 20.0] {
        let got = velocity_radial(&p, r).unwrap();
        let want = 0.5 / r;
        assert!(
            ((got - want) / want).abs() < 1e-10,
            "outside r={r}: got {got:.12e}, want {want:.12e}"
        );
    }
    assert_eq!(velocity_radial(&p, 0.0).unwrap(), 0.0);
    assert!(velocity_radial(&p, -1.0).is_err());
}

#[test]
fn smooth_vortex_speed_closed_form() {
    // rho = (1 - s^2)^2 on s < 1: speed(r) = (1 - (1 - r^2)^3) / (6 r)
    // inside and 1/(6 r) outside.
    let p = RadialProfile::from_fn(
        |s| if s < 1.0 { (1.0 - s * s).powi(2) } else { 0.0 },
        1.0,
        0.0,
        vec![],
    )
    .unwrap();
    for r in [0.2, 0.7, 1.4] {
        let got = velocity_radial(&p, r).unwrap();
        let want = if r < 1.0 {
            (1.0 - (1.0 - r * r).powi(3)) / (6.0 * r)
        } else {
            1.0 / (6.0 * r)
        };
        assert!(
            ((got - want) / want).abs() < 1e-10,
            "r={r}: got {got:.12e}, want {want:.12e}"
        );
    }
}

#[test]
fn spectral_velocity_matches_radial_closed_form() {
    // Same smooth vortex on a grid: u = speed(r) x_perp / r with
    // x_perp = (-y, x). The profile is C^1 with a jump in the second
    // derivative at s = 1, so the spectral route converges but not
    // super-algebraically.
    let p = RadialProfile::from_fn(
        |s| if s < 1.0 { (1.0 - s * s).powi(2) } else { 0.0 },
        1.0,
        0.0,
        vec![],
    )
    .unwrap();
    let g = make_grid(256, 2.0).unwrap();
    let omega = sample_radial(&p, &g, OriginRule::PointSample).unwrap();
    let u = velocity_spectral(&omega).unwrap();
    assert_eq!(u.far_field_budget, 0.0);
    let mut worst = 0.0f64;
    let mut tangency = 0.0f64;
    for ix in 0..g.n() {
        let x = g.coord(ix);
        for iy in 0..g.n() {
            let y = g.coord(iy);
            let r = x.hypot(y);
            let speed = if r == 0.0 {
                0.0
            } else if r < 1.0 {
                (1.0 - (1.0 - r * r).powi(3)) / (6.0 * r)
            } else {
                1.0 / (6.0 * r)
            };
            let (w1, w2) = if r == 0.0 {
                (0.0, 0.0)
            } else {
                (-y / r * speed, x / r * speed)
            };
            worst = worst
                .max((u.u1.at(ix, iy) - w1).abs())
                .max((u.u2.at(ix, iy) - w2).abs());
            tangency = tangency.max((x * u.u1.at(ix, iy) + y * u.u2.at(ix, iy)).abs());
        }
    }
    assert!(worst < 2e-5, "max velocity error {worst:.3e}");
    assert!(tangency < 2e-5, "max radial component {tangency:.3e}");
}

#[test]
fn tangency_is_relative_below_1e6() {
    // max |u . x| / (|u| |x|) < 1e-6 off the origin for radial data. The
    // bound is meaningful only when the spectral truncation error sits far
    // below the local speed, so the datum is an infinitely smooth bump.
    let p = RadialProfile::from_fn(
        |s| {
            let t = s / 0.9;
            if t < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 }
        },
        0.9,
        0.0,
        vec![],
    )
    .unwrap();
    let g = make_grid(256, 2.0).unwrap();
    let omega = sample_radial(&p, &g, OriginRule::PointSample).unwrap();
    let u = velocity_spectral(&omega).unwrap();
    let mut worst = 0.0f64;
    for ix in 0..g.n() {
        let x = g.coord(ix);
        for iy in 0..g.n() {
            let y = g.coord(iy);
            let r = x.hypot(y);
            if r == 0.0 {
                continue;
            }
            let (u1, u2) = (u.u1.at(ix, iy), u.u2.at(ix, iy));
            let speed = u1.hypot(u2);
            if speed > 0.0 {
                worst = worst.max((x * u1 + y * u2).abs() / (speed * r));
            }
        }
    }
    assert!(worst < 1e-6, "relative radial component {worst:.3e}");
}

#[test]
fn divergence_diagnostic_vanishes_for_a_stream_function_field() {
    // u = grad^perp psi is spectrally divergence-free on the grid; the
    // diagnostic must report rounding-level values.
    use enslab_core::fields::{fft_forward, fft_inverse, apply_multiplier, Complex64};
    let g = make_grid(64, 2.0).unwrap();
    let psi = GridField::from_fn(g, |x, y| {
        (std::f64::consts::PI / 2.0 * (2.0 * x + y)).sin()
            + (std::f64::consts::PI / 2.0 * (x - 3.0 * y)).cos()
    });
    let hat = fft_forward(&psi);
    let mut h1 = hat.clone();
    apply_multiplier(&mut h1, |_, x2| Complex64::new(0.0, -x2));
    let mut h2 = hat;
    apply_multiplier(&mut h2, |x1, _| Complex64::new(0.0, x1));
    let u = VelocityField {
        u1: fft_inverse(&h1),
        u2: fft_inverse(&h2),
        far_field_budget: 0.0,
    };
    assert!(
        u.divergence_rel_l2() < 1e-12,
        "divergence {:.3e}",
        u.divergence_rel_l2()
    );
}

#[test]
fn velocity_sup_is_bounded_by_enstrophy() {
    // ||u||_inf <= C ||omega||_{L2} across a family of random radial
    // profiles with support in the unit disk.
    use rand::Rng as _;
    use rand::SeedableRng as _;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let g = make_grid(128, 2.0).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let coeffs: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let support = rng.gen_range(0.3..1.0);
        let c = coeffs.clone();
        let p = RadialProfile::from_fn(
            move |s| {
                if s >= support {
                    0.0
                } else {
                    let t = s / support;
                    let bump = (1.0 - t * t).powi(2);
                    bump * c.iter().enumerate().map(|(k, &a)| a * t.powi(k as i32)).sum::<f64>()
                }
            },
            support,
            0.0,
            vec![],
        )
        .unwrap();
        let omega = sample_radial(&p, &g, OriginRule::PointSample).unwrap();
        let l2 = omega.l2_norm();
        if l2 < 1e-12 {
            continue;
        }
        let u = velocity_spectral(&omega).unwrap();
        let ratio = u.u1.linf_norm().max(u.u2.linf_norm()) / l2;
        worst = worst.max(ratio);
    }
    assert!(
        worst > 0.0 && worst < 1.0,
        "sup/enstrophy ratio escaped its bound: {worst:.4}"
    );
}

#[test]
fn spectral_velocity_rejects_wide_support() {
    // Data reaching past |x| = L/2 would alias; the support check must fire.
    let g = make_grid(64, 2.0).unwrap();
    let f = GridField::from_fn(g, |x, y| (-(x * x + y * y)).exp());
    match velocity_spectral(&f) {
        Err(Error::SupportMargin(_)) => {}
        other => panic!("expected SupportMargin, got {other:?}"),
    }
}

#[test]
fn axis_velocity_is_even_and_matches_brute_force() {
    let alpha = 0.7;
    let x1 = 0.1;
    let a = u1_on_axis(alpha, x1).unwrap();
    let b = u1_on_axis(alpha, -x1).unwrap();
    assert!((a - b).abs() < 1e-12, "evenness: {a:.12e} vs {b:.12e}");

    // Brute force: u1(x1, 0) = (1/2pi) int_{B+} y / |x - y'|^2 w(|y'|) dy'
    // over the upper half-disk of radius 1/3, polar midpoint rule. The
    // integrand is integrable, so a fine midpoint rule converges slowly but
    // surely; 4000 x 2000 gives ~4 digits.
    let nr = 4000;
    let nth = 2000;
    let mut acc = 0.0;
    let dr = (1.0 / 3.0) / nr as f64;
    let dth = PI / nth as f64;
    for i in 0..nr {
        let r = (i as f64 + 0.5) * dr;
        let w = 1.0 / (r * (-r.ln()).powf(alpha));
        for j in 0..nth {
            let th = (j as f64 + 0.5) * dth;
            let (sy, cy) = th.sin_cos();
            let (py, px) = (r * sy, r * cy);
            let d2 = (x1 - px).powi(2) + py * py;
            acc += py / d2 * w * r * dr * dth;
        }
    }
    let brute = acc / (2.0 * PI);
    assert!(
        ((a - brute) / brute).abs() < 1e-3,
        "axis closed form {a:.8e} vs brute force {brute:.8e}"
    );
}

#[test]
fn axis_velocity_rejects_bad_arguments() {
    assert!(u1_on_axis(0.4, 0.1).is_err());
    assert!(u1_on_axis(1.2, 0.1).is_err());
    assert!(u1_on_axis(0.7, 0.0).is_err());
    assert!(u1_on_axis(0.7, 0.4).is_err());
}

#[test]
fn axis_velocity_is_stable_under_tolerance_tightening() {
    let coarse = u1_on_axis_tol(0.6, 0.01, 1e-6).unwrap();
    let fine = u1_on_axis_tol(0.6, 0.01, 1e-11).unwrap();
    assert!(
        ((coarse - fine) / fine).abs() < 1e-5,
        "tolerance stability: {coarse:.12e} vs {fine:.12e}"
    );
}

#[test]
fn poisson_extension_of_constant_boundary() {
    for (x1, x2) in [(0.0, 0.5), (0.3, 0.01), (-2.0, 1.0)] {
        let p = poisson_halfplane_extension(|_| 1.0, x1, x2).unwrap();
        assert!(
            (p.value + 1.0).abs() <= p.tail_bound + 1e-8,
            "constant boundary at ({x1}, {x2}): {:.10e}, tail bound {:.3e}",
            p.value,
            p.tail_bound
        );
    }
}

#[test]
fn poisson_extension_of_step_boundary_closed_form() {
    // boundary = chi_{s >= 0} truncated to |s| <= S:
    // -(1/pi) int_0^S x2 / ((x1-s)^2 + x2^2) ds
    //   = -(1/pi) [arctan((S - x1)/x2) + arctan(x1/x2)].
    let s_max = POISSON_TRUNCATION;
    for (x1, x2) in [(0.5, 0.2), (-1.0, 0.7), (0.0, 1.0), (0.25, 0.003)] {
        let p = poisson_halfplane_extension(|s| if s >= 0.0 { 1.0 } else { 0.0 }, x1, x2).unwrap();
        let want = -(((s_max - x1) / x2).atan() + (x1 / x2).atan()) / PI;
        assert!(
            ((p.value - want) / want).abs() < 1e-8,
            "step boundary at ({x1}, {x2}): got {:.12e}, want {want:.12e}",
            p.value
        );
    }
    assert!(poisson_halfplane_extension(|_| 1.0, 0.0, 0.0).is_err());
    assert!(poisson_halfplane_extension(|_| 1.0, 0.0, -1.0).is_err());
}

#[test]
fn nonlinear_pairing_vanishes_for_gradient_test_fields_on_radial_data() {
    // For radial omega the velocity is tangential while the gradient of a
    // radial test function is radial, so u . grad(phi) |omega|^2 / 2
    // vanishes pointwise and the weak pairing must vanish to
    // discretization tolerance.
    let p = RadialProfile::from_fn(
        |s| if s < 0.8 { (1.0 - (s / 0.8).powi(2)).powi(3) } else { 0.0 },
        0.8,
        0.0,
        vec![],
    )
    .unwrap();
    let g = make_grid(128, 2.0).unwrap();
    let omega = sample_radial(&p, &g, OriginRule::PointSample).unwrap();
    // Phi = grad exp(-2 r^2), smooth and effectively supported inside.
    let phi = VelocityField {
        u1: GridField::from_fn(g, |x, y| -4.0 * x * (-2.0 * (x * x + y * y)).exp()),
        u2: GridField::from_fn(g, |x, y| -4.0 * y * (-2.0 * (x * x + y * y)).exp()),
        far_field_budget: 0.0,
    };
    let pairing = nonlinear_pairing(&omega, &phi).unwrap();
    let scale = omega.l2_norm().powi(2);
    assert!(
        pairing.abs() < 1e-6 * scale,
        "steady pairing {pairing:.3e} vs scale {scale:.3e}"
    );

    let zero = GridField::zeros(g);
    assert_eq!(nonlinear_pairing(&zero, &phi).unwrap(), 0.0);
}

#[test]
fn nonlinear_pairing_matches_the_direct_quadrature() {
    // The convolution kernel is odd, so transposing it across the pairing
    // gives +integral of u . Phi |omega|^2 / 2 with the same discrete u;
    // both routes are alias-free for compactly supported data and must
    // agree to rounding.
    let g = make_grid(128, 2.0).unwrap();
    let omega = GridField::from_fn(g, |x, y| {
        let r2 = (x - 0.2) * (x - 0.2) + y * y;
        if r2 < 0.36 {
            (1.0 - r2 / 0.36).powi(3) * (1.0 + 0.5 * x - 0.3 * y)
        } else {
            0.0
        }
    });
    let phi = VelocityField {
        u1: GridField::from_fn(g, |x, y| -2.0 * x * (-(x * x + y * y)).exp()),
        u2: GridField::from_fn(g, |x, y| -2.0 * y * (-(x * x + y * y)).exp()),
        far_field_budget: 0.0,
    };
    let pairing = nonlinear_pairing(&omega, &phi).unwrap();
    let u = velocity_spectral(&omega).unwrap();
    let h2 = g.h() * g.h();
    let mut direct = 0.0;
    for i in 0..g.n() * g.n() {
        direct += (u.u1.data[i] * phi.u1.data[i] + u.u2.data[i] * phi.u2.data[i])
            * 0.5
            * omega.data[i]
            * omega.data[i];
    }
    direct *= h2;
    assert!(
        ((pairing - direct) / direct).abs() < 1e-9,
        "pairing {pairing:.12e} vs direct {direct:.12e}"
    );
}
