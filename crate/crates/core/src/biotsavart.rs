//! Velocity reconstruction from vorticity: the radial closed form, the
//! aperiodic spectral convolution with the Biot-Savart kernel
//! K(x) = x_perp / (2 pi |x|^2), and the half-disk axis/Poisson machinery.

use crate::error::{Error, Result};
use crate::fields::{
    apply_multiplier, fft_forward, fft_inverse, make_grid, Complex64, GridField, RadialProfile,
};
use crate::quad::{quad_radial_opts, QuadOpts};
use crate::special::{bessel_j0, bessel_j1};
use std::f64::consts::PI;

/// Velocity field (u1, u2) on a common grid. `far_field_budget` reports the
/// aperiodic-convolution truncation error bound of the spectral route; the
/// truncated-Green construction below makes it zero by construction for data
/// within the support margin.
#[derive(Debug, Clone)]
pub struct VelocityField {
    pub u1: GridField,
    pub u2: GridField,
    pub far_field_budget: f64,
}

impl VelocityField {
    /// Relative L2 norm of the spectral divergence, for band-limited checks.
    pub fn divergence_rel_l2(&self) -> f64 {
        let f1 = fft_forward(&self.u1);
        let f2 = fft_forward(&self.u2);
        let n = self.u1.grid.n();
        let mut div = 0.0;
        let mut tot = 0.0;
        for k1 in 0..n {
            let xi1 = self.u1.grid.wavenumber(k1);
            for k2 in 0..n {
                let xi2 = self.u1.grid.wavenumber(k2);
                let c1 = f1.coeffs[k1 * n + k2];
                let c2 = f2.coeffs[k1 * n + k2];
                div += (xi1 * c1 + xi2 * c2).norm_sqr();
                tot += (xi1.hypot(xi2)).powi(2) * (c1.norm_sqr() + c2.norm_sqr());
            }
        }
        if tot == 0.0 {
            0.0
        } else {
            (div / tot).sqrt()
        }
    }
}

/// Tangential speed of the steady radial vortex with vorticity profile rho:
/// u(x) = speed(|x|) * x_perp/|x| with speed(r) = (1/r) * int_0^r s rho(s) ds.
pub fn velocity_radial(p: &RadialProfile, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    if r < 0.0 {
        return Err(Error::InvalidParameter("radius must be nonnegative".into()));
    }
    let hi = r.min(p.s_max());
    let mut singular: Vec<f64> = Vec::new();
    if p.singularity_order() > 0.0 {
        singular.push(0.0);
    }
    singular.extend(p.jump_radii().iter().copied().filter(|&j| j < hi));
    let m = quad_radial_opts(
        &|s: f64| s * p.eval(s),
        0.0,
        hi,
        &singular,
        &QuadOpts::default(),
    )?;
    Ok(m / r)
}

/// Fourier transform of the truncated Green's function G(x) chi_{|x|<R},
/// G = (1/2 pi) log |x|:  R log R J1(kappa R)/kappa - (1 - J0(kappa R))/kappa^2.
fn green_truncated_hat(kappa: f64, r: f64) -> f64 {
    if kappa == 0.0 {
        0.25 * r * r * (2.0 * r.ln() - 1.0)
    } else {
        r * r.ln() * bessel_j1(kappa * r) / kappa
            - (1.0 - bessel_j0(kappa * r)) / (kappa * kappa)
    }
}

/// Velocity u = K * omega by aperiodic spectral convolution: the grid is
/// zero-padded by 2x and the multiplier uses the truncated Green's function
/// with truncation radius R = 2L. For data supported in |x| <= L/2 the
/// maximum source-target separation (<= 1.91 L) stays below R while every
/// periodic alias stays beyond it (>= 2.09 L), so the discrete free-space
/// convolution is alias-free on the whole original grid and the mean mode
/// needs no special treatment (the multiplier is finite at xi = 0).
pub fn velocity_spectral(omega: &GridField) -> Result<VelocityField> {
    let g = omega.grid;
    let n = g.n();
    let l = g.half_width();
    // Enforce the support margin |x| <= L/2.
    let peak = omega.linf_norm();
    if peak > 0.0 {
        let margin = 0.5 * l;
        let mut worst = 0.0f64;
        for ix in 0..n {
            let x = g.coord(ix);
            for iy in 0..n {
                let y = g.coord(iy);
                if x.hypot(y) > margin && omega.at(ix, iy).abs() > 1e-12 * peak {
                    worst = worst.max(x.hypot(y));
                }
            }
        }
        if worst > 0.0 {
            return Err(Error::SupportMargin(format!(
                "velocity_spectral needs numerical support within |x| <= L/2 = {margin}; \
                 found |omega| > 1e-12 * max at |x| = {worst:.6}"
            )));
        }
    }

    let gp = make_grid(2 * n, 2.0 * l).expect("padded grid");
    let mut padded = GridField::zeros(gp);
    let off = n / 2;
    for ix in 0..n {
        for iy in 0..n {
            *padded.at_mut(ix + off, iy + off) = omega.at(ix, iy);
        }
    }
    let hat = fft_forward(&padded);
    let rt = 2.0 * l;
    let mut h1 = hat.clone();
    apply_multiplier(&mut h1, |xi1, xi2| {
        let gh = green_truncated_hat(xi1.hypot(xi2), rt);
        Complex64::new(0.0, -xi2 * gh)
    });
    let mut h2 = hat;
    apply_multiplier(&mut h2, |xi1, xi2| {
        let gh = green_truncated_hat(xi1.hypot(xi2), rt);
        Complex64::new(0.0, xi1 * gh)
    });
    let up1 = fft_inverse(&h1);
    let up2 = fft_inverse(&h2);
    let mut u1 = GridField::zeros(g);
    let mut u2 = GridField::zeros(g);
    for ix in 0..n {
        for iy in 0..n {
            *u1.at_mut(ix, iy) = up1.at(ix + off, iy + off);
            *u2.at_mut(ix, iy) = up2.at(ix + off, iy + off);
        }
    }
    Ok(VelocityField {
        u1,
        u2,
        far_field_budget: 0.0,
    })
}

/// First velocity component of the half-disk vorticity
/// (|x| |log|x||^alpha)^{-1} chi_{B+(0,1/3)} on the horizontal axis:
/// 2 pi u1(x1, 0) = int_0^{1/3} |log r|^{-alpha} (1/|x1|)
///                  log |(r + x1)/(r - x1)| dr,  even in x1.
pub fn u1_on_axis(alpha: f64, x1: f64) -> Result<f64> {
    u1_on_axis_tol(alpha, x1, 1e-9)
}

/// `u1_on_axis` with an explicit relative quadrature tolerance (acceptance
/// checks tighten it to verify stability).
pub fn u1_on_axis_tol(alpha: f64, x1: f64, rel_tol: f64) -> Result<f64> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (1/2, 1), got {alpha}"
        )));
    }
    let a = x1.abs();
    if !(a > 0.0 && a < 1.0 / 3.0) {
        return Err(Error::InvalidParameter(format!(
            "x1 must satisfy 0 < |x1| < 1/3, got {x1}"
        )));
    }
    let opts = QuadOpts {
        rel_tol,
        ..QuadOpts::default()
    };
    let val = quad_radial_opts(
        &|r: f64| {
            let lr = -r.ln(); // |log r| on (0, 1/3)
            // log|(r + a)/(r - a)| via log1p: the ratio is 1 + O(a/r) for
            // r >> a and direct evaluation loses ~eps/(a/r) relative accuracy.
            let log_term = if r > a {
                (2.0 * a / (r - a)).ln_1p()
            } else {
                (2.0 * r / (a - r)).ln_1p()
            };
            lr.powf(-alpha) / a * log_term
        },
        0.0,
        1.0 / 3.0,
        &[0.0, a],
        &opts,
    )?;
    Ok(val / (2.0 * PI))
}

/// Truncation range of the Poisson-extension integral.
pub const POISSON_TRUNCATION: f64 = 10.0;

/// Result of the truncated Poisson-kernel extension with its tail bound.
#[derive(Debug, Clone, Copy)]
pub struct PoissonValue {
    pub value: f64,
    /// Bound on the neglected |s| > S part, from the sampled boundary
    /// magnitude beyond S and the O(x2/S) kernel tail.
    pub tail_bound: f64,
}

/// Harmonic extension to the upper half-plane with the sign convention of the
/// half-disk construction: -(1/pi) int x2 b(s) / ((x1-s)^2 + x2^2) ds,
/// truncated to |s| <= S = 10. For boundary data b = 1 this returns -1 up to
/// the reported tail bound.
pub fn poisson_halfplane_extension<F: Fn(f64) -> f64>(
    boundary: F,
    x1: f64,
    x2: f64,
) -> Result<PoissonValue> {
    if !(x2 > 0.0) {
        return Err(Error::InvalidParameter("x2 must be positive".into()));
    }
    let s_trunc = POISSON_TRUNCATION;
    let opts = QuadOpts {
        rel_tol: 1e-10,
        ..QuadOpts::default()
    };
    let kernel = |s: f64| x2 * boundary(s) / ((x1 - s) * (x1 - s) + x2 * x2);
    // The integrand is smooth but sharply peaked (width x2) at s = x1;
    // declaring the peak a graded point resolves arbitrarily small x2.
    let singular = if x1.abs() < s_trunc { vec![x1] } else { vec![] };
    let val = quad_radial_opts(&kernel, -s_trunc, s_trunc, &singular, &opts)?;
    let sup_tail = [1.0, 1.5, 2.0]
        .iter()
        .flat_map(|&c| [boundary(c * s_trunc).abs(), boundary(-c * s_trunc).abs()])
        .fold(0.0f64, f64::max);
    let tail_bound = sup_tail * 2.0 * x2 / (PI * (s_trunc - x1.abs()).max(s_trunc * 0.5));
    Ok(PoissonValue {
        value: -val / PI,
        tail_bound,
    })
}

/// Weak nonlinear pairing -
///   integral of omega(y) * [K .* (Phi |omega|^2 / 2)](y) dy
/// with K .* F = K1 * F1 + K2 * F2 computed by `velocity_spectral` applied
/// to each component of Phi |omega|^2 / 2.
pub fn nonlinear_pairing(omega: &GridField, phi: &VelocityField) -> Result<f64> {
    let half_sq = omega.map(|v| 0.5 * v * v);
    let g1 = phi.u1.zip(&half_sq, |a, b| a * b);
    let g2 = phi.u2.zip(&half_sq, |a, b| a * b);
    let k1 = velocity_spectral(&g1)?.u1;
    let k2 = velocity_spectral(&g2)?.u2;
    let h2 = omega.grid.h() * omega.grid.h();
    let mut acc = 0.0;
    for ((w, a), b) in omega.data.iter().zip(&k1.data).zip(&k2.data) {
        acc += w * (a + b);
    }
    Ok(-h2 * acc)
}
