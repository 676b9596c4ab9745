//! Concrete vorticities and the experiment drivers built on them: the
//! smoothly cut-off 1/|x| datum, the family (|x| |log|x||^alpha)^{-1} on the
//! (half) disk of radius 1/3 with its plateau truncations, and the sweep
//! drivers for the transport/viscous defect counterexample, the cubic
//! divergence integral, and the Zygmund-scale norm scans.

use crate::biotsavart::{poisson_halfplane_extension, u1_on_axis_tol};
use crate::defects::{
    heat_evolve, transport_defect, viscous_defect_field, viscous_defect_l1_spectral,
    PAPER_NORMALIZATION,
};
use crate::error::{Error, Result};
use crate::fields::{make_grid, sample_radial, Grid2D, GridField, OriginRule, RadialProfile};
use crate::quad::{quad_radial_opts, quad_to_infinity, QuadOpts};
use crate::special::gauss_legendre;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Shape of the radial cutoff phi: identically 1 on [0, 1/2], smoothly
/// decaying to 0 at 1. Two distinct shapes exist so that limits claimed to be
/// cutoff-independent can actually be checked against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutoffId {
    /// Transition by the C-infinity bump primitive S(t) = int_0^t b / int_0^1 b,
    /// b(u) = exp(-1/(u(1-u))).
    BumpSmoothstep,
    /// Transition by the C^2 quintic smoothstep 6t^5 - 15t^4 + 10t^3.
    PolySmoothstep,
}

/// Hermite table of the bump primitive on [0, 1]: values and exact
/// derivatives S'(t) = b(t)/B at uniform nodes.
struct BumpTable {
    values: Vec<f64>,
    derivs: Vec<f64>,
}

const BUMP_TABLE_N: usize = 2048;

fn bump(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        (-1.0 / (u * (1.0 - u))).exp()
    }
}

fn bump_table() -> &'static BumpTable {
    static CELL: OnceLock<BumpTable> = OnceLock::new();
    CELL.get_or_init(|| {
        let n = BUMP_TABLE_N;
        let (nodes, weights) = gauss_legendre(16);
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let a = i as f64 / n as f64;
            let b = (i + 1) as f64 / n as f64;
            let c = 0.5 * (a + b);
            let hw = 0.5 * (b - a);
            let mut s = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                s += w * bump(c + hw * x);
            }
            acc += hw * s;
            cum.push(acc);
        }
        let total = acc;
        let values = cum.iter().map(|v| v / total).collect();
        let derivs = (0..=n).map(|i| bump(i as f64 / n as f64) / total).collect();
        BumpTable { values, derivs }
    })
}

/// The monotone step S(t): 0 at t <= 0, 1 at t >= 1.
fn smoothstep(c: CutoffId, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    match c {
        CutoffId::PolySmoothstep => t * t * t * (10.0 + t * (-15.0 + 6.0 * t)),
        CutoffId::BumpSmoothstep => {
            let tab = bump_table();
            let x = t * BUMP_TABLE_N as f64;
            let i = (x as usize).min(BUMP_TABLE_N - 1);
            let u = x - i as f64; // local coordinate in [0, 1]
            let h = 1.0 / BUMP_TABLE_N as f64;
            let (v0, v1) = (tab.values[i], tab.values[i + 1]);
            let (d0, d1) = (tab.derivs[i] * h, tab.derivs[i + 1] * h);
            // Cubic Hermite with exact endpoint derivatives.
            let u2 = u * u;
            let u3 = u2 * u;
            v0 * (2.0 * u3 - 3.0 * u2 + 1.0)
                + d0 * (u3 - 2.0 * u2 + u)
                + v1 * (-2.0 * u3 + 3.0 * u2)
                + d1 * (u3 - u2)
        }
    }
}

/// Radial cutoff phi(s): 1 on [0, 1/2], smooth transition, 0 from 1 on.
pub fn cutoff_phi(c: CutoffId, s: f64) -> f64 {
    smoothstep(c, 2.0 * (1.0 - s))
}

/// Initial vorticity of the viscous-counterexample datum:
/// omega_0(x) = phi(|x|)/|x|, i.e. rho(s) = phi(s)/s with a first-order
/// singularity at the origin.
pub fn build_omega0(cutoff: CutoffId) -> Result<RadialProfile> {
    RadialProfile::from_fn(move |s| cutoff_phi(cutoff, s) / s, 1.0, 1.0, vec![])
}

/// Regularized variant rho_delta(s) = phi(s)/sqrt(s^2 + delta^2): bounded,
/// smooth, steady under its own induced velocity, suitable for the transport
/// side of the counterexample where a resolvable field is needed.
pub fn build_omega0_regularized(cutoff: CutoffId, delta: f64) -> Result<RadialProfile> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(
            "regularization scale delta must be positive".into(),
        ));
    }
    RadialProfile::from_fn(
        move |s| cutoff_phi(cutoff, s) / (s * s + delta * delta).sqrt(),
        1.0,
        0.0,
        vec![],
    )
}

/// Specification of the log-singular family on the disk of radius 1/3.
#[derive(Debug, Clone, Copy)]
pub struct AlphaFamilySpec {
    /// Singularity exponent, in (1/2, 1).
    pub alpha: f64,
    /// Plateau truncation level n (field capped at n/|log n|^alpha inside
    /// radius 1/n); None for the untruncated field.
    pub truncation: Option<f64>,
    /// Restrict to the upper half disk {x2 > 0}.
    pub half_disk: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (1/2, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// The radial density w(r) = 1/(r |log r|^alpha) on (0, 1/3), zero beyond.
pub fn alpha_density(alpha: f64, r: f64) -> f64 {
    if r <= 0.0 || r >= 1.0 / 3.0 {
        0.0
    } else {
        1.0 / (r * (-r.ln()).powf(alpha))
    }
}

/// Plateau level n/|log n|^alpha of the truncated field.
pub fn alpha_plateau(alpha: f64, n: f64) -> f64 {
    n / n.ln().powf(alpha)
}

/// Nodewise evaluation of the (possibly truncated, possibly half-disk)
/// alpha-family field on a grid. The truncated variant equals the plateau
/// n/|log n|^alpha inside radius 1/n and matches w(r) continuously at 1/n.
pub fn build_alpha_family(spec: &AlphaFamilySpec, g: &Grid2D) -> Result<GridField> {
    check_alpha(spec.alpha)?;
    if let Some(n) = spec.truncation {
        if !(n >= 10.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation level must be >= 10, got {n}"
            )));
        }
        if g.h() > 1.0 / (4.0 * n) {
            return Err(Error::InvalidGrid(format!(
                "grid spacing h = {:.3e} does not resolve the truncation \
                 radius 1/n = {:.3e} (need h <= 1/(4n))",
                g.h(),
                1.0 / n
            )));
        }
    }
    let alpha = spec.alpha;
    let trunc = spec.truncation;
    let half = spec.half_disk;
    Ok(GridField::from_fn(*g, |x, y| {
        if half && y <= 0.0 {
            return 0.0;
        }
        let r = x.hypot(y);
        match trunc {
            Some(n) if r <= 1.0 / n => alpha_plateau(alpha, n),
            _ => alpha_density(alpha, r),
        }
    }))
}

/// One row of the Zygmund membership scan: the modular of the alpha-family
/// field in L^2 (log L)^kappa under inner-radius refinement.
#[derive(Debug, Clone)]
pub struct ZygmundScanRow {
    pub kappa: f64,
    /// (inner radius delta_i = exp(-2^i), modular over {delta_i < |x| < 1/3}).
    pub modulars: Vec<(f64, f64)>,
    /// Ratio of the last per-doubling increment to the one two doublings
    /// earlier; > threshold signals divergence.
    pub trend_ratio: f64,
    pub divergent: bool,
}

/// Ratio-test threshold separating bounded from divergent refinement trends.
/// Per inner-radius doubling the modular increment scales like
/// 2^(i (1 + 2 kappa - 2 alpha)), geometric decay below the critical
/// kappa = alpha - 1/2 and geometric growth above it, so a unit ratio is
/// the scale-free separator.
pub const ZYGMUND_RATIO_THRESHOLD: f64 = 1.0;

/// Modular of the half-disk alpha field over {exp(-tau_hi) < |x| < 1/3} in
/// the Zygmund class with Young function A(s) = [s log^kappa(2 + s)]^2,
/// reduced to one dimension: pi * int tau^(-2 alpha) log^(2 kappa)(2 + w) dtau
/// with w = e^tau / tau^alpha.
fn zygmund_modular_band(alpha: f64, kappa: f64, tau_lo: f64, tau_hi: f64) -> Result<f64> {
    let f = move |tau: f64| {
        let lw = if tau > 300.0 {
            // log(2 + w) = log w + O(1/w); w overflows long before this matters.
            tau - alpha * tau.ln()
        } else {
            (2.0 + tau.exp() / tau.powf(alpha)).ln()
        };
        tau.powf(-2.0 * alpha) * lw.powf(2.0 * kappa)
    };
    Ok(PI * quad_radial_opts(&f, tau_lo, tau_hi, &[], &QuadOpts::default())?)
}

/// Scan the modular of the half-disk alpha field across kappa values under
/// inner-radius refinement delta_i = exp(-2^i). The per-doubling increments
/// decay geometrically iff 2(alpha - kappa) > 1, so the trend ratio detects
/// on which side of kappa = alpha - 1/2 each column sits.
pub fn zygmund_membership_scan(alpha: f64, kappa_list: &[f64]) -> Result<Vec<ZygmundScanRow>> {
    check_alpha(alpha)?;
    let tau0 = 3.0f64.ln();
    let levels: Vec<u32> = (2..=9).collect();
    let mut rows = Vec::with_capacity(kappa_list.len());
    for &kappa in kappa_list {
        if !(0.0..0.5).contains(&kappa) {
            return Err(Error::InvalidParameter(format!(
                "kappa must lie in [0, 1/2), got {kappa}"
            )));
        }
        let mut modulars = Vec::new();
        let mut increments = Vec::new();
        let mut acc = 0.0;
        let mut prev_tau = tau0;
        for &i in &levels {
            let tau_hi = (2.0f64).powi(i as i32);
            let inc = zygmund_modular_band(alpha, kappa, prev_tau, tau_hi)?;
            acc += inc;
            increments.push(inc);
            modulars.push(((-tau_hi).exp(), acc));
            prev_tau = tau_hi;
        }
        let k = increments.len();
        let trend_ratio = increments[k - 1] / increments[k - 3];
        rows.push(ZygmundScanRow {
            kappa,
            modulars,
            trend_ratio,
            divergent: trend_ratio >= ZYGMUND_RATIO_THRESHOLD,
        });
    }
    Ok(rows)
}

/// Luxemburg norms of the truncation remainders W_n = omega^alpha - omega^n
/// (supported in the half disk of radius 1/n) in L^2 (log L)^kappa, computed
/// on the 1D radial reduction. Requires 0 <= kappa < alpha - 1/2 so the
/// modular is finite; the norms decrease to 0 along an ascending n_list.
pub fn truncation_zygmund_decay(
    alpha: f64,
    kappa: f64,
    n_list: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_alpha(alpha)?;
    if !(kappa >= 0.0 && kappa < alpha - 0.5) {
        return Err(Error::InvalidParameter(format!(
            "kappa must lie in [0, alpha - 1/2) = [0, {}), got {kappa}",
            alpha - 0.5
        )));
    }
    if !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("n_list must be ascending".into()));
    }
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if !(n >= 10.0) {
            return Err(Error::InvalidParameter(format!(
                "truncation level must be >= 10, got {n}"
            )));
        }
        out.push((n, truncation_remainder_norm(alpha, kappa, n)?));
    }
    Ok(out)
}

/// Modular of W_n / k on the half disk via the 1D reduction in tau = log(1/r):
/// pi * int_{log n}^inf (g(tau)/k)^2 log^(2 kappa)(2 + g e^tau / k) dtau,
/// g(tau) = tau^(-alpha) - plateau * e^(-tau) = e^(-tau) W_n(e^(-tau)) >= 0.
fn truncation_modular(alpha: f64, kappa: f64, n: f64, k: f64) -> Result<f64> {
    let tau_n = n.ln();
    let plateau = alpha_plateau(alpha, n);
    let f = move |tau: f64| {
        let g = tau.powf(-alpha) - plateau * (-tau).exp();
        if g <= 0.0 {
            return 0.0;
        }
        let lf = if tau > 600.0 {
            g.ln() + tau - k.ln()
        } else {
            (2.0 + g * tau.exp() / k).ln()
        };
        (g / k).powi(2) * lf.powf(2.0 * kappa)
    };
    Ok(PI * quad_to_infinity(f, tau_n, &QuadOpts::default())?)
}

fn truncation_remainder_norm(alpha: f64, kappa: f64, n: f64) -> Result<f64> {
    // Bracket the Luxemburg norm by doubling/halving, then bisect.
    let mut lo = 1e-30;
    let mut hi = 1e-30;
    while truncation_modular(alpha, kappa, n, hi)? > 1.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e30 {
            return Err(Error::Overflow("Luxemburg bracket diverged".into()));
        }
    }
    if lo == 1e-30 && truncation_modular(alpha, kappa, n, lo)? <= 1.0 {
        return Ok(0.0); // remainder below representable norm
    }
    for _ in 0..200 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if truncation_modular(alpha, kappa, n, mid)? > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// One row of the cubic divergence experiment.
#[derive(Debug, Clone)]
pub struct CubicDivergenceRow {
    pub n: f64,
    /// I_n: the cubic integral over the half annulus n^(-1/3) < |x| < 1/3.
    pub i_n: f64,
    /// A posteriori bound on the truncation error committed by replacing the
    /// velocity of the truncated field with that of the untruncated one.
    pub truncation_bound: f64,
}

#[derive(Debug, Clone)]
pub struct CubicDivergenceResult {
    pub rows: Vec<CubicDivergenceRow>,
    /// Growth exponent p fitted to I_n ~ A + B (log n)^p from the last rows.
    pub fitted_exponent: f64,
}

/// Default outer radius of the region where the velocity sign argument holds.
pub const CUBIC_R0: f64 = 1.0 / 72.0;

/// Tabulated axis velocity u1(s, 0) of the half-disk alpha field, linearly
/// interpolated in tau = log(1/s) inside the disk and in s outside it.
struct AxisTable {
    alpha: f64,
    tau_lo: f64,
    tau_hi: f64,
    inner: Vec<f64>,
    s_out_max: f64,
    outer: Vec<f64>,
}

impl AxisTable {
    fn build(alpha: f64) -> Result<AxisTable> {
        let tau_lo = 3.0f64.ln() + 1e-12;
        let tau_hi = 40.0;
        let m = 400;
        let mut inner = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let tau = tau_lo + (tau_hi - tau_lo) * i as f64 / m as f64;
            inner.push(u1_on_axis_tol(alpha, (-tau).exp(), 1e-7)?);
        }
        // Outside the disk the same polar integral applies with the
        // singularity at r = x1 no longer inside the range.
        let s_out_max = 21.0;
        let m_out = 300;
        let mut outer = Vec::with_capacity(m_out + 1);
        let opts = QuadOpts {
            rel_tol: 1e-8,
            ..QuadOpts::default()
        };
        for i in 0..=m_out {
            let s = 1.0 / 3.0 + (s_out_max - 1.0 / 3.0) * i as f64 / m_out as f64;
            let v = quad_radial_opts(
                &|r: f64| (-r.ln()).powf(-alpha) / s * (2.0 * r / (s - r)).ln_1p(),
                0.0,
                1.0 / 3.0,
                &[0.0],
                &opts,
            )? / (2.0 * PI);
            outer.push(v);
        }
        Ok(AxisTable {
            alpha,
            tau_lo,
            tau_hi,
            inner,
            s_out_max,
            outer,
        })
    }

    /// u1(|s|, 0), defined for all s (even; decays like 1/s^2 far out).
    fn eval(&self, s: f64) -> f64 {
        let s = s.abs();
        if s == 0.0 {
            return 0.0;
        }
        if s >= self.s_out_max {
            // 1/s^2 continuation from the table edge.
            let last = *self.outer.last().unwrap();
            return last * (self.s_out_max / s).powi(2);
        }
        if s >= 1.0 / 3.0 {
            let x = (s - 1.0 / 3.0) / (self.s_out_max - 1.0 / 3.0)
                * (self.outer.len() - 1) as f64;
            let i = (x as usize).min(self.outer.len() - 2);
            let u = x - i as f64;
            return self.outer[i] * (1.0 - u) + self.outer[i + 1] * u;
        }
        let tau = -(s.ln());
        if tau >= self.tau_hi {
            // Asymptotic growth |log s|^(1 - alpha) beyond the table.
            let last = *self.inner.last().unwrap();
            return last * (tau / self.tau_hi).powf(1.0 - self.alpha);
        }
        let x = (tau - self.tau_lo) / (self.tau_hi - self.tau_lo)
            * (self.inner.len() - 1) as f64;
        let i = (x.max(0.0) as usize).min(self.inner.len() - 2);
        let u = (x - i as f64).clamp(0.0, 1.0);
        self.inner[i] * (1.0 - u) + self.inner[i + 1] * u
    }
}

/// Tangential speed (1/r) int_0^r |log s|^(-alpha) ds of the full-disk
/// alpha field, tabulated in tau = log(1/r).
struct SpeedTable {
    tau_lo: f64,
    tau_hi: f64,
    mass: Vec<f64>,
}

impl SpeedTable {
    fn build(alpha: f64) -> Result<SpeedTable> {
        let tau_lo = 3.0f64.ln();
        let tau_hi = 40.0;
        let m = 400;
        let mut mass = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let tau = tau_lo + (tau_hi - tau_lo) * i as f64 / m as f64;
            let r = (-tau).exp();
            // Integrand bounded (s rho(s) = |log s|^(-alpha)); graded at 0
            // only for the derivative singularity.
            mass.push(quad_radial_opts(
                &|s: f64| (-s.ln()).powf(-alpha),
                0.0,
                r,
                &[0.0],
                &QuadOpts::default(),
            )?);
        }
        Ok(SpeedTable { tau_lo, tau_hi, mass })
    }

    fn speed(&self, r: f64) -> f64 {
        let tau = -(r.ln());
        let x = (tau - self.tau_lo) / (self.tau_hi - self.tau_lo)
            * (self.mass.len() - 1) as f64;
        let i = (x.max(0.0) as usize).min(self.mass.len() - 2);
        let u = (x - i as f64).clamp(0.0, 1.0);
        let m = self.mass[i] * (1.0 - u) + self.mass[i + 1] * u;
        m / r
    }
}

/// The cubic divergence experiment with the default outer radius.
pub fn cubic_divergence_experiment(alpha: f64, n_list: &[f64]) -> Result<CubicDivergenceResult> {
    cubic_divergence_with_r0(alpha, n_list, CUBIC_R0)
}

/// I_n = cubic integral of u1 |omega|^2 over the half annulus
/// n^(-1/3) < |x| < 1/3, with u1 evaluated by the decomposition
/// u1(x) = -sin(theta) speed(r) - v1(x): the radial closed form of the
/// full-disk field minus the harmonic (Poisson) extension of the axis data,
/// which together encode the half-disk velocity without any 2D convolution
/// near the log-singular density. Returns a strictly increasing sequence or
/// fails with a non-monotonicity error.
pub fn cubic_divergence_with_r0(
    alpha: f64,
    n_list: &[f64],
    r0: f64,
) -> Result<CubicDivergenceResult> {
    if !(alpha > 0.5 && alpha <= 2.0 / 3.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (1/2, 2/3], got {alpha}"
        )));
    }
    if !(r0 > 0.0 && r0 <= 1.0 / 72.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "outer sign radius must lie in (0, 1/72], got {r0}"
        )));
    }
    if n_list.is_empty() || !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter(
            "n_list must be nonempty and ascending".into(),
        ));
    }
    if n_list[0] < 10.0 {
        return Err(Error::InvalidParameter("truncation levels must be >= 10".into()));
    }
    let axis = AxisTable::build(alpha)?;
    let speed = SpeedTable::build(alpha)?;
    let (th_nodes, th_weights) = gauss_legendre(24);
    // Angular integral of u1 over the upper half circle of radius e^(-tau).
    let theta_integral = |tau: f64| -> Result<f64> {
        let r = (-tau).exp();
        let mut acc = 0.0;
        for (x, w) in th_nodes.iter().zip(&th_weights) {
            let theta = 0.5 * PI * (1.0 + x);
            let (sin_t, cos_t) = theta.sin_cos();
            let v1 = poisson_halfplane_extension(|s| axis.eval(s), r * cos_t, r * sin_t)?;
            acc += w * (-sin_t * speed.speed(r) - v1.value);
        }
        Ok(0.5 * PI * acc)
    };
    // Cumulative integral of tau^(-2 alpha) * theta_integral(tau) between the
    // breakpoints tau_j = (log n_j)/3, so monotonicity of I_n reflects the
    // sign of the integrand and not independent quadrature noise.
    let (gl_nodes, gl_weights) = gauss_legendre(7);
    let segment = |lo: f64, hi: f64| -> Result<f64> {
        let panels = ((hi - lo) / 0.2).ceil().max(1.0) as usize;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = lo + (hi - lo) * p as f64 / panels as f64;
            let b = lo + (hi - lo) * (p + 1) as f64 / panels as f64;
            let c = 0.5 * (a + b);
            let hw = 0.5 * (b - a);
            for (x, w) in gl_nodes.iter().zip(&gl_weights) {
                let tau = c + hw * x;
                acc += w * hw * tau.powf(-2.0 * alpha) * theta_integral(tau)?;
            }
        }
        Ok(acc)
    };
    let mut rows: Vec<CubicDivergenceRow> = Vec::with_capacity(n_list.len());
    let mut acc = 0.0;
    let mut prev_tau = 3.0f64.ln();
    for &n in n_list {
        let tau_n = n.ln() / 3.0;
        if tau_n <= prev_tau {
            return Err(Error::InvalidParameter(format!(
                "truncation level {n} does not extend past radius 1/3"
            )));
        }
        let inc = segment(prev_tau, tau_n)?;
        // The base row may pick up the (negative) return flow near the edge
        // of the support; only increments between successive rows must be
        // positive for the sequence to increase strictly.
        if inc <= 0.0 && !rows.is_empty() {
            return Err(Error::NonMonotonic(format!(
                "I_n increment over radii [e^-{tau_n:.3}, e^-{prev_tau:.3}] \
                 is {inc:.3e}; expected positive"
            )));
        }
        acc += inc;
        rows.push(CubicDivergenceRow {
            n,
            i_n: acc,
            truncation_bound: cubic_truncation_bound(alpha, n)?,
        });
        prev_tau = tau_n;
    }
    let fitted_exponent = fit_log_exponent(
        &rows.iter().map(|r| r.n.ln()).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.i_n).collect::<Vec<_>>(),
    )?;
    Ok(CubicDivergenceResult {
        rows,
        fitted_exponent,
    })
}

/// Bound on |int e_n |omega|^2| over the integration region: the remainder
/// velocity e_n = K * W_n obeys |e_n(x)| <= M_n / (2 pi dist(x, B(0, 1/n)))
/// with M_n the mass of W_n, and the region keeps dist >= n^(-1/3) - 1/n.
fn cubic_truncation_bound(alpha: f64, n: f64) -> Result<f64> {
    let tau_n = n.ln();
    let plateau = alpha_plateau(alpha, n);
    let mass = PI
        * quad_to_infinity(
            move |tau: f64| (tau.powf(-alpha) - plateau * (-tau).exp()) * (-tau).exp(),
            tau_n,
            &QuadOpts::default(),
        )?;
    let dist = n.powf(-1.0 / 3.0) - 1.0 / n;
    let sup_e = mass / (2.0 * PI * dist);
    // L1 norm of |omega|^2 over the region, again in tau coordinates.
    let sq = PI
        * quad_radial_opts(
            &|tau: f64| tau.powf(-2.0 * alpha),
            3.0f64.ln(),
            tau_n / 3.0,
            &[],
            &QuadOpts::default(),
        )?;
    Ok(sup_e * sq)
}

/// Fit p in y ~ A + B x^p from the last four (or three) points by matching
/// the ratio of consecutive differences.
fn fit_log_exponent(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 3 {
        return Err(Error::InvalidParameter(
            "exponent fit needs at least 3 points".into(),
        ));
    }
    let k = x.len();
    let (x2, x3, x4) = (x[k - 3], x[k - 2], x[k - 1]);
    let target = (y[k - 1] - y[k - 2]) / (y[k - 2] - y[k - 3]);
    let g = |p: f64| (x4.powf(p) - x3.powf(p)) / (x3.powf(p) - x2.powf(p)) - target;
    let (mut lo, mut hi) = (1e-3, 3.0);
    let (glo, ghi) = (g(lo), g(hi));
    if glo.signum() == ghi.signum() {
        // No crossing in range: report the nearer endpoint.
        return Ok(if glo.abs() < ghi.abs() { lo } else { hi });
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == glo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Configuration of the paired transport/viscous defect experiment.
#[derive(Debug, Clone)]
pub struct CounterexampleConfig {
    pub cutoff: CutoffId,
    /// Grid size for the viscous sweep.
    pub grid_n: usize,
    /// Grid half-width L (data support needs L >= 2 for the margin).
    pub half_width: f64,
    pub nu_list: Vec<f64>,
    pub t_list: Vec<f64>,
    /// Mollification scales for the transport sweep.
    pub eps_list: Vec<f64>,
    /// Grid size for the transport sweep; n/2 is run as well to expose the
    /// refinement trend.
    pub transport_n: usize,
    /// Regularization scale of the transport-side datum.
    pub reg_delta: f64,
}

/// One row of the transport table: the defect of the regularized steady datum
/// should refine toward zero.
#[derive(Debug, Clone)]
pub struct TransportRow {
    pub n: usize,
    pub eps: f64,
    pub l1: f64,
    pub sup: f64,
}

/// One row of the viscous table. `l1_grid` is the grid-route defect mass
/// scaled by `PAPER_NORMALIZATION` so both L1 columns share the 4 pi^3 / t
/// limit; `mass_frac` holds the enclosed-mass fractions at radii 0.05, 0.1
/// and 0.5.
#[derive(Debug, Clone)]
pub struct ViscousRow {
    pub nu: f64,
    pub t: f64,
    pub l1_grid: f64,
    pub l1_spectral: f64,
    pub mass_frac: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct CounterexampleResult {
    pub transport: Vec<TransportRow>,
    pub viscous: Vec<ViscousRow>,
}

/// Radii of the concentration diagnostics in the viscous table.
pub const CONCENTRATION_RADII: [f64; 3] = [0.05, 0.1, 0.5];

/// The transport/viscous counterexample sweep: table A measures how close
/// the transport defect of the (regularized, steady) datum is to zero under
/// eps- and grid-refinement; table B tracks the viscous defect mass of the
/// singular datum toward its 4 pi^3 / t limit along nu -> 0, with the origin
/// concentration of the defect density.
pub fn counterexample_experiment(cfg: &CounterexampleConfig) -> Result<CounterexampleResult> {
    for (name, list) in [("nu_list", &cfg.nu_list), ("t_list", &cfg.t_list), ("eps_list", &cfg.eps_list)] {
        if list.is_empty() {
            return Err(Error::InvalidParameter(format!("{name} must be nonempty")));
        }
    }
    if !(cfg.half_width >= 2.0) {
        return Err(Error::InvalidParameter(
            "half_width must be >= 2 so the unit-disk datum clears the support margin".into(),
        ));
    }

    // Table A: transport defect of the regularized steady datum.
    let reg = build_omega0_regularized(cfg.cutoff, cfg.reg_delta)?;
    let mut transport = Vec::new();
    for &n in &[cfg.transport_n / 2, cfg.transport_n] {
        let g = make_grid(n, cfg.half_width)?;
        let omega = sample_radial(&reg, &g, OriginRule::CellAverage)?;
        for &eps in &cfg.eps_list {
            let z = transport_defect(&omega, eps)?;
            transport.push(TransportRow {
                n,
                eps,
                l1: z.l1_norm(),
                sup: z.linf_norm(),
            });
        }
    }

    // Table B: viscous defect of the singular datum.
    let p = build_omega0(cfg.cutoff)?;
    let g = make_grid(cfg.grid_n, cfg.half_width)?;
    let omega0 = sample_radial(&p, &g, OriginRule::CellAverage)?;
    let mut viscous = Vec::new();
    for &t in &cfg.t_list {
        for &nu in &cfg.nu_list {
            let omega_nu = heat_evolve(&omega0, nu, t)?;
            let z = viscous_defect_field(&omega_nu, nu);
            let total = z.integral();
            let h2 = g.h() * g.h();
            let mut enclosed = [0.0f64; 3];
            for ix in 0..g.n() {
                let x = g.coord(ix);
                for iy in 0..g.n() {
                    let r = x.hypot(g.coord(iy));
                    let v = z.at(ix, iy) * h2;
                    for (m, &rad) in enclosed.iter_mut().zip(&CONCENTRATION_RADII) {
                        if r <= rad {
                            *m += v;
                        }
                    }
                }
            }
            let mass_frac = if total > 0.0 {
                [
                    enclosed[0] / total,
                    enclosed[1] / total,
                    enclosed[2] / total,
                ]
            } else {
                [0.0; 3]
            };
            viscous.push(ViscousRow {
                nu,
                t,
                l1_grid: PAPER_NORMALIZATION * total,
                l1_spectral: viscous_defect_l1_spectral(&p, nu, t)?,
                mass_frac,
            });
        }
    }
    Ok(CounterexampleResult { transport, viscous })
}
