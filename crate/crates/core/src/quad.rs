//! One-dimensional adaptive quadrature with graded handling of endpoint and
//! interior singularities of logarithmic or power type.
//!
//! Smooth panels use a nested 7/15-point Gauss-Legendre pair inside a global
//! worst-panel-first refinement loop. A declared singular point p gets a
//! neighborhood mapped by tau = log(1/|s - p|); the tau-integral is summed
//! over doubling blocks with a geometric tail extrapolation. The substitution
//! is what makes integrals like ∫_0^{1/3} ds/(s log^2(1/s)) reachable at all:
//! a relative mass ~1.4e-3 of that integral sits below s = 1e-308, beyond any
//! representable abscissa, but in tau it is the plain tail of ∫ dtau/tau^2.

use crate::error::{Error, Result};
use crate::special::gauss_legendre;
use std::cmp::Ordering;
use std::sync::OnceLock;

/// Options for `quad_radial_opts`.
#[derive(Debug, Clone)]
pub struct QuadOpts {
    /// Relative error target (default 1e-9).
    pub rel_tol: f64,
    /// Absolute error floor; accepted when either tolerance is met.
    pub abs_tol: f64,
    /// Maximum panel width for smooth panels; caps the resolution scale for
    /// oscillatory integrands (e.g. 1/4 of the Bessel period).
    pub max_panel: f64,
    /// Width of the graded neighborhood carved around each singular point.
    pub singular_width: f64,
    /// Total smooth-panel budget before reporting non-convergence.
    pub panel_budget: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts {
            rel_tol: 1e-9,
            abs_tol: 1e-300,
            max_panel: f64::INFINITY,
            singular_width: 0.25,
            panel_budget: 30_000,
        }
    }
}

fn gl_pair() -> &'static (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    static CELL: OnceLock<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let (n7, w7) = gauss_legendre(7);
        let (n15, w15) = gauss_legendre(15);
        (n7, w7, n15, w15)
    })
}

/// 15-point Gauss value with |G15 - G7| error estimate.
fn gl_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (n7, w7, n15, w15) = gl_pair();
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let mut g7 = 0.0;
    for (x, w) in n7.iter().zip(w7) {
        g7 += w * f(c + hw * x);
    }
    let mut g15 = 0.0;
    for (x, w) in n15.iter().zip(w15) {
        g15 += w * f(c + hw * x);
    }
    (hw * g15, hw * (g15 - g7).abs())
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err && self.a == other.a
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by interval start for determinism.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// Global adaptive integration over an initial panel list.
fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: &F,
    initial: &[(f64, f64)],
    opts: &QuadOpts,
) -> Result<(f64, f64)> {
    use std::collections::BinaryHeap;
    let mut heap = BinaryHeap::new();
    let mut queue: Vec<(f64, f64)> = Vec::new();
    for &(a, b) in initial {
        if b > a {
            queue.push((a, b));
        }
    }
    // Pre-split anything wider than max_panel.
    while let Some((a, b)) = queue.pop() {
        if b - a > opts.max_panel {
            let m = 0.5 * (a + b);
            queue.push((a, m));
            queue.push((m, b));
        } else {
            let (val, err) = gl_panel(f, a, b);
            heap.push(Panel { a, b, val, err });
        }
    }
    let mut count = heap.len();
    loop {
        let total: f64 = heap.iter().map(|p| p.val).sum();
        let toterr: f64 = heap.iter().map(|p| p.err).sum();
        // The |val|-sum floor keeps heavily cancelling integrands (odd parts,
        // oscillatory tails) from chasing an unreachable relative target.
        let sum_abs: f64 = heap.iter().map(|p| p.val.abs()).sum();
        let tol = opts
            .abs_tol
            .max(opts.rel_tol * total.abs())
            .max(1e-15 * sum_abs);
        if toterr <= tol || heap.is_empty() {
            return Ok((total, toterr));
        }
        if count >= opts.panel_budget {
            return Err(Error::QuadNonConvergence {
                achieved: total,
                error: toterr,
                target: tol,
            });
        }
        // Split the worst batch; splitting several at once amortizes the
        // total/err rescans above.
        for _ in 0..16 {
            match heap.pop() {
                // The negated comparison keeps NaN error estimates (overflow
                // inside a panel) on the refinement path instead of stalling.
                Some(p) if !(p.err <= 0.0) => {
                    let m = 0.5 * (p.a + p.b);
                    let (v1, e1) = gl_panel(f, p.a, m);
                    let (v2, e2) = gl_panel(f, m, p.b);
                    heap.push(Panel {
                        a: p.a,
                        b: m,
                        val: v1,
                        err: e1,
                    });
                    heap.push(Panel {
                        a: m,
                        b: p.b,
                        val: v2,
                        err: e2,
                    });
                    count += 1;
                }
                Some(p) => {
                    heap.push(p);
                    break;
                }
                None => break,
            }
        }
    }
}

/// Integrate f over the graded neighborhood of width d on the side of the
/// singular point p facing into the interval (sign = +1 for [p, p+d],
/// -1 for [p-d, p]). Uses tau = log(1/|s-p|).
fn integrate_singular<F: Fn(f64) -> f64>(
    f: &F,
    p: f64,
    sign: f64,
    d: f64,
    scale: f64,
    opts: &QuadOpts,
) -> Result<f64> {
    debug_assert!(d > 0.0 && d < 1.0);
    let g = |tau: f64| {
        let dist = (-tau).exp();
        let s = p + sign * dist;
        if s == p {
            return 0.0; // distance below representability; handled by the tail
        }
        f(s) * dist
    };
    let tau0 = (1.0 / d).ln();
    // A block only needs accuracy relative to the overall integral scale,
    // not to its own (possibly tiny) value; without the floor, far blocks
    // chase unreachable relative targets on rounding-noise-dominated data.
    let block_opts = QuadOpts {
        max_panel: f64::INFINITY,
        abs_tol: opts.abs_tol.max(0.02 * opts.rel_tol * scale),
        ..opts.clone()
    };
    let mut acc = 0.0;
    let mut lo = tau0;
    let mut prev_block: Option<f64> = None;
    let mut last_block = 0.0;
    let mut capped = false;
    for _ in 0..64 {
        let hi = 2.0 * lo;
        // Stop before distances underflow (exp(-700) is near the subnormal
        // range, where 1/f(s) style integrands overflow); the geometric tail
        // extrapolation accounts for the remainder.
        if hi > 700.0 {
            capped = true;
            break;
        }
        let (b, _) = integrate_adaptive(&g, &[(lo, hi)], &block_opts)?;
        acc += b;
        let tol = opts.abs_tol.max(0.05 * opts.rel_tol * acc.abs().max(scale));
        if b.abs() <= tol {
            prev_block = None; // tail below tolerance, no extrapolation needed
            break;
        }
        prev_block = Some(last_block);
        last_block = b;
        lo = hi;
    }
    // Doubling blocks of a power-law tail A tau^-q decay exactly
    // geometrically, so the remainder is last * rho / (1 - rho).
    if let Some(prev) = prev_block {
        if prev != 0.0 {
            let rho = last_block / prev;
            if rho > 0.0 && rho < 0.95 {
                acc += last_block * rho / (1.0 - rho);
            } else if capped && last_block.abs() > opts.rel_tol * acc.abs().max(scale) {
                return Err(Error::QuadNonConvergence {
                    achieved: acc,
                    error: last_block.abs(),
                    target: opts.rel_tol * acc.abs().max(scale),
                });
            }
        }
    }
    Ok(acc)
}

/// Integrate f over [a, infinity) by doubling blocks [a 2^k, a 2^{k+1}] with
/// the same geometric tail extrapolation used for graded singularities.
/// Requires a > 0 and an integrand decaying at least like a power t^-q, q > 1.
pub fn quad_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, opts: &QuadOpts) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(
            "quad_to_infinity needs a positive lower limit".into(),
        ));
    }
    let mut acc = 0.0;
    let mut lo = a;
    let mut prev_block: Option<f64> = None;
    let mut last_block = 0.0;
    for _ in 0..64 {
        let hi = 2.0 * lo;
        let (b, _) = integrate_adaptive(&f, &[(lo, hi)], opts)?;
        acc += b;
        if b.abs() <= opts.abs_tol.max(0.05 * opts.rel_tol * acc.abs()) {
            prev_block = None;
            break;
        }
        prev_block = Some(last_block);
        last_block = b;
        lo = hi;
        if lo > 1e300 {
            break;
        }
    }
    if let Some(prev) = prev_block {
        if prev != 0.0 {
            let rho = last_block / prev;
            if rho > 0.0 && rho < 0.95 {
                acc += last_block * rho / (1.0 - rho);
            } else if last_block.abs() > opts.rel_tol * acc.abs() {
                return Err(Error::QuadNonConvergence {
                    achieved: acc,
                    error: last_block.abs(),
                    target: opts.rel_tol * acc.abs(),
                });
            }
        }
    }
    Ok(acc)
}

/// Adaptive quadrature of `f` over [a, b] with declared singular points,
/// relative error target 1e-9. Singularities may be logarithmic or
/// |s - p|^-beta with beta < 1, at the endpoints or interior.
pub fn quad_radial<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, singular: &[f64]) -> Result<f64> {
    quad_radial_opts(&f, a, b, singular, &QuadOpts::default())
}

/// `quad_radial` with explicit options.
pub fn quad_radial_opts<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    singular: &[f64],
    opts: &QuadOpts,
) -> Result<f64> {
    if !(a < b) {
        return Err(Error::InvalidParameter(format!(
            "quad_radial needs a < b, got [{a}, {b}]"
        )));
    }
    let mut pts: Vec<f64> = singular
        .iter()
        .copied()
        .filter(|p| *p >= a && *p <= b)
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    // Split [a, b] into segments whose interiors are singularity-free.
    let mut cuts = vec![a];
    for &p in &pts {
        if p > a && p < b {
            cuts.push(p);
        }
    }
    cuts.push(b);

    let is_singular = |x: f64| pts.iter().any(|&p| p == x);
    let mut smooth: Vec<(f64, f64)> = Vec::new();
    // (point, sign, width) for each singular neighborhood.
    let mut graded: Vec<(f64, f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (x0, x1) = (w[0], w[1]);
        let len = x1 - x0;
        let mut lo = x0;
        let mut hi = x1;
        if is_singular(x0) {
            let d = opts.singular_width.min(0.4 * len).min(0.9);
            graded.push((x0, 1.0, d));
            lo = x0 + d;
        }
        if is_singular(x1) {
            let d = opts.singular_width.min(0.4 * len).min(0.9);
            graded.push((x1, -1.0, d));
            hi = x1 - d;
        }
        if hi > lo {
            smooth.push((lo, hi));
        }
    }

    let (mut total, _) = integrate_adaptive(f, &smooth, opts)?;
    let scale = total.abs();
    for &(p, sign, d) in &graded {
        total += integrate_singular(f, p, sign, d, scale, opts)?;
    }
    Ok(total)
}
