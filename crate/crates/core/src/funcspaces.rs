//! Rearrangement-invariant and Littlewood-Paley norms: distribution
//! functions, decreasing rearrangement, Lorentz L^(1,q), Zygmund
//! L^p(log L)^a via the Luxemburg norm, Besov B^s_{2,inf}, and the
//! energy-spectrum diagnostic.

use crate::biotsavart::VelocityField;
use crate::error::{Error, Result};
use crate::fields::{fft_forward, GridField};

/// Parameters of the Young function A_{p,a}(s) = [s log^a(2+s)]^p.
#[derive(Debug, Clone, Copy)]
pub struct OrliczParams {
    p: f64,
    a: f64,
}

impl OrliczParams {
    pub fn new(p: f64, a: f64) -> Result<Self> {
        if !(p >= 1.0) || !(a >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "OrliczParams needs p >= 1 and a >= 0, got p={p}, a={a}"
            )));
        }
        let params = OrliczParams { p, a };
        // Spot-check midpoint convexity and monotonicity on a coarse sample.
        let pts: Vec<f64> = (0..60).map(|i| 0.25 * i as f64).collect();
        for w in pts.windows(3) {
            let (y0, y1, y2) = (params.young(w[0]), params.young(w[1]), params.young(w[2]));
            if y1 > y2 || y0 + y2 - 2.0 * y1 < -1e-9 * (1.0 + y2) {
                return Err(Error::InvalidParameter(format!(
                    "A_{{{p},{a}}} failed the convexity spot-check"
                )));
            }
        }
        Ok(params)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn a(&self) -> f64 {
        self.a
    }

    /// A_{p,a}(s) = [s log^a(2+s)]^p.
    pub fn young(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        (s * (2.0 + s).ln().powf(self.a)).powf(self.p)
    }

    /// Inverse Young function by bisection with bracket doubling.
    pub fn young_inv(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while self.young(hi) < y {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.young(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-10 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// lambda_f(s) = h^2 #{cells with |f| > s}.
pub fn distribution_function(f: &GridField, s: f64) -> f64 {
    let h2 = f.grid.h() * f.grid.h();
    h2 * f.data.iter().filter(|v| v.abs() > s).count() as f64
}

/// The decreasing rearrangement of a grid field: cell |values| sorted
/// descending, each carrying measure h^2. Sorting ties are broken by
/// lexicographic cell index for determinism.
#[derive(Debug, Clone)]
pub struct RearrangementProfile {
    values: Vec<f64>,
    cell_measure: f64,
    nonzero: usize,
}

impl RearrangementProfile {
    /// f* as the sorted value list (descending).
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }
    /// Total measure of the support: (number of nonzero cells) * h^2.
    pub fn support_measure(&self) -> f64 {
        self.nonzero as f64 * self.cell_measure
    }
    pub fn nonzero_cells(&self) -> usize {
        self.nonzero
    }
}

/// Decreasing rearrangement of |f|.
pub fn rearrange(f: &GridField) -> RearrangementProfile {
    let mut idx: Vec<usize> = (0..f.data.len()).collect();
    idx.sort_by(|&i, &j| {
        f.data[j]
            .abs()
            .total_cmp(&f.data[i].abs())
            .then_with(|| i.cmp(&j))
    });
    let values: Vec<f64> = idx.iter().map(|&i| f.data[i].abs()).collect();
    let nonzero = values.iter().filter(|v| **v > 0.0).count();
    RearrangementProfile {
        values,
        cell_measure: f.grid.h() * f.grid.h(),
        nonzero,
    }
}

/// Maximal function f**(s) = (1/s) int_0^s f*, evaluated at the midpoints
/// s_k = (k + 1/2) h^2 of the cumulative-measure axis.
pub fn maximal(fstar: &RearrangementProfile) -> Vec<f64> {
    let m = fstar.cell_measure;
    let mut out = Vec::with_capacity(fstar.values.len());
    let mut cum = 0.0;
    for (k, &v) in fstar.values.iter().enumerate() {
        let s = (k as f64 + 0.5) * m;
        out.push((cum + 0.5 * m * v) / s);
        cum += m * v;
    }
    out
}

/// Lorentz norm || s f**(s) ||_{L^q(ds/s)} over the support measure,
/// midpoint rule on the cumulative-measure axis.
pub fn lorentz_norm_1q(f: &GridField, q: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "lorentz_norm_1q supports 1 <= q <= 2, got {q}"
        )));
    }
    let fstar = rearrange(f);
    let m = fstar.cell_measure;
    let mut cum = 0.0;
    let mut acc = 0.0;
    for (k, &v) in fstar.values[..fstar.nonzero].iter().enumerate() {
        let s = (k as f64 + 0.5) * m;
        let fss = (cum + 0.5 * m * v) / s;
        acc += (s * fss).powf(q) * m / s;
        cum += m * v;
    }
    Ok(acc.powf(1.0 / q))
}

/// Orlicz modular h^2 sum A_{p,a}(|f|), overflow-guarded.
pub fn orlicz_modular(f: &GridField, params: &OrliczParams) -> Result<f64> {
    let h2 = f.grid.h() * f.grid.h();
    let mut acc = 0.0;
    for &v in &f.data {
        let y = params.young(v.abs());
        if !(y < 1e300) {
            return Err(Error::Overflow(format!(
                "A_{{{},{}}}({:e}) exceeds 1e300",
                params.p,
                params.a,
                v.abs()
            )));
        }
        acc += y;
    }
    Ok(h2 * acc)
}

/// Luxemburg norm inf { k > 0 : modular(f/k) <= 1 }, by bisection; the
/// modular at the returned k lies in [1 - 1e-6, 1 + 1e-6] for f != 0.
pub fn luxemburg_norm(f: &GridField, params: &OrliczParams) -> Result<f64> {
    if f.data.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    // Overflow-proof modular of f/k: treat overflow as "modular > 1".
    let modular_gt_one = |k: f64| -> (bool, f64) {
        match orlicz_modular(&f.map(|v| v / k), params) {
            Ok(m) => (m > 1.0, m),
            Err(_) => (true, f64::INFINITY),
        }
    };
    let mut hi = 1.0;
    for _ in 0..4100 {
        if !modular_gt_one(hi).0 {
            break;
        }
        hi *= 2.0;
    }
    let mut lo = hi;
    for _ in 0..4100 {
        if modular_gt_one(0.5 * lo).0 {
            break;
        }
        lo *= 0.5;
    }
    let mut a = 0.5 * lo;
    let mut b = hi;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if modular_gt_one(mid).0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= 1e-9 * b {
            break;
        }
    }
    Ok(b)
}

/// Ratio ||alpha beta||_{1,1/2} / (4 max(||alpha||_{2,1/4}, ||beta||_{2,1/4})^2);
/// the product lemma asserts it is <= 1.
pub fn product_lemma_check(alpha: &GridField, beta: &GridField) -> Result<f64> {
    let p_prod = OrliczParams::new(1.0, 0.5)?;
    let p_fac = OrliczParams::new(2.0, 0.25)?;
    let prod = alpha.zip(beta, |a, b| a * b);
    let num = luxemburg_norm(&prod, &p_prod)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    let na = luxemburg_norm(alpha, &p_fac)?;
    let nb = luxemburg_norm(beta, &p_fac)?;
    Ok(num / (4.0 * na.max(nb).powi(2)))
}

/// Low-pass Littlewood-Paley symbol: 1 on |xi| <= 2/3, raised-cosine decay,
/// supported in |xi| < 1.
pub fn lp_symbol_low(kappa: f64) -> f64 {
    if kappa <= 2.0 / 3.0 {
        1.0
    } else if kappa >= 1.0 {
        0.0
    } else {
        let t = (kappa - 2.0 / 3.0) * 3.0;
        (0.5 * std::f64::consts::PI * t).cos().powi(2)
    }
}

/// Dyadic shell symbol: supported in 1/2 < |xi| < 2, identically 1 on
/// [2/3, 4/3], raised-cosine transitions.
pub fn lp_symbol_shell(kappa: f64) -> f64 {
    if kappa <= 0.5 || kappa >= 2.0 {
        0.0
    } else if kappa < 2.0 / 3.0 {
        let t = (kappa - 0.5) * 6.0;
        (0.5 * std::f64::consts::PI * t).sin().powi(2)
    } else if kappa <= 4.0 / 3.0 {
        1.0
    } else {
        let t = (kappa - 4.0 / 3.0) * 1.5;
        (0.5 * std::f64::consts::PI * t).cos().powi(2)
    }
}

/// Result of the Besov sup: the norm, the block attaining it, and whether
/// that block is the largest representable one (possible unresolved tail).
#[derive(Debug, Clone, Copy)]
pub struct BesovNorm {
    pub value: f64,
    pub argmax_j: usize,
    pub at_highest_j: bool,
}

/// B^s_{2,inf} norm: sup over representable dyadic blocks of
/// 2^{js} ||psi_j * f||_{L^2}, computed via Plancherel. Block 0 is the
/// low-pass piece, block j >= 1 the shell symbol dilated by 2^-j.
pub fn besov_norm_sup(f: &GridField, s: u32) -> BesovNorm {
    assert!(s <= 1, "smoothness index in {{0, 1}}");
    let hat = fft_forward(f);
    let n = f.grid.n();
    let nyquist = f.grid.nyquist();
    let j_max = nyquist.log2().floor() as usize;
    let mut block_sq = vec![0.0f64; j_max + 1];
    for k1 in 0..n {
        let xi1 = f.grid.wavenumber(k1);
        for k2 in 0..n {
            let kappa = xi1.hypot(f.grid.wavenumber(k2));
            let e = hat.coeffs[k1 * n + k2].norm_sqr();
            if e == 0.0 {
                continue;
            }
            let w0 = lp_symbol_low(kappa);
            if w0 > 0.0 {
                block_sq[0] += w0 * w0 * e;
            }
            for (j, b) in block_sq.iter_mut().enumerate().skip(1) {
                let w = lp_symbol_shell(kappa / (1u64 << j) as f64);
                if w > 0.0 {
                    *b += w * w * e;
                }
            }
        }
    }
    let norm = 1.0 / (2.0 * f.grid.half_width()).powi(2);
    let mut best = 0.0;
    let mut argmax = 0;
    for (j, &bsq) in block_sq.iter().enumerate() {
        let weight = ((1u64 << (j as u32 * s)) as f64) * (norm * bsq).sqrt();
        if weight > best {
            best = weight;
            argmax = j;
        }
    }
    if argmax == j_max {
        log::warn!("besov_norm_sup: sup attained at the highest representable block j={argmax}");
    }
    BesovNorm {
        value: best,
        argmax_j: argmax,
        at_highest_j: argmax == j_max,
    }
}

/// Shell-summed energy spectrum: E(kappa) over unit-width annuli
/// [m, m+1) in wavenumber, reported at shell centers m + 1/2.
pub fn energy_spectrum(u: &VelocityField) -> Vec<(f64, f64)> {
    let h1 = fft_forward(&u.u1);
    let h2 = fft_forward(&u.u2);
    let n = u.u1.grid.n();
    let nyquist = u.u1.grid.nyquist();
    let nshell = nyquist.ceil() as usize;
    let mut shells = vec![0.0f64; nshell];
    let norm = 0.5 / (2.0 * u.u1.grid.half_width()).powi(2);
    for k1 in 0..n {
        let xi1 = u.u1.grid.wavenumber(k1);
        for k2 in 0..n {
            let kappa = xi1.hypot(u.u1.grid.wavenumber(k2));
            let m = kappa.floor() as usize;
            if m < nshell {
                shells[m] +=
                    norm * (h1.coeffs[k1 * n + k2].norm_sqr() + h2.coeffs[k1 * n + k2].norm_sqr());
            }
        }
    }
    shells
        .iter()
        .enumerate()
        .map(|(m, &e)| (m as f64 + 0.5, e))
        .collect()
}
