//! Grids, radial profiles, spectral transforms and differentiation.

use crate::error::{Error, Result};
use crate::quad::{quad_radial_opts, QuadOpts};
use crate::special::gauss_legendre;
use num_complex::Complex;
use rustfft::FftPlanner;
use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub type Complex64 = Complex<f64>;

/// Uniform square grid over [-L, L)^2, origin at a sample point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    n: usize,
    l: f64,
}

impl Grid2D {
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn half_width(&self) -> f64 {
        self.l
    }
    /// Grid spacing h = 2L/n.
    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }
    /// Physical coordinate of sample index i along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - (self.n / 2) as f64) * self.h()
    }
    /// Index of the origin sample along either axis.
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }
    /// Wavenumber of (signed) dual index k along either axis: xi = (pi/L) k.
    pub fn wavenumber(&self, k: usize) -> f64 {
        let ks = if k < self.n / 2 {
            k as f64
        } else {
            k as f64 - self.n as f64
        };
        PI / self.l * ks
    }
    /// Largest resolved wavenumber pi n / (2 L).
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / (2.0 * self.l)
    }
}

/// Construct an origin-centered grid; n must be a power of two >= 16.
pub fn make_grid(n: usize, l: f64) -> Result<Grid2D> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "n must be a power of two >= 16, got {n}"
        )));
    }
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::InvalidGrid(format!("L must be positive, got {l}")));
    }
    Ok(Grid2D { n, l })
}

static PROFILE_IDS: AtomicU64 = AtomicU64::new(0);

/// A radial function rho(s) on [0, s_max], zero beyond s_max, with
/// singularity metadata. rho(s) * s^singularity_order stays bounded as s -> 0;
/// jump_radii lists radii where rho is discontinuous (including a nonzero
/// value at s_max itself, as for the Rankine vortex).
#[derive(Clone)]
pub struct RadialProfile {
    mesh: Vec<f64>,
    values: Vec<f64>,
    s_max: f64,
    singularity_order: f64,
    jump_radii: Vec<f64>,
    eval_fn: Option<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    id: u64,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("s_max", &self.s_max)
            .field("singularity_order", &self.singularity_order)
            .field("mesh_len", &self.mesh.len())
            .field("jump_radii", &self.jump_radii)
            .finish()
    }
}

/// Geometric radial mesh from 1e-9 * s_max to s_max with ratio 1.05.
fn geometric_mesh(s_max: f64) -> Vec<f64> {
    let mut mesh = Vec::new();
    let mut s = 1e-9 * s_max;
    while s < s_max {
        mesh.push(s);
        s *= 1.05;
    }
    mesh.push(s_max);
    mesh
}

impl RadialProfile {
    /// Build from an analytic evaluator defined on (0, s_max].
    pub fn from_fn<F>(
        f: F,
        s_max: f64,
        singularity_order: f64,
        jump_radii: Vec<f64>,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(s_max > 0.0) {
            return Err(Error::InvalidProfile("s_max must be positive".into()));
        }
        if singularity_order >= 2.0 {
            return Err(Error::InvalidProfile(format!(
                "singularity_order {singularity_order} >= 2 is not locally integrable in 2D"
            )));
        }
        let mesh = geometric_mesh(s_max);
        let values = mesh.iter().map(|&s| f(s)).collect();
        Ok(RadialProfile {
            mesh,
            values,
            s_max,
            singularity_order,
            jump_radii,
            eval_fn: Some(Arc::new(f)),
            id: PROFILE_IDS.fetch_add(1, Ordering::Relaxed),
        })
    }

    /// Build from samples on a strictly increasing mesh; linear interpolation.
    pub fn from_samples(mesh: Vec<f64>, values: Vec<f64>, singularity_order: f64) -> Result<Self> {
        if mesh.len() != values.len() || mesh.len() < 2 {
            return Err(Error::InvalidProfile(
                "mesh and values must have equal length >= 2".into(),
            ));
        }
        if !mesh.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidProfile("mesh must be strictly increasing".into()));
        }
        let s_max = *mesh.last().unwrap();
        if mesh[0] > 1e-8 * s_max {
            return Err(Error::InvalidProfile(
                "first abscissa must be <= 1e-8 * s_max".into(),
            ));
        }
        if singularity_order >= 2.0 {
            return Err(Error::InvalidProfile(format!(
                "singularity_order {singularity_order} >= 2 is not locally integrable in 2D"
            )));
        }
        Ok(RadialProfile {
            mesh,
            values,
            s_max,
            singularity_order,
            jump_radii: Vec::new(),
            eval_fn: None,
            id: PROFILE_IDS.fetch_add(1, Ordering::Relaxed),
        })
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }
    pub fn singularity_order(&self) -> f64 {
        self.singularity_order
    }
    pub fn jump_radii(&self) -> &[f64] {
        &self.jump_radii
    }
    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    /// Stable identity for per-profile caches.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// Evaluate rho(s); zero beyond s_max.
    pub fn eval(&self, s: f64) -> f64 {
        if s > self.s_max {
            return 0.0;
        }
        if let Some(f) = &self.eval_fn {
            return f(s);
        }
        let s = s.max(self.mesh[0]);
        match self.mesh.binary_search_by(|m| m.total_cmp(&s)) {
            Ok(i) => self.values[i],
            Err(i) => {
                let i = i.clamp(1, self.mesh.len() - 1);
                let (s0, s1) = (self.mesh[i - 1], self.mesh[i]);
                let t = (s - s0) / (s1 - s0);
                self.values[i - 1] * (1.0 - t) + self.values[i] * t
            }
        }
    }
}

/// Real scalar field on a Grid2D, row-major data[ix * n + iy].
#[derive(Debug, Clone)]
pub struct GridField {
    pub grid: Grid2D,
    pub data: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: Grid2D) -> Self {
        GridField {
            grid,
            data: vec![0.0; grid.n * grid.n],
        }
    }

    /// Sample a function of (x, y) at the grid nodes.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: Grid2D, f: F) -> Self {
        let n = grid.n;
        let mut data = vec![0.0; n * n];
        for ix in 0..n {
            let x = grid.coord(ix);
            for iy in 0..n {
                data[ix * n + iy] = f(x, grid.coord(iy));
            }
        }
        GridField { grid, data }
    }

    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[ix * self.grid.n + iy]
    }
    pub fn at_mut(&mut self, ix: usize, iy: usize) -> &mut f64 {
        &mut self.data[ix * self.grid.n + iy]
    }

    /// h^2-weighted L1 norm.
    pub fn l1_norm(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        h2 * self.data.iter().map(|v| v.abs()).sum::<f64>()
    }
    /// h^2-weighted L2 norm.
    pub fn l2_norm(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        (h2 * self.data.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }
    pub fn linf_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
    /// h^2-weighted integral.
    pub fn integral(&self) -> f64 {
        let h2 = self.grid.h() * self.grid.h();
        h2 * self.data.iter().sum::<f64>()
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridField {
        GridField {
            grid: self.grid,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip<F: Fn(f64, f64) -> f64>(&self, other: &GridField, f: F) -> GridField {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        GridField {
            grid: self.grid,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// Complex Fourier coefficients of a GridField. Coefficients approximate the
/// continuum transform omega_hat(xi) = integral of omega * exp(-i xi . x):
/// coeffs[k] = h^2 (-1)^(k1+k2) DFT(data)[k], the sign absorbing the
/// half-period grid offset so that radial data yield real coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub grid: Grid2D,
    pub coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Sum of |coeffs|^2 normalized to match h^2 sum |data|^2 (Plancherel).
    pub fn plancherel_sum(&self) -> f64 {
        let norm = 1.0 / (2.0 * self.grid.l).powi(2);
        norm * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place 2D FFT on an n x n row-major complex buffer (unscaled).
pub(crate) fn fft2_inplace(buf: &mut [Complex64], n: usize, inverse: bool) {
    assert_eq!(buf.len(), n * n);
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    });
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, n);
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_square(buf, n);
}

fn transpose_square(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Sign (-1)^(k1+k2) absorbing the grid's half-period offset.
#[inline]
fn offset_sign(k1: usize, k2: usize) -> f64 {
    if (k1 + k2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Forward transform to continuum-normalized Fourier coefficients.
pub fn fft_forward(f: &GridField) -> SpectralField {
    let n = f.grid.n;
    let h2 = f.grid.h() * f.grid.h();
    let mut buf: Vec<Complex64> = f.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2_inplace(&mut buf, n, false);
    for k1 in 0..n {
        for k2 in 0..n {
            buf[k1 * n + k2] *= h2 * offset_sign(k1, k2);
        }
    }
    SpectralField {
        grid: f.grid,
        coeffs: buf,
    }
}

/// Inverse transform back to the grid (real part; the imaginary residue of a
/// conjugate-symmetric input is at rounding level).
pub fn fft_inverse(ff: &SpectralField) -> GridField {
    let n = ff.grid.n;
    let mut buf = ff.coeffs.clone();
    for k1 in 0..n {
        for k2 in 0..n {
            buf[k1 * n + k2] *= offset_sign(k1, k2);
        }
    }
    fft2_inplace(&mut buf, n, true);
    let scale = 1.0 / (n as f64 * n as f64 * ff.grid.h() * ff.grid.h());
    GridField {
        grid: ff.grid,
        data: buf.iter().map(|c| c.re * scale).collect(),
    }
}

/// Apply a radial-in-xi (or general) multiplier m(xi1, xi2) in place.
pub fn apply_multiplier<F: Fn(f64, f64) -> Complex64>(ff: &mut SpectralField, m: F) {
    let n = ff.grid.n;
    for k1 in 0..n {
        let xi1 = ff.grid.wavenumber(k1);
        for k2 in 0..n {
            let xi2 = ff.grid.wavenumber(k2);
            ff.coeffs[k1 * n + k2] *= m(xi1, xi2);
        }
    }
}

/// Spectral gradient (d1 f, d2 f) via i xi multipliers. Logs a warning if the
/// tail above 0.9 * Nyquist carries more than 1e-6 of the total energy.
pub fn gradient_spectral(f: &GridField) -> (GridField, GridField) {
    let ff = fft_forward(f);
    let n = f.grid.n;
    let cut = 0.9 * f.grid.nyquist();
    let mut tail = 0.0;
    let mut total = 0.0;
    for k1 in 0..n {
        let xi1 = f.grid.wavenumber(k1);
        for k2 in 0..n {
            let xi2 = f.grid.wavenumber(k2);
            let e = ff.coeffs[k1 * n + k2].norm_sqr();
            total += e;
            if xi1.abs() >= cut || xi2.abs() >= cut {
                tail += e;
            }
        }
    }
    if total > 0.0 && tail > 1e-6 * total {
        log::warn!(
            "gradient_spectral: unresolved spectral tail ({:.2e} of total energy above 0.9*Nyquist)",
            tail / total
        );
    }
    let mut f1 = ff.clone();
    apply_multiplier(&mut f1, |xi1, _| Complex64::new(0.0, xi1));
    let mut f2 = ff;
    apply_multiplier(&mut f2, |_, xi2| Complex64::new(0.0, xi2));
    (fft_inverse(&f1), fft_inverse(&f2))
}

/// How the origin sample (and, for singular or discontinuous profiles, the
/// cells adjacent to the singular set) is filled in `sample_radial`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginRule {
    /// Plain nodewise evaluation; a non-finite origin value becomes 0.
    PointSample,
    /// Average the profile over the origin cell (and over cells near a
    /// singular origin or a declared jump radius) by high-order quadrature,
    /// preserving the L1/L2 mass the defect asymptotics depend on.
    CellAverage,
}

/// Average of rho(|x|) over the h x h cell centered at the origin, computed
/// in polar coordinates: the part of the circle of radius r inside the cell
/// subtends angle 2 pi for r < h/2 and 2 pi - 8 arccos(h/(2r)) up to the
/// corner radius h/sqrt(2).
fn origin_cell_average(p: &RadialProfile, h: f64) -> Result<f64> {
    let opts = QuadOpts::default();
    let inner = quad_radial_opts(
        &|r: f64| 2.0 * PI * r * p.eval(r),
        0.0,
        0.5 * h,
        &[0.0],
        &opts,
    )?;
    let corner = 0.5 * h * std::f64::consts::SQRT_2;
    let outer = quad_radial_opts(
        &|r: f64| (2.0 * PI - 8.0 * (h / (2.0 * r)).clamp(-1.0, 1.0).acos()) * r * p.eval(r),
        0.5 * h,
        corner,
        &[],
        &opts,
    )?;
    Ok((inner + outer) / (h * h))
}

/// Tensor Gauss-Legendre average over an off-origin cell (smooth integrand).
fn cell_average_gl(p: &RadialProfile, cx: f64, cy: f64, h: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(16);
    let mut sum = 0.0;
    for (xi, wi) in nodes.iter().zip(&weights) {
        let x = cx + 0.5 * h * xi;
        for (yj, wj) in nodes.iter().zip(weights.iter()) {
            let y = cy + 0.5 * h * yj;
            sum += wi * wj * p.eval((x * x + y * y).sqrt());
        }
    }
    0.25 * sum
}

/// Midpoint-subsampled average over a cell crossed by a jump circle; high
/// polynomial order is useless against the discontinuity, resolution is not.
fn cell_average_midpoint(p: &RadialProfile, cx: f64, cy: f64, h: f64) -> f64 {
    const Q: usize = 32;
    let mut sum = 0.0;
    for i in 0..Q {
        let x = cx + h * ((i as f64 + 0.5) / Q as f64 - 0.5);
        for j in 0..Q {
            let y = cy + h * ((j as f64 + 0.5) / Q as f64 - 0.5);
            sum += p.eval((x * x + y * y).sqrt());
        }
    }
    sum / (Q * Q) as f64
}

/// Sample a radial profile onto a grid. With `OriginRule::CellAverage`,
/// cells within 4h of a singular origin and cells crossed by a declared jump
/// radius are filled with cell averages; all other nodes are exact point
/// evaluations.
pub fn sample_radial(p: &RadialProfile, g: &Grid2D, rule: OriginRule) -> Result<GridField> {
    if p.singularity_order >= 2.0 {
        return Err(Error::InvalidProfile(
            "singularity_order >= 2 is not locally integrable in 2D".into(),
        ));
    }
    let n = g.n;
    let h = g.h();
    let mut out = GridField::zeros(*g);
    let singular_origin = rule == OriginRule::CellAverage && p.singularity_order > 0.0;
    let origin_avg = if rule == OriginRule::CellAverage {
        Some(origin_cell_average(p, h)?)
    } else {
        None
    };
    let half_diag = 0.5 * h * std::f64::consts::SQRT_2;
    for ix in 0..n {
        let x = g.coord(ix);
        for iy in 0..n {
            let y = g.coord(iy);
            let r = (x * x + y * y).sqrt();
            let v = if r == 0.0 {
                match origin_avg {
                    Some(v) => v,
                    None => {
                        let v = p.eval(0.0);
                        if v.is_finite() {
                            v
                        } else {
                            0.0
                        }
                    }
                }
            } else if rule == OriginRule::CellAverage
                && p.jump_radii.iter().any(|&j| (r - j).abs() <= half_diag)
            {
                cell_average_midpoint(p, x, y, h)
            } else if singular_origin && r <= 4.0 * h {
                cell_average_gl(p, x, y, h)
            } else {
                p.eval(r)
            };
            *out.at_mut(ix, iy) = v;
        }
    }
    Ok(out)
}
