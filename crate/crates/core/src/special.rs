//! Scalar special functions: Bessel functions J0, J1 and Gauss-Legendre rules.

use std::f64::consts::{FRAC_PI_4, PI};

/// Switch point between the power series and the asymptotic expansion.
/// Below it the alternating series loses at most ~3 digits to cancellation;
/// above it the Hankel asymptotic series reaches 1e-11 before its terms
/// start growing.
const SERIES_LIMIT: f64 = 12.0;

/// Bessel function of the first kind J0(x), absolute accuracy ~1e-10.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        // J0(x) = sum_k (-x^2/4)^k / (k!)^2
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..64 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        hankel_asymptotic(0, x)
    }
}

/// Bessel function of the first kind J1(x), absolute accuracy ~1e-10.
pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let val = if ax < SERIES_LIMIT {
        // J1(x) = (x/2) sum_k (-x^2/4)^k / (k! (k+1)!)
        let q = -0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..64 {
            term *= q / ((k * (k + 1)) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1.0) {
                break;
            }
        }
        0.5 * ax * sum
    } else {
        hankel_asymptotic(1, ax)
    };
    if x < 0.0 {
        -val
    } else {
        val
    }
}

/// Hankel's asymptotic expansion
///   Jn(x) = sqrt(2/(pi x)) [P(n,x) cos(chi) - Q(n,x) sin(chi)],
///   chi = x - (2n+1) pi/4,
/// with P the even-index and Q the odd-index part of the divergent series
/// a_k = prod_{j<=k} (mu - (2j-1)^2) / (k! (8x)^k), mu = 4n^2.
/// Truncated at the smallest term; for x >= 12 that term is < 1e-11.
fn hankel_asymptotic(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..40u32 {
        let j = (2 * k - 1) as f64;
        a *= (mu - j * j) / (k as f64 * 8.0 * x);
        if a.abs() >= prev {
            break; // asymptotic series started diverging
        }
        prev = a.abs();
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (2 * n + 1) as f64 * FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1],
/// by Newton iteration on the Legendre polynomial P_N.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi initial guess for the i-th root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
