//! The fixed bump ψ(x) = c·exp(−1/(1 − x²)) on (−1, 1), normalized to unit
//! mass, together with its derivatives, cumulative distribution and Fourier
//! transform.

use crate::quadrature::{integrate, integrate_real, QuadOptions};
use crate::summation::Neumaier;
use num_complex::Complex64;
use std::f64::consts::TAU;
use std::sync::OnceLock;

/// Cells of the cumulative-distribution table on [0, 1].
pub const CDF_CELLS: usize = 4096;

fn unnormalized(x: f64) -> f64 {
    let u = 1.0 - x * x;
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

/// Normalizing constant c with ∫ψ = 1.
pub fn psi_norm_const() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let half = integrate_real(unnormalized, 0.0, 1.0);
        1.0 / (2.0 * half)
    })
}

/// ψ(x); zero for |x| ≥ 1.
pub fn psi(x: f64) -> f64 {
    psi_norm_const() * unnormalized(x)
}

/// ψ and its first four derivatives at `x`, by truncated Taylor arithmetic
/// on exp(−1/u) with u = 1 − x².
pub fn psi_jet(x: f64) -> [f64; 5] {
    let u0 = 1.0 - x * x;
    if u0 <= 0.0 {
        return [0.0; 5];
    }
    let e0 = (-1.0 / u0).exp();
    if e0 == 0.0 {
        return [0.0; 5];
    }
    // Taylor coefficients of u(x + h) in h.
    let u = [u0, -2.0 * x, -1.0, 0.0, 0.0];
    // r = 1/u
    let mut r = [0.0; 5];
    r[0] = 1.0 / u0;
    for k in 1..5 {
        let mut s = 0.0;
        for j in 1..=k {
            s += u[j] * r[k - j];
        }
        r[k] = -s / u0;
    }
    // v = −r, e = exp(v)
    let mut e = [0.0; 5];
    e[0] = e0;
    for k in 1..5 {
        let mut s = 0.0;
        for j in 1..=k {
            s += j as f64 * (-r[j]) * e[k - j];
        }
        e[k] = s / k as f64;
    }
    let c = psi_norm_const();
    let factorial = [1.0, 1.0, 2.0, 6.0, 24.0];
    let mut out = [0.0; 5];
    for k in 0..5 {
        out[k] = c * e[k] * factorial[k];
    }
    out
}

/// ψ′(x).
pub fn psi_d1(x: f64) -> f64 {
    psi_jet(x)[1]
}

/// ψ″(x).
pub fn psi_d2(x: f64) -> f64 {
    psi_jet(x)[2]
}

/// ‖ψ⁽⁴⁾‖₁, used for Fourier tail bounds.
pub fn psi_d4_l1() -> f64 {
    static M4: OnceLock<f64> = OnceLock::new();
    *M4.get_or_init(|| 2.0 * integrate_real(|x| psi_jet(x)[4].abs(), 0.0, 1.0))
}

struct CdfTable {
    /// Φ at the nodes k/CDF_CELLS, k = 0..=CDF_CELLS, for the half line [0, 1].
    values: Vec<f64>,
    /// ψ at the same nodes.
    slopes: Vec<f64>,
}

fn cdf_table() -> &'static CdfTable {
    static TABLE: OnceLock<CdfTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let h = 1.0 / CDF_CELLS as f64;
        let mut values = Vec::with_capacity(CDF_CELLS + 1);
        let mut slopes = Vec::with_capacity(CDF_CELLS + 1);
        let mut partial = Vec::with_capacity(CDF_CELLS + 1);
        let mut acc = Neumaier::new();
        partial.push(0.0);
        slopes.push(psi(0.0));
        for k in 0..CDF_CELLS {
            let a = k as f64 * h;
            let b = (k + 1) as f64 * h;
            acc.add(integrate_real(psi, a, b));
            partial.push(acc.total());
            slopes.push(psi(b));
        }
        // Normalize the half mass so that Φ(1) is exactly 1.
        let half = acc.total();
        values.extend(partial.iter().map(|p| 0.5 + 0.5 * (p / half)));
        CdfTable { values, slopes }
    })
}

/// Φ(x) = ∫_{−1}^{x} ψ, by cubic Hermite interpolation on a fixed grid
/// with exact node slopes ψ. Exactly 0 below −1, 1/2 at 0 and 1 above 1.
pub fn psi_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if x < 0.0 {
        return 1.0 - psi_cdf(-x);
    }
    let table = cdf_table();
    let h = 1.0 / CDF_CELLS as f64;
    let pos = x * CDF_CELLS as f64;
    let k = (pos.floor() as usize).min(CDF_CELLS - 1);
    let t = pos - k as f64;
    let (p0, p1) = (table.values[k], table.values[k + 1]);
    let mut m0 = table.slopes[k] * h;
    let mut m1 = table.slopes[k + 1] * h;
    // Fritsch–Carlson limiter; inactive for this smooth integrand but keeps
    // the interpolant monotone by construction.
    let delta = p1 - p0;
    if delta > 0.0 {
        let (alpha, beta) = (m0 / delta, m1 / delta);
        let s = alpha * alpha + beta * beta;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m0 *= tau;
            m1 *= tau;
        }
    } else {
        m0 = 0.0;
        m1 = 0.0;
    }
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
}

/// Mass of ψ on [a, b] via the tabulated distribution.
pub fn psi_mass(a: f64, b: f64) -> f64 {
    psi_cdf(b) - psi_cdf(a)
}

fn fourier_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_intervals: 20_000,
    }
}

/// ψ̂(ζ) = ∫ψ(x)e^{−2πixζ}dx = 2∫₀¹ψ(s)cos(2πsζ)ds, for complex ζ.
pub fn psi_hat(zeta: Complex64) -> Complex64 {
    if zeta == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let w = zeta * TAU;
    let r = integrate(
        |s| (w * s).cos() * psi(s),
        0.0,
        1.0,
        fourier_opts(),
    );
    r.value * 2.0
}

/// ψ̂ at a real argument.
pub fn psi_hat_real(xi: f64) -> f64 {
    psi_hat(Complex64::new(xi, 0.0)).re
}

/// ∫_{lo}^{hi} ψ(s)e^{μs}ds with the range clipped to [−1, 1].
pub fn psi_tilted_mass(mu: f64, lo: f64, hi: f64) -> f64 {
    let a = lo.max(-1.0);
    let b = hi.min(1.0);
    if a >= b {
        return 0.0;
    }
    if mu == 0.0 {
        return psi_mass(a, b);
    }
    integrate(
        |s| Complex64::new(psi(s) * (mu * s).exp(), 0.0),
        a,
        b,
        fourier_opts(),
    )
    .value
    .re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_and_values() {
        // Frozen from a 30-digit evaluation.
        assert!((psi_norm_const() - 2.252_283_621_043_581).abs() < 1e-13);
        assert!((psi(0.0) - 0.828_568_839_869_105_2).abs() < 1e-13);
        assert!((psi(0.5) - 0.593_695_516_732_014_1).abs() < 1e-13);
        assert_eq!(psi(1.0), 0.0);
        assert_eq!(psi(-1.0), 0.0);
        assert_eq!(psi(3.0), 0.0);
    }

    #[test]
    fn lower_bound_on_half_interval() {
        for i in 0..=100 {
            let x = -0.5 + i as f64 / 100.0;
            assert!(psi(x) >= 0.5);
        }
    }

    #[test]
    fn jet_matches_finite_differences() {
        for &x in &[0.0, 0.3, -0.61, 0.87] {
            let j = psi_jet(x);
            let h = 1e-5;
            let d1 = (psi(x + h) - psi(x - h)) / (2.0 * h);
            let d2 = (psi(x + h) - 2.0 * psi(x) + psi(x - h)) / (h * h);
            assert!((j[0] - psi(x)).abs() < 1e-15);
            assert!((j[1] - d1).abs() < 1e-8, "{x}");
            assert!((j[2] - d2).abs() < 1e-4, "{x}");
            let h = 1e-3;
            let d3 = (psi_jet(x + h)[2] - psi_jet(x - h)[2]) / (2.0 * h);
            assert!((j[3] - d3).abs() < 1e-3 * (1.0 + j[3].abs()), "{x}");
            let d4 = (psi_jet(x + h)[3] - psi_jet(x - h)[3]) / (2.0 * h);
            assert!((j[4] - d4).abs() < 1e-3 * (1.0 + j[4].abs()), "{x}");
        }
        assert_eq!(psi_jet(0.999_999), [0.0; 5]);
    }

    #[test]
    fn cdf_matches_quadrature() {
        assert_eq!(psi_cdf(0.0), 0.5);
        assert_eq!(psi_cdf(-1.0), 0.0);
        assert_eq!(psi_cdf(1.0), 1.0);
        for i in 0..200 {
            let x = -1.0 + 2.0 * (i as f64 + 0.37) / 200.0;
            let direct = integrate_real(psi, -1.0, x);
            assert!((psi_cdf(x) - direct).abs() < 1e-12, "{x}");
        }
        let mut prev = 0.0;
        for i in 0..=10_000 {
            let v = psi_cdf(-1.0 + 2.0 * i as f64 / 10_000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn fourier_transform_basic() {
        assert_eq!(psi_hat(Complex64::new(0.0, 0.0)), Complex64::new(1.0, 0.0));
        let xi = 0.7;
        let direct = integrate_real(|x| psi(x) * (TAU * x * xi).cos(), -1.0, 1.0);
        assert!((psi_hat_real(xi) - direct).abs() < 1e-13);
        // imaginary argument: ψ̂(iμ/2π) = ∫ψ e^{μx}
        let mu = 0.8;
        let direct = integrate_real(|x| psi(x) * (mu * x).exp(), -1.0, 1.0);
        let v = psi_hat(Complex64::new(0.0, mu / TAU));
        assert!((v.re - direct).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn tilted_mass() {
        let direct = integrate_real(|x| psi(x) * (0.4 * x).exp(), -0.2, 0.9);
        assert!((psi_tilted_mass(0.4, -0.2, 0.9) - direct).abs() < 1e-13);
        assert_eq!(psi_tilted_mass(0.4, 1.5, 2.0), 0.0);
    }

    #[test]
    fn fourth_derivative_norm() {
        let m4 = psi_d4_l1();
        assert!(m4 > 2000.0 && m4 < 3000.0, "{m4}");
    }
}
