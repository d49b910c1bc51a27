//! Main-term densities, their integrals, and Plancherel windows.

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Tolerance for deciding whether a spectral parameter is real or imaginary.
const NU_TOL: f64 = 1e-12;

/// Multiplicity of the representation π_{ν,p} in L²(Γ\G).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralDatum {
    #[serde(with = "crate::serde_complex")]
    pub nu: Complex64,
    pub p: i64,
    pub multiplicity: u64,
}

impl SpectralDatum {
    /// Validates: principal series need Re ν = 0; complementary series need
    /// real ν ∈ (0, 1) and p = 0.
    pub fn new(nu: Complex64, p: i64, multiplicity: u64) -> Result<Self> {
        let d = Self { nu, p, multiplicity };
        d.check()?;
        Ok(d)
    }

    /// Principal series datum with ν = i·t.
    pub fn principal(t: f64, p: i64, multiplicity: u64) -> Self {
        Self {
            nu: Complex64::new(0.0, t),
            p,
            multiplicity,
        }
    }

    /// Complementary series datum with real ν ∈ (0, 1) and p = 0.
    pub fn complementary(nu: f64, multiplicity: u64) -> Result<Self> {
        Self::new(Complex64::new(nu, 0.0), 0, multiplicity)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.nu.re.is_finite() && self.nu.im.is_finite()) {
            return Err(Error::DomainError("spectral parameter must be finite".into()));
        }
        if self.nu.re.abs() <= NU_TOL {
            return Ok(());
        }
        if self.nu.im.abs() <= NU_TOL && self.nu.re > 0.0 && self.nu.re < 1.0 && self.p == 0 {
            return Ok(());
        }
        Err(Error::DomainError(format!(
            "ν = {} with p = {} is neither principal (Re ν = 0) nor complementary (ν ∈ (0,1), p = 0)",
            self.nu, self.p
        )))
    }

    pub fn is_complementary(&self) -> bool {
        self.nu.re.abs() > NU_TOL
    }
}

/// Volume of Γ\G (Haar normalization: Euclidean on U, du on A, probability on K)
/// and systole of Γ\H³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldConstants {
    pub volume: f64,
    pub systole: f64,
}

impl ManifoldConstants {
    pub fn new(volume: f64, systole: f64) -> Result<Self> {
        if !(volume > 0.0 && volume.is_finite()) {
            return Err(Error::DomainError(format!("volume must be positive, got {volume}")));
        }
        if !(systole > 0.0 && systole.is_finite()) {
            return Err(Error::DomainError(format!("systole must be positive, got {systole}")));
        }
        Ok(Self { volume, systole })
    }
}

fn complementary(comp: &[SpectralDatum]) -> impl Iterator<Item = (f64, f64)> + '_ {
    comp.iter()
        .filter(|d| d.is_complementary())
        .map(|d| (d.nu.re, d.multiplicity as f64))
}

/// dϖ_Γ/dt = e^{2t}/t + Σ_j m_j e^{(1+ν_j)t}/t over complementary entries.
pub fn varpi_density(t: f64, comp: &[SpectralDatum]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("density needs t > 0, got {t}")));
    }
    let extra: f64 = complementary(comp).map(|(nu, m)| m * ((1.0 + nu) * t).exp()).sum();
    Ok(((2.0 * t).exp() + extra) / t)
}

/// dϖ*_Γ/du = e^u + Σ_j m_j e^{uν_j} over complementary entries.
pub fn varpi_star_density(u: f64, comp: &[SpectralDatum]) -> f64 {
    let extra: f64 = complementary(comp).map(|(nu, m)| m * (u * nu).exp()).sum();
    u.exp() + extra
}

/// ∫_a^b dϖ_Γ for 2 ≤ a ≤ b, by adaptive quadrature.
pub fn ei_main_term(a: f64, b: f64, comp: &[SpectralDatum]) -> Result<f64> {
    if !(a >= 2.0) {
        return Err(Error::DomainError(format!("lower limit must be >= 2, got {a}")));
    }
    if !(b >= a) || !b.is_finite() {
        return Err(Error::DomainError(format!("need a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-14,
        max_intervals: 10_000,
    };
    let r = integrate(
        |t| Complex64::new(varpi_density(t, comp).unwrap_or(0.0), 0.0),
        a,
        b,
        opts,
    );
    Ok(r.value.re)
}

/// Plancherel density (|ν|² + n²)/4π² at ν = it.
pub fn plancherel_density(t: f64, n: i64) -> f64 {
    (t * t + (n * n) as f64) / (4.0 * PI * PI)
}

/// Plancherel mass of the two-sided window a ≤ |t| ≤ b:
/// (1/4π²)(2(b³ − a³)/3 + 2n²(b − a)).
pub fn plancherel_window(a: f64, b: f64, n: i64) -> Result<f64> {
    if !(a >= 0.0 && b >= a && b.is_finite()) {
        return Err(Error::DomainError(format!("need 0 <= a <= b, got [{a}, {b}]")));
    }
    let n2 = (n * n) as f64;
    Ok((2.0 * (b * b * b - a * a * a) / 3.0 + 2.0 * n2 * (b - a)) / (4.0 * PI * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datum_validation() {
        assert!(SpectralDatum::complementary(0.5, 1).is_ok());
        assert!(SpectralDatum::complementary(1.5, 1).is_err());
        assert!(SpectralDatum::new(Complex64::new(0.5, 0.0), 1, 1).is_err());
        assert!(SpectralDatum::new(Complex64::new(0.0, 2.0), 3, 1).is_ok());
        assert!(SpectralDatum::new(Complex64::new(0.2, 2.0), 0, 1).is_err());
    }

    #[test]
    fn varpi_examples() {
        // Frozen 30-digit values.
        let v = varpi_density(2.0, &[]).unwrap();
        assert!((v - 27.299_075_016_572_1).abs() < 1e-11);
        let comp = [SpectralDatum::complementary(0.5, 1).unwrap()];
        let v = varpi_density(2.0, &comp).unwrap();
        assert!((v - 37.341_843_478_166_0).abs() < 1e-11);
        assert!(varpi_density(0.0, &[]).is_err());
        let mut prev = 0.0;
        for i in 0..100 {
            let v = varpi_density(1.0 + 0.1 * i as f64, &[]).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn varpi_star_examples() {
        let comp = [
            SpectralDatum::complementary(0.5, 2).unwrap(),
            SpectralDatum::principal(3.0, 1, 4),
        ];
        assert_eq!(varpi_star_density(0.0, &comp), 3.0);
        assert!((varpi_star_density(1.0, &[]) - std::f64::consts::E).abs() < 1e-15);
        assert!((varpi_star_density(-1.0, &comp) - 1.580_940_760_596_709).abs() < 1e-14);
    }

    #[test]
    fn ei_examples() {
        assert_eq!(ei_main_term(2.0, 2.0, &[]).unwrap(), 0.0);
        // Ei(6) − Ei(4)
        let v = ei_main_term(2.0, 3.0, &[]).unwrap();
        assert!((v - 66.358_887_672_383_0).abs() < 1e-10, "{v}");
        let a = ei_main_term(2.0, 4.0, &[]).unwrap();
        let b = ei_main_term(3.0, 4.0, &[]).unwrap();
        assert!((a - (v + b)).abs() < 1e-9 * a);
        assert!(ei_main_term(1.0, 3.0, &[]).is_err());
    }

    #[test]
    fn plancherel_examples() {
        assert!((plancherel_window(0.0, 1.0, 0).unwrap() - 0.016_886_863_940_389_63).abs() < 1e-15);
        assert!((plancherel_window(0.0, 1.0, 1).unwrap() - 0.067_547_455_761_558_51).abs() < 1e-15);
        let r = 1.0;
        let v = plancherel_window(r - 1.0, r + 1.0, 0).unwrap();
        assert!((v - (r * r + 1.0 / 3.0) / (PI * PI)).abs() < 1e-15);
        assert_eq!(plancherel_window(0.5, 2.0, 3).unwrap(), plancherel_window(0.5, 2.0, -3).unwrap());
        assert!(plancherel_window(2.0, 1.0, 0).is_err());
    }
}
