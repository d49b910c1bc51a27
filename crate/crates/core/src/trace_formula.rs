//! Weyl discriminant, Abel transform, and both sides of the even and odd
//! non-spherical trace formulas.

use crate::algebra::{one_minus_q_sq, ComplexLength};
use crate::error::{Error, Result};
use crate::measures::{plancherel_window, ManifoldConstants, SpectralDatum};
use crate::spectrum::SpectrumTable;
use crate::summation::ComplexNeumaier;
use crate::sums::{weighted_sum, SumSpec};
use crate::test_functions::{CutoffDescriptor, Parity};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// |D|^{1/2} = |1 − e^{ℓ+iθ}|·|1 − e^{−ℓ−iθ}|.
pub fn weyl_discriminant_root(cl: ComplexLength) -> f64 {
    let (l, theta) = if cl.length >= 0.0 {
        (cl.length, cl.holonomy)
    } else {
        (-cl.length, -cl.holonomy)
    };
    l.exp() * one_minus_q_sq(l, theta)
}

/// Holonomy factor of a torus test function F(t_{u,θ}) = g(u)·trig(nθ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

fn line_kind(g: &CutoffDescriptor) -> Result<()> {
    g.validate()?;
    if g.parity() == Parity::Periodic {
        return Err(Error::UnsupportedKind(g.kind.name()));
    }
    Ok(())
}

/// F̂(χ_{ν,p}⁻¹) = (1/2π)∫∫ g(u)·trig(nθ)·e^{uν + ipθ} dθ du.
///
/// Zero exactly when p ∉ {±n}, and for `Sin` when n = 0.
pub fn abel_transform(g: &CutoffDescriptor, trig: Trig, n: i64, nu: Complex64, p: i64) -> Result<Complex64> {
    line_kind(g)?;
    let zero = Complex64::new(0.0, 0.0);
    let factor = match trig {
        Trig::Cos if p == n && n == 0 => Complex64::new(1.0, 0.0),
        Trig::Cos if p == n || p == -n => Complex64::new(0.5, 0.0),
        Trig::Sin if n == 0 => return Ok(zero),
        Trig::Sin if p == n => Complex64::new(0.0, 0.5),
        Trig::Sin if p == -n => Complex64::new(0.0, -0.5),
        _ => return Ok(zero),
    };
    Ok(factor * g.exponential_moment(nu)?)
}

/// Both sides of a trace formula, term by term.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceFormulaReport {
    #[serde(with = "crate::serde_complex")]
    pub spectral_side: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub geometric_side: Complex64,
    /// Contribution of the identity element (part of the geometric side).
    #[serde(with = "crate::serde_complex")]
    pub identity_term: Complex64,
    /// Contribution of the trivial representation (part of the spectral side).
    #[serde(with = "crate::serde_complex")]
    pub trivial_rep_term: Complex64,
    /// The hyperbolic/loxodromic sum on the geometric side.
    #[serde(with = "crate::serde_complex")]
    pub geodesic_term: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub residual: Complex64,
    pub geodesic_sum_complete: bool,
    pub truncation_note: String,
}

impl TraceFormulaReport {
    fn assemble(
        spectral_side: Complex64,
        identity_term: Complex64,
        trivial_rep_term: Complex64,
        geodesic_term: Complex64,
        geodesic_sum_complete: bool,
        spectral_len: usize,
        reach: f64,
        table: &SpectrumTable,
    ) -> Self {
        let geometric_side = identity_term + geodesic_term;
        let coverage = if geodesic_sum_complete {
            format!("geodesic sum complete (support {reach} within horizon {})", table.horizon())
        } else if !table.complete() {
            format!(
                "geodesic sum incomplete: table not marked complete (support {reach}, horizon {})",
                table.horizon()
            )
        } else {
            format!(
                "geodesic sum incomplete: support {reach} exceeds horizon {}",
                table.horizon()
            )
        };
        let truncation_note = format!(
            "spectral side uses {spectral_len} supplied entries, any truncation is the caller's; {coverage}"
        );
        Self {
            spectral_side,
            geometric_side,
            identity_term,
            trivial_rep_term,
            geodesic_term,
            residual: spectral_side - geometric_side,
            geodesic_sum_complete,
            truncation_note,
        }
    }
}

/// Grouping of the spectral side of the even formula.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EvenGrouping {
    /// Multiplicities of π_{ν,±n} against ∫g e^{uν}, plus the trivial
    /// representation term.
    #[default]
    Standard,
    /// For n = 0 the trivial and complementary terms are folded into
    /// ∫g dϖ*, leaving only principal series in the multiplicity sum.
    Measure,
}

/// Even trace formula for g(u)cos(nθ), standard grouping.
pub fn even_tf_sides(
    g: &CutoffDescriptor,
    n: i64,
    spectral: &[SpectralDatum],
    table: &SpectrumTable,
    mc: &ManifoldConstants,
) -> Result<TraceFormulaReport> {
    even_tf_sides_grouped(g, n, spectral, table, mc, EvenGrouping::Standard)
}

pub fn even_tf_sides_grouped(
    g: &CutoffDescriptor,
    n: i64,
    spectral: &[SpectralDatum],
    table: &SpectrumTable,
    mc: &ManifoldConstants,
    grouping: EvenGrouping,
) -> Result<TraceFormulaReport> {
    line_kind(g)?;
    if g.parity() == Parity::Odd {
        return Err(Error::OddKind(g.kind.name()));
    }
    for d in spectral {
        d.check()?;
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let trivial_rep_term = match n {
        0 => g.exponential_moment(one)?,
        1 | -1 => -0.5 * g.fourier(zero)?,
        _ => zero,
    };

    let mut acc = ComplexNeumaier::new();
    match grouping {
        EvenGrouping::Standard => {
            acc.add(trivial_rep_term);
            for d in spectral {
                let hits = u32::from(d.p == n) + u32::from(d.p == -n);
                if hits > 0 {
                    let w = 0.5 * f64::from(hits) * d.multiplicity as f64;
                    acc.add(w * g.exponential_moment(d.nu)?);
                }
            }
        }
        EvenGrouping::Measure => {
            if n == 0 {
                acc.add(g.exponential_moment(one)?);
                for d in spectral.iter().filter(|d| d.is_complementary()) {
                    acc.add(d.multiplicity as f64 * g.exponential_moment(d.nu)?);
                }
            }
            for d in spectral.iter().filter(|d| !d.is_complementary()) {
                let hits = u32::from(d.p == n) + u32::from(d.p == -n);
                if hits > 0 {
                    let w = 0.5 * f64::from(hits) * d.multiplicity as f64;
                    acc.add(w * g.exponential_moment(d.nu)?);
                }
            }
            if n == 1 || n == -1 {
                acc.add(-0.5 * g.fourier(zero)?);
            }
        }
    }
    let spectral_side = acc.total();

    let n2 = (n * n) as f64;
    let identity_term =
        Complex64::new(mc.volume / TAU * (n2 * g.eval(0.0)? - g.second_derivative(0.0)?), 0.0);
    let geo = weighted_sum(table, &SumSpec::t_cos(n, g.clone()))?;
    let reach = g.support_radius()?.unwrap_or(f64::INFINITY);
    Ok(TraceFormulaReport::assemble(
        spectral_side,
        identity_term,
        trivial_rep_term,
        geo.value,
        geo.complete,
        spectral.len(),
        reach,
        table,
    ))
}

/// Odd trace formula for h(u)sin(nθ).
pub fn odd_tf_sides(
    h: &CutoffDescriptor,
    n: i64,
    spectral: &[SpectralDatum],
    table: &SpectrumTable,
    _mc: &ManifoldConstants,
) -> Result<TraceFormulaReport> {
    line_kind(h)?;
    if h.parity() == Parity::Even {
        return Err(Error::EvenKind(h.kind.name()));
    }
    let mut acc = ComplexNeumaier::new();
    for d in spectral {
        d.check()?;
        let sign = i32::from(d.p == n) - i32::from(d.p == -n);
        if sign != 0 {
            let w = 0.5 * f64::from(sign) * d.multiplicity as f64;
            acc.add(Complex64::new(0.0, w) * h.exponential_moment(d.nu)?);
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let geo = weighted_sum(table, &SumSpec::t_sin(n, h.clone()))?;
    let reach = h.support_radius()?.unwrap_or(f64::INFINITY);
    Ok(TraceFormulaReport::assemble(
        acc.total(),
        zero,
        zero,
        geo.value,
        geo.complete,
        spectral.len(),
        reach,
        table,
    ))
}

/// Spectral multiplicity in a unit-radius window around R, next to the
/// Plancherel prediction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WeylWindow {
    pub count: u64,
    pub plancherel_term: f64,
}

/// Σ m(π_{ν,n}) over R − 1 ≤ |ν| ≤ R + 1, and vol × Plancherel mass of
/// the same window.
pub fn weyl_window_report(spectral: &[SpectralDatum], r: f64, n: i64, mc: &ManifoldConstants) -> Result<WeylWindow> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::DomainError(format!("R must be >= 0, got {r}")));
    }
    let (lo, hi) = (r - 1.0, r + 1.0);
    let count = spectral
        .iter()
        .filter(|d| d.p == n)
        .filter(|d| {
            let a = d.nu.norm();
            a >= lo && a <= hi
        })
        .map(|d| d.multiplicity)
        .sum();
    Ok(WeylWindow {
        count,
        plancherel_term: mc.volume * plancherel_window(lo.max(0.0), hi, n)?,
    })
}
