//! Weighted sums over geodesic classes: the smooth and sharp T/S families,
//! holonomy character sums, ambient counts and boundary-zone sums.
//!
//! Every sum runs in table order through the deterministic chunked
//! reduction, so results do not depend on the thread count.

use crate::algebra::{circle_distance, weight, ComplexLength};
use crate::error::{Error, Result};
use crate::spectrum::{GeodesicClass, SpectrumTable};
use crate::summation::chunked_sum;
use crate::test_functions::{in_closed_arc, CutoffDescriptor, Parity};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Slack used in closed window tests.
pub const WINDOW_SLACK: f64 = 1e-12;

/// Per-class weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// ℓ(γ₀)·w(γ), the trace-formula weight.
    TraceWeight,
    /// ℓ(γ)·e^{−ℓ(γ)}.
    ExpWeight,
    /// 1.
    Unit,
}

/// Which classes enter the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassFilter {
    All,
    PrimitiveOnly,
}

/// Weight as a function of length.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthWindow {
    /// Indicator of the closed interval [lo, hi].
    Sharp { lo: f64, hi: f64 },
    /// A line test function evaluated at ℓ(γ).
    Smooth(CutoffDescriptor),
}

impl LengthWindow {
    /// The sharp window [0, y].
    pub fn up_to(y: f64) -> Self {
        LengthWindow::Sharp { lo: 0.0, hi: y }
    }

    fn check(&self) -> Result<()> {
        match self {
            LengthWindow::Sharp { lo, hi } => {
                if lo.is_nan() || hi.is_nan() || hi < lo {
                    return Err(Error::DomainError(format!("empty or invalid length window [{lo}, {hi}]")));
                }
                Ok(())
            }
            LengthWindow::Smooth(d) => {
                d.validate()?;
                if d.parity() == Parity::Periodic {
                    return Err(Error::UnsupportedKind(d.kind.name()));
                }
                Ok(())
            }
        }
    }

    /// Largest length at which the window can be nonzero.
    pub fn reach(&self) -> Result<f64> {
        match self {
            LengthWindow::Sharp { hi, .. } => Ok(*hi),
            LengthWindow::Smooth(d) => Ok(d.support_radius()?.unwrap_or(f64::INFINITY)),
        }
    }

    fn value(&self, length: f64) -> Result<f64> {
        match self {
            LengthWindow::Sharp { lo, hi } => Ok(if length >= *lo && length <= *hi { 1.0 } else { 0.0 }),
            LengthWindow::Smooth(d) => d.eval(length),
        }
    }
}

/// Weight as a function of holonomy.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolonomyWeight {
    /// 1.
    One,
    /// cos(nθ).
    Cos(i64),
    /// sin(nθ).
    Sin(i64),
    /// e^{inθ}.
    Character(i64),
    /// A periodic test function evaluated at θ.
    Smooth(CutoffDescriptor),
    /// Indicator of the closed arc from `lo` to `hi` (may wrap).
    Indicator { lo: f64, hi: f64 },
}

impl HolonomyWeight {
    fn check(&self) -> Result<()> {
        match self {
            HolonomyWeight::Smooth(d) => {
                d.validate()?;
                if d.parity() != Parity::Periodic {
                    return Err(Error::UnsupportedKind(d.kind.name()));
                }
                Ok(())
            }
            HolonomyWeight::Indicator { lo, hi } => {
                if lo.is_finite() && hi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::DomainError("holonomy interval must be finite".into()))
                }
            }
            _ => Ok(()),
        }
    }

    fn value(&self, theta: f64) -> Result<Complex64> {
        Ok(match self {
            HolonomyWeight::One => Complex64::new(1.0, 0.0),
            HolonomyWeight::Cos(n) => Complex64::new((*n as f64 * theta).cos(), 0.0),
            HolonomyWeight::Sin(n) => Complex64::new((*n as f64 * theta).sin(), 0.0),
            HolonomyWeight::Character(n) => Complex64::from_polar(1.0, *n as f64 * theta),
            HolonomyWeight::Smooth(d) => Complex64::new(d.eval(theta)?, 0.0),
            HolonomyWeight::Indicator { lo, hi } => {
                let (lo, hi) = arc_bounds(*lo, *hi);
                Complex64::new(if in_closed_arc(theta, lo, hi) { 1.0 } else { 0.0 }, 0.0)
            }
        })
    }
}

/// Normalizes an arc: `hi < lo` means the arc wraps through π.
fn arc_bounds(lo: f64, hi: f64) -> (f64, f64) {
    if hi < lo {
        (lo, hi + TAU)
    } else {
        (lo, hi)
    }
}

/// Full description of a geometric sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumSpec {
    pub weight_mode: WeightMode,
    pub class_filter: ClassFilter,
    pub length_window: LengthWindow,
    pub holonomy_weight: HolonomyWeight,
}

impl SumSpec {
    /// T^cos_n[g] = Σ ℓ(γ₀)w(γ)g(ℓ(γ))cos(n·hol γ).
    pub fn t_cos(n: i64, g: CutoffDescriptor) -> Self {
        Self {
            weight_mode: WeightMode::TraceWeight,
            class_filter: ClassFilter::All,
            length_window: LengthWindow::Smooth(g),
            holonomy_weight: HolonomyWeight::Cos(n),
        }
    }

    /// T^sin_n[h] = Σ ℓ(γ₀)w(γ)h(ℓ(γ))sin(n·hol γ).
    pub fn t_sin(n: i64, h: CutoffDescriptor) -> Self {
        Self {
            weight_mode: WeightMode::TraceWeight,
            class_filter: ClassFilter::All,
            length_window: LengthWindow::Smooth(h),
            holonomy_weight: HolonomyWeight::Sin(n),
        }
    }

    /// Sharp sums over ℓ(γ) ≤ y with e^{inθ} weights: `T_n(y)` for the trace
    /// weight, `S_n(y)` for the exponential weight; `P` variants with
    /// `ClassFilter::PrimitiveOnly`.
    pub fn sharp(weight_mode: WeightMode, class_filter: ClassFilter, n: i64, y: f64) -> Self {
        Self {
            weight_mode,
            class_filter,
            length_window: LengthWindow::up_to(y),
            holonomy_weight: HolonomyWeight::Character(n),
        }
    }

    pub fn check(&self) -> Result<()> {
        self.length_window.check()?;
        self.holonomy_weight.check()
    }
}

/// A sum together with whether the table covers everything it depends on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SumResult<T = Complex64> {
    pub value: T,
    pub complete: bool,
}

fn mode_factor(mode: WeightMode, c: &GeodesicClass) -> Result<f64> {
    Ok(match mode {
        WeightMode::TraceWeight => c.root_length * weight(ComplexLength::new(c.length, c.holonomy))?,
        WeightMode::ExpWeight => c.length * (-c.length).exp(),
        WeightMode::Unit => 1.0,
    })
}

fn coverage(table: &SpectrumTable, reach: f64) -> bool {
    table.complete() && reach <= table.horizon()
}

/// Σ over filtered classes of multiplicity × weight × window(ℓ) × holonomy factor(θ).
pub fn weighted_sum(table: &SpectrumTable, spec: &SumSpec) -> Result<SumResult> {
    weighted_sum_with(table, spec, false)
}

/// As [`weighted_sum`]; `parallel` evaluates chunks on the rayon pool with a
/// bit-identical result.
pub fn weighted_sum_with(table: &SpectrumTable, spec: &SumSpec, parallel: bool) -> Result<SumResult> {
    spec.check()?;
    let classes = table.classes();
    let term = |c: &GeodesicClass| -> Result<Complex64> {
        if spec.class_filter == ClassFilter::PrimitiveOnly && !c.primitive {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let window = spec.length_window.value(c.length)?;
        if window == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let factor = mode_factor(spec.weight_mode, c)? * window * c.multiplicity as f64;
        Ok(spec.holonomy_weight.value(c.holonomy)? * factor)
    };
    let terms: Vec<Complex64> = if parallel {
        classes.par_iter().map(term).collect::<Result<_>>()?
    } else {
        classes.iter().map(term).collect::<Result<_>>()?
    };
    let value = chunked_sum(terms.len(), parallel, |i| terms[i]);
    Ok(SumResult {
        value,
        complete: coverage(table, spec.length_window.reach()?),
    })
}

/// K_n = Σ over primitive classes in the window of e^{inθ}.
pub fn char_sum(table: &SpectrumTable, n: i64, window: LengthWindow) -> Result<SumResult> {
    weighted_sum(
        table,
        &SumSpec {
            weight_mode: WeightMode::Unit,
            class_filter: ClassFilter::PrimitiveOnly,
            length_window: window,
            holonomy_weight: HolonomyWeight::Character(n),
        },
    )
}

/// Number of primitive classes (with multiplicity) with length in the closed
/// interval `lengths` and holonomy in the closed arc `holonomies` (which may
/// wrap, e.g. (3.0, −3.0)).
pub fn ambient_count(
    table: &SpectrumTable,
    lengths: (f64, f64),
    holonomies: (f64, f64),
) -> Result<SumResult<u64>> {
    let (l_lo, l_hi) = lengths;
    if l_lo.is_nan() || l_hi.is_nan() || l_hi < l_lo {
        return Err(Error::DomainError(format!("invalid length interval [{l_lo}, {l_hi}]")));
    }
    if !(holonomies.0.is_finite() && holonomies.1.is_finite()) {
        return Err(Error::DomainError("holonomy interval must be finite".into()));
    }
    let (h_lo, h_hi) = arc_bounds(holonomies.0, holonomies.1);
    let count = table
        .classes()
        .iter()
        .filter(|c| c.primitive && c.length >= l_lo && c.length <= l_hi)
        .filter(|c| in_closed_arc(c.holonomy, h_lo, h_hi))
        .map(|c| c.multiplicity)
        .sum();
    Ok(SumResult {
        value: count,
        complete: coverage(table, l_hi),
    })
}

/// Σ ℓ(γ₀)w(γ) over all classes with y − η ≤ ℓ(γ) ≤ y + η.
pub fn boundary_length_sum(table: &SpectrumTable, y: f64, eta: f64) -> Result<SumResult<f64>> {
    if !(eta > 0.0) {
        return Err(Error::DomainError(format!("eta must be positive, got {eta}")));
    }
    let r = weighted_sum(
        table,
        &SumSpec {
            weight_mode: WeightMode::TraceWeight,
            class_filter: ClassFilter::All,
            length_window: LengthWindow::Sharp { lo: y - eta, hi: y + eta },
            holonomy_weight: HolonomyWeight::One,
        },
    )?;
    Ok(SumResult {
        value: r.value.re,
        complete: r.complete,
    })
}

/// Σ ℓ(γ₀)w(γ) over classes with ℓ(γ) ≤ y and holonomy within η′ of ±θ₀ on
/// the circle (each class counted once).
pub fn boundary_holonomy_sum(
    table: &SpectrumTable,
    y: f64,
    theta0: f64,
    etaprime: f64,
) -> Result<SumResult<f64>> {
    if !(etaprime > 0.0 && etaprime <= TAU) {
        return Err(Error::DomainError(format!("etaprime must lie in (0, 2π], got {etaprime}")));
    }
    let classes = table.classes();
    let inside = |c: &GeodesicClass| {
        c.length <= y
            && (circle_distance(c.holonomy, theta0) <= etaprime + WINDOW_SLACK
                || circle_distance(c.holonomy, -theta0) <= etaprime + WINDOW_SLACK)
    };
    for c in classes.iter().filter(|c| inside(c)) {
        mode_factor(WeightMode::TraceWeight, c)?;
    }
    let value = chunked_sum(classes.len(), false, |i| {
        let c = &classes[i];
        if inside(c) {
            let f = mode_factor(WeightMode::TraceWeight, c).unwrap_or(0.0);
            Complex64::new(f * c.multiplicity as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SumResult {
        value: value.re,
        complete: coverage(table, y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn synthetic() -> SpectrumTable {
        SpectrumTable::new(
            vec![GeodesicClass::primitive(1.0, PI / 2.0), GeodesicClass::power(1.0, PI / 2.0, 2)],
            2.5,
            true,
            None,
        )
        .unwrap()
    }

    #[test]
    fn empty_table_sums_vanish() {
        let t = SpectrumTable::empty(3.0);
        let s = weighted_sum(&t, &SumSpec::sharp(WeightMode::TraceWeight, ClassFilter::All, 2, 3.0)).unwrap();
        assert_eq!(s.value, Complex64::new(0.0, 0.0));
        assert!(s.complete);
    }

    #[test]
    fn synthetic_examples() {
        let t = synthetic();
        let s = weighted_sum(&t, &SumSpec::sharp(WeightMode::TraceWeight, ClassFilter::All, 1, 2.5)).unwrap();
        // −w(2, π) + i·w(1, π/2)
        assert!((s.value - Complex64::new(-0.104_993_585_403_507, 0.324_027_136_831_943)).norm() < 1e-14);
        let s = weighted_sum(&t, &SumSpec::sharp(WeightMode::ExpWeight, ClassFilter::PrimitiveOnly, 1, 2.5)).unwrap();
        assert!((s.value - Complex64::new(0.0, (-1.0f64).exp())).norm() < 1e-15);

        let k1 = char_sum(&t, 1, LengthWindow::up_to(2.5)).unwrap();
        assert!((k1.value - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let k0 = char_sum(&t, 0, LengthWindow::up_to(2.5)).unwrap();
        assert_eq!(k0.value, Complex64::new(1.0, 0.0));
        let below = char_sum(&t, 3, LengthWindow::up_to(0.5)).unwrap();
        assert_eq!(below.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn counts_and_boundaries() {
        let t = SpectrumTable::cyclic(1.0, PI / 2.0, 3.5).unwrap();
        let c = ambient_count(&t, (0.5, 2.5), (PI / 4.0, 3.0 * PI / 4.0)).unwrap();
        assert_eq!(c.value, 1);
        let c = ambient_count(&t, (0.0, 3.5), (-PI, PI)).unwrap();
        assert_eq!(c.value, t.primitive_count());
        let c = ambient_count(&t, (1.5, 1.6), (-PI, PI)).unwrap();
        assert_eq!(c.value, 0);

        let t = synthetic();
        let b = boundary_length_sum(&t, 1.0, 0.1).unwrap();
        assert!((b.value - 0.324_027_136_831_943).abs() < 1e-14);
        assert_eq!(boundary_length_sum(&t, 5.0, 0.1).unwrap().value, 0.0);
        let h = boundary_holonomy_sum(&t, 2.5, PI / 2.0, 0.1).unwrap();
        assert!((h.value - 0.324_027_136_831_943).abs() < 1e-14);
        let all = boundary_holonomy_sum(&t, 2.5, 0.3, TAU).unwrap();
        let whole = boundary_length_sum(&t, 1.25, 1.25).unwrap();
        assert!((all.value - whole.value).abs() < 1e-15);
    }

    #[test]
    fn wrapping_indicator() {
        let t = SpectrumTable::new(
            vec![GeodesicClass::primitive(1.0, PI), GeodesicClass::primitive(1.5, -3.0), GeodesicClass::primitive(2.0, 0.0)],
            3.0,
            true,
            None,
        )
        .unwrap();
        let c = ambient_count(&t, (0.0, 3.0), (3.0, -3.0)).unwrap();
        assert_eq!(c.value, 2);
    }

    #[test]
    fn completeness_flag() {
        let t = synthetic();
        let g = CutoffDescriptor::g_y_eta(2.4, 0.5).unwrap();
        let s = weighted_sum(&t, &SumSpec::t_cos(1, g)).unwrap();
        assert!(!s.complete);
        let g = CutoffDescriptor::g_y_eta(1.5, 0.5).unwrap();
        assert!(weighted_sum(&t, &SumSpec::t_cos(1, g)).unwrap().complete);
    }

    #[test]
    fn periodic_window_rejected() {
        let t = synthetic();
        let f = CutoffDescriptor::f_i_etaprime(0.0, 1.0, 0.1).unwrap();
        assert!(matches!(weighted_sum(&t, &SumSpec::t_cos(1, f)), Err(Error::UnsupportedKind(_))));
    }
}
