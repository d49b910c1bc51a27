//! Desk-scale trend reports: prime geodesic counts against the main term,
//! holonomy equidistribution, character-sum cancellation and the gaps
//! between primitive/full and exponential/trace-weighted sums.
//!
//! Verdicts come from fixed least-squares rules and are not rigorous.

use crate::error::{Error, Result};
use crate::measures::{ei_main_term, SpectralDatum};
use crate::spectrum::SpectrumTable;
use crate::sums::{char_sum, weighted_sum, ClassFilter, LengthWindow, SumSpec, WeightMode};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::f64::consts::TAU;

/// Slope threshold for the trend rules.
pub const SLOPE_THRESHOLD: f64 = 0.1;

/// Below this many primitive classes the count comparison is not informative.
pub const MIN_PGT_SAMPLE: f64 = 100.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Inconclusive,
    Violated,
}

impl Verdict {
    /// Violated dominates, then inconclusive.
    fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Consistent,
        }
    }
}

/// A table of observations over a grid with fitted constants and a verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub name: String,
    pub inputs: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fitted: BTreeMap<String, f64>,
    pub verdict: Verdict,
    pub rule: String,
    pub caveats: Vec<String>,
}

impl DiagnosticReport {
    /// Per-grid rows as CSV, floats with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Values of one column.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// Least-squares slope of ys against xs; 0 for fewer than two points.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..n {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Consistent if the slope over the upper half of the grid is at most
/// `threshold`; inconclusive with fewer than three points there.
fn trend_verdict(xs: &[f64], ys: &[f64], threshold: f64) -> Verdict {
    let start = xs.len() / 2;
    if xs.len() - start < 3 {
        return Verdict::Inconclusive;
    }
    if ls_slope(&xs[start..], &ys[start..]) <= threshold {
        Verdict::Consistent
    } else {
        Verdict::Violated
    }
}

fn sorted_grid(table: &SpectrumTable, y_grid: &[f64], min_y: f64) -> Result<Vec<f64>> {
    if y_grid.is_empty() {
        return Err(Error::DomainError("grid is empty".into()));
    }
    let mut grid = y_grid.to_vec();
    for &y in &grid {
        if !(y.is_finite() && y >= min_y) {
            return Err(Error::DomainError(format!("grid point {y} must be finite and >= {min_y}")));
        }
        if y > table.horizon() {
            return Err(Error::IncompleteSpectrum {
                needed: y,
                horizon: table.horizon(),
            });
        }
    }
    grid.sort_by(f64::total_cmp);
    Ok(grid)
}

fn base_caveats(table: &SpectrumTable) -> Vec<String> {
    let mut c = vec!["verdict rules are heuristic; desk-scale data cannot confirm asymptotic exponents".to_string()];
    if !table.complete() {
        c.push("spectrum table is not marked complete".to_string());
    }
    c
}

/// Prime geodesic counts K₀(y) against ∫₂^y dϖ_Γ.
///
/// Columns: y, count, main, gap, normalized = gap·y·e^{−5y/3}.
pub fn pgt_report(table: &SpectrumTable, comp: &[SpectralDatum], y_grid: &[f64]) -> Result<DiagnosticReport> {
    let grid = sorted_grid(table, y_grid, 2.0)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &y in &grid {
        let count = char_sum(table, 0, LengthWindow::up_to(y))?.value.re;
        let main = ei_main_term(2.0, y, comp)?;
        let gap = count - main;
        rows.push(vec![y, count, main, gap, gap * y * (-5.0 * y / 3.0).exp()]);
    }
    let abs_norm: Vec<f64> = rows.iter().map(|r| r[4].abs()).collect();
    let top_count = rows.last().map_or(0.0, |r| r[1]);
    let mut caveats = base_caveats(table);
    let verdict = if top_count < MIN_PGT_SAMPLE {
        caveats.push(format!(
            "only {top_count} primitive classes up to the top of the grid (need {MIN_PGT_SAMPLE})"
        ));
        Verdict::Inconclusive
    } else {
        trend_verdict(&grid, &abs_norm, SLOPE_THRESHOLD)
    };
    let mut fitted = BTreeMap::new();
    fitted.insert("max_abs_normalized".to_string(), abs_norm.iter().cloned().fold(0.0, f64::max));
    fitted.insert(
        "upper_half_slope".to_string(),
        ls_slope(&grid[grid.len() / 2..], &abs_norm[grid.len() / 2..]),
    );
    let comp_echo: Vec<(f64, u64)> = comp
        .iter()
        .filter(|d| d.is_complementary())
        .map(|d| (d.nu.re, d.multiplicity))
        .collect();
    Ok(DiagnosticReport {
        name: "pgt".into(),
        inputs: json!({ "y_grid": grid, "complementary": comp_echo, "classes": table.len() }),
        columns: ["y", "count", "main", "gap", "normalized"].map(String::from).to_vec(),
        rows,
        fitted,
        verdict,
        rule: format!(
            "inconclusive below {MIN_PGT_SAMPLE} primitive classes or with fewer than 3 points in the upper half of the grid; \
             otherwise consistent iff the least-squares slope of |normalized| there is <= {SLOPE_THRESHOLD}"
        ),
        caveats,
    })
}

/// Sup over arcs with endpoints in the sample holonomies and a uniform grid of
/// |fraction of primitive classes with ℓ ≤ y in the arc − arc length/2π|.
///
/// Both closed and open arcs are considered; classes count with multiplicity.
pub fn equidist_discrepancy(table: &SpectrumTable, y: f64, grid_size: usize) -> Result<f64> {
    if grid_size < 8 {
        return Err(Error::DomainError(format!("grid_size must be at least 8, got {grid_size}")));
    }
    let to_circle = |t: f64| if t < 0.0 { t + TAU } else { t };
    let mut points: Vec<(f64, f64)> = table
        .classes()
        .iter()
        .filter(|c| c.primitive && c.length <= y)
        .map(|c| (to_circle(c.holonomy), c.multiplicity as f64))
        .collect();
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cum = Vec::with_capacity(points.len() + 1);
    cum.push(0.0);
    for p in &points {
        cum.push(cum.last().unwrap() + p.1);
    }
    let total = *cum.last().unwrap();

    let mut cands: Vec<f64> = points.iter().map(|p| p.0).collect();
    cands.extend((0..grid_size).map(|k| TAU * k as f64 / grid_size as f64));
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    // Mass at or below (le) and strictly below (lt) each candidate.
    let le: Vec<f64> = cands.iter().map(|&c| cum[points.partition_point(|p| p.0 <= c)]).collect();
    let lt: Vec<f64> = cands.iter().map(|&c| cum[points.partition_point(|p| p.0 < c)]).collect();

    let mut sup: f64 = 0.0;
    for i in 0..cands.len() {
        for j in 0..cands.len() {
            let (a, b) = (cands[i], cands[j]);
            let (closed, open, closed_len, open_len) = if a <= b {
                let closed = le[j] - lt[i];
                let len = b - a;
                if i == j {
                    (closed, total - le[i] + lt[i], 0.0, TAU)
                } else {
                    (closed, lt[j] - le[i], len, len)
                }
            } else {
                let len = TAU - (a - b);
                (total - lt[i] + le[j], total - le[i] + lt[j], len, len)
            };
            sup = sup
                .max((closed / total - closed_len / TAU).abs())
                .max((open / total - open_len / TAU).abs());
        }
    }
    Ok(sup)
}

/// |K_n(y)| against the envelope e^{5y/3}/y + n²e^y.
///
/// Columns: n, y, abs_k, re_k, im_k, envelope, ratio.
pub fn charsum_cancellation_report(table: &SpectrumTable, n_list: &[i64], y_grid: &[f64]) -> Result<DiagnosticReport> {
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::DomainError("n_list must be non-empty and exclude 0".into()));
    }
    let grid = sorted_grid(table, y_grid, f64::MIN_POSITIVE)?;
    let mut rows = Vec::new();
    let mut verdict = Verdict::Consistent;
    let mut max_ratio: f64 = 0.0;
    for &n in n_list {
        let mut ratios = Vec::with_capacity(grid.len());
        for &y in &grid {
            let k = char_sum(table, n, LengthWindow::up_to(y))?.value;
            let n2 = (n * n) as f64;
            let envelope = (5.0 * y / 3.0).exp() / y + n2 * y.exp();
            let ratio = k.norm() / envelope;
            ratios.push(ratio);
            max_ratio = max_ratio.max(ratio);
            rows.push(vec![n as f64, y, k.norm(), k.re, k.im, envelope, ratio]);
        }
        let scale = ratios.iter().cloned().fold(0.0, f64::max);
        let v = if scale == 0.0 {
            Verdict::Inconclusive
        } else {
            trend_verdict(&grid, &ratios, SLOPE_THRESHOLD * scale)
        };
        verdict = verdict.combine(v);
    }
    let mut fitted = BTreeMap::new();
    fitted.insert("max_ratio".to_string(), max_ratio);
    Ok(DiagnosticReport {
        name: "charsum".into(),
        inputs: json!({ "n_list": n_list, "y_grid": grid, "classes": table.len() }),
        columns: ["n", "y", "abs_k", "re_k", "im_k", "envelope", "ratio"].map(String::from).to_vec(),
        rows,
        fitted,
        verdict,
        rule: format!(
            "per n: inconclusive if all ratios vanish or fewer than 3 points in the upper half of the grid; \
             consistent iff the least-squares slope of the ratio there is <= {SLOPE_THRESHOLD} x its maximum"
        ),
        caveats: base_caveats(table),
    })
}

/// Gaps |S_n − S_n^P|, |S_n^P − T_n^P|, |T_n^P − T_n| over ℓ ≤ y, raw and
/// divided by y.
pub fn primitivity_gap_report(table: &SpectrumTable, n_list: &[i64], y_grid: &[f64]) -> Result<DiagnosticReport> {
    if n_list.is_empty() {
        return Err(Error::DomainError("n_list must be non-empty".into()));
    }
    let grid = sorted_grid(table, y_grid, f64::MIN_POSITIVE)?;
    let mut rows = Vec::new();
    let mut verdict = Verdict::Consistent;
    let mut sups = [0.0f64; 3];
    for &n in n_list {
        let mut scaled: [Vec<f64>; 3] = Default::default();
        for &y in &grid {
            let sum = |mode, filter| -> Result<_> {
                Ok(weighted_sum(table, &SumSpec::sharp(mode, filter, n, y))?.value)
            };
            let s = sum(WeightMode::ExpWeight, ClassFilter::All)?;
            let sp = sum(WeightMode::ExpWeight, ClassFilter::PrimitiveOnly)?;
            let t = sum(WeightMode::TraceWeight, ClassFilter::All)?;
            let tp = sum(WeightMode::TraceWeight, ClassFilter::PrimitiveOnly)?;
            let gaps = [(s - sp).norm(), (sp - tp).norm(), (tp - t).norm()];
            let mut row = vec![n as f64, y];
            row.extend_from_slice(&gaps);
            for (i, g) in gaps.iter().enumerate() {
                let v = g / y;
                scaled[i].push(v);
                sups[i] = sups[i].max(v);
                row.push(v);
            }
            rows.push(row);
        }
        for col in &scaled {
            let scale = col.iter().cloned().fold(0.0, f64::max);
            let v = if scale == 0.0 {
                Verdict::Consistent
            } else {
                trend_verdict(&grid, col, SLOPE_THRESHOLD * scale)
            };
            verdict = verdict.combine(v);
        }
    }
    let mut fitted = BTreeMap::new();
    fitted.insert("sup_s_primitive_over_y".to_string(), sups[0]);
    fitted.insert("sup_exp_trace_over_y".to_string(), sups[1]);
    fitted.insert("sup_t_primitive_over_y".to_string(), sups[2]);
    Ok(DiagnosticReport {
        name: "primitivity_gap".into(),
        inputs: json!({ "n_list": n_list, "y_grid": grid, "classes": table.len() }),
        columns: [
            "n",
            "y",
            "s_minus_sp",
            "sp_minus_tp",
            "tp_minus_t",
            "s_minus_sp_over_y",
            "sp_minus_tp_over_y",
            "tp_minus_t_over_y",
        ]
        .map(String::from)
        .to_vec(),
        rows,
        fitted,
        verdict,
        rule: format!(
            "per n and gap: identically zero is consistent; otherwise inconclusive with fewer than 3 points in the upper \
             half of the grid, consistent iff the least-squares slope of gap/y there is <= {SLOPE_THRESHOLD} x its maximum"
        ),
        caveats: base_caveats(table),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::GeodesicClass;
    use std::f64::consts::PI;

    fn primitive_table(holonomies: &[f64], horizon: f64) -> SpectrumTable {
        let classes = holonomies
            .iter()
            .enumerate()
            .map(|(i, &h)| GeodesicClass::primitive(1.0 + 1e-3 * i as f64, h))
            .collect();
        SpectrumTable::new(classes, horizon, true, None).unwrap()
    }

    fn golden(n: usize) -> Vec<f64> {
        let step = TAU * (1.0 - 2.0 / (1.0 + 5f64.sqrt()));
        (1..=n).map(|k| crate::algebra::reduce_angle(k as f64 * step)).collect()
    }

    /// Brute force over many arcs, both closed and open.
    fn brute(points: &[f64], grid: usize) -> f64 {
        let to_circle = |t: f64| if t < 0.0 { t + TAU } else { t };
        let pts: Vec<f64> = points.iter().map(|&t| to_circle(t)).collect();
        let mut cands: Vec<f64> = pts.clone();
        cands.extend((0..grid).map(|k| TAU * k as f64 / grid as f64));
        let n = pts.len() as f64;
        let mut sup: f64 = 0.0;
        for &a in &cands {
            for &b in &cands {
                let len = if b >= a { b - a } else { TAU - (a - b) };
                let inside = |p: f64, open: bool| {
                    let d = if p >= a { p - a } else { p + TAU - a };
                    if open {
                        d > 0.0 && d < len
                    } else {
                        d <= len
                    }
                };
                let closed = pts.iter().filter(|&&p| inside(p, false)).count() as f64;
                let open = pts.iter().filter(|&&p| inside(p, true)).count() as f64;
                sup = sup.max((closed / n - len / TAU).abs()).max((open / n - len / TAU).abs());
                if a == b {
                    let all_but = n - pts.iter().filter(|&&p| p == a).count() as f64;
                    sup = sup.max((all_but / n - 1.0).abs());
                }
            }
        }
        sup
    }

    #[test]
    fn four_points() {
        let t = primitive_table(&[0.0, PI / 2.0, PI, -PI / 2.0], 5.0);
        let d = equidist_discrepancy(&t, 5.0, 8).unwrap();
        assert!((d - 0.25).abs() < 1e-12, "{d}");
    }

    #[test]
    fn single_atom() {
        let t = primitive_table(&[0.3], 5.0);
        let d = equidist_discrepancy(&t, 5.0, 16).unwrap();
        assert!(d >= 1.0 - 1.0 / 16.0 && d <= 1.0);
        assert!(matches!(equidist_discrepancy(&t, 0.5, 16), Err(Error::EmptySample)));
        assert!(equidist_discrepancy(&t, 5.0, 4).is_err());
    }

    #[test]
    fn matches_brute_force() {
        for n in [5usize, 17, 40] {
            let h = golden(n);
            let t = primitive_table(&h, 5.0);
            let fast = equidist_discrepancy(&t, 5.0, 12).unwrap();
            assert!((fast - brute(&h, 12)).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_angle_decay() {
        let t = primitive_table(&golden(1000), 5.0);
        let big = equidist_discrepancy(&t, 5.0, 64).unwrap();
        let small = equidist_discrepancy(&t, 1.0 + 99e-3, 64).unwrap();
        assert!(big <= 0.05, "{big}");
        assert!(small >= 2.0 * big, "{small} {big}");
    }

    #[test]
    fn rotation_invariance() {
        let h = golden(50);
        let shift = TAU * 3.0 / 16.0;
        let rotated: Vec<f64> = h.iter().map(|&t| crate::algebra::reduce_angle(t + shift)).collect();
        let a = equidist_discrepancy(&primitive_table(&h, 5.0), 5.0, 16).unwrap();
        let b = equidist_discrepancy(&primitive_table(&rotated, 5.0), 5.0, 16).unwrap();
        assert!((a - b).abs() <= 1.0 / 16.0);
    }

    #[test]
    fn pgt_rows() {
        let t = SpectrumTable::cyclic(3.0, 0.5, 12.0).unwrap();
        let r = pgt_report(&t, &[], &[2.5, 4.0, 6.0, 8.0, 10.0, 12.0]).unwrap();
        let first = &r.rows[0];
        assert_eq!(first[1], 0.0);
        assert_eq!(first[3], -first[2]);
        assert!((first[2] - ei_main_term(2.0, 2.5, &[]).unwrap()).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        for row in &r.rows {
            assert_eq!(row[4], (row[1] - row[2]) * row[0] * (-5.0 * row[0] / 3.0).exp());
        }
        assert!(matches!(pgt_report(&t, &[], &[13.0]), Err(Error::IncompleteSpectrum { .. })));
        assert!(pgt_report(&t, &[], &[1.0]).is_err());
    }

    #[test]
    fn pgt_additive() {
        let t = primitive_table(&golden(300), 5.0);
        let r = pgt_report(&t, &[], &[2.0, 3.0, 4.0]).unwrap();
        let gaps = r.column("gap").unwrap();
        let window = char_sum(&t, 0, LengthWindow::Sharp { lo: 3.0 + 1e-9, hi: 4.0 })
            .unwrap()
            .value
            .re;
        let main = ei_main_term(3.0, 4.0, &[]).unwrap();
        assert!((gaps[2] - (gaps[1] + window - main)).abs() < 1e-9 * gaps[2].abs());
    }

    #[test]
    fn charsum_symmetry_and_small_y() {
        let t = primitive_table(&golden(200), 3.0);
        let a = charsum_cancellation_report(&t, &[3], &[0.5, 1.1, 1.2]).unwrap();
        let b = charsum_cancellation_report(&t, &[-3], &[0.5, 1.1, 1.2]).unwrap();
        assert_eq!(a.rows[0][6], 0.0);
        assert_eq!(a.column("ratio"), b.column("ratio"));
        assert_eq!(a.rows[1][4], -b.rows[1][4]);
        assert!(charsum_cancellation_report(&t, &[0], &[1.0]).is_err());
        let k0 = char_sum(&t, 0, LengthWindow::up_to(1.2)).unwrap().value.re;
        assert!(a.rows[2][2] < 0.1 * k0);
    }

    #[test]
    fn gaps_for_primitive_and_cyclic_tables() {
        let t = primitive_table(&golden(30), 3.0);
        let r = primitivity_gap_report(&t, &[1, 2], &[1.0, 2.0, 3.0]).unwrap();
        for row in &r.rows {
            assert_eq!(row[2], 0.0);
            assert_eq!(row[4], 0.0);
        }
        let (l0, t0) = (0.8, 1.1);
        let c = SpectrumTable::cyclic(l0, t0, 10.0).unwrap();
        let grid: Vec<f64> = (1..=10).map(f64::from).collect();
        let r = primitivity_gap_report(&c, &[2], &grid).unwrap();
        for row in &r.rows {
            let y = row[1];
            let mut s = num_complex::Complex64::new(0.0, 0.0);
            for k in 2..=((y / l0 + 1e-12).floor() as u32) {
                let kf = f64::from(k);
                s += num_complex::Complex64::from_polar(kf * l0 * (-kf * l0).exp(), 2.0 * kf * t0);
            }
            assert!((row[2] - s.norm()).abs() <= 1e-12 * s.norm().max(1e-300));
        }
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn slope() {
        assert!((ls_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
        assert_eq!(ls_slope(&[1.0], &[1.0]), 0.0);
    }
}
