use holonomy_core::algebra::{circle_distance, complex_length, weight, ComplexLength, Mat2};
use holonomy_core::io::{spectrum_from_str, spectrum_to_string};
use holonomy_core::spectrum::{GeodesicClass, SpectrumTable};
use holonomy_core::sums::{weighted_sum_with, ClassFilter, SumSpec, WeightMode};
use holonomy_core::test_functions::CutoffDescriptor;
use holonomy_core::trace_formula::weyl_discriminant_root;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn table_from(rows: &[(f64, f64, u32, u32)]) -> SpectrumTable {
    let classes = rows
        .iter()
        .map(|&(l, t, k, m)| GeodesicClass::power(l, t, k).with_multiplicity(m.into()))
        .collect();
    SpectrumTable::new(classes, 40.0, true, None).unwrap()
}

fn rows() -> impl Strategy<Value = Vec<(f64, f64, u32, u32)>> {
    prop::collection::vec((0.2f64..10.0, -PI..PI, 1u32..4, 1u32..4), 0..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complex_length_is_a_conjugacy_invariant(
        l in 0.1f64..6.0,
        t in -PI..PI,
        b in (-1.0f64..1.0, -1.0f64..1.0),
        c in (-1.0f64..1.0, -1.0f64..1.0),
    ) {
        let a = Complex64::new(1.0, 0.0);
        let (b, c) = (Complex64::new(b.0, b.1), Complex64::new(c.0, c.1));
        let p = Mat2::new(a, b, c, a + b * c);
        let m = p * Mat2::from_complex_length(l, t) * p.inverse();
        let cl = complex_length(&m, 1e-9).unwrap();
        prop_assert!((cl.length - l).abs() < 1e-9);
        prop_assert!(circle_distance(cl.holonomy, t) < 1e-9);
    }

    #[test]
    fn weight_times_discriminant_root_is_one(l in 0.05f64..30.0, t in -PI..PI) {
        let cl = ComplexLength::new(l, t);
        prop_assert!((weight(cl).unwrap() * weyl_discriminant_root(cl) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip_is_byte_stable(rows in rows()) {
        let t = table_from(&rows);
        let text = spectrum_to_string(&t);
        let back = spectrum_from_str(&text).unwrap();
        prop_assert_eq!(spectrum_to_string(&back), text);
        prop_assert_eq!(back, t);
    }

    #[test]
    fn parallel_sums_are_bit_identical(rows in rows(), n in -6i64..6, y in 0.5f64..30.0) {
        let t = table_from(&rows);
        for filter in [ClassFilter::All, ClassFilter::PrimitiveOnly] {
            let spec = SumSpec::sharp(WeightMode::TraceWeight, filter, n, y);
            let seq = weighted_sum_with(&t, &spec, false).unwrap().value;
            let par = weighted_sum_with(&t, &spec, true).unwrap().value;
            prop_assert_eq!(seq.re.to_bits(), par.re.to_bits());
            prop_assert_eq!(seq.im.to_bits(), par.im.to_bits());
        }
    }

    #[test]
    fn smooth_cutoff_sits_in_unit_interval(y in 0.2f64..5.0, frac in 0.01f64..0.99, x in -8.0f64..8.0) {
        let g = CutoffDescriptor::g_y_eta(y, frac * y).unwrap();
        let v = g.eval(x).unwrap();
        prop_assert!((-1e-15..=1.0 + 1e-15).contains(&v));
        prop_assert_eq!(v, g.eval(-x).unwrap());
    }
}
