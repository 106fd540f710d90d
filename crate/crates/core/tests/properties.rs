use num_complex::Complex64;
use proptest::prelude::*;

use ultrafid::inversion::{g_inverse, invert_on_axis, voiculescu, CertificateRecord, GridSpec, Verdict};
use ultrafid::measures::{
    beta_density, check_beta_square, linspace, moment, square_pushforward, unit_interval_mass,
    affine_pushforward, BetaParams, ConvergenceReport, DensityGrid,
};
use ultrafid::transforms::{g1_continued, gn_closed, parse_complex, SlitPoint, Ultraspherical};
use ultrafid::UltraIndex;

fn idx(n: u32) -> UltraIndex {
    UltraIndex::new(n as i64).unwrap()
}

fn slit_point() -> impl Strategy<Value = SlitPoint> {
    (-6.0f64..6.0, -6.0f64..6.0).prop_filter_map("on the cut", |(re, im)| {
        SlitPoint::new(Complex64::new(re, im)).ok()
    })
}

fn lower_target() -> impl Strategy<Value = Complex64> {
    (-2.0f64..1.0, 0.02f64..3.12).prop_map(|(lr, th)| Complex64::from_polar(10f64.powf(lr), -th))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn semicircle_quadratic_relation_and_range(z in slit_point()) {
        let w = g1_continued(&z);
        prop_assert!((w * w - z.value() * w + 1.0).norm() < 1e-12);
        prop_assert!(w.im <= 1e-14);
    }

    #[test]
    fn semicircle_on_support_is_unimodular(x in -2.0f64..=2.0) {
        let w = g1_continued(&SlitPoint::real(x).unwrap());
        prop_assert!((w.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mirror_symmetry(z in slit_point(), n in 1u32..=8) {
        let m = SlitPoint::new(-z.value().conj()).unwrap();
        let u = Ultraspherical::cached(idx(n));
        let (a, b) = (u.value(&m), -u.value(&z).conj());
        prop_assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        // The bare closed form only where it does not cancel.
        if z.value().norm() <= 3.0 {
            let (a, b) = (gn_closed(idx(n), &m), -gn_closed(idx(n), &z).conj());
            prop_assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
    }

    #[test]
    fn preimage_stays_right_of_axis(w in lower_target(), n in 1u32..=6) {
        prop_assume!(w.re > 1e-9);
        let r = g_inverse(idx(n), w).unwrap();
        prop_assert!(r.preimage.re > 0.0);
        prop_assert!(SlitPoint::new(r.preimage).is_ok());
    }

    #[test]
    fn semicircle_voiculescu_is_reciprocal(lr in -2.0f64..2.0, th in 0.01f64..3.13) {
        let z = Complex64::from_polar(10f64.powf(lr), th);
        let phi = voiculescu(idx(1), z).unwrap();
        prop_assert!((phi - 1.0 / z).norm() <= 1e-12, "{}", (phi - 1.0 / z).norm());
    }

    #[test]
    fn parse_complex_never_panics(s in "\\PC{0,24}") {
        let _ = parse_complex(&s);
    }

    #[test]
    fn parse_complex_reads_back_display(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = Complex64::new(re, im);
        let text = if im < 0.0 { format!("{re:e}-{:e}i", -im) } else { format!("{re:e}+{im:e}i") };
        prop_assert_eq!(parse_complex(&text).unwrap(), z);
    }

    #[test]
    fn slit_point_display_parses_back(z in slit_point(), scale in -300i32..300) {
        let p = match SlitPoint::new(z.value() * 10f64.powi(scale)) {
            Ok(p) => p,
            Err(_) => return Ok(()),
        };
        let again: SlitPoint = p.to_string().parse().unwrap();
        prop_assert_eq!(again.value(), p.value());
    }

    #[test]
    fn density_csv_roundtrip(n in 1u32..=8, nx in 2usize..64) {
        let g = DensityGrid::sample(idx(n), -2.0, 2.0, nx).unwrap();
        prop_assert_eq!(DensityGrid::from_csv(&g.to_csv()).unwrap(), g);
    }

    #[test]
    fn convergence_csv_roundtrip(ds in proptest::collection::vec(0.0f64..1.0, 1..10)) {
        let r = ConvergenceReport { entries: ds.iter().enumerate().map(|(k, &d)| (k as u32 + 1, d)).collect() };
        prop_assert_eq!(ConvergenceReport::from_csv(&r.to_csv()).unwrap(), r);
    }

    #[test]
    fn certificate_json_roundtrip(n in 1u32..50, max in -1.0f64..1.0, re in -10.0f64..10.0, im in 1e-3f64..10.0) {
        let tolerance = 1e-9;
        let rec = CertificateRecord {
            schema: 1,
            n,
            tolerance,
            grid: GridSpec::default(),
            max_im_phi: max,
            argmax: [re, im],
            verdict: if max <= tolerance { Verdict::Pass } else { Verdict::Fail },
        };
        prop_assert_eq!(CertificateRecord::from_json(&rec.to_json()).unwrap(), rec);
    }
}

#[test]
fn real_line_boundary_values_are_injective() {
    let xs: Vec<f64> = linspace(-6.0, 6.0, 2000)
        .unwrap()
        .into_iter()
        .filter(|x| (x.abs() - 2.0).abs() > 1e-3)
        .collect();
    for n in 1..=8 {
        let u = Ultraspherical::new(idx(n));
        let vals: Vec<Complex64> = xs.iter().map(|&x| u.boundary_value(x).unwrap()).collect();
        let mut min_sep = f64::INFINITY;
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                min_sep = min_sep.min((vals[i] - vals[j]).norm());
            }
        }
        assert!(min_sep > 1e-5, "n={n}: minimum separation {min_sep:e}");
    }
}

#[test]
fn inverse_is_locally_injective() {
    let targets: Vec<Complex64> = GridSpec { r_min: 1e-2, r_max: 1e1, nr: 16, ntheta: 16 }
        .points()
        .into_iter()
        .map(|z| z.conj())
        .collect();
    for n in 1..=8 {
        let pre: Vec<Complex64> = targets.iter().map(|&w| g_inverse(idx(n), w).unwrap().preimage).collect();
        let mut min_ratio = f64::INFINITY;
        for i in 0..pre.len() {
            for j in i + 1..pre.len() {
                min_ratio = min_ratio.min((pre[i] - pre[j]).norm() / (targets[i] - targets[j]).norm());
            }
        }
        // Measured minimum over all pairs is 0.034 at n = 8.
        assert!(min_ratio > 0.03, "n={n}: min |dz|/|dw| = {min_ratio}");
    }
}

#[test]
fn axis_inverse_is_monotone() {
    for n in 1..=6 {
        let ys: Vec<f64> = linspace(-9.99, -0.01, 200)
            .unwrap()
            .into_iter()
            .map(|v| {
                let z = invert_on_axis(idx(n), v).unwrap();
                assert_eq!(z.re, 0.0);
                z.im
            })
            .collect();
        // Deep targets have their preimage on the lower imaginary axis.
        assert!(ys.windows(2).all(|w| w[1] > w[0]), "n={n}");
        assert!(ys[0] < 0.0 && ys[ys.len() - 1] > 0.0);
    }
}

#[test]
fn density_mass() {
    for n in 1..=12 {
        let g = DensityGrid::sample(idx(n), -2.0, 2.0, 400_001).unwrap();
        assert!((g.trapezoid_mass() - 1.0).abs() < 1e-8, "n={n}: {}", g.trapezoid_mass());
        assert!((moment(idx(n), 0).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn pushforwards_conserve_mass() {
    for n in 1..=8 {
        let i = idx(n);
        let sym = unit_interval_mass(|u| affine_pushforward(i, u)).unwrap();
        let sq = unit_interval_mass(|u| square_pushforward(i, u)).unwrap();
        let beta = unit_interval_mass(|u| beta_density(BetaParams::symmetric(i), u).unwrap()).unwrap();
        for m in [sym, sq, beta] {
            assert!((m - 1.0).abs() < 1e-8, "n={n}: {m}");
        }
        let grid: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
        assert!(check_beta_square(i, &grid).unwrap().max() < 1e-12);
    }
}
