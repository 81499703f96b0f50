mod common;

use macent::entropy::{duration_distribution, entropy_curve, EntropyCurve};
use macent::heterogeneity::{hmix, mix, mix_report, mix_weights, rescale_mix, HMixCurve};
use macent::partition::detect_clusters;
use macent::synthetic::{generate_fbm, FbmSpec};
use macent::Error;
use proptest::prelude::*;

fn curves_for(x: &[f64], windows: &[usize]) -> Vec<EntropyCurve<f64>> {
    windows
        .iter()
        .map(|&n| entropy_curve(&duration_distribution(&detect_clusters(x, n).unwrap()).unwrap()))
        .collect()
}

/// Trapezoid rule written out per panel, independent of the library routine.
fn manual_trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    (1..xs.len())
        .map(|i| 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]))
        .sum()
}

proptest! {
    #[test]
    fn weights_lie_on_the_simplex(raw in prop::collection::vec(0.0f64..1e6, 1..12)) {
        let rescaled = rescale_mix(&raw);
        prop_assert!(rescaled.iter().all(|&m| (0.0..=1.0).contains(&m)));
        match mix_weights(&rescaled) {
            Ok(w) => {
                prop_assert!((w.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                prop_assert!(w.iter().all(|&v| v >= 0.0));
                for i in 0..raw.len() {
                    for j in 0..raw.len() {
                        if raw[i] < raw[j] {
                            prop_assert!(w[i] >= w[j]);
                        }
                    }
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::AllMaximallyHeterogeneous)),
        }
    }

    #[test]
    fn weights_follow_permutations(raw in prop::collection::vec(0.0f64..1e3, 2..10), shift in 0usize..10) {
        let k = raw.len();
        let perm: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
        let permuted: Vec<f64> = perm.iter().map(|&i| raw[i]).collect();
        let w = mix_weights(&rescale_mix(&raw)).unwrap();
        let wp = mix_weights(&rescale_mix(&permuted)).unwrap();
        for (pos, &i) in perm.iter().enumerate() {
            prop_assert!((wp[pos] - w[i]).abs() <= 1e-15);
        }
    }

    #[test]
    fn rescaling_ignores_affine_changes(raw in prop::collection::vec(0.0f64..1e3, 2..10), a in 0.1f64..10.0, b in 0.0f64..100.0) {
        let mapped: Vec<f64> = raw.iter().map(|v| a * v + b).collect();
        for (x, y) in rescale_mix(&raw).iter().zip(rescale_mix(&mapped)) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn two_series_get_all_weight_on_the_homogeneous_one() {
    let w = mix_weights(&rescale_mix(&[3.0, 7.0])).unwrap();
    assert_eq!(w, vec![1.0, 0.0]);
}

#[test]
fn empty_set_is_rejected() {
    assert!(matches!(mix_weights::<f64>(&[]), Err(Error::EmptySet)));
    assert!(matches!(mix_report::<f64>(&[], 1, 2), Err(Error::EmptySet)));
}

#[test]
fn hmix_matches_manual_integral() {
    let x: Vec<f64> = generate_fbm(&FbmSpec::new(0.5, 1 << 14, 7).unwrap()).unwrap();
    for c in curves_for(&x, &[20, 80]) {
        let xs: Vec<f64> = c.support.iter().map(|&t| t as f64).collect();
        let want = -manual_trapezoid(&xs, &c.values);
        assert!((hmix(&c).unwrap() - want).abs() <= 1e-9 * want.abs().max(1.0));
    }
}

#[test]
fn mix_matches_manual_integral_over_the_selected_windows() {
    let x: Vec<f64> = generate_fbm(&FbmSpec::new(0.6, 1 << 14, 8).unwrap()).unwrap();
    let windows = [10, 20, 40, 80, 160];
    let h = HMixCurve::from_curves("s", &curves_for(&x, &windows)).unwrap();
    let ns = [20.0, 40.0, 80.0];
    let want = manual_trapezoid(&ns, &h.values[1..4]).abs();
    assert!((mix(&h, 15, 100).unwrap() - want).abs() <= 1e-9 * want);
    assert!(matches!(mix(&h, 15, 30), Err(Error::RangeTooNarrow { .. })));
}

#[test]
fn refining_the_window_grid_converges() {
    let x: Vec<f64> = generate_fbm(&FbmSpec::new(0.5, 1 << 15, 9).unwrap()).unwrap();
    let coarse: Vec<usize> = (20..=200).step_by(60).collect();
    let medium: Vec<usize> = (20..=200).step_by(20).collect();
    let fine: Vec<usize> = (20..=200).step_by(10).collect();
    let value = |w: &[usize]| {
        mix(
            &HMixCurve::from_curves("s", &curves_for(&x, w)).unwrap(),
            20,
            200,
        )
        .unwrap()
    };
    let (c, m, f) = (value(&coarse), value(&medium), value(&fine));
    assert!((m - f).abs() / f <= 0.05, "{c} {m} {f}");
}

#[test]
fn duplicate_windows_are_rejected() {
    let x: Vec<f64> = generate_fbm(&FbmSpec::new(0.5, 4096, 1).unwrap()).unwrap();
    let curves = curves_for(&x, &[10, 10]);
    assert!(matches!(
        HMixCurve::from_curves("d", &curves),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn report_records_conventions() {
    let windows = [10, 20, 40];
    let curves: Vec<HMixCurve<f64>> = (0..3)
        .map(|i| {
            let x: Vec<f64> = generate_fbm(&FbmSpec::new(0.5, 8192, 50 + i).unwrap()).unwrap();
            HMixCurve::from_curves(format!("s{i}"), &curves_for(&x, &windows)).unwrap()
        })
        .collect();
    let report = mix_report(&curves, 10, 40).unwrap();
    assert_eq!(report.labels, vec!["s0", "s1", "s2"]);
    assert_eq!(report.integration_method, "trapezoid");
    assert_eq!(report.weight_basis, "rescaled");
    assert_eq!(report.windows[0], windows.to_vec());
    assert!((report.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
}
