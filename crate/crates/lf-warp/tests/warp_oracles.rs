//! Warp oracles: independent scalar re-implementations, finite differences,
//! and construction-based checks that tie warping, shearing and EPI slopes
//! together.

use ndarray::{Array2, Array3, Array4};

use lf_core::{extract_epi, AngularOffset, EpiAxis, Image, LightField};
use lf_sensing::rng::CodeRng;
use lf_warp::{
    render_lf, warp_consistency_sample, warp_view, warp_view_grad, DisparityField,
};

fn random_image(h: usize, w: usize, c: usize, seed: u64) -> Image {
    let mut rng = CodeRng::new(seed);
    Array3::from_shape_fn((h, w, c), |_| rng.next_uniform())
}

/// Horizontal ramp scaled into [0, 1].
fn ramp_image(h: usize, w: usize) -> Image {
    Array3::from_shape_fn((h, w, 1), |(_, x, _)| x as f64 / (w - 1) as f64)
}

/// Independent scalar backward warp used as the oracle.
fn brute_force_warp(center: &Image, disp: &Array2<f64>, q: AngularOffset) -> Image {
    let (h, w, c) = center.dim();
    let sample = |plane: usize, py: f64, px: f64| -> f64 {
        let py = py.max(0.0).min((h - 1) as f64);
        let px = px.max(0.0).min((w - 1) as f64);
        let y0 = (py.floor() as usize).min(h - 2);
        let x0 = (px.floor() as usize).min(w - 2);
        let fy = py - y0 as f64;
        let fx = px - x0 as f64;
        let v00 = center[[y0, x0, plane]];
        let v01 = center[[y0, x0 + 1, plane]];
        let v10 = center[[y0 + 1, x0, plane]];
        let v11 = center[[y0 + 1, x0 + 1, plane]];
        (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) + fy * ((1.0 - fx) * v10 + fx * v11)
    };
    Array3::from_shape_fn((h, w, c), |(y, x, ch)| {
        let d = disp[[y, x]];
        sample(ch, y as f64 + q.u as f64 * d, x as f64 + q.v as f64 * d)
    })
}

#[test]
fn zero_disparity_reproduces_center() {
    let center = random_image(8, 8, 3, 1);
    let disp = Array2::zeros((8, 8));
    for &(qu, qv) in &[(0, 0), (1, -1), (-2, 3)] {
        let out = warp_view(&center.view(), &disp.view(), AngularOffset::new(qu, qv)).unwrap();
        for (a, b) in out.iter().zip(center.iter()) {
            assert!((a - b).abs() <= 1e-7);
        }
    }
}

#[test]
fn center_offset_is_exact_for_any_disparity() {
    let center = random_image(8, 8, 1, 2);
    let mut rng = CodeRng::new(3);
    let disp = Array2::from_shape_fn((8, 8), |_| 4.0 * rng.next_uniform() - 2.0);
    let out = warp_view(&center.view(), &disp.view(), AngularOffset::CENTER).unwrap();
    assert_eq!(out, center);
}

#[test]
fn linear_ramp_with_unit_disparity_is_exact_on_interior() {
    // Bilinear interpolation is exact on linear images: disparity 1 at
    // q = (0, 2) shifts the ramp by exactly two pixels.
    let (h, w) = (6, 12);
    let center = ramp_image(h, w);
    let disp = Array2::ones((h, w));
    let out = warp_view(&center.view(), &disp.view(), AngularOffset::new(0, 2)).unwrap();
    for y in 0..h {
        for x in 0..w - 2 {
            let expect = (x + 2) as f64 / (w - 1) as f64;
            assert!((out[[y, x, 0]] - expect).abs() <= 1e-6, "({y},{x})");
        }
    }
}

#[test]
fn warp_matches_brute_force_oracle() {
    let center = random_image(8, 8, 1, 7);
    let mut rng = CodeRng::new(8);
    let disp = Array2::from_shape_fn((8, 8), |_| 4.0 * rng.next_uniform() - 2.0);
    let q = AngularOffset::new(1, 1);
    let fast = warp_view(&center.view(), &disp.view(), q).unwrap();
    let slow = brute_force_warp(&center, &disp, q);
    for (a, b) in fast.iter().zip(slow.iter()) {
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn warp_output_range_never_exceeds_input_range() {
    for trial in 0..50 {
        let center = random_image(6, 6, 1, 100 + trial);
        let mut rng = CodeRng::new(200 + trial);
        let disp = Array2::from_shape_fn((6, 6), |_| 8.0 * rng.next_uniform() - 4.0);
        let (lo, hi) = center
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        let out = warp_view(&center.view(), &disp.view(), AngularOffset::new(2, -1)).unwrap();
        for &v in &out {
            assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
        }
    }
}

#[test]
fn positive_disparity_shifts_content_against_positive_offset() {
    // Documented sign convention: the view at q samples the center at
    // x + q_v * D, so a bright spot at x0 appears at x0 - q_v * D in that
    // view (content in front of the focal plane slides left as the
    // viewpoint moves right).
    let (h, w) = (9, 9);
    let mut center = Array3::from_elem((h, w, 1), 0.1);
    center[[4, 5, 0]] = 1.0;
    let disp = Array2::ones((h, w));
    let out = warp_view(&center.view(), &disp.view(), AngularOffset::new(0, 1)).unwrap();
    let mut argmax = (0, 0);
    let mut best = f64::NEG_INFINITY;
    for y in 0..h {
        for x in 0..w {
            if out[[y, x, 0]] > best {
                best = out[[y, x, 0]];
                argmax = (y, x);
            }
        }
    }
    assert_eq!(argmax, (4, 4));
}

#[test]
fn render_zero_field_copies_center_everywhere() {
    let center = random_image(8, 8, 1, 11);
    let dfield = DisparityField::constant(3, 3, 8, 8, 0.0).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    for offset in lf.offsets().collect::<Vec<_>>() {
        let view = lf.get_view(offset).unwrap();
        for (a, b) in view.iter().zip(center.iter()) {
            assert!((a - b).abs() <= 1e-7);
        }
    }
}

#[test]
fn render_constant_texture_ignores_disparity() {
    let center = Array3::from_elem((8, 8, 1), 0.42);
    let mut rng = CodeRng::new(12);
    let values = Array4::from_shape_fn((3, 3, 8, 8), |_| 6.0 * rng.next_uniform() - 3.0);
    let dfield = DisparityField::new(values).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    assert!(lf.data().iter().all(|&v| (v - 0.42).abs() <= 1e-12));
}

#[test]
fn rendered_epi_slope_matches_disparity_by_regression() {
    let (h, w) = (8, 32);
    let center = ramp_image(h, w);
    let dfield = DisparityField::constant(5, 5, h, w, 1.5).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let epi = extract_epi(&lf, EpiAxis::X, 4, 2).unwrap();

    // Regress radiance against the angular offset at interior columns; the
    // recovered slope, in pixels per angular step, must match the disparity.
    let offsets: Vec<f64> = (-2..=2).map(|q| q as f64).collect();
    let var_q: f64 = offsets.iter().map(|q| q * q).sum::<f64>() / 5.0;
    for x in 8..w - 8 {
        let vals: Vec<f64> = (0..5).map(|ia| epi.data[[ia, x, 0]]).collect();
        let mean_v = vals.iter().sum::<f64>() / 5.0;
        let cov: f64 = offsets
            .iter()
            .zip(&vals)
            .map(|(q, v)| q * (v - mean_v))
            .sum::<f64>()
            / 5.0;
        let slope_px = (w - 1) as f64 * cov / var_q;
        assert!((slope_px - 1.5).abs() <= 0.01, "column {x}: slope {slope_px}");
    }
}

#[test]
fn rendered_epi_rows_shift_by_disparity_times_offset() {
    // Constant disparity 2 over a ramp: the EPI row at angular offset q_v
    // equals the center row shifted by 2 * q_v, exactly on interior pixels.
    let (h, w) = (6, 24);
    let center = ramp_image(h, w);
    let dfield = DisparityField::constant(3, 3, h, w, 2.0).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let epi = extract_epi(&lf, EpiAxis::X, 3, 1).unwrap();
    for ia in 0..3usize {
        let qv = ia as i64 - 1;
        for x in 0..w {
            let src = x as i64 + 2 * qv;
            if src < 0 || src >= w as i64 {
                continue;
            }
            let expect = epi.data[[1, src as usize, 0]];
            assert!(
                (epi.data[[ia, x, 0]] - expect).abs() <= 1e-9,
                "row {ia}, col {x}"
            );
        }
    }
}

#[test]
fn rendered_zero_disparity_epi_has_constant_columns() {
    let center = random_image(8, 8, 1, 13);
    let dfield = DisparityField::constant(3, 3, 8, 8, 0.0).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let epi = extract_epi(&lf, EpiAxis::Y, 5, 1).unwrap();
    for is in 0..8 {
        let v0 = epi.data[[0, is, 0]];
        for ia in 1..3 {
            assert!((epi.data[[ia, is, 0]] - v0).abs() <= 1e-9);
        }
    }
}

#[test]
fn shear_undoes_constant_disparity_rendering() {
    // Construction oracle: render at constant integer disparity d, shear by
    // -d, and every view collapses onto the centerview on the interior.
    let (h, w) = (24, 24);
    let center = random_image(h, w, 1, 14);
    let d = 2.0;
    let dfield = DisparityField::constant(3, 3, h, w, d).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let sheared = lf.shear(-d).unwrap();
    let margin = (d.abs() * 1.0).ceil() as usize + 1;
    for offset in sheared.offsets().collect::<Vec<_>>() {
        let view = sheared.get_view(offset).unwrap();
        for y in margin..h - margin {
            for x in margin..w - margin {
                assert!(
                    (view[[y, x, 0]] - center[[y, x, 0]]).abs() <= 1e-5,
                    "offset {offset:?} pixel ({y},{x})"
                );
            }
        }
    }
}

#[test]
fn shear_roundtrip_on_band_limited_content() {
    // Fractional shears lose energy at high frequencies, so the roundtrip
    // bound only holds for smooth content; integer shears are exact for any
    // content.
    let (h, w) = (64, 256);
    let smooth = Array3::from_shape_fn((h, w, 1), |(y, x, _)| {
        0.5 + 0.01
            * ((2.0 * std::f64::consts::PI * x as f64 / 256.0).sin()
                * (2.0 * std::f64::consts::PI * y as f64 / 256.0).cos())
    });
    let dfield = DisparityField::constant(3, 3, h, w, 0.0).unwrap();
    let lf = render_lf(&smooth, &dfield).unwrap();
    for &s in &[1.0, 0.5] {
        let roundtrip = lf.shear(s).unwrap().shear(-s).unwrap();
        let margin = (s.abs() * 1.0).ceil() as usize + 1;
        for offset in lf.offsets().collect::<Vec<_>>() {
            let a = lf.get_view(offset).unwrap();
            let b = roundtrip.get_view(offset).unwrap();
            for y in margin..h - margin {
                for x in margin..w - margin {
                    assert!(
                        (a[[y, x, 0]] - b[[y, x, 0]]).abs() <= 1e-5,
                        "s={s} offset {offset:?} pixel ({y},{x})"
                    );
                }
            }
        }
    }
}

#[test]
fn consistency_sample_of_constant_field_is_constant() {
    let dfield = DisparityField::constant(3, 3, 8, 8, 1.25).unwrap();
    let out =
        warp_consistency_sample(&dfield, AngularOffset::new(0, -1), AngularOffset::new(0, 1))
            .unwrap();
    assert!(out.iter().all(|&v| (v - 1.25).abs() <= 1e-12));
}

#[test]
fn consistency_sample_of_zero_target_is_zero() {
    let mut values = Array4::zeros((3, 3, 6, 6));
    // Source view (0,0) arbitrary, target view (0,1) all zeros.
    let mut rng = CodeRng::new(15);
    for y in 0..6 {
        for x in 0..6 {
            values[[1, 1, y, x]] = 3.0 * rng.next_uniform();
        }
    }
    let dfield = DisparityField::new(values).unwrap();
    let out = warp_consistency_sample(&dfield, AngularOffset::CENTER, AngularOffset::new(0, 1))
        .unwrap();
    assert!(out.iter().all(|&v| v == 0.0));
}

#[test]
fn consistency_sample_matches_brute_force() {
    let mut rng = CodeRng::new(16);
    let values = Array4::from_shape_fn((3, 3, 7, 7), |_| 3.0 * rng.next_uniform() - 1.5);
    let dfield = DisparityField::new(values).unwrap();
    let v = AngularOffset::new(0, 0);
    let q = AngularOffset::new(1, -1);
    let out = warp_consistency_sample(&dfield, v, q).unwrap();
    let source = dfield.map_at(v).unwrap().to_owned();
    let target = dfield.map_at(AngularOffset::new(1, -1)).unwrap().to_owned();
    for y in 0..7 {
        for x in 0..7 {
            let d = source[[y, x]];
            let py = (y as f64 - q.u as f64 * d).clamp(0.0, 6.0);
            let px = (x as f64 - q.v as f64 * d).clamp(0.0, 6.0);
            let y0 = (py.floor() as usize).min(5);
            let x0 = (px.floor() as usize).min(5);
            let fy = py - y0 as f64;
            let fx = px - x0 as f64;
            let expect = (1.0 - fy) * ((1.0 - fx) * target[[y0, x0]] + fx * target[[y0, x0 + 1]])
                + fy * ((1.0 - fx) * target[[y0 + 1, x0]] + fx * target[[y0 + 1, x0 + 1]]);
            assert!((out[[y, x]] - expect).abs() <= 1e-6, "({y},{x})");
        }
    }
}

#[test]
fn consistency_sample_rejects_out_of_range_pair() {
    let dfield = DisparityField::constant(3, 3, 4, 4, 0.0).unwrap();
    assert!(
        warp_consistency_sample(&dfield, AngularOffset::new(1, 0), AngularOffset::new(1, 0))
            .is_err()
    );
}

#[test]
fn grad_zero_upstream_and_flat_center_give_zero() {
    let center = random_image(8, 8, 1, 17);
    let mut rng = CodeRng::new(18);
    let disp = Array2::from_shape_fn((8, 8), |_| 2.0 * rng.next_uniform() - 1.0);
    let zero_up = Array3::zeros((8, 8, 1));
    let g = warp_view_grad(
        &center.view(),
        &disp.view(),
        AngularOffset::new(1, 1),
        &zero_up.view(),
    )
    .unwrap();
    assert!(g.iter().all(|&v| v == 0.0));

    let flat = Array3::from_elem((8, 8, 1), 0.6);
    let ones = Array3::ones((8, 8, 1));
    let g = warp_view_grad(
        &flat.view(),
        &disp.view(),
        AngularOffset::new(1, 1),
        &ones.view(),
    )
    .unwrap();
    assert!(g.iter().all(|&v| v.abs() <= 1e-12));
}

#[test]
fn grad_is_linear_in_upstream() {
    let center = random_image(8, 8, 1, 19);
    let mut rng = CodeRng::new(20);
    let disp = Array2::from_shape_fn((8, 8), |_| 2.0 * rng.next_uniform() - 1.0);
    let u1 = random_image(8, 8, 1, 21);
    let u2 = random_image(8, 8, 1, 22);
    let q = AngularOffset::new(1, -1);
    let combo = &u1 * 0.4 + &u2 * 0.6;
    let lhs = warp_view_grad(&center.view(), &disp.view(), q, &combo.view()).unwrap();
    let g1 = warp_view_grad(&center.view(), &disp.view(), q, &u1.view()).unwrap();
    let g2 = warp_view_grad(&center.view(), &disp.view(), q, &u2.view()).unwrap();
    for ((l, a), b) in lhs.iter().zip(g1.iter()).zip(g2.iter()) {
        assert!((l - (0.4 * a + 0.6 * b)).abs() <= 1e-6);
    }
}

#[test]
fn grad_matches_central_finite_differences() {
    // >= 100 probes with sampling positions kept at least 0.1 away from
    // integer coordinates, where the interpolant is smooth.
    let q = AngularOffset::new(1, 1);
    let mut rng = CodeRng::new(23);
    let mut probes = 0;
    let h = 1e-3;
    for instance in 0..5 {
        let center = random_image(8, 8, 1, 300 + instance);
        let disp = Array2::from_shape_fn((8, 8), |_| {
            // Fractional part in [0.15, 0.85]: positions y + d stay off the
            // integer lattice for unit offsets.
            let k = (rng.next_uniform() * 4.0).floor() - 2.0;
            k + 0.15 + 0.7 * rng.next_uniform()
        });
        let upstream = random_image(8, 8, 1, 400 + instance);
        let grad = warp_view_grad(&center.view(), &disp.view(), q, &upstream.view()).unwrap();

        let objective = |d: &Array2<f64>| -> f64 {
            let out = warp_view(&center.view(), &d.view(), q).unwrap();
            out.iter().zip(upstream.iter()).map(|(a, u)| a * u).sum()
        };
        // A position is probe-safe when it is either clearly outside the
        // image (clamped flat on both sides of the step) or clearly inside
        // and off the integer lattice.
        let safe = |p: f64| p <= -0.1 || p >= 7.1 || (0.1..=6.9).contains(&p);
        for y in 0..8 {
            for x in 0..8 {
                let py = y as f64 + disp[[y, x]];
                let px = x as f64 + disp[[y, x]];
                if !safe(py) || !safe(px) {
                    continue;
                }
                let mut dp = disp.clone();
                dp[[y, x]] += h;
                let mut dm = disp.clone();
                dm[[y, x]] -= h;
                let fd = (objective(&dp) - objective(&dm)) / (2.0 * h);
                let an = grad[[y, x]];
                let denom = fd.abs().max(an.abs()).max(1e-8);
                assert!(
                    ((an - fd) / denom).abs() <= 1e-4,
                    "instance {instance} probe ({y},{x}): analytic {an} fd {fd}"
                );
                probes += 1;
            }
        }
    }
    assert!(probes >= 100, "only {probes} valid probes");
}

#[test]
fn render_then_pinhole_returns_center_exactly() {
    let center = random_image(10, 10, 1, 24);
    let mut rng = CodeRng::new(25);
    let values = Array4::from_shape_fn((3, 3, 10, 10), |_| 3.0 * rng.next_uniform() - 1.5);
    let dfield = DisparityField::new(values).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let pin = lf_sensing::simulate(&lf, &lf_sensing::gen_pinhole_model(3, 3, 10, 10).unwrap())
        .unwrap();
    assert_eq!(pin.data, center);
}

#[test]
fn focus_defocus_of_zero_disparity_scene_matches_allinfocus() {
    let center = random_image(12, 12, 1, 26);
    let dfield = DisparityField::constant(3, 3, 12, 12, 0.0).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let (allinfocus, defocus) = lf_sensing::capture_focus_defocus(&lf).unwrap();
    for (a, b) in allinfocus.iter().zip(defocus.data.iter()) {
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn defocus_of_constant_disparity_scene_is_shift_and_average() {
    // Shift-and-average oracle: with all views warped from the center at
    // constant disparity d, the defocus image is the mean of displaced
    // copies of the centerview.
    let (h, w) = (16, 16);
    let center = random_image(h, w, 1, 27);
    let d = 2.0;
    let dfield = DisparityField::constant(3, 3, h, w, d).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let (_, defocus) = lf_sensing::capture_focus_defocus(&lf).unwrap();

    let mut oracle = Array3::<f64>::zeros((h, w, 1));
    for qu in -1i64..=1 {
        for qv in -1i64..=1 {
            for y in 0..h {
                for x in 0..w {
                    let sy = ((y as i64 + qu * d as i64).clamp(0, h as i64 - 1)) as usize;
                    let sx = ((x as i64 + qv * d as i64).clamp(0, w as i64 - 1)) as usize;
                    oracle[[y, x, 0]] += center[[sy, sx, 0]];
                }
            }
        }
    }
    oracle /= 9.0;
    for (a, b) in defocus.data.iter().zip(oracle.iter()) {
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn disparity_field_rejects_out_of_clamp_values() {
    let values = Array4::from_elem((3, 3, 4, 4), 11.0);
    assert!(DisparityField::new(values).is_err());
    let values = Array4::from_elem((3, 3, 4, 4), f64::NAN);
    assert!(DisparityField::new(values).is_err());
}
