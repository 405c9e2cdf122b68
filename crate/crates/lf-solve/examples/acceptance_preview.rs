//! Scratch harness for sizing the acceptance scenarios before freezing them
//! into the test suite. Not part of the deliverable tests.

use ndarray::{Array2, Array3, Array4};

use lf_core::{AngularOffset, Image};
use lf_sensing::rng::CodeRng;
use lf_sensing::{capture_focus_defocus, gen_defocus_model};
use lf_solve::{
    gradient_magnitude, solve_disparity, SolveMode, SolveTarget, SolverConfig,
};
use lf_warp::{render_lf, DisparityField};

fn textured_image(h: usize, w: usize, seed: u64) -> Image {
    let mut rng = CodeRng::new(seed);
    let mut waves: Vec<(f64, f64, f64, f64)> = (0..10)
        .map(|_| {
            let theta = rng.next_uniform() * std::f64::consts::TAU;
            let freq = 0.2 + rng.next_uniform() * 0.45;
            (
                freq * theta.cos(),
                freq * theta.sin(),
                rng.next_uniform() * std::f64::consts::TAU,
                0.04 + 0.05 * rng.next_uniform(),
            )
        })
        .collect();
    for _ in 0..3 {
        let theta = rng.next_uniform() * std::f64::consts::TAU;
        let freq = 0.9 + rng.next_uniform() * 0.4;
        waves.push((
            freq * theta.cos(),
            freq * theta.sin(),
            rng.next_uniform() * std::f64::consts::TAU,
            0.012,
        ));
    }
    Array3::from_shape_fn((h, w, 1), |(y, x, _)| {
        let mut v = 0.5;
        for &(fy, fx, p, a) in &waves {
            v += a * (fy * y as f64 + fx * x as f64 + p).sin();
        }
        v.clamp(0.02, 0.98)
    })
}

fn replicate(a_u: usize, a_v: usize, map: &Array2<f64>) -> DisparityField {
    let (h, w) = map.dim();
    DisparityField::new(Array4::from_shape_fn((a_u, a_v, h, w), |(_, _, y, x)| {
        map[[y, x]]
    }))
    .unwrap()
}

fn masked_mae(est: &DisparityField, truth: &Array2<f64>, center: &Image) -> f64 {
    let gm = gradient_magnitude(center);
    let (a_u, a_v) = est.angular_extents();
    let (h, w) = est.spatial_extents();
    let mut sum = 0.0;
    let mut n = 0usize;
    for iu in 0..a_u {
        for iv in 0..a_v {
            for y in 0..h {
                for x in 0..w {
                    if gm[[y, x]] >= 0.05 {
                        sum += (est.values()[[iu, iv, y, x]] - truth[[y, x]]).abs();
                        n += 1;
                    }
                }
            }
        }
    }
    sum / n as f64
}

fn criterion4() {
    let (h, w) = (96, 96);
    for (i, &d) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
        let t0 = std::time::Instant::now();
        let center = textured_image(h, w, 1000 + i as u64);
        let truth = Array2::from_elem((h, w), d);
        let dfield = replicate(7, 7, &truth);
        let lf = render_lf(&center, &dfield).unwrap();
        let config = SolverConfig {
            mode: SolveMode::Supervised,
            ..SolverConfig::default()
        };
        let target = SolveTarget::Supervised(&lf);
        let (est, report) = solve_disparity(&center, &target, &config).unwrap();
        let mae = masked_mae(&est, &truth, &center);
        println!(
            "c4 d={d}: MAE {mae:.4} sign {:?} iters {} time {:.1}s",
            report.chosen_sign,
            report.iterations,
            t0.elapsed().as_secs_f64()
        );
        for (i, t) in report.level_traces.iter().enumerate() {
            println!("  level {i}: {} accepted, {:.4e} -> {:.4e}", t.len() - 1, t[0], t[t.len() - 1]);
        }
        let vals = est.values();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        println!("  field mean {mean:.3}, min {:.3}, max {:.3}",
            vals.iter().cloned().fold(f64::INFINITY, f64::min),
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
}

fn criterion5() {
    let (h, w) = (96, 96);
    let center = textured_image(h, w, 2000);
    let truth = Array2::from_shape_fn((h, w), |(y, x)| {
        if (24..72).contains(&y) && (24..72).contains(&x) {
            2.0
        } else {
            -2.0
        }
    });
    let dfield = replicate(7, 7, &truth);
    let lf = render_lf(&center, &dfield).unwrap();
    for multi in [true, false] {
        let t0 = std::time::Instant::now();
        let config = SolverConfig {
            mode: SolveMode::Supervised,
            multi_start_signs: multi,
            ..SolverConfig::default()
        };
        let target = SolveTarget::Supervised(&lf);
        let (est, _) = solve_disparity(&center, &target, &config).unwrap();
        let gm = gradient_magnitude(&center);
        let mut ok = 0usize;
        let mut n = 0usize;
        for iu in 0..7 {
            for iv in 0..7 {
                for y in 0..h {
                    for x in 0..w {
                        if gm[[y, x]] >= 0.05 {
                            n += 1;
                            if est.values()[[iu, iv, y, x]] * truth[[y, x]] > 0.0 {
                                ok += 1;
                            }
                        }
                    }
                }
            }
        }
        println!(
            "c5 multi_start={multi}: sign accuracy {:.4} time {:.1}s",
            ok as f64 / n as f64,
            t0.elapsed().as_secs_f64()
        );
    }
}

fn criterion6() {
    let (h, w) = (96, 96);
    let mut psnrs = Vec::new();
    for scene in 0..3u64 {
        let t0 = std::time::Instant::now();
        let center = textured_image(h, w, 3000 + scene);
        let truth = Array2::from_shape_fn((h, w), |(y, x)| {
            let dy = (y as f64 - 48.0) / 48.0;
            let dx = (x as f64 - 48.0) / 48.0;
            0.8 + 1.2 * (-2.0 * (dy * dy + dx * dx)).exp()
        });
        let dfield = replicate(7, 7, &truth);
        let lf = render_lf(&center, &dfield).unwrap();
        let (allinfocus, defocus) = capture_focus_defocus(&lf).unwrap();
        let models = vec![gen_defocus_model(7, 7, h, w).unwrap()];
        let observed = vec![defocus];
        let config = SolverConfig::default();
        let target = SolveTarget::Measurement {
            models: &models,
            observed: &observed,
        };
        let (est, report) = solve_disparity(&allinfocus, &target, &config).unwrap();
        let recon = render_lf(&allinfocus, &est).unwrap();
        // PSNR over non-center views.
        let mut se = 0.0;
        let mut n = 0usize;
        for q in lf.offsets().collect::<Vec<_>>() {
            if q == AngularOffset::CENTER {
                continue;
            }
            let a = lf.get_view(q).unwrap();
            let b = recon.get_view(q).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                se += (x - y) * (x - y);
                n += 1;
            }
        }
        let psnr = 10.0 * (1.0 / (se / n as f64)).log10();
        let mae = masked_mae(&est, &truth, &allinfocus);
        println!(
            "c6 scene {scene}: PSNR {psnr:.2} dB, disparity MAE {mae:.4}, sign {:?}, time {:.1}s",
            report.chosen_sign,
            t0.elapsed().as_secs_f64()
        );
        psnrs.push(psnr);
    }
    println!("c6 mean PSNR {:.2}", psnrs.iter().sum::<f64>() / psnrs.len() as f64);
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    if which == "c4" || which == "all" {
        criterion4();
    }
    if which == "c5" || which == "all" {
        criterion5();
    }
    if which == "c6" || which == "all" {
        criterion6();
    }
}
