//! Scratch check: is the pooled supervised objective near-zero at the
//! pooled-scale truth for a constant-disparity scene?

use ndarray::{Array2, Array3, Array4};
use lf_core::Image;
use lf_sensing::rng::CodeRng;
use lf_solve::{downscale_image, downscale_light_field, total_loss, SolveMode, SolveTarget, SolverConfig};
use lf_warp::{render_lf, DisparityField};

fn textured_image(h: usize, w: usize, seed: u64) -> Image {
    let mut rng = CodeRng::new(seed);
    let mut waves: Vec<(f64, f64, f64, f64)> = (0..10)
        .map(|_| {
            let theta = rng.next_uniform() * std::f64::consts::TAU;
            let freq = 0.2 + rng.next_uniform() * 0.45;
            (freq * theta.cos(), freq * theta.sin(), rng.next_uniform() * std::f64::consts::TAU, 0.04 + 0.05 * rng.next_uniform())
        })
        .collect();
    for _ in 0..3 {
        let theta = rng.next_uniform() * std::f64::consts::TAU;
        let freq = 0.9 + rng.next_uniform() * 0.4;
        waves.push((freq * theta.cos(), freq * theta.sin(), rng.next_uniform() * std::f64::consts::TAU, 0.012));
    }
    Array3::from_shape_fn((h, w, 1), |(y, x, _)| {
        let mut v = 0.5;
        for &(fy, fx, p, a) in &waves { v += a * (fy * y as f64 + fx * x as f64 + p).sin(); }
        v.clamp(0.02, 0.98)
    })
}

fn main() {
    let (h, w) = (96, 96);
    let d = -2.0;
    let center = textured_image(h, w, 1000);
    let truth = Array2::from_elem((h, w), d);
    let dfield = DisparityField::new(Array4::from_shape_fn((7, 7, h, w), |(_, _, y, x)| truth[[y, x]])).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();

    let mut c = center.clone();
    let mut reference = lf.clone();
    let mut scale = 1.0;
    for level in 0..4 {
        let (lh, lw, _) = c.dim();
        let config = SolverConfig { mode: SolveMode::Supervised, ..SolverConfig::default() };
        let coarse_truth = DisparityField::constant(7, 7, lh, lw, d * scale).unwrap();
        let target = SolveTarget::Supervised(&reference);
        let at_truth = total_loss(&c, &coarse_truth, &config, &target).unwrap();
        let at_zero = total_loss(&c, &DisparityField::constant(7, 7, lh, lw, 0.0).unwrap(), &config, &target).unwrap();
        println!("level {level} ({lh}x{lw}): loss at scaled truth {:.4e} (rec {:.4e}), at zero {:.4e}",
                 at_truth.total, at_truth.rec, at_zero.total);
        c = downscale_image(&c);
        reference = downscale_light_field(&reference).unwrap();
        scale *= 0.5;
    }
}
