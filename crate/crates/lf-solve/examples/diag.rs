use ndarray::Array3;
use lf_core::Image;
use lf_sensing::rng::CodeRng;
use lf_solve::{gradient_magnitude, solve_disparity, SolveMode, SolveTarget, SolverConfig};
use lf_warp::{render_lf, DisparityField};

fn textured_image(h: usize, w: usize, seed: u64) -> Image {
    let mut rng = CodeRng::new(seed);
    // Isotropic mix of plane waves: random orientation and frequency so
    // every displacement direction sees texture gradient.
    let waves: Vec<(f64, f64, f64, f64)> = (0..10)
        .map(|_| {
            let theta = rng.next_uniform() * std::f64::consts::TAU;
            let fmin: f64 = std::env::var("FMIN").ok().and_then(|v| v.parse().ok()).unwrap_or(0.5);
            let fmax: f64 = std::env::var("FMAX").ok().and_then(|v| v.parse().ok()).unwrap_or(1.8);
            let freq = fmin + rng.next_uniform() * (fmax - fmin);
            (
                freq * theta.cos(),
                freq * theta.sin(),
                rng.next_uniform() * std::f64::consts::TAU,
                0.04 + 0.05 * rng.next_uniform(),
            )
        })
        .collect();
    Array3::from_shape_fn((h, w, 1), |(y, x, _)| {
        let mut v = 0.5;
        for &(fy, fx, p, a) in &waves { v += a * (fy * y as f64 + fx * x as f64 + p).sin(); }
        v.clamp(0.02, 0.98)
    })
}

fn main() {
    let (h, w) = (48, 48);
    let center = textured_image(h, w, 43);
    let truth = 1.25;
    let dfield = DisparityField::constant(3, 3, h, w, truth).unwrap();
    let lf = render_lf(&center, &dfield).unwrap();
    let iters: usize = std::env::var("ITERS").ok().and_then(|v| v.parse().ok()).unwrap_or(300);
    let ldc: f64 = std::env::var("LDC").ok().and_then(|v| v.parse().ok()).unwrap_or(0.008);
    let ltv: f64 = std::env::var("LTV").ok().and_then(|v| v.parse().ok()).unwrap_or(0.01);
    let step: f64 = std::env::var("STEP").ok().and_then(|v| v.parse().ok()).unwrap_or(0.05);
    let config = SolverConfig { mode: SolveMode::Supervised, pyramid_levels: 3, iters_per_level: iters,
        lambda_dc: ldc, lambda_tv: ltv, step_size: step, ..SolverConfig::default() };
    let target = SolveTarget::Supervised(&lf);
    let (est, report) = solve_disparity(&center, &target, &config).unwrap();
    for (i, t) in report.level_traces.iter().enumerate() {
        println!("level {i}: {} iters, first {:.6e} last {:.6e}", t.len()-1, t[0], t[t.len()-1]);
    }
    println!("final: {:?}", report.final_losses);
    println!("chosen sign: {:?}", report.chosen_sign);
    // error statistics over the textured mask, by view and border distance
    let gm = gradient_magnitude(&center);
    for iu in 0..3 {
        for iv in 0..3 {
            let mut interior = (0.0, 0usize);
            let mut border = (0.0, 0usize);
            for y in 0..h {
                for x in 0..w {
                    if gm[[y, x]] < 0.05 { continue; }
                    let e = (est.values()[[iu, iv, y, x]] - truth).abs();
                    let bd = y.min(x).min(h - 1 - y).min(w - 1 - x);
                    if bd >= 4 { interior.0 += e; interior.1 += 1; } else { border.0 += e; border.1 += 1; }
                }
            }
            println!("view ({iu},{iv}): interior MAE {:.4} (n={}), border MAE {:.4} (n={})",
                interior.0 / interior.1.max(1) as f64, interior.1, border.0 / border.1.max(1) as f64, border.1);
        }
    }
}
