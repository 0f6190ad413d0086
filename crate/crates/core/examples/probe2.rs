use slabflow_core::flow::*;
use slabflow_core::grid::GridSpec;

fn main() {
    // long sphere run: one half-life at f=16
    let grid = GridSpec::icosphere(16, None);
    let mut s = FlowState::sphere(&grid, 1.0, [0.0; 3], 0.0);
    let mut next_report = 0.0;
    for _ in 0..4_000_000u64 {
        let c = match curvature_field(&s) {
            Ok(c) => c,
            Err(e) => { eprintln!("died: {e} at t={}", s.t); break; }
        };
        let wmin = c.w_min.iter().cloned().fold(f64::INFINITY, f64::min);
        let dt = 0.2 * wmin * wmin / grid.stability_sum();
        let spread = s.sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - s.sigma.iter().cloned().fold(f64::INFINITY, f64::min);
        if s.t >= next_report {
            let r = (1.0f64 - 4.0 * s.t).sqrt();
            eprintln!("t={:.4} spread={:.3e} wmin={:.4} r_exact={:.4} err={:.2e}",
                s.t, spread, wmin, r, (wmin - r).abs());
            next_report = s.t + 0.02;
        }
        if s.t >= 0.1875 { eprintln!("reached half-life, spread {spread:.3e}"); break; }
        for (sig, h) in s.sigma.iter_mut().zip(&c.h) { *sig -= dt * h; }
        s.t += dt;
    }
}
