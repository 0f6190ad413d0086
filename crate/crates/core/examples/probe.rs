use slabflow_core::flow::*;
use slabflow_core::grid::GridSpec;

fn main() {
    for factor in [0.2f64, 0.05, 0.0125] {
        let grid = GridSpec::icosphere(16, None);
        let mut s = FlowState::sphere(&grid, 1.0, [0.0; 3], 0.0);
        eprintln!("--- factor {factor}");
        let mut next_report = 0.0;
        for _ in 0..400_000u64 {
            let c = match curvature_field(&s) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("died: {e} at t={}", s.t);
                    break;
                }
            };
            let wmin = c.w_min.iter().cloned().fold(f64::INFINITY, f64::min);
            let dt = factor * wmin * wmin / grid.stability_sum();
            let spread = s.sigma.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - s.sigma.iter().cloned().fold(f64::INFINITY, f64::min);
            if s.t >= next_report || spread > 1e-4 {
                eprintln!("t={:.5} spread={:.3e} wmin={:.4}", s.t, spread, wmin);
                next_report = s.t + 0.005;
            }
            if spread > 1e-4 || s.t >= 0.035 || wmin < 0.3 {
                break;
            }
            for (sig, h) in s.sigma.iter_mut().zip(&c.h) {
                *sig -= dt * h;
            }
            s.t += dt;
        }
    }
}
