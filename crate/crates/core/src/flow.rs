//! Mean curvature flow in the Gauss-map gauge: the state is the support
//! function sampled on a direction grid, the update is `σ ← σ − dt·H` with
//! `H = trace(W⁻¹)` from the discrete radii matrix `W = ∇̄²σ + σ·g`, stepped
//! by an explicit Heun pair under an adaptive `dt ≤ c·λ_min²·h²` bound with
//! halving on rejection.

use crate::grid::GridSpec;
use crate::vec3::{axpy, dot, normalize, sym2_eigenvalues, Vec3};
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;
use thiserror::Error;

/// Convexity slack allowed by the state invariant.
pub const W_INVARIANT_TOL: f64 = -1e-6;

/// Minimal flatness floor for states with no recorded mollification scale.
pub const FLAT_FLOOR_MIN: f64 = 1e-6;

/// A node is declared genuinely nonconvex (not just a flat-contact fit
/// artifact) when its small radii eigenvalue drops below this fraction of
/// the large one.
pub const NONCONVEX_GUARD: f64 = 0.05;

#[derive(Debug, Error)]
pub enum FlowError {
    #[error("radii matrix not invertible at node {node} (min eigenvalue {eig:.3e})")]
    Nonconvex { node: usize, eig: f64 },
    #[error("time step underflow at t = {t} (dt fell below {floor:.1e})")]
    Stiffness {
        t: f64,
        floor: f64,
        /// Everything integrated before the failure.
        partial: Box<FlowTrajectory>,
    },
    #[error("step budget of {0} exceeded")]
    MaxSteps(u64),
    #[error("trajectory has no recorded extinction time")]
    NoExtinction,
    #[error("state has no recorded tip direction")]
    NoTipDirection,
    #[error("tip support does not cross zero inside the recorded window")]
    NoTipCrossing,
    #[error("state invariant violated: {0}")]
    InvariantViolation(String),
}

/// How a trajectory's clock has been normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeNormalization {
    /// Times shifted so the recorded extinction happens at t = 0.
    ExtinctionAtZero,
    /// Times and space shifted so the tip reaches the origin at t = 0.
    TipAtOrigin,
}

impl TimeNormalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            TimeNormalization::ExtinctionAtZero => "extinction_at_zero",
            TimeNormalization::TipAtOrigin => "tip_at_origin",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "extinction_at_zero" => Some(TimeNormalization::ExtinctionAtZero),
            "tip_at_origin" => Some(TimeNormalization::TipAtOrigin),
            _ => None,
        }
    }
}

/// Seed provenance carried by every state and persisted with trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedMeta {
    /// Free-form seed family tag ("circle", "pancake-slice", "polytope-seed", ...).
    pub kind: String,
    /// Configuration scale R (0 when not applicable).
    pub scale_r: f64,
    /// Mollification length ε.
    pub eps: f64,
    /// Recorded widening of the slab beyond π (ε plus any perturbation).
    pub slab_excess: f64,
    /// Whether slab-confinement checks apply to this run.
    pub slab_confined: bool,
    /// Attached polytope, as its spec string, when the seed came from one.
    pub polytope_spec: Option<String>,
    /// Distinguished midplane vertex direction (unbounded seeds).
    pub tip_direction: Option<Vec3>,
    /// Doubling reflection: (midplane direction e, height L).
    pub doubling: Option<(Vec3, f64)>,
    /// Normalization applied to the trajectory this state belongs to.
    pub normalization: Option<TimeNormalization>,
}

impl SeedMeta {
    pub fn exact(kind: &str, scale_r: f64) -> SeedMeta {
        SeedMeta {
            kind: kind.to_string(),
            scale_r,
            eps: 0.0,
            slab_excess: 0.0,
            slab_confined: matches!(kind, "pancake-slice" | "angenent"),
            polytope_spec: None,
            tip_direction: None,
            doubling: None,
            normalization: None,
        }
    }
}

/// Support function on a grid at a time stamp.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub grid: Arc<GridSpec>,
    pub sigma: Vec<f64>,
    pub t: f64,
    pub meta: SeedMeta,
}

/// Per-node curvature data of one state.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub h: Vec<f64>,
    pub w_min: Vec<f64>,
    pub w_max: Vec<f64>,
    /// Whether the small radii eigenvalue was fully inverted at the node.
    /// Untrusted nodes sit at flat contact structure (facets of the body in
    /// Gauss space) where the fitted small eigenvalue is below the state's
    /// flatness floor; there the flat direction contributes nothing to H.
    pub trusted: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct Controls {
    /// Stop time; `None` runs to extinction.
    pub t_end: Option<f64>,
    pub dt_max: f64,
    /// Safety constant c in `dt ≤ c·λ_min²·h²`.
    pub safety: f64,
    /// Snapshot spacing in flow time.
    pub cadence: f64,
    /// Extinction threshold: mean width below this multiple of the grid
    /// spacing (the Hessian fit is noise past that point).
    pub extinction_width_factor: f64,
    pub max_steps: u64,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            t_end: None,
            dt_max: 1e-2,
            safety: 0.1,
            cadence: 0.25,
            extinction_width_factor: 10.0,
            max_steps: 50_000_000,
        }
    }
}

/// Time-ordered snapshots with their curvature fields.
#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub snapshots: Vec<FlowState>,
    pub h_fields: Vec<Vec<f64>>,
    pub extinction_time: Option<f64>,
    pub controls: Controls,
}

impl FlowState {
    pub fn from_support_fn(
        grid: &Arc<GridSpec>,
        t: f64,
        meta: SeedMeta,
        f: impl Fn(Vec3) -> f64,
    ) -> FlowState {
        let sigma = grid.directions().iter().map(|z| f(*z)).collect();
        FlowState {
            grid: Arc::clone(grid),
            sigma,
            t,
            meta,
        }
    }

    /// Sphere of radius r about `center`.
    pub fn sphere(grid: &Arc<GridSpec>, r: f64, center: Vec3, t: f64) -> FlowState {
        Self::from_support_fn(grid, t, SeedMeta::exact("sphere", r), |z| {
            r + dot(z, center)
        })
    }

    pub fn node_count(&self) -> usize {
        self.sigma.len()
    }

    /// Mean width `2·avg σ` under the grid quadrature.
    pub fn mean_width(&self) -> f64 {
        let wsum: f64 = self.grid.weights().iter().sum();
        let s: f64 = self
            .sigma
            .iter()
            .zip(self.grid.weights())
            .map(|(s, w)| s * w)
            .sum();
        2.0 * s / wsum
    }

    /// Support-envelope membership: p lies in the discrete body iff it
    /// satisfies every node halfspace.
    pub fn envelope_contains(&self, p: Vec3) -> bool {
        self.grid
            .directions()
            .iter()
            .zip(&self.sigma)
            .all(|(z, s)| dot(*z, p) <= *s + 1e-12)
    }

    /// Extent of the discrete body along `dir` through `base`: the interval
    /// {h : base + h·dir satisfies every node halfspace}. None when empty.
    pub fn extent_along(&self, base: Vec3, dir: Vec3) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (z, s) in self.grid.directions().iter().zip(&self.sigma) {
            let denom = dot(*z, dir);
            let room = s - dot(*z, base);
            if denom.abs() < 1e-14 {
                if room < -1e-12 {
                    return None;
                }
                continue;
            }
            let bound = room / denom;
            if denom > 0.0 {
                hi = hi.min(bound);
            } else {
                lo = lo.max(bound);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }

    /// Check the state invariants: W positive semidefinite within tolerance
    /// at every trusted node (flat-contact nodes carry fit artifacts and are
    /// excluded) and, for slab-confined runs, |σ(±e₁)| ≤ π/2 + recorded
    /// excess.
    pub fn validate(&self) -> Result<(), FlowError> {
        let curv = curvature_field(self)?;
        for (node, (&eig, &ok)) in curv.w_min.iter().zip(&curv.trusted).enumerate() {
            if ok && eig < W_INVARIANT_TOL {
                return Err(FlowError::InvariantViolation(format!(
                    "W has eigenvalue {eig:.3e} at node {node}"
                )));
            }
        }
        if self.meta.slab_confined {
            let budget = FRAC_PI_2 + self.meta.slab_excess + 1e-9;
            for pole in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]] {
                let s = self.grid.interpolate(&self.sigma, pole);
                if s.abs() > budget {
                    return Err(FlowError::InvariantViolation(format!(
                        "slab support {s} exceeds budget {budget}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Flatness floor of a state: half the recorded mollification scale. Fitted
/// radii eigenvalues below it are flat-contact artifacts (the true radius at
/// a facet contact is huge, but the quadratic fit of the conical support
/// structure there is unreliable), so their inverse is tapered out of H.
pub fn flat_floor(meta: &SeedMeta) -> f64 {
    (0.5 * meta.eps).max(FLAT_FLOOR_MIN)
}

fn taper(lo: f64, floor: f64) -> f64 {
    if lo >= floor {
        1.0
    } else if lo <= 0.5 * floor {
        0.0
    } else {
        let t = (lo - 0.5 * floor) / (0.5 * floor);
        t * t * (3.0 - 2.0 * t)
    }
}

/// Per-node mean curvature and radii-matrix spectrum.
///
/// m = 2 uses the trig-exact radius stencil, m = 3 the precomputed quadratic
/// fit rows. A small eigenvalue below the state's flatness floor is treated
/// as flat contact (zero curvature contribution); one below the nonconvexity
/// guard is an error.
pub fn curvature_field(state: &FlowState) -> Result<CurvatureField, FlowError> {
    let n = state.node_count();
    let mut out = CurvatureField {
        h: vec![0.0; n],
        w_min: vec![0.0; n],
        w_max: vec![0.0; n],
        trusted: vec![true; n],
    };
    curvature_into(state, &mut out).map(|_| out)
}

fn curvature_into(state: &FlowState, out: &mut CurvatureField) -> Result<(), FlowError> {
    let grid = &state.grid;
    let sigma = &state.sigma;
    let n = sigma.len();
    let floor = flat_floor(&state.meta);
    if grid.ambient_dim() == 2 {
        let h_ang = 2.0 * std::f64::consts::PI / n as f64;
        let (cos_h, denom) = (h_ang.cos(), 2.0 - 2.0 * h_ang.cos());
        for i in 0..n {
            let (prev, next) = (sigma[(i + n - 1) % n], sigma[(i + 1) % n]);
            let rho = (prev + next - 2.0 * cos_h * sigma[i]) / denom;
            if rho < -NONCONVEX_GUARD {
                return Err(FlowError::Nonconvex { node: i, eig: rho });
            }
            let w = taper(rho, floor);
            out.w_min[i] = rho;
            out.w_max[i] = rho;
            out.trusted[i] = w == 1.0;
            out.h[i] = if w > 0.0 { w / rho } else { 0.0 };
        }
    } else {
        let rows = grid.fit_rows();
        let stencils = grid.stencils();
        for i in 0..n {
            let st = &stencils[i];
            let r = &rows[i];
            let (mut w11, mut w12, mut w22) = (0.0, 0.0, 0.0);
            for (k, &j) in st.iter().enumerate() {
                let s = sigma[j as usize];
                w11 += r.w11[k] * s;
                w12 += r.w12[k] * s;
                w22 += r.w22[k] * s;
            }
            let (lo, hi) = sym2_eigenvalues(w11, w12, w22);
            if hi <= 0.0 || lo < -(NONCONVEX_GUARD * hi).max(FLAT_FLOOR_MIN) {
                return Err(FlowError::Nonconvex { node: i, eig: lo });
            }
            let w = taper(lo, floor);
            out.w_min[i] = lo;
            out.w_max[i] = hi;
            out.trusted[i] = w == 1.0;
            out.h[i] = 1.0 / hi + if w > 0.0 { w / lo } else { 0.0 };
        }
    }
    Ok(())
}

/// Boundary point in the Gauss-map parametrization: `X(z) = σ(z)z + ∇̄σ(z)`.
pub fn gauss_point(state: &FlowState, node: usize) -> Vec3 {
    let grid = &state.grid;
    let z = grid.directions()[node];
    let n = state.node_count();
    if grid.ambient_dim() == 2 {
        let h_ang = 2.0 * std::f64::consts::PI / n as f64;
        let ds = (state.sigma[(node + 1) % n] - state.sigma[(node + n - 1) % n])
            / (2.0 * h_ang.sin());
        let tangent = [-z[1], z[0], 0.0];
        axpy(crate::vec3::scale(z, state.sigma[node]), ds, tangent)
    } else {
        let st = &grid.stencils()[node];
        let r = &grid.fit_rows()[node];
        let (mut g1, mut g2) = (0.0, 0.0);
        for (k, &j) in st.iter().enumerate() {
            let s = state.sigma[j as usize];
            g1 += r.grad1[k] * s;
            g2 += r.grad2[k] * s;
        }
        let [t1, t2] = grid.tangent_frame(node);
        axpy(
            axpy(crate::vec3::scale(z, state.sigma[node]), g1, t1),
            g2,
            t2,
        )
    }
}

/// One explicit Heun step. `dt = 0` returns the state unchanged; a post-step
/// radii-matrix violation rejects the step.
pub fn step(state: &FlowState, dt: f64) -> Result<FlowState, FlowError> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let h0 = curvature_field(state)?;
    let mut predictor = state.clone();
    for (s, h) in predictor.sigma.iter_mut().zip(&h0.h) {
        *s -= dt * h;
    }
    predictor.t = state.t + dt;
    let h1 = curvature_field(&predictor)?;
    let mut out = state.clone();
    for ((s, ha), hb) in out.sigma.iter_mut().zip(&h0.h).zip(&h1.h) {
        *s -= 0.5 * dt * (ha + hb);
    }
    out.t = state.t + dt;
    // post-step validation doubles as the caller's next curvature evaluation
    curvature_field(&out)?;
    Ok(out)
}

/// Integrate with adaptive explicit stepping until `t_end`, extinction, or
/// failure. Snapshots are recorded at the cadence plus at both endpoints.
pub fn run(state: &FlowState, controls: &Controls) -> Result<FlowTrajectory, FlowError> {
    let grid = Arc::clone(&state.grid);
    let n = state.node_count();
    let m = grid.ambient_dim() as f64;
    let floor = flat_floor(&state.meta);
    const DT_FLOOR: f64 = 1e-12;

    let mut traj = FlowTrajectory {
        snapshots: Vec::new(),
        h_fields: Vec::new(),
        extinction_time: None,
        controls: controls.clone(),
    };
    let mut current = state.clone();
    let mut curv = CurvatureField {
        h: vec![0.0; n],
        w_min: vec![0.0; n],
        w_max: vec![0.0; n],
        trusted: vec![true; n],
    };
    curvature_into(&current, &mut curv)?;

    let mut next_snapshot = current.t;
    let mut steps: u64 = 0;
    let mut scratch = current.sigma.clone();
    let mut pred = current.clone();
    let mut pred_curv = curv.clone();

    loop {
        if current.t >= next_snapshot - 1e-13 {
            traj.snapshots.push(current.clone());
            traj.h_fields.push(curv.h.clone());
            next_snapshot = current.t + controls.cadence;
        }

        // extinction test
        if controls.t_end.is_none() || current.meta.slab_confined {
            let width = current.mean_width();
            if width < controls.extinction_width_factor * grid.max_spacing() {
                // complete the collapse as a shrinking sphere of the
                // remaining mean radius
                let remaining = (width / 2.0).powi(2) / (2.0 * (m - 1.0));
                traj.extinction_time = Some(current.t + remaining);
                record_final(&mut traj, &current, &curv);
                return Ok(traj);
            }
        }
        if let Some(t_end) = controls.t_end {
            if current.t >= t_end - 1e-13 {
                record_final(&mut traj, &current, &curv);
                return Ok(traj);
            }
        }
        if steps >= controls.max_steps {
            return Err(FlowError::MaxSteps(controls.max_steps));
        }

        // effective smallest inverted radius: flat-contact nodes are capped
        // at the floor since their flat direction is not inverted
        let lambda = curv
            .w_min
            .iter()
            .map(|&lo| lo.max(0.5 * floor))
            .fold(f64::INFINITY, f64::min);
        let mut dt = (2.0 * controls.safety * lambda * lambda / grid.stability_sum())
            .min(controls.dt_max);
        if let Some(t_end) = controls.t_end {
            dt = dt.min(t_end - current.t);
        }
        dt = dt.min((next_snapshot - current.t).max(DT_FLOOR));

        // attempt the step, halving on rejection
        loop {
            if dt < DT_FLOOR {
                return Err(FlowError::Stiffness {
                    t: current.t,
                    floor: DT_FLOOR,
                    partial: Box::new(traj),
                });
            }
            for (p, (s, h)) in scratch
                .iter_mut()
                .zip(current.sigma.iter().zip(curv.h.iter()))
            {
                *p = s - dt * h;
            }
            std::mem::swap(&mut pred.sigma, &mut scratch);
            pred.t = current.t + dt;
            if curvature_into(&pred, &mut pred_curv).is_err() {
                std::mem::swap(&mut pred.sigma, &mut scratch);
                dt *= 0.5;
                continue;
            }
            // corrector: σ ← σ − dt/2 (H₀ + H₁); pred.sigma currently holds
            // the predictor, rebuild it into the corrected state
            for ((p, s), (h0, h1)) in pred
                .sigma
                .iter_mut()
                .zip(current.sigma.iter())
                .zip(curv.h.iter().zip(pred_curv.h.iter()))
            {
                *p = s - 0.5 * dt * (h0 + h1);
            }
            if curvature_into(&pred, &mut pred_curv).is_err() {
                // restore scratch ownership and retry smaller
                std::mem::swap(&mut pred.sigma, &mut scratch);
                dt *= 0.5;
                continue;
            }
            break;
        }

        std::mem::swap(&mut current.sigma, &mut pred.sigma);
        current.t = pred.t;
        std::mem::swap(&mut curv, &mut pred_curv);
        scratch.copy_from_slice(&current.sigma);
        steps += 1;
    }
}

fn record_final(traj: &mut FlowTrajectory, state: &FlowState, curv: &CurvatureField) {
    let record = traj
        .snapshots
        .last()
        .map(|s| (state.t - s.t).abs() > 1e-12)
        .unwrap_or(true);
    if record {
        traj.snapshots.push(state.clone());
        traj.h_fields.push(curv.h.clone());
    }
}

/// Shift a trajectory's clock (and, in tip mode, its origin).
pub fn normalize_time(
    traj: &FlowTrajectory,
    mode: TimeNormalization,
) -> Result<FlowTrajectory, FlowError> {
    let mut out = traj.clone();
    match mode {
        TimeNormalization::ExtinctionAtZero => {
            let t_ext = traj.extinction_time.ok_or(FlowError::NoExtinction)?;
            for snap in &mut out.snapshots {
                snap.t -= t_ext;
                snap.meta.normalization = Some(mode);
            }
            out.extinction_time = Some(0.0);
        }
        TimeNormalization::TipAtOrigin => {
            let first = traj.snapshots.first().ok_or(FlowError::NoTipCrossing)?;
            let tip_mid = first.meta.tip_direction.ok_or(FlowError::NoTipDirection)?;
            let tip = normalize(tip_mid);
            let node = first.grid.nearest_node(tip);
            let series: Vec<(f64, f64)> = traj
                .snapshots
                .iter()
                .map(|s| (s.t, s.grid.interpolate(&s.sigma, tip)))
                .collect();
            let mut crossing = None;
            for w in series.windows(2) {
                let ((t0, s0), (t1, s1)) = (w[0], w[1]);
                if s0 >= 0.0 && s1 < 0.0 {
                    let frac = s0 / (s0 - s1);
                    crossing = Some((t0 + frac * (t1 - t0), frac));
                    break;
                }
            }
            // accept an endpoint already at zero
            if crossing.is_none() {
                if let Some(&(t0, s0)) = series.first() {
                    if s0.abs() < 1e-9 {
                        crossing = Some((t0, 0.0));
                    }
                }
            }
            let (t_star, _) = crossing.ok_or(FlowError::NoTipCrossing)?;
            // interpolate the tip point at t* and recentre
            let (mut before, mut after) = (0usize, 0usize);
            for (i, s) in traj.snapshots.iter().enumerate() {
                if s.t <= t_star {
                    before = i;
                }
            }
            for (i, s) in traj.snapshots.iter().enumerate().rev() {
                if s.t >= t_star {
                    after = i;
                }
            }
            let xa = gauss_point(&traj.snapshots[before], node);
            let xb = gauss_point(&traj.snapshots[after], node);
            let span = traj.snapshots[after].t - traj.snapshots[before].t;
            let frac = if span.abs() < 1e-15 {
                0.0
            } else {
                (t_star - traj.snapshots[before].t) / span
            };
            let center = [
                xa[0] + frac * (xb[0] - xa[0]),
                xa[1] + frac * (xb[1] - xa[1]),
                xa[2] + frac * (xb[2] - xa[2]),
            ];
            for snap in &mut out.snapshots {
                snap.t -= t_star;
                for (s, z) in snap.sigma.iter_mut().zip(snap.grid.directions()) {
                    *s -= dot(*z, center);
                }
                snap.meta.normalization = Some(mode);
            }
            if let Some(ext) = out.extinction_time.as_mut() {
                *ext -= t_star;
            }
        }
    }
    Ok(out)
}

impl FlowTrajectory {
    pub fn validate(&self) -> Result<(), FlowError> {
        for w in self.snapshots.windows(2) {
            if w[1].t <= w[0].t {
                return Err(FlowError::InvariantViolation(format!(
                    "snapshot times not strictly increasing: {} then {}",
                    w[0].t, w[1].t
                )));
            }
        }
        for s in &self.snapshots {
            s.validate()?;
        }
        Ok(())
    }

    /// Per-node H of the snapshot at index i (as recorded during the run).
    pub fn h_field(&self, i: usize) -> &[f64] {
        &self.h_fields[i]
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::grid::GridSpec;
    use std::f64::consts::PI;

    fn circle_state(r: f64, n: usize) -> FlowState {
        FlowState::sphere(&GridSpec::circle(n), r, [0.0, 0.0, 0.0], 0.0)
    }

    #[test]
    fn sphere_curvature_is_exact() {
        for (grid, m) in [
            (GridSpec::circle(128), 2.0),
            (GridSpec::icosphere(6, None), 3.0),
        ] {
            let r = 0.8;
            let state = FlowState::sphere(&grid, r, [0.0, 0.0, 0.0], 0.0);
            let c = curvature_field(&state).unwrap();
            for i in 0..state.node_count() {
                assert!(((c.h[i]) - (m - 1.0) / r).abs() < 1e-9);
                assert!((c.w_min[i] - r).abs() < 1e-9);
                assert!((c.w_max[i] - r).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn translated_sphere_gauss_points() {
        let center = [0.2, -0.1, 0.3];
        let grid = GridSpec::icosphere(5, None);
        let state = FlowState::sphere(&grid, 1.3, center, 0.0);
        for node in [0usize, 7, 100, 200] {
            let x = gauss_point(&state, node);
            let z = grid.directions()[node];
            let expect = axpy(center, 1.3, z);
            assert!(crate::vec3::norm(crate::vec3::sub(x, expect)) < 1e-9);
            // support consistency
            assert!((dot(x, z) - state.sigma[node]).abs() < 1e-12);
            for (w, s) in grid.directions().iter().zip(&state.sigma) {
                assert!(dot(x, *w) <= s + 1e-6);
            }
        }
        // circle version
        let gc = GridSpec::circle(256);
        let sc = FlowState::sphere(&gc, 0.9, [0.1, -0.2, 0.0], 0.0);
        for node in [0usize, 31, 200] {
            let x = gauss_point(&sc, node);
            let z = gc.directions()[node];
            assert!((x[0] - (0.1 + 0.9 * z[0])).abs() < 1e-10);
            assert!((x[1] - (-0.2 + 0.9 * z[1])).abs() < 1e-10);
        }
    }

    #[test]
    fn angenent_curvature_matches_closed_form() {
        let t0 = -2.0;
        let grid = GridSpec::circle(512);
        let state = FlowState::from_support_fn(
            &grid,
            t0,
            SeedMeta::exact("angenent", 0.0),
            |z| {
                let ang = z[0].atan2(z[1]);
                exact::angenent_support(ang, t0).unwrap()
            },
        );
        let c = curvature_field(&state).unwrap();
        for (i, z) in grid.directions().iter().enumerate() {
            // node normal angle ↔ turning angle: ν(θ) = (sin θ, cos θ)
            let theta = z[0].atan2(z[1]);
            let kappa = exact::angenent_curvature(&exact::AngenentParams {
                t: t0,
                h: 1.0,
                theta,
            })
            .unwrap();
            assert!(
                (c.h[i] - kappa).abs() < 1e-3,
                "H mismatch {:.2e} at node {i}",
                (c.h[i] - kappa).abs()
            );
        }
        // reconstructed points match the closed-form immersion
        for i in (0..512).step_by(17) {
            let x = gauss_point(&state, i);
            let theta = grid.directions()[i][0].atan2(grid.directions()[i][1]);
            let p = exact::angenent_point(&exact::AngenentParams {
                t: t0,
                h: 1.0,
                theta,
            })
            .unwrap();
            assert!((x[0] - p.x).abs() < 1e-3);
            assert!((x[1] - p.midplane[0]).abs() < 1e-3);
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let state = circle_state(1.0, 64);
        let out = step(&state, 0.0).unwrap();
        assert_eq!(out.sigma, state.sigma);
        assert_eq!(out.t, state.t);
    }

    #[test]
    fn circle_tracks_exact_radius() {
        let state = circle_state(1.0, 512);
        let controls = Controls {
            t_end: Some(0.375),
            dt_max: 1e-4,
            cadence: 0.05,
            ..Controls::default()
        };
        let traj = run(&state, &controls).unwrap();
        let last = traj.snapshots.last().unwrap();
        assert!((last.t - 0.375).abs() < 1e-10);
        for s in &last.sigma {
            assert!((s - 0.5).abs() < 1e-4, "radius error {:.2e}", (s - 0.5).abs());
        }
    }

    #[test]
    fn circle_extinction_time() {
        let state = circle_state(1.0, 512);
        let controls = Controls {
            t_end: None,
            dt_max: 1e-3,
            cadence: 0.05,
            ..Controls::default()
        };
        let traj = run(&state, &controls).unwrap();
        let t_ext = traj.extinction_time.expect("extinct");
        assert!((t_ext - 0.5).abs() < 1e-3, "extinction at {t_ext}");
        let norm = normalize_time(&traj, TimeNormalization::ExtinctionAtZero).unwrap();
        for (s, h) in norm.snapshots.iter().zip(&norm.h_fields) {
            assert!(s.t < 0.0);
            let want = (-2.0 * s.t).sqrt();
            assert!((s.sigma[0] - want).abs() < 2e-3);
            assert!((h[0] - 1.0 / want).abs() < 2e-2 * (1.0 / want));
        }
    }

    #[test]
    fn sphere_tracks_exact_radius_m3() {
        let grid = GridSpec::icosphere(16, None);
        let state = FlowState::sphere(&grid, 1.0, [0.0; 3], 0.0);
        let controls = Controls {
            t_end: Some(0.1875),
            dt_max: 1e-3,
            cadence: 0.05,
            ..Controls::default()
        };
        let traj = run(&state, &controls).unwrap();
        let last = traj.snapshots.last().unwrap();
        for s in &last.sigma {
            assert!((s - 0.5).abs() < 1e-4);
        }
    }

    #[test]
    fn normalize_tip_mode_is_idempotent() {
        // synthetic translating lens moving along −e₂ at unit speed
        let grid = GridSpec::circle(128);
        let profile = |z: Vec3, t: f64| 1.0 + 0.3 * z[0] * z[0] - t * z[1];
        let mut meta = SeedMeta::exact("synthetic-translator", 1.0);
        meta.tip_direction = Some([0.0, 1.0, 0.0]);
        let snapshots: Vec<FlowState> = (0..9)
            .map(|k| {
                let t = k as f64 * 0.5;
                FlowState::from_support_fn(&grid, t, meta.clone(), |z| profile(z, t))
            })
            .collect();
        let h_fields = vec![vec![0.0; 128]; snapshots.len()];
        let traj = FlowTrajectory {
            snapshots,
            h_fields,
            extinction_time: None,
            controls: Controls::default(),
        };
        let once = normalize_time(&traj, TimeNormalization::TipAtOrigin).unwrap();
        // tip support crosses zero at the new t = 0
        let tip = [0.0, 1.0, 0.0];
        let series: Vec<(f64, f64)> = once
            .snapshots
            .iter()
            .map(|s| (s.t, s.grid.interpolate(&s.sigma, tip)))
            .collect();
        let mut at_zero = f64::NAN;
        for w in series.windows(2) {
            if w[0].0 <= 0.0 && w[1].0 >= 0.0 {
                let f = -w[0].0 / (w[1].0 - w[0].0);
                at_zero = w[0].1 + f * (w[1].1 - w[0].1);
            }
        }
        assert!(at_zero.abs() < 1e-9, "tip support at origin: {at_zero}");
        let twice = normalize_time(&once, TimeNormalization::TipAtOrigin).unwrap();
        for (a, b) in once.snapshots.iter().zip(&twice.snapshots) {
            assert!((a.t - b.t).abs() < 1e-9);
            for (x, y) in a.sigma.iter().zip(&b.sigma) {
                assert!((x - y).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn extent_along_recovers_sphere_chord() {
        let grid = GridSpec::icosphere(8, None);
        let state = FlowState::sphere(&grid, 1.0, [0.0; 3], 0.0);
        let (lo, hi) = state
            .extent_along([0.0, 0.3, 0.0], [1.0, 0.0, 0.0])
            .unwrap();
        let half = (1.0f64 - 0.09).sqrt();
        // discrete envelope circumscribes the sphere: error O(h²)
        assert!((hi - half).abs() < 6e-3 && (lo + half).abs() < 6e-3);
        assert!(state.envelope_contains([0.0, 0.3, 0.0]));
        assert!(!state.envelope_contains([0.0, 1.2, 0.0]));
    }

    #[test]
    fn grim_cross_section_translates() {
        // doubled Grim region in the plane: {y ≤ R + log cos x} ∩ its
        // reflection across y = −(L − R)... built directly from the two
        // Grim graphs; interior-window drift over unit time stays small.
        let grid = GridSpec::circle(512);
        let r = 4.0;
        let l = 16.0;
        let eps = 0.02;
        let state = FlowState::from_support_fn(
            &grid,
            0.0,
            SeedMeta {
                kind: "grim-lens".into(),
                scale_r: r,
                eps,
                slab_excess: eps,
                slab_confined: true,
                polytope_spec: None,
                tip_direction: None,
                doubling: Some(([0.0, -1.0, 0.0], l)),
                normalization: None,
            },
            |z| grim_lens_support(z, r, l) + eps,
        );
        let controls = Controls {
            t_end: Some(1.0),
            dt_max: 1e-3,
            cadence: 0.25,
            safety: 0.1,
            ..Controls::default()
        };
        let traj = run(&state, &controls).unwrap();
        let first = &traj.snapshots[0];
        let last = traj.snapshots.last().unwrap();
        assert!((last.t - 1.0).abs() < 1e-10);
        // interior window: normals pointing into the lower Grim piece
        for (i, z) in grid.directions().iter().enumerate() {
            if z[1] > 0.3 {
                let drift = last.sigma[i] - first.sigma[i] + (last.t - first.t) * z[1];
                assert!(
                    drift.abs() < 1e-3,
                    "drift {drift:.2e} at node {i} (z = {z:?})"
                );
            }
        }
    }

    /// Support of {(x, y): y ≤ R + log cos x} ∩ {y ≥ −2L − R − log cos x}:
    /// the intersection of a downward Grim region (facet normal +e₂) and its
    /// reflection across y = −L.
    pub(crate) fn grim_lens_support(z: Vec3, r: f64, l: f64) -> f64 {
        let (zx, zy) = (z[0], z[1]);
        let value = |x: f64| -> f64 {
            let c = r + x.cos().ln();
            // section in y: [−2l − r − log cos x, r + log cos x]
            let upper = c;
            let lower = -2.0 * l - c;
            if upper < lower {
                return f64::NEG_INFINITY;
            }
            zx * x + if zy >= 0.0 { zy * upper } else { zy * lower }
        };
        let mut best = f64::NEG_INFINITY;
        const COARSE: usize = 2048;
        let mut best_x = 0.0;
        for i in 0..=COARSE {
            let x = -FRAC_PI_2 + PI * i as f64 / COARSE as f64;
            let v = value(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
        let step = PI / COARSE as f64;
        let (mut lo, mut hi) = (best_x - step, best_x + step);
        for _ in 0..64 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if value(m1) < value(m2) {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        value(0.5 * (lo + hi))
    }
}
