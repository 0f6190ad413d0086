//! Initial hypersurfaces from circumscribed polytopes: the boundary of the
//! intersection of translated Grim regions, one per facet,
//! `{p : ⟨p_mid, z_f⟩ ≤ R + log cos x}`, optionally doubled by reflection for
//! unbounded polytopes, sampled onto a direction grid and regularized by an
//! outer parallel body at distance ε.

use crate::exact::SlabPoint;
use crate::flow::{curvature_field, FlowState, SeedMeta};
use crate::grid::GridSpec;
use crate::polytope::{CircumscribedPolytope, DegeneracyClass, HalfspaceBody, SupportValue};
use crate::vec3::{axpy, dot, normalize, scale, Vec3};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("invalid seed spec: {0}")]
    InvalidSpec(String),
    #[error("unbounded polytope needs a doubling height L")]
    DoublingRequired,
    #[error("fully degenerate polytopes recede in opposite directions; a single reflection cannot close them")]
    UnsupportedDegeneracy,
    #[error("polytope dimension {n} needs ambient dimension {}, grid has {m}", n + 1)]
    AmbientMismatch { n: usize, m: usize },
    #[error("grid too coarse for seeding: {have} nodes, need at least {need}")]
    GridTooCoarse { have: usize, need: usize },
    #[error("mollification floor violated at node {node}: min radii eigenvalue {eig:.3e} < eps/2")]
    MollificationFloor { node: usize, eig: f64 },
}

/// Configuration of one Grim-piece seed.
#[derive(Debug, Clone)]
pub struct SeedSpec {
    pub polytope: CircumscribedPolytope,
    /// Spec string recorded in run metadata (e.g. `regular k=4`).
    pub polytope_spec: String,
    /// Facet translation scale R.
    pub r: f64,
    /// Outer parallel-body distance (mollification scale).
    pub eps: f64,
    /// Reflection height for unbounded polytopes.
    pub doubling_l: Option<f64>,
    /// Amplitude of the odd pole perturbation `a·⟨z, e₁⟩³` added after
    /// mollification (midplane-symmetry experiments).
    pub pole_perturbation: f64,
}

impl SeedSpec {
    pub fn new(polytope: CircumscribedPolytope, spec: &str, r: f64, eps: f64) -> SeedSpec {
        SeedSpec {
            polytope,
            polytope_spec: spec.to_string(),
            r,
            eps,
            doubling_l: None,
            pole_perturbation: 0.0,
        }
    }

    pub fn with_doubling(mut self, l: f64) -> SeedSpec {
        self.doubling_l = Some(l);
        self
    }

    /// Default doubling height 4R: far enough that the reflected cap stays
    /// clear of the studied region at desk scale.
    pub fn with_default_doubling(mut self) -> SeedSpec {
        self.doubling_l = Some(4.0 * self.r);
        self
    }

    pub fn validate(&self) -> Result<(), SeedError> {
        if !(self.r > 0.0) {
            return Err(SeedError::InvalidSpec(format!("R must be > 0, got {}", self.r)));
        }
        if self.eps < 0.0 || self.eps >= 0.05 * self.r {
            return Err(SeedError::InvalidSpec(format!(
                "eps must lie in [0, 0.05·R) = [0, {}), got {}",
                0.05 * self.r,
                self.eps
            )));
        }
        if let Some(l) = self.doubling_l {
            if l <= 2.0 * self.r {
                return Err(SeedError::InvalidSpec(format!(
                    "doubling height L = {l} must exceed 2R = {}",
                    2.0 * self.r
                )));
            }
        }
        Ok(())
    }

    /// Reflection direction for the doubled construction: the hemisphere
    /// witness e with `max_f ⟨z_f, e⟩ ≤ 0`.
    pub fn doubling_direction(&self) -> Option<Vec3> {
        match self.polytope.classify() {
            DegeneracyClass::NondegenerateUnbounded { witness }
            | DegeneracyClass::SemiDegenerate { witness } => Some(*witness),
            _ => None,
        }
    }

    /// Distinguished tip direction: the cone vertex direction when there is
    /// one, else the truncation facet normal of a truncated cone (the facet
    /// whose normal has maximal pairing with minus the doubling witness).
    pub fn tip_direction(&self) -> Option<Vec3> {
        if let Some(v) = self.polytope.cone_vertex_direction() {
            return Some(v);
        }
        let e = self.doubling_direction()?;
        self.polytope
            .facet_normals()
            .iter()
            .cloned()
            .max_by(|a, b| dot(*a, scale(e, -1.0)).total_cmp(&dot(*b, scale(e, -1.0))))
    }

    fn section_offset(&self, x: f64) -> Option<f64> {
        if x.abs() >= FRAC_PI_2 {
            return None;
        }
        Some(self.r + x.cos().ln())
    }

    /// Midplane section of the (possibly doubled) seed at slab height x, as
    /// a general halfspace intersection.
    fn section(&self, x: f64) -> Option<HalfspaceBody> {
        let c = self.section_offset(x)?;
        let mut normals = self.polytope.facet_normals().to_vec();
        let mut offsets = vec![c; normals.len()];
        if let (Some(l), Some(e)) = (self.doubling_l, self.doubling_direction()) {
            for (z, off) in self
                .polytope
                .facet_normals()
                .iter()
                .map(|z| {
                    let ze = dot(*z, e);
                    (axpy(*z, -2.0 * ze, e), c - 2.0 * l * ze)
                })
                .collect::<Vec<_>>()
            {
                normals.push(normalize(z));
                offsets.push(off);
            }
        }
        Some(HalfspaceBody::new(self.polytope.dim(), normals, offsets))
    }
}

/// Membership oracle for the exact (unmollified) seed body.
pub fn membership(spec: &SeedSpec, p: &SlabPoint) -> bool {
    let Some(c) = spec.section_offset(p.x) else {
        return false;
    };
    let mut m = [0.0; 3];
    for (i, v) in p.midplane.iter().enumerate().take(3) {
        m[i] = *v;
    }
    let direct = spec
        .polytope
        .facet_normals()
        .iter()
        .all(|z| dot(*z, m) <= c + 1e-12);
    if !direct {
        return false;
    }
    match (spec.doubling_l, spec.doubling_direction()) {
        (Some(l), Some(e)) => {
            let reflected = axpy(m, 2.0 * (l - dot(m, e)), e);
            spec.polytope
                .facet_normals()
                .iter()
                .all(|z| dot(*z, reflected) <= c + 1e-12)
        }
        _ => true,
    }
}

/// Support value of the exact seed body in ambient direction z.
///
/// For fixed slab height x the section is a halfspace intersection whose
/// support is exact (vertex enumeration); the outer maximization over x is a
/// concave 1-D problem handled by a coarse scan plus golden-section
/// refinement to 1e−10 in x.
pub fn seed_support(spec: &SeedSpec, z: Vec3) -> SupportValue {
    let z_mid = [0.0, z[1], z[2]];
    let value = |x: f64| -> Option<f64> {
        let section = spec.section(x)?;
        if section.is_empty() {
            return None;
        }
        match section.support(z_mid) {
            SupportValue::Finite(g) => Some(x * z[0] + g),
            SupportValue::Infinite => Some(f64::INFINITY),
        }
    };
    const COARSE: usize = 512;
    let mut best: Option<(usize, f64)> = None;
    let xs: Vec<f64> = (0..=COARSE)
        .map(|i| -FRAC_PI_2 + PI * (i as f64 + 0.5) / (COARSE as f64 + 1.0))
        .collect();
    for (i, &x) in xs.iter().enumerate() {
        if let Some(v) = value(x) {
            if v == f64::INFINITY {
                return SupportValue::Infinite;
            }
            if best.map(|(_, b)| v > b).unwrap_or(true) {
                best = Some((i, v));
            }
        }
    }
    let Some((i0, _)) = best else {
        return SupportValue::Infinite; // unreachable for valid specs
    };
    let step = PI / (COARSE as f64 + 1.0);
    let mut lo = (xs[i0] - step).max(-FRAC_PI_2 + 1e-15);
    let mut hi = (xs[i0] + step).min(FRAC_PI_2 - 1e-15);
    let eval = |x: f64| value(x).unwrap_or(f64::NEG_INFINITY);
    for _ in 0..90 {
        if hi - lo < 1e-12 {
            break;
        }
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if eval(m1) < eval(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    SupportValue::Finite(eval(0.5 * (lo + hi)))
}

/// Minimum node count for seeded grids: 64 on S¹; on S² an average of one
/// node per cap of angular radius 2°.
pub fn min_seed_nodes(ambient: usize) -> usize {
    if ambient == 2 {
        64
    } else {
        let cap = 2.0f64.to_radians();
        (2.0 / (1.0 - cap.cos())).ceil() as usize
    }
}

/// Sample the seed's support function onto the grid, add the ε parallel
/// body, apply the optional odd pole perturbation, and verify the
/// mollification floor `W ⪰ (ε/2)·I`.
pub fn seed_grid(spec: &SeedSpec, grid: &Arc<GridSpec>) -> Result<FlowState, SeedError> {
    spec.validate()?;
    let n = spec.polytope.dim();
    let m = grid.ambient_dim();
    if n + 1 != m {
        return Err(SeedError::AmbientMismatch { n, m });
    }
    let need = min_seed_nodes(m);
    if grid.node_count() < need {
        return Err(SeedError::GridTooCoarse {
            have: grid.node_count(),
            need,
        });
    }
    match spec.polytope.classify() {
        DegeneracyClass::Bounded => {}
        DegeneracyClass::FullyDegenerate => return Err(SeedError::UnsupportedDegeneracy),
        _ => {
            if spec.doubling_l.is_none() {
                return Err(SeedError::DoublingRequired);
            }
        }
    }
    if spec.eps == 0.0 {
        return Err(SeedError::InvalidSpec(
            "grid seeds need eps > 0 for a positive radii floor".into(),
        ));
    }

    let mut sigma = Vec::with_capacity(grid.node_count());
    for z in grid.directions() {
        match seed_support(spec, *z) {
            SupportValue::Finite(s) => sigma.push(s + spec.eps),
            SupportValue::Infinite => {
                return Err(SeedError::InvalidSpec(
                    "seed support unbounded on the grid; doubling height missing?".into(),
                ))
            }
        }
    }
    if spec.pole_perturbation != 0.0 {
        for (s, z) in sigma.iter_mut().zip(grid.directions()) {
            *s += spec.pole_perturbation * z[0].powi(3);
        }
    }

    let meta = SeedMeta {
        kind: "polytope-seed".to_string(),
        scale_r: spec.r,
        eps: spec.eps,
        slab_excess: spec.eps + spec.pole_perturbation.abs(),
        slab_confined: true,
        polytope_spec: Some(spec.polytope_spec.clone()),
        tip_direction: spec.tip_direction(),
        doubling: spec
            .doubling_l
            .and_then(|l| spec.doubling_direction().map(|e| (e, l))),
        normalization: None,
    };
    let state = FlowState {
        grid: Arc::clone(grid),
        sigma,
        t: 0.0,
        meta,
    };
    let curv = curvature_field(&state)
        .map_err(|e| SeedError::InvalidSpec(format!("seed not convex on the grid: {e}")))?;
    let floor = spec.eps / 2.0;
    for (node, &eig) in curv.w_min.iter().enumerate() {
        if eig < floor {
            return Err(SeedError::MollificationFloor { node, eig });
        }
    }
    Ok(state)
}

/// Outcome of the initial-speed verification on the exact seed.
#[derive(Debug, Clone)]
pub struct SpeedCheckReport {
    /// min over samples and vertices of H − ⟨ν, v⟩ from the facet identity.
    pub min_margin: f64,
    pub samples_used: usize,
    /// Samples that landed on an edge (several active facets) and were
    /// redrawn.
    pub edge_resamples: usize,
}

/// Sample regular points (single active Grim piece) and evaluate the facet
/// identity `H = ⟨ν, z_f⟩` with the analytic normal `(sin x, cos x · z_f)`;
/// reports the minimum of H − ⟨ν, v⟩ over samples and vertices.
pub fn seed_speed_check(
    spec: &SeedSpec,
    sample_count: usize,
    rng_seed: u64,
) -> Result<SpeedCheckReport, SeedError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let p = &spec.polytope;
    let x_limit = (-spec.r).exp().acos();
    let mut min_margin = f64::INFINITY;
    let mut used = 0;
    let mut resamples = 0;

    let facet_faces: Vec<&crate::polytope::Face> =
        p.faces().iter().filter(|f| f.dim == p.dim() - 1).collect();

    while used < sample_count {
        let x = rng.gen_range(-0.98 * x_limit..0.98 * x_limit);
        let c = spec.r + x.cos().ln();
        let fi = used % facet_faces.len();
        let face = facet_faces[fi];
        let f = face.active[0];
        // a point on facet f of the c-scaled section
        let mut m = [0.0; 3];
        if face.vertices.is_empty() {
            continue;
        }
        let mut weights: Vec<f64> = (0..face.vertices.len())
            .map(|_| -rng.gen_range(0.0f64..1.0).max(1e-12).ln())
            .collect();
        let wsum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= wsum;
        }
        for (vi, w) in face.vertices.iter().zip(&weights) {
            m = axpy(m, w * c, p.vertices()[*vi]);
        }
        if !face.bounded {
            // push along a recession ray of the facet
            if let Some(u) = p
                .body()
                .rays
                .iter()
                .find(|u| dot(**u, p.facet_normals()[f]).abs() < 1e-9)
            {
                m = axpy(m, rng.gen_range(0.0..2.0 * spec.r), *u);
            }
        }
        // regular iff exactly one facet active
        let active = p
            .facet_normals()
            .iter()
            .filter(|z| (dot(**z, m) - c).abs() < 1e-9 * spec.r.max(1.0))
            .count();
        if active != 1 {
            resamples += 1;
            continue;
        }
        let z_f = p.facet_normals()[f];
        let h = x.cos(); // H = ⟨ν, z_f⟩ on the Grim piece
        for v in p.vertices() {
            let margin = h * (1.0 - dot(z_f, *v));
            min_margin = min_margin.min(margin);
        }
        used += 1;
    }
    Ok(SpeedCheckReport {
        min_margin,
        samples_used: used,
        edge_resamples: resamples,
    })
}
