//! Exact calculus of circumscribed polytopes in the midplane (dimension
//! n ≤ 3): construction from unit-offset halfspaces, face lattices by
//! exhaustive normal-subset solves, degeneracy classification of the Gauss
//! image, exscribed bodies, support cones, and cone truncation.
//!
//! All offsets of a [`CircumscribedPolytope`] are exactly 1, so every facet
//! halfspace is tangent to the unit sphere at its own normal; distinct
//! normals are automatically essential. General-offset intersections (body
//! sections, exscribed bodies) go through [`HalfspaceBody`].

use crate::vec3::{cross, dot, norm, normalize, scale, solve_dense, sub, Vec3};
use thiserror::Error;

const RANK_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PolytopeError {
    #[error("need at least one facet normal")]
    EmptyNormals,
    #[error("midplane dimension {0} unsupported (need 1, 2, or 3)")]
    BadDimension(usize),
    #[error("normal {0:?} is not unit to 1e-12")]
    NonUnitNormal(Vec3),
    #[error("normal {0:?} uses components beyond the declared dimension")]
    DimensionMismatch(Vec3),
    #[error("duplicate facet normals at indices {0} and {1}")]
    DuplicateNormal(usize, usize),
    #[error("bounded hint {hint} contradicts computed boundedness {computed}")]
    BoundedHintMismatch { hint: bool, computed: bool },
    #[error("regular polygon needs k >= 3, got {0}")]
    PolygonTooSmall(usize),
    #[error("face not in this polytope's lattice")]
    FaceNotFound,
    #[error("truncation requires an unbounded polytope with a unique vertex")]
    NotACone,
}

/// Degeneracy of the Gauss image (the closed cone spanned by the facet
/// normals, intersected with the sphere).
#[derive(Debug, Clone, PartialEq)]
pub enum DegeneracyClass {
    Bounded,
    /// All normals in an open hemisphere: `max_f ⟨z_f, e⟩ < 0` at the witness.
    NondegenerateUnbounded { witness: Vec3 },
    /// Closed-hemisphere containment attained exactly (`max_f ⟨z_f, e⟩ = 0`)
    /// while the normal cone is not a full subspace.
    SemiDegenerate { witness: Vec3 },
    /// The normal cone is a proper linear subspace, so the Gauss image is a
    /// full subsphere.
    FullyDegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportValue {
    Finite(f64),
    Infinite,
}

impl SupportValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            SupportValue::Finite(v) => Some(v),
            SupportValue::Infinite => None,
        }
    }
}

/// A face of the lattice: its dimension, the (maximal) set of facets whose
/// hyperplanes contain it, the vertices lying on it, and boundedness.
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub dim: usize,
    pub active: Vec<usize>,
    pub vertices: Vec<usize>,
    pub bounded: bool,
}

/// Intersection of halfspaces `⟨p, normals[f]⟩ ≤ offsets[f]` in dimension
/// `dim ≤ 3`, with its reduced vertex/ray structure.
#[derive(Debug, Clone)]
pub struct HalfspaceBody {
    pub dim: usize,
    pub normals: Vec<Vec3>,
    pub offsets: Vec<f64>,
    /// Orthonormal basis of span(normals): the quotient by the lineality
    /// space is pointed, and vertices/rays below live in the full space but
    /// describe that quotient.
    pub span: Vec<Vec3>,
    /// Orthonormal basis of the lineality space (directions free in both
    /// senses).
    pub lineality: Vec<Vec3>,
    pub vertices: Vec<Vec3>,
    /// Extreme rays of the (reduced) recession cone.
    pub rays: Vec<Vec3>,
}

impl HalfspaceBody {
    pub fn new(dim: usize, normals: Vec<Vec3>, offsets: Vec<f64>) -> HalfspaceBody {
        assert_eq!(normals.len(), offsets.len());
        let span = orthonormal_span(&normals);
        let lineality = orthonormal_complement(&span, dim);
        let d = span.len();

        // vertices: d-subsets of facets with independent normals
        let mut vertices: Vec<Vec3> = Vec::new();
        if d > 0 {
            for subset in subsets(normals.len(), d) {
                let Some(v) = solve_affine(&normals, &offsets, &subset, &span) else {
                    continue;
                };
                if normals
                    .iter()
                    .zip(&offsets)
                    .all(|(z, c)| dot(*z, v) <= c + RANK_TOL)
                    && !vertices.iter().any(|w| norm(sub(*w, v)) < 1e-7)
                {
                    vertices.push(v);
                }
            }
        }

        // extreme rays of the reduced recession cone from (d−1)-subsets
        let mut rays: Vec<Vec3> = Vec::new();
        if d >= 1 {
            let candidates: Vec<Vec3> = match d {
                1 => vec![span[0], scale(span[0], -1.0)],
                2 => {
                    let plane_normal = cross(span[0], span[1]);
                    normals
                        .iter()
                        .flat_map(|z| {
                            let u = cross(*z, plane_normal);
                            [normalize(u), normalize(scale(u, -1.0))]
                        })
                        .collect()
                }
                _ => {
                    let mut c = Vec::new();
                    for i in 0..normals.len() {
                        for j in i + 1..normals.len() {
                            let u = cross(normals[i], normals[j]);
                            if norm(u) > RANK_TOL {
                                c.push(normalize(u));
                                c.push(normalize(scale(u, -1.0)));
                            }
                        }
                    }
                    c
                }
            };
            for u in candidates {
                if normals.iter().all(|z| dot(*z, u) <= RANK_TOL)
                    && !rays.iter().any(|w| norm(sub(*w, u)) < 1e-7)
                {
                    rays.push(u);
                }
            }
        }

        HalfspaceBody {
            dim,
            normals,
            offsets,
            span,
            lineality,
            vertices,
            rays,
        }
    }

    /// The body contains no point at all.
    pub fn is_empty(&self) -> bool {
        // the reduced body is pointed, so nonempty ⇒ it has a vertex
        self.vertices.is_empty() && !self.span.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        !self.is_empty() && self.rays.is_empty() && self.lineality.is_empty()
    }

    pub fn contains(&self, p: Vec3) -> bool {
        self.normals
            .iter()
            .zip(&self.offsets)
            .all(|(z, c)| dot(*z, p) <= c + RANK_TOL)
    }

    /// sup ⟨p, z⟩ over the body. Infinite when z has a component along the
    /// lineality space or positive pairing with some recession ray.
    pub fn support(&self, z: Vec3) -> SupportValue {
        debug_assert!(!self.is_empty());
        for l in &self.lineality {
            if dot(*l, z).abs() > RANK_TOL {
                return SupportValue::Infinite;
            }
        }
        for u in &self.rays {
            if dot(*u, z) > RANK_TOL {
                return SupportValue::Infinite;
            }
        }
        let best = self
            .vertices
            .iter()
            .map(|v| dot(*v, z))
            .fold(f64::NEG_INFINITY, f64::max);
        SupportValue::Finite(best)
    }
}

/// A circumscribed polytope: all facet offsets exactly 1.
#[derive(Debug, Clone)]
pub struct CircumscribedPolytope {
    body: HalfspaceBody,
    faces: Vec<Face>,
    class: DegeneracyClass,
}

/// Cone with apex at the origin, `{u : ⟨u, normals[f]⟩ ≤ 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportCone {
    pub dim: usize,
    pub normals: Vec<Vec3>,
}

impl SupportCone {
    pub fn contains(&self, u: Vec3) -> bool {
        self.normals.iter().all(|z| dot(*z, u) <= RANK_TOL)
    }
}

/// Result of truncating a cone at unit offset along its vertex direction.
#[derive(Debug, Clone)]
pub enum TruncationOutcome {
    Truncated(CircumscribedPolytope),
    /// The vertex already lies on the unit sphere: truncation is trivial.
    AlreadyTangent(CircumscribedPolytope),
}

impl TruncationOutcome {
    pub fn polytope(&self) -> &CircumscribedPolytope {
        match self {
            TruncationOutcome::Truncated(p) | TruncationOutcome::AlreadyTangent(p) => p,
        }
    }
}

/// Regular k-gon circumscribing the unit circle: normals at angles 2πi/k,
/// vertices at distance sec(π/k).
pub fn regular_polygon(k: usize) -> Result<CircumscribedPolytope, PolytopeError> {
    if k < 3 {
        return Err(PolytopeError::PolygonTooSmall(k));
    }
    let normals: Vec<Vec3> = (0..k)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
            [a.cos(), a.sin(), 0.0]
        })
        .collect();
    CircumscribedPolytope::from_facets(2, normals, Some(true))
}

/// Planar wedge: two facet normals at angle 2β about the first midplane
/// axis; vertex at distance sec β.
pub fn wedge(beta: f64) -> Result<CircumscribedPolytope, PolytopeError> {
    assert!(beta > 0.0 && beta < std::f64::consts::FRAC_PI_2);
    let normals = vec![
        [beta.cos(), beta.sin(), 0.0],
        [beta.cos(), -beta.sin(), 0.0],
    ];
    CircumscribedPolytope::from_facets(2, normals, Some(false))
}

/// Circumscribed cone over a square link in n = 3: four side normals tilted
/// by `alpha` toward the axis; vertex at distance csc α along the axis.
pub fn pyramid(alpha: f64) -> Result<CircumscribedPolytope, PolytopeError> {
    assert!(alpha > 0.0 && alpha < std::f64::consts::FRAC_PI_2);
    let (c, s) = (alpha.cos(), alpha.sin());
    let normals = vec![
        [c, 0.0, s],
        [-c, 0.0, s],
        [0.0, c, s],
        [0.0, -c, s],
    ];
    CircumscribedPolytope::from_facets(3, normals, Some(false))
}

impl CircumscribedPolytope {
    /// Build from unit facet normals at offset 1 in midplane dimension
    /// `dim`. Rejects duplicate normals; a `bounded_hint` that contradicts
    /// the computed boundedness is an error.
    pub fn from_facets(
        dim: usize,
        normals: Vec<Vec3>,
        bounded_hint: Option<bool>,
    ) -> Result<CircumscribedPolytope, PolytopeError> {
        if normals.is_empty() {
            return Err(PolytopeError::EmptyNormals);
        }
        if !(1..=3).contains(&dim) {
            return Err(PolytopeError::BadDimension(dim));
        }
        for z in &normals {
            if (norm(*z) - 1.0).abs() > 1e-12 {
                return Err(PolytopeError::NonUnitNormal(*z));
            }
            for c in z.iter().skip(dim) {
                if c.abs() > 1e-12 {
                    return Err(PolytopeError::DimensionMismatch(*z));
                }
            }
        }
        for i in 0..normals.len() {
            for j in i + 1..normals.len() {
                if dot(normals[i], normals[j]) > 1.0 - 1e-12 {
                    return Err(PolytopeError::DuplicateNormal(i, j));
                }
            }
        }
        // essentialness: a facet is essential iff its contact point z_f is
        // strictly interior to the other halfspaces, i.e. ⟨z_f, z_g⟩ < 1;
        // for distinct unit normals this always holds, but near-duplicates
        // below the rejection tolerance are pruned here
        let mut kept: Vec<Vec3> = Vec::new();
        for (f, z) in normals.iter().enumerate() {
            let essential = normals
                .iter()
                .enumerate()
                .all(|(g, w)| g == f || dot(*z, *w) < 1.0 - RANK_TOL);
            if essential {
                kept.push(*z);
            }
        }
        let offsets = vec![1.0; kept.len()];
        let body = HalfspaceBody::new(dim, kept, offsets);
        let class = classify_normals(dim, &body.normals, &body.span);
        let computed_bounded = matches!(class, DegeneracyClass::Bounded);
        if let Some(hint) = bounded_hint {
            if hint != computed_bounded {
                return Err(PolytopeError::BoundedHintMismatch {
                    hint,
                    computed: computed_bounded,
                });
            }
        }
        let faces = enumerate_faces(&body);
        Ok(CircumscribedPolytope { body, faces, class })
    }

    pub fn dim(&self) -> usize {
        self.body.dim
    }

    pub fn facet_normals(&self) -> &[Vec3] {
        &self.body.normals
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.body.vertices
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.class, DegeneracyClass::Bounded)
    }

    pub fn body(&self) -> &HalfspaceBody {
        &self.body
    }

    pub fn classify(&self) -> &DegeneracyClass {
        &self.class
    }

    /// sup ⟨p, z⟩ over the polytope; infinite outside the Gauss image.
    pub fn support(&self, z: Vec3) -> SupportValue {
        self.body.support(z)
    }

    /// The exscribed body: same normals at offset −1. `None` when the
    /// intersection is empty (always, for bounded or degenerate polytopes).
    pub fn exscribed(&self) -> Option<HalfspaceBody> {
        let body = HalfspaceBody::new(
            self.body.dim,
            self.body.normals.clone(),
            vec![-1.0; self.body.normals.len()],
        );
        if body.is_empty() {
            None
        } else {
            Some(body)
        }
    }

    /// Truncate an unbounded single-vertex cone by the unit-offset halfspace
    /// along its vertex direction.
    pub fn truncate_cone(&self) -> Result<TruncationOutcome, PolytopeError> {
        if self.is_bounded() || self.body.vertices.len() != 1 || !self.body.lineality.is_empty() {
            return Err(PolytopeError::NotACone);
        }
        let v = self.body.vertices[0];
        let vlen = norm(v);
        if vlen < 1.0 - RANK_TOL {
            return Err(PolytopeError::NotACone);
        }
        if (vlen - 1.0).abs() <= RANK_TOL {
            return Ok(TruncationOutcome::AlreadyTangent(self.clone()));
        }
        let mut normals = self.body.normals.clone();
        normals.push(normalize(v));
        let p = CircumscribedPolytope::from_facets(self.body.dim, normals, None)?;
        Ok(TruncationOutcome::Truncated(p))
    }

    /// Vertex direction v/|v| of a single-vertex cone.
    pub fn cone_vertex_direction(&self) -> Option<Vec3> {
        if !self.is_bounded() && self.body.vertices.len() == 1 && self.body.lineality.is_empty() {
            Some(normalize(self.body.vertices[0]))
        } else {
            None
        }
    }

    /// Support cone at (an interior point of) a face: the facet normals are
    /// exactly those of the facets containing the face.
    pub fn support_cone(&self, face: &Face) -> Result<SupportCone, PolytopeError> {
        if !self.faces.contains(face) {
            return Err(PolytopeError::FaceNotFound);
        }
        Ok(SupportCone {
            dim: self.body.dim,
            normals: face.active.iter().map(|&f| self.body.normals[f]).collect(),
        })
    }

    /// The face whose maximal active set equals `active` (sorted).
    pub fn find_face(&self, active: &[usize]) -> Option<&Face> {
        self.faces.iter().find(|f| f.active == active)
    }
}

fn orthonormal_span(vectors: &[Vec3]) -> Vec<Vec3> {
    let mut basis: Vec<Vec3> = Vec::new();
    for v in vectors {
        let mut w = *v;
        for b in &basis {
            w = sub(w, scale(*b, dot(w, *b)));
        }
        if norm(w) > RANK_TOL {
            basis.push(normalize(w));
        }
        if basis.len() == 3 {
            break;
        }
    }
    basis
}

fn orthonormal_complement(span: &[Vec3], dim: usize) -> Vec<Vec3> {
    let mut full = span.to_vec();
    let mut complement = Vec::new();
    for i in 0..dim {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        for b in &full {
            e = sub(e, scale(*b, dot(e, *b)));
        }
        if norm(e) > RANK_TOL {
            let e = normalize(e);
            full.push(e);
            complement.push(e);
        }
    }
    complement
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Solve ⟨p, normals[f]⟩ = offsets[f] for f in `subset`, within the span.
fn solve_affine(
    normals: &[Vec3],
    offsets: &[f64],
    subset: &[usize],
    span: &[Vec3],
) -> Option<Vec3> {
    let d = span.len();
    let mut a: Vec<Vec<f64>> = subset
        .iter()
        .map(|&f| span.iter().map(|b| dot(normals[f], *b)).collect())
        .collect();
    let mut b: Vec<f64> = subset.iter().map(|&f| offsets[f]).collect();
    let x = solve_dense(&mut a, &mut b, RANK_TOL)?;
    let mut p = [0.0; 3];
    for i in 0..d {
        p = crate::vec3::axpy(p, x[i], span[i]);
    }
    Some(p)
}

/// Classification by the convex position of the normals: distance from the
/// origin to their convex hull (inside the span) decides open-hemisphere
/// containment; when the origin lies in the hull, hull-facet offsets decide
/// interior (cone = span) versus boundary (semi-degenerate).
fn classify_normals(dim: usize, normals: &[Vec3], span: &[Vec3]) -> DegeneracyClass {
    let d = span.len();
    let (dist, nearest) = distance_to_hull(normals, span);
    if dist > RANK_TOL {
        let witness = normalize(scale(nearest, -1.0));
        return DegeneracyClass::NondegenerateUnbounded { witness };
    }
    // origin in the hull: interior (relative to the span) iff every hull
    // facet sits at strictly positive offset
    let (min_offset, facet_normal) = hull_min_facet_offset(normals, span, d);
    if min_offset > RANK_TOL {
        if d == dim {
            DegeneracyClass::Bounded
        } else {
            DegeneracyClass::FullyDegenerate
        }
    } else {
        DegeneracyClass::SemiDegenerate {
            witness: facet_normal,
        }
    }
}

/// Exact distance from the origin to conv(normals), with the nearest point,
/// by enumerating affinely independent subsets.
fn distance_to_hull(normals: &[Vec3], span: &[Vec3]) -> (f64, Vec3) {
    let d = span.len();
    let mut best = (f64::INFINITY, [0.0; 3]);
    for k in 1..=(d + 1).min(normals.len()) {
        'subset: for subset in subsets(normals.len(), k) {
            // minimize |Σ λ_i z_i|² with Σλ = 1: solve the KKT system
            let pts: Vec<Vec3> = subset.iter().map(|&i| normals[i]).collect();
            let m = k + 1;
            let mut a = vec![vec![0.0; m]; m];
            let mut b = vec![0.0; m];
            for i in 0..k {
                for j in 0..k {
                    a[i][j] = 2.0 * dot(pts[i], pts[j]);
                }
                a[i][k] = 1.0;
                a[k][i] = 1.0;
            }
            b[k] = 1.0;
            let Some(sol) = solve_dense(&mut a, &mut b, 1e-12) else {
                continue;
            };
            let mut p = [0.0; 3];
            for i in 0..k {
                if sol[i] < -1e-9 {
                    continue 'subset;
                }
                p = crate::vec3::axpy(p, sol[i], pts[i]);
            }
            let dist = norm(p);
            if dist < best.0 {
                best = (dist, p);
            }
        }
    }
    best
}

/// Minimal facet offset of conv(normals) around the origin (assumes the
/// origin lies in the hull): enumerate candidate supporting hyperplanes from
/// (d−1)-subsets inside the span.
fn hull_min_facet_offset(normals: &[Vec3], span: &[Vec3], d: usize) -> (f64, Vec3) {
    let mut best = (f64::INFINITY, [0.0; 3]);
    if d == 1 {
        // hull is a segment [lo, hi] along span[0] with lo ≤ 0 ≤ hi
        let coords: Vec<f64> = normals.iter().map(|z| dot(*z, span[0])).collect();
        let hi = coords.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = coords.iter().cloned().fold(f64::INFINITY, f64::min);
        return if hi <= -lo {
            (hi, span[0])
        } else {
            (-lo, scale(span[0], -1.0))
        };
    }
    for subset in subsets(normals.len(), d) {
        // hyperplane through the subset's points, inside the span
        let pts: Vec<Vec3> = subset.iter().map(|&i| normals[i]).collect();
        let candidates: Vec<Vec3> = if d == 2 {
            let dir = sub(pts[1], pts[0]);
            if norm(dir) < RANK_TOL {
                continue;
            }
            let pn = cross(span[0], span[1]);
            vec![normalize(cross(dir, pn))]
        } else {
            let u = sub(pts[1], pts[0]);
            let v = sub(pts[2], pts[0]);
            let n = cross(u, v);
            if norm(n) < RANK_TOL {
                continue;
            }
            vec![normalize(n)]
        };
        for nu0 in candidates {
            for nu in [nu0, scale(nu0, -1.0)] {
                let offset = dot(pts[0], nu);
                // supporting side: all points within the halfspace
                if normals.iter().all(|z| dot(*z, nu) <= offset + RANK_TOL)
                    && offset < best.0
                {
                    best = (offset, nu);
                }
            }
        }
    }
    best
}

/// Face lattice for n ≤ 3: vertex faces, facet faces, and (n = 3) edges.
fn enumerate_faces(body: &HalfspaceBody) -> Vec<Face> {
    let n = body.dim;
    let mut faces: Vec<Face> = Vec::new();
    let active_of = |p: Vec3| -> Vec<usize> {
        body.normals
            .iter()
            .zip(&body.offsets)
            .enumerate()
            .filter(|(_, (z, c))| (dot(**z, p) - **c).abs() <= RANK_TOL)
            .map(|(f, _)| f)
            .collect()
    };

    // vertex faces (dimension = lineality dimension of the true body)
    for (vi, v) in body.vertices.iter().enumerate() {
        faces.push(Face {
            dim: body.lineality.len(),
            active: active_of(*v),
            vertices: vec![vi],
            bounded: body.lineality.is_empty(),
        });
    }

    // facet faces
    for f in 0..body.normals.len() {
        let verts: Vec<usize> = body
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| (dot(body.normals[f], **v) - body.offsets[f]).abs() <= RANK_TOL)
            .map(|(i, _)| i)
            .collect();
        let has_ray = body
            .rays
            .iter()
            .any(|u| dot(*u, body.normals[f]).abs() <= RANK_TOL && ray_on_facet(body, f, *u));
        faces.push(Face {
            dim: n - 1,
            active: vec![f],
            vertices: verts,
            bounded: !has_ray && body.lineality.is_empty(),
        });
    }

    // edges for n = 3
    if n == 3 {
        for pair in subsets(body.normals.len(), 2) {
            let (f, g) = (pair[0], pair[1]);
            let line = cross(body.normals[f], body.normals[g]);
            if norm(line) < RANK_TOL {
                continue;
            }
            let on_edge: Vec<usize> = body
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, v)| {
                    (dot(body.normals[f], **v) - body.offsets[f]).abs() <= RANK_TOL
                        && (dot(body.normals[g], **v) - body.offsets[g]).abs() <= RANK_TOL
                })
                .map(|(i, _)| i)
                .collect();
            let edge_rays: Vec<Vec3> = body
                .rays
                .iter()
                .cloned()
                .filter(|u| {
                    dot(*u, body.normals[f]).abs() <= RANK_TOL
                        && dot(*u, body.normals[g]).abs() <= RANK_TOL
                })
                .collect();
            let face = match (on_edge.len(), edge_rays.len()) {
                (2, _) => Some(Face {
                    dim: 1,
                    active: active_of(midpoint(
                        body.vertices[on_edge[0]],
                        body.vertices[on_edge[1]],
                    )),
                    vertices: on_edge,
                    bounded: true,
                }),
                (1, r) if r >= 1 => Some(Face {
                    dim: 1,
                    active: vec![f, g],
                    vertices: on_edge,
                    bounded: false,
                }),
                _ => None,
            };
            if let Some(face) = face {
                if !faces.contains(&face) {
                    faces.push(face);
                }
            }
        }
    }
    faces.sort_by(|a, b| (a.dim, &a.active).cmp(&(b.dim, &b.active)));
    faces.dedup();
    faces
}

fn ray_on_facet(body: &HalfspaceBody, f: usize, u: Vec3) -> bool {
    // some vertex on facet f from which u stays feasible
    body.vertices.iter().any(|v| {
        (dot(body.normals[f], *v) - body.offsets[f]).abs() <= RANK_TOL
            && body.contains(crate::vec3::axpy(*v, 1e-3, u))
    })
}

fn midpoint(a: Vec3, b: Vec3) -> Vec3 {
    scale(crate::vec3::add(a, b), 0.5)
}
