//! Numerical laboratory for convex ancient and translating solutions of mean
//! curvature flow confined to slab regions.
//!
//! Bodies are encoded by their support function sampled on a grid over the
//! unit sphere of normals, and evolved in the Gauss-map gauge where the flow
//! reads `∂t σ(z,t) = −H(z,t)`. Seeds are intersections of translated Grim
//! regions over a circumscribed polytope; diagnostics measure the Harnack
//! monotonicity, the difference-quotient bracket, squash-down brackets and
//! circumscription, forward/exscribed offsets, width laws, translator fits,
//! and midplane reflection asymmetry on the resulting trajectories.
//!
//! Coordinate convention throughout: ambient points and directions are
//! `[f64; 3]` with index 0 the slab axis (the slab is `(−π/2, π/2)` in that
//! coordinate) and indices 1.. the midplane. Two-dimensional ambient data
//! leaves index 2 at zero.

pub mod diagnostics;
pub mod exact;
pub mod flow;
pub mod grid;
pub mod persist;
pub mod polytope;
pub mod seed;
pub mod vec3;

pub use diagnostics::{
    AsymmetrySeries, CheckResult, DiagnosticsReport, ForwardEstimate, SquashDownEstimate,
    TranslatorClass, TranslatorFit,
};
pub use exact::{AngenentParams, SlabPoint};
pub use flow::{Controls, CurvatureField, FlowState, FlowTrajectory, SeedMeta, TimeNormalization};
pub use grid::GridSpec;
pub use polytope::{CircumscribedPolytope, DegeneracyClass, HalfspaceBody, SupportValue};
pub use seed::SeedSpec;
