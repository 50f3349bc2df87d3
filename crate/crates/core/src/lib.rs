//! Visible points and best approximations for finite-dimensional convex
//! bodies.
//!
//! The crate answers two families of questions about a closed convex set
//! `C` in `R^d` and an outside point `x`:
//!
//! * which points of `C` are visible from `x` (the segment from `x` meets
//!   `C` first at that point), with certificates: the blocking parameter
//!   `lambda*`, translated-cone membership, and separating functionals;
//! * where the nearest point of `C` to `x` lies, for segments, flats,
//!   simplices (recursive facet descent) and polytopes.
//!
//! Every nontrivial routine has a slow independent counterpart in
//! [`oracle`] or [`projection::min_norm_oracle`], and [`suites`] bundles the
//! randomized cross-checks used by the test suite and the `verify` command.

pub mod bodies;
pub mod error;
mod nnls;
pub mod oracle;
pub mod projection;
pub mod suites;
pub mod vectorspace;
pub mod visibility;

pub use bodies::{
    barycentric_coords, nnls_hull, translate, AffineFlat, BarycentricCoords, Body, ConvexBody,
    DiskCone, HullFit, Polytope, Segment, Simplex,
};
pub use error::{GeomError, Result};
pub use oracle::{grid_project, scan_lambda};
pub use projection::{
    min_norm_oracle, project_affine, project_polytope, project_segment, project_simplex,
    ProjectionResult,
};
pub use vectorspace::{gram_matrix, is_affinely_independent, solve_spd, SymMatrix, Vector};
pub use visibility::{
    argmax_on_segment, in_translated_cone, is_visible, lambda_max, member_by_cone_intersection,
    raycast_visible, sample_visible, separate_segment, Endpoint, SeparationCertificate,
    VisibilityCertificate,
};
