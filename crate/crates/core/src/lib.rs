//! Toric and irrational Bézier patches.
//!
//! The crate is organised bottom-up: [`geometry`] holds point configurations
//! and polytopes, [`blending`] evaluates toric blending functions and patches,
//! [`variety`] works with the translated toric variety inside the 𝒜-simplex,
//! [`ipf`] computes linear-precision blending functions, [`injectivity`]
//! certifies injectivity for all weights, [`triangulation`] handles regular
//! triangulations, and [`degeneration`] measures toric degenerations.

pub mod blending;
pub mod degeneration;
pub mod geometry;
pub mod injectivity;
pub mod ipf;
pub mod lp;
pub mod triangulation;
pub mod variety;

pub use blending::{
    bernstein_weights, BernsteinShape, BlendError, BlendingVector, ControlPoints, SimplexPoint,
    ToricPatch, WeightVector,
};
pub use degeneration::{
    converse_check, curve_bound_t0, curve_weights, degenerate_weights, patch_complex_distance,
    ConverseReport, DegenerationError, DegenerationSchedule, DistanceReport,
};
pub use geometry::{convex_hull, orientation, GeometryError, Orientation, PointConfig, Polytope};
pub use injectivity::{
    certify_all_weights_injective, compatibility, jacobian_cb, projected_injectivity,
    sign_constancy_check, CompatibilityStatus, CompatibilityVerdict, InjectivityError, Projection,
    ProjectionCenter,
};
pub use ipf::{homogenize, ipf_solve, preferred_blending, HomogenizedConfig, IpfError, IpfResult};
pub use triangulation::{
    control_polytope, is_regular, perturb_lifting, realization_in_simplex, regular_triangulation,
    LiftingFunction, RegularityVerdict, SimplicialComplexEmbedding, Triangulation,
    TriangulationError,
};
pub use variety::{membership_test, phi_a, AffineRelation};
