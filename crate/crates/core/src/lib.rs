//! Constant geodesic curvature curves, stable regions and isoperimetric
//! candidates on rotationally symmetric tori.

// `!(x > 0.0)` style guards are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod closed;
pub mod curve;
pub mod error;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod spectrum;
pub mod stability;
pub mod surface;

pub use error::{Error, Result};
pub use surface::{
    build_sphere_hyperbolic, build_standard_torus, critical_points, metric_eval, total_area,
    CriticalPoints, MetricSample, Segment, SegmentShape, SphereHyperbolicParams,
    StandardTorusParams, SurfaceProfile,
};
pub use curve::{
    classify_curve, first_integral, half_period, integrate_arclength, integrate_graph,
    CurveClass, CurveEvent, CurveState, EventKind, Trajectory,
};
pub use closed::{
    analytic_taylor, find_symmetric_nodoid, period_derivative, period_map, trace_unduloid_branch,
    BranchSample, ClosedCurve, TaylorCoefficients, UnduloidBranch,
};
pub use spectrum::{
    fundamental_piece_spectra, index_form, index_form_multi, potential_along, spectrum,
    BoundaryCondition, PotentialProfile, SpectrumResult,
};
pub use stability::{
    circle_stable, classify_region, disk_plus_annulus_stable, disk_stable, nonsymmetric_annulus_pair,
    symmetric_annulus_stable, unduloid_region_stable, vertical_annuli_stable, CandidateRegion, RegionShape,
    Stability, StabilityVerdict,
};
pub use profile::{
    enumerate_families, profile, region_measure, rotated_cap, transitions, Families, FamilyId, FamilyKind,
    FamilyOptions, FamilyTable, ProfileRow, Transition,
};
