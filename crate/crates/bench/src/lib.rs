//! Fixtures shared by the benchmarks.

use revtorus_core::{
    build_sphere_hyperbolic, build_standard_torus, SphereHyperbolicParams, StandardTorusParams, SurfaceProfile,
};

pub fn standard(r: f64) -> SurfaceProfile {
    build_standard_torus(StandardTorusParams { a: 1.0, r }).expect("valid torus")
}

pub fn sphere_hyperbolic() -> SurfaceProfile {
    build_sphere_hyperbolic(SphereHyperbolicParams {
        a: 1.0,
        t_star: std::f64::consts::PI / 6.0,
        b: 0.578,
    })
    .expect("valid surface")
}
