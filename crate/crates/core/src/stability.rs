//! Stability of regions bounded by constant geodesic curvature curves.
//!
//! Multi-component boundaries use the constant-mode test: with `L = -J`
//! having exactly one negative eigenvalue in total and its kernel
//! orthogonal to constants, the boundary is stable iff `<L^-1 1, 1> <= 0`.
//! Per component, `<L^-1 1, 1>` is `(dA/dT) / (dh/dT)` along the family of
//! curves through it, which is `-L / q` for a parallel with constant
//! potential `q = K + h^2`.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::closed::{branch_point, find_symmetric_nodoid, solve_h_o, ClosedCurve, UnduloidBranch, PERIOD_MAP_TOL};
use crate::error::{Error, Result};
use crate::roots;
use crate::curve::CurveClass;
use crate::spectrum::{fundamental_piece_spectra, potential_along, spectrum, BoundaryCondition};
use crate::surface::{critical_points, SurfaceProfile};

pub const BOUNDARY_TOL: f64 = 1e-9;
/// Eigenvalues above `-ZERO_MODE_TOL * max(1, |lambda_1|)` count as
/// nonnegative.
pub const ZERO_MODE_TOL: f64 = 1e-6;

fn zero_mode_tol(lambda_1: f64) -> f64 {
    ZERO_MODE_TOL * lambda_1.abs().max(1.0)
}
const SPECTRUM_GRID: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Yes,
    No,
    BoundaryCase,
    /// The deciding criterion's hypotheses fail.
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stable: Stability,
    pub criterion: String,
    /// Signed slack; positive means stable.
    pub margin: f64,
}

impl StabilityVerdict {
    pub fn from_margin(margin: f64, criterion: impl Into<String>) -> Self {
        let stable = if margin.abs() <= BOUNDARY_TOL {
            Stability::BoundaryCase
        } else if margin > 0.0 {
            Stability::Yes
        } else {
            Stability::No
        };
        Self {
            stable,
            criterion: criterion.into(),
            margin,
        }
    }

    pub fn inapplicable(criterion: impl Into<String>) -> Self {
        Self {
            stable: Stability::Inapplicable,
            criterion: criterion.into(),
            margin: f64::NAN,
        }
    }

    /// Stable or on the boundary.
    pub fn admissible(&self) -> bool {
        matches!(self.stable, Stability::Yes | Stability::BoundaryCase)
    }

    /// The tighter of two verdicts.
    fn and(self, other: Self) -> Self {
        if other.margin < self.margin {
            other
        } else {
            self
        }
    }
}

/// A parallel is stable iff `D(t) <= 1`.
pub fn circle_stable(s: &SurfaceProfile, t: f64) -> StabilityVerdict {
    StabilityVerdict::from_margin(1.0 - s.discriminant(t), "circle: D <= 1")
}

/// The band `|t'| > t` around the shortest parallel is stable iff
/// `D(t) <= 0`.
pub fn symmetric_annulus_stable(s: &SurfaceProfile, t: f64) -> Result<StabilityVerdict> {
    if !(t > 0.0 && t < s.t0) {
        return Err(Error::InvalidParameter(format!("annulus height {t} outside (0, t0)")));
    }
    Ok(StabilityVerdict::from_margin(-s.discriminant(t), "symmetric annulus: D <= 0"))
}

/// `q / L` for the parallel at `t`.
fn q_over_l(s: &SurfaceProfile, t: f64) -> f64 {
    let f = s.f(t);
    s.discriminant(t) / (f * f) / (TAU * f)
}

/// Two parallels at heights `t1`, `t2` bounding an annulus with matched
/// curvature: both circles stable and `q/L (t1) + q/L (t2) <= 0`.
pub fn parallel_pair_verdict(s: &SurfaceProfile, t1: f64, t2: f64) -> StabilityVerdict {
    let pair = StabilityVerdict::from_margin(
        -(q_over_l(s, t1) + q_over_l(s, t2)),
        "two parallels: q/L sum <= 0",
    );
    circle_stable(s, t1).and(circle_stable(s, t2)).and(pair)
}

/// Partner of the parallel at `t' = -x` (`x > 0`) for the band through the
/// shortest parallel: `t''` on `(t_c, t0)` with `h(t'') = h(x)`.
pub fn annulus_partner(s: &SurfaceProfile, x: f64) -> Result<f64> {
    let t_c = critical_points(s).t_c.ok_or(Error::NoPartner { t: x })?;
    if !(x >= 0.0 && x <= t_c) {
        return Err(Error::NoPartner { t: x });
    }
    let hx = s.parallel_curvature(x);
    let g = |t: f64| s.parallel_curvature(t) - hx;
    let (lo, hi) = (t_c, s.t0);
    let (gl, gh) = (g(lo), g(hi));
    if gl == 0.0 {
        return Ok(lo);
    }
    if gh.abs() <= 1e-15 {
        return Ok(hi);
    }
    if gl * gh > 0.0 {
        return Err(Error::NoPartner { t: x });
    }
    roots::bisect(g, lo, hi, 1e-15, 200)
}

/// Nonsymmetric annulus `{t > t''} u {t < t'}` for `t' = t_prime`.
pub fn nonsymmetric_annulus_pair(s: &SurfaceProfile, t_prime: f64) -> Result<(f64, StabilityVerdict)> {
    let x = t_prime.abs();
    let tpp = annulus_partner(s, x)?;
    Ok((tpp, parallel_pair_verdict(s, x, tpp)))
}

/// Disjoint vertical annuli given as `(theta_start, width)` intervals.
pub fn vertical_annuli_stable(intervals: &[(f64, f64)]) -> Result<StabilityVerdict> {
    if intervals.is_empty() {
        return Err(Error::Malformed("no vertical annuli".into()));
    }
    if intervals.iter().any(|&(_, w)| !(w > 0.0)) {
        return Err(Error::Malformed("vertical annulus widths must be positive".into()));
    }
    let total: f64 = intervals.iter().map(|iv| iv.1).sum();
    if total >= TAU {
        return Err(Error::Malformed(format!("widths sum to {total} >= 2 pi")));
    }
    let mut iv: Vec<(f64, f64)> = intervals
        .iter()
        .map(|&(a, w)| (a.rem_euclid(TAU), w))
        .collect();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 0..iv.len() {
        let (a, w) = iv[i];
        let next = if i + 1 < iv.len() { iv[i + 1].0 } else { iv[0].0 + TAU };
        if a + w > next {
            return Err(Error::Malformed("vertical annuli overlap".into()));
        }
    }
    Ok(StabilityVerdict::from_margin(f64::INFINITY, "vertical annuli"))
}

/// Spherical cap of curvature `a^2` plus a symmetric annulus in a
/// hyperbolic band `f = c cosh(d - b t)`, both with curvature `h`.
pub fn disk_plus_annulus_stable(a: f64, b: f64, c: f64, h: f64) -> Result<StabilityVerdict> {
    if !(h >= 0.0 && h < b) {
        return Err(Error::InvalidParameter(format!("h = {h} outside [0, b = {b})")));
    }
    if !(a > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter("a and c must be positive".into()));
    }
    let expr = (a * a + h * h).powf(1.5) / TAU - (b * b - h * h).powf(1.5) / (2.0 * TAU * b * c);
    Ok(StabilityVerdict::from_margin(-expr, "cap plus hyperbolic annulus"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiInertia {
    pub lambda_1: f64,
    /// Second eigenvalue among modes even under the curve's reflection
    /// symmetry; for symmetric curves the odd modes start at the exact zero
    /// mode `f cos sigma` of rotations, so this decides `lambda_2 >= 0`.
    pub lambda_2: f64,
    /// Eigenvalues below `-tol`.
    pub negative: usize,
    pub tol: f64,
}

/// Low Jacobi spectrum of a closed curve. Symmetric disks and unduloids
/// with one period split into Neumann and Dirichlet problems on the arc
/// between consecutive extrema; other curves use the periodic problem.
pub fn jacobi_inertia(s: &SurfaceProfile, c: &ClosedCurve) -> Result<JacobiInertia> {
    let symmetric = c.class == CurveClass::Nodoid || (c.class == CurveClass::Unduloid && c.k == Some(1));
    let ev = if symmetric {
        fundamental_piece_spectra(s, c, 3, SPECTRUM_GRID)?.0.eigenvalues
    } else {
        let p = potential_along(s, c, 4 * SPECTRUM_GRID)?;
        spectrum(&p, BoundaryCondition::Periodic, 3, SPECTRUM_GRID)?.eigenvalues
    };
    let tol = zero_mode_tol(ev[0]);
    Ok(JacobiInertia {
        lambda_1: ev[0],
        lambda_2: ev[1],
        negative: ev.iter().filter(|&&v| v < -tol).count(),
        tol,
    })
}

/// `(dh/dT, dA/dT)` along the symmetric disk family, central differences.
pub fn disk_family_derivatives(s: &SurfaceProfile, t_max: f64) -> Result<(f64, f64)> {
    let d = 1e-4 * t_max.max(1e-2);
    let p = find_symmetric_nodoid(s, t_max + d, PERIOD_MAP_TOL)?;
    let m = find_symmetric_nodoid(s, t_max - d, PERIOD_MAP_TOL)?;
    Ok(((p.h - m.h) / (2.0 * d), (p.area - m.area) / (2.0 * d)))
}

/// `(dh_o/dT, dA/dT)` along the unduloid branch, with `A = int Phi d theta`.
pub fn unduloid_family_derivatives(s: &SurfaceProfile, branch: &UnduloidBranch, t_max: f64) -> Result<(f64, f64)> {
    let d = 1e-4;
    let p = branch_point(s, t_max + d, branch.predict(t_max + d), PERIOD_MAP_TOL)?;
    let m = branch_point(s, t_max - d, branch.predict(t_max - d), PERIOD_MAP_TOL)?;
    Ok(((p.h - m.h) / (2.0 * d), (p.area - m.area) / (2.0 * d)))
}

/// Constant-mode verdict for a set of components given their negative
/// eigenvalue counts and `<L^-1 1, 1>` contributions.
fn constant_mode(neg: usize, pairing: f64, criterion: &str) -> StabilityVerdict {
    match neg {
        0 => StabilityVerdict::from_margin(f64::INFINITY, criterion),
        1 => StabilityVerdict::from_margin(-pairing, criterion),
        _ => StabilityVerdict::from_margin(-f64::INFINITY, format!("{criterion}: {neg} negative eigenvalues")),
    }
}

/// Contribution of a parallel: negative count and `-L/q`.
fn parallel_mode(s: &SurfaceProfile, t: f64) -> (usize, f64) {
    let f = s.f(t);
    let q = s.discriminant(t) / (f * f);
    ((q > 0.0) as usize, -TAU * f / q)
}

/// The symmetric disk with maximum `T`: one negative Jacobi eigenvalue,
/// second eigenvalue nonnegative, and `dA/dh <= 0` along the family.
pub fn disk_stable(s: &SurfaceProfile, t_max: f64) -> Result<StabilityVerdict> {
    let c = find_symmetric_nodoid(s, t_max, PERIOD_MAP_TOL)?;
    disk_verdict(s, &c)
}

/// As [`disk_stable`] for an already computed symmetric nodoid.
pub fn disk_verdict(s: &SurfaceProfile, disk: &ClosedCurve) -> Result<StabilityVerdict> {
    let ji = jacobi_inertia(s, disk)?;
    let (neg, l2) = (ji.negative, ji.lambda_2);
    if l2 < -ji.tol {
        return Ok(StabilityVerdict::from_margin(l2, "disk: second eigenvalue"));
    }
    let (dh, da) = disk_family_derivatives(s, disk.t_max)?;
    Ok(constant_mode(neg, da / dh, "disk: constant mode"))
}

/// Disk bounded by `disk` together with the annulus `{|t| > t_a}`.
pub fn disk_plus_annulus_verdict(s: &SurfaceProfile, disk: &ClosedCurve, t_a: f64) -> Result<StabilityVerdict> {
    check_match("disk and annulus", disk.h, -s.parallel_curvature(t_a))?;
    if s.discriminant(t_a) >= 0.0 {
        return Ok(StabilityVerdict::from_margin(
            -s.discriminant(t_a).max(2.0 * BOUNDARY_TOL),
            "disk plus annulus: annulus must lie in D < 0",
        ));
    }
    let ji = jacobi_inertia(s, disk)?;
    let (neg, l2) = (ji.negative, ji.lambda_2);
    if l2 < -ji.tol {
        return Ok(StabilityVerdict::from_margin(l2, "disk plus annulus: second eigenvalue"));
    }
    let (dh, da) = disk_family_derivatives(s, disk.t_max)?;
    let (cn, cw) = parallel_mode(s, t_a);
    Ok(constant_mode(neg + 2 * cn, da / dh + 2.0 * cw, "disk plus annulus: constant mode"))
}

/// Region between the parallel at `-x` and the closed unduloid `u` lying
/// above it, both of curvature `u.h`.
pub fn unduloid_circle_verdict(
    s: &SurfaceProfile,
    branch: &UnduloidBranch,
    u: &ClosedCurve,
    x: f64,
) -> Result<StabilityVerdict> {
    check_match("unduloid and circle", u.h, s.parallel_curvature(x))?;
    let d_circle = s.discriminant(x);
    if d_circle >= 0.0 {
        return Ok(StabilityVerdict::from_margin(
            -d_circle.max(2.0 * BOUNDARY_TOL),
            "unduloid plus circle: circle must lie in D < 0",
        ));
    }
    let (d_hi, d_lo) = (s.discriminant(u.t_max.abs()), s.discriminant(u.t_min.abs()));
    if !(d_hi.min(d_lo) < 1.0 && d_hi.max(d_lo) > 1.0) {
        return Ok(StabilityVerdict::from_margin(
            -2.0 * BOUNDARY_TOL,
            "unduloid plus circle: unduloid does not straddle D = 1",
        ));
    }
    let ji = jacobi_inertia(s, u)?;
    let (neg, l2) = (ji.negative, ji.lambda_2);
    if l2 < -ji.tol {
        return Ok(StabilityVerdict::from_margin(l2, "unduloid plus circle: second eigenvalue"));
    }
    let (dh, da) = unduloid_family_derivatives(s, branch, u.t_max)?;
    let (cn, cw) = parallel_mode(s, x);
    Ok(constant_mode(neg + cn, da / dh + cw, "unduloid plus circle: constant mode"))
}

/// The unduloid at `T` with the region below it: product sign test
/// `dh_o/dT * dA/dT < 0`, applicable when `lambda_1 < 0 <= lambda_2`.
pub fn unduloid_region_stable(s: &SurfaceProfile, branch: &UnduloidBranch, t_max: f64) -> Result<StabilityVerdict> {
    let h = solve_h_o(s, t_max, branch.predict(t_max))?;
    let c = ClosedCurve::unduloid(s, t_max, h, PERIOD_MAP_TOL)?;
    let ji = jacobi_inertia(s, &c)?;
    let (l1, l2) = (ji.lambda_1, ji.lambda_2);
    if !(l1 < -ji.tol && l2 >= -ji.tol) {
        return Ok(StabilityVerdict::inapplicable(format!(
            "unduloid: eigenvalue hypothesis violated (lambda_1 = {l1:e}, lambda_2 = {l2:e})"
        )));
    }
    let (dh, da) = unduloid_family_derivatives(s, branch, t_max)?;
    Ok(StabilityVerdict::from_margin(-(dh * da), "unduloid: dh/dT * dA/dT < 0"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionShape {
    /// Disk bounded by the symmetric nodoid with maximum `t_max`.
    Disk { t_max: f64 },
    /// `{|t| > t}`.
    SymmetricAnnulus { t: f64 },
    /// `{t > t_dprime} u {t < -x}` with `h(x) = h(t_dprime)`.
    NonsymmetricAnnulus { x: f64, t_dprime: f64 },
    VerticalAnnuli { intervals: Vec<(f64, f64)> },
    /// Region between the parallel at `-x` and the unduloid with
    /// maximum `t_max`.
    UnduloidCircle { t_max: f64, x: f64 },
    /// Symmetric disk with maximum `disk_t_max` plus `{|t| > annulus_t}`.
    DiskPlusSymmetricAnnulus { disk_t_max: f64, annulus_t: f64 },
    /// Region bounded by parallels only.
    Parallels { ts: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateRegion {
    pub shape: RegionShape,
    pub complement: bool,
    /// Boundary curvature w.r.t. the inner normal (of the uncomplemented
    /// region).
    pub h: f64,
    pub area: f64,
    pub perimeter: f64,
}

const MATCH_TOL: f64 = 1e-8;

fn check_match(what: &str, a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > MATCH_TOL * (1.0 + a.abs()) {
        return Err(Error::Malformed(format!("{what}: boundary curvatures {a} and {b} differ")));
    }
    Ok(())
}

/// Dispatch to the criterion for the region's type. Complements share the
/// boundary and get the same verdict.
pub fn classify_region(s: &SurfaceProfile, rg: &CandidateRegion, branch: Option<&UnduloidBranch>) -> Result<StabilityVerdict> {
    match &rg.shape {
        RegionShape::Disk { t_max } => disk_stable(s, *t_max),
        RegionShape::SymmetricAnnulus { t } => symmetric_annulus_stable(s, *t),
        RegionShape::NonsymmetricAnnulus { x, t_dprime } => {
            check_match("nonsymmetric annulus", s.parallel_curvature(*x), s.parallel_curvature(*t_dprime))?;
            Ok(parallel_pair_verdict(s, *x, *t_dprime))
        }
        RegionShape::VerticalAnnuli { intervals } => vertical_annuli_stable(intervals),
        RegionShape::Parallels { ts } => match ts.len() {
            0 => Err(Error::Malformed("no parallels".into())),
            1 => Ok(circle_stable(s, ts[0])),
            2 => {
                let (lo, hi) = (ts[0].min(ts[1]), ts[0].max(ts[1]));
                check_match("two parallels", s.parallel_curvature(lo), -s.parallel_curvature(hi))?;
                if (lo + hi).abs() <= MATCH_TOL {
                    symmetric_annulus_stable(s, hi)
                } else {
                    Ok(parallel_pair_verdict(s, lo, hi))
                }
            }
            n => Ok(StabilityVerdict::from_margin(
                -f64::INFINITY,
                format!("{n} parallels cannot share one boundary curvature stably"),
            )),
        },
        RegionShape::UnduloidCircle { t_max, x } => {
            let branch = branch.ok_or_else(|| Error::Malformed("unduloid region needs its branch".into()))?;
            let h = solve_h_o(s, *t_max, branch.predict(*t_max))?;
            let u = ClosedCurve::unduloid(s, *t_max, h, PERIOD_MAP_TOL)?;
            unduloid_circle_verdict(s, branch, &u, *x)
        }
        RegionShape::DiskPlusSymmetricAnnulus { disk_t_max, annulus_t } => {
            let disk = find_symmetric_nodoid(s, *disk_t_max, PERIOD_MAP_TOL)?;
            disk_plus_annulus_verdict(s, &disk, *annulus_t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_sphere_hyperbolic, build_standard_torus, SphereHyperbolicParams, StandardTorusParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn torus() -> SurfaceProfile {
        build_standard_torus(StandardTorusParams { a: 1.0, r: 0.4 }).unwrap()
    }

    #[test]
    fn circle_verdicts() {
        let s = torus();
        let v = circle_stable(&s, 0.0);
        assert_eq!(v.stable, Stability::No);
        assert_abs_diff_eq!(v.margin, -2.5, epsilon = 1e-12);
        assert_eq!(circle_stable(&s, 0.2 * PI).stable, Stability::BoundaryCase);
        assert_eq!(circle_stable(&s, s.t0).stable, Stability::Yes);
    }

    #[test]
    fn symmetric_annulus_verdicts() {
        let s = torus();
        assert_eq!(symmetric_annulus_stable(&s, 0.9).unwrap().stable, Stability::Yes);
        assert_eq!(symmetric_annulus_stable(&s, 0.7).unwrap().stable, Stability::No);
        let tc = 0.4 * (-0.4f64).acos();
        assert_eq!(symmetric_annulus_stable(&s, tc).unwrap().stable, Stability::BoundaryCase);
    }

    #[test]
    fn nonsymmetric_pair() {
        let s = torus();
        let (tpp, v) = nonsymmetric_annulus_pair(&s, -0.7).unwrap();
        assert_abs_diff_eq!(tpp, 0.8773, epsilon = 1e-4);
        assert_abs_diff_eq!(s.parallel_curvature(0.7), s.parallel_curvature(tpp), epsilon = 1e-10);
        assert_eq!(v.stable, Stability::Yes);
        assert_abs_diff_eq!(v.margin, 0.0513, epsilon = 1e-3);
    }

    #[test]
    fn symmetric_limit_of_pair_condition() {
        let s = torus();
        for t in [0.75, 0.8, 0.9, 1.1] {
            let pair = -(q_over_l(&s, t) + q_over_l(&s, -t));
            let sym = symmetric_annulus_stable(&s, t).unwrap();
            assert_eq!(pair > 0.0, sym.margin > 0.0);
        }
    }

    #[test]
    fn vertical_annuli() {
        assert!(vertical_annuli_stable(&[(0.0, PI)]).unwrap().admissible());
        assert!(vertical_annuli_stable(&[(0.0, 0.5), (1.0, 0.5), (2.0, 0.5)]).unwrap().admissible());
        assert!(vertical_annuli_stable(&[(0.0, PI), (PI, PI)]).is_err());
        assert!(vertical_annuli_stable(&[(0.0, 1.0), (0.5, 1.0)]).is_err());
    }

    #[test]
    fn cap_plus_annulus_instance() {
        let v = disk_plus_annulus_stable(1.0, 0.578, 0.0410512, 0.4).unwrap();
        assert_eq!(v.stable, Stability::Yes);
        assert_abs_diff_eq!(v.margin, 0.0448, epsilon = 5e-4);
        assert_eq!(disk_plus_annulus_stable(1.0, 0.578, 1e6, 0.0).unwrap().stable, Stability::No);
        assert!(disk_plus_annulus_stable(1.0, 0.578, 0.04, 0.6).is_err());
    }

    #[test]
    fn constant_mode_reproduces_cap_plus_annulus() {
        // Cap of curvature h must fit inside the spherical zone, so use a
        // wider zone than the published instance.
        let (a, b, h) = (1.0, 3.0, 1.0);
        let p = SphereHyperbolicParams { a, t_star: 1.2, b };
        let (c, _) = p.derived().unwrap();
        let s = build_sphere_hyperbolic(p).unwrap();
        let t_max = (1.0f64 / h).atan();
        let disk = find_symmetric_nodoid(&s, t_max, PERIOD_MAP_TOL).unwrap();
        assert_relative_eq!(disk.h, h, max_relative = 1e-9);
        let (dh, da) = disk_family_derivatives(&s, t_max).unwrap();
        assert_relative_eq!(da / dh, -TAU / (a * a + h * h).powf(1.5), max_relative = 1e-6);
        let ta = annulus_height(&s, h);
        let (_, cw) = parallel_mode(&s, ta);
        assert_relative_eq!(cw, 2.0 * PI * b * c / (b * b - h * h).powf(1.5), max_relative = 1e-8);
        let rg = CandidateRegion {
            shape: RegionShape::DiskPlusSymmetricAnnulus {
                disk_t_max: t_max,
                annulus_t: ta,
            },
            complement: false,
            h,
            area: 0.0,
            perimeter: 0.0,
        };
        let v = classify_region(&s, &rg, None).unwrap();
        let closed_form = disk_plus_annulus_stable(a, b, c, h).unwrap();
        assert_eq!(v.stable, closed_form.stable, "{v:?} vs {closed_form:?}");
    }

    fn annulus_height(s: &SurfaceProfile, h: f64) -> f64 {
        let tc = critical_points(s).t_c.unwrap();
        roots::bisect(|t| -s.parallel_curvature(t) - h, tc, s.t0, 1e-15, 200).unwrap()
    }

    #[test]
    fn unduloid_region_near_bifurcation() {
        let s = torus();
        let tt = 0.2 * PI;
        let b = crate::closed::trace_unduloid_branch(&s, (tt, tt + 0.05), 0.01, 1e-12).unwrap();
        let v = unduloid_region_stable(&s, &b, tt + 0.02).unwrap();
        assert_eq!(v.stable, Stability::Yes, "{v:?}");
    }

    #[test]
    fn small_disks_are_stable() {
        let s = torus();
        let v = disk_stable(&s, 0.2).unwrap();
        assert_eq!(v.stable, Stability::Yes, "{v:?}");
    }

    #[test]
    fn three_parallels_rejected() {
        let s = torus();
        let rg = CandidateRegion {
            shape: RegionShape::Parallels { ts: vec![-0.7, 0.5, 0.8773] },
            complement: false,
            h: 0.0,
            area: 0.0,
            perimeter: 0.0,
        };
        assert_eq!(classify_region(&s, &rg, None).unwrap().stable, Stability::No);
    }

    #[test]
    fn complement_has_same_verdict() {
        let s = torus();
        let (tpp, _) = nonsymmetric_annulus_pair(&s, -0.7).unwrap();
        let mut rg = CandidateRegion {
            shape: RegionShape::NonsymmetricAnnulus { x: 0.7, t_dprime: tpp },
            complement: false,
            h: s.parallel_curvature(0.7),
            area: 0.0,
            perimeter: 0.0,
        };
        let a = classify_region(&s, &rg, None).unwrap();
        rg.complement = true;
        assert_eq!(a, classify_region(&s, &rg, None).unwrap());
    }
}
