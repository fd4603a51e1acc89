//! Closed curves: the unduloid branch bifurcating from the parallel where
//! `D = 1`, its Taylor data, and symmetric nodoids bounding disks.

use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::curve::{
    angle_diff, integrate_arclength_until, integrate_graph, CurveClass, CurveState, EventKind,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::roots;
use crate::surface::{critical_points, SurfaceProfile};

/// ODE tolerance of the shooting map.
pub const PERIOD_MAP_TOL: f64 = 1e-12;
/// Largest accepted closure residual.
pub const CLOSURE_TOL: f64 = 1e-8;

/// `F(T, h) = sigma(pi)` for the graph started at `(0, T, pi/2)`.
pub fn period_map(s: &SurfaceProfile, t_max: f64, h: f64) -> Result<f64> {
    Ok(integrate_graph(s, t_max, h, PI, PERIOD_MAP_TOL)?.last().sigma)
}

/// Central-difference gradient of the shooting map.
pub fn fd_gradient(s: &SurfaceProfile, t: f64, h: f64, d: f64) -> Result<[f64; 2]> {
    let ft = (period_map(s, t + d, h)? - period_map(s, t - d, h)?) / (2.0 * d);
    let fh = (period_map(s, t, h + d)? - period_map(s, t, h - d)?) / (2.0 * d);
    Ok([ft, fh])
}

fn hessian_at_step(s: &SurfaceProfile, t: f64, h: f64, d: f64) -> Result<[[f64; 2]; 2]> {
    let f = |dt: f64, dh: f64| period_map(s, t + dt, h + dh);
    let c = f(0.0, 0.0)?;
    let tt = (f(d, 0.0)? - 2.0 * c + f(-d, 0.0)?) / (d * d);
    let hh = (f(0.0, d)? - 2.0 * c + f(0.0, -d)?) / (d * d);
    let th = (f(d, d)? - f(d, -d)? - f(-d, d)? + f(-d, -d)?) / (4.0 * d * d);
    Ok([[tt, th], [th, hh]])
}

/// Hessian of the shooting map by central differences at steps `1e-3` and
/// `2e-3`, combined by one Richardson step.
pub fn fd_hessian(s: &SurfaceProfile, t: f64, h: f64) -> Result<[[f64; 2]; 2]> {
    let fine = hessian_at_step(s, t, h, 1e-3)?;
    let coarse = hessian_at_step(s, t, h, 2e-3)?;
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    Ok(out)
}

/// Third `T`-derivative of the shooting map from the five-point stencil at
/// steps `2e-2` and `1e-2` with Richardson extrapolation.
pub fn fd_sigma_ttt(s: &SurfaceProfile, t: f64, h: f64) -> Result<f64> {
    let third = |d: f64| -> Result<f64> {
        let f = |k: f64| period_map(s, t + k * d, h);
        Ok((f(2.0)? - 2.0 * f(1.0)? + 2.0 * f(-1.0)? - f(-2.0)?) / (2.0 * d * d * d))
    };
    let coarse = third(2e-2)?;
    let fine = third(1e-2)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    /// `K'`, `K''` from the closed-form derivatives of `f`.
    ClosedForm,
    /// Five-point differences of `K` with one Richardson step.
    FiniteDifference,
}

/// Second-order data of the shooting map at the bifurcation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCoefficients {
    pub t_tilde: f64,
    pub h_tilde: f64,
    pub f_tilde: f64,
    pub k: f64,
    pub k1: f64,
    pub k2: f64,
    pub rho: f64,
    pub sigma_tt_pi: f64,
    pub sigma_th_pi: f64,
    pub sigma_hh_pi: f64,
    pub sigma_ttt_pi: f64,
    pub condition_value: f64,
    /// Curvature of the unduloid branch, `-sigma_TTT / (3 rho / 2)`.
    pub h_o_second: f64,
    /// `d^2 theta / dT^2` of the half period along `h = h_tilde`.
    pub theta_second: f64,
}

impl TaylorCoefficients {
    /// Tangent `(1, -1/f^2)` of the circle branch, which the tracer rejects.
    pub fn circle_tangent(&self) -> [f64; 2] {
        [1.0, -1.0 / (self.f_tilde * self.f_tilde)]
    }

    /// Second-order prediction of `h_o(T)`.
    pub fn predict(&self, t: f64) -> f64 {
        let d = t - self.t_tilde;
        self.h_tilde + 0.5 * self.h_o_second * d * d
    }
}

fn fd_curvature_derivatives(s: &SurfaceProfile, t: f64) -> (f64, f64) {
    let k = |x: f64| s.gauss_curvature(x);
    let stencil = |d: f64| {
        let (m2, m1, c, p1, p2) = (k(t - 2.0 * d), k(t - d), k(t), k(t + d), k(t + 2.0 * d));
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * d);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * d * d);
        (d1, d2)
    };
    let (a1, a2) = stencil(1e-3);
    let (b1, b2) = stencil(2e-3);
    ((16.0 * a1 - b1) / 15.0, (16.0 * a2 - b2) / 15.0)
}

pub fn analytic_taylor(s: &SurfaceProfile) -> Result<TaylorCoefficients> {
    analytic_taylor_with(s, DerivativeSource::ClosedForm)
}

pub fn analytic_taylor_with(s: &SurfaceProfile, src: DerivativeSource) -> Result<TaylorCoefficients> {
    let cp = critical_points(s);
    let tt = cp
        .t_tilde
        .ok_or_else(|| Error::HypothesisViolated("no parallel with D = 1".into()))?;
    if tt <= 0.0 {
        return Err(Error::HypothesisViolated("D < 1 already on the longest parallel".into()));
    }
    // K must be smooth on a neighborhood covering the difference stencils.
    let guard = 1e-2;
    if let Some(j) = s.joints().into_iter().find(|j| (j - tt).abs() < guard) {
        return Err(Error::HypothesisViolated(format!(
            "segment joint at t = {j} next to the bifurcation parallel t = {tt}; K is not smooth there"
        )));
    }
    let [f, fp, fpp, _, _] = s.derivs(tt);
    let h = fp / f;
    let k = -fpp / f;
    let (k1, k2) = match src {
        DerivativeSource::ClosedForm => s.curvature_derivatives(tt),
        DerivativeSource::FiniteDifference => fd_curvature_derivatives(s, tt),
    };
    let rho = PI * f.powi(3) * k1;
    let condition = 3.0 * k * (1.0 - f) + 3.0 * f * f * (h * k1 - k2) + 5.0 * f.powi(4) * k1 * k1;
    let sigma_ttt = PI / (8.0 * f) * condition;
    if rho == 0.0 || condition == 0.0 {
        return Err(Error::HypothesisViolated("degenerate Taylor data at the bifurcation".into()));
    }
    Ok(TaylorCoefficients {
        t_tilde: tt,
        h_tilde: h,
        f_tilde: f,
        k,
        k1,
        k2,
        rho,
        sigma_tt_pi: 0.0,
        sigma_th_pi: rho / 2.0,
        sigma_hh_pi: rho * f * f,
        sigma_ttt_pi: sigma_ttt,
        condition_value: condition,
        h_o_second: -sigma_ttt / (1.5 * rho),
        theta_second: f * sigma_ttt / 3.0,
    })
}

/// Solve `F(T, h) = pi/2` for the non-circle root near `h_pred`.
///
/// The circle root is `h_c = h(T)`; the bracket is placed on the far side
/// of it, between `h_c + dh/2` and `h_c + 2 dh` with `dh = h_pred - h_c`.
pub fn solve_h_o(s: &SurfaceProfile, t_max: f64, h_pred: f64) -> Result<f64> {
    let hc = s.parallel_curvature(t_max);
    let dh = h_pred - hc;
    if dh == 0.0 {
        return Err(Error::NoBracket(format!("prediction sits on the circle branch at T = {t_max}")));
    }
    let failure = RefCell::new(None);
    let g = |h: f64| match period_map(s, t_max, h) {
        Ok(v) => v - FRAC_PI_2,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let root = roots::brent(g, hc + 0.5 * dh, hc + 2.0 * dh, 1e-15, 200);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    root
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchSample {
    /// Height `T` of the start point `(0, T)`; a t-maximum above
    /// `t_tilde` and a t-minimum below it.
    pub t_max: f64,
    pub h: f64,
    /// The other extremal height, reached at `theta = pi`.
    pub t_opposite: f64,
    /// `F(T, h) - pi/2`.
    pub f_residual: f64,
    pub closure_residual: f64,
    pub length: f64,
    /// `int_0^{2 pi} Phi(t(theta)) d theta`.
    pub area: f64,
    pub drift: f64,
    pub k: u32,
    pub period: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnduloidBranch {
    pub t_tilde: f64,
    pub h_tilde: f64,
    pub taylor: TaylorCoefficients,
    /// Ordered by `t_max`; the bifurcation parallel itself is excluded.
    pub samples: Vec<BranchSample>,
    /// Why tracing stopped before the requested range end, per side.
    pub notes: Vec<String>,
}

impl UnduloidBranch {
    /// Interpolated `h_o(T)` for seeding a solve; quadratic in the
    /// three nearest samples, falling back to the Taylor model.
    pub fn predict(&self, t: f64) -> f64 {
        let mut pts: Vec<(f64, f64)> = self.samples.iter().map(|p| (p.t_max, p.h)).collect();
        pts.push((self.t_tilde, self.h_tilde));
        pts.sort_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()));
        if pts.len() < 3 || (pts[0].0 - t).abs() > 0.05 {
            return self.taylor.predict(t);
        }
        lagrange3(&pts[..3], t)
    }
}

fn lagrange3(p: &[(f64, f64)], x: f64) -> f64 {
    let mut y = 0.0;
    for i in 0..3 {
        let mut w = p[i].1;
        for j in 0..3 {
            if i != j {
                w *= (x - p[j].0) / (p[i].0 - p[j].0);
            }
        }
        y += w;
    }
    y
}

/// Solve for `h_o(T)` and measure the closed curve over a full turn.
pub fn branch_point(s: &SurfaceProfile, t_max: f64, h_pred: f64, tol: f64) -> Result<BranchSample> {
    let h = solve_h_o(s, t_max, h_pred)?;
    let f_residual = period_map(s, t_max, h)? - FRAC_PI_2;
    let tr = integrate_graph(s, t_max, h, TAU, tol)?;
    let last = tr.last();
    let closure = (last.t - t_max).abs().max((last.sigma - FRAC_PI_2).abs());
    if closure > CLOSURE_TOL {
        return Err(Error::ClosureResidual {
            residual: closure,
            tol: CLOSURE_TOL,
        });
    }
    let opposite = tr
        .events
        .iter()
        .find(|e| matches!(e.kind, EventKind::TMax | EventKind::TMin))
        .map(|e| (e.kind, tr.states[e.index].t))
        .ok_or_else(|| Error::InsufficientArc(format!("no second extremum on the curve through T = {t_max}")))?;
    let start_kind = if opposite.0 == EventKind::TMin { EventKind::TMax } else { EventKind::TMin };
    let inner_max = tr
        .events_of(start_kind)
        .filter(|st| st.theta < TAU - 1e-9)
        .count() as u32;
    let t_opposite = opposite.1;
    let k = inner_max + 1;
    Ok(BranchSample {
        t_max,
        h,
        t_opposite,
        f_residual,
        closure_residual: closure,
        length: last.s,
        area: last.area,
        drift: tr.first_integral_drift(s),
        k,
        period: TAU / k as f64,
    })
}

/// Continue `h_o(T)` from the bifurcation point over `t_range` (which may
/// extend to either side of `t_tilde`). `step` is the largest step in `T`.
pub fn trace_unduloid_branch(
    s: &SurfaceProfile,
    t_range: (f64, f64),
    step: f64,
    tol: f64,
) -> Result<UnduloidBranch> {
    let taylor = analytic_taylor(s)?;
    let tt = taylor.t_tilde;
    let (lo, hi) = (t_range.0.min(t_range.1), t_range.0.max(t_range.1));
    if !(lo > 0.0 && hi < s.t0) {
        return Err(Error::InvalidParameter(format!("branch range ({lo}, {hi}) outside (0, t0)")));
    }
    let mut samples = Vec::new();
    let mut notes = Vec::new();
    for (end, dir) in [(hi, 1.0), (lo, -1.0)] {
        if (end - tt) * dir <= 0.0 {
            continue;
        }
        let max_step = step.min((end - tt).abs() / 8.0);
        let mut h_step = (1e-3 * tt).min(max_step);
        let mut side: Vec<BranchSample> = Vec::new();
        let mut t_cur = tt;
        while (end - t_cur) * dir > 1e-12 {
            let t_next = if (end - (t_cur + dir * h_step)) * dir < 0.0 {
                end
            } else {
                t_cur + dir * h_step
            };
            let pred = match side.len() {
                0 | 1 => taylor.predict(t_next),
                n => {
                    let pts = [
                        (tt, taylor.h_tilde),
                        (side[n - 2].t_max, side[n - 2].h),
                        (side[n - 1].t_max, side[n - 1].h),
                    ];
                    let pts = if n >= 3 {
                        [(side[n - 3].t_max, side[n - 3].h), pts[1], pts[2]]
                    } else {
                        pts
                    };
                    lagrange3(&pts, t_next)
                }
            };
            match branch_point(s, t_next, pred, tol) {
                Ok(p) if p.k == 1 => {
                    side.push(p);
                    t_cur = t_next;
                    h_step = (h_step * 1.5).min(max_step);
                }
                outcome => {
                    h_step *= 0.5;
                    if h_step < 1e-9 * tt.max(1.0) {
                        let why = match outcome {
                            Ok(p) => format!("curve at T = {} has k = {}", p.t_max, p.k),
                            Err(e) => e.to_string(),
                        };
                        notes.push(format!("stopped at T = {t_cur}: {why}"));
                        break;
                    }
                }
            }
        }
        samples.extend(side);
    }
    if samples.is_empty() {
        return Err(Error::NoBracket(format!(
            "no unduloid found next to t_tilde = {tt}: {}",
            notes.join("; ")
        )));
    }
    samples.sort_by(|a, b| a.t_max.total_cmp(&b.t_max));
    Ok(UnduloidBranch {
        t_tilde: tt,
        h_tilde: taylor.h_tilde,
        taylor,
        samples,
        notes,
    })
}

/// `(h_o''(t_tilde), A''(t_tilde))` by second differences of direct branch
/// solves at `t_tilde +- d` and `+- 2d`, with Richardson extrapolation.
pub fn fd_branch_curvature(s: &SurfaceProfile, taylor: &TaylorCoefficients, d: f64) -> Result<(f64, f64)> {
    let tt = taylor.t_tilde;
    let a0 = TAU * s.phi(tt);
    let at = |dt: f64| -> Result<(f64, f64)> {
        let p = branch_point(s, tt + dt, taylor.predict(tt + dt), PERIOD_MAP_TOL)?;
        Ok((p.h, p.area))
    };
    let second = |d: f64| -> Result<(f64, f64)> {
        let (hp, ap) = at(d)?;
        let (hm, am) = at(-d)?;
        Ok((
            (hp - 2.0 * taylor.h_tilde + hm) / (d * d),
            (ap - 2.0 * a0 + am) / (d * d),
        ))
    };
    let (h1, a1) = second(d)?;
    let (h2, a2) = second(2.0 * d)?;
    Ok(((4.0 * h1 - h2) / 3.0, (4.0 * a1 - a2) / 3.0))
}

/// FD slope of `h_o` at `t_tilde` from solves at `t_tilde +- d`.
pub fn fd_branch_slope(s: &SurfaceProfile, taylor: &TaylorCoefficients, d: f64) -> Result<f64> {
    let tt = taylor.t_tilde;
    let hp = solve_h_o(s, tt + d, taylor.predict(tt + d))?;
    let hm = solve_h_o(s, tt - d, taylor.predict(tt - d))?;
    Ok((hp - hm) / (2.0 * d))
}

pub const PERIOD_FD_STEP: f64 = 1e-4;

/// `d(period)/dT` at fixed `h = h_o(T)`, from central differences of the
/// half period. Within `2 * PERIOD_FD_STEP` of `t_tilde` the second-order
/// model `2 theta'' (T - t_tilde)` is returned instead.
pub fn period_derivative(s: &SurfaceProfile, branch: &UnduloidBranch, t_max: f64) -> Result<f64> {
    let tay = &branch.taylor;
    let dt = t_max - tay.t_tilde;
    if dt.abs() < 2.0 * PERIOD_FD_STEP {
        return Ok(2.0 * tay.theta_second * dt);
    }
    let h = solve_h_o(s, t_max, branch.predict(t_max))?;
    let d = PERIOD_FD_STEP;
    let (p, _) = crate::curve::half_period(s, t_max + d, h, PERIOD_MAP_TOL)?;
    let (m, _) = crate::curve::half_period(s, t_max - d, h, PERIOD_MAP_TOL)?;
    Ok((2.0 * p - 2.0 * m) / (2.0 * d))
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedCurve {
    pub class: CurveClass,
    /// Geodesic curvature in the integration orientation (w.r.t. `-d/dt`
    /// at the top point).
    pub h: f64,
    pub t_max: f64,
    pub t_min: f64,
    /// `2 pi / k` for curves winding around the torus; `None` for disks.
    pub period: Option<f64>,
    pub k: Option<u32>,
    pub length: f64,
    /// `oint Phi d theta`; for disks the enclosed area.
    pub area: f64,
    pub trajectory: Trajectory,
    pub closure_residual: f64,
    pub embedded: bool,
}

impl ClosedCurve {
    pub fn parallel(s: &SurfaceProfile, t: f64) -> Self {
        let h = s.parallel_curvature(t);
        let l = TAU * s.f(t);
        let st = CurveState::at_max(t);
        let end = CurveState {
            theta: TAU,
            s: l,
            area: TAU * s.phi(t),
            ..st
        };
        ClosedCurve {
            class: CurveClass::Circle,
            h,
            t_max: t,
            t_min: t,
            period: Some(TAU),
            k: Some(1),
            length: l,
            area: end.area,
            trajectory: Trajectory {
                h,
                states: vec![st, end],
                events: Vec::new(),
                first_integral_ref: crate::curve::first_integral(s, &st, h),
                stop: None,
            },
            closure_residual: 0.0,
            embedded: true,
        }
    }

    pub fn vertical(s: &SurfaceProfile, theta: f64) -> Result<Self> {
        let init = CurveState {
            theta,
            t: -s.t0,
            sigma: 0.0,
            s: 0.0,
            area: 0.0,
        };
        let tr = integrate_arclength_until(s, init, 0.0, 2.0 * s.t0, PERIOD_MAP_TOL, &[])?;
        Ok(ClosedCurve {
            class: CurveClass::VerticalGeodesic,
            h: 0.0,
            t_max: s.t0,
            t_min: -s.t0,
            period: None,
            k: None,
            length: 2.0 * s.t0,
            area: 0.0,
            closure_residual: (tr.last().theta - theta).abs(),
            trajectory: tr,
            embedded: true,
        })
    }

    /// The unduloid through the extremum `(0, T)` with curvature `h`,
    /// integrated in arc length over one full period.
    pub fn unduloid(s: &SurfaceProfile, t_start: f64, h: f64, tol: f64) -> Result<Self> {
        let budget = crate::curve::arc_budget(s);
        // sigma' > 0 at sigma = pi/2 makes the start a t-maximum.
        let start_kind = if h > s.parallel_curvature(t_start) {
            EventKind::TMax
        } else {
            EventKind::TMin
        };
        let tr = integrate_arclength_until(s, CurveState::at_max(t_start), h, budget, tol, &[start_kind])?;
        let last = *tr.last();
        if tr.stop != Some(start_kind) {
            return Err(Error::NoCriticalPoint { budget });
        }
        let (t_min, t_max) = tr
            .states
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), st| (a.min(st.t), b.max(st.t)));
        let class = crate::curve::classify_curve(&tr)?;
        let k = (TAU / last.theta).round().max(1.0);
        let closure = (last.t - t_start)
            .abs()
            .max(angle_diff(last.sigma, FRAC_PI_2).abs())
            .max((k * last.theta - TAU).abs());
        Ok(ClosedCurve {
            class,
            h,
            t_max,
            t_min,
            period: Some(last.theta),
            k: Some(k as u32),
            length: last.s,
            area: last.area,
            trajectory: tr,
            closure_residual: closure,
            embedded: class == CurveClass::Unduloid,
        })
    }
}

/// `t_min + T` and the state at the first critical point after the
/// maximum `(0, T)`.
fn nodoid_half(s: &SurfaceProfile, t_max: f64, h: f64, tol: f64) -> Result<CurveState> {
    let budget = crate::curve::arc_budget(s);
    let tr = integrate_arclength_until(
        s,
        CurveState::at_max(t_max),
        h,
        budget,
        tol,
        &[EventKind::TMin, EventKind::TMax],
    )?;
    if tr.stop.is_none() {
        return Err(Error::NoCriticalPoint { budget });
    }
    Ok(*tr.last())
}

/// The closed nodoid with maximum `T` that is symmetric about the longest
/// parallel, found by solving `t_min(h) = -T` on a bracket from a coarse
/// sweep around `f(T) / Phi(T)`.
pub fn find_symmetric_nodoid(s: &SurfaceProfile, t_max: f64, tol: f64) -> Result<ClosedCurve> {
    if !(t_max > 0.0 && t_max < s.t0) {
        return Err(Error::InvalidParameter(format!("T = {t_max} outside (0, t0)")));
    }
    let seed = s.f(t_max) / s.phi(t_max);
    let failure = RefCell::new(None);
    let g = |h: f64| match nodoid_half(s, t_max, h, tol) {
        Ok(st) if st.sigma.sin() < 0.0 => st.t + t_max,
        Ok(_) => f64::NAN,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let grid: Vec<f64> = (0..=12).map(|i| seed * 2f64.powf(-1.0 + i as f64 / 6.0)).collect();
    let vals: Vec<f64> = grid.iter().map(|&h| g(h)).collect();
    let bracket = grid
        .windows(2)
        .zip(vals.windows(2))
        .filter(|(_, v)| v[0].is_finite() && v[1].is_finite() && v[0].signum() != v[1].signum())
        .map(|(h, _)| (h[0], h[1]))
        .min_by(|a, b| (a.0 - seed).abs().total_cmp(&(b.0 - seed).abs()));
    let Some((a, b)) = bracket else {
        let why = failure.into_inner().map(|e| e.to_string()).unwrap_or_default();
        return Err(Error::NoBracket(format!("no symmetric nodoid with maximum T = {t_max} {why}")));
    };
    let h = roots::brent(g, a, b, 1e-15 * seed.abs().max(1.0), 200)?;

    let budget = crate::curve::arc_budget(s);
    let tr = integrate_arclength_until(s, CurveState::at_max(t_max), h, budget, tol, &[EventKind::TMax])?;
    if tr.stop != Some(EventKind::TMax) {
        return Err(Error::NoCriticalPoint { budget });
    }
    let last = *tr.last();
    let t_min = tr
        .events_of(EventKind::TMin)
        .map(|st| st.t)
        .fold(f64::INFINITY, f64::min);
    let theta_min = tr
        .events_of(EventKind::TMin)
        .map(|st| st.theta)
        .next()
        .unwrap_or(f64::NAN);
    let closure = (last.t - t_max)
        .abs()
        .max(angle_diff(last.theta, 0.0).abs())
        .max(angle_diff(last.sigma, FRAC_PI_2).abs())
        .max(angle_diff(theta_min, 0.0).abs());
    if !(closure <= CLOSURE_TOL) {
        return Err(Error::ClosureResidual {
            residual: closure,
            tol: CLOSURE_TOL,
        });
    }
    let theta_span = tr.states.iter().map(|st| st.theta.abs()).fold(0.0, f64::max);
    Ok(ClosedCurve {
        class: CurveClass::Nodoid,
        h,
        t_max,
        t_min,
        period: None,
        k: None,
        length: last.s,
        area: last.area,
        closure_residual: closure,
        embedded: theta_span < PI,
        trajectory: tr,
    })
}
