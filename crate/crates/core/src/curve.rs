//! Curves of constant geodesic curvature in arc-length and graph form.
//!
//! Arc-length state: `(theta, t, sigma, area)` with
//! `theta' = sin(sigma)/f`, `t' = cos(sigma)`, `sigma' = h - (f'/f) sin(sigma)`.
//! Graph state over theta: `(t, sigma, s, area)`. In both, `area`
//! accumulates `int Phi(t) dtheta`, so over a closed clockwise loop it is
//! the enclosed area.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::ode::{OdeSystem, StepControl, Stepper};
use crate::roots;
use crate::surface::SurfaceProfile;

/// Smallest `|sin sigma|` tolerated in graph form.
pub const GRAPH_GATE: f64 = 1e-6;
const EVENT_SKIP: f64 = 1e-12;
const EVENT_XTOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveState {
    /// Lifted angle; not reduced modulo `2 pi`.
    pub theta: f64,
    pub t: f64,
    /// Oriented angle from `d/dt` to the unit tangent.
    pub sigma: f64,
    pub s: f64,
    /// Running `int Phi(t) dtheta`.
    pub area: f64,
}

impl CurveState {
    pub fn at_max(t: f64) -> Self {
        Self {
            theta: 0.0,
            t,
            sigma: FRAC_PI_2,
            s: 0.0,
            area: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    TMax,
    TMin,
    VerticalTangent,
    SegmentJoint,
    Wrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveEvent {
    pub index: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveClass {
    Circle,
    VerticalGeodesic,
    Nodoid,
    Unduloid,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub h: f64,
    pub states: Vec<CurveState>,
    pub events: Vec<CurveEvent>,
    pub first_integral_ref: f64,
    /// The event kind that ended the integration early, if any.
    pub stop: Option<EventKind>,
}

impl Trajectory {
    pub fn last(&self) -> &CurveState {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &CurveState> + '_ {
        self.events
            .iter()
            .filter(move |e| e.kind == kind)
            .map(|e| &self.states[e.index])
    }

    /// First integral at every state, with `Phi` followed along the lift
    /// so that crossing the seam at `t0` leaves it unchanged.
    pub fn first_integral_values(&self, s: &SurfaceProfile) -> Vec<f64> {
        let turn = s.phi(s.t0) - s.phi(-s.t0);
        let mut offset = 0.0;
        let mut prev = self.states.first().map_or(0.0, |st| st.t);
        self.states
            .iter()
            .map(|st| {
                if st.t - prev < -s.t0 {
                    offset += turn;
                } else if st.t - prev > s.t0 {
                    offset -= turn;
                }
                prev = st.t;
                first_integral(s, st, self.h) - self.h * offset
            })
            .collect()
    }

    /// Largest deviation of the first integral from its initial value.
    pub fn first_integral_drift(&self, s: &SurfaceProfile) -> f64 {
        self.first_integral_values(s)
            .iter()
            .map(|w| (w - self.first_integral_ref).abs())
            .fold(0.0, f64::max)
    }
}

pub fn first_integral(s: &SurfaceProfile, st: &CurveState, h: f64) -> f64 {
    s.f(st.t) * st.sigma.sin() - h * s.phi(st.t)
}

struct ArcSystem<'a> {
    surf: &'a SurfaceProfile,
    h: f64,
}

impl OdeSystem<4> for ArcSystem<'_> {
    #[inline]
    fn rhs(&self, _s: f64, y: &[f64; 4]) -> [f64; 4] {
        let (f, fp) = self.surf.f_fp(y[1]);
        let (sn, cs) = y[2].sin_cos();
        let dtheta = sn / f;
        [dtheta, cs, self.h - fp / f * sn, self.surf.phi(y[1]) * dtheta]
    }
}

struct GraphSystem<'a> {
    surf: &'a SurfaceProfile,
    h: f64,
}

impl OdeSystem<4> for GraphSystem<'_> {
    #[inline]
    fn rhs(&self, _theta: f64, y: &[f64; 4]) -> [f64; 4] {
        let (f, fp) = self.surf.f_fp(y[0]);
        let (sn, cs) = y[1].sin_cos();
        [f * cs / sn, self.h * f / sn - fp, f / sn, self.surf.phi(y[0])]
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Form {
    Arc,
    Graph,
}

impl Form {
    fn state(self, x: f64, y: &[f64; 4]) -> CurveState {
        match self {
            Form::Arc => CurveState {
                theta: y[0],
                t: y[1],
                sigma: y[2],
                s: x,
                area: y[3],
            },
            Form::Graph => CurveState {
                theta: x,
                t: y[0],
                sigma: y[1],
                s: y[2],
                area: y[3],
            },
        }
    }

    fn t_idx(self) -> usize {
        match self {
            Form::Arc => 1,
            Form::Graph => 0,
        }
    }

    fn sigma_idx(self) -> usize {
        match self {
            Form::Arc => 2,
            Form::Graph => 1,
        }
    }

    fn theta(self, x: f64, y: &[f64; 4]) -> f64 {
        match self {
            Form::Arc => y[0],
            Form::Graph => x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Probe {
    Critical,
    Vertical,
    Joint(f64),
    WrapT(f64),
    WrapTheta(f64),
}

struct DriveOutput {
    states: Vec<CurveState>,
    events: Vec<CurveEvent>,
    samples: Vec<CurveState>,
    stopped: Option<EventKind>,
}

struct Drive<'a> {
    surf: &'a SurfaceProfile,
    form: Form,
    x_end: f64,
    tol: f64,
    stop_on: &'a [EventKind],
    nodes: &'a [f64],
}

impl Drive<'_> {
    fn probe_value(&self, p: Probe, x: f64, y: &[f64; 4]) -> f64 {
        let t = y[self.form.t_idx()];
        let sg = y[self.form.sigma_idx()];
        match p {
            Probe::Critical => sg.cos(),
            Probe::Vertical => sg.sin(),
            Probe::Joint(tj) => t - tj,
            Probe::WrapT(tw) => t - tw,
            Probe::WrapTheta(th) => self.form.theta(x, y) - th,
        }
    }

    fn run<S: OdeSystem<4>>(&self, sys: &S, x0: f64, y0: [f64; 4]) -> Result<DriveOutput> {
        let form = self.form;
        let dir = if self.x_end >= x0 { 1.0 } else { -1.0 };
        let mut st = Stepper::new(sys, x0, y0, dir, StepControl::with_tol(self.tol));
        let mut out = DriveOutput {
            states: vec![form.state(x0, &y0)],
            events: Vec::new(),
            samples: Vec::new(),
            stopped: None,
        };
        let mut next_node = 0usize;
        while next_node < self.nodes.len() && (self.nodes[next_node] - x0) * dir <= 0.0 {
            out.samples.push(form.state(x0, &y0));
            next_node += 1;
        }
        let joints = self.surf.joints();
        let t0 = self.surf.t0;
        // Probes sitting on their root at the start are not events.
        let mut just_fired: Vec<Probe> = {
            let mut all = vec![Probe::Critical, Probe::Vertical, Probe::WrapT(t0), Probe::WrapT(-t0)];
            all.extend(joints.iter().map(|&j| Probe::Joint(j)));
            let th = form.theta(x0, &y0);
            all.push(Probe::WrapTheta((th / TAU).round() * TAU));
            all.into_iter()
                .filter(|&p| self.probe_value(p, x0, &y0).abs() <= EVENT_SKIP)
                .collect()
        };
        while (self.x_end - st.x) * dir > 0.0 {
            // An event can land within round-off of the end point.
            if (self.x_end - st.x) * dir <= 1e-12 * st.x.abs().max(1.0) {
                break;
            }
            if let Err(e) = st.step(self.x_end) {
                return Err(match (form, e) {
                    (Form::Graph, Error::StepUnderflow { x, .. }) => Error::GraphBreakdown {
                        theta: x,
                        sin_sigma: st.y[1].sin().abs(),
                    },
                    (Form::Arc, Error::StepUnderflow { x, .. }) => Error::StepUnderflow { x, t: st.y[1] },
                    (_, e) => e,
                });
            }
            let (xp, yp) = (st.x_prev, st.y_prev);
            let (xn, yn) = (st.x, st.y);

            if form == Form::Graph {
                let sp = yp[1].sin();
                let sn = yn[1].sin();
                if sn.abs() < GRAPH_GATE || sp.signum() != sn.signum() {
                    return Err(Error::GraphBreakdown {
                        theta: xn,
                        sin_sigma: sn.abs(),
                    });
                }
            }

            let mut probes = vec![Probe::Critical];
            if form == Form::Arc {
                probes.push(Probe::Vertical);
            }
            probes.extend(joints.iter().map(|&j| Probe::Joint(j)));
            probes.push(Probe::WrapT(t0));
            probes.push(Probe::WrapT(-t0));
            let th_p = form.theta(xp, &yp) / TAU;
            let th_n = form.theta(xn, &yn) / TAU;
            if th_p.floor() != th_n.floor() {
                let m = th_p.floor().max(th_n.floor());
                probes.push(Probe::WrapTheta(m * TAU));
            }

            let mut found: Vec<(f64, Probe, f64)> = Vec::new();
            for &p in &probes {
                let gp = self.probe_value(p, xp, &yp);
                let gn = self.probe_value(p, xn, &yn);
                if gp == 0.0 || gp.signum() == gn.signum() {
                    continue;
                }
                if gp.abs() <= EVENT_SKIP && just_fired.contains(&p) {
                    continue;
                }
                let xe = if gn == 0.0 {
                    xn
                } else {
                    roots::illinois(
                        |x| self.probe_value(p, x, &st.dense(x)),
                        xp,
                        gp,
                        xn,
                        gn,
                        EVENT_XTOL * xn.abs().max(1.0),
                    )
                };
                found.push((xe, p, gp));
            }
            found.sort_by(|a, b| ((a.0 - b.0) * dir).total_cmp(&0.0));
            // Events closer than this are handled together at the earliest one.
            let merge = 1e-11 * xn.abs().max(1.0);
            let group: Vec<(f64, Probe, f64)> = match found.first() {
                Some(&(x1, _, _)) => found
                    .iter()
                    .copied()
                    .filter(|e| ((e.0 - x1) * dir) <= merge)
                    .collect(),
                None => Vec::new(),
            };

            let (x_cut, y_cut) = match group.first() {
                Some(&(xe, _, _)) => (xe, st.dense(xe)),
                None => (xn, yn),
            };
            while next_node < self.nodes.len() && (self.nodes[next_node] - x_cut) * dir <= 0.0 {
                let xnode = self.nodes[next_node];
                out.samples.push(form.state(xnode, &st.dense(xnode)));
                next_node += 1;
            }

            if group.is_empty() {
                out.states.push(form.state(xn, &yn));
                just_fired.clear();
                continue;
            }
            let xe = x_cut;
            let mut ye = y_cut;
            let mut kinds = Vec::with_capacity(group.len());
            let mut wrap_to = None;
            for &(_, probe, gp) in &group {
                kinds.push(match probe {
                    Probe::Critical => {
                        if gp > 0.0 {
                            EventKind::TMax
                        } else {
                            EventKind::TMin
                        }
                    }
                    Probe::Vertical => EventKind::VerticalTangent,
                    Probe::Joint(tj) => {
                        ye[form.t_idx()] = tj;
                        EventKind::SegmentJoint
                    }
                    Probe::WrapT(tw) => {
                        ye[form.t_idx()] = tw;
                        wrap_to = Some(-tw);
                        EventKind::Wrap
                    }
                    Probe::WrapTheta(_) => EventKind::Wrap,
                });
            }
            out.states.push(form.state(xe, &ye));
            let index = out.states.len() - 1;
            for &kind in &kinds {
                out.events.push(CurveEvent { index, kind });
            }
            if let Some(&kind) = kinds.iter().find(|k| self.stop_on.contains(k)) {
                out.stopped = Some(kind);
                return Ok(out);
            }
            if let Some(tw) = wrap_to {
                ye[form.t_idx()] = tw;
            }
            just_fired = group.iter().map(|g| g.1).collect();
            st.reset(xe, ye);
        }
        // Nodes left over after an early break sit within round-off of the end.
        while next_node < self.nodes.len() {
            out.samples.push(form.state(self.nodes[next_node], &st.y));
            next_node += 1;
        }
        Ok(out)
    }
}

fn arc_initial(init: &CurveState) -> [f64; 4] {
    [init.theta, init.t, init.sigma, init.area]
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive (got {tol})")));
    }
    Ok(())
}

/// Integrate in arc length from `init.s` to `s_max`, stopping early at the
/// first event whose kind is listed in `stop_on`.
pub fn integrate_arclength_until(
    s: &SurfaceProfile,
    init: CurveState,
    h: f64,
    s_max: f64,
    tol: f64,
    stop_on: &[EventKind],
) -> Result<Trajectory> {
    check_tol(tol)?;
    let sys = ArcSystem { surf: s, h };
    let drive = Drive {
        surf: s,
        form: Form::Arc,
        x_end: s_max,
        tol,
        stop_on,
        nodes: &[],
    };
    let out = drive.run(&sys, init.s, arc_initial(&init))?;
    Ok(Trajectory {
        h,
        states: out.states,
        events: out.events,
        first_integral_ref: first_integral(s, &init, h),
        stop: out.stopped,
    })
}

pub fn integrate_arclength(
    s: &SurfaceProfile,
    init: CurveState,
    h: f64,
    s_max: f64,
    tol: f64,
) -> Result<Trajectory> {
    integrate_arclength_until(s, init, h, s_max, tol, &[])
}

/// States at the given arc lengths (ordered in the direction of travel).
pub fn sample_arclength(
    s: &SurfaceProfile,
    init: CurveState,
    h: f64,
    nodes: &[f64],
    tol: f64,
) -> Result<Vec<CurveState>> {
    check_tol(tol)?;
    let Some(&x_end) = nodes.last() else {
        return Ok(Vec::new());
    };
    let sys = ArcSystem { surf: s, h };
    let drive = Drive {
        surf: s,
        form: Form::Arc,
        x_end,
        tol,
        stop_on: &[],
        nodes,
    };
    Ok(drive.run(&sys, init.s, arc_initial(&init))?.samples)
}

/// Graph-form integration from `(theta, t, sigma) = (0, T, pi/2)`.
pub fn integrate_graph(
    s: &SurfaceProfile,
    t_start: f64,
    h: f64,
    theta_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    check_tol(tol)?;
    let sys = GraphSystem { surf: s, h };
    let drive = Drive {
        surf: s,
        form: Form::Graph,
        x_end: theta_end,
        tol,
        stop_on: &[],
        nodes: &[],
    };
    let init = CurveState::at_max(t_start);
    let out = drive.run(&sys, 0.0, [t_start, FRAC_PI_2, 0.0, 0.0])?;
    Ok(Trajectory {
        h,
        states: out.states,
        events: out.events,
        first_integral_ref: first_integral(s, &init, h),
        stop: out.stopped,
    })
}

/// Graph-form states at the given angles.
pub fn sample_graph(
    s: &SurfaceProfile,
    t_start: f64,
    h: f64,
    thetas: &[f64],
    tol: f64,
) -> Result<Vec<CurveState>> {
    check_tol(tol)?;
    let Some(&x_end) = thetas.last() else {
        return Ok(Vec::new());
    };
    let sys = GraphSystem { surf: s, h };
    let drive = Drive {
        surf: s,
        form: Form::Graph,
        x_end,
        tol,
        stop_on: &[],
        nodes: thetas,
    };
    Ok(drive.run(&sys, 0.0, [t_start, FRAC_PI_2, 0.0, 0.0])?.samples)
}

pub fn classify_curve(tr: &Trajectory) -> Result<CurveClass> {
    let first = tr
        .states
        .first()
        .ok_or_else(|| Error::InsufficientArc("empty trajectory".into()))?;
    let (mut tmin, mut tmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut thmin, mut thmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for st in &tr.states {
        tmin = tmin.min(st.t);
        tmax = tmax.max(st.t);
        thmin = thmin.min(st.theta);
        thmax = thmax.max(st.theta);
    }
    if tmax - tmin <= 1e-9 {
        return Ok(CurveClass::Circle);
    }
    if thmax - thmin <= 1e-9 && tr.h == 0.0 {
        return Ok(CurveClass::VerticalGeodesic);
    }
    // Critical points in order, the start included when it is one.
    let mut crit: Vec<(EventKind, f64)> = Vec::new();
    if first.sigma.cos().abs() < 1e-9 && tr.states.len() > 1 {
        let kind = if tr.states[1].t < first.t {
            EventKind::TMax
        } else {
            EventKind::TMin
        };
        crit.push((kind, first.sigma.sin()));
    }
    for e in &tr.events {
        if matches!(e.kind, EventKind::TMax | EventKind::TMin) {
            crit.push((e.kind, tr.states[e.index].sigma.sin()));
        }
    }
    let imax = crit
        .iter()
        .position(|c| c.0 == EventKind::TMax)
        .ok_or_else(|| Error::InsufficientArc("no t-maximum observed".into()))?;
    let next = crit
        .get(imax + 1)
        .ok_or_else(|| Error::InsufficientArc("no critical point after the t-maximum".into()))?;
    if next.1.signum() == crit[imax].1.signum() {
        Ok(CurveClass::Unduloid)
    } else {
        Ok(CurveClass::Nodoid)
    }
}

/// Arc-length budget used when searching for the next critical point.
pub fn arc_budget(s: &SurfaceProfile) -> f64 {
    20.0 * (TAU * s.f(0.0) + 2.0 * s.t0)
}

/// Theta-advance from the extremum at `(0, T, pi/2)` to the next critical
/// point of `t`, together with the curve type.
pub fn half_period(s: &SurfaceProfile, t_start: f64, h: f64, tol: f64) -> Result<(f64, CurveClass)> {
    if (h - s.parallel_curvature(t_start)).abs() <= 1e-14 * (1.0 + h.abs()) {
        return Err(Error::HypothesisViolated(format!(
            "the curve through t = {t_start} with h = {h} is a parallel"
        )));
    }
    let budget = arc_budget(s);
    let tr = integrate_arclength_until(
        s,
        CurveState::at_max(t_start),
        h,
        budget,
        tol,
        &[EventKind::TMax, EventKind::TMin],
    )?;
    let last = tr.last();
    let hit = tr.stop.is_some();
    if !hit {
        return Err(Error::NoCriticalPoint { budget });
    }
    let kind = if last.sigma.sin() > 0.0 {
        CurveClass::Unduloid
    } else {
        CurveClass::Nodoid
    };
    Ok((last.theta, kind))
}

/// Reduce an angle difference to `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_standard_torus, StandardTorusParams};
    use approx::assert_abs_diff_eq;

    fn torus() -> SurfaceProfile {
        build_standard_torus(StandardTorusParams { a: 1.0, r: 0.4 }).unwrap()
    }

    #[test]
    fn circle_at_bifurcation_parallel_is_constant() {
        let s = torus();
        let tt = 0.2 * PI;
        let hh = s.parallel_curvature(tt);
        assert_abs_diff_eq!(hh, -1.0, epsilon = 1e-14);
        let tr = integrate_arclength(&s, CurveState::at_max(tt), hh, 10.0, 1e-12).unwrap();
        for st in &tr.states {
            assert_abs_diff_eq!(st.t, tt, epsilon = 1e-12);
            assert_abs_diff_eq!(st.sigma, FRAC_PI_2, epsilon = 1e-12);
        }
        assert_eq!(classify_curve(&tr).unwrap(), CurveClass::Circle);
        let g = integrate_graph(&s, tt, hh, TAU, 1e-12).unwrap();
        assert_abs_diff_eq!(g.last().t, tt, epsilon = 1e-12);
        assert_abs_diff_eq!(g.last().s, TAU * s.f(tt), epsilon = 1e-10);
    }

    #[test]
    fn vertical_geodesic() {
        let s = torus();
        let init = CurveState {
            theta: 0.3,
            t: -0.5,
            sigma: 0.0,
            s: 0.0,
            area: 0.0,
        };
        let tr = integrate_arclength(&s, init, 0.0, 1.0, 1e-12).unwrap();
        let last = tr.last();
        assert_abs_diff_eq!(last.theta, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(last.t, 0.5, epsilon = 1e-12);
        assert_eq!(classify_curve(&tr).unwrap(), CurveClass::VerticalGeodesic);
        assert_abs_diff_eq!(tr.first_integral_drift(&s), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn vertical_geodesic_wraps_in_t() {
        let s = torus();
        let init = CurveState {
            theta: 0.0,
            t: 0.0,
            sigma: 0.0,
            s: 0.0,
            area: 0.0,
        };
        let tr = integrate_arclength(&s, init, 0.0, 2.0 * s.t0, 1e-12).unwrap();
        assert_eq!(tr.events_of(EventKind::Wrap).count(), 1);
        assert_abs_diff_eq!(tr.last().t, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn first_integral_survives_the_seam() {
        let s = build_standard_torus(StandardTorusParams { a: 1.0, r: 0.5 }).unwrap();
        let t = -0.5 * s.t0;
        let h = s.parallel_curvature(t) + 0.3;
        let tr = integrate_arclength(&s, CurveState::at_max(t), h, 15.0, 1e-10).unwrap();
        assert!(tr.events_of(EventKind::Wrap).count() > 0);
        let drift = tr.first_integral_drift(&s);
        assert!(drift <= 1e-9 * (1.0 + tr.first_integral_ref.abs()), "drift {drift:e}");
    }

    #[test]
    fn first_integral_is_conserved() {
        let s = torus();
        let h = s.parallel_curvature(0.7) + 0.05;
        let tr = integrate_arclength(&s, CurveState::at_max(0.7), h, 20.0, 1e-10).unwrap();
        let drift = tr.first_integral_drift(&s);
        assert!(drift <= 1e-9 * (1.0 + tr.first_integral_ref.abs()), "drift {drift:e}");
    }

    #[test]
    fn unduloid_near_bifurcation() {
        let s = torus();
        let tr = integrate_arclength(&s, CurveState::at_max(0.2 * PI + 0.05), -1.0, 12.0, 1e-11).unwrap();
        assert_eq!(classify_curve(&tr).unwrap(), CurveClass::Unduloid);
    }

    #[test]
    fn nodoid_for_large_curvature() {
        let s = torus();
        let tr = integrate_arclength(&s, CurveState::at_max(0.3), 3.0, 10.0, 1e-11).unwrap();
        assert_eq!(classify_curve(&tr).unwrap(), CurveClass::Nodoid);
        assert!(tr.events_of(EventKind::VerticalTangent).count() >= 1);
    }

    #[test]
    fn short_arc_is_insufficient() {
        let s = torus();
        let tr = integrate_arclength(&s, CurveState::at_max(0.3), 3.0, 0.01, 1e-11).unwrap();
        assert!(matches!(classify_curve(&tr), Err(Error::InsufficientArc(_))));
    }

    #[test]
    fn graph_form_breaks_down_on_nodoids() {
        let s = torus();
        let r = integrate_graph(&s, 0.3, 3.0, PI, 1e-10);
        assert!(matches!(r, Err(Error::GraphBreakdown { .. })), "{r:?}");
    }

    #[test]
    fn arc_and_graph_agree() {
        let s = torus();
        let (t_start, h) = (0.2 * PI + 0.05, -0.99);
        let g = integrate_graph(&s, t_start, h, 3.0, 1e-12).unwrap();
        let nodes: Vec<f64> = g.states.iter().map(|st| st.s).collect();
        let a = sample_arclength(&s, CurveState::at_max(t_start), h, &nodes, 1e-12).unwrap();
        for (x, y) in g.states.iter().zip(&a) {
            assert_abs_diff_eq!(x.theta, y.theta, epsilon = 1e-8);
            assert_abs_diff_eq!(x.t, y.t, epsilon = 1e-8);
        }
    }

    #[test]
    fn reflection_symmetry_about_extremum() {
        let s = torus();
        let (t_start, h) = (0.5, 0.3);
        let fwd: Vec<f64> = (1..=40).map(|i| i as f64 * 0.1).collect();
        let bwd: Vec<f64> = fwd.iter().map(|x| -x).collect();
        let a = sample_arclength(&s, CurveState::at_max(t_start), h, &fwd, 1e-12).unwrap();
        let b = sample_arclength(&s, CurveState::at_max(t_start), h, &bwd, 1e-12).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert_abs_diff_eq!(p.theta, -q.theta, epsilon = 1e-8);
            assert_abs_diff_eq!(p.t, q.t, epsilon = 1e-8);
        }
    }

    #[test]
    fn half_period_limit_at_bifurcation() {
        let s = torus();
        let tt = 0.2 * PI;
        let eps = 0.02;
        let (dth, kind) = half_period(&s, tt + eps, -1.0, 1e-12).unwrap();
        assert_eq!(kind, CurveClass::Unduloid);
        // theta'' = f sigma_TTT / 3 with sigma_TTT = pi/8 * 251.5625.
        let second = PI / 8.0 * 251.5625 / 3.0;
        let model = PI + 0.5 * second * eps * eps;
        assert!(((dth - PI) / (model - PI) - 1.0).abs() < 0.1, "{dth} vs {model}");
        let (d2, _) = half_period(&s, tt + eps, -1.0, 1e-13).unwrap();
        assert_abs_diff_eq!(dth, d2, epsilon = 1e-10);
    }

    #[test]
    fn half_period_rejects_parallels() {
        let s = torus();
        let tt = 0.2 * PI;
        assert!(matches!(
            half_period(&s, tt, -1.0, 1e-10),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn vertical_geodesic_has_no_critical_point() {
        let s = torus();
        let tr = integrate_arclength_until(
            &s,
            CurveState { sigma: 0.0, ..CurveState::at_max(0.0) },
            0.0,
            50.0,
            1e-10,
            &[EventKind::TMax, EventKind::TMin],
        )
        .unwrap();
        assert_eq!(tr.events_of(EventKind::TMax).count(), 0);
    }

    #[test]
    fn classification_stable_under_refinement() {
        let s = torus();
        for (t_start, h) in [(0.2 * PI + 0.05, -0.99), (0.3, 3.0), (0.6, 0.5)] {
            let a = integrate_arclength(&s, CurveState::at_max(t_start), h, 15.0, 1e-8).unwrap();
            let b = integrate_arclength(&s, CurveState::at_max(t_start), h, 15.0, 1e-10).unwrap();
            assert_eq!(classify_curve(&a).unwrap(), classify_curve(&b).unwrap());
        }
    }

    #[test]
    fn angle_diff_reduces() {
        assert_abs_diff_eq!(angle_diff(TAU + 0.1, 0.0), 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(angle_diff(-0.1, TAU), -0.1, epsilon = 1e-15);
    }
}
