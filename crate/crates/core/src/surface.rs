//! Warped-product tori `dt^2 + f(t)^2 dtheta^2` on `S^1 x [-t0, t0]` with
//! the boundary parallels identified.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::roots;

/// Closed-form pieces a profile can be assembled from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SegmentShape {
    /// `offset + amplitude * cos(freq * t + phase)`
    Cosine {
        offset: f64,
        amplitude: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude * cosh(shift + rate * t)`
    Cosh { amplitude: f64, shift: f64, rate: f64 },
    /// `sum coeffs[i] * t^i`
    Polynomial { coeffs: Vec<f64> },
}

impl SegmentShape {
    /// Derivative of order `k` (0 to 4) at `t`.
    pub fn deriv(&self, t: f64, k: u32) -> f64 {
        match self {
            SegmentShape::Cosine {
                offset,
                amplitude,
                freq,
                phase,
            } => {
                let arg = freq * t + phase + 0.5 * PI * k as f64;
                let v = amplitude * freq.powi(k as i32) * arg.cos();
                if k == 0 {
                    offset + amplitude * (freq * t + phase).cos()
                } else {
                    v
                }
            }
            SegmentShape::Cosh {
                amplitude,
                shift,
                rate,
            } => {
                let u = shift + rate * t;
                let hyp = if k.is_multiple_of(2) { u.cosh() } else { u.sinh() };
                amplitude * rate.powi(k as i32) * hyp
            }
            SegmentShape::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for (i, c) in coeffs.iter().enumerate().rev() {
                    if (i as u32) < k {
                        break;
                    }
                    let fall: f64 = (0..k).map(|j| (i as u32 - j) as f64).product();
                    acc = acc * t + c * fall;
                }
                acc
            }
        }
    }

    /// An antiderivative of `f`, or `None` when the shape has no closed form.
    pub fn antiderivative(&self, t: f64) -> Option<f64> {
        match self {
            SegmentShape::Cosine {
                offset,
                amplitude,
                freq,
                phase,
            } => {
                if *freq == 0.0 {
                    Some((offset + amplitude * phase.cos()) * t)
                } else {
                    Some(offset * t + amplitude / freq * (freq * t + phase).sin())
                }
            }
            SegmentShape::Cosh {
                amplitude,
                shift,
                rate,
            } => {
                if *rate == 0.0 {
                    Some(amplitude * shift.cosh() * t)
                } else {
                    Some(amplitude / rate * (shift + rate * t).sinh())
                }
            }
            SegmentShape::Polynomial { coeffs } => Some(
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * t.powi(i as i32 + 1) / (i as f64 + 1.0))
                    .sum(),
            ),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            SegmentShape::Cosine {
                offset,
                amplitude,
                freq,
                phase,
            } => [offset, amplitude, freq, phase].iter().all(|v| v.is_finite()),
            SegmentShape::Cosh {
                amplitude,
                shift,
                rate,
            } => [amplitude, shift, rate].iter().all(|v| v.is_finite()),
            SegmentShape::Polynomial { coeffs } => {
                !coeffs.is_empty() && coeffs.iter().all(|v| v.is_finite())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(flatten)]
    pub shape: SegmentShape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardTorusParams {
    pub a: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereHyperbolicParams {
    pub a: f64,
    pub t_star: f64,
    pub b: f64,
}

impl SphereHyperbolicParams {
    /// The derived constants `(c, d)` of the hyperbolic pieces.
    pub fn derived(&self) -> Result<(f64, f64)> {
        let Self { a, t_star, b } = *self;
        if !(a > 0.0 && t_star > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "a, t_star, b must be positive (got {a}, {t_star}, {b})"
            )));
        }
        if t_star >= 0.5 * PI / a {
            return Err(Error::InvalidParameter(format!(
                "t_star = {t_star} must be below pi/(2a) = {}",
                0.5 * PI / a
            )));
        }
        let at = a * t_star;
        if b <= a * at.tan() {
            return Err(Error::InvalidParameter(format!(
                "b = {b} must exceed a tan(a t_star) = {}",
                a * at.tan()
            )));
        }
        let c2 = at.cos().powi(2) / (a * a) - at.sin().powi(2) / (b * b);
        let c = c2.sqrt();
        let d = b * t_star + (at.cos() / (a * c)).acosh();
        Ok((c, d))
    }
}

/// Pointwise metric data at one abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSample {
    pub t: f64,
    pub f: f64,
    pub fp: f64,
    pub fpp: f64,
    /// Gauss curvature `-f''/f`.
    pub k: f64,
    /// Geodesic curvature of the parallel with respect to `-d/dt`.
    pub h: f64,
    /// Length of the parallel.
    pub l: f64,
    /// `f'^2 - f f''`, equal to `L^2 (K + h^2) / (4 pi^2)`.
    pub d: f64,
}

/// Positive abscissae where `D` crosses the levels 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoints {
    /// First `t >= 0` with `D(t) <= 0`.
    pub t_c: Option<f64>,
    /// First `t >= 0` with `D(t) < 1`.
    pub t_tilde: Option<f64>,
    /// First `t >= 0` with `D(t) <= 1`; parallels from here outward are stable.
    pub stable_circle_min: Option<f64>,
    pub t0: f64,
}

const VALIDATION_GRID: usize = 4096;
const VALIDATION_TOL: f64 = 1e-8;
const ROOT_SCAN: usize = 512;

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceProfile {
    pub name: String,
    pub t0: f64,
    pub segments: Vec<Segment>,
    /// `int_{-t0}^{t_lo_i} f` for each segment.
    #[serde(skip)]
    psi_start: Vec<f64>,
    #[serde(skip)]
    psi_zero: f64,
    #[serde(skip)]
    psi_total: f64,
    #[serde(skip)]
    closed_form: bool,
}

impl SurfaceProfile {
    /// Assemble and validate a profile from contiguous segments covering
    /// `[-t0, t0]`.
    pub fn new(name: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidParameter("no segments".into()));
        }
        for s in &segments {
            if !(s.t_lo < s.t_hi) || !s.t_lo.is_finite() || !s.t_hi.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "segment [{}, {}] is empty or not finite",
                    s.t_lo, s.t_hi
                )));
            }
            if !s.shape.is_finite() {
                return Err(Error::InvalidParameter("segment coefficients not finite".into()));
            }
        }
        for w in segments.windows(2) {
            if (w[0].t_hi - w[1].t_lo).abs() > 1e-12 * (1.0 + w[0].t_hi.abs()) {
                return Err(Error::InvalidParameter(format!(
                    "segments not contiguous at {} / {}",
                    w[0].t_hi, w[1].t_lo
                )));
            }
        }
        let t0 = segments.last().map(|s| s.t_hi).unwrap_or(0.0);
        let lo = segments[0].t_lo;
        if t0 <= 0.0 || (lo + t0).abs() > 1e-12 * t0 {
            return Err(Error::InvalidParameter(format!(
                "segments must cover a symmetric interval [-t0, t0] (got [{lo}, {t0}])"
            )));
        }
        let mut segments = segments;
        segments[0].t_lo = -t0;
        for i in 1..segments.len() {
            segments[i].t_lo = segments[i - 1].t_hi;
        }
        let closed_form = segments.iter().all(|s| s.shape.antiderivative(0.0).is_some());
        let mut prof = Self {
            name: name.into(),
            t0,
            segments,
            psi_start: Vec::new(),
            psi_zero: 0.0,
            psi_total: 0.0,
            closed_form,
        };
        prof.build_antiderivative();
        prof.validate()?;
        Ok(prof)
    }

    fn segment_integral(&self, i: usize, a: f64, b: f64) -> f64 {
        let s = &self.segments[i];
        match (s.shape.antiderivative(b), s.shape.antiderivative(a)) {
            (Some(fb), Some(fa)) if self.closed_form => fb - fa,
            _ => quadrature::integrate(|t| s.shape.deriv(t, 0), a, b, 1e-15, 1e-14),
        }
    }

    fn build_antiderivative(&mut self) {
        let mut acc = 0.0;
        let mut starts = Vec::with_capacity(self.segments.len());
        for i in 0..self.segments.len() {
            starts.push(acc);
            let s = &self.segments[i];
            acc += self.segment_integral(i, s.t_lo, s.t_hi);
        }
        self.psi_start = starts;
        self.psi_total = acc;
        let j = self.segment_index(0.0);
        self.psi_zero = self.psi_start[j] + self.segment_integral(j, self.segments[j].t_lo, 0.0);
    }

    /// Segment used at `t`; joints belong to the segment on the side
    /// toward `t = 0`.
    pub fn segment_index(&self, t: f64) -> usize {
        let n = self.segments.len();
        if t >= 0.0 {
            for (i, s) in self.segments.iter().enumerate() {
                if t <= s.t_hi && t >= s.t_lo {
                    return i;
                }
            }
            n - 1
        } else {
            for (i, s) in self.segments.iter().enumerate().rev() {
                if t >= s.t_lo && t <= s.t_hi {
                    return i;
                }
            }
            0
        }
    }

    /// Interior joints (excluding `-t0` and `t0`).
    pub fn joints(&self) -> Vec<f64> {
        self.segments.iter().skip(1).map(|s| s.t_lo).collect()
    }

    /// Wrap `t` into `[-t0, t0]` using the identification of the ends.
    pub fn wrap(&self, t: f64) -> f64 {
        let p = 2.0 * self.t0;
        if t > self.t0 || t < -self.t0 {
            let mut u = (t + self.t0).rem_euclid(p) - self.t0;
            if u < -self.t0 {
                u = -self.t0;
            }
            u
        } else {
            t
        }
    }

    /// `[f, f', f'', f''', f'''']` at `t` (wrapped into range).
    pub fn derivs(&self, t: f64) -> [f64; 5] {
        let t = self.wrap(t);
        let s = &self.segments[self.segment_index(t)].shape;
        [
            s.deriv(t, 0),
            s.deriv(t, 1),
            s.deriv(t, 2),
            s.deriv(t, 3),
            s.deriv(t, 4),
        ]
    }

    /// `(f, f')` at `t`, wrapped periodically.
    #[inline]
    pub fn f_fp(&self, t: f64) -> (f64, f64) {
        let t = self.wrap(t);
        let s = &self.segments[self.segment_index(t)].shape;
        (s.deriv(t, 0), s.deriv(t, 1))
    }

    pub fn f(&self, t: f64) -> f64 {
        self.f_fp(t).0
    }

    /// `Phi(t) = int_0^t f`, extended past `+-t0` by periodicity of `f`.
    pub fn phi(&self, t: f64) -> f64 {
        let p = 2.0 * self.t0;
        let total = self.psi_total;
        let mut shift = 0.0;
        let mut u = t;
        if t > self.t0 || t < -self.t0 {
            let k = ((t + self.t0) / p).floor();
            u = t - k * p;
            if u > self.t0 {
                u = self.t0;
            }
            shift = k * total;
        }
        let j = self.segment_index(u);
        let s = &self.segments[j];
        self.psi_start[j] + self.segment_integral(j, s.t_lo, u) - self.psi_zero + shift
    }

    /// Gauss curvature `K = -f''/f`.
    pub fn gauss_curvature(&self, t: f64) -> f64 {
        let d = self.derivs(t);
        -d[2] / d[0]
    }

    /// `K'` and `K''` from the closed-form derivatives of `f`.
    pub fn curvature_derivatives(&self, t: f64) -> (f64, f64) {
        let [f, f1, f2, f3, f4] = self.derivs(t);
        let k1 = -f3 / f + f2 * f1 / (f * f);
        let k2 = -f4 / f + (2.0 * f1 * f3 + f2 * f2) / (f * f) - 2.0 * f1 * f1 * f2 / (f * f * f);
        (k1, k2)
    }

    /// `D = f'^2 - f f''` with the given segment's formula.
    fn d_on_segment(&self, i: usize, t: f64) -> f64 {
        let s = &self.segments[i].shape;
        let f = s.deriv(t, 0);
        let fp = s.deriv(t, 1);
        let fpp = s.deriv(t, 2);
        fp * fp - f * fpp
    }

    fn d_prime_on_segment(&self, i: usize, t: f64) -> f64 {
        let s = &self.segments[i].shape;
        s.deriv(t, 1) * s.deriv(t, 2) - s.deriv(t, 0) * s.deriv(t, 3)
    }

    /// `D = f'^2 - f f''` at `t`.
    pub fn discriminant(&self, t: f64) -> f64 {
        let [f, fp, fpp, _, _] = self.derivs(t);
        fp * fp - f * fpp
    }

    /// Geodesic curvature `f'/f` of the parallel at `t` w.r.t. `-d/dt`.
    pub fn parallel_curvature(&self, t: f64) -> f64 {
        let (f, fp) = self.f_fp(t);
        fp / f
    }

    fn validate(&self) -> Result<()> {
        let t0 = self.t0;
        let tol = VALIDATION_TOL;
        for w in self.segments.windows(2) {
            let tj = w[0].t_hi;
            let (a, b) = (&w[0].shape, &w[1].shape);
            for k in 0..2 {
                let (va, vb) = (a.deriv(tj, k), b.deriv(tj, k));
                if (va - vb).abs() > tol * (1.0 + va.abs()) {
                    return Err(Error::HypothesisViolated(format!(
                        "derivative {k} of f jumps at t = {tj}: {va} vs {vb}"
                    )));
                }
            }
        }
        for t in [-t0, t0] {
            let fp = self.derivs(t)[1];
            if fp.abs() > tol {
                return Err(Error::HypothesisViolated(format!(
                    "f'({t}) = {fp} should vanish"
                )));
            }
        }
        let mut grid: Vec<f64> = (0..=VALIDATION_GRID)
            .map(|i| t0 * i as f64 / VALIDATION_GRID as f64)
            .collect();
        grid.extend(self.joints().into_iter().filter(|j| *j > 0.0));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let mut prev: Option<(f64, f64, f64)> = None;
        for &t in &grid {
            let fpos = self.f(t);
            let fneg = self.f(-t);
            if !(fpos > 0.0 && fneg > 0.0) {
                return Err(Error::HypothesisViolated(format!("f is not positive near t = {t}")));
            }
            if (fpos - fneg).abs() > tol * (1.0 + fpos.abs()) {
                return Err(Error::HypothesisViolated(format!(
                    "f(t) != f(-t) at t = {t}: {fpos} vs {fneg}"
                )));
            }
            let i = self.segment_index(t);
            let s = &self.segments[i].shape;
            let k_in = -s.deriv(t, 2) / s.deriv(t, 0);
            // Just past a joint the outer segment applies.
            let k_out = if i + 1 < self.segments.len() && t == self.segments[i].t_hi {
                let so = &self.segments[i + 1].shape;
                -so.deriv(t, 2) / so.deriv(t, 0)
            } else {
                k_in
            };
            if let Some((tp, fprev, kprev)) = prev {
                if t > 0.0 && fpos >= fprev + tol {
                    return Err(Error::HypothesisViolated(format!(
                        "f is not decreasing on ({tp}, {t})"
                    )));
                }
                if k_in > kprev + tol * (1.0 + kprev.abs()) {
                    return Err(Error::HypothesisViolated(format!(
                        "K is not nonincreasing in |t| on ({tp}, {t})"
                    )));
                }
            }
            if k_out > k_in + tol * (1.0 + k_in.abs()) {
                return Err(Error::HypothesisViolated(format!("K jumps upward at t = {t}")));
            }
            prev = Some((t, fpos, k_out));
        }
        let k0 = self.gauss_curvature(0.0);
        let kt0 = self.gauss_curvature(t0);
        if !(k0 > 0.0) {
            return Err(Error::HypothesisViolated(format!("K(0) = {k0} must be positive")));
        }
        if !(kt0 < 0.0) {
            return Err(Error::HypothesisViolated(format!("K(t0) = {kt0} must be negative")));
        }
        Ok(())
    }

    /// First `t in [0, t0]` with `D(t) <= level`.
    fn first_at_or_below(&self, level: f64) -> Option<f64> {
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.t_hi <= 0.0 {
                continue;
            }
            let lo = seg.t_lo.max(0.0);
            let hi = seg.t_hi;
            let g = |t: f64| self.d_on_segment(i, t) - level;
            if g(lo) <= 0.0 {
                return Some(lo);
            }
            let mut a = lo;
            for k in 1..=ROOT_SCAN {
                let b = lo + (hi - lo) * k as f64 / ROOT_SCAN as f64;
                if g(b) <= 0.0 {
                    let r = roots::bisect(&g, a, b, 1e-15, 200).ok()?;
                    let r = roots::newton_polish(g, |t| self.d_prime_on_segment(i, t), r, a, b, 4);
                    return Some(r);
                }
                a = b;
            }
        }
        None
    }
}

pub fn build_standard_torus(p: StandardTorusParams) -> Result<SurfaceProfile> {
    let StandardTorusParams { a, r } = p;
    if !(a > 0.0 && r > 0.0) || !a.is_finite() || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "a and r must be positive (got a = {a}, r = {r})"
        )));
    }
    if a < r * (1.0 + 1e-6) {
        return Err(Error::InvalidParameter(format!(
            "a = {a} must exceed r = {r} for an embedded torus"
        )));
    }
    let t0 = PI * r;
    SurfaceProfile::new(
        format!("standard(a={a}, r={r})"),
        vec![Segment {
            t_lo: -t0,
            t_hi: t0,
            shape: SegmentShape::Cosine {
                offset: a,
                amplitude: r,
                freq: 1.0 / r,
                phase: 0.0,
            },
        }],
    )
}

pub fn build_sphere_hyperbolic(p: SphereHyperbolicParams) -> Result<SurfaceProfile> {
    let (c, d) = p.derived()?;
    let SphereHyperbolicParams { a, t_star, b } = p;
    let t0 = d / b;
    let sphere = SegmentShape::Cosine {
        offset: 0.0,
        amplitude: 1.0 / a,
        freq: a,
        phase: 0.0,
    };
    SurfaceProfile::new(
        format!("sphere_hyperbolic(a={a}, t_star={t_star}, b={b})"),
        vec![
            Segment {
                t_lo: -t0,
                t_hi: -t_star,
                shape: SegmentShape::Cosh {
                    amplitude: c,
                    shift: d,
                    rate: b,
                },
            },
            Segment {
                t_lo: -t_star,
                t_hi: 0.0,
                shape: sphere.clone(),
            },
            Segment {
                t_lo: 0.0,
                t_hi: t_star,
                shape: sphere,
            },
            Segment {
                t_lo: t_star,
                t_hi: t0,
                shape: SegmentShape::Cosh {
                    amplitude: c,
                    shift: d,
                    rate: -b,
                },
            },
        ],
    )
}

pub fn metric_eval(s: &SurfaceProfile, t: f64) -> Result<MetricSample> {
    if !(t.abs() <= s.t0 * (1.0 + 1e-14)) {
        return Err(Error::OutOfRange { t, t0: s.t0 });
    }
    let [f, fp, fpp, _, _] = s.derivs(t);
    Ok(MetricSample {
        t,
        f,
        fp,
        fpp,
        k: -fpp / f,
        h: fp / f,
        l: 2.0 * PI * f,
        d: fp * fp - f * fpp,
    })
}

pub fn critical_points(s: &SurfaceProfile) -> CriticalPoints {
    CriticalPoints {
        t_c: s.first_at_or_below(0.0),
        t_tilde: s.first_at_or_below(1.0 - 1e-12),
        stable_circle_min: s.first_at_or_below(1.0 + 1e-12),
        t0: s.t0,
    }
}

/// Total area `2 pi int f` by adaptive quadrature per segment.
pub fn total_area(s: &SurfaceProfile) -> f64 {
    let sum: f64 = s
        .segments
        .iter()
        .map(|seg| {
            quadrature::integrate(|t| seg.shape.deriv(t, 0), seg.t_lo, seg.t_hi, 1e-14, 1e-13)
        })
        .sum();
    2.0 * PI * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn torus(a: f64, r: f64) -> SurfaceProfile {
        build_standard_torus(StandardTorusParams { a, r }).unwrap()
    }

    fn ex12() -> SurfaceProfile {
        build_sphere_hyperbolic(SphereHyperbolicParams {
            a: 1.0,
            t_star: PI / 6.0,
            b: 0.578,
        })
        .unwrap()
    }

    #[test]
    fn standard_endpoints() {
        let s = torus(1.0, 0.4);
        assert_relative_eq!(s.t0, 0.4 * PI, max_relative = 1e-15);
        assert_relative_eq!(s.f(0.0), 1.4, max_relative = 1e-15);
        assert_relative_eq!(s.f(s.t0), 0.6, max_relative = 1e-14);
        assert_relative_eq!(s.gauss_curvature(0.0), 1.0 / (0.4 * 1.4), max_relative = 1e-12);
        assert_relative_eq!(s.gauss_curvature(s.t0), -1.0 / (0.4 * 0.6), max_relative = 1e-12);
    }

    #[test]
    fn rejects_degenerate_torus() {
        assert!(build_standard_torus(StandardTorusParams { a: 1.0, r: 1.0 }).is_err());
        assert!(build_standard_torus(StandardTorusParams { a: -1.0, r: 0.5 }).is_err());
    }

    #[test]
    fn sphere_hyperbolic_constants() {
        let p = SphereHyperbolicParams {
            a: 1.0,
            t_star: PI / 6.0,
            b: 0.578,
        };
        let (c, d) = p.derived().unwrap();
        assert_abs_diff_eq!(c, 0.0410512, epsilon = 1e-6);
        // Independent evaluation of the closed forms.
        let at = PI / 6.0;
        let c_ref = (at.cos().powi(2) - at.sin().powi(2) / (0.578f64 * 0.578)).sqrt();
        let x = at.cos() / c_ref;
        let d_ref = 0.578 * at + (x + (x * x - 1.0).sqrt()).ln();
        assert_relative_eq!(d, d_ref, max_relative = 1e-13);
        let s = ex12();
        assert_relative_eq!(s.t0, d_ref / 0.578, max_relative = 1e-13);
        assert_abs_diff_eq!(d, 4.04433, epsilon = 2e-5);
        assert!(build_sphere_hyperbolic(SphereHyperbolicParams { b: 0.577, ..p }).is_err());
        assert!(build_sphere_hyperbolic(SphereHyperbolicParams { t_star: 1.6, ..p }).is_err());
    }

    #[test]
    fn metric_samples_standard() {
        let s = torus(1.0, 0.4);
        let m = metric_eval(&s, 0.0).unwrap();
        assert_abs_diff_eq!(m.h, 0.0, epsilon = 1e-15);
        assert_relative_eq!(m.d, 3.5, max_relative = 1e-14);
        assert_relative_eq!(m.k + m.h * m.h, 3.5 / 1.96, max_relative = 1e-14);
        let m = metric_eval(&s, 0.2 * PI).unwrap();
        assert_relative_eq!(m.f, 1.0, max_relative = 1e-14);
        assert_relative_eq!(m.fp, -1.0, max_relative = 1e-14);
        assert_relative_eq!(m.d, 1.0, max_relative = 1e-13);
        let m = metric_eval(&s, s.t0).unwrap();
        assert_abs_diff_eq!(m.h, 0.0, epsilon = 1e-15);
        assert!(metric_eval(&s, 2.0).is_err());
    }

    #[test]
    fn joint_uses_inner_segment() {
        let s = ex12();
        let m = metric_eval(&s, PI / 6.0).unwrap();
        assert_relative_eq!(m.k, 1.0, max_relative = 1e-12);
        let m = metric_eval(&s, -PI / 6.0).unwrap();
        assert_relative_eq!(m.k, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn critical_points_standard() {
        let (a, r) = (1.0f64, 0.4f64);
        let cp = critical_points(&torus(a, r));
        assert_abs_diff_eq!(cp.t_tilde.unwrap(), PI * r / 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(cp.t_c.unwrap(), r * (-r / a).acos(), epsilon = 1e-9);
        assert_abs_diff_eq!(cp.stable_circle_min.unwrap(), PI * r / 2.0, epsilon = 1e-10);
        let (tt, tc) = (cp.t_tilde.unwrap(), cp.t_c.unwrap());
        assert!(0.0 < tt && tt < tc && tc < cp.t0);
    }

    #[test]
    fn critical_points_sphere_hyperbolic() {
        let cp = critical_points(&ex12());
        assert_abs_diff_eq!(cp.t_c.unwrap(), PI / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(cp.t_tilde.unwrap(), PI / 6.0, epsilon = 1e-14);
        assert_eq!(cp.stable_circle_min, Some(0.0));
    }

    #[test]
    fn total_area_closed_form() {
        for (a, r) in [(1.0, 0.4), (1.0, 0.9)] {
            let beta = total_area(&torus(a, r));
            assert_relative_eq!(beta, 4.0 * PI * PI * a * r, max_relative = 1e-10);
        }
        let s = ex12();
        assert_relative_eq!(total_area(&s), 4.0 * PI * s.phi(s.t0), max_relative = 1e-12);
    }

    #[test]
    fn phi_is_antiderivative() {
        let s = ex12();
        for &t in &[-6.5, -1.0, -0.3, 0.2, 0.52, 3.0, 6.9] {
            let q = quadrature::integrate(|x| s.f(x), 0.0, t, 1e-14, 1e-13);
            assert_relative_eq!(s.phi(t), q, max_relative = 1e-11);
        }
        assert_abs_diff_eq!(s.phi(0.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn phi_extends_periodically() {
        let s = torus(1.0, 0.4);
        let total = 2.0 * s.phi(s.t0);
        assert_relative_eq!(s.phi(s.t0 + 0.1), total + s.phi(-s.t0 + 0.1), max_relative = 1e-12);
    }

    #[test]
    fn polynomial_derivatives() {
        let p = SegmentShape::Polynomial {
            coeffs: vec![1.0, 2.0, 3.0, 4.0],
        };
        assert_relative_eq!(p.deriv(2.0, 0), 1.0 + 4.0 + 12.0 + 32.0);
        assert_relative_eq!(p.deriv(2.0, 1), 2.0 + 12.0 + 48.0);
        assert_relative_eq!(p.deriv(2.0, 2), 6.0 + 48.0);
        assert_relative_eq!(p.deriv(2.0, 3), 24.0);
        assert_relative_eq!(p.deriv(2.0, 4), 0.0);
    }

    #[test]
    fn curvature_derivatives_standard() {
        let (a, r) = (1.0f64, 0.4f64);
        let s = torus(a, r);
        let (k1, k2) = s.curvature_derivatives(PI * r / 2.0);
        assert_relative_eq!(k1, -1.0 / (r * r * a), max_relative = 1e-12);
        assert_relative_eq!(k2, -2.0 / (a * a * r * r), max_relative = 1e-12);
    }

    #[test]
    fn rejects_increasing_curvature() {
        // f = 2 - cos(t) has K = -cos(t)/(2 - cos t), negative at 0.
        let seg = Segment {
            t_lo: -PI,
            t_hi: PI,
            shape: SegmentShape::Cosine {
                offset: 2.0,
                amplitude: -1.0,
                freq: 1.0,
                phase: 0.0,
            },
        };
        assert!(matches!(
            SurfaceProfile::new("bad", vec![seg]),
            Err(Error::HypothesisViolated(_))
        ));
    }

    proptest! {
        #[test]
        fn h_is_antisymmetric(r in 0.1f64..0.95, u in 0.0f64..1.0) {
            let s = torus(1.0, r);
            let t = u * s.t0;
            let (h1, h2) = (s.parallel_curvature(t), s.parallel_curvature(-t));
            prop_assert!((h1 + h2).abs() <= 1e-12);
        }

        #[test]
        fn discriminant_identity(r in 0.1f64..0.95, u in -1.0f64..1.0) {
            let s = torus(1.0, r);
            let m = metric_eval(&s, u * s.t0).unwrap();
            let rhs = m.l * m.l * (m.k + m.h * m.h) / (4.0 * PI * PI);
            prop_assert!((m.d - rhs).abs() <= 1e-12 * (1.0 + m.d.abs()));
        }

        #[test]
        fn h_slope_sign_follows_d(u in 0.001f64..0.999) {
            for s in [torus(1.0, 0.4), ex12()] {
                let t = u * s.t0;
                let e = 1e-6;
                let slope = (s.parallel_curvature(t + e) - s.parallel_curvature(t - e)) / (2.0 * e);
                let d = s.discriminant(t);
                if d <= -1e-4 { prop_assert!(slope >= -1e-8); }
                if d >= 1e-4 { prop_assert!(slope <= 1e-8); }
            }
        }

        #[test]
        fn d_and_k_comonotone(r in 0.1f64..0.95, u in 0.0f64..0.99, v in 0.0f64..0.99) {
            let s = torus(1.0, r);
            let (t1, t2) = (u * s.t0, v * s.t0);
            prop_assume!((t1 - t2).abs() > 1e-6);
            let dk = s.gauss_curvature(t2) - s.gauss_curvature(t1);
            let dd = s.discriminant(t2) - s.discriminant(t1);
            prop_assert!(dk.signum() == dd.signum());
        }
    }
}
