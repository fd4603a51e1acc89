//! Jacobi operator `J u = u'' + q u`, `q = K + h^2`, on closed curves and
//! arcs. Eigenvalues follow `J u + lambda u = 0`, i.e. they are the
//! spectrum of `-(u'' + q u)`.

use serde::Serialize;
use std::f64::consts::TAU;

use crate::closed::{ClosedCurve, PERIOD_MAP_TOL};
use crate::curve::{sample_arclength, CurveClass, CurveState, EventKind};
use crate::error::{Error, Result};
use crate::surface::SurfaceProfile;

pub const DEFAULT_GRID: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Periodic,
    Neumann,
    Dirichlet,
}

/// `q` on a uniform grid of `intervals + 1` nodes covering `[0, L]`.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialProfile {
    pub nodes: Vec<f64>,
    pub q: Vec<f64>,
    pub total_length: f64,
    /// `int_0^{node} q`, split at the potential's jumps. When present,
    /// grids dividing half the stored one use cell averages, which keeps
    /// second order accuracy across jumps.
    #[serde(skip)]
    pub integral: Option<Vec<f64>>,
}

impl PotentialProfile {
    pub fn from_fn(total_length: f64, intervals: usize, q: impl Fn(f64) -> f64) -> Self {
        let nodes: Vec<f64> = (0..=intervals)
            .map(|i| total_length * i as f64 / intervals as f64)
            .collect();
        let q = nodes.iter().map(|&s| q(s)).collect();
        Self {
            nodes,
            q,
            total_length,
            integral: None,
        }
    }

    /// Point values plus exact-to-quadrature cell integrals. `jumps` are
    /// arc-length positions where `q` may be discontinuous; `eval` maps a
    /// sorted list of positions to potential values.
    pub fn with_integrals(
        total_length: f64,
        intervals: usize,
        jumps: &[f64],
        eval: impl FnOnce(&[f64]) -> Result<Vec<f64>>,
    ) -> Result<Self> {
        let nodes: Vec<f64> = (0..=intervals)
            .map(|i| total_length * i as f64 / intervals as f64)
            .collect();
        let mut jumps: Vec<f64> = jumps.iter().copied().filter(|&x| x > 0.0 && x < total_length).collect();
        jumps.sort_by(f64::total_cmp);
        let g = 0.5 / 3f64.sqrt();
        // Node, then 2-point Gauss pairs per smooth sub-piece.
        let mut query = Vec::with_capacity(5 * intervals + 1);
        let mut weights: Vec<Vec<f64>> = Vec::with_capacity(intervals);
        for w in nodes.windows(2) {
            query.push(w[0]);
            let mut cuts = vec![w[0]];
            cuts.extend(jumps.iter().copied().filter(|&x| x > w[0] && x < w[1]));
            cuts.push(w[1]);
            let mut ws = Vec::new();
            for c in cuts.windows(2) {
                let (mid, len) = (0.5 * (c[0] + c[1]), c[1] - c[0]);
                query.push(mid - g * len);
                query.push(mid + g * len);
                ws.push(0.5 * len);
            }
            weights.push(ws);
        }
        query.push(total_length);
        let vals = eval(&query)?;
        let mut q = Vec::with_capacity(intervals + 1);
        let mut integral = Vec::with_capacity(intervals + 1);
        let mut acc = 0.0;
        let mut k = 0;
        for ws in &weights {
            q.push(vals[k]);
            integral.push(acc);
            k += 1;
            for w in ws {
                acc += w * (vals[k] + vals[k + 1]);
                k += 2;
            }
        }
        q.push(vals[k]);
        integral.push(acc);
        Ok(Self {
            nodes,
            q,
            total_length,
            integral: Some(integral),
        })
    }

    pub fn constant(total_length: f64, intervals: usize, q: f64) -> Self {
        Self::from_fn(total_length, intervals, |_| q)
    }

    pub fn intervals(&self) -> usize {
        self.q.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        self.total_length / self.intervals() as f64
    }

    /// Values at `grid + 1` uniform nodes, taken directly when the grid
    /// divides the stored one and linearly interpolated otherwise.
    pub fn resampled(&self, grid: usize) -> Vec<f64> {
        let m = self.intervals();
        if let Some(int) = &self.integral {
            if m.is_multiple_of(2 * grid) {
                // Mean over [x_i - dx/2, x_i + dx/2], halved at the ends.
                let half = m / (2 * grid);
                let dx = self.total_length / grid as f64;
                return (0..=grid)
                    .map(|i| {
                        let c = 2 * half * i;
                        match (c.checked_sub(half), c + half <= m) {
                            (Some(lo), true) => (int[c + half] - int[lo]) / dx,
                            (None, _) => (int[half] - int[0]) / (0.5 * dx),
                            (_, false) => (int[m] - int[m - half]) / (0.5 * dx),
                        }
                    })
                    .collect();
            }
        }
        if m.is_multiple_of(grid) {
            let stride = m / grid;
            return (0..=grid).map(|i| self.q[i * stride]).collect();
        }
        (0..=grid)
            .map(|i| {
                let x = i as f64 * m as f64 / grid as f64;
                let j = (x.floor() as usize).min(m - 1);
                let w = x - j as f64;
                (1.0 - w) * self.q[j] + w * self.q[j + 1]
            })
            .collect()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.q
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
    }
}

/// `K + h^2` along `c`, sampled at `intervals + 1` uniform arc-length nodes
/// by dense re-integration.
pub fn potential_along(s: &SurfaceProfile, c: &ClosedCurve, intervals: usize) -> Result<PotentialProfile> {
    potential_on_arc(s, c, c.length, intervals)
}

fn potential_on_arc(s: &SurfaceProfile, c: &ClosedCurve, length: f64, intervals: usize) -> Result<PotentialProfile> {
    let h2 = c.h * c.h;
    match c.class {
        CurveClass::Circle => Ok(PotentialProfile::constant(
            length,
            intervals,
            s.gauss_curvature(c.t_max) + h2,
        )),
        CurveClass::VerticalGeodesic => {
            let t_lo = c.trajectory.states[0].t;
            let period = 2.0 * s.t0;
            let jumps: Vec<f64> = s
                .joints()
                .into_iter()
                .flat_map(|j| {
                    let first = (j - t_lo).rem_euclid(period);
                    (0..).map(move |k| first + k as f64 * period).take_while(move |&x| x < length)
                })
                .collect();
            PotentialProfile::with_integrals(length, intervals, &jumps, |xs| {
                Ok(xs.iter().map(|&x| s.gauss_curvature(s.wrap(t_lo + x))).collect())
            })
        }
        CurveClass::Nodoid | CurveClass::Unduloid => {
            let init = CurveState {
                s: 0.0,
                ..c.trajectory.states[0]
            };
            let jumps: Vec<f64> = c
                .trajectory
                .events_of(EventKind::SegmentJoint)
                .map(|st| st.s - c.trajectory.states[0].s)
                .collect();
            PotentialProfile::with_integrals(length, intervals, &jumps, |xs| {
                let states = sample_arclength(s, init, c.h, xs, PERIOD_MAP_TOL)?;
                Ok(states.iter().map(|st| s.gauss_curvature(st.t) + h2).collect())
            })
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    pub bc: BoundaryCondition,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub grid_size: usize,
    pub refined: bool,
}

impl SpectrumResult {
    /// Eigenvalues grouped within `tol` (relative to `1 + |lambda|`),
    /// with multiplicities.
    pub fn distinct(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &v in &self.eigenvalues {
            match out.last_mut() {
                Some((w, m)) if (v - *w).abs() <= tol * (1.0 + w.abs()) => *m += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }
}

/// Symmetric tridiagonal or cyclic matrix.
struct Tridiag {
    diag: Vec<f64>,
    off: Vec<f64>,
    corner: Option<f64>,
}

impl Tridiag {
    fn build(q: &[f64], dx: f64, bc: BoundaryCondition) -> Self {
        let inv = 1.0 / (dx * dx);
        match bc {
            BoundaryCondition::Dirichlet => {
                let inner = &q[1..q.len() - 1];
                Tridiag {
                    diag: inner.iter().map(|v| 2.0 * inv - v).collect(),
                    off: vec![-inv; inner.len() - 1],
                    corner: None,
                }
            }
            BoundaryCondition::Neumann => {
                let n = q.len();
                let mut off = vec![-inv; n - 1];
                // Symmetrized ghost-point rows.
                off[0] = -std::f64::consts::SQRT_2 * inv;
                off[n - 2] = -std::f64::consts::SQRT_2 * inv;
                Tridiag {
                    diag: q.iter().map(|v| 2.0 * inv - v).collect(),
                    off,
                    corner: None,
                }
            }
            BoundaryCondition::Periodic => {
                // The two end half cells make up the cell of node 0.
                let mut cyc = q[..q.len() - 1].to_vec();
                cyc[0] = 0.5 * (q[0] + q[q.len() - 1]);
                Tridiag {
                    diag: cyc.iter().map(|v| 2.0 * inv - v).collect(),
                    off: vec![-inv; cyc.len() - 1],
                    corner: Some(-inv),
                }
            }
        }
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let c = self.corner.unwrap_or(0.0).abs();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            if i == 0 || i == n - 1 {
                r += c;
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sylvester inertia).
    fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let guard = |d: f64| if d == 0.0 { -tiny } else { d };
        let n = self.diag.len();
        match self.corner {
            None => {
                let mut count = 0;
                let mut d = guard(self.diag[0] - x);
                if d < 0.0 {
                    count += 1;
                }
                for i in 1..n {
                    d = guard(self.diag[i] - x - self.off[i - 1] * self.off[i - 1] / d);
                    if d < 0.0 {
                        count += 1;
                    }
                }
                count
            }
            Some(corner) => {
                // LDL^T of the cyclic matrix; fill-in lives in the last column.
                let mut count = 0;
                let mut d = guard(self.diag[0] - x);
                let mut g = corner;
                let mut dl = self.diag[n - 1] - x;
                for i in 0..n - 2 {
                    if d < 0.0 {
                        count += 1;
                    }
                    let e = self.off[i];
                    let next_d = self.diag[i + 1] - x - e * e / d;
                    let carry = if i + 1 == n - 2 { self.off[n - 2] } else { 0.0 };
                    let next_g = carry - e * g / d;
                    dl -= g * g / d;
                    d = guard(next_d);
                    g = next_g;
                }
                if d < 0.0 {
                    count += 1;
                }
                dl -= g * g / d;
                if guard(dl) < 0.0 {
                    count += 1;
                }
                count
            }
        }
    }

    /// The `k` smallest eigenvalues by bisection on the inertia count.
    fn lowest(&self, k: usize) -> Result<Vec<f64>> {
        let (lo, hi) = self.gershgorin();
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::EigenNonConvergence { grid: self.diag.len() });
        }
        let scale = lo.abs().max(hi.abs()).max(1.0);
        let tol = 4.0 * f64::EPSILON * scale;
        let mut out = Vec::with_capacity(k);
        let mut floor = lo;
        for j in 0..k {
            let (mut a, mut b) = (floor, hi);
            for _ in 0..200 {
                if b - a <= tol {
                    break;
                }
                let m = 0.5 * (a + b);
                if self.count_below(m) > j {
                    b = m;
                } else {
                    a = m;
                }
            }
            let v = 0.5 * (a + b);
            out.push(v);
            floor = a;
        }
        Ok(out)
    }
}

fn raw_spectrum(p: &PotentialProfile, bc: BoundaryCondition, n_eigs: usize, grid: usize) -> Result<Vec<f64>> {
    let q = p.resampled(grid);
    let dx = p.total_length / grid as f64;
    Tridiag::build(&q, dx, bc).lowest(n_eigs)
}

/// Lowest `n_eigs` eigenvalues at `grid` and `2 grid`, combined by one
/// Richardson step.
pub fn spectrum(p: &PotentialProfile, bc: BoundaryCondition, n_eigs: usize, grid: usize) -> Result<SpectrumResult> {
    if grid < 64 {
        return Err(Error::InvalidParameter(format!("grid {grid} below 64")));
    }
    if n_eigs == 0 || n_eigs > grid / 4 {
        return Err(Error::InvalidParameter(format!("n_eigs {n_eigs} must lie in 1..={}", grid / 4)));
    }
    if !(p.total_length > 0.0) || p.q.len() < 2 {
        return Err(Error::InvalidParameter("empty potential".into()));
    }
    let coarse = raw_spectrum(p, bc, n_eigs, grid)?;
    let fine = raw_spectrum(p, bc, n_eigs, 2 * grid)?;
    let eigenvalues = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();
    Ok(SpectrumResult {
        bc,
        eigenvalues,
        grid_size: grid,
        refined: true,
    })
}

/// Neumann and Dirichlet spectra of the arc from the starting extremum
/// to the next one.
pub fn fundamental_piece_spectra(
    s: &SurfaceProfile,
    c: &ClosedCurve,
    n_eigs: usize,
    grid: usize,
) -> Result<(SpectrumResult, SpectrumResult)> {
    if !matches!(c.class, CurveClass::Unduloid | CurveClass::Nodoid) {
        return Err(Error::InvalidParameter("fundamental pieces need a curve with extrema".into()));
    }
    let piece_len = c
        .trajectory
        .events
        .iter()
        .find(|e| matches!(e.kind, EventKind::TMin | EventKind::TMax))
        .map(|e| c.trajectory.states[e.index].s)
        .ok_or_else(|| Error::InsufficientArc("no t-minimum recorded on the curve".into()))?;
    let p = potential_on_arc(s, c, piece_len, 4 * grid)?;
    Ok((
        spectrum(&p, BoundaryCondition::Neumann, n_eigs, grid)?,
        spectrum(&p, BoundaryCondition::Dirichlet, n_eigs, grid)?,
    ))
}

fn check_samples(p: &PotentialProfile, u: &[f64]) -> Result<()> {
    if u.len() != p.q.len() {
        return Err(Error::InvalidParameter(format!(
            "test function has {} samples, potential has {}",
            u.len(),
            p.q.len()
        )));
    }
    Ok(())
}

/// `(int u'^2 - q u^2, int u, int u^2)` on one component.
fn form_parts(p: &PotentialProfile, u: &[f64]) -> (f64, f64, f64) {
    let dx = p.spacing();
    let mut grad = 0.0;
    let mut pot = 0.0;
    let mut mean = 0.0;
    let mut norm = 0.0;
    for i in 0..u.len() - 1 {
        let du = (u[i + 1] - u[i]) / dx;
        grad += du * du * dx;
        pot += 0.5 * dx * (p.q[i] * u[i] * u[i] + p.q[i + 1] * u[i + 1] * u[i + 1]);
        mean += 0.5 * dx * (u[i] + u[i + 1]);
        norm += 0.5 * dx * (u[i] * u[i] + u[i + 1] * u[i + 1]);
    }
    (grad - pot, mean, norm)
}

/// Index form `I(u) = int (u'^2 - q u^2) ds` of a mean-zero test function
/// sampled on the potential's grid.
pub fn index_form(p: &PotentialProfile, u: &[f64]) -> Result<f64> {
    index_form_multi(&[(p, u)])
}

/// Index form of a test function spread over several boundary components;
/// the mean-zero condition applies to the sum.
pub fn index_form_multi(parts: &[(&PotentialProfile, &[f64])]) -> Result<f64> {
    let (mut total, mut mean, mut norm) = (0.0, 0.0, 0.0);
    for (p, u) in parts {
        check_samples(p, u)?;
        let (i, m, n) = form_parts(p, u);
        total += i;
        mean += m;
        norm += n;
    }
    if mean.abs() > 1e-8 * norm.sqrt().max(f64::MIN_POSITIVE) {
        return Err(Error::MeanNotZero { mean });
    }
    Ok(total)
}

/// Closed-form periodic spectrum `(2 pi k / L)^2 - q` of a constant
/// potential, with multiplicity.
pub fn circle_spectrum_oracle(length: f64, q: f64, count: usize) -> Vec<f64> {
    let mut out = vec![-q];
    let mut k = 1;
    while out.len() < count {
        let v = (TAU * k as f64 / length).powi(2) - q;
        out.push(v);
        out.push(v);
        k += 1;
    }
    out.truncate(count);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_standard_torus, StandardTorusParams};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn torus() -> SurfaceProfile {
        build_standard_torus(StandardTorusParams { a: 1.0, r: 0.4 }).unwrap()
    }

    fn dense_eigs(t: &Tridiag) -> Vec<f64> {
        let n = t.diag.len();
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = t.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = t.off[i];
                m[(i + 1, i)] = t.off[i];
            }
        }
        if let Some(c) = t.corner {
            m[(0, n - 1)] += c;
            m[(n - 1, 0)] += c;
        }
        let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn inertia_count_matches_dense_solver() {
        let q: Vec<f64> = (0..=24).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        for bc in [
            BoundaryCondition::Periodic,
            BoundaryCondition::Neumann,
            BoundaryCondition::Dirichlet,
        ] {
            let t = Tridiag::build(&q, 0.3, bc);
            let dense = dense_eigs(&t);
            let ours = t.lowest(dense.len()).unwrap();
            for (a, b) in ours.iter().zip(&dense) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn circle_at_longest_parallel() {
        let s = torus();
        let c = ClosedCurve::parallel(&s, 0.0);
        let p = potential_along(&s, &c, 4096).unwrap();
        let sp = spectrum(&p, BoundaryCondition::Periodic, 5, 2048).unwrap();
        let q = 1.0 / (0.4 * 1.4);
        assert_abs_diff_eq!(sp.eigenvalues[0], -1.785_714_285_714_285_7, epsilon = 1e-6);
        assert_relative_eq!(sp.eigenvalues[1], 1.0 / 1.96 - q, max_relative = 1e-6);
        assert_relative_eq!(sp.eigenvalues[2], 1.0 / 1.96 - q, max_relative = 1e-6);
        let d = sp.distinct(1e-6);
        assert_eq!(d[1].1, 2);
    }

    #[test]
    fn vertical_geodesic_has_zero_ground_state() {
        let s = torus();
        let c = ClosedCurve::vertical(&s, 0.0).unwrap();
        let p = potential_along(&s, &c, 4096).unwrap();
        let sp = spectrum(&p, BoundaryCondition::Periodic, 2, 2048).unwrap();
        assert_abs_diff_eq!(sp.eigenvalues[0], 0.0, epsilon = 1e-6);
    }

    #[test]
    fn dirichlet_sine_modes() {
        let p = PotentialProfile::constant(PI, 256, 0.0);
        let sp = spectrum(&p, BoundaryCondition::Dirichlet, 3, 128).unwrap();
        for (k, v) in sp.eigenvalues.iter().enumerate() {
            assert_relative_eq!(*v, ((k + 1) * (k + 1)) as f64, max_relative = 1e-6);
        }
        let n = spectrum(&p, BoundaryCondition::Neumann, 3, 128).unwrap();
        assert_abs_diff_eq!(n.eigenvalues[0], 0.0, epsilon = 1e-9);
        assert_relative_eq!(n.eigenvalues[2], 4.0, max_relative = 1e-6);
    }

    #[test]
    fn index_form_on_circle() {
        let l = 5.0;
        let q = 0.7;
        let p = PotentialProfile::constant(l, 4096, q);
        let u: Vec<f64> = p.nodes.iter().map(|s| (TAU * s / l).sin()).collect();
        let i = index_form(&p, &u).unwrap();
        assert_relative_eq!(i, 0.5 * l * ((TAU / l).powi(2) - q), max_relative = 1e-5);
        let ones = vec![1.0; p.q.len()];
        assert!(matches!(index_form(&p, &ones), Err(Error::MeanNotZero { .. })));
        assert_eq!(index_form(&p, &vec![0.0; p.q.len()]).unwrap(), 0.0);
    }

    #[test]
    fn rejects_small_grids() {
        let p = PotentialProfile::constant(1.0, 64, 0.0);
        assert!(spectrum(&p, BoundaryCondition::Neumann, 1, 32).is_err());
        assert!(spectrum(&p, BoundaryCondition::Neumann, 40, 128).is_err());
    }
}
