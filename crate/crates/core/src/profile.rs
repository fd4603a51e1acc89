//! Area and perimeter of stable candidates, their family tables and the
//! minimal-perimeter profile over an area grid.

use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use crate::closed::{find_symmetric_nodoid, solve_h_o, trace_unduloid_branch, ClosedCurve, UnduloidBranch, PERIOD_MAP_TOL};
use crate::curve::classify_curve;
use crate::curve::CurveClass;
use crate::error::{Error, Result};
use crate::roots;
use crate::stability::{
    annulus_partner, disk_plus_annulus_verdict, disk_verdict, parallel_pair_verdict, symmetric_annulus_stable,
    unduloid_circle_verdict, CandidateRegion, RegionShape, StabilityVerdict,
};
use crate::surface::{critical_points, total_area, SurfaceProfile};

/// Relative perimeter gap below which two candidates count as tied.
pub const TIE_TOL: f64 = 1e-6;
pub const MIN_FAMILY_SAMPLES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Disk,
    SymmetricAnnulus,
    NonsymmetricAnnulus,
    VerticalAnnulus,
    UnduloidCircle,
    DiskPlusAnnulus,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 6] = [
        FamilyKind::Disk,
        FamilyKind::SymmetricAnnulus,
        FamilyKind::NonsymmetricAnnulus,
        FamilyKind::VerticalAnnulus,
        FamilyKind::UnduloidCircle,
        FamilyKind::DiskPlusAnnulus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Disk => "disk",
            FamilyKind::SymmetricAnnulus => "symmetric_annulus",
            FamilyKind::NonsymmetricAnnulus => "nonsymmetric_annulus",
            FamilyKind::VerticalAnnulus => "vertical_annulus",
            FamilyKind::UnduloidCircle => "unduloid_circle",
            FamilyKind::DiskPlusAnnulus => "disk_plus_annulus",
        }
    }

    /// A vertical annulus's complement is again a vertical annulus.
    pub fn self_dual(self) -> bool {
        self == FamilyKind::VerticalAnnulus
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FamilyId {
    pub kind: FamilyKind,
    pub complement: bool,
}

impl FamilyId {
    pub fn new(kind: FamilyKind) -> Self {
        Self { kind, complement: false }
    }

    pub fn dual(self) -> Self {
        if self.kind.self_dual() {
            self
        } else {
            Self {
                kind: self.kind,
                complement: !self.complement,
            }
        }
    }

    /// Every id a profile can contain, in column order.
    pub fn all() -> Vec<FamilyId> {
        let mut v = Vec::new();
        for k in FamilyKind::ALL {
            v.push(FamilyId::new(k));
            if !k.self_dual() {
                v.push(FamilyId { kind: k, complement: true });
            }
        }
        v
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.complement {
            write!(f, "{}_complement", self.kind.name())
        } else {
            f.write_str(self.kind.name())
        }
    }
}

/// Area and perimeter of a candidate region.
pub fn region_measure(s: &SurfaceProfile, rg: &CandidateRegion) -> Result<(f64, f64)> {
    let t0 = s.t0;
    let (area, perimeter) = match &rg.shape {
        RegionShape::Disk { t_max } => {
            let c = find_symmetric_nodoid(s, *t_max, PERIOD_MAP_TOL)?;
            if !c.embedded {
                return Err(Error::Malformed(format!("disk with maximum {t_max} is not embedded")));
            }
            (c.area, c.length)
        }
        RegionShape::SymmetricAnnulus { t } => symmetric_annulus_measure(s, *t),
        RegionShape::NonsymmetricAnnulus { x, t_dprime } => nonsymmetric_measure(s, *x, *t_dprime),
        RegionShape::VerticalAnnuli { intervals } => {
            let beta = total_area(s);
            let w: f64 = intervals.iter().map(|iv| iv.1).sum();
            (w * beta / TAU, intervals.len() as f64 * 4.0 * t0)
        }
        RegionShape::UnduloidCircle { t_max, x } => {
            let u = ClosedCurve::unduloid(s, *t_max, rg.h, PERIOD_MAP_TOL)?;
            if !(u.t_min > -x) {
                return Err(Error::Malformed("unduloid crosses its circle".into()));
            }
            unduloid_circle_measure(s, &u, *x)
        }
        RegionShape::DiskPlusSymmetricAnnulus { disk_t_max, annulus_t } => {
            let c = find_symmetric_nodoid(s, *disk_t_max, PERIOD_MAP_TOL)?;
            if !(c.t_max < *annulus_t) {
                return Err(Error::Malformed("disk meets the annulus".into()));
            }
            let (a, p) = symmetric_annulus_measure(s, *annulus_t);
            (c.area + a, c.length + p)
        }
        RegionShape::Parallels { ts } => {
            // {t : an odd number of the parallels lie below t}
            let mut ts = ts.clone();
            ts.sort_by(f64::total_cmp);
            let mut area = 0.0;
            let mut sign = if ts.len() % 2 == 0 { 1.0 } else { -1.0 };
            for &t in ts.iter().rev() {
                area += sign * s.phi(t);
                sign = -sign;
            }
            if ts.len() % 2 == 1 {
                area += s.phi(t0);
            }
            (TAU * area, ts.iter().map(|&t| TAU * s.f(t)).sum())
        }
    };
    if rg.complement {
        Ok((total_area(s) - area, perimeter))
    } else {
        Ok((area, perimeter))
    }
}

/// Fill in the boundary curvature (inner normal) and the measure of a
/// region. Unduloid regions solve their curvature on `branch`.
pub fn candidate_region(
    s: &SurfaceProfile,
    shape: RegionShape,
    complement: bool,
    branch: Option<&UnduloidBranch>,
) -> Result<CandidateRegion> {
    let h = match &shape {
        RegionShape::Disk { t_max } | RegionShape::DiskPlusSymmetricAnnulus { disk_t_max: t_max, .. } => {
            find_symmetric_nodoid(s, *t_max, PERIOD_MAP_TOL)?.h
        }
        RegionShape::SymmetricAnnulus { t } => -s.parallel_curvature(*t),
        RegionShape::NonsymmetricAnnulus { x, .. } => -s.parallel_curvature(*x),
        RegionShape::VerticalAnnuli { .. } => 0.0,
        RegionShape::UnduloidCircle { t_max, .. } => {
            let b = branch.ok_or_else(|| Error::Malformed("unduloid region needs its branch".into()))?;
            solve_h_o(s, *t_max, b.predict(*t_max))?
        }
        RegionShape::Parallels { ts } => {
            let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
            if !lo.is_finite() {
                return Err(Error::Malformed("no parallels".into()));
            }
            -s.parallel_curvature(lo)
        }
    };
    let mut rg = CandidateRegion {
        shape,
        complement,
        h,
        area: 0.0,
        perimeter: 0.0,
    };
    (rg.area, rg.perimeter) = region_measure(s, &rg)?;
    Ok(rg)
}

/// `{|t| > t}`.
pub fn symmetric_annulus_measure(s: &SurfaceProfile, t: f64) -> (f64, f64) {
    (2.0 * TAU * (s.phi(s.t0) - s.phi(t)), 2.0 * TAU * s.f(t))
}

/// `{t > t_dprime} u {t < -x}`.
pub fn nonsymmetric_measure(s: &SurfaceProfile, x: f64, t_dprime: f64) -> (f64, f64) {
    (
        TAU * (2.0 * s.phi(s.t0) - s.phi(t_dprime) - s.phi(x)),
        TAU * (s.f(x) + s.f(t_dprime)),
    )
}

/// `{-x < t < u(theta)}`.
pub fn unduloid_circle_measure(s: &SurfaceProfile, u: &ClosedCurve, x: f64) -> (f64, f64) {
    (u.area + TAU * s.phi(x), u.length + TAU * s.f(x))
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySample {
    /// Natural parameter: `T` for disks and unduloids, a height for
    /// annuli, the width for vertical annuli.
    pub param: f64,
    pub area: f64,
    pub perimeter: f64,
    pub verdict: StabilityVerdict,
}

/// Fritsch-Carlson monotone cubic through strictly increasing abscissae.
#[derive(Debug, Clone)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        debug_assert!(n >= 2);
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
            return Self { x, y, d };
        }
        for k in 1..n - 1 {
            if del[k - 1] * del[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
            let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
            if m.signum() != d0.signum() {
                0.0
            } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
                3.0 * d0
            } else {
                m
            }
        };
        d[0] = end(h[0], h[1], del[0], del[1]);
        d[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        Self { x, y, d }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }
}

/// A stretch of stable samples with area strictly monotone in the
/// parameter, stored by increasing area.
#[derive(Debug, Clone)]
struct Piece {
    lo: f64,
    hi: f64,
    perimeter: Pchip,
    param: Pchip,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyTable {
    pub id: FamilyId,
    /// In parameter order, unstable members included.
    pub samples: Vec<FamilySample>,
    #[serde(skip)]
    pieces: Vec<Piece>,
}

impl FamilyTable {
    pub fn new(id: FamilyId, samples: Vec<FamilySample>) -> Self {
        let mut pieces = Vec::new();
        let mut run: Vec<&FamilySample> = Vec::new();
        let flush = |run: &mut Vec<&FamilySample>, pieces: &mut Vec<Piece>| {
            if run.len() >= 2 {
                let mut pts: Vec<(f64, f64, f64)> = run.iter().map(|s| (s.area, s.perimeter, s.param)).collect();
                if pts[0].0 > pts[pts.len() - 1].0 {
                    pts.reverse();
                }
                pts.dedup_by(|b, a| b.0 <= a.0);
                if pts.len() >= 2 {
                    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
                    pieces.push(Piece {
                        lo: x[0],
                        hi: x[x.len() - 1],
                        perimeter: Pchip::new(x.clone(), pts.iter().map(|p| p.1).collect()),
                        param: Pchip::new(x, pts.iter().map(|p| p.2).collect()),
                    });
                }
            }
            run.clear();
        };
        for smp in &samples {
            if !smp.verdict.admissible() || !smp.area.is_finite() || !smp.perimeter.is_finite() {
                flush(&mut run, &mut pieces);
                continue;
            }
            if run.len() >= 2 {
                let a = run[run.len() - 2].area;
                let b = run[run.len() - 1].area;
                if (b - a) * (smp.area - b) < 0.0 {
                    // Split at the extremum, sharing it between pieces.
                    let last = run[run.len() - 1];
                    flush(&mut run, &mut pieces);
                    run.push(last);
                }
            }
            run.push(smp);
        }
        flush(&mut run, &mut pieces);
        Self { id, samples, pieces }
    }

    /// The complementary family `(beta - A, P)`.
    pub fn complement(&self, beta: f64) -> Self {
        let samples = self
            .samples
            .iter()
            .map(|s| FamilySample {
                area: beta - s.area,
                ..s.clone()
            })
            .collect();
        Self::new(self.id.dual(), samples)
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Smallest perimeter among stable members enclosing `area`, with the
    /// interpolated parameter.
    pub fn perimeter_at(&self, area: f64) -> Option<(f64, f64)> {
        self.pieces
            .iter()
            .filter(|p| area >= p.lo && area <= p.hi)
            .map(|p| (p.perimeter.eval(area), p.param.eval(area)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }

    /// Stable area intervals covered.
    pub fn coverage(&self) -> Vec<(f64, f64)> {
        self.pieces.iter().map(|p| (p.lo, p.hi)).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FamilyOptions {
    /// Parameter samples per family (at least [`MIN_FAMILY_SAMPLES`]).
    pub samples: usize,
    pub tol: f64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        Self {
            samples: 160,
            tol: PERIOD_MAP_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Families {
    pub beta: f64,
    pub tables: Vec<FamilyTable>,
    #[serde(skip)]
    pub branch: Option<UnduloidBranch>,
    pub notes: Vec<String>,
}

impl Families {
    pub fn table(&self, id: FamilyId) -> Option<&FamilyTable> {
        self.tables.iter().find(|t| t.id == id)
    }

    /// All candidates at `area`, by id.
    pub fn perimeters_at(&self, area: f64) -> BTreeMap<FamilyId, (f64, f64)> {
        self.tables
            .iter()
            .filter_map(|t| t.perimeter_at(area).map(|p| (t.id, p)))
            .collect()
    }
}

fn note_err<T>(notes: &mut Vec<String>, what: &str, r: Result<T>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            notes.push(format!("{what}: {e}"));
            None
        }
    }
}

struct DiskSweep {
    disks: Vec<FamilySample>,
    with_annulus: Vec<FamilySample>,
    note: Option<String>,
}

/// Disks by `T`, sampled densely near zero, plus the curvature-matched
/// disk and symmetric annulus unions.
fn disk_families(s: &SurfaceProfile, n: usize, tol: f64) -> DiskSweep {
    let t0 = s.t0;
    let t_c = critical_points(s).t_c;
    let ts: Vec<f64> = (0..n).map(|i| t0 * ((i + 1) as f64 / (n + 1) as f64).powf(1.5)).collect();
    let rows: Vec<Result<(FamilySample, Option<FamilySample>)>> = ts
        .par_iter()
        .map(|&t| {
            let c = find_symmetric_nodoid(s, t, tol)?;
            if !c.embedded {
                return Err(Error::Malformed(format!("disk with maximum {t} is not embedded")));
            }
            let disk = FamilySample {
                param: t,
                area: c.area,
                perimeter: c.length,
                verdict: disk_verdict(s, &c)?,
            };
            let pair = match t_c {
                Some(tc) => annulus_matching(s, tc, c.h)
                    .filter(|&ta| ta > c.t_max)
                    .map(|ta| -> Result<FamilySample> {
                        let (a, p) = symmetric_annulus_measure(s, ta);
                        Ok(FamilySample {
                            param: t,
                            area: c.area + a,
                            perimeter: c.length + p,
                            verdict: disk_plus_annulus_verdict(s, &c, ta)?,
                        })
                    })
                    .transpose()?,
                None => None,
            };
            Ok((disk, pair))
        })
        .collect();
    let mut out = DiskSweep {
        disks: Vec::new(),
        with_annulus: Vec::new(),
        note: None,
    };
    for (t, r) in ts.iter().zip(rows) {
        match r {
            Ok((d, p)) => {
                out.disks.push(d);
                out.with_annulus.extend(p);
            }
            Err(e) => {
                out.note = Some(format!("disk sweep stopped at T = {t}: {e}"));
                break;
            }
        }
    }
    out
}

/// Height `t_a` in `(t_c, t0)` of the annulus `{|t| > t_a}` with inner
/// curvature `h`.
fn annulus_matching(s: &SurfaceProfile, t_c: f64, h: f64) -> Option<f64> {
    let g = |t: f64| -s.parallel_curvature(t) - h;
    if !(g(t_c) > 0.0 && g(s.t0) < 0.0) {
        return None;
    }
    roots::bisect(g, t_c, s.t0, 1e-15, 200).ok()
}

fn symmetric_annulus_family(s: &SurfaceProfile, n: usize) -> Vec<FamilySample> {
    let Some(t_c) = critical_points(s).t_c else {
        return Vec::new();
    };
    (0..n)
        .filter_map(|i| {
            let t = t_c + (s.t0 - t_c) * i as f64 / n as f64;
            let (area, perimeter) = symmetric_annulus_measure(s, t);
            let verdict = symmetric_annulus_stable(s, t).ok()?;
            Some(FamilySample {
                param: t,
                area,
                perimeter,
                verdict,
            })
        })
        .collect()
}

/// Parameterized by `x = -t'` over the window of stable circles with a
/// partner in `D < 0`.
fn nonsymmetric_family(s: &SurfaceProfile, n: usize) -> Vec<FamilySample> {
    let cp = critical_points(s);
    let (Some(lo), Some(hi)) = (cp.stable_circle_min, cp.t_c) else {
        return Vec::new();
    };
    if !(hi > lo) {
        return Vec::new();
    }
    // Up to t_c itself, where the family meets the symmetric annuli.
    (0..=n)
        .filter_map(|i| {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            let tpp = annulus_partner(s, x).ok()?;
            let (area, perimeter) = nonsymmetric_measure(s, x, tpp);
            Some(FamilySample {
                param: x,
                area,
                perimeter,
                verdict: parallel_pair_verdict(s, x, tpp),
            })
        })
        .collect()
}

fn vertical_family(s: &SurfaceProfile, beta: f64) -> Vec<FamilySample> {
    let p = 4.0 * s.t0;
    let verdict = StabilityVerdict::from_margin(f64::INFINITY, "vertical annulus");
    [(0.0, 0.0), (TAU, beta)]
        .into_iter()
        .map(|(w, a)| FamilySample {
            param: w,
            area: a,
            perimeter: p,
            verdict: verdict.clone(),
        })
        .collect()
}

/// Unduloids above the bifurcation parallel, each closed off by the
/// matching parallel at `-x` in `D < 0`. Candidates whose unduloid reaches
/// height `x` are dropped as not isoperimetric.
fn unduloid_circle_family(s: &SurfaceProfile, branch: &UnduloidBranch, tol: f64) -> Vec<FamilySample> {
    let Some(t_c) = critical_points(s).t_c else {
        return Vec::new();
    };
    let rows: Vec<Option<FamilySample>> = branch
        .samples
        .par_iter()
        .filter(|b| b.t_max > branch.t_tilde)
        .map(|b| {
            let g = |t: f64| s.parallel_curvature(t) - b.h;
            if !(g(t_c) < 0.0 && g(s.t0) > 0.0) {
                return None;
            }
            let x = roots::bisect(g, t_c, s.t0, 1e-15, 200).ok()?;
            let u = ClosedCurve::unduloid(s, b.t_max, b.h, tol).ok()?;
            if !(u.t_max > 0.0 && u.t_max < x && u.t_min > -x) {
                return None;
            }
            if classify_curve(&u.trajectory).ok()? != CurveClass::Unduloid {
                return None;
            }
            let (area, perimeter) = unduloid_circle_measure(s, &u, x);
            let verdict = unduloid_circle_verdict(s, branch, &u, x).ok()?;
            Some(FamilySample {
                param: b.t_max,
                area,
                perimeter,
                verdict,
            })
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Tables for every candidate type and their complements.
pub fn enumerate_families(s: &SurfaceProfile, opts: FamilyOptions) -> Result<Families> {
    if opts.samples < MIN_FAMILY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_FAMILY_SAMPLES} samples per family (got {})",
            opts.samples
        )));
    }
    let beta = total_area(s);
    let n = opts.samples;
    let mut notes = Vec::new();
    let cp = critical_points(s);

    let ((sweep, (sym, nonsym)), branch) = rayon::join(
        || {
            rayon::join(
                || disk_families(s, n, opts.tol),
                || rayon::join(|| symmetric_annulus_family(s, n), || nonsymmetric_family(s, n)),
            )
        },
        || -> Result<Option<UnduloidBranch>> {
            let Some(tt) = cp.t_tilde else { return Ok(None) };
            let Ok(_) = crate::closed::analytic_taylor(s) else { return Ok(None) };
            let end = s.t0 * (1.0 - 1e-6);
            if !(end > tt) {
                return Ok(None);
            }
            trace_unduloid_branch(s, (tt, end), (end - tt) / n as f64, opts.tol).map(Some)
        },
    );
    notes.extend(sweep.note);
    let branch = note_err(&mut notes, "unduloid branch", branch).flatten();
    if branch.is_none() {
        notes.push("no unduloid branch on this surface".into());
    }
    if let Some(b) = &branch {
        notes.extend(b.notes.iter().cloned());
    }
    let und = branch
        .as_ref()
        .map(|b| unduloid_circle_family(s, b, opts.tol))
        .unwrap_or_default();

    let base = vec![
        FamilyTable::new(FamilyId::new(FamilyKind::Disk), sweep.disks),
        FamilyTable::new(FamilyId::new(FamilyKind::SymmetricAnnulus), sym),
        FamilyTable::new(FamilyId::new(FamilyKind::NonsymmetricAnnulus), nonsym),
        FamilyTable::new(FamilyId::new(FamilyKind::VerticalAnnulus), vertical_family(s, beta)),
        FamilyTable::new(FamilyId::new(FamilyKind::UnduloidCircle), und),
        FamilyTable::new(FamilyId::new(FamilyKind::DiskPlusAnnulus), sweep.with_annulus),
    ];
    let mut tables = Vec::with_capacity(2 * base.len());
    for t in base {
        let dual = (!t.id.kind.self_dual()).then(|| t.complement(beta));
        tables.push(t);
        tables.extend(dual);
    }
    Ok(Families {
        beta,
        tables,
        branch,
        notes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub area: f64,
    /// Absent ids have no stable member enclosing this area.
    pub perimeters: BTreeMap<FamilyId, f64>,
    pub winner: FamilyId,
    pub winner_perimeter: f64,
    /// Interpolated family parameter of the winner.
    pub winner_param: f64,
    /// Other ids within [`TIE_TOL`] of the winner.
    pub near_ties: Vec<FamilyId>,
}

/// Minimal candidate at `area`.
pub fn evaluate_area(fam: &Families, area: f64) -> Result<ProfileRow> {
    let all = fam.perimeters_at(area);
    let (&winner, &(wp, wpar)) = all
        .iter()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(b.0)))
        .ok_or(Error::NoCandidate { area })?;
    let near_ties = all
        .iter()
        .filter(|(id, p)| **id != winner && p.0 <= wp * (1.0 + TIE_TOL))
        .map(|(id, _)| *id)
        .collect();
    Ok(ProfileRow {
        area,
        perimeters: all.into_iter().map(|(k, v)| (k, v.0)).collect(),
        winner,
        winner_perimeter: wp,
        winner_param: wpar,
        near_ties,
    })
}

/// Midpoint grid `A_k = (k + 1/2) beta / n`, symmetric about `beta / 2`.
pub fn area_grid(beta: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (k as f64 + 0.5) * beta / n as f64).collect()
}

pub fn profile(fam: &Families, n_areas: usize) -> Result<Vec<ProfileRow>> {
    if n_areas < 16 {
        return Err(Error::InvalidParameter(format!("n_areas = {n_areas} < 16")));
    }
    area_grid(fam.beta, n_areas)
        .into_par_iter()
        .map(|a| evaluate_area(fam, a))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Transition {
    pub area: f64,
    pub from: FamilyId,
    pub to: FamilyId,
    /// Winner perimeters on both sides of the located crossover.
    pub perimeter_from: f64,
    pub perimeter_to: f64,
}

/// Crossovers between adjacent rows whose winners differ in kind; a
/// family and its complement count as the same kind.
pub fn transitions(fam: &Families, rows: &[ProfileRow]) -> Result<Vec<Transition>> {
    let tol = 1e-12 * fam.beta;
    let mut out = Vec::new();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.winner.kind == b.winner.kind {
            continue;
        }
        let (mut lo, mut hi) = (a.area, b.area);
        let mut from = a.winner;
        let mut to = b.winner;
        let mut p_from = a.winner_perimeter;
        let mut p_to = b.winner_perimeter;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let r = evaluate_area(fam, mid)?;
            if r.winner.kind == a.winner.kind {
                lo = mid;
                from = r.winner;
                p_from = r.winner_perimeter;
            } else {
                hi = mid;
                to = r.winner;
                p_to = r.winner_perimeter;
            }
        }
        // Where both winners are available, pin the crossover exactly.
        let (pf, pt) = (fam.table(from), fam.table(to));
        let gap = |x: f64| -> Option<f64> { Some(pf?.perimeter_at(x)?.0 - pt?.perimeter_at(x)?.0) };
        let area = match (gap(lo), gap(hi)) {
            (Some(gl), Some(gh)) if gl * gh <= 0.0 => {
                roots::brent(|x| gap(x).unwrap_or(f64::NAN), lo, hi, 1e-15 * fam.beta, 200).unwrap_or(0.5 * (lo + hi))
            }
            _ => 0.5 * (lo + hi),
        };
        if let (Some(a), Some(b)) = (pf.and_then(|t| t.perimeter_at(area)), pt.and_then(|t| t.perimeter_at(area))) {
            p_from = a.0;
            p_to = b.0;
        }
        out.push(Transition {
            area,
            from,
            to,
            perimeter_from: p_from,
            perimeter_to: p_to,
        });
    }
    Ok(out)
}

/// Kinds of successive winners, consecutive repeats merged.
pub fn winner_sequence(rows: &[ProfileRow]) -> Vec<FamilyKind> {
    let mut seq: Vec<FamilyKind> = rows.iter().map(|r| r.winner.kind).collect();
    seq.dedup();
    seq
}

#[derive(Debug, Clone, Serialize)]
pub struct RotatedCap {
    pub x: f64,
    pub t_dprime: f64,
    pub alpha: f64,
    pub unduloid: ClosedCurve,
    pub area: f64,
    pub perimeter: f64,
    pub annulus_area: f64,
    pub annulus_perimeter: f64,
}

/// Tilt the parallel at `-x` of the annulus `{t > t_dprime} u {t < -x}`
/// by `alpha` inside a constant positive curvature zone. The tilted circle
/// is an unduloid type curve; the new region keeps area and perimeter.
pub fn rotated_cap(s: &SurfaceProfile, x: f64, t_dprime: f64, alpha: f64) -> Result<RotatedCap> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("tilt {alpha} must be positive")));
    }
    let (lo, hi) = (-x - alpha, -x + alpha);
    let k = s.gauss_curvature(-x);
    let uniform = k > 0.0
        && s.joints().iter().filter(|&&j| j > lo && j < hi).all(|&j| {
            let e = 1e-9 * (hi - lo);
            (s.gauss_curvature(j - e) - s.gauss_curvature(j + e)).abs() <= 1e-12 * k
        })
        && (0..=16).all(|i| {
            let t = lo + (hi - lo) * i as f64 / 16.0;
            (s.gauss_curvature(t) - k).abs() <= 1e-12 * k
        });
    if !uniform {
        return Err(Error::HypothesisViolated(format!(
            "tilted circle [{lo}, {hi}] leaves the constant curvature zone"
        )));
    }
    // Region below the tilted circle; inner normal -d/dt at its top.
    let h = s.parallel_curvature(-x);
    let u = ClosedCurve::unduloid(s, hi, h, PERIOD_MAP_TOL)?;
    if u.k != Some(1) || classify_curve(&u.trajectory)? != CurveClass::Unduloid {
        return Err(Error::HypothesisViolated("tilted circle is not a simple unduloid".into()));
    }
    let area = u.area + TAU * (2.0 * s.phi(s.t0) - s.phi(t_dprime));
    let perimeter = u.length + TAU * s.f(t_dprime);
    let (annulus_area, annulus_perimeter) = nonsymmetric_measure(s, x, t_dprime);
    Ok(RotatedCap {
        x,
        t_dprime,
        alpha,
        unduloid: u,
        area,
        perimeter,
        annulus_area,
        annulus_perimeter,
    })
}
