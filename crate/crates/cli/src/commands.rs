use std::fmt::Write as _;

use anyhow::Context;
use revtorus_core::closed::{analytic_taylor_with, fd_branch_curvature, fd_hessian, fd_sigma_ttt, DerivativeSource};
use revtorus_core::profile::{candidate_region, winner_sequence};
use revtorus_core::*;

use crate::config::{ClosedSpec, Format, RunConfig};
use crate::output::{num, opt_num, Sink};
use crate::svg;

fn opt_line(name: &str, v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{name} = {x:.10}\n"),
        None => format!("{name} = none\n"),
    }
}

pub fn analyze(cfg: &RunConfig, s: &SurfaceProfile, sink: &mut Sink) -> anyhow::Result<String> {
    let cp = critical_points(s);
    let beta = total_area(s);
    let mut rep = String::new();
    writeln!(rep, "surface: {}", cfg.surface.describe())?;
    writeln!(rep, "t0 = {:.10}", s.t0)?;
    writeln!(rep, "beta = {beta:.10}")?;
    rep += &opt_line("t_c", cp.t_c);
    rep += &opt_line("t_tilde", cp.t_tilde);
    rep += &opt_line("stable_circle_min", cp.stable_circle_min);
    writeln!(rep, "joints = {:?}", s.joints())?;

    let n = cfg.analyze.samples;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = -s.t0 + 2.0 * s.t0 * i as f64 / (n - 1) as f64;
        let m = metric_eval(s, t).with_context(|| format!("surface_model: metric at t = {t}"))?;
        rows.push([m.t, m.f, m.fp, m.fpp, m.k, m.h, m.l, m.d].map(num).to_vec());
    }
    sink.table("metric.csv", &["t", "f", "fp", "fpp", "k", "h", "l", "d"], &rows)?;
    sink.text("analyze_report.txt", &rep)?;
    Ok(rep)
}

fn trajectory_rows(s: &SurfaceProfile, tr: &Trajectory) -> Vec<Vec<String>> {
    let w = tr.first_integral_values(s);
    tr.states
        .iter()
        .zip(&w)
        .map(|(st, w)| [st.s, st.theta, st.t, st.sigma, *w].map(num).to_vec())
        .collect()
}

const TRAJ_HEADER: [&str; 5] = ["s", "theta", "t", "sigma", "first_integral"];

fn closed_curve(cfg: &RunConfig, s: &SurfaceProfile, spec: &ClosedSpec) -> anyhow::Result<ClosedCurve> {
    let tol = cfg.tolerances.root_tol;
    let c = match *spec {
        ClosedSpec::Parallel { t } => ClosedCurve::parallel(s, t),
        ClosedSpec::Vertical { theta } => {
            ClosedCurve::vertical(s, theta).with_context(|| format!("closed_curve_finder: vertical geodesic at theta = {theta}"))?
        }
        ClosedSpec::Disk { t_max } => {
            find_symmetric_nodoid(s, t_max, tol).with_context(|| format!("closed_curve_finder: disk with T = {t_max}"))?
        }
        ClosedSpec::Unduloid { t_max, h } => ClosedCurve::unduloid(s, t_max, h, tol)
            .with_context(|| format!("closed_curve_finder: unduloid with T = {t_max}, h = {h}"))?,
    };
    Ok(c)
}

pub fn curves(cfg: &RunConfig, s: &SurfaceProfile, sink: &mut Sink) -> anyhow::Result<String> {
    let mut rep = String::new();
    let mut summary = Vec::new();
    for (i, c) in cfg.curves.starts.iter().enumerate() {
        let tr = integrate_arclength(s, CurveState::at_max(c.t_max), c.h, c.length, cfg.tolerances.ode_tol)
            .with_context(|| format!("curve_integrator: start {i} (T = {}, h = {})", c.t_max, c.h))?;
        let class = classify_curve(&tr).map(|k| format!("{k:?}")).unwrap_or_else(|_| "unclassified".into());
        let drift = tr.first_integral_drift(s);
        sink.table(&format!("curve_{i}.csv"), &TRAJ_HEADER, &trajectory_rows(s, &tr))?;
        writeln!(rep, "curve {i}: T = {} h = {} class {class} drift {drift:.3e}", c.t_max, c.h)?;
        summary.push(vec![
            i.to_string(),
            num(c.t_max),
            num(c.h),
            num(c.length),
            class,
            num(drift),
            tr.events.len().to_string(),
        ]);
    }
    sink.table(
        "curves.csv",
        &["index", "t_max", "h", "length", "class", "drift", "events"],
        &summary,
    )?;

    let grid = cfg.tolerances.eig_grid;
    for (i, spec) in cfg.curves.closed.iter().enumerate() {
        let c = closed_curve(cfg, s, spec)?;
        sink.table(&format!("closed_{i}.csv"), &TRAJ_HEADER, &trajectory_rows(s, &c.trajectory))?;
        let p = potential_along(s, &c, 4 * grid).with_context(|| format!("jacobi_spectrum: potential of closed curve {i}"))?;
        let q_rows: Vec<Vec<String>> = p.nodes.iter().zip(&p.q).map(|(x, q)| vec![num(*x), num(*q)]).collect();
        sink.table(&format!("closed_{i}_potential.csv"), &["s", "q"], &q_rows)?;
        let mut spectra = vec![spectrum(&p, BoundaryCondition::Periodic, 6, grid)
            .with_context(|| format!("jacobi_spectrum: periodic spectrum of closed curve {i}"))?];
        if matches!(c.class, CurveClass::Unduloid | CurveClass::Nodoid) {
            let (n, d) = fundamental_piece_spectra(s, &c, 6, grid)
                .with_context(|| format!("jacobi_spectrum: fundamental piece of closed curve {i}"))?;
            spectra.push(n);
            spectra.push(d);
        }
        let mut ev_rows = Vec::new();
        for sp in &spectra {
            for (k, v) in sp.eigenvalues.iter().enumerate() {
                ev_rows.push(vec![format!("{:?}", sp.bc).to_lowercase(), k.to_string(), num(*v)]);
            }
        }
        sink.table(&format!("closed_{i}_eigenvalues.csv"), &["bc", "index", "eigenvalue"], &ev_rows)?;
        writeln!(
            rep,
            "closed {i}: {:?} length {:.10} area {:.10} lambda_1 {:.6e}",
            c.class, c.length, c.area, spectra[0].eigenvalues[0]
        )?;
    }
    sink.text("curves_report.txt", &rep)?;
    Ok(rep)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn branch(cfg: &RunConfig, s: &SurfaceProfile, sink: &mut Sink) -> anyhow::Result<String> {
    let tay = analytic_taylor(s).context("closed_curve_finder: bifurcation data")?;
    let tt = tay.t_tilde;
    let range = match cfg.branch.range {
        Some([a, b]) => (a, b),
        None => {
            let w = 0.25 * tt.min(s.t0 - tt);
            (tt - w, tt + w)
        }
    };
    let tol = cfg.tolerances.root_tol;
    let b = trace_unduloid_branch(s, range, cfg.branch.step, tol)
        .with_context(|| format!("closed_curve_finder: branch over T in [{}, {}]", range.0, range.1))?;
    let mut rows = Vec::new();
    for p in &b.samples {
        let dp = period_derivative(s, &b, p.t_max).ok();
        rows.push(vec![
            num(p.t_max),
            num(p.h),
            num(p.t_opposite),
            num(p.f_residual),
            num(p.closure_residual),
            num(p.length),
            num(p.area),
            num(p.drift),
            p.k.to_string(),
            num(p.period),
            opt_num(dp),
        ]);
    }
    sink.table(
        "branch.csv",
        &[
            "t_max",
            "h",
            "t_opposite",
            "f_residual",
            "closure_residual",
            "length",
            "area",
            "drift",
            "k",
            "period",
            "dperiod_dt",
        ],
        &rows,
    )?;

    let mut rep = String::new();
    writeln!(rep, "surface: {}", cfg.surface.describe())?;
    writeln!(rep, "t_tilde = {:.10}", tt)?;
    writeln!(rep, "h_tilde = {:.10}", tay.h_tilde)?;
    writeln!(rep, "samples = {}", b.samples.len())?;
    for n in &b.notes {
        writeln!(rep, "note: {n}")?;
    }
    writeln!(rep, "validation:")?;
    match analytic_taylor_with(s, DerivativeSource::FiniteDifference) {
        Ok(fd) => writeln!(
            rep,
            "  condition_value = {:.10}  fd-from-K {:.10}  rel {:.1e}",
            tay.condition_value,
            fd.condition_value,
            rel(fd.condition_value, tay.condition_value)
        )?,
        Err(e) => writeln!(rep, "  condition_value = {:.10}  fd-from-K unavailable: {e}", tay.condition_value)?,
    }
    match fd_branch_curvature(s, &tay, 1e-2) {
        Ok((h2, a2)) => {
            writeln!(
                rep,
                "  h_o''(t_tilde) = {:.10}  fd {:.10}  rel {:.1e}",
                tay.h_o_second,
                h2,
                rel(h2, tay.h_o_second)
            )?;
            writeln!(rep, "  A''(t_tilde) fd = {a2:.10}")?;
        }
        Err(e) => writeln!(rep, "  h_o''(t_tilde) = {:.10}  fd unavailable: {e}", tay.h_o_second)?,
    }
    match fd_hessian(s, tt, tay.h_tilde) {
        Ok(hs) => {
            writeln!(
                rep,
                "  hessian fd [[{:.6e}, {:.6e}], [{:.6e}, {:.6e}]]",
                hs[0][0], hs[0][1], hs[1][0], hs[1][1]
            )?;
            writeln!(
                rep,
                "  hessian model [[{:.6e}, {:.6e}], [{:.6e}, {:.6e}]]",
                tay.sigma_tt_pi, tay.sigma_th_pi, tay.sigma_th_pi, tay.sigma_hh_pi
            )?;
        }
        Err(e) => writeln!(rep, "  hessian fd unavailable: {e}")?,
    }
    match fd_sigma_ttt(s, tt, tay.h_tilde) {
        Ok(v) => writeln!(
            rep,
            "  sigma_TTT = {:.10}  fd {v:.10}  rel {:.1e}",
            tay.sigma_ttt_pi,
            rel(v, tay.sigma_ttt_pi)
        )?,
        Err(e) => writeln!(rep, "  sigma_TTT fd unavailable: {e}")?,
    }
    sink.text("branch_report.txt", &rep)?;
    Ok(rep)
}

fn shape_kind(shape: &RegionShape) -> &'static str {
    match shape {
        RegionShape::Disk { .. } => "disk",
        RegionShape::SymmetricAnnulus { .. } => "symmetric_annulus",
        RegionShape::NonsymmetricAnnulus { .. } => "nonsymmetric_annulus",
        RegionShape::VerticalAnnuli { .. } => "vertical_annuli",
        RegionShape::UnduloidCircle { .. } => "unduloid_circle",
        RegionShape::DiskPlusSymmetricAnnulus { .. } => "disk_plus_symmetric_annulus",
        RegionShape::Parallels { .. } => "parallels",
    }
}

fn shape_params(shape: &RegionShape) -> String {
    match shape {
        RegionShape::Disk { t_max } => format!("t_max={}", num(*t_max)),
        RegionShape::SymmetricAnnulus { t } => format!("t={}", num(*t)),
        RegionShape::NonsymmetricAnnulus { x, t_dprime } => format!("x={};t_dprime={}", num(*x), num(*t_dprime)),
        RegionShape::VerticalAnnuli { intervals } => intervals
            .iter()
            .map(|(a, w)| format!("start={};width={}", num(*a), num(*w)))
            .collect::<Vec<_>>()
            .join("|"),
        RegionShape::UnduloidCircle { t_max, x } => format!("t_max={};x={}", num(*t_max), num(*x)),
        RegionShape::DiskPlusSymmetricAnnulus { disk_t_max, annulus_t } => {
            format!("disk_t_max={};annulus_t={}", num(*disk_t_max), num(*annulus_t))
        }
        RegionShape::Parallels { ts } => ts.iter().map(|t| num(*t)).collect::<Vec<_>>().join("|"),
    }
}

pub fn stability(cfg: &RunConfig, s: &SurfaceProfile, sink: &mut Sink) -> anyhow::Result<String> {
    let unduloid_tops: Vec<f64> = cfg
        .stability
        .regions
        .iter()
        .filter_map(|r| match r.shape {
            RegionShape::UnduloidCircle { t_max, .. } => Some(t_max),
            _ => None,
        })
        .collect();
    let branch = if unduloid_tops.is_empty() {
        None
    } else {
        let tt = critical_points(s)
            .t_tilde
            .context("closed_curve_finder: no bifurcation parallel for unduloid regions")?;
        let step = cfg.stability.branch_step.unwrap_or(cfg.branch.step);
        let lo = unduloid_tops.iter().copied().fold(tt, f64::min);
        let hi = unduloid_tops.iter().copied().fold(tt, f64::max);
        let pad = step;
        let range = ((lo - pad).max(1e-3 * s.t0), (hi + pad).min(s.t0 * (1.0 - 1e-6)));
        Some(
            trace_unduloid_branch(s, range, step, cfg.tolerances.root_tol)
                .with_context(|| format!("closed_curve_finder: branch over T in [{}, {}]", range.0, range.1))?,
        )
    };

    let mut rep = String::new();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, spec) in cfg.stability.regions.iter().enumerate() {
        let kind = shape_kind(&spec.shape);
        let res = candidate_region(s, spec.shape.clone(), spec.complement, branch.as_ref())
            .and_then(|rg| classify_region(s, &rg, branch.as_ref()).map(|v| (rg, v)));
        match res {
            Ok((rg, v)) => {
                writeln!(rep, "region {i} {kind}: {:?} margin {:.6e} ({})", v.stable, v.margin, v.criterion)?;
                rows.push(vec![
                    i.to_string(),
                    kind.into(),
                    shape_params(&spec.shape),
                    spec.complement.to_string(),
                    num(rg.area),
                    num(rg.perimeter),
                    num(rg.h),
                    format!("{:?}", v.stable).to_lowercase(),
                    num(v.margin),
                    v.criterion,
                ]);
            }
            Err(e) => {
                writeln!(rep, "region {i} {kind}: error: {e}")?;
                failures.push(format!("region_stability: region {i} ({kind}): {e}"));
                rows.push(vec![
                    i.to_string(),
                    kind.into(),
                    shape_params(&spec.shape),
                    spec.complement.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "error".into(),
                    String::new(),
                    e.to_string(),
                ]);
            }
        }
    }
    sink.table(
        "verdicts.csv",
        &[
            "index",
            "kind",
            "parameters",
            "complement",
            "area",
            "perimeter",
            "h",
            "stable",
            "margin",
            "criterion",
        ],
        &rows,
    )?;
    sink.text("stability_report.txt", &rep)?;
    if !failures.is_empty() {
        anyhow::bail!(failures.join("; "));
    }
    Ok(rep)
}

pub fn profile(cfg: &RunConfig, s: &SurfaceProfile, sink: &mut Sink) -> anyhow::Result<String> {
    let opts = FamilyOptions {
        samples: cfg.profile.samples,
        tol: cfg.tolerances.root_tol,
    };
    let fam = enumerate_families(s, opts).context("isoperimetric_profiler: family enumeration")?;
    let rows = revtorus_core::profile(&fam, cfg.profile.n_areas).context("isoperimetric_profiler: profile")?;
    let tr = transitions(&fam, &rows).context("isoperimetric_profiler: transitions")?;

    let ids = FamilyId::all();
    let names: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    let mut header: Vec<&str> = vec!["area"];
    header.extend(names.iter().map(String::as_str));
    header.extend(["winner", "winner_perimeter", "winner_param", "near_ties"]);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![num(r.area)];
            v.extend(ids.iter().map(|id| opt_num(r.perimeters.get(id).copied())));
            v.push(r.winner.to_string());
            v.push(num(r.winner_perimeter));
            v.push(num(r.winner_param));
            v.push(r.near_ties.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";"));
            v
        })
        .collect();
    let profile_csv = sink.table("profile.csv", &header, &table)?;
    let tr_rows: Vec<Vec<String>> = tr
        .iter()
        .map(|t| {
            vec![
                num(t.area),
                t.from.to_string(),
                t.to.to_string(),
                num(t.perimeter_from),
                num(t.perimeter_to),
            ]
        })
        .collect();
    let tr_csv = sink.table(
        "transitions.csv",
        &["area", "from", "to", "perimeter_from", "perimeter_to"],
        &tr_rows,
    )?;
    if cfg.wants(Format::Svg) {
        let svg = svg::render(&profile_csv, &tr_csv)?;
        sink.text("profile.svg", &svg)?;
    }

    let mut rep = String::new();
    writeln!(rep, "surface: {}", cfg.surface.describe())?;
    writeln!(rep, "beta = {:.10}", fam.beta)?;
    for t in &fam.tables {
        if !t.id.complement {
            writeln!(rep, "family {}: {} samples, coverage {:?}", t.id, t.samples.len(), t.coverage())?;
        }
    }
    for n in &fam.notes {
        writeln!(rep, "note: {n}")?;
    }
    writeln!(rep, "winners: {:?}", winner_sequence(&rows))?;
    for t in &tr {
        writeln!(
            rep,
            "transition at A = {:.8} (A/beta = {:.6}): {} -> {}, P = {:.10}",
            t.area,
            t.area / fam.beta,
            t.from,
            t.to,
            t.perimeter_from
        )?;
    }
    sink.text("profile_report.txt", &rep)?;
    Ok(rep)
}
