//! Static SVG of a profile, computed only from the profile and transition
//! CSV text so plots can be regenerated offline.

use std::fmt::Write as _;

use anyhow::{bail, Context};

const W: f64 = 900.0;
const H: f64 = 560.0;
const M: (f64, f64, f64, f64) = (70.0, 190.0, 30.0, 55.0); // left, right, top, bottom

const COLORS: [&str; 11] = [
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728", "#9467bd", "#c5b0d5", "#8c564b",
    "#e377c2",
];

fn parse(field: &str) -> anyhow::Result<Option<f64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        Ok(Some(field.parse::<f64>().with_context(|| format!("bad number '{field}'"))?))
    }
}

/// Tick positions with their labels.
fn nice_ticks(lo: f64, hi: f64, n: usize) -> Vec<(f64, String)> {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let mut out = Vec::new();
    for k in first.. {
        let t = k as f64 * step;
        if t > hi + 1e-9 * span {
            break;
        }
        out.push((t, format!("{t:.decimals$}")));
    }
    out
}

pub fn render(profile_csv: &str, transitions_csv: &str) -> anyhow::Result<String> {
    let mut rd = csv::Reader::from_reader(profile_csv.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    let winner_col = header.iter().position(|h| h == "winner").context("profile CSV lacks a winner column")?;
    let wp_col = header
        .iter()
        .position(|h| h == "winner_perimeter")
        .context("profile CSV lacks winner_perimeter")?;
    if header.first().map(String::as_str) != Some("area") || winner_col < 2 {
        bail!("unexpected profile CSV header");
    }
    let families = &header[1..winner_col];
    let mut area = Vec::new();
    let mut cols: Vec<Vec<Option<f64>>> = vec![Vec::new(); families.len()];
    let mut winner_p = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        area.push(parse(&rec[0])?.context("empty area")?);
        for (j, c) in cols.iter_mut().enumerate() {
            c.push(parse(&rec[1 + j])?);
        }
        winner_p.push(parse(&rec[wp_col])?.context("empty winner perimeter")?);
    }
    let mut marks = Vec::new();
    let mut rd = csv::Reader::from_reader(transitions_csv.as_bytes());
    for rec in rd.records() {
        let rec = rec?;
        let a = parse(&rec[0])?.context("empty transition area")?;
        let p = parse(&rec[3])?.context("empty transition perimeter")?;
        marks.push((a, p));
    }
    if area.is_empty() {
        bail!("profile CSV has no rows");
    }

    let x_lo = 0.0;
    let x_hi = area.iter().copied().fold(0.0, f64::max) + area[0];
    let y_hi = cols
        .iter()
        .flatten()
        .flatten()
        .copied()
        .chain(winner_p.iter().copied())
        .fold(0.0, f64::max)
        * 1.05;
    let y_lo = 0.0;
    let px = |x: f64| M.0 + (x - x_lo) / (x_hi - x_lo) * (W - M.0 - M.1);
    let py = |y: f64| H - M.3 - (y - y_lo) / (y_hi - y_lo).max(f64::MIN_POSITIVE) * (H - M.2 - M.3);

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#)?;
    // Axes and ticks.
    writeln!(
        s,
        r#"<path d="M{:.2},{:.2} L{:.2},{:.2} L{:.2},{:.2}" stroke="black" fill="none"/>"#,
        px(x_lo),
        py(y_hi),
        px(x_lo),
        py(y_lo),
        px(x_hi),
        py(y_lo)
    )?;
    for (t, label) in nice_ticks(x_lo, x_hi, 8) {
        writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{label}</text>"#,
            px(t),
            py(y_lo),
            py(y_lo) + 5.0,
            py(y_lo) + 19.0
        )?;
    }
    for (t, label) in nice_ticks(y_lo, y_hi, 6) {
        writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{label}</text>"#,
            px(x_lo),
            py(t),
            px(x_lo) - 5.0,
            px(x_lo) - 8.0,
            py(t) + 4.0
        )?;
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">area</text>"#,
        0.5 * (px(x_lo) + px(x_hi)),
        H - 12.0
    )?;
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">perimeter</text>"#,
        0.5 * (py(y_lo) + py(y_hi)),
        0.5 * (py(y_lo) + py(y_hi))
    )?;

    // One path per family, broken where the family is absent.
    let mut legend = 0;
    for (j, name) in families.iter().enumerate() {
        let mut d = String::new();
        let mut pen = false;
        for (x, y) in area.iter().zip(&cols[j]) {
            match y {
                Some(y) => {
                    write!(d, "{}{:.2},{:.2} ", if pen { "L" } else { "M" }, px(*x), py(*y))?;
                    pen = true;
                }
                None => pen = false,
            }
        }
        if d.is_empty() {
            continue;
        }
        let color = COLORS[j % COLORS.len()];
        writeln!(
            s,
            r#"<path d="{}" stroke="{color}" stroke-width="1.5" fill="none"><title>{name}</title></path>"#,
            d.trim_end()
        )?;
        let ly = M.2 + 10.0 + 18.0 * legend as f64;
        writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="{color}" stroke-width="2"/><text x="{3:.2}" y="{4:.2}">{name}</text>"#,
            W - M.1 + 12.0,
            ly,
            W - M.1 + 32.0,
            W - M.1 + 38.0,
            ly + 4.0
        )?;
        legend += 1;
    }
    let mut d = String::new();
    for (i, (x, y)) in area.iter().zip(&winner_p).enumerate() {
        write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, px(*x), py(*y))?;
    }
    writeln!(
        s,
        r#"<path d="{}" stroke="black" stroke-width="1" stroke-dasharray="4 3" fill="none"><title>profile</title></path>"#,
        d.trim_end()
    )?;
    for (a, p) in &marks {
        writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#, px(*a), py(*p))?;
    }
    s.push_str("</svg>\n");
    Ok(s)
}
