use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::CliError;

/// 17 significant digits, locale independent.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

pub fn csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn columns(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}_{i}")).collect()
}

/// Planar curve over its control polygon (dashed), with an optional ε-tube
/// around the polygon. The viewBox fits the data plus a 5% margin.
pub fn svg_curve(curve: &[Vec<f64>], polygon: &[Vec<f64>], tube: Option<f64>) -> String {
    let all = curve.iter().chain(polygon);
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for p in all {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        // SVG's y axis points down
        y0 = y0.min(-p[1]);
        y1 = y1.max(-p[1]);
    }
    let pad = tube.unwrap_or(0.0);
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let span = w.max(h).max(1e-12);
    let m = 0.05 * span;
    let (vx, vy) = (x0 - pad - m, y0 - pad - m);
    let (vw, vh) = (w + 2.0 * m, h + 2.0 * m);
    let stroke = 0.004 * span;
    let pts = |ps: &[Vec<f64>]| {
        ps.iter()
            .map(|p| format!("{:.6},{:.6}", p[0], -p[1]))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}">"#
    );
    if let Some(eps) = tube {
        let _ = writeln!(
            s,
            r##"  <polyline points="{}" fill="none" stroke="#4a90d9" stroke-opacity="0.2" stroke-width="{:.6}" stroke-linejoin="round" stroke-linecap="round"/>"##,
            pts(polygon),
            2.0 * eps
        );
    }
    let _ = writeln!(
        s,
        r##"  <polyline points="{}" fill="none" stroke="#555555" stroke-width="{stroke:.6}" stroke-dasharray="{:.6} {:.6}"/>"##,
        pts(polygon),
        4.0 * stroke,
        2.0 * stroke
    );
    for p in polygon {
        let _ = writeln!(
            s,
            r##"  <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="#555555"/>"##,
            p[0],
            -p[1],
            2.0 * stroke
        );
    }
    let _ = writeln!(
        s,
        r##"  <polyline points="{}" fill="none" stroke="#c0392b" stroke-width="{stroke:.6}"/>"##,
        pts(curve)
    );
    s.push_str("</svg>\n");
    s
}

/// Vertices then triangular faces with 1-based indices.
pub fn obj(vertices: &[Vec<f64>], faces: &[[usize; 3]]) -> String {
    let mut s = String::new();
    for v in vertices {
        let _ = writeln!(s, "v {} {} {}", num(v[0]), num(v[1]), num(v[2]));
    }
    for f in faces {
        let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    s
}
