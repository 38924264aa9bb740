//! Static SVG rendering of an Evans image.

use crate::contour::CsvRow;
use crate::{Error, Result};
use std::fmt::Write;

const SIZE: f64 = 600.0;
const PAD: f64 = 30.0;

/// Point of the image in the plotting plane. With `log_radial` the modulus is
/// compressed to `log10(1 + |D|)`, which keeps the origin and the winding.
fn plane_point(r: &CsvRow, log_radial: bool) -> (f64, f64) {
    let rad = if log_radial {
        if r.log10_mod_d > 15.0 {
            r.log10_mod_d
        } else {
            (1.0 + 10f64.powf(r.log10_mod_d)).log10()
        }
    } else {
        10f64.powf(r.log10_mod_d)
    };
    (rad * r.arg_unwrapped.cos(), rad * r.arg_unwrapped.sin())
}

/// Polyline of the image with a `+` at the origin; the view always contains
/// the origin.
pub fn render_svg(rows: &[CsvRow], log_radial: bool, config_hash: Option<&str>) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Parse("image CSV has no points".into()));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| plane_point(r, log_radial)).collect();
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::Parse("image has non-finite points; try --log-radial".into()));
    }
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-300) * 1.05;
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let scale = (SIZE - 2.0 * PAD) / span;
    let map = |x: f64, y: f64| (SIZE / 2.0 + (x - cx) * scale, SIZE / 2.0 - (y - cy) * scale);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#);
    if let Some(h) = config_hash {
        let _ = writeln!(s, "<!-- config_hash={h} -->");
    }
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let mut poly = String::new();
    for &(x, y) in &pts {
        let (u, v) = map(x, y);
        let _ = write!(poly, "{u:.3},{v:.3} ");
    }
    let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#, poly.trim_end());
    let (ox, oy) = map(0.0, 0.0);
    let arm = 6.0;
    let _ = writeln!(
        s,
        r#"<path id="origin" d="M {:.3} {oy:.3} H {:.3} M {ox:.3} {:.3} V {:.3}" stroke="red" stroke-width="1.5"/>"#,
        ox - arm,
        ox + arm,
        oy - arm,
        oy + arm
    );
    s.push_str("</svg>\n");
    Ok(s)
}
