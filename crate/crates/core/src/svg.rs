//! SVG 1.1 figures: instances with their Voronoi walls, and compiled
//! reduction layouts.
//!
//! Drawing happens in floating point; nothing here feeds back into a
//! predicate.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{Label, LabelledPointSet};
use crate::reduction::compile::CompiledInstance;
use crate::reduction::network::RED;
use crate::voronoi::{voronoi_walls, WallGeometry};

const SIZE: f64 = 600.0;
const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn colour(l: Label) -> &'static str {
    PALETTE[(l as usize + PALETTE.len() - 1) % PALETTE.len()]
}

/// Maps world coordinates into the drawing square, y up.
struct View {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    scale: f64,
}

impl View {
    fn around(pts: impl IntoIterator<Item = (f64, f64)>) -> View {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for (x, y) in pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
        }
        let pad = 0.1 * (x1 - x0).max(y1 - y0).max(1.0);
        let (x0, y0, x1, y1) = (x0 - pad, y0 - pad, x1 + pad, y1 + pad);
        let scale = SIZE / (x1 - x0).max(y1 - y0);
        View { x0, y0, x1, y1, scale }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.x0) * self.scale, (self.y1 - y) * self.scale)
    }

    fn width(&self) -> f64 {
        (self.x1 - self.x0) * self.scale
    }

    fn height(&self) -> f64 {
        (self.y1 - self.y0) * self.scale
    }

    /// Clips `p + t d` for `t` in `[lo, hi]` to the view box.
    fn clip(&self, p: (f64, f64), d: (f64, f64), lo: f64, hi: f64) -> Option<((f64, f64), (f64, f64))> {
        let (mut a, mut b) = (lo, hi);
        for (pv, dv, min, max) in [(p.0, d.0, self.x0, self.x1), (p.1, d.1, self.y0, self.y1)] {
            if dv == 0.0 {
                if pv < min || pv > max {
                    return None;
                }
                continue;
            }
            let (t0, t1) = ((min - pv) / dv, (max - pv) / dv);
            a = a.max(t0.min(t1));
            b = b.min(t0.max(t1));
        }
        (a <= b).then_some(((p.0 + a * d.0, p.1 + a * d.1), (p.0 + b * d.0, p.1 + b * d.1)))
    }
}

fn header(out: &mut String, v: &View) {
    let _ = writeln!(
        out,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.1}" height="{h:.1}" viewBox="0 0 {w:.1} {h:.1}">
<rect width="100%" height="100%" fill="white"/>"#,
        w = v.width(),
        h = v.height()
    );
}

fn line(out: &mut String, v: &View, a: (f64, f64), b: (f64, f64), width: f64, class: &str) {
    let (a, b) = (v.map(a), v.map(b));
    let _ = writeln!(
        out,
        r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" stroke-width="{width}"/>"#,
        a.0, a.1, b.0, b.1
    );
}

fn marks(out: &mut String, v: &View, pts: &[(f64, f64)], labels: &[Label], subset: Option<&[usize]>, r: f64) {
    for (p, &l) in pts.iter().zip(labels) {
        let (x, y) = v.map(*p);
        let _ = writeln!(
            out,
            r#"<circle class="point" cx="{x:.3}" cy="{y:.3}" r="{r}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            colour(l)
        );
    }
    for &i in subset.unwrap_or(&[]) {
        let (x, y) = v.map(pts[i]);
        let c = colour(labels[i]);
        let _ = writeln!(
            out,
            r#"<path class="member" d="M{:.3} {:.3}L{:.3} {:.3}M{:.3} {:.3}L{:.3} {:.3}" stroke="{c}" stroke-width="2"/>"#,
            x - r,
            y - r,
            x + r,
            y + r,
            x - r,
            y + r,
            x + r,
            y - r
        );
    }
}

/// Instance figure: points as circles coloured by label, subset members as
/// crosses, Voronoi walls thin and decision walls thick. A 1D instance is
/// drawn on a number line with boundary ticks.
pub fn render_instance(set: &LabelledPointSet, subset: Option<&[usize]>) -> Result<String> {
    if let Some(s) = subset {
        set.check_subset(s)?;
    }
    let pts: Vec<(f64, f64)> = set
        .planar_points()
        .iter()
        .map(|p| (p.x.to_f64(), p.y.to_f64()))
        .collect();
    let v = View::around(pts.iter().copied());
    let mut out = String::new();
    header(&mut out, &v);
    if set.dim() == 1 {
        line(&mut out, &v, (v.x0, 0.0), (v.x1, 0.0), 0.5, "axis");
    }
    let tick = 0.05 * (v.x1 - v.x0);
    for w in voronoi_walls(set) {
        let width = if w.is_decision() { 2.5 } else { 0.6 };
        let class = if w.is_decision() { "decision" } else { "wall" };
        let seg = match &w.geometry {
            WallGeometry::Point(x) => {
                let x = x.to_f64();
                Some(((x, -tick), (x, tick)))
            }
            WallGeometry::Segment(a, b) => {
                let (a, b) = ((a.x.to_f64(), a.y.to_f64()), (b.x.to_f64(), b.y.to_f64()));
                v.clip(a, (b.0 - a.0, b.1 - a.1), 0.0, 1.0)
            }
            WallGeometry::Ray { anchor, dir } => {
                v.clip((anchor.x.to_f64(), anchor.y.to_f64()), (dir.x.to_f64(), dir.y.to_f64()), 0.0, f64::MAX)
            }
            WallGeometry::Line { anchor, dir } => v.clip(
                (anchor.x.to_f64(), anchor.y.to_f64()),
                (dir.x.to_f64(), dir.y.to_f64()),
                f64::MIN,
                f64::MAX,
            ),
        };
        if let Some((a, b)) = seg {
            line(&mut out, &v, a, b, width, class);
        }
    }
    marks(&mut out, &v, &pts, set.labels(), subset, 5.0);
    out.push_str("</svg>\n");
    Ok(out)
}

/// Layout figure of a compiled formula: red regions shaded, channel axes
/// drawn, and every point as a small dot.
pub fn render_layout(ci: &CompiledInstance) -> Result<String> {
    let net = &ci.network;
    if net.is_empty() {
        return Err(Error::Precondition("empty layout".into()));
    }
    let f = |p: &crate::geometry::Point2| (p.x.to_f64(), p.y.to_f64());
    let v = View::around(net.points().iter().map(f));
    let mut out = String::new();
    header(&mut out, &v);
    for r in net.regions() {
        let mut d = String::new();
        for (k, p) in r.vertices.iter().enumerate() {
            let (x, y) = v.map(f(p));
            let _ = write!(d, "{}{x:.3} {y:.3}", if k == 0 { "M" } else { "L" });
        }
        let _ = writeln!(
            out,
            r##"<path class="region" d="{d}Z" fill="#f4c2c2" stroke="#d62728" stroke-width="0.3"/>"##
        );
    }
    for rec in &ci.channels {
        let pts: Vec<String> = rec
            .channel
            .polyline
            .iter()
            .map(|p| {
                let (x, y) = v.map(f(p));
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="channel" points="{}" fill="none" stroke="gray" stroke-width="0.5"/>"#,
            pts.join(" ")
        );
    }
    let r = (0.15 * v.scale).clamp(0.3, 3.0);
    for (p, &l) in net.points().iter().zip(net.labels()) {
        let (x, y) = v.map(f(p));
        let fill = if l == RED { colour(1) } else { colour(2) };
        let _ = writeln!(out, r#"<circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{fill}"/>"#);
    }
    out.push_str("</svg>\n");
    Ok(out)
}
