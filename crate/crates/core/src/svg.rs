//! Deterministic SVG output for rank-2 diagrams, broken lines and tree
//! realizations. Coordinates are clipped exactly and printed with four
//! decimals.

use crate::diagram::{Diagram, Support};
use crate::error::{Error, Result};
use crate::lattice::{intersect_supports, Intersection, SupportKind, SupportR2, Q};
use crate::theta::{BrokenLine, Frame};
use crate::trees::Tree;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Write;

const SIZE: f64 = 600.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

/// Square view box [−r, r]².
struct View {
    r: Q,
}

impl View {
    fn fit(points: &[Vec<Q>]) -> View {
        let mut r = Q::from_integer(2.into());
        for p in points {
            for c in p {
                let a = c.abs() * Q::new(3.into(), 2.into()) + Q::from_integer(1.into());
                if a > r {
                    r = a;
                }
            }
        }
        View { r }
    }

    fn px(&self, x: &[Q]) -> (String, String) {
        let r = self.r.to_f64().unwrap_or(1.0);
        let sx = (x[0].to_f64().unwrap_or(0.0) + r) / (2.0 * r) * SIZE;
        let sy = (r - x[1].to_f64().unwrap_or(0.0)) / (2.0 * r) * SIZE;
        (fmt4(sx), fmt4(sy))
    }

    /// The part of a support inside the box, as two endpoints.
    fn clip(&self, s: &SupportR2) -> Option<(Vec<Q>, Vec<Q>)> {
        let d = s.dir_q();
        let (mut lo, mut hi): (Option<Q>, Option<Q>) = match s.kind {
            SupportKind::Ray => (Some(Q::zero()), None),
            SupportKind::Line => (None, None),
        };
        for i in 0..2 {
            if d[i].is_zero() {
                if s.base[i].abs() > self.r {
                    return None;
                }
                continue;
            }
            let a = (-&self.r - &s.base[i]) / &d[i];
            let b = (&self.r - &s.base[i]) / &d[i];
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            lo = Some(match lo {
                Some(l) if l > a => l,
                _ => a,
            });
            hi = Some(match hi {
                Some(h) if h < b => h,
                _ => b,
            });
        }
        let (lo, hi) = (lo?, hi?);
        if lo >= hi {
            return None;
        }
        Some((s.point_at(&lo), s.point_at(&hi)))
    }
}

fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>");
}

fn axes(out: &mut String, v: &View) {
    let z = Q::zero();
    let (x0, y0) = v.px(&[-v.r.clone(), z.clone()]);
    let (x1, y1) = v.px(&[v.r.clone(), z.clone()]);
    let _ = writeln!(out, "<line class=\"axis\" x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"#cccccc\"/>");
    let (x0, y0) = v.px(&[z.clone(), -v.r.clone()]);
    let (x1, y1) = v.px(&[z, v.r.clone()]);
    let _ = writeln!(out, "<line class=\"axis\" x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"#cccccc\"/>");
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn polyline(out: &mut String, v: &View, pts: &[Vec<Q>], color: &str, class: &str, label: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|p| {
            let (x, y) = v.px(p);
            format!("{x},{y}")
        })
        .collect();
    let _ = writeln!(
        out,
        "<polyline class=\"{class}\" data-label=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
        escape(label),
        coords.join(" ")
    );
}

fn r2_supports(d: &Diagram) -> Result<Vec<&SupportR2>> {
    d.walls
        .iter()
        .map(|w| match &w.support {
            Support::R2(s) => Ok(s),
            Support::Cone(_) => Err(Error::Unsupported("SVG output needs a rank-2 diagram".into())),
        })
        .collect()
}

/// One polyline per wall, colored by the degree of its lowest log term.
/// Walls that miss the view box are drawn as a single point.
pub fn render_diagram(d: &Diagram) -> Result<String> {
    let sup = r2_supports(d)?;
    let v = View::fit(&sup.iter().map(|s| s.base.clone()).collect::<Vec<_>>());
    let mut out = String::new();
    header(&mut out, &format!("{} diagram, order {}", d.mode.name(), d.order));
    axes(&mut out, &v);
    for (w, s) in d.walls.iter().zip(sup) {
        let deg = w.min_degree().unwrap_or(0).max(0) as usize;
        let color = PALETTE[deg % PALETTE.len()];
        let pts = match v.clip(s) {
            Some((a, b)) => vec![a, b],
            None => vec![s.base.clone(), s.base.clone()],
        };
        polyline(&mut out, &v, &pts, color, "wall", &format!("m={} deg={deg}", w.m));
    }
    if let Ok(js) = d.joints() {
        for j in js {
            let (x, y) = v.px(&j);
            let _ = writeln!(out, "<circle class=\"joint\" cx=\"{x}\" cy=\"{y}\" r=\"2\" fill=\"black\"/>");
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Walls in grey, broken lines in color, bends marked and annotated with
/// the exponent change.
pub fn render_broken_lines(d: &Diagram, frame: &Frame, lines: &[BrokenLine]) -> Result<String> {
    let sup = r2_supports(d)?;
    let mut pts: Vec<Vec<Q>> = sup.iter().map(|s| s.base.clone()).collect();
    for l in lines {
        pts.push(l.end.clone());
        pts.extend(l.bends.iter().map(|b| b.point.clone()));
    }
    let v = View::fit(&pts);
    let mut out = String::new();
    header(&mut out, &format!("broken lines for {}", frame.label()));
    axes(&mut out, &v);
    for s in sup {
        if let Some((a, b)) = v.clip(s) {
            polyline(&mut out, &v, &[a, b], "#999999", "wall", "");
        }
    }
    for (i, l) in lines.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let verts = l.vertices(frame, d, &(&v.r * Q::from_integer(4.into())));
        polyline(&mut out, &v, &verts, color, "broken-line", &format!("{:?}", l.coeff));
        for b in &l.bends {
            let (x, y) = v.px(&b.point);
            let _ = writeln!(out, "<circle class=\"bend\" cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{color}\"/>");
            let _ = writeln!(
                out,
                "<text x=\"{x}\" y=\"{y}\" font-size=\"10\" dx=\"4\" dy=\"-4\">+{}</text>",
                b.after.sub(&b.before)
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Vertex of a subtree: where its children's supports meet.
fn vertex(d: &Diagram, t: &Tree) -> Result<Option<Vec<Q>>> {
    let Tree::Node(a, b) = t else { return Ok(None) };
    let (Some(pa), Some(pb)) = (a.support(d)?, b.support(d)?) else { return Ok(None) };
    Ok(match intersect_supports(&pa, &pb) {
        Intersection::Point(x) => Some(x),
        _ => None,
    })
}

fn tree_edges(d: &Diagram, t: &Tree, parent: &[Q], out: &mut Vec<(Vec<Q>, Vec<Q>)>) -> Result<()> {
    if let Tree::Node(a, b) = t {
        let x = vertex(d, t)?.ok_or_else(|| Error::Precondition("tree has no realization".into()))?;
        out.push((x.clone(), parent.to_vec()));
        tree_edges(d, a, &x, out)?;
        tree_edges(d, b, &x, out)?;
    }
    Ok(())
}

/// The leaf walls in grey and the tropical disk of `t` in color; the
/// outgoing edge follows the tree's support.
pub fn render_tree(d: &Diagram, t: &Tree) -> Result<String> {
    let sup = r2_supports(d)?;
    let root = t.support(d)?.ok_or_else(|| Error::Precondition("tree has empty support".into()))?;
    let v = View::fit(std::slice::from_ref(&root.base));
    let mut out = String::new();
    header(&mut out, &crate::trees::describe_tree(t));
    axes(&mut out, &v);
    for (w, _) in t.leaves() {
        if let Some((a, b)) = v.clip(sup[w]) {
            polyline(&mut out, &v, &[a, b], "#999999", "wall", &format!("w{w}"));
        }
    }
    if let Some((a, b)) = v.clip(&root) {
        polyline(&mut out, &v, &[a, b], PALETTE[0], "tree-out", &format!("m={}", t.m(d)));
    }
    if let Tree::Node(a, b) = t {
        let x = root.base.clone();
        let mut edges = Vec::new();
        tree_edges(d, a, &x, &mut edges)?;
        tree_edges(d, b, &x, &mut edges)?;
        for (p, q) in edges {
            polyline(&mut out, &v, &[p, q], PALETTE[1], "tree-edge", "");
        }
        let (cx, cy) = v.px(&x);
        let _ = writeln!(out, "<circle class=\"vertex\" cx=\"{cx}\" cy=\"{cy}\" r=\"3\" fill=\"black\"/>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::completion::{complete, standard_initial};
    use crate::diagram::Mode;
    use crate::lattice::LatVec;
    use crate::lie::LieAlgebra;
    use crate::rings::Ring;

    #[test]
    fn empty_diagram_has_axes_only() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let s = render_diagram(&Diagram::new(Mode::Tropical, &alg, 3)).unwrap();
        assert_eq!(s.matches("class=\"axis\"").count(), 2);
        assert_eq!(s.matches("<polyline").count(), 0);
    }

    #[test]
    fn one_polyline_per_wall_and_deterministic() {
        let alg = LieAlgebra::classical(2, Ring::free());
        let d = standard_initial(&alg, 4, &[LatVec::new(&[1, 0]), LatVec::new(&[0, 1])]).unwrap();
        let c = complete(&d, 4).unwrap();
        let s = render_diagram(&c).unwrap();
        assert_eq!(s.matches("class=\"wall\"").count(), c.walls.len());
        assert_eq!(s, render_diagram(&c).unwrap());
    }
}
