//! SVG drawings of base diagrams.
//!
//! Each boundary edge other than a branch cut is one solid `<path>`; each
//! node gets two dashed cut segments and a cross. Coordinates are written
//! as decimals with at most 12 fractional digits, and every element also
//! carries its exact rational coordinates in `data-exact`.

use crate::affine::Point;
use crate::diagram::{BaseDiagram, EdgeMark};
use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderStyle {
    /// Pixels per lattice step.
    pub scale: Rat,
    pub padding: Rat,
    /// Stroke widths; heavy edges are drawn thick, collapsed ones thin.
    pub heavy_stroke: String,
    pub collapsed_stroke: String,
    pub cut_dash: String,
    /// `cross` or `plus`.
    pub node_glyph: String,
    /// Half the arm length of a node glyph, in pixels.
    pub glyph_size: Rat,
    pub edge_color: String,
    pub cut_color: String,
}

impl Default for RenderStyle {
    fn default() -> RenderStyle {
        RenderStyle {
            scale: Rat::int(40),
            padding: Rat::int(20),
            heavy_stroke: "3".into(),
            collapsed_stroke: "1".into(),
            cut_dash: "6 4".into(),
            node_glyph: "cross".into(),
            glyph_size: Rat::int(5),
            edge_color: "black".into(),
            cut_color: "crimson".into(),
        }
    }
}

fn style_err(key: &str, msg: &str) -> Error {
    Error::InvalidScenario(format!("style {key}: {msg}"))
}

impl RenderStyle {
    /// Applies one `KEY=VALUE` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| style_err(assignment, "expected KEY=VALUE"))?;
        let rat = |positive: bool| -> Result<Rat> {
            let v: Rat = value
                .parse()
                .map_err(|_| style_err(key, "expected a rational"))?;
            if v.is_negative() || (positive && v.is_zero()) {
                return Err(style_err(key, "value out of range"));
            }
            Ok(v)
        };
        // Only plain tokens may reach attribute values.
        let token = |extra: &[char]| -> Result<String> {
            let ok = !value.is_empty()
                && value.chars().all(|c| {
                    c.is_ascii_alphanumeric() || c == '#' || c == '.' || extra.contains(&c)
                });
            if !ok {
                return Err(style_err(key, "unsupported characters"));
            }
            Ok(value.to_string())
        };
        match key {
            "scale" => self.scale = rat(true)?,
            "padding" => self.padding = rat(false)?,
            "glyph_size" => self.glyph_size = rat(true)?,
            "heavy_stroke" => self.heavy_stroke = token(&[])?,
            "collapsed_stroke" => self.collapsed_stroke = token(&[])?,
            "cut_dash" => self.cut_dash = token(&[' ', ','])?,
            "edge_color" => self.edge_color = token(&[])?,
            "cut_color" => self.cut_color = token(&[])?,
            "node_glyph" => {
                if value != "cross" && value != "plus" {
                    return Err(style_err(key, "expected cross or plus"));
                }
                self.node_glyph = value.to_string();
            }
            _ => return Err(style_err(key, "unknown key")),
        }
        Ok(())
    }
}

struct Frame {
    min_x: Rat,
    max_y: Rat,
    scale: Rat,
    pad: Rat,
}

impl Frame {
    fn map(&self, p: &Point) -> (Rat, Rat) {
        (
            &self.pad + (&p.x - &self.min_x) * &self.scale,
            &self.pad + (&self.max_y - &p.y) * &self.scale,
        )
    }
}

fn dec(r: &Rat) -> String {
    r.to_decimal(12)
}

fn exact(points: &[&Point]) -> String {
    points
        .iter()
        .map(|p| format!("{} {}", p.x, p.y))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn render_svg(d: &BaseDiagram, style: &RenderStyle) -> Result<String> {
    if d.len() < 3 {
        return Err(Error::DegeneratePolygon);
    }
    let xs = d.vertices.iter().map(|p| p.x.clone());
    let ys = d.vertices.iter().map(|p| p.y.clone());
    let min_x = xs.clone().min().expect("non-empty");
    let max_x = xs.max().expect("non-empty");
    let min_y = ys.clone().min().expect("non-empty");
    let max_y = ys.max().expect("non-empty");
    if !style.scale.is_positive() {
        return Err(style_err("scale", "must be positive"));
    }
    let width = &style.padding * 2 + (&max_x - &min_x) * &style.scale;
    let height = &style.padding * 2 + (&max_y - &min_y) * &style.scale;
    let frame = Frame {
        min_x,
        max_y,
        scale: style.scale.clone(),
        pad: style.padding.clone(),
    };
    let (w, h) = (dec(&width), dec(&height));
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    for j in 0..d.len() {
        let mark = d.edge_marks[j];
        let stroke = match mark {
            EdgeMark::Branch => continue,
            EdgeMark::Heavy => &style.heavy_stroke,
            EdgeMark::Collapsed | EdgeMark::CutBoundary => &style.collapsed_stroke,
        };
        let (a, b) = d.edge(j);
        let (ax, ay) = frame.map(a);
        let (bx, by) = frame.map(b);
        out.push_str(&format!(
            "  <path class=\"edge {}\" d=\"M {} {} L {} {}\" stroke=\"{}\" stroke-width=\"{}\" fill=\"none\" data-exact=\"{}\"/>\n",
            mark.token(),
            dec(&ax),
            dec(&ay),
            dec(&bx),
            dec(&by),
            style.edge_color,
            stroke,
            exact(&[a, b])
        ));
    }
    for node in &d.nodes {
        let (nx, ny) = frame.map(&node.position);
        for t in [node.cut_targets.0, node.cut_targets.1] {
            let Some(target) = d.vertices.get(t) else {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    len: d.len(),
                });
            };
            let (tx, ty) = frame.map(target);
            out.push_str(&format!(
                "  <path class=\"cut\" d=\"M {} {} L {} {}\" stroke=\"{}\" stroke-width=\"{}\" stroke-dasharray=\"{}\" fill=\"none\" data-exact=\"{}\"/>\n",
                dec(&nx),
                dec(&ny),
                dec(&tx),
                dec(&ty),
                style.cut_color,
                style.collapsed_stroke,
                style.cut_dash,
                exact(&[&node.position, target])
            ));
        }
        let r = &style.glyph_size;
        let zero = Rat::zero();
        let neg = -r;
        // Two strokes through the node: diagonals for a cross, axes for a plus.
        let (a, b) = if style.node_glyph == "plus" {
            ((r, &zero), (&zero, r))
        } else {
            ((r, r), (r, &neg))
        };
        out.push_str(&format!(
            "  <path class=\"node {}\" d=\"M {} {} L {} {} M {} {} L {} {}\" stroke=\"{}\" stroke-width=\"{}\" fill=\"none\" data-exact=\"{}\"/>\n",
            style.node_glyph,
            dec(&(&nx - a.0)),
            dec(&(&ny - a.1)),
            dec(&(&nx + a.0)),
            dec(&(&ny + a.1)),
            dec(&(&nx - b.0)),
            dec(&(&ny - b.1)),
            dec(&(&nx + b.0)),
            dec(&(&ny + b.1)),
            style.cut_color,
            style.heavy_stroke,
            exact(&[&node.position])
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surgery::{atf_blowup, standard_triangle};

    #[test]
    fn blown_up_simplex_counts() {
        let d = BaseDiagram::simplex(Rat::int(3));
        let tri = standard_triangle(&d, 0, &Rat::one(), &Rat::one()).unwrap();
        let svg = render_svg(&atf_blowup(&d, &tri).unwrap(), &RenderStyle::default()).unwrap();
        assert_eq!(svg.matches("class=\"edge").count(), 4);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert_eq!(svg.matches("class=\"node").count(), 1);
    }

    #[test]
    fn style_overrides() {
        let mut s = RenderStyle::default();
        s.set("scale=3/2").unwrap();
        s.set("cut_color=#00ff00").unwrap();
        assert_eq!(s.scale, Rat::new(3, 2));
        assert!(s.set("scale=0").is_err());
        assert!(s.set("cut_color=\"/><script").is_err());
        assert!(s.set("bogus=1").is_err());
    }
}
