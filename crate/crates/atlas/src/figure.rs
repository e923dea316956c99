//! SVG rendering of the half cross-section.

use std::fmt::Write as _;

use ortho3r::workspace::Analysis;
use ortho3r::SectionPoint;
use xmlwriter::{Options, XmlWriter};

pub const FOUR_IKS: &str = "#404040";
pub const TWO_IKS: &str = "#C0C0C0";
pub const CURVE: &str = "#1F4FD8";
pub const NODE: &str = "#D81F1F";
pub const CUSP: &str = "#1FA83A";
const WIDTH_PX: f64 = 480.0;

/// Fixed three-decimal formatting without trailing zeros.
pub fn num(x: f64) -> String {
    let s = format!("{:.3}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn svg_root(w: &mut XmlWriter, view: [f64; 4], width_px: f64) {
    w.start_element("svg");
    w.write_attribute("xmlns", "http://www.w3.org/2000/svg");
    w.write_attribute("version", "1.1");
    w.write_attribute_fmt(
        "viewBox",
        format_args!(
            "{} {} {} {}",
            num(view[0]),
            num(view[1]),
            num(view[2]),
            num(view[3])
        ),
    );
    w.write_attribute("width", &num(width_px));
    w.write_attribute("height", &num(width_px * view[3] / view[2]));
}

pub fn text(w: &mut XmlWriter, x: f64, y: f64, size: f64, anchor: &str, body: &str) {
    w.start_element("text");
    w.write_attribute("x", &num(x));
    w.write_attribute("y", &num(y));
    w.write_attribute("font-size", &num(size));
    w.write_attribute("font-family", "sans-serif");
    w.write_attribute("text-anchor", anchor);
    w.set_preserve_whitespaces(true);
    w.write_text(body);
    w.end_element();
    w.set_preserve_whitespaces(false);
}

pub fn line(w: &mut XmlWriter, a: (f64, f64), b: (f64, f64)) {
    w.start_element("line");
    w.write_attribute("x1", &num(a.0));
    w.write_attribute("y1", &num(a.1));
    w.write_attribute("x2", &num(b.0));
    w.write_attribute("y2", &num(b.1));
    w.end_element();
}

/// Cross-section in cell units: column `c` spans `[c, c + 1]`, and `z`
/// grows upwards from the bottom row.
pub fn cross_section(a: &Analysis) -> String {
    let g = a.grid;
    let (rows, cols) = (g.rows(), g.cols());
    let (nf, rf) = (cols as f64, rows as f64);
    let h = g.cell();
    let to_view = |s: &SectionPoint| (s.rho / h, (g.rmax - s.z) / h);
    let unit = nf / 256.0;
    let (left, bottom, pad) = (nf * 0.12, nf * 0.16, nf * 0.06);

    let mut w = XmlWriter::new(Options::default());
    svg_root(
        &mut w,
        [-left, -pad, nf + left + pad, rf + pad + bottom],
        WIDTH_PX,
    );

    w.start_element("rect");
    w.write_attribute("id", "background");
    w.write_attribute("x", "0");
    w.write_attribute("y", "0");
    w.write_attribute("width", &num(nf));
    w.write_attribute("height", &num(rf));
    w.write_attribute("fill", "#FFFFFF");
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "iks");
    w.write_attribute("shape-rendering", "crispEdges");
    for row in 0..rows {
        let y = rows - 1 - row;
        let mut col = 0;
        while col < cols {
            let shade = shade_of(a.field.get(row, col));
            let start = col;
            while col < cols && shade_of(a.field.get(row, col)) == shade {
                col += 1;
            }
            if let Some(fill) = shade {
                w.start_element("rect");
                w.write_attribute("x", &start);
                w.write_attribute("y", &y);
                w.write_attribute("width", &(col - start));
                w.write_attribute("height", "1");
                w.write_attribute("fill", fill);
                w.end_element();
            }
        }
    }
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "curves");
    w.write_attribute("fill", "none");
    w.write_attribute("stroke", CURVE);
    w.write_attribute("stroke-width", &num(1.5 * unit));
    w.write_attribute("stroke-linejoin", "round");
    for c in &a.curves {
        let mut pts = String::new();
        let closing = c.closed.then(|| c.points.first()).flatten();
        for p in c.points.iter().chain(closing) {
            let (x, y) = to_view(p);
            if !pts.is_empty() {
                pts.push(' ');
            }
            let _ = write!(pts, "{},{}", num(x), num(y));
        }
        w.start_element("polyline");
        w.write_attribute("id", &format!("curve-{}", c.id));
        w.write_attribute("points", &pts);
        w.end_element();
    }
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "nodes");
    w.write_attribute("fill", "none");
    w.write_attribute("stroke", NODE);
    w.write_attribute("stroke-width", &num(1.5 * unit));
    for n in &a.nodes.nodes {
        let (x, y) = to_view(&n.location);
        w.start_element("circle");
        w.write_attribute("cx", &num(x));
        w.write_attribute("cy", &num(y));
        w.write_attribute("r", &num(5.0 * unit));
        w.end_element();
    }
    w.end_element();

    w.start_element("g");
    w.write_attribute("id", "cusps");
    w.write_attribute("fill", CUSP);
    for c in &a.cusps {
        let (x, y) = to_view(&c.location);
        let r = 5.0 * unit;
        w.start_element("polygon");
        w.write_attribute_fmt(
            "points",
            format_args!(
                "{},{} {},{} {},{} {},{}",
                num(x),
                num(y - r),
                num(x + r),
                num(y),
                num(x),
                num(y + r),
                num(x - r),
                num(y)
            ),
        );
        w.end_element();
    }
    w.end_element();

    let font = 10.0 * unit;
    w.start_element("g");
    w.write_attribute("id", "axes");
    w.write_attribute("stroke", "#000000");
    w.write_attribute("stroke-width", &num(unit));
    line(&mut w, (0.0, 0.0), (0.0, rf));
    line(&mut w, (0.0, rf), (nf, rf));
    line(&mut w, (0.0, rf / 2.0), (nf, rf / 2.0));
    w.end_element();
    w.start_element("g");
    w.write_attribute("id", "labels");
    w.write_attribute("fill", "#000000");
    let r = super::report::sig(g.rmax);
    text(&mut w, nf, rf + 1.6 * font, font, "middle", &r.to_string());
    text(&mut w, 0.0, rf + 1.6 * font, font, "middle", "0");
    text(
        &mut w,
        -0.4 * font,
        font * 0.35,
        font,
        "end",
        &r.to_string(),
    );
    text(
        &mut w,
        -0.4 * font,
        rf / 2.0 + font * 0.35,
        font,
        "end",
        "0",
    );
    text(
        &mut w,
        -0.4 * font,
        rf + font * 0.35,
        font,
        "end",
        &(-r).to_string(),
    );
    text(&mut w, nf / 2.0, rf + 2.8 * font, 1.4 * font, "middle", "ρ");
    text(
        &mut w,
        -2.5 * font,
        rf / 2.0 - font,
        1.4 * font,
        "middle",
        "z",
    );
    w.end_element();

    let mut s = w.end_document();
    s.push('\n');
    s
}

fn shade_of(count: u8) -> Option<&'static str> {
    match count {
        0 => None,
        1 | 2 => Some(TWO_IKS),
        _ => Some(FOUR_IKS),
    }
}
