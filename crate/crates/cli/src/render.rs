//! SVG drawings of a suspension: the polygon between the two broken lines,
//! the zippered-rectangle presentation, and horizontal traces. Exact
//! coordinates are rendered as decimals for layout only; no geometric
//! decision is ever taken from the rendered values.

use num_traits::Signed;

use rauzy_core::geometry::{SeparatrixTrace, TraceOutcome, TraceStart};
use rauzy_core::iet::StepKind;
use rauzy_core::numeric::{decimal_approx, parse_decimal, Basis, Rational, SymbolicReal};
use rauzy_core::suspension::{Surface, VertexId};

use crate::{classify, CliError, Phase};

/// Precision of rendered coordinates, in significant digits.
pub const LAYOUT_DIGITS: usize = 30;

const MARGIN: i64 = 20;

/// An evaluated point, for layout only.
type Coord = (Rational, Rational);
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderTarget {
    Polygon,
    Zippered,
    Trace,
}

#[derive(Debug, Clone)]
pub struct RenderSpec {
    pub target: RenderTarget,
    pub scale: Rational,
    pub vertex_labels: bool,
    pub symbol_labels: bool,
}

impl RenderSpec {
    pub fn new(target: RenderTarget, scale: Rational) -> Result<Self, CliError> {
        if !scale.is_positive() {
            return Err(CliError::Validation(format!(
                "scale must be positive, got {scale}"
            )));
        }
        Ok(RenderSpec {
            target,
            scale,
            vertex_labels: true,
            symbol_labels: true,
        })
    }
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn dec(r: &Rational) -> String {
    decimal_approx(r, LAYOUT_DIGITS)
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

struct Frame {
    min_x: Rational,
    max_y: Rational,
    scale: Rational,
    width: Rational,
    height: Rational,
}

impl Frame {
    fn fit(points: &[Coord], scale: &Rational) -> Frame {
        let mut xs = points.iter().map(|p| &p.0);
        let first = xs.next().expect("at least one point");
        let (mut min_x, mut max_x) = (first.clone(), first.clone());
        for x in xs {
            if x < &min_x {
                min_x = x.clone();
            }
            if x > &max_x {
                max_x = x.clone();
            }
        }
        let mut ys = points.iter().map(|p| &p.1);
        let first = ys.next().expect("at least one point");
        let (mut min_y, mut max_y) = (first.clone(), first.clone());
        for y in ys {
            if y < &min_y {
                min_y = y.clone();
            }
            if y > &max_y {
                max_y = y.clone();
            }
        }
        let margin = q(2 * MARGIN);
        Frame {
            width: (&max_x - &min_x) * scale + &margin,
            height: (&max_y - &min_y) * scale + &margin,
            min_x,
            max_y,
            scale: scale.clone(),
        }
    }

    fn x(&self, x: &Rational) -> Rational {
        q(MARGIN) + (x - &self.min_x) * &self.scale
    }

    /// SVG y grows downward, so the vertical axis is flipped.
    fn y(&self, y: &Rational) -> Rational {
        q(MARGIN) + (&self.max_y - y) * &self.scale
    }
}

fn ev(v: &SymbolicReal, basis: &Basis) -> Result<Rational, CliError> {
    v.eval_witness(basis).map_err(|e| classify(e, Phase::Run))
}

fn color(sym: usize) -> &'static str {
    PALETTE[sym % PALETTE.len()]
}

/// Straight pieces of a trace in polygon coordinates: from the start (or a
/// re-entry point) to the next side crossing (or the final event).
fn trace_segments(
    s: &Surface,
    trace: &SeparatrixTrace,
    polygon: &[Vec<Coord>; 2],
) -> Result<Vec<(Coord, Coord)>, CliError> {
    let basis = &s.basis;
    let vertex_point = |v: VertexId| -> Coord {
        match v {
            VertexId::Top(k) => polygon[0][k].clone(),
            VertexId::Bottom(k) => polygon[1][k].clone(),
        }
    };
    let start = match trace.start {
        TraceStart::Origin => (q(0), q(0)),
        TraceStart::Vertex(v) => vertex_point(v),
    };

    let mut segments = Vec::new();
    let mut travelled = q(0);
    let mut from = start;
    for c in &trace.crossings {
        let exit_x = c
            .exit_x
            .approx_decimal(basis, LAYOUT_DIGITS)
            .and_then(|text| parse_decimal(&text))
            .map_err(|e| classify(e, Phase::Run))?;
        let exit = (exit_x, ev(&c.exit_y, basis)?);
        travelled += &exit.0 - &from.0;
        let enter_x = c
            .enter_x
            .approx_decimal(basis, LAYOUT_DIGITS)
            .and_then(|text| parse_decimal(&text))
            .map_err(|e| classify(e, Phase::Run))?;
        let enter = (enter_x, ev(&c.enter_y, basis)?);
        segments.push((from, exit));
        from = enter;
    }
    match &trace.outcome {
        TraceOutcome::HitSingularity { vertex, .. } => {
            segments.push((from, vertex_point(*vertex)));
        }
        TraceOutcome::Survived => {
            let budget = ev(&trace.budget, basis)?;
            let rest = &budget - &travelled;
            let end = (&from.0 + &rest, from.1.clone());
            segments.push((from, end));
        }
    }
    Ok(segments)
}

pub fn render_svg(
    s: &Surface,
    spec: &RenderSpec,
    trace: Option<&SeparatrixTrace>,
) -> Result<String, CliError> {
    let basis = &s.basis;
    let d = s.d();
    let poly = s.polygon();
    let chain = |pts: &[rauzy_core::suspension::Point]| -> Result<Vec<Coord>, CliError> {
        pts.iter()
            .map(|p| Ok((ev(&p.x, basis)?, ev(&p.y, basis)?)))
            .collect()
    };
    let polygon = [chain(&poly.upper)?, chain(&poly.lower)?];

    let mut bbox: Vec<Coord> = polygon[0].iter().chain(&polygon[1]).cloned().collect();

    let heights;
    let rects: Vec<(usize, Rational, Rational, Rational)>; // (symbol, x, width, height)
    if spec.target == RenderTarget::Zippered {
        heights = s.heights().map_err(|e| classify(e, Phase::Run))?;
        // Left endpoints come back in top order; pair each with its symbol.
        let lefts = s.iet().left_endpoints(StepKind::Top);
        rects = (0..d)
            .map(|k| -> Result<_, CliError> {
                let a = s.perm.top_at(k).0;
                let x = ev(&lefts[k], basis)?;
                let w = ev(&s.lengths[a], basis)?;
                let h = ev(&heights[a], basis)?;
                Ok((a, x, w, h))
            })
            .collect::<Result<_, _>>()?;
        for (_, x, w, h) in &rects {
            bbox.push((x.clone(), q(0)));
            bbox.push((x + w, h.clone()));
        }
    } else {
        rects = Vec::new();
    }

    let segments = match (spec.target, trace) {
        (RenderTarget::Trace, None) => {
            return Err(CliError::Validation(
                "the trace target needs a trace to draw".into(),
            ))
        }
        (RenderTarget::Zippered, _) | (_, None) => Vec::new(),
        (_, Some(t)) => trace_segments(s, t, &polygon)?,
    };
    for (a, b) in &segments {
        bbox.push(a.clone());
        bbox.push(b.clone());
    }

    let frame = Frame::fit(&bbox, &spec.scale);
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = dec(&frame.width),
        h = dec(&frame.height),
    ));

    if spec.target == RenderTarget::Zippered {
        for (a, x, w, h) in &rects {
            let name = esc(s.alphabet.name(rauzy_core::iet::Symbol(*a)));
            out.push_str(&format!(
                "  <rect class=\"rect rect-{name}\" x=\"{rx}\" y=\"{ry}\" width=\"{rw}\" height=\"{rh}\" fill=\"none\" stroke=\"{col}\" stroke-width=\"1.5\"/>\n",
                rx = dec(&frame.x(x)),
                ry = dec(&frame.y(h)),
                rw = dec(&(w * &spec.scale)),
                rh = dec(&(h * &spec.scale)),
                col = color(*a),
            ));
            if spec.symbol_labels {
                let cx = frame.x(&(x + w / q(2)));
                let cy = frame.y(&(h / q(2)));
                out.push_str(&format!(
                    "  <text class=\"rect-label\" x=\"{cx}\" y=\"{cy}\" text-anchor=\"middle\">{name}</text>\n",
                    cx = dec(&cx),
                    cy = dec(&cy),
                ));
            }
        }
    } else {
        // Sides, one per copy; the two copies of a symbol share a color.
        for (copy, pts, order) in [
            ("top", &polygon[0], s.perm.top()),
            ("bottom", &polygon[1], s.perm.bottom()),
        ] {
            for k in 0..d {
                let sym = order[k];
                let name = esc(s.alphabet.name(sym));
                let (a, b) = (&pts[k], &pts[k + 1]);
                out.push_str(&format!(
                    "  <line class=\"side {copy} side-{name}\" x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"{col}\" stroke-width=\"1.5\"/>\n",
                    x1 = dec(&frame.x(&a.0)),
                    y1 = dec(&frame.y(&a.1)),
                    x2 = dec(&frame.x(&b.0)),
                    y2 = dec(&frame.y(&b.1)),
                    col = color(sym.0),
                ));
                if spec.symbol_labels {
                    let mx = frame.x(&((&a.0 + &b.0) / q(2)));
                    let my = frame.y(&((&a.1 + &b.1) / q(2)));
                    let my = if copy == "top" { my - q(6) } else { my + q(14) };
                    out.push_str(&format!(
                        "  <text class=\"side-label {copy}\" x=\"{mx}\" y=\"{my}\" text-anchor=\"middle\">{name}</text>\n",
                        mx = dec(&mx),
                        my = dec(&my),
                    ));
                }
            }
        }
        // Distinct vertices only: the shared origin and closing points are
        // drawn once, from the upper chain.
        let mut vertices: Vec<(String, &Coord, bool)> = Vec::new();
        for (k, p) in polygon[0].iter().enumerate() {
            vertices.push((format!("a{k}"), p, true));
        }
        for (k, p) in polygon[1].iter().enumerate().take(d).skip(1) {
            vertices.push((format!("b{k}"), p, false));
        }
        for (label, p, upper) in &vertices {
            out.push_str(&format!(
                "  <circle class=\"vertex\" cx=\"{cx}\" cy=\"{cy}\" r=\"3\"/>\n",
                cx = dec(&frame.x(&p.0)),
                cy = dec(&frame.y(&p.1)),
            ));
            if spec.vertex_labels {
                let lx = frame.x(&p.0) + q(5);
                let ly = frame.y(&p.1) + if *upper { q(-5) } else { q(12) };
                out.push_str(&format!(
                    "  <text class=\"vertex-label\" x=\"{lx}\" y=\"{ly}\">{label}</text>\n",
                    lx = dec(&lx),
                    ly = dec(&ly),
                ));
            }
        }
    }

    for (a, b) in &segments {
        out.push_str(&format!(
            "  <polyline class=\"trace\" points=\"{x1},{y1} {x2},{y2}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"2,4\"/>\n",
            x1 = dec(&frame.x(&a.0)),
            y1 = dec(&frame.y(&a.1)),
            x2 = dec(&frame.x(&b.0)),
            y2 = dec(&frame.y(&b.1)),
        ));
    }

    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rauzy_core::numeric::parse_rational;
    use rauzy_core::samples;
    use rauzy_core::trace_horizontal;

    fn spec(target: RenderTarget) -> RenderSpec {
        RenderSpec::new(target, parse_rational("40").unwrap()).unwrap()
    }

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn elements_are_single_tags_on_single_lines() {
        let s = samples::reversed4_sqrt2_last();
        let svg = render_svg(&s, &spec(RenderTarget::Polygon), None).unwrap();
        assert!(svg.starts_with("<?xml version=\"1.0\""));
        assert!(svg.ends_with("</svg>\n"));
        for line in svg.lines().skip(2) {
            if line == "</svg>" {
                continue;
            }
            let t = line.trim();
            assert!(t.starts_with('<'), "{line}");
            assert!(t.ends_with("/>") || t.ends_with("</text>"), "{line}");
        }
    }

    #[test]
    fn swap_polygon_draws_each_side_once_and_shares_the_closure_point() {
        let s = samples::torus_sheared();
        let svg = render_svg(&s, &spec(RenderTarget::Polygon), None).unwrap();
        assert_eq!(count(&svg, "<line "), 4);
        // a0, a1, a2, b1: the two shared endpoints appear once each.
        assert_eq!(count(&svg, "<circle "), 4);
        assert_eq!(count(&svg, ">A</text>"), 2);
        assert_eq!(count(&svg, ">B</text>"), 2);
        let matching = count(&svg, &format!("stroke=\"{}\"", color(0)));
        assert_eq!(matching, 2, "identified sides share a style");
    }

    #[test]
    fn zippered_swap_gives_two_unit_height_rectangles() {
        let s = samples::torus_sheared();
        let svg = render_svg(&s, &spec(RenderTarget::Zippered), None).unwrap();
        assert_eq!(count(&svg, "<rect "), 2);
        // h = (1, 1) at scale 40.
        assert_eq!(count(&svg, "height=\"40\""), 2);
        assert_eq!(count(&svg, "width=\"80\""), 1);
        assert_eq!(count(&svg, "width=\"40\""), 1);
        assert_eq!(count(&svg, "<line "), 0);
    }

    #[test]
    fn connection_renders_as_one_dotted_segment_of_scaled_length() {
        let s = samples::reversed4_sqrt2_first();
        let budget = SymbolicReal::from_rational(parse_rational("3").unwrap());
        let t = trace_horizontal(&s, TraceStart::Vertex(VertexId::Top(1)), &budget).unwrap();
        let svg = render_svg(&s, &spec(RenderTarget::Trace), Some(&t)).unwrap();
        let line = svg
            .lines()
            .find(|l| l.contains("class=\"trace\""))
            .expect("dotted trace element");
        assert!(line.contains("stroke-dasharray"));
        let points = line.split("points=\"").nth(1).unwrap();
        let points = points.split('"').next().unwrap();
        let mut pairs = points.split(' ');
        let (x1, y1) = pairs.next().unwrap().split_once(',').unwrap();
        let (x2, y2) = pairs.next().unwrap().split_once(',').unwrap();
        assert_eq!(y1, y2, "the connection is horizontal");
        let dx = parse_decimal(x2).unwrap() - parse_decimal(x1).unwrap();
        // Length exactly 2, at scale 40.
        assert_eq!(dx, parse_rational("80").unwrap());
        assert_eq!(count(&svg, "class=\"trace\""), 1);
    }

    #[test]
    fn surviving_trace_draws_every_piece() {
        let s = samples::reversed3_horizontal_side();
        let budget = SymbolicReal::from_rational(parse_rational("10").unwrap());
        let t = trace_horizontal(&s, TraceStart::Origin, &budget).unwrap();
        assert_eq!(t.crossings.len(), 4);
        let svg = render_svg(&s, &spec(RenderTarget::Trace), Some(&t)).unwrap();
        // One piece per crossing plus the final budget-limited piece.
        assert_eq!(count(&svg, "class=\"trace\""), 5);
    }

    #[test]
    fn nonpositive_scales_are_rejected() {
        let err = RenderSpec::new(RenderTarget::Polygon, parse_rational("0").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err =
            RenderSpec::new(RenderTarget::Polygon, parse_rational("-1/2").unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
