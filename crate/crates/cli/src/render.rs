//! SVG sections of the two fans a finite rank-2/3 group carries: the fan of
//! chambers wC, and the fan of tiles (1-w)C inside the dual cone. Rank-2
//! groups render directly in the plane; rank-3 groups are sliced by an
//! affine plane (default: coordinate sum = 1) and drawn in an orthonormal
//! chart of that plane. Full-dimensional tiles become polygons, tiles one
//! dimension down become segments, deeper ones become point markers.

use chamberfold_core::enumerate::rank_one_minus;
use chamberfold_core::error::Error;
use chamberfold_core::group::{Geometry, ReflectionGroup};
use chamberfold_core::linalg::{inverse, Matrix};

use crate::report::display_word;
use crate::CliError;

const CANVAS: f64 = 640.0;
const AREA_FLOOR: f64 = 1e-9;
const RAY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    DualConeFan,
    ChamberFan,
}

impl Region {
    pub fn parse(token: &str) -> Result<Region, CliError> {
        match token {
            "dual-cone-fan" => Ok(Region::DualConeFan),
            "chamber-fan" => Ok(Region::ChamberFan),
            other => Err(CliError::Malformed(format!(
                "unknown region '{other}' (expected dual-cone-fan or chamber-fan)"
            ))),
        }
    }

    fn id(&self) -> &'static str {
        match self {
            Region::DualConeFan => "dual-cone-fan",
            Region::ChamberFan => "chamber-fan",
        }
    }
}

pub struct RenderOptions {
    pub region: Region,
    /// Slice plane `coeffs . x = level` for rank-3 groups.
    pub plane: Option<(Vec<f64>, f64)>,
    /// minx, miny, maxx, maxy in chart coordinates.
    pub viewport: Option<[f64; 4]>,
    pub labels: bool,
}

pub fn parse_plane(text: &str) -> Result<(Vec<f64>, f64), CliError> {
    let bad = || CliError::Malformed(format!("cannot parse plane '{text}' (expected a,b,c=level)"));
    let (lhs, rhs) = text.split_once('=').ok_or_else(bad)?;
    let coeffs: Result<Vec<f64>, _> = lhs.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let coeffs = coeffs.map_err(|_| bad())?;
    let level: f64 = rhs.trim().parse().map_err(|_| bad())?;
    if coeffs.iter().all(|c| c.abs() < RAY_TOL) {
        return Err(CliError::Malformed("plane normal must be nonzero".into()));
    }
    Ok((coeffs, level))
}

pub fn parse_viewport(text: &str) -> Result<[f64; 4], CliError> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|p| p.trim().parse::<f64>()).collect();
    let parts = parts
        .map_err(|_| CliError::Malformed(format!("cannot parse viewport '{text}'")))?;
    if parts.len() != 4 || parts[0] >= parts[2] || parts[1] >= parts[3] {
        return Err(CliError::Malformed(
            "viewport must be minx,miny,maxx,maxy with positive extent".into(),
        ));
    }
    Ok([parts[0], parts[1], parts[2], parts[3]])
}

/// Chart of the section: model(s, t) = origin + s u1 + t u2.
struct Chart {
    origin: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    rank: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn chart_for(group: &ReflectionGroup, plane: &Option<(Vec<f64>, f64)>) -> Result<Chart, CliError> {
    let d = group.dim();
    match d {
        2 => {
            if plane.is_some() {
                return Err(CliError::Malformed(
                    "plane slicing applies to rank-3 groups; rank 2 renders directly".into(),
                ));
            }
            Ok(Chart {
                origin: vec![0.0, 0.0],
                u1: vec![1.0, 0.0],
                u2: vec![0.0, 1.0],
                rank: 2,
            })
        }
        3 => match plane {
            None => Ok(Chart {
                origin: vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
                u1: vec![1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0],
                u2: vec![1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()],
                rank: 3,
            }),
            Some((f, level)) => {
                if f.len() != 3 {
                    return Err(CliError::Malformed("plane normal needs 3 coordinates".into()));
                }
                let nn = dot(f, f);
                let origin: Vec<f64> = f.iter().map(|c| c * level / nn).collect();
                // Axis least aligned with the normal seeds the first chart
                // direction.
                let k = (0..3).min_by(|&a, &b| f[a].abs().total_cmp(&f[b].abs())).unwrap();
                let mut u1 = vec![0.0; 3];
                u1[k] = 1.0;
                let proj = f[k] / nn;
                for i in 0..3 {
                    u1[i] -= proj * f[i];
                }
                let n1 = dot(&u1, &u1).sqrt();
                let u1: Vec<f64> = u1.iter().map(|c| c / n1).collect();
                let cross = vec![
                    f[1] * u1[2] - f[2] * u1[1],
                    f[2] * u1[0] - f[0] * u1[2],
                    f[0] * u1[1] - f[1] * u1[0],
                ];
                let n2 = dot(&cross, &cross).sqrt();
                let u2: Vec<f64> = cross.iter().map(|c| c / n2).collect();
                Ok(Chart { origin, u1, u2, rank: 3 })
            }
        },
        other => Err(CliError::Malformed(format!(
            "section rendering supports rank 2 and 3; this group has rank {other}"
        ))),
    }
}

fn matrix_rows_f64(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m.get(i, j).to_f64()).collect())
        .collect()
}

/// Clips a convex polygon against a . p >= b (chart coordinates).
fn clip_halfplane(poly: &[(f64, f64)], a: (f64, f64), b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    let side = |p: (f64, f64)| a.0 * p.0 + a.1 * p.1 - b;
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        let sp = side(p);
        let sq = side(q);
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let t = sp / (sp - sq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
    out
}

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let mut twice = 0.0;
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        twice += p.0 * q.1 - p.1 * q.0;
    }
    twice.abs() / 2.0
}

fn centroid(poly: &[(f64, f64)]) -> (f64, f64) {
    let n = poly.len() as f64;
    let (sx, sy) = poly.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    (sx / n, sy / n)
}

/// Section of the cone cut out by `rows . x >= 0`, as a chart polygon
/// clipped to the viewport.
fn cone_section(
    rows: &[Vec<f64>],
    chart: &Chart,
    viewport: [f64; 4],
) -> Vec<(f64, f64)> {
    let [minx, miny, maxx, maxy] = viewport;
    let mut poly = vec![(minx, miny), (maxx, miny), (maxx, maxy), (minx, maxy)];
    for row in rows {
        let a = (dot(row, &chart.u1), dot(row, &chart.u2));
        let b = -dot(row, &chart.origin);
        poly = clip_halfplane(&poly, a, b);
        if poly.len() < 3 {
            return Vec::new();
        }
    }
    if polygon_area(&poly) < AREA_FLOOR {
        return Vec::new();
    }
    poly
}

/// Chart images of the cone generators: where each ray `t r` (t > 0) meets
/// the section plane.
fn ray_crossings(rays: &[Vec<f64>], chart: &Chart, plane_level_dot: impl Fn(&[f64]) -> f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for r in rays {
        if r.iter().all(|c| c.abs() < RAY_TOL) {
            continue;
        }
        let denom = plane_level_dot(r);
        if denom <= RAY_TOL {
            continue;
        }
        let q: Vec<f64> = r.iter().map(|c| c / denom).collect();
        let rel: Vec<f64> = q.iter().zip(&chart.origin).map(|(a, b)| a - b).collect();
        out.push((dot(&rel, &chart.u1), dot(&rel, &chart.u2)));
    }
    out
}

/// Clips the segment p-q to the viewport box; None when fully outside.
fn clip_segment(
    mut p: (f64, f64),
    mut q: (f64, f64),
    viewport: [f64; 4],
) -> Option<((f64, f64), (f64, f64))> {
    let [minx, miny, maxx, maxy] = viewport;
    let halfplanes = [
        ((1.0, 0.0), minx),
        ((-1.0, 0.0), -maxx),
        ((0.0, 1.0), miny),
        ((0.0, -1.0), -maxy),
    ];
    for (a, b) in halfplanes {
        let sp = a.0 * p.0 + a.1 * p.1 - b;
        let sq = a.0 * q.0 + a.1 * q.1 - b;
        if sp < 0.0 && sq < 0.0 {
            return None;
        }
        if sp < 0.0 || sq < 0.0 {
            let t = sp / (sp - sq);
            let cut = (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1));
            if sp < 0.0 {
                p = cut;
            } else {
                q = cut;
            }
        }
    }
    Some((p, q))
}

struct Drawn {
    word: String,
    shape: Shape,
}

enum Shape {
    Polygon(Vec<(f64, f64)>),
    Segment((f64, f64), (f64, f64)),
    Marker((f64, f64)),
}

pub fn render_section(group: &ReflectionGroup, opts: &RenderOptions) -> Result<String, CliError> {
    if group.geometry != Geometry::Spherical {
        return Err(CliError::Malformed(
            "section rendering applies to finite (spherical) groups".into(),
        ));
    }
    let chart = chart_for(group, &opts.plane)?;
    let viewport = opts.viewport.unwrap_or(match chart.rank {
        2 => [-2.0, -2.0, 2.0, 2.0],
        _ => [-1.2, -1.2, 1.2, 1.2],
    });
    let d = group.dim();
    let id = Matrix::identity(group.backend(), d);
    let gram = group.space.gram();
    let elements = group.elements().map_err(CliError::Core)?;

    // Plane membership functional for ray crossings: rank 2 keeps every ray
    // (denominator 1 at unit parameter is meaningless there, so use a
    // direction-preserving identity), rank 3 uses the slice plane.
    let plane = match (&opts.plane, chart.rank) {
        (_, 2) => None,
        (Some((f, level)), _) => Some((f.clone(), *level)),
        (None, _) => Some((vec![1.0, 1.0, 1.0], 1.0)),
    };

    let mut drawn: Vec<Drawn> = Vec::new();
    for w in elements {
        let word = display_word(group, w.word.as_deref().unwrap_or(&[]))
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let (rank, rows_exact): (usize, Option<Matrix>) = match opts.region {
            Region::ChamberFan => (d, Some(gram.mul_mat(&w.inverse().linear))),
            Region::DualConeFan => {
                let r = rank_one_minus(w);
                if r == d {
                    let t = id.sub(&w.linear);
                    let t_inv = inverse(&t).expect("regular tiles invert");
                    (d, Some(gram.mul_mat(&t_inv)))
                } else {
                    (r, None)
                }
            }
        };
        if let Some(rows) = rows_exact {
            let rows = matrix_rows_f64(&rows);
            let poly = cone_section(&rows, &chart, viewport);
            if !poly.is_empty() {
                drawn.push(Drawn { word, shape: Shape::Polygon(poly) });
            }
            continue;
        }
        // Lower-dimensional tile: generated by the images of the chamber's
        // extreme rays under (1 - w).
        let t = id.sub(&w.linear);
        let rays: Vec<Vec<f64>> = group
            .coweights
            .iter()
            .map(|pi| {
                let img = t.mul_vec(pi);
                (0..d).map(|i| img.get(i).to_f64()).collect()
            })
            .collect();
        let points: Vec<(f64, f64)> = match &plane {
            None => {
                // Rank 2: rays drawn from the origin out to the viewport.
                let reach = (viewport[2] - viewport[0]) + (viewport[3] - viewport[1]);
                rays.iter()
                    .filter(|r| r.iter().any(|c| c.abs() > RAY_TOL))
                    .map(|r| {
                        let n = dot(r, r).sqrt();
                        (r[0] / n * reach, r[1] / n * reach)
                    })
                    .collect()
            }
            Some((f, level)) => ray_crossings(&rays, &chart, |r| dot(f, r) / level),
        };
        match rank {
            0 => {
                // The zero tile only appears in a rank-2 direct view, where
                // the chart origin is the model origin.
                if chart.rank == 2 {
                    drawn.push(Drawn { word, shape: Shape::Marker((0.0, 0.0)) });
                }
            }
            _ => {
                let mut dedup: Vec<(f64, f64)> = Vec::new();
                for p in points {
                    if dedup
                        .iter()
                        .all(|q| (q.0 - p.0).abs() > RAY_TOL || (q.1 - p.1).abs() > RAY_TOL)
                    {
                        dedup.push(p);
                    }
                }
                match dedup.len() {
                    0 => {}
                    1 => {
                        if chart.rank == 2 {
                            if let Some((p, q)) = clip_segment((0.0, 0.0), dedup[0], viewport) {
                                drawn.push(Drawn { word, shape: Shape::Segment(p, q) });
                            }
                        } else {
                            let m = dedup[0];
                            if m.0 >= viewport[0]
                                && m.0 <= viewport[2]
                                && m.1 >= viewport[1]
                                && m.1 <= viewport[3]
                            {
                                drawn.push(Drawn { word, shape: Shape::Marker(m) });
                            }
                        }
                    }
                    _ => {
                        // Collinear crossings: join the two extremes.
                        let far = dedup
                            .iter()
                            .flat_map(|a| dedup.iter().map(move |b| (*a, *b)))
                            .max_by(|(a1, b1), (a2, b2)| {
                                let d1 = (a1.0 - b1.0).powi(2) + (a1.1 - b1.1).powi(2);
                                let d2 = (a2.0 - b2.0).powi(2) + (a2.1 - b2.1).powi(2);
                                d1.total_cmp(&d2)
                            })
                            .unwrap();
                        if let Some((p, q)) = clip_segment(far.0, far.1, viewport) {
                            drawn.push(Drawn { word, shape: Shape::Segment(p, q) });
                        }
                    }
                }
            }
        }
    }

    if !drawn.iter().any(|s| matches!(s.shape, Shape::Polygon(_))) {
        return Err(CliError::Core(Error::InvalidSpec(
            "the section plane misses the rendered fan; adjust --plane/--viewport".into(),
        )));
    }
    Ok(emit_svg(group, opts, &chart, viewport, &drawn))
}

fn emit_svg(
    group: &ReflectionGroup,
    opts: &RenderOptions,
    chart: &Chart,
    viewport: [f64; 4],
    drawn: &[Drawn],
) -> String {
    let [minx, miny, maxx, maxy] = viewport;
    let scale = (CANVAS / (maxx - minx)).min(CANVAS / (maxy - miny));
    let width = scale * (maxx - minx);
    let height = scale * (maxy - miny);
    let ox = -minx * scale;
    let oy = maxy * scale;
    let px = |p: (f64, f64)| (ox + scale * p.0, oy - scale * p.1);
    let fmt = |v: f64| format!("{v:.6}");
    let fmt_list = |v: &[f64]| v.iter().map(|c| fmt(*c)).collect::<Vec<_>>().join(",");

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" data-group=\"{name}\" data-region=\"{region}\" \
         data-rank=\"{rank}\" data-scale=\"{scale}\" data-ox=\"{ox}\" data-oy=\"{oy}\" \
         data-viewport=\"{vp}\" data-chart-origin=\"{co}\" data-chart-u1=\"{c1}\" \
         data-chart-u2=\"{c2}\">\n",
        w = fmt(width),
        h = fmt(height),
        name = group.name,
        region = opts.region.id(),
        rank = chart.rank,
        scale = fmt(scale),
        ox = fmt(ox),
        oy = fmt(oy),
        vp = fmt_list(&viewport),
        co = fmt_list(&chart.origin),
        c1 = fmt_list(&chart.u1),
        c2 = fmt_list(&chart.u2),
    ));
    svg.push_str(&format!(
        "<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        fmt(width),
        fmt(height)
    ));
    svg.push_str(&format!("<g id=\"{}\">\n", opts.region.id()));
    let polygon_total = drawn.iter().filter(|d| matches!(d.shape, Shape::Polygon(_))).count();
    let mut polygon_index = 0usize;
    for item in drawn {
        match &item.shape {
            Shape::Polygon(poly) => {
                let hue = 360.0 * polygon_index as f64 / polygon_total.max(1) as f64;
                polygon_index += 1;
                let points = poly
                    .iter()
                    .map(|&p| {
                        let (x, y) = px(p);
                        format!("{},{}", fmt(x), fmt(y))
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                svg.push_str(&format!(
                    "<polygon points=\"{points}\" fill=\"hsl({hue:.1},55%,74%)\" \
                     stroke=\"#2b2b2b\" stroke-width=\"1\" data-word=\"{}\"/>\n",
                    item.word
                ));
            }
            Shape::Segment(p, q) => {
                let (x1, y1) = px(*p);
                let (x2, y2) = px(*q);
                svg.push_str(&format!(
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2b2b2b\" \
                     stroke-width=\"2\" data-word=\"{}\"/>\n",
                    fmt(x1),
                    fmt(y1),
                    fmt(x2),
                    fmt(y2),
                    item.word
                ));
            }
            Shape::Marker(m) => {
                let (x, y) = px(*m);
                svg.push_str(&format!(
                    "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#2b2b2b\" data-word=\"{}\"/>\n",
                    fmt(x),
                    fmt(y),
                    item.word
                ));
            }
        }
    }
    svg.push_str("</g>\n");
    if opts.labels {
        svg.push_str("<g id=\"labels\" font-family=\"monospace\" font-size=\"13\" fill=\"#111111\">\n");
        for item in drawn {
            let anchor = match &item.shape {
                Shape::Polygon(poly) => centroid(poly),
                Shape::Segment(p, q) => ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0),
                Shape::Marker(m) => (m.0, m.1 + 0.04 * (viewport[3] - viewport[1])),
            };
            let (x, y) = px(anchor);
            let text = if item.word.is_empty() { "e".to_string() } else { item.word.clone() };
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{text}</text>\n",
                fmt(x),
                fmt(y)
            ));
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}
