//! SVG rendering of the four result planes.
//!
//! Every cell of the chosen axis pair is drawn as an axis-aligned
//! rectangle spanning its two intervals. A cell degenerate on both axes
//! becomes a point marker, on one axis a segment. Plot coordinates map to
//! pixels through [`PlotTransform`]:
//!
//! ```text
//! px = M + (x + R) / (2R) · (W − 2M)
//! py = M + (R − y) / (2R) · (H − 2M)
//! ```
//!
//! with margin `M = 40` and half-range `R = 1.1` for correlation circles,
//! `R = 1.05 · max |endpoint|` over the plotted cells for principal
//! planes. Numbers are written with three decimals so output is
//! byte-for-byte reproducible.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::Interval;
use crate::io::results::ResultsDocument;
use crate::matrix::IntervalMatrix;

pub const MARGIN: f64 = 40.0;
pub const CIRCLE_RANGE: f64 = 1.1;
pub const PLANE_PADDING: f64 = 1.05;
const POINT_RADIUS: f64 = 3.0;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlotError {
    #[error("axis {axis} out of range, {available} available")]
    AxisOutOfRange { axis: usize, available: usize },
    #[error("the two plotted axes must differ")]
    SameAxes,
    #[error("unknown individual '{0}' in subset")]
    UnknownIndividual(String),
    #[error("{what}: {rows} rows for {labels} labels")]
    Shape { what: &'static str, rows: usize, labels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    TableCorrelations,
    VariableEvolution,
    AverageIndividuals,
    IndividualEvolution,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [
        PlotKind::TableCorrelations,
        PlotKind::VariableEvolution,
        PlotKind::AverageIndividuals,
        PlotKind::IndividualEvolution,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlotKind::TableCorrelations => "table-correlations",
            PlotKind::VariableEvolution => "variable-evolution",
            PlotKind::AverageIndividuals => "average-individuals",
            PlotKind::IndividualEvolution => "individual-evolution",
        }
    }

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::TableCorrelations => "fig-1a.svg",
            PlotKind::VariableEvolution => "fig-1b.svg",
            PlotKind::AverageIndividuals => "fig-1c.svg",
            PlotKind::IndividualEvolution => "fig-1d.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            PlotKind::TableCorrelations => "Table correlations",
            PlotKind::VariableEvolution => "Variable evolution",
            PlotKind::AverageIndividuals => "Average individuals",
            PlotKind::IndividualEvolution => "Individual evolution",
        }
    }
}

impl FromStr for PlotKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        PlotKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = PlotKind::ALL.iter().map(|k| k.name()).collect();
            format!("unknown plot '{s}', expected one of {}", names.join(", "))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    /// 0-based axis indices (x, y).
    pub axes: (usize, usize),
    /// Individuals to draw in the principal planes; all when empty.
    pub subset: Vec<String>,
    pub width: f64,
    pub height: f64,
    pub labels: bool,
    /// Interval widths up to this count as degenerate.
    pub degeneracy_tol: f64,
}

impl PlotSpec {
    pub fn new(kind: PlotKind) -> Self {
        PlotSpec {
            kind,
            axes: (0, 1),
            subset: Vec::new(),
            width: 640.0,
            height: 640.0,
            labels: true,
            degeneracy_tol: 0.0,
        }
    }

    fn check_axes(&self, available: usize) -> Result<(), PlotError> {
        let (a, b) = self.axes;
        if a == b {
            return Err(PlotError::SameAxes);
        }
        for axis in [a, b] {
            if axis >= available {
                return Err(PlotError::AxisOutOfRange { axis: axis + 1, available });
            }
        }
        Ok(())
    }
}

/// Parses a 1-based `a,b` axis pair into 0-based indices.
pub fn parse_axes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two axes like 1,2, got '{s}'"))?;
    let one = |t: &str| -> Result<usize, String> {
        match t.trim().parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v - 1),
            _ => Err(format!("axis '{}' must be a positive integer", t.trim())),
        }
    };
    Ok((one(a)?, one(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotTransform {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Half-range of the plotted square `[-R, R]²`.
    pub range: f64,
}

impl PlotTransform {
    pub fn circle(width: f64, height: f64) -> Self {
        PlotTransform { width, height, margin: MARGIN, range: CIRCLE_RANGE }
    }

    /// Half-range `1.05 · max |endpoint|`, or 1 when every endpoint is 0.
    pub fn plane(width: f64, height: f64, cells: &[(Interval, Interval)]) -> Self {
        let m = cells.iter().flat_map(|(a, b)| [a.lo(), a.hi(), b.lo(), b.hi()]).fold(0.0f64, |m, v| m.max(v.abs()));
        let range = if m > 0.0 { PLANE_PADDING * m } else { 1.0 };
        PlotTransform { width, height, margin: MARGIN, range }
    }

    pub fn px(&self, x: f64) -> f64 {
        self.margin + (x + self.range) / (2.0 * self.range) * (self.width - 2.0 * self.margin)
    }

    pub fn py(&self, y: f64) -> f64 {
        self.margin + (self.range - y) / (2.0 * self.range) * (self.height - 2.0 * self.margin)
    }
}

struct Cell {
    x: Interval,
    y: Interval,
    label: String,
    color: &'static str,
}

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

struct Svg {
    out: String,
    tr: PlotTransform,
}

impl Svg {
    fn begin(tr: PlotTransform, title: &str) -> Self {
        let mut out = String::new();
        let (w, h) = (tr.width, tr.height);
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.3}\" height=\"{h:.3}\" viewBox=\"0 0 {w:.3} {h:.3}\" font-family=\"sans-serif\" font-size=\"11\">"
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        let _ = writeln!(
            out,
            "<text class=\"title\" x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
            w / 2.0,
            MARGIN / 2.0,
            escape(title)
        );
        Svg { out, tr }
    }

    fn axes(&mut self, x_name: &str, y_name: &str) {
        let t = self.tr;
        let (x0, y0) = (t.px(0.0), t.py(0.0));
        let (l, r) = (t.px(-t.range), t.px(t.range));
        let (top, bottom) = (t.py(t.range), t.py(-t.range));
        let _ = writeln!(
            self.out,
            "<line class=\"axis\" x1=\"{l:.3}\" y1=\"{y0:.3}\" x2=\"{r:.3}\" y2=\"{y0:.3}\" stroke=\"#444\"/>"
        );
        let _ = writeln!(
            self.out,
            "<line class=\"axis\" x1=\"{x0:.3}\" y1=\"{top:.3}\" x2=\"{x0:.3}\" y2=\"{bottom:.3}\" stroke=\"#444\"/>"
        );
        let _ = writeln!(
            self.out,
            "<text class=\"axis-label\" x=\"{r:.3}\" y=\"{:.3}\" text-anchor=\"end\">{}</text>",
            y0 - 4.0,
            escape(x_name)
        );
        let _ = writeln!(
            self.out,
            "<text class=\"axis-label\" x=\"{:.3}\" y=\"{top:.3}\">{}</text>",
            x0 + 4.0,
            escape(y_name)
        );
    }

    fn unit_circle(&mut self) {
        let t = self.tr;
        let (cx, cy) = (t.px(0.0), t.py(0.0));
        let (rx, ry) = (t.px(1.0) - cx, cy - t.py(1.0));
        let _ = writeln!(self.out, "<ellipse class=\"unit-circle\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" rx=\"{rx:.3}\" ry=\"{ry:.3}\" fill=\"none\" stroke=\"#999\"/>");
    }

    fn cell(&mut self, c: &Cell, index: usize, tol: f64, labels: bool) {
        let t = self.tr;
        let label = escape(&c.label);
        let (x1, x2) = (t.px(c.x.lo()), t.px(c.x.hi()));
        let (y1, y2) = (t.py(c.y.hi()), t.py(c.y.lo()));
        let attrs = format!("data-label=\"{label}\" data-row=\"{index}\"");
        let col = c.color;
        match (c.x.is_degenerate(tol), c.y.is_degenerate(tol)) {
            (true, true) => {
                let _ = writeln!(
                    self.out,
                    "<circle class=\"cell point\" {attrs} cx=\"{:.3}\" cy=\"{:.3}\" r=\"{POINT_RADIUS:.3}\" fill=\"{col}\"/>",
                    t.px(c.x.midpoint()),
                    t.py(c.y.midpoint())
                );
            }
            (true, false) => {
                let x = t.px(c.x.midpoint());
                let _ = writeln!(self.out, "<line class=\"cell segment\" {attrs} x1=\"{x:.3}\" y1=\"{y1:.3}\" x2=\"{x:.3}\" y2=\"{y2:.3}\" stroke=\"{col}\" stroke-width=\"2\"/>");
            }
            (false, true) => {
                let y = t.py(c.y.midpoint());
                let _ = writeln!(self.out, "<line class=\"cell segment\" {attrs} x1=\"{x1:.3}\" y1=\"{y:.3}\" x2=\"{x2:.3}\" y2=\"{y:.3}\" stroke=\"{col}\" stroke-width=\"2\"/>");
            }
            (false, false) => {
                let _ = writeln!(
                    self.out,
                    "<rect class=\"cell\" {attrs} x=\"{x1:.3}\" y=\"{y1:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"{col}\" fill-opacity=\"0.2\" stroke=\"{col}\"/>",
                    x2 - x1,
                    y2 - y1
                );
            }
        }
        if labels {
            let _ = writeln!(
                self.out,
                "<text class=\"label\" x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\">{label}</text>",
                t.px(c.x.midpoint()),
                t.py(c.y.midpoint()) - POINT_RADIUS - 2.0
            );
        }
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str, label: &str) {
        let t = self.tr;
        let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.3},{:.3}", t.px(x), t.py(y))).collect();
        let _ = writeln!(
            self.out,
            "<polyline class=\"trajectory\" data-label=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{color}\"/>",
            escape(label),
            pts.join(" ")
        );
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn axis_title(spec: &PlotSpec) -> String {
    format!("{} (axes {}, {})", spec.kind.title(), spec.axes.0 + 1, spec.axes.1 + 1)
}

fn axis_names(spec: &PlotSpec) -> (String, String) {
    (format!("Axis {}", spec.axes.0 + 1), format!("Axis {}", spec.axes.1 + 1))
}

/// Unit circle plus one cell per row of `coords`.
pub fn render_correlation_circle(
    coords: &IntervalMatrix,
    labels: &[String],
    spec: &PlotSpec,
) -> Result<String, PlotError> {
    spec.check_axes(coords.n_cols())?;
    if labels.len() != coords.n_rows() {
        return Err(PlotError::Shape { what: "correlation circle", rows: coords.n_rows(), labels: labels.len() });
    }
    let (a, b) = spec.axes;
    let tr = PlotTransform::circle(spec.width, spec.height);
    let mut svg = Svg::begin(tr, &axis_title(spec));
    let (xn, yn) = axis_names(spec);
    svg.axes(&xn, &yn);
    svg.unit_circle();
    for (i, label) in labels.iter().enumerate() {
        let cell = Cell { x: coords[(i, a)], y: coords[(i, b)], label: label.clone(), color: color(i) };
        svg.cell(&cell, i, spec.degeneracy_tol, spec.labels);
    }
    Ok(svg.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlaneLayout {
    /// One row per individual.
    Individuals,
    /// Row `k·n + i` is individual `i` seen through table `k`.
    Evolution { tables: Vec<String> },
}

/// Principal plane with axes crossing at the origin.
pub fn render_principal_plane(
    coords: &IntervalMatrix,
    individuals: &[String],
    layout: &PlaneLayout,
    spec: &PlotSpec,
) -> Result<String, PlotError> {
    spec.check_axes(coords.n_cols())?;
    let n = individuals.len();
    let r = match layout {
        PlaneLayout::Individuals => 1,
        PlaneLayout::Evolution { tables } => tables.len(),
    };
    if coords.n_rows() != n * r {
        return Err(PlotError::Shape { what: "principal plane", rows: coords.n_rows(), labels: n * r });
    }
    let selected: Vec<usize> = if spec.subset.is_empty() {
        (0..n).collect()
    } else {
        spec.subset
            .iter()
            .map(|s| individuals.iter().position(|x| x == s).ok_or_else(|| PlotError::UnknownIndividual(s.clone())))
            .collect::<Result<_, _>>()?
    };

    let (a, b) = spec.axes;
    let mut cells: Vec<(usize, usize, Cell)> = Vec::new();
    for &i in &selected {
        for k in 0..r {
            let row = k * n + i;
            let label = match layout {
                PlaneLayout::Individuals => individuals[i].clone(),
                PlaneLayout::Evolution { tables } => format!("{} {}", individuals[i], tables[k]),
            };
            cells.push((row, i, Cell { x: coords[(row, a)], y: coords[(row, b)], label, color: color(i) }));
        }
    }
    let bounds: Vec<(Interval, Interval)> = cells.iter().map(|(_, _, c)| (c.x, c.y)).collect();
    let tr = PlotTransform::plane(spec.width, spec.height, &bounds);
    let mut svg = Svg::begin(tr, &axis_title(spec));
    let (xn, yn) = axis_names(spec);
    svg.axes(&xn, &yn);
    if r > 1 {
        for chunk in cells.chunks(r) {
            let pts: Vec<(f64, f64)> = chunk.iter().map(|(_, _, c)| (c.x.midpoint(), c.y.midpoint())).collect();
            let i = chunk[0].1;
            svg.polyline(&pts, color(i), &individuals[i]);
        }
    }
    for (row, _, cell) in &cells {
        svg.cell(cell, *row, spec.degeneracy_tol, spec.labels);
    }
    Ok(svg.finish())
}

/// Renders one of the four planes of a results document.
pub fn render(doc: &ResultsDocument, spec: &PlotSpec) -> Result<String, PlotError> {
    match spec.kind {
        PlotKind::TableCorrelations => render_correlation_circle(&doc.t, &doc.tables, spec),
        PlotKind::VariableEvolution => render_correlation_circle(&doc.ev, &doc.variable_labels(), spec),
        PlotKind::AverageIndividuals => {
            render_principal_plane(&doc.mi, &doc.individuals, &PlaneLayout::Individuals, spec)
        }
        PlotKind::IndividualEvolution => render_principal_plane(
            &doc.ei,
            &doc.individuals,
            &PlaneLayout::Evolution { tables: doc.tables.clone() },
            spec,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn transform_maps_corners() {
        let t = PlotTransform::circle(640.0, 480.0);
        assert_eq!(t.px(-1.1), 40.0);
        assert!((t.px(1.1) - 600.0).abs() < 1e-12);
        assert_eq!(t.py(1.1), 40.0);
        assert!((t.py(-1.1) - 440.0).abs() < 1e-12);
        assert_eq!(t.px(0.0), 320.0);
        let p = PlotTransform::plane(100.0, 100.0, &[(iv(-2.0, 1.0), iv(0.0, 0.5))]);
        assert!((p.range - 2.1).abs() < 1e-12);
        assert_eq!(PlotTransform::plane(100.0, 100.0, &[(iv(0.0, 0.0), iv(0.0, 0.0))]).range, 1.0);
    }

    #[test]
    fn rectangle_bounds_follow_the_transform() {
        let c = IntervalMatrix::new(1, 2, vec![iv(0.8, 0.9), iv(0.1, 0.2)]).unwrap();
        let svg = render_correlation_circle(&c, &names(&["t1"]), &PlotSpec::new(PlotKind::TableCorrelations)).unwrap();
        let t = PlotTransform::circle(640.0, 640.0);
        let expect = format!(
            "x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\"",
            t.px(0.8),
            t.py(0.2),
            t.px(0.9) - t.px(0.8),
            t.py(0.1) - t.py(0.2)
        );
        assert!(svg.contains(&expect), "{svg}");
    }

    #[test]
    fn degenerate_cells_become_points_and_segments() {
        let c = IntervalMatrix::new(
            3,
            2,
            vec![iv(0.5, 0.5), iv(0.2, 0.2), iv(0.5, 0.5), iv(0.1, 0.3), iv(0.1, 0.3), iv(0.2, 0.2)],
        )
        .unwrap();
        let svg = render_correlation_circle(&c, &names(&["a", "b", "c"]), &PlotSpec::new(PlotKind::TableCorrelations))
            .unwrap();
        assert_eq!(svg.matches("class=\"cell point\"").count(), 1);
        assert_eq!(svg.matches("class=\"cell segment\"").count(), 2);
        assert_eq!(svg.matches("<rect").count(), 0);
        let mut spec = PlotSpec::new(PlotKind::TableCorrelations);
        spec.degeneracy_tol = 0.5;
        let svg = render_correlation_circle(&c, &names(&["a", "b", "c"]), &spec).unwrap();
        assert_eq!(svg.matches("class=\"cell point\"").count(), 3);
    }

    #[test]
    fn evolution_subset_and_errors() {
        let n = 3;
        let r = 2;
        let c = IntervalMatrix::from_fn(n * r, 3, |i, j| iv(i as f64 - 3.0, i as f64 - 2.5 + j as f64));
        let inds = names(&["x", "y", "z"]);
        let layout = PlaneLayout::Evolution { tables: names(&["A", "B"]) };
        let mut spec = PlotSpec::new(PlotKind::IndividualEvolution);
        spec.subset = names(&["x", "z"]);
        let svg = render_principal_plane(&c, &inds, &layout, &spec).unwrap();
        assert_eq!(svg.matches("<rect").count(), 2 * r);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("data-label=\"z B\" data-row=\"5\""));

        spec.subset = names(&["w"]);
        assert_eq!(render_principal_plane(&c, &inds, &layout, &spec), Err(PlotError::UnknownIndividual("w".into())));
        spec.subset.clear();
        spec.axes = (0, 3);
        assert_eq!(
            render_principal_plane(&c, &inds, &layout, &spec),
            Err(PlotError::AxisOutOfRange { axis: 4, available: 3 })
        );
    }

    #[test]
    fn labels_are_escaped_and_optional() {
        let c = IntervalMatrix::new(1, 2, vec![iv(0.0, 0.1), iv(0.0, 0.1)]).unwrap();
        let mut spec = PlotSpec::new(PlotKind::TableCorrelations);
        let svg = render_correlation_circle(&c, &names(&["a<b&\"c\""]), &spec).unwrap();
        assert!(svg.contains("a&lt;b&amp;&quot;c&quot;"));
        spec.labels = false;
        let svg = render_correlation_circle(&c, &names(&["a"]), &spec).unwrap();
        assert!(!svg.contains("class=\"label\""));
    }

    #[test]
    fn axis_parsing() {
        assert_eq!(parse_axes("1,2"), Ok((0, 1)));
        assert_eq!(parse_axes(" 3 , 1"), Ok((2, 0)));
        assert!(parse_axes("0,1").is_err());
        assert!(parse_axes("1").is_err());
        assert!("fig".parse::<PlotKind>().is_err());
        assert_eq!("individual-evolution".parse::<PlotKind>(), Ok(PlotKind::IndividualEvolution));
    }
}
