//! SVG figures of the analytic curves with optional simulation overlays.
//!
//! Every curve carries its sample abscissae and values at full precision in
//! `data-xs` / `data-ys`, so figures can be checked numerically.

use std::fmt::Write as _;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use evalexpr::{
    build_operator_tree, ContextWithMutableVariables, DefaultNumericTypes, HashMapContext, Node, Value,
};
use lfpp_core::analytic::{
    d_bounds_at_two, d_lower, d_upper, dg_guess_d, dg_guess_lambda, g_upper, gamma_knot, lambda_lower,
    lambda_upper, watabiki_d, watabiki_lambda_ext, xi_knot,
};

use crate::estimate::EstimateRow;

/// Uniform samples per curve, before knots are added.
pub const CURVE_SAMPLES: usize = 512;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 470.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 420.0;
const DASH: &str = "6 4";

/// `2 - sqrt(5/2)`, the upper bound for `2 / d_2`.
pub fn reference_xi() -> f64 {
    2.0 - 2.5f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    LambdaBounds,
    DBounds,
    GBound,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::LambdaBounds => "lambda_bounds",
            FigureId::DBounds => "d_bounds",
            FigureId::GBound => "g_bound",
        }
    }

    pub fn default_range(self) -> (f64, f64) {
        match self {
            FigureId::LambdaBounds => (0.0, 1.0),
            FigureId::DBounds => (0.01, 2.0),
            FigureId::GBound => (0.0, 2.5f64.sqrt()),
        }
    }

    fn domain_ok(self, (a, b): (f64, f64)) -> bool {
        match self {
            FigureId::DBounds => a > 0.0 && b <= 2.0,
            _ => a >= 0.0 && b.is_finite(),
        }
    }
}

impl FromStr for FigureId {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda_bounds" => Ok(FigureId::LambdaBounds),
            "d_bounds" => Ok(FigureId::DBounds),
            "g_bound" => Ok(FigureId::GBound),
            other => bail!("unknown figure '{other}' (expected lambda_bounds, d_bounds or g_bound)"),
        }
    }
}

/// A dashed comparison curve given as an expression in `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreviousBest {
    pub label: String,
    pub expr: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlayPoint {
    pub x: f64,
    pub y: f64,
    /// Half-length of the error bar.
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    pub range: (f64, f64),
    pub overlay: Vec<OverlayPoint>,
    pub previous_best: Vec<PreviousBest>,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        FigureSpec {
            id,
            range: id.default_range(),
            overlay: Vec::new(),
            previous_best: Vec::new(),
        }
    }

    /// Overlay points for this figure from an estimates table.
    pub fn with_estimates(mut self, rows: &[EstimateRow]) -> Self {
        self.overlay = match self.id {
            FigureId::LambdaBounds => rows
                .iter()
                .map(|r| OverlayPoint { x: r.xi, y: r.lambda_hat, err: r.lambda_stderr })
                .collect(),
            FigureId::GBound => rows
                .iter()
                .map(|r| OverlayPoint { x: r.xi, y: r.g_hat, err: r.g_stderr })
                .collect(),
            FigureId::DBounds => Vec::new(),
        };
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub id: String,
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: FigureId,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub range: (f64, f64),
    pub curves: Vec<Curve>,
    /// Dashed vertical reference lines.
    pub vlines: Vec<f64>,
    pub overlay: Vec<OverlayPoint>,
    pub notes: Vec<String>,
}

/// 512 uniform samples over `[a, b]` plus the knots inside it.
pub fn sample_points((a, b): (f64, f64), knots: &[f64]) -> Vec<f64> {
    let last = (CURVE_SAMPLES - 1) as f64;
    let mut xs: Vec<f64> = (0..CURVE_SAMPLES)
        .map(|i| if i == CURVE_SAMPLES - 1 { b } else { a + (b - a) * i as f64 / last })
        .collect();
    for &k in knots {
        if k > a && k < b && !xs.contains(&k) {
            xs.push(k);
        }
    }
    xs.sort_by(f64::total_cmp);
    xs
}

fn curve<F>(id: &str, label: &str, color: &'static str, xs: &[f64], f: F) -> Result<Curve>
where
    F: Fn(f64) -> lfpp_core::Result<f64>,
{
    let ys = xs
        .iter()
        .map(|&x| f(x).with_context(|| format!("{id} at {x}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Curve {
        id: id.into(),
        label: label.into(),
        color,
        dashed: false,
        xs: xs.to_vec(),
        ys,
    })
}

fn d_at(which: fn(f64) -> lfpp_core::Result<f64>, at_two: f64) -> impl Fn(f64) -> lfpp_core::Result<f64> {
    move |g| if g == 2.0 { Ok(at_two) } else { which(g) }
}

fn compile(expr: &str) -> Result<Node<DefaultNumericTypes>> {
    build_operator_tree::<DefaultNumericTypes>(expr).map_err(|e| anyhow!("cannot parse '{expr}': {e}"))
}

fn eval_in_gamma(node: &Node<DefaultNumericTypes>, gamma: f64) -> Result<f64> {
    let mut ctx = HashMapContext::<DefaultNumericTypes>::new();
    ctx.set_value("gamma".into(), Value::from_float(gamma))
        .map_err(|e| anyhow!("{e}"))?;
    node.eval_number_with_context(&ctx).map_err(|e| anyhow!("{e}"))
}

pub fn build_figure(spec: &FigureSpec) -> Result<Figure> {
    let (a, b) = spec.range;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        bail!("figure range [{a}, {b}] is empty");
    }
    if !spec.id.domain_ok(spec.range) {
        bail!("figure range [{a}, {b}] leaves the domain of {}", spec.id.name());
    }
    let mut notes = Vec::new();
    let mut vlines = Vec::new();
    let (x_label, y_label, curves) = match spec.id {
        FigureId::LambdaBounds => {
            let xs = sample_points(spec.range, &[xi_knot(), reference_xi()]);
            let curves = vec![
                curve("lambda_lower", "lower bound", "red", &xs, lambda_lower)?,
                curve("lambda_upper", "upper bound", "blue", &xs, lambda_upper)?,
                curve("lambda_watabiki_ext", "extended Watabiki", "green", &xs, watabiki_lambda_ext)?,
                curve("lambda_dg_guess", "xi/sqrt(6) guess", "orange", &xs, dg_guess_lambda)?,
            ];
            vlines.push(reference_xi());
            ("xi", "lambda", curves)
        }
        FigureId::GBound => {
            let xs = sample_points(spec.range, &[xi_knot(), reference_xi()]);
            let curves = vec![curve("g_upper", "geodesic dimension bound", "blue", &xs, |x| {
                g_upper(x, lambda_lower(x)?)
            })?];
            vlines.push(reference_xi());
            ("xi", "g", curves)
        }
        FigureId::DBounds => {
            let xs = sample_points(spec.range, &[gamma_knot()]);
            let (lo2, hi2) = d_bounds_at_two();
            let mut curves = vec![
                curve("d_lower", "lower bound", "red", &xs, d_at(d_lower, lo2))?,
                curve("d_upper", "upper bound", "blue", &xs, d_at(d_upper, hi2))?,
                curve("d_watabiki", "Watabiki", "green", &xs, watabiki_d)?,
                curve("d_dg_guess", "2 + gamma^2/2 + gamma/sqrt(6)", "orange", &xs, dg_guess_d)?,
            ];
            if spec.previous_best.is_empty() {
                notes.push("previous best bounds omitted: no expressions supplied in config".into());
            }
            let colors = ["red", "blue", "gray", "purple"];
            for (i, pb) in spec.previous_best.iter().enumerate() {
                let node = compile(&pb.expr)?;
                let ys = xs
                    .iter()
                    .map(|&g| eval_in_gamma(&node, g).with_context(|| format!("'{}' at gamma = {g}", pb.expr)))
                    .collect::<Result<Vec<_>>>()?;
                curves.push(Curve {
                    id: format!("previous_best_{i}"),
                    label: pb.label.clone(),
                    color: colors[i % colors.len()],
                    dashed: true,
                    xs: xs.clone(),
                    ys,
                });
            }
            if !spec.overlay.is_empty() {
                notes.push("overlay points are not drawn on the dimension figure".into());
            }
            ("gamma", "d", curves)
        }
    };
    let overlay: Vec<OverlayPoint> = if spec.id == FigureId::DBounds {
        Vec::new()
    } else {
        spec.overlay.iter().copied().filter(|p| p.x >= a && p.x <= b).collect()
    };
    if overlay.len() < spec.overlay.len() && spec.id != FigureId::DBounds {
        notes.push(format!("{} overlay points outside the range were dropped", spec.overlay.len() - overlay.len()));
    }
    Ok(Figure {
        id: spec.id,
        x_label,
        y_label,
        range: spec.range,
        curves,
        vlines: vlines.into_iter().filter(|&v| v >= a && v <= b).collect(),
        overlay,
        notes,
    })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn join(vals: &[f64]) -> String {
    vals.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Tick label with a few decimals, trailing zeros dropped.
fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (RIGHT - LEFT)
    }

    fn py(&self, y: f64) -> f64 {
        BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (BOTTOM - TOP)
    }
}

fn y_extent(fig: &Figure) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for y in fig.curves.iter().flat_map(|c| c.ys.iter().copied()) {
        lo = lo.min(y);
        hi = hi.max(y);
    }
    for p in &fig.overlay {
        lo = lo.min(p.y - p.err);
        hi = hi.max(p.y + p.err);
    }
    if !(hi > lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn render_svg(fig: &Figure) -> String {
    let ax = Axes {
        x: fig.range,
        y: y_extent(fig),
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" data-figure="{}">"#,
        fig.id.name()
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // axes and ticks
    let _ = writeln!(s, r#"<g class="axes" stroke="black" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}"/>"#);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{LEFT}" y2="{TOP}"/>"#);
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = ax.x.0 + t * (ax.x.1 - ax.x.0);
        let yv = ax.y.0 + t * (ax.y.1 - ax.y.0);
        let (px, py) = (ax.px(xv), ax.py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{BOTTOM}" x2="{px:.2}" y2="{:.2}"/><text x="{px:.2}" y="{:.2}" stroke="none" text-anchor="middle">{}</text>"#,
            BOTTOM + 5.0,
            BOTTOM + 18.0,
            tick_label(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT}" y2="{py:.2}"/><text x="{:.2}" y="{:.2}" stroke="none" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" stroke="none" text-anchor="middle">{}</text>"#,
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 36.0,
        fig.x_label
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" stroke="none" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0,
        fig.y_label
    );
    s.push_str("</g>\n");

    for c in &fig.curves {
        let points: Vec<String> = c
            .xs
            .iter()
            .zip(&c.ys)
            .map(|(&x, &y)| format!("{:.3},{:.3}", ax.px(x), ax.py(y)))
            .collect();
        let dash = if c.dashed {
            format!(r#" stroke-dasharray="{DASH}""#)
        } else {
            String::new()
        };
        let _ = writeln!(
            s,
            r#"<polyline class="curve" id="{}" data-label="{}" fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}" data-xs="{}" data-ys="{}"/>"#,
            c.id,
            escape(&c.label),
            c.color,
            points.join(" "),
            join(&c.xs),
            join(&c.ys)
        );
    }
    for &v in &fig.vlines {
        let px = ax.px(v);
        let _ = writeln!(
            s,
            r#"<line class="reference" x1="{px:.3}" y1="{BOTTOM}" x2="{px:.3}" y2="{TOP}" stroke="red" stroke-dasharray="{DASH}" data-x="{v}"/>"#
        );
    }
    for p in &fig.overlay {
        let (px, py) = (ax.px(p.x), ax.py(p.y));
        let _ = writeln!(
            s,
            r#"<g class="overlay-point" data-x="{}" data-y="{}" data-err="{}"><line x1="{px:.3}" y1="{:.3}" x2="{px:.3}" y2="{:.3}" stroke="black"/><circle cx="{px:.3}" cy="{py:.3}" r="3" fill="black"/></g>"#,
            p.x,
            p.y,
            p.err,
            ax.py(p.y - p.err),
            ax.py(p.y + p.err)
        );
    }

    let _ = writeln!(s, r#"<g class="legend" font-family="sans-serif" font-size="11">"#);
    for (i, c) in fig.curves.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * i as f64;
        let dash = if c.dashed {
            format!(r#" stroke-dasharray="{DASH}""#)
        } else {
            String::new()
        };
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{}"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
            RIGHT + 15.0,
            RIGHT + 40.0,
            c.color,
            RIGHT + 45.0,
            y + 4.0,
            escape(&c.label)
        );
    }
    s.push_str("</g>\n");
    for (i, n) in fig.notes.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<text class="note" x="{LEFT}" y="{:.1}" font-family="sans-serif" font-size="10">{}</text>"#,
            HEIGHT - 20.0 + 12.0 * i as f64 - 12.0 * (fig.notes.len() as f64 - 1.0),
            escape(n)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_include_ends_and_knots() {
        let xs = sample_points((0.0, 1.0), &[xi_knot(), 3.0]);
        assert_eq!(xs.len(), CURVE_SAMPLES + 1);
        assert_eq!(xs[0], 0.0);
        assert_eq!(*xs.last().unwrap(), 1.0);
        assert!(xs.contains(&xi_knot()));
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn previous_best_expressions_evaluate() {
        let node = compile("2 + gamma^2/2 + gamma/math::sqrt(6)").unwrap();
        let g = 1.3;
        assert!((eval_in_gamma(&node, g).unwrap() - dg_guess_d(g).unwrap()).abs() < 1e-12);
        assert!(compile("2 + (gamma").is_err());
    }

    #[test]
    fn rejects_bad_ranges() {
        let mut spec = FigureSpec::new(FigureId::DBounds);
        spec.range = (0.0, 2.0);
        assert!(build_figure(&spec).is_err());
        spec.range = (1.0, 1.0);
        assert!(build_figure(&spec).is_err());
        assert!("fig3".parse::<FigureId>().is_err());
    }

    #[test]
    fn escapes_labels() {
        assert_eq!(escape(r#"a<b & "c">"#), "a&lt;b &amp; &quot;c&quot;&gt;");
    }
}
