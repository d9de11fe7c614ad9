//! Static SVG figures with CSV sidecars.
//!
//! A [`Figure`] is plain data: labels, annotations and `(x, y)` series. The
//! SVG is rendered from that data alone, and [`Figure::to_csv`] writes all of
//! it out, so [`Figure::from_csv`] followed by [`Figure::to_svg`] reproduces
//! the original file byte for byte.

use std::fmt::Write as _;

use crate::distributions::{beta_moments, beta_pdf, BetaParams};
use crate::error::{Error, Result};
use crate::gof::QQResult;
use crate::portfolio::Locale;

pub const DEFAULT_RESOLUTION: usize = 512;
pub const MIN_RESOLUTION: usize = 16;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Points,
}

impl Style {
    fn as_str(self) -> &'static str {
        match self {
            Style::Line => "line",
            Style::Points => "points",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub annotations: Vec<String>,
    pub series: Vec<Series>,
}

/// Formats `x` with `decimals` places, using a decimal comma for German.
pub fn format_number(x: f64, decimals: usize, locale: Locale) -> String {
    let s = format!("{x:.decimals$}");
    match locale {
        Locale::En => s,
        Locale::De => s.replace('.', ","),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Roughly five round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let decimals = (-step.log10().floor()).max(0.0) as usize + usize::from(step / mag == 2.5);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

impl Figure {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flat_map(|s| s.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in pts.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let span = if hi > lo { hi - lo } else { lo.abs().max(1.0) };
            (lo - 0.04 * span, hi + 0.04 * span)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        (x0, x1, y0, y1)
    }

    /// Renders the figure; the output depends only on `self`.
    pub fn to_svg(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            s,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );

        let (xt, xd) = ticks(x0, x1);
        for t in xt {
            let px = sx(t);
            let _ = writeln!(
                s,
                r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{t:.xd$}</text>"#,
                MARGIN_TOP + ph,
                MARGIN_TOP + ph + 5.0,
                MARGIN_TOP + ph + 19.0,
            );
        }
        let (yt, yd) = ticks(y0, y1);
        for t in yt {
            let py = sy(t);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN_LEFT}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t:.yd$}</text>"#,
                MARGIN_LEFT - 5.0,
                MARGIN_LEFT - 8.0,
                py + 4.0,
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(18 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let visible = series
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite());
            match series.style {
                Style::Line => {
                    let coords: Vec<String> = visible
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        coords.join(" ")
                    );
                }
                Style::Points => {
                    for &(x, y) in visible {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                            sx(x),
                            sy(y)
                        );
                    }
                }
            }
            let ly = MARGIN_TOP + 16.0 + 16.0 * i as f64;
            let lx = MARGIN_LEFT + pw - 150.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{ly:.2}">{}</text>"#,
                ly - 4.0,
                lx + 20.0,
                ly - 4.0,
                lx + 26.0,
                escape(&series.name)
            );
        }
        for (i, a) in self.annotations.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                MARGIN_LEFT + 10.0,
                MARGIN_TOP + 18.0 + 16.0 * i as f64,
                escape(a)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    /// Sidecar CSV holding everything `to_svg` needs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# title: {}", self.title);
        let _ = writeln!(out, "# x_label: {}", self.x_label);
        let _ = writeln!(out, "# y_label: {}", self.y_label);
        for a in &self.annotations {
            let _ = writeln!(out, "# annotation: {a}");
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "style", "x", "y"])
            .expect("in-memory write");
        for s in &self.series {
            for &(x, y) in &s.points {
                w.write_record([
                    s.name.as_str(),
                    s.style.as_str(),
                    &x.to_string(),
                    &y.to_string(),
                ])
                .expect("in-memory write");
            }
        }
        let body = w.into_inner().expect("in-memory write");
        out.push_str(std::str::from_utf8(&body).expect("utf-8 input"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Figure> {
        let mut fig = Figure {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            annotations: Vec::new(),
            series: Vec::new(),
        };
        let mut body = String::new();
        for line in text.lines() {
            match line.strip_prefix("# ") {
                Some(meta) => {
                    let (key, value) = meta.split_once(": ").unwrap_or((meta, ""));
                    match key {
                        "title" => fig.title = value.to_string(),
                        "x_label" => fig.x_label = value.to_string(),
                        "y_label" => fig.y_label = value.to_string(),
                        "annotation" => fig.annotations.push(value.to_string()),
                        _ => {}
                    }
                }
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let mut reader = csv::Reader::from_reader(body.as_bytes());
        for rec in reader.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let bad = |what: &str| Error::Parse {
                line: rec.position().map_or(0, |p| p.line()),
                message: format!("invalid {what}"),
            };
            let style = match &rec[1] {
                "line" => Style::Line,
                "points" => Style::Points,
                _ => return Err(bad("style")),
            };
            let x: f64 = rec[2].parse().map_err(|_| bad("x"))?;
            let y: f64 = rec[3].parse().map_err(|_| bad("y"))?;
            match fig.series.last_mut() {
                Some(s) if s.name == rec[0] && s.style == style => s.points.push((x, y)),
                _ => fig.series.push(Series {
                    name: rec[0].to_string(),
                    style,
                    points: vec![(x, y)],
                }),
            }
        }
        Ok(fig)
    }
}

/// Plotting window `[max(0, μ-6σ), min(1, μ+6σ)]` of a Beta law.
pub fn density_window(p: BetaParams) -> (f64, f64) {
    let m = beta_moments(p);
    let sd = m.variance.sqrt();
    ((m.mean - 6.0 * sd).max(0.0), (m.mean + 6.0 * sd).min(1.0))
}

/// Overlay of Beta densities on the union of their windows.
///
/// The grid uses cell midpoints, so it never touches 0 or 1.
pub fn density_figure(curves: &[(String, BetaParams)], resolution: usize) -> Result<Figure> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Input(format!(
            "resolution must be at least {MIN_RESOLUTION}, got {resolution}"
        )));
    }
    if curves.is_empty() {
        return Err(Error::Input("no densities to plot".into()));
    }
    let (lo, hi) = curves
        .iter()
        .map(|c| density_window(c.1))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (a, b)| {
            (lo.min(a), hi.max(b))
        });
    let step = (hi - lo) / resolution as f64;
    let series = curves
        .iter()
        .map(|(name, p)| {
            let points = (0..resolution)
                .map(|i| {
                    let x = lo + (i as f64 + 0.5) * step;
                    beta_pdf(x, *p).map(|y| (x, y))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Series {
                name: name.clone(),
                style: Style::Line,
                points,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Figure {
        title: "Beta densities of the affectedness proportion".into(),
        x_label: "proportion of contracts affected".into(),
        y_label: "density".into(),
        annotations: Vec::new(),
        series,
    })
}

/// Q-Q plot of ordered observations against fitted quantiles with the
/// 45° reference line, annotated with the statistic and p-value.
pub fn qq_figure(tariff: &str, qq: &QQResult, p_value: Option<f64>, locale: Locale) -> Figure {
    let points: Vec<(f64, f64)> = qq
        .quantiles
        .iter()
        .copied()
        .zip(qq.sorted_obs.iter().copied())
        .collect();
    let lo = qq.quantiles[0].min(qq.sorted_obs[0]);
    let hi = qq.quantiles[qq.quantiles.len() - 1].max(qq.sorted_obs[qq.sorted_obs.len() - 1]);
    let tn = if qq.tn.is_finite() {
        format_number(qq.tn, 3, locale)
    } else {
        "inf".to_string()
    };
    let mut annotations = vec![format!("T_n = {tn}")];
    if let Some(p) = p_value {
        annotations.push(format!(
            "p-value = {}%",
            format_number(100.0 * p, 2, locale)
        ));
    }
    Figure {
        title: format!("Q-Q plot, tariff {tariff}"),
        x_label: "fitted Beta quantile".into(),
        y_label: "observed proportion".into(),
        annotations,
        series: vec![
            Series {
                name: "observations".into(),
                style: Style::Points,
                points,
            },
            Series {
                name: "45° line".into(),
                style: Style::Line,
                points: vec![(lo, lo), (hi, hi)],
            },
        ],
    }
}
