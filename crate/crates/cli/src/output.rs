//! CSV / JSON / SVG emitters. Every file starts with the same
//! reproducibility header: λ, time (exact fraction when rational), n_max,
//! error bound, ε, grid size, tool version.

use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::io::Write;
use well_echo::{Cusp, Fragment, Plateau};

pub struct Meta {
    pub lambda: f64,
    pub time_label: String,
    pub n_max: usize,
    pub error_bound: f64,
    pub epsilon: f64,
    pub grid_points: usize,
}

impl Meta {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("lambda", format!("{}", self.lambda)),
            ("time", self.time_label.clone()),
            ("n_max", format!("{}", self.n_max)),
            ("error_bound", format!("{}", self.error_bound)),
            ("epsilon", format!("{}", self.epsilon)),
            ("grid_points", format!("{}", self.grid_points)),
            ("version", well_echo::VERSION.to_string()),
        ]
    }

    pub fn json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("lambda".into(), json!(self.lambda));
        obj.insert("time".into(), json!(self.time_label));
        obj.insert("n_max".into(), json!(self.n_max));
        obj.insert("error_bound".into(), json!(self.error_bound));
        obj.insert("epsilon".into(), json!(self.epsilon));
        obj.insert("grid_points".into(), json!(self.grid_points));
        obj.insert("version".into(), json!(well_echo::VERSION));
        Value::Object(obj)
    }
}

pub fn write_text(path: &str, text: &str) -> Result<()> {
    if path == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
        Ok(())
    } else {
        std::fs::write(path, text).with_context(|| format!("writing {path}"))
    }
}

// ---------------------------------------------------------------------------
// profile (snapshot) output

pub struct SampleRow {
    pub xi: f64,
    pub density: f64,
    pub current: f64,
    pub flag: String,
}

pub struct DetectorReports {
    pub plateaux: Option<Vec<Plateau>>,
    pub cusps: Option<Vec<Cusp>>,
    pub fragments: Option<Vec<Fragment>>,
}

impl DetectorReports {
    pub fn none() -> Self {
        DetectorReports {
            plateaux: None,
            cusps: None,
            fragments: None,
        }
    }
}

pub fn profile_csv(meta: &Meta, rows: &[SampleRow]) -> String {
    let mut out = String::new();
    for (k, v) in meta.pairs() {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str("xi,density,current,flag\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.xi, r.density, r.current, r.flag));
    }
    out
}

pub fn profile_json(meta: &Meta, rows: &[SampleRow], det: &DetectorReports) -> Value {
    let samples: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "xi": r.xi,
                "density": r.density,
                "current": r.current,
                "flag": r.flag,
            })
        })
        .collect();
    let mut detectors = serde_json::Map::new();
    if let Some(p) = &det.plateaux {
        detectors.insert(
            "plateaux".into(),
            Value::Array(
                p.iter()
                    .map(|p| {
                        json!({
                            "lo": p.interval.0,
                            "hi": p.interval.1,
                            "value": p.value,
                            "max_deviation": p.max_deviation,
                        })
                    })
                    .collect(),
            ),
        );
    }
    if let Some(c) = &det.cusps {
        detectors.insert(
            "cusps".into(),
            Value::Array(
                c.iter()
                    .map(|c| json!({"xi": c.xi, "uncertainty": c.uncertainty}))
                    .collect(),
            ),
        );
    }
    if let Some(f) = &det.fragments {
        detectors.insert(
            "fragments".into(),
            Value::Array(
                f.iter()
                    .map(|f| {
                        json!({
                            "lo": f.interval.0,
                            "hi": f.interval.1,
                            "mass": f.mass,
                            "centroid": f.centroid,
                            "shape_distance": f.shape_distance,
                        })
                    })
                    .collect(),
            ),
        );
    }
    json!({
        "meta": meta.json(),
        "samples": samples,
        "detectors": Value::Object(detectors),
    })
}

// ---------------------------------------------------------------------------
// timetrace output

pub struct TraceRow {
    pub tau: f64,
    pub density: f64,
    pub current: f64,
    pub density_mirror: f64,
    pub current_mirror: f64,
}

pub fn trace_csv(meta: &Meta, xi: f64, rows: &[TraceRow]) -> String {
    let mut out = String::new();
    for (k, v) in meta.pairs() {
        out.push_str(&format!("# {k}={v}\n"));
    }
    out.push_str(&format!("# xi={xi}\n"));
    out.push_str("tau,density,current,density_mirror,current_mirror\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.tau, r.density, r.current, r.density_mirror, r.current_mirror
        ));
    }
    out
}

pub fn trace_json(meta: &Meta, xi: f64, rows: &[TraceRow]) -> Value {
    let samples: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "tau": r.tau,
                "density": r.density,
                "current": r.current,
                "density_mirror": r.density_mirror,
                "current_mirror": r.current_mirror,
            })
        })
        .collect();
    json!({"meta": meta.json(), "xi": xi, "samples": samples})
}

// ---------------------------------------------------------------------------
// SVG line plots

const W: f64 = 960.0;
const H: f64 = 600.0;
const MARGIN: f64 = 60.0;

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    format!(
        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.4\" points=\"{}\"/>\n",
        coords.join(" ")
    )
}

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Self-contained SVG 1.1: axes, ticks, labelled curves, metadata in
/// `<desc>` and a visible header line.
pub fn line_plot_svg(
    meta: &Meta,
    title: &str,
    x_label: &str,
    curves: &[(&str, &str, &[f64], &[f64])],
) -> String {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, _, xs, ys) in curves {
        for &x in *xs {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
        }
        for &y in *ys {
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    let sx = |x: f64| MARGIN + (x - x_min) / (x_max - x_min) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_min) / (y_max - y_min) * (H - 2.0 * MARGIN);

    let meta_desc: Vec<String> = meta.pairs().iter().map(|(k, v)| format!("{k}={v}")).collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n<desc>{}</desc>\n",
        meta_desc.join(" ")
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{title}</text>\n",
        W / 2.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"42\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        meta_desc.join("  ")
    ));
    // axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = H - MARGIN,
        r = W - MARGIN,
        t = MARGIN
    ));
    for tx in ticks(x_min, x_max, 6) {
        let x = sx(tx);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"black\"/>\n<text x=\"{x:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{tx:.3}</text>\n",
            H - MARGIN,
            H - MARGIN + 5.0,
            H - MARGIN + 20.0
        ));
    }
    for ty in ticks(y_min, y_max, 5) {
        let y = sy(ty);
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"black\"/>\n<text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{ty:.3}</text>\n",
            MARGIN - 5.0,
            MARGIN,
            MARGIN - 8.0,
            y + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>\n",
        W / 2.0,
        H - 14.0
    ));
    // curves + legend
    for (i, (name, color, xs, ys)) in curves.iter().enumerate() {
        let pts: Vec<(f64, f64)> = xs.iter().zip(*ys).map(|(&x, &y)| (sx(x), sy(y))).collect();
        svg.push_str(&polyline(&pts, color));
        let ly = MARGIN + 18.0 * i as f64 + 12.0;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{ly}\" x2=\"{}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{name}</text>\n",
            W - MARGIN - 150.0,
            W - MARGIN - 120.0,
            W - MARGIN - 112.0,
            ly + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
