//! Run manifest and SVG emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::branches::Branch;
use crate::error::Result;

use super::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub timings: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub results: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        let mut tolerances = BTreeMap::new();
        tolerances.insert("overlap_threshold".into(), config.sweep.overlap_threshold);
        tolerances.insert("min_step".into(), config.sweep.min_step);
        tolerances.insert("refine_tol".into(), config.sweep.refine_tol);
        tolerances.insert("match_tol".into(), config.match_tol);
        tolerances.insert("filter_threshold".into(), config.filter().threshold);
        tolerances.insert("filter_margin".into(), config.filter().margin);
        tolerances.insert("quadrature_tol".into(), crate::flow::QUADRATURE_TOL);
        tolerances.insert("node_shift".into(), crate::flow::NODE_SHIFT);
        tolerances.insert("bulk_level_tol".into(), crate::bulk::LEVEL_TOL);
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            tolerances,
            timings: BTreeMap::new(),
            verdicts: Vec::new(),
            results: serde_json::Value::Null,
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.verdicts.push(Verdict {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(self)? + "\n",
        )?;
        Ok(())
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 56.0;

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 8.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|s| s * mag)
        .find(|&s| s >= raw)
        .unwrap_or(raw);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}

/// Line plot of `(ζ, μ_j)` for every branch, with dashed horizontal lines at each `α`.
pub fn branches_svg(
    title: &str,
    branches: &[Branch],
    zeta: (f64, f64),
    window: (f64, f64),
    alphas: &[f64],
) -> String {
    let sx = |z: f64| PAD + (z - zeta.0) / (zeta.1 - zeta.0) * (WIDTH - 2.0 * PAD);
    let sy = |m: f64| HEIGHT - PAD - (m - window.0) / (window.1 - window.0) * (HEIGHT - 2.0 * PAD);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    let (x0, x1, y0, y1) = (PAD, WIDTH - PAD, PAD, HEIGHT - PAD);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for t in ticks(zeta.0, zeta.1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="black"/>"#,
            y1 + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{}" text-anchor="middle">{t}</text>"#,
            y1 + 18.0
        );
    }
    for t in ticks(window.0, window.1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{t}</text>"#,
            x0 - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">ζ</text>"#,
        WIDTH / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle">μ</text>"#,
        HEIGHT / 2.0
    );
    for &a in alphas {
        if a > window.0 && a < window.1 {
            let y = sy(a);
            let _ = writeln!(
                s,
                r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#c00" stroke-dasharray="6 4"/>"##
            );
        }
    }
    for b in branches {
        let pts: Vec<String> = b
            .zetas
            .iter()
            .zip(&b.mus)
            .map(|(&z, &m)| format!("{:.2},{:.2}", sx(z), sy(m)))
            .collect();
        if pts.len() == 1 {
            let _ = writeln!(
                s,
                r##"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="#036"/>"##,
                sx(b.zetas[0]),
                sy(b.mus[0])
            );
        } else {
            let _ = writeln!(
                s,
                r##"<polyline fill="none" stroke="#036" stroke-width="1.2" points="{}"/>"##,
                pts.join(" ")
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_placement() {
        assert_eq!(
            ticks(-8.0, 8.0),
            vec![-8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0]
        );
        assert_eq!(ticks(-3.8, 3.8).first(), Some(&-3.0));
    }

    #[test]
    fn empty_plot_is_well_formed() {
        let svg = branches_svg("empty", &[], (-1.0, 1.0), (-1.0, 1.0), &[0.0]);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("stroke-dasharray"));
    }
}
