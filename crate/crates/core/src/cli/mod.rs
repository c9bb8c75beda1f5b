//! Command implementations behind the `interface-flow` binary.
//!
//! Each command takes a resolved [`RunConfig`], writes its CSVs, SVG and
//! `manifest.json` under `config.out_dir`, and returns the printed table.

pub mod config;
pub mod report;

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use crate::branches::{classify_asymptotics, sweep_branches, write_branches_csv, Branch};
use crate::bulk::{landau_levels, predicted_sf, FlowPrediction};
use crate::error::{FlowError, Result};
use crate::fiber::DOUBLER_LIMIT;
use crate::flow::{analyze, reconcile, refine_crossings, FlowReport};
use crate::oracle2d::{
    assemble_2d, stability_with_baseline, trace_conductivity, write_oracle_csv, StabilityRow,
};

pub use config::{preset, RunConfig, PRESETS};
pub use report::{branches_svg, RunManifest, Verdict};

/// Oracle value must land within this distance of the fiber integer.
pub const ORACLE_TOL: f64 = 0.15;
/// Two projections must give traces this close.
pub const P_INVARIANCE_TOL: f64 = 0.02;

/// What a command printed and recorded.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: String,
    pub manifest: RunManifest,
}

impl Outcome {
    pub fn ok(&self) -> bool {
        self.manifest.all_pass()
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn levels_k_max(cfg: &RunConfig) -> u32 {
    // enough Landau levels to cover the sweep window for the weaker field
    let reach = cfg.sweep.window.0.abs().max(cfg.sweep.window.1.abs())
        + cfg.minus().v.abs().max(cfg.plus().v.abs());
    let b = cfg.minus().b.abs().min(cfg.plus().b.abs());
    ((reach * reach / (2.0 * b)).ceil() as u32).max(1)
}

/// Landau levels of both half-spaces and the predicted flow at every `α`.
pub fn cmd_bulk(cfg: &RunConfig) -> Result<Outcome> {
    let t = Instant::now();
    let preds: Vec<(f64, FlowPrediction)> = cfg
        .alphas
        .iter()
        .map(|&a| predicted_sf(cfg.minus(), cfg.plus(), a).map(|p| (a, p)))
        .collect::<Result<_>>()?;
    let k_max = levels_k_max(cfg);
    let minus = landau_levels(cfg.minus(), k_max)?;
    let plus = landau_levels(cfg.plus(), k_max)?;

    let mut table = String::new();
    let (lo, hi) = cfg.sweep.window;
    for (name, spec) in [("H-", &minus), ("H+", &plus)] {
        let shown: Vec<String> = spec
            .levels
            .iter()
            .filter(|&&l| l >= lo && l <= hi)
            .map(|l| format!("{l:.6}"))
            .collect();
        let _ = writeln!(table, "{name} levels in [{lo}, {hi}]: {}", shown.join(" "));
    }
    let _ = writeln!(
        table,
        "{:>10} {:>4} {:>4} {:>6} {:>6} {:>8}",
        "alpha", "N-", "N+", "I-", "I+", "SF_pred"
    );
    for (a, p) in &preds {
        let _ = writeln!(
            table,
            "{:>10} {:>4} {:>4} {:>6} {:>6} {:>8}",
            a,
            p.n_minus,
            p.n_plus,
            p.i_minus.to_string(),
            p.i_plus.to_string(),
            p.sf
        );
    }
    for (a, p) in &preds {
        let _ = writeln!(table, "alpha = {a}: SF_pred = {}", p.sf);
    }

    let mut w = create(&cfg.out_dir, "bulk.csv")?;
    use std::io::Write as _;
    writeln!(w, "alpha,n_minus,n_plus,i_minus,i_plus,sf_pred")?;
    for (a, p) in &preds {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            a,
            p.n_minus,
            p.n_plus,
            p.i_minus.value(),
            p.i_plus.value(),
            p.sf
        )?;
    }
    let mut w = create(&cfg.out_dir, "levels.csv")?;
    writeln!(w, "side,level")?;
    for (name, spec) in [("minus", &minus), ("plus", &plus)] {
        for l in &spec.levels {
            writeln!(w, "{name},{l}")?;
        }
    }
    drop(w);

    let mut manifest = RunManifest::new("bulk-spectrum", cfg);
    manifest
        .timings
        .insert("bulk".into(), t.elapsed().as_secs_f64());
    manifest.results = json!({
        "k_max": k_max,
        "levels_minus": minus.levels,
        "levels_plus": plus.levels,
        "predictions": preds.iter().map(|(a, p)| json!({"alpha": a, "prediction": p})).collect::<Vec<_>>(),
    });
    manifest.write(&cfg.out_dir)?;
    Ok(Outcome { table, manifest })
}

fn sweep(cfg: &RunConfig, manifest: &mut RunManifest) -> Result<Vec<Branch>> {
    let ratio = cfg.grid.doubler_ratio(&cfg.profiles, cfg.sweep.zeta_max);
    manifest.verdict(
        "lattice doubler off grid",
        ratio <= DOUBLER_LIMIT,
        format!("(zeta_max - min A2) h / 2 = {ratio:.3}, limit {DOUBLER_LIMIT}"),
    );
    let t = Instant::now();
    let branches = sweep_branches(&cfg.grid, &cfg.profiles, &cfg.sweep, &cfg.filter())?;
    manifest
        .timings
        .insert("sweep".into(), t.elapsed().as_secs_f64());
    // endpoints that match no rule are left unlabelled rather than failing the plot
    Ok(branches
        .into_iter()
        .map(|b| classify_asymptotics(&b, cfg.minus(), cfg.plus(), cfg.match_tol).unwrap_or(b))
        .collect())
}

fn emit_branches(
    cfg: &RunConfig,
    branches: &[Branch],
    manifest: &mut RunManifest,
) -> Result<String> {
    write_branches_csv(branches, create(&cfg.out_dir, "branches.csv")?)?;
    let svg = branches_svg(
        &cfg.scenario,
        branches,
        (cfg.sweep.zeta_min, cfg.sweep.zeta_max),
        cfg.sweep.window,
        &cfg.alphas,
    );
    std::fs::write(cfg.out_dir.join("branches.svg"), svg)?;
    let unlabelled = branches.iter().filter(|b| b.asymptote_hi.is_none()).count();
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{}: {} branches, {} samples",
        cfg.scenario,
        branches.len(),
        cfg.sweep.samples
    );
    let _ = writeln!(
        table,
        "{:>4} {:>8} {:>8} {:>10} {:>10} {:>12} {:>12}",
        "id", "zeta0", "zeta1", "mu0", "mu1", "start", "end"
    );
    for b in branches {
        let _ = writeln!(
            table,
            "{:>4} {:>8.3} {:>8.3} {:>10.5} {:>10.5} {:>12} {:>12}",
            b.id,
            b.zetas[0],
            b.zetas[b.len() - 1],
            b.first_mu(),
            b.last_mu(),
            format!("{:?}", b.start),
            format!("{:?}", b.end)
        );
    }
    manifest.results["branches"] = json!(branches
        .iter()
        .map(|b| json!({
            "id": b.id,
            "points": b.len(),
            "min_overlap": b.min_overlap,
            "start": b.start,
            "end": b.end,
            "asymptote_lo": b.asymptote_lo,
            "asymptote_hi": b.asymptote_hi,
        }))
        .collect::<Vec<_>>());
    manifest.results["unlabelled_branches"] = json!(unlabelled);
    Ok(table)
}

/// Sweep, write `branches.csv` and `branches.svg`.
pub fn cmd_branches(cfg: &RunConfig) -> Result<Outcome> {
    let mut manifest = RunManifest::new("branches", cfg);
    manifest.results = json!({});
    let branches = sweep(cfg, &mut manifest)?;
    let table = emit_branches(cfg, &branches, &mut manifest)?;
    manifest.write(&cfg.out_dir)?;
    Ok(Outcome { table, manifest })
}

fn flow_reports(cfg: &RunConfig, branches: &[Branch]) -> Result<Vec<(FlowReport, FlowPrediction)>> {
    cfg.alphas
        .par_iter()
        .map(|&alpha| {
            let pred = predicted_sf(cfg.minus(), cfg.plus(), alpha)?;
            let mut report = analyze(
                branches,
                &cfg.sweep,
                cfg.minus(),
                cfg.plus(),
                alpha,
                cfg.density,
                None,
            )?;
            refine_crossings(
                &mut report,
                branches,
                &cfg.grid,
                &cfg.profiles,
                cfg.sweep.refine_tol,
            )?;
            Ok((report, pred))
        })
        .collect()
}

fn emit_flow(
    cfg: &RunConfig,
    reports: &[(FlowReport, FlowPrediction)],
    manifest: &mut RunManifest,
) -> Result<String> {
    use std::io::Write as _;
    let mut w = create(&cfg.out_dir, "flow.csv")?;
    writeln!(w, "alpha,alpha_used,sf_numeric,sf_endpoint,sf_predicted,two_pi_sigma,two_pi_sigma_quadrature,e1,e2,reconciled")?;
    let mut table = String::new();
    let _ = writeln!(
        table,
        "{:>8} {:>6} {:>6} {:>6} {:>14} {:>14} {:>6}",
        "alpha", "sf", "sf_end", "pred", "2πσ", "2πσ quad", "ok"
    );
    for (r, p) in reports {
        let ok = reconcile(r, p);
        let sigma = r.two_pi_sigma.unwrap_or(f64::NAN);
        let quad = r.two_pi_sigma_quadrature.unwrap_or(f64::NAN);
        let (e1, e2) = r
            .density
            .map(|d| (d.e1, d.e2))
            .unwrap_or((f64::NAN, f64::NAN));
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.alpha, r.alpha_used, r.sf_numeric, r.sf_endpoint, p.sf, sigma, quad, e1, e2, ok
        )?;
        let _ = writeln!(
            table,
            "{:>8.4} {:>6} {:>6} {:>6} {:>14.10} {:>14.10} {:>6}",
            r.alpha, r.sf_numeric, r.sf_endpoint, p.sf, sigma, quad, ok
        );
        manifest.verdict(
            format!("reconcile alpha={}", r.alpha),
            ok,
            format!(
                "sf_numeric {} sf_endpoint {} predicted {} 2πσ {sigma:.12}",
                r.sf_numeric, r.sf_endpoint, p.sf
            ),
        );
    }
    manifest.results["flow"] = json!(reports
        .iter()
        .map(|(r, p)| json!({"report": r, "prediction": p}))
        .collect::<Vec<_>>());
    Ok(table)
}

/// Full pipeline: sweep, flow and conductivity at every `α`, reconciled with the prediction.
pub fn cmd_flow(cfg: &RunConfig) -> Result<Outcome> {
    let mut manifest = RunManifest::new("flow", cfg);
    manifest.results = json!({});
    let branches = sweep(cfg, &mut manifest)?;
    let t = Instant::now();
    let reports = flow_reports(cfg, &branches)?;
    manifest
        .timings
        .insert("flow".into(), t.elapsed().as_secs_f64());
    let table = emit_flow(cfg, &reports, &mut manifest)?;
    manifest.write(&cfg.out_dir)?;
    Ok(Outcome { table, manifest })
}

/// Dense trace at the configured projections, then every stability experiment.
pub fn cmd_oracle(cfg: &RunConfig) -> Result<Outcome> {
    let oc = cfg.oracle.as_ref().ok_or_else(|| {
        FlowError::Config(format!("scenario `{}` has no oracle section", cfg.scenario))
    })?;
    let mut manifest = RunManifest::new("oracle", cfg);
    manifest.tolerances.insert("oracle_tol".into(), ORACLE_TOL);
    manifest
        .tolerances
        .insert("p_invariance_tol".into(), P_INVARIANCE_TOL);
    let g = oc.grid.resolved(&cfg.profiles);
    g.validate()?;
    let expected = cfg
        .alphas
        .iter()
        .find(|&&a| oc.density.contains(a))
        .copied()
        .unwrap_or(0.5 * (oc.density.e1 + oc.density.e2));
    let expected = predicted_sf(cfg.minus(), cfg.plus(), expected)?.sf;

    let t = Instant::now();
    let h = assemble_2d(&g, &cfg.profiles, None, 0.0)?;
    let base = trace_conductivity(&h, &g, &oc.projection, &oc.density)?;
    let shifted = oc
        .shifted_projection
        .as_ref()
        .map(|p| trace_conductivity(&h, &g, p, &oc.density))
        .transpose()?;
    drop(h);
    manifest
        .timings
        .insert("trace".into(), t.elapsed().as_secs_f64());

    let unperturbed = StabilityRow {
        coupling: 0.0,
        two_pi_sigma: base.two_pi_sigma,
        seam_residual: base.seam_residual,
    };
    let mut rows: Vec<(String, StabilityRow)> = vec![("unperturbed".into(), unperturbed)];
    manifest.verdict(
        "trace matches fiber integer",
        (base.two_pi_sigma - expected as f64).abs() <= ORACLE_TOL,
        format!("2πσ {:.6} vs {expected}", base.two_pi_sigma),
    );
    if let Some(s) = &shifted {
        rows.push((
            "shifted_projection".into(),
            StabilityRow {
                coupling: 0.0,
                two_pi_sigma: s.two_pi_sigma,
                seam_residual: s.seam_residual,
            },
        ));
        let d = (s.two_pi_sigma - base.two_pi_sigma).abs();
        manifest.verdict(
            "projection invariance",
            d <= P_INVARIANCE_TOL,
            format!("|Δ| {d:.3e}"),
        );
    }

    let t = Instant::now();
    let mut tables = Vec::new();
    for exp in &oc.experiments {
        let tab = stability_with_baseline(
            &cfg.profiles,
            &exp.perturbation,
            &exp.couplings,
            &g,
            &oc.projection,
            &oc.density,
            Some(unperturbed),
        )?;
        manifest.verdict(
            format!("stable under {}", exp.name),
            tab.stable && tab.reference == expected,
            match tab.breakdown {
                Some(c) => format!("breaks at coupling {c}"),
                None => format!("all couplings round to {}", tab.reference),
            },
        );
        rows.extend(tab.rows.iter().map(|r| (exp.name.clone(), *r)));
        tables.push(json!({"name": exp.name, "table": tab}));
    }
    manifest
        .timings
        .insert("stability".into(), t.elapsed().as_secs_f64());
    write_oracle_csv(&rows, create(&cfg.out_dir, "oracle.csv")?)?;

    let mut table = String::new();
    let _ = writeln!(
        table,
        "grid {}x{} (dim {}), momentum shift {}",
        g.grid_x.sites,
        g.ny,
        g.dim(),
        g.momentum_shift.unwrap_or(0)
    );
    let _ = writeln!(
        table,
        "{:<20} {:>8} {:>12} {:>12}",
        "scenario", "coupling", "2πσ", "seam"
    );
    for (name, r) in &rows {
        let _ = writeln!(
            table,
            "{:<20} {:>8} {:>12.6} {:>12.2e}",
            name, r.coupling, r.two_pi_sigma, r.seam_residual
        );
    }
    for v in &manifest.verdicts {
        let _ = writeln!(
            table,
            "{} {}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
    }
    manifest.results = json!({
        "expected": expected,
        "momentum_shift": g.momentum_shift,
        "trace": base,
        "trace_shifted": shifted,
        "stability": tables,
    });
    manifest.write(&cfg.out_dir)?;
    Ok(Outcome { table, manifest })
}

/// Branch plot and flow table for every preset panel, under `out/<preset>`.
pub fn all_figures(out: &Path) -> Result<Vec<Outcome>> {
    PRESETS
        .iter()
        .map(|name| {
            let mut cfg = preset(name)?;
            cfg.out_dir = out.join(name);
            let mut manifest = RunManifest::new("all-figures", &cfg);
            manifest.results = json!({});
            let branches = sweep(&cfg, &mut manifest)?;
            let mut table = emit_branches(&cfg, &branches, &mut manifest)?;
            let reports = flow_reports(&cfg, &branches)?;
            table += &emit_flow(&cfg, &reports, &mut manifest)?;
            manifest.write(&cfg.out_dir)?;
            Ok(Outcome { table, manifest })
        })
        .collect()
}
