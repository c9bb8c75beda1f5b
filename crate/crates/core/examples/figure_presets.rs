//! Run every figure preset through the sweep and flow pipeline, writing a
//! branch plot, CSVs and a manifest per panel.
//!
//! ```text
//! cargo run --example figure_presets -- [out_dir]
//! ```

use std::path::PathBuf;

use interface_flow::cli::all_figures;

fn main() -> interface_flow::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    for o in all_figures(&out)? {
        let m = &o.manifest;
        let flows: Vec<String> = m.results["flow"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|f| {
                format!(
                    "α={:.3} sf={}",
                    f["report"]["alpha"], f["report"]["sf_numeric"]
                )
            })
            .collect();
        println!(
            "{:<18} {:>5.2}s  {}  {}",
            m.config.scenario,
            m.timings.get("sweep").copied().unwrap_or(0.0),
            if o.ok() { "ok  " } else { "FAIL" },
            flows.join(", ")
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}
