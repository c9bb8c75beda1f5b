//! Spectral flow and conductivity for the figure panels, compared with the
//! closed-form bulk prediction.
//!
//! ```text
//! cargo run --release --example spectral_flow
//! ```

use std::time::Instant;

use interface_flow::branches::{sweep_branches, SweepConfig};
use interface_flow::bulk::{predicted_sf, HalfSpaceParams};
use interface_flow::fiber::{Grid1D, SpuriousFilter};
use interface_flow::flow::{analyze, reconcile};
use interface_flow::profiles::ProfileSet;

fn main() -> interface_flow::Result<()> {
    let hp = |b, m, v| HalfSpaceParams::new(b, m, v);
    let panels = [
        ("bulk", hp(2.0, 2.0, 0.0)?, hp(2.0, 2.0, 0.0)?, vec![0.1]),
        (
            "mass flip",
            hp(2.0, -2.0, 0.0)?,
            hp(2.0, 2.0, 0.0)?,
            vec![0.1],
        ),
        (
            "field flip",
            hp(-2.0, 0.0, 0.0)?,
            hp(2.0, 0.0, 0.0)?,
            vec![0.1, 1.0],
        ),
        (
            "field flip, massive",
            hp(-2.0, 2.0, 0.0)?,
            hp(2.0, 2.0, 0.0)?,
            vec![0.1],
        ),
        (
            "both flip",
            hp(-2.0, -2.0, -0.1)?,
            hp(2.0, 2.0, 0.1)?,
            vec![0.0, 2.5],
        ),
    ];
    let grid = Grid1D::default();
    let filter = SpuriousFilter::for_grid(&grid);
    let cfg = SweepConfig {
        window: (-3.8, 3.8),
        ..Default::default()
    };
    println!(
        "{:<22} {:>6} {:>5} {:>5} {:>12} {:>6}",
        "panel", "alpha", "sf", "pred", "2πσ", "ok"
    );
    for (name, minus, plus, alphas) in panels {
        let ps = ProfileSet::from_half_spaces(minus, plus);
        let t = Instant::now();
        let branches = sweep_branches(&grid, &ps, &cfg, &filter)?;
        let elapsed = t.elapsed();
        for alpha in alphas {
            let pred = predicted_sf(minus, plus, alpha)?;
            let report = analyze(&branches, &cfg, minus, plus, alpha, None, None)?;
            println!(
                "{:<22} {:>6} {:>5} {:>5} {:>12.9} {:>6}",
                name,
                alpha,
                report.sf_numeric,
                pred.sf,
                report.two_pi_sigma.unwrap_or(f64::NAN),
                reconcile(&report, &pred)
            );
        }
        println!("    {} branches, sweep {:.2?}", branches.len(), elapsed);
    }
    Ok(())
}
