//! Track eigenvalue branches across a `ζ` sweep for the field-flip interface,
//! label their asymptotics and write the CSV and SVG.
//!
//! ```text
//! cargo run --example branch_tracking -- [out_dir]
//! ```

use std::fs::File;
use std::path::PathBuf;

use interface_flow::branches::{
    classify_asymptotics, sweep_branches, write_branches_csv, SweepConfig,
};
use interface_flow::bulk::HalfSpaceParams;
use interface_flow::cli::branches_svg;
use interface_flow::fiber::{Grid1D, SpuriousFilter};
use interface_flow::profiles::ProfileSet;

fn main() -> interface_flow::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "out/branch_tracking".into()),
    );
    let minus = HalfSpaceParams::new(-2.0, 0.0, 0.0)?;
    let plus = HalfSpaceParams::new(2.0, 0.0, 0.0)?;
    let ps = ProfileSet::from_half_spaces(minus, plus);
    let grid = Grid1D::default();
    let cfg = SweepConfig {
        window: (-3.8, 3.8),
        ..Default::default()
    };
    let branches = sweep_branches(&grid, &ps, &cfg, &SpuriousFilter::for_grid(&grid))?;

    println!(
        "{:>3} {:>7} {:>7} {:>9} {:>9} {:>9}  ends",
        "id", "ζ0", "ζ1", "μ0", "μ1", "min ovl"
    );
    for b in &branches {
        let label = match classify_asymptotics(b, minus, plus, 5e-2) {
            Ok(c) => format!(
                "{:?} / {:?}",
                c.asymptote_lo.map(|l| l.kind),
                c.asymptote_hi.map(|l| (l.kind, l.value))
            ),
            Err(e) => e.to_string(),
        };
        println!(
            "{:>3} {:>7.2} {:>7.2} {:>9.4} {:>9.4} {:>9.4}  {label}",
            b.id,
            b.zetas[0],
            b.zetas[b.len() - 1],
            b.first_mu(),
            b.last_mu(),
            b.min_overlap
        );
    }

    std::fs::create_dir_all(&out)?;
    write_branches_csv(&branches, File::create(out.join("branches.csv"))?)?;
    let svg = branches_svg(
        "field flip",
        &branches,
        (cfg.zeta_min, cfg.zeta_max),
        cfg.window,
        &[0.1, 1.0],
    );
    std::fs::write(out.join("branches.svg"), svg)?;
    println!("wrote {}", out.display());
    Ok(())
}
