//! Dense two-dimensional trace `2π Tr i[H,P] φ'(H)` on the interface with both
//! field and mass flipped, for two `y` resolutions, several projections and two
//! density windows.
//!
//! ```text
//! cargo run --example trace_oracle
//! ```

use interface_flow::bulk::HalfSpaceParams;
use interface_flow::oracle2d::{assemble_2d, projection_profile, trace_conductivity, Grid2D};
use interface_flow::profiles::{DensityProfile, ProfileSet};

fn main() -> interface_flow::Result<()> {
    let ps = ProfileSet::from_half_spaces(
        HalfSpaceParams::new(-2.0, -2.0, -0.1)?,
        HalfSpaceParams::new(2.0, 2.0, 0.1)?,
    );
    println!(
        "{:>4} {:>6} {:>12} {:>12} {:>10} {:>10} {:>8}",
        "Ny", "shift", "φ' on", "P", "2πσ", "literal", "secs"
    );
    for ny in [16, 32] {
        let g = Grid2D {
            ny,
            ..Grid2D::default()
        }
        .resolved(&ps);
        let h = assemble_2d(&g, &ps, None, 0.0)?;
        for (e1, e2) in [(-0.5, 0.5), (-1.5, 0.6)] {
            let dens = DensityProfile::new(e1, e2)?;
            for (lo, hi) in [(-1.0, 1.0), (-3.0, 3.0), (-5.0, 5.0), (-5.5, 4.0)] {
                let p = projection_profile(lo, hi)?;
                let r = trace_conductivity(&h, &g, &p, &dens)?;
                println!(
                    "{:>4} {:>6} {:>12} {:>12} {:>10.6} {:>10.6} {:>8.1}",
                    ny,
                    g.momentum_shift.unwrap_or(0),
                    format!("[{e1},{e2}]"),
                    format!("[{lo},{hi}]"),
                    r.two_pi_sigma,
                    r.literal_band,
                    r.seconds
                );
            }
        }
    }
    Ok(())
}
