//! Quantization of the dense trace under perturbations: a compactly supported
//! potential strip, a decaying `W(x, y)`, and a weak `W(y)`. A large strip
//! amplitude closes the gap and shows where quantization breaks.
//!
//! Uses a reduced `Ny = 16` grid so it finishes in under a minute.
//!
//! ```text
//! cargo run --example stability
//! ```

use interface_flow::bulk::HalfSpaceParams;
use interface_flow::oracle2d::{
    projection_profile, stability_experiment, Grid2D, PerturbationKind, PerturbationSpec,
};
use interface_flow::profiles::{DensityProfile, ProfileSet};

fn main() -> interface_flow::Result<()> {
    let ps = ProfileSet::from_half_spaces(
        HalfSpaceParams::new(-2.0, -2.0, -0.1)?,
        HalfSpaceParams::new(2.0, 2.0, 0.1)?,
    );
    let g = Grid2D {
        ny: 16,
        ..Grid2D::default()
    };
    let p = projection_profile(-5.0, 5.0)?;
    let dens = DensityProfile::new(-1.5, 0.6)?;
    let runs = [
        (
            PerturbationSpec::new(PerturbationKind::MultX, 0.5),
            vec![0.5, 1.0],
        ),
        (
            PerturbationSpec::new(PerturbationKind::DecayXy, 0.3),
            vec![1.0],
        ),
        (
            PerturbationSpec::new(PerturbationKind::DecayY, 1.0),
            vec![0.05],
        ),
        (
            PerturbationSpec::new(PerturbationKind::MultX, 6.0),
            vec![0.25, 0.5, 1.0],
        ),
    ];
    for (w, couplings) in runs {
        let t = stability_experiment(&ps, &w, &couplings, &g, &p, &dens)?;
        let vals: Vec<String> = t
            .rows
            .iter()
            .map(|r| format!("{}: {:.4}", r.coupling, r.two_pi_sigma))
            .collect();
        let verdict = match t.breakdown {
            None => "stable".to_string(),
            Some(c) => format!("breaks at {c}"),
        };
        println!(
            "{:?} a={}: reference {} | {} | {verdict}",
            w.kind,
            w.amplitude,
            t.reference,
            vals.join(", ")
        );
    }
    Ok(())
}
