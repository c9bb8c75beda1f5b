//! Eigenvalues of a single fiber operator `Ĥ(ζ)` compared with the closed-form
//! Landau levels, plus the effect of the boundary-mode filter. Grids with a
//! doubler ratio above 1 pick up lattice-doubler states in the interior.
//!
//! ```text
//! cargo run --example fiber_eigensolve
//! ```

use interface_flow::bulk::{landau_levels, HalfSpaceParams};
use interface_flow::fiber::{
    assemble_fiber, eig_window, filter_spurious, BoundaryCondition, Grid1D, SpuriousFilter,
};
use interface_flow::profiles::ProfileSet;

fn main() -> interface_flow::Result<()> {
    let hp = HalfSpaceParams::new(2.0, 2.0, 0.0)?;
    let ps = ProfileSet::uniform(hp);
    let exact = landau_levels(hp, 4)?;
    for sites in [200, 400, 800, 1600] {
        let grid = Grid1D::new(12.0, sites, BoundaryCondition::Dirichlet)?;
        let a = assemble_fiber(&grid, &ps, 0.0)?;
        let all = eig_window(&a, -3.8, 3.8)?;
        let found = all.len();
        let pairs = filter_spurious(all, &grid, &SpuriousFilter::for_grid(&grid));
        let err = pairs
            .iter()
            .map(|p| {
                exact
                    .levels
                    .iter()
                    .map(|l| (l - p.mu).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        let res = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        println!(
            "N = {sites:>5}: doubler ratio {:.2}, {} of {found} eigenvalues kept, max level error {err:.3e}, max residual {res:.1e}",
            grid.doubler_ratio(&ps, 0.0),
            pairs.len()
        );
    }

    // the hard walls carry edge states at every ζ; the filter removes them by their weight near the walls
    let grid = Grid1D::default();
    let filter = SpuriousFilter::for_grid(&grid);
    for zeta in [0.0, 20.0, 38.0] {
        let a = assemble_fiber(&grid, &ps, zeta)?;
        let all = eig_window(&a, -3.8, 3.8)?;
        let kept = filter_spurious(all.clone(), &grid, &filter);
        let masses: Vec<String> = all
            .iter()
            .map(|p| format!("{:.2}", filter.boundary_mass(&grid, &p.psi)))
            .collect();
        println!(
            "ζ = {zeta:>4}: {} found, {} kept, boundary mass [{}]",
            all.len(),
            kept.len(),
            masses.join(", ")
        );
    }
    Ok(())
}
