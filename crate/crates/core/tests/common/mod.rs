#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use interface_flow::branches::{sweep_branches, Branch, SweepConfig};
use interface_flow::bulk::{gap_components, HalfSpaceParams};
use interface_flow::fiber::{
    assemble_fiber, BoundaryCondition, FiberMatrix, Grid1D, SpuriousFilter,
};
use interface_flow::profiles::{DensityProfile, ProfileSet, Shape, SwitchProfile};

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn hp(b: f64, m: f64, v: f64) -> HalfSpaceParams {
    HalfSpaceParams::new(b, m, v).unwrap()
}

pub fn fig2_top_right() -> (HalfSpaceParams, HalfSpaceParams) {
    (hp(-2.0, -2.0, -0.1), hp(2.0, 2.0, 0.1))
}

fn signed(rng: &mut Rng8, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }
}

/// `|B| ∈ [0.5, 4]` with a random sign, `|m| ≤ 3`, `|V| ≤ 2`.
pub fn random_half_space(rng: &mut Rng8) -> HalfSpaceParams {
    hp(
        signed(rng, 0.5, 4.0),
        rng.gen_range(-3.0..=3.0),
        rng.gen_range(-2.0..=2.0),
    )
}

/// A wall between random plateaus with a random transition inside `[-3, 3]`.
pub fn random_wall(rng: &mut Rng8, lower: f64, upper: f64) -> SwitchProfile {
    let a = rng.gen_range(-3.0..2.5);
    let b = rng.gen_range(a + 0.2..=3.0);
    let shape = if rng.gen_bool(0.8) {
        Shape::SmoothBump
    } else {
        Shape::LinearRamp
    };
    SwitchProfile::new(lower, upper, a, b, shape).unwrap()
}

pub fn random_profiles(rng: &mut Rng8) -> ProfileSet {
    let (bl, bu) = (signed(rng, 0.5, 4.0), signed(rng, 0.5, 4.0));
    let (ml, mu) = (rng.gen_range(-3.0..=3.0), rng.gen_range(-3.0..=3.0));
    let (vl, vu) = (rng.gen_range(-2.0..=2.0), rng.gen_range(-2.0..=2.0));
    ProfileSet::new(
        random_wall(rng, bl, bu),
        random_wall(rng, ml, mu),
        random_wall(rng, vl, vu),
    )
    .unwrap()
}

/// An admissible interface with `α` drawn from the middle of a random gap
/// component of width at least 0.1 inside `[-limit, limit]`.
#[derive(Debug, Clone, Copy)]
pub struct Scenario {
    pub minus: HalfSpaceParams,
    pub plus: HalfSpaceParams,
    pub alpha: f64,
    pub gap: (f64, f64),
}

pub fn random_scenario(rng: &mut Rng8, limit: f64) -> Scenario {
    loop {
        let minus = random_half_space(rng);
        let plus = random_half_space(rng);
        let gaps: Vec<(f64, f64)> = gap_components(minus, plus, -limit, limit)
            .into_iter()
            .filter(|(a, b)| b - a >= 0.1)
            .collect();
        if gaps.is_empty() {
            continue;
        }
        let gap = gaps[rng.gen_range(0..gaps.len())];
        let t = rng.gen_range(0.2..=0.8);
        return Scenario {
            minus,
            plus,
            alpha: gap.0 + t * (gap.1 - gap.0),
            gap,
        };
    }
}

/// A density profile whose transition lies in the middle 80% of `gap`.
pub fn random_density(rng: &mut Rng8, gap: (f64, f64)) -> DensityProfile {
    let w = gap.1 - gap.0;
    let (lo, hi) = (gap.0 + 0.1 * w, gap.1 - 0.1 * w);
    let e1 = rng.gen_range(lo..hi - 0.05 * w);
    let e2 = rng.gen_range(e1 + 0.02 * w..=hi);
    DensityProfile::new(e1, e2).unwrap()
}

pub struct Swept {
    pub grid: Grid1D,
    pub cfg: SweepConfig,
    pub branches: Vec<Branch>,
}

/// Sweep `ζ ∈ [-8, 8]` on an auto-scaled grid.
pub fn sweep_auto(
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
    window: (f64, f64),
) -> interface_flow::Result<Swept> {
    let ps = ProfileSet::from_half_spaces(minus, plus);
    let cfg = SweepConfig {
        window,
        ..SweepConfig::default()
    };
    let grid = Grid1D::auto_scaled(&ps, (cfg.zeta_min, cfg.zeta_max), window, 0.5)?;
    let branches = sweep_branches(&grid, &ps, &cfg, &SpuriousFilter::for_grid(&grid))?;
    Ok(Swept {
        grid,
        cfg,
        branches,
    })
}

pub fn small_grid(rng: &mut Rng8) -> Grid1D {
    let bc = if rng.gen_bool(0.5) {
        BoundaryCondition::Dirichlet
    } else {
        BoundaryCondition::Periodic
    };
    Grid1D::new(rng.gen_range(4.0..=10.0), rng.gen_range(16..=60), bc).unwrap()
}

pub fn dense_spectrum(a: &FiberMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = a
        .to_dense()
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .unwrap()
        .into_iter()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn sup_on_grid(grid: &Grid1D, f: impl Fn(f64) -> f64) -> f64 {
    grid.points()
        .into_iter()
        .map(|x| f(x).abs())
        .fold(0.0, f64::max)
}

// Property checks shared by the proptest suites and the acceptance runner.
// Each returns the size of the violation (0 when the property holds).

/// Largest `|A_ij - conj(A_ji)|` of the assembled matrix.
pub fn hermiticity_defect(grid: &Grid1D, ps: &ProfileSet, zeta: f64) -> f64 {
    let a = assemble_fiber(grid, ps, zeta).unwrap().to_dense();
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `max_k |μ_k + μ_{n-1-k}|` with the mass and potential switched off.
pub fn chiral_defect(grid: &Grid1D, b: SwitchProfile, zeta: f64) -> f64 {
    let ps = ProfileSet::new(
        b,
        SwitchProfile::constant(0.0),
        SwitchProfile::constant(0.0),
    )
    .unwrap();
    let s = dense_spectrum(&assemble_fiber(grid, &ps, zeta).unwrap());
    let n = s.len();
    (0..n)
        .map(|k| (s[k] + s[n - 1 - k]).abs())
        .fold(0.0, f64::max)
}

/// `max_k |μ_k(V + c) - μ_k(V) - c|`.
pub fn shift_defect(grid: &Grid1D, ps: &ProfileSet, zeta: f64, c: f64) -> f64 {
    let mut shifted = *ps;
    shifted.v.lower += c;
    shifted.v.upper += c;
    let a = dense_spectrum(&assemble_fiber(grid, ps, zeta).unwrap());
    let b = dense_spectrum(&assemble_fiber(grid, &shifted, zeta).unwrap());
    a.iter()
        .zip(&b)
        .map(|(x, y)| (y - x - c).abs())
        .fold(0.0, f64::max)
}

/// Excess of `max_k |μ_k(1) - μ_k(2)|` over `‖Δm‖∞ + ‖ΔV‖∞`; zero or negative when the bound holds.
pub fn weyl_excess(grid: &Grid1D, p1: &ProfileSet, p2: &ProfileSet, zeta: f64) -> f64 {
    let a = dense_spectrum(&assemble_fiber(grid, p1, zeta).unwrap());
    let b = dense_spectrum(&assemble_fiber(grid, p2, zeta).unwrap());
    let dm = sup_on_grid(grid, |x| p1.m.evaluate(x) - p2.m.evaluate(x));
    let dv = sup_on_grid(grid, |x| p1.v.evaluate(x) - p2.v.evaluate(x));
    let gap = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    gap - (dm + dv)
}
