//! Brute-force two-dimensional check of `σ_I = Tr i[H,P] φ'(H)`.
//!
//! The full operator is assembled on an `x`-grid (same staggered stencil as
//! the fiber) times a periodic `y`-grid and diagonalized densely.
//!
//! `D_y` is the Fourier-collocation derivative over a band of `Ny` consecutive
//! momenta `2πn/Ly`, so with no perturbation the `y`-Fourier blocks are exactly
//! the fiber matrices at those momenta. The staggered `x`-stencil has a second
//! Dirac point where `ζ - A2(x) = 2/h_x`; the band is shifted toward negative
//! `ζ` just enough to keep `(ζ_max - min A2) h_x / 2 <= 0.8`.
//!
//! The trace uses `i[H,P] = P'(y) σ2` pointwise. The literal commutator of the
//! discrete matrices has zero trace on a finite periodic grid (the rise of `P`
//! is cancelled by its fall at the seam), so it is only evaluated on the band
//! `|y| < Ly/4` as a diagnostic.

use std::io::Write;
use std::time::Instant;

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::fiber::{BoundaryCondition, Grid1D, DOUBLER_LIMIT};
use crate::profiles::{DensityProfile, ProfileSet, Shape, SwitchProfile};

/// Largest dense dimension `2 N Ny` accepted.
pub const DENSE_BUDGET: usize = 6000;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2D {
    pub grid_x: Grid1D,
    #[serde(rename = "Ly")]
    pub ly: f64,
    #[serde(rename = "Ny")]
    pub ny: usize,
    /// Band offset `j`: momenta `2πn/Ly` for `n = j - Ny/2, ..., j + Ny/2 - 1`.
    /// Chosen from the profiles when absent.
    #[serde(default)]
    pub momentum_shift: Option<i64>,
}

impl Default for Grid2D {
    fn default() -> Self {
        Grid2D {
            grid_x: Grid1D {
                half_width: 12.0,
                sites: 48,
                bc: BoundaryCondition::Dirichlet,
            },
            ly: 24.0,
            ny: 32,
            momentum_shift: None,
        }
    }
}

impl Grid2D {
    pub fn dim(&self) -> usize {
        2 * self.grid_x.sites * self.ny
    }

    pub fn validate(&self) -> Result<()> {
        self.grid_x.validate()?;
        if self.ny < 16 {
            return Err(FlowError::InvalidGrid(format!(
                "need Ny >= 16, got {}",
                self.ny
            )));
        }
        if !(self.ly > 0.0 && self.ly.is_finite()) {
            return Err(FlowError::InvalidGrid(format!(
                "Ly must be positive, got {}",
                self.ly
            )));
        }
        if self.dim() > DENSE_BUDGET {
            return Err(FlowError::BudgetExceeded {
                dim: self.dim(),
                budget: DENSE_BUDGET,
            });
        }
        Ok(())
    }

    pub fn hy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// `y_l = -Ly/2 + l Ly/Ny`; the seam sits at `±Ly/2`.
    pub fn y(&self, l: usize) -> f64 {
        -0.5 * self.ly + self.hy() * l as f64
    }

    /// Band momenta `2πn/Ly`, ascending.
    pub fn momenta(&self) -> Vec<f64> {
        let first = self.momentum_shift.unwrap_or(0) - (self.ny / 2) as i64;
        (0..self.ny as i64)
            .map(|k| 2.0 * std::f64::consts::PI * (first + k) as f64 / self.ly)
            .collect()
    }

    /// Largest band offset `j <= 0` keeping the band clear of the `x`-doubler.
    pub fn safe_shift(&self, ps: &ProfileSet) -> i64 {
        let gx = &self.grid_x;
        let min_a2 = gx
            .points()
            .iter()
            .map(|&x| ps.magnetic_potential(x))
            .fold(f64::INFINITY, f64::min);
        let zeta_cap = DOUBLER_LIMIT * 2.0 / gx.spacing() + min_a2;
        let top = (zeta_cap * self.ly / (2.0 * std::f64::consts::PI)).floor() as i64;
        (top - (self.ny / 2) as i64 + 1).min(0)
    }

    /// Copy with the band offset filled in.
    pub fn resolved(&self, ps: &ProfileSet) -> Grid2D {
        Grid2D {
            momentum_shift: Some(self.momentum_shift.unwrap_or_else(|| self.safe_shift(ps))),
            ..*self
        }
    }

    fn index(&self, iy: usize, ix: usize, s: usize) -> usize {
        (iy * self.grid_x.sites + ix) * 2 + s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    /// `amplitude · bump(x / support)`.
    MultX,
    /// `amplitude · bump(x / support) · bump(y / support)`.
    MultXy,
    /// `amplitude · <y>^(-1-δ)`.
    DecayY,
    /// `amplitude · <x,y>^(-2-δ)`.
    DecayXy,
}

/// Scalar (σ0) multiplication perturbation `W`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub amplitude: f64,
    #[serde(default = "default_support")]
    pub support: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_support() -> f64 {
    2.0
}

fn default_delta() -> f64 {
    0.5
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

impl PerturbationSpec {
    pub fn new(kind: PerturbationKind, amplitude: f64) -> Self {
        PerturbationSpec {
            kind,
            amplitude,
            support: default_support(),
            delta: default_delta(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.amplitude.is_finite() {
            return Err(FlowError::InvalidPerturbation(
                "amplitude must be finite".into(),
            ));
        }
        match self.kind {
            PerturbationKind::MultX | PerturbationKind::MultXy if !(self.support > 0.0) => {
                Err(FlowError::InvalidPerturbation(format!(
                    "support must be positive, got {}",
                    self.support
                )))
            }
            PerturbationKind::DecayY | PerturbationKind::DecayXy if !(self.delta > 0.0) => {
                Err(FlowError::InvalidPerturbation(format!(
                    "decay exponent needs delta > 0, got {}",
                    self.delta
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let a = self.amplitude;
        match self.kind {
            PerturbationKind::MultX => a * bump(x / self.support),
            PerturbationKind::MultXy => a * bump(x / self.support) * bump(y / self.support),
            PerturbationKind::DecayY => a * (1.0 + y * y).powf(-0.5 * (1.0 + self.delta)),
            PerturbationKind::DecayXy => a * (1.0 + x * x + y * y).powf(-0.5 * (2.0 + self.delta)),
        }
    }
}

/// Fourier-collocation derivative on the periodic `y`-grid (Hermitian).
pub fn spectral_dy(g: &Grid2D) -> Mat<Complex64> {
    let ny = g.ny;
    let ks = g.momenta();
    let mut d = Mat::<Complex64>::zeros(ny, ny);
    for l in 0..ny {
        for lp in l..ny {
            let dy = g.y(l) - g.y(lp);
            let s: Complex64 = ks
                .iter()
                .map(|&k| k * Complex64::from_polar(1.0, k * dy))
                .sum();
            let s = s / ny as f64;
            if l == lp {
                d[(l, l)] = Complex64::new(s.re, 0.0);
            } else {
                d[(l, lp)] = s;
                d[(lp, l)] = s.conj();
            }
        }
    }
    d
}

/// Dense `H + coupling · W` on the product grid, index `(iy·N + ix)·2 + s`.
pub fn assemble_2d(
    g: &Grid2D,
    ps: &ProfileSet,
    w: Option<&PerturbationSpec>,
    coupling: f64,
) -> Result<Mat<Complex64>> {
    g.validate()?;
    ps.validate()?;
    if let Some(w) = w {
        w.validate()?;
    }
    if !(0.0..=1.0).contains(&coupling) {
        return Err(FlowError::InvalidPerturbation(format!(
            "coupling {coupling} outside [0, 1]"
        )));
    }
    let g = &g.resolved(ps);
    let gx = &g.grid_x;
    let n = gx.sites;
    let h = gx.spacing();
    let dim = g.dim();
    let mut a = Mat::<Complex64>::zeros(dim, dim);
    let set = |a: &mut Mat<Complex64>, r: usize, c: usize, v: Complex64| {
        a[(r, c)] += v;
        a[(c, r)] += v.conj();
    };
    let links = if gx.bc == BoundaryCondition::Periodic {
        n
    } else {
        n - 1
    };
    let dy = spectral_dy(g);
    for iy in 0..g.ny {
        let y = g.y(iy);
        for ix in 0..n {
            let x = gx.x(ix);
            let (m, v) = (ps.m.evaluate(x), ps.v.evaluate(x));
            let wv = w.map_or(0.0, |w| coupling * w.evaluate(x, y));
            let (r1, r2) = (g.index(iy, ix, 0), g.index(iy, ix, 1));
            a[(r1, r1)] += Complex64::new(v + m + wv, 0.0);
            a[(r2, r2)] += Complex64::new(v - m + wv, 0.0);
            // -i (-A2 - 1/h) from the forward difference and the σ2 potential term
            set(&mut a, r1, r2, -I * (-ps.magnetic_potential(x) - 1.0 / h));
        }
        for ix in 0..links {
            let k = (ix + 1) % n;
            set(&mut a, g.index(iy, ix, 0), g.index(iy, k, 1), -I / h);
        }
    }
    // D_y σ2: (1,2) block -i D_y, (2,1) block its adjoint
    for l in 0..g.ny {
        for lp in 0..g.ny {
            let c = -I * dy[(l, lp)];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for ix in 0..n {
                set(&mut a, g.index(l, ix, 0), g.index(lp, ix, 1), c);
            }
        }
    }
    Ok(a)
}

/// Switch `P(y)` from 0 to 1, required to be flat within `Ly/4` of the seam.
pub fn projection_profile(t_lo: f64, t_hi: f64) -> Result<SwitchProfile> {
    SwitchProfile::new(0.0, 1.0, t_lo, t_hi, Shape::SmoothBump)
}

fn check_seam(g: &Grid2D, p: &SwitchProfile) -> Result<()> {
    if p.lower != 0.0 || p.upper != 1.0 {
        return Err(FlowError::SeamViolation(format!(
            "P must switch from 0 to 1, got {} to {}",
            p.lower, p.upper
        )));
    }
    let limit = 0.25 * g.ly;
    if p.t_lo < -limit || p.t_hi > limit {
        return Err(FlowError::SeamViolation(format!(
            "transition [{}, {}] must lie within [-{limit}, {limit}]",
            p.t_lo, p.t_hi
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// `2π Σ_k φ'(λ_k) <v_k, P'(y) σ2 v_k>`.
    pub two_pi_sigma: f64,
    /// Same sum restricted to rows within `Ly/4` of the seam.
    pub seam_residual: f64,
    /// `2π` times the literal-commutator trace restricted to `|y| < Ly/4`.
    pub literal_band: f64,
    pub dim: usize,
    pub states_in_window: usize,
    pub seconds: f64,
}

/// Dense evaluation of `2π Tr i[H,P] φ'(H)` for a matrix from [`assemble_2d`]
/// built on `g.resolved(ps)`.
pub fn trace_conductivity(
    hmat: &Mat<Complex64>,
    g: &Grid2D,
    p: &SwitchProfile,
    dens: &DensityProfile,
) -> Result<TraceReport> {
    g.validate()?;
    if g.momentum_shift.is_none() {
        return Err(FlowError::InvalidGrid(
            "trace needs the resolved grid the matrix was assembled on".into(),
        ));
    }
    check_seam(g, p)?;
    let dim = g.dim();
    if hmat.nrows() != dim || hmat.ncols() != dim {
        return Err(FlowError::InvalidGrid(format!(
            "matrix is {}x{}, grid needs {dim}",
            hmat.nrows(),
            hmat.ncols()
        )));
    }
    let t = Instant::now();
    let evd = hmat.self_adjoint_eigen(faer::Side::Lower).map_err(|e| {
        FlowError::Eigensolver(format!(
            "dense Hermitian solve of dimension {dim} failed: {e:?}"
        ))
    })?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = g.grid_x.sites;
    let pprime: Vec<f64> = (0..g.ny).map(|l| p.derivative(g.y(l))).collect();
    let seam_band: Vec<bool> = (0..g.ny).map(|l| g.y(l).abs() >= 0.25 * g.ly).collect();
    let dy = spectral_dy(g);
    let pv: Vec<f64> = (0..g.ny).map(|l| p.evaluate(g.y(l))).collect();
    let mut total = 0.0;
    let mut seam = 0.0;
    let mut literal = 0.0;
    let mut count = 0;
    for k in 0..dim {
        let weight = dens.phi_prime(s[k].re);
        if weight == 0.0 {
            continue;
        }
        count += 1;
        let v = |l: usize, ix: usize, sp: usize| u[(g.index(l, ix, sp), k)];
        for l in 0..g.ny {
            // <v, σ2 v> on row l is 2 Im(conj(v1) v2)
            let row: f64 = (0..n)
                .map(|ix| 2.0 * (v(l, ix, 0).conj() * v(l, ix, 1)).im)
                .sum();
            let c = weight * pprime[l] * row;
            total += c;
            if seam_band[l] {
                seam += c;
            }
        }
        // literal i[H, P] on the central band: only the y block fails to commute with P
        for l in 0..g.ny {
            if seam_band[l] {
                continue;
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for lp in 0..g.ny {
                let dp = pv[lp] - pv[l];
                if dp == 0.0 {
                    continue;
                }
                // (1,2) block -i D_y and (2,1) block i D_y, each times i (P(y') - P(y))
                let upper = dy[(l, lp)] * dp;
                let lower = -dy[(l, lp)] * dp;
                for ix in 0..n {
                    acc += v(l, ix, 0).conj() * upper * v(lp, ix, 1)
                        + v(l, ix, 1).conj() * lower * v(lp, ix, 0);
                }
            }
            literal += weight * acc.re;
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    Ok(TraceReport {
        two_pi_sigma: two_pi * total,
        seam_residual: two_pi * seam,
        literal_band: two_pi * literal,
        dim,
        states_in_window: count,
        seconds: t.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub coupling: f64,
    pub two_pi_sigma: f64,
    pub seam_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityTable {
    pub perturbation: PerturbationSpec,
    pub reference: i64,
    pub rows: Vec<StabilityRow>,
    pub stable: bool,
    /// Smallest coupling whose value no longer rounds to `reference`.
    pub breakdown: Option<f64>,
}

/// Conductivity of `H + c W` for each coupling `c`; stable iff every value
/// rounds to the unperturbed integer.
pub fn stability_experiment(
    base: &ProfileSet,
    w: &PerturbationSpec,
    couplings: &[f64],
    g: &Grid2D,
    p: &SwitchProfile,
    dens: &DensityProfile,
) -> Result<StabilityTable> {
    stability_with_baseline(base, w, couplings, g, p, dens, None)
}

/// As [`stability_experiment`], reusing an already computed unperturbed row.
pub fn stability_with_baseline(
    base: &ProfileSet,
    w: &PerturbationSpec,
    couplings: &[f64],
    g: &Grid2D,
    p: &SwitchProfile,
    dens: &DensityProfile,
    baseline: Option<StabilityRow>,
) -> Result<StabilityTable> {
    w.validate()?;
    let g = &g.resolved(base);
    let mut todo: Vec<f64> = couplings
        .iter()
        .copied()
        .filter(|&c| c != 0.0 || baseline.is_none())
        .collect();
    if baseline.is_none() && !todo.contains(&0.0) {
        todo.push(0.0);
    }
    let mut rows: Vec<StabilityRow> = todo
        .par_iter()
        .map(|&c| {
            let h = assemble_2d(g, base, if c == 0.0 { None } else { Some(w) }, c)?;
            let r = trace_conductivity(&h, g, p, dens)?;
            Ok(StabilityRow {
                coupling: c,
                two_pi_sigma: r.two_pi_sigma,
                seam_residual: r.seam_residual,
            })
        })
        .collect::<Result<_>>()?;
    if let Some(b) = baseline {
        if b.coupling != 0.0 {
            return Err(FlowError::InvalidPerturbation(format!(
                "baseline has coupling {}",
                b.coupling
            )));
        }
        rows.push(b);
    }
    let reference = rows
        .iter()
        .find(|r| r.coupling == 0.0)
        .expect("baseline present")
        .two_pi_sigma
        .round() as i64;
    let mut rows: Vec<StabilityRow> = rows
        .into_iter()
        .filter(|r| couplings.contains(&r.coupling))
        .collect();
    rows.sort_by(|a, b| a.coupling.total_cmp(&b.coupling));
    let breakdown = rows
        .iter()
        .find(|r| r.two_pi_sigma.round() as i64 != reference)
        .map(|r| r.coupling);
    Ok(StabilityTable {
        perturbation: *w,
        reference,
        rows,
        stable: breakdown.is_none(),
        breakdown,
    })
}

/// CSV with columns `scenario, coupling, two_pi_sigma, seam_residual`.
pub fn write_oracle_csv<W: Write>(rows: &[(String, StabilityRow)], mut out: W) -> Result<()> {
    writeln!(out, "scenario,coupling,two_pi_sigma,seam_residual")?;
    for (name, r) in rows {
        writeln!(
            out,
            "{},{},{},{}",
            name, r.coupling, r.two_pi_sigma, r.seam_residual
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk::HalfSpaceParams;
    use crate::fiber::assemble_fiber;

    fn small() -> Grid2D {
        Grid2D {
            grid_x: Grid1D {
                half_width: 6.0,
                sites: 24,
                bc: BoundaryCondition::Dirichlet,
            },
            ly: 16.0,
            ny: 16,
            momentum_shift: None,
        }
    }

    fn fig2() -> ProfileSet {
        ProfileSet::from_half_spaces(
            HalfSpaceParams::new(-2.0, -2.0, -0.1).unwrap(),
            HalfSpaceParams::new(2.0, 2.0, 0.1).unwrap(),
        )
    }

    #[test]
    fn hermitian_bit_exact() {
        for momentum_shift in [Some(0), Some(-2)] {
            let g = Grid2D {
                momentum_shift,
                ..small()
            };
            let w = PerturbationSpec::new(PerturbationKind::DecayXy, 0.3);
            let a = assemble_2d(&g, &fig2(), Some(&w), 0.7).unwrap();
            for i in 0..g.dim() {
                for j in 0..g.dim() {
                    assert_eq!(a[(i, j)], a[(j, i)].conj());
                }
            }
        }
    }

    /// `F_q^† A F_q` for the plane wave `e^{i q y_l} / sqrt(Ny)` in every `(x, spin)` slot.
    fn fourier_block(a: &Mat<Complex64>, g: &Grid2D, q: f64) -> Mat<Complex64> {
        let n2 = 2 * g.grid_x.sites;
        let phase: Vec<Complex64> = (0..g.ny)
            .map(|l| Complex64::from_polar(1.0 / (g.ny as f64).sqrt(), q * g.y(l)))
            .collect();
        Mat::from_fn(n2, n2, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..g.ny {
                for lp in 0..g.ny {
                    acc += phase[l].conj() * a[(l * n2 + r, lp * n2 + c)] * phase[lp];
                }
            }
            acc
        })
    }

    #[test]
    fn fourier_blocks_are_fibers() {
        let ps = fig2();
        let g = Grid2D {
            momentum_shift: Some(-3),
            ..small()
        };
        let a = assemble_2d(&g, &ps, None, 0.0).unwrap();
        for &zeta in &g.momenta() {
            let b = fourier_block(&a, &g, zeta);
            let f = assemble_fiber(&g.grid_x, &ps, zeta).unwrap().to_dense();
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    assert!(
                        (b[(r, c)] - f[(r, c)]).norm() <= 1e-12,
                        "zeta={zeta} ({r},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn band_avoids_the_doubler() {
        let ps = fig2();
        let g = Grid2D::default();
        let h = g.grid_x.spacing();
        let dz = 2.0 * std::f64::consts::PI / g.ly;
        let r = g.resolved(&ps);
        assert!(r.momentum_shift.unwrap() < 0);
        let min_a2 = g
            .grid_x
            .points()
            .iter()
            .map(|&x| ps.magnetic_potential(x))
            .fold(f64::INFINITY, f64::min);
        let zmax = *r.momenta().last().unwrap() - min_a2;
        assert!(zmax * h / 2.0 <= DOUBLER_LIMIT);
        assert!((zmax + dz) * h / 2.0 > DOUBLER_LIMIT);
        let g16 = Grid2D { ny: 16, ..g };
        assert_eq!(g16.resolved(&ps).momentum_shift, Some(0));
        let pinned = Grid2D {
            momentum_shift: Some(3),
            ..g
        };
        assert_eq!(pinned.resolved(&ps), pinned);
    }

    #[test]
    fn zero_coupling_is_unperturbed() {
        let g = small();
        let w = PerturbationSpec::new(PerturbationKind::MultX, 0.5);
        assert_eq!(
            assemble_2d(&g, &fig2(), Some(&w), 0.0).unwrap(),
            assemble_2d(&g, &fig2(), None, 0.0).unwrap()
        );
    }

    #[test]
    fn budget_and_seam_are_enforced() {
        let mut g = Grid2D::default();
        g.ny = 64;
        assert!(matches!(
            assemble_2d(&g, &fig2(), None, 0.0),
            Err(FlowError::BudgetExceeded { .. })
        ));
        let g = small().resolved(&fig2());
        let a = assemble_2d(&g, &fig2(), None, 0.0).unwrap();
        let d = DensityProfile::new(-0.5, 0.5).unwrap();
        let p = projection_profile(-1.0, 1.0).unwrap();
        let unresolved = Grid2D {
            momentum_shift: None,
            ..g
        };
        assert!(matches!(
            trace_conductivity(&a, &unresolved, &p, &d),
            Err(FlowError::InvalidGrid(_))
        ));
        let p = projection_profile(-1.0, 6.0).unwrap();
        assert!(matches!(
            trace_conductivity(&a, &g, &p, &d),
            Err(FlowError::SeamViolation(_))
        ));
    }

    #[test]
    fn identical_half_spaces_carry_no_current() {
        let h = HalfSpaceParams::new(2.0, 2.0, 0.1).unwrap();
        let ps = ProfileSet::uniform(h);
        let g = small().resolved(&ps);
        let a = assemble_2d(&g, &ps, None, 0.0).unwrap();
        let p = projection_profile(-1.0, 1.0).unwrap();
        let r = trace_conductivity(&a, &g, &p, &DensityProfile::new(-0.5, 0.5).unwrap()).unwrap();
        assert!(r.two_pi_sigma.abs() < 0.05, "{r:?}");
        assert_eq!(r.seam_residual, 0.0);
    }

    #[test]
    fn small_grid_trace_is_near_one() {
        let g = small().resolved(&fig2());
        let a = assemble_2d(&g, &fig2(), None, 0.0).unwrap();
        let p = projection_profile(-1.0, 1.0).unwrap();
        let r = trace_conductivity(&a, &g, &p, &DensityProfile::new(-0.5, 0.5).unwrap()).unwrap();
        assert!((r.two_pi_sigma - 1.0).abs() < 0.3, "{r:?}");
    }

    #[test]
    fn perturbation_shapes() {
        let w = PerturbationSpec::new(PerturbationKind::MultX, 0.5);
        assert_eq!(w.evaluate(2.0, 0.0), 0.0);
        assert_eq!(w.evaluate(0.0, 5.0), 0.5);
        let w = PerturbationSpec {
            delta: 0.0,
            ..PerturbationSpec::new(PerturbationKind::DecayY, 1.0)
        };
        assert!(w.validate().is_err());
        let w = PerturbationSpec::new(PerturbationKind::DecayXy, 0.3);
        assert!((w.evaluate(0.0, 0.0) - 0.3).abs() < 1e-15);
    }
}
