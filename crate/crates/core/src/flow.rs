//! Spectral flow through a level `α` and the interface conductivity.

use serde::{Deserialize, Serialize};

use crate::branches::{validate_window, Branch, SweepConfig};
use crate::bulk::{predicted_sf, FlowPrediction, HalfSpaceParams};
use crate::error::{FlowError, Result};
use crate::fiber::{assemble_fiber, Grid1D};
use crate::profiles::{DensityProfile, ProfileSet};

/// Shift applied to `α` when it coincides with a sample value.
pub const NODE_SHIFT: f64 = 1e-9;
/// Required agreement of the endpoint sum and the quadrature form.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub branch_id: usize,
    pub zeta: f64,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub alpha: f64,
    /// Level actually used; differs from `alpha` by [`NODE_SHIFT`] multiples
    /// when a sample landed exactly on it.
    pub alpha_used: f64,
    pub sf_numeric: i64,
    /// `#{below -> above} - #{above -> below}` over branch endpoints.
    pub sf_endpoint: i64,
    pub sf_predicted: Option<i64>,
    pub two_pi_sigma: Option<f64>,
    pub two_pi_sigma_quadrature: Option<f64>,
    pub density: Option<DensityProfile>,
    pub crossings: Vec<Crossing>,
    pub window_valid: bool,
}

fn hits_node(branches: &[Branch], alpha: f64) -> bool {
    branches
        .iter()
        .flat_map(|b| &b.mus)
        .any(|&mu| (mu - alpha).abs() <= 1e-12 * (1.0 + alpha.abs()))
}

/// Signed count of branch crossings through `alpha`.
///
/// Fails with [`FlowError::WindowInvalid`] unless every branch stays at least
/// `margin` away from `alpha` at both ends of the sweep.
pub fn spectral_flow(
    branches: &[Branch],
    cfg: &SweepConfig,
    alpha: f64,
    margin: f64,
) -> Result<FlowReport> {
    if !validate_window(branches, cfg, alpha, margin) {
        return Err(FlowError::WindowInvalid(alpha));
    }
    let mut used = alpha;
    let mut tries = 0;
    while hits_node(branches, used) {
        tries += 1;
        if tries > 8 {
            return Err(FlowError::WindowInvalid(alpha));
        }
        used = alpha + NODE_SHIFT * tries as f64;
    }
    let mut crossings = Vec::new();
    let mut sf_endpoint = 0i64;
    for b in branches {
        for k in 1..b.len() {
            let (a, c) = (b.mus[k - 1] - used, b.mus[k] - used);
            if a.signum() != c.signum() {
                let t = a / (a - c);
                let zeta = b.zetas[k - 1] + t * (b.zetas[k] - b.zetas[k - 1]);
                let direction = if c > a {
                    Direction::Up
                } else {
                    Direction::Down
                };
                crossings.push(Crossing {
                    branch_id: b.id,
                    zeta,
                    direction,
                });
            }
        }
        if b.len() > 0 {
            let below_first = b.first_mu() < used;
            let below_last = b.last_mu() < used;
            sf_endpoint += match (below_first, below_last) {
                (true, false) => 1,
                (false, true) => -1,
                _ => 0,
            };
        }
    }
    let sf_numeric = crossings
        .iter()
        .map(|c| match c.direction {
            Direction::Up => 1,
            Direction::Down => -1,
        })
        .sum::<i64>();
    if sf_numeric != sf_endpoint {
        return Err(FlowError::Inconsistent(format!(
            "crossing count {sf_numeric} disagrees with endpoint count {sf_endpoint} at alpha = {used}"
        )));
    }
    Ok(FlowReport {
        alpha,
        alpha_used: used,
        sf_numeric,
        sf_endpoint,
        sf_predicted: None,
        two_pi_sigma: None,
        two_pi_sigma_quadrature: None,
        density: None,
        crossings,
        window_valid: true,
    })
}

/// Sharpen crossing locations to `tol` in `ζ` by bisection with fresh eigensolves.
///
/// At each midpoint the branch value is taken as the fiber eigenvalue closest
/// to the linear interpolant between the bracketing values.
pub fn refine_crossings(
    report: &mut FlowReport,
    branches: &[Branch],
    grid: &Grid1D,
    ps: &ProfileSet,
    tol: f64,
) -> Result<()> {
    let alpha = report.alpha_used;
    for c in &mut report.crossings {
        let b = branches
            .iter()
            .find(|b| b.id == c.branch_id)
            .ok_or_else(|| FlowError::Inconsistent(format!("no branch {}", c.branch_id)))?;
        let k = b
            .zetas
            .iter()
            .position(|&z| z >= c.zeta)
            .unwrap_or(b.len() - 1)
            .max(1);
        let (mut z0, mut z1) = (b.zetas[k - 1], b.zetas[k]);
        let (mut m0, mut m1) = (b.mus[k - 1], b.mus[k]);
        while z1 - z0 > tol {
            let zm = 0.5 * (z0 + z1);
            let guess = 0.5 * (m0 + m1);
            let reach = 0.5 * (z1 - z0) + 0.5 * (m1 - m0).abs() + 1e-9;
            let a = assemble_fiber(grid, ps, zm)?;
            let (t, corner) = a.real_form();
            let mm = if corner.is_none() {
                t.eigenvalues_in(guess - reach, guess + reach)
            } else {
                crate::fiber::eig_window(&a, guess - reach, guess + reach)?
                    .into_iter()
                    .map(|p| p.mu)
                    .collect()
            }
            .into_iter()
            .min_by(|x, y| (x - guess).abs().total_cmp(&(y - guess).abs()));
            let Some(mm) = mm else { break };
            if (mm - alpha).signum() == (m0 - alpha).signum() {
                z0 = zm;
                m0 = mm;
            } else {
                z1 = zm;
                m1 = mm;
            }
        }
        let t = if m1 != m0 {
            (alpha - m0) / (m1 - m0)
        } else {
            0.5
        };
        c.zeta = z0 + t.clamp(0.0, 1.0) * (z1 - z0);
    }
    Ok(())
}

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// `∫ φ'(μ(ζ)) μ'(ζ) dζ` over one linear piece, evaluated in `μ` on panels
/// aligned with the support of `φ'`.
fn piece_integral(dens: &DensityProfile, m0: f64, m1: f64) -> f64 {
    if m0 == m1 {
        return 0.0;
    }
    let (a, b, sign) = if m0 < m1 {
        (m0, m1, 1.0)
    } else {
        (m1, m0, -1.0)
    };
    let lo = a.max(dens.e1);
    let hi = b.min(dens.e2);
    if lo >= hi {
        return 0.0;
    }
    let panels = (64.0 * (hi - lo) / (dens.e2 - dens.e1)).ceil().max(1.0) as usize;
    let w = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let c = lo + w * (p as f64 + 0.5);
        for &(x, wt) in &GL8 {
            sum += wt * dens.phi_prime(c + 0.5 * w * x);
        }
    }
    sign * sum * 0.5 * w
}

/// Endpoint sum and quadrature value of `2πσ_I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Conductivity {
    pub endpoint_sum: f64,
    pub quadrature: f64,
}

/// `2πσ_I = Σ_j [φ(μ_j(ζ_max)) - φ(μ_j(ζ_min))]`, cross-checked against quadrature.
pub fn conductivity(branches: &[Branch], dens: &DensityProfile) -> Result<Conductivity> {
    let mut endpoint_sum = 0.0;
    let mut quadrature = 0.0;
    for b in branches.iter().filter(|b| !b.is_empty()) {
        for (idx, mu) in [(0, b.first_mu()), (b.len() - 1, b.last_mu())] {
            if mu > dens.e1 && mu < dens.e2 {
                return Err(FlowError::PhiWindowTouchesEndpoint {
                    zeta: b.zetas[idx],
                    mu,
                });
            }
        }
        endpoint_sum += dens.phi(b.last_mu()) - dens.phi(b.first_mu());
        quadrature += b
            .mus
            .windows(2)
            .map(|w| piece_integral(dens, w[0], w[1]))
            .sum::<f64>();
    }
    if (endpoint_sum - quadrature).abs() > QUADRATURE_TOL {
        return Err(FlowError::Inconsistent(format!(
            "endpoint sum {endpoint_sum} and quadrature {quadrature} differ"
        )));
    }
    Ok(Conductivity {
        endpoint_sum,
        quadrature,
    })
}

fn level_distance(minus: HalfSpaceParams, plus: HalfSpaceParams, alpha: f64) -> f64 {
    let mut dist = f64::INFINITY;
    for hp in [minus, plus] {
        let r = 1.0 + (alpha - hp.v).abs();
        for level in hp.levels_in(alpha - r - 1.0, alpha + r + 1.0) {
            dist = dist.min((level - alpha).abs());
        }
    }
    dist
}

/// Endpoint margin for [`spectral_flow`]: half the distance from `alpha` to the
/// nearest bulk level, at most 0.1.
pub fn default_margin(minus: HalfSpaceParams, plus: HalfSpaceParams, alpha: f64) -> f64 {
    (0.5 * level_distance(minus, plus, alpha)).min(0.1)
}

/// Density profile centred on `alpha` whose transition fills `fraction` of the
/// distance to the nearest bulk level on either side.
pub fn density_for(
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
    alpha: f64,
    fraction: f64,
) -> Result<DensityProfile> {
    if minus.in_spectrum(alpha) || plus.in_spectrum(alpha) {
        return Err(FlowError::AlphaInBulkSpectrum(alpha));
    }
    let half = fraction * level_distance(minus, plus, alpha).min(1.0);
    DensityProfile::new(alpha - half, alpha + half)
}

/// Check that `supp φ'` lies in the common resolvent set of both half-spaces.
pub fn check_density(
    dens: &DensityProfile,
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
) -> Result<()> {
    for hp in [minus, plus] {
        if let Some(&level) = hp.levels_in(dens.e1, dens.e2).first() {
            return Err(FlowError::AlphaInBulkSpectrum(level));
        }
    }
    Ok(())
}

/// Full flow report at `alpha`: numerical flow, prediction, and conductivity.
pub fn analyze(
    branches: &[Branch],
    cfg: &SweepConfig,
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
    alpha: f64,
    dens: Option<DensityProfile>,
    margin: Option<f64>,
) -> Result<FlowReport> {
    let pred = predicted_sf(minus, plus, alpha)?;
    let margin = margin.unwrap_or_else(|| default_margin(minus, plus, alpha));
    let mut report = spectral_flow(branches, cfg, alpha, margin)?;
    report.sf_predicted = Some(pred.sf);
    let dens = match dens {
        Some(d) => d,
        None => density_for(minus, plus, alpha, 0.5)?,
    };
    check_density(&dens, minus, plus)?;
    let c = conductivity(branches, &dens)?;
    report.two_pi_sigma = Some(c.endpoint_sum);
    report.two_pi_sigma_quadrature = Some(c.quadrature);
    report.density = Some(dens);
    Ok(report)
}

/// True when the numerical flow and the rounded conductivity both equal the prediction.
pub fn reconcile(report: &FlowReport, pred: &FlowPrediction) -> bool {
    let sigma_ok = match report.two_pi_sigma {
        Some(s) => (s - s.round()).abs() <= QUADRATURE_TOL && s.round() as i64 == pred.sf,
        None => false,
    };
    report.sf_numeric == pred.sf && sigma_ok
}
