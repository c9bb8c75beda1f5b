//! Eigenvalue branches `ζ ↦ μ_j(ζ)` tracked by eigenvector continuity.
//!
//! Fibers on the coarse `ζ` grid are solved in parallel in a window padded by
//! more than one step, so that every state inside the energy window at one
//! sample has its continuation inside the padded window at the next (the
//! fiber depends on `ζ` only through `ζ σ2`, hence `|Δμ| <= |Δζ|`). Matching is
//! an optimal assignment on absolute overlaps restricted to pairs allowed by
//! that bound. A step whose matches are weak is bisected.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bulk::HalfSpaceParams;
use crate::error::{FlowError, Result};
use crate::fiber::tridiag::{dot, SymTridiag};
use crate::fiber::{assemble_fiber, real_pairs_in, Grid1D, SpuriousFilter};
use crate::profiles::ProfileSet;

/// Eigenvalues closer than this (relative) are treated as one degenerate cluster.
const DEGENERATE_TOL: f64 = 1e-9;
/// Slack added to the Lipschitz bound to absorb solver error.
const LIPSCHITZ_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub samples: usize,
    pub window: (f64, f64),
    pub refine_tol: f64,
    #[serde(default = "default_overlap")]
    pub overlap_threshold: f64,
    #[serde(default = "default_min_step")]
    pub min_step: f64,
}

fn default_overlap() -> f64 {
    0.8
}

fn default_min_step() -> f64 {
    1e-4
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            zeta_min: -8.0,
            zeta_max: 8.0,
            samples: 161,
            window: (-4.0, 4.0),
            refine_tol: 0.1,
            overlap_threshold: default_overlap(),
            min_step: default_min_step(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FlowError::InvalidSweep(msg));
        if !(self.zeta_min < self.zeta_max) {
            return bad(format!(
                "zeta_min {} must be below zeta_max {}",
                self.zeta_min, self.zeta_max
            ));
        }
        if self.samples < 2 {
            return bad(format!("need at least 2 samples, got {}", self.samples));
        }
        if !(self.window.0 < self.window.1) {
            return Err(FlowError::InvalidWindow {
                lo: self.window.0,
                hi: self.window.1,
            });
        }
        if !(self.refine_tol > 0.0) {
            return bad(format!(
                "refine_tol must be positive, got {}",
                self.refine_tol
            ));
        }
        if !(self.overlap_threshold > 0.0 && self.overlap_threshold < 1.0) {
            return bad(format!(
                "overlap threshold {} outside (0, 1)",
                self.overlap_threshold
            ));
        }
        if !(self.min_step > 0.0) {
            return bad(format!("min_step must be positive, got {}", self.min_step));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.zeta_max - self.zeta_min) / (self.samples - 1) as f64
    }

    pub fn zetas(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.samples)
            .map(|k| {
                if k + 1 == self.samples {
                    self.zeta_max
                } else {
                    self.zeta_min + h * k as f64
                }
            })
            .collect()
    }

    /// Padding of the solver window beyond the energy window.
    fn pad(&self) -> f64 {
        2.0 * self.step() + 0.05
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoteKind {
    BulkLevel,
    Diverging,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteLabel {
    pub kind: AsymptoteKind,
    pub value: Option<f64>,
    pub side: Side,
}

/// How a branch segment starts or ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// Reaches the end of the `ζ` range.
    SweepEnd,
    /// Leaves the energy window (the branch is clipped there).
    WindowEdge,
    /// Removed by the spurious-mode filter.
    Filtered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub id: usize,
    pub zetas: Vec<f64>,
    pub mus: Vec<f64>,
    /// Overlap with the previous sample; 1 at the first point.
    pub overlaps: Vec<f64>,
    pub boundary_mass: Vec<f64>,
    /// Mean position `<x>` of the eigenvector.
    pub centers: Vec<f64>,
    pub min_overlap: f64,
    pub start: EndReason,
    pub end: EndReason,
    pub window: (f64, f64),
    pub asymptote_lo: Option<AsymptoteLabel>,
    pub asymptote_hi: Option<AsymptoteLabel>,
}

impl Branch {
    pub fn len(&self) -> usize {
        self.zetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zetas.is_empty()
    }

    pub fn first_mu(&self) -> f64 {
        self.mus[0]
    }

    pub fn last_mu(&self) -> f64 {
        self.mus[self.mus.len() - 1]
    }
}

#[derive(Debug, Clone)]
struct State {
    mu: f64,
    vector: Vec<f64>,
    mass: f64,
    center: f64,
}

struct Fiber {
    tri: SymTridiag,
    corner: Option<f64>,
}

impl Fiber {
    fn rayleigh(&self, v: &[f64]) -> f64 {
        let mut w = vec![0.0; v.len()];
        self.tri.matvec(v, &mut w);
        let n = v.len();
        if let Some(c) = self.corner {
            w[0] += c * v[n - 1];
            w[n - 1] += c * v[0];
        }
        dot(v, &w)
    }
}

struct Solver<'a> {
    grid: &'a Grid1D,
    ps: &'a ProfileSet,
    filter: &'a SpuriousFilter,
    lo: f64,
    hi: f64,
    xs: Vec<f64>,
}

impl Solver<'_> {
    fn solve(&self, zeta: f64) -> Result<(Fiber, Vec<State>)> {
        let a = assemble_fiber(self.grid, self.ps, zeta)?;
        let (tri, corner) = a.real_form();
        let pairs = real_pairs_in(&a, self.lo, self.hi)?;
        let states = pairs
            .into_iter()
            .map(|p| self.state(p.value, p.vector))
            .collect();
        Ok((Fiber { tri, corner }, states))
    }

    fn state(&self, mu: f64, vector: Vec<f64>) -> State {
        let mass = self.filter.boundary_mass_real(self.grid, &vector);
        let center = self
            .xs
            .iter()
            .enumerate()
            .map(|(j, x)| {
                x * (vector[2 * j] * vector[2 * j] + vector[2 * j + 1] * vector[2 * j + 1])
            })
            .sum();
        State {
            mu,
            vector,
            mass,
            center,
        }
    }

    /// Rotate bases of degenerate clusters in `next` onto the previous vectors.
    fn realign(&self, fiber: &Fiber, next: &mut [State], prev: &[State], dz: f64) {
        let mut start = 0;
        while start < next.len() {
            let mut end = start + 1;
            while end < next.len()
                && next[end].mu - next[end - 1].mu <= DEGENERATE_TOL * (1.0 + next[end].mu.abs())
            {
                end += 1;
            }
            if end - start > 1 {
                self.realign_cluster(fiber, &mut next[start..end], prev, dz);
            }
            start = end;
        }
    }

    fn realign_cluster(&self, fiber: &Fiber, cluster: &mut [State], prev: &[State], dz: f64) {
        let k = cluster.len();
        let mid = 0.5 * (cluster[0].mu + cluster[k - 1].mu);
        let reach = dz.abs() + LIPSCHITZ_SLACK + (cluster[k - 1].mu - cluster[0].mu);
        let basis: Vec<Vec<f64>> = cluster.iter().map(|s| s.vector.clone()).collect();
        let project = |v: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; v.len()];
            for b in &basis {
                let c = dot(b, v);
                for (o, bi) in out.iter_mut().zip(b) {
                    *o += c * bi;
                }
            }
            out
        };
        let mut candidates: Vec<Vec<f64>> = prev
            .iter()
            .filter(|p| (p.mu - mid).abs() <= reach)
            .map(|p| project(&p.vector))
            .collect();
        candidates.sort_by(|a, b| dot(b, b).total_cmp(&dot(a, a)));
        candidates.extend(basis.iter().cloned());
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(k);
        for mut v in candidates {
            if out.len() == k {
                break;
            }
            for _ in 0..2 {
                for u in &out {
                    let c = dot(u, &v);
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= c * ui;
                    }
                }
            }
            let nrm = dot(&v, &v).sqrt();
            if nrm > 0.3 {
                v.iter_mut().for_each(|x| *x /= nrm);
                out.push(v);
            }
        }
        if out.len() < k {
            return;
        }
        let mut states: Vec<State> = out
            .into_iter()
            .map(|v| {
                let mu = fiber.rayleigh(&v);
                self.state(mu, v)
            })
            .collect();
        states.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        cluster.clone_from_slice(&states);
    }
}

/// Outcome of matching one step: for each next state, the matched previous
/// index and overlap.
enum StepMatch {
    Accepted(Vec<Option<(usize, f64)>>),
    Rejected(f64),
}

fn match_step(
    prev: &[State],
    next: &[State],
    dz: f64,
    lo: f64,
    hi: f64,
    cfg: &SweepConfig,
    at_floor: bool,
) -> StepMatch {
    let reach = dz.abs() + LIPSCHITZ_SLACK;
    let in_core = |mu: f64| mu >= lo + reach && mu <= hi - reach;
    let np = prev.len();
    let nq = next.len();
    // cost rows: prev; columns: next then one dummy per row
    let mut cost = vec![vec![0.0; nq + np]; np];
    let mut overlap = vec![vec![0.0; nq]; np];
    for i in 0..np {
        for j in 0..nq {
            if (prev[i].mu - next[j].mu).abs() <= reach {
                let ov = dot(&prev[i].vector, &next[j].vector).abs();
                overlap[i][j] = ov;
                cost[i][j] = -ov;
            } else {
                cost[i][j] = 1.0;
            }
        }
    }
    let assign = hungarian(&cost);
    let mut result = vec![None; nq];
    let mut prev_matched = vec![false; np];
    let mut worst = 1.0_f64;
    let mut ok = true;
    for (i, &j) in assign.iter().enumerate() {
        if j >= nq || cost[i][j] > 0.0 {
            continue;
        }
        let ov = overlap[i][j];
        let core = in_core(prev[i].mu) || in_core(next[j].mu);
        if ov < cfg.overlap_threshold {
            if core {
                ok = false;
                worst = worst.min(ov);
            }
            continue;
        }
        if (prev[i].mu - next[j].mu).abs() > cfg.refine_tol && !at_floor {
            ok = false;
        }
        worst = worst.min(ov);
        result[j] = Some((i, ov));
        prev_matched[i] = true;
    }
    for i in 0..np {
        if !prev_matched[i] && in_core(prev[i].mu) {
            ok = false;
            worst = worst.min(0.0);
        }
    }
    for j in 0..nq {
        if result[j].is_none() && in_core(next[j].mu) {
            ok = false;
            worst = worst.min(0.0);
        }
    }
    if ok {
        StepMatch::Accepted(result)
    } else {
        StepMatch::Rejected(worst)
    }
}

/// Minimum-cost assignment of rows to distinct columns (`rows <= cols`),
/// by the shortest augmenting path method. Returns the column of each row.
pub(crate) fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let m = cost[0].len();
    assert!(n <= m, "assignment needs rows <= columns");
    let inf = f64::INFINITY;
    // 1-based potentials; p[j] is the row assigned to column j
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=m {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=m {
        if p[j] != 0 {
            out[p[j] - 1] = j - 1;
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Point {
    zeta: f64,
    mu: f64,
    overlap: f64,
    mass: f64,
    center: f64,
}

struct Tracker {
    tracks: Vec<Vec<Point>>,
    active: Vec<(usize, State)>,
}

impl Tracker {
    fn start(zeta: f64, states: Vec<State>) -> Self {
        let mut t = Tracker {
            tracks: Vec::new(),
            active: Vec::new(),
        };
        for s in states {
            t.open(zeta, s);
        }
        t
    }

    fn open(&mut self, zeta: f64, s: State) {
        let id = self.tracks.len();
        self.tracks.push(vec![Point {
            zeta,
            mu: s.mu,
            overlap: 1.0,
            mass: s.mass,
            center: s.center,
        }]);
        self.active.push((id, s));
    }

    fn commit(&mut self, zeta: f64, next: Vec<State>, matches: Vec<Option<(usize, f64)>>) {
        let prev_ids: Vec<usize> = self.active.iter().map(|(id, _)| *id).collect();
        self.active.clear();
        for (s, m) in next.into_iter().zip(matches) {
            match m {
                Some((i, ov)) => {
                    let id = prev_ids[i];
                    self.tracks[id].push(Point {
                        zeta,
                        mu: s.mu,
                        overlap: ov,
                        mass: s.mass,
                        center: s.center,
                    });
                    self.active.push((id, s));
                }
                None => self.open(zeta, s),
            }
        }
    }

    fn states(&self) -> Vec<State> {
        self.active.iter().map(|(_, s)| s.clone()).collect()
    }
}

/// Track all eigenvalue branches through `cfg.window` over `[zeta_min, zeta_max]`.
///
/// Points whose boundary mass exceeds the filter threshold are dropped after
/// tracking, and branches are cut where they leave the window, so one tracked
/// curve may yield several [`Branch`] segments.
pub fn sweep_branches(
    grid: &Grid1D,
    ps: &ProfileSet,
    cfg: &SweepConfig,
    filter: &SpuriousFilter,
) -> Result<Vec<Branch>> {
    grid.validate()?;
    ps.validate()?;
    cfg.validate()?;
    filter.validate(grid)?;
    let pad = cfg.pad();
    let solver = Solver {
        grid,
        ps,
        filter,
        lo: cfg.window.0 - pad,
        hi: cfg.window.1 + pad,
        xs: grid.points(),
    };
    let zetas = cfg.zetas();
    let coarse: Vec<(Fiber, Vec<State>)> = zetas
        .par_iter()
        .map(|&z| solver.solve(z))
        .collect::<Result<_>>()?;
    let mut coarse = coarse.into_iter();
    let (_, first) = coarse.next().expect("at least two samples");
    let mut tracker = Tracker::start(zetas[0], first);
    for (k, (fiber, states)) in coarse.enumerate() {
        advance(
            &solver,
            &mut tracker,
            zetas[k],
            zetas[k + 1],
            Some((fiber, states)),
            cfg,
        )?;
    }
    Ok(segment(tracker.tracks, cfg, filter))
}

fn advance(
    solver: &Solver,
    tracker: &mut Tracker,
    from: f64,
    to: f64,
    mut target: Option<(Fiber, Vec<State>)>,
    cfg: &SweepConfig,
) -> Result<()> {
    let mut z = from;
    let mut step = to - from;
    while z < to {
        let z_next = if z + step >= to { to } else { z + step };
        let dz = z_next - z;
        let at_floor = dz / 2.0 < cfg.min_step;
        let (fiber, mut next) = match (z_next == to, target.take()) {
            (true, Some(t)) => t,
            (is_target, t) => {
                if !is_target {
                    target = t;
                }
                solver.solve(z_next)?
            }
        };
        let prev = tracker.states();
        solver.realign(&fiber, &mut next, &prev, dz);
        match match_step(&prev, &next, dz, solver.lo, solver.hi, cfg, at_floor) {
            StepMatch::Accepted(m) => {
                tracker.commit(z_next, next, m);
                z = z_next;
                step = (2.0 * step).min(to - from);
            }
            StepMatch::Rejected(best) => {
                if at_floor {
                    return Err(FlowError::TrackingAmbiguity {
                        zeta: z,
                        overlap: best,
                        step: dz,
                    });
                }
                if z_next == to {
                    target = Some((fiber, next));
                }
                step = dz / 2.0;
            }
        }
    }
    Ok(())
}

fn segment(tracks: Vec<Vec<Point>>, cfg: &SweepConfig, filter: &SpuriousFilter) -> Vec<Branch> {
    let (lo, hi) = cfg.window;
    let keep = |p: &Point| p.mass <= filter.threshold && p.mu >= lo && p.mu <= hi;
    let reason = |p: Option<&Point>| match p {
        None => EndReason::SweepEnd,
        Some(p) if p.mass > filter.threshold => EndReason::Filtered,
        Some(_) => EndReason::WindowEdge,
    };
    let mut out = Vec::new();
    for track in tracks {
        let mut i = 0;
        while i < track.len() {
            if !keep(&track[i]) {
                i += 1;
                continue;
            }
            let start = i;
            while i < track.len() && keep(&track[i]) {
                i += 1;
            }
            let pts = &track[start..i];
            let before = if start == 0 {
                None
            } else {
                Some(&track[start - 1])
            };
            let after = track.get(i);
            let mut start_reason = reason(before);
            let mut end_reason = reason(after);
            // a track born or ending inside the sweep left the padded window
            if before.is_none() && pts[0].zeta > cfg.zeta_min {
                start_reason = EndReason::WindowEdge;
            }
            if after.is_none() && pts[pts.len() - 1].zeta < cfg.zeta_max {
                end_reason = EndReason::WindowEdge;
            }
            let mut overlaps: Vec<f64> = pts.iter().map(|p| p.overlap).collect();
            overlaps[0] = 1.0;
            let min_overlap = overlaps.iter().copied().fold(1.0, f64::min);
            out.push(Branch {
                id: out.len(),
                zetas: pts.iter().map(|p| p.zeta).collect(),
                mus: pts.iter().map(|p| p.mu).collect(),
                overlaps,
                boundary_mass: pts.iter().map(|p| p.mass).collect(),
                centers: pts.iter().map(|p| p.center).collect(),
                min_overlap,
                start: start_reason,
                end: end_reason,
                window: cfg.window,
                asymptote_lo: None,
                asymptote_hi: None,
            });
        }
    }
    out
}

fn side_of(center: f64) -> Side {
    if center >= 0.0 {
        Side::Plus
    } else {
        Side::Minus
    }
}

fn classify_end(
    branch: &Branch,
    at_end: bool,
    minus: &HalfSpaceParams,
    plus: &HalfSpaceParams,
    match_tol: f64,
) -> Result<AsymptoteLabel> {
    let n = branch.len();
    let (idx, reason) = if at_end {
        (n - 1, branch.end)
    } else {
        (0, branch.start)
    };
    let mu = branch.mus[idx];
    let zeta = branch.zetas[idx];
    let side = side_of(branch.centers[idx]);
    if reason == EndReason::WindowEdge {
        return Ok(AsymptoteLabel {
            kind: AsymptoteKind::Diverging,
            value: None,
            side,
        });
    }
    let nearest = |hp: &HalfSpaceParams| {
        hp.levels_in(mu - match_tol, mu + match_tol)
            .into_iter()
            .min_by(|a, b| (a - mu).abs().total_cmp(&(b - mu).abs()))
    };
    let (own, other) = match side {
        Side::Plus => ((plus, Side::Plus), (minus, Side::Minus)),
        Side::Minus => ((minus, Side::Minus), (plus, Side::Plus)),
    };
    for (hp, s) in [own, other] {
        if let Some(level) = nearest(hp) {
            return Ok(AsymptoteLabel {
                kind: AsymptoteKind::BulkLevel,
                value: Some(level),
                side: s,
            });
        }
    }
    // divergence heuristic: close to a window edge and monotone over the last five samples
    let (lo, hi) = branch.window;
    let edge_zone = 0.1 * (hi - lo);
    let tail: Vec<f64> = if at_end {
        branch.mus[n.saturating_sub(5)..].to_vec()
    } else {
        branch.mus[..n.min(5)].iter().rev().copied().collect()
    };
    let slopes: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    let toward_hi = hi - mu <= edge_zone && !slopes.is_empty() && slopes.iter().all(|&s| s > 0.0);
    let toward_lo = mu - lo <= edge_zone && !slopes.is_empty() && slopes.iter().all(|&s| s < 0.0);
    if toward_hi || toward_lo {
        return Ok(AsymptoteLabel {
            kind: AsymptoteKind::Diverging,
            value: None,
            side,
        });
    }
    Err(FlowError::UnclassifiableEndpoint { zeta, mu })
}

/// Label both ends of a branch as converging to a bulk level or diverging.
pub fn classify_asymptotics(
    branch: &Branch,
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
    match_tol: f64,
) -> Result<Branch> {
    if branch.is_empty() {
        return Err(FlowError::InvalidSweep("empty branch".into()));
    }
    let mut out = branch.clone();
    out.asymptote_lo = Some(classify_end(branch, false, &minus, &plus, match_tol)?);
    out.asymptote_hi = Some(classify_end(branch, true, &minus, &plus, match_tol)?);
    Ok(out)
}

/// True when no branch sits within `margin` of `alpha` at either end of the sweep.
pub fn validate_window(branches: &[Branch], cfg: &SweepConfig, alpha: f64, margin: f64) -> bool {
    branches.iter().all(|b| {
        b.zetas.iter().zip(&b.mus).all(|(&z, &mu)| {
            let at_end = z <= cfg.zeta_min || z >= cfg.zeta_max;
            !at_end || (mu - alpha).abs() >= margin
        })
    })
}

/// CSV with columns `branch_id, zeta, mu, overlap, boundary_mass`.
pub fn write_branches_csv<W: Write>(branches: &[Branch], mut w: W) -> Result<()> {
    writeln!(w, "branch_id,zeta,mu,overlap,boundary_mass")?;
    for b in branches {
        for k in 0..b.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                b.id, b.zetas[k], b.mus[k], b.overlaps[k], b.boundary_mass[k]
            )?;
        }
    }
    Ok(())
}
