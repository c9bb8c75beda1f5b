//! Domain-wall switch functions and the profiles built from them.
//!
//! A [`SwitchProfile`] equals `lower` for `x <= t_lo` and `upper` for
//! `x >= t_hi`, with a monotone transition in between. The default
//! [`Shape::SmoothBump`] is the C-infinity partition built from
//! `g(t) = exp(-1/t)`, so the plateaus are attained exactly rather than
//! asymptotically.

use serde::{Deserialize, Serialize};

use crate::bulk::HalfSpaceParams;
use crate::error::{FlowError, Result};

/// Default transition interval for every wall.
pub const DEFAULT_TRANSITION: (f64, f64) = (-1.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    #[default]
    SmoothBump,
    /// Piecewise linear, only C0. Meant for debugging.
    LinearRamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchProfile {
    pub lower: f64,
    pub upper: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(default)]
    pub shape: Shape,
}

fn bump_g(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn bump_g_prime(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        bump_g(t) / (t * t)
    }
}

impl SwitchProfile {
    pub fn new(lower: f64, upper: f64, t_lo: f64, t_hi: f64, shape: Shape) -> Result<Self> {
        let p = SwitchProfile {
            lower,
            upper,
            t_lo,
            t_hi,
            shape,
        };
        p.validate()?;
        Ok(p)
    }

    /// Smooth wall from `lower` to `upper` over the default transition.
    pub fn wall(lower: f64, upper: f64) -> Self {
        SwitchProfile {
            lower,
            upper,
            t_lo: DEFAULT_TRANSITION.0,
            t_hi: DEFAULT_TRANSITION.1,
            shape: Shape::SmoothBump,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::wall(value, value)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lower, self.upper, self.t_lo, self.t_hi]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(FlowError::InvalidProfile("non-finite parameter".into()));
        }
        if !(self.t_lo < self.t_hi) {
            return Err(FlowError::InvalidProfile(format!(
                "transition start {} must precede end {}",
                self.t_lo, self.t_hi
            )));
        }
        Ok(())
    }

    pub fn is_constant(&self) -> bool {
        self.lower == self.upper
    }

    fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    /// Normalized transition fraction `s(t)` for `t` in `(0, 1)`.
    fn fraction(&self, t: f64) -> f64 {
        match self.shape {
            Shape::LinearRamp => t,
            Shape::SmoothBump => {
                let a = bump_g(t);
                let b = bump_g(1.0 - t);
                a / (a + b)
            }
        }
    }

    fn fraction_prime(&self, t: f64) -> f64 {
        match self.shape {
            Shape::LinearRamp => 1.0,
            Shape::SmoothBump => {
                let a = bump_g(t);
                let b = bump_g(1.0 - t);
                let s = a + b;
                (bump_g_prime(t) * b + a * bump_g_prime(1.0 - t)) / (s * s)
            }
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        if x <= self.t_lo {
            return self.lower;
        }
        if x >= self.t_hi {
            return self.upper;
        }
        if self.is_constant() {
            return self.lower;
        }
        let t = (x - self.t_lo) / self.width();
        self.lower + (self.upper - self.lower) * self.fraction(t)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        if x <= self.t_lo || x >= self.t_hi || self.is_constant() {
            return 0.0;
        }
        let t = (x - self.t_lo) / self.width();
        (self.upper - self.lower) * self.fraction_prime(t) / self.width()
    }
}

/// The three walls `B`, `m`, `V` of the interface Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSet {
    #[serde(rename = "B")]
    pub b: SwitchProfile,
    pub m: SwitchProfile,
    #[serde(rename = "V")]
    pub v: SwitchProfile,
}

impl ProfileSet {
    pub fn new(b: SwitchProfile, m: SwitchProfile, v: SwitchProfile) -> Result<Self> {
        let ps = ProfileSet { b, m, v };
        ps.validate()?;
        Ok(ps)
    }

    /// Smooth walls joining the two half-space parameter triples over the default transition.
    pub fn from_half_spaces(minus: HalfSpaceParams, plus: HalfSpaceParams) -> Self {
        ProfileSet {
            b: SwitchProfile::wall(minus.b, plus.b),
            m: SwitchProfile::wall(minus.m, plus.m),
            v: SwitchProfile::wall(minus.v, plus.v),
        }
    }

    pub fn uniform(hp: HalfSpaceParams) -> Self {
        Self::from_half_spaces(hp, hp)
    }

    pub fn validate(&self) -> Result<()> {
        self.b.validate()?;
        self.m.validate()?;
        self.v.validate()?;
        if self.b.lower == 0.0 {
            return Err(FlowError::ZeroField(self.b.lower));
        }
        if self.b.upper == 0.0 {
            return Err(FlowError::ZeroField(self.b.upper));
        }
        Ok(())
    }

    pub fn minus(&self) -> HalfSpaceParams {
        HalfSpaceParams {
            b: self.b.lower,
            m: self.m.lower,
            v: self.v.lower,
        }
    }

    pub fn plus(&self) -> HalfSpaceParams {
        HalfSpaceParams {
            b: self.b.upper,
            m: self.m.upper,
            v: self.v.upper,
        }
    }

    /// `A2(x) = x B(x)`.
    pub fn magnetic_potential(&self, x: f64) -> f64 {
        x * self.b.evaluate(x)
    }

    /// `A2'(x) = B(x) + x B'(x)`.
    pub fn magnetic_potential_prime(&self, x: f64) -> f64 {
        self.b.evaluate(x) + x * self.b.derivative(x)
    }

    /// Supremum of `|A2'|` over `[-half_width, half_width]`, sampled on 10^4 + 1
    /// points, together with the plateau value `max(|B-|, |B+|)` which holds
    /// outside the transition.
    pub fn sup_a2_prime(&self, half_width: f64) -> f64 {
        const SAMPLES: usize = 10_000;
        let plateau = self.b.lower.abs().max(self.b.upper.abs());
        let lo = -half_width.abs();
        let step = 2.0 * half_width.abs() / SAMPLES as f64;
        (0..=SAMPLES)
            .map(|i| self.magnetic_potential_prime(lo + step * i as f64).abs())
            .fold(plateau, f64::max)
    }
}

/// Smooth step `phi` in `S(0, 1; E1, E2)` whose derivative is the density of states weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityProfile {
    pub e1: f64,
    pub e2: f64,
    #[serde(default)]
    pub shape: Shape,
}

impl DensityProfile {
    pub fn new(e1: f64, e2: f64) -> Result<Self> {
        let d = DensityProfile {
            e1,
            e2,
            shape: Shape::SmoothBump,
        };
        d.profile().validate()?;
        Ok(d)
    }

    pub fn profile(&self) -> SwitchProfile {
        SwitchProfile {
            lower: 0.0,
            upper: 1.0,
            t_lo: self.e1,
            t_hi: self.e2,
            shape: self.shape,
        }
    }

    pub fn phi(&self, energy: f64) -> f64 {
        self.profile().evaluate(energy)
    }

    pub fn phi_prime(&self, energy: f64) -> f64 {
        self.profile().derivative(energy)
    }

    pub fn contains(&self, energy: f64) -> bool {
        energy > self.e1 && energy < self.e2
    }
}
