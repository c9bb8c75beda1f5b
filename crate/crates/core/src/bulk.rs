//! Closed-form bulk spectra and the predicted spectral flow.
//!
//! For constant `(B, m, V)` with `B != 0` the fiber spectrum does not depend on
//! `zeta` and consists of the Landau levels `±sqrt(2k|B| + m^2) + V` for `k >= 1`
//! plus the unpaired level `m sgn(B) + V`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Relative tolerance used to decide that an energy sits on a bulk level.
pub const LEVEL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceParams {
    #[serde(rename = "B")]
    pub b: f64,
    pub m: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

impl HalfSpaceParams {
    pub fn new(b: f64, m: f64, v: f64) -> Result<Self> {
        let hp = HalfSpaceParams { b, m, v };
        hp.validate()?;
        Ok(hp)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0.0 || !self.b.is_finite() {
            return Err(FlowError::ZeroField(self.b));
        }
        Ok(())
    }

    pub fn zeroth_level(&self) -> f64 {
        self.m * self.b.signum() + self.v
    }

    /// `sqrt(2k|B| + m^2)`, the distance of the `k`-th level pair from `V`.
    pub fn level_magnitude(&self, k: u32) -> f64 {
        (2.0 * k as f64 * self.b.abs() + self.m * self.m).sqrt()
    }

    fn on_level(&self, value: f64, level: f64) -> bool {
        (value - level).abs() <= LEVEL_TOL * (1.0 + value.abs().max(level.abs()))
    }

    /// True when `alpha` is an eigenvalue of the bulk fiber.
    pub fn in_spectrum(&self, alpha: f64) -> bool {
        if self.on_level(alpha, self.zeroth_level()) {
            return true;
        }
        let d = (alpha - self.v).abs();
        let k = ((d * d - self.m * self.m) / (2.0 * self.b.abs())).round();
        if k < 1.0 {
            return false;
        }
        // check neighbours of the rounded index
        let k = k as u32;
        [k.saturating_sub(1).max(1), k, k + 1]
            .iter()
            .any(|&kk| self.on_level(d, self.level_magnitude(kk)))
    }

    /// All spectral values in `[lo, hi]`, sorted.
    pub fn levels_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let z = self.zeroth_level();
        if z >= lo && z <= hi {
            out.push(z);
        }
        let reach = (lo - self.v).abs().max((hi - self.v).abs());
        let mut k = 1u32;
        loop {
            let mag = self.level_magnitude(k);
            if mag > reach {
                break;
            }
            for e in [self.v - mag, self.v + mag] {
                if e >= lo && e <= hi {
                    out.push(e);
                }
            }
            k += 1;
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkSpectrum {
    pub levels: Vec<f64>,
    pub zeroth_level: f64,
    pub k_max: u32,
}

/// A half-integer stored exactly as its double.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfInteger {
    pub twice: i64,
}

impl HalfInteger {
    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowPrediction {
    pub i_minus: HalfInteger,
    pub i_plus: HalfInteger,
    pub sf: i64,
    pub n_minus: u32,
    pub n_plus: u32,
}

pub fn landau_levels(hp: HalfSpaceParams, k_max: u32) -> Result<BulkSpectrum> {
    hp.validate()?;
    if k_max < 1 {
        return Err(FlowError::Config("k_max must be at least 1".into()));
    }
    let mut levels: Vec<f64> = (1..=k_max)
        .flat_map(|k| {
            let mag = hp.level_magnitude(k);
            [hp.v - mag, hp.v + mag]
        })
        .collect();
    levels.push(hp.zeroth_level());
    levels.sort_by(f64::total_cmp);
    Ok(BulkSpectrum {
        levels,
        zeroth_level: hp.zeroth_level(),
        k_max,
    })
}

/// Number of levels of `Ĥ(ζ) - V` in `(|m|, |alpha - V|)`.
pub fn count_levels(hp: HalfSpaceParams, alpha: f64) -> Result<u32> {
    hp.validate()?;
    let d = (alpha - hp.v).abs();
    if hp.on_level(d, hp.m.abs()) {
        return Err(FlowError::AlphaOnBulkLevel {
            alpha,
            level: hp.m.abs(),
        });
    }
    let mut n = 0u32;
    loop {
        let mag = hp.level_magnitude(n + 1);
        if hp.on_level(d, mag) {
            return Err(FlowError::AlphaOnBulkLevel { alpha, level: mag });
        }
        if mag > d {
            return Ok(n);
        }
        n += 1;
    }
}

/// `I(H; alpha) = sgn(B) sgn(alpha - V - m sgn(B)) (N + 1/2)`.
pub fn half_index(hp: HalfSpaceParams, alpha: f64) -> Result<HalfInteger> {
    hp.validate()?;
    if hp.in_spectrum(alpha) {
        return Err(FlowError::FlowUndefined(alpha));
    }
    let n = count_levels(hp, alpha).map_err(|_| FlowError::FlowUndefined(alpha))?;
    let s_b = hp.b.signum() as i64;
    let s_a = (alpha - hp.zeroth_level()).signum() as i64;
    Ok(HalfInteger {
        twice: s_b * s_a * (2 * n as i64 + 1),
    })
}

pub fn predicted_sf(
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
    alpha: f64,
) -> Result<FlowPrediction> {
    if minus.in_spectrum(alpha) || plus.in_spectrum(alpha) {
        return Err(FlowError::AlphaInBulkSpectrum(alpha));
    }
    let i_minus = half_index(minus, alpha)?;
    let i_plus = half_index(plus, alpha)?;
    let diff = i_minus.twice - i_plus.twice;
    debug_assert!(diff % 2 == 0);
    Ok(FlowPrediction {
        i_minus,
        i_plus,
        sf: diff / 2,
        n_minus: count_levels(minus, alpha)?,
        n_plus: count_levels(plus, alpha)?,
    })
}

/// Connected components of `ρ(H+) ∩ ρ(H-)` inside `[lo, hi]`, as open intervals.
pub fn gap_components(
    minus: HalfSpaceParams,
    plus: HalfSpaceParams,
    lo: f64,
    hi: f64,
) -> Vec<(f64, f64)> {
    let mut cuts = minus.levels_in(lo, hi);
    cuts.extend(plus.levels_in(lo, hi));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = vec![lo];
    edges.extend(cuts);
    edges.push(hi);
    edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(b: f64, m: f64, v: f64) -> HalfSpaceParams {
        HalfSpaceParams::new(b, m, v).unwrap()
    }

    #[test]
    fn landau_level_examples() {
        let s = landau_levels(hp(2.0, 2.0, 0.0), 2).unwrap();
        let expect = [
            -(12f64.sqrt()),
            -(8f64.sqrt()),
            2.0,
            8f64.sqrt(),
            12f64.sqrt(),
        ];
        assert_eq!(s.levels.len(), 5);
        for (a, b) in s.levels.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = landau_levels(hp(-2.0, 2.0, 0.0), 1).unwrap();
        assert_eq!(s.zeroth_level, -2.0);
        assert_eq!(s.levels, vec![-(8f64.sqrt()), -2.0, 8f64.sqrt()]);
        let s = landau_levels(hp(2.0, 0.0, 1.0), 1).unwrap();
        assert_eq!(s.levels, vec![-1.0, 1.0, 3.0]);
        assert!(HalfSpaceParams::new(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn count_level_examples() {
        let h = hp(2.0, 2.0, 0.0);
        assert_eq!(count_levels(h, 2.5).unwrap(), 0);
        assert_eq!(count_levels(h, 3.0).unwrap(), 1);
        assert_eq!(count_levels(h, 0.0).unwrap(), 0);
        assert!(matches!(
            count_levels(h, 8f64.sqrt()),
            Err(FlowError::AlphaOnBulkLevel { .. })
        ));
    }

    #[test]
    fn half_index_examples() {
        assert_eq!(
            half_index(hp(2.0, 2.0, 0.1), 0.0).unwrap(),
            HalfInteger { twice: -1 }
        );
        assert_eq!(
            half_index(hp(-2.0, -2.0, -0.1), 0.0).unwrap(),
            HalfInteger { twice: 1 }
        );
        assert_eq!(
            half_index(hp(2.0, 2.0, 0.1), 2.5).unwrap(),
            HalfInteger { twice: 1 }
        );
        assert!(matches!(
            half_index(hp(2.0, 2.0, 0.1), 2.1),
            Err(FlowError::FlowUndefined(_))
        ));
    }

    #[test]
    fn predicted_sf_examples() {
        let minus = hp(-2.0, -2.0, -0.1);
        let plus = hp(2.0, 2.0, 0.1);
        assert_eq!(predicted_sf(minus, plus, 0.0).unwrap().sf, 1);
        assert_eq!(predicted_sf(minus, plus, 2.5).unwrap().sf, -1);
        let same = hp(2.0, 2.0, 0.0);
        assert_eq!(predicted_sf(same, same, 0.0).unwrap().sf, 0);
        assert!(matches!(
            predicted_sf(minus, plus, 2.1),
            Err(FlowError::AlphaInBulkSpectrum(_))
        ));
    }

    #[test]
    fn figure_one_predictions() {
        // alpha = 0.1 for the four zero-potential panels
        let cases = [
            (hp(2.0, 2.0, 0.0), hp(2.0, 2.0, 0.0), 0),
            (hp(2.0, -2.0, 0.0), hp(2.0, 2.0, 0.0), 1),
            (hp(-2.0, 0.0, 0.0), hp(2.0, 0.0, 0.0), -1),
            (hp(-2.0, 2.0, 0.0), hp(2.0, 2.0, 0.0), 0),
        ];
        for (minus, plus, sf) in cases {
            assert_eq!(predicted_sf(minus, plus, 0.1).unwrap().sf, sf);
        }
        // bottom-left at alpha = 1
        assert_eq!(
            predicted_sf(hp(-2.0, 0.0, 0.0), hp(2.0, 0.0, 0.0), 1.0)
                .unwrap()
                .sf,
            -1
        );
    }

    #[test]
    fn gap_components_split_on_levels() {
        let minus = hp(-2.0, -2.0, -0.1);
        let plus = hp(2.0, 2.0, 0.1);
        let comps = gap_components(minus, plus, -3.0, 3.0);
        assert!(comps.iter().any(|&(a, b)| a < 0.0 && b > 0.0));
        for (a, b) in comps {
            let mid = 0.5 * (a + b);
            assert!(predicted_sf(minus, plus, mid).is_ok());
        }
    }
}
