mod common;

use common::*;
use interface_flow::branches::{sweep_branches, SweepConfig};
use interface_flow::bulk::{gap_components, predicted_sf, HalfSpaceParams};
use interface_flow::fiber::{BoundaryCondition, Grid1D, SpuriousFilter};
use interface_flow::profiles::{ProfileSet, Shape, SwitchProfile};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = f64> + Clone {
    (0.5..4.0f64, any::<bool>()).prop_map(|(b, neg)| if neg { -b } else { b })
}

fn half_space() -> impl Strategy<Value = HalfSpaceParams> {
    (field(), -3.0..3.0f64, -2.0..2.0f64).prop_map(|(b, m, v)| hp(b, m, v))
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![Just(Shape::SmoothBump), Just(Shape::LinearRamp)]
}

fn wall(values: impl Strategy<Value = f64> + Clone) -> impl Strategy<Value = SwitchProfile> {
    (values.clone(), values, -3.0..2.5f64, 0.2..3.0f64, shape()).prop_map(|(lo, hi, a, w, s)| {
        SwitchProfile::new(lo, hi, a, (a + w).min(3.0).max(a + 0.2), s).unwrap()
    })
}

fn profiles() -> impl Strategy<Value = ProfileSet> {
    (wall(field()), wall(-3.0..3.0f64), wall(-2.0..2.0f64))
        .prop_map(|(b, m, v)| ProfileSet::new(b, m, v).unwrap())
}

fn grid() -> impl Strategy<Value = Grid1D> {
    (4.0..10.0f64, 16usize..60, any::<bool>()).prop_map(|(l, n, periodic)| {
        let bc = if periodic {
            BoundaryCondition::Periodic
        } else {
            BoundaryCondition::Dirichlet
        };
        Grid1D::new(l, n, bc).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fiber_matrix_is_exactly_hermitian(g in grid(), ps in profiles(), zeta in -8.0..8.0f64) {
        prop_assert_eq!(hermiticity_defect(&g, &ps, zeta), 0.0);
    }

    #[test]
    fn spectrum_is_symmetric_without_mass_or_potential(g in grid(), b in wall(field()), zeta in -8.0..8.0f64) {
        prop_assert!(chiral_defect(&g, b, zeta) <= 1e-10);
    }

    #[test]
    fn constant_potential_shifts_the_spectrum(g in grid(), ps in profiles(), zeta in -8.0..8.0f64, c in -3.0..3.0f64) {
        prop_assert!(shift_defect(&g, &ps, zeta, c) <= 1e-12);
    }

    #[test]
    fn eigenvalues_move_at_most_by_the_mass_and_potential_change(
        g in grid(), ps in profiles(), m in wall(-3.0..3.0f64), v in wall(-2.0..2.0f64), zeta in -8.0..8.0f64,
    ) {
        let other = ProfileSet::new(ps.b, m, v).unwrap();
        prop_assert!(weyl_excess(&g, &ps, &other, zeta) <= 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn mirrored_interface_reverses_the_flow(minus in half_space(), plus in half_space(), alpha in -6.0..6.0f64) {
        if let (Ok(a), Ok(b)) = (predicted_sf(minus, plus, alpha), predicted_sf(plus, minus, alpha)) {
            prop_assert_eq!(a.sf, -b.sf);
        }
    }

    #[test]
    fn common_potential_shift_moves_alpha_with_it(
        minus in half_space(), plus in half_space(), alpha in -4.0..4.0f64, c in -2.0..2.0f64,
    ) {
        let shift = |h: HalfSpaceParams| hp(h.b, h.m, h.v + c);
        if let (Ok(a), Ok(b)) = (predicted_sf(minus, plus, alpha), predicted_sf(shift(minus), shift(plus), alpha + c)) {
            prop_assert_eq!(a.sf, b.sf);
        }
    }

    #[test]
    fn prediction_is_constant_on_gap_components(minus in half_space(), plus in half_space(), t in 0.0..1.0f64) {
        for (lo, hi) in gap_components(minus, plus, -6.0, 6.0) {
            let mid = predicted_sf(minus, plus, 0.5 * (lo + hi)).unwrap().sf;
            let inner = lo + (hi - lo) * (0.01 + 0.98 * t);
            prop_assert_eq!(predicted_sf(minus, plus, inner).unwrap().sf, mid);
        }
    }

    #[test]
    fn profiles_sit_exactly_on_their_plateaus(p in wall(-5.0..5.0f64), d in 0.0..1e6f64) {
        prop_assert_eq!(p.evaluate(p.t_lo - d), p.lower);
        prop_assert_eq!(p.evaluate(p.t_hi + d), p.upper);
        prop_assert_eq!(p.derivative(p.t_lo - d), 0.0);
        prop_assert_eq!(p.derivative(p.t_hi + d), 0.0);
    }

    #[test]
    fn profiles_are_monotone(p in wall(-5.0..5.0f64), s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let at = |u: f64| p.evaluate(p.t_lo - 0.5 + u * (p.t_hi - p.t_lo + 1.0));
        let (a, b) = (at(s.min(t)), at(s.max(t)));
        if p.upper >= p.lower {
            prop_assert!(a <= b);
        } else {
            prop_assert!(a >= b);
        }
    }

    #[test]
    fn derivative_matches_finite_differences(p in wall(-5.0..5.0f64), u in 0.0..1.0f64) {
        let x = p.t_lo - 0.5 + u * (p.t_hi - p.t_lo + 1.0);
        let e = 1e-5;
        let fd = (p.evaluate(x + e) - p.evaluate(x - e)) / (2.0 * e);
        if p.shape == Shape::LinearRamp && ((x - p.t_lo).abs() < 2.0 * e || (x - p.t_hi).abs() < 2.0 * e) {
            return Ok(());
        }
        prop_assert!((fd - p.derivative(x)).abs() <= 1e-6 * (1.0 + (p.upper - p.lower).abs() / (p.t_hi - p.t_lo)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tracked_branches_are_one_lipschitz(ps in profiles()) {
        let g = Grid1D::new(8.0, 200, BoundaryCondition::Dirichlet).unwrap();
        let cfg = SweepConfig { zeta_min: -3.0, zeta_max: 3.0, samples: 61, window: (-2.5, 2.5), ..SweepConfig::default() };
        let branches = sweep_branches(&g, &ps, &cfg, &SpuriousFilter::for_grid(&g)).unwrap();
        for b in &branches {
            for k in 1..b.len() {
                let (dz, dm) = (b.zetas[k] - b.zetas[k - 1], b.mus[k] - b.mus[k - 1]);
                prop_assert!(dm.abs() <= dz.abs() + 1e-8, "branch {}: |Δμ| {} > |Δζ| {}", b.id, dm.abs(), dz.abs());
            }
        }
    }
}
