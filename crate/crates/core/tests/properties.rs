use proptest::prelude::*;

use circle_stab::circle::Angle;
use circle_stab::config::{quotient_distance, Configuration};
use circle_stab::diffeo::{
    contract_toward_identity, fixes_exceptional, interpolating_diffeo, CircleDiffeo,
};
use circle_stab::fields::{dif_shift, stabilizer_residual};
use circle_stab::maps::{catalog, normalize_exceptional};
use circle_stab::orbit::{exceptional_config, homood, homood_inverse, pfact, OrbitPoint};
use circle_stab::sampling::{random_dcr, random_diffeo, rng};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dif_shift_residual_small(seed in any::<u64>()) {
        let a = normalize_exceptional(catalog::single_sine()).unwrap().1;
        let r = random_dcr(&mut rng(seed), 2).unwrap();
        let h = dif_shift(&a, &r).unwrap();
        prop_assert!(stabilizer_residual(a.map().as_ref(), &h, &r, 512) <= 1e-7);
    }

    #[test]
    fn dif_shift_fixes_exceptional_points(seed in any::<u64>()) {
        let a = normalize_exceptional(catalog::double_sine()).unwrap().1;
        let r = random_dcr(&mut rng(seed), 4).unwrap();
        let h = dif_shift(&a, &r).unwrap();
        for p in a.exceptional_points() {
            prop_assert!(h.eval(p.t).distance(p.t) < 1e-9);
        }
    }

    #[test]
    fn contraction_stays_in_dcr(seed in any::<u64>(), s in 0.0f64..=1.0, n in 1usize..6) {
        let g = random_dcr(&mut rng(seed), n).unwrap();
        prop_assert!(fixes_exceptional(&contract_toward_identity(&g, s, n).unwrap(), n));
    }

    #[test]
    fn pfact_configuration_matches(seed in any::<u64>()) {
        let f = normalize_exceptional(catalog::single_sine()).unwrap().1;
        let mut r = rng(seed);
        let h = random_diffeo(&mut r, 2, 0.1).unwrap();
        let phi = random_diffeo(&mut r, 2, 0.1).unwrap();
        let (g, x) = pfact(&h, &phi, &f).unwrap();
        let c = exceptional_config(&g).unwrap();
        prop_assert!(quotient_distance(&c, &x, 2).unwrap() < 1e-9);
    }

    #[test]
    fn homood_moves_values_to_x(x0 in 0.0f64..1.0, gap in 0.05f64..0.95) {
        let f = normalize_exceptional(catalog::single_sine()).unwrap().1;
        let g = OrbitPoint::of(f.map().clone());
        let x = Configuration::new(vec![Angle::wrap(x0), Angle::wrap(x0 + gap)]).unwrap();
        let (moved, _) = homood(&g, &x).unwrap();
        let c = exceptional_config(&moved).unwrap();
        prop_assert!(quotient_distance(&c, &x, 2).unwrap() < 1e-9);
        let (back, _) = homood_inverse(&moved, &x).unwrap();
        prop_assert!(back.grid_distance(&g, 256) < 1e-9);
    }
}

#[test]
fn section_diffeo_moves_base_to_target() {
    let x = Configuration::from_turns(&[0.9, 0.05, 0.5]).unwrap();
    let g = interpolating_diffeo(&x).unwrap();
    for (a, p) in x.points().iter().enumerate() {
        assert!(g.eval(Angle::wrap(a as f64 / 3.0)).distance(*p) < 1e-12);
    }
    assert!(!g.is_identity());
    assert!(
        interpolating_diffeo(&Configuration::base(3))
            .unwrap()
            .grid_distance(&CircleDiffeo::identity(), 128)
            < 1e-15
    );
}
