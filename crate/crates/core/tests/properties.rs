use grouptest::group::{
    all_subgroups, irrep_table, normal_subgroups, orthogonal, parse_group_spec, GroupSpec, Subgroup,
};
use grouptest::oracle_gen::{dist_to_per, dist_to_range, random_periodic};
use grouptest::qsim::{
    fourier_sampling_distribution, fourier_sampling_distribution_general,
    fourier_sampling_distribution_pair, fourier_sampling_distribution_pair_general,
    fourier_sampling_distribution_with, pair_defect, state_defect, superposition_distance_sq,
    FourierMethod, FunctionOracle, PairOracle,
};
use grouptest::rng::rng_from_seed;
use grouptest::Fraction;
use proptest::prelude::*;

fn z12() -> GroupSpec {
    GroupSpec::cyclic(12)
}

fn ratio(r: &Fraction) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn table(n: usize, values: u64) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0..values, n)
}

fn mass_outside(g: &GroupSpec, f: &FunctionOracle, h: &Subgroup) -> f64 {
    let perp = orthogonal(g, h).unwrap();
    fourier_sampling_distribution(f)
        .unwrap()
        .mass_where(|o| !perp.contains(grouptest::group::Element::from_index(o.label)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn defect_equals_mass_outside_perp(t in table(12, 5)) {
        let g = z12();
        let f = FunctionOracle::from_table(g.clone(), t.clone()).unwrap();
        for h in all_subgroups(&g) {
            let defect = state_defect(&g, &t, &h).unwrap();
            prop_assert!((defect - mass_outside(&g, &f, &h)).abs() <= 1e-9);
            prop_assert!(ratio(&dist_to_per(&g, &t, &h)) <= 2.0 * defect + 1e-12);
        }
    }

    #[test]
    fn hamming_distance_is_half_state_distance(a in table(10, 4), b in table(10, 4)) {
        let diff = a.iter().zip(&b).filter(|(x, y)| x != y).count() as u128;
        prop_assert_eq!(
            Fraction::new(diff, 10),
            superposition_distance_sq(&a, &b) / Fraction::from(2)
        );
    }

    #[test]
    fn periodic_functions_sample_inside_perp(seed in any::<u64>(), which in 0usize..6) {
        let g = z12();
        let subs = all_subgroups(&g);
        let h = &subs[which % subs.len()];
        let f = random_periodic(&g, h, 5, &mut rng_from_seed(seed)).unwrap();
        prop_assert!(mass_outside(&g, &f, h) <= 1e-12);
        let perp = orthogonal(&g, h).unwrap();
        for o in fourier_sampling_distribution(&f).unwrap().support() {
            prop_assert!(perp.contains(grouptest::group::Element::from_index(o.label)));
        }
    }

    #[test]
    fn periodic_functions_on_d4_sample_trivial_irreps(seed in any::<u64>(), which in 0usize..8) {
        let g = GroupSpec::dihedral(4);
        let table = irrep_table(&g).unwrap();
        let normals = normal_subgroups(&g);
        let h = &normals[which % normals.len()];
        let f = random_periodic(&g, h, 4, &mut rng_from_seed(seed)).unwrap();
        let d = fourier_sampling_distribution_general(&f).unwrap();
        for o in d.support() {
            prop_assert!(table[o.label].is_trivial_on(h));
        }
    }

    #[test]
    fn distributions_are_normalized(spec in prop::sample::select(vec!["Z6", "Z2xZ4", "D5", "S3", "Q8", "D4"]), seed in any::<u64>()) {
        let g = parse_group_spec(spec).unwrap();
        let t = grouptest::oracle_gen::random_table(&g, 4, &mut rng_from_seed(seed)).unwrap();
        let f = FunctionOracle::from_table(g.clone(), t.clone()).unwrap();
        prop_assert!((fourier_sampling_distribution_general(&f).unwrap().total() - 1.0).abs() <= 1e-9);
        let pair = PairOracle::from_tables(g.clone(), t.clone(), t.iter().rev().copied().collect()).unwrap();
        prop_assert!((fourier_sampling_distribution_pair(&pair).unwrap().total() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn abelian_routes_agree(t in table(12, 4)) {
        let g = GroupSpec::abelian(&[2, 6]);
        let f = FunctionOracle::from_table(g, t).unwrap();
        let a = fourier_sampling_distribution(&f).unwrap();
        let b = fourier_sampling_distribution_general(&f).unwrap();
        let c = fourier_sampling_distribution_with(&f, FourierMethod::Fft).unwrap();
        for ((x, y), z) in a.probabilities().iter().zip(b.probabilities()).zip(c.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-12);
            prop_assert!((x - z).abs() <= 1e-12);
        }
    }

    #[test]
    fn pair_defect_matches_flagged_mass(f0 in table(8, 3), f1 in table(8, 3)) {
        let g = GroupSpec::cyclic(8);
        let pair = PairOracle::from_tables(g.clone(), f0.clone(), f1.clone()).unwrap();
        let d = fourier_sampling_distribution_pair(&pair).unwrap();
        let dg = fourier_sampling_distribution_pair_general(&pair).unwrap();
        for (x, y) in d.probabilities().iter().zip(dg.probabilities()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        for h in all_subgroups(&g) {
            let perp = orthogonal(&g, &h).unwrap();
            let p = d.mass_where(|o| o.bit == Some(1) && perp.contains(grouptest::group::Element::from_index(o.label)));
            prop_assert!((pair_defect(&g, &f0, &f1, &h).unwrap() - 2.0 * p).abs() <= 1e-9);
            prop_assert!(ratio(&dist_to_range(&g, &f0, &f1, &h)) <= h.order() as f64 * p + 1e-9);
        }
    }
}

#[test]
fn orthogonal_is_an_involution_on_z12() {
    let g = z12();
    for h in all_subgroups(&g) {
        let perp = orthogonal(&g, &h).unwrap();
        assert_eq!(h.order() * perp.order(), 12);
        assert_eq!(orthogonal(&g, &perp).unwrap(), h);
    }
}

#[test]
fn injective_functions_follow_plancherel() {
    for spec in ["D4", "S3", "Q8", "D5"] {
        let g = parse_group_spec(spec).unwrap();
        let f = FunctionOracle::from_table(g.clone(), (0..g.order()).collect()).unwrap();
        let d = fourier_sampling_distribution_general(&f).unwrap();
        for (rho, p) in irrep_table(&g).unwrap().iter().zip(d.probabilities()) {
            let expect = (rho.dimension() * rho.dimension()) as f64 / g.order() as f64;
            assert!((p - expect).abs() <= 1e-12, "{spec} {}", rho.label());
        }
    }
}

#[test]
fn distribution_computation_charges_no_queries() {
    let g = z12();
    let f = FunctionOracle::from_table(g, vec![0; 12]).unwrap();
    fourier_sampling_distribution(&f).unwrap();
    assert_eq!(f.queries(), 0);
    assert_eq!(f.simulation_reads(), 12);
}
