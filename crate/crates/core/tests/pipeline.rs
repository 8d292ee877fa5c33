mod common;

use common::*;
use essential_range::cli::{parse_spec, serialize_spec};
use essential_range::convex2d::{hausdorff, AngleGrid, ConvexRegion};
use essential_range::essrange::{essential_numerical_range, translate_spec};
use essential_range::linalg::rayleigh;
use essential_range::numrange::numerical_range;
use essential_range::oracle::{inner_approximate_we, membership, random_unit_vector};
use essential_range::regroup::{choose_translation, regroup, verify_conv_free};
use essential_range::{BlockOperatorSpec, ComplexMatrix, Decay, TailModel};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> + Clone {
    (1..=max_dim).prop_flat_map(|d| {
        prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), d * d)
            .prop_map(move |v| ComplexMatrix::new(d, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap())
    })
}

fn tail_strategy() -> impl Strategy<Value = TailModel> {
    let limits = prop::collection::vec(matrix_strategy(3), 1..3);
    prop_oneof![
        3 => limits.clone().prop_map(|cycle| TailModel::Periodic { cycle }),
        1 => (limits, 0.1..1.0f64, 1.0..3.0f64).prop_map(|(limits, c, p)| TailModel::Vanishing {
            limits,
            decay: Decay::Power { c, p },
        }),
    ]
}

fn spec_strategy() -> impl Strategy<Value = BlockOperatorSpec> {
    (prop::collection::vec(matrix_strategy(3), 0..3), tail_strategy())
        .prop_map(|(prefix, tail)| BlockOperatorSpec::new(prefix, tail).unwrap())
}

fn structured_vectors(dim: usize) -> Vec<Vec<Complex64>> {
    let mut out = Vec::new();
    for i in 0..dim {
        let mut e = vec![c(0.0, 0.0); dim];
        e[i] = c(1.0, 0.0);
        out.push(e);
        for j in i + 1..dim {
            for phase in [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)] {
                let mut v = vec![c(0.0, 0.0); dim];
                v[i] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                v[j] = phase * std::f64::consts::FRAC_1_SQRT_2;
                out.push(v);
            }
        }
    }
    out
}

#[test]
fn rayleigh_quotients_lie_in_block_range() {
    let grid = AngleGrid::new(360).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 4);
        let r = numerical_range(&a, grid).unwrap();
        let tol = 1e-9 * (1.0 + a.norm_bound());
        let mut vectors = structured_vectors(4);
        vectors.extend((0..10_000).map(|_| random_unit_vector(&mut rng, 4)));
        for x in &vectors {
            let q = rayleigh(&a, x).unwrap();
            assert!(membership(q, &r.outer, tol), "{q} outside outer polygon");
        }
    }
}

#[test]
fn oracle_samples_stay_inside_corpus_ranges() {
    let grid = AngleGrid::new(360).unwrap();
    for name in ["constant.json", "vanishing.json", "prefixed_periodic.json"] {
        let spec = load(name);
        let we = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        let cloud = inner_approximate_we(&spec, we.converged_at_k, 2000, 3, 64).unwrap();
        for &p in cloud.points() {
            assert!(membership(p, &we.region, 0.02), "{name}: {p} outside");
        }
    }
}

#[test]
fn regrouping_translated_corpus_specs() {
    let grid = AngleGrid::new(360).unwrap();
    for name in ["two_matrix.json", "eventually_periodic_scalar.json", "prefixed_periodic.json"] {
        let spec = load(name);
        let we = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        let t = choose_translation(&we.region).unwrap();
        let spec = translate_spec(&spec, t.z);
        let we = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        let decomp = regroup(&spec, &we, grid, 1e-2, 1_000_000, 32).unwrap();
        let report = verify_conv_free(&spec, &decomp, &we, grid, 1e-2).unwrap();
        assert!(report.gap <= 0.02, "{name}: gap {}", report.gap);
    }
}

#[test]
fn dense_disc_regroups() {
    let grid = AngleGrid::new(360).unwrap();
    let spec = BlockOperatorSpec::dense_angle_diagonal();
    let we = essential_numerical_range(&spec, grid, 0.05).unwrap();
    let t = choose_translation(&we.region).unwrap();
    let spec = translate_spec(&spec, t.z);
    let we = essential_numerical_range(&spec, grid, 0.05).unwrap();
    let decomp = regroup(&spec, &we, grid, 0.05, 1_000_000, 64).unwrap();
    let report = verify_conv_free(&spec, &decomp, &we, grid, 0.05).unwrap();
    assert!(report.gap <= 0.1, "gap {}", report.gap);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn limsup_ranges_sit_inside_essential_range(spec in spec_strategy()) {
        let grid = AngleGrid::new(180).unwrap();
        let we = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        for r in &we.limsup_regions {
            for &v in r.vertices() {
                prop_assert!(membership(v, &we.region, 1e-9 * (1.0 + spec.norm_bound())));
            }
        }
        prop_assert!(we.crosscheck_gap <= 10.0 * we.tolerance);
    }

    #[test]
    fn prefix_does_not_change_essential_range(spec in spec_strategy(), extra in prop::collection::vec(matrix_strategy(4), 1..4)) {
        let grid = AngleGrid::new(180).unwrap();
        let base = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        let mut prefix = extra;
        prefix.extend_from_slice(spec.prefix());
        let other = BlockOperatorSpec::new(prefix, spec.tail().clone()).unwrap();
        let moved = essential_numerical_range(&other, grid, 1e-3).unwrap();
        prop_assert!(hausdorff(&base.region, &moved.region).unwrap() <= 1e-9);
    }

    #[test]
    fn translation_moves_essential_range(spec in spec_strategy(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let grid = AngleGrid::new(180).unwrap();
        let z = c(re, im);
        let a = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        let b = essential_numerical_range(&translate_spec(&spec, z), grid, 1e-3).unwrap();
        prop_assert!(hausdorff(&b.region, &a.region.translate(-z)).unwrap() <= 1e-3);
    }

    #[test]
    fn spec_json_round_trips(spec in spec_strategy()) {
        let text = serialize_spec(&spec);
        let back = parse_spec(&text).unwrap();
        prop_assert_eq!(serialize_spec(&back), text);
        for n in 1..8 {
            prop_assert_eq!(back.block(n), spec.block(n));
        }
    }

    #[test]
    fn scalar_cycles_give_their_hull(points in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..7)) {
        let grid = AngleGrid::new(360).unwrap();
        let cycle: Vec<_> = points.iter().map(|&(a, b)| c(a, b)).collect();
        let spec = BlockOperatorSpec::scalar_periodic(&[c(9.0, 9.0)], &cycle).unwrap();
        let we = essential_numerical_range(&spec, grid, 1e-3).unwrap();
        let exact = ConvexRegion::from_points(&cycle, grid).unwrap();
        prop_assert!(hausdorff(&we.region, &exact).unwrap() <= 1e-6);
    }
}
