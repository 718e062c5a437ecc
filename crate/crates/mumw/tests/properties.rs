//! Property tests: the structural invariants every constructed object must
//! satisfy, exercised over randomized inputs.

use mumw::criteria::{isotropic_witness_value, max_entangled_witness_value};
use mumw::generators::{GeneratorBasis, SCHEME_DEFAULT};
use mumw::measurements::{build_mums, max_feasible_t, verify_mum_axioms, Mum};
use mumw::numerics::{
    hs_inner, identity, kron, min_eigenvalue, validate_hermitian, CMat, HermitianOperator,
};
use mumw::rotations::{axis_circulant_d3, planar_axis_rotation, rodrigues, verify_rotation};
use mumw::states::{isotropic_state, max_entangled, random_density};
use mumw::witness::{apply_positive_map, build_witness_direct, evaluate_witness};
use mumw::{ToleranceConfig, ValidationPolicy};
use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cfg() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
}

/// Random Hermitian operator with entries of modest size.
fn hermitian_strategy(d: usize) -> impl Strategy<Value = HermitianOperator> {
    proptest::collection::vec(-1.0_f64..1.0, d * d * 2).prop_map(move |raw| {
        let mut m = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let idx = 2 * (i * d + j);
                m[(i, j)] = Complex::new(raw[idx], raw[idx + 1]);
            }
        }
        HermitianOperator::symmetrized(m)
    })
}

fn closed_form_kappa(d: usize, t: f64) -> f64 {
    let df = d as f64;
    1.0 / df + t * t * (1.0 + df.sqrt()).powi(2) * (df - 1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hs_inner_is_symmetric_and_positive_on_squares(
        a in hermitian_strategy(4),
        b in hermitian_strategy(4),
    ) {
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() < 1e-10);
        prop_assert!(hs_inner(&a, &a).unwrap() >= 0.0);
    }

    #[test]
    fn kron_trace_is_multiplicative(
        a in hermitian_strategy(3),
        b in hermitian_strategy(2),
    ) {
        let k = kron(a.matrix(), b.matrix());
        prop_assert_eq!(k.nrows(), 6);
        let lhs = k.trace();
        let rhs = a.matrix().trace() * b.matrix().trace();
        prop_assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn min_eigenvalue_shifts_with_identity(
        a in hermitian_strategy(4),
        shift in -2.0_f64..2.0,
    ) {
        let base = min_eigenvalue(&a).unwrap();
        let shifted = HermitianOperator::symmetrized(
            a.matrix() + identity(4).scale(shift),
        );
        let moved = min_eigenvalue(&shifted).unwrap();
        prop_assert!((moved - (base + shift)).abs() < 1e-9);
    }

    #[test]
    fn rodrigues_is_always_a_proper_ones_fixing_rotation(theta in -6.3_f64..6.3) {
        let r = rodrigues([1.0, 1.0, 1.0], theta).unwrap();
        verify_rotation(&r, 1e-9).unwrap();
    }

    #[test]
    fn circulant_transpose_reverses_the_angle(theta in -6.3_f64..6.3) {
        let fwd = axis_circulant_d3(theta);
        let rev = axis_circulant_d3(-theta);
        prop_assert!(max_real(&(fwd.transpose() - rev)) < 1e-12);
    }

    #[test]
    fn planar_rotations_are_proper_and_ones_fixing(
        d in 3_usize..7,
        seed in 0_u64..1000,
        theta in -3.2_f64..3.2,
    ) {
        let span = d - 1;
        let i = 1 + (seed as usize % span);
        let j = 1 + ((seed as usize / span) % span);
        if i < j {
            let o = planar_axis_rotation(d, i, j, theta).unwrap();
            verify_rotation(&o, 1e-9).unwrap();
        }
    }
}

fn max_real(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructed_families_satisfy_axioms_with_closed_form_kappa(
        d in 2_usize..7,
        frac in 0.05_f64..0.95,
    ) {
        let basis = GeneratorBasis::new(d, SCHEME_DEFAULT).unwrap();
        let t = frac * max_feasible_t(&basis).unwrap();
        let mum = build_mums(&basis, t, &cfg()).unwrap();
        let report = verify_mum_axioms(&mum, &cfg());
        prop_assert!(report.pass, "{}", report.describe());
        prop_assert!((mum.kappa() - closed_form_kappa(d, t)).abs() < 1e-12);
    }

    #[test]
    fn wire_round_trip_is_lossless(
        d in 2_usize..5,
        frac in 0.1_f64..0.9,
    ) {
        let basis = GeneratorBasis::new(d, SCHEME_DEFAULT).unwrap();
        let t = frac * max_feasible_t(&basis).unwrap();
        let mum = build_mums(&basis, t, &cfg()).unwrap();
        let back = Mum::from_json_str(&mum.to_json().unwrap(), &cfg(), ValidationPolicy::Strict)
            .unwrap();
        for b in 0..=d {
            for n in 0..d {
                prop_assert_eq!(back.element(b, n).matrix(), mum.element(b, n).matrix());
            }
        }
    }

    #[test]
    fn induced_map_is_linear(
        frac in 0.2_f64..0.9,
        ca in -1.5_f64..1.5,
        cb in -1.5_f64..1.5,
        seed in 0_u64..512,
    ) {
        let basis = GeneratorBasis::new(3, SCHEME_DEFAULT).unwrap();
        let t = frac * max_feasible_t(&basis).unwrap();
        let mum = build_mums(&basis, t, &cfg()).unwrap();
        let rots = mumw::rotations::RotationSet::identity(3, 4).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_density(3, &mut rng).unwrap().matrix().clone();
        let y = random_density(3, &mut rng).unwrap().matrix().clone();
        let mix = x.scale(ca) + y.scale(cb);

        let lhs = apply_positive_map(&mum, &rots, &mix).unwrap();
        let rhs = apply_positive_map(&mum, &rots, &x).unwrap().scale(ca)
            + apply_positive_map(&mum, &rots, &y).unwrap().scale(cb);
        prop_assert!(max_entry(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn witness_expectation_is_affine_on_the_isotropic_line(
        d in 2_usize..4,
        frac in 0.2_f64..0.9,
        alpha in 0.0_f64..1.0,
    ) {
        let basis = GeneratorBasis::new(d, SCHEME_DEFAULT).unwrap();
        let t = frac * max_feasible_t(&basis).unwrap();
        let mum = build_mums(&basis, t, &cfg()).unwrap();
        let rots = mumw::rotations::RotationSet::identity(d, d + 1).unwrap();
        let w = build_witness_direct(&mum, &rots, &cfg()).unwrap();

        let full = evaluate_witness(&w, &isotropic_state(d, alpha).unwrap()).unwrap();
        let closed = isotropic_witness_value(d, d + 1, mum.kappa(), alpha);
        prop_assert!((full - closed).abs() < 1e-10);

        // Endpoint consistency with the maximally entangled closed form.
        let top = evaluate_witness(&w, &max_entangled(d).unwrap()).unwrap();
        prop_assert!((top - max_entangled_witness_value(d, d + 1, mum.kappa())).abs() < 1e-10);
    }

    #[test]
    fn random_densities_are_valid_and_map_stays_positive(seed in 0_u64..256) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(4, &mut rng).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-12);
        let purity = hs_inner(rho.operator(), rho.operator()).unwrap();
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&purity));

        let basis = GeneratorBasis::new(4, SCHEME_DEFAULT).unwrap();
        let t = 0.5 * max_feasible_t(&basis).unwrap();
        let mum = build_mums(&basis, t, &cfg()).unwrap();
        let rots = mumw::rotations::RotationSet::identity(4, 5).unwrap();
        let out = apply_positive_map(&mum, &rots, rho.matrix()).unwrap();
        let (op, _) = validate_hermitian(&out, &cfg(), ValidationPolicy::Strict).unwrap();
        prop_assert!(min_eigenvalue(&op).unwrap() >= -1e-9);
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
    }
}

#[test]
fn generator_partition_is_a_bijection_for_all_supported_dimensions() {
    for d in 2..=8usize {
        let basis = GeneratorBasis::new(d, SCHEME_DEFAULT).unwrap();
        assert_eq!(basis.groups(), d + 1);
        let mut count = 0;
        for b in 0..basis.groups() {
            count += basis.group(b).len();
            assert_eq!(basis.group(b).len(), d - 1);
        }
        assert_eq!(count, (d + 1) * (d - 1));
    }
}

#[test]
fn feasibility_boundary_scales_like_the_closed_form() {
    // t* decreases with d; sanity anchors at both computed dimensions.
    let t2 = max_feasible_t(&GeneratorBasis::new(2, SCHEME_DEFAULT).unwrap()).unwrap();
    let t6 = max_feasible_t(&GeneratorBasis::new(6, SCHEME_DEFAULT).unwrap()).unwrap();
    assert!((t2 - 0.292_893_218_8).abs() < 1e-9);
    assert!((t6 - 0.030_557_927).abs() < 1e-8);
    assert!(t6 < t2);
}
