mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ruelle_core::sft::periodic_orbits;
use ruelle_core::window::WindowFunction;
use ruelle_core::zeta::{
    orbit_product_series, weighted_zeta_series, weighted_zeta_series_with_cutoff, zeta_rational, zeta_series,
};

use common::{all_zero_one, random_accepted};

#[test]
fn euler_product_matches_trace_formula() {
    for a in all_zero_one(2).into_iter().chain(all_zero_one(3).into_iter().step_by(7)) {
        let lengths: Vec<usize> = periodic_orbits(&a, 9).unwrap().iter().map(|o| o.length).collect();
        assert_eq!(orbit_product_series(&lengths, 9, 9).unwrap(), zeta_series(&a, 9), "{a}");
    }
}

#[test]
fn unit_weight_is_the_plain_zeta() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let a = random_accepted(&mut rng, 3, 1);
        let one = WindowFunction::from_symbol_values(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(weighted_zeta_series(&a, &one, 10).unwrap(), zeta_series(&a, 10));
        assert_eq!(weighted_zeta_series(&a, &WindowFunction::constant(-1), 10).unwrap(), zeta_series(&a, 10));
    }
}

#[test]
fn coefficients_are_integers() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let a = random_accepted(&mut rng, 4, 2);
        assert!(zeta_series(&a, 15).integer_coeffs().is_some());
    }
}

fn table_weights() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(1i64..=3, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transfer_matrix_matches_enumeration(w in table_weights(), neg in any::<bool>()) {
        // a two-block weight on the golden mean shift
        let a = common::golden_mean();
        let sign = if neg { -1 } else { 1 };
        let blocks = [vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]];
        let table = blocks.iter().cloned().zip(w.iter().map(|v| v * sign)).collect();
        let c = WindowFunction::table(-1, 0, table).unwrap();
        let exact = weighted_zeta_series(&a, &c, 9).unwrap();
        prop_assert_eq!(exact, weighted_zeta_series_with_cutoff(&a, &c, 9, 9).unwrap());
    }

    #[test]
    fn rational_form_expands_to_series(bits in 0u32..512) {
        let rows: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| ((bits >> (3 * i + j)) & 1) as i64).collect()).collect();
        if let Ok(a) = ruelle_core::SftMatrix::new(&rows, ruelle_core::Mode::ZeroOne) {
            let s = zeta_series(&a, 12);
            prop_assert_eq!(zeta_rational(&a).expand(12), s.clone());
            // log-derivative coefficients are the traces
            let g = s.log_derivative();
            for (n, v) in g.iter().enumerate().skip(1) {
                prop_assert_eq!(v, &BigRational::from_integer(a.to_int().pow(n as u64).trace()));
            }
        }
    }
}

#[test]
fn zeta_of_general_matrix() {
    let a = common::big_pair();
    let r = zeta_rational(&a);
    // det(I - tA) = 1 - 20t - t^2
    assert_eq!(r.den, [1, -20, -1].map(BigInt::from).to_vec());
}
