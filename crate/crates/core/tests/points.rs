mod common;

use proptest::prelude::*;
use ruelle_core::groupoid::{AElement, SUElement};
use ruelle_core::sft::{metric, periodic_orbits};
use ruelle_core::{BiPoint, SftMatrix, Word};

use common::{full, golden_mean};
use num_rational::BigRational;

fn word(max: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(1u32..=2, 0..=max)
}

fn point_on(a: SftMatrix) -> impl Strategy<Value = BiPoint> {
    (word(3).prop_filter("period", |w| !w.is_empty()), word(5), word(3).prop_filter("period", |w| !w.is_empty()), -6i64..6)
        .prop_filter_map("admissible", move |(l, c, r, off)| BiPoint::new(&a, Word(l), Word(c), Word(r), off).ok())
}

fn full2_point() -> impl Strategy<Value = BiPoint> {
    point_on(full(2))
}

proptest! {
    #[test]
    fn shift_is_additive(x in full2_point(), a in -8i64..8, b in -8i64..8) {
        prop_assert_eq!(x.shift(a).shift(b), x.shift(a + b));
        for i in -10..10 {
            prop_assert_eq!(x.shift(a).at(i), x.at(i + a));
        }
    }

    #[test]
    fn text_form_round_trips(x in full2_point()) {
        let back: BiPoint = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn canonical_form_ignores_presentation(x in full2_point(), extra in 0usize..3) {
        // unroll `extra` copies of each period into the core
        let l = x.left_period().clone();
        let r = x.right_period().clone();
        let mut core = Vec::new();
        for _ in 0..extra { core.extend_from_slice(l.symbols()); }
        core.extend_from_slice(x.core().symbols());
        for _ in 0..extra { core.extend_from_slice(r.symbols()); }
        let offset = x.core_offset() - (extra * l.len()) as i64;
        let y = BiPoint::new(&full(2), l, Word(core), r, offset).unwrap();
        prop_assert_eq!(y, x);
    }

    #[test]
    fn bracket_splices_at_zero(x in full2_point(), y in full2_point()) {
        match x.bracket(&y) {
            Ok(z) => for i in -10..10 {
                prop_assert_eq!(z.at(i), if i <= 0 { x.at(i) } else { y.at(i) });
            },
            Err(_) => prop_assert_ne!(x.at(0), y.at(0)),
        }
    }

    #[test]
    fn metric_is_an_ultrametric(x in full2_point(), y in full2_point(), z in full2_point()) {
        let l = BigRational::new(1.into(), 2.into());
        let (dxy, dyz, dxz) = (metric(&x, &y, &l), metric(&y, &z, &l), metric(&x, &z, &l));
        prop_assert_eq!(&dxy, &metric(&y, &x, &l));
        prop_assert_eq!(dxy == BigRational::from_integer(0.into()), x == y);
        prop_assert!(dxz <= dxy.clone().max(dyz));
    }

    #[test]
    fn tail_matches_are_exact(x in full2_point(), y in full2_point()) {
        if let Some(s) = x.right_tail_match(&y) {
            for i in s as i64..s as i64 + 12 { prop_assert_eq!(x.at(i), y.at(i)); }
            if s > 0 { prop_assert_ne!(x.at(s as i64 - 1), y.at(s as i64 - 1)); }
        }
        if let Some(u) = x.left_tail_match(&y) {
            for i in 0..12 { prop_assert_eq!(x.at(-(u as i64) - i), y.at(-(u as i64) - i)); }
            if u > 0 { prop_assert_ne!(x.at(1 - u as i64), y.at(1 - u as i64)); }
        }
    }

    #[test]
    fn golden_mean_points_are_admissible(x in point_on(golden_mean())) {
        for i in -12..12 {
            prop_assert!(golden_mean().allows(x.at(i), x.at(i + 1)));
        }
    }

    #[test]
    fn a_groupoid_laws(x in full2_point(), n in -4i64..4, m in -4i64..4) {
        let g = AElement::new(x.clone(), n, x.shift(n)).unwrap();
        let h = AElement::new(x.shift(n), m, x.shift(n + m)).unwrap();
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(gh.n(), n + m);
        prop_assert!(g.compose(&g.inverse()).unwrap().is_unit());
        let k = AElement::new(x.shift(n + m), 1, x.shift(n + m + 1)).unwrap();
        prop_assert_eq!(gh.compose(&k).unwrap(), g.compose(&h.compose(&k).unwrap()).unwrap());
    }

    #[test]
    fn su_groupoid_laws(x in full2_point(), p in -3i64..3, q in -3i64..3) {
        let y = x.shift(p);
        // (x, p, p, σ^p x) is in the groupoid; q-variants only when the tails allow
        let g = SUElement::new(x.clone(), p, p, y.clone()).unwrap();
        prop_assert_eq!(g.compose(&g.inverse()).unwrap(), SUElement::unit(x.clone()));
        if let Ok(h) = SUElement::new(x.clone(), p, q, y.clone()) {
            prop_assert!(x.shift(q).left_tail_match(&y).is_some());
            prop_assert_eq!(h.inverse().inverse(), h);
        }
    }
}

#[test]
fn periodic_points_are_fixed_by_their_period() {
    for o in periodic_orbits(&golden_mean(), 8).unwrap() {
        let x = &o.representative;
        assert_eq!(x.shift(o.length as i64), *x);
        assert_eq!(x.least_period(), Some(o.length));
        assert_eq!(o.points().len(), o.length);
    }
}
