mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use prodcheck::compose::holds_composed;
use prodcheck::eval::{eval, holds};
use prodcheck::gadgets::grid::{chain, grid};
use prodcheck::gadgets::translate::translate_grid_to_n;
use prodcheck::logic::desugar_reach;
use prodcheck::lts::{class_index, sim_classes};
use prodcheck::system::System;
use prodcheck::{build_product, classify, parse_formula, Caps, Formula, Term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn open_formula(seed: u64, labels: &[String]) -> Formula {
    let mut r = rng(seed);
    let mut scope = vec!["x".to_string(), "y".to_string()];
    let mut reach = 2;
    common::random_formula(&mut r, labels, &mut scope, 2, &mut reach, 6)
}

fn grid_labels() -> Vec<String> {
    vec!["s1".into(), "s2".into()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>()) {
        let f = open_formula(seed, &["a".into(), "b".into(), "(go,ok)".into()]);
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn composition_matches_the_product(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let spec = common::random_spec_bounded(&mut r, n, 4, 2, 3);
        let f = common::random_sentence(&mut r, &common::product_labels(&spec));
        let caps = Caps::default();
        let g = build_product(&spec, &caps).unwrap();
        prop_assert_eq!(holds_composed(&spec, &f, &caps).unwrap(), holds(&g, &f, &caps).unwrap(), "{}", f);
    }

    #[test]
    fn evaluator_matches_naive_semantics(seed in any::<u64>(), x in 0u32..9, y in 0u32..9) {
        let caps = Caps::default();
        let g = grid(2, &caps).unwrap();
        let f = open_formula(seed, &grid_labels());
        let env = BTreeMap::from([("x".to_string(), x), ("y".to_string(), y)]);
        prop_assert_eq!(eval(&g, &f, &env, &caps).unwrap(), common::naive(&g, &f, &env), "{}", f);
    }

    #[test]
    fn desugaring_reach_keeps_meaning(seed in any::<u64>(), x in 0u32..9, y in 0u32..9) {
        let caps = Caps::default();
        let g = grid(2, &caps).unwrap();
        let f = open_formula(seed, &grid_labels());
        let d = desugar_reach(&f);
        let env = BTreeMap::from([("x".to_string(), x), ("y".to_string(), y)]);
        prop_assert_eq!(eval(&g, &f, &env, &caps).unwrap(), eval(&g, &d, &env, &caps).unwrap());
        prop_assert_eq!(classify(&f).max_tc_nesting, classify(&d).max_tc_nesting);
    }

    #[test]
    fn classes_partition_the_enabled_vertices(seed in any::<u64>()) {
        let mut r = rng(seed);
        let spec = common::random_spec(&mut r, 3, 4, 2);
        let caps = Caps::default();
        for subset in prodcheck::compose::nonempty_subsets(spec.constraint().len()) {
            let idx = sim_classes(&spec, &subset, &caps).unwrap();
            let mut seen = BTreeSet::new();
            for members in idx.classes.values() {
                prop_assert!(!members.is_empty());
                for &v in members {
                    prop_assert!(seen.insert(v), "vertex in two classes");
                }
            }
            prop_assert_eq!(&seen, &idx.enabled_vertices);
            prop_assert_eq!(idx.index(), class_index(&spec, &subset).unwrap());
        }
    }

    #[test]
    fn systems_survive_json(seed in any::<u64>()) {
        let mut r = rng(seed);
        let sys = System::from_spec(common::random_spec(&mut r, 3, 5, 2));
        let back = System::from_json(&sys.to_json()).unwrap();
        prop_assert_eq!(back.spec, sys.spec);
    }

    #[test]
    fn grid_translation_agrees_on_points(seed in any::<u64>(), x in (0u32..3, 0u32..3), y in (0u32..3, 0u32..3)) {
        let caps = Caps::default();
        let (gr, ch) = (grid(2, &caps).unwrap(), chain(2).unwrap());
        let f = open_formula(seed, &grid_labels());
        let t = translate_grid_to_n(&f).unwrap();
        let p = |(i, j): (u32, u32)| gr.vertex_id(&format!("({i},{j})")).unwrap();
        let a = BTreeMap::from([("x".to_string(), p(x)), ("y".to_string(), p(y))]);
        let k = |i: u32| ch.vertex_id(&i.to_string()).unwrap();
        let b = BTreeMap::from([
            ("x_1".to_string(), k(x.0)), ("x_2".to_string(), k(x.1)),
            ("y_1".to_string(), k(y.0)), ("y_2".to_string(), k(y.1)),
        ]);
        let b: BTreeMap<_, _> = b.into_iter().filter(|(v, _)| t.free_vars().contains(v)).collect();
        prop_assert_eq!(eval(&gr, &f, &a, &caps).unwrap(), eval(&ch, &t, &b, &caps).unwrap(), "{} vs {}", f, t);
    }
}

#[test]
fn constants_name_product_vertices() {
    let caps = Caps::default();
    let g = grid(1, &caps).unwrap();
    let f = Formula::edge("s1", Term::constant("(0,1)"), Term::constant("(1,1)"));
    assert!(holds(&g, &f, &caps).unwrap());
}
