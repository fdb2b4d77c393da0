use std::collections::BTreeMap;

use prodcheck::eval::{eval, sat_relation};
use prodcheck::gadgets::grid::{arith_formulas, chain, grid, plus_margin, point, square_margin};
use prodcheck::gadgets::translate::translate_n_to_grid;
use prodcheck::logic::classify;
use prodcheck::Caps;

#[test]
fn plus_is_exact_with_margin() {
    let caps = Caps::default();
    let f = arith_formulas().plus;
    let g = chain(plus_margin(20)).unwrap();
    let rel = sat_relation(&g, &f, &caps).unwrap();
    let col = |v: &str| rel.column(v).unwrap();
    let (a, b, c) = (col("a"), col("b"), col("c"));
    for x in 0..=20u32 {
        for y in 0..=20u32 {
            for z in 0..=g.vertex_count() as u32 - 1 {
                let mut row = vec![0; 3];
                row[a] = x;
                row[b] = y;
                row[c] = z;
                assert_eq!(rel.contains(&row), x + y == z, "{x}+{y}={z}");
            }
        }
    }
}

#[test]
fn square_is_exact_and_edge_values_are_frozen() {
    let caps = Caps::default();
    let f = arith_formulas().square;
    let g = chain(square_margin(10)).unwrap();
    let rel = sat_relation(&g, &f, &caps).unwrap();
    let (x, y) = (rel.column("x").unwrap(), rel.column("y").unwrap());
    let holds = |a: u32, b: u32| {
        let mut row = vec![0; 2];
        row[x] = a;
        row[y] = b;
        rel.contains(&row)
    };
    for a in 2..=10 {
        assert!(holds(a, a * a));
        assert!(!holds(a, a * a + 1));
    }
    // Regression values at the edge of the construction.
    assert!(!holds(0, 0));
    assert!(!holds(1, 1));
}

#[test]
fn plus_survives_the_grid_translation() {
    let caps = Caps::default();
    let f = arith_formulas().plus;
    let hat = translate_n_to_grid(&f).unwrap();
    assert_eq!(classify(&hat).max_tc_arity, 1);
    assert!(!classify(&hat).has_parameters);
    let g = grid(6, &caps).unwrap();
    let id = |n: u32| g.vertex_id(&point(n as usize, 0)).unwrap();
    for (a, b, c) in [(0, 0, 0), (1, 2, 3), (2, 2, 4), (2, 2, 5), (3, 0, 3), (0, 3, 2)] {
        let asg = BTreeMap::from([("a".into(), id(a)), ("b".into(), id(b)), ("c".into(), id(c))]);
        assert_eq!(eval(&g, &hat, &asg, &caps).unwrap(), a + b == c, "{a}+{b}={c}");
    }
}
