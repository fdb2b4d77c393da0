use std::collections::BTreeSet;

use prodcheck::eval::{holds, reach_regex_set};
use prodcheck::gadgets::pda::{split_2pda, Config2, TwoPda};
use prodcheck::{build_product, Caps};

fn s(x: &str) -> String {
    x.to_string()
}

fn o(x: &str) -> Option<String> {
    Some(x.to_string())
}

fn machine() -> TwoPda {
    TwoPda {
        states: vec![s("q0"), s("p"), s("r"), s("f")],
        input: vec![s("a"), s("b")],
        stack: vec![s("A"), s("B")],
        init: s("q0"),
        fin: s("f"),
        delta: vec![
            (s("q0"), s("a"), None, None, o("A"), o("B"), s("p")),
            (s("p"), s("a"), None, None, o("A"), None, s("p")),
            (s("p"), s("a"), None, None, None, o("B"), s("p")),
            (s("p"), s("b"), o("A"), None, None, o("A"), s("r")),
            (s("r"), s("b"), None, o("A"), o("B"), None, s("r")),
            (s("r"), s("a"), o("B"), o("B"), None, None, s("f")),
            (s("r"), s("b"), o("A"), None, None, None, s("p")),
        ],
    }
}

#[test]
fn reach_r_matches_direct_reachability() {
    let caps = Caps::default();
    let h = 3;
    let m = machine();
    let split = split_2pda(&m).unwrap();
    let spec = split.product_spec(h, &caps).unwrap();
    let g = build_product(&spec, &caps).unwrap();
    let bounded = split.bounded_r(12);
    let mut compared = 0;
    for c in m.configurations(h) {
        let from = g.vertex_id(&c.product_name()).unwrap();
        let ids = |m: std::collections::BTreeMap<Config2, usize>| -> BTreeSet<u32> {
            m.keys().map(|t| g.vertex_id(&t.product_name()).unwrap()).collect()
        };
        assert_eq!(reach_regex_set(&g, &bounded, from), ids(m.reachable(&c, h, 12)), "from {c:?}");
        assert_eq!(reach_regex_set(&g, &split.r, from), ids(m.reachable(&c, h, usize::MAX)), "from {c:?}");
        compared += 1;
    }
    assert_eq!(compared, 4 * 15 * 15);
}

#[test]
fn halting_sentence_agrees_with_simulation() {
    let caps = Caps::default();
    let h = 3;
    let m = machine();
    let split = split_2pda(&m).unwrap();
    let g = build_product(&split.product_spec(h, &caps).unwrap(), &caps).unwrap();
    let mut seen = BTreeSet::new();
    let words: [&[&str]; 5] = [&["a"], &["a", "b"], &["b"], &["a", "a", "b"], &[]];
    for w in words {
        let word: Vec<String> = w.iter().map(|x| x.to_string()).collect();
        let after: BTreeSet<Config2> = read_word(&m, &word, h);
        let expected = after
            .iter()
            .any(|c| m.reachable(c, h, usize::MAX).keys().any(|t| t.state == m.fin));
        let got = holds(&g, &split.halting_sentence(&word), &caps).unwrap();
        assert_eq!(got, expected, "word {w:?}");
        seen.insert(got);
    }
    assert_eq!(seen.len(), 2);
}

fn read_word(m: &TwoPda, word: &[String], h: usize) -> BTreeSet<Config2> {
    let mut cur = BTreeSet::from([Config2::initial(&m.init)]);
    for a in word {
        cur = cur
            .iter()
            .flat_map(|c| m.successors(c, h))
            .filter(|(i, _)| m.delta[*i].1 == *a)
            .map(|(_, c)| c)
            .collect();
    }
    cur
}
