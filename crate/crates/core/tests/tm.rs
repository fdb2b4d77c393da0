use prodcheck::gadgets::tm::{halts_within, rule_label, tm_to_gtrs, Dtm, Move};
use prodcheck::gadgets::gtrs_expand;
use prodcheck::Caps;

fn dtm(states: &[&str], alphabet: &[&str], rows: &[(&str, &str, &str, &str, Move)]) -> Dtm {
    Dtm {
        states: states.iter().map(|s| s.to_string()).collect(),
        alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
        blank: alphabet[0].to_string(),
        init: states[0].to_string(),
        halt: states[states.len() - 1].to_string(),
        delta: rows
            .iter()
            .map(|(q, a, p, c, m)| (q.to_string(), a.to_string(), p.to_string(), c.to_string(), *m))
            .collect(),
    }
}

use Move::{L, R};

fn halters() -> Vec<Dtm> {
    vec![
        dtm(&["q0", "qf"], &["B"], &[("q0", "B", "qf", "B", R)]),
        dtm(
            &["q0", "q1", "q2", "qf"],
            &["B", "one"],
            &[
                ("q0", "B", "q1", "one", R),
                ("q0", "one", "q1", "one", R),
                ("q1", "B", "q2", "one", R),
                ("q1", "one", "q2", "one", R),
                ("q2", "B", "qf", "one", L),
                ("q2", "one", "qf", "one", L),
            ],
        ),
        dtm(
            &["A", "Bs", "H"],
            &["z", "o"],
            &[
                ("A", "z", "Bs", "o", R),
                ("A", "o", "Bs", "o", L),
                ("Bs", "z", "A", "o", L),
                ("Bs", "o", "H", "o", R),
            ],
        ),
    ]
}

fn non_halters() -> Vec<Dtm> {
    vec![
        dtm(&["q0", "qf"], &["B"], &[("q0", "B", "q0", "B", L)]),
        dtm(&["q0", "qf"], &["B", "one"], &[("q0", "B", "q0", "one", R), ("q0", "one", "q0", "one", R)]),
        dtm(
            &["q0", "q1", "qf"],
            &["B", "one"],
            &[
                ("q0", "B", "q1", "one", R),
                ("q0", "one", "q1", "B", L),
                ("q1", "B", "q0", "one", L),
                ("q1", "one", "q0", "one", R),
            ],
        ),
    ]
}

#[test]
fn simulator_halting_times() {
    let times: Vec<Option<usize>> = halters().iter().map(|m| m.halting_time(20)).collect();
    assert_eq!(times, vec![Some(1), Some(3), Some(6)]);
    for m in non_halters() {
        assert_eq!(m.halting_time(20), None);
    }
}

#[test]
fn halting_sentence_tracks_the_simulator() {
    let caps = Caps::default();
    for m in halters() {
        let s = m.halting_time(20).unwrap();
        let g = tm_to_gtrs(&m).unwrap();
        assert!(halts_within(&g, 2 * s + 4, &caps).unwrap());
        assert!(halts_within(&g, 2 * s, &caps).unwrap());
        assert!(!halts_within(&g, 2 * s - 1, &caps).unwrap());
    }
    for m in non_halters() {
        let g = tm_to_gtrs(&m).unwrap();
        for d in [0, 1, 7, 20] {
            assert!(!halts_within(&g, d, &caps).unwrap());
        }
    }
}

#[test]
fn product_contains_every_simulated_configuration() {
    let caps = Caps::default();
    for m in halters().into_iter().chain(non_halters()) {
        let g = tm_to_gtrs(&m).unwrap();
        let run = m.run(6);
        let p = g.bounded_product(2 * (run.len() - 1), &caps).unwrap();
        for cfg in &run {
            assert!(p.vertex_id(&g.config_vertex(cfg)).is_some(), "{:?}", cfg);
        }
    }
}

#[test]
fn product_paths_alternate_with_their_barred_counterparts() {
    let caps = Caps::default();
    for m in halters() {
        let g = tm_to_gtrs(&m).unwrap();
        let p = g.bounded_product(8, &caps).unwrap();
        let labels: Vec<String> = g.constraint.tuples.iter().map(|t| t.label()).collect();
        for l in &labels {
            for (_, mid) in p.edges(l) {
                let inner = &l[1..l.find(',').unwrap()];
                let unbarred = !inner[3..].starts_with("bar");
                for l2 in &labels {
                    for (a, _) in p.edges(l2) {
                        if a == mid {
                            let inner2 = &l2[1..l2.find(',').unwrap()];
                            if unbarred {
                                assert_eq!(inner2, format!("{}bar{}", &inner[..3], &inner[3..]));
                            } else {
                                assert!(!inner2[3..].starts_with("bar"));
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn gtrs_depth_two_steps_contains_the_machine_path() {
    let caps = Caps::default();
    let m = &halters()[2];
    let g = tm_to_gtrs(m).unwrap();
    let run = m.run(3);
    let lts = gtrs_expand(&g.gtrs, 2 * (run.len() - 1), &caps).unwrap();
    for w in run.windows(2) {
        let a = lts.vertex_id(&w[0].tree().to_string()).unwrap();
        let b = lts.vertex_id(&w[1].tree().to_string()).unwrap();
        let two_steps = lts.alphabet().labels().any(|l1| {
            lts.edges(l1).filter(|&(s, _)| s == a).any(|(_, mid)| {
                lts.alphabet().labels().any(|l2| lts.has_edge(l2, mid, b))
            })
        });
        assert!(two_steps);
    }
    assert!(g.gtrs.labels.contains(&rule_label(true, true, "o", true)));
}

#[test]
fn gadget_is_declared_semifinite() {
    let g = tm_to_gtrs(&halters()[0]).unwrap();
    assert!(!g.declared_sync().report().finitely_synchronized);
    let spec = g.bounded_spec(3, &Caps::default()).unwrap();
    assert_eq!(spec.len(), 2);
}
