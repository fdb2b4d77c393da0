//! Emission of gadget constructions with bounded verification transcripts.

use std::collections::{BTreeMap, BTreeSet};

use prodcheck::eval::{eval, holds, reach_regex_set, sat_relation, Assignment};
use prodcheck::gadgets::grid::{arith_formulas, chain, grid, plus_margin, point, square_margin};
use prodcheck::gadgets::pda::{split_2pda, Config2, TwoPda};
use prodcheck::gadgets::tm::{halts_within, tm_to_gtrs, Dtm};
use prodcheck::gadgets::translate::{translate_grid_to_n, translate_n_to_grid};
use prodcheck::lts::VertexId;
use prodcheck::system::System;
use prodcheck::{build_product, Caps, Formula, Lts, Result};

/// Generated files, transcript lines, and whether every cross-check passed.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub transcript: Vec<String>,
    pub ok: bool,
}

impl Artifacts {
    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn line(&mut self, s: impl Into<String>) {
        self.transcript.push(s.into());
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes")
}

pub fn tm_gtrs(m: &Dtm, max_depth: usize, caps: &Caps) -> Result<Artifacts> {
    let g = tm_to_gtrs(m)?;
    let mut out = Artifacts { ok: true, ..Default::default() };
    out.file("gtrs.json", json(&g.gtrs));
    out.file("star.json", System::single("H", g.star.clone())?.to_json());
    out.file("phi_halt.txt", format!("{}\n", g.phi_halt));
    let halt = m.halting_time(max_depth);
    match halt {
        Some(s) => {
            out.line(format!("simulator: halts after {s} step{}", if s == 1 { "" } else { "s" }));
            let depth = 2 * s + 2;
            let at = halts_within(&g, depth, caps)?;
            out.line(format!("φ_halt: {at} at depth {depth}"));
            out.ok &= at;
            if s > 0 {
                let before = halts_within(&g, 2 * s - 1, caps)?;
                out.line(format!("φ_halt: {before} at depth {}", 2 * s - 1));
                out.ok &= !before;
            }
            out.file("product.json", System::single("GxH", g.bounded_product(depth, caps)?)?.to_json());
        }
        None => {
            out.line(format!("simulator: no halt within {max_depth} steps"));
            let mut any = false;
            for d in 0..=max_depth {
                any |= halts_within(&g, d, caps)?;
            }
            out.line(if any {
                format!("φ_halt: true at some depth ≤ {max_depth}")
            } else {
                format!("φ_halt: false at every depth ≤ {max_depth}")
            });
            out.ok &= !any;
        }
    }
    out.line(format!("cross-check: {}", if out.ok { "agrees with the simulator" } else { "DISAGREES with the simulator" }));
    Ok(out)
}

/// Configurations reachable after reading `word` from the initial one.
pub fn read_word(m: &TwoPda, word: &[String], h: usize) -> BTreeSet<Config2> {
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

pub fn pda_split(m: &TwoPda, h: usize, steps: usize, words: &[Vec<String>], caps: &Caps) -> Result<Artifacts> {
    let split = split_2pda(m)?;
    let spec = split.product_spec(h, caps)?;
    let mut out = Artifacts { ok: true, ..Default::default() };
    out.file("split.json", System::from_spec(spec.clone()).to_json());
    out.file("r.txt", format!("{}\n", split.r));
    let g = build_product(&spec, caps)?;
    let bounded = split.bounded_r(steps);
    let (mut agree, mut total) = (0, 0);
    for c in m.configurations(h) {
        let Some(from) = g.vertex_id(&c.product_name()) else { continue };
        let direct: BTreeSet<VertexId> = m
            .reachable(&c, h, steps)
            .keys()
            .filter_map(|t| g.vertex_id(&t.product_name()))
            .collect();
        total += 1;
        agree += (reach_regex_set(&g, &bounded, from) == direct) as usize;
    }
    out.line(format!("Reach_r vs direct reachability (h={h}, runs ≤ {steps} steps): {agree}/{total} agree"));
    out.ok &= agree == total;
    for w in words {
        let expected = read_word(m, w, h)
            .iter()
            .any(|c| m.reachable(c, h, usize::MAX).keys().any(|t| t.state == m.fin));
        let got = holds(&g, &split.halting_sentence(w), caps)?;
        out.line(format!("accepts after `{}`: {got} (simulation: {expected})", w.join(" ")));
        out.ok &= got == expected;
    }
    Ok(out)
}

pub fn grid_arith(max: usize, caps: &Caps) -> Result<Artifacts> {
    let f = arith_formulas();
    let mut out = Artifacts { ok: true, ..Default::default() };
    for (name, phi) in [("plus", &f.plus), ("square_pairs", &f.square_pairs), ("square", &f.square)] {
        out.file(&format!("{name}.txt"), format!("{phi}\n"));
        out.file(&format!("{name}_grid.txt"), format!("{}\n", translate_n_to_grid(phi)?));
    }

    let g = chain(plus_margin(max))?;
    let rel = sat_relation(&g, &f.plus, caps)?;
    let (a, b, c) = (rel.column("a"), rel.column("b"), rel.column("c"));
    let (Some(a), Some(b), Some(c)) = (a, b, c) else { unreachable!("plus has free a, b, c") };
    let mut bad = 0;
    for x in 0..=max as u32 {
        for y in 0..=max as u32 {
            for z in 0..g.vertex_count() as u32 {
                let mut row = vec![0; 3];
                (row[a], row[b], row[c]) = (x, y, z);
                bad += (rel.contains(&row) != (x + y == z)) as usize;
            }
        }
    }
    out.line(format!("plus on chain({}): {} for a, b ≤ {max}", plus_margin(max), if bad == 0 { "exact" } else { "WRONG" }));
    out.ok &= bad == 0;

    let g = chain(square_margin(max))?;
    let rel = sat_relation(&g, &f.square, caps)?;
    let (Some(x), Some(y)) = (rel.column("x"), rel.column("y")) else { unreachable!("square has free x, y") };
    let at = |p: u32, q: u32| {
        let mut row = vec![0; 2];
        (row[x], row[y]) = (p, q);
        rel.contains(&row)
    };
    let mut bad = 0;
    for p in 2..=max as u32 {
        for q in 0..g.vertex_count() as u32 {
            bad += (at(p, q) != (q == p * p)) as usize;
        }
    }
    out.line(format!(
        "χ on chain({}): {} for 2 ≤ x ≤ {max}",
        square_margin(max),
        if bad == 0 { "exact" } else { "WRONG" }
    ));
    out.line(format!("χ(0,0) = {}, χ(1,1) = {}", at(0, 0), at(1, 1)));
    out.ok &= bad == 0;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    GridToN,
    NToGrid,
}

fn assignments(vars: &[String], values: &[VertexId]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|a| {
                values.iter().map(move |&x| {
                    let mut a = a.clone();
                    a.insert(v.clone(), x);
                    a
                })
            })
            .collect();
    }
    out
}

/// Compares a formula and its translation over every assignment of its free
/// variables to points of the bounded structures of size `n`.
pub fn translate(f: &Formula, dir: Direction, n: usize, caps: &Caps) -> Result<Artifacts> {
    let (t, grid_side) = match dir {
        Direction::GridToN => (translate_grid_to_n(f)?, true),
        Direction::NToGrid => (translate_n_to_grid(f)?, false),
    };
    let mut out = Artifacts { ok: true, ..Default::default() };
    out.file("translated.txt", format!("{t}\n"));
    let gr = grid(n, caps)?;
    let ch = chain(n)?;
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    let id = |g: &Lts, name: &str| g.vertex_id(name).expect("point inside the bound");
    let (mut agree, mut total) = (0, 0);
    if grid_side {
        let points: Vec<VertexId> = (0..gr.vertex_count() as VertexId).collect();
        for a in assignments(&vars, &points) {
            let mut b: Assignment = BTreeMap::new();
            for (v, &p) in &a {
                let name = gr.vertex_name(p);
                let (i, j) = name[1..name.len() - 1].split_once(',').expect("grid point name");
                b.insert(format!("{v}_1"), id(&ch, i));
                b.insert(format!("{v}_2"), id(&ch, j));
            }
            total += 1;
            agree += (eval(&gr, f, &a, caps)? == eval(&ch, &t, &b, caps)?) as usize;
        }
    } else {
        let values: Vec<VertexId> = (0..ch.vertex_count() as VertexId).collect();
        for a in assignments(&vars, &values) {
            let b: Assignment = a.iter().map(|(v, &k)| (v.clone(), id(&gr, &point(k as usize, 0)))).collect();
            total += 1;
            agree += (eval(&ch, f, &a, caps)? == eval(&gr, &t, &b, caps)?) as usize;
        }
    }
    out.line(format!("translated: {t}"));
    out.line(format!("grid({n}) vs chain({n}): {agree}/{total} assignments agree"));
    out.ok = agree == total;
    Ok(out)
}
