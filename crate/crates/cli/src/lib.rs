//! Command-line front end: argument types and command implementations.
//!
//! Exit codes: 0 for a true verdict (or a passing run), 1 for false (or a
//! failing run), 2 for unreadable or invalid input, 3 when a resource cap
//! is exceeded.

pub mod gadget;
pub mod random;
pub mod verify;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use prodcheck::compose::{compose, profile_from_explicit, ComposeOptions, MAX_PROFILE_TUPLES, nonempty_subsets};
use prodcheck::eval::{eval, Assignment};
use prodcheck::gadgets::pda::TwoPda;
use prodcheck::gadgets::tm::Dtm;
use prodcheck::logic::Family;
use prodcheck::lts::sim_classes;
use prodcheck::system::System;
use prodcheck::{build_product, classify, parse_formula, Caps, Error, Formula};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "prodcheck", version, about = "Model checking FO with reachability on synchronized products")]
pub struct Cli {
    /// JSON file overriding resource caps.
    #[arg(long, global = true)]
    pub caps: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula on a system (its explicit product).
    Check {
        system: PathBuf,
        /// Formula text, or `@file`.
        formula: String,
        /// Free variable binding `x=vertex`.
        #[arg(long = "assign", value_parser = parse_binding)]
        assign: Vec<(String, String)>,
    },
    /// Compile a formula into component formulas and a Boolean combiner.
    Compose {
        system: PathBuf,
        formula: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Compare composed evaluation against the explicit product.
    VerifyCompose {
        /// Systems to check; random ones are generated when none are given.
        systems: Vec<PathBuf>,
        /// One sentence per line.
        #[arg(long)]
        formulas: Option<PathBuf>,
        /// Number of random sentences (and systems, if none are given).
        #[arg(long)]
        random: Option<usize>,
        /// Lower every class index by one before composing.
        #[arg(long)]
        corrupt_profile: bool,
    },
    /// Emit a reduction gadget with a bounded verification transcript.
    Gadget {
        kind: GadgetKind,
        /// Machine file for `tm-gtrs` and `2pda-split`.
        input: Option<PathBuf>,
        #[arg(short, long, default_value = "gadget-out")]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        height: usize,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        /// Input word for the acceptance check, letters separated by commas.
        #[arg(long)]
        word: Vec<String>,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, value_enum, default_value_t = DirectionArg::GridToN)]
        direction: DirectionArg,
        /// Size of the bounded grid and chain.
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Print the synchronization class tables of a system.
    Classes { system: PathBuf },
    /// Materialize the explicit product as a one-component system.
    Product {
        system: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GadgetKind {
    TmGtrs,
    #[value(name = "2pda-split")]
    PdaSplit,
    GridArith,
    Translate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    GridToN,
    NToGrid,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
        .ok_or_else(|| format!("expected `var=vertex`, got `{s}`"))
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Resource { .. }) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

type CmdResult = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_caps(path: Option<&Path>) -> Result<Caps, Failure> {
    let Some(p) = path else { return Ok(Caps::default()) };
    let caps: Caps = serde_json::from_str(&read(p)?).map_err(Error::from)?;
    let fields = [caps.product_vertices, caps.tuples, caps.sync_words, caps.sat_assignments, caps.expansion];
    if fields.contains(&0) {
        return Err(usage("caps must be positive"));
    }
    Ok(caps)
}

fn formula_arg(text: &str) -> Result<Formula, Failure> {
    let src = match text.strip_prefix('@') {
        Some(path) => read(Path::new(path))?,
        None => text.to_string(),
    };
    Ok(parse_formula(src.trim())?)
}

fn load_system(path: &Path) -> Result<System, Failure> {
    Ok(System::from_json(&read(path)?)?)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, contents)?,
        None => writeln!(out, "{contents}")?,
    }
    Ok(())
}

/// Runs a parsed command line, writing regular output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let caps = load_caps(cli.caps.as_deref())?;
    match &cli.command {
        Command::Check { system, formula, assign } => check(cli, &caps, system, formula, assign, out),
        Command::Compose { system, formula, out: file } => {
            let sys = load_system(system)?;
            let f = formula_arg(formula)?;
            let d = classify(&f);
            if !matches!(d.family, Family::Fo | Family::FoR) {
                return Err(usage(format!("composition needs an FO(R) formula; this one is {d}")));
            }
            let profile = profile_from_explicit(&sys.spec)?;
            let cf = compose(&f, &sys.spec, &profile, ComposeOptions::default(), &caps)?;
            emit(out, file.as_deref(), &cf.to_json())?;
            if file.is_some() && !cli.json {
                writeln!(out, "{} component formulas, {} constraint tuples", cf.atom_count(), sys.spec.constraint().len())?;
            }
            Ok(0)
        }
        Command::VerifyCompose { systems, formulas, random, corrupt_profile } => {
            verify_compose(cli, &caps, systems, formulas.as_deref(), *random, *corrupt_profile, out)
        }
        Command::Gadget { .. } => run_gadget(cli, &caps, out),
        Command::Classes { system } => classes(cli, &caps, system, out),
        Command::Product { system, out: file } => {
            let sys = load_system(system)?;
            let g = build_product(&sys.spec, &caps)?;
            let n = g.vertex_count();
            emit(out, file.as_deref(), &System::single("product", g)?.to_json())?;
            if file.is_some() {
                if cli.json {
                    writeln!(out, "{}", json!({ "vertices": n }))?;
                } else {
                    writeln!(out, "product with {n} vertices")?;
                }
            }
            Ok(0)
        }
    }
}

fn check(cli: &Cli, caps: &Caps, system: &Path, formula: &str, assign: &[(String, String)], out: &mut dyn Write) -> CmdResult {
    let sys = load_system(system)?;
    let f = formula_arg(formula)?;
    let start = Instant::now();
    let g = sys.graph(caps)?;
    let mut a = Assignment::new();
    for (v, name) in assign {
        let id = g.vertex_id(name).ok_or_else(|| Error::UnknownVertex(name.clone()))?;
        a.insert(v.clone(), id);
    }
    let verdict = eval(&g, &f, &a, caps)?;
    let micros = start.elapsed().as_micros();
    if cli.json {
        writeln!(out, "{}", json!({ "verdict": verdict, "micros": micros }))?;
    } else {
        writeln!(out, "{verdict} ({micros} µs)")?;
    }
    Ok(if verdict { 0 } else { 1 })
}

fn verify_compose(
    cli: &Cli,
    caps: &Caps,
    systems: &[PathBuf],
    formulas: Option<&Path>,
    random: Option<usize>,
    corrupt: bool,
    out: &mut dyn Write,
) -> CmdResult {
    if random.is_none() && formulas.is_none() {
        return Err(usage("give --random N or --formulas FILE"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let loaded: Vec<System> = systems.iter().map(|p| load_system(p)).collect::<Result<_, _>>()?;
    let mut items = Vec::new();
    if let Some(path) = formulas {
        if loaded.is_empty() {
            return Err(usage("--formulas needs at least one system"));
        }
        let text = read(path)?;
        let sentences: Vec<Formula> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| parse_formula(l).map_err(Failure::from))
            .collect::<Result<_, _>>()?;
        for s in &loaded {
            for f in &sentences {
                items.push((s.clone(), f.clone()));
            }
        }
    }
    if let Some(n) = random {
        let shape = random::SpecShape::default();
        for i in 0..n {
            let sys = if loaded.is_empty() {
                System::from_spec(random::random_spec(&mut rng, &shape))
            } else {
                loaded[i % loaded.len()].clone()
            };
            let f = random::random_sentence(&mut rng, &random::product_labels(&sys.spec));
            items.push((sys, f));
        }
    }
    let fault = if corrupt { verify::Fault::IndTooSmall } else { verify::Fault::None };
    let report = verify::run(&items, fault, caps);
    if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("plain data serializes"))?;
    } else {
        writeln!(out, "{}/{} agree", report.agree, report.items)?;
        for (i, e) in &report.errors {
            writeln!(out, "item {i}: error: {e}")?;
        }
        for c in &report.counterexamples {
            writeln!(
                out,
                "item {}: disagreement, composed {} vs product {}\n  minimized formula: {}\n  minimized system: {}",
                c.item,
                c.verdicts.composed,
                c.verdicts.oracle,
                c.formula,
                serde_json::to_string(&c.system).expect("plain data serializes")
            )?;
        }
    }
    Ok(if report.ok() { 0 } else { 1 })
}

fn classes(cli: &Cli, caps: &Caps, system: &Path, out: &mut dyn Write) -> CmdResult {
    let sys = load_system(system)?;
    let spec = &sys.spec;
    let c = spec.constraint().len();
    if c > MAX_PROFILE_TUPLES {
        return Err(usage(format!("at most {MAX_PROFILE_TUPLES} constraint tuples are tabulated, got {c}")));
    }
    let label = |t: usize| spec.constraint().tuples[t].label();
    let mut tables = Vec::new();
    for subset in nonempty_subsets(c) {
        let idx = sim_classes(spec, &subset, caps)?;
        let classes: Vec<_> = idx
            .classes
            .iter()
            .map(|(key, members)| {
                let key: Vec<String> = idx
                    .sync_components
                    .iter()
                    .zip(key)
                    .map(|(&i, &v)| spec.component(i).vertex_name(v).to_string())
                    .collect();
                let members: Vec<String> = members.iter().map(|&v| spec.tuple_name(&spec.decode(v))).collect();
                json!({ "key": key, "members": members })
            })
            .collect();
        tables.push(json!({
            "subset": subset.iter().map(|&t| label(t)).collect::<Vec<_>>(),
            "sync_components": idx.sync_components.iter().map(|&i| sys.ids[i].clone()).collect::<Vec<_>>(),
            "ind": idx.index(),
            "classes": classes,
        }));
    }
    if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&tables).expect("plain data serializes"))?;
        return Ok(0);
    }
    for t in &tables {
        let list = |v: &serde_json::Value| {
            v.as_array()
                .map(|a| a.iter().filter_map(|x| x.as_str()).collect::<Vec<_>>().join(", "))
                .unwrap_or_default()
        };
        writeln!(out, "C' = {{{}}}  X = {{{}}}  ind = {}", list(&t["subset"]), list(&t["sync_components"]), t["ind"])?;
        for class in t["classes"].as_array().into_iter().flatten() {
            writeln!(out, "  [{}]: {}", list(&class["key"]), list(&class["members"]))?;
        }
    }
    Ok(0)
}

fn run_gadget(cli: &Cli, caps: &Caps, out: &mut dyn Write) -> CmdResult {
    let Command::Gadget {
        kind,
        input,
        out: dir,
        max_depth,
        height,
        steps,
        word,
        formula,
        direction,
        bound,
    } = &cli.command
    else {
        unreachable!("dispatched on Gadget")
    };
    let input_text = || -> Result<String, Failure> {
        let p = input.as_deref().ok_or_else(|| usage(format!("{kind:?} needs an input file")))?;
        read(p)
    };
    let art = match kind {
        GadgetKind::TmGtrs => gadget::tm_gtrs(&Dtm::from_json(&input_text()?)?, *max_depth, caps)?,
        GadgetKind::PdaSplit => {
            let m = TwoPda::from_json(&input_text()?)?;
            let words: Vec<Vec<String>> = word
                .iter()
                .map(|w| w.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
                .collect();
            gadget::pda_split(&m, *height, *steps, &words, caps)?
        }
        GadgetKind::GridArith => gadget::grid_arith(*bound, caps)?,
        GadgetKind::Translate => {
            let text = formula.as_deref().ok_or_else(|| usage("translate needs --formula"))?;
            let dir = match direction {
                DirectionArg::GridToN => gadget::Direction::GridToN,
                DirectionArg::NToGrid => gadget::Direction::NToGrid,
            };
            gadget::translate(&formula_arg(text)?, dir, *bound, caps)?
        }
    };
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, contents) in &art.files {
        fs::write(dir.join(name), contents)?;
        written.push(name.clone());
    }
    let transcript = art.transcript.join("\n") + "\n";
    fs::write(dir.join("transcript.txt"), &transcript)?;
    written.push("transcript.txt".into());
    if cli.json {
        let v = json!({ "ok": art.ok, "files": written, "transcript": art.transcript });
        writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("plain data serializes"))?;
    } else {
        write!(out, "{transcript}")?;
        writeln!(out, "wrote {} files to {}", written.len(), dir.display())?;
    }
    Ok(if art.ok { 0 } else { 1 })
}
