use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use exsym::catalog::{self, Parametrization};
use exsym::extensions::{central_extension_with_labels, cohomology2, extract_cocycle, restricted_classes};
use exsym::orbit::{default_grid, nilpotency_index, OrbitModel, SampleMode, Word, MAX_SAMPLE_POINTS};
use exsym::quadext::{attach_phi, build_dd};
use exsym::triples::{find_inner_xi, is_full, validate as validate_triple};
use exsym::{rational, Error, ExtrinsicTriple, Scalar, ValidationReport};
use serde_json::json;

use crate::doc::{parse_document, parse_extension, ExtensionBlock, InputError, Rat, TripleDocument};
use crate::{Mode, Outcome, Verify};

type Result<T> = std::result::Result<T, InputError>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<TripleDocument> {
    parse_document(&read(path)?).map_err(|e| InputError(format!("{}: {}", path.display(), e.0)))
}

fn load_triple(path: &Path) -> Result<ExtrinsicTriple> {
    load(path)?.triple()
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

/// Prints the failed checks and reports a validation failure.
fn invalid(rep: &ValidationReport, json: bool) -> Result<Outcome> {
    if json {
        print_json(&json!({ "valid": false, "checks": rep.checks }));
    } else {
        println!("triple is invalid:");
        print!("{rep}");
    }
    Ok(Outcome::Failed)
}

/// A computation on a parsed triple failed; that is a property of the triple.
fn failed(msg: impl std::fmt::Display, json: bool) -> Result<Outcome> {
    if json {
        print_json(&json!({ "error": msg.to_string() }));
    } else {
        println!("failed: {msg}");
    }
    Ok(Outcome::Failed)
}

pub fn validate(path: &Path, json: bool) -> Result<Outcome> {
    let t = load_triple(path)?;
    let rep = validate_triple(&t);
    let dims = t.decomposition().map(|d| d.dims());
    let flavor = t.flavor();
    if json {
        print_json(&json!({
            "valid": rep.all_passed(),
            "checks": rep.checks,
            "flavor": flavor,
            "decomposition": dims.as_ref().ok().map(|d| json!({
                "g++": d[0], "g+-": d[1], "g-+": d[2], "g--": d[3],
            })),
        }));
    } else {
        print!("{rep}");
        match flavor {
            Some(f) => println!(
                "flavor: {}",
                serde_json::to_value(f).expect("flavor").as_str().unwrap_or("")
            ),
            None => println!("flavor: none"),
        }
        match dims {
            Ok(d) => println!("decomposition: g++ {}, g+- {}, g-+ {}, g-- {}", d[0], d[1], d[2], d[3]),
            Err(e) => println!("decomposition: unavailable ({e})"),
        }
    }
    Ok(outcome(rep.all_passed()))
}

pub fn invariants(path: &Path, json: bool) -> Result<Outcome> {
    let t = load_triple(path)?;
    let rep = validate_triple(&t);
    if !rep.all_passed() {
        return invalid(&rep, json);
    }
    let full = match is_full(&t) {
        Ok(f) => f.full,
        Err(e) => return failed(e, json),
    };
    let inner = find_inner_xi(&t);
    let radical = t.algebra().metric_radical(t.form());
    let model = match OrbitModel::new(&t) {
        Ok(m) => m,
        Err(e) => return failed(e, json),
    };
    let (h, a_h) = match model
        .mean_curvature()
        .and_then(|h| Ok((model.shape_operator_matrix(&h)?, h)))
    {
        Ok((a, h)) => (h, a),
        Err(e) => return failed(e, json),
    };
    let nil = nilpotency_index(&a_h);
    let tangent = model.decomposition().g_mm.basis();
    let labels: Vec<String> = tangent.iter().map(|v| t.format_vector(v)).collect();
    let rows: Vec<Vec<String>> = (0..a_h.rows())
        .map(|i| (0..a_h.cols()).map(|j| rational::format(&a_h[(i, j)])).collect())
        .collect();
    let xi = inner.as_ref().map(|d| t.format_vector(&d.xi));
    if json {
        print_json(&json!({
            "full": full,
            "normal": inner.is_some(),
            "xi": xi,
            "metric_radical_dim": radical.dim(),
            "metric_radical_central": t.algebra().is_central(&radical),
            "mean_curvature": t.format_vector(&h),
            "shape_operator_basis": labels,
            "shape_operator": rows,
            "nilpotency_index": nil,
        }));
        return Ok(Outcome::Ok);
    }
    println!("full: {}", if full { "yes" } else { "no" });
    match &xi {
        Some(x) => println!("normal: yes (xi = {x})"),
        None => println!("normal: no"),
    }
    println!("metric radical: dim {}", radical.dim());
    println!("h = {}", t.format_vector(&h));
    println!("A_h on g-- (basis {}):", labels.join(", "));
    for r in &rows {
        println!("  [{}]", r.join(", "));
    }
    match nil {
        Some(k) => println!("A_h nilpotency index {k}"),
        None => println!("A_h is not nilpotent"),
    }
    Ok(Outcome::Ok)
}

pub struct OrbitOptions {
    pub grid: Option<String>,
    pub max_word_len: Option<usize>,
    pub mode: Mode,
    pub verify: Option<Verify>,
    pub out: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<Vec<Scalar>> {
    s.split(',')
        .enumerate()
        .map(|(i, x)| Rat(x.trim().to_string()).parse(&format!("grid[{}]", i + 1)))
        .collect()
}

pub fn orbit(path: &Path, opts: &OrbitOptions, json: bool) -> Result<Outcome> {
    let t = load_triple(path)?;
    let rep = validate_triple(&t);
    if !rep.all_passed() {
        return invalid(&rep, json);
    }
    let grid = match &opts.grid {
        Some(g) => parse_grid(g)?,
        None => default_grid(),
    };
    let model = match OrbitModel::new(&t) {
        Ok(m) => m,
        Err(e) => return failed(e, json),
    };
    let (points, check) = match opts.verify {
        Some(v) => {
            let p = match v {
                Verify::Parabola => Parametrization::Parabola,
                Verify::Flat3 => Parametrization::Flat3,
                Verify::Cw2 => Parametrization::CahenWallach2,
            };
            let mut samples = p.words(&t, &grid)?;
            samples.truncate(MAX_SAMPLE_POINTS);
            match catalog::verify_parametrization(&model, p, &samples) {
                Ok((pts, rep)) => (pts, Some(rep)),
                Err(Error::NotInSubspace(s)) => {
                    return Err(InputError(format!("parametrization directions are not in {s}")))
                }
                Err(e) => return failed(e, json),
            }
        }
        None => {
            let len = opts.max_word_len.unwrap_or(model.decomposition().g_plus.dim());
            let mode = match opts.mode {
                Mode::Product => SampleMode::Product,
                Mode::Single => SampleMode::Single,
            };
            let words: Vec<Word> = model.grid_words(&grid, len, mode, MAX_SAMPLE_POINTS);
            match model.sample(&words) {
                Ok(p) => (p, None),
                Err(e) => return failed(e, json),
            }
        }
    };
    let mut buf = Vec::new();
    model.write_csv(&points, &mut buf)?;
    match &opts.out {
        Some(p) => fs::write(p, &buf).map_err(|e| InputError(format!("cannot write {}: {e}", p.display())))?,
        None => std::io::stdout()
            .write_all(&buf)
            .map_err(|e| InputError(format!("cannot write output: {e}")))?,
    }
    let Some(check) = check else {
        return Ok(Outcome::Ok);
    };
    // The report goes to stdout only when stdout is not carrying the CSV.
    let text = if json {
        serde_json::to_string_pretty(&json!({ "checks": check.checks })).expect("json") + "\n"
    } else {
        check.to_string()
    };
    if opts.out.is_some() {
        print!("{text}");
    } else {
        eprint!("{text}");
    }
    Ok(outcome(check.all_passed()))
}

const CLASS_NOTE: &str = "Extensions with this quotient correspond to these classes up to the action \
of Aut(g0) x GL(R); that quotient is not computed.";

pub fn cohomology(path: &Path, fiber: usize, json: bool) -> Result<Outcome> {
    let t = load_triple(path)?;
    let h = cohomology2(t.algebra(), fiber);
    let rep = validate_triple(&t);
    let restricted = if rep.all_passed() {
        Some(restricted_classes(&t, fiber).map(|r| r.dim()))
    } else {
        None
    };
    if json {
        print_json(&json!({
            "fiber_dim": fiber,
            "dim_Z2": h.dim_z2(),
            "dim_B2": h.dim_b2(),
            "dim_H2": h.dim_h2(),
            "dim_restricted": restricted.as_ref().and_then(|r| r.as_ref().ok()),
            "note": CLASS_NOTE,
        }));
    } else {
        println!("fiber: R^{fiber}");
        println!("dim Z^2 = {}", h.dim_z2());
        println!("dim B^2 = {}", h.dim_b2());
        println!("dim H^2 = {}", h.dim_h2());
        match &restricted {
            Some(Ok(d)) => println!("dim of theta-odd, D-closed classes = {d}"),
            Some(Err(e)) => println!("theta-odd, D-closed classes: unavailable ({e})"),
            None => println!("theta-odd, D-closed classes: unavailable (triple is invalid)"),
        }
        println!("{CLASS_NOTE}");
    }
    Ok(outcome(matches!(restricted, Some(Ok(_)))))
}

pub fn extend(path: &Path, cocycle: Option<&Path>) -> Result<Outcome> {
    let doc = load(path)?;
    let t0 = doc.triple()?;
    let block: ExtensionBlock = match cocycle {
        Some(p) => parse_extension(&read(p)?)?,
        None => doc
            .extension
            .clone()
            .ok_or_else(|| InputError("no --cocycle file and no \"extension\" block".into()))?,
    };
    let w = block.cochain(t0.dim())?;
    match central_extension_with_labels(&t0, &w, &block.labels()?) {
        Ok(t) => {
            print!("{}", TripleDocument::from_triple(&t).to_json());
            Ok(Outcome::Ok)
        }
        Err(Error::Preconditions(v)) => {
            eprintln!("cannot extend:");
            for m in v {
                eprintln!("  {m}");
            }
            Ok(Outcome::Failed)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn extract(path: &Path) -> Result<Outcome> {
    let t = load_triple(path)?;
    let rep = validate_triple(&t);
    if !rep.all_passed() {
        eprint!("triple is invalid:\n{rep}");
        return Ok(Outcome::Failed);
    }
    match extract_cocycle(&t) {
        Ok(ex) => {
            let mut doc = TripleDocument::from_triple(&ex.quotient);
            doc.extension = Some(ExtensionBlock::from_cochain(&ex.cocycle, Some(ex.fiber_labels.clone())));
            print!("{}", doc.to_json());
            Ok(Outcome::Ok)
        }
        Err(e) => {
            eprintln!("cannot extract: {e}");
            Ok(Outcome::Failed)
        }
    }
}

pub fn quadext(path: &Path) -> Result<Outcome> {
    let doc = load(path)?;
    let block = doc
        .quadext
        .as_ref()
        .ok_or_else(|| InputError("document has no \"quadext\" block".into()))?;
    let data = block.data()?;
    let spec = block.derivation(data.l_dim(), data.a_dim())?;
    let report = |msgs: &[String]| {
        eprintln!("quadratic extension rejected:");
        for m in msgs {
            eprintln!("  {m}");
        }
    };
    let g = match build_dd(&data) {
        Ok(g) => g,
        Err(Error::Preconditions(v)) => {
            report(&v);
            return Ok(Outcome::Failed);
        }
        Err(e) => return Err(e.into()),
    };
    match attach_phi(&g, &spec) {
        Ok(t) => {
            print!("{}", TripleDocument::from_triple(&t).to_json());
            Ok(Outcome::Ok)
        }
        Err(Error::InvalidTriple(v)) => {
            report(&v);
            Ok(Outcome::Failed)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn catalog(name: Option<&str>, export: bool, json: bool) -> Result<Outcome> {
    let Some(name) = name else {
        if json {
            print_json(&json!(catalog::NAMES));
        } else {
            for n in catalog::NAMES {
                println!("{n}");
            }
        }
        return Ok(Outcome::Ok);
    };
    let entry = catalog::entry(name)?;
    if export {
        print!("{}", TripleDocument::from_triple(&entry.triple).to_json());
        return Ok(Outcome::Ok);
    }
    let results = entry.evaluate();
    let ok = results.iter().all(|r| r.passed);
    if json {
        print_json(&json!({ "name": entry.name, "passed": ok, "fixtures": results }));
    } else {
        println!("{}:", entry.name);
        for r in &results {
            let mark = if r.passed { "PASS" } else { "FAIL" };
            let tol = r.tolerance.map(|t| format!(", tol {t:e}")).unwrap_or_default();
            let src = serde_json::to_value(r.source).expect("source");
            let src = src.as_str().unwrap_or("");
            print!("  [{mark}] {} = {} ({src}{tol})", r.quantity, r.expected);
            if !r.passed {
                print!(" got {}", r.actual);
            }
            println!();
        }
    }
    Ok(outcome(ok))
}
