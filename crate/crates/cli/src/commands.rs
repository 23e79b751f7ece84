use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::{json, Value};

use sln_core::complex::{build_complex, ComplexError, DeformedComplex};
use sln_core::diagram::{parse_any, LinkDiagram};
use sln_core::fixtures::{fixture, FIXTURES};
use sln_core::homology::{closed_form, compute_homology, cross_validate, HomologyError, HomologyResult};
use sln_core::potential::{lemma_brute_check, verify_identities, PotentialContext};
use sln_core::resolution::{cube_vertices, resolve, CubeVertexId};
use sln_core::states::{enumerate_admissible, verify_projector_identities, StatesError};

use crate::{CliError, Format, Outcome, RunConfig};

fn load(file: &str) -> Result<LinkDiagram, CliError> {
    let text = match file.strip_prefix('@') {
        Some(name) => fixture(name).ok_or_else(|| CliError::Input(format!("no bundled diagram `{name}`")))?.text.to_string(),
        None => std::fs::read_to_string(file).map_err(|e| CliError::Input(format!("{file}: {e}")))?,
    };
    parse_any(&text).map_err(|e| CliError::Input(format!("{file}: {e}")))
}

fn complex_error(e: ComplexError) -> CliError {
    match e {
        ComplexError::TooManyCrossings { .. } => CliError::Bound(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn build(d: &LinkDiagram, cfg: &RunConfig) -> Result<DeformedComplex, CliError> {
    build_complex(d, cfg.n, &cfg.beta, cfg.max_crossings).map_err(complex_error)
}

fn json_text(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn psi_text(psi: &[sln_core::cyclotomic::RootLabel]) -> String {
    let parts: Vec<String> = psi.iter().map(|x| x.0.to_string()).collect();
    format!("({})", parts.join(","))
}

fn dims_table(out: &mut String, dims: &BTreeMap<i64, usize>) {
    writeln!(out, "degree  dim").unwrap();
    for (k, v) in dims {
        writeln!(out, "{k:>6}  {v}").unwrap();
    }
}

fn homology_json(h: &HomologyResult, cfg: &RunConfig) -> Value {
    json!({
        "n": h.n,
        "beta": cfg.beta.to_string(),
        "components": h.components,
        "dims": h.dims,
        "generators": h.generators,
        "total": h.total,
    })
}

pub fn homology(file: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = load(file)?;
    let c = build(&d, cfg)?;
    let computed = compute_homology(&c);
    let closed = closed_form(&d, cfg.n);
    let ok = computed == closed;
    let report = match cfg.format {
        Format::Json => {
            let mut v = homology_json(&computed, cfg);
            v["closed_form"] = homology_json(&closed, cfg);
            v["agree"] = json!(ok);
            json_text(&v)
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "n = {}, beta = {}, {} component(s)", cfg.n, cfg.beta, computed.components).unwrap();
            writeln!(out, "computed homology:").unwrap();
            dims_table(&mut out, &computed.dims);
            writeln!(out, "total {} (n^l = {})", computed.total, closed.total).unwrap();
            if computed.generators.is_empty() && computed.total > 0 {
                writeln!(out, "generators: not identified").unwrap();
            } else {
                writeln!(out, "generators:").unwrap();
                for g in &computed.generators {
                    writeln!(out, "  psi = {}  degree {}", psi_text(&g.psi), g.degree).unwrap();
                }
            }
            writeln!(out, "closed form:").unwrap();
            dims_table(&mut out, &closed.dims);
            writeln!(out, "agreement: {}", if ok { "yes" } else { "NO" }).unwrap();
            out
        }
    };
    Ok(Outcome { report, ok })
}

pub fn states(file: &str, bits: &str, list: bool, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = load(file)?;
    let v = CubeVertexId::parse(bits).map_err(|e| CliError::Input(e.to_string()))?;
    let r = resolve(&d, &v).map_err(|e| CliError::Input(e.to_string()))?;
    let states = enumerate_admissible(&r, cfg.n);
    let report = match cfg.format {
        Format::Json => {
            let mut v = json!({
                "resolution": v,
                "n": cfg.n,
                "thin_edges": r.thin_count(),
                "thick_edges": r.thick_edges.len(),
                "circles": r.circles().len(),
                "p_parity": r.p_parity(),
                "admissible": states.len(),
            });
            if list {
                v["states"] = json!(states);
            }
            json_text(&v)
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(
                out,
                "resolution {v}: {} thin edge(s), {} thick edge(s), {} circle(s), p = {}",
                r.thin_count(),
                r.thick_edges.len(),
                r.circles().len(),
                r.p_parity()
            )
            .unwrap();
            writeln!(out, "admissible states (n = {}): {}", cfg.n, states.len()).unwrap();
            if list {
                for s in &states {
                    writeln!(out, "  {}", psi_text(&s.0)).unwrap();
                }
            }
            out
        }
    };
    Ok(Outcome { report, ok: true })
}

pub fn complex(file: &str, matrices: bool, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = load(file)?;
    let c = build(&d, cfg)?;
    let report = if matrices {
        let differentials: Vec<Value> = c
            .degrees()
            .filter_map(|k| c.differential(k).map(|m| (k, m)))
            .map(|(k, m)| {
                let entries: Vec<Value> =
                    m.entries.iter().map(|t| json!([t.row, t.col, t.value.to_string()])).collect();
                json!({ "degree": k, "rows": m.rows, "cols": m.cols, "entries": entries })
            })
            .collect();
        json_text(&json!({
            "n": cfg.n,
            "beta": cfg.beta.to_string(),
            "basis": c.basis(),
            "differentials": differentials,
        }))
    } else {
        match cfg.format {
            Format::Json => json_text(&json!({
                "n": cfg.n,
                "beta": cfg.beta.to_string(),
                "dims": c.chain_dims(),
                "euler_characteristic": c.euler_characteristic(),
            })),
            Format::Text => {
                let mut out = String::new();
                writeln!(out, "chain groups (n = {}):", cfg.n).unwrap();
                dims_table(&mut out, &c.chain_dims());
                writeln!(out, "Euler characteristic {}", c.euler_characteristic()).unwrap();
                out
            }
        }
    };
    Ok(Outcome { report, ok: true })
}

pub fn diagram(file: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let d = load(file)?;
    let lk = d.linking_matrix();
    let matrix: Vec<Vec<i64>> = (0..lk.size()).map(|i| (0..lk.size()).map(|j| lk.get(i, j)).collect()).collect();
    let report = match cfg.format {
        Format::Json => json_text(&json!({
            "crossings": d.crossing_count(),
            "components": d.components(),
            "free_loops": d.free_loops(),
            "writhe": d.writhe(),
            "linking": matrix,
            "signed": d.render_signed(),
        })),
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "{} crossing(s), writhe {}", d.crossing_count(), d.writhe()).unwrap();
            for (i, comp) in d.components().iter().enumerate() {
                let arcs: Vec<String> = comp.iter().map(u32::to_string).collect();
                let arcs = if arcs.is_empty() { "free loop".to_string() } else { arcs.join(" ") };
                writeln!(out, "component {i}: {arcs}").unwrap();
            }
            writeln!(out, "linking numbers:").unwrap();
            for row in &matrix {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
                writeln!(out, " {}", cells.join("")).unwrap();
            }
            writeln!(out, "signed: {}", d.render_signed()).unwrap();
            out
        }
    };
    Ok(Outcome { report, ok: true })
}

pub fn fixtures(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = match cfg.format {
        Format::Json => {
            let v: Vec<Value> = FIXTURES
                .iter()
                .map(|f| json!({ "name": f.name, "link": f.group, "diagram": f.diagram().render_signed() }))
                .collect();
            json_text(&v)
        }
        Format::Text => {
            let mut out = String::new();
            for f in FIXTURES {
                writeln!(out, "{:<22} {}", f.name, f.diagram().render_signed()).unwrap();
            }
            out
        }
    };
    Ok(Outcome { report, ok: true })
}

#[derive(Serialize)]
struct Suite {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn suite(name: &'static str, run: impl FnOnce() -> Result<String, String>) -> Suite {
    match run() {
        Ok(detail) => Suite { name, passed: true, detail },
        Err(detail) => Suite { name, passed: false, detail },
    }
}

pub fn verify(inject_sign_flip: bool, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n;
    let ctx = PotentialContext::new(n, cfg.beta.clone()).map_err(|e| CliError::Input(e.to_string()))?;
    let diagrams: Vec<(&str, LinkDiagram)> = FIXTURES
        .iter()
        .map(|f| (f.name, f.diagram()))
        .filter(|(_, d)| d.crossing_count() <= cfg.max_crossings)
        .collect();
    let mut suites = vec![];

    suites.push(suite("lemma", || {
        let mut tuples = vec![];
        for m in 2..=n {
            let c = PotentialContext::new(m, cfg.beta.clone()).map_err(|e| e.to_string())?;
            let rep = lemma_brute_check(&c).map_err(|e| e.to_string())?;
            if let Some(t) = rep.counterexamples.first() {
                return Err(format!("n = {m}: counterexample {t:?}"));
            }
            tuples.push(format!("n = {m}: {} tuples", rep.tuples));
        }
        Ok(tuples.join(", "))
    }));

    suites.push(suite("potential identities", || {
        for m in 2..=n {
            let rep = verify_identities(m);
            if !rep.passed() {
                return Err(format!("n = {m}: {rep:?}"));
            }
        }
        Ok(format!("n = 2..{n}"))
    }));

    suites.push(suite("projectors", || {
        let (mut checked, mut skipped) = (0, 0);
        for (name, d) in &diagrams {
            for v in cube_vertices(d.crossing_count()) {
                let r = resolve(d, &v).map_err(|e| e.to_string())?;
                match verify_projector_identities(&r, &ctx, cfg.max_raw_states) {
                    Ok(rep) if rep.passed() => checked += 1,
                    Ok(rep) => return Err(format!("{name} at {v}: {rep:?}")),
                    Err(StatesError::RawBound { .. }) => skipped += 1,
                    Err(e) => return Err(e.to_string()),
                }
            }
        }
        Ok(format!("{checked} resolutions, {skipped} over the raw-state bound"))
    }));

    suites.push(suite("d squared and rescaling", || {
        let mut count = 0;
        for (name, d) in &diagrams {
            let c = build_complex(d, n, &cfg.beta, cfg.max_crossings).map_err(|e| e.to_string())?;
            let c = if inject_sign_flip && *name == "hopf" {
                c.with_sign_flip().ok_or("no square to corrupt")?
            } else {
                c
            };
            c.check_d_squared().map_err(|e| format!("{name}: {e}"))?;
            let base = compute_homology(&c).dims;
            for seed in cfg.seed..cfg.seed + 3 {
                let r = c.rescale_basis(seed);
                r.check_d_squared().map_err(|e| format!("{name}, seed {seed}: {e}"))?;
                if compute_homology(&r).dims != base {
                    return Err(format!("{name}: homology changes under rescaling with seed {seed}"));
                }
            }
            count += 1;
        }
        Ok(format!("{count} complexes, 3 rescalings each"))
    }));

    suites.push(suite("cross validation", || {
        for (name, d) in &diagrams {
            let rep = cross_validate(d, n, &cfg.beta, cfg.max_crossings).map_err(|e: HomologyError| e.to_string())?;
            if !rep.passed() {
                return Err(format!(
                    "{name}: computed {:?}, closed form {:?}, combinatorial {:?}",
                    rep.computed.dims, rep.closed_form.dims, rep.combinatorial.dims
                ));
            }
        }
        Ok(format!("{} diagrams", diagrams.len()))
    }));

    let ok = suites.iter().all(|s| s.passed);
    let report = match cfg.format {
        Format::Json => json_text(&json!({
            "n": n,
            "beta": cfg.beta.to_string(),
            "suites": suites,
            "passed": ok,
        })),
        Format::Text => {
            let mut out = String::new();
            for s in &suites {
                writeln!(out, "{} {}: {}", if s.passed { "ok  " } else { "FAIL" }, s.name, s.detail).unwrap();
            }
            out
        }
    };
    Ok(Outcome { report, ok })
}
