//! End-to-end acceptance checks. Run with `--nocapture` to see the report.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_rational::BigRational;

use sln_core::complex::{build_complex, DEFAULT_MAX_CROSSINGS};
use sln_core::fixtures::{fixture, FIXTURES};
use sln_core::homology::{closed_form, compute_homology, cross_validate, survivors_combinatorial, HomologyResult};
use sln_core::potential::{lemma_brute_check, verify_identities, PotentialContext};
use sln_core::resolution::{cube_vertices, resolve};
use sln_core::states::verify_projector_identities;

type Check = Result<(), String>;

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

const BETAS: [i64; 3] = [1, 2, -3];
const KNOTS: [&str; 6] = ["unknot", "unknot_kink", "unknot_kink_negative", "trefoil_right", "trefoil_left", "figure_eight"];

fn dims(v: &[(i64, usize)]) -> BTreeMap<i64, usize> {
    v.iter().copied().collect()
}

fn computed(name: &str, n: u32, beta: i64) -> Result<HomologyResult, String> {
    let d = fixture(name).ok_or(format!("no fixture {name}"))?.diagram();
    let c = build_complex(&d, n, &rat(beta), DEFAULT_MAX_CROSSINGS).map_err(|e| e.to_string())?;
    Ok(compute_homology(&c))
}

fn dimension_count() -> Check {
    for f in FIXTURES {
        for n in [2u32, 3] {
            let start = Instant::now();
            let h = computed(f.name, n, 1)?;
            let l = f.diagram().component_count() as u32;
            if h.total != n.pow(l) as usize {
                return Err(format!("{} n={n}: total {} != {}", f.name, h.total, n.pow(l)));
            }
            let t = start.elapsed();
            if t > Duration::from_secs(10) {
                return Err(format!("{} n={n}: took {t:?}", f.name));
            }
        }
    }
    Ok(())
}

fn degrees() -> Check {
    let cases = [
        ("hopf", 2, dims(&[(0, 2), (2, 2)])),
        ("hopf_negative", 2, dims(&[(-2, 2), (0, 2)])),
        ("hopf", 3, dims(&[(0, 3), (2, 6)])),
    ];
    for (name, n, want) in cases {
        let got = computed(name, n, 1)?.dims;
        if got != want {
            return Err(format!("{name} n={n}: {got:?} != {want:?}"));
        }
    }
    for name in KNOTS {
        for n in [2u32, 3] {
            let got = computed(name, n, 1)?.dims;
            if got != dims(&[(0, n as usize)]) {
                return Err(format!("{name} n={n}: {got:?}"));
            }
        }
    }
    Ok(())
}

fn three_way() -> Check {
    for f in FIXTURES {
        let d = f.diagram();
        for n in [2u32, 3] {
            let a = computed(f.name, n, 1)?;
            let b = closed_form(&d, n);
            let c = survivors_combinatorial(&d, n).map_err(|e| e.to_string())?;
            if a != b || b != c {
                return Err(format!("{} n={n}: computed {:?}, closed {:?}, combinatorial {:?}", f.name, a.dims, b.dims, c.dims));
            }
            if a.generators.len() != a.total {
                return Err(format!("{} n={n}: generators not identified", f.name));
            }
        }
    }
    Ok(())
}

fn lemma_suite() -> Check {
    let start = Instant::now();
    for n in 2..=6 {
        for beta in BETAS {
            let ctx = PotentialContext::new(n, rat(beta)).map_err(|e| e.to_string())?;
            let rep = lemma_brute_check(&ctx).map_err(|e| e.to_string())?;
            if !rep.passed() || rep.tuples != (n as usize).pow(4) {
                return Err(format!("n={n} beta={beta}: {rep:?}"));
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(5) {
        return Err(format!("took {t:?}"));
    }
    Ok(())
}

fn projector_suite() -> Check {
    let mut checked = 0;
    for f in FIXTURES {
        let d = f.diagram();
        for v in cube_vertices(d.crossing_count()) {
            let r = resolve(&d, &v).map_err(|e| e.to_string())?;
            if r.thin_count() > 12 {
                continue;
            }
            for n in [2u32, 3] {
                let ctx = PotentialContext::new(n, rat(1)).map_err(|e| e.to_string())?;
                let bound = (n as u64).pow(12);
                let rep = verify_projector_identities(&r, &ctx, bound).map_err(|e| e.to_string())?;
                if !rep.passed() {
                    return Err(format!("{} at {v}, n={n}: {rep:?}", f.name));
                }
                checked += 1;
            }
        }
    }
    if checked == 0 {
        return Err("no resolutions checked".into());
    }
    Ok(())
}

fn potential_identities() -> Check {
    for n in 1..=6 {
        let rep = verify_identities(n);
        if !rep.passed() {
            return Err(format!("n={n}: {rep:?}"));
        }
    }
    Ok(())
}

fn complex_integrity() -> Check {
    for f in FIXTURES {
        let d = f.diagram();
        for n in [2u32, 3] {
            let c = build_complex(&d, n, &rat(1), DEFAULT_MAX_CROSSINGS).map_err(|e| e.to_string())?;
            c.check_d_squared().map_err(|e| format!("{} n={n}: {e}", f.name))?;
            let h = compute_homology(&c);
            if c.euler_characteristic() != h.euler_characteristic() {
                return Err(format!("{} n={n}: Euler characteristics differ", f.name));
            }
        }
    }
    let hopf = fixture("hopf").expect("bundled").diagram();
    let c = build_complex(&hopf, 2, &rat(1), DEFAULT_MAX_CROSSINGS).map_err(|e| e.to_string())?;
    if c.chain_dims() != dims(&[(0, 4), (1, 4), (2, 4)]) {
        return Err(format!("hopf chain dims {:?}", c.chain_dims()));
    }
    Ok(())
}

fn rescaling() -> Check {
    for f in FIXTURES {
        let d = f.diagram();
        for n in [2u32, 3] {
            let c = build_complex(&d, n, &rat(1), DEFAULT_MAX_CROSSINGS).map_err(|e| e.to_string())?;
            let base = compute_homology(&c).dims;
            for seed in 0..3 {
                let r = c.rescale_basis(seed);
                r.check_d_squared().map_err(|e| format!("{} n={n} seed={seed}: {e}", f.name))?;
                let got = compute_homology(&r).dims;
                if got != base {
                    return Err(format!("{} n={n} seed={seed}: {got:?} != {base:?}", f.name));
                }
            }
        }
    }
    Ok(())
}

fn beta_independence() -> Check {
    for f in FIXTURES {
        let d = f.diagram();
        for n in [2u32, 3] {
            let reports = BETAS
                .iter()
                .map(|&b| cross_validate(&d, n, &rat(b), DEFAULT_MAX_CROSSINGS).map_err(|e| e.to_string()))
                .collect::<Result<Vec<_>, _>>()?;
            if reports.windows(2).any(|w| w[0].computed != w[1].computed) || !reports.iter().all(|r| r.passed()) {
                return Err(format!("{} n={n}", f.name));
            }
        }
    }
    Ok(())
}

fn diagram_invariance() -> Check {
    for (a, b) in [("unknot", "unknot_kink"), ("unknot", "unknot_kink_negative"), ("hopf", "hopf_r2")] {
        for n in [2u32, 3] {
            let (ha, hb) = (computed(a, n, 1)?, computed(b, n, 1)?);
            if ha != hb {
                return Err(format!("{a} vs {b}, n={n}: {ha:?} != {hb:?}"));
            }
        }
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("1 total dimension n^l", dimension_count),
        ("2 homological degrees", degrees),
        ("3 three-way agreement", three_way),
        ("4 admissible tuple lemma", lemma_suite),
        ("5 projector identities", projector_suite),
        ("6 potential identities", potential_identities),
        ("7 complex integrity", complex_integrity),
        ("8 rescaling robustness", rescaling),
        ("9 beta independence", beta_independence),
        ("10 diagram invariance", diagram_invariance),
    ];
    let mut failed = vec![];
    for (name, check) in criteria {
        let start = Instant::now();
        match check() {
            Ok(()) => println!("PASS {name} ({:.2?})", start.elapsed()),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
