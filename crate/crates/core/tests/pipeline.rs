use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use sln_core::complex::{build_complex, DeformedComplex};
use sln_core::fixtures::FIXTURES;
use sln_core::homology::{compute_homology, cross_validate};

fn rat(k: i64) -> BigRational {
    BigRational::from_integer(k.into())
}

/// Dense Gauss-Jordan rank over Q, independent of the engine's elimination.
fn dense_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &pivot;
                for k in 0..cols {
                    let v = &m[rank][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Homology dimensions from dense matrices; entries of the unscaled complex
/// are rational (±1).
fn dense_homology(c: &DeformedComplex) -> BTreeMap<i64, usize> {
    let mut ranks = BTreeMap::new();
    for k in c.degrees() {
        let m = c.differential(k).unwrap();
        let mut dense = vec![vec![BigRational::zero(); m.cols]; m.rows];
        for t in &m.entries {
            dense[t.row][t.col] = t.value.as_rational().expect("rational entry").clone();
        }
        ranks.insert(k, dense_rank(dense));
    }
    c.degrees()
        .map(|k| (k, c.chain(k).len() - ranks[&k] - ranks.get(&(k - 1)).copied().unwrap_or(0)))
        .filter(|&(_, d)| d > 0)
        .collect()
}

#[test]
fn sparse_ranks_match_dense_oracle() {
    for f in FIXTURES {
        for n in [2, 3] {
            let c = build_complex(&f.diagram(), n, &rat(1), 10).unwrap();
            assert_eq!(compute_homology(&c).dims, dense_homology(&c), "{} n={n}", f.name);
        }
    }
}

#[test]
fn dense_rank_sanity() {
    let m = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)], vec![rat(0), rat(1)]];
    assert_eq!(dense_rank(m), 2);
    assert_eq!(dense_rank(vec![vec![BigRational::one()]]), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn every_fixture_has_n_to_the_l(
        idx in 0..FIXTURES.len(),
        n in 2u32..=3,
        p in -5i64..=5,
        q in 1i64..=4,
    ) {
        prop_assume!(p != 0);
        let d = FIXTURES[idx].diagram();
        let beta = BigRational::new(p.into(), q.into());
        let r = cross_validate(&d, n, &beta, 10).unwrap();
        prop_assert!(r.passed());
        prop_assert_eq!(r.computed.total, (n as usize).pow(d.component_count() as u32));
        prop_assert!(r.computed.dims.keys().all(|k| k % 2 == 0));
    }
}
