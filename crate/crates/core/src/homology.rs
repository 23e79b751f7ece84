//! Homology of the deformed complex, computed three ways.
//!
//! * `compute_homology`: exact ranks of the differentials.
//! * `closed_form`: one generator per map ψ from components to Σ_n, in degree
//!   Σ lk(i, j) over ordered pairs of components with ψ(i) ≠ ψ(j).
//! * `survivors_combinatorial`: for each ψ, resolve by 1 exactly the crossings
//!   whose strands get different labels, and check the induced state is
//!   admissible with the surviving local types.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{build_complex, classify_local, slot_labels, ComplexError, DeformedComplex, LocalType};
use crate::cyclotomic::RootLabel;
use crate::diagram::LinkDiagram;
use crate::resolution::{degree, resolve, CubeVertexId, ResolutionError};
use crate::states::{is_admissible, State};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("ψ = {psi:?}: {reason}")]
    Survivor { psi: Vec<u32>, reason: String },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct GeneratorDescriptor {
    pub psi: Vec<RootLabel>,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub n: u32,
    pub components: usize,
    pub dims: BTreeMap<i64, usize>,
    pub generators: Vec<GeneratorDescriptor>,
    pub total: usize,
}

impl HomologyResult {
    fn from_generators(n: u32, components: usize, mut generators: Vec<GeneratorDescriptor>) -> Self {
        generators.sort();
        let mut dims = BTreeMap::new();
        for g in &generators {
            *dims.entry(g.degree).or_insert(0) += 1;
        }
        HomologyResult { n, components, dims, total: generators.len(), generators }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims.iter().map(|(&k, &v)| if k % 2 == 0 { v as i64 } else { -(v as i64) }).sum()
    }
}

/// All maps from `l` components to labels 0..n, lexicographically.
pub fn labelings(l: usize, n: u32) -> impl Iterator<Item = Vec<RootLabel>> {
    let total = (n as u64).pow(l as u32);
    (0..total).map(move |mut i| {
        let mut v = vec![RootLabel(0); l];
        for x in v.iter_mut().rev() {
            *x = RootLabel((i % n as u64) as u32);
            i /= n as u64;
        }
        v
    })
}

pub fn linking_degree(d: &LinkDiagram, psi: &[RootLabel]) -> i64 {
    let lk = d.linking_matrix();
    let l = psi.len();
    let mut deg = 0;
    for i in 0..l {
        for j in 0..l {
            if i != j && psi[i] != psi[j] {
                deg += lk.get(i, j);
            }
        }
    }
    deg
}

pub fn closed_form(d: &LinkDiagram, n: u32) -> HomologyResult {
    let l = d.component_count();
    let gens = labelings(l, n).map(|psi| GeneratorDescriptor { degree: linking_degree(d, &psi), psi }).collect();
    HomologyResult::from_generators(n, l, gens)
}

/// Ranks of the differentials. Generators are listed when the basis elements
/// untouched by the differential account for the whole homology and each is
/// constant along components; otherwise the list stays empty.
pub fn compute_homology(c: &DeformedComplex) -> HomologyResult {
    let ranks: BTreeMap<i64, usize> =
        c.degrees().map(|k| (k, c.differential(k).map_or(0, |m| m.rank()))).collect();
    let mut dims = BTreeMap::new();
    for k in c.degrees() {
        let dim = c.chain(k).len() - ranks[&k] - ranks.get(&(k - 1)).copied().unwrap_or(0);
        if dim > 0 {
            dims.insert(k, dim);
        }
    }
    let total = dims.values().sum();
    let isolated = c.isolated();
    let mut generators: Vec<GeneratorDescriptor> = vec![];
    if isolated.len() == total {
        for &i in &isolated {
            match c.component_labeling(i) {
                Some(psi) => generators.push(GeneratorDescriptor { psi: psi.to_vec(), degree: c.basis()[i].degree }),
                None => {
                    generators.clear();
                    break;
                }
            }
        }
    }
    generators.sort();
    HomologyResult { n: c.n(), components: c.component_count(), dims, generators, total }
}

/// The resolution and state a map ψ picks out.
pub fn survivor_of(d: &LinkDiagram, n: u32, psi: &[RootLabel]) -> Result<(CubeVertexId, State, i64), HomologyError> {
    let fail = |reason: String| HomologyError::Survivor { psi: psi.iter().map(|x| x.0).collect(), reason };
    if psi.len() != d.component_count() || psi.iter().any(|x| x.0 >= n) {
        return Err(fail("not a map from components to Σ_n".into()));
    }
    let choice = CubeVertexId(
        d.crossings()
            .iter()
            .map(|x| {
                let (a, b) = d.strand_components(x);
                psi[a] != psi[b]
            })
            .collect(),
    );
    let r = resolve(d, &choice)?;
    let mut state: Vec<Option<RootLabel>> = vec![None; r.thin_count()];
    for a in d.arcs() {
        let e = r.edge_of_arc(a).expect("arc of diagram");
        let lab = psi[d.component_of(a).expect("arc of diagram")];
        match state[e] {
            Some(x) if x != lab => return Err(fail(format!("thin edge {e} gets two labels at {choice}"))),
            _ => state[e] = Some(lab),
        }
    }
    for k in 0..d.free_loops() {
        state[r.edge_of_free_loop(k)] = Some(psi[d.free_loop_component(k)]);
    }
    let state = State(state.into_iter().map(|x| x.expect("every thin edge carries an arc or is a free loop")).collect());
    if !is_admissible(&r, &state) {
        return Err(fail(format!("induced state is not admissible at {choice}")));
    }
    for c in 0..d.crossing_count() {
        let t = classify_local(slot_labels(d, &r, &state, c), choice.bit(c));
        let want = if choice.bit(c) { LocalType::Type2 } else { LocalType::Type4 };
        if t != want {
            return Err(fail(format!("crossing {c} has local type {t:?} at {choice}")));
        }
    }
    let deg = degree(d, &choice)?;
    Ok((choice, state, deg))
}

pub fn survivors_combinatorial(d: &LinkDiagram, n: u32) -> Result<HomologyResult, HomologyError> {
    let l = d.component_count();
    let gens = labelings(l, n)
        .map(|psi| survivor_of(d, n, &psi).map(|(_, _, degree)| GeneratorDescriptor { psi, degree }))
        .collect::<Result<_, _>>()?;
    Ok(HomologyResult::from_generators(n, l, gens))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossValidation {
    pub closed_form: HomologyResult,
    pub computed: HomologyResult,
    pub combinatorial: HomologyResult,
    pub chain_dims: BTreeMap<i64, usize>,
    pub euler_complex: i64,
    pub euler_homology: i64,
    pub d_squared_ok: bool,
}

impl CrossValidation {
    pub fn agree(&self) -> bool {
        self.closed_form == self.computed && self.computed == self.combinatorial
    }

    pub fn passed(&self) -> bool {
        self.agree() && self.euler_complex == self.euler_homology && self.d_squared_ok
    }
}

pub fn cross_validate(
    d: &LinkDiagram,
    n: u32,
    beta: &BigRational,
    max_crossings: usize,
) -> Result<CrossValidation, HomologyError> {
    let c = build_complex(d, n, beta, max_crossings)?;
    let computed = compute_homology(&c);
    Ok(CrossValidation {
        closed_form: closed_form(d, n),
        combinatorial: survivors_combinatorial(d, n)?,
        chain_dims: c.chain_dims(),
        euler_complex: c.euler_characteristic(),
        euler_homology: computed.euler_characteristic(),
        d_squared_ok: c.check_d_squared().is_ok(),
        computed,
    })
}
