//! The deformed chain complex on the basis a_{φ,Γ}.
//!
//! A basis element is a cube vertex together with an admissible state of its
//! resolution. Both states lift to labelings of the diagram's arcs (and free
//! loops); two elements at vertices that differ at one crossing are joined by
//! the differential exactly when they induce the same arc labeling. On the
//! 0 side that labeling has λ1 ≠ λ2 at the crossing (Type3), on the 1 side it
//! is the straight matching (Type1). Coefficients are +1 before the cube sign
//! (−1)^(number of 1-bits before the crossing).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{CycloError, CycloNumber, CyclotomicField, RootLabel};
use crate::diagram::{LinkDiagram, Sign};
use crate::resolution::{cube_vertices, degree, resolve, CubeVertexId, Resolution, ResolutionError};
use crate::states::{enumerate_admissible, State};

pub const DEFAULT_MAX_CROSSINGS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("diagram has {crossings} crossings, the bound is {limit}")]
    TooManyCrossings { crossings: usize, limit: usize },
    #[error("resolutions {0} and {1} do not differ at exactly one crossing (0 then 1)")]
    NotAdjacent(CubeVertexId, CubeVertexId),
    #[error("rescaling needs {expected} factors, got {got}")]
    RescaleLength { expected: usize, got: usize },
    #[error("rescaling factor {0} is zero")]
    ZeroFactor(usize),
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Field(#[from] CycloError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LocalType {
    Type1,
    Type2,
    Type3,
    Type4,
    Inadmissible,
}

/// Local type of the labels (λ1, …, λ4) seen at a crossing resolved by `bit`.
pub fn classify_local(l: [RootLabel; 4], bit: bool) -> LocalType {
    let [l1, l2, l3, l4] = l;
    if bit {
        if l1 == l2 {
            LocalType::Inadmissible
        } else if l1 == l3 && l2 == l4 {
            LocalType::Type1
        } else if l1 == l4 && l2 == l3 {
            LocalType::Type2
        } else {
            LocalType::Inadmissible
        }
    } else if l1 != l3 || l2 != l4 {
        LocalType::Inadmissible
    } else if l1 == l2 {
        LocalType::Type4
    } else {
        LocalType::Type3
    }
}

/// Labels at the four slots of crossing `c`, read through the arcs.
pub fn slot_labels(d: &LinkDiagram, r: &Resolution, s: &State, c: usize) -> [RootLabel; 4] {
    let x = &d.crossings()[c];
    [x.out_over, x.out_under, x.in_under, x.in_over].map(|a| s.label(r.edge_of_arc(a).expect("arc of diagram")))
}

/// The state pulled back to arcs (in increasing order) followed by free loops.
pub fn arc_labeling(d: &LinkDiagram, r: &Resolution, s: &State) -> Vec<RootLabel> {
    d.arcs()
        .map(|a| s.label(r.edge_of_arc(a).expect("arc of diagram")))
        .chain((0..d.free_loops()).map(|k| s.label(r.edge_of_free_loop(k))))
        .collect()
}

/// Pairs (φ0, φ1) of admissible states of r0 and r1 inducing the same arc
/// labeling; r0 and r1 must differ only at crossing `c`, with r0 resolved by 0.
pub fn matched_pairs(
    d: &LinkDiagram,
    r0: &Resolution,
    r1: &Resolution,
    c: usize,
    n: u32,
) -> Result<Vec<(State, State)>, ComplexError> {
    let (v0, v1) = (&r0.choice, &r1.choice);
    if v0.len() != v1.len() || c >= v0.len() || v0.bit(c) || v0.flipped(c) != *v1 {
        return Err(ComplexError::NotAdjacent(v0.clone(), v1.clone()));
    }
    let ones: HashMap<Vec<RootLabel>, State> =
        enumerate_admissible(r1, n).into_iter().map(|s| (arc_labeling(d, r1, &s), s)).collect();
    Ok(enumerate_admissible(r0, n)
        .into_iter()
        .filter_map(|s| ones.get(&arc_labeling(d, r0, &s)).map(|t| (s, t.clone())))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainBasisElement {
    pub vertex: CubeVertexId,
    pub state: State,
    pub degree: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: CycloNumber,
}

/// Columns index the source degree, rows the target degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Triplet>,
}

impl SparseMatrix {
    fn columns(&self) -> Vec<Vec<(usize, &CycloNumber)>> {
        let mut cols = vec![vec![]; self.cols];
        for t in &self.entries {
            cols[t.col].push((t.row, &t.value));
        }
        cols
    }

    /// Rank over Q(ζ_n) by division-free elimination; the pivot row is the
    /// sparsest remaining one.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<BTreeMap<usize, CycloNumber>> = vec![BTreeMap::new(); self.rows];
        for t in &self.entries {
            if !t.value.is_zero() {
                let e = rows[t.row].entry(t.col).or_insert_with(|| CycloNumber::zero(t.value.field()));
                *e += &t.value;
                if e.is_zero() {
                    rows[t.row].remove(&t.col);
                }
            }
        }
        rows.retain(|r| !r.is_empty());
        let mut rank = 0;
        while !rows.is_empty() {
            let p = (0..rows.len()).min_by_key(|&i| rows[i].len()).expect("nonempty");
            let pivot_row = rows.swap_remove(p);
            let (&pc, pv) = pivot_row.iter().next().expect("nonempty row");
            rank += 1;
            for row in rows.iter_mut() {
                let Some(a) = row.get(&pc).cloned() else { continue };
                // row <- pv·row − a·pivot_row
                let mut next = BTreeMap::new();
                for (&k, v) in row.iter() {
                    next.insert(k, v * pv);
                }
                for (&k, v) in pivot_row.iter() {
                    let e = next.entry(k).or_insert_with(|| CycloNumber::zero(v.field()));
                    *e = &*e - &(v * &a);
                }
                next.retain(|_, v| !v.is_zero());
                *row = next;
            }
            rows.retain(|r| !r.is_empty());
        }
        rank
    }
}

/// A nonzero entry of d∘d, located on the square it comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareFailure {
    pub source: CubeVertexId,
    pub target: CubeVertexId,
    pub crossings: (usize, usize),
    pub value: CycloNumber,
}

impl fmt::Display for SquareFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "d∘d ≠ 0 on the square {} → {} (crossings {} and {}): coefficient {}",
            self.source, self.target, self.crossings.0, self.crossings.1, self.value
        )
    }
}

#[derive(Debug, Clone)]
pub struct DeformedComplex {
    n: u32,
    beta: BigRational,
    field: Arc<CyclotomicField>,
    components: usize,
    basis: Vec<ChainBasisElement>,
    chains: BTreeMap<i64, Vec<usize>>,
    local: Vec<usize>,
    differential: BTreeMap<i64, SparseMatrix>,
    /// Per basis element: its label on each component, if constant there.
    component_labels: Vec<Option<Vec<RootLabel>>>,
}

impl PartialEq for DeformedComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.beta == other.beta
            && self.basis == other.basis
            && self.differential == other.differential
    }
}

/// Builds the complex; the deformation parameter only enters through the
/// rescaling checks since every coefficient of the model is ±1.
pub fn build_complex(
    d: &LinkDiagram,
    n: u32,
    beta: &BigRational,
    max_crossings: usize,
) -> Result<DeformedComplex, ComplexError> {
    let k = d.crossing_count();
    if k > max_crossings {
        return Err(ComplexError::TooManyCrossings { crossings: k, limit: max_crossings });
    }
    let field = CyclotomicField::get(n)?;
    let mut basis = vec![];
    let mut labelings: Vec<HashMap<Vec<RootLabel>, usize>> = vec![];
    let mut component_labels = vec![];
    for v in cube_vertices(k) {
        let r = resolve(d, &v)?;
        let deg = degree(d, &v)?;
        let mut by_label = HashMap::new();
        for s in enumerate_admissible(&r, n) {
            let lab = arc_labeling(d, &r, &s);
            component_labels.push(constant_per_component(d, &lab));
            by_label.insert(lab, basis.len());
            basis.push(ChainBasisElement { vertex: v.clone(), state: s, degree: deg });
        }
        labelings.push(by_label);
    }
    let mut chains: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    let mut local = vec![0; basis.len()];
    for (i, b) in basis.iter().enumerate() {
        let list = chains.entry(b.degree).or_default();
        local[i] = list.len();
        list.push(i);
    }
    let mut edges: BTreeMap<i64, Vec<Triplet>> = BTreeMap::new();
    let one = CycloNumber::one(&field);
    let minus_one = -one.clone();
    for v in cube_vertices(k) {
        for c in 0..k {
            if v.bit(c) {
                continue;
            }
            let w = v.flipped(c);
            let sign = if v.ones_before(c) % 2 == 0 { &one } else { &minus_one };
            let (from, to) = (&labelings[v.index() as usize], &labelings[w.index() as usize]);
            let mut pairs: Vec<(usize, usize)> =
                from.iter().filter_map(|(lab, &i)| to.get(lab).map(|&j| (i, j))).collect();
            pairs.sort_unstable();
            for (i0, i1) in pairs {
                let (src, dst) = match d.crossings()[c].sign {
                    Sign::Positive => (i0, i1),
                    Sign::Negative => (i1, i0),
                };
                edges.entry(basis[src].degree).or_default().push(Triplet {
                    row: local[dst],
                    col: local[src],
                    value: sign.clone(),
                });
            }
        }
    }
    let size = |deg: i64| chains.get(&deg).map_or(0, Vec::len);
    let mut differential = BTreeMap::new();
    for &deg in chains.keys() {
        let mut entries = edges.remove(&deg).unwrap_or_default();
        entries.sort_by_key(|t| (t.col, t.row));
        differential.insert(deg, SparseMatrix { rows: size(deg + 1), cols: size(deg), entries });
    }
    Ok(DeformedComplex {
        n,
        beta: beta.clone(),
        field,
        components: d.component_count(),
        basis,
        chains,
        local,
        differential,
        component_labels,
    })
}

fn constant_per_component(d: &LinkDiagram, lab: &[RootLabel]) -> Option<Vec<RootLabel>> {
    let arcs: Vec<_> = d.arcs().collect();
    let mut psi: Vec<Option<RootLabel>> = vec![None; d.component_count()];
    for (i, &a) in arcs.iter().enumerate() {
        let c = d.component_of(a).expect("arc of diagram");
        match psi[c] {
            Some(x) if x != lab[i] => return None,
            _ => psi[c] = Some(lab[i]),
        }
    }
    for k in 0..d.free_loops() {
        psi[d.free_loop_component(k)] = Some(lab[arcs.len() + k]);
    }
    psi.into_iter().collect()
}

impl DeformedComplex {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Basis in contract order: vertex bits lexicographic, then state.
    pub fn basis(&self) -> &[ChainBasisElement] {
        &self.basis
    }

    /// Global basis indices of degree `deg`.
    pub fn chain(&self, deg: i64) -> &[usize] {
        self.chains.get(&deg).map_or(&[], Vec::as_slice)
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.chains.keys().copied()
    }

    pub fn chain_dims(&self) -> BTreeMap<i64, usize> {
        self.chains.iter().map(|(&k, v)| (k, v.len())).collect()
    }

    /// d^deg : C^deg → C^(deg+1).
    pub fn differential(&self, deg: i64) -> Option<&SparseMatrix> {
        self.differential.get(&deg)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.chains.iter().map(|(&k, v)| if k % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) }).sum()
    }

    fn global(&self, deg: i64, local: usize) -> usize {
        self.chains[&deg][local]
    }

    /// Checks d^(k+1)∘d^k = 0 entry by entry.
    pub fn check_d_squared(&self) -> Result<(), SquareFailure> {
        for (&deg, d0) in &self.differential {
            let Some(d1) = self.differential.get(&(deg + 1)) else { continue };
            let d1_cols = d1.columns();
            for (j, col) in d0.columns().iter().enumerate() {
                let mut acc: BTreeMap<usize, CycloNumber> = BTreeMap::new();
                for &(mid, a) in col {
                    for &(m, b) in &d1_cols[mid] {
                        *acc.entry(m).or_insert_with(|| CycloNumber::zero(&self.field)) += &(a * b);
                    }
                }
                if let Some((&m, value)) = acc.iter().find(|(_, v)| !v.is_zero()) {
                    let source = self.basis[self.global(deg, j)].vertex.clone();
                    let target = self.basis[self.global(deg + 2, m)].vertex.clone();
                    let diff: Vec<usize> = (0..source.len()).filter(|&c| source.bit(c) != target.bit(c)).collect();
                    let crossings = (diff.first().copied().unwrap_or(0), diff.get(1).copied().unwrap_or(0));
                    return Err(SquareFailure { source, target, crossings, value: value.clone() });
                }
            }
        }
        Ok(())
    }

    /// Negates one differential entry lying on a square, for negative tests.
    /// Returns `None` when the complex has no squares.
    pub fn with_sign_flip(&self) -> Option<DeformedComplex> {
        for (&deg, d0) in &self.differential {
            let Some(d1) = self.differential.get(&(deg + 1)) else { continue };
            let d1_cols = d1.columns();
            if let Some(pos) = d0.entries.iter().position(|t| !d1_cols[t.row].is_empty()) {
                let mut out = self.clone();
                let t = &mut out.differential.get_mut(&deg).expect("degree present").entries[pos];
                t.value = -t.value.clone();
                return Some(out);
            }
        }
        None
    }

    /// Conjugates the differential by diag(factors), indexed like `basis()`:
    /// the entry from a_j to a_i becomes d_ij·f_j/f_i.
    pub fn rescale_by(&self, factors: &[CycloNumber]) -> Result<DeformedComplex, ComplexError> {
        if factors.len() != self.basis.len() {
            return Err(ComplexError::RescaleLength { expected: self.basis.len(), got: factors.len() });
        }
        let inverses: Vec<CycloNumber> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.inv().map_err(|_| ComplexError::ZeroFactor(i)))
            .collect::<Result<_, _>>()?;
        let mut out = self.clone();
        for (&deg, m) in out.differential.iter_mut() {
            for t in m.entries.iter_mut() {
                let (src, dst) = (self.chains[&deg][t.col], self.chains[&(deg + 1)][t.row]);
                t.value = &(&t.value * &factors[src]) * &inverses[dst];
            }
        }
        Ok(out)
    }

    /// Diagonal rescaling with nonzero factors drawn deterministically from
    /// `seed`: small integer coordinates in the power basis of Q(ζ_n).
    pub fn rescale_basis(&self, seed: u64) -> DeformedComplex {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factors: Vec<CycloNumber> = (0..self.basis.len())
            .map(|_| loop {
                let coeffs = (0..self.field.degree())
                    .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-4i64..=4))))
                    .collect();
                let f = CycloNumber::from_coeffs(&self.field, coeffs);
                if !f.is_zero() {
                    break f;
                }
            })
            .collect();
        self.rescale_by(&factors).expect("factors are nonzero and sized to the basis")
    }

    /// The label on each component, when the element's state is constant
    /// along every component.
    pub fn component_labeling(&self, global: usize) -> Option<&[RootLabel]> {
        self.component_labels[global].as_deref()
    }

    /// Basis elements touched by no differential entry.
    pub fn isolated(&self) -> Vec<usize> {
        let mut touched = vec![false; self.basis.len()];
        for (&deg, m) in &self.differential {
            for t in &m.entries {
                touched[self.global(deg, t.col)] = true;
                touched[self.global(deg + 1, t.row)] = true;
            }
        }
        (0..self.basis.len()).filter(|&i| !touched[i]).collect()
    }

    /// Position of a global basis index inside its degree.
    pub fn local_index(&self, global: usize) -> usize {
        self.local[global]
    }
}
