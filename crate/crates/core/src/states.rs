//! States of a resolution and the algebra R̄(Γ) in its semisimple model.
//!
//! R̄(Γ) is realized as the algebra of functions on the admissible states S(Γ):
//! the generator X_e acts as φ ↦ β·φ(e). Idempotents Q_φ are evaluated from
//! their product formula inside that model, so the projector identities and
//! the defining relations become finite, exact checks.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::cyclotomic::{CycloError, CycloNumber, CyclotomicField, RootLabel};
use crate::poly::MultiPoly;
use crate::potential::{admissible_tuple, PotentialContext, PotentialError, ThickEdgePolys};
use crate::resolution::Resolution;

/// Default cap on n^(thin edges) for raw-state enumeration: admits 12 thin
/// edges at n = 2 and 8 at n = 3.
pub const DEFAULT_MAX_RAW_STATES: u64 = 6561;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatesError {
    #[error("thin edge {0} does not exist in this resolution")]
    UnknownEdge(usize),
    #[error("{states} raw states exceed the enumeration bound {limit}")]
    RawBound { states: u64, limit: u64 },
    #[error("state has {got} labels, resolution has {expected} thin edges")]
    StateLength { expected: usize, got: usize },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Field(#[from] CycloError),
}

/// Root-of-unity labels on the thin edges of a resolution, indexed by edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct State(pub Vec<RootLabel>);

impl State {
    pub fn label(&self, e: usize) -> RootLabel {
        self.0[e]
    }

    /// Labels seen by a thick edge, slots 1..4.
    pub fn at_slots(&self, slots: &[usize; 4]) -> [RootLabel; 4] {
        slots.map(|e| self.0[e])
    }
}

pub fn is_admissible(r: &Resolution, s: &State) -> bool {
    r.thick_edges.iter().all(|t| admissible_tuple(s.at_slots(&t.slots)))
}

struct Classes(Vec<usize>);

impl Classes {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// All admissible states, sorted lexicographically.
///
/// Each thick edge is matched either straight across ((1,3),(2,4)) or crossed
/// ((1,4),(2,3)); for every combination of matchings the equalities collapse
/// thin edges into classes, and the classes are colored with the extra
/// requirement λ1 ≠ λ2 at every thick edge. The two matchings can only both
/// hold when all four labels agree, which λ1 ≠ λ2 forbids, so no state is
/// produced twice.
pub fn enumerate_admissible(r: &Resolution, n: u32) -> Vec<State> {
    let m = r.thin_count();
    let t = r.thick_edges.len();
    let mut out = vec![];
    for mask in 0..1u64 << t {
        let mut cls = Classes((0..m).collect());
        for (i, te) in r.thick_edges.iter().enumerate() {
            let [s1, s2, s3, s4] = te.slots;
            if mask >> i & 1 == 0 {
                cls.union(s1, s3);
                cls.union(s2, s4);
            } else {
                cls.union(s1, s4);
                cls.union(s2, s3);
            }
        }
        let roots: Vec<usize> = (0..m).map(|e| cls.find(e)).collect();
        let mut reps: Vec<usize> = roots.clone();
        reps.sort_unstable();
        reps.dedup();
        let slot_of: HashMap<usize, usize> = reps.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut ne: Vec<Vec<usize>> = vec![vec![]; reps.len()];
        let mut feasible = true;
        for te in &r.thick_edges {
            let (a, b) = (slot_of[&roots[te.slots[0]]], slot_of[&roots[te.slots[1]]]);
            if a == b {
                feasible = false;
                break;
            }
            ne[a.max(b)].push(a.min(b));
        }
        if !feasible {
            continue;
        }
        let mut colors = vec![0u32; reps.len()];
        color_classes(0, n, &ne, &mut colors, &mut |c| {
            out.push(State(roots.iter().map(|r| RootLabel(c[slot_of[r]])).collect()));
        });
    }
    out.sort();
    out
}

fn color_classes(
    i: usize,
    n: u32,
    ne: &[Vec<usize>],
    colors: &mut Vec<u32>,
    emit: &mut impl FnMut(&[u32]),
) {
    if i == ne.len() {
        emit(colors);
        return;
    }
    for c in 0..n {
        if ne[i].iter().all(|&j| colors[j] != c) {
            colors[i] = c;
            color_classes(i + 1, n, ne, colors, emit);
        }
    }
}

/// Every state S'(Γ) in lexicographic order, bounded by `max_raw`.
pub fn enumerate_raw(r: &Resolution, n: u32, max_raw: u64) -> Result<Vec<State>, StatesError> {
    let m = r.thin_count() as u32;
    let total = (n as u64).checked_pow(m).unwrap_or(u64::MAX);
    if total > max_raw {
        return Err(StatesError::RawBound { states: total, limit: max_raw });
    }
    Ok((0..total)
        .map(|mut i| {
            let mut v = vec![RootLabel(0); m as usize];
            for slot in v.iter_mut().rev() {
                *slot = RootLabel((i % n as u64) as u32);
                i /= n as u64;
            }
            State(v)
        })
        .collect())
}

/// Brute-force oracle: raw states filtered by the thick-edge test.
pub fn enumerate_admissible_brute(r: &Resolution, n: u32, max_raw: u64) -> Result<Vec<State>, StatesError> {
    Ok(enumerate_raw(r, n, max_raw)?.into_iter().filter(|s| is_admissible(r, s)).collect())
}

/// An element of R̄(Γ): one value per admissible state, in the algebra's order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateFunction(pub Vec<CycloNumber>);

impl StateFunction {
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(CycloNumber::is_zero)
    }

    pub fn mul(&self, other: &StateFunction) -> StateFunction {
        StateFunction(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| if a.is_zero() { a.clone() } else if b.is_zero() { b.clone() } else { a * b })
                .collect(),
        )
    }

    pub fn add(&self, other: &StateFunction) -> StateFunction {
        StateFunction(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &StateFunction) -> StateFunction {
        StateFunction(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, c: &CycloNumber) -> StateFunction {
        StateFunction(self.0.iter().map(|a| a * c).collect())
    }

    pub fn is_constant(&self, c: &CycloNumber) -> bool {
        self.0.iter().all(|a| a == c)
    }
}

/// R̄(Γ) as functions on S(Γ).
pub struct StateAlgebra<'r> {
    resolution: &'r Resolution,
    ctx: PotentialContext,
    field: Arc<CyclotomicField>,
    states: Vec<State>,
    index: HashMap<State, usize>,
    /// factors[e][λ] = (1/n) Σ_k X_e^k / (βλ)^k, built on demand.
    factors: Vec<Vec<Option<StateFunction>>>,
}

impl<'r> StateAlgebra<'r> {
    pub fn new(resolution: &'r Resolution, ctx: &PotentialContext) -> Result<Self, StatesError> {
        let n = ctx.n();
        let field = CyclotomicField::get(n)?;
        let states = enumerate_admissible(resolution, n);
        let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let factors = vec![vec![None; n as usize]; resolution.thin_count()];
        Ok(StateAlgebra { resolution, ctx: ctx.clone(), field, states, index, factors })
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn constant(&self, c: &CycloNumber) -> StateFunction {
        StateFunction(vec![c.clone(); self.states.len()])
    }

    pub fn one(&self) -> StateFunction {
        self.constant(&CycloNumber::one(&self.field))
    }

    pub fn zero(&self) -> StateFunction {
        self.constant(&CycloNumber::zero(&self.field))
    }

    /// Indicator function of an admissible state (zero if not admissible).
    pub fn indicator(&self, s: &State) -> StateFunction {
        let mut f = self.zero();
        if let Some(&i) = self.index.get(s) {
            f.0[i] = CycloNumber::one(&self.field);
        }
        f
    }

    fn beta(&self) -> CycloNumber {
        CycloNumber::from_rational(&self.field, self.ctx.beta().clone())
    }

    /// X_e: φ ↦ β·φ(e).
    pub fn generator_action(&self, e: usize) -> Result<StateFunction, StatesError> {
        if e >= self.resolution.thin_count() {
            return Err(StatesError::UnknownEdge(e));
        }
        let beta = self.beta();
        Ok(StateFunction(self.states.iter().map(|s| &beta * &s.label(e).value(&self.field)).collect()))
    }

    fn factor(&mut self, e: usize, lambda: RootLabel) -> Result<StateFunction, StatesError> {
        if let Some(f) = &self.factors[e][lambda.0 as usize] {
            return Ok(f.clone());
        }
        let n = self.ctx.n();
        let x = self.generator_action(e)?;
        let c = (&self.beta() * &lambda.value(&self.field)).inv()?;
        let y = x.scale(&c);
        let mut term = self.one();
        let mut sum = self.one();
        for _ in 1..n {
            term = term.mul(&y);
            sum = sum.add(&term);
        }
        let inv_n = CycloNumber::from_rational(&self.field, BigRational::new(1.into(), (n as i64).into()));
        let f = sum.scale(&inv_n);
        self.factors[e][lambda.0 as usize] = Some(f.clone());
        Ok(f)
    }

    /// Q_φ = Π_e (1/n)(1 + X_e/(βφ(e)) + … + X_e^{n−1}/(βφ(e))^{n−1}), for any
    /// state φ ∈ S'(Γ).
    pub fn idempotent(&mut self, phi: &State) -> Result<StateFunction, StatesError> {
        if phi.0.len() != self.resolution.thin_count() {
            return Err(StatesError::StateLength { expected: self.resolution.thin_count(), got: phi.0.len() });
        }
        let mut q = self.one();
        for (e, &lambda) in phi.0.iter().enumerate() {
            let f = self.factor(e, lambda)?;
            q = q.mul(&f);
        }
        Ok(q)
    }

    /// Evaluates a polynomial at function-valued arguments (pointwise).
    pub fn eval_poly(&self, p: &MultiPoly, args: &[StateFunction]) -> StateFunction {
        StateFunction(
            (0..self.states.len())
                .map(|i| {
                    let pt: Vec<CycloNumber> = args.iter().map(|a| a.0[i].clone()).collect();
                    p.eval(&pt)
                })
                .collect(),
        )
    }

    /// Checks that every defining relation of R̄(Γ) acts as zero; returns the
    /// first violated relation.
    pub fn verify_relations(&self) -> Result<(), String> {
        let n = self.ctx.n();
        let beta_n = CycloNumber::from_rational(&self.field, num_traits::pow(self.ctx.beta().clone(), n as usize));
        let xs: Vec<StateFunction> =
            (0..self.resolution.thin_count()).map(|e| self.generator_action(e).expect("edge exists")).collect();
        for (e, x) in xs.iter().enumerate() {
            let mut p = self.one();
            for _ in 0..n {
                p = p.mul(x);
            }
            if !p.is_constant(&beta_n) {
                return Err(format!("X_{e}^n != beta^n"));
            }
        }
        if self.resolution.thick_edges.is_empty() {
            return Ok(());
        }
        let polys = ThickEdgePolys::new(n).map_err(|e| e.to_string())?;
        let shift = CycloNumber::from_rational(&self.field, self.ctx.shift());
        for t in &self.resolution.thick_edges {
            let [x1, x2, x3, x4] = t.slots.map(|e| xs[e].clone());
            let sum = x1.add(&x2).sub(&x3).sub(&x4);
            let prod = x1.mul(&x2).sub(&x3.mul(&x4));
            let args = [x1, x2, x3, x4];
            let u1 = self.eval_poly(&polys.u1, &args);
            let u2 = self.eval_poly(&polys.u2, &args);
            let c = t.crossing;
            if !sum.is_zero() {
                return Err(format!("X1+X2-X3-X4 at thick edge of crossing {c}"));
            }
            if !prod.is_zero() {
                return Err(format!("X1X2-X3X4 at thick edge of crossing {c}"));
            }
            if !u1.is_constant(&shift) {
                return Err(format!("u1-(n+1)beta^n at thick edge of crossing {c}"));
            }
            if !u2.is_zero() {
                return Err(format!("u2 at thick edge of crossing {c}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectorReport {
    pub raw_states: usize,
    pub admissible: usize,
    /// Raw states whose Q_φ is the zero function.
    pub vanishing: usize,
    pub idempotent: bool,
    pub orthogonal: bool,
    pub complete: bool,
    pub complete_over_admissible: bool,
    /// Q_φ is the indicator of φ for admissible φ and zero otherwise.
    pub matches_structure: bool,
}

impl ProjectorReport {
    pub fn passed(&self) -> bool {
        self.idempotent && self.orthogonal && self.complete && self.complete_over_admissible && self.matches_structure
    }
}

/// Idempotency, pairwise orthogonality and completeness of all Q_φ, φ ∈ S'(Γ).
pub fn verify_projector_identities(
    r: &Resolution,
    ctx: &PotentialContext,
    max_raw: u64,
) -> Result<ProjectorReport, StatesError> {
    let raw = enumerate_raw(r, ctx.n(), max_raw)?;
    let mut alg = StateAlgebra::new(r, ctx)?;
    let mut report = ProjectorReport {
        raw_states: raw.len(),
        admissible: alg.dimension(),
        vanishing: 0,
        idempotent: true,
        orthogonal: true,
        complete: true,
        complete_over_admissible: true,
        matches_structure: true,
    };
    let mut total = alg.zero();
    let mut total_adm = alg.zero();
    // support counts per point; pairwise products vanish iff no point is
    // covered by two projectors
    let mut cover = vec![0usize; alg.dimension()];
    for phi in &raw {
        let q = alg.idempotent(phi)?;
        if q.mul(&q) != q {
            report.idempotent = false;
        }
        let admissible = is_admissible(r, phi);
        let expected = if admissible { alg.indicator(phi) } else { alg.zero() };
        if q != expected {
            report.matches_structure = false;
        }
        if q.is_zero() {
            report.vanishing += 1;
        }
        for (c, v) in cover.iter_mut().zip(&q.0) {
            *c += !v.is_zero() as usize;
        }
        total = total.add(&q);
        if admissible {
            total_adm = total_adm.add(&q);
        }
    }
    report.orthogonal = cover.iter().all(|&c| c <= 1);
    let one = CycloNumber::one(alg.field());
    report.complete = total.is_constant(&one);
    report.complete_over_admissible = total_adm.is_constant(&one);
    Ok(report)
}

/// Pairwise orthogonality checked directly, for small state spaces.
pub fn orthogonal_pairwise(r: &Resolution, ctx: &PotentialContext, max_raw: u64) -> Result<bool, StatesError> {
    let raw = enumerate_raw(r, ctx.n(), max_raw)?;
    let mut alg = StateAlgebra::new(r, ctx)?;
    let qs: Vec<StateFunction> = raw.iter().map(|phi| alg.idempotent(phi)).collect::<Result<_, _>>()?;
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            if !qs[i].mul(&qs[j]).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_pd;
    use crate::resolution::{cube_vertices, resolve, CubeVertexId};

    fn ctx(n: u32, beta: i64) -> PotentialContext {
        PotentialContext::new(n, BigRational::from_integer(beta.into())).unwrap()
    }

    fn res(pd: &str, bits: &str) -> Resolution {
        resolve(&parse_pd(pd).unwrap(), &CubeVertexId::parse(bits).unwrap()).unwrap()
    }

    const HOPF: &str = "X[1,3,2,4] X[3,1,4,2]";

    #[test]
    fn single_circle_has_n_states() {
        for n in 2..=5 {
            let r = res("U", "");
            assert_eq!(enumerate_admissible(&r, n).len(), n as usize);
        }
    }

    #[test]
    fn closed_thick_edge_has_ordered_distinct_pairs() {
        let r = res("X[1,1,2,2]", "1");
        for n in 2..=5u32 {
            assert_eq!(enumerate_admissible(&r, n).len(), (n * (n - 1)) as usize);
        }
    }

    #[test]
    fn hopf_counts() {
        assert_eq!(enumerate_admissible(&res(HOPF, "11"), 2).len(), 4);
        assert_eq!(enumerate_admissible(&res(HOPF, "00"), 2).len(), 4);
        assert_eq!(enumerate_admissible(&res(HOPF, "10"), 2).len(), 2);
    }

    #[test]
    fn direct_enumeration_matches_brute_force() {
        let diagrams = [
            HOPF,
            "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]",
            "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]",
            "X[1,1,2,2] U",
        ];
        for pd in diagrams {
            let d = parse_pd(pd).unwrap();
            for v in cube_vertices(d.crossing_count()) {
                let r = resolve(&d, &v).unwrap();
                for n in 2..=3 {
                    let brute = enumerate_admissible_brute(&r, n, DEFAULT_MAX_RAW_STATES).unwrap();
                    assert_eq!(enumerate_admissible(&r, n), brute, "{pd} at {v}, n = {n}");
                }
            }
        }
    }

    #[test]
    fn generator_on_single_circle() {
        let r = res("U", "");
        let alg = StateAlgebra::new(&r, &ctx(2, 1)).unwrap();
        let f = alg.field().clone();
        let x = alg.generator_action(0).unwrap();
        assert_eq!(x.0, vec![CycloNumber::from_int(&f, 1), CycloNumber::from_int(&f, -1)]);
        assert_eq!(alg.generator_action(1), Err(StatesError::UnknownEdge(1)));
    }

    #[test]
    fn generator_powers_are_beta_n() {
        let r = res(HOPF, "11");
        let alg = StateAlgebra::new(&r, &ctx(3, -3)).unwrap();
        let f = alg.field().clone();
        let beta_n = CycloNumber::from_int(&f, -27);
        for e in 0..r.thin_count() {
            let x = alg.generator_action(e).unwrap();
            assert!(x.mul(&x).mul(&x).is_constant(&beta_n));
        }
        let t = &r.thick_edges[0];
        let [x1, x2, x3, x4] = t.slots.map(|e| alg.generator_action(e).unwrap());
        assert!(x1.add(&x2).sub(&x3).sub(&x4).is_zero());
    }

    #[test]
    fn idempotent_for_n2_circle() {
        let r = res("U", "");
        let mut alg = StateAlgebra::new(&r, &ctx(2, 1)).unwrap();
        let f = alg.field().clone();
        let q = alg.idempotent(&State(vec![RootLabel(0)])).unwrap();
        assert_eq!(q.0, vec![CycloNumber::one(&f), CycloNumber::zero(&f)]);
        // (1 + X/β)/2 by hand
        let x = alg.generator_action(0).unwrap();
        let half = CycloNumber::from_rational(&f, BigRational::new(1.into(), 2.into()));
        assert_eq!(alg.one().add(&x).scale(&half), q);
    }

    #[test]
    fn non_admissible_idempotent_vanishes() {
        let r = res(HOPF, "11");
        let mut alg = StateAlgebra::new(&r, &ctx(2, 1)).unwrap();
        let constant = State(vec![RootLabel(0); r.thin_count()]);
        assert!(!is_admissible(&r, &constant));
        assert!(alg.idempotent(&constant).unwrap().is_zero());
        for s in alg.states().to_vec() {
            assert_eq!(alg.idempotent(&s).unwrap(), alg.indicator(&s));
        }
    }

    #[test]
    fn projector_identities_single_circle() {
        let r = res("U", "");
        for n in 2..=5 {
            let rep = verify_projector_identities(&r, &ctx(n, 1), DEFAULT_MAX_RAW_STATES).unwrap();
            assert!(rep.passed(), "n = {n}: {rep:?}");
            assert!(orthogonal_pairwise(&r, &ctx(n, 1), DEFAULT_MAX_RAW_STATES).unwrap());
        }
    }

    #[test]
    fn projector_identities_hopf_11() {
        let r = res(HOPF, "11");
        let rep = verify_projector_identities(&r, &ctx(2, 1), DEFAULT_MAX_RAW_STATES).unwrap();
        assert!(rep.passed());
        assert_eq!((rep.raw_states, rep.admissible, rep.vanishing), (16, 4, 12));
        assert!(orthogonal_pairwise(&r, &ctx(2, 1), DEFAULT_MAX_RAW_STATES).unwrap());
    }

    #[test]
    fn relations_act_as_zero() {
        let d = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]").unwrap();
        for v in cube_vertices(4) {
            let r = resolve(&d, &v).unwrap();
            for beta in [1, 2, -3] {
                let alg = StateAlgebra::new(&r, &ctx(3, beta)).unwrap();
                assert_eq!(alg.verify_relations(), Ok(()), "{v}, beta = {beta}");
            }
        }
    }

    #[test]
    fn raw_bound_enforced() {
        let r = res("U U U U U U U U U", "");
        assert_eq!(
            enumerate_raw(&r, 3, DEFAULT_MAX_RAW_STATES),
            Err(StatesError::RawBound { states: 19683, limit: DEFAULT_MAX_RAW_STATES })
        );
    }
}
