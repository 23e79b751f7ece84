//! Vertices of the cube of resolutions.
//!
//! At a crossing resolved by 0 the oriented smoothing joins the incoming
//! under-arc to the outgoing over-arc and the incoming over-arc to the outgoing
//! under-arc. Resolved by 1, the crossing becomes a thick edge whose four
//! incident thin edges occupy the slots
//!
//! ```text
//!   slot 1 = outgoing over    slot 2 = outgoing under
//!   slot 3 = incoming under   slot 4 = incoming over
//! ```
//!
//! so {1,2} leave the thick edge, {3,4} enter it, the 0-smoothing pairs
//! (1,3) and (2,4), and the original strands run 3→2 and 4→1.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::diagram::{ArcId, Crossing, LinkDiagram};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolutionError {
    #[error("resolution has {got} bits but the diagram has {expected} crossings")]
    ChoiceLength { expected: usize, got: usize },
    #[error("invalid resolution bits `{0}` (expected a string of 0 and 1)")]
    BadBits(String),
}

/// One bit per crossing: `false` = oriented smoothing, `true` = thick edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeVertexId(pub Vec<bool>);

impl CubeVertexId {
    pub fn zeros(k: usize) -> Self {
        CubeVertexId(vec![false; k])
    }

    /// Vertex number `i` of the cube in lexicographic order (crossing 0 is the
    /// most significant bit).
    pub fn from_index(i: u64, k: usize) -> Self {
        CubeVertexId((0..k).map(|c| (i >> (k - 1 - c)) & 1 == 1).collect())
    }

    pub fn index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, c: usize) -> bool {
        self.0[c]
    }

    pub fn flipped(&self, c: usize) -> Self {
        let mut v = self.0.clone();
        v[c] = !v[c];
        CubeVertexId(v)
    }

    pub fn ones_before(&self, c: usize) -> usize {
        self.0[..c].iter().filter(|&&b| b).count()
    }

    pub fn parse(s: &str) -> Result<Self, ResolutionError> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ResolutionError::BadBits(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CubeVertexId)
    }
}

impl fmt::Display for CubeVertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for CubeVertexId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThinEdge {
    /// Diagram arcs merged into this edge, sorted; empty for a free loop.
    pub arcs: Vec<ArcId>,
    /// Index among the diagram's free loops, if this edge is one.
    pub free_loop: Option<usize>,
    /// True when no thick edge touches it.
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThickEdge {
    pub crossing: usize,
    /// Thin-edge indices in slots 1..=4.
    pub slots: [usize; 4],
}

#[derive(Debug, Clone, Serialize)]
pub struct Resolution {
    pub choice: CubeVertexId,
    pub thin_edges: Vec<ThinEdge>,
    pub thick_edges: Vec<ThickEdge>,
    #[serde(skip)]
    arc_edge: BTreeMap<ArcId, usize>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn slot_arcs(c: &Crossing) -> [ArcId; 4] {
    [c.out_over, c.out_under, c.in_under, c.in_over]
}

/// Builds the thin/thick edge graph of the resolution `choice`.
pub fn resolve(d: &LinkDiagram, choice: &CubeVertexId) -> Result<Resolution, ResolutionError> {
    if choice.len() != d.crossing_count() {
        return Err(ResolutionError::ChoiceLength { expected: d.crossing_count(), got: choice.len() });
    }
    let arcs: Vec<ArcId> = d.arcs().collect();
    let pos: BTreeMap<ArcId, usize> = arcs.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut uf = UnionFind::new(arcs.len());
    for c in d.crossings() {
        if !choice.bit(c.id) {
            uf.union(pos[&c.in_under], pos[&c.out_over]);
            uf.union(pos[&c.in_over], pos[&c.out_under]);
        }
    }

    // Edge numbering: first appearance scanning crossings by id, slots 1..4.
    let mut root_edge: BTreeMap<usize, usize> = BTreeMap::new();
    let mut thin_edges: Vec<ThinEdge> = vec![];
    for c in d.crossings() {
        for a in slot_arcs(c) {
            let r = uf.find(pos[&a]);
            root_edge.entry(r).or_insert_with(|| {
                thin_edges.push(ThinEdge { arcs: vec![], free_loop: None, closed: true });
                thin_edges.len() - 1
            });
        }
    }
    let mut arc_edge = BTreeMap::new();
    for (i, &a) in arcs.iter().enumerate() {
        let e = root_edge[&uf.find(i)];
        thin_edges[e].arcs.push(a);
        arc_edge.insert(a, e);
    }
    let thick_edges: Vec<ThickEdge> = d
        .crossings()
        .iter()
        .filter(|c| choice.bit(c.id))
        .map(|c| ThickEdge { crossing: c.id, slots: slot_arcs(c).map(|a| arc_edge[&a]) })
        .collect();
    for t in &thick_edges {
        for &e in &t.slots {
            thin_edges[e].closed = false;
        }
    }
    for k in 0..d.free_loops() {
        thin_edges.push(ThinEdge { arcs: vec![], free_loop: Some(k), closed: true });
    }
    Ok(Resolution { choice: choice.clone(), thin_edges, thick_edges, arc_edge })
}

impl Resolution {
    pub fn thin_count(&self) -> usize {
        self.thin_edges.len()
    }

    /// Indices of closed thin edges (circles without thick edges).
    pub fn circles(&self) -> Vec<usize> {
        (0..self.thin_edges.len()).filter(|&e| self.thin_edges[e].closed).collect()
    }

    pub fn edge_of_arc(&self, arc: ArcId) -> Option<usize> {
        self.arc_edge.get(&arc).copied()
    }

    pub fn edge_of_free_loop(&self, k: usize) -> usize {
        self.thin_edges.len() - self.free_loop_count() + k
    }

    fn free_loop_count(&self) -> usize {
        self.thin_edges.iter().filter(|e| e.free_loop.is_some()).count()
    }

    pub fn thick_at(&self, crossing: usize) -> Option<&ThickEdge> {
        self.thick_edges.iter().find(|t| t.crossing == crossing)
    }

    /// Every open thin edge leaves exactly one thick slot (1 or 2) and enters
    /// exactly one (3 or 4); closed ones touch none.
    pub fn is_degree_two(&self) -> bool {
        let mut leave = vec![0usize; self.thin_edges.len()];
        let mut enter = vec![0usize; self.thin_edges.len()];
        for t in &self.thick_edges {
            leave[t.slots[0]] += 1;
            leave[t.slots[1]] += 1;
            enter[t.slots[2]] += 1;
            enter[t.slots[3]] += 1;
        }
        self.thin_edges.iter().enumerate().all(|(e, te)| {
            if te.closed {
                leave[e] == 0 && enter[e] == 0
            } else {
                leave[e] == 1 && enter[e] == 1
            }
        })
    }

    /// Number of circles after replacing every thick edge by its 0-smoothing, mod 2.
    pub fn p_parity(&self) -> u8 {
        let mut uf = UnionFind::new(self.thin_edges.len());
        for t in &self.thick_edges {
            uf.union(t.slots[0], t.slots[2]);
            uf.union(t.slots[1], t.slots[3]);
        }
        let circles = (0..self.thin_edges.len()).filter(|&e| uf.find(e) == e).count();
        (circles % 2) as u8
    }
}

/// Cohomological degree: Σ of signs over crossings resolved by 1.
pub fn degree(d: &LinkDiagram, choice: &CubeVertexId) -> Result<i64, ResolutionError> {
    if choice.len() != d.crossing_count() {
        return Err(ResolutionError::ChoiceLength { expected: d.crossing_count(), got: choice.len() });
    }
    Ok(d.crossings().iter().filter(|c| choice.bit(c.id)).map(|c| c.sign.value()).sum())
}

/// All 2^k vertices in lexicographic order.
pub fn cube_vertices(k: usize) -> impl Iterator<Item = CubeVertexId> {
    (0..1u64 << k).map(move |i| CubeVertexId::from_index(i, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_pd, parse_signed};

    fn hopf() -> LinkDiagram {
        parse_pd("X[1,3,2,4] X[3,1,4,2]").unwrap()
    }

    fn bits(s: &str) -> CubeVertexId {
        CubeVertexId::parse(s).unwrap()
    }

    #[test]
    fn hopf_all_zero() {
        let r = resolve(&hopf(), &bits("00")).unwrap();
        assert_eq!(r.circles().len(), 2);
        assert!(r.thick_edges.is_empty());
        assert_eq!(r.p_parity(), 0);
    }

    #[test]
    fn hopf_all_one() {
        let r = resolve(&hopf(), &bits("11")).unwrap();
        assert_eq!(r.thin_count(), 4);
        assert_eq!(r.thick_edges.len(), 2);
        assert_eq!(r.circles().len(), 0);
        assert_eq!(r.p_parity(), 0);
        assert!(r.is_degree_two());
    }

    #[test]
    fn free_unknot() {
        let d = parse_pd("U").unwrap();
        let r = resolve(&d, &CubeVertexId::zeros(0)).unwrap();
        assert_eq!(r.circles(), vec![0]);
        assert_eq!(r.p_parity(), 1);
    }

    #[test]
    fn kink_thick_edge_closes_on_itself() {
        let d = parse_pd("X[1,1,2,2]").unwrap();
        let r0 = resolve(&d, &bits("0")).unwrap();
        assert_eq!(r0.circles().len(), 2);
        let r1 = resolve(&d, &bits("1")).unwrap();
        assert_eq!(r1.thin_count(), 2);
        let t = &r1.thick_edges[0];
        assert_eq!(t.slots[0], t.slots[2]);
        assert_eq!(t.slots[1], t.slots[3]);
        assert!(r1.is_degree_two());
    }

    #[test]
    fn choice_length_checked() {
        assert_eq!(
            resolve(&hopf(), &bits("1")).unwrap_err(),
            ResolutionError::ChoiceLength { expected: 2, got: 1 }
        );
        assert!(CubeVertexId::parse("10x").is_err());
    }

    #[test]
    fn degree_rule() {
        let pos = parse_signed("C[+;1,3,2,4] C[+;3,1,4,2]").unwrap();
        let neg = pos.mirror();
        assert_eq!(degree(&pos, &bits("00")).unwrap(), 0);
        assert_eq!(degree(&pos, &bits("11")).unwrap(), 2);
        assert_eq!(degree(&neg, &bits("11")).unwrap(), -2);
        assert_eq!(degree(&neg, &bits("01")).unwrap(), -1);
    }

    #[test]
    fn parity_is_constant_over_the_cube() {
        // smoothing every thick edge always gives the all-zero resolution
        let d = parse_pd("X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8] U").unwrap();
        let r0 = resolve(&d, &CubeVertexId::zeros(4)).unwrap();
        assert_eq!(r0.p_parity() as usize, r0.circles().len() % 2);
        for v in cube_vertices(4) {
            let r = resolve(&d, &v).unwrap();
            assert!(r.is_degree_two(), "{v}");
            assert_eq!(r.p_parity(), r0.p_parity());
        }
    }

    #[test]
    fn vertex_indexing() {
        let v = CubeVertexId::from_index(0b101, 3);
        assert_eq!(v.to_string(), "101");
        assert_eq!(v.index(), 5);
        assert_eq!(v.ones_before(2), 1);
        let all: Vec<_> = cube_vertices(3).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }
}
