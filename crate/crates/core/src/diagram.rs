//! Oriented planar link diagrams: PD / signed-crossing parsing, component
//! tracing, crossing signs, writhe and linking numbers.
//!
//! PD tokens `X[a,b,c,d]` list the four arcs counterclockwise starting from the
//! incoming under-strand `a`; the under-strand runs `a → c`. The over-strand
//! direction is whatever makes every arc enter exactly one crossing and leave
//! exactly one crossing. When that is underdetermined (a component that only
//! ever passes over) the arc numbering decides: the over-strand runs `b → d`
//! when `d` follows `b`. A crossing is positive when the over-strand runs
//! left-to-right across the upward under-strand, i.e. enters at `d`.
//!
//! The signed format `C[s;ui,oi,uo,oo]` carries the sign explicitly and is
//! convention independent: the sign is never inferred, and the arc slots are
//! only used to trace the strands.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type ArcId = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("invalid crossing sign `{0}`")]
    InvalidSign(String),
    #[error("arc identifiers must be positive integers, got `{0}`")]
    InvalidArc(String),
    #[error("arc {arc} appears {count} times (expected 2)")]
    ArcCount { arc: ArcId, count: usize },
    #[error("inconsistent orientation: {0}")]
    InconsistentOrientation(String),
    #[error("components {0} and {1} have an odd signed crossing count")]
    OddLinking(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = DiagramError;
    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            _ => Err(DiagramError::InvalidSign(v.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: usize,
    pub sign: Sign,
    pub in_under: ArcId,
    pub in_over: ArcId,
    pub out_under: ArcId,
    pub out_over: ArcId,
}

impl Crossing {
    /// Where a strand entering through `arc` leaves this crossing.
    fn successor(&self, arc: ArcId) -> Option<ArcId> {
        if arc == self.in_under {
            Some(self.out_under)
        } else if arc == self.in_over {
            Some(self.out_over)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    free_loops: usize,
    /// Cyclic arc sequences; free loops are listed last as empty sequences.
    components: Vec<Vec<ArcId>>,
    #[serde(skip)]
    arc_component: BTreeMap<ArcId, usize>,
}

/// Symmetric integer matrix of pairwise linking numbers, zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkingMatrix(pub Vec<Vec<i64>>);

impl LinkingMatrix {
    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.0[i][j]
    }
}

impl LinkDiagram {
    /// Validates raw crossings (with in/out already known) and traces components.
    pub fn new(mut crossings: Vec<Crossing>, free_loops: usize) -> Result<Self, DiagramError> {
        for (i, c) in crossings.iter_mut().enumerate() {
            c.id = i;
        }
        let mut ins: BTreeMap<ArcId, usize> = BTreeMap::new();
        let mut outs: BTreeMap<ArcId, usize> = BTreeMap::new();
        for c in &crossings {
            for a in [c.in_under, c.in_over, c.out_under, c.out_over] {
                if a == 0 {
                    return Err(DiagramError::InvalidArc(a.to_string()));
                }
            }
            *ins.entry(c.in_under).or_default() += 1;
            *ins.entry(c.in_over).or_default() += 1;
            *outs.entry(c.out_under).or_default() += 1;
            *outs.entry(c.out_over).or_default() += 1;
        }
        let arcs: BTreeSet<ArcId> = ins.keys().chain(outs.keys()).copied().collect();
        for &a in &arcs {
            let (i, o) = (ins.get(&a).copied().unwrap_or(0), outs.get(&a).copied().unwrap_or(0));
            if i + o != 2 {
                return Err(DiagramError::ArcCount { arc: a, count: i + o });
            }
            if i != 1 {
                let role = if i == 2 { "enters" } else { "leaves" };
                return Err(DiagramError::InconsistentOrientation(format!(
                    "arc {a} {role} two crossings"
                )));
            }
        }

        let head: HashMap<ArcId, usize> = crossings
            .iter()
            .flat_map(|c| [(c.in_under, c.id), (c.in_over, c.id)])
            .collect();
        let mut arc_component = BTreeMap::new();
        let mut components = Vec::new();
        for &start in &arcs {
            if arc_component.contains_key(&start) {
                continue;
            }
            let idx = components.len();
            let mut seq = vec![];
            let mut a = start;
            while !arc_component.contains_key(&a) {
                arc_component.insert(a, idx);
                seq.push(a);
                let c = &crossings[head[&a]];
                a = c.successor(a).expect("head crossing contains arc");
            }
            components.push(seq);
        }
        components.extend(std::iter::repeat_with(Vec::new).take(free_loops));

        let d = LinkDiagram { crossings, free_loops, components, arc_component };
        let raw = d.raw_linking();
        for i in 0..raw.len() {
            for j in i + 1..raw.len() {
                if raw[i][j] % 2 != 0 {
                    return Err(DiagramError::OddLinking(i, j));
                }
            }
        }
        Ok(d)
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn free_loops(&self) -> usize {
        self.free_loops
    }

    pub fn components(&self) -> &[Vec<ArcId>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// All arc identifiers in increasing order.
    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.arc_component.keys().copied()
    }

    pub fn arc_count(&self) -> usize {
        self.arc_component.len()
    }

    pub fn component_of(&self, arc: ArcId) -> Option<usize> {
        self.arc_component.get(&arc).copied()
    }

    /// Components of the (under, over) strands at crossing `c`.
    pub fn strand_components(&self, c: &Crossing) -> (usize, usize) {
        (self.arc_component[&c.in_under], self.arc_component[&c.in_over])
    }

    /// Index of the component a free loop belongs to.
    pub fn free_loop_component(&self, k: usize) -> usize {
        self.components.len() - self.free_loops + k
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign.value()).sum()
    }

    /// Signed crossing counts between components (not halved).
    fn raw_linking(&self) -> Vec<Vec<i64>> {
        let l = self.components.len();
        let mut m = vec![vec![0i64; l]; l];
        for c in &self.crossings {
            let (i, j) = self.strand_components(c);
            if i != j {
                m[i][j] += c.sign.value();
                m[j][i] += c.sign.value();
            }
        }
        m
    }

    pub fn linking_matrix(&self) -> LinkingMatrix {
        let m = self.raw_linking().into_iter().map(|row| row.into_iter().map(|x| x / 2).collect());
        LinkingMatrix(m.collect())
    }

    /// Signed count of crossings whose both strands lie on each component.
    pub fn self_crossing_signs(&self) -> Vec<i64> {
        let mut v = vec![0; self.components.len()];
        for c in &self.crossings {
            let (i, j) = self.strand_components(c);
            if i == j {
                v[i] += c.sign.value();
            }
        }
        v
    }

    /// Same diagram with every crossing sign flipped (the mirror image).
    pub fn mirror(&self) -> LinkDiagram {
        let crossings = self
            .crossings
            .iter()
            .map(|c| Crossing { sign: c.sign.flipped(), ..c.clone() })
            .collect();
        LinkDiagram::new(crossings, self.free_loops).expect("mirror of a valid diagram")
    }

    /// Renders in the signed format accepted by [`parse_signed`].
    pub fn render_signed(&self) -> String {
        let mut toks: Vec<String> = self
            .crossings
            .iter()
            .map(|c| {
                let s = if c.sign == Sign::Positive { '+' } else { '-' };
                format!("C[{s};{},{},{},{}]", c.in_under, c.in_over, c.out_under, c.out_over)
            })
            .collect();
        toks.extend(std::iter::repeat_n("U".to_string(), self.free_loops));
        toks.join(" ")
    }

    /// Renders in the PD format accepted by [`parse_pd`].
    pub fn render_pd(&self) -> String {
        let mut toks: Vec<String> = self
            .crossings
            .iter()
            .map(|c| match c.sign {
                Sign::Positive => {
                    format!("X[{},{},{},{}]", c.in_under, c.out_over, c.out_under, c.in_over)
                }
                Sign::Negative => {
                    format!("X[{},{},{},{}]", c.in_under, c.in_over, c.out_under, c.out_over)
                }
            })
            .collect();
        toks.extend(std::iter::repeat_n("U".to_string(), self.free_loops));
        toks.join(" ")
    }
}

impl fmt::Display for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_signed())
    }
}

enum Token {
    Unknot,
    Pd([ArcId; 4]),
    Signed(Sign, [ArcId; 4]),
}

fn tokenize(text: &str) -> Result<Vec<Token>, DiagramError> {
    let body: String = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n");
    let mut out = vec![];
    let mut rest = body.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    while !rest.is_empty() {
        let (tok, tail) = match rest.find('[') {
            Some(open) if !rest[..open].contains(char::is_whitespace) => {
                let close = rest.find(']').ok_or_else(|| {
                    DiagramError::MalformedToken(rest.split_whitespace().next().unwrap_or("").into())
                })?;
                (&rest[..=close], &rest[close + 1..])
            }
            _ => {
                let end = rest.find(|c: char| c.is_whitespace() || c == ',').unwrap_or(rest.len());
                (&rest[..end], &rest[end..])
            }
        };
        out.push(parse_token(tok)?);
        rest = tail.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
    }
    Ok(out)
}

fn parse_arcs(tok: &str, body: &str) -> Result<[ArcId; 4], DiagramError> {
    let parts: Vec<&str> = body.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(DiagramError::MalformedToken(tok.to_string()));
    }
    let mut arcs = [0; 4];
    for (slot, p) in arcs.iter_mut().zip(parts) {
        let v: i64 = p.parse().map_err(|_| DiagramError::MalformedToken(tok.to_string()))?;
        if v <= 0 || v > ArcId::MAX as i64 {
            return Err(DiagramError::InvalidArc(p.to_string()));
        }
        *slot = v as ArcId;
    }
    Ok(arcs)
}

fn parse_token(tok: &str) -> Result<Token, DiagramError> {
    if tok == "U" {
        return Ok(Token::Unknot);
    }
    let malformed = || DiagramError::MalformedToken(tok.to_string());
    let inner = |prefix: &str| {
        tok.strip_prefix(prefix).and_then(|t| t.strip_suffix(']')).ok_or_else(malformed)
    };
    if tok.starts_with("X[") {
        return Ok(Token::Pd(parse_arcs(tok, inner("X[")?)?));
    }
    if tok.starts_with("C[") {
        let body = inner("C[")?;
        let (s, arcs) = body.split_once(';').ok_or_else(malformed)?;
        let sign = match s.trim() {
            "+" => Sign::Positive,
            "-" | "−" => Sign::Negative,
            other => return Err(DiagramError::InvalidSign(other.to_string())),
        };
        return Ok(Token::Signed(sign, parse_arcs(tok, arcs)?));
    }
    Err(malformed())
}

/// Decides, per crossing, whether the over-strand enters at token position 2
/// (`true`) or position 4. Under-strand positions 1 and 3 are fixed; the rest
/// follows from every arc entering exactly once and leaving exactly once.
/// Crossings left undetermined by that rule fall back on `tiebreak`.
fn infer_over_direction(
    raw: &[[ArcId; 4]],
    tiebreak: impl Fn(usize) -> bool,
) -> Result<Vec<bool>, DiagramError> {
    let mut occurrences: BTreeMap<ArcId, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, a) in raw.iter().enumerate() {
        for (slot, &arc) in a.iter().enumerate() {
            occurrences.entry(arc).or_default().push((ci, slot));
        }
    }
    for (&arc, occ) in &occurrences {
        if occ.len() != 2 {
            return Err(DiagramError::ArcCount { arc, count: occ.len() });
        }
    }

    let k = raw.len();
    let mut forward: Vec<Option<bool>> = vec![None; k];
    // parity links: forward[a] == forward[b] XOR flip
    let mut links: Vec<Vec<(usize, bool)>> = vec![vec![]; k];
    let fixed_in = |slot: usize| match slot {
        0 => Some(true),
        2 => Some(false),
        _ => None,
    };
    let mut forced: Vec<(usize, bool)> = vec![];
    for (&arc, occ) in &occurrences {
        let [(c1, s1), (c2, s2)] = [occ[0], occ[1]];
        match (fixed_in(s1), fixed_in(s2)) {
            (Some(a), Some(b)) => {
                if a == b {
                    return Err(DiagramError::InconsistentOrientation(format!(
                        "arc {arc} is the under-strand's {} at both ends",
                        if a { "input" } else { "output" }
                    )));
                }
            }
            // slot 1 is an input iff forward, slot 3 iff !forward
            (Some(a), None) => forced.push((c2, (s2 == 1) != a)),
            (None, Some(b)) => forced.push((c1, (s1 == 1) != b)),
            (None, None) => {
                if c1 != c2 {
                    let flip = s1 == s2;
                    links[c1].push((c2, flip));
                    links[c2].push((c1, flip));
                }
            }
        }
    }

    let assign = |start: usize, val: bool, forward: &mut Vec<Option<bool>>| {
        let mut queue = VecDeque::from([(start, val)]);
        while let Some((c, v)) = queue.pop_front() {
            match forward[c] {
                Some(old) if old != v => {
                    return Err(DiagramError::InconsistentOrientation(format!(
                        "over-strand direction at crossing {c} is contradictory"
                    )))
                }
                Some(_) => continue,
                None => forward[c] = Some(v),
            }
            for &(d, flip) in &links[c] {
                queue.push_back((d, v != flip));
            }
        }
        Ok(())
    };
    for (c, v) in forced {
        assign(c, v, &mut forward)?;
    }
    for c in 0..k {
        if forward[c].is_none() {
            assign(c, tiebreak(c), &mut forward)?;
        }
    }
    Ok(forward.into_iter().map(|f| f.expect("all crossings assigned")).collect())
}

fn build(
    raw: &[[ArcId; 4]],
    forward: &[bool],
    sign: impl Fn(usize, bool) -> Sign,
    free_loops: usize,
) -> Result<LinkDiagram, DiagramError> {
    let crossings = raw
        .iter()
        .zip(forward)
        .enumerate()
        .map(|(id, (&[a, b, c, d], &fwd))| {
            let (in_over, out_over) = if fwd { (b, d) } else { (d, b) };
            Crossing { id, sign: sign(id, fwd), in_under: a, in_over, out_under: c, out_over }
        })
        .collect();
    LinkDiagram::new(crossings, free_loops)
}

/// Parses oriented PD text (`X[a,b,c,d]` and `U` tokens).
pub fn parse_pd(text: &str) -> Result<LinkDiagram, DiagramError> {
    let mut raw = vec![];
    let mut free_loops = 0;
    for t in tokenize(text)? {
        match t {
            Token::Unknot => free_loops += 1,
            Token::Pd(a) => raw.push(a),
            Token::Signed(..) => {
                return Err(DiagramError::MalformedToken("signed crossing in PD input".into()))
            }
        }
    }
    let min_arc = raw.iter().flatten().min().copied().unwrap_or(0);
    let max_arc = raw.iter().flatten().max().copied().unwrap_or(0);
    let follows = |a: ArcId, b: ArcId| b == a + 1 || (a == max_arc && b == min_arc);
    let forward = infer_over_direction(&raw, |c| follows(raw[c][1], raw[c][3]))?;
    let sign = |_, fwd: bool| if fwd { Sign::Negative } else { Sign::Positive };
    build(&raw, &forward, sign, free_loops)
}

/// Parses the signed crossing format (`C[s;ui,oi,uo,oo]` and `U` tokens).
///
/// Signs are taken verbatim. The over-strand arcs are read as (in, out) in the
/// order given unless the rest of the diagram forces the opposite direction,
/// in which case they are swapped, exactly as in PD parsing.
pub fn parse_signed(text: &str) -> Result<LinkDiagram, DiagramError> {
    let mut raw = vec![];
    let mut signs = vec![];
    let mut free_loops = 0;
    for t in tokenize(text)? {
        match t {
            Token::Unknot => free_loops += 1,
            Token::Signed(sign, [ui, oi, uo, oo]) => {
                raw.push([ui, oi, uo, oo]);
                signs.push(sign);
            }
            Token::Pd(_) => {
                return Err(DiagramError::MalformedToken("PD crossing in signed input".into()))
            }
        }
    }
    let forward = infer_over_direction(&raw, |_| true)?;
    build(&raw, &forward, |c, _| signs[c], free_loops)
}

/// Picks the parser from the token kinds present in `text`.
pub fn parse_any(text: &str) -> Result<LinkDiagram, DiagramError> {
    if text.lines().map(|l| l.split('#').next().unwrap_or("")).any(|l| l.contains("C[")) {
        parse_signed(text)
    } else {
        parse_pd(text)
    }
}
