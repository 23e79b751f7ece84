//! The deformed potential x^{n+1} − (n+1)β^n x and the polynomials derived
//! from it: g(z, w), the thick-edge polynomials u1, u2 and the arc polynomial π.

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::cyclotomic::{CycloError, CycloNumber, CyclotomicField, RootLabel};
use crate::poly::MultiPoly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PotentialError {
    #[error("n must be at least {min}, got {n}")]
    DegreeTooSmall { n: u32, min: u32 },
    #[error("beta must be nonzero")]
    ZeroBeta,
    #[error("internal error: {what} is not divisible by {by} (remainder {rem})")]
    InexactDivision { what: &'static str, by: &'static str, rem: String },
    #[error(transparent)]
    Field(#[from] CycloError),
}

pub const X_VARS: [&str; 4] = ["x1", "x2", "x3", "x4"];

/// The rank n and the deformation parameter β.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PotentialContext {
    n: u32,
    beta: BigRational,
}

impl PotentialContext {
    pub fn new(n: u32, beta: BigRational) -> Result<Self, PotentialError> {
        if n < 2 {
            return Err(PotentialError::DegreeTooSmall { n, min: 2 });
        }
        if beta.is_zero() {
            return Err(PotentialError::ZeroBeta);
        }
        Ok(PotentialContext { n, beta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beta(&self) -> &BigRational {
        &self.beta
    }

    /// (n+1)·β^n
    pub fn shift(&self) -> BigRational {
        BigRational::from_integer((self.n + 1).into()) * num_traits::pow(self.beta.clone(), self.n as usize)
    }
}

/// g(z, w) with g(x+y, xy) = x^{n+1} + y^{n+1}, via the power-sum recurrence
/// p_k = z·p_{k−1} − w·p_{k−2}, p_0 = 2, p_1 = z.
pub fn g_poly(n: u32) -> MultiPoly {
    let v = MultiPoly::vars(&["z", "w"]);
    let mut prev = v[0].constant_like(BigRational::from_integer(2.into()));
    let mut cur = v[0].clone();
    for _ in 1..=n {
        let next = &(&v[0] * &cur) - &(&v[1] * &prev);
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn exact_div(
    num: &MultiPoly,
    den: &MultiPoly,
    what: &'static str,
    by: &'static str,
) -> Result<MultiPoly, PotentialError> {
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return Err(PotentialError::InexactDivision { what, by, rem: r.to_string() });
    }
    Ok(q)
}

/// u1 = (g(x1+x2, x1x2) − g(x3+x4, x1x2)) / (x1+x2−x3−x4).
pub fn u1_poly(n: u32) -> Result<MultiPoly, PotentialError> {
    let x = MultiPoly::vars(&X_VARS);
    let g = g_poly(n);
    let s12 = &x[0] + &x[1];
    let s34 = &x[2] + &x[3];
    let p12 = &x[0] * &x[1];
    let num = &g.compose(&[s12.clone(), p12.clone()]) - &g.compose(&[s34.clone(), p12]);
    exact_div(&num, &(&s12 - &s34), "g(x1+x2,x1x2) - g(x3+x4,x1x2)", "x1+x2-x3-x4")
}

/// u2 = (g(x3+x4, x1x2) − g(x3+x4, x3x4)) / (x1x2 − x3x4).
pub fn u2_poly(n: u32) -> Result<MultiPoly, PotentialError> {
    let x = MultiPoly::vars(&X_VARS);
    let g = g_poly(n);
    let s34 = &x[2] + &x[3];
    let p12 = &x[0] * &x[1];
    let p34 = &x[2] * &x[3];
    let num = &g.compose(&[s34.clone(), p12.clone()]) - &g.compose(&[s34, p34.clone()]);
    exact_div(&num, &(&p12 - &p34), "g(x3+x4,x1x2) - g(x3+x4,x3x4)", "x1x2-x3x4")
}

/// π(x, y) = (x^{n+1} − y^{n+1})/(x − y) = Σ_{i=0}^{n} x^i y^{n−i}.
pub fn pi_poly(n: u32) -> MultiPoly {
    let mut p = MultiPoly::zero(&["x", "y"]);
    for i in 0..=n {
        p.add_term(vec![i, n - i], BigRational::one());
    }
    p
}

/// {λ1, λ2} = {λ3, λ4} as sets, with λ1 ≠ λ2.
pub fn admissible_tuple(l: [RootLabel; 4]) -> bool {
    l[0] != l[1] && ((l[0] == l[2] && l[1] == l[3]) || (l[0] == l[3] && l[1] == l[2]))
}

/// u1 and u2 for one n, computed once and evaluated many times.
#[derive(Debug, Clone)]
pub struct ThickEdgePolys {
    pub u1: MultiPoly,
    pub u2: MultiPoly,
}

impl ThickEdgePolys {
    pub fn new(n: u32) -> Result<Self, PotentialError> {
        Ok(ThickEdgePolys { u1: u1_poly(n)?, u2: u2_poly(n)? })
    }
}

/// Which of the four thick-edge equations hold at (βλ1, …, βλ4).
pub fn thick_edge_equations(
    polys: &ThickEdgePolys,
    ctx: &PotentialContext,
    field: &std::sync::Arc<CyclotomicField>,
    l: [RootLabel; 4],
) -> [bool; 4] {
    let z: Vec<CycloNumber> = l.iter().map(|r| r.value(field)).collect();
    let sum = &(&z[0] + &z[1]) - &(&z[2] + &z[3]);
    let prod = &(&z[0] * &z[1]) - &(&z[2] * &z[3]);
    let e: Vec<u32> = l.iter().map(|r| r.exponent()).collect();
    let u1 = polys.u1.eval_scaled_roots(field, ctx.beta(), &e);
    let u2 = polys.u2.eval_scaled_roots(field, ctx.beta(), &e);
    let shift = CycloNumber::from_rational(field, ctx.shift());
    [sum.is_zero(), prod.is_zero(), u1 == shift, u2.is_zero()]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub n: u32,
    pub beta: BigRational,
    pub tuples: usize,
    pub admissible: usize,
    /// Tuples where "all four equations hold" disagrees with admissibility, sorted.
    pub counterexamples: Vec<[u32; 4]>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Runs over all n⁴ tuples of roots and compares the four thick-edge equations
/// against [`admissible_tuple`].
pub fn lemma_brute_check(ctx: &PotentialContext) -> Result<LemmaReport, PotentialError> {
    let n = ctx.n();
    let field = CyclotomicField::get(n)?;
    let polys = ThickEdgePolys::new(n)?;
    let mut report = LemmaReport {
        n,
        beta: ctx.beta().clone(),
        tuples: 0,
        admissible: 0,
        counterexamples: vec![],
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let l = [a, b, c, d].map(RootLabel);
                    let holds = thick_edge_equations(&polys, ctx, &field, l).iter().all(|&x| x);
                    let adm = admissible_tuple(l);
                    report.tuples += 1;
                    report.admissible += adm as usize;
                    if holds != adm {
                        report.counterexamples.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Outcome of the symbolic identity checks for one n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub n: u32,
    pub g_defining: bool,
    pub u1_exact: bool,
    pub u2_exact: bool,
    pub symmetric: bool,
    pub telescoping: bool,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.g_defining && self.u1_exact && self.u2_exact && self.symmetric && self.telescoping
    }
}

/// (u1 − (n+1)b^n)(x1+x2−x3−x4) + u2(x1x2−x3x4) − Σ± (x_i^{n+1} − (n+1)b^n x_i),
/// with β kept as the symbolic variable `b`. Identically zero.
pub fn telescoping_defect(n: u32) -> Result<MultiPoly, PotentialError> {
    let names = ["x1", "x2", "x3", "x4", "b"];
    let v = MultiPoly::vars(&names);
    let u1 = u1_poly(n)?.extend_vars(&["b"]);
    let u2 = u2_poly(n)?.extend_vars(&["b"]);
    let shift = v[4].pow(n).scale(&BigRational::from_integer((n + 1).into()));
    let lhs = &(&(&u1 - &shift) * &(&(&v[0] + &v[1]) - &(&v[2] + &v[3])))
        + &(&u2 * &(&(&v[0] * &v[1]) - &(&v[2] * &v[3])));
    let w = |x: &MultiPoly| &x.pow(n + 1) - &(&shift * x);
    let rhs = &(&w(&v[0]) + &w(&v[1])) - &(&w(&v[2]) + &w(&v[3]));
    Ok(&lhs - &rhs)
}

pub fn verify_identities(n: u32) -> IdentityReport {
    let xy = MultiPoly::vars(&["x", "y"]);
    let g = g_poly(n);
    let g_defining = g.compose(&[&xy[0] + &xy[1], &xy[0] * &xy[1]])
        == &xy[0].pow(n + 1) + &xy[1].pow(n + 1);
    let u1 = u1_poly(n);
    let u2 = u2_poly(n);
    let sym = |p: &MultiPoly| p.swap_vars(0, 1) == *p && p.swap_vars(2, 3) == *p;
    let symmetric = match (&u1, &u2) {
        (Ok(a), Ok(b)) => sym(a) && sym(b),
        _ => false,
    };
    let telescoping = telescoping_defect(n).is_ok_and(|p| p.is_zero());
    IdentityReport { n, g_defining, u1_exact: u1.is_ok(), u2_exact: u2.is_ok(), symmetric, telescoping }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(a.into())
    }

    fn labels(v: [u32; 4]) -> [RootLabel; 4] {
        v.map(RootLabel)
    }

    #[test]
    fn g_small_cases() {
        assert_eq!(g_poly(1).to_string(), "z^2 - 2*w");
        assert_eq!(g_poly(2).to_string(), "z^3 - 3*z*w");
    }

    #[test]
    fn g_defining_identity_up_to_ten() {
        // independent route: expand (x+y)^k binomially is what compose does, so
        // compare against the explicit power sums instead
        let xy = MultiPoly::vars(&["x", "y"]);
        for n in 1..=10 {
            let lhs = g_poly(n).compose(&[&xy[0] + &xy[1], &xy[0] * &xy[1]]);
            let mut rhs = MultiPoly::zero(&["x", "y"]);
            rhs.add_term(vec![n + 1, 0], q(1));
            rhs.add_term(vec![0, n + 1], q(1));
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    #[test]
    fn u1_u2_for_n2() {
        let x = MultiPoly::vars(&X_VARS);
        let s = &x[0] + &x[1];
        let t = &x[2] + &x[3];
        let expected = &(&(&s * &s) + &(&s * &t)) + &(&(&t * &t) - &(&x[0] * &x[1]).scale(&q(3)));
        assert_eq!(u1_poly(2).unwrap(), expected);
        assert_eq!(u2_poly(2).unwrap(), t.scale(&q(-3)));
    }

    #[test]
    fn divisions_exact_up_to_ten() {
        for n in 1..=10 {
            assert!(u1_poly(n).is_ok(), "u1, n = {n}");
            assert!(u2_poly(n).is_ok(), "u2, n = {n}");
        }
    }

    #[test]
    fn symmetries_up_to_six() {
        for n in 1..=6 {
            let r = verify_identities(n);
            assert!(r.symmetric, "n = {n}");
        }
    }

    #[test]
    fn pi_identities() {
        assert_eq!(pi_poly(1).to_string(), "x + y");
        let xy = MultiPoly::vars(&["x", "y"]);
        let t = MultiPoly::vars(&["t"]);
        for n in 1..=10 {
            let p = pi_poly(n);
            let lhs = &(&xy[0] - &xy[1]) * &p;
            assert_eq!(lhs, &xy[0].pow(n + 1) - &xy[1].pow(n + 1));
            let diag = p.compose(&[t[0].clone(), t[0].clone()]);
            assert_eq!(diag, t[0].pow(n).scale(&q(n as i64 + 1)));
        }
    }

    #[test]
    fn telescoping_up_to_six() {
        for n in 1..=6 {
            assert!(telescoping_defect(n).unwrap().is_zero(), "n = {n}");
        }
    }

    #[test]
    fn admissibility_examples() {
        assert!(admissible_tuple(labels([0, 1, 0, 1])));
        assert!(admissible_tuple(labels([0, 1, 1, 0])));
        assert!(!admissible_tuple(labels([0, 0, 0, 0])));
        assert!(!admissible_tuple(labels([0, 1, 1, 2])));
    }

    #[test]
    fn lemma_values_at_admissible_tuple() {
        let ctx = PotentialContext::new(3, q(2)).unwrap();
        let f = CyclotomicField::get(3).unwrap();
        let polys = ThickEdgePolys::new(3).unwrap();
        let e = [0, 2, 2, 0];
        let u1 = polys.u1.eval_scaled_roots(&f, ctx.beta(), &e);
        let u2 = polys.u2.eval_scaled_roots(&f, ctx.beta(), &e);
        assert_eq!(u1, CycloNumber::from_int(&f, 4 * 8));
        assert!(u2.is_zero());
    }

    #[test]
    fn lemma_counts() {
        // Frozen from brute enumeration: ordered distinct (λ1, λ2) times the
        // two ways of matching {λ3, λ4}.
        let r2 = lemma_brute_check(&PotentialContext::new(2, q(1)).unwrap()).unwrap();
        assert_eq!((r2.tuples, r2.admissible), (16, 4));
        assert!(r2.passed());
        let r3 = lemma_brute_check(&PotentialContext::new(3, q(1)).unwrap()).unwrap();
        assert_eq!((r3.tuples, r3.admissible), (81, 12));
        assert!(r3.passed());
        let r2b = lemma_brute_check(&PotentialContext::new(2, q(5)).unwrap()).unwrap();
        assert_eq!(r2b.admissible, r2.admissible);
        assert!(r2b.passed());
    }

    #[test]
    fn brute_admissible_count_matches_formula() {
        for n in 2..=6u32 {
            let mut count = 0;
            for t in 0..n.pow(4) {
                let v = [t % n, (t / n) % n, (t / n / n) % n, t / n / n / n];
                count += admissible_tuple(labels(v)) as u32;
            }
            assert_eq!(count, 2 * n * (n - 1));
        }
    }

    #[test]
    fn context_validation() {
        assert_eq!(PotentialContext::new(1, q(1)), Err(PotentialError::DegreeTooSmall { n: 1, min: 2 }));
        assert_eq!(PotentialContext::new(2, q(0)), Err(PotentialError::ZeroBeta));
    }
}
