//! Sparse multivariate polynomials with rational coefficients.
//!
//! Monomials are exponent vectors ordered lexicographically (first variable most
//! significant); the leading term is the largest key.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{CycloNumber, CyclotomicField};

pub type Monomial = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(vars: &[&str]) -> Self {
        MultiPoly { vars: vars.iter().map(|s| s.to_string()).collect(), terms: BTreeMap::new() }
    }

    fn zero_like(&self) -> Self {
        MultiPoly { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[&str], c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn constant_like(&self, c: BigRational) -> Self {
        let mut p = self.zero_like();
        p.add_term(vec![0; self.nvars()], c);
        p
    }

    /// The i-th variable.
    pub fn var(vars: &[&str], i: usize) -> Self {
        let mut p = Self::zero(vars);
        let mut m = vec![0; vars.len()];
        m[i] = 1;
        p.add_term(m, BigRational::one());
        p
    }

    /// All variables of the ring, in order.
    pub fn vars(names: &[&str]) -> Vec<Self> {
        (0..names.len()).map(|i| Self::var(names, i)).collect()
    }

    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &[u32]) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        debug_assert_eq!(m.len(), self.nvars());
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut p = self.zero_like();
        if !c.is_zero() {
            p.terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        }
        p
    }

    fn mul_term(&self, m: &[u32], c: &BigRational) -> Self {
        let mut p = self.zero_like();
        for (mm, x) in &self.terms {
            let e = mm.iter().zip(m).map(|(a, b)| a + b).collect();
            p.terms.insert(e, x * c);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = self.constant_like(BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Appends extra variables (absent from every term).
    pub fn extend_vars(&self, extra: &[&str]) -> Self {
        let mut vars: Vec<String> = self.vars.to_vec();
        vars.extend(extra.iter().map(|s| s.to_string()));
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m = m.clone();
                m.resize(vars.len(), 0);
                (m, c.clone())
            })
            .collect();
        MultiPoly { vars: vars.into(), terms }
    }

    /// Substitutes `args[i]` for the i-th variable; the result lives in the args' ring.
    pub fn compose(&self, args: &[MultiPoly]) -> MultiPoly {
        assert_eq!(args.len(), self.nvars());
        let target = args.first().map(|a| a.zero_like()).unwrap_or_else(|| self.zero_like());
        let one = target.constant_like(BigRational::one());
        let mut powers: Vec<Vec<MultiPoly>> = vec![vec![one]; args.len()];
        let mut out = target;
        for (m, c) in &self.terms {
            let mut t = out.constant_like(c.clone());
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &args[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Multivariate division by a single divisor under lex order.
    /// Returns (quotient, remainder) with `self = q * divisor + r` and no
    /// term of `r` divisible by the leading monomial of `divisor`.
    pub fn div_rem(&self, divisor: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let (lm, lc) = divisor.leading_term().expect("division by zero polynomial");
        let (lm, lc_inv) = (lm.clone(), lc.recip());
        let mut p = self.clone();
        let mut q = self.zero_like();
        let mut r = self.zero_like();
        while let Some((m, c)) = p.terms.pop_last() {
            if m.iter().zip(&lm).all(|(a, b)| a >= b) {
                let qm: Monomial = m.iter().zip(&lm).map(|(a, b)| a - b).collect();
                let qc = &c * &lc_inv;
                // cancel the leading term, subtract the rest
                let mut sub = divisor.mul_term(&qm, &qc);
                sub.terms.remove(&m);
                p = &p - &sub;
                q.add_term(qm, qc);
            } else {
                r.add_term(m, c);
            }
        }
        (q, r)
    }

    pub fn eval(&self, point: &[CycloNumber]) -> CycloNumber {
        assert_eq!(point.len(), self.nvars());
        let field = point[0].field().clone();
        let mut powers: Vec<Vec<CycloNumber>> =
            point.iter().map(|x| vec![CycloNumber::one(&field), x.clone()]).collect();
        let mut acc = CycloNumber::zero(&field);
        for (m, c) in &self.terms {
            let mut t = CycloNumber::from_rational(&field, c.clone());
            for (i, &e) in m.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &point[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            acc += &t;
        }
        acc
    }

    /// Evaluates at x_i = β·ζ^{k_i}. Each monomial collapses to a rational
    /// multiple of a single root, so this only accumulates rationals per root.
    pub fn eval_scaled_roots(
        &self,
        field: &Arc<CyclotomicField>,
        beta: &BigRational,
        exponents: &[u32],
    ) -> CycloNumber {
        assert_eq!(exponents.len(), self.nvars());
        let n = field.order() as u64;
        let mut by_root = vec![BigRational::zero(); n as usize];
        for (m, c) in &self.terms {
            let deg: u32 = m.iter().sum();
            let k: u64 = m.iter().zip(exponents).map(|(&e, &x)| e as u64 * x as u64).sum::<u64>() % n;
            by_root[k as usize] += c * num_traits::pow(beta.clone(), deg as usize);
        }
        let mut acc = CycloNumber::zero(field);
        for (k, c) in by_root.into_iter().enumerate() {
            if !c.is_zero() {
                acc += &CycloNumber::root(field, k as i64).scale(&c);
            }
        }
        acc
    }

    /// Swaps two variables.
    pub fn swap_vars(&self, i: usize, j: usize) -> Self {
        let mut p = self.zero_like();
        for (m, c) in &self.terms {
            let mut m = m.clone();
            m.swap(i, j);
            p.terms.insert(m, c.clone());
        }
        p
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, rhs.vars, "polynomials over different rings");
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, rhs.vars, "polynomials over different rings");
        let mut p = self.clone();
        for (m, c) in &rhs.terms {
            p.add_term(m.clone(), -c);
        }
        p
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, rhs.vars, "polynomials over different rings");
        let mut p = self.zero_like();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                p.add_term(m, c1 * c2);
            }
        }
        p
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

/// Canonical rendering: terms in decreasing lex order, e.g. `x1^2*x2 - 3*x3 + 1`.
impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let factors: Vec<String> = m
                .iter()
                .zip(self.vars.iter())
                .filter(|(e, _)| **e > 0)
                .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
