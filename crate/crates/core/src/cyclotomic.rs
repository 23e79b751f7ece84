//! Exact arithmetic in the cyclotomic field Q(ζ_n).
//!
//! Elements are residues of rational polynomials modulo the n-th cyclotomic
//! polynomial Φ_n, stored densely with `deg Φ_n` coefficients. Working modulo
//! Φ_n (irreducible) rather than x^n − 1 keeps the ring a field, so products of
//! differences of distinct roots of unity are provably nonzero.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("cyclotomic polynomial of order 0 is undefined")]
    ZeroOrder,
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),
}

/// Integer polynomial, coefficients from the constant term upwards.
pub type IntPoly = Vec<BigInt>;

/// Φ_n, obtained by dividing x^n − 1 by Φ_d for every proper divisor d of n.
pub fn cyclotomic_polynomial(n: u32) -> Result<IntPoly, CycloError> {
    if n == 0 {
        return Err(CycloError::ZeroOrder);
    }
    let mut cache: HashMap<u32, IntPoly> = HashMap::new();
    Ok(cyclotomic_rec(n, &mut cache))
}

fn cyclotomic_rec(n: u32, cache: &mut HashMap<u32, IntPoly>) -> IntPoly {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    // x^n - 1
    let mut num: IntPoly = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let phi_d = cyclotomic_rec(d, cache);
        num = div_exact_monic(&num, &phi_d);
    }
    cache.insert(n, num.clone());
    num
}

/// Exact division of integer polynomials by a monic divisor.
fn div_exact_monic(num: &IntPoly, den: &IntPoly) -> IntPoly {
    let dd = den.len() - 1;
    debug_assert!(den[dd].is_one());
    let mut rem = num.clone();
    let qlen = num.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

/// The field Q(ζ_n) = Q[x]/(Φ_n). Shared between elements via `Arc`.
#[derive(Debug)]
pub struct CyclotomicField {
    n: u32,
    /// Φ_n as rationals, monic, low degree first.
    modulus: Vec<BigRational>,
    /// Reduced coefficient vectors of ζ^k for k in 0..n.
    roots: Vec<Vec<BigRational>>,
}

impl PartialEq for CyclotomicField {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}
impl Eq for CyclotomicField {}

static FIELDS: OnceLock<Mutex<HashMap<u32, Arc<CyclotomicField>>>> = OnceLock::new();

impl CyclotomicField {
    /// Returns the (cached) field of n-th roots of unity.
    pub fn get(n: u32) -> Result<Arc<Self>, CycloError> {
        let map = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = map.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(f) = map.get(&n) {
            return Ok(f.clone());
        }
        let phi = cyclotomic_polynomial(n)?;
        let modulus: Vec<BigRational> = phi.into_iter().map(BigRational::from_integer).collect();
        let deg = modulus.len() - 1;
        let mut field = CyclotomicField { n, modulus, roots: Vec::with_capacity(n as usize) };
        let mut cur = vec![BigRational::zero(); deg];
        cur[0] = BigRational::one();
        for _ in 0..n {
            field.roots.push(cur.clone());
            // multiply by x
            let mut next = vec![BigRational::zero(); deg + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] = c.clone();
            }
            cur = field.reduce(next);
        }
        let f = Arc::new(field);
        map.insert(n, f.clone());
        Ok(f)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    /// deg Φ_n = φ(n).
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigRational] {
        &self.modulus
    }

    /// Reduces an arbitrary-length coefficient vector modulo Φ_n.
    fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let deg = self.degree();
        if c.len() > deg {
            for i in (deg..c.len()).rev() {
                if c[i].is_zero() {
                    continue;
                }
                let lead = std::mem::replace(&mut c[i], BigRational::zero());
                for j in 0..deg {
                    if !self.modulus[j].is_zero() {
                        let t = &lead * &self.modulus[j];
                        c[i - deg + j] -= t;
                    }
                }
            }
            c.truncate(deg);
        } else {
            c.resize(deg, BigRational::zero());
        }
        c
    }
}

/// An element of Q(ζ_n).
#[derive(Clone)]
pub struct CycloNumber {
    field: Arc<CyclotomicField>,
    coeffs: Vec<BigRational>,
}

impl CycloNumber {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        CycloNumber { field: field.clone(), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, q: BigRational) -> Self {
        let mut x = Self::zero(field);
        x.coeffs[0] = q;
        x
    }

    pub fn from_int(field: &Arc<CyclotomicField>, k: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(k.into()))
    }

    /// Builds an element from coefficients of 1, z, z², … (any length), reducing mod Φ_n.
    pub fn from_coeffs(field: &Arc<CyclotomicField>, coeffs: Vec<BigRational>) -> Self {
        CycloNumber { field: field.clone(), coeffs: field.reduce(coeffs) }
    }

    /// ζ_n^k, with k reduced modulo n.
    pub fn root(field: &Arc<CyclotomicField>, k: i64) -> Self {
        let e = k.rem_euclid(field.n as i64) as usize;
        CycloNumber { field: field.clone(), coeffs: field.roots[e].clone() }
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Returns the rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycloNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_n.
    pub fn inv(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero(self.field.n));
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(&self.field, q.recip()));
        }
        let mut r0 = trim(self.field.modulus.clone());
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // Φ_n irreducible: the gcd is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let coeffs = s0.into_iter().map(|x| x * &c).collect();
        Ok(Self::from_coeffs(&self.field, coeffs))
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(self.field.n, other.field.n, "mixing elements of different cyclotomic fields");
    }
}

fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(out)
}

/// Division with remainder in Q[x]; `b` must be nonzero and trimmed.
fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    if rem.len() < b.len() {
        return (vec![], trim(rem));
    }
    let db = b.len() - 1;
    let lead_inv = b[db].recip();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    rem.truncate(db);
    (trim(quot), trim(rem))
}

impl PartialEq for CycloNumber {
    fn eq(&self, other: &Self) -> bool {
        self.field.n == other.field.n && self.coeffs == other.coeffs
    }
}
impl Eq for CycloNumber {}

impl<'a> Add<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn add(self, rhs: &CycloNumber) -> CycloNumber {
        self.check_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        CycloNumber { field: self.field.clone(), coeffs }
    }
}

impl<'a> Sub<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn sub(self, rhs: &CycloNumber) -> CycloNumber {
        self.check_field(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        CycloNumber { field: self.field.clone(), coeffs }
    }
}

impl<'a> Mul<&'a CycloNumber> for &'a CycloNumber {
    type Output = CycloNumber;
    fn mul(self, rhs: &CycloNumber) -> CycloNumber {
        self.check_field(rhs);
        if let Some(q) = rhs.as_rational() {
            return self.scale(q);
        }
        if let Some(q) = self.as_rational() {
            return rhs.scale(q);
        }
        let deg = self.field.degree();
        let mut out = vec![BigRational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        CycloNumber { field: self.field.clone(), coeffs: self.field.reduce(out) }
    }
}

impl Neg for &CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        CycloNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl AddAssign<&CycloNumber> for CycloNumber {
    fn add_assign(&mut self, rhs: &CycloNumber) {
        self.check_field(rhs);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycloNumber> for CycloNumber {
            type Output = CycloNumber;
            fn $m(self, rhs: CycloNumber) -> CycloNumber {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNumber {
    type Output = CycloNumber;
    fn neg(self) -> CycloNumber {
        -&self
    }
}

/// Renders as `a0 + a1·z + a2·z^2 …` with z = ζ_n; zero terms are omitted.
impl fmt::Display for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let z = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            if k == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(&z)?;
            } else {
                write!(f, "{mag}·{z}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for CycloNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(z{})[{}]", self.field.n, self)
    }
}

/// Exponent k of a root of unity ζ_n^k, reduced modulo n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RootLabel(pub u32);

impl RootLabel {
    pub fn new(k: i64, n: u32) -> Self {
        RootLabel(k.rem_euclid(n as i64) as u32)
    }

    pub fn exponent(self) -> u32 {
        self.0
    }

    pub fn value(self, field: &Arc<CyclotomicField>) -> CycloNumber {
        CycloNumber::root(field, self.0 as i64)
    }
}

impl fmt::Display for RootLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ζ^{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> IntPoly {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1).unwrap(), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(2).unwrap(), ints(&[1, 1]));
        assert_eq!(cyclotomic_polynomial(6).unwrap(), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12).unwrap(), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(0), Err(CycloError::ZeroOrder));
    }

    #[test]
    fn phi_105_has_a_coefficient_two() {
        // first cyclotomic polynomial with a coefficient outside {-1, 0, 1}
        let p = cyclotomic_polynomial(105).unwrap();
        assert_eq!(p.len(), 49);
        assert!(p.iter().any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn roots_basic() {
        let f2 = CyclotomicField::get(2).unwrap();
        assert_eq!(CycloNumber::root(&f2, 0), CycloNumber::one(&f2));
        assert_eq!(CycloNumber::root(&f2, 1), CycloNumber::from_int(&f2, -1));
        let f3 = CyclotomicField::get(3).unwrap();
        let z = CycloNumber::root(&f3, 1);
        let s = &(&z * &z) + &z;
        assert!((&s + &CycloNumber::one(&f3)).is_zero());
    }

    #[test]
    fn gaussian_integers() {
        let f4 = CyclotomicField::get(4).unwrap();
        let one = CycloNumber::one(&f4);
        let i = CycloNumber::root(&f4, 1);
        assert_eq!(&(&one - &i) * &(&one + &i), CycloNumber::from_int(&f4, 2));
    }

    #[test]
    fn inverse_of_root() {
        for n in 1..=12u32 {
            let f = CyclotomicField::get(n).unwrap();
            let z = CycloNumber::root(&f, 1);
            assert_eq!(z.inv().unwrap(), CycloNumber::root(&f, n as i64 - 1));
        }
        let f5 = CyclotomicField::get(5).unwrap();
        assert_eq!(CycloNumber::zero(&f5).inv(), Err(CycloError::DivisionByZero(5)));
    }

    #[test]
    fn product_of_one_minus_roots_is_n() {
        // (x^n - 1)/(x - 1) = 1 + x + ... + x^{n-1}, which is n at x = 1
        for n in 2..=12u32 {
            let f = CyclotomicField::get(n).unwrap();
            let one = CycloNumber::one(&f);
            let prod = (1..n as i64)
                .map(|k| &one - &CycloNumber::root(&f, k))
                .fold(one.clone(), |acc, x| &acc * &x);
            assert_eq!(prod, CycloNumber::from_int(&f, n as i64));
        }
    }

    #[test]
    fn rendering() {
        let f3 = CyclotomicField::get(3).unwrap();
        assert_eq!(CycloNumber::zero(&f3).to_string(), "0");
        assert_eq!(CycloNumber::root(&f3, 2).to_string(), "-1 - z");
        let x = CycloNumber::from_coeffs(&f3, vec![q(1, 2), q(-3, 1)]);
        assert_eq!(x.to_string(), "1/2 - 3·z");
    }

    #[test]
    fn roots_injective_and_multiplicative() {
        for n in 1..=12u32 {
            let f = CyclotomicField::get(n).unwrap();
            let all: Vec<_> = (0..n as i64).map(|k| CycloNumber::root(&f, k)).collect();
            for i in 0..n as usize {
                for j in 0..n as usize {
                    if i != j {
                        assert_ne!(all[i], all[j], "n={n}: ζ^{i} = ζ^{j}");
                    }
                    assert_eq!(&all[i] * &all[j], all[(i + j) % n as usize]);
                }
            }
            assert!(all[1 % n as usize].pow(n).is_one());
        }
    }

    fn arb_element() -> impl Strategy<Value = (u32, Vec<(i64, i64)>)> {
        (1u32..=12).prop_flat_map(|n| {
            let d = cyclotomic_polynomial(n).unwrap().len() - 1;
            (Just(n), prop::collection::vec((-20i64..=20, 1i64..=7), d))
        })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided((n, cs) in arb_element()) {
            let f = CyclotomicField::get(n).unwrap();
            let a = CycloNumber::from_coeffs(&f, cs.iter().map(|&(p, d)| q(p, d)).collect());
            prop_assume!(!a.is_zero());
            let inv = a.inv().unwrap();
            prop_assert!((&a * &inv).is_one());
            prop_assert!((&inv * &a).is_one());
        }

        #[test]
        fn multiplication_distributes((n, cs) in arb_element(), k in 0i64..24) {
            let f = CyclotomicField::get(n).unwrap();
            let a = CycloNumber::from_coeffs(&f, cs.iter().map(|&(p, d)| q(p, d)).collect());
            let z = CycloNumber::root(&f, k);
            let w = CycloNumber::root(&f, k + 1);
            prop_assert_eq!(&a * &(&z + &w), &(&a * &z) + &(&a * &w));
        }
    }
}
