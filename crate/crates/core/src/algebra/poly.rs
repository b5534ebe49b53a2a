use alloc::collections::btree_map::Entry;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Monomial, Rational, Var};

/// Exact multivariate polynomial with rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SparsePoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(super::rat(c))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if the polynomial has no variables (zero included).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    /// Largest term under graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Total degree counted only over variables satisfying `pred`.
    pub fn degree_in_set(&self, pred: impl Fn(Var) -> bool) -> u32 {
        self.terms
            .keys()
            .map(|m| m.factors().iter().filter(|(v, _)| pred(*v)).map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> SparsePoly {
        Self { terms: self.terms.iter().map(|(t, k)| (t.mul(m), k.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
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

    /// Substitutes the assigned variables; unassigned variables stay symbolic.
    pub fn eval(&self, assignment: &BTreeMap<Var, Rational>) -> SparsePoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.factors() {
                match assignment.get(&v) {
                    Some(x) => coeff *= num_traits::pow(x.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial::from_pairs(rest), coeff);
        }
        out
    }

    /// Evaluates at a full assignment given by a lookup function.
    pub fn evaluate(&self, value: impl Fn(Var) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in m.factors() {
                t *= num_traits::pow(value(v), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Replaces `v` by the polynomial `q`.
    pub fn substitute(&self, v: Var, q: &SparsePoly) -> SparsePoly {
        let by_power = self.coefficients_in(|w| w == v);
        let mut out = Self::zero();
        let mut cache: BTreeMap<u32, SparsePoly> = BTreeMap::new();
        for (m, c) in by_power {
            let e = m.exponent(v);
            let qe = cache.entry(e).or_insert_with(|| q.pow(e)).clone();
            out = &out + &(&c * &qe);
        }
        out
    }

    /// Groups the terms by their power product in the variables selected by
    /// `main`; each value is the coefficient polynomial in the other
    /// variables.
    pub fn coefficients_in(&self, main: impl Fn(Var) -> bool) -> BTreeMap<Monomial, SparsePoly> {
        let mut out: BTreeMap<Monomial, SparsePoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (key, rest) = m.split(&main);
            out.entry(key).or_default().add_term(rest, c.clone());
        }
        out
    }

    /// Coefficients `c₀…c_d` with `self = Σ c_k·main^(d−k)`.
    pub fn coeff_vector(&self, main: Var) -> Vec<SparsePoly> {
        let d = self.degree_in(main) as usize;
        let mut out = alloc::vec![SparsePoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(main) as usize;
            out[d - e].add_term(m.without(main), c.clone());
        }
        out
    }

    /// Horner recombination of a `coeff_vector`.
    pub fn from_coeff_vector(coeffs: &[SparsePoly], main: Var) -> SparsePoly {
        let x = SparsePoly::var(main);
        coeffs.iter().fold(SparsePoly::zero(), |acc, c| &(&acc * &x) + c)
    }

    /// Coefficient of `v^e` as a polynomial in the remaining variables.
    pub fn coeff_of_power(&self, v: Var, e: u32) -> SparsePoly {
        SparsePoly::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.exponent(v) == e)
                .map(|(m, c)| (m.without(v), c.clone())),
        )
    }

    /// Smallest exponent of `v` over all terms (the order at `v = 0`).
    pub fn order_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(v)).min()
    }

    pub fn diff(&self, v: Var) -> SparsePoly {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let rest = m.without(v);
            let dm = rest.mul(&Monomial::pow(v, e - 1));
            out.add_term(dm, c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &SparsePoly) -> Option<SparsePoly> {
        let (lm, lc) = d.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = SparsePoly::zero();
        while let Some((m, c)) = rem.leading_term() {
            let qm = m.div(&lm)?;
            let qc = c / &lc;
            let step = SparsePoly::term(qm, qc);
            rem = &rem - &(&step * d);
            quot = &quot + &step;
        }
        Some(quot)
    }

    /// Monomial gcd of all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<SparsePoly> {
        let mut terms = BTreeMap::new();
        for (t, c) in &self.terms {
            terms.insert(t.div(m)?, c.clone());
        }
        Some(Self { terms })
    }

    pub fn leading_coeff(&self) -> Rational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// If the polynomial involves at most the single variable `v`.
    pub fn is_univariate_in(&self, v: Var) -> bool {
        self.terms.keys().all(|m| m.vars().all(|w| w == v))
    }

    /// Monic gcd of two univariate polynomials in `v` over ℚ.
    pub fn gcd_univariate(a: &SparsePoly, b: &SparsePoly, v: Var) -> SparsePoly {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem_univariate(&b, v);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lc = a.leading_coeff();
        a.scale(&lc.recip())
    }

    fn rem_univariate(&self, d: &SparsePoly, v: Var) -> SparsePoly {
        let dd = d.degree_in(v);
        let lc = d.leading_coeff();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= dd {
            let shift = r.degree_in(v) - dd;
            let c = r.leading_coeff() / &lc;
            r = &r - &d.mul_monomial(&Monomial::pow(v, shift)).scale(&c);
        }
        r
    }

    /// True if every coefficient is an integer.
    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl From<Var> for SparsePoly {
    fn from(v: Var) -> Self {
        SparsePoly::var(v)
    }
}

impl From<Rational> for SparsePoly {
    fn from(c: Rational) -> Self {
        SparsePoly::constant(c)
    }
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        // Multiply integer numerators over a common denominator so that the
        // inner loop never normalizes a fraction.
        let (da, a) = self.integer_form();
        let (db, b) = rhs.integer_form();
        let den = da * db;
        let acc = packed::mul(&a, &b).unwrap_or_else(|| {
            let mut acc: BTreeMap<Monomial, BigInt> = BTreeMap::new();
            for (ma, ca) in &a {
                for (mb, cb) in &b {
                    *acc.entry(ma.mul(mb)).or_default() += ca * cb;
                }
            }
            acc
        });
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Rational::new(c, den.clone())))
            .collect();
        SparsePoly { terms }
    }
}

/// Multiplication with exponent vectors packed into one machine word and
/// small coefficients accumulated in `i128`.
mod packed {
    use alloc::collections::BTreeMap;
    use alloc::vec::Vec;

    use hashbrown::HashMap;
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;

    use super::super::{Monomial, Var};

    const BITS: usize = 8;
    const SLOTS: usize = 128 / BITS;

    pub(super) fn mul(a: &[(&Monomial, BigInt)], b: &[(&Monomial, BigInt)]) -> Option<BTreeMap<Monomial, BigInt>> {
        let mut vars: Vec<Var> = a.iter().chain(b).flat_map(|(m, _)| m.vars()).collect();
        vars.sort_unstable();
        vars.dedup();
        if vars.len() > SLOTS {
            return None;
        }
        let max_deg = |side: &[(&Monomial, BigInt)], v: Var| side.iter().map(|(m, _)| m.exponent(v)).max().unwrap_or(0);
        if vars.iter().any(|&v| max_deg(a, v) + max_deg(b, v) >= 1 << BITS) {
            return None;
        }
        let pack = |m: &Monomial| -> u128 {
            m.factors().iter().fold(0u128, |k, &(v, e)| {
                let slot = vars.binary_search(&v).expect("collected");
                k | (e as u128) << (BITS * slot)
            })
        };
        let pa: Vec<u128> = a.iter().map(|(m, _)| pack(m)).collect();
        let pb: Vec<u128> = b.iter().map(|(m, _)| pack(m)).collect();
        let unpack = |k: u128| {
            Monomial::from_pairs(
                vars.iter()
                    .enumerate()
                    .map(|(slot, &v)| (v, ((k >> (BITS * slot)) & ((1 << BITS) - 1)) as u32)),
            )
        };
        let small = |side: &[(&Monomial, BigInt)]| side.iter().map(|(_, c)| c.to_i64()).collect::<Option<Vec<i64>>>();
        if let (Some(ca), Some(cb)) = (small(a), small(b)) {
            let mut acc: HashMap<u128, i128> = HashMap::with_capacity(pa.len().max(pb.len()) * 4);
            let mut overflow = false;
            'outer: for (ka, &x) in pa.iter().zip(&ca) {
                for (kb, &y) in pb.iter().zip(&cb) {
                    let slot = acc.entry(ka + kb).or_insert(0);
                    match slot.checked_add(x as i128 * y as i128) {
                        Some(v) => *slot = v,
                        None => {
                            overflow = true;
                            break 'outer;
                        }
                    }
                }
            }
            if !overflow {
                return Some(acc.into_iter().map(|(k, c)| (unpack(k), BigInt::from(c))).collect());
            }
        }
        let mut acc: HashMap<u128, BigInt> = HashMap::new();
        for (ka, (_, x)) in pa.iter().zip(a) {
            for (kb, (_, y)) in pb.iter().zip(b) {
                *acc.entry(ka + kb).or_default() += x * y;
            }
        }
        Some(acc.into_iter().map(|(k, c)| (unpack(k), c)).collect())
    }
}

impl core::ops::AddAssign<&SparsePoly> for SparsePoly {
    fn add_assign(&mut self, rhs: &SparsePoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SparsePoly {
    /// `(d, P)` with `self = P/d`, `P` integral and `d` the lcm of the
    /// denominators.
    fn integer_form(&self) -> (BigInt, Vec<(&Monomial, BigInt)>) {
        let den = self.terms.values().fold(BigInt::one(), |d, c| d.lcm(c.denom()));
        let terms = self.terms.iter().map(|(m, c)| (m, c.numer() * (&den / c.denom()))).collect();
        (den, terms)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for SparsePoly {
            type Output = SparsePoly;
            fn $f(self, rhs: SparsePoly) -> SparsePoly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $f(self, rhs: &SparsePoly) -> SparsePoly {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ratio};

    fn x() -> SparsePoly {
        SparsePoly::var(Var::Input(1))
    }
    fn u() -> SparsePoly {
        SparsePoly::var(Var::Param(2))
    }
    fn t() -> SparsePoly {
        SparsePoly::var(Var::Param(1))
    }

    #[test]
    fn additive_inverse() {
        assert!((&x() + &(-&x())).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        let one = SparsePoly::one();
        let p = &(&x() + &one) * &(&x() - &one);
        assert_eq!(p, &x().pow(2) - &one);
    }

    #[test]
    fn square_of_affine_factor() {
        // Term-by-term expansion: 1 + 2(U−1)X + (U−1)²X².
        let one = SparsePoly::one();
        let f = &one + &(&(&u() - &one) * &x());
        let sq = &f * &f;
        let um1 = &u() - &one;
        let expected = &(&one + &(&um1 * &x()).scale(&rat(2))) + &(&um1.pow(2) * &x().pow(2));
        assert_eq!(sq, expected);
        assert_eq!(sq.num_terms(), 6);
    }

    #[test]
    fn eval_examples() {
        let p = &x().pow(2) - &SparsePoly::one();
        let a: BTreeMap<Var, Rational> = [(Var::Input(1), rat(3))].into_iter().collect();
        assert_eq!(p.eval(&a), SparsePoly::int(8));

        // H⁽¹⁾ = X₁ + T(1+(U₁−1)X₁) at T = U₁ = 1.
        let one = SparsePoly::one();
        let h = &x() + &(&t() * &(&one + &(&(&u() - &one) * &x())));
        let a: BTreeMap<Var, Rational> = [(Var::Param(1), rat(1)), (Var::Param(2), rat(1))].into_iter().collect();
        assert_eq!(h.eval(&a), &x() + &one);

        let y = SparsePoly::var(Var::Y);
        let a: BTreeMap<Var, Rational> = [(Var::Input(1), rat(0))].into_iter().collect();
        assert_eq!((&x() + &y).eval(&a), y);
    }

    #[test]
    fn coeff_vector_examples() {
        let y = SparsePoly::var(Var::Y);
        let one = SparsePoly::one();
        let b1 = -&(&(&one + &t()) + &(&t() * &u()));
        let b2 = &t() + &(&t().pow(2) * &u());
        let f = &(&y.pow(2) + &(&b1 * &y)) + &b2;
        assert_eq!(f.coeff_vector(Var::Y), alloc::vec![one.clone(), b1, b2]);
        assert_eq!(SparsePoly::int(7).coeff_vector(Var::Y), alloc::vec![SparsePoly::int(7)]);
        let z = SparsePoly::zero();
        assert_eq!(y.pow(3).coeff_vector(Var::Y), alloc::vec![one, z.clone(), z.clone(), z]);
    }

    #[test]
    fn diff_examples() {
        let p = &t().pow(2) * &u();
        assert_eq!(p.diff(Var::Param(1)), (&t() * &u()).scale(&rat(2)));
        assert!(x().diff(Var::Param(1)).is_zero());
        let q = &t() + &(&t().pow(2) * &u());
        let at0: BTreeMap<Var, Rational> = [(Var::Param(1), rat(0))].into_iter().collect();
        assert_eq!(q.diff(Var::Param(1)).eval(&at0), SparsePoly::one());
    }

    #[test]
    fn exact_division_and_gcd() {
        let one = SparsePoly::one();
        let a = &(&x() + &one) * &(&u() - &x());
        assert_eq!(a.div_exact(&(&x() + &one)), Some(&u() - &x()));
        assert_eq!(a.div_exact(&(&x() + &u())), None);

        let p = &x().pow(2) - &one;
        let q = &x() - &one;
        assert_eq!(SparsePoly::gcd_univariate(&p, &q, Var::Input(1)), q);
        let r = &x() + &SparsePoly::constant(ratio(1, 2));
        assert!(SparsePoly::gcd_univariate(&p, &r, Var::Input(1)).is_one());
    }

    #[test]
    fn substitute_composes() {
        let one = SparsePoly::one();
        let p = &x().pow(2) + &x();
        let q = &u() - &one;
        assert_eq!(p.substitute(Var::Input(1), &q), &q.pow(2) + &q);
    }
}
