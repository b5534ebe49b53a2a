use num_traits::{One, Zero};

use super::{Rational, SparsePoly, Var};

/// Quotient of two polynomials with a nonzero denominator.
///
/// After normalization the denominator's graded-lex leading coefficient is 1,
/// common monomial factors are cancelled, exact polynomial quotients are
/// detected, and univariate pairs are reduced by their gcd. No general
/// multivariate gcd is taken, so two equal functions need not be structurally
/// equal; compare with [`RatFunc::equals`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: SparsePoly,
    den: SparsePoly,
}

impl RatFunc {
    pub fn from_poly(p: SparsePoly) -> Self {
        Self { num: p, den: SparsePoly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(SparsePoly::constant(c))
    }

    /// `None` if `den` is the zero polynomial.
    pub fn new(num: SparsePoly, den: SparsePoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalized(num, den))
    }

    fn normalized(num: SparsePoly, den: SparsePoly) -> Self {
        if num.is_zero() {
            return Self::from_poly(num);
        }
        if let Some(c) = den.as_constant() {
            return Self::from_poly(num.scale(&c.recip()));
        }
        if let Some(q) = num.div_exact(&den) {
            return Self::from_poly(q);
        }
        let mut num = num;
        let mut den = den;
        let g = num.monomial_content().gcd(&den.monomial_content());
        if !g.is_one() {
            num = num.div_monomial(&g).expect("monomial content divides");
            den = den.div_monomial(&g).expect("monomial content divides");
        }
        let vars = num.vars();
        let dvars = den.vars();
        if vars.len() <= 1 && dvars.len() == 1 {
            let v: Var = *dvars.iter().next().unwrap();
            if num.is_univariate_in(v) {
                let g = SparsePoly::gcd_univariate(&num, &den, v);
                if !g.is_constant() {
                    num = num.div_exact(&g).expect("gcd divides");
                    den = den.div_exact(&g).expect("gcd divides");
                }
            }
        }
        if let Some(c) = den.as_constant() {
            return Self::from_poly(num.scale(&c.recip()));
        }
        let lc = den.leading_coeff();
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Self { num, den }
    }

    pub fn num(&self) -> &SparsePoly {
        &self.num
    }

    pub fn den(&self) -> &SparsePoly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&SparsePoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_polynomial() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn num_terms(&self) -> usize {
        self.num.num_terms() + self.den.num_terms()
    }

    /// Equality of functions by cross-multiplication.
    pub fn equals(&self, other: &RatFunc) -> bool {
        if self.is_polynomial() && other.is_polynomial() {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn add(&self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return Self::normalized(&self.num + &rhs.num, self.den.clone());
        }
        Self::normalized(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }

    pub fn sub(&self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return Self::normalized(&self.num - &rhs.num, self.den.clone());
        }
        Self::normalized(&(&self.num * &rhs.den) - &(&rhs.num * &self.den), &self.den * &rhs.den)
    }

    pub fn mul(&self, rhs: &RatFunc) -> RatFunc {
        if self.is_polynomial() && rhs.is_polynomial() {
            return Self::from_poly(&self.num * &rhs.num);
        }
        Self::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }

    /// `None` when `rhs` is the zero function.
    pub fn div(&self, rhs: &RatFunc) -> Option<RatFunc> {
        if rhs.is_zero() {
            return None;
        }
        Some(Self::normalized(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn eval(&self, assignment: &alloc::collections::BTreeMap<Var, Rational>) -> Option<RatFunc> {
        RatFunc::new(self.num.eval(assignment), self.den.eval(assignment))
    }

    /// Value at a full assignment; `None` if the denominator vanishes there.
    pub fn evaluate(&self, value: impl Fn(Var) -> Rational) -> Option<Rational> {
        let d = self.den.evaluate(&value);
        if d.is_zero() {
            return None;
        }
        Some(self.num.evaluate(&value) / d)
    }
}

impl From<SparsePoly> for RatFunc {
    fn from(p: SparsePoly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::constant(Rational::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn univariate_gcd_cancels() {
        let x = SparsePoly::var(Var::Input(1));
        let one = SparsePoly::one();
        let f = RatFunc::new(&x.pow(2) - &one, &x - &one).unwrap();
        assert!(f.is_polynomial());
        assert_eq!(f.num(), &(&x + &one));
    }

    #[test]
    fn multivariate_normalization() {
        let x = SparsePoly::var(Var::Input(1));
        let u = SparsePoly::var(Var::Param(1));
        let f = RatFunc::new(&x * &u, (&x * &u).scale(&rat(2)) + x.clone()).unwrap();
        // X cancels as monomial content; den leading coefficient becomes 1.
        assert!(!f.num().vars().contains(&Var::Input(1)));
        assert_eq!(f.den().leading_coeff(), rat(1));
        let g = RatFunc::new(u.clone(), &u.scale(&rat(2)) + &SparsePoly::one()).unwrap();
        assert!(f.equals(&g));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(RatFunc::new(SparsePoly::one(), SparsePoly::zero()).is_none());
        let f = RatFunc::from_poly(SparsePoly::one());
        assert!(f.div(&RatFunc::default()).is_none());
    }
}
