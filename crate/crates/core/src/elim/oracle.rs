//! The enumeration oracle (product over the Boolean solutions) and the
//! multiplication-matrix oracle (characteristic polynomial of `H` acting on
//! the quotient algebra).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{charpoly, rat, Monomial, SparsePoly, Var};
use crate::semantics::Budget;
use crate::{Error, Result};

use super::{truncate_in, ElimProblem, ElimResult};

/// Largest `n` accepted by [`eliminate_multmatrix`].
pub const MULTMATRIX_MAX_INPUTS: usize = 3;

/// `F = Π_{ε ∈ {0,1}ⁿ} (Y − H(ε))`, accumulated in binary order of `ε`.
pub fn eliminate_enum(p: &ElimProblem, budget: Budget) -> Result<ElimResult> {
    enumerate(p, None, budget)
}

/// As [`eliminate_enum`], keeping only terms of degree at most `order` in
/// the deformation parameter. Enough for the witnesses when `order ≥ 1`.
pub fn eliminate_enum_truncated(p: &ElimProblem, order: u32, budget: Budget) -> Result<ElimResult> {
    if p.deformation.is_none() {
        return Err(Error::UnsupportedFamily("truncation needs a deformation parameter".into()));
    }
    enumerate(p, Some(order), budget)
}

fn enumerate(p: &ElimProblem, order: Option<u32>, budget: Budget) -> Result<ElimResult> {
    if !p.is_boolean() {
        return Err(Error::UnsupportedFamily("enumeration needs every equation to be X_i^2 - X_i".into()));
    }
    let n = p.n();
    if n >= usize::BITS as usize - 1 {
        return Err(Error::BudgetExceeded(budget.max_terms));
    }
    let y = SparsePoly::var(Var::Y);
    let mut f = SparsePoly::one();
    for j in 0u64..1 << n {
        let point: BTreeMap<Var, _> = p.inputs.iter().enumerate().map(|(i, &x)| (x, rat(((j >> i) & 1) as i64))).collect();
        let root = p.h.eval(&point);
        f = &f * &(&y - &root);
        if let (Some(k), Some(t)) = (order, p.deformation) {
            f = truncate_in(&f, t, k);
        }
        budget.check_poly(&f)?;
    }
    Ok(ElimResult::from_f(f, p.deformation, order))
}

/// Rewrites with `X_i² → X_i² − G_i` until every input exponent is at most
/// one.
fn reduce_quotient(p: &SparsePoly, inputs: &[Var], tails: &[SparsePoly], budget: Budget) -> Result<SparsePoly> {
    let mut work = p.clone();
    // Tails of G_i only involve X₁…X_i, so working downwards terminates.
    for (i, &x) in inputs.iter().enumerate().rev() {
        loop {
            let (high, low): (Vec<_>, Vec<_>) = work.terms().partition(|(m, _)| m.exponent(x) >= 2);
            if high.is_empty() {
                break;
            }
            let mut next = SparsePoly::from_terms(low.into_iter().map(|(m, c)| (m.clone(), c.clone())));
            for (m, c) in high {
                let rest = m.div(&Monomial::pow(x, 2)).expect("exponent at least two");
                next = &next + &tails[i].mul_monomial(&rest).scale(c);
            }
            budget.check_poly(&next)?;
            work = next;
        }
    }
    Ok(work)
}

fn basis_monomial(inputs: &[Var], j: usize) -> Monomial {
    Monomial::from_pairs(inputs.iter().enumerate().filter(|(i, _)| (j >> i) & 1 == 1).map(|(_, &x)| (x, 1)))
}

/// Matrix of multiplication by `H` on the basis `X^ε` (index `j` has
/// `ε_i` = bit `i−1` of `j`): entry `[β][α]` is the coefficient of `X^β` in
/// the normal form of `H·X^α`.
pub fn multiplication_matrix(p: &ElimProblem, budget: Budget) -> Result<Vec<Vec<SparsePoly>>> {
    let n = p.n();
    if n > MULTMATRIX_MAX_INPUTS {
        return Err(Error::BudgetExceeded(1 << MULTMATRIX_MAX_INPUTS));
    }
    let tails: Vec<SparsePoly> = p
        .equations
        .iter()
        .zip(&p.inputs)
        .map(|(g, &x)| &SparsePoly::term(Monomial::pow(x, 2), rat(1)) - g)
        .collect();
    if let Some(i) = tails.iter().zip(&p.inputs).position(|(t, &x)| t.degree_in(x) >= 2) {
        return Err(Error::UnsupportedFamily(format!("equation {} is not monic quadratic", i + 1)));
    }
    let dim = 1usize << n;
    let basis: Vec<Monomial> = (0..dim).map(|j| basis_monomial(&p.inputs, j)).collect();
    let index: BTreeMap<&Monomial, usize> = basis.iter().enumerate().map(|(j, m)| (m, j)).collect();
    let mut m = alloc::vec![alloc::vec![SparsePoly::zero(); dim]; dim];
    for (alpha, x_alpha) in basis.iter().enumerate() {
        let image = reduce_quotient(&p.h.mul_monomial(x_alpha), &p.inputs, &tails, budget)?;
        for (mono, coeff) in image.coefficients_in(|v| p.inputs.contains(&v)) {
            let beta = index[&mono];
            m[beta][alpha] = coeff;
        }
    }
    Ok(m)
}

/// `F = det(Y·I − M_H)` on the `2ⁿ`-dimensional quotient algebra.
pub fn eliminate_multmatrix(p: &ElimProblem, budget: Budget) -> Result<ElimResult> {
    if p.inputs.iter().any(|v| p.params.contains(v)) || p.params.contains(&Var::Y) {
        return Err(Error::UnsupportedFamily("inputs and parameters overlap".into()));
    }
    let m = multiplication_matrix(p, budget)?;
    let f = charpoly(&m, Var::Y);
    budget.check_poly(&f)?;
    Ok(ElimResult::from_f(f, p.deformation, None))
}
