//! Flat families of zero-dimensional elimination problems, two independent
//! elimination oracles and the rank witnesses behind the lower bounds.
//!
//! An [`ElimProblem`] consists of triangular monic quadratic equations
//! `G₁…G_n` in the inputs and a distinguished polynomial `H`. Its
//! elimination polynomial `F ∈ ℚ[params][Y]` is monic in `Y` and vanishes
//! exactly at the values of `H` on the solutions of `G = 0`.

mod family;
mod oracle;
mod witness;

pub use family::{boolhard_formula, family, family_with_rng, Family, FamilyKind, PointsData};
pub use oracle::{eliminate_enum, eliminate_enum_truncated, eliminate_multmatrix, multiplication_matrix};
pub use witness::{witness_delta_rank, witness_l_independence, Witness};

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::algebra::{rat, SparsePoly, Var, VarNames};
use crate::circuit::Circuit;
use crate::semantics::{coefficient_map, Budget};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimProblem {
    pub equations: Vec<SparsePoly>,
    pub h: SparsePoly,
    pub params: Vec<Var>,
    /// `X₁…X_n`, in the order the equations are triangular in.
    pub inputs: Vec<Var>,
    /// The parameter `T` whose first-order part the witnesses read.
    pub deformation: Option<Var>,
    pub names: VarNames,
}

impl ElimProblem {
    /// Checks that `G_i` is monic of degree 2 in `X_i` and involves only
    /// parameters and `X₁…X_i`, and that `H` lives in the declared
    /// variables.
    pub fn new(equations: Vec<SparsePoly>, h: SparsePoly, params: Vec<Var>, inputs: Vec<Var>) -> Result<Self> {
        if equations.len() != inputs.len() {
            return Err(Error::ArityMismatch(format!(
                "{} equations for {} inputs",
                equations.len(),
                inputs.len()
            )));
        }
        for (i, g) in equations.iter().enumerate() {
            let x = inputs[i];
            let allowed = |v: &Var| params.contains(v) || inputs[..=i].contains(v);
            if let Some(v) = g.vars().into_iter().find(|v| !allowed(v)) {
                return Err(Error::Validation(format!("equation {} is not triangular in {v:?}", i + 1)));
            }
            if g.degree_in(x) != 2 || g.coeff_of_power(x, 2) != SparsePoly::one() {
                return Err(Error::Validation(format!("equation {} is not monic quadratic in its input", i + 1)));
            }
        }
        if let Some(v) = h.vars().into_iter().find(|v| !params.contains(v) && !inputs.contains(v)) {
            return Err(Error::Validation(format!("H involves undeclared variable {v:?}")));
        }
        Ok(ElimProblem { equations, h, params, inputs, deformation: None, names: VarNames::default() })
    }

    pub fn with_deformation(mut self, t: Var) -> Self {
        self.deformation = Some(t);
        self
    }

    pub fn with_names(mut self, names: VarNames) -> Self {
        self.names = names;
        self
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    /// True when every equation is exactly `X_i² − X_i`.
    pub fn is_boolean(&self) -> bool {
        self.equations.iter().zip(&self.inputs).all(|(g, &x)| *g == boolean_equation(x))
    }

    /// Whether circuit `c` computes `G₁…G_n, H` (in this order), compared
    /// through its coefficient map.
    pub fn matches(&self, c: &Circuit, budget: Budget) -> Result<bool> {
        let cm = coefficient_map(c, budget)?;
        if cm.finals.len() != self.equations.len() + 1 {
            return Ok(false);
        }
        let expected = self.equations.iter().chain(core::iter::once(&self.h));
        Ok(expected.enumerate().all(|(i, p)| cm.recombine(i).as_poly() == Some(p)))
    }
}

pub(crate) fn boolean_equation(x: Var) -> SparsePoly {
    let x = SparsePoly::var(x);
    &(&x * &x) - &x
}

/// Output of an elimination oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElimResult {
    /// Monic in `Y`; only known modulo `T^(k+1)` when `truncation` is
    /// `Some(k)`.
    pub f: SparsePoly,
    pub q: u32,
    /// Coefficients `φ₁…φ_N` of `F^q = Y^N + φ₁Y^(N−1) + … + φ_N`.
    pub phi: Vec<SparsePoly>,
    /// `Δ_κ = ∂φ_κ/∂T` at `T = 0`.
    pub delta: Vec<SparsePoly>,
    /// `L_l`: the coefficient of `T¹` in the `l`-th coefficient of `F`.
    pub lvec: Vec<SparsePoly>,
    pub deformation: Option<Var>,
    pub truncation: Option<u32>,
}

impl ElimResult {
    pub(crate) fn from_f(f: SparsePoly, deformation: Option<Var>, truncation: Option<u32>) -> Self {
        let mut r = ElimResult {
            f,
            q: 1,
            phi: Vec::new(),
            delta: Vec::new(),
            lvec: Vec::new(),
            deformation,
            truncation,
        };
        r.fill(1);
        r
    }

    /// The same elimination polynomial read through `F^q`.
    pub fn power(&self, q: u32) -> ElimResult {
        assert!(q >= 1, "q must be positive");
        let mut r = self.clone();
        r.fill(q);
        r
    }

    fn fill(&mut self, q: u32) {
        self.q = q;
        let mut fq = SparsePoly::one();
        for _ in 0..q {
            fq = self.truncate(&fq * &self.f);
        }
        self.phi = fq.coeff_vector(Var::Y).split_off(1);
        match self.deformation {
            Some(t) => {
                let at_zero: BTreeMap<Var, _> = [(t, rat(0))].into_iter().collect();
                self.delta = self.phi.iter().map(|c| c.diff(t).eval(&at_zero)).collect();
                self.lvec = self.f.coeff_vector(Var::Y).iter().skip(1).map(|b| b.coeff_of_power(t, 1)).collect();
            }
            None => {
                self.delta.clear();
                self.lvec.clear();
            }
        }
    }

    fn truncate(&self, p: SparsePoly) -> SparsePoly {
        match (self.truncation, self.deformation) {
            (Some(k), Some(t)) => truncate_in(&p, t, k),
            _ => p,
        }
    }

    /// `deg_Y F`.
    pub fn degree(&self) -> u32 {
        self.f.degree_in(Var::Y)
    }
}

pub(crate) fn truncate_in(p: &SparsePoly, t: Var, order: u32) -> SparsePoly {
    SparsePoly::from_terms(p.terms().filter(|(m, _)| m.exponent(t) <= order).map(|(m, c)| (m.clone(), c.clone())))
}
