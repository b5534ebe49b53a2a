//! Symbolic and numeric meaning of circuits.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::algebra::{Monomial, RatFunc, Rational, SparsePoly, Var};
use crate::circuit::{Circuit, Node, NodeId, NodeLabel};
use crate::{Error, Result};

/// Cap on the number of stored terms (numerator plus denominator) of any
/// single node value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_terms: crate::DEFAULT_MAX_TERMS }
    }
}

impl Budget {
    pub fn new(max_terms: usize) -> Self {
        Budget { max_terms }
    }

    pub(crate) fn check_poly(&self, p: &SparsePoly) -> Result<()> {
        if p.num_terms() > self.max_terms {
            return Err(Error::BudgetExceeded(self.max_terms));
        }
        Ok(())
    }
}

/// Value of every node as a rational function in `U₁…U_r, X₁…X_n`.
#[derive(Debug, Clone)]
pub struct Interpretation {
    ids: Vec<NodeId>,
    values: Vec<RatFunc>,
    outputs: Vec<NodeId>,
}

impl Interpretation {
    pub fn value(&self, id: NodeId) -> Option<&RatFunc> {
        self.ids.binary_search(&id).ok().map(|i| &self.values[i])
    }

    pub fn values(&self) -> impl Iterator<Item = (NodeId, &RatFunc)> {
        self.ids.iter().copied().zip(self.values.iter())
    }

    pub fn finals(&self) -> Vec<&RatFunc> {
        self.outputs.iter().map(|&o| self.value(o).expect("validated output")).collect()
    }

    /// Final results as polynomials, if none has a nontrivial denominator.
    pub fn final_polys(&self) -> Option<Vec<SparsePoly>> {
        self.finals().into_iter().map(|f| f.as_poly().cloned()).collect()
    }
}

pub fn leaf_var(label: &NodeLabel) -> Option<Var> {
    match *label {
        NodeLabel::Param(k) => Some(Var::Param(k)),
        NodeLabel::Input(i) => Some(Var::Input(i)),
        _ => None,
    }
}

/// Canonical node-by-node evaluation. Fails at the first division by the
/// zero function.
pub fn interpret(c: &Circuit, budget: Budget) -> Result<Interpretation> {
    let mut values: Vec<RatFunc> = Vec::with_capacity(c.nodes().len());
    let get = |values: &Vec<RatFunc>, id: NodeId| -> RatFunc {
        values[c.position(id).expect("validated argument")].clone()
    };
    for node in c.nodes() {
        let v = match &node.label {
            NodeLabel::Scalar(r) => RatFunc::constant(r.clone()),
            NodeLabel::Param(k) => RatFunc::from_poly(SparsePoly::var(Var::Param(*k))),
            NodeLabel::Input(i) => RatFunc::from_poly(SparsePoly::var(Var::Input(*i))),
            NodeLabel::Add(a, b) => get(&values, *a).add(&get(&values, *b)),
            NodeLabel::Sub(a, b) => get(&values, *a).sub(&get(&values, *b)),
            NodeLabel::Mul(a, b) => {
                let (x, y) = (get(&values, *a), get(&values, *b));
                if x.num_terms().saturating_mul(y.num_terms()) > budget.max_terms.saturating_mul(64) {
                    return Err(Error::BudgetExceeded(budget.max_terms));
                }
                x.mul(&y)
            }
            NodeLabel::Div(a, b) => get(&values, *a)
                .div(&get(&values, *b))
                .ok_or(Error::InconsistentCircuit(node.id))?,
        };
        if v.num_terms() > budget.max_terms {
            return Err(Error::BudgetExceeded(budget.max_terms));
        }
        values.push(v);
    }
    Ok(Interpretation {
        ids: c.nodes().iter().map(|n| n.id).collect(),
        values,
        outputs: c.outputs().to_vec(),
    })
}

/// Replaces the assigned parameter leaves by scalar leaves. Indices and `r`
/// are kept; the result may be inconsistent.
pub fn restrict(c: &Circuit, assignment: &BTreeMap<u32, Rational>) -> Circuit {
    let nodes = c
        .nodes()
        .iter()
        .map(|n| match n.label {
            NodeLabel::Param(k) if assignment.contains_key(&k) => {
                Node { id: n.id, label: NodeLabel::Scalar(assignment[&k].clone()) }
            }
            _ => n.clone(),
        })
        .collect();
    Circuit::new(c.name(), c.params(), c.inputs(), nodes, c.outputs().to_vec())
        .expect("restriction preserves validity")
}

/// Exact values of the outputs at a point.
pub fn eval_numeric(c: &Circuit, params: &[Rational], inputs: &[Rational]) -> Result<Vec<Rational>> {
    let vals = eval_nodes(c, params, inputs)?;
    Ok(c.outputs().iter().map(|&o| vals[c.position(o).unwrap()].clone()).collect())
}

/// Exact values of all nodes at a point, in node order.
pub fn eval_nodes(c: &Circuit, params: &[Rational], inputs: &[Rational]) -> Result<Vec<Rational>> {
    if params.len() != c.params() as usize || inputs.len() != c.inputs() as usize {
        return Err(Error::ArityMismatch(alloc::format!(
            "expected {} parameters and {} inputs, got {} and {}",
            c.params(),
            c.inputs(),
            params.len(),
            inputs.len()
        )));
    }
    let mut vals: Vec<Rational> = Vec::with_capacity(c.nodes().len());
    for node in c.nodes() {
        let arg = |id: NodeId| &vals[c.position(id).unwrap()];
        let v = match &node.label {
            NodeLabel::Scalar(r) => r.clone(),
            NodeLabel::Param(k) => params[*k as usize - 1].clone(),
            NodeLabel::Input(i) => inputs[*i as usize - 1].clone(),
            NodeLabel::Add(a, b) => arg(*a) + arg(*b),
            NodeLabel::Sub(a, b) => arg(*a) - arg(*b),
            NodeLabel::Mul(a, b) => arg(*a) * arg(*b),
            NodeLabel::Div(a, b) => {
                if arg(*b).is_zero() {
                    return Err(Error::DivisionByZero(node.id));
                }
                arg(*a) / arg(*b)
            }
        };
        vals.push(v);
    }
    Ok(vals)
}

/// Each final result written as a polynomial in the inputs with rational
/// functions of the parameters as coefficients.
#[derive(Debug, Clone)]
pub struct CoefficientMap {
    /// Per output, `(input monomial, coefficient)` in ascending monomial
    /// order; the flattened coefficient list is θ.
    pub finals: Vec<Vec<(Monomial, RatFunc)>>,
}

impl CoefficientMap {
    pub fn theta(&self) -> Vec<&RatFunc> {
        self.finals.iter().flat_map(|f| f.iter().map(|(_, c)| c)).collect()
    }

    /// Rebuilds output `i` as a rational function.
    pub fn recombine(&self, i: usize) -> RatFunc {
        self.finals[i].iter().fold(RatFunc::default(), |acc, (m, c)| {
            acc.add(&c.mul(&RatFunc::from_poly(SparsePoly::term(m.clone(), Rational::from_integer(1.into())))))
        })
    }
}

pub fn coefficient_map(c: &Circuit, budget: Budget) -> Result<CoefficientMap> {
    let interp = interpret(c, budget)?;
    let mut finals = Vec::with_capacity(c.outputs().len());
    for (&o, f) in c.outputs().iter().zip(interp.finals()) {
        if f.den().vars().iter().any(|v| v.is_input()) {
            return Err(Error::NotPolynomialInInputs(o));
        }
        let den = RatFunc::from_poly(f.den().clone());
        let coeffs = f
            .num()
            .coefficients_in(Var::is_input)
            .into_iter()
            .map(|(m, p)| {
                let v = RatFunc::from_poly(p).div(&den).expect("nonzero denominator");
                (m, v)
            })
            .collect();
        finals.push(coeffs);
    }
    Ok(CoefficientMap { finals })
}

/// Syntactic degree bound of each output of a division-free circuit, `None`
/// if the circuit divides.
pub fn degree_bounds(c: &Circuit) -> Option<Vec<u64>> {
    let mut deg: Vec<u64> = Vec::with_capacity(c.nodes().len());
    for node in c.nodes() {
        let d = |id: NodeId| deg[c.position(id).unwrap()];
        let v = match node.label {
            NodeLabel::Scalar(_) => 0,
            NodeLabel::Param(_) | NodeLabel::Input(_) => 1,
            NodeLabel::Add(a, b) | NodeLabel::Sub(a, b) => d(a).max(d(b)),
            NodeLabel::Mul(a, b) => d(a).saturating_add(d(b)),
            NodeLabel::Div(..) => return None,
        };
        deg.push(v);
    }
    Some(c.outputs().iter().map(|&o| deg[c.position(o).unwrap()]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, VarNames};
    use crate::circuit::CircuitBuilder;

    fn poly(s: &str) -> SparsePoly {
        SparsePoly::parse(s, &VarNames::new()).unwrap()
    }

    #[test]
    fn inconsistent_division() {
        let mut b = CircuitBuilder::new("c", 0, 1);
        let x = b.input(1);
        let z = b.sub(x, x);
        let d = b.div(x, z);
        let c = b.finish(alloc::vec![d]).unwrap();
        assert_eq!(interpret(&c, Budget::default()).unwrap_err(), Error::InconsistentCircuit(d));
    }

    #[test]
    fn quotient_normalizes_to_polynomial() {
        let mut b = CircuitBuilder::new("c", 0, 1);
        let x = b.input(1);
        let one = b.int(1);
        let x2 = b.mul(x, x);
        let n = b.sub(x2, one);
        let d = b.sub(x, one);
        let q = b.div(n, d);
        let c = b.finish(alloc::vec![q]).unwrap();
        let i = interpret(&c, Budget::default()).unwrap();
        assert_eq!(i.final_polys().unwrap(), alloc::vec![poly("X1 + 1")]);
    }

    #[test]
    fn numeric_division_by_zero() {
        let mut b = CircuitBuilder::new("c", 0, 1);
        let x = b.input(1);
        let d = b.div(x, x);
        let c = b.finish(alloc::vec![d]).unwrap();
        assert_eq!(eval_numeric(&c, &[], &[rat(0)]).unwrap_err(), Error::DivisionByZero(d));
        assert_eq!(eval_numeric(&c, &[], &[rat(5)]).unwrap(), alloc::vec![rat(1)]);
    }

    #[test]
    fn restriction_can_be_inconsistent() {
        let mut b = CircuitBuilder::new("c", 2, 0);
        let p1 = b.param(1);
        let p2 = b.param(2);
        let d = b.div(p1, p2);
        let c = b.finish(alloc::vec![d]).unwrap();
        assert!(interpret(&c, Budget::default()).is_ok());
        let r = restrict(&c, &[(2, rat(0))].into_iter().collect());
        assert_eq!(r.params(), 2);
        assert_eq!(interpret(&r, Budget::default()).unwrap_err(), Error::InconsistentCircuit(d));
        assert_eq!(restrict(&c, &BTreeMap::new()), c);
    }

    #[test]
    fn coefficient_maps() {
        let mut b = CircuitBuilder::new("c", 1, 1);
        let x = b.input(1);
        let u = b.param(1);
        let d = b.div(x, u);
        let c = b.finish(alloc::vec![d]).unwrap();
        let m = coefficient_map(&c, Budget::default()).unwrap();
        assert_eq!(m.finals[0].len(), 1);
        assert_eq!(m.finals[0][0].0, Monomial::var(Var::Input(1)));
        assert!(m.finals[0][0].1.equals(&RatFunc::new(SparsePoly::one(), poly("U1")).unwrap()));
        assert!(m.recombine(0).equals(interpret(&c, Budget::default()).unwrap().finals()[0]));

        let mut b = CircuitBuilder::new("five", 0, 0);
        let five = b.int(5);
        let m = coefficient_map(&b.finish(alloc::vec![five]).unwrap(), Budget::default()).unwrap();
        assert_eq!(m.finals[0], alloc::vec![(Monomial::one(), RatFunc::constant(rat(5)))]);

        let mut b = CircuitBuilder::new("bad", 1, 1);
        let x = b.input(1);
        let u = b.param(1);
        let d = b.div(u, x);
        let c = b.finish(alloc::vec![d]).unwrap();
        assert_eq!(coefficient_map(&c, Budget::default()).unwrap_err(), Error::NotPolynomialInInputs(d));
    }

    #[test]
    fn budget_is_enforced() {
        let mut b = CircuitBuilder::new("c", 0, 3);
        let x1 = b.input(1);
        let x2 = b.input(2);
        let x3 = b.input(3);
        let s = b.add(x1, x2);
        let s = b.add(s, x3);
        let mut acc = s;
        for _ in 0..4 {
            acc = b.mul(acc, s);
        }
        let c = b.finish(alloc::vec![acc]).unwrap();
        assert_eq!(interpret(&c, Budget::new(10)).unwrap_err(), Error::BudgetExceeded(10));
        assert!(interpret(&c, Budget::default()).is_ok());
    }
}
