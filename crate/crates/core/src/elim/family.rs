//! The elimination families and their encoding circuits.
//!
//! Variable layout shared by all families: `T = Param(1)`,
//! `U_i = Param(1+i)`, `S_i = Param(1+n+i)`, `X_i = Input(i)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{rat, RatMatrix, Rational, SparsePoly, Var, VarNames};
use crate::arithmetize::{BoolCircuit, BoolNode, BoolOp};
use crate::circuit::{Circuit, CircuitBuilder, NodeId};
use crate::identity::{multilinear_row, sample_xi_points, XiPoints};
use crate::{Error, Result};

use super::{boolean_equation, ElimProblem};

/// Largest supported family size.
pub const MAX_FAMILY_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Basic,
    Hat,
    BoolHard,
    Points,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Basic => "basic",
            FamilyKind::Hat => "hat",
            FamilyKind::BoolHard => "boolhard",
            FamilyKind::Points => "points",
        }
    }

    fn param_count(self, n: u32) -> u32 {
        match self {
            FamilyKind::Basic | FamilyKind::Points => n + 1,
            FamilyKind::Hat | FamilyKind::BoolHard => 2 * n + 1,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(FamilyKind::Basic),
            "hat" => Ok(FamilyKind::Hat),
            "boolhard" => Ok(FamilyKind::BoolHard),
            "points" => Ok(FamilyKind::Points),
            other => Err(Error::UnsupportedFamily(format!("unknown family {other:?}"))),
        }
    }
}

/// Encoding circuit `β` (outputs `G₁…G_n`, then `H`) and the problem it
/// encodes.
#[derive(Debug, Clone)]
pub struct Family {
    pub kind: FamilyKind,
    pub n: usize,
    pub circuit: Circuit,
    pub problem: ElimProblem,
    pub points: Option<PointsData>,
}

/// Extra data of the `points` family.
#[derive(Debug, Clone)]
pub struct PointsData {
    pub xi: XiPoints,
    /// Parameters `T, U`; one input `Y`. Outputs `H(T,U,ξ₁)…H(T,U,ξ_K)` and
    /// `Y`.
    pub evaluation: Circuit,
    /// Inputs `S₁…S_K, Y`; output `Π_ε (Y − φ_ε(S))` where `φ_ε` recovers
    /// the value at `ε` from the point values by linear interpolation.
    pub decoder: Circuit,
    /// The existential formula describing the graph of the decoder.
    pub formula: String,
}

fn t() -> Var {
    Var::Param(1)
}

fn u(i: usize) -> Var {
    Var::Param(1 + i as u32)
}

fn s(n: usize, i: usize) -> Var {
    Var::Param(1 + (n + i) as u32)
}

fn x(i: usize) -> Var {
    Var::Input(i as u32)
}

pub fn family_names(kind: FamilyKind, n: usize) -> VarNames {
    let mut names = VarNames::new().with(t(), "T");
    for i in 1..=n {
        names.insert(u(i), format!("U{i}"));
        if matches!(kind, FamilyKind::Hat | FamilyKind::BoolHard) {
            names.insert(s(n, i), format!("S{i}"));
        }
    }
    names
}

/// `Σ 2^{i−1} X_i + T·Π (1 + (U_i − 1) X_i)`.
pub fn basic_h(n: usize) -> SparsePoly {
    let mut lin = SparsePoly::zero();
    for i in 1..=n {
        lin = &lin + &SparsePoly::var(x(i)).scale(&rat(1i64 << (i - 1)));
    }
    &lin + &(&SparsePoly::var(t()) * &shifted_product(n, u))
}

/// `Π (1 + (V_i − 1) X_i)`.
fn shifted_product(n: usize, v: impl Fn(usize) -> Var) -> SparsePoly {
    let one = SparsePoly::one();
    (1..=n).fold(one.clone(), |acc, i| {
        let factor = &one + &(&(&SparsePoly::var(v(i)) - &one) * &SparsePoly::var(x(i)));
        &acc * &factor
    })
}

fn problem(kind: FamilyKind, n: usize) -> Result<ElimProblem> {
    let one = SparsePoly::one();
    let (equations, h): (Vec<SparsePoly>, SparsePoly) = match kind {
        FamilyKind::Basic | FamilyKind::Points => ((1..=n).map(|i| boolean_equation(x(i))).collect(), basic_h(n)),
        FamilyKind::Hat => (
            (1..=n).map(|i| &boolean_equation(x(i)) - &SparsePoly::var(s(n, i))).collect(),
            basic_h(n),
        ),
        FamilyKind::BoolHard => {
            let a = shifted_product(n, |i| s(n, i));
            let b = shifted_product(n, u);
            let h = &a + &(&(&one - &a) * &(&SparsePoly::var(t()) * &b));
            ((1..=n).map(|i| boolean_equation(x(i))).collect(), h)
        }
    };
    let params = (1..=kind.param_count(n as u32)).map(Var::Param).collect();
    let inputs = (1..=n).map(x).collect();
    Ok(ElimProblem::new(equations, h, params, inputs)?
        .with_deformation(t())
        .with_names(family_names(kind, n)))
}

/// Builds `Π (1 + (V_i − 1) X_i)` with one non-scalar product per factor
/// plus `n − 1` for the product.
fn build_shifted_product(b: &mut CircuitBuilder, n: usize, one: NodeId, v: impl Fn(usize) -> u32) -> NodeId {
    let factors: Vec<NodeId> = (1..=n)
        .map(|i| {
            let vi = b.param(v(i));
            let xi = b.input(i as u32);
            let d = b.sub(vi, one);
            let p = b.mul(d, xi);
            b.add(one, p)
        })
        .collect();
    b.product(&factors)
}

fn build_circuit(kind: FamilyKind, n: usize) -> Result<Circuit> {
    let nn = n as u32;
    let mut b = CircuitBuilder::new(format!("{}_{n}", kind.name()), kind.param_count(nn), nn);
    let one = b.int(1);
    let mut outputs = Vec::with_capacity(n + 1);
    for i in 1..=nn {
        let xi = b.input(i);
        let sq = b.mul(xi, xi);
        let mut g = b.sub(sq, xi);
        if kind == FamilyKind::Hat {
            let si = b.param(1 + nn + i);
            g = b.sub(g, si);
        }
        outputs.push(g);
    }
    let tt = b.param(1);
    let h = match kind {
        FamilyKind::Basic | FamilyKind::Hat | FamilyKind::Points => {
            let terms: Vec<NodeId> = (1..=nn)
                .map(|i| {
                    let c = b.int(1i64 << (i - 1));
                    let xi = b.input(i);
                    b.mul(c, xi)
                })
                .collect();
            let lin = b.sum(&terms);
            let prod = build_shifted_product(&mut b, n, one, |i| 1 + i as u32);
            let tp = b.mul(tt, prod);
            b.add(lin, tp)
        }
        FamilyKind::BoolHard => {
            let a = build_shifted_product(&mut b, n, one, |i| 1 + (n + i) as u32);
            let bb = build_shifted_product(&mut b, n, one, |i| 1 + i as u32);
            let tb = b.mul(tt, bb);
            let not_a = b.sub(one, a);
            let rest = b.mul(not_a, tb);
            b.add(a, rest)
        }
    };
    outputs.push(h);
    b.finish(outputs)
}

/// The family of size `n`; the `points` family draws its correctness set
/// from a fixed seed.
pub fn family(kind: FamilyKind, n: usize) -> Result<Family> {
    family_with_rng(kind, n, &mut ChaCha8Rng::seed_from_u64(0))
}

pub fn family_with_rng<R: Rng + ?Sized>(kind: FamilyKind, n: usize, rng: &mut R) -> Result<Family> {
    if n == 0 {
        return Err(Error::Validation("family size must be at least 1".into()));
    }
    if n > MAX_FAMILY_N {
        return Err(Error::BudgetExceeded(crate::DEFAULT_MAX_TERMS));
    }
    let circuit = build_circuit(kind, n)?;
    let problem = problem(kind, n)?;
    let points = match kind {
        FamilyKind::Points => Some(points_data(n, &problem, rng)?),
        _ => None,
    };
    Ok(Family { kind, n, circuit, problem, points })
}

fn points_data<R: Rng + ?Sized>(n: usize, problem: &ElimProblem, rng: &mut R) -> Result<PointsData> {
    let xi = sample_xi_points(n, rng);
    let evaluation = evaluation_circuit(n, &xi.set.points)?;
    let decoder = decoder_circuit(n, &xi.set.points)?;
    let formula = existential_formula(n, &xi.set.points, problem);
    Ok(PointsData { xi, evaluation, decoder, formula })
}

fn evaluation_circuit(n: usize, points: &[Vec<BigInt>]) -> Result<Circuit> {
    let nn = n as u32;
    let mut b = CircuitBuilder::new(format!("points_eval_{n}"), nn + 1, 1);
    let one = b.int(1);
    let tt = b.param(1);
    let mut outputs = Vec::with_capacity(points.len() + 1);
    for p in points {
        let lin: BigInt = p.iter().enumerate().map(|(i, c)| c << i).sum();
        let factors: Vec<NodeId> = (1..=nn)
            .map(|i| {
                let ui = b.param(1 + i);
                let d = b.sub(ui, one);
                let c = b.scalar(Rational::from_integer(p[i as usize - 1].clone()));
                let dc = b.mul(c, d);
                b.add(one, dc)
            })
            .collect();
        let prod = b.product(&factors);
        let tp = b.mul(tt, prod);
        let l = b.scalar(Rational::from_integer(lin));
        outputs.push(b.add(l, tp));
    }
    outputs.push(b.input(1));
    b.finish(outputs)
}

fn decoder_circuit(n: usize, points: &[Vec<BigInt>]) -> Result<Circuit> {
    let dim = 1usize << n;
    let k = points.len() as u32;
    let rows: Vec<Vec<Rational>> = points.iter().map(|p| multilinear_row(p, n)).collect();
    let full = RatMatrix::from_rows(rows);
    let chosen: Vec<usize> = full.independent_rows().into_iter().take(dim).collect();
    if chosen.len() < dim {
        return Err(Error::Validation("point set is not injective on the family".into()));
    }
    let inverse = full.select_rows(&chosen).inverse().expect("independent rows");
    let mut b = CircuitBuilder::new(format!("points_decode_{n}"), n as u32 + 1, k + 1);
    let y = b.input(k + 1);
    let mut factors = Vec::with_capacity(dim);
    for eps in 0..dim {
        // Value at ε of the interpolant: row(ε)·M⁻¹·S.
        let at_eps: Vec<Rational> = (0..dim).map(|a| if a & !eps == 0 { rat(1) } else { rat(0) }).collect();
        let weights: Vec<Rational> = (0..dim)
            .map(|c| (0..dim).map(|r| &at_eps[r] * inverse.get(r, c)).sum())
            .collect();
        let mut terms = Vec::new();
        for (w, &row) in weights.iter().zip(&chosen) {
            if *w == rat(0) {
                continue;
            }
            let sj = b.input(row as u32 + 1);
            let c = b.scalar(w.clone());
            terms.push(b.mul(c, sj));
        }
        let phi = if terms.is_empty() { b.int(0) } else { b.sum(&terms) };
        factors.push(b.sub(y, phi));
    }
    let out = b.product(&factors);
    b.finish(alloc::vec![out])
}

fn existential_formula(n: usize, points: &[Vec<BigInt>], problem: &ElimProblem) -> String {
    let names = &problem.names;
    let mut quantified: Vec<String> = (1..=n).map(|i| format!("X{i}")).collect();
    quantified.push("T".into());
    quantified.extend((1..=n).map(|i| format!("U{i}")));
    let mut clauses: Vec<String> = problem.equations.iter().map(|g| format!("{} = 0", g.render(names))).collect();
    for (j, p) in points.iter().enumerate() {
        let at: alloc::collections::BTreeMap<Var, Rational> =
            p.iter().enumerate().map(|(i, c)| (x(i + 1), Rational::from_integer(c.clone()))).collect();
        clauses.push(format!("S{} = {}", j + 1, problem.h.eval(&at).render(names)));
    }
    clauses.push(format!("Y = {}", problem.h.render(names)));
    format!("exists {} : {}", quantified.join(" "), clauses.join(" & "))
}

/// Boolean formula whose standard arithmetization agrees with the
/// `boolhard` `H` on Boolean inputs:
/// `⋀(¬X_i ∨ (S_i ∧ X_i)) ∨ (T ∧ ⋀(¬X_i ∨ (U_i ∧ X_i)))`.
///
/// Variables: `T = 1`, `U_i = 1+i`, `S_i = 1+n+i` (parameters) and
/// `X_i = 2n+1+i` (inputs).
pub fn boolhard_formula(n: usize) -> BoolCircuit {
    let nn = n as u32;
    let r = 2 * nn + 1;
    let mut nodes: Vec<BoolNode> = Vec::new();
    let mut push = |op: BoolOp| {
        let id = nodes.len() as NodeId + 1;
        nodes.push(BoolNode { id, op });
        id
    };
    let tv = push(BoolOp::Var(1));
    let xs: Vec<NodeId> = (1..=nn).map(|i| push(BoolOp::Var(r + i))).collect();
    let conj = |push: &mut dyn FnMut(BoolOp) -> NodeId, var_of: &dyn Fn(u32) -> u32| {
        let clauses: Vec<NodeId> = (1..=nn)
            .map(|i| {
                let xi = xs[i as usize - 1];
                let v = push(BoolOp::Var(var_of(i)));
                let not_x = push(BoolOp::Not(xi));
                let and = push(BoolOp::And(v, xi));
                push(BoolOp::Or(not_x, and))
            })
            .collect();
        clauses[1..].iter().fold(clauses[0], |acc, &c| push(BoolOp::And(acc, c)))
    };
    let a = conj(&mut push, &|i| 1 + nn + i);
    let bb = conj(&mut push, &|i| 1 + i);
    let tb = push(BoolOp::And(tv, bb));
    let out = push(BoolOp::Or(a, tb));
    BoolCircuit::new(format!("boolhard_{n}"), r + nn, Some((r, nn)), nodes, alloc::vec![out])
        .expect("well-formed by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::{interpret, Budget};

    fn poly(kind: FamilyKind, n: usize, s: &str) -> SparsePoly {
        SparsePoly::parse(s, &family_names(kind, n)).unwrap()
    }

    #[test]
    fn n1_formulas() {
        let f = family(FamilyKind::Basic, 1).unwrap();
        assert_eq!(f.problem.equations, alloc::vec![poly(FamilyKind::Basic, 1, "X1^2 - X1")]);
        assert_eq!(f.problem.h, poly(FamilyKind::Basic, 1, "X1 + T*(1 + (U1 - 1)*X1)"));
        let f = family(FamilyKind::Hat, 1).unwrap();
        assert_eq!(f.problem.equations, alloc::vec![poly(FamilyKind::Hat, 1, "X1^2 - X1 - S1")]);
        assert_eq!(f.problem.h, poly(FamilyKind::Hat, 1, "X1 + T*(1 + (U1 - 1)*X1)"));
        let f = family(FamilyKind::BoolHard, 1).unwrap();
        assert_eq!(
            f.problem.h,
            poly(FamilyKind::BoolHard, 1, "(1 + (S1 - 1)*X1) + (1 - (1 + (S1 - 1)*X1))*T*(1 + (U1 - 1)*X1)")
        );
    }

    #[test]
    fn circuits_encode_problems() {
        for kind in [FamilyKind::Basic, FamilyKind::Hat, FamilyKind::BoolHard] {
            for n in 1..=4 {
                let f = family(kind, n).unwrap();
                assert!(f.problem.matches(&f.circuit, Budget::default()).unwrap(), "{kind} {n}");
                assert_eq!(f.circuit.division_class().unwrap(), crate::circuit::DivisionClass::TotallyDivisionFree);
                let size = f.circuit.metrics().nonscalar_size;
                match kind {
                    FamilyKind::Basic => assert!(size <= 3 * n + 2),
                    FamilyKind::Hat => assert!(size <= 4 * n + 4),
                    // n squarings, two shifted products of 2n−1 each and two
                    // products to combine them.
                    _ => assert_eq!(size, 5 * n),
                }
            }
        }
    }

    #[test]
    fn size_limits() {
        assert!(matches!(family(FamilyKind::Basic, 0), Err(Error::Validation(_))));
        assert!(matches!(family(FamilyKind::Basic, 7), Err(Error::BudgetExceeded(_))));
        assert!("nope".parse::<FamilyKind>().is_err());
        assert_eq!("boolhard".parse::<FamilyKind>().unwrap(), FamilyKind::BoolHard);
    }

    #[test]
    fn boolhard_formula_shape() {
        let b = boolhard_formula(2);
        assert_eq!(b.split(), Some((5, 2)));
        let arith = crate::arithmetize::standard_arithmetization(&b);
        let h = family(FamilyKind::BoolHard, 2).unwrap().problem.h;
        // The arithmetization agrees with H wherever the inputs are Boolean.
        let g = interpret(&arith.circuit, Budget::default()).unwrap().final_polys().unwrap().remove(0);
        for e in 0..4i64 {
            let at: alloc::collections::BTreeMap<Var, Rational> =
                (1..=2).map(|i| (x(i), rat((e >> (i - 1)) & 1))).collect();
            assert_eq!(g.eval(&at), h.eval(&at));
        }
    }

    #[test]
    fn points_family_decodes() {
        let f = family(FamilyKind::Points, 1).unwrap();
        let pts = f.points.unwrap();
        assert_eq!(pts.evaluation.outputs().len(), 19);
        assert_eq!(pts.decoder.inputs(), 19);
        assert!(pts.formula.starts_with("exists X1 T U1 : X1^2 - X1 = 0 & S1 = "));
    }
}
