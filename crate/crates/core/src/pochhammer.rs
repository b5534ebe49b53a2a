//! Circuit chains for the falling factorials `T^(2ʲ) = Π_{0≤i<2ʲ} (T − i)`
//! and their randomized verification through the doubling identity
//! `T^(2ʲ) = T^(2ʲ⁻¹)(T) · T^(2ʲ⁻¹)(T − 2ʲ⁻¹)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::algebra::{SparsePoly, Var};
use crate::circuit::{Circuit, CircuitBuilder, DivisionClass, NodeId, NodeLabel};
use crate::identity::det_point_count;
use crate::modular;
use crate::semantics::{interpret, Budget};
use crate::{Error, Result};

pub const MAX_CHAIN_DEPTH: u32 = 16;

/// `Γ₀…Γ_n`, each with no parameters, one input `T` and one output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PochChain {
    pub levels: Vec<Circuit>,
}

impl PochChain {
    pub fn depth(&self) -> u32 {
        self.levels.len().saturating_sub(1) as u32
    }
}

/// Copies `g` into `b` with its input leaf replaced by `input`; returns the
/// image of the output.
fn copy_into(b: &mut CircuitBuilder, g: &Circuit, input: NodeId) -> NodeId {
    let mut map: Vec<NodeId> = Vec::with_capacity(g.nodes().len());
    let at = |map: &Vec<NodeId>, id: NodeId| map[g.position(id).expect("validated argument")];
    for node in g.nodes() {
        let id = match &node.label {
            NodeLabel::Input(_) => input,
            NodeLabel::Param(_) => unreachable!("chain circuits have no parameters"),
            NodeLabel::Scalar(c) => b.scalar(c.clone()),
            label => {
                let (x, y) = label.args().expect("internal node");
                b.push(label.with_args(at(&map, x), at(&map, y)))
            }
        };
        map.push(id);
    }
    at(&map, g.outputs()[0])
}

/// `Γ(T) · Γ(T − 2^(j−1))`, the shift constant built from `1` by `j − 1`
/// doublings.
pub fn doubling(g: &Circuit, j: u32) -> Circuit {
    let mut b = CircuitBuilder::new(format!("poch_{j}"), 0, 1);
    let t = b.input(1);
    let first = copy_into(&mut b, g, t);
    let mut c = b.int(1);
    for _ in 1..j {
        c = b.add(c, c);
    }
    let mu = b.sub(t, c);
    let second = copy_into(&mut b, g, mu);
    let out = b.mul(first, second);
    b.finish(alloc::vec![out]).expect("doubling of a valid circuit is valid")
}

fn identity_circuit() -> Circuit {
    let mut b = CircuitBuilder::new("poch_0", 0, 1);
    let t = b.input(1);
    b.finish(alloc::vec![t]).expect("valid")
}

pub fn gen_chain(n: u32) -> Result<PochChain> {
    if n > MAX_CHAIN_DEPTH {
        return Err(Error::Validation(format!("chain depth {n} exceeds {MAX_CHAIN_DEPTH}")));
    }
    let mut levels = alloc::vec![identity_circuit()];
    for j in 1..=n {
        let next = doubling(&levels[j as usize - 1], j);
        levels.push(next);
    }
    Ok(PochChain { levels })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Malformed(String),
    /// `Γ₀` does not compute `T`.
    BaseMismatch,
    /// `Γ_j` and the doubling of `Γ_{j−1}` differ at the witness point.
    LevelMismatch,
}

/// Evaluation point and prime at which the two circuits of a level differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainWitness {
    pub point: BigUint,
    pub prime: u64,
    /// Value of the doubling of `Γ_{j−1}`.
    pub expected: u64,
    /// Value of `Γ_j`.
    pub claimed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub level: u32,
    pub reason: RejectReason,
    pub witness: Option<ChainWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainVerdict {
    Accept,
    Reject(Rejection),
}

/// What was tested at one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTranscript {
    pub level: u32,
    pub prime: u64,
    /// Combined non-scalar size `L` of the two compared circuits.
    pub nonscalar: u64,
    pub bits: u64,
    pub points: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub verdict: ChainVerdict,
    pub levels_checked: u32,
    pub transcript: Vec<LevelTranscript>,
}

impl VerifyReport {
    pub fn accepted(&self) -> bool {
        self.verdict == ChainVerdict::Accept
    }
}

impl ChainWitness {
    /// Re-evaluates both circuits of `level` at the stored point with the
    /// independent big-integer evaluator.
    pub fn confirm(&self, chain: &PochChain, level: u32) -> bool {
        let Some(prev) = level.checked_sub(1).and_then(|i| chain.levels.get(i as usize)) else {
            return false;
        };
        let Some(claimed) = chain.levels.get(level as usize) else {
            return false;
        };
        let p = BigUint::from(self.prime);
        let x = alloc::vec![&self.point % &p];
        let expected = modular::eval_mod_reference(&doubling(prev, level), &p, &[], &x);
        let got = modular::eval_mod_reference(claimed, &p, &[], &x);
        match (expected, got) {
            (Ok(e), Ok(g)) => {
                e[0].to_u64() == Some(self.expected) && g[0].to_u64() == Some(self.claimed) && e != g
            }
            _ => false,
        }
    }
}

fn malformed(c: &Circuit) -> Option<String> {
    if c.params() != 0 || c.inputs() != 1 || c.outputs().len() != 1 {
        return Some(format!(
            "expected 0 parameters, 1 input and 1 output, found {}, {}, {}",
            c.params(),
            c.inputs(),
            c.outputs().len()
        ));
    }
    match c.division_class() {
        Ok(DivisionClass::TotallyDivisionFree) => None,
        Ok(_) => Some("chain circuits must not divide".into()),
        Err(e) => Some(format!("{e}")),
    }
}

fn reject(level: u32, reason: RejectReason, witness: Option<ChainWitness>, transcript: Vec<LevelTranscript>) -> VerifyReport {
    VerifyReport { verdict: ChainVerdict::Reject(Rejection { level, reason, witness }), levels_checked: level, transcript }
}

/// Checks `Γ₀ = T` exactly and `Γ_j ≡ doubling(Γ_{j−1})` for every level
/// by evaluation modulo a fresh random prime at `trials` random points of
/// bit length `2(L_j+1)`.
pub fn verify_chain<R: Rng + ?Sized>(chain: &PochChain, trials: u32, rng: &mut R) -> VerifyReport {
    let mut transcript = Vec::new();
    if chain.levels.is_empty() {
        return reject(0, RejectReason::Malformed("empty chain".into()), None, transcript);
    }
    for (j, c) in chain.levels.iter().enumerate() {
        if let Some(why) = malformed(c) {
            return reject(j as u32, RejectReason::Malformed(why), None, transcript);
        }
    }
    let base_ok = interpret(&chain.levels[0], Budget::default())
        .ok()
        .and_then(|i| i.final_polys())
        .is_some_and(|f| f[0] == SparsePoly::var(Var::Input(1)));
    if !base_ok {
        return reject(0, RejectReason::BaseMismatch, None, transcript);
    }
    for j in 1..chain.levels.len() as u32 {
        let claimed = &chain.levels[j as usize];
        let expected = doubling(&chain.levels[j as usize - 1], j);
        let nonscalar = (expected.metrics().nonscalar_size + claimed.metrics().nonscalar_size) as u64;
        let bits = det_point_count(nonscalar).bits;
        let prime = modular::random_prime(rng);
        let mut level = LevelTranscript { level: j, prime, nonscalar, bits, points: Vec::new() };
        for _ in 0..trials {
            let point = modular::random_biguint(bits, rng);
            let x = [modular::bigint_mod(&point.clone().into(), prime)];
            let e = modular::eval_mod(&expected, prime, &[], &x).expect("division-free")[0];
            let g = modular::eval_mod(claimed, prime, &[], &x).expect("division-free")[0];
            level.points.push(point.clone());
            if e != g {
                transcript.push(level);
                let witness = ChainWitness { point, prime, expected: e, claimed: g };
                return reject(j, RejectReason::LevelMismatch, Some(witness), transcript);
            }
        }
        transcript.push(level);
    }
    VerifyReport { verdict: ChainVerdict::Accept, levels_checked: chain.levels.len() as u32, transcript }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::semantics::eval_numeric;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn at(c: &Circuit, t: i64) -> i64 {
        use num_traits::ToPrimitive;
        eval_numeric(c, &[], &[rat(t)]).unwrap()[0].to_integer().to_i64().unwrap()
    }

    #[test]
    fn small_levels() {
        let chain = gen_chain(2).unwrap();
        assert_eq!(at(&chain.levels[0], 7), 7);
        assert_eq!(at(&chain.levels[1], 5), 20);
        assert_eq!(at(&chain.levels[2], 5), 120);
    }

    #[test]
    fn levels_match_product_definition() {
        let chain = gen_chain(6).unwrap();
        let t = SparsePoly::var(Var::Input(1));
        let mut expected = t.clone();
        for (j, level) in chain.levels.iter().enumerate() {
            let got = interpret(level, Budget::default()).unwrap().final_polys().unwrap().remove(0);
            assert_eq!(got, expected, "level {j}");
            let k = 1i64 << j;
            for i in k..2 * k {
                expected = &expected * &(&t - &SparsePoly::constant(rat(i)));
            }
        }
    }

    #[test]
    fn valid_chain_accepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = verify_chain(&gen_chain(4).unwrap(), 8, &mut rng);
        assert!(r.accepted());
        assert_eq!(r.levels_checked, 5);
        assert_eq!(r.transcript.len(), 4);
        assert!(r.transcript.iter().all(|l| l.points.len() == 8));
    }

    #[test]
    fn square_at_level_one_rejects() {
        let mut chain = gen_chain(2).unwrap();
        let mut b = CircuitBuilder::new("sq", 0, 1);
        let t = b.input(1);
        let sq = b.mul(t, t);
        chain.levels[1] = b.finish(alloc::vec![sq]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = verify_chain(&chain, 8, &mut rng);
        let ChainVerdict::Reject(rej) = r.verdict else { panic!("accepted") };
        assert_eq!((rej.level, rej.reason), (1, RejectReason::LevelMismatch));
        assert!(rej.witness.unwrap().confirm(&chain, 1));
    }

    #[test]
    fn malformed_and_base() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut chain = gen_chain(1).unwrap();
        let mut b = CircuitBuilder::new("two", 0, 1);
        let t = b.input(1);
        let s = b.add(t, t);
        chain.levels[0] = b.finish(alloc::vec![s]).unwrap();
        let r = verify_chain(&chain, 2, &mut rng);
        assert!(matches!(r.verdict, ChainVerdict::Reject(Rejection { level: 0, reason: RejectReason::BaseMismatch, .. })));
        assert!(!verify_chain(&PochChain { levels: Vec::new() }, 2, &mut rng).accepted());
        assert!(gen_chain(17).is_err());
    }
}
