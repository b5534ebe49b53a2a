//! Identity testing between circuits.
//!
//! Two modes: exact comparison of canonical forms, and randomized evaluation
//! modulo independently drawn 62-bit primes (one-sided error: a `Distinct`
//! verdict always carries a witness that re-evaluates independently).
//!
//! The sizes of the deterministic correct test sequences are exposed by
//! [`det_point_count`] and [`correctness_set_size`]; the points themselves
//! are drawn at random with the prescribed bit length.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use rand::Rng;

use crate::algebra::{rat, RatMatrix, Rational};
use crate::circuit::Circuit;
use crate::modular;
use crate::semantics::{interpret, Budget};
use crate::{Error, Result};

/// A test-set size with the bit-length bound of its points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PointBound {
    pub count: u128,
    pub bits: u64,
}

/// `m = 4(L+2)²+2` univariate points of bit length at most `2(L+1)` for
/// circuits of non-scalar size `L`.
pub fn det_point_count(nonscalar_size: u64) -> PointBound {
    let l = nonscalar_size as u128;
    PointBound { count: 4 * (l + 2) * (l + 2) + 2, bits: 2 * (nonscalar_size + 1) }
}

/// `K = 16n²+2` points in `ℤⁿ` of bit length at most `4n`.
pub fn correctness_set_size(n: u64) -> PointBound {
    let n2 = n as u128;
    PointBound { count: 16 * n2 * n2 + 2, bits: 4 * n }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSource {
    Deterministic1D,
    CorrectnessSet,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestPointSet {
    pub points: Vec<Vec<BigInt>>,
    pub bit_bound: u64,
    pub source: PointSource,
}

impl TestPointSet {
    /// `count` integer points of dimension `dim` with `|coordinate| < 2^bits`.
    pub fn sample<R: Rng + ?Sized>(count: usize, dim: usize, bits: u64, source: PointSource, rng: &mut R) -> Self {
        let points = (0..count)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let mag = BigInt::from(modular::random_biguint(bits, rng));
                        if rng.gen::<bool>() {
                            -mag
                        } else {
                            mag
                        }
                    })
                    .collect()
            })
            .collect();
        TestPointSet { points, bit_bound: bits, source }
    }

    pub fn max_bits(&self) -> u64 {
        self.points.iter().flatten().map(|x| x.bits()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Modular { trials: u32 },
}

/// Point at which the two circuits were seen to differ modulo `prime`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularWitness {
    pub prime: u64,
    pub params: Vec<u64>,
    pub inputs: Vec<u64>,
    pub output: usize,
    pub left: u64,
    pub right: u64,
}

impl ModularWitness {
    /// Re-evaluates both circuits with the arbitrary-precision reference
    /// evaluator and checks that they still differ with the stored values.
    pub fn confirm(&self, a: &Circuit, b: &Circuit) -> bool {
        let p = BigUint::from(self.prime);
        let params: Vec<BigUint> = self.params.iter().map(|&x| BigUint::from(x)).collect();
        let inputs: Vec<BigUint> = self.inputs.iter().map(|&x| BigUint::from(x)).collect();
        let (Ok(va), Ok(vb)) = (
            modular::eval_mod_reference(a, &p, &params, &inputs),
            modular::eval_mod_reference(b, &p, &params, &inputs),
        ) else {
            return false;
        };
        va[self.output] == BigUint::from(self.left)
            && vb[self.output] == BigUint::from(self.right)
            && self.left != self.right
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equal,
    /// Exact mode reports the first differing output only.
    Distinct { output: usize, witness: Option<ModularWitness> },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub verdict: Verdict,
    pub trials_run: u32,
    pub trials_skipped: u32,
    pub primes: Vec<u64>,
}

pub const MAX_RETRIES: u32 = 16;

fn check_shapes(a: &Circuit, b: &Circuit) -> Result<()> {
    if a.params() != b.params() || a.inputs() != b.inputs() || a.outputs().len() != b.outputs().len() {
        return Err(Error::ArityMismatch(alloc::format!(
            "({}, {}, {} outputs) vs ({}, {}, {} outputs)",
            a.params(),
            a.inputs(),
            a.outputs().len(),
            b.params(),
            b.inputs(),
            b.outputs().len()
        )));
    }
    Ok(())
}

pub fn equiv<R: Rng + ?Sized>(a: &Circuit, b: &Circuit, mode: Mode, budget: Budget, rng: &mut R) -> Result<EquivReport> {
    check_shapes(a, b)?;
    match mode {
        Mode::Exact => {
            let ia = interpret(a, budget)?;
            let ib = interpret(b, budget)?;
            let differing = ia.finals().iter().zip(ib.finals()).position(|(x, y)| !x.equals(y));
            let verdict = match differing {
                None => Verdict::Equal,
                Some(output) => Verdict::Distinct { output, witness: None },
            };
            Ok(EquivReport { verdict, trials_run: 0, trials_skipped: 0, primes: Vec::new() })
        }
        Mode::Modular { trials } => Ok(equiv_modular(a, b, trials, rng)),
    }
}

fn equiv_modular<R: Rng + ?Sized>(a: &Circuit, b: &Circuit, trials: u32, rng: &mut R) -> EquivReport {
    let mut report = EquivReport { verdict: Verdict::Unknown, trials_run: 0, trials_skipped: 0, primes: Vec::new() };
    for trial in 0..trials {
        let p = modular::random_prime(rng);
        report.primes.push(p);
        let mut done = false;
        for _ in 0..MAX_RETRIES {
            let params: Vec<u64> = (0..a.params()).map(|_| rng.gen_range(0..p)).collect();
            let inputs: Vec<u64> = (0..a.inputs()).map(|_| rng.gen_range(0..p)).collect();
            let (Ok(va), Ok(vb)) =
                (modular::eval_mod(a, p, &params, &inputs), modular::eval_mod(b, p, &params, &inputs))
            else {
                continue;
            };
            done = true;
            if let Some(output) = va.iter().zip(&vb).position(|(x, y)| x != y) {
                let w = ModularWitness { prime: p, params, inputs, output, left: va[output], right: vb[output] };
                report.trials_run += 1;
                report.verdict = Verdict::Distinct { output, witness: Some(w) };
                return report;
            }
            break;
        }
        if done {
            report.trials_run += 1;
        } else {
            log::warn!("trial {trial}: division by zero at {MAX_RETRIES} sampled points, skipped");
            report.trials_skipped += 1;
        }
    }
    if report.trials_run > 0 {
        report.verdict = Verdict::Equal;
    }
    report
}

/// Exact check that evaluation at `points` is injective on the span of the
/// multilinear monomials `X^ε`, `ε ∈ {0,1}ⁿ`. That span contains every
/// difference of two members of the family `Σ2^{i−1}Xᵢ + t·Π(1+(uᵢ−1)Xᵢ)`,
/// so full column rank `2ⁿ` certifies injectivity of the point encoding on
/// the family and its closure.
pub fn multilinear_injective(points: &[Vec<BigInt>], n: usize) -> bool {
    let dim = 1usize << n;
    let rows: Vec<Vec<Rational>> = points.iter().map(|x| multilinear_row(x, n)).collect();
    if rows.len() < dim {
        return false;
    }
    RatMatrix::from_rows(rows).rank() == dim
}

/// Values of all multilinear monomials at `x`, indexed by the bit mask `ε`.
pub fn multilinear_row(x: &[BigInt], n: usize) -> Vec<Rational> {
    (0..1usize << n)
        .map(|eps| {
            let mut v = rat(1);
            for (i, xi) in x.iter().enumerate().take(n) {
                if eps >> i & 1 == 1 {
                    v *= Rational::from_integer(xi.clone());
                }
            }
            v
        })
        .collect()
}

/// A correctness set of the prescribed size and bit length on which the
/// point encoding is verified injective.
#[derive(Debug, Clone)]
pub struct XiPoints {
    pub set: TestPointSet,
    pub resamples: u32,
}

pub fn sample_xi_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> XiPoints {
    let bound = correctness_set_size(n as u64);
    let mut resamples = 0;
    loop {
        let set = TestPointSet::sample(bound.count as usize, n, bound.bits, PointSource::CorrectnessSet, rng);
        if multilinear_injective(&set.points, n) {
            return XiPoints { set, resamples };
        }
        resamples += 1;
        log::warn!("point set for n={n} not injective on the family, resampling ({resamples})");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn point_count_examples() {
        assert_eq!(det_point_count(3), PointBound { count: 102, bits: 8 });
        assert_eq!(det_point_count(0), PointBound { count: 18, bits: 2 });
        assert_eq!(det_point_count(10), PointBound { count: 578, bits: 22 });
        assert_eq!(correctness_set_size(1), PointBound { count: 18, bits: 4 });
        assert_eq!(correctness_set_size(2), PointBound { count: 66, bits: 8 });
        assert_eq!(correctness_set_size(4), PointBound { count: 258, bits: 16 });
    }

    fn cube(offset: i64) -> Circuit {
        let mut b = CircuitBuilder::new("c", 0, 1);
        let x = b.input(1);
        let x2 = b.mul(x, x);
        let mut y = b.mul(x2, x);
        if offset != 0 {
            let k = b.int(offset);
            y = b.add(y, k);
        }
        b.finish(alloc::vec![y]).unwrap()
    }

    #[test]
    fn modular_distinct_has_confirmed_witness() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = equiv(&cube(0), &cube(1), Mode::Modular { trials: 1 }, Budget::default(), &mut rng).unwrap();
        match r.verdict {
            Verdict::Distinct { witness: Some(w), .. } => assert!(w.confirm(&cube(0), &cube(1))),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn exact_square_identity() {
        let mut b = CircuitBuilder::new("a", 0, 1);
        let x = b.input(1);
        let one = b.int(1);
        let s = b.add(x, one);
        let sq = b.mul(s, s);
        let a = b.finish(alloc::vec![sq]).unwrap();
        let mut b = CircuitBuilder::new("b", 0, 1);
        let x = b.input(1);
        let one = b.int(1);
        let two = b.int(2);
        let x2 = b.mul(x, x);
        let tx = b.mul(two, x);
        let s = b.add(x2, tx);
        let s = b.add(s, one);
        let c = b.finish(alloc::vec![s]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(equiv(&a, &c, Mode::Exact, Budget::default(), &mut rng).unwrap().verdict, Verdict::Equal);
        assert_eq!(equiv(&a, &c, Mode::Modular { trials: 4 }, Budget::default(), &mut rng).unwrap().verdict, Verdict::Equal);
        assert!(matches!(
            equiv(&a, &cube(0), Mode::Exact, Budget::default(), &mut rng).unwrap().verdict,
            Verdict::Distinct { output: 0, witness: None }
        ));
    }

    #[test]
    fn inconsistent_circuit_is_unknown_in_modular_mode() {
        let mut b = CircuitBuilder::new("z", 0, 1);
        let x = b.input(1);
        let z = b.sub(x, x);
        let d = b.div(x, z);
        let c = b.finish(alloc::vec![d]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = equiv(&c, &c, Mode::Modular { trials: 2 }, Budget::default(), &mut rng).unwrap();
        assert_eq!((r.verdict, r.trials_skipped), (Verdict::Unknown, 2));
        assert_eq!(
            equiv(&c, &c, Mode::Exact, Budget::default(), &mut rng).unwrap_err(),
            Error::InconsistentCircuit(d)
        );
    }

    #[test]
    fn too_few_points_are_not_injective() {
        let pts: Vec<Vec<BigInt>> = (0..3).map(|i| alloc::vec![BigInt::from(i), BigInt::from(i)]).collect();
        assert!(!multilinear_injective(&pts, 2));
        let pts: Vec<Vec<BigInt>> = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(a, b)| alloc::vec![BigInt::from(a), BigInt::from(b)])
            .collect();
        assert!(multilinear_injective(&pts, 2));
    }
}
