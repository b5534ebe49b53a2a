//! Arithmetic modulo 62-bit primes and modular evaluation of circuits.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::algebra::Rational;
use crate::circuit::{Circuit, NodeId, NodeLabel};

pub const PRIME_LOW: u64 = 1 << 61;
pub const PRIME_HIGH: u64 = 1 << 62;
pub const MILLER_RABIN_ROUNDS: u32 = 40;

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (a != 0).then(|| pow_mod(a, p - 2, p))
}

/// Miller–Rabin with `rounds` random bases.
pub fn is_probable_prime<R: Rng + ?Sized>(n: u64, rounds: u32, rng: &mut R) -> bool {
    if n < 4 {
        return n == 2 || n == 3;
    }
    if n % 2 == 0 {
        return false;
    }
    for sp in [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for _ in 0..rounds {
        let a = rng.gen_range(2..n - 1);
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniformly drawn probable prime in `[2⁶¹, 2⁶²)`.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let cand = rng.gen_range(PRIME_LOW..PRIME_HIGH) | 1;
        if is_probable_prime(cand, MILLER_RABIN_ROUNDS, rng) {
            return cand;
        }
    }
}

pub fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

/// Image of a rational; `None` if the denominator vanishes modulo `p`.
pub fn rational_mod(r: &Rational, p: u64) -> Option<u64> {
    let n = bigint_mod(r.numer(), p);
    let d = inv_mod(bigint_mod(r.denom(), p), p)?;
    Some(mul_mod(n, d, p))
}

/// Non-negative integer with at most `bits` random bits.
pub fn random_biguint<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let mut digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    let extra = (words as u64 * 32).saturating_sub(bits);
    if let Some(top) = digits.last_mut() {
        if extra > 0 {
            *top &= u32::MAX >> extra;
        }
    }
    BigUint::from_slice(&digits)
}

/// Residues of all node values at the given point, fast `u64` path.
/// `Err(node)` when a denominator or scalar denominator vanishes mod `p`.
pub fn eval_nodes_mod(c: &Circuit, p: u64, params: &[u64], inputs: &[u64]) -> Result<Vec<u64>, NodeId> {
    let mut vals: Vec<u64> = Vec::with_capacity(c.nodes().len());
    for node in c.nodes() {
        let arg = |id: NodeId| vals[c.position(id).unwrap()];
        let v = match &node.label {
            NodeLabel::Scalar(r) => rational_mod(r, p).ok_or(node.id)?,
            NodeLabel::Param(k) => params[*k as usize - 1] % p,
            NodeLabel::Input(i) => inputs[*i as usize - 1] % p,
            NodeLabel::Add(a, b) => add_mod(arg(*a), arg(*b), p),
            NodeLabel::Sub(a, b) => sub_mod(arg(*a), arg(*b), p),
            NodeLabel::Mul(a, b) => mul_mod(arg(*a), arg(*b), p),
            NodeLabel::Div(a, b) => mul_mod(arg(*a), inv_mod(arg(*b), p).ok_or(node.id)?, p),
        };
        vals.push(v);
    }
    Ok(vals)
}

pub fn eval_mod(c: &Circuit, p: u64, params: &[u64], inputs: &[u64]) -> Result<Vec<u64>, NodeId> {
    let vals = eval_nodes_mod(c, p, params, inputs)?;
    Ok(c.outputs().iter().map(|&o| vals[c.position(o).unwrap()]).collect())
}

/// Reference evaluator on arbitrary-precision integers, reducing modulo `p`
/// after every operation. Kept separate from [`eval_mod`] so that one can
/// confirm the other.
pub fn eval_mod_reference(c: &Circuit, p: &BigUint, params: &[BigUint], inputs: &[BigUint]) -> Result<Vec<BigUint>, NodeId> {
    let m = BigInt::from_biguint(Sign::Plus, p.clone());
    let reduce = |x: BigInt| -> BigInt { x.mod_floor(&m) };
    let inverse = |x: &BigInt| -> Option<BigInt> {
        let g = x.extended_gcd(&m);
        g.gcd.is_one().then(|| g.x.mod_floor(&m))
    };
    let mut vals: Vec<BigInt> = Vec::with_capacity(c.nodes().len());
    for node in c.nodes() {
        let arg = |id: NodeId| &vals[c.position(id).unwrap()];
        let v = match &node.label {
            NodeLabel::Scalar(r) => {
                let d = reduce(r.denom().clone());
                if d.is_zero() {
                    return Err(node.id);
                }
                reduce(r.numer() * inverse(&d).ok_or(node.id)?)
            }
            NodeLabel::Param(k) => reduce(BigInt::from(params[*k as usize - 1].clone())),
            NodeLabel::Input(i) => reduce(BigInt::from(inputs[*i as usize - 1].clone())),
            NodeLabel::Add(a, b) => reduce(arg(*a) + arg(*b)),
            NodeLabel::Sub(a, b) => reduce(arg(*a) - arg(*b)),
            NodeLabel::Mul(a, b) => reduce(arg(*a) * arg(*b)),
            NodeLabel::Div(a, b) => {
                let d = arg(*b);
                if d.is_zero() {
                    return Err(node.id);
                }
                reduce(arg(*a) * inverse(d).ok_or(node.id)?)
            }
        };
        vals.push(v);
    }
    Ok(c
        .outputs()
        .iter()
        .map(|&o| vals[c.position(o).unwrap()].to_biguint().expect("reduced"))
        .collect())
}
