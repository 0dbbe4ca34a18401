//! Evaluation at a random torus point over the prime field with
//! `2^61 - 1` elements.
//!
//! Each coordinate direction gets a random unit; a weight evaluates to the
//! product of those units raised to its coordinates.  Fractional weights are
//! supported up to the fixed common denominator 12, which covers every
//! scale the residue computations produce.  Identities verified exactly can
//! be cross-checked cheaply here, and probabilistic runs use these values
//! alone.

use super::{GeoFraction, GroupRingElem, RingError};
use crate::rootsys::Weight;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The Mersenne prime `2^61 - 1`.
pub const PRIME: u64 = (1 << 61) - 1;

/// Common denominator of weight scales a point can evaluate.
const POINT_SCALE: i32 = 12;

pub fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= PRIME {
        s - PRIME
    } else {
        s
    }
}

pub fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + PRIME - b
    }
}

pub fn modpow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= PRIME;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base);
        }
        base = mulmod(base, base);
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue.
pub fn modinv(x: u64) -> u64 {
    assert!(x % PRIME != 0, "zero has no inverse");
    modpow(x, PRIME - 2)
}

/// A random evaluation point of the torus: one unit per node, interpreted
/// as the value of `e^{omega_a / 12}`.
#[derive(Debug, Clone)]
pub struct RandomPoint {
    pub seed: u64,
    base: Vec<u64>,
}

impl RandomPoint {
    pub fn new(rank: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = (0..rank)
            .map(|_| rng.gen_range(2..PRIME - 1))
            .collect();
        RandomPoint { seed, base }
    }

    pub fn rank(&self) -> usize {
        self.base.len()
    }

    /// Value of `e^w`.
    pub fn eval_weight(&self, w: &Weight) -> u64 {
        assert_eq!(w.rank(), self.rank());
        assert!(
            POINT_SCALE % w.scale == 0,
            "weight scale {} exceeds the evaluation denominator",
            w.scale
        );
        let f = (POINT_SCALE / w.scale) as i64;
        let mut acc = 1u64;
        for (a, &c) in w.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let e = (c as i64 * f).rem_euclid(PRIME as i64 - 1) as u64;
            acc = mulmod(acc, modpow(self.base[a], e));
        }
        acc
    }

    /// Value of an element: the sum of coefficient times monomial values.
    pub fn eval_elem(&self, f: &GroupRingElem) -> u64 {
        assert_eq!(f.rank(), self.rank());
        assert!(
            POINT_SCALE % f.scale() == 0,
            "element scale {} exceeds the evaluation denominator",
            f.scale()
        );
        let step = (POINT_SCALE / f.scale()) as i64;
        let mut acc = 0u64;
        for (k, c) in &f.terms {
            let mut m = bigint_mod(c);
            for (a, &x) in k.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let e = (x as i64 * step).rem_euclid(PRIME as i64 - 1) as u64;
                m = mulmod(m, modpow(self.base[a], e));
            }
            acc = addmod(acc, m);
        }
        acc
    }

    /// Value of a fraction; a vanishing denominator reports the unlucky
    /// seed so the caller can redraw.
    pub fn eval_fraction(&self, f: &GeoFraction) -> Result<u64, RingError> {
        let mut denom = bigint_mod(&f.denom_scalar);
        for factor in &f.denom_factors {
            let v = self.eval_weight(&factor.weight);
            let term = match factor.sign {
                super::FactorSign::Minus => submod(1, v),
                super::FactorSign::Plus => addmod(1, v),
            };
            denom = mulmod(denom, term);
        }
        if denom == 0 {
            return Err(RingError::UnluckyPoint { seed: self.seed });
        }
        Ok(mulmod(self.eval_elem(&f.num), modinv(denom)))
    }

    /// A fixed primitive `l`-th root of unity, for `l` in `{1, 2, 3}`.
    pub fn zeta(l: u32) -> u64 {
        match l {
            1 => 1,
            2 => PRIME - 1,
            3 => {
                for g in [3u64, 5, 6, 7, 10, 11] {
                    let z = modpow(g, (PRIME - 1) / 3);
                    if z != 1 {
                        return z;
                    }
                }
                unreachable!("some small base is a cubic non-residue")
            }
            _ => panic!("roots of unity of order {l} are not supported"),
        }
    }
}

fn bigint_mod(c: &BigInt) -> u64 {
    c.mod_floor(&BigInt::from(PRIME))
        .to_u64()
        .expect("residue fits in u64")
}
