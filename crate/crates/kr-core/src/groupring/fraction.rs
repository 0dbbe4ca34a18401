//! Quotients of group ring elements by products of binomial factors.
//!
//! A fraction keeps its denominator factored: a positive integer scalar
//! times a multiset of factors `1 - e^w` or `1 + e^w`.  Factors are stored
//! with a canonical orientation (first nonzero coordinate of `w` positive),
//! flipping `1 - e^{-w} = -e^{-w}(1 - e^w)` into the numerator as needed.
//! Reduced forms are not unique, so equality is decided by cross
//! multiplication, which is exact.

use super::{GroupRingElem, RingError};
use crate::rootsys::Weight;
use crate::weylgrp::WeylElement;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Orientation of a binomial denominator factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactorSign {
    /// `1 - e^w`
    Minus,
    /// `1 + e^w`
    Plus,
}

/// A single denominator factor `1 - e^w` or `1 + e^w` with `w` canonically
/// oriented.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DenomFactor {
    pub sign: FactorSign,
    pub weight: Weight,
}

impl DenomFactor {
    /// The factor as an expanded group ring element.
    pub fn expand(&self, rank: usize) -> GroupRingElem {
        let one = GroupRingElem::one(rank);
        let m = GroupRingElem::monomial(&self.weight, 1);
        match self.sign {
            FactorSign::Minus => &one - &m,
            FactorSign::Plus => &one + &m,
        }
    }
}

impl fmt::Display for DenomFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.sign {
            FactorSign::Minus => '-',
            FactorSign::Plus => '+',
        };
        write!(f, "(1{op}e{})", self.weight)
    }
}

/// `num / (denom_scalar * product of denom_factors)`.
#[derive(Debug, Clone)]
pub struct GeoFraction {
    pub num: GroupRingElem,
    /// Positive integer part of the denominator.
    pub denom_scalar: BigInt,
    /// Sorted multiset of binomial factors.
    pub denom_factors: Vec<DenomFactor>,
}

impl GeoFraction {
    pub fn zero(rank: usize) -> Self {
        GeoFraction::from_elem(GroupRingElem::zero(rank))
    }

    pub fn one(rank: usize) -> Self {
        GeoFraction::from_elem(GroupRingElem::one(rank))
    }

    pub fn from_elem(num: GroupRingElem) -> Self {
        GeoFraction {
            num,
            denom_scalar: BigInt::one(),
            denom_factors: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.num.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Divides by `1 - e^w` (or `1 + e^w`), canonicalizing the orientation.
    pub fn div_factor(mut self, sign: FactorSign, weight: &Weight) -> Result<Self, RingError> {
        if weight.is_zero() {
            match sign {
                FactorSign::Minus => return Err(RingError::DivisionByZeroFraction),
                FactorSign::Plus => {
                    self.denom_scalar *= 2;
                    return Ok(self);
                }
            }
        }
        let (factor, correction) = canonical_factor(sign, weight);
        if let Some((shift, mult)) = correction {
            self.num = self.num.mul_monomial(&shift, &mult);
        }
        let pos = self.denom_factors.partition_point(|f| f < &factor);
        self.denom_factors.insert(pos, factor);
        Ok(self)
    }

    /// Multiplies by `1 - e^w` (or `1 + e^w`), cancelling a matching
    /// denominator factor instead of growing the numerator when one exists.
    pub fn mul_factor(mut self, sign: FactorSign, weight: &Weight) -> Self {
        if weight.is_zero() {
            return match sign {
                FactorSign::Minus => GeoFraction::zero(self.rank()),
                FactorSign::Plus => {
                    self.num = self.num.scalar_mul(&BigInt::from(2));
                    self
                }
            };
        }
        let (factor, correction) = canonical_factor(sign, weight);
        if let Ok(pos) = self.denom_factors.binary_search(&factor) {
            self.denom_factors.remove(pos);
            if let Some((shift, mult)) = correction {
                // The inverse of the division correction `mult * e^shift`.
                self.num = self.num.mul_monomial(&shift.neg(), &mult);
            }
        } else {
            self.num = self.num.mul_binomial(weight, sign == FactorSign::Plus);
        }
        self
    }

    /// The image of the fraction under a Weyl group element.
    pub fn weyl_act(&self, w: &WeylElement) -> Self {
        let mut num = self.num.weyl_act(w);
        let mut factors = Vec::with_capacity(self.denom_factors.len());
        for f in &self.denom_factors {
            let moved = w.apply(&f.weight);
            let (factor, correction) = canonical_factor(f.sign, &moved);
            if let Some((shift, mult)) = correction {
                num = num.mul_monomial(&shift, &mult);
            }
            factors.push(factor);
        }
        factors.sort();
        GeoFraction {
            num,
            denom_scalar: self.denom_scalar.clone(),
            denom_factors: factors,
        }
    }

    /// Divides by a positive or negative integer.
    pub fn div_scalar(mut self, c: &BigInt) -> Self {
        assert!(!c.is_zero());
        if c.is_negative() {
            self.num = -&self.num;
        }
        self.denom_scalar *= c.abs();
        self
    }

    pub fn mul_elem(&self, f: &GroupRingElem) -> Self {
        GeoFraction {
            num: &self.num * f,
            denom_scalar: self.denom_scalar.clone(),
            denom_factors: self.denom_factors.clone(),
        }
    }

    pub fn scalar_mul(&self, c: &BigInt) -> Self {
        GeoFraction {
            num: self.num.scalar_mul(c),
            denom_scalar: self.denom_scalar.clone(),
            denom_factors: self.denom_factors.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scalar_mul(&-BigInt::one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.denom_factors.clone();
        factors.extend(other.denom_factors.iter().cloned());
        factors.sort();
        GeoFraction {
            num: &self.num * &other.num,
            denom_scalar: &self.denom_scalar * &other.denom_scalar,
            denom_factors: factors,
        }
    }

    /// Sum over a common denominator (no reduction attempted).
    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, &BigInt::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, &-BigInt::one())
    }

    /// `self + c * other` over the union denominator.
    pub fn add_scaled(&self, other: &Self, c: &BigInt) -> Self {
        assert_eq!(self.rank(), other.rank());
        let mine = factor_counts(&self.denom_factors);
        let theirs = factor_counts(&other.denom_factors);
        let mut union: BTreeMap<DenomFactor, usize> = mine.clone();
        for (f, &n) in &theirs {
            let e = union.entry(f.clone()).or_insert(0);
            *e = (*e).max(n);
        }
        let scalar = self.denom_scalar.lcm(&other.denom_scalar);

        let complete = |num: &GroupRingElem, have: &BTreeMap<DenomFactor, usize>, s: &BigInt| {
            let mut out = num.scalar_mul(&(&scalar / s));
            for (f, &n) in &union {
                let have_n = have.get(f).copied().unwrap_or(0);
                for _ in have_n..n {
                    out = out.mul_binomial(&f.weight, f.sign == FactorSign::Plus);
                }
            }
            out
        };

        let mut num = complete(&self.num, &mine, &self.denom_scalar);
        num.add_scaled_assign(&complete(&other.num, &theirs, &other.denom_scalar), c);
        GeoFraction {
            num,
            denom_scalar: scalar,
            denom_factors: union
                .into_iter()
                .flat_map(|(f, n)| std::iter::repeat(f).take(n))
                .collect(),
        }
    }

    /// Exact equality by cross multiplication.
    pub fn equals(&self, other: &Self) -> bool {
        self.sub(other).num.is_zero()
    }

    /// Opportunistically cancels denominator factors and scalar content
    /// against the numerator.  The value is unchanged; the representation
    /// gets no larger.
    pub fn normalize(&mut self) {
        if self.num.is_zero() {
            self.denom_scalar = BigInt::one();
            self.denom_factors.clear();
            return;
        }
        loop {
            let mut progress = false;

            // Scalar content.
            if !self.denom_scalar.is_one() {
                let g = self.num.content().gcd(&self.denom_scalar);
                if g > BigInt::one() {
                    self.num = self
                        .num
                        .div_scalar_exact(&g)
                        .expect("content divides every coefficient");
                    self.denom_scalar /= &g;
                    progress = true;
                }
            }

            // Binomial factors, each probed by the cheap line-sum hint
            // before the exact division is attempted.
            let mut i = 0;
            while i < self.denom_factors.len() {
                let f = self.denom_factors[i].clone();
                let plus = f.sign == FactorSign::Plus;
                if self.num.divisible_hint(&f.weight, plus) {
                    if let Some(q) = self.num.divide_binomial(&f.weight, plus) {
                        self.num = q;
                        self.denom_factors.remove(i);
                        progress = true;
                        continue;
                    }
                }
                // Split 1 - e^w = (1 - e^{w/2})(1 + e^{w/2}) when one half
                // cancels.  Half weights are capped at scale 12 so random
                // evaluation keeps a common denominator for exponents.
                if f.sign == FactorSign::Minus {
                    let half = f.weight.div(2);
                    if 12 % half.scale == 0 {
                        if self.num.divisible_hint(&half, true) {
                            if let Some(q) = self.num.divide_binomial(&half, true) {
                                self.num = q;
                                self.denom_factors[i] = DenomFactor {
                                    sign: FactorSign::Minus,
                                    weight: half,
                                };
                                progress = true;
                                continue;
                            }
                        }
                        if self.num.divisible_hint(&half, false) {
                            if let Some(q) = self.num.divide_binomial(&half, false) {
                                self.num = q;
                                self.denom_factors[i] = DenomFactor {
                                    sign: FactorSign::Plus,
                                    weight: half,
                                };
                                progress = true;
                                continue;
                            }
                        }
                    }
                }
                i += 1;
            }

            if !progress {
                break;
            }
        }
        self.denom_factors.sort();
    }

    /// The denominator as one expanded element (scalar included).
    pub fn denom_expanded(&self) -> GroupRingElem {
        let mut out = GroupRingElem::one(self.rank()).scalar_mul(&self.denom_scalar);
        for f in &self.denom_factors {
            out = out.mul_binomial(&f.weight, f.sign == FactorSign::Plus);
        }
        out
    }
}

impl PartialEq for GeoFraction {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for GeoFraction {}

impl fmt::Display for GeoFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom_scalar.is_one() && self.denom_factors.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "[{}] / [", self.num)?;
        let mut first = true;
        if !self.denom_scalar.is_one() {
            write!(f, "{}", self.denom_scalar)?;
            first = false;
        }
        let counts = factor_counts(&self.denom_factors);
        for (factor, n) in counts {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "{factor}")?;
            if n > 1 {
                write!(f, "^{n}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        write!(f, "]")
    }
}

fn factor_counts(factors: &[DenomFactor]) -> BTreeMap<DenomFactor, usize> {
    let mut out = BTreeMap::new();
    for f in factors {
        *out.entry(f.clone()).or_insert(0) += 1;
    }
    out
}

/// Canonical orientation of a nonzero binomial factor.  Returns the stored
/// factor and, when the weight had to be flipped, the monomial `mult * e^shift`
/// the numerator must absorb so that dividing by the returned factor equals
/// dividing by the original binomial:
/// `1 - e^{-w} = -e^{-w} (1 - e^w)` and `1 + e^{-w} = e^{-w} (1 + e^w)`.
fn canonical_factor(sign: FactorSign, weight: &Weight) -> (DenomFactor, Option<(Weight, BigInt)>) {
    let leading = weight
        .coords
        .iter()
        .find(|&&c| c != 0)
        .copied()
        .expect("nonzero weight has a nonzero coordinate");
    if leading > 0 {
        (
            DenomFactor {
                sign,
                weight: weight.clone(),
            },
            None,
        )
    } else {
        let flipped = weight.neg();
        let mult = match sign {
            FactorSign::Minus => -BigInt::one(),
            FactorSign::Plus => BigInt::one(),
        };
        (
            DenomFactor {
                sign,
                weight: flipped.clone(),
            },
            Some((flipped, mult)),
        )
    }
}
