//! Finite integer combinations of exponentials of weights.
//!
//! Terms live in `(1/scale) P` for the weight lattice `P`: every exponent is
//! an integer coordinate vector at a common positive denominator `scale`,
//! kept minimal.  Multiplication, Weyl action and exact binomial division
//! all preserve this canonical form.

use crate::rootsys::{Coords, Weight};
use crate::weylgrp::WeylElement;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use smallvec::SmallVec;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Residue of an integer modulo `2^61 - 1`, computed from the magnitude
/// digits without allocating.
fn mod_mersenne61(c: &BigInt) -> i64 {
    const P: u128 = (1u128 << 61) - 1;
    // 2^64 = 8 * (2^61 - 1) + 8.
    let mut acc: u128 = 0;
    let mut pw: u128 = 1;
    for d in c.iter_u64_digits() {
        acc = (acc + u128::from(d) % P * pw) % P;
        pw = pw * 8 % P;
    }
    let m = acc as i64;
    if c.sign() == Sign::Minus {
        -m
    } else {
        m
    }
}

/// An element of the group ring, `sum of c_w * e^w` over finitely many
/// weights `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingElem {
    pub(crate) rank: usize,
    pub(crate) scale: i32,
    pub(crate) terms: BTreeMap<Coords, BigInt>,
}

impl GroupRingElem {
    pub fn zero(rank: usize) -> Self {
        GroupRingElem {
            rank,
            scale: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::monomial(&Weight::zero(rank), BigInt::one())
    }

    /// The single term `c * e^w`.
    pub fn monomial(w: &Weight, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(w.coords.clone(), c);
        }
        let mut e = GroupRingElem {
            rank: w.rank(),
            scale: w.scale,
            terms,
        };
        e.normalize_scale();
        e
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn scale(&self) -> i32 {
        self.scale
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `e^w` (zero when absent).
    pub fn coeff(&self, w: &Weight) -> BigInt {
        if self.scale % w.scale != 0 {
            return BigInt::zero();
        }
        let f = self.scale / w.scale;
        let key: Coords = w.coords.iter().map(|&c| c * f).collect();
        self.terms.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Iterates terms as `(Weight, coefficient)` pairs.
    pub fn iter_weights(&self) -> impl Iterator<Item = (Weight, &BigInt)> + '_ {
        self.terms
            .iter()
            .map(|(k, v)| (Weight::new(k.clone(), self.scale), v))
    }

    /// The set of weights with nonzero coefficient.
    pub fn support(&self) -> Vec<Weight> {
        self.iter_weights().map(|(w, _)| w).collect()
    }

    /// Restores the canonical minimal scale.
    fn normalize_scale(&mut self) {
        if self.scale == 1 {
            return;
        }
        let mut g = self.scale;
        for k in self.terms.keys() {
            for &c in k.iter() {
                g = g.gcd(&c.abs());
                if g == 1 {
                    return;
                }
            }
        }
        if self.terms.is_empty() {
            self.scale = 1;
            return;
        }
        self.scale /= g;
        let old = std::mem::take(&mut self.terms);
        self.terms = old
            .into_iter()
            .map(|(k, v)| (k.iter().map(|&c| c / g).collect(), v))
            .collect();
    }

    /// A copy whose terms are written at the given compatible scale.
    fn rescaled(&self, new_scale: i32) -> Self {
        assert!(new_scale % self.scale == 0, "incompatible scales");
        if new_scale == self.scale {
            return self.clone();
        }
        let f = new_scale / self.scale;
        GroupRingElem {
            rank: self.rank,
            scale: new_scale,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().map(|&c| c * f).collect(), v.clone()))
                .collect(),
        }
    }

    /// Adds `c` times a raw term, removing the entry if it cancels.
    pub(crate) fn add_term(&mut self, key: Coords, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`.
    pub fn add_scaled_assign(&mut self, other: &Self, c: &BigInt) {
        assert_eq!(self.rank, other.rank);
        if c.is_zero() || other.is_zero() {
            return;
        }
        let l = self.scale.lcm(&other.scale);
        if l != self.scale {
            *self = self.rescaled(l);
        }
        let f = l / other.scale;
        for (k, v) in &other.terms {
            let key: Coords = if f == 1 {
                k.clone()
            } else {
                k.iter().map(|&x| x * f).collect()
            };
            self.add_term(key, v * c);
        }
        self.normalize_scale();
    }

    /// Multiplies every coefficient by an integer.
    pub fn scalar_mul(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank);
        }
        GroupRingElem {
            rank: self.rank,
            scale: self.scale,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Multiplies by the single term `c * e^w`.
    pub fn mul_monomial(&self, w: &Weight, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.rank);
        }
        let l = self.scale.lcm(&w.scale);
        let sf = l / self.scale;
        let shift = w.coords_at_scale(l);
        let mut out = GroupRingElem {
            rank: self.rank,
            scale: l,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| {
                    let key: Coords = k
                        .iter()
                        .zip(&shift)
                        .map(|(&x, &s)| x * sf + s)
                        .collect();
                    (key, v * c)
                })
                .collect(),
        };
        out.normalize_scale();
        out
    }

    /// Full product of two elements.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.rank);
        }
        let (small, big) = if self.num_terms() <= other.num_terms() {
            (self, other)
        } else {
            (other, self)
        };
        let l = small.scale.lcm(&big.scale);
        let fs = l / small.scale;
        let fb = l / big.scale;
        let mut out = GroupRingElem {
            rank: self.rank,
            scale: l,
            terms: BTreeMap::new(),
        };
        for (ks, vs) in &small.terms {
            for (kb, vb) in &big.terms {
                let key: Coords = ks
                    .iter()
                    .zip(kb.iter())
                    .map(|(&a, &b)| a * fs + b * fb)
                    .collect();
                out.add_term(key, vs * vb);
            }
        }
        out.normalize_scale();
        out
    }

    /// Image under a Weyl group element (coefficients untouched).
    pub fn weyl_act(&self, w: &WeylElement) -> Self {
        assert_eq!(w.rank(), self.rank);
        GroupRingElem {
            rank: self.rank,
            scale: self.scale,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (w.apply_coords(k), v.clone()))
                .collect(),
        }
    }

    /// The image under `e^w -> e^{-w}`.
    pub fn dual(&self) -> Self {
        GroupRingElem {
            rank: self.rank,
            scale: self.scale,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().map(|&c| -c).collect(), v.clone()))
                .collect(),
        }
    }

    /// Greatest common divisor of all coefficients (zero for the zero
    /// element).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for v in self.terms.values() {
            g = g.gcd(v);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Exact division of every coefficient, or `None` if any remainder is
    /// nonzero.
    pub fn div_scalar_exact(&self, c: &BigInt) -> Option<Self> {
        assert!(!c.is_zero());
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            let (q, r) = v.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.insert(k.clone(), q);
        }
        Some(GroupRingElem {
            rank: self.rank,
            scale: self.scale,
            terms,
        })
    }

    /// Exact division by `1 - e^w` (or `1 + e^w` when `plus` is set),
    /// returning `None` when the element is not divisible.
    ///
    /// The exponents are mapped by a unimodular change of basis sending `w`
    /// to a multiple of the first axis, so each division reduces to running
    /// sums along lines.  Cost is near-linear in the number of terms plus
    /// the length of the occupied line segments.
    pub fn divide_binomial(&self, w: &Weight, plus: bool) -> Option<Self> {
        if w.is_zero() {
            if plus {
                // 1 + e^0 = 2.
                return self.div_scalar_exact(&BigInt::from(2));
            }
            panic!("division by the zero binomial 1 - e^0");
        }
        if self.is_zero() {
            return Some(Self::zero(self.rank));
        }
        let l = self.scale.lcm(&w.scale);
        let dir: Vec<i64> = w
            .coords_at_scale(l)
            .iter()
            .map(|&c| c as i64)
            .collect();
        let (u, v_inv, d) = unimodular_to_axis(&dir);
        let n = self.rank;
        let fs = (l / self.scale) as i64;

        // Group transformed exponents into lines parallel to the first axis
        // with step d.
        let mut lines: BTreeMap<(i64, Vec<i64>), BTreeMap<i64, BigInt>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut y = vec![0i64; n];
            for i in 0..n {
                let mut s = 0i64;
                for (j, &kj) in k.iter().enumerate() {
                    s += u[i][j] * (kj as i64) * fs;
                }
                y[i] = s;
            }
            let key = (y[0].rem_euclid(d), y[1..].to_vec());
            lines.entry(key).or_default().insert(y[0], c.clone());
        }

        let mut out = GroupRingElem {
            rank: n,
            scale: l,
            terms: BTreeMap::new(),
        };
        for ((_, rest), line) in &lines {
            let (&min, _) = line.first_key_value().expect("line is nonempty");
            let (&max, _) = line.last_key_value().expect("line is nonempty");
            let mut prev = BigInt::zero();
            let mut x = min;
            while x <= max {
                let fx = line.get(&x).cloned().unwrap_or_else(BigInt::zero);
                let g = if plus { fx - &prev } else { fx + &prev };
                if !g.is_zero() {
                    if x == max {
                        // Nonzero running value past the top of the line:
                        // the division leaves a remainder.
                        return None;
                    }
                    // Map the quotient exponent back to weight coordinates.
                    let mut key: Coords = SmallVec::with_capacity(n);
                    for row in v_inv.iter().take(n) {
                        let mut s = row[0] * x;
                        for (j, &rj) in rest.iter().enumerate() {
                            s += row[j + 1] * rj;
                        }
                        key.push(i32::try_from(s).expect("exponent fits in i32"));
                    }
                    out.add_term(key, g.clone());
                }
                prev = g;
                x += d;
            }
        }
        out.normalize_scale();
        Some(out)
    }

    /// True when `1 - e^w` (or `1 + e^w`) divides the element exactly.
    pub fn divisible_binomial(&self, w: &Weight, plus: bool) -> bool {
        self.divisible_hint(w, plus) && self.divide_binomial(w, plus).is_some()
    }

    /// Cheap necessary condition for divisibility by `1 - e^w` (or
    /// `1 + e^w`): the (alternating) coefficient sum along every line
    /// parallel to `w` must vanish, which is checked modulo a machine prime
    /// with lines folded into hash buckets.  A `false` answer is exact;
    /// `true` only makes the full division worth attempting, since a true
    /// divisor zeroes every line sum and any collision of zero sums is
    /// still zero.
    pub fn divisible_hint(&self, w: &Weight, plus: bool) -> bool {
        if self.is_zero() || w.is_zero() {
            return true;
        }
        let l = self.scale.lcm(&w.scale);
        let dir: Vec<i64> = w
            .coords_at_scale(l)
            .iter()
            .map(|&c| c as i64)
            .collect();
        let (u, _, d) = unimodular_to_axis(&dir);
        let n = self.rank;
        let fs = (l / self.scale) as i64;
        const P: i128 = ((1u128 << 61) - 1) as i128;
        let mut buckets: HashMap<u64, i128> = HashMap::with_capacity(self.terms.len());
        for (k, c) in &self.terms {
            let mut x0 = 0i64;
            let mut h = 0xcbf2_9ce4_8422_2325u64;
            for (i, row) in u.iter().enumerate().take(n) {
                let mut s = 0i64;
                for (j, &kj) in k.iter().enumerate() {
                    s += row[j] * i64::from(kj) * fs;
                }
                if i == 0 {
                    x0 = s;
                } else {
                    h = (h ^ (s as u64)).wrapping_mul(0x1000_0000_01b3);
                }
            }
            let r = x0.rem_euclid(d);
            h = (h ^ (r as u64)).wrapping_mul(0x1000_0000_01b3);
            let mut v = mod_mersenne61(c) as i128;
            if plus && ((x0 - r) / d) & 1 == 1 {
                v = -v;
            }
            *buckets.entry(h).or_insert(0) += v;
        }
        buckets.values().all(|&v| v % P == 0)
    }

    /// Multiplies by the binomial `1 - e^w` (or `1 + e^w`).
    pub fn mul_binomial(&self, w: &Weight, plus: bool) -> Self {
        let c = if plus { BigInt::one() } else { -BigInt::one() };
        let mut out = self.clone();
        out.add_scaled_assign(&self.mul_monomial(w, &BigInt::one()), &c);
        out
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        const LIMIT: usize = 12;
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i >= LIMIT {
                return write!(f, " + ({} more terms)", self.terms.len() - LIMIT);
            }
            if i > 0 {
                write!(f, " + ")?;
            }
            let w = Weight::new(k.clone(), self.scale);
            write!(f, "{v}*e{w}")?;
        }
        Ok(())
    }
}

impl std::ops::Add for &GroupRingElem {
    type Output = GroupRingElem;
    fn add(self, rhs: &GroupRingElem) -> GroupRingElem {
        let mut out = self.clone();
        out.add_scaled_assign(rhs, &BigInt::one());
        out
    }
}

impl std::ops::Sub for &GroupRingElem {
    type Output = GroupRingElem;
    fn sub(self, rhs: &GroupRingElem) -> GroupRingElem {
        let mut out = self.clone();
        out.add_scaled_assign(rhs, &-BigInt::one());
        out
    }
}

impl std::ops::Mul for &GroupRingElem {
    type Output = GroupRingElem;
    fn mul(self, rhs: &GroupRingElem) -> GroupRingElem {
        self.mul(rhs)
    }
}

impl std::ops::Neg for &GroupRingElem {
    type Output = GroupRingElem;
    fn neg(self) -> GroupRingElem {
        self.scalar_mul(&-BigInt::one())
    }
}

// ---- serialization ----

#[derive(serde::Serialize, serde::Deserialize)]
struct ElemRepr {
    rank: usize,
    scale: i32,
    terms: Vec<(Vec<i32>, String)>,
}

impl serde::Serialize for GroupRingElem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ElemRepr {
            rank: self.rank,
            scale: self.scale,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.to_vec(), v.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for GroupRingElem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ElemRepr::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for (k, v) in repr.terms {
            if k.len() != repr.rank {
                return Err(serde::de::Error::custom("exponent rank mismatch"));
            }
            let c: BigInt = v
                .parse()
                .map_err(|_| serde::de::Error::custom("bad coefficient"))?;
            if !c.is_zero() {
                terms.insert(k.into_iter().collect(), c);
            }
        }
        if repr.scale <= 0 {
            return Err(serde::de::Error::custom("scale must be positive"));
        }
        let mut e = GroupRingElem {
            rank: repr.rank,
            scale: repr.scale,
            terms,
        };
        e.normalize_scale();
        Ok(e)
    }
}

// ---- unimodular reduction ----

/// Extended gcd: returns `(g, x, y)` with `a x + b y = g >= 0`.
fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = extended_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Builds a unimodular `U` (and its inverse) with `U m = (d, 0, ..., 0)`,
/// `d = gcd(m) > 0`.
fn unimodular_to_axis(m: &[i64]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, i64) {
    let n = m.len();
    assert!(m.iter().any(|&x| x != 0), "zero direction");
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut v = u.clone();
    let mut w = m.to_vec();
    for i in 1..n {
        if w[i] == 0 {
            continue;
        }
        let (g, a, b) = extended_gcd(w[0], w[i]);
        let p = w[0] / g;
        let q = w[i] / g;
        for j in 0..n {
            let (u0, ui) = (u[0][j], u[i][j]);
            u[0][j] = a * u0 + b * ui;
            u[i][j] = -q * u0 + p * ui;
        }
        // Keep v = u^{-1} by applying the inverse block on columns.
        for row in v.iter_mut() {
            let (v0, vi) = (row[0], row[i]);
            row[0] = p * v0 + q * vi;
            row[i] = -b * v0 + a * vi;
        }
        w[0] = g;
        w[i] = 0;
    }
    if w[0] < 0 {
        for j in 0..n {
            u[0][j] = -u[0][j];
        }
        for row in v.iter_mut() {
            row[0] = -row[0];
        }
        w[0] = -w[0];
    }
    debug_assert!({
        let img: Vec<i64> = (0..n)
            .map(|i| (0..n).map(|j| u[i][j] * m[j]).sum())
            .collect();
        img[0] == w[0] && img[1..].iter().all(|&x| x == 0)
    });
    (u, v, w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{CartanType, RootSystem};
    use crate::weylgrp::enumerate_parabolic;
    use proptest::prelude::*;

    fn w(coords: Vec<i32>) -> Weight {
        Weight::from_coords(coords)
    }

    fn e(coords: Vec<i32>, c: i64) -> GroupRingElem {
        GroupRingElem::monomial(&w(coords), c)
    }

    #[test]
    fn monomial_products_add_exponents() {
        let a = e(vec![1, 0], 3);
        let b = e(vec![-2, 5], 7);
        let ab = &a * &b;
        assert_eq!(ab, e(vec![-1, 5], 21));
    }

    #[test]
    fn fractional_scales_align() {
        let half = GroupRingElem::monomial(&Weight::new(vec![1, 0], 2), 1);
        let third = GroupRingElem::monomial(&Weight::new(vec![0, 1], 3), 1);
        let p = &half * &third;
        assert_eq!(p.scale(), 6);
        assert_eq!(
            p.coeff(&Weight::new(vec![3, 2], 6)),
            BigInt::from(1)
        );
        let s = &half + &half;
        assert_eq!(s, GroupRingElem::monomial(&Weight::new(vec![1, 0], 2), 2));
        assert_eq!(s.scale(), 2);
        let cancel = &half - &half;
        assert!(cancel.is_zero());
        assert_eq!(cancel.scale(), 1);
    }

    #[test]
    fn geometric_series_division() {
        // (1 - e^{5w}) / (1 - e^w) = 1 + e^w + e^2w + e^3w + e^4w.
        let step = w(vec![1, -1]);
        let f = &GroupRingElem::one(2) - &GroupRingElem::monomial(&step.mul(5), 1);
        let q = f.divide_binomial(&step, false).unwrap();
        let mut expect = GroupRingElem::zero(2);
        for k in 0..5 {
            expect.add_scaled_assign(
                &GroupRingElem::monomial(&step.mul(k), 1),
                &BigInt::one(),
            );
        }
        assert_eq!(q, expect);
    }

    #[test]
    fn plus_binomial_division() {
        // (1 - e^{2k}) / (1 + e^k) = 1 - e^k.
        let k = w(vec![0, 1]);
        let f = &GroupRingElem::one(2) - &GroupRingElem::monomial(&k.mul(2), 1);
        let q = f.divide_binomial(&k, true).unwrap();
        let expect = &GroupRingElem::one(2) - &GroupRingElem::monomial(&k, 1);
        assert_eq!(q, expect);
        // 1 - e^k is not divisible by 1 + e^k.
        assert!(expect.divide_binomial(&k, true).is_none());
    }

    #[test]
    fn division_detects_remainders() {
        let step = w(vec![1, 0]);
        let f = &GroupRingElem::one(2) + &GroupRingElem::monomial(&step, 1);
        assert!(f.divide_binomial(&step, false).is_none());
        assert!(f.divisible_binomial(&step, true));
    }

    #[test]
    fn division_by_zero_plus_is_halving() {
        let z = Weight::zero(2);
        let f = e(vec![1, 1], 4);
        assert_eq!(f.divide_binomial(&z, true).unwrap(), e(vec![1, 1], 2));
        assert!(e(vec![1, 1], 3).divide_binomial(&z, true).is_none());
    }

    #[test]
    fn fractional_direction_division() {
        // Divide by 1 - e^{w/2} where the element lives at scale 1.
        let half = Weight::new(vec![1, 0], 2);
        let f = &GroupRingElem::one(2) - &e(vec![1, 0], 1);
        let q = f.divide_binomial(&half, false).unwrap();
        let expect = &GroupRingElem::one(2) + &GroupRingElem::monomial(&half, 1);
        assert_eq!(q, expect);
    }

    #[test]
    fn weyl_denominator_identity() {
        // Product over positive roots of (1 - e^{-a}), shifted by e^rho,
        // equals the signed sum of e^{w rho} over the Weyl group.
        for name in ["A2", "C2", "G2", "F4"] {
            let rs = RootSystem::new(CartanType::parse(name).unwrap()).unwrap();
            let mut prod = GroupRingElem::one(rs.rank);
            for alpha in &rs.positive_roots {
                prod = prod.mul_binomial(&alpha.neg(), false);
            }
            prod = prod.mul_monomial(&rs.rho, &BigInt::one());

            let all: Vec<usize> = (0..rs.rank).collect();
            let mut alt = GroupRingElem::zero(rs.rank);
            for g in enumerate_parabolic(&rs, &all).unwrap() {
                alt.add_scaled_assign(
                    &GroupRingElem::monomial(&g.apply(&rs.rho), 1),
                    &BigInt::from(g.sign()),
                );
            }
            assert_eq!(prod, alt, "denominator identity for {name}");
        }
    }

    #[test]
    fn serde_roundtrip() {
        let f = &e(vec![1, -2], 12345) + &GroupRingElem::monomial(&Weight::new(vec![1, 1], 3), -7);
        let json = serde_json::to_string(&f).unwrap();
        let back: GroupRingElem = serde_json::from_str(&json).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn unimodular_reduction_properties() {
        for m in [
            vec![2i64, 4, 6],
            vec![0, 3, 0],
            vec![-5, 7, 11],
            vec![0, 0, -4],
            vec![6, 10, 15],
        ] {
            let (u, v, d) = unimodular_to_axis(&m);
            let n = m.len();
            // U maps m to (d, 0, ..., 0).
            let img: Vec<i64> = (0..n)
                .map(|i| (0..n).map(|j| u[i][j] * m[j]).sum())
                .collect();
            assert_eq!(img[0], d);
            assert!(img[1..].iter().all(|&x| x == 0));
            assert!(d > 0);
            // V is the inverse of U.
            for i in 0..n {
                for j in 0..n {
                    let s: i64 = (0..n).map(|k| u[i][k] * v[k][j]).sum();
                    assert_eq!(s, i64::from(i == j));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn ring_axioms(
            ta in proptest::collection::vec((proptest::collection::vec(-4i32..5, 3), -5i64..6), 0..6),
            tb in proptest::collection::vec((proptest::collection::vec(-4i32..5, 3), -5i64..6), 0..6),
            tc in proptest::collection::vec((proptest::collection::vec(-4i32..5, 3), -5i64..6), 0..6),
        ) {
            let build = |ts: &Vec<(Vec<i32>, i64)>| {
                let mut f = GroupRingElem::zero(3);
                for (k, c) in ts {
                    f.add_scaled_assign(&e(k.clone(), 1), &BigInt::from(*c));
                }
                f
            };
            let (a, b, c) = (build(&ta), build(&tb), build(&tc));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn binomial_division_roundtrip(
            ts in proptest::collection::vec((proptest::collection::vec(-3i32..4, 3), -5i64..6), 0..6),
            dir in proptest::collection::vec(-2i32..3, 3).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0)),
            plus in proptest::bool::ANY,
        ) {
            let mut f = GroupRingElem::zero(3);
            for (k, c) in &ts {
                f.add_scaled_assign(&e(k.clone(), 1), &BigInt::from(*c));
            }
            let d = w(dir);
            let prod = f.mul_binomial(&d, plus);
            let q = prod.divide_binomial(&d, plus);
            prop_assert_eq!(q, Some(f));
        }

        #[test]
        fn weyl_action_is_ring_homomorphism(
            ta in proptest::collection::vec((proptest::collection::vec(-3i32..4, 2), -5i64..6), 0..5),
            tb in proptest::collection::vec((proptest::collection::vec(-3i32..4, 2), -5i64..6), 0..5),
            word in proptest::collection::vec(0usize..2, 0..5),
        ) {
            let rs = RootSystem::new(CartanType::parse("C2").unwrap()).unwrap();
            let g = WeylElement::from_word(&rs, &word).unwrap();
            let build = |ts: &Vec<(Vec<i32>, i64)>| {
                let mut f = GroupRingElem::zero(2);
                for (k, c) in ts {
                    f.add_scaled_assign(&e(k.clone(), 1), &BigInt::from(*c));
                }
                f
            };
            let (a, b) = (build(&ta), build(&tb));
            prop_assert_eq!(
                (&a * &b).weyl_act(&g),
                &a.weyl_act(&g) * &b.weyl_act(&g)
            );
            prop_assert_eq!(
                (&a + &b).weyl_act(&g),
                &a.weyl_act(&g) + &b.weyl_act(&g)
            );
        }
    }
}
