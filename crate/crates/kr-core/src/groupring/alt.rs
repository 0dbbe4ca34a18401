//! Weyl-alternating elements in the signed-orbit basis.
//!
//! An alternating element is a sum of signed orbits
//! `A(v) = sum over w of sign(w) e^{w v}` with `v` strictly dominant.  The
//! basis coefficient map is tiny compared to the expanded support (smaller
//! by roughly the order of the Weyl group), and multiplying by a Weyl
//! invariant element needs only one dominance walk per term pair.  Weyl
//! numerators of characters are single basis vectors here, which is what
//! keeps character products and long Q-system convolutions affordable.

use super::GroupRingElem;
use crate::rootsys::{Coords, RootSystem};
use crate::weylgrp::dominant_coords_with_sign;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;

/// An alternating element, stored as coefficients on the signed-orbit basis
/// `A(v)` with `v` strictly dominant and integral.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AltForm {
    pub(crate) rank: usize,
    pub(crate) terms: BTreeMap<Coords, BigInt>,
}

impl AltForm {
    pub fn zero(rank: usize) -> Self {
        AltForm {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Basis coefficient of `A(v)`.
    pub fn coeff(&self, v: &Coords) -> BigInt {
        self.terms.get(v).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Iterates `(v, coefficient)` over the strictly dominant basis points.
    pub fn iter(&self) -> impl Iterator<Item = (&Coords, &BigInt)> + '_ {
        self.terms.iter()
    }

    /// Adds `c * A(walked)` where `walked` is the dominant representative of
    /// `coords`; contributions on chamber walls vanish.
    pub fn add_reduced(&mut self, rs: &RootSystem, coords: Coords, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let mut v = coords;
        let Some(sign) = dominant_coords_with_sign(rs, &mut v) else {
            return;
        };
        let signed = if sign < 0 { -c } else { c.clone() };
        use std::collections::btree_map::Entry;
        match self.terms.entry(v) {
            Entry::Vacant(e) => {
                e.insert(signed);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += signed;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// The single basis vector `c * A(v)`; `v` may start anywhere.
    pub fn single(rs: &RootSystem, coords: Coords, c: impl Into<BigInt>) -> Self {
        let mut out = AltForm::zero(rs.rank);
        out.add_reduced(rs, coords, &c.into());
        out
    }

    /// `self += c * other` (both already reduced).
    pub fn add_scaled_assign(&mut self, other: &Self, c: &BigInt) {
        assert_eq!(self.rank, other.rank);
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            let cv = v * c;
            use std::collections::btree_map::Entry;
            match self.terms.entry(k.clone()) {
                Entry::Vacant(e) => {
                    e.insert(cv);
                }
                Entry::Occupied(mut e) => {
                    *e.get_mut() += cv;
                    if e.get().is_zero() {
                        e.remove();
                    }
                }
            }
        }
    }

    /// Reads an alternating expanded element into basis form by collecting
    /// its strictly dominant exponents.  The caller promises the input is
    /// genuinely alternating; the roundtrip is validated in debug builds.
    pub fn from_alternating_elem(rs: &RootSystem, f: &GroupRingElem) -> Self {
        assert_eq!(f.scale(), 1, "alternating basis needs integral weights");
        let mut out = AltForm::zero(rs.rank);
        for (k, c) in &f.terms {
            if k.iter().all(|&x| x > 0) {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        debug_assert_eq!(&out.to_elem(rs), f, "input was not alternating");
        out
    }

    /// Expands back to the group ring as signed orbit sums.
    pub fn to_elem(&self, rs: &RootSystem) -> GroupRingElem {
        let mut out = GroupRingElem::zero(self.rank);
        for (v, c) in &self.terms {
            // Signed orbit traversal; v is regular so the orbit is free and
            // each point carries a well-defined sign.
            let mut stack = vec![(v.clone(), 1i32)];
            let mut seen: BTreeMap<Coords, i32> = BTreeMap::new();
            seen.insert(v.clone(), 1);
            while let Some((p, sign)) = stack.pop() {
                out.add_term(p.clone(), if sign < 0 { -c.clone() } else { c.clone() });
                for a in 0..self.rank {
                    if p[a] == 0 {
                        continue;
                    }
                    let mut q = p.clone();
                    let qa = q[a];
                    for i in 0..self.rank {
                        q[i] -= qa * rs.cartan[i][a] as i32;
                    }
                    if !seen.contains_key(&q) {
                        seen.insert(q.clone(), -sign);
                        stack.push((q, -sign));
                    }
                }
            }
        }
        out
    }

    /// Product with a Weyl-invariant element, one dominance walk per term
    /// pair: `f * A(v) = sum over exponents u of f of f_u A(v + u)`.
    pub fn mul_invariant(&self, rs: &RootSystem, f: &GroupRingElem) -> Self {
        assert_eq!(f.scale(), 1, "invariant factor must be integral");
        assert_eq!(f.rank(), self.rank);
        let mut out = AltForm::zero(self.rank);
        for (v, c) in &self.terms {
            for (u, cu) in &f.terms {
                let shifted: Coords = v.iter().zip(u.iter()).map(|(&a, &b)| a + b).collect();
                out.add_reduced(rs, shifted, &(c * cu));
            }
        }
        out
    }

    pub fn scalar_mul(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return AltForm::zero(self.rank);
        }
        AltForm {
            rank: self.rank,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{CartanType, Weight};
    use crate::weylgrp::enumerate_parabolic;
    use num_traits::One;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(CartanType::parse(s).unwrap()).unwrap()
    }

    fn signed_orbit_sum(r: &RootSystem, v: &Weight) -> GroupRingElem {
        let all: Vec<usize> = (0..r.rank).collect();
        let mut out = GroupRingElem::zero(r.rank);
        for g in enumerate_parabolic(r, &all).unwrap() {
            out.add_scaled_assign(
                &GroupRingElem::monomial(&g.apply(v), 1),
                &BigInt::from(g.sign()),
            );
        }
        out
    }

    #[test]
    fn basis_vector_expands_to_signed_orbit() {
        let r = rs("C2");
        let v = Weight::from_coords(vec![2, 1]);
        let alt = AltForm::single(&r, v.coords.clone(), 1);
        assert_eq!(alt.to_elem(&r), signed_orbit_sum(&r, &v));
    }

    #[test]
    fn wall_contributions_vanish() {
        let r = rs("A2");
        let alt = AltForm::single(&r, Weight::from_coords(vec![0, 2]).coords, 5);
        assert!(alt.is_zero());
        // A reflected regular point folds back with a sign.
        let moved = r.reflect(0, &Weight::from_coords(vec![1, 2]));
        let alt = AltForm::single(&r, moved.coords, 1);
        assert_eq!(alt.coeff(&Weight::from_coords(vec![1, 2]).coords), BigInt::from(-1));
    }

    #[test]
    fn roundtrip_from_alternating_elem() {
        let r = rs("F4");
        let mut alt = AltForm::single(&r, r.rho.coords.clone(), 3);
        alt.add_scaled_assign(
            &AltForm::single(&r, Weight::from_coords(vec![2, 1, 1, 3]).coords, -2),
            &BigInt::one(),
        );
        let expanded = alt.to_elem(&r);
        assert_eq!(AltForm::from_alternating_elem(&r, &expanded), alt);
    }

    #[test]
    fn invariant_product_matches_expanded_product() {
        let r = rs("C2");
        // Invariant: the full orbit sum of a weight plus a constant.
        let mut inv = GroupRingElem::one(2);
        for p in crate::weylgrp::orbit(&r, &Weight::from_coords(vec![1, 0])) {
            inv.add_scaled_assign(&GroupRingElem::monomial(&p, 1), &BigInt::one());
        }
        let alt = AltForm::single(&r, r.rho.coords.clone(), 1);
        let product = alt.mul_invariant(&r, &inv);
        let expanded = &alt.to_elem(&r) * &inv;
        assert_eq!(product.to_elem(&r), expanded);
    }
}
