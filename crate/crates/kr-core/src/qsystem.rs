//! Level series of characters, their linear recurrences, and exact residue
//! extraction of series coefficients.
//!
//! The level series of a node `a` is the sequence `Q_0, Q_1, ...` of
//! characters satisfying `Q_{m+1} = (Q_m^2 - M_m) / Q_{m-1}`, where the mixed
//! term `M_m` couples neighbouring nodes through the Cartan matrix.  Each
//! series is a rational function of an auxiliary variable `t`: its factored
//! denominator is described by a [`LambdaTable`], and the coefficients
//! attached to the denominator's simple poles are exact group ring fractions
//! recovered by [`residue_from_numerator`].
//!
//! Invariants kept by this module:
//! - series terms are honest character combinations; every division in the
//!   recursion is checked exact in the character basis,
//! - a recurrence check multiplies the series by the factored denominator
//!   and demands that coefficients beyond the numerator degree vanish,
//! - residue values transform equivariantly under the Weyl group, so
//!   coefficients at non-dominant poles are Weyl transports of dominant ones.
//!
//! Nodes are numbered 1 through the rank in every public signature.

use crate::charformula::{divide_by_denominator, CharCache, CharCombo, CharError};
use crate::groupring::{AltForm, FactorSign, GeoFraction, GroupRingElem, RingError};
use crate::rootsys::{Family, Rat, RootSystem, Weight};
use crate::weylgrp::{enumerate_parabolic, orbit, orbit_with_elements, WeylElement, WeylError};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QError {
    #[error("no built-in coefficient table for {0}")]
    UnknownTable(String),
    #[error("invalid coefficient table: {0}")]
    BadTable(String),
    #[error("node {node} is out of range for rank {rank}")]
    BadNode { node: usize, rank: usize },
    #[error("no built-in first-level seed for {cartan} node {node}")]
    MissingSeed { cartan: String, node: usize },
    #[error("character division failed for node {node} at level {level}")]
    DivisionFailure { node: usize, level: usize },
    #[error("series stops satisfying the recurrence at index {index}")]
    RecurrenceViolation { index: usize },
    #[error("pole is not simple: {0}")]
    PoleNotSimple(String),
    #[error("unknown pole: {0}")]
    UnknownPole(String),
    #[error("need at least {needed} series terms, have {have}")]
    NotEnoughTerms { needed: usize, have: usize },
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

// ---- pole bookkeeping ----

/// A simple pole of a level series in the `t`-plane, sitting at
/// `t0 = zeta^{-j} e^{-lambda / l}` for the root of unity `zeta` of order
/// `l = zeta_order` and `j = zeta_index`.  Plain poles have order 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleSpec {
    pub weight: Weight,
    pub zeta_order: u32,
    pub zeta_index: u32,
}

impl PoleSpec {
    /// A pole with no root of unity attached.
    pub fn plain(weight: Weight) -> Self {
        PoleSpec {
            weight,
            zeta_order: 1,
            zeta_index: 0,
        }
    }
}

impl fmt::Display for PoleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zeta_order == 1 {
            write!(f, "{}", self.weight)
        } else {
            write!(
                f,
                "({}; zeta^{} of order {})",
                self.weight, self.zeta_index, self.zeta_order
            )
        }
    }
}

// ---- denominator tables ----

/// Factored denominator of one node's level series.  Entries of `lambda`
/// contribute factors `1 - e^w t` over their full Weyl orbits; entries of
/// `lambda_prime` contribute `1 - e^w t^{t_a}`.  Both lists hold dominant
/// orbit representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaTable {
    /// 1-based node index.
    pub node: usize,
    pub lambda: Vec<Weight>,
    pub lambda_prime: Vec<Weight>,
}

/// The built-in table for a node, when one is known.
pub fn lambda_table(rs: &RootSystem, node: usize) -> Result<LambdaTable, QError> {
    if node == 0 || node > rs.rank {
        return Err(QError::BadNode {
            node,
            rank: rs.rank,
        });
    }
    let a = node - 1;
    let fund = Weight::fundamental(a, rs.rank);
    let w4 = |c: [i32; 4]| Weight::from_coords(c.to_vec());
    let (lambda, lambda_prime) = match (rs.cartan_type.family, rs.rank) {
        // Fundamental representations are minuscule here, so the pole set is
        // a single orbit.
        (Family::A, _) => (vec![fund], vec![]),
        (Family::C, 2) => match a {
            0 => (vec![fund], vec![Weight::zero(2)]),
            _ => (vec![Weight::zero(2), fund], vec![]),
        },
        (Family::F, 4) => match a {
            0 => (vec![w4([0, 0, 0, 0]), w4([1, 0, 0, 0])], vec![]),
            1 => (
                vec![
                    w4([0, 0, 0, 0]),
                    w4([1, 0, 0, 0]),
                    w4([0, 1, 0, 0]),
                    w4([0, 0, 0, 2]),
                ],
                vec![],
            ),
            2 => (
                vec![w4([0, 0, 1, 0])],
                vec![
                    w4([0, 0, 0, 0]),
                    w4([1, 0, 0, 0]),
                    w4([2, 0, 0, 0]),
                    w4([0, 1, 0, 0]),
                    w4([0, 0, 0, 2]),
                    w4([1, 0, 0, 2]),
                ],
            ),
            _ => (vec![w4([0, 0, 0, 1])], vec![w4([0, 0, 0, 0]), w4([1, 0, 0, 0])]),
        },
        _ => {
            return Err(QError::UnknownTable(format!(
                "{} node {node}",
                rs.cartan_type
            )))
        }
    };
    LambdaTable::from_parts(rs, node, lambda, lambda_prime)
}

impl LambdaTable {
    /// Builds and validates a table from explicit pole lists.
    pub fn from_parts(
        rs: &RootSystem,
        node: usize,
        lambda: Vec<Weight>,
        lambda_prime: Vec<Weight>,
    ) -> Result<Self, QError> {
        let table = LambdaTable {
            node,
            lambda,
            lambda_prime,
        };
        table.validate(rs)?;
        Ok(table)
    }

    /// Checks the structural constraints the residue machinery relies on.
    pub fn validate(&self, rs: &RootSystem) -> Result<(), QError> {
        if self.node == 0 || self.node > rs.rank {
            return Err(QError::BadNode {
                node: self.node,
                rank: rs.rank,
            });
        }
        let a = self.node - 1;
        let t_a = rs.t[a];
        for w in self.lambda.iter().chain(&self.lambda_prime) {
            if w.rank() != rs.rank {
                return Err(QError::BadTable(format!(
                    "weight {w} has rank {}, expected {}",
                    w.rank(),
                    rs.rank
                )));
            }
            if !w.is_integral() || !w.is_dominant() {
                return Err(QError::BadTable(format!(
                    "weight {w} is not dominant integral"
                )));
            }
        }
        for (name, list) in [("lambda", &self.lambda), ("lambda_prime", &self.lambda_prime)] {
            for (i, w) in list.iter().enumerate() {
                if list[..i].contains(w) {
                    return Err(QError::BadTable(format!("duplicate weight {w} in {name}")));
                }
            }
        }
        let fund = Weight::fundamental(a, rs.rank);
        if !self.lambda.contains(&fund) {
            return Err(QError::BadTable(format!(
                "fundamental weight {fund} missing from lambda"
            )));
        }
        if t_a == 1 && !self.lambda_prime.is_empty() {
            return Err(QError::BadTable(
                "lambda_prime entries need a node with t > 1".into(),
            ));
        }
        for w in &self.lambda {
            let scaled = w.mul(t_a as i32);
            if self.lambda_prime.contains(&scaled) {
                return Err(QError::BadTable(format!(
                    "{scaled} appears both as a scaled lambda orbit and in lambda_prime"
                )));
            }
        }
        Ok(())
    }

    /// The power of `t` carried by `lambda_prime` factors.
    pub fn t_value(&self, rs: &RootSystem) -> i64 {
        rs.t[self.node - 1]
    }

    /// Every denominator factor `(w, b)` standing for `1 - e^w t^b`, with
    /// orbits fully expanded.
    pub fn denominator_factors(&self, rs: &RootSystem) -> Vec<(Weight, u32)> {
        let t_a = self.t_value(rs) as u32;
        let mut out = Vec::new();
        for rep in &self.lambda {
            for w in orbit(rs, rep) {
                out.push((w, 1));
            }
        }
        for rep in &self.lambda_prime {
            for w in orbit(rs, rep) {
                out.push((w, t_a));
            }
        }
        out
    }

    /// Degree of the expanded denominator polynomial in `t`.
    pub fn deg_d(&self, rs: &RootSystem) -> usize {
        self.denominator_factors(rs)
            .iter()
            .map(|&(_, b)| b as usize)
            .sum()
    }

    /// The poles carrying independent coefficients: dominant representatives
    /// only, with every root-of-unity index for `lambda_prime` entries.
    pub fn poles(&self, rs: &RootSystem) -> Vec<PoleSpec> {
        let t_a = self.t_value(rs) as u32;
        let mut out: Vec<PoleSpec> = self.lambda.iter().cloned().map(PoleSpec::plain).collect();
        for rep in &self.lambda_prime {
            for j in 0..t_a {
                out.push(PoleSpec {
                    weight: rep.clone(),
                    zeta_order: t_a,
                    zeta_index: j,
                });
            }
        }
        out
    }
}

/// Coefficients of the expanded denominator as a polynomial in `t`.
pub fn denominator_poly(rs: &RootSystem, table: &LambdaTable) -> Vec<GroupRingElem> {
    let mut poly = vec![GroupRingElem::one(rs.rank)];
    for (w, b) in table.denominator_factors(rs) {
        let b = b as usize;
        let mut next = poly.clone();
        next.extend(std::iter::repeat(GroupRingElem::zero(rs.rank)).take(b));
        for (k, coeff) in poly.iter().enumerate() {
            let shifted = coeff.mul_monomial(&w, &-BigInt::one());
            next[k + b].add_scaled_assign(&shifted, &BigInt::one());
        }
        poly = next;
    }
    poly
}

// ---- level series ----

/// Consecutive terms `Q_0, Q_1, ...` of one node's level series, stored as
/// character combinations.
#[derive(Debug, Clone)]
pub struct QSeries {
    /// 1-based node index.
    pub node: usize,
    pub terms: Vec<CharCombo>,
}

impl QSeries {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(&self, m: usize) -> &CharCombo {
        &self.terms[m]
    }

    /// First difference `Q_m - Q_{m-1}`, with `Q_{-1} = 0`.
    pub fn delta(&self, m: usize) -> CharCombo {
        let mut out = self.terms[m].clone();
        if m > 0 {
            out.add_scaled_assign(&self.terms[m - 1], &-BigInt::one());
        }
        out
    }
}

/// Floor division for possibly negative operands.
fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    let r = a % b;
    if r != 0 && ((r < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// The term of the character combination with the largest height, breaking
/// ties lexicographically on coordinates.
fn leading_term(rs: &RootSystem, c: &CharCombo) -> Option<(Weight, BigInt)> {
    let mut best: Option<(Weight, BigInt, Rat)> = None;
    for (w, coeff) in c.iter() {
        let h = rs.height(&w);
        let better = match &best {
            None => true,
            Some((bw, _, bh)) => h > *bh || (h == *bh && w.coords > bw.coords),
        };
        if better {
            best = Some((w, coeff.clone(), h));
        }
    }
    best.map(|(w, c, _)| (w, c))
}

/// Exact division in the character ring by cancelling leading terms.
/// Returns `None` when the quotient does not exist as a character
/// combination with the required exact coefficients.
fn char_div(
    cache: &CharCache,
    numer: &CharCombo,
    denom: &CharCombo,
) -> Result<Option<CharCombo>, CharError> {
    let rs = cache.root_system();
    let Some((dw, dc)) = leading_term(rs, denom) else {
        return Ok(None);
    };
    let mut rem = numer.clone();
    let mut quot = CharCombo::zero(rs.rank);
    while !rem.is_zero() {
        let (rw, rc) = leading_term(rs, &rem).expect("nonzero combination has a leading term");
        let qw = rw.sub(&dw);
        if !qw.is_integral() || !qw.is_dominant() {
            return Ok(None);
        }
        let (qc, r) = rc.div_rem(&dc);
        if !r.is_zero() {
            return Ok(None);
        }
        let qterm = CharCombo::single(&qw, qc);
        quot.add_scaled_assign(&qterm, &BigInt::one());
        let prod = qterm.mul(cache, denom)?;
        rem.add_scaled_assign(&prod, &-BigInt::one());
    }
    Ok(Some(quot))
}

/// Demand-driven solver for the level recursion
/// `Q_{m+1} = (Q_m^2 - M_m) / Q_{m-1}`.
///
/// First-level terms are seeded per node; built-in seeds exist where the
/// level-one character is classical (single fundamental characters, plus the
/// cumulative seed for the first F4 node).  All other nodes need
/// [`QEngine::set_seed`].
pub struct QEngine<'a> {
    cache: &'a CharCache,
    memo: RefCell<HashMap<(usize, usize), CharCombo>>,
    active: RefCell<HashSet<(usize, usize)>>,
    seeds: RefCell<HashMap<usize, CharCombo>>,
}

impl<'a> QEngine<'a> {
    pub fn new(cache: &'a CharCache) -> Self {
        QEngine {
            cache,
            memo: RefCell::new(HashMap::new()),
            active: RefCell::new(HashSet::new()),
            seeds: RefCell::new(HashMap::new()),
        }
    }

    pub fn cache(&self) -> &CharCache {
        self.cache
    }

    /// Overrides the level-one term for a node (1-based).
    pub fn set_seed(&self, node: usize, q1: CharCombo) {
        self.seeds.borrow_mut().insert(node - 1, q1);
    }

    fn seed(&self, a: usize) -> Result<CharCombo, QError> {
        if let Some(s) = self.seeds.borrow().get(&a) {
            return Ok(s.clone());
        }
        let rs = self.cache.root_system();
        let fund = Weight::fundamental(a, rs.rank);
        let seed = match (rs.cartan_type.family, rs.rank, a) {
            (Family::A, _, _) | (Family::C, 2, _) => CharCombo::single(&fund, 1),
            (Family::F, 4, 0) => {
                let mut s = CharCombo::single(&Weight::zero(rs.rank), 1);
                s.add_scaled_assign(&CharCombo::single(&fund, 1), &BigInt::one());
                s
            }
            _ => {
                return Err(QError::MissingSeed {
                    cartan: rs.cartan_type.to_string(),
                    node: a + 1,
                })
            }
        };
        self.seeds.borrow_mut().insert(a, seed.clone());
        Ok(seed)
    }

    /// Product of neighbour terms entering the recursion at level `m`.
    fn mixed(&self, a: usize, m: usize) -> Result<CharCombo, QError> {
        let rs = self.cache.root_system();
        let mut out = CharCombo::single(&Weight::zero(rs.rank), 1);
        for b in 0..rs.rank {
            let c_ab = rs.cartan[a][b];
            if b == a || c_ab >= 0 {
                continue;
            }
            let c_ba = rs.cartan[b][a];
            for k in 0..(-c_ab) {
                let idx = floor_div(c_ba * m as i64 - k, c_ab);
                debug_assert!(idx >= 0, "level indices in the mixed term are nonnegative");
                let factor = self.q(b + 1, idx as usize)?;
                out = out.mul(self.cache, &factor)?;
            }
        }
        Ok(out)
    }

    /// The level-`m` term for a node (1-based), computed on demand.
    pub fn q(&self, node: usize, m: usize) -> Result<CharCombo, QError> {
        let rs = self.cache.root_system();
        if node == 0 || node > rs.rank {
            return Err(QError::BadNode {
                node,
                rank: rs.rank,
            });
        }
        let a = node - 1;
        if m == 0 {
            return Ok(CharCombo::single(&Weight::zero(rs.rank), 1));
        }
        if let Some(hit) = self.memo.borrow().get(&(a, m)) {
            return Ok(hit.clone());
        }
        if m == 1 {
            let s = self.seed(a)?;
            self.memo.borrow_mut().insert((a, 1), s.clone());
            return Ok(s);
        }
        if !self.active.borrow_mut().insert((a, m)) {
            return Err(QError::BadTable(format!(
                "recursion cycle at node {node} level {m}"
            )));
        }
        let result = (|| {
            let prev = self.q(node, m - 1)?;
            let prev2 = self.q(node, m - 2)?;
            let mixed = self.mixed(a, m - 1)?;
            let mut num = prev.mul(self.cache, &prev)?;
            num.add_scaled_assign(&mixed, &-BigInt::one());
            match char_div(self.cache, &num, &prev2)? {
                Some(q) => Ok(q),
                None => Err(QError::DivisionFailure { node, level: m }),
            }
        })();
        self.active.borrow_mut().remove(&(a, m));
        let value = result?;
        self.memo.borrow_mut().insert((a, m), value.clone());
        Ok(value)
    }

    /// Terms `Q_0..Q_max_m` as a series.
    pub fn series(&self, node: usize, max_m: usize) -> Result<QSeries, QError> {
        let mut terms = Vec::with_capacity(max_m + 1);
        for m in 0..=max_m {
            terms.push(self.q(node, m)?);
        }
        Ok(QSeries { node, terms })
    }
}

// ---- F4 closed forms ----

fn ensure_f4(rs: &RootSystem) -> Result<(), QError> {
    if rs.cartan_type.family == Family::F && rs.rank == 4 {
        Ok(())
    } else {
        Err(QError::UnknownTable(format!(
            "closed form needs type F4, got {}",
            rs.cartan_type
        )))
    }
}

/// Level-`m` term of the first F4 node: the cumulative sum of characters of
/// multiples of the first fundamental weight.
pub fn q1_f4(rs: &RootSystem, m: usize) -> Result<CharCombo, QError> {
    ensure_f4(rs)?;
    let fund = Weight::fundamental(0, 4);
    let mut out = CharCombo::zero(4);
    for k in 0..=m {
        out.add_scaled_assign(&CharCombo::single(&fund.mul(k as i32), 1), &BigInt::one());
    }
    Ok(out)
}

/// Terms `Q_0..Q_max_m` of the first F4 node.
pub fn f4_node1_series(rs: &RootSystem, max_m: usize) -> Result<QSeries, QError> {
    let mut terms = Vec::with_capacity(max_m + 1);
    for m in 0..=max_m {
        terms.push(q1_f4(rs, m)?);
    }
    Ok(QSeries { node: 1, terms })
}

/// Terms `Q_0..Q_max_m` of the second F4 node, obtained from the recursion
/// of the first node: `Q2_m = (Q1_m)^2 - Q1_{m-1} Q1_{m+1}`.
pub fn f4_node2_series(cache: &CharCache, max_m: usize) -> Result<QSeries, QError> {
    let rs = cache.root_system();
    ensure_f4(rs)?;
    let mut terms = vec![CharCombo::single(&Weight::zero(4), 1)];
    for m in 1..=max_m {
        let qm = q1_f4(rs, m)?;
        let prev = q1_f4(rs, m - 1)?;
        let next = q1_f4(rs, m + 1)?;
        let mut val = qm.mul(cache, &qm)?;
        val.add_scaled_assign(&prev.mul(cache, &next)?, &-BigInt::one());
        terms.push(val);
    }
    Ok(QSeries { node: 2, terms })
}

// ---- recurrence check ----

/// Numerator recovered by multiplying a series with its factored
/// denominator, plus the range of indices verified to vanish beyond it.
#[derive(Debug, Clone)]
pub struct RecurrenceReport {
    pub deg_d: usize,
    /// Coefficients `N_0, N_1, ...` of the numerator polynomial in `t`,
    /// trailing zeros trimmed.
    pub numerator: Vec<GroupRingElem>,
    /// Highest series index whose product coefficient was checked.
    pub checked_through: usize,
}

/// Multiplies the series by the table's denominator and splits the result:
/// coefficients below the denominator degree form the numerator, and all
/// later coefficients must vanish.
pub fn check_linear_recurrence(
    rs: &RootSystem,
    table: &LambdaTable,
    series: &QSeries,
) -> Result<RecurrenceReport, QError> {
    let deg = table.deg_d(rs);
    let len = series.len();
    if len < deg {
        return Err(QError::NotEnoughTerms {
            needed: deg,
            have: len,
        });
    }
    let d_poly = denominator_poly(rs, table);
    debug_assert_eq!(d_poly.len(), deg + 1);
    let deltas: Vec<AltForm> = (0..len)
        .map(|i| series.delta(i).numerator_form(rs))
        .collect();
    // Running value of the product coefficient at index k, updated through
    // first differences so each step multiplies only small numerators.
    let mut running = AltForm::zero(rs.rank);
    let mut numerator = Vec::new();
    for k in 0..len {
        for j in 0..=k.min(deg) {
            let part = deltas[k - j].mul_invariant(rs, &d_poly[j]);
            running.add_scaled_assign(&part, &BigInt::one());
        }
        if k < deg {
            let elem = running.to_elem(rs);
            let nk = divide_by_denominator(rs, &elem)
                .expect("alternating numerator coefficient is divisible");
            numerator.push(nk);
        } else if !running.is_zero() {
            return Err(QError::RecurrenceViolation { index: k });
        }
    }
    while numerator.last().is_some_and(|f| f.is_zero()) {
        numerator.pop();
    }
    Ok(RecurrenceReport {
        deg_d: deg,
        numerator,
        checked_through: len - 1,
    })
}

// ---- residue extraction ----

/// One extracted series coefficient.  Plain and order-2 poles carry a single
/// rational component; order-3 poles carry two components `a + b zeta` over
/// a primitive cube root of unity `zeta`.
#[derive(Debug, Clone)]
pub struct ResidueCoeff {
    pub pole: PoleSpec,
    pub components: Vec<GeoFraction>,
}

impl ResidueCoeff {
    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GeoFraction::is_zero)
    }
}

/// Value in the group ring fraction field extended by a root of unity of
/// order at most 3.  Order 1 and 2 need one rational part; order 3 keeps
/// coordinates over the basis `1, zeta` with `zeta^2 = -1 - zeta`.
#[derive(Debug, Clone)]
struct CycloValue {
    order: u32,
    parts: Vec<GeoFraction>,
}

impl CycloValue {
    fn zero(rank: usize, order: u32) -> Self {
        let n = if order == 3 { 2 } else { 1 };
        CycloValue {
            order,
            parts: vec![GeoFraction::zero(rank); n],
        }
    }

    /// Adds `e * zeta^exp`.
    fn add_elem(&mut self, e: &GroupRingElem, exp: u32) {
        let f = GeoFraction::from_elem(e.clone());
        match (self.order, exp % self.order.max(1)) {
            (1, _) | (2, 0) | (3, 0) => self.parts[0] = self.parts[0].add(&f),
            (2, _) => self.parts[0] = self.parts[0].sub(&f),
            (3, 1) => self.parts[1] = self.parts[1].add(&f),
            (3, _) => {
                self.parts[0] = self.parts[0].sub(&f);
                self.parts[1] = self.parts[1].sub(&f);
            }
            _ => unreachable!("orders are 1, 2 or 3"),
        }
    }

    fn div_scalar(&mut self, c: i64) {
        for p in &mut self.parts {
            *p = p.clone().div_scalar(&BigInt::from(c));
        }
    }

    /// Multiplies by the element pair `m0 + m1 zeta` (order 3 only).
    fn mul_pair(&mut self, m0: &GroupRingElem, m1: &GroupRingElem) {
        debug_assert_eq!(self.order, 3);
        let a0 = self.parts[0].clone();
        let a1 = self.parts[1].clone();
        // (a0 + a1 z)(m0 + m1 z) with z^2 = -1 - z.
        let p00 = a0.mul_elem(m0);
        let p11 = a1.mul_elem(m1);
        let p01 = a0.mul_elem(m1);
        let p10 = a1.mul_elem(m0);
        self.parts[0] = p00.sub(&p11);
        self.parts[1] = p01.add(&p10).sub(&p11);
    }

    /// Divides by `1 - zeta^exp e^kappa`, the value of one denominator
    /// factor at the pole.
    fn div_eval_factor(&mut self, exp: u32, kappa: &Weight, context: &PoleSpec) -> Result<(), QError> {
        let l = self.order;
        let e = exp % l.max(1);
        if kappa.is_zero() {
            return match (l, e) {
                (_, 0) => Err(QError::PoleNotSimple(format!(
                    "a second denominator factor vanishes at pole {context}"
                ))),
                (2, _) => {
                    self.div_scalar(2);
                    Ok(())
                }
                (3, 1) => {
                    // 1 / (1 - zeta) = (2 + zeta) / 3.
                    let rank = kappa.rank();
                    self.mul_pair(
                        &GroupRingElem::one(rank).scalar_mul(&BigInt::from(2)),
                        &GroupRingElem::one(rank),
                    );
                    self.div_scalar(3);
                    Ok(())
                }
                (3, _) => {
                    // 1 / (1 - zeta^2) = (1 - zeta) / 3.
                    let rank = kappa.rank();
                    self.mul_pair(
                        &GroupRingElem::one(rank),
                        &GroupRingElem::one(rank).scalar_mul(&-BigInt::one()),
                    );
                    self.div_scalar(3);
                    Ok(())
                }
                _ => unreachable!("orders are 1, 2 or 3"),
            };
        }
        match (l, e) {
            (_, 0) => {
                for p in &mut self.parts {
                    *p = p.clone().div_factor(FactorSign::Minus, kappa)?;
                }
            }
            (2, _) => {
                self.parts[0] = self.parts[0].clone().div_factor(FactorSign::Plus, kappa)?;
            }
            (3, rem) => {
                // 1/(1 - zeta   e^k) = (1 + zeta e^k - e^{2k} - zeta e^{2k}) / (1 - e^{3k})
                // 1/(1 - zeta^2 e^k) = (1 - e^k - zeta e^k + zeta e^{2k})   / (1 - e^{3k})
                let one = GroupRingElem::one(kappa.rank());
                let ek = GroupRingElem::monomial(kappa, 1);
                let e2k = GroupRingElem::monomial(&kappa.mul(2), 1);
                let (m0, m1) = if rem == 1 {
                    (&one - &e2k, &ek - &e2k)
                } else {
                    (&one - &ek, &e2k - &ek)
                };
                self.mul_pair(&m0, &m1);
                for p in &mut self.parts {
                    *p = p.clone().div_factor(FactorSign::Minus, &kappa.mul(3))?;
                }
            }
            _ => unreachable!("orders are 1, 2 or 3"),
        }
        Ok(())
    }
}

/// `(-j * b) mod l` as a nonnegative exponent.
fn zeta_exp(j: u32, b: u32, l: u32) -> u32 {
    let l = l as i64;
    let e = (-(j as i64) * b as i64).rem_euclid(l);
    e as u32
}

/// Extracts the coefficient attached to a simple pole of
/// `N(t) / prod (1 - e^w t^b)`.  The factor list must contain the pole's
/// `(weight, zeta_order)` pair exactly once among factors vanishing at it.
pub fn residue_from_numerator(
    rs: &RootSystem,
    factors: &[(Weight, u32)],
    numerator: &[GroupRingElem],
    pole: &PoleSpec,
) -> Result<ResidueCoeff, QError> {
    let l = pole.zeta_order;
    if !(1..=3).contains(&l) {
        return Err(QError::UnknownPole(format!(
            "unsupported root of unity order {l}"
        )));
    }
    let j = pole.zeta_index % l;
    let vanishing = factors
        .iter()
        .position(|(w, b)| *b == l && *w == pole.weight)
        .ok_or_else(|| QError::UnknownPole(format!("{pole} matches no denominator factor")))?;
    // Evaluate the numerator at t0 = zeta^{-j} e^{-weight/l}.
    let mut value = CycloValue::zero(rs.rank, l);
    for (k, nk) in numerator.iter().enumerate() {
        if nk.is_zero() {
            continue;
        }
        let shift = pole.weight.mul(-(k as i32)).div(l as i32);
        let term = nk.mul_monomial(&shift, &BigInt::one());
        value.add_elem(&term, zeta_exp(j, k as u32, l));
    }
    // The vanishing factor contributes its root multiplicity.
    value.div_scalar(l as i64);
    for (i, (w, b)) in factors.iter().enumerate() {
        if i == vanishing {
            continue;
        }
        let kappa = w.sub(&pole.weight.mul(*b as i32).div(l as i32));
        value.div_eval_factor(zeta_exp(j, *b, l), &kappa, pole)?;
    }
    Ok(ResidueCoeff {
        pole: pole.clone(),
        components: value.parts,
    })
}

/// Runs the recurrence check on a series and extracts one pole coefficient
/// from the recovered numerator.
pub fn residue_from_series(
    rs: &RootSystem,
    table: &LambdaTable,
    series: &QSeries,
    pole: &PoleSpec,
) -> Result<ResidueCoeff, QError> {
    let report = check_linear_recurrence(rs, table, series)?;
    let factors = table.denominator_factors(rs);
    residue_from_numerator(rs, &factors, &report.numerator, pole)
}

/// Whether every simple reflection fixing the pole weight also fixes the
/// coefficient, component by component.
pub fn check_stabilizer_invariance(
    rs: &RootSystem,
    coeff: &ResidueCoeff,
) -> Result<bool, QError> {
    for a in 0..rs.rank {
        if coeff.pole.weight.coords[a] == 0 {
            let s = WeylElement::simple(rs, a)?;
            for part in &coeff.components {
                if !part.weyl_act(&s).equals(part) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---- first-level coefficients in closed form ----

/// Mukhin-Young product formula for the coefficient at the fundamental
/// pole: the inverse of `prod_{alpha > 0} (1 - e^{-alpha})^{[alpha]_a}`,
/// where `[alpha]_a` is the coefficient of the a-th simple root in `alpha`.
pub fn coeff_c1_fund(rs: &RootSystem, node: usize) -> Result<GeoFraction, QError> {
    if node == 0 || node > rs.rank {
        return Err(QError::BadNode {
            node,
            rank: rs.rank,
        });
    }
    let a = node - 1;
    let mut out = GeoFraction::one(rs.rank);
    for (root, simple) in rs.positive_roots.iter().zip(&rs.positive_roots_simple) {
        for _ in 0..simple[a] {
            out = out.div_factor(FactorSign::Minus, &root.neg())?;
        }
    }
    Ok(out)
}

/// Coefficients at every point of the fundamental orbit, filled in from the
/// dominant one by Weyl transport.
pub fn coeff_c1_orbit(rs: &RootSystem, node: usize) -> Result<Vec<(Weight, GeoFraction)>, QError> {
    let base = coeff_c1_fund(rs, node)?;
    let fund = Weight::fundamental(node - 1, rs.rank);
    Ok(orbit_with_elements(rs, &fund)
        .into_iter()
        .map(|(w, g)| (w, base.weyl_act(&g)))
        .collect())
}

/// Coefficient at the simple pole at the origin for a node whose level
/// terms are cumulative sums `sum_{k <= m} chi(k omega_a)`: the alternating
/// Weyl sum of `e^{w rho} / (1 - e^{w omega_a})`, divided by the Weyl
/// denominator.
pub fn coeff_c1_zero(rs: &RootSystem, node: usize) -> Result<GeoFraction, QError> {
    if node == 0 || node > rs.rank {
        return Err(QError::BadNode {
            node,
            rank: rs.rank,
        });
    }
    let a = node - 1;
    let fund = Weight::fundamental(a, rs.rank);
    let all: Vec<usize> = (0..rs.rank).collect();
    // Group the alternating sum by the image of the fundamental weight.
    let mut groups: BTreeMap<Weight, GroupRingElem> = BTreeMap::new();
    for w in enumerate_parabolic(rs, &all)? {
        let mu = w.apply(&fund);
        let term = GroupRingElem::monomial(&w.apply(&rs.rho), w.sign() as i64);
        groups
            .entry(mu)
            .or_insert_with(|| GroupRingElem::zero(rs.rank))
            .add_scaled_assign(&term, &BigInt::one());
    }
    let points: Vec<Weight> = groups.keys().cloned().collect();
    // Common denominator over the orbit; each group omits its own factor.
    let mut product = GroupRingElem::one(rs.rank);
    for mu in &points {
        product = product.mul_binomial(mu, false);
    }
    let mut num = GroupRingElem::zero(rs.rank);
    for (mu, g) in &groups {
        let rest = product
            .divide_binomial(mu, false)
            .expect("orbit factor divides the full orbit product");
        num.add_scaled_assign(&(&rest * g), &BigInt::one());
    }
    let mut out = GeoFraction::from_elem(num);
    for mu in &points {
        out = out.div_factor(FactorSign::Minus, mu)?;
    }
    // Divide by the Weyl denominator in factored form.
    out = out.mul_elem(&GroupRingElem::monomial(&rs.rho.neg(), 1));
    for alpha in &rs.positive_roots {
        out = out.div_factor(FactorSign::Minus, &alpha.neg())?;
    }
    out.normalize();
    Ok(out)
}

/// Ordered pairs of distinct first-level pole weights summing to `lambda`.
pub fn compute_s(lambda1_full: &[Weight], lambda: &Weight) -> Vec<(Weight, Weight)> {
    let mut out = Vec::new();
    for nu in lambda1_full {
        for mu in lambda1_full {
            if nu != mu && &nu.add(mu) == lambda {
                out.push((nu.clone(), mu.clone()));
            }
        }
    }
    out
}

/// Second-level coefficient assembled from first-level ones:
/// `sum over pairs nu + mu = lambda of C_nu C_mu (1 - e^{nu - mu})`.
pub fn coeff_c2(
    rs: &RootSystem,
    c1: &[(Weight, GeoFraction)],
    lambda: &Weight,
) -> Result<GeoFraction, QError> {
    let weights: Vec<Weight> = c1.iter().map(|(w, _)| w.clone()).collect();
    let mut acc = GeoFraction::zero(rs.rank);
    for (nu, mu) in compute_s(&weights, lambda) {
        let cn = &c1.iter().find(|(v, _)| v == &nu).expect("pair weight is in the table").1;
        let cm = &c1.iter().find(|(v, _)| v == &mu).expect("pair weight is in the table").1;
        let term = cn.mul(cm).mul_factor(FactorSign::Minus, &nu.sub(&mu));
        acc = acc.add(&term);
        acc.normalize();
    }
    Ok(acc)
}

// ---- tests ----
