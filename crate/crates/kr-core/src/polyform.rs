//! Polyhedral decomposition data: level terms by two independent routes,
//! per-Weyl-element partial fractions of the generating function, vanishing
//! certificates for the non-simple-pole parts, and the alternating
//! stabilizer sums giving the pole coefficients.
//!
//! A [`PolyhedralSpec`] encodes a conjectural decomposition of level terms
//! as lattice-point sums through the factored generating function
//! `sum_m P_m t^m = prod_i (1 - e^{mu_i} t^{b_i})^{-p_i}` combined with the
//! Weyl character formula.  Writing the product row by row over the Weyl
//! group and splitting each row into partial fractions in `t` localizes the
//! series at its candidate poles:
//! - simple parts `D_{w;mu} / (1 - e^{w(mu)} t)` survive into the pole
//!   coefficients,
//! - quadratic parts `(c0 + c1 t) / (1 - e^{w(mu)} t^2)` and the doubled
//!   part `E_w / (1 - e^{w(mu)} t)^2` must cancel in the alternating sum
//!   over the stabilizer of `mu`, which [`check_e_vanishing`] certifies.
//!
//! The folding reductions used by the certificates rely on row equivariance
//! `part(w' u) = w'(part(u))`; every certificate verifies that equality
//! exactly for the rows it folds, so a certificate is sound even for rows
//! supplied by an untrusted closure.

use crate::charformula::{divide_by_denominator, CharCache, CharCombo, CharError};
use crate::groupring::{FactorSign, GeoFraction, GroupRingElem, RandomPoint, RingError};
use crate::rootsys::{Family, RootSystem, Weight};
use crate::weylgrp::{enumerate_parabolic, stabilizer_nodes, CosetTable, WeylElement, WeylError};
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("no built-in polyhedral data for {0}")]
    UnknownSpec(String),
    #[error("invalid polyhedral data: {0}")]
    BadSpec(String),
    #[error("node {node} is out of range for rank {rank}")]
    BadNode { node: usize, rank: usize },
    #[error("two denominator factors share a root: {0}")]
    CoprimalityFailure(String),
    #[error("factor of degree {t_degree} and power {power} is not supported")]
    UnsupportedFactor { t_degree: u32, power: u32 },
    #[error("numerator is not divisible by the Weyl denominator: {0}")]
    Indivisible(String),
    #[error("no factor of the data places a simple pole at {0}")]
    NoSuchPole(Weight),
    #[error("vanishing check failed at {lambda}: {detail}")]
    VanishingFailure { lambda: Weight, detail: String },
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
}

// ---- decomposition data ----

/// One factor `(1 - e^weight t^t_degree)^power` of the generating function
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFactor {
    pub weight: Weight,
    pub t_degree: u32,
    pub power: u32,
}

/// How the direct evaluator computes lattice-point multiplicities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultFormula {
    /// Every lattice point of the fiber carries multiplicity one.
    One,
    /// The min/step formula with the squared-factor weight contributing a
    /// linear multiplicity.
    F4Node2,
}

/// Factored generating function of one node's conjectured decomposition.
#[derive(Debug, Clone)]
pub struct PolyhedralSpec {
    /// 1-based node index.
    pub node: usize,
    pub factors: Vec<PolyFactor>,
    pub mult: MultFormula,
}

/// The built-in decomposition data for a node, when known.
pub fn polyhedral_spec(rs: &RootSystem, node: usize) -> Result<PolyhedralSpec, PolyError> {
    if node == 0 || node > rs.rank {
        return Err(PolyError::BadNode {
            node,
            rank: rs.rank,
        });
    }
    let a = node - 1;
    let fund = Weight::fundamental(a, rs.rank);
    let f = |weight: Weight, t_degree: u32, power: u32| PolyFactor {
        weight,
        t_degree,
        power,
    };
    let w4 = |c: [i32; 4]| Weight::from_coords(c.to_vec());
    let (factors, mult) = match (rs.cartan_type.family, rs.rank) {
        (Family::A, _) => (vec![f(fund, 1, 1)], MultFormula::One),
        (Family::C, 2) => match a {
            0 => (
                vec![f(Weight::zero(2), 2, 1), f(fund, 1, 1)],
                MultFormula::One,
            ),
            _ => (vec![f(fund, 1, 1)], MultFormula::One),
        },
        (Family::F, 4) => match a {
            0 => (
                vec![f(Weight::zero(4), 1, 1), f(fund, 1, 1)],
                MultFormula::One,
            ),
            1 => (
                vec![
                    f(Weight::zero(4), 1, 1),
                    f(w4([0, 0, 0, 2]), 1, 1),
                    f(w4([0, 0, 2, 0]), 2, 1),
                    f(w4([0, 1, 0, 0]), 1, 1),
                    f(w4([0, 1, 0, 0]), 2, 1),
                    f(w4([1, 0, 0, 0]), 1, 2),
                ],
                MultFormula::F4Node2,
            ),
            _ => {
                return Err(PolyError::UnknownSpec(format!(
                    "{} node {node}",
                    rs.cartan_type
                )))
            }
        },
        _ => {
            return Err(PolyError::UnknownSpec(format!(
                "{} node {node}",
                rs.cartan_type
            )))
        }
    };
    PolyhedralSpec::from_parts(rs, node, factors, mult)
}

/// Weights of the four lattice directions of the min/step formula, read off
/// the factor shape: slack, then (plain, quadratic, both-degrees, squared).
struct F4Shape {
    l1: Weight,
    l2: Weight,
    l3: Weight,
    l4: Weight,
}

impl PolyhedralSpec {
    pub fn from_parts(
        rs: &RootSystem,
        node: usize,
        factors: Vec<PolyFactor>,
        mult: MultFormula,
    ) -> Result<Self, PolyError> {
        let spec = PolyhedralSpec {
            node,
            factors,
            mult,
        };
        spec.validate(rs)?;
        Ok(spec)
    }

    pub fn validate(&self, rs: &RootSystem) -> Result<(), PolyError> {
        if self.node == 0 || self.node > rs.rank {
            return Err(PolyError::BadNode {
                node: self.node,
                rank: rs.rank,
            });
        }
        if self.factors.is_empty() {
            return Err(PolyError::BadSpec("factor list is empty".into()));
        }
        for f in &self.factors {
            if f.weight.rank() != rs.rank {
                return Err(PolyError::BadSpec(format!(
                    "weight {} has rank {}, expected {}",
                    f.weight,
                    f.weight.rank(),
                    rs.rank
                )));
            }
            if !f.weight.is_integral() || !f.weight.is_dominant() {
                return Err(PolyError::BadSpec(format!(
                    "weight {} is not dominant integral",
                    f.weight
                )));
            }
            if f.t_degree == 0 || f.power == 0 {
                return Err(PolyError::BadSpec(
                    "factor degree and power must be positive".into(),
                ));
            }
        }
        for (i, f) in self.factors.iter().enumerate() {
            if self.factors[..i]
                .iter()
                .any(|g| g.weight == f.weight && g.t_degree == f.t_degree)
            {
                return Err(PolyError::BadSpec(format!(
                    "duplicate factor at weight {} degree {}",
                    f.weight, f.t_degree
                )));
            }
        }
        match self.mult {
            MultFormula::One => {
                if self.factors.iter().any(|f| f.power != 1) {
                    return Err(PolyError::BadSpec(
                        "unit multiplicity needs all factor powers equal to one".into(),
                    ));
                }
            }
            MultFormula::F4Node2 => {
                self.f4_shape()?;
            }
        }
        Ok(())
    }

    fn f4_shape(&self) -> Result<F4Shape, PolyError> {
        let bad = |msg: &str| PolyError::BadSpec(format!("min/step factor shape: {msg}"));
        if self.factors.len() != 6 {
            return Err(bad("expected exactly six factors"));
        }
        let rank = self.factors[0].weight.rank();
        if !self
            .factors
            .iter()
            .any(|f| f.weight.is_zero() && f.t_degree == 1 && f.power == 1)
        {
            return Err(bad("missing the plain slack factor"));
        }
        let squared: Vec<&PolyFactor> = self
            .factors
            .iter()
            .filter(|f| f.power == 2 && f.t_degree == 1)
            .collect();
        let quads: Vec<&PolyFactor> = self
            .factors
            .iter()
            .filter(|f| f.t_degree == 2 && f.power == 1)
            .collect();
        let plains: Vec<&PolyFactor> = self
            .factors
            .iter()
            .filter(|f| f.t_degree == 1 && f.power == 1 && !f.weight.is_zero())
            .collect();
        if squared.len() != 1 || quads.len() != 2 || plains.len() != 2 {
            return Err(bad("expected one squared, two quadratic and two plain factors"));
        }
        let l4 = squared[0].weight.clone();
        let both: Vec<&&PolyFactor> = quads
            .iter()
            .filter(|q| plains.iter().any(|p| p.weight == q.weight))
            .collect();
        if both.len() != 1 {
            return Err(bad(
                "expected exactly one weight shared by a plain and a quadratic factor",
            ));
        }
        let l3 = both[0].weight.clone();
        let l2 = quads
            .iter()
            .find(|q| q.weight != l3)
            .expect("two quadratic factors")
            .weight
            .clone();
        let l1 = plains
            .iter()
            .find(|p| p.weight != l3)
            .expect("two plain factors")
            .weight
            .clone();
        let all = [&l1, &l2, &l3, &l4];
        for (i, w) in all.iter().enumerate() {
            if w.is_zero() || w.rank() != rank {
                return Err(bad("direction weights must be nonzero"));
            }
            if all[..i].contains(w) {
                return Err(bad("direction weights must be distinct"));
            }
        }
        Ok(F4Shape { l1, l2, l3, l4 })
    }

    /// Lattice-point multiplicities at level `m` by the explicit formula.
    pub fn multiplicities_direct(&self, m: usize) -> Result<CharCombo, PolyError> {
        let rank = self.factors[0].weight.rank();
        let mut out = CharCombo::zero(rank);
        match self.mult {
            MultFormula::One => {
                enum_unit_fibers(&self.factors, 0, m, &Weight::zero(rank), &mut out);
            }
            MultFormula::F4Node2 => {
                let shape = self.f4_shape()?;
                let m = m as i64;
                for j1 in 0..=m {
                    for j2 in 0..=(m - j1) / 2 {
                        for j3 in 0..=(m - j1 - 2 * j2) {
                            for j4 in 0..=(m - j1 - 2 * j2 - j3) {
                                let slack = m - j1 - 2 * j2 - j3 - j4;
                                let mult = (1 + j3).min(1 + slack) * (j4 + 1);
                                let weight = shape
                                    .l1
                                    .mul(j1 as i32)
                                    .add(&shape.l2.mul(j2 as i32))
                                    .add(&shape.l3.mul(j3 as i32))
                                    .add(&shape.l4.mul(j4 as i32));
                                out.add_scaled_assign(
                                    &CharCombo::single(&weight, mult),
                                    &BigInt::one(),
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Lattice-point multiplicities at level `m` by expanding the factored
    /// generating function and collecting the `t^m` coefficient.
    pub fn multiplicities_series(&self, m: usize) -> CharCombo {
        let rank = self.factors[0].weight.rank();
        let mut poly = vec![CharCombo::zero(rank); m + 1];
        poly[0] = CharCombo::single(&Weight::zero(rank), 1);
        for f in &self.factors {
            let b = f.t_degree as usize;
            let mut next = vec![CharCombo::zero(rank); m + 1];
            for (d, combo) in poly.iter().enumerate() {
                if combo.is_zero() {
                    continue;
                }
                // (1 - e^mu t^b)^{-p} = sum_k binom(k+p-1, p-1) e^{k mu} t^{bk}.
                let mut k = 0usize;
                while d + b * k <= m {
                    let coeff = binom(k as u64 + f.power as u64 - 1, f.power as u64 - 1);
                    let shift = f.weight.mul(k as i32);
                    for (w, c) in combo.iter() {
                        next[d + b * k].add_scaled_assign(
                            &CharCombo::single(&w.add(&shift), 1),
                            &(&coeff * c),
                        );
                    }
                    k += 1;
                }
            }
            poly = next;
        }
        poly.swap_remove(m)
    }

    /// Level-`m` character as a sum of cached irreducible characters with
    /// the explicit multiplicities.
    pub fn p_m_direct(&self, cache: &CharCache, m: usize) -> Result<GroupRingElem, PolyError> {
        Ok(self.multiplicities_direct(m)?.to_elem(cache)?)
    }

    /// Level-`m` character from the series-expansion multiplicities through
    /// the alternating Weyl sum divided by the Weyl denominator.
    pub fn p_m_series(&self, rs: &RootSystem, m: usize) -> Result<GroupRingElem, PolyError> {
        let combo = self.multiplicities_series(m);
        let numer = combo.numerator_form(rs).to_elem(rs);
        divide_by_denominator(rs, &numer)
            .ok_or_else(|| indivisible_at(self.node, m))
    }
}

fn indivisible_at(node: usize, m: usize) -> PolyError {
    PolyError::Indivisible(format!("node {node} level {m}"))
}

/// Recursive enumeration of fibers `sum b_i j_i = m` with unit multiplicity.
fn enum_unit_fibers(
    factors: &[PolyFactor],
    idx: usize,
    m_left: usize,
    acc: &Weight,
    out: &mut CharCombo,
) {
    if idx == factors.len() {
        if m_left == 0 {
            out.add_scaled_assign(&CharCombo::single(acc, 1), &BigInt::one());
        }
        return;
    }
    let b = factors[idx].t_degree as usize;
    let mut j = 0usize;
    while b * j <= m_left {
        let next = acc.add(&factors[idx].weight.mul(j as i32));
        enum_unit_fibers(factors, idx + 1, m_left - b * j, &next, out);
        j += 1;
    }
}

fn binom(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k.min(n));
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    out
}

// ---- partial fractions ----

/// Partial fraction data of one row `prod_i (1 - e^{w(mu_i)} t^{b_i})^{-p_i}`.
/// Parts are keyed by the base weight `mu` of their factor; values carry the
/// `w`-image.
#[derive(Debug, Clone)]
pub struct PartialFractionRow {
    pub w: WeylElement,
    /// Coefficients over `1 / (1 - e^{w(mu)} t)`, one entry per degree-1
    /// factor (squared factors contribute their first-order coefficient).
    pub simple_parts: Vec<(Weight, GeoFraction)>,
    /// `(mu, c0, c1)` for the part `(c0 + c1 t) / (1 - e^{w(mu)} t^2)`.
    pub quad_parts: Vec<(Weight, GeoFraction, GeoFraction)>,
    /// `(mu, E)` for the part `E / (1 - e^{w(mu)} t)^2`.
    pub double_parts: Vec<(Weight, GeoFraction)>,
}

/// Divides `acc` by the value of `(1 - e^{w(mu)} t^b)^p` at the point
/// `t0 = s e^{-w(nu)}`, where `s = -1` when `s_neg` is set.
fn divide_eval(
    acc: GeoFraction,
    w: &WeylElement,
    mu: &Weight,
    b: u32,
    p: u32,
    nu: &Weight,
    s_neg: bool,
) -> Result<GeoFraction, PolyError> {
    let kappa = w.apply(&mu.sub(&nu.mul(b as i32)));
    let minus = !(s_neg && b % 2 == 1);
    if minus && kappa.is_zero() {
        return Err(PolyError::CoprimalityFailure(format!(
            "factor at {mu} with degree {b} vanishes at the evaluation point"
        )));
    }
    let sign = if minus { FactorSign::Minus } else { FactorSign::Plus };
    let mut out = acc;
    for _ in 0..p {
        out = out.div_factor(sign, &kappa)?;
    }
    Ok(out)
}

/// Splits one row of the generating function into partial fractions in `t`
/// using cover-up evaluation for degree-1 factors, evaluation at the two
/// square roots for quadratic factors, and one Hermite step for a squared
/// factor.
pub fn partial_fractions_row(
    rs: &RootSystem,
    spec: &PolyhedralSpec,
    w: &WeylElement,
) -> Result<PartialFractionRow, PolyError> {
    let fs = &spec.factors;
    let mut simple_parts = Vec::new();
    let mut quad_parts = Vec::new();
    let mut double_parts = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        let others = fs.iter().enumerate().filter(|&(k, _)| k != i);
        match (f.t_degree, f.power) {
            (1, 1) => {
                let mut c = GeoFraction::one(rs.rank);
                for (_, g) in others {
                    c = divide_eval(c, w, &g.weight, g.t_degree, g.power, &f.weight, false)?;
                }
                simple_parts.push((f.weight.clone(), c));
            }
            (2, 1) => {
                let half = f.weight.div(2);
                let mut rp = GeoFraction::one(rs.rank);
                let mut rm = GeoFraction::one(rs.rank);
                for (_, g) in others {
                    rp = divide_eval(rp, w, &g.weight, g.t_degree, g.power, &half, false)?;
                    rm = divide_eval(rm, w, &g.weight, g.t_degree, g.power, &half, true)?;
                }
                let two = BigInt::from(2);
                let c0 = rp.add(&rm).div_scalar(&two);
                let c1 = rp
                    .sub(&rm)
                    .mul_elem(&GroupRingElem::monomial(&w.apply(&half), 1))
                    .div_scalar(&two);
                quad_parts.push((f.weight.clone(), c0, c1));
            }
            (1, 2) => {
                let mut e = GeoFraction::one(rs.rank);
                for (_, g) in others.clone() {
                    e = divide_eval(e, w, &g.weight, g.t_degree, g.power, &f.weight, false)?;
                }
                // First-order coefficient from the logarithmic derivative:
                // D = -E sum_k p_k b_k e^{kappa_k} / (1 - e^{kappa_k}).
                let mut d = GeoFraction::zero(rs.rank);
                for (_, g) in others {
                    let kappa = w.apply(&g.weight.sub(&f.weight.mul(g.t_degree as i32)));
                    let coeff = i64::from(g.power) * i64::from(g.t_degree);
                    let term = e
                        .mul_elem(&GroupRingElem::monomial(&kappa, coeff))
                        .div_factor(FactorSign::Minus, &kappa)?;
                    d = d.add(&term);
                    d.normalize();
                }
                simple_parts.push((f.weight.clone(), d.neg()));
                double_parts.push((f.weight.clone(), e));
            }
            _ => {
                return Err(PolyError::UnsupportedFactor {
                    t_degree: f.t_degree,
                    power: f.power,
                })
            }
        }
    }
    Ok(PartialFractionRow {
        w: w.clone(),
        simple_parts,
        quad_parts,
        double_parts,
    })
}

/// The first-order coefficient `D_{w;lambda}` of one row at the pole
/// `t = e^{-w(lambda)}`, computed without building the whole row.
pub fn d_part_at(
    rs: &RootSystem,
    spec: &PolyhedralSpec,
    w: &WeylElement,
    lambda: &Weight,
) -> Result<GeoFraction, PolyError> {
    let fs = &spec.factors;
    let i = fs
        .iter()
        .position(|f| f.t_degree == 1 && &f.weight == lambda)
        .ok_or_else(|| PolyError::NoSuchPole(lambda.clone()))?;
    let others = fs.iter().enumerate().filter(|&(k, _)| k != i);
    match fs[i].power {
        1 => {
            let mut c = GeoFraction::one(rs.rank);
            for (_, g) in others {
                c = divide_eval(c, w, &g.weight, g.t_degree, g.power, lambda, false)?;
            }
            Ok(c)
        }
        2 => {
            let mut e = GeoFraction::one(rs.rank);
            for (_, g) in others.clone() {
                e = divide_eval(e, w, &g.weight, g.t_degree, g.power, lambda, false)?;
            }
            let mut d = GeoFraction::zero(rs.rank);
            for (_, g) in others {
                let kappa = w.apply(&g.weight.sub(&lambda.mul(g.t_degree as i32)));
                let coeff = i64::from(g.power) * i64::from(g.t_degree);
                let term = e
                    .mul_elem(&GroupRingElem::monomial(&kappa, coeff))
                    .div_factor(FactorSign::Minus, &kappa)?;
                d = d.add(&term);
                d.normalize();
            }
            Ok(d.neg())
        }
        power => Err(PolyError::UnsupportedFactor {
            t_degree: 1,
            power,
        }),
    }
}

/// The parts of one row that must cancel in the alternating stabilizer sum
/// at `lambda`: both coefficients of each quadratic part there, and the
/// second-order coefficient of a squared factor there.
pub fn e_parts_at(
    rs: &RootSystem,
    spec: &PolyhedralSpec,
    w: &WeylElement,
    lambda: &Weight,
) -> Result<Vec<GeoFraction>, PolyError> {
    let fs = &spec.factors;
    let mut out = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        if &f.weight != lambda {
            continue;
        }
        let others = fs.iter().enumerate().filter(|&(k, _)| k != i);
        match (f.t_degree, f.power) {
            (2, 1) => {
                let half = f.weight.div(2);
                let mut rp = GeoFraction::one(rs.rank);
                let mut rm = GeoFraction::one(rs.rank);
                for (_, g) in others {
                    rp = divide_eval(rp, w, &g.weight, g.t_degree, g.power, &half, false)?;
                    rm = divide_eval(rm, w, &g.weight, g.t_degree, g.power, &half, true)?;
                }
                let two = BigInt::from(2);
                out.push(rp.add(&rm).div_scalar(&two));
                out.push(
                    rp.sub(&rm)
                        .mul_elem(&GroupRingElem::monomial(&w.apply(&half), 1))
                        .div_scalar(&two),
                );
            }
            (1, 2) => {
                let mut e = GeoFraction::one(rs.rank);
                for (_, g) in others {
                    e = divide_eval(e, w, &g.weight, g.t_degree, g.power, &f.weight, false)?;
                }
                out.push(e);
            }
            _ => {}
        }
    }
    if out.is_empty() {
        return Err(PolyError::BadSpec(format!(
            "no quadratic or squared factor at {lambda}"
        )));
    }
    Ok(out)
}

// ---- vanishing certificates ----

/// How an alternating stabilizer sum was certified to vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VanishingRoute {
    /// The inner sum over the parabolic subgroup on these nodes vanishes;
    /// coset folding spreads the zero over the whole stabilizer.
    Parabolic { nodes: Vec<usize> },
    /// The sum folded through the parabolic on `fold_nodes` leaves coset
    /// images that cancel in the listed pairs (indices into the coset
    /// representative list).
    Pairing {
        fold_nodes: Vec<usize>,
        pairs: Vec<(usize, usize)>,
        reps: usize,
    },
    /// Brute-force summation over the full stabilizer.
    Direct,
}

/// Certificate that the alternating sum of row parts over the stabilizer of
/// `lambda` vanishes exactly.
#[derive(Debug, Clone)]
pub struct VanishingCertificate {
    pub lambda: Weight,
    /// 0-based nodes generating the stabilizer.
    pub stabilizer: Vec<usize>,
    /// Number of part components checked (quadratic parts carry two).
    pub components: usize,
    pub route: VanishingRoute,
}

/// Documented folding data for the built-in checks: parabolic candidates to
/// try first, then the fold subgroup for pair matching.
fn documented_routes(lambda: &Weight) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    if lambda.rank() == 4 && lambda.scale == 1 {
        let c = &lambda.coords;
        if c.as_slice() == [0, 0, 2, 0] {
            return (vec![vec![0, 1]], vec![]);
        }
        if c.as_slice() == [0, 1, 0, 0] {
            return (vec![vec![0, 2]], vec![]);
        }
        if c.as_slice() == [1, 0, 0, 0] {
            return (vec![], vec![vec![1, 3]]);
        }
    }
    (vec![], vec![])
}

/// Alternating sum of per-row values over a list of rows.
fn alternating_sum(
    rs: &RootSystem,
    rows: &[(WeylElement, Vec<GeoFraction>)],
    components: usize,
) -> Vec<GeoFraction> {
    let mut sums = vec![GeoFraction::zero(rs.rank); components];
    for (w, parts) in rows {
        let sgn = GroupRingElem::monomial(&w.apply(&rs.rho), i64::from(w.sign()));
        for (c, part) in parts.iter().enumerate() {
            sums[c] = sums[c].add(&part.mul_elem(&sgn));
            sums[c].normalize();
        }
    }
    sums
}

/// Certifies `sum over the stabilizer of lambda of sgn(w) e^{w(rho)}
/// part_c(w) = 0` for every component `c`, trying documented parabolic
/// reductions, then a search over parabolic subgroups, then pair matching
/// over coset representatives, then direct summation.
///
/// Folding routes first verify the equivariance `part(w'u) = w'(part(u))`
/// exactly for every row they fold, so the certificate does not trust the
/// closure to be structurally consistent.
pub fn certify_vanishing(
    rs: &RootSystem,
    lambda: &Weight,
    parts_of: &(dyn Fn(&WeylElement) -> Result<Vec<GeoFraction>, PolyError> + Sync),
) -> Result<VanishingCertificate, PolyError> {
    let stabilizer = stabilizer_nodes(rs, lambda);
    let group = enumerate_parabolic(rs, &stabilizer)?;
    let rows: Vec<(WeylElement, Vec<GeoFraction>)> = group
        .par_iter()
        .map(|w| Ok((w.clone(), parts_of(w)?)))
        .collect::<Result<_, PolyError>>()?;
    let components = rows
        .first()
        .map(|(_, p)| p.len())
        .ok_or_else(|| PolyError::BadSpec("empty stabilizer".into()))?;
    let by_matrix: HashMap<Vec<i32>, usize> = rows
        .iter()
        .enumerate()
        .map(|(i, (w, _))| (w.matrix().to_vec(), i))
        .collect();

    // Equivariance of the whole row family: part(w'u) = w'(part(u)) for the
    // coset decomposition with respect to `sub`.  All folding below is
    // justified by this check.
    let equivariant = |sub: &[usize]| -> Result<bool, PolyError> {
        let table = CosetTable::new(rs, &stabilizer, sub)?;
        let subgroup = enumerate_parabolic(rs, sub)?;
        for rep in &table.reps {
            if rep.is_identity() {
                continue;
            }
            for u in &subgroup {
                let w = rep.compose(rs, u);
                let idx = by_matrix[&w.matrix().to_vec()];
                let base = by_matrix[&u.matrix().to_vec()];
                let (_, have) = &rows[idx];
                let (_, from) = &rows[base];
                for (h, f) in have.iter().zip(from) {
                    if !h.equals(&f.weyl_act(rep)) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    };

    let (documented, documented_folds) = documented_routes(lambda);
    let mut candidates: Vec<Vec<usize>> = documented
        .into_iter()
        .filter(|j| j.iter().all(|a| stabilizer.contains(a)))
        .collect();
    let mut rest: Vec<Vec<usize>> = proper_subsets(&stabilizer)
        .into_iter()
        .filter(|j| !candidates.contains(j))
        .collect();
    rest.sort_by_key(|j| {
        enumerate_parabolic(rs, j)
            .map(|v| v.len())
            .unwrap_or(usize::MAX)
    });
    candidates.extend(rest);

    for j in &candidates {
        if !equivariant(j)? {
            continue;
        }
        let subgroup = enumerate_parabolic(rs, j)?;
        let inner_rows: Vec<(WeylElement, Vec<GeoFraction>)> = subgroup
            .iter()
            .map(|u| rows[by_matrix[&u.matrix().to_vec()]].clone())
            .collect();
        let sums = alternating_sum(rs, &inner_rows, components);
        if sums.iter().all(GeoFraction::is_zero) {
            return Ok(VanishingCertificate {
                lambda: lambda.clone(),
                stabilizer,
                components,
                route: VanishingRoute::Parabolic { nodes: j.clone() },
            });
        }
    }

    // Pair matching: fold through a subgroup, then cancel coset images in
    // pairs found by random evaluation and confirmed exactly.
    let mut folds: Vec<Vec<usize>> = documented_folds
        .into_iter()
        .filter(|j| j.iter().all(|a| stabilizer.contains(a)))
        .collect();
    folds.extend(candidates.iter().rev().cloned());
    for j in &folds {
        if !equivariant(j)? {
            continue;
        }
        let subgroup = enumerate_parabolic(rs, j)?;
        let inner_rows: Vec<(WeylElement, Vec<GeoFraction>)> = subgroup
            .iter()
            .map(|u| rows[by_matrix[&u.matrix().to_vec()]].clone())
            .collect();
        let inner = alternating_sum(rs, &inner_rows, components);
        let table = CosetTable::new(rs, &stabilizer, j)?;
        let n = table.reps.len();
        if n % 2 != 0 {
            continue;
        }
        let images: Vec<(i32, Vec<GeoFraction>)> = table
            .reps
            .par_iter()
            .map(|rep| {
                let parts: Vec<GeoFraction> =
                    inner.iter().map(|f| f.weyl_act(rep)).collect();
                (rep.sign(), parts)
            })
            .collect();
        if let Some(pairs) = match_cancelling_pairs(rs, &images) {
            return Ok(VanishingCertificate {
                lambda: lambda.clone(),
                stabilizer,
                components,
                route: VanishingRoute::Pairing {
                    fold_nodes: j.clone(),
                    pairs,
                    reps: n,
                },
            });
        }
    }

    // Last resort: one exact sum over the whole stabilizer.
    let sums = alternating_sum(rs, &rows, components);
    if sums.iter().all(GeoFraction::is_zero) {
        return Ok(VanishingCertificate {
            lambda: lambda.clone(),
            stabilizer,
            components,
            route: VanishingRoute::Direct,
        });
    }
    let detail = sums
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .map(|(c, s)| format!("component {c} leaves {} numerator terms", s.num.num_terms()))
        .collect::<Vec<_>>()
        .join("; ");
    Err(PolyError::VanishingFailure {
        lambda: lambda.clone(),
        detail,
    })
}

/// Nonempty proper subsets, smallest first.
fn proper_subsets(nodes: &[usize]) -> Vec<Vec<usize>> {
    let n = nodes.len();
    let mut out = Vec::new();
    for mask in 1..(1u32 << n) - 1 {
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| nodes[i]).collect();
        out.push(subset);
    }
    out.sort_by_key(|s| s.len());
    out
}

/// Pairs the images so each pair sums to zero: candidates located by random
/// evaluation, every pair confirmed by exact addition.
fn match_cancelling_pairs(
    rs: &RootSystem,
    images: &[(i32, Vec<GeoFraction>)],
) -> Option<Vec<(usize, usize)>> {
    let n = images.len();
    let signed = |i: usize| -> Vec<GeoFraction> {
        let (sign, parts) = &images[i];
        parts
            .iter()
            .map(|f| f.scalar_mul(&BigInt::from(*sign)))
            .collect()
    };
    // Numeric fingerprints at two points.
    let mut finger: Vec<Vec<u64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut prints = Vec::new();
        for seed in [11u64, 23u64] {
            let point = RandomPoint::new(rs.rank, seed);
            for f in signed(i) {
                prints.push(point.eval_fraction(&f).ok()?);
            }
        }
        finger.push(prints);
    }
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let partner = (i + 1..n).find(|&j| {
            !used[j]
                && finger[i]
                    .iter()
                    .zip(&finger[j])
                    .all(|(a, b)| (a + b) % crate::groupring::PRIME == 0)
        })?;
        // Exact confirmation.
        let left = signed(i);
        let right = signed(partner);
        for (a, b) in left.iter().zip(&right) {
            let mut d = a.add(b);
            d.normalize();
            if !d.is_zero() {
                return None;
            }
        }
        used[i] = true;
        used[partner] = true;
        pairs.push((i, partner));
    }
    Some(pairs)
}

/// Certifies the vanishing sums for the built-in rows of a decomposition at
/// `lambda`.
pub fn check_e_vanishing(
    rs: &RootSystem,
    spec: &PolyhedralSpec,
    lambda: &Weight,
) -> Result<VanishingCertificate, PolyError> {
    let parts = |w: &WeylElement| e_parts_at(rs, spec, w, lambda);
    certify_vanishing(rs, lambda, &parts)
}

// ---- pole coefficients ----

/// Multiplies by the Weyl denominator in factored form.
pub fn mul_weyl_denominator(rs: &RootSystem, f: GeoFraction) -> GeoFraction {
    let mut out = f.mul_elem(&GroupRingElem::monomial(&rs.rho, 1));
    for alpha in &rs.positive_roots {
        out = out.mul_factor(FactorSign::Minus, &alpha.neg());
    }
    out
}

/// Summands of the alternating stabilizer sum `sum_{w in W_lambda} sgn(w)
/// e^{w(rho)} D_{w;lambda}`, grouped into normalized chunk sums.  With
/// `fold`, the inner sum over that parabolic subgroup is computed once and
/// the summands are its coset images.
pub fn coeff_d_chunks(
    rs: &RootSystem,
    spec: &PolyhedralSpec,
    lambda: &Weight,
    fold: Option<&[usize]>,
    chunk_size: usize,
) -> Result<Vec<GeoFraction>, PolyError> {
    let chunk_size = chunk_size.max(1);
    let stabilizer = stabilizer_nodes(rs, lambda);
    let summands: Vec<GeoFraction> = match fold {
        None => {
            let group = enumerate_parabolic(rs, &stabilizer)?;
            group
                .par_iter()
                .map(|w| {
                    let d = d_part_at(rs, spec, w, lambda)?;
                    let sgn =
                        GroupRingElem::monomial(&w.apply(&rs.rho), i64::from(w.sign()));
                    let mut out = d.mul_elem(&sgn);
                    out.normalize();
                    Ok(out)
                })
                .collect::<Result<_, PolyError>>()?
        }
        Some(j) => {
            if !j.iter().all(|a| stabilizer.contains(a)) {
                return Err(PolyError::BadSpec(format!(
                    "fold nodes {j:?} do not stabilize {lambda}"
                )));
            }
            let subgroup = enumerate_parabolic(rs, j)?;
            let inner_rows: Vec<(WeylElement, Vec<GeoFraction>)> = subgroup
                .par_iter()
                .map(|u| Ok((u.clone(), vec![d_part_at(rs, spec, u, lambda)?])))
                .collect::<Result<_, PolyError>>()?;
            let inner = alternating_sum(rs, &inner_rows, 1).swap_remove(0);
            let table = CosetTable::new(rs, &stabilizer, j)?;
            table
                .reps
                .par_iter()
                .map(|rep| {
                    let mut out = inner.weyl_act(rep);
                    if rep.sign() < 0 {
                        out = out.neg();
                    }
                    out
                })
                .collect()
        }
    };
    // Group summands sharing a denominator multiset: within a group,
    // addition is pure numerator arithmetic, so the expensive
    // denominator-completion happens once per group, not once per summand.
    let mut groups: BTreeMap<Vec<(bool, i32, Vec<i32>)>, Vec<usize>> = BTreeMap::new();
    for (i, s) in summands.iter().enumerate() {
        let mut key: Vec<(bool, i32, Vec<i32>)> = s
            .denom_factors
            .iter()
            .map(|f| {
                (
                    f.sign == FactorSign::Minus,
                    f.weight.scale,
                    f.weight.coords.to_vec(),
                )
            })
            .collect();
        key.sort();
        groups.entry(key).or_default().push(i);
    }
    let grouped: Vec<Vec<usize>> = groups
        .into_values()
        .flat_map(|idx| {
            idx.chunks(chunk_size)
                .map(<[usize]>::to_vec)
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(grouped
        .par_iter()
        .map(|idx| {
            let mut acc = GeoFraction::zero(rs.rank);
            for &i in idx {
                acc = acc.add(&summands[i]);
            }
            acc.normalize();
            acc
        })
        .collect())
}

/// The full alternating stabilizer sum at `lambda` (the pole coefficient
/// scaled by the Weyl denominator), as one normalized fraction.
pub fn coeff_d_scaled(
    rs: &RootSystem,
    spec: &PolyhedralSpec,
    lambda: &Weight,
    fold: Option<&[usize]>,
    chunk_size: usize,
) -> Result<GeoFraction, PolyError> {
    let chunks = coeff_d_chunks(rs, spec, lambda, fold, chunk_size)?;
    let mut acc = GeoFraction::zero(rs.rank);
    for c in chunks {
        acc = acc.add(&c);
        acc.normalize();
    }
    Ok(acc)
}

/// Whether the scaled coefficient flips sign under every simple reflection
/// fixing `lambda` (the unscaled coefficient is then stabilizer-invariant,
/// since the Weyl denominator is alternating).
pub fn stabilizer_antisymmetric(
    rs: &RootSystem,
    scaled: &GeoFraction,
    lambda: &Weight,
) -> Result<bool, PolyError> {
    for a in stabilizer_nodes(rs, lambda) {
        let s = WeylElement::simple(rs, a)?;
        if !scaled.weyl_act(&s).equals(&scaled.neg()) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- tests ----

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charformula::CharCache;
    use crate::groupring::{mulmod, submod, PRIME};
    use crate::rootsys::CartanType;
    use crate::weylgrp::orbit;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn system(name: &str) -> RootSystem {
        RootSystem::new(CartanType::parse(name).unwrap()).unwrap()
    }

    fn wt(coords: Vec<i32>) -> Weight {
        Weight::from_coords(coords)
    }

    #[test]
    fn builtin_specs_validate_and_reject_bad_shapes() {
        let f4 = system("F4");
        let spec = polyhedral_spec(&f4, 2).unwrap();
        assert_eq!(spec.factors.len(), 6);
        assert_eq!(spec.mult, MultFormula::F4Node2);
        let shape = spec.f4_shape().unwrap();
        assert_eq!(shape.l1, wt(vec![0, 0, 0, 2]));
        assert_eq!(shape.l2, wt(vec![0, 0, 2, 0]));
        assert_eq!(shape.l3, wt(vec![0, 1, 0, 0]));
        assert_eq!(shape.l4, wt(vec![1, 0, 0, 0]));
        assert!(polyhedral_spec(&f4, 1).is_ok());
        assert!(matches!(
            polyhedral_spec(&f4, 3),
            Err(PolyError::UnknownSpec(_))
        ));
        assert!(matches!(
            polyhedral_spec(&f4, 0),
            Err(PolyError::BadNode { .. })
        ));
        let g2 = system("G2");
        assert!(matches!(
            polyhedral_spec(&g2, 1),
            Err(PolyError::UnknownSpec(_))
        ));

        let c2 = system("C2");
        // Non-dominant factor weight.
        assert!(PolyhedralSpec::from_parts(
            &c2,
            1,
            vec![PolyFactor {
                weight: wt(vec![-1, 1]),
                t_degree: 1,
                power: 1
            }],
            MultFormula::One,
        )
        .is_err());
        // Power above one under unit multiplicity.
        assert!(PolyhedralSpec::from_parts(
            &c2,
            1,
            vec![PolyFactor {
                weight: wt(vec![1, 0]),
                t_degree: 1,
                power: 2
            }],
            MultFormula::One,
        )
        .is_err());
        // Duplicate (weight, degree) factor.
        assert!(PolyhedralSpec::from_parts(
            &c2,
            1,
            vec![
                PolyFactor {
                    weight: wt(vec![1, 0]),
                    t_degree: 1,
                    power: 1
                },
                PolyFactor {
                    weight: wt(vec![1, 0]),
                    t_degree: 1,
                    power: 1
                },
            ],
            MultFormula::One,
        )
        .is_err());
        // Min/step multiplicity with the wrong factor shape.
        assert!(PolyhedralSpec::from_parts(
            &c2,
            1,
            vec![PolyFactor {
                weight: wt(vec![1, 0]),
                t_degree: 1,
                power: 1
            }],
            MultFormula::F4Node2,
        )
        .is_err());
    }

    #[test]
    fn multiplicity_routes_agree_on_builtin_specs() {
        for (name, node, max_m) in [
            ("A1", 1, 12),
            ("A2", 1, 12),
            ("A2", 2, 12),
            ("C2", 1, 8),
            ("C2", 2, 8),
            ("F4", 1, 12),
            ("F4", 2, 6),
        ] {
            let rs = system(name);
            let spec = polyhedral_spec(&rs, node).unwrap();
            for m in 0..=max_m {
                let direct = spec.multiplicities_direct(m).unwrap();
                let series = spec.multiplicities_series(m);
                assert_eq!(
                    direct, series,
                    "multiplicity mismatch for {name} node {node} at level {m}"
                );
            }
        }
    }

    #[test]
    fn f4_multiplicities_match_the_displayed_values() {
        let f4 = system("F4");
        let spec = polyhedral_spec(&f4, 2).unwrap();
        let m0 = spec.multiplicities_direct(0).unwrap();
        assert_eq!(m0.num_terms(), 1);
        assert_eq!(m0.coeff(&Weight::zero(4)), BigInt::one());

        let m1 = spec.multiplicities_direct(1).unwrap();
        assert_eq!(m1.num_terms(), 4);
        assert_eq!(m1.coeff(&Weight::zero(4)), BigInt::one());
        assert_eq!(m1.coeff(&wt(vec![0, 0, 0, 2])), BigInt::one());
        assert_eq!(m1.coeff(&wt(vec![0, 1, 0, 0])), BigInt::one());
        assert_eq!(m1.coeff(&wt(vec![1, 0, 0, 0])), BigInt::from(2));

        // Along the squared direction alone the multiplicity is linear.
        let m5 = spec.multiplicities_series(5);
        for k in 0..=5 {
            assert_eq!(m5.coeff(&wt(vec![k, 0, 0, 0])), BigInt::from(k + 1));
        }
    }

    #[test]
    fn character_routes_agree_on_small_levels() {
        for (name, node, max_m) in [("A2", 1, 4), ("C2", 1, 4), ("C2", 2, 4), ("F4", 2, 2)] {
            let rs = system(name);
            let cache = CharCache::new(system(name));
            let spec = polyhedral_spec(&rs, node).unwrap();
            for m in 0..=max_m {
                let direct = spec.p_m_direct(&cache, m).unwrap();
                let series = spec.p_m_series(&rs, m).unwrap();
                assert_eq!(
                    direct, series,
                    "character mismatch for {name} node {node} at level {m}"
                );
            }
        }
    }

    #[test]
    fn identity_row_matches_hand_forms() {
        let f4 = system("F4");
        let id = WeylElement::identity(4);

        // Cumulative first-node data: two simple parts with reciprocal poles.
        let spec1 = polyhedral_spec(&f4, 1).unwrap();
        let row = partial_fractions_row(&f4, &spec1, &id).unwrap();
        assert_eq!(row.simple_parts.len(), 2);
        assert!(row.quad_parts.is_empty() && row.double_parts.is_empty());
        let omega = wt(vec![1, 0, 0, 0]);
        let at_zero = &row.simple_parts[0];
        let at_omega = &row.simple_parts[1];
        assert!(at_zero.0.is_zero());
        let expect_zero = GeoFraction::one(4)
            .div_factor(FactorSign::Minus, &omega)
            .unwrap();
        let expect_omega = GeoFraction::one(4)
            .div_factor(FactorSign::Minus, &omega.neg())
            .unwrap();
        assert!(at_zero.1.equals(&expect_zero));
        assert!(at_omega.1.equals(&expect_omega));
        // Same forms after moving the row by a simple reflection.
        let s0 = WeylElement::simple(&f4, 0).unwrap();
        let moved = partial_fractions_row(&f4, &spec1, &s0).unwrap();
        assert!(moved.simple_parts[0].1.equals(&expect_zero.weyl_act(&s0)));
        assert!(moved.simple_parts[1].1.equals(&expect_omega.weyl_act(&s0)));

        // Second-node identity row: the slack coefficient is the product of
        // the other factors evaluated at t = 1.
        let spec2 = polyhedral_spec(&f4, 2).unwrap();
        let row = partial_fractions_row(&f4, &spec2, &id).unwrap();
        assert_eq!(row.simple_parts.len(), 4);
        assert_eq!(row.quad_parts.len(), 2);
        assert_eq!(row.double_parts.len(), 1);
        let mut expect = GeoFraction::one(4);
        for (w, reps) in [
            (wt(vec![0, 0, 0, 2]), 1),
            (wt(vec![0, 0, 2, 0]), 1),
            (wt(vec![0, 1, 0, 0]), 2),
            (wt(vec![1, 0, 0, 0]), 2),
        ] {
            for _ in 0..reps {
                expect = expect.div_factor(FactorSign::Minus, &w).unwrap();
            }
        }
        assert!(row.simple_parts[0].0.is_zero());
        assert!(row.simple_parts[0].1.equals(&expect));
        // The same value through the single-part entry point.
        let direct = d_part_at(&f4, &spec2, &id, &Weight::zero(4)).unwrap();
        assert!(direct.equals(&expect));
    }

    /// Evaluates `sum_i n_i(tau) / d_i(tau)` against `prod 1/f(tau)` at
    /// random points, clearing denominators; the row identity holds iff the
    /// two sides agree for every sample.
    fn row_resums_numerically(
        rs: &RootSystem,
        spec: &PolyhedralSpec,
        row: &PartialFractionRow,
        seed: u64,
    ) -> bool {
        let point = RandomPoint::new(rs.rank, seed);
        let tau = 987_654_321_098_765_u64 % PRIME;
        let factor_at = |mu: &Weight, b: u32, p: u32| -> u64 {
            let u = point.eval_weight(&row.w.apply(mu));
            let mut tb = 1u64;
            for _ in 0..b {
                tb = mulmod(tb, tau);
            }
            let base = submod(1, mulmod(u, tb));
            let mut out = 1u64;
            for _ in 0..p {
                out = mulmod(out, base);
            }
            out
        };
        let mut product = 1u64;
        for f in &spec.factors {
            product = mulmod(product, factor_at(&f.weight, f.t_degree, f.power));
        }
        let lhs = crate::groupring::modinv(product);

        let mut rhs = 0u64;
        let eval = |f: &GeoFraction| point.eval_fraction(f).expect("unlucky evaluation point");
        for (mu, c) in &row.simple_parts {
            let d = factor_at(mu, 1, 1);
            rhs = (rhs + mulmod(eval(c), crate::groupring::modinv(d))) % PRIME;
        }
        for (mu, c0, c1) in &row.quad_parts {
            let d = factor_at(mu, 2, 1);
            let num = (eval(c0) + mulmod(eval(c1), tau)) % PRIME;
            rhs = (rhs + mulmod(num, crate::groupring::modinv(d))) % PRIME;
        }
        for (mu, e) in &row.double_parts {
            let d = factor_at(mu, 1, 2);
            rhs = (rhs + mulmod(eval(e), crate::groupring::modinv(d))) % PRIME;
        }
        lhs == rhs
    }

    #[test]
    fn rows_resum_numerically_for_random_weyl_elements() {
        let f4 = system("F4");
        let spec = polyhedral_spec(&f4, 2).unwrap();
        let mut rng = StdRng::seed_from_u64(20240816);
        for trial in 0..20 {
            let word: Vec<usize> = (0..rng.gen_range(0..12)).map(|_| rng.gen_range(0..4)).collect();
            let w = WeylElement::from_word(&f4, &word).unwrap();
            let row = partial_fractions_row(&f4, &spec, &w).unwrap();
            for seed in [3 * trial + 1, 3 * trial + 2] {
                assert!(
                    row_resums_numerically(&f4, &spec, &row, seed as u64),
                    "row for word {word:?} fails to re-sum at seed {seed}"
                );
            }
        }
    }

    /// Polynomial in `t` over fractions, for exact re-sum checks.
    struct TPoly(Vec<GeoFraction>);

    impl TPoly {
        fn constant(f: GeoFraction) -> Self {
            TPoly(vec![f])
        }

        fn linear(c0: GeoFraction, c1: GeoFraction) -> Self {
            TPoly(vec![c0, c1])
        }

        /// Multiplies by `(1 - e^{w(mu)} t^b)^p`.
        fn mul_factor(
            &mut self,
            w: &WeylElement,
            mu: &Weight,
            b: u32,
            p: u32,
            rank: usize,
        ) {
            let monomial = GroupRingElem::monomial(&w.apply(mu), 1);
            for _ in 0..p {
                let b = b as usize;
                let mut next = vec![GeoFraction::zero(rank); self.0.len() + b];
                for (k, c) in self.0.iter().enumerate() {
                    next[k] = next[k].add(c);
                    next[k + b] = next[k + b].sub(&c.mul_elem(&monomial));
                }
                self.0 = next;
            }
        }

        fn add_assign(&mut self, other: TPoly, rank: usize) {
            if other.0.len() > self.0.len() {
                self.0.resize(other.0.len(), GeoFraction::zero(rank));
            }
            for (k, c) in other.0.into_iter().enumerate() {
                self.0[k] = self.0[k].add(&c);
                self.0[k].normalize();
            }
        }
    }

    #[test]
    fn small_synthetic_row_resums_exactly() {
        // Rank-2 data exercising all three part kinds: slack, a squared
        // factor, and a quadratic factor.
        let c2 = system("C2");
        let spec = PolyhedralSpec::from_parts(
            &c2,
            1,
            vec![
                PolyFactor {
                    weight: Weight::zero(2),
                    t_degree: 1,
                    power: 1,
                },
                PolyFactor {
                    weight: wt(vec![1, 0]),
                    t_degree: 1,
                    power: 2,
                },
                PolyFactor {
                    weight: wt(vec![0, 1]),
                    t_degree: 2,
                    power: 1,
                },
            ],
            MultFormula::One,
        );
        // Unit multiplicity rejects the squared factor, so build unchecked.
        let spec = match spec {
            Ok(_) => unreachable!("power-2 factor must fail unit-multiplicity validation"),
            Err(_) => PolyhedralSpec {
                node: 1,
                factors: vec![
                    PolyFactor {
                        weight: Weight::zero(2),
                        t_degree: 1,
                        power: 1,
                    },
                    PolyFactor {
                        weight: wt(vec![1, 0]),
                        t_degree: 1,
                        power: 2,
                    },
                    PolyFactor {
                        weight: wt(vec![0, 1]),
                        t_degree: 2,
                        power: 1,
                    },
                ],
                mult: MultFormula::One,
            },
        };
        for word in [vec![], vec![0usize], vec![0, 1]] {
            let w = WeylElement::from_word(&c2, &word).unwrap();
            let row = partial_fractions_row(&c2, &spec, &w).unwrap();
            // Clear the full denominator: the re-summed numerator must be 1.
            let mut total = TPoly(vec![]);
            let complement = |skip_weight: &Weight, skip_b: u32, drop_all: bool, poly: &mut TPoly| {
                for f in &spec.factors {
                    let mut p = f.power;
                    if &f.weight == skip_weight && f.t_degree == skip_b {
                        p = if drop_all { 0 } else { f.power - 1 };
                    }
                    if p > 0 {
                        poly.mul_factor(&w, &f.weight, f.t_degree, p, 2);
                    }
                }
            };
            for (mu, c) in &row.simple_parts {
                let is_double = spec
                    .factors
                    .iter()
                    .any(|f| &f.weight == mu && f.t_degree == 1 && f.power == 2);
                let mut part = TPoly::constant(c.clone());
                if is_double {
                    // D/(1-ut): multiply by all factors except one power.
                    complement(mu, 1, false, &mut part);
                } else {
                    complement(mu, 1, true, &mut part);
                }
                total.add_assign(part, 2);
            }
            for (mu, c0, c1) in &row.quad_parts {
                let mut part = TPoly::linear(c0.clone(), c1.clone());
                complement(mu, 2, true, &mut part);
                total.add_assign(part, 2);
            }
            for (mu, e) in &row.double_parts {
                let mut part = TPoly::constant(e.clone());
                complement(mu, 1, true, &mut part);
                total.add_assign(part, 2);
            }
            for (k, coeff) in total.0.iter().enumerate() {
                let expect = if k == 0 {
                    GeoFraction::one(2)
                } else {
                    GeoFraction::zero(2)
                };
                assert!(
                    coeff.equals(&expect),
                    "re-sum coefficient {k} wrong for word {word:?}"
                );
            }
        }
    }

    #[test]
    fn e_vanishing_certificates_for_the_quadratic_factors() {
        let f4 = system("F4");
        let spec = polyhedral_spec(&f4, 2).unwrap();

        let cert = check_e_vanishing(&f4, &spec, &wt(vec![0, 0, 2, 0])).unwrap();
        assert_eq!(cert.stabilizer, vec![0, 1, 3]);
        assert_eq!(cert.components, 2);
        assert_eq!(
            cert.route,
            VanishingRoute::Parabolic {
                nodes: vec![0, 1]
            }
        );

        let cert = check_e_vanishing(&f4, &spec, &wt(vec![0, 1, 0, 0])).unwrap();
        assert_eq!(cert.stabilizer, vec![0, 2, 3]);
        assert_eq!(
            cert.route,
            VanishingRoute::Parabolic {
                nodes: vec![0, 2]
            }
        );
    }

    #[test]
    fn e_vanishing_pairing_for_the_squared_factor() {
        let f4 = system("F4");
        let spec = polyhedral_spec(&f4, 2).unwrap();
        let cert = check_e_vanishing(&f4, &spec, &wt(vec![1, 0, 0, 0])).unwrap();
        assert_eq!(cert.stabilizer, vec![1, 2, 3]);
        assert_eq!(cert.components, 1);
        match cert.route {
            VanishingRoute::Pairing {
                fold_nodes,
                pairs,
                reps,
            } => {
                assert_eq!(fold_nodes, vec![1, 3]);
                assert_eq!(reps, 12);
                assert_eq!(pairs.len(), 6);
                let mut seen: Vec<usize> =
                    pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
                seen.sort_unstable();
                assert_eq!(seen, (0..12).collect::<Vec<_>>());
            }
            other => panic!("expected a pairing certificate, got {other:?}"),
        }
    }

    #[test]
    fn perturbed_parts_fail_vanishing() {
        let f4 = system("F4");
        let spec = polyhedral_spec(&f4, 2).unwrap();
        let lambda = wt(vec![0, 1, 0, 0]);
        // Double one row's parts: equivariance breaks, so no folding route
        // can certify, and the direct sum is visibly nonzero.
        let parts = |w: &WeylElement| {
            let mut out = e_parts_at(&f4, &spec, w, &lambda)?;
            if w.is_identity() {
                for f in &mut out {
                    *f = f.scalar_mul(&BigInt::from(2));
                }
            }
            Ok(out)
        };
        let err = certify_vanishing(&f4, &lambda, &parts).unwrap_err();
        assert!(matches!(err, PolyError::VanishingFailure { .. }));
    }

    #[test]
    fn coeff_d_cross_checks_on_tiny_specs() {
        // Second C2 node: the scaled coefficient at the fundamental pole is
        // the two-element alternating sum, and matches the scaled product
        // formula coefficient.
        let c2 = system("C2");
        let spec = polyhedral_spec(&c2, 2).unwrap();
        let omega = wt(vec![0, 1]);
        let scaled = coeff_d_scaled(&c2, &spec, &omega, None, 4).unwrap();
        let s0 = WeylElement::simple(&c2, 0).unwrap();
        let mut expect = GeoFraction::from_elem(GroupRingElem::monomial(&c2.rho, 1));
        expect = expect.sub(&GeoFraction::from_elem(GroupRingElem::monomial(
            &s0.apply(&c2.rho),
            1,
        )));
        assert!(scaled.equals(&expect));
        let my = crate::qsystem::coeff_c1_fund(&c2, 2).unwrap();
        assert!(scaled.equals(&mul_weyl_denominator(&c2, my)));
        assert!(stabilizer_antisymmetric(&c2, &scaled, &omega).unwrap());

        // Folding through the full stabilizer gives the same value.
        let folded = coeff_d_scaled(&c2, &spec, &omega, Some(&[0]), 4).unwrap();
        assert!(folded.equals(&scaled));
    }

    #[test]
    fn coeff_d_zero_pole_matches_orbit_assembly_in_a2() {
        // Cumulative data in A2: the scaled coefficient at the origin is
        // the Weyl-denominator multiple of the orbit-product assembly.
        let a2 = system("A2");
        let spec = PolyhedralSpec::from_parts(
            &a2,
            1,
            vec![
                PolyFactor {
                    weight: Weight::zero(2),
                    t_degree: 1,
                    power: 1,
                },
                PolyFactor {
                    weight: wt(vec![1, 0]),
                    t_degree: 1,
                    power: 1,
                },
            ],
            MultFormula::One,
        )
        .unwrap();
        let zero = Weight::zero(2);
        let scaled = coeff_d_scaled(&a2, &spec, &zero, None, 4).unwrap();
        let assembled = crate::qsystem::coeff_c1_zero(&a2, 1).unwrap();
        assert!(scaled.equals(&mul_weyl_denominator(&a2, assembled)));
        assert!(stabilizer_antisymmetric(&a2, &scaled, &zero).unwrap());

        // Folded route agrees.
        let folded = coeff_d_scaled(&a2, &spec, &zero, Some(&[0]), 2).unwrap();
        assert!(folded.equals(&scaled));

        // A pole no factor provides is rejected.
        assert!(matches!(
            d_part_at(&a2, &spec, &WeylElement::identity(2), &wt(vec![0, 1])),
            Err(PolyError::NoSuchPole(_))
        ));
    }

    #[test]
    fn degenerate_rows_report_shared_roots() {
        // Two factors at the same pole location make the cover-up
        // evaluation hit a vanishing factor.
        let c2 = system("C2");
        let spec = PolyhedralSpec {
            node: 1,
            factors: vec![
                PolyFactor {
                    weight: wt(vec![1, 0]),
                    t_degree: 1,
                    power: 1,
                },
                PolyFactor {
                    weight: wt(vec![2, 0]),
                    t_degree: 2,
                    power: 1,
                },
            ],
            mult: MultFormula::One,
        };
        let id = WeylElement::identity(2);
        assert!(matches!(
            partial_fractions_row(&c2, &spec, &id),
            Err(PolyError::CoprimalityFailure(_))
        ));
    }

    #[test]
    fn series_multiplicities_respect_orbit_dimensions() {
        // Sanity anchor: level-1 multiplicities of the second F4 node give
        // the expected total dimension.
        let f4 = system("F4");
        let cache = CharCache::new(system("F4"));
        let spec = polyhedral_spec(&f4, 2).unwrap();
        let m1 = spec.multiplicities_direct(1).unwrap();
        assert_eq!(m1.dimension(&f4), BigInt::from(1703));
        // The assembled character is invariant under every simple
        // reflection, and its support meets each listed orbit.
        let p1 = spec.p_m_direct(&cache, 1).unwrap();
        for a in 0..4 {
            let s = WeylElement::simple(&f4, a).unwrap();
            assert_eq!(p1.weyl_act(&s), p1);
        }
        for base in [wt(vec![1, 0, 0, 0]), wt(vec![0, 1, 0, 0]), wt(vec![0, 0, 0, 2])] {
            for v in orbit(&f4, &base) {
                assert!(p1.coeff(&v) > BigInt::from(0), "missing orbit weight {v}");
            }
        }
    }
}
