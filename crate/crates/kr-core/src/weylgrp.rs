//! Weyl group machinery: elements as integer matrices acting on
//! fundamental-weight coordinates, parabolic subgroup enumeration, weight
//! orbits, and minimal-length coset representatives.
//!
//! Every element carries its canonical reduced word, obtained by the descent
//! walk that drags `w(rho)` back to `rho` choosing the smallest negative
//! coordinate first.  Equal matrices therefore always carry equal words, and
//! sorting by `(length, word)` is a total deterministic order.

use crate::rootsys::{Coords, RootSystem, Weight};
use smallvec::SmallVec;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Row-major square matrix acting on fundamental-weight coordinates.
type Matrix = SmallVec<[i32; 16]>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum WeylError {
    #[error("node index {node} out of range for rank {rank}")]
    BadNode { node: usize, rank: usize },
    #[error("subgroup nodes {sub:?} are not contained in ambient nodes {ambient:?}")]
    NotSubset { sub: Vec<usize>, ambient: Vec<usize> },
}

/// A Weyl group element: its matrix on weight coordinates and its canonical
/// reduced word (0-based node indices).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    rank: usize,
    matrix: Matrix,
    word: Vec<u8>,
}

impl WeylElement {
    /// The identity element.
    pub fn identity(rank: usize) -> Self {
        let mut matrix: Matrix = SmallVec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                matrix.push(i32::from(i == j));
            }
        }
        WeylElement {
            rank,
            matrix,
            word: Vec::new(),
        }
    }

    /// The simple reflection at node `a`.
    pub fn simple(rs: &RootSystem, a: usize) -> Result<Self, WeylError> {
        if a >= rs.rank {
            return Err(WeylError::BadNode {
                node: a,
                rank: rs.rank,
            });
        }
        let mut e = WeylElement::identity(rs.rank);
        for c in 0..rs.rank {
            e.matrix[c * rs.rank + a] -= rs.cartan[c][a] as i32;
        }
        e.word = vec![a as u8];
        e.assert_consistent();
        Ok(e)
    }

    /// Builds the product of simple reflections in word order, so
    /// `from_word(rs, [a, b])` applies `s_b` first to a weight.
    pub fn from_word(rs: &RootSystem, word: &[usize]) -> Result<Self, WeylError> {
        let mut e = WeylElement::identity(rs.rank);
        for &a in word {
            e = e.compose(rs, &WeylElement::simple(rs, a)?);
        }
        Ok(e)
    }

    /// Group product `self * other`; applying the result to a weight applies
    /// `other` first.
    pub fn compose(&self, rs: &RootSystem, other: &WeylElement) -> WeylElement {
        assert_eq!(self.rank, other.rank);
        let n = self.rank;
        let mut matrix: Matrix = SmallVec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i32;
                for k in 0..n {
                    s += self.matrix[i * n + k] * other.matrix[k * n + j];
                }
                matrix.push(s);
            }
        }
        let word = word_from_matrix(rs, &matrix);
        WeylElement {
            rank: n,
            matrix,
            word,
        }
    }

    /// Group inverse.
    pub fn inverse(&self, rs: &RootSystem) -> WeylElement {
        let rev: Vec<usize> = self.word.iter().rev().map(|&a| a as usize).collect();
        WeylElement::from_word(rs, &rev).expect("word letters are valid nodes")
    }

    /// Image of a weight.
    pub fn apply(&self, w: &Weight) -> Weight {
        Weight {
            coords: self.apply_coords(&w.coords),
            scale: w.scale,
        }
    }

    /// Image of a coordinate vector (scale untouched).
    pub fn apply_coords(&self, coords: &[i32]) -> Coords {
        let n = self.rank;
        assert_eq!(coords.len(), n);
        let mut out: Coords = SmallVec::with_capacity(n);
        for i in 0..n {
            let mut s = 0i32;
            for (j, &cj) in coords.iter().enumerate() {
                s += self.matrix[i * n + j] * cj;
            }
            out.push(s);
        }
        out
    }

    /// Canonical reduced word (0-based nodes).
    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// Row-major matrix on fundamental-weight coordinates.
    pub fn matrix(&self) -> &[i32] {
        &self.matrix
    }

    /// Coxeter length.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Determinant character: `(-1)` to the Coxeter length.
    pub fn sign(&self) -> i32 {
        if self.word.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn assert_consistent(&self) {
        debug_assert_eq!(self.matrix.len(), self.rank * self.rank);
    }
}

impl PartialOrd for WeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WeylElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.word.len(), &self.word, &self.matrix).cmp(&(
            other.word.len(),
            &other.word,
            &other.matrix,
        ))
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        for (i, a) in self.word.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "s{}", a + 1)?;
        }
        Ok(())
    }
}

/// Canonical reduced word of the element with matrix `m`: drag `m * rho`
/// back to `rho` by simple reflections, always taking the smallest node with
/// a negative coordinate.
fn word_from_matrix(rs: &RootSystem, m: &Matrix) -> Vec<u8> {
    let n = rs.rank;
    let mut mu: Coords = SmallVec::with_capacity(n);
    for i in 0..n {
        let mut s = 0i32;
        for j in 0..n {
            s += m[i * n + j];
        }
        mu.push(s);
    }
    word_from_rho_image(rs, mu)
}

/// Canonical reduced word of the `w` with `w(rho) = mu`.
fn word_from_rho_image(rs: &RootSystem, mut mu: Coords) -> Vec<u8> {
    let n = rs.rank;
    let mut word = Vec::new();
    loop {
        let Some(a) = (0..n).find(|&a| mu[a] < 0) else {
            break;
        };
        word.push(a as u8);
        let ma = mu[a];
        for c in 0..n {
            mu[c] -= ma * rs.cartan[c][a] as i32;
        }
    }
    word
}

/// The longest element of the Weyl group.
pub fn longest_element(rs: &RootSystem) -> WeylElement {
    let minus_rho: Coords = std::iter::repeat(-1).take(rs.rank).collect();
    let word: Vec<usize> = word_from_rho_image(rs, minus_rho)
        .into_iter()
        .map(|a| a as usize)
        .collect();
    WeylElement::from_word(rs, &word).expect("descent walk yields valid nodes")
}

/// Enumerates the parabolic subgroup generated by the simple reflections at
/// `nodes`, sorted by `(length, word)`.  Passing all nodes enumerates the
/// whole group.
pub fn enumerate_parabolic(
    rs: &RootSystem,
    nodes: &[usize],
) -> Result<Vec<WeylElement>, WeylError> {
    for &a in nodes {
        if a >= rs.rank {
            return Err(WeylError::BadNode {
                node: a,
                rank: rs.rank,
            });
        }
    }
    let gens: Vec<WeylElement> = nodes
        .iter()
        .map(|&a| WeylElement::simple(rs, a).expect("validated above"))
        .collect();
    let mut seen: BTreeSet<Matrix> = BTreeSet::new();
    let mut out = vec![WeylElement::identity(rs.rank)];
    seen.insert(out[0].matrix.clone());
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                let wg = w.compose(rs, g);
                if seen.insert(wg.matrix.clone()) {
                    next.push(wg);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort();
    Ok(out)
}

/// Order of the full Weyl group.
pub fn group_order(rs: &RootSystem) -> usize {
    let all: Vec<usize> = (0..rs.rank).collect();
    enumerate_parabolic(rs, &all)
        .expect("all nodes are valid")
        .len()
}

/// The orbit of a weight under the full Weyl group, sorted.
pub fn orbit(rs: &RootSystem, w: &Weight) -> Vec<Weight> {
    let mut seen: BTreeSet<Weight> = BTreeSet::new();
    let mut queue = vec![w.clone()];
    seen.insert(w.clone());
    while let Some(v) = queue.pop() {
        for a in 0..rs.rank {
            if v.coords[a] != 0 {
                let sv = rs.reflect(a, &v);
                if seen.insert(sv.clone()) {
                    queue.push(sv);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// The orbit of a weight together with one group element carrying the input
/// weight to each orbit point, sorted by weight.
pub fn orbit_with_elements(rs: &RootSystem, w: &Weight) -> Vec<(Weight, WeylElement)> {
    let mut seen: BTreeMap<Weight, WeylElement> = BTreeMap::new();
    let mut queue = vec![w.clone()];
    seen.insert(w.clone(), WeylElement::identity(rs.rank));
    while let Some(v) = queue.pop() {
        let reach = seen[&v].clone();
        for a in 0..rs.rank {
            if v.coords[a] != 0 {
                let sv = rs.reflect(a, &v);
                if !seen.contains_key(&sv) {
                    let s = WeylElement::simple(rs, a).expect("node in range");
                    seen.insert(sv.clone(), s.compose(rs, &reach));
                    queue.push(sv);
                }
            }
        }
    }
    seen.into_iter().collect()
}

/// Walks a coordinate vector to the dominant chamber, tracking the sign of
/// the walk.  Returns `None` when the weight lies on a wall (some reflection
/// fixes it), in which case the alternating orbit sum vanishes.
pub fn dominant_coords_with_sign(rs: &RootSystem, coords: &mut Coords) -> Option<i32> {
    let n = rs.rank;
    let mut sign = 1i32;
    loop {
        let mut neg = None;
        for a in 0..n {
            if coords[a] == 0 {
                return None;
            }
            if coords[a] < 0 {
                neg = Some(a);
                break;
            }
        }
        let Some(a) = neg else {
            return Some(sign);
        };
        let ca = coords[a];
        for c in 0..n {
            coords[c] -= ca * rs.cartan[c][a] as i32;
        }
        sign = -sign;
    }
}

/// `dominant_coords_with_sign` on a `Weight`, returning the dominant
/// representative and the walk sign, or `None` on a wall.
pub fn dominant_with_sign(rs: &RootSystem, w: &Weight) -> Option<(Weight, i32)> {
    let mut coords = w.coords.clone();
    let sign = dominant_coords_with_sign(rs, &mut coords)?;
    Some((
        Weight {
            coords,
            scale: w.scale,
        },
        sign,
    ))
}

/// Nodes whose simple reflection fixes a dominant weight: those with
/// coordinate zero.
pub fn stabilizer_nodes(rs: &RootSystem, w: &Weight) -> Vec<usize> {
    assert!(w.is_dominant(), "stabilizer nodes need a dominant weight");
    (0..rs.rank).filter(|&a| w.coords[a] == 0).collect()
}

/// Minimal-length representatives of the cosets `w W_sub` inside the
/// parabolic subgroup generated by `ambient`.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub ambient: Vec<usize>,
    pub sub: Vec<usize>,
    /// Minimal-length coset representatives, sorted by `(length, word)`.
    pub reps: Vec<WeylElement>,
}

impl CosetTable {
    /// Builds the table for `W_ambient / W_sub`; requires `sub` contained in
    /// `ambient`.
    pub fn new(rs: &RootSystem, ambient: &[usize], sub: &[usize]) -> Result<Self, WeylError> {
        for &a in ambient.iter().chain(sub) {
            if a >= rs.rank {
                return Err(WeylError::BadNode {
                    node: a,
                    rank: rs.rank,
                });
            }
        }
        if !sub.iter().all(|a| ambient.contains(a)) {
            return Err(WeylError::NotSubset {
                sub: sub.to_vec(),
                ambient: ambient.to_vec(),
            });
        }

        // Anchor weight with stabilizer exactly W_sub: the sum of the
        // fundamental weights away from `sub`.
        let anchor: Coords = (0..rs.rank)
            .map(|a| i32::from(!sub.contains(&a)))
            .collect();

        // Breadth-first search on the orbit of the anchor restricted to
        // `ambient` generators; orbit points correspond to cosets and the
        // search depth is the minimal representative length.
        let mut words: BTreeMap<Coords, Vec<usize>> = BTreeMap::new();
        words.insert(anchor.clone(), Vec::new());
        let mut frontier = vec![anchor];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for mu in &frontier {
                for &a in ambient {
                    if mu[a] == 0 {
                        continue;
                    }
                    let mut nu = mu.clone();
                    let na = nu[a];
                    for c in 0..rs.rank {
                        nu[c] -= na * rs.cartan[c][a] as i32;
                    }
                    if !words.contains_key(&nu) {
                        let mut word = vec![a];
                        word.extend_from_slice(&words[mu]);
                        words.insert(nu.clone(), word);
                        next.push(nu);
                    }
                }
            }
            frontier = next;
        }

        let positive: BTreeSet<Coords> = rs
            .positive_roots
            .iter()
            .map(|r| r.coords.clone())
            .collect();
        let mut reps = Vec::with_capacity(words.len());
        for (_, word) in words {
            let depth = word.len();
            let rep = WeylElement::from_word(rs, &word).expect("validated nodes");
            // The canonical word must confirm the breadth-first depth, and a
            // minimal representative keeps every subgroup simple root
            // positive.
            assert_eq!(rep.len(), depth, "coset representative not minimal");
            for &j in sub {
                let img = rep.apply(&rs.simple_roots[j]);
                assert!(
                    positive.contains(&img.coords),
                    "representative moves a subgroup simple root negative"
                );
            }
            reps.push(rep);
        }
        reps.sort();
        Ok(CosetTable {
            ambient: ambient.to_vec(),
            sub: sub.to_vec(),
            reps,
        })
    }

    /// Table for `W / W_sub` with the full group as ambient.
    pub fn in_full_group(rs: &RootSystem, sub: &[usize]) -> Result<Self, WeylError> {
        let all: Vec<usize> = (0..rs.rank).collect();
        CosetTable::new(rs, &all, sub)
    }
}
