//! Finite root systems of types A-D, F4 and G2 in fundamental-weight
//! coordinates.
//!
//! Weights are stored as integer coordinate vectors in the basis of
//! fundamental weights, together with a positive denominator `scale` so that
//! fractional weights (needed when poles sit at fractions of a lattice weight)
//! stay exact.  The Cartan matrix is derived from the bond structure and the
//! relative root lengths of the diagram, never copied from a table, and the
//! invariant bilinear form is normalized so the highest root has squared
//! length 2.

use num_integer::Integer;
use num_rational::Ratio;
use smallvec::SmallVec;
use std::fmt;

/// Coordinate vector in the fundamental-weight basis.
pub type Coords = SmallVec<[i32; 4]>;

/// Exact rational with machine-word numerator and denominator.
pub type Rat = Ratio<i64>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RootError {
    #[error("unsupported Cartan type: {0}")]
    UnsupportedType(String),
    #[error("rank {rank} is out of range for family {family}")]
    BadRank { family: char, rank: usize },
    #[error("weight {0} does not lie in the root lattice")]
    NotInRootLattice(String),
    #[error("weight rank {got} does not match root system rank {want}")]
    RankMismatch { got: usize, want: usize },
}

/// Simple Lie algebra families supported by the library.
///
/// The exceptional types E6, E7 and E8 are rejected: the denominator
/// factorization driving the residue method is not available for E7 and E8,
/// and E6 is out of scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    F,
    G,
}

impl Family {
    fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// A Cartan type such as `A3`, `C2` or `F4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CartanType {
    pub family: Family,
    pub rank: usize,
}

impl CartanType {
    /// Validates the family/rank combination.
    pub fn new(family: Family, rank: usize) -> Result<Self, RootError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(CartanType { family, rank })
        } else {
            Err(RootError::BadRank {
                family: family.letter(),
                rank,
            })
        }
    }

    /// Parses strings like `"F4"`, `"A1"`, `"C2"`.
    pub fn parse(s: &str) -> Result<Self, RootError> {
        let s = s.trim();
        let mut chars = s.chars();
        let letter = chars
            .next()
            .ok_or_else(|| RootError::UnsupportedType(s.to_string()))?
            .to_ascii_uppercase();
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| RootError::UnsupportedType(s.to_string()))?;
        let family = match letter {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'F' => Family::F,
            'G' => Family::G,
            'E' => return Err(RootError::UnsupportedType(s.to_string())),
            _ => return Err(RootError::UnsupportedType(s.to_string())),
        };
        CartanType::new(family, rank)
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

/// A weight written in fundamental-weight coordinates, with denominator
/// `scale`; the weight represented is `coords / scale`.
///
/// Canonical form: `scale >= 1` and `gcd(gcd(coords), scale) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    pub coords: Coords,
    pub scale: i32,
}

impl Weight {
    /// Builds a weight and reduces it to canonical form.
    pub fn new(coords: impl Into<Coords>, scale: i32) -> Self {
        assert!(scale > 0, "weight scale must be positive");
        let mut w = Weight {
            coords: coords.into(),
            scale,
        };
        w.reduce();
        w
    }

    /// Integral weight from coordinates.
    pub fn from_coords(coords: impl Into<Coords>) -> Self {
        Weight {
            coords: coords.into(),
            scale: 1,
        }
    }

    /// The zero weight of the given rank.
    pub fn zero(rank: usize) -> Self {
        Weight {
            coords: std::iter::repeat(0).take(rank).collect(),
            scale: 1,
        }
    }

    /// The fundamental weight with index `a` (0-based).
    pub fn fundamental(a: usize, rank: usize) -> Self {
        let mut coords: Coords = std::iter::repeat(0).take(rank).collect();
        coords[a] = 1;
        Weight { coords, scale: 1 }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// True when every fundamental-weight coordinate is non-negative.
    pub fn is_dominant(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0)
    }

    /// True when the weight is integral (lies in the weight lattice).
    pub fn is_integral(&self) -> bool {
        self.scale == 1
    }

    fn reduce(&mut self) {
        let g = self
            .coords
            .iter()
            .fold(self.scale, |acc, &c| acc.gcd(&c.abs()));
        if g > 1 {
            for c in self.coords.iter_mut() {
                *c /= g;
            }
            self.scale /= g;
        }
    }

    /// Sum of two weights.
    pub fn add(&self, other: &Weight) -> Weight {
        self.combine(other, 1)
    }

    /// Difference of two weights.
    pub fn sub(&self, other: &Weight) -> Weight {
        self.combine(other, -1)
    }

    fn combine(&self, other: &Weight, sign: i32) -> Weight {
        assert_eq!(self.rank(), other.rank());
        let l = self.scale.lcm(&other.scale);
        let (fa, fb) = (l / self.scale, l / other.scale);
        let coords: Coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a * fa + sign * b * fb)
            .collect();
        Weight::new(coords, l)
    }

    /// Negated weight.
    pub fn neg(&self) -> Weight {
        Weight {
            coords: self.coords.iter().map(|&c| -c).collect(),
            scale: self.scale,
        }
    }

    /// The weight multiplied by an integer.
    pub fn mul(&self, k: i32) -> Weight {
        Weight::new(
            self.coords.iter().map(|&c| c * k).collect::<Coords>(),
            self.scale,
        )
    }

    /// The weight divided by a positive integer.
    pub fn div(&self, k: i32) -> Weight {
        assert!(k > 0);
        Weight::new(self.coords.clone(), self.scale * k)
    }

    /// Coordinates rescaled to the given common denominator.
    pub fn coords_at_scale(&self, scale: i32) -> Coords {
        assert!(scale % self.scale == 0, "incompatible weight scales");
        let f = scale / self.scale;
        self.coords.iter().map(|&c| c * f).collect()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        if self.scale != 1 {
            write!(f, ";{}", self.scale)?;
        }
        write!(f, ")")
    }
}

/// A finite root system with its Cartan data, positive roots and invariant
/// bilinear form.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub cartan_type: CartanType,
    pub rank: usize,
    /// Cartan matrix; entry `[a][b]` is the pairing of the simple root `b`
    /// with the simple coroot `a`.
    pub cartan: Vec<Vec<i64>>,
    /// Simple roots in fundamental-weight coordinates (columns of the Cartan
    /// matrix).
    pub simple_roots: Vec<Weight>,
    /// Positive roots in fundamental-weight coordinates.
    pub positive_roots: Vec<Weight>,
    /// Simple-root coordinates of each positive root, aligned with
    /// `positive_roots`.
    pub positive_roots_simple: Vec<Vec<i64>>,
    /// The highest root.
    pub highest_root: Weight,
    /// Half the sum of the positive roots; all-ones in this basis.
    pub rho: Weight,
    /// Ratios of the squared length of the highest root to each simple root.
    pub t: Vec<i64>,
    /// Gram matrix of the fundamental weights under the normalized form.
    bilinear: Vec<Vec<Rat>>,
    /// Inverse Cartan matrix.
    cartan_inv: Vec<Vec<Rat>>,
}

impl RootSystem {
    /// Builds the root system for a Cartan type.
    pub fn new(cartan_type: CartanType) -> Result<Self, RootError> {
        let rank = cartan_type.rank;
        let cartan = cartan_matrix(cartan_type);
        let simple_roots: Vec<Weight> = (0..rank)
            .map(|b| {
                Weight::from_coords((0..rank).map(|a| cartan[a][b] as i32).collect::<Coords>())
            })
            .collect();
        let cartan_inv = invert_rational(&cartan);

        // Closure of the simple roots under simple reflections gives all
        // roots; positivity is read off from simple-root coordinates.
        let mut all: std::collections::BTreeSet<Coords> = std::collections::BTreeSet::new();
        let mut queue: Vec<Coords> = Vec::new();
        for sr in &simple_roots {
            if all.insert(sr.coords.clone()) {
                queue.push(sr.coords.clone());
            }
        }
        while let Some(v) = queue.pop() {
            for a in 0..rank {
                let mut w = v.clone();
                let va = v[a];
                for c in 0..rank {
                    w[c] -= va * cartan[c][a] as i32;
                }
                if all.insert(w.clone()) {
                    queue.push(w);
                }
            }
        }

        let mut positive_roots = Vec::new();
        let mut positive_roots_simple = Vec::new();
        for coords in &all {
            let expansion = expand_simple(&cartan_inv, coords);
            if let Some(exp) = expansion {
                if exp.iter().all(|&c| c >= 0) && exp.iter().any(|&c| c > 0) {
                    positive_roots.push(Weight::from_coords(coords.clone()));
                    positive_roots_simple.push(exp);
                }
            }
        }
        // Sort ascending by height, then lexicographically, for determinism.
        let mut idx: Vec<usize> = (0..positive_roots.len()).collect();
        idx.sort_by_key(|&i| {
            (
                positive_roots_simple[i].iter().sum::<i64>(),
                positive_roots[i].coords.clone(),
            )
        });
        let positive_roots: Vec<Weight> = idx.iter().map(|&i| positive_roots[i].clone()).collect();
        let positive_roots_simple: Vec<Vec<i64>> =
            idx.iter().map(|&i| positive_roots_simple[i].clone()).collect();

        // The highest root is the unique positive root of maximal height.
        let heights: Vec<i64> = positive_roots_simple
            .iter()
            .map(|e| e.iter().sum::<i64>())
            .collect();
        let max_h = *heights.iter().max().expect("nonempty root system");
        let top: Vec<usize> = (0..heights.len()).filter(|&i| heights[i] == max_h).collect();
        assert_eq!(top.len(), 1, "highest root must be unique");
        let highest_root = positive_roots[top[0]].clone();
        assert!(highest_root.is_dominant());

        // Symmetrize the Cartan matrix: d[a] * cartan[a][b] must be symmetric.
        // Propagation along bonds determines d up to one global factor, which
        // is fixed by giving the highest root squared length 2.
        let mut d: Vec<Option<Rat>> = vec![None; rank];
        d[0] = Some(Rat::new(1, 1));
        let mut changed = true;
        while changed {
            changed = false;
            for a in 0..rank {
                for b in 0..rank {
                    if cartan[a][b] != 0 && d[a].is_some() && d[b].is_none() {
                        d[b] = Some(d[a].unwrap() * Rat::new(cartan[a][b], cartan[b][a]));
                        changed = true;
                    }
                }
            }
        }
        let mut d: Vec<Rat> = d
            .into_iter()
            .map(|x| x.expect("connected Dynkin diagram"))
            .collect();
        let theta = &positive_roots_simple[top[0]];
        let mut theta_sq = Rat::new(0, 1);
        for a in 0..rank {
            for b in 0..rank {
                theta_sq += Rat::new(theta[a], 1) * d[a] * Rat::new(cartan[a][b], 1)
                    * Rat::new(theta[b], 1);
            }
        }
        let fix = Rat::new(2, 1) / theta_sq;
        for da in d.iter_mut() {
            *da *= fix;
        }
        let t: Vec<i64> = d
            .iter()
            .map(|da| {
                let inv = da.recip();
                assert!(inv.is_integer(), "length ratio must be integral");
                inv.to_integer()
            })
            .collect();
        assert!(t.iter().all(|&x| (1..=3).contains(&x)));

        // Gram matrix of the fundamental weights: B = diag(d) * C^{-1}.
        let bilinear: Vec<Vec<Rat>> = (0..rank)
            .map(|a| (0..rank).map(|b| d[a] * cartan_inv[a][b]).collect())
            .collect();
        for a in 0..rank {
            for b in 0..rank {
                assert_eq!(bilinear[a][b], bilinear[b][a]);
            }
        }

        let rho = Weight::from_coords(std::iter::repeat(1).take(rank).collect::<Coords>());

        Ok(RootSystem {
            cartan_type,
            rank,
            cartan,
            simple_roots,
            positive_roots,
            positive_roots_simple,
            highest_root,
            rho,
            t,
            bilinear,
            cartan_inv,
        })
    }

    /// Pairing of a weight with the simple coroot `a` (0-based).
    pub fn pairing(&self, w: &Weight, a: usize) -> Rat {
        Rat::new(w.coords[a] as i64, w.scale as i64)
    }

    /// Simple-root coordinates of an integral weight in the root lattice.
    pub fn expand_in_simple_roots(&self, w: &Weight) -> Result<Vec<i64>, RootError> {
        if w.rank() != self.rank {
            return Err(RootError::RankMismatch {
                got: w.rank(),
                want: self.rank,
            });
        }
        if w.scale != 1 {
            return Err(RootError::NotInRootLattice(w.to_string()));
        }
        expand_simple(&self.cartan_inv, &w.coords)
            .ok_or_else(|| RootError::NotInRootLattice(w.to_string()))
    }

    /// Invariant bilinear form, normalized so the highest root has squared
    /// length 2.
    pub fn bilinear_form(&self, v: &Weight, w: &Weight) -> Rat {
        assert_eq!(v.rank(), self.rank);
        assert_eq!(w.rank(), self.rank);
        let mut s = Rat::new(0, 1);
        for a in 0..self.rank {
            if v.coords[a] == 0 {
                continue;
            }
            for b in 0..self.rank {
                if w.coords[b] == 0 {
                    continue;
                }
                s += Rat::new(v.coords[a] as i64, 1) * self.bilinear[a][b]
                    * Rat::new(w.coords[b] as i64, 1);
            }
        }
        s / Rat::new((v.scale as i64) * (w.scale as i64), 1)
    }

    /// Height of a weight: the sum of its simple-root coordinates.
    pub fn height(&self, w: &Weight) -> Rat {
        let mut s = Rat::new(0, 1);
        for a in 0..self.rank {
            for b in 0..self.rank {
                s += self.cartan_inv[a][b] * Rat::new(w.coords[b] as i64, 1);
            }
        }
        s / Rat::new(w.scale as i64, 1)
    }

    /// Simple reflection applied to a weight.
    pub fn reflect(&self, a: usize, w: &Weight) -> Weight {
        let wa = w.coords[a];
        let coords: Coords = (0..self.rank)
            .map(|c| w.coords[c] - wa * self.cartan[c][a] as i32)
            .collect();
        Weight {
            coords,
            scale: w.scale,
        }
    }
}

/// Cartan matrix from the bond structure of the Dynkin diagram.  Row `a`,
/// column `b` holds the pairing of simple root `b` with simple coroot `a`;
/// entries follow from declared adjacency and relative root lengths.
fn cartan_matrix(ct: CartanType) -> Vec<Vec<i64>> {
    let r = ct.rank;
    let mut c = vec![vec![0i64; r]; r];
    for a in 0..r {
        c[a][a] = 2;
    }
    let mut bond = |a: usize, b: usize, ab: i64, ba: i64| {
        c[a][b] = ab;
        c[b][a] = ba;
    };
    match ct.family {
        Family::A => {
            for i in 0..r - 1 {
                bond(i, i + 1, -1, -1);
            }
        }
        Family::B => {
            // Nodes 1..r-1 long, node r short.
            for i in 0..r.saturating_sub(2) {
                bond(i, i + 1, -1, -1);
            }
            bond(r - 2, r - 1, -1, -2);
        }
        Family::C => {
            // Nodes 1..r-1 short, node r long.
            for i in 0..r.saturating_sub(2) {
                bond(i, i + 1, -1, -1);
            }
            bond(r - 2, r - 1, -2, -1);
        }
        Family::D => {
            for i in 0..r - 3 {
                bond(i, i + 1, -1, -1);
            }
            bond(r - 3, r - 2, -1, -1);
            bond(r - 3, r - 1, -1, -1);
        }
        Family::F => {
            // Nodes 1,2 long; nodes 3,4 short.
            bond(0, 1, -1, -1);
            bond(1, 2, -1, -2);
            bond(2, 3, -1, -1);
        }
        Family::G => {
            // Node 1 long, node 2 short.
            bond(0, 1, -1, -3);
        }
    }
    c
}

/// Solves `C x = coords` over the rationals and returns `x` when integral.
fn expand_simple(cartan_inv: &[Vec<Rat>], coords: &Coords) -> Option<Vec<i64>> {
    let r = coords.len();
    let mut out = Vec::with_capacity(r);
    for row in cartan_inv.iter().take(r) {
        let mut s = Rat::new(0, 1);
        for (b, &cb) in coords.iter().enumerate() {
            s += row[b] * Rat::new(cb as i64, 1);
        }
        if !s.is_integer() {
            return None;
        }
        out.push(s.to_integer());
    }
    Some(out)
}

/// Exact inverse of an integer matrix by Gauss-Jordan elimination.
fn invert_rational(m: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    let n = m.len();
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..2 * n)
                .map(|j| {
                    if j < n {
                        Rat::new(m[i][j], 1)
                    } else if j - n == i {
                        Rat::new(1, 1)
                    } else {
                        Rat::new(0, 1)
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&i| a[i][col] != Rat::new(0, 1))
            .expect("invertible Cartan matrix");
        a.swap(col, pivot);
        let p = a[col][col];
        for j in 0..2 * n {
            a[col][j] /= p;
        }
        for i in 0..n {
            if i != col && a[i][col] != Rat::new(0, 1) {
                let f = a[i][col];
                for j in 0..2 * n {
                    let v = a[col][j];
                    a[i][j] -= f * v;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(CartanType::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn parse_accepts_supported_types_and_rejects_e_series() {
        assert!(CartanType::parse("A1").is_ok());
        assert!(CartanType::parse("C2").is_ok());
        assert!(CartanType::parse("F4").is_ok());
        assert!(CartanType::parse("G2").is_ok());
        assert!(matches!(
            CartanType::parse("E7"),
            Err(RootError::UnsupportedType(_))
        ));
        assert!(matches!(
            CartanType::parse("E8"),
            Err(RootError::UnsupportedType(_))
        ));
        assert!(matches!(
            CartanType::parse("F5"),
            Err(RootError::BadRank { .. })
        ));
        assert!(matches!(
            CartanType::parse("Q3"),
            Err(RootError::UnsupportedType(_))
        ));
    }

    #[test]
    fn a1_basics() {
        let r = rs("A1");
        assert_eq!(r.positive_roots.len(), 1);
        assert_eq!(r.positive_roots[0].coords.as_slice(), &[2]);
        assert_eq!(r.highest_root.coords.as_slice(), &[2]);
        assert_eq!(r.t, vec![1]);
        assert_eq!(r.rho.coords.as_slice(), &[1]);
    }

    #[test]
    fn f4_has_24_positive_roots_and_length_pattern() {
        let r = rs("F4");
        assert_eq!(r.positive_roots.len(), 24);
        assert_eq!(r.t, vec![1, 1, 2, 2]);
        // Long simple roots have squared length 2, short ones 1.
        for a in 0..4 {
            let n = r.bilinear_form(&r.simple_roots[a], &r.simple_roots[a]);
            assert_eq!(n, Rat::new(2, r.t[a]));
        }
        let theta_sq = r.bilinear_form(&r.highest_root, &r.highest_root);
        assert_eq!(theta_sq, Rat::new(2, 1));
    }

    #[test]
    fn f4_root_counts_by_brute_force_norm_scan() {
        // Independent enumeration: scan all integer vectors of simple-root
        // coordinates bounded by the highest root and keep those of squared
        // length 1 or 2.  Exactly the 24 positive roots must appear.
        let r = rs("F4");
        let theta = r.expand_in_simple_roots(&r.highest_root).unwrap();
        let mut count = 0usize;
        let mut v = vec![0i64; 4];
        fn scan(
            r: &RootSystem,
            theta: &[i64],
            v: &mut Vec<i64>,
            pos: usize,
            count: &mut usize,
        ) {
            if pos == 4 {
                if v.iter().all(|&x| x == 0) {
                    return;
                }
                let mut w = Weight::zero(4);
                for (a, &x) in v.iter().enumerate() {
                    w = w.add(&r.simple_roots[a].mul(x as i32));
                }
                let n = r.bilinear_form(&w, &w);
                if n == Rat::new(2, 1) || n == Rat::new(1, 1) {
                    *count += 1;
                }
                return;
            }
            for x in 0..=theta[pos] {
                v[pos] = x;
                scan(r, theta, v, pos + 1, count);
            }
            v[pos] = 0;
        }
        scan(&r, &theta, &mut v, 0, &mut count);
        assert_eq!(count, 24);
    }

    #[test]
    fn f4_highest_root_is_first_fundamental_weight() {
        let r = rs("F4");
        assert_eq!(r.highest_root, Weight::from_coords(vec![1, 0, 0, 0]));
        let exp = r.expand_in_simple_roots(&r.highest_root).unwrap();
        assert_eq!(exp, vec![2, 3, 4, 2]);
    }

    #[test]
    fn c2_cartan_and_roots() {
        let r = rs("C2");
        assert_eq!(r.cartan, vec![vec![2, -2], vec![-1, 2]]);
        assert_eq!(r.t, vec![2, 1]);
        assert_eq!(r.positive_roots.len(), 4);
        // Highest root is twice the first simple root plus the second.
        assert_eq!(
            r.expand_in_simple_roots(&r.highest_root).unwrap(),
            vec![2, 1]
        );
    }

    #[test]
    fn g2_cartan_and_roots() {
        let r = rs("G2");
        assert_eq!(r.cartan, vec![vec![2, -1], vec![-3, 2]]);
        assert_eq!(r.t, vec![1, 3]);
        assert_eq!(r.positive_roots.len(), 6);
    }

    #[test]
    fn pairing_reads_off_coordinates() {
        let r = rs("F4");
        let w = Weight::new(vec![3, -1, 0, 2], 2);
        assert_eq!(r.pairing(&w, 0), Rat::new(3, 2));
        assert_eq!(r.pairing(&w, 1), Rat::new(-1, 2));
        assert_eq!(r.pairing(&w, 3), Rat::new(1, 1));
    }

    #[test]
    fn expand_rejects_weights_outside_root_lattice() {
        // F4 weight and root lattices coincide, so only fractional weights
        // fail there.
        let r = rs("F4");
        let w = Weight::new(vec![1, 0, 0, 0], 2);
        assert!(r.expand_in_simple_roots(&w).is_err());
        // A2: omega_1 is not in the root lattice.
        let a2 = rs("A2");
        let w = Weight::fundamental(0, 2);
        assert!(matches!(
            a2.expand_in_simple_roots(&w),
            Err(RootError::NotInRootLattice(_))
        ));
    }

    #[test]
    fn positive_roots_reconstruct_from_simple_expansion() {
        for name in ["A2", "B3", "C2", "D4", "F4", "G2"] {
            let r = rs(name);
            for (root, exp) in r.positive_roots.iter().zip(&r.positive_roots_simple) {
                let mut acc = Weight::zero(r.rank);
                for (a, &c) in exp.iter().enumerate() {
                    acc = acc.add(&r.simple_roots[a].mul(c as i32));
                }
                assert_eq!(&acc, root);
                assert!(exp.iter().all(|&c| c >= 0));
            }
            // Sum of positive roots is twice rho.
            let mut sum = Weight::zero(r.rank);
            for root in &r.positive_roots {
                sum = sum.add(root);
            }
            assert_eq!(sum, r.rho.mul(2));
        }
    }

    #[test]
    fn reflect_preserves_norm_and_is_involutive() {
        let r = rs("F4");
        let w = Weight::from_coords(vec![1, 2, -1, 3]);
        for a in 0..4 {
            let sw = r.reflect(a, &w);
            assert_eq!(r.bilinear_form(&sw, &sw), r.bilinear_form(&w, &w));
            assert_eq!(r.reflect(a, &sw), w);
        }
    }

    #[test]
    fn weight_arithmetic_keeps_canonical_scale() {
        let a = Weight::new(vec![1, 0, 0, 0], 2);
        let b = Weight::new(vec![1, 0, 0, 0], 2);
        assert_eq!(a.add(&b), Weight::from_coords(vec![1, 0, 0, 0]));
        let c = Weight::new(vec![2, 4], 2);
        assert_eq!(c, Weight::from_coords(vec![1, 2]));
        assert_eq!(a.sub(&b), Weight::zero(4));
    }
}
