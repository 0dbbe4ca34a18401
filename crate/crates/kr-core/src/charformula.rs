//! Irreducible characters, the Weyl dimension formula, a cached character
//! store, and linear combinations of characters with exact product
//! decomposition.
//!
//! Characters are computed by expanding the signed orbit of `lambda + rho`
//! and dividing out the denominator one binomial factor at a time, which is
//! near-linear in the size of the result.  Products of characters never
//! expand both factors: the smaller one is expanded and multiplied against
//! the basis vector of the larger in the alternating basis, where the
//! product coefficients are exactly the decomposition multiplicities.

use crate::groupring::{AltForm, GroupRingElem};
use crate::rootsys::{Coords, RootSystem, Weight};
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

#[derive(Debug, thiserror::Error)]
pub enum CharError {
    #[error("weight {0} is not dominant integral")]
    NotDominant(String),
    #[error("character cache file {path} is corrupted: {reason}")]
    CacheCorruption { path: String, reason: String },
    #[error("element is not a combination of characters")]
    NotDecomposable,
}

/// Half the sum of positive roots paired into the numerator walk: the
/// signed orbit sum of `lambda + rho` as an alternating basis vector.
pub fn weyl_numerator(rs: &RootSystem, lambda: &Weight) -> AltForm {
    AltForm::single(rs, lambda.add(&rs.rho).coords, 1)
}

/// The Weyl denominator, expanded: `e^rho * prod over alpha > 0 of
/// (1 - e^{-alpha})`, equal to the signed orbit sum of `rho`.
pub fn weyl_denominator(rs: &RootSystem) -> GroupRingElem {
    AltForm::single(rs, rs.rho.coords.clone(), 1).to_elem(rs)
}

/// Multiplies by the Weyl denominator in factored form.
pub fn multiply_by_denominator(rs: &RootSystem, f: &GroupRingElem) -> GroupRingElem {
    let mut out = f.mul_monomial(&rs.rho, &BigInt::one());
    for alpha in &rs.positive_roots {
        out = out.mul_binomial(&alpha.neg(), false);
    }
    out
}

/// Exact division by the Weyl denominator, or `None` when not divisible.
pub fn divide_by_denominator(rs: &RootSystem, f: &GroupRingElem) -> Option<GroupRingElem> {
    let mut out = f.mul_monomial(&rs.rho.neg(), &BigInt::one());
    for alpha in &rs.positive_roots {
        out = out.divide_binomial(&alpha.neg(), false)?;
    }
    Some(out)
}

/// Dimension of the irreducible module by the Weyl dimension formula.
pub fn dimension(rs: &RootSystem, lambda: &Weight) -> BigInt {
    assert!(lambda.is_dominant() && lambda.is_integral());
    let lr = lambda.add(&rs.rho);
    let mut acc = Ratio::<BigInt>::one();
    for alpha in &rs.positive_roots {
        let num = rs.bilinear_form(&lr, alpha);
        let den = rs.bilinear_form(&rs.rho, alpha);
        acc *= Ratio::new(BigInt::from(*num.numer()), BigInt::from(*num.denom()));
        acc /= Ratio::new(BigInt::from(*den.numer()), BigInt::from(*den.denom()));
    }
    assert!(acc.is_integer(), "dimension formula must be integral");
    acc.to_integer()
}

// ---- character cache ----

#[derive(serde::Serialize, serde::Deserialize)]
struct DiskChar {
    cartan: String,
    weight: Vec<i32>,
    sha256: String,
    character: GroupRingElem,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Computes and memoizes irreducible characters, optionally persisting them
/// to a content-hashed on-disk store.
pub struct CharCache {
    rs: RootSystem,
    mem: RwLock<HashMap<Coords, Arc<GroupRingElem>>>,
    products: RwLock<HashMap<(Coords, Coords), Arc<BTreeMap<Coords, BigInt>>>>,
    disk: Option<PathBuf>,
}

impl CharCache {
    /// In-memory cache only.
    pub fn new(rs: RootSystem) -> Self {
        CharCache {
            rs,
            mem: RwLock::new(HashMap::new()),
            products: RwLock::new(HashMap::new()),
            disk: None,
        }
    }

    /// Cache backed by a directory; it is created if missing.
    pub fn with_disk(rs: RootSystem, dir: PathBuf) -> std::io::Result<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(CharCache {
            rs,
            mem: RwLock::new(HashMap::new()),
            products: RwLock::new(HashMap::new()),
            disk: Some(dir),
        })
    }

    /// Cache at the directory named by `KRV_CHAR_CACHE_DIR`, falling back
    /// to `krv-char-cache` under the system temporary directory.
    pub fn with_default_disk(rs: RootSystem) -> std::io::Result<Self> {
        let dir = std::env::var_os("KRV_CHAR_CACHE_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("krv-char-cache"));
        Self::with_disk(rs, dir)
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    fn disk_path(&self, lambda: &Coords) -> Option<PathBuf> {
        let dir = self.disk.as_ref()?;
        let name: Vec<String> = lambda.iter().map(|c| c.to_string()).collect();
        Some(dir.join(format!("{}_{}.json", self.rs.cartan_type, name.join("_"))))
    }

    /// The character of the irreducible module with this highest weight.
    pub fn character(&self, lambda: &Weight) -> Result<Arc<GroupRingElem>, CharError> {
        if !lambda.is_dominant() || !lambda.is_integral() || lambda.rank() != self.rs.rank {
            return Err(CharError::NotDominant(lambda.to_string()));
        }
        if let Some(hit) = self.mem.read().expect("lock").get(&lambda.coords) {
            return Ok(hit.clone());
        }
        if let Some(path) = self.disk_path(&lambda.coords) {
            if path.exists() {
                let loaded = self.load_disk(&path, lambda)?;
                let arc = Arc::new(loaded);
                self.mem
                    .write()
                    .expect("lock")
                    .insert(lambda.coords.clone(), arc.clone());
                return Ok(arc);
            }
        }
        let computed = self.compute(lambda);
        if let Some(path) = self.disk_path(&lambda.coords) {
            // Persistence is an optimization; failures to write are ignored.
            let _ = self.store_disk(&path, lambda, &computed);
        }
        let arc = Arc::new(computed);
        self.mem
            .write()
            .expect("lock")
            .insert(lambda.coords.clone(), arc.clone());
        Ok(arc)
    }

    fn compute(&self, lambda: &Weight) -> GroupRingElem {
        let numerator = weyl_numerator(&self.rs, lambda).to_elem(&self.rs);
        divide_by_denominator(&self.rs, &numerator)
            .expect("Weyl numerator is divisible by every denominator factor")
    }

    fn load_disk(&self, path: &Path, lambda: &Weight) -> Result<GroupRingElem, CharError> {
        let corrupt = |reason: &str| CharError::CacheCorruption {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        let bytes = std::fs::read(path).map_err(|e| corrupt(&format!("unreadable: {e}")))?;
        let disk: DiskChar =
            serde_json::from_slice(&bytes).map_err(|e| corrupt(&format!("bad json: {e}")))?;
        if disk.cartan != self.rs.cartan_type.to_string() {
            return Err(corrupt("cartan type mismatch"));
        }
        if disk.weight != lambda.coords.to_vec() {
            return Err(corrupt("weight mismatch"));
        }
        let payload = serde_json::to_vec(&disk.character).expect("serializable");
        let digest = hex_digest(&payload);
        if digest != disk.sha256 {
            return Err(corrupt("content hash mismatch"));
        }
        if disk.character.rank() != self.rs.rank {
            return Err(corrupt("rank mismatch"));
        }
        Ok(disk.character)
    }

    fn store_disk(
        &self,
        path: &Path,
        lambda: &Weight,
        character: &GroupRingElem,
    ) -> std::io::Result<()> {
        let payload = serde_json::to_vec(character).expect("serializable");
        let disk = DiskChar {
            cartan: self.rs.cartan_type.to_string(),
            weight: lambda.coords.to_vec(),
            sha256: hex_digest(&payload),
            character: character.clone(),
        };
        let tmp = path.with_extension(format!(
            "tmp.{}.{}",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&tmp, serde_json::to_vec(&disk).expect("serializable"))?;
        std::fs::rename(&tmp, path)
    }

    /// Decomposition multiplicities of a product of two irreducibles,
    /// memoized per unordered pair.
    pub fn product_pair(
        &self,
        a: &Weight,
        b: &Weight,
    ) -> Result<Arc<BTreeMap<Coords, BigInt>>, CharError> {
        let key = if a.coords <= b.coords {
            (a.coords.clone(), b.coords.clone())
        } else {
            (b.coords.clone(), a.coords.clone())
        };
        if let Some(hit) = self.products.read().expect("lock").get(&key) {
            return Ok(hit.clone());
        }
        // Expand the factor with the smaller dimension; keep the other as a
        // single alternating basis vector.
        let (small, big) = if dimension(&self.rs, a) <= dimension(&self.rs, b) {
            (a, b)
        } else {
            (b, a)
        };
        let chi_small = self.character(small)?;
        let alt = AltForm::single(&self.rs, big.add(&self.rs.rho).coords, 1)
            .mul_invariant(&self.rs, &chi_small);
        let mut terms = BTreeMap::new();
        for (nu, m) in alt.iter() {
            let mu: Coords = nu.iter().map(|&c| c - 1).collect();
            debug_assert!(mu.iter().all(|&c| c >= 0));
            terms.insert(mu, m.clone());
        }
        let arc = Arc::new(terms);
        self.products
            .write()
            .expect("lock")
            .insert(key, arc.clone());
        Ok(arc)
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

// ---- character combinations ----

/// An integer linear combination of irreducible characters, stored by
/// highest weight.  This is the working representation for Q-system values:
/// products and convolutions stay in decomposed form and are expanded only
/// on demand.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharCombo {
    pub(crate) rank: usize,
    pub(crate) terms: BTreeMap<Coords, BigInt>,
}

impl CharCombo {
    pub fn zero(rank: usize) -> Self {
        CharCombo {
            rank,
            terms: BTreeMap::new(),
        }
    }

    /// The combination `mult * chi(lambda)`.
    pub fn single(lambda: &Weight, mult: impl Into<BigInt>) -> Self {
        assert!(lambda.is_dominant() && lambda.is_integral());
        let mult = mult.into();
        let mut terms = BTreeMap::new();
        if !mult.is_zero() {
            terms.insert(lambda.coords.clone(), mult);
        }
        CharCombo {
            rank: lambda.rank(),
            terms,
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

    /// Multiplicity of the irreducible with this highest weight.
    pub fn coeff(&self, lambda: &Weight) -> BigInt {
        assert!(lambda.is_integral());
        self.terms
            .get(&lambda.coords)
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Iterates `(highest weight, multiplicity)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (Weight, &BigInt)> + '_ {
        self.terms
            .iter()
            .map(|(k, v)| (Weight::from_coords(k.clone()), v))
    }

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

    pub fn scalar_mul(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return CharCombo::zero(self.rank);
        }
        CharCombo {
            rank: self.rank,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Exact product, decomposing pairwise through the cache.
    pub fn mul(&self, cache: &CharCache, other: &Self) -> Result<Self, CharError> {
        let mut out = CharCombo::zero(self.rank);
        for (la, ma) in &self.terms {
            let wa = Weight::from_coords(la.clone());
            for (lb, mb) in &other.terms {
                let wb = Weight::from_coords(lb.clone());
                let pair = cache.product_pair(&wa, &wb)?;
                let m = ma * mb;
                for (mu, c) in pair.iter() {
                    let cv = c * &m;
                    use std::collections::btree_map::Entry;
                    match out.terms.entry(mu.clone()) {
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
        }
        Ok(out)
    }

    /// Expands to the group ring.
    pub fn to_elem(&self, cache: &CharCache) -> Result<GroupRingElem, CharError> {
        let mut out = GroupRingElem::zero(self.rank);
        for (k, m) in &self.terms {
            let chi = cache.character(&Weight::from_coords(k.clone()))?;
            out.add_scaled_assign(&chi, m);
        }
        Ok(out)
    }

    /// The alternating form of the product with the Weyl denominator: each
    /// character contributes its numerator basis vector directly.
    pub fn numerator_form(&self, rs: &RootSystem) -> AltForm {
        let mut out = AltForm::zero(self.rank);
        for (k, m) in &self.terms {
            let nu: Coords = k.iter().zip(&rs.rho.coords).map(|(&a, &r)| a + r).collect();
            out.add_reduced(rs, nu, m);
        }
        out
    }

    /// Total dimension of the virtual module.
    pub fn dimension(&self, rs: &RootSystem) -> BigInt {
        let mut acc = BigInt::zero();
        for (k, m) in &self.terms {
            acc += m * dimension(rs, &Weight::from_coords(k.clone()));
        }
        acc
    }
}

/// Decomposes a Weyl-invariant element into characters by multiplying with
/// the factored denominator and reading alternating coefficients.
pub fn decompose(rs: &RootSystem, f: &GroupRingElem) -> Result<CharCombo, CharError> {
    if f.is_zero() {
        return Ok(CharCombo::zero(f.rank()));
    }
    if f.scale() != 1 {
        return Err(CharError::NotDecomposable);
    }
    let shifted = multiply_by_denominator(rs, f);
    let mut combo = CharCombo::zero(f.rank());
    let mut seen = GroupRingElem::zero(f.rank());
    for (k, c) in &shifted.terms {
        if k.iter().all(|&x| x > 0) {
            let mu: Coords = k.iter().zip(&rs.rho.coords).map(|(&a, &r)| a - r).collect();
            combo.terms.insert(mu, c.clone());
        }
    }
    // Validate: the alternating expansion of what we read must reproduce
    // the product exactly, otherwise the input was not invariant.
    let alt = combo.numerator_form(rs);
    seen.add_scaled_assign(&alt.to_elem(rs), &BigInt::one());
    if seen != shifted {
        return Err(CharError::NotDecomposable);
    }
    Ok(combo)
}
