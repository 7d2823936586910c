//! Binary extended-connectivity fingerprints and Tanimoto distance search.

use rayon::prelude::*;
use thiserror::Error;

use crate::molgraph::{bond_code, Molecule};

pub const DEFAULT_RADIUS: u32 = 2;
pub const DEFAULT_WIDTH: usize = 2048;

/// Buckets at least this large are scanned in parallel.
const PARALLEL_BUCKET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("fingerprint widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("empty fingerprint set")]
    EmptySet,
}

/// Fixed-width bit vector with a cached popcount.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    words: Vec<u64>,
    width: usize,
    popcount: u32,
}

impl Fingerprint {
    /// All-zero fingerprint. `width` must be a positive multiple of 64.
    pub fn empty(width: usize) -> Fingerprint {
        assert!(width > 0 && width % 64 == 0, "width must be a positive multiple of 64");
        Fingerprint { words: vec![0; width / 64], width, popcount: 0 }
    }

    pub fn from_bits(width: usize, bits: impl IntoIterator<Item = usize>) -> Fingerprint {
        let mut fp = Fingerprint::empty(width);
        for b in bits {
            fp.set(b);
        }
        fp
    }

    pub fn set(&mut self, bit: usize) {
        assert!(bit < self.width, "bit {bit} out of range for width {}", self.width);
        let (w, mask) = (bit / 64, 1u64 << (bit % 64));
        if self.words[w] & mask == 0 {
            self.words[w] |= mask;
            self.popcount += 1;
        }
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn popcount(&self) -> u32 {
        self.popcount
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.width).filter(|&b| self.get(b))
    }

    fn common(&self, other: &Fingerprint) -> u32 {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum()
    }

    /// (shared bits, union bits); the union is 0 only for two empty vectors.
    fn overlap(&self, other: &Fingerprint) -> (u32, u32) {
        let c = self.common(other);
        (c, self.popcount + other.popcount - c)
    }
}

fn mix(mut h: u64, v: u64) -> u64 {
    // splitmix64 finalizer over a running state; fixed constants keep the
    // hash identical on every platform
    h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn atom_invariant(mol: &Molecule, a: usize) -> u64 {
    let atom = mol.atom(a);
    [
        atom.element as u64,
        mol.heavy_degree(a) as u64,
        mol.total_h(a) as u64,
        (atom.formal_charge as i64 + 128) as u64,
        atom.in_ring as u64,
        atom.aromatic as u64,
    ]
    .into_iter()
    .fold(0x6a09_e667_f3bc_c908, mix)
}

/// Morgan environment identifiers for radii 0..=radius, with environments
/// covering an already-seen bond set dropped.
pub fn environment_ids(mol: &Molecule, radius: u32) -> Vec<u64> {
    // hydrogens are folded into the heavy-atom invariants
    let heavy: Vec<usize> = (0..mol.atom_count()).filter(|&a| !mol.atom(a).is_hydrogen()).collect();
    let mut ids: Vec<u64> = (0..mol.atom_count()).map(|a| atom_invariant(mol, a)).collect();
    let mut out: Vec<u64> = heavy.iter().map(|&a| ids[a]).collect();
    let words = mol.bond_count().div_ceil(64).max(1);
    let mut cover: Vec<Vec<u64>> = vec![vec![0; words]; mol.atom_count()];
    let mut seen: Vec<Vec<u64>> = Vec::new();
    for round in 1..=radius {
        let mut next = ids.clone();
        let mut next_cover = cover.clone();
        let mut fresh = Vec::new();
        for &a in &heavy {
            let mut nbrs: Vec<(u8, u64)> = mol
                .neighbors(a)
                .iter()
                .filter(|nb| !mol.atom(nb.atom).is_hydrogen())
                .map(|nb| {
                    let b = mol.bond(nb.bond);
                    (bond_code(b.order, b.aromatic), ids[nb.atom])
                })
                .collect();
            nbrs.sort_unstable();
            let mut h = mix(round as u64, ids[a]);
            for (code, id) in nbrs {
                h = mix(mix(h, code as u64), id);
            }
            next[a] = h;
            for nb in mol.neighbors(a) {
                if mol.atom(nb.atom).is_hydrogen() {
                    continue;
                }
                next_cover[a][nb.bond / 64] |= 1 << (nb.bond % 64);
                for (w, x) in cover[nb.atom].iter().enumerate() {
                    next_cover[a][w] |= x;
                }
            }
            fresh.push((next_cover[a].clone(), h));
        }
        // within a round, equal bond sets keep the smaller identifier
        fresh.sort_unstable();
        for (bonds, h) in fresh {
            if bonds.iter().all(|&w| w == 0) || seen.contains(&bonds) {
                continue;
            }
            seen.push(bonds);
            out.push(h);
        }
        ids = next;
        cover = next_cover;
    }
    out
}

/// ECFP of the given radius folded to `width` bits (a power of two, at
/// least 64).
pub fn ecfp(mol: &Molecule, radius: u32, width: usize) -> Fingerprint {
    assert!(width.is_power_of_two() && width >= 64, "width must be a power of two >= 64");
    let mask = width as u64 - 1;
    Fingerprint::from_bits(width, environment_ids(mol, radius).into_iter().map(|h| (h & mask) as usize))
}

/// 1 - |a and b| / |a or b|; 0 for two empty fingerprints.
pub fn tanimoto_distance(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.width != b.width {
        return Err(FingerprintError::WidthMismatch(a.width, b.width));
    }
    Ok(distance_from(a.overlap(b)))
}

fn distance_from((common, union): (u32, u32)) -> f64 {
    if union == 0 {
        0.0
    } else {
        1.0 - common as f64 / union as f64
    }
}

/// Exact similarity fraction common/union, with empty-vs-empty as 1/1.
#[derive(Debug, Clone, Copy)]
struct Sim(u32, u32);

impl Sim {
    fn of(a: &Fingerprint, b: &Fingerprint) -> Sim {
        match a.overlap(b) {
            (_, 0) => Sim(1, 1),
            (c, u) => Sim(c, u),
        }
    }

    /// Best similarity any fingerprint with popcount `q` can have with one of
    /// popcount `p`.
    fn bound(q: u32, p: u32) -> Sim {
        match (q.min(p), q.max(p)) {
            (_, 0) => Sim(1, 1),
            (lo, hi) => Sim(lo, hi),
        }
    }

    fn gt(self, o: Sim) -> bool {
        self.0 as u64 * o.1 as u64 > o.0 as u64 * self.1 as u64
    }

    fn distance(self) -> f64 {
        1.0 - self.0 as f64 / self.1 as f64
    }

    /// Distance strictly below `t`.
    fn closer_than(self, t: f64) -> bool {
        self.distance() < t
    }
}

/// Smallest distance from `q` to a member of `set`, with the lowest index on
/// ties. Candidates whose popcount alone rules them out are skipped; the
/// result equals a plain scan.
pub fn min_distance_to_set(q: &Fingerprint, set: &[Fingerprint]) -> Result<(f64, usize), FingerprintError> {
    if set.is_empty() {
        return Err(FingerprintError::EmptySet);
    }
    if let Some(f) = set.iter().find(|f| f.width != q.width) {
        return Err(FingerprintError::WidthMismatch(q.width, f.width));
    }
    let mut best = (Sim::of(q, &set[0]), 0);
    for (i, f) in set.iter().enumerate().skip(1) {
        if !Sim::bound(q.popcount, f.popcount).gt(best.0) {
            continue;
        }
        let s = Sim::of(q, f);
        if s.gt(best.0) {
            best = (s, i);
        }
    }
    Ok((best.0.distance(), best.1))
}

/// Fingerprints bucketed by popcount, so a query only visits buckets whose
/// popcount bound can still beat the current answer.
#[derive(Debug, Clone)]
pub struct PopcountIndex {
    width: usize,
    fps: Vec<Fingerprint>,
    /// Insertion indices per popcount.
    buckets: Vec<Vec<usize>>,
}

impl PopcountIndex {
    pub fn new(width: usize) -> PopcountIndex {
        PopcountIndex { width, fps: Vec::new(), buckets: vec![Vec::new(); width + 1] }
    }

    pub fn from_fingerprints(fps: &[Fingerprint]) -> Result<PopcountIndex, FingerprintError> {
        let width = fps.first().ok_or(FingerprintError::EmptySet)?.width;
        let mut idx = PopcountIndex::new(width);
        for f in fps {
            idx.insert(f.clone())?;
        }
        Ok(idx)
    }

    /// Add a fingerprint; its index is the insertion position.
    pub fn insert(&mut self, fp: Fingerprint) -> Result<usize, FingerprintError> {
        if fp.width != self.width {
            return Err(FingerprintError::WidthMismatch(self.width, fp.width));
        }
        let i = self.fps.len();
        self.buckets[fp.popcount as usize].push(i);
        self.fps.push(fp);
        Ok(i)
    }

    /// Entries ever inserted, removed ones included.
    pub fn len(&self) -> usize {
        self.fps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fps.is_empty()
    }

    pub fn get(&self, i: usize) -> &Fingerprint {
        &self.fps[i]
    }

    /// Buckets in order of decreasing similarity bound.
    fn bucket_order(&self, q: u32) -> impl Iterator<Item = usize> + '_ {
        let q = q as usize;
        let (mut lo, mut hi) = (q as isize - 1, q + 1);
        std::iter::once(q).chain(std::iter::from_fn(move || {
            let below = (lo >= 0).then(|| Sim::bound(q as u32, lo as u32));
            let above = (hi <= self.width).then(|| Sim::bound(q as u32, hi as u32));
            match (below, above) {
                (None, None) => None,
                (Some(_), None) => {
                    lo -= 1;
                    Some((lo + 1) as usize)
                }
                (None, Some(_)) => {
                    hi += 1;
                    Some(hi - 1)
                }
                (Some(b), Some(a)) => {
                    if a.gt(b) {
                        hi += 1;
                        Some(hi - 1)
                    } else {
                        lo -= 1;
                        Some((lo + 1) as usize)
                    }
                }
            }
        }))
    }

    /// Nearest stored fingerprint (lowest index on ties).
    pub fn nearest(&self, q: &Fingerprint) -> Result<(f64, usize), FingerprintError> {
        if self.fps.is_empty() {
            return Err(FingerprintError::EmptySet);
        }
        if q.width != self.width {
            return Err(FingerprintError::WidthMismatch(self.width, q.width));
        }
        let mut best: Option<(Sim, usize)> = None;
        for p in self.bucket_order(q.popcount) {
            let bound = Sim::bound(q.popcount, p as u32);
            if let Some((s, _)) = best {
                if s.gt(bound) {
                    break;
                }
            }
            for &i in &self.buckets[p] {
                let s = Sim::of(q, &self.fps[i]);
                let better = match best {
                    None => true,
                    Some((bs, bi)) => s.gt(bs) || (!bs.gt(s) && i < bi),
                };
                if better {
                    best = Some((s, i));
                }
            }
        }
        let (s, i) = best.expect("non-empty index");
        Ok((s.distance(), i))
    }

    /// Drop entry `i` from future queries; indices of other entries are kept.
    pub fn remove(&mut self, i: usize) {
        let bucket = &mut self.buckets[self.fps[i].popcount as usize];
        if let Some(pos) = bucket.iter().position(|&j| j == i) {
            bucket.remove(pos);
        }
    }

    /// Up to `cap` stored entries at distance < t from `q`, ascending.
    pub fn closer_than(&self, q: &Fingerprint, t: f64, cap: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for p in self.bucket_order(q.popcount) {
            if out.len() >= cap || !Sim::bound(q.popcount, p as u32).closer_than(t) {
                break;
            }
            for &i in &self.buckets[p] {
                if Sim::of(q, &self.fps[i]).closer_than(t) {
                    out.push(i);
                    if out.len() >= cap {
                        break;
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Whether some stored fingerprint lies at distance < t from `q`.
    pub fn any_closer_than(&self, q: &Fingerprint, t: f64) -> bool {
        for p in self.bucket_order(q.popcount) {
            if !Sim::bound(q.popcount, p as u32).closer_than(t) {
                break;
            }
            let bucket = &self.buckets[p];
            let hit = |&i: &usize| Sim::of(q, &self.fps[i]).closer_than(t);
            let found = if bucket.len() >= PARALLEL_BUCKET { bucket.par_iter().any(hit) } else { bucket.iter().any(hit) };
            if found {
                return true;
            }
        }
        false
    }
}

/// Nearest member of `set` for every query, computed in parallel.
pub fn nearest_all(queries: &[Fingerprint], set: &[Fingerprint]) -> Result<Vec<(f64, usize)>, FingerprintError> {
    let index = PopcountIndex::from_fingerprints(set)?;
    queries.par_iter().map(|q| index.nearest(q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;
    use crate::standardizer::standardize;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(s: &str) -> Fingerprint {
        ecfp(&standardize(&parse_smiles(s).unwrap()).unwrap(), DEFAULT_RADIUS, DEFAULT_WIDTH)
    }

    fn random_fps(n: usize, seed: u64) -> Vec<Fingerprint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let k = rng.gen_range(0..20);
                Fingerprint::from_bits(64, (0..k).map(|_| rng.gen_range(0..64)))
            })
            .collect()
    }

    #[test]
    fn methane_radius_zero_sets_one_bit() {
        let m = standardize(&parse_smiles("C").unwrap()).unwrap();
        assert_eq!(ecfp(&m, 0, 2048).popcount(), 1);
        assert_eq!(ecfp(&m, 2, 2048).popcount(), 1);
    }

    #[test]
    fn ecfp_ignores_atom_order() {
        assert_eq!(fp("OCC"), fp("CCO"));
        assert_eq!(fp("c1ccccc1O"), fp("Oc1ccccc1"));
        let m = standardize(&parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap()).unwrap();
        let n = m.atom_count();
        let order: Vec<usize> = (0..n).rev().collect();
        assert_eq!(ecfp(&m, 2, 2048), ecfp(&m.permuted(&order), 2, 2048));
    }

    #[test]
    fn related_molecules_share_bits() {
        let d = tanimoto_distance(&fp("CCO"), &fp("CCCO")).unwrap();
        assert!(d > 0.0 && d < 1.0);
        assert_eq!(tanimoto_distance(&fp("CCO"), &fp("CCO")).unwrap(), 0.0);
    }

    #[test]
    fn tanimoto_arithmetic() {
        let a = Fingerprint::from_bits(64, [1, 2, 3]);
        let b = Fingerprint::from_bits(64, [2, 3, 4]);
        assert_eq!(tanimoto_distance(&a, &b).unwrap(), 0.5);
        let c = Fingerprint::from_bits(64, [10]);
        assert_eq!(tanimoto_distance(&a, &c).unwrap(), 1.0);
        let e = Fingerprint::empty(64);
        assert_eq!(tanimoto_distance(&e, &e).unwrap(), 0.0);
        assert_eq!(tanimoto_distance(&a, &e).unwrap(), 1.0);
        assert!(matches!(tanimoto_distance(&a, &Fingerprint::empty(128)), Err(FingerprintError::WidthMismatch(64, 128))));
    }

    #[test]
    fn min_distance_matches_plain_scan() {
        let set = random_fps(300, 1);
        let queries = random_fps(100, 2);
        let index = PopcountIndex::from_fingerprints(&set).unwrap();
        for q in &queries {
            let naive = set
                .iter()
                .enumerate()
                .map(|(i, f)| (tanimoto_distance(q, f).unwrap(), i))
                .fold((f64::INFINITY, usize::MAX), |b, c| if c.0 < b.0 { c } else { b });
            assert_eq!(min_distance_to_set(q, &set).unwrap(), naive);
            assert_eq!(index.nearest(q).unwrap(), naive);
            for t in [0.3, 0.5, 0.75, 0.9] {
                assert_eq!(index.any_closer_than(q, t), naive.0 < t);
            }
        }
    }

    #[test]
    fn member_query_returns_first_copy() {
        let mut set = random_fps(20, 3);
        set.push(set[5].clone());
        assert_eq!(min_distance_to_set(&set[5], &set).unwrap(), (0.0, 5));
        assert_eq!(PopcountIndex::from_fingerprints(&set).unwrap().nearest(&set[5]).unwrap(), (0.0, 5));
        assert_eq!(min_distance_to_set(&set[0], &[]), Err(FingerprintError::EmptySet));
    }
}
