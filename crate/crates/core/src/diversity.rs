//! Diverse subsets, #Circles and distance-distribution statistics.
//!
//! Every routine is deterministic for a given input order and seed. Distance
//! scans run in parallel; picks and accepts are committed sequentially.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fingerprint::{nearest_all, tanimoto_distance, Fingerprint, FingerprintError, PopcountIndex};

/// Center threshold for diverse subsets.
pub const DEFAULT_SUBSET_T: f64 = 0.9;
/// Circle radius for #Circles.
pub const DEFAULT_NCIRCLES_T: f64 = 0.75;

#[derive(Debug, Error, PartialEq)]
pub enum DiversityError {
    #[error("subset size {m} exceeds dataset size {n}")]
    SubsetTooLarge { m: usize, n: usize },
    #[error("at least {0} fingerprints are required")]
    TooFew(usize),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
}

fn dist(a: &Fingerprint, b: &Fingerprint) -> f64 {
    tanimoto_distance(a, b).expect("fingerprints share a width")
}

fn check_widths(fps: &[Fingerprint]) -> Result<(), DiversityError> {
    if let Some(first) = fps.first() {
        if let Some(f) = fps.iter().find(|f| f.width() != first.width()) {
            return Err(FingerprintError::WidthMismatch(first.width(), f.width()).into());
        }
    }
    Ok(())
}

/// Greedy MaxMin. The first pick is drawn from `seed`; each further pick is
/// the element farthest from the picked set (lowest index on ties). Stops
/// when that distance drops below `t` or `k_max` picks are made. An empty
/// input yields no picks.
pub fn maxmin_pick(fps: &[Fingerprint], t: f64, k_max: usize, seed: u64) -> Result<Vec<usize>, DiversityError> {
    check_widths(fps)?;
    if fps.is_empty() || k_max == 0 {
        return Ok(Vec::new());
    }
    let first = ChaCha8Rng::seed_from_u64(seed).gen_range(0..fps.len());
    let mut picked = vec![first];
    let mut taken = vec![false; fps.len()];
    taken[first] = true;
    let mut mind: Vec<f64> = fps.par_iter().map(|f| dist(f, &fps[first])).collect();
    while picked.len() < k_max {
        let best = mind
            .iter()
            .enumerate()
            .filter(|&(i, _)| !taken[i])
            .fold(None, |best: Option<(usize, f64)>, (i, &d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            });
        let Some((next, d)) = best else { break };
        if d < t {
            break;
        }
        picked.push(next);
        taken[next] = true;
        let q = &fps[next];
        mind.par_iter_mut().zip(fps.par_iter()).for_each(|(m, f)| *m = m.min(dist(f, q)));
    }
    Ok(picked)
}

/// Label every element with the position in `centers` of its nearest center
/// (lowest position on ties). A center always labels itself.
pub fn assign_to_centers(fps: &[Fingerprint], centers: &[usize]) -> Result<Vec<usize>, DiversityError> {
    if centers.is_empty() {
        return Err(DiversityError::TooFew(1));
    }
    let set: Vec<Fingerprint> = centers.iter().map(|&c| fps[c].clone()).collect();
    let mut labels: Vec<usize> = nearest_all(fps, &set)?.into_iter().map(|(_, k)| k).collect();
    for (k, &c) in centers.iter().enumerate() {
        labels[c] = k;
    }
    Ok(labels)
}

/// Breakdown of a diverse subset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiverseSubset {
    /// Selected indices, ascending.
    pub indices: Vec<usize>,
    /// MaxMin centers in pick order.
    pub centers: Vec<usize>,
    /// Extra members drawn per cluster.
    pub per_cluster: usize,
    /// Members added by the final uniform top-up.
    pub top_up: usize,
}

/// Select exactly `m` elements: MaxMin centers at threshold `t`, then
/// floor((m - K) / K) - 1 random members of each cluster (never below
/// zero), then a uniform top-up from the unselected pool.
pub fn diverse_subset(fps: &[Fingerprint], m: usize, t: f64, seed: u64) -> Result<DiverseSubset, DiversityError> {
    let n = fps.len();
    if m > n {
        return Err(DiversityError::SubsetTooLarge { m, n });
    }
    if m == 0 {
        return Ok(DiverseSubset { indices: Vec::new(), centers: Vec::new(), per_cluster: 0, top_up: 0 });
    }
    let centers = maxmin_pick(fps, t, m, seed)?;
    let k = centers.len();
    let per_cluster = ((m - k) / k).saturating_sub(1);
    let labels = assign_to_centers(fps, &centers)?;
    let mut selected = vec![false; n];
    for &c in &centers {
        selected[c] = true;
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        if !selected[i] {
            members[l].push(i);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    if per_cluster > 0 {
        for pool in &members {
            let take = per_cluster.min(pool.len());
            for j in sample(&mut rng, pool.len(), take).into_iter() {
                selected[pool[j]] = true;
            }
        }
    }
    let count = selected.iter().filter(|&&s| s).count();
    let top_up = m - count;
    let pool: Vec<usize> = (0..n).filter(|&i| !selected[i]).collect();
    for j in sample(&mut rng, pool.len(), top_up).into_iter() {
        selected[pool[j]] = true;
    }
    let indices: Vec<usize> = (0..n).filter(|&i| selected[i]).collect();
    debug_assert_eq!(indices.len(), m);
    Ok(DiverseSubset { indices, centers, per_cluster, top_up })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NCircles {
    pub t: f64,
    pub n: usize,
    pub count: usize,
    /// count / n; 0 for an empty set.
    pub normalized: f64,
    /// Size of the plain input-order greedy packing before swaps.
    pub greedy_count: usize,
    /// Accepted indices, ascending.
    pub accepted: Vec<usize>,
}

/// Largest input for which [`ncircles`] takes the envelope over every
/// pairwise-distance breakpoint.
pub const ENVELOPE_MAX_N: usize = 64;

/// Packing estimate: an input-order greedy scan accepts an element when
/// every accepted element is at distance >= `t`, then swaps that trade one
/// accepted element for two are applied until none is left. The result is a
/// maximal packing and a lower bound on the packing number.
///
/// For inputs of at most [`ENVELOPE_MAX_N`] elements the estimate is the
/// largest such packing over `t` and every pairwise distance above `t` (a
/// packing at a larger radius is also one at `t`). The conflict graph only
/// changes at those distances, so the count is then nonincreasing in `t`.
pub fn ncircles(fps: &[Fingerprint], t: f64) -> Result<NCircles, DiversityError> {
    check_widths(fps)?;
    let n = fps.len();
    if n == 0 {
        return Ok(NCircles { t, n: 0, count: 0, normalized: 0.0, greedy_count: 0, accepted: Vec::new() });
    }
    let (accepted, greedy_count) = if n <= ENVELOPE_MAX_N { envelope_packing(fps, t) } else { refined_packing(fps, t) };
    let count = accepted.len();
    Ok(NCircles { t, n, count, normalized: count as f64 / n as f64, greedy_count, accepted })
}

/// Accepted indices (ascending) after greedy and swaps, and the greedy size.
fn refined_packing(fps: &[Fingerprint], t: f64) -> (Vec<usize>, usize) {
    let mut p = Packing::new(fps[0].width(), fps.len());
    for (i, f) in fps.iter().enumerate() {
        if !p.index.any_closer_than(f, t) {
            p.accept(fps, i);
        }
    }
    let greedy_count = p.size;
    p.refine(fps, t);
    ((0..fps.len()).filter(|&i| p.slot[i].is_some()).collect(), greedy_count)
}

/// The same greedy and swaps on bitmask conflict sets, taking the largest
/// packing over `t` and every larger pairwise distance. At most 64 elements.
fn envelope_packing(fps: &[Fingerprint], t: f64) -> (Vec<usize>, usize) {
    let n = fps.len();
    let d: Vec<Vec<f64>> = fps.iter().map(|a| fps.iter().map(|b| dist(a, b)).collect()).collect();
    let mut breaks: Vec<f64> =
        (0..n).flat_map(|i| d[i][i + 1..].iter().copied()).filter(|&x| x > t).collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let conflicts = |s: f64| -> Vec<u64> {
        (0..n).map(|i| (0..n).filter(|&j| j != i && d[i][j] < s).fold(0u64, |m, j| m | 1 << j)).collect()
    };
    let (mut best, greedy_count) = mask_packing(&conflicts(t));
    for s in breaks {
        let (m, _) = mask_packing(&conflicts(s));
        if m.count_ones() > best.count_ones() {
            best = m;
        }
    }
    ((0..n).filter(|&i| best >> i & 1 == 1).collect(), greedy_count as usize)
}

/// Input-order greedy, then passes of (1, 2)-swaps over the owners present
/// at the start of each pass, ascending, until a pass makes none. Returns the packing mask and the greedy size.
fn mask_packing(conflict: &[u64]) -> (u64, u32) {
    let n = conflict.len();
    let mut acc = 0u64;
    for (i, c) in conflict.iter().enumerate() {
        if c & acc == 0 {
            acc |= 1 << i;
        }
    }
    let greedy = acc.count_ones();
    let owned_by = |acc: u64, x: usize| -> Vec<usize> {
        (0..n).filter(|&w| acc >> w & 1 == 0 && conflict[w] & acc == 1 << x).collect()
    };
    loop {
        let mut improved = false;
        let owners: Vec<usize> = (0..n).filter(|&x| acc >> x & 1 == 1 && !owned_by(acc, x).is_empty()).collect();
        for x in owners {
            if acc >> x & 1 == 0 {
                continue;
            }
            let cands = owned_by(acc, x);
            let pair = cands
                .iter()
                .enumerate()
                .find_map(|(a, &u)| cands[a + 1..].iter().find(|&&v| conflict[u] >> v & 1 == 0).map(|&v| (u, v)));
            let Some((u, v)) = pair else { continue };
            acc = acc & !(1 << x) | 1 << u | 1 << v;
            for &w in &cands {
                if acc >> w & 1 == 0 && conflict[w] & acc == 0 {
                    acc |= 1 << w;
                }
            }
            improved = true;
        }
        if !improved {
            return (acc, greedy);
        }
    }
}

/// Accepted set with a popcount index over its members.
struct Packing {
    index: PopcountIndex,
    /// Index slot of each accepted element.
    slot: Vec<Option<usize>>,
    /// Element stored in each slot.
    element: Vec<usize>,
    size: usize,
}

impl Packing {
    fn new(width: usize, n: usize) -> Packing {
        Packing { index: PopcountIndex::new(width), slot: vec![None; n], element: Vec::new(), size: 0 }
    }

    fn accept(&mut self, fps: &[Fingerprint], i: usize) {
        let s = self.index.insert(fps[i].clone()).expect("width checked");
        self.slot[i] = Some(s);
        self.element.push(i);
        self.size += 1;
    }

    fn reject(&mut self, i: usize) {
        let s = self.slot[i].take().expect("accepted");
        self.index.remove(s);
        self.size -= 1;
    }

    /// The single accepted element in conflict with `i`, if exactly one.
    fn owner(&self, fps: &[Fingerprint], i: usize, t: f64) -> Option<usize> {
        match self.index.closer_than(&fps[i], t, 2).as_slice() {
            [s] => Some(self.element[*s]),
            _ => None,
        }
    }

    /// Apply (1, 2)-swaps in a fixed order until none improves the packing.
    fn refine(&mut self, fps: &[Fingerprint], t: f64) {
        use std::collections::{BTreeMap, BTreeSet};
        let n = fps.len();
        let mut owner: Vec<Option<usize>> = (0..n)
            .into_par_iter()
            .map(|i| if self.slot[i].is_some() { None } else { self.owner(fps, i, t) })
            .collect();
        let mut by_owner: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (i, o) in owner.iter().enumerate() {
            if let Some(x) = o {
                by_owner.entry(*x).or_default().insert(i);
            }
        }
        loop {
            let mut improved = false;
            let owners: Vec<usize> = by_owner.keys().copied().collect();
            for x in owners {
                let Some(cands) = by_owner.get(&x) else { continue };
                if cands.len() < 2 || self.slot[x].is_none() {
                    continue;
                }
                let cands: Vec<usize> = cands.iter().copied().collect();
                let Some((u, v)) = first_far_pair(fps, &cands, t) else { continue };
                self.reject(x);
                let mut changed = vec![x, u, v];
                self.accept(fps, u);
                self.accept(fps, v);
                for &w in &cands {
                    if w != u && w != v && !self.index.any_closer_than(&fps[w], t) {
                        self.accept(fps, w);
                        changed.push(w);
                    }
                }
                let affected: Vec<usize> = (0..n)
                    .into_par_iter()
                    .filter(|&w| changed.iter().any(|&c| c == w || dist(&fps[w], &fps[c]) < t))
                    .collect();
                for w in affected {
                    let new = if self.slot[w].is_some() { None } else { self.owner(fps, w, t) };
                    if new != owner[w] {
                        if let Some(o) = owner[w] {
                            let set = by_owner.get_mut(&o).expect("owner group");
                            set.remove(&w);
                            if set.is_empty() {
                                by_owner.remove(&o);
                            }
                        }
                        if let Some(o) = new {
                            by_owner.entry(o).or_default().insert(w);
                        }
                        owner[w] = new;
                    }
                }
                improved = true;
            }
            if !improved {
                break;
            }
        }
    }
}

/// First pair (in index order) of candidates at distance >= t.
fn first_far_pair(fps: &[Fingerprint], cands: &[usize], t: f64) -> Option<(usize, usize)> {
    cands.iter().enumerate().find_map(|(a, &u)| cands[a + 1..].iter().find(|&&v| dist(&fps[u], &fps[v]) >= t).map(|&v| (u, v)))
}

/// Plain input-order greedy packing size.
pub fn ncircles_greedy(fps: &[Fingerprint], t: f64) -> Result<usize, DiversityError> {
    check_widths(fps)?;
    let Some(first) = fps.first() else { return Ok(0) };
    let mut p = Packing::new(first.width(), fps.len());
    for (i, f) in fps.iter().enumerate() {
        if !p.index.any_closer_than(f, t) {
            p.accept(fps, i);
        }
    }
    Ok(p.size)
}

/// Exact packing number by exhaustive search; for small sets only.
pub fn packing_number_exact(fps: &[Fingerprint], t: f64) -> usize {
    let n = fps.len();
    assert!(n <= 24, "exhaustive packing is limited to 24 elements");
    let mut conflict = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && dist(&fps[i], &fps[j]) < t {
                conflict[i] |= 1 << j;
            }
        }
    }
    fn grow(conflict: &[u32], candidates: u32, size: usize, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let rest = candidates & !(1 << v);
        grow(conflict, rest & !conflict[v], size + 1, best);
        grow(conflict, rest, size, best);
    }
    let mut best = 0;
    grow(&conflict, (1u32 << n) - 1, 0, &mut best);
    best
}

/// Summary columns of a distance sample (nearest-rank percentiles).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    pub p10: f64,
    pub p25: f64,
    pub mean: f64,
    pub median: f64,
    pub p75: f64,
    pub p90: f64,
}

/// Nearest-rank percentile of sorted data: the value at rank ceil(p/100 * n).
pub fn nearest_rank(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of an empty sample");
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl DistanceSummary {
    pub fn of(sample: &[f64]) -> DistanceSummary {
        let mut s = sample.to_vec();
        s.sort_by(f64::total_cmp);
        DistanceSummary {
            p10: nearest_rank(&s, 10.0),
            p25: nearest_rank(&s, 25.0),
            mean: s.iter().sum::<f64>() / s.len() as f64,
            median: nearest_rank(&s, 50.0),
            p75: nearest_rank(&s, 75.0),
            p90: nearest_rank(&s, 90.0),
        }
    }

    pub fn columns(&self) -> [(&'static str, f64); 6] {
        [
            ("p10", self.p10),
            ("p25", self.p25),
            ("mean", self.mean),
            ("median", self.median),
            ("p75", self.p75),
            ("p90", self.p90),
        ]
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn below(x: u64, n: usize) -> usize {
    ((x as u128 * n as u128) >> 64) as usize
}

/// Distances of `n_pairs` uniformly drawn unordered pairs of distinct
/// elements. Pair `k` is derived from (seed, stream, k) alone, so the sample
/// does not depend on thread count.
pub fn sample_pair_distances(fps: &[Fingerprint], n_pairs: usize, seed: u64, stream: u64) -> Result<Vec<f64>, DiversityError> {
    check_widths(fps)?;
    let n = fps.len();
    if n < 2 {
        return Err(DiversityError::TooFew(2));
    }
    let base = splitmix(seed ^ splitmix(stream));
    Ok((0..n_pairs as u64)
        .into_par_iter()
        .map(|k| {
            let x = splitmix(base ^ splitmix(k));
            let i = below(x, n);
            let mut j = below(splitmix(x), n - 1);
            if j >= i {
                j += 1;
            }
            dist(&fps[i], &fps[j])
        })
        .collect())
}

/// 1-D Wasserstein distance between two empirical distributions: the area
/// between their CDFs.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let mut all: Vec<f64> = a.iter().chain(&b).copied().collect();
    all.sort_by(f64::total_cmp);
    let (mut ia, mut ib, mut area) = (0usize, 0usize, 0.0);
    for w in all.windows(2) {
        while ia < a.len() && a[ia] <= w[0] {
            ia += 1;
        }
        while ib < b.len() && b[ib] <= w[0] {
            ib += 1;
        }
        let fa = ia as f64 / a.len() as f64;
        let fb = ib as f64 / b.len() as f64;
        area += (fa - fb).abs() * (w[1] - w[0]);
    }
    area
}

/// Two-sample Kolmogorov-Smirnov statistic: the largest CDF gap.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (mut ia, mut ib, mut gap) = (0usize, 0usize, 0.0f64);
    while ia < a.len() && ib < b.len() {
        let x = a[ia].min(b[ib]);
        while ia < a.len() && a[ia] <= x {
            ia += 1;
        }
        while ib < b.len() && b[ib] <= x {
            ib += 1;
        }
        gap = gap.max((ia as f64 / a.len() as f64 - ib as f64 / b.len() as f64).abs());
    }
    gap.max((ia as f64 / a.len() as f64 - ib as f64 / b.len() as f64).abs())
}

fn sorted(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "empty sample");
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairStats {
    pub n_pairs: usize,
    pub seed: u64,
    pub percentile_method: String,
    pub a: DistanceSummary,
    pub b: DistanceSummary,
    pub wasserstein: f64,
    pub ks: f64,
}

/// Compare the within-set distance distributions of two sets.
pub fn pair_distance_stats(a: &[Fingerprint], b: &[Fingerprint], n_pairs: usize, seed: u64) -> Result<PairStats, DiversityError> {
    if n_pairs == 0 {
        return Err(DiversityError::TooFew(1));
    }
    let sa = sample_pair_distances(a, n_pairs, seed, 0)?;
    let sb = sample_pair_distances(b, n_pairs, seed, 1)?;
    Ok(PairStats {
        n_pairs,
        seed,
        percentile_method: "nearest-rank".into(),
        a: DistanceSummary::of(&sa),
        b: DistanceSummary::of(&sb),
        wasserstein: wasserstein_1d(&sa, &sb),
        ks: ks_statistic(&sa, &sb),
    })
}
