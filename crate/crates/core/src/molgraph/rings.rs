//! Ring perception: bridge detection for ring membership, then a smallest
//! set of smallest rings built from per-bond shortest cycles with a Horton
//! candidate fallback when those do not span the cycle space.

use std::collections::VecDeque;

use super::{Bond, Neighbor};

pub(crate) struct RingPerception {
    pub rings: Vec<Vec<usize>>,
    pub atom_in_ring: Vec<bool>,
    pub bond_in_ring: Vec<bool>,
}

pub(crate) fn perceive(n: usize, bonds: &[Bond], adj: &[Vec<Neighbor>]) -> RingPerception {
    let bond_in_ring = non_bridges(n, bonds.len(), adj);
    let mut atom_in_ring = vec![false; n];
    for (i, b) in bonds.iter().enumerate() {
        if bond_in_ring[i] {
            atom_in_ring[b.begin] = true;
            atom_in_ring[b.end] = true;
        }
    }
    let ring_bonds = bond_in_ring.iter().filter(|&&r| r).count();
    if ring_bonds == 0 {
        return RingPerception { rings: Vec::new(), atom_in_ring, bond_in_ring };
    }
    // cyclomatic number of the ring subgraph
    let ring_atoms = atom_in_ring.iter().filter(|&&r| r).count();
    let components = ring_components(n, adj, &bond_in_ring, &atom_in_ring);
    let needed = ring_bonds + components - ring_atoms;

    let mut basis = CycleBasis::new(bonds.len());
    let mut candidates: Vec<Cycle> = Vec::new();
    for (i, b) in bonds.iter().enumerate() {
        if !bond_in_ring[i] {
            continue;
        }
        if let Some(path) = shortest_path_avoiding(adj, &bond_in_ring, b.begin, b.end, i) {
            candidates.push(Cycle::from_path(path, i, bonds.len(), adj));
        }
    }
    select(&mut basis, &mut candidates, needed);
    if basis.cycles.len() < needed {
        let mut horton = horton_candidates(n, bonds, adj, &bond_in_ring, &atom_in_ring);
        select(&mut basis, &mut horton, needed);
    }
    let mut rings: Vec<Vec<usize>> = basis.cycles.into_iter().map(|c| c.atoms).collect();
    rings.sort_by(|a, b| {
        a.len().cmp(&b.len()).then_with(|| {
            let mut x = a.clone();
            let mut y = b.clone();
            x.sort_unstable();
            y.sort_unstable();
            x.cmp(&y)
        })
    });
    RingPerception { rings, atom_in_ring, bond_in_ring }
}

struct Cycle {
    atoms: Vec<usize>,
    edges: Vec<u64>,
}

impl Cycle {
    /// `path` runs from one end of `closing_bond` to the other.
    fn from_path(path: Vec<usize>, closing_bond: usize, n_bonds: usize, adj: &[Vec<Neighbor>]) -> Cycle {
        let mut edges = vec![0u64; n_bonds.div_ceil(64)];
        set_bit(&mut edges, closing_bond);
        for w in path.windows(2) {
            let bond = adj[w[0]].iter().find(|nb| nb.atom == w[1]).expect("path edge").bond;
            set_bit(&mut edges, bond);
        }
        Cycle { atoms: path, edges }
    }

    fn sort_key(&self) -> (usize, Vec<usize>) {
        let mut a = self.atoms.clone();
        a.sort_unstable();
        (a.len(), a)
    }
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

/// Incremental GF(2) basis over bond-incidence vectors.
struct CycleBasis {
    cycles: Vec<Cycle>,
    // reduced rows keyed by pivot bit
    rows: Vec<(usize, Vec<u64>)>,
}

impl CycleBasis {
    fn new(_n_bonds: usize) -> CycleBasis {
        CycleBasis { cycles: Vec::new(), rows: Vec::new() }
    }

    fn try_add(&mut self, cycle: Cycle) -> bool {
        let mut v = cycle.edges.clone();
        for (pivot, row) in &self.rows {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
            }
        }
        let Some(pivot) = first_bit(&v) else {
            return false;
        };
        // keep rows fully reduced on the new pivot
        for (_, row) in self.rows.iter_mut() {
            if row[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (a, b) in row.iter_mut().zip(&v) {
                    *a ^= b;
                }
            }
        }
        self.rows.push((pivot, v));
        self.cycles.push(cycle);
        true
    }
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn select(basis: &mut CycleBasis, candidates: &mut Vec<Cycle>, needed: usize) {
    candidates.sort_by_cached_key(|c| c.sort_key());
    candidates.dedup_by(|a, b| a.edges == b.edges);
    for c in candidates.drain(..) {
        if basis.cycles.len() >= needed {
            break;
        }
        basis.try_add(c);
    }
}

/// Tarjan bridge finding (iterative). Returns `true` for bonds on a cycle.
fn non_bridges(n: usize, n_bonds: usize, adj: &[Vec<Neighbor>]) -> Vec<bool> {
    let mut in_ring = vec![true; n_bonds];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    // (atom, parent bond, next neighbour position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, usize::MAX, 0));
        while let Some(&mut (v, parent_bond, ref mut pos)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let nb = adj[v][*pos];
                *pos += 1;
                if nb.bond == parent_bond {
                    continue;
                }
                if disc[nb.atom] == usize::MAX {
                    disc[nb.atom] = time;
                    low[nb.atom] = time;
                    time += 1;
                    stack.push((nb.atom, nb.bond, 0));
                } else {
                    low[v] = low[v].min(disc[nb.atom]);
                }
            } else {
                stack.pop();
                if let Some(&(parent, _, _)) = stack.last() {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        in_ring[parent_bond] = false;
                    }
                }
            }
        }
    }
    in_ring
}

fn ring_components(n: usize, adj: &[Vec<Neighbor>], bond_in_ring: &[bool], atom_in_ring: &[bool]) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if !atom_in_ring[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        stack.push(s);
        while let Some(a) = stack.pop() {
            for nb in &adj[a] {
                if bond_in_ring[nb.bond] && !seen[nb.atom] {
                    seen[nb.atom] = true;
                    stack.push(nb.atom);
                }
            }
        }
    }
    count
}

/// BFS over ring bonds from `from` to `to`, not using `skip_bond`.
fn shortest_path_avoiding(
    adj: &[Vec<Neighbor>],
    bond_in_ring: &[bool],
    from: usize,
    to: usize,
    skip_bond: usize,
) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    prev[from] = from;
    queue.push_back(from);
    while let Some(a) = queue.pop_front() {
        if a == to {
            break;
        }
        for nb in &adj[a] {
            if nb.bond == skip_bond || !bond_in_ring[nb.bond] || prev[nb.atom] != usize::MAX {
                continue;
            }
            prev[nb.atom] = a;
            queue.push_back(nb.atom);
        }
    }
    if prev[to] == usize::MAX {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = prev[cur];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

/// Horton's candidate set: for every root and ring bond (x, y), the cycle
/// formed by the shortest paths root->x, root->y and the bond, when those
/// paths share only the root.
fn horton_candidates(
    n: usize,
    bonds: &[Bond],
    adj: &[Vec<Neighbor>],
    bond_in_ring: &[bool],
    atom_in_ring: &[bool],
) -> Vec<Cycle> {
    let mut out = Vec::new();
    for root in 0..n {
        if !atom_in_ring[root] {
            continue;
        }
        let mut prev = vec![usize::MAX; n];
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        prev[root] = root;
        dist[root] = 0;
        queue.push_back(root);
        while let Some(a) = queue.pop_front() {
            for nb in &adj[a] {
                if bond_in_ring[nb.bond] && dist[nb.atom] == usize::MAX {
                    dist[nb.atom] = dist[a] + 1;
                    prev[nb.atom] = a;
                    queue.push_back(nb.atom);
                }
            }
        }
        let path_to = |mut x: usize| {
            let mut p = vec![x];
            while x != root {
                x = prev[x];
                p.push(x);
            }
            p
        };
        for (i, b) in bonds.iter().enumerate() {
            if !bond_in_ring[i] || dist[b.begin] == usize::MAX || dist[b.end] == usize::MAX {
                continue;
            }
            let px = path_to(b.begin);
            let py = path_to(b.end);
            let shared = px.iter().filter(|a| py.contains(a)).count();
            if shared != 1 {
                continue;
            }
            // begin .. root, then back out to end
            let mut path = px;
            path.extend(py[..py.len() - 1].iter().rev());
            out.push(Cycle::from_path(path, i, bonds.len(), adj));
        }
    }
    out
}
