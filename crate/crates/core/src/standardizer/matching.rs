//! Maximum cardinality matching on general graphs (Edmonds' blossom
//! algorithm, BFS formulation). Used to place double bonds when resolving
//! aromatic bond orders, where odd cycles rule out bipartite methods.

use std::collections::VecDeque;

const NONE: usize = usize::MAX;

/// Maximum matching. `mate[v]` is the partner of `v` or `None`.
pub(crate) fn maximum_matching(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut m = Matcher {
        adj,
        mate: vec![NONE; n],
        parent: vec![NONE; n],
        base: (0..n).collect(),
        used: vec![false; n],
        blossom: vec![false; n],
        queue: VecDeque::new(),
    };
    // greedy start keeps the augmenting phase short on typical ring systems
    for v in 0..n {
        if m.mate[v] == NONE {
            if let Some(&w) = adj[v].iter().find(|&&w| m.mate[w] == NONE) {
                m.mate[v] = w;
                m.mate[w] = v;
            }
        }
    }
    for v in 0..n {
        if m.mate[v] != NONE {
            continue;
        }
        let mut u = m.find_path(v);
        while u != NONE {
            let pv = m.parent[u];
            let ppv = m.mate[pv];
            m.mate[u] = pv;
            m.mate[pv] = u;
            u = ppv;
        }
    }
    m.mate.into_iter().map(|x| (x != NONE).then_some(x)).collect()
}

struct Matcher<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl Matcher<'_> {
    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.blossom[self.base[v]] = true;
            self.blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> usize {
        let n = self.adj.len();
        self.used.fill(false);
        self.parent.fill(NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.blossom.fill(false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return to;
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        NONE
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    fn size(mate: &[Option<usize>]) -> usize {
        mate.iter().filter(|m| m.is_some()).count() / 2
    }

    #[test]
    fn even_cycle_is_perfect() {
        let adj = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        assert_eq!(size(&maximum_matching(&adj)), 3);
    }

    #[test]
    fn odd_cycle_leaves_one() {
        let adj = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(size(&maximum_matching(&adj)), 2);
    }

    #[test]
    fn blossom_needed() {
        // triangle with two pendant vertices; greedy picks the wrong edge
        let adj = graph(6, &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 4), (2, 5)]);
        let mut adj2 = adj.clone();
        for a in adj2.iter_mut() {
            a.reverse();
        }
        assert_eq!(size(&maximum_matching(&adj)), 3);
        assert_eq!(size(&maximum_matching(&adj2)), 3);
    }

    #[test]
    fn matching_is_consistent() {
        let adj = graph(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 7), (7, 4)]);
        let mate = maximum_matching(&adj);
        for (v, m) in mate.iter().enumerate() {
            if let Some(w) = m {
                assert_eq!(mate[*w], Some(v));
                assert!(adj[v].contains(w));
            }
        }
        assert_eq!(size(&mate), 4);
    }
}
