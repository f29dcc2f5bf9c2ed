//! Simple undirected graphs on dense vertex ids with bitset adjacency, plus the
//! clique searches the rest of the crate leans on.

use fixedbitset::FixedBitSet;

/// Undirected simple graph on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Complete `parts`-partite graph on `n` vertices with near-equal parts;
    /// vertex `v` sits in part `v % parts`.
    pub fn turan(n: usize, parts: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if u % parts != v % parts {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds `uv`; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn max_degree(&self) -> Option<(usize, usize)> {
        (0..self.vertex_count())
            .map(|v| (v, self.degree(v)))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, a)| a.ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut all = FixedBitSet::with_capacity(self.vertex_count());
        all.insert_range(..);
        all
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u != v && self.has_edge(u, v))
        })
    }

    /// Some clique on exactly `size` vertices drawn from `within`, if any.
    ///
    /// Runs a pivoting Bron–Kerbosch traversal and stops at the first maximal
    /// clique that reaches `size`; branches that cannot reach `size` are cut.
    pub fn find_clique_in(&self, size: usize, within: &FixedBitSet) -> Option<Vec<usize>> {
        if size == 0 {
            return Some(Vec::new());
        }
        let mut found = None;
        let mut r = Vec::new();
        let x = FixedBitSet::with_capacity(self.vertex_count());
        self.bron_kerbosch(&mut r, within.clone(), x, size, &mut |clique| {
            found = Some(clique[..size].to_vec());
            true
        });
        found
    }

    pub fn find_clique(&self, size: usize) -> Option<Vec<usize>> {
        self.find_clique_in(size, &self.full_set())
    }

    /// Calls `visit` with every maximal clique of at least `min_size`
    /// vertices (sorted). Traversal stops early when `visit` returns `true`.
    pub fn maximal_cliques(&self, min_size: usize, mut visit: impl FnMut(&[usize]) -> bool) {
        let mut r = Vec::new();
        let x = FixedBitSet::with_capacity(self.vertex_count());
        self.bron_kerbosch(&mut r, self.full_set(), x, min_size, &mut |c| {
            let mut sorted = c.to_vec();
            sorted.sort_unstable();
            visit(&sorted)
        });
    }

    fn bron_kerbosch(
        &self,
        r: &mut Vec<usize>,
        mut p: FixedBitSet,
        mut x: FixedBitSet,
        min_size: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let p_count = p.count_ones(..);
        if p_count == 0 {
            if x.count_ones(..) == 0 && r.len() >= min_size {
                return visit(r);
            }
            return false;
        }
        if r.len() + p_count < min_size {
            return false;
        }
        if min_size > r.len() + 1 && self.color_classes(&p, min_size - r.len()) < min_size - r.len() {
            return false;
        }
        // Pivot: vertex of P ∪ X with most neighbours in P.
        let pivot = p
            .ones()
            .chain(x.ones())
            .max_by_key(|&u| self.adj[u].intersection(&p).count())
            .expect("P is nonempty");
        let mut branch = p.clone();
        branch.difference_with(&self.adj[pivot]);
        for v in branch.ones() {
            let mut np = p.clone();
            np.intersect_with(&self.adj[v]);
            let mut nx = x.clone();
            nx.intersect_with(&self.adj[v]);
            r.push(v);
            let stop = self.bron_kerbosch(r, np, nx, min_size, visit);
            r.pop();
            if stop {
                return true;
            }
            p.set(v, false);
            x.insert(v);
        }
        false
    }

    /// Number of classes in a greedy proper coloring of `p`, counted up to
    /// `cap`. A clique inside `p` has at most this many vertices.
    fn color_classes(&self, p: &FixedBitSet, cap: usize) -> usize {
        let mut uncolored = p.clone();
        let mut classes = 0;
        while classes < cap {
            let mut open = uncolored.clone();
            let mut any = false;
            while let Some(v) = open.minimum() {
                any = true;
                open.set(v, false);
                open.difference_with(&self.adj[v]);
                uncolored.set(v, false);
            }
            if !any {
                break;
            }
            classes += 1;
        }
        classes
    }

    /// Calls `visit` with every clique of exactly `size` vertices, each once,
    /// as an increasing vertex list. Stops when `visit` returns `true`.
    pub fn for_each_clique(&self, size: usize, mut visit: impl FnMut(&[usize]) -> bool) {
        let mut stack = Vec::with_capacity(size);
        self.extend_ordered(&mut stack, self.full_set(), size, &mut visit);
    }

    /// Cliques of exactly `size` vertices, all drawn from `within`.
    pub fn for_each_clique_in(
        &self,
        size: usize,
        within: &FixedBitSet,
        mut visit: impl FnMut(&[usize]) -> bool,
    ) {
        let mut stack = Vec::with_capacity(size);
        self.extend_ordered(&mut stack, within.clone(), size, &mut visit);
    }

    fn extend_ordered(
        &self,
        stack: &mut Vec<usize>,
        candidates: FixedBitSet,
        size: usize,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if stack.len() == size {
            return visit(stack);
        }
        if stack.len() + candidates.count_ones(..) < size {
            return false;
        }
        for v in candidates.ones() {
            let mut next = candidates.clone();
            next.intersect_with(&self.adj[v]);
            next.set_range(..v + 1, false);
            stack.push(v);
            let stop = self.extend_ordered(stack, next, size, visit);
            stack.pop();
            if stop {
                return true;
            }
        }
        false
    }

    pub fn count_cliques(&self, size: usize) -> usize {
        let mut n = 0;
        self.for_each_clique(size, |_| {
            n += 1;
            false
        });
        n
    }

    /// Subgraph induced on `vertices`, relabelled `0..vertices.len()` in the
    /// given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

/// Bitset over `0..n` holding `members`.
pub fn bitset_of(n: usize, members: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut s = FixedBitSet::with_capacity(n);
    s.extend(members);
    s
}
