//! Labelled forests on `0..n` with adjacency lists and a degree index.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Forest {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    max_degree: usize,
    min_degree: usize,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

impl Forest {
    /// Validates the edge list: endpoints in range, no loops, no repeated
    /// edges and no cycles. Edges are stored as `(min, max)` pairs in input order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("forest needs at least one vertex"));
        }
        let mut sets = DisjointSets::new(n);
        let mut adjacency = vec![Vec::new(); n];
        let mut stored = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at {u}")));
            }
            if !sets.union(u, v) {
                return Err(Error::invalid(format!("edge ({u}, {v}) closes a cycle or repeats an edge")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            stored.push((u.min(v), u.max(v)));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let max_degree = adjacency.iter().map(Vec::len).max().unwrap_or(0);
        let min_degree = adjacency.iter().map(Vec::len).min().unwrap_or(0);
        Ok(Forest {
            n,
            edges: stored,
            adjacency,
            max_degree,
            min_degree,
        })
    }

    pub fn edgeless(n: usize) -> Result<Self> {
        Self::new(n, std::iter::empty())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Δ
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// δ; zero when isolated vertices are present.
    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    /// Vertices sorted by degree descending, index ascending.
    pub fn by_degree(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        order
    }

    /// Lowest-index vertex of minimum degree outside `exclude`.
    pub fn min_degree_vertex_excluding(&self, exclude: &[usize]) -> Option<usize> {
        (0..self.n)
            .filter(|v| !exclude.contains(v))
            .min_by_key(|&v| (self.degree(v), v))
    }

    /// The centre when this is a spanning star `K_{1,n-1}` with `n >= 3`.
    pub fn star_centre(&self) -> Option<usize> {
        if self.n >= 3 && self.max_degree == self.n - 1 {
            (0..self.n).find(|&v| self.degree(v) == self.n - 1)
        } else {
            None
        }
    }

    /// The two endpoints (ascending) when this is a Hamiltonian path with `n >= 2`.
    pub fn path_endpoints(&self) -> Option<(usize, usize)> {
        if self.n < 2 || self.edge_count() != self.n - 1 || self.max_degree > 2 {
            return None;
        }
        let mut ends = (0..self.n).filter(|&v| self.degree(v) == 1);
        match (ends.next(), ends.next(), ends.next()) {
            (Some(a), Some(b), None) => Some((a, b)),
            _ => None,
        }
    }

    /// Number of edges of the induced subgraph `F[set]` incident to `v`.
    pub fn degree_within(&self, v: usize, set: &[usize]) -> usize {
        self.adjacency[v].iter().filter(|u| set.contains(u)).count()
    }

    /// Text format: `n m` then `m` lines `u v`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.edges.len()).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| Error::parse(1, "empty forest file"))?;
        let header = parse_pair(head, 1)?;
        let (n, m) = header;
        let mut edges = Vec::with_capacity(m);
        for k in 0..m {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(k + 2, format!("expected {m} edges, found {k}")))?;
            edges.push(parse_pair(line, lineno + 1)?);
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(Error::parse(lineno + 1, "trailing data after edge list"));
        }
        Forest::new(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        it.next()
            .ok_or_else(|| Error::parse(lineno, "expected two integers"))?
            .parse()
            .map_err(|e| Error::parse(lineno, format!("bad integer: {e}")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(Error::parse(lineno, "expected exactly two integers"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles_and_duplicates() {
        assert!(Forest::new(3, [(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Forest::new(3, [(0, 1), (1, 0)]).is_err());
        assert!(Forest::new(3, [(0, 0)]).is_err());
        assert!(Forest::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn degrees() {
        let f = Forest::new(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(f.max_degree(), 2);
        assert_eq!(f.min_degree(), 1);
        assert_eq!(f.path_endpoints(), Some((0, 4)));
        assert_eq!(f.star_centre(), None);

        let star = Forest::new(4, [(2, 0), (2, 1), (2, 3)]).unwrap();
        assert_eq!(star.star_centre(), Some(2));
        assert_eq!(star.by_degree()[0], 2);

        let isolated = Forest::new(4, [(0, 1)]).unwrap();
        assert_eq!(isolated.min_degree(), 0);
        assert_eq!(isolated.min_degree_vertex_excluding(&[2]), Some(3));
    }

    #[test]
    fn text_roundtrip() {
        let f = Forest::new(6, [(0, 1), (1, 2), (4, 3)]).unwrap();
        let text = f.to_text();
        assert_eq!(text, "6 3\n0 1\n1 2\n3 4\n");
        assert_eq!(Forest::from_text(&text).unwrap(), f);
        assert!(Forest::from_text("3 2\n0 1\n").is_err());
        assert!(Forest::from_text("3 1\n0 x\n").is_err());
    }
}
