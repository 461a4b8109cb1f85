//! Red/blue (`+1`/`-1`) edge colourings of the complete graph `K_n`.
//!
//! Colours live in a packed lower triangle: one bit per unordered pair,
//! bit set means red (`+1`). Per-vertex red and blue degrees are cached at
//! construction; the graph is immutable afterwards.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Edge colour. Red is `+1`, blue is `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Colour {
    Red,
    Blue,
}

impl Colour {
    #[inline]
    pub fn sign(self) -> i64 {
        match self {
            Colour::Red => 1,
            Colour::Blue => -1,
        }
    }

    pub fn flipped(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }
}

#[inline]
fn pair_index(i: usize, j: usize) -> usize {
    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredCompleteGraph {
    n: usize,
    bits: Vec<u64>,
    red_degree: Vec<u32>,
    red_edges: usize,
}

impl ColouredCompleteGraph {
    /// Builds a colouring from a predicate `red(i, j)` evaluated once per pair with `i > j`.
    pub fn from_fn(n: usize, mut red: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("complete graph needs n >= 2, got {n}")));
        }
        let pairs = n * (n - 1) / 2;
        let mut bits = vec![0u64; pairs.div_ceil(64)];
        let mut red_degree = vec![0u32; n];
        let mut red_edges = 0;
        for i in 1..n {
            for j in 0..i {
                if red(i, j) {
                    let k = pair_index(i, j);
                    bits[k / 64] |= 1 << (k % 64);
                    red_degree[i] += 1;
                    red_degree[j] += 1;
                    red_edges += 1;
                }
            }
        }
        Ok(ColouredCompleteGraph {
            n,
            bits,
            red_degree,
            red_edges,
        })
    }

    pub fn monochromatic(n: usize, colour: Colour) -> Result<Self> {
        Self::from_fn(n, |_, _| colour == Colour::Red)
    }

    /// Every edge whose pair appears in `red` is red, all others blue.
    pub fn from_red_edges(n: usize, red: &[(usize, usize)]) -> Result<Self> {
        let mut set = vec![false; n * n.saturating_sub(1) / 2];
        for &(u, v) in red {
            if u == v || u >= n || v >= n {
                return Err(Error::invalid(format!("bad red edge ({u}, {v}) for n = {n}")));
            }
            set[pair_index(u, v)] = true;
        }
        Self::from_fn(n, |i, j| set[pair_index(i, j)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    #[inline]
    pub fn is_red(&self, i: usize, j: usize) -> bool {
        debug_assert!(i != j && i < self.n && j < self.n);
        let k = pair_index(i, j);
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    #[inline]
    pub fn colour(&self, i: usize, j: usize) -> Colour {
        if self.is_red(i, j) {
            Colour::Red
        } else {
            Colour::Blue
        }
    }

    /// `c(ij)` as `+1` or `-1`.
    #[inline]
    pub fn sign(&self, i: usize, j: usize) -> i64 {
        if self.is_red(i, j) {
            1
        } else {
            -1
        }
    }

    pub fn red_degree(&self, v: usize) -> usize {
        self.red_degree[v] as usize
    }

    pub fn blue_degree(&self, v: usize) -> usize {
        self.n - 1 - self.red_degree(v)
    }

    /// `deg_R(v) - deg_B(v)`, the sum of the star centred at `v`.
    pub fn signed_degree(&self, v: usize) -> i64 {
        self.red_degree(v) as i64 - self.blue_degree(v) as i64
    }

    pub fn red_edge_count(&self) -> usize {
        self.red_edges
    }

    pub fn blue_edge_count(&self) -> usize {
        self.edge_count() - self.red_edges
    }

    /// `c(K_n)`.
    pub fn total_sum(&self) -> i64 {
        self.red_edges as i64 - self.blue_edge_count() as i64
    }

    pub fn is_balanced(&self) -> bool {
        self.total_sum() == 0
    }

    /// Vertices with at least `r` incident edges of each colour.
    pub fn r_balanced_vertices(&self, r: usize) -> Vec<usize> {
        (0..self.n)
            .filter(|&v| self.red_degree(v).min(self.blue_degree(v)) >= r)
            .collect()
    }

    /// The vertex maximising `min(deg_R, deg_B)`, lowest index on ties.
    pub fn most_balanced_vertex(&self) -> usize {
        let mut best = 0;
        for v in 1..self.n {
            let key = self.red_degree(v).min(self.blue_degree(v));
            if key > self.red_degree(best).min(self.blue_degree(best)) {
                best = v;
            }
        }
        best
    }

    pub fn red_neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| u != v && self.is_red(u, v))
    }

    pub fn blue_neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| u != v && !self.is_red(u, v))
    }

    /// The colouring with every edge flipped; all sums change sign.
    pub fn negated(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| !self.is_red(i, j)).expect("n already validated")
    }

    /// Text format: `n`, then for `i = 1..n` a line of `i` characters over
    /// `{R, B}` whose `j`-th character is the colour of `{i, j}`.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.edge_count() + 2 * self.n + 8);
        writeln!(out, "{}", self.n).unwrap();
        for i in 1..self.n {
            for j in 0..i {
                out.push(if self.is_red(i, j) { 'R' } else { 'B' });
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty colouring file"))?;
        let n: usize = head
            .trim()
            .parse()
            .map_err(|e| Error::parse(1, format!("bad vertex count: {e}")))?;
        if n < 2 {
            return Err(Error::parse(1, format!("n must be >= 2, got {n}")));
        }
        let mut rows: Vec<Vec<bool>> = Vec::with_capacity(n - 1);
        for i in 1..n {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| Error::parse(i + 1, format!("expected {} rows, found {}", n - 1, i - 1)))?;
            let line = line.trim();
            if line.len() != i {
                return Err(Error::parse(
                    lineno + 1,
                    format!("row {i} must have {i} characters, found {}", line.len()),
                ));
            }
            let row = line
                .chars()
                .map(|ch| match ch {
                    'R' => Ok(true),
                    'B' => Ok(false),
                    other => Err(Error::parse(lineno + 1, format!("unexpected character {other:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(Error::parse(lineno + 1, "trailing data after colouring rows"));
        }
        Self::from_fn(n, |i, j| rows[i - 1][j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_colouring(n: usize, seed: u64) -> ColouredCompleteGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ColouredCompleteGraph::from_fn(n, |_, _| rng.gen_bool(0.5)).unwrap()
    }

    #[test]
    fn symmetric_and_degree_cache_consistent() {
        for seed in 0..20 {
            let g = random_colouring(13, seed);
            let mut red_total = 0;
            for v in 0..g.n() {
                let counted = (0..g.n()).filter(|&u| u != v && g.is_red(u, v)).count();
                assert_eq!(counted, g.red_degree(v));
                assert_eq!(g.red_degree(v) + g.blue_degree(v), g.n() - 1);
                red_total += g.red_degree(v);
                for u in 0..g.n() {
                    if u != v {
                        assert_eq!(g.colour(u, v), g.colour(v, u));
                    }
                }
            }
            assert_eq!(red_total, 2 * g.red_edge_count());
        }
    }

    #[test]
    fn balance_checks() {
        let all_red = ColouredCompleteGraph::monochromatic(4, Colour::Red).unwrap();
        assert!(!all_red.is_balanced());
        let three = ColouredCompleteGraph::from_red_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(three.is_balanced());
    }

    #[test]
    fn r_balanced() {
        let g = random_colouring(9, 3);
        assert_eq!(g.r_balanced_vertices(0), (0..9).collect::<Vec<_>>());
        let red = ColouredCompleteGraph::monochromatic(5, Colour::Red).unwrap();
        assert!(red.r_balanced_vertices(1).is_empty());
    }

    #[test]
    fn text_roundtrip_and_layout() {
        let g = ColouredCompleteGraph::from_red_edges(3, &[(1, 0), (2, 1)]).unwrap();
        assert_eq!(g.to_text(), "3\nR\nBR\n");
        let g2 = random_colouring(11, 9);
        assert_eq!(ColouredCompleteGraph::from_text(&g2.to_text()).unwrap(), g2);
    }

    #[test]
    fn text_rejects_malformed() {
        assert!(ColouredCompleteGraph::from_text("").is_err());
        assert!(ColouredCompleteGraph::from_text("3\nR\nRRR\n").is_err());
        assert!(ColouredCompleteGraph::from_text("3\nR\nRX\n").is_err());
        assert!(ColouredCompleteGraph::from_text("3\nR\n").is_err());
        assert!(ColouredCompleteGraph::from_text("1\n").is_err());
    }

    #[test]
    fn negation_flips_every_edge() {
        let g = random_colouring(10, 1);
        let h = g.negated();
        assert_eq!(g.total_sum(), -h.total_sum());
        for v in 0..10 {
            assert_eq!(g.red_degree(v), h.blue_degree(v));
        }
    }
}
