//! Colourings and forest families: seeded random balanced colourings, the
//! adversarial two-class colouring `c0`, its perturbed density variant, and
//! star/path/broom/random forests.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::colouring::ColouredCompleteGraph;
use crate::error::{Error, Result};
use crate::forest::Forest;

pub type Rational = Ratio<i64>;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exactly `C(n,2)/2` red edges, chosen by a seeded shuffle of the edge list.
pub fn random_balanced_colouring(n: usize, seed: u64) -> Result<ColouredCompleteGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("n must be >= 2, got {n}")));
    }
    let edges = n * (n - 1) / 2;
    if !edges.is_multiple_of(2) {
        return Err(Error::Parity { n, edges });
    }
    let mut order: Vec<usize> = (0..edges).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut red = vec![false; edges];
    for &k in &order[..edges / 2] {
        red[k] = true;
    }
    ColouredCompleteGraph::from_fn(n, |i, j| red[i * (i - 1) / 2 + j])
}

/// The two-class colouring on `u_1..u_{n/2}` (indices `0..n/2`) and
/// `v_1..v_{n/2}` (indices `n/2..n`): `u_i u_j` blue, `v_i v_j` red, and
/// `u_i v_j` blue exactly when `i + j` is odd.
pub fn c0_colouring(n: usize) -> Result<ColouredCompleteGraph> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::invalid(format!("c0 needs n divisible by 4, got {n}")));
    }
    let half = n / 2;
    // 1-based class index of a vertex
    let class = |v: usize| if v < half { (true, v + 1) } else { (false, v - half + 1) };
    ColouredCompleteGraph::from_fn(n, |a, b| match (class(a), class(b)) {
        ((true, _), (true, _)) => false,
        ((false, _), (false, _)) => true,
        ((_, i), (_, j)) => (i + j) % 2 == 0,
    })
}

fn density_intervals(eps: Rational) -> [(Rational, Rational); 2] {
    let half = Rational::new(1, 2);
    let quarter = Rational::new(1, 4);
    let eighth = Rational::new(1, 8);
    let eps2 = eps * eps;
    let first = (
        (quarter + eps2 / 2 - eps) / (half - eps),
        (quarter - eps2 / 2) / (half + eps),
    );
    let second = ((eighth - eps - eps2 / 2) / (quarter - eps2), half);
    [first, second]
}

/// True when `d` lies strictly inside both admissible intervals for `eps`.
pub fn density_ratio_admissible(eps: Rational, d: Rational) -> bool {
    density_intervals(eps).iter().all(|&(lo, hi)| lo < d && d < hi)
}

/// The rational of smallest denominator (then smallest numerator) strictly
/// inside both open intervals of admissible red cross-densities.
pub fn choose_density_ratio(eps: Rational) -> Result<Rational> {
    if eps <= Rational::zero() || eps >= Rational::new(1, 2) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1/2), got {eps}")));
    }
    let [a, b] = density_intervals(eps);
    let lo = a.0.max(b.0).max(Rational::zero());
    let hi = a.1.min(b.1).min(Rational::one());
    assert!(lo < hi, "empty admissible interval ({lo}, {hi}) for epsilon = {eps}");
    for y in 1..=1_000_000i64 {
        let x = (lo * y).floor().to_integer() + 1;
        let d = Rational::new(x, y);
        if x > 0 && x < y && d < hi {
            return Ok(d);
        }
    }
    unreachable!("an open interval of positive width contains a rational with denominator <= 10^6 for this epsilon")
}

/// Parameters of the perturbed two-class colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbedParams {
    n: usize,
    epsilon: Rational,
    d: Rational,
    size_a: usize,
}

impl PerturbedParams {
    /// `|A| = round((1/2 - eps) n)`, `|B| = n - |A|`.
    pub fn new(n: usize, epsilon: Rational, d: Rational) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("n must be >= 2, got {n}")));
        }
        if epsilon <= Rational::zero() || epsilon >= Rational::new(1, 2) {
            return Err(Error::invalid(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
        }
        if d <= Rational::zero() || d >= Rational::one() {
            return Err(Error::invalid(format!("d must lie in (0, 1), got {d}")));
        }
        if !density_ratio_admissible(epsilon, d) {
            return Err(Error::invalid(format!("d = {d} is not admissible for epsilon = {epsilon}")));
        }
        let size_a = ((Rational::new(1, 2) - epsilon) * n as i64).round().to_integer() as usize;
        if size_a == 0 || size_a >= n {
            return Err(Error::invalid(format!("part sizes ({size_a}, {}) degenerate", n - size_a)));
        }
        Ok(PerturbedParams { n, epsilon, d, size_a })
    }

    /// Uses [`choose_density_ratio`] for `d`.
    pub fn with_default_density(n: usize, epsilon: Rational) -> Result<Self> {
        Self::new(n, epsilon, choose_density_ratio(epsilon)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn epsilon(&self) -> Rational {
        self.epsilon
    }
    pub fn d(&self) -> Rational {
        self.d
    }
    /// Part `A` occupies indices `0..size_a()`.
    pub fn size_a(&self) -> usize {
        self.size_a
    }
    pub fn size_b(&self) -> usize {
        self.n - self.size_a
    }
}

/// The representative of `k` modulo `y` in `{1, .., y}`.
pub fn mod_in_range(k: i64, y: i64) -> i64 {
    (k - 1).rem_euclid(y) + 1
}

/// Edges inside `A` blue, inside `B` red; `a_i b_j` red iff `mod_y(i + j) <= x`
/// with 1-based `i, j` and `d = x / y`.
pub fn perturbed_colouring(p: &PerturbedParams) -> Result<ColouredCompleteGraph> {
    let (x, y) = (*p.d.numer(), *p.d.denom());
    let a = p.size_a;
    ColouredCompleteGraph::from_fn(p.n, |hi, lo| {
        // hi > lo, so a cross pair always has lo in A and hi in B
        match (lo < a, hi < a) {
            (true, true) => false,
            (false, false) => true,
            _ => {
                let i = lo as i64 + 1;
                let j = (hi - a) as i64 + 1;
                mod_in_range(i + j, y) <= x
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ForestKind {
    Star,
    Path,
    Random,
    Broom,
}

impl fmt::Display for ForestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForestKind::Star => "star",
            ForestKind::Path => "path",
            ForestKind::Random => "random",
            ForestKind::Broom => "broom",
        })
    }
}

impl FromStr for ForestKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "star" => Ok(ForestKind::Star),
            "path" => Ok(ForestKind::Path),
            "random" => Ok(ForestKind::Random),
            "broom" => Ok(ForestKind::Broom),
            other => Err(Error::invalid(format!("unknown forest kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestSpec {
    pub kind: ForestKind,
    pub n: usize,
    /// Degree cap for `random`, exact centre degree for `broom`.
    pub max_degree: Option<usize>,
    pub seed: u64,
}

impl ForestSpec {
    pub fn new(kind: ForestKind, n: usize, max_degree: Option<usize>, seed: u64) -> Self {
        ForestSpec { kind, n, max_degree, seed }
    }
}

pub fn make_forest(spec: &ForestSpec) -> Result<Forest> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::invalid("forest needs n >= 1"));
    }
    match spec.kind {
        ForestKind::Star => {
            if n < 2 {
                return Err(Error::invalid("a star needs n >= 2"));
            }
            if let Some(d) = spec.max_degree {
                if d != n - 1 {
                    return Err(Error::invalid(format!("a star on {n} vertices has degree {}, not {d}", n - 1)));
                }
            }
            Forest::new(n, (1..n).map(|v| (0, v)))
        }
        ForestKind::Path => {
            let natural = (n - 1).min(2);
            if let Some(d) = spec.max_degree {
                if d < natural {
                    return Err(Error::invalid(format!("a path on {n} vertices needs degree {natural} > {d}")));
                }
            }
            Forest::new(n, (1..n).map(|v| (v - 1, v)))
        }
        ForestKind::Broom => {
            let d = spec
                .max_degree
                .ok_or_else(|| Error::invalid("broom needs a centre degree"))?;
            if d == 0 || d > n - 1 {
                return Err(Error::invalid(format!("broom centre degree {d} out of range 1..={}", n - 1)));
            }
            // centre 0 with leaves 1..=d; the handle hangs off vertex d
            let bristles = (1..=d).map(|v| (0, v));
            let handle = (d + 1..n).map(|v| (v - 1, v));
            Forest::new(n, bristles.chain(handle))
        }
        ForestKind::Random => {
            let cap = spec
                .max_degree
                .ok_or_else(|| Error::invalid("random forest needs a degree cap"))?;
            if cap == 0 && n > 1 {
                return Err(Error::invalid("degree cap 0 only admits a single vertex"));
            }
            if cap == 1 && n > 2 {
                return Err(Error::invalid(format!("degree cap 1 cannot span {n} vertices")));
            }
            let mut rng = rng_from_seed(spec.seed);
            let mut degree = vec![0usize; n];
            let mut edges = Vec::with_capacity(n.saturating_sub(1));
            for v in 1..n {
                let open: Vec<usize> = (0..v).filter(|&u| degree[u] < cap).collect();
                let u = open[rng.gen_range(0..open.len())];
                degree[u] += 1;
                degree[v] += 1;
                edges.push((u, v));
            }
            let mut label: Vec<usize> = (0..n).collect();
            label.shuffle(&mut rng);
            Forest::new(n, edges.into_iter().map(|(u, v)| (label[u], label[v])))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_random_colourings() {
        let g = random_balanced_colouring(4, 1).unwrap();
        assert_eq!(g.red_edge_count(), 3);
        assert_eq!(g.blue_edge_count(), 3);
        assert!(matches!(random_balanced_colouring(6, 1), Err(Error::Parity { n: 6, edges: 15 })));
        let a = random_balanced_colouring(9, 42).unwrap();
        assert!(a.is_balanced());
        assert_eq!(a, random_balanced_colouring(9, 42).unwrap());
        assert_ne!(a, random_balanced_colouring(9, 43).unwrap());
    }

    #[test]
    fn c0_at_eight() {
        let g = c0_colouring(8).unwrap();
        assert!(g.is_balanced());
        assert_eq!(g.red_edge_count(), 14);
        for v in 0..8 {
            assert_eq!(g.signed_degree(v).abs(), 3);
        }
        assert_eq!(g.r_balanced_vertices(2).len(), 8);
        assert!(!g.is_red(0, 1));
        assert!(c0_colouring(6).is_err());
    }

    #[test]
    fn density_ratio_examples() {
        assert_eq!(choose_density_ratio(Rational::new(1, 10)).unwrap(), Rational::new(2, 5));
        let [first, _] = density_intervals(Rational::new(1, 10));
        assert_eq!(first, (Rational::new(31, 80), Rational::new(49, 120)));
        let [first, _] = density_intervals(Rational::new(1, 4));
        assert_eq!(first, (Rational::new(1, 8), Rational::new(7, 24)));
        // 1/4 has the smallest denominator inside (1/8, 7/24)
        assert_eq!(choose_density_ratio(Rational::new(1, 4)).unwrap(), Rational::new(1, 4));
        assert!(choose_density_ratio(Rational::new(1, 2)).is_err());
        assert!(choose_density_ratio(Rational::zero()).is_err());
    }

    #[test]
    fn mod_range_never_zero() {
        assert_eq!(mod_in_range(5, 5), 5);
        assert_eq!(mod_in_range(6, 5), 1);
        assert_eq!(mod_in_range(2, 5), 2);
    }

    #[test]
    fn perturbed_boundary_rule() {
        // a single A vertex against B: d close to 1 makes every residue but y red
        let eps = Rational::new(1, 10);
        let d = choose_density_ratio(eps).unwrap();
        let p = PerturbedParams::new(40, eps, d).unwrap();
        assert_eq!(p.size_a(), 16);
        let g = perturbed_colouring(&p).unwrap();
        assert!(!g.is_red(0, 1));
        assert!(g.is_red(16, 17));
        assert!(PerturbedParams::new(40, eps, Rational::new(1, 2)).is_err());
    }

    #[test]
    fn forest_families() {
        let star = make_forest(&ForestSpec::new(ForestKind::Star, 8, None, 0)).unwrap();
        assert_eq!((star.max_degree(), star.edge_count()), (7, 7));
        let path = make_forest(&ForestSpec::new(ForestKind::Path, 5, None, 0)).unwrap();
        assert_eq!((path.max_degree(), path.min_degree()), (2, 1));
        let broom = make_forest(&ForestSpec::new(ForestKind::Broom, 20, Some(15), 0)).unwrap();
        assert_eq!(broom.max_degree(), 15);
        assert_eq!(broom.edge_count(), 19);
        let spec = ForestSpec::new(ForestKind::Random, 20, Some(5), 9);
        let r = make_forest(&spec).unwrap();
        assert!(r.max_degree() <= 5);
        assert_eq!(r, make_forest(&spec).unwrap());
        assert!(make_forest(&ForestSpec::new(ForestKind::Star, 8, Some(3), 0)).is_err());
        assert!(make_forest(&ForestSpec::new(ForestKind::Random, 8, Some(1), 0)).is_err());
        assert!(make_forest(&ForestSpec::new(ForestKind::Broom, 8, None, 0)).is_err());
    }
}
