//! Property suites run from the command line and by the acceptance tests.
//!
//! Each suite checks one family of claims over seeded instances and reports
//! the number of checks, the number of violations and the first
//! counterexample.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{c0_star_imbalance, epsilon_star, phi, IDENTITY_TOL};
use crate::colouring::ColouredCompleteGraph;
use crate::embedding::{Embedding, PartialEmbedding};
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::generators::{
    c0_colouring, make_forest, perturbed_colouring, random_balanced_colouring, rng_from_seed, ForestKind, ForestSpec,
    PerturbedParams, Rational,
};
use crate::interpolate::{claim9_sequence, claim9_violations, interpolate_traced, SignedPair};
use crate::oracle::exact_min_imbalance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    BalancedVertices,
    Interpolation,
    Claim9,
    Bounds,
    C0Star,
    Perturbed,
    #[serde(rename = "expectation-2.1")]
    Expectation21,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::BalancedVertices,
        Suite::Interpolation,
        Suite::Claim9,
        Suite::Bounds,
        Suite::C0Star,
        Suite::Perturbed,
        Suite::Expectation21,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::BalancedVertices => "balanced-vertices",
            Suite::Interpolation => "interpolation",
            Suite::Claim9 => "claim9",
            Suite::Bounds => "bounds",
            Suite::C0Star => "c0-star",
            Suite::Perturbed => "perturbed",
            Suite::Expectation21 => "expectation-2.1",
        }
    }

    /// Sizes and trial counts used when the caller gives none.
    pub fn default_spec(self, seed: u64) -> VerifySuiteSpec {
        let (ns, trials): (&[usize], usize) = match self {
            Suite::BalancedVertices => (&[8, 9, 16, 25, 100], 100),
            Suite::Interpolation => (&[9, 12, 16, 17, 32, 33], 100),
            Suite::Claim9 => (&[6, 8, 12, 20], 50),
            Suite::Bounds => (&[100, 1000], 100),
            Suite::C0Star => (&[8, 12, 16], 1),
            Suite::Perturbed => (&[2000], 1),
            Suite::Expectation21 => (&[64], 10_000),
        };
        VerifySuiteSpec {
            suite: self,
            ns: ns.to_vec(),
            trials,
            seed,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifySuiteSpec {
    pub suite: Suite,
    pub ns: Vec<usize>,
    /// Per size: colourings, instances, or samples depending on the suite.
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub checked: usize,
    pub violations: usize,
    pub pass: bool,
    pub counterexample: Option<Value>,
    /// Free-form measurements (means, bounds, skipped runs).
    pub detail: Value,
}

impl PropertyReport {
    fn new(name: impl Into<String>) -> Self {
        PropertyReport {
            name: name.into(),
            checked: 0,
            violations: 0,
            pass: true,
            counterexample: None,
            detail: Value::Null,
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            self.pass = false;
            if self.counterexample.is_none() {
                self.counterexample = Some(witness());
            }
        }
    }

    /// A property that checked nothing has not been verified.
    fn finish(mut self) -> Self {
        if self.checked == 0 {
            self.pass = false;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub pass: bool,
    pub properties: Vec<PropertyReport>,
}

fn instance_seed(seed: u64, n: usize, trial: usize) -> u64 {
    seed ^ ((n as u64) << 40) ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn run_verify(spec: &VerifySuiteSpec) -> Result<VerifyReport> {
    if spec.trials == 0 {
        return Err(Error::invalid("trial count must be positive"));
    }
    if spec.ns.is_empty() {
        return Err(Error::invalid("size list must not be empty"));
    }
    let properties = match spec.suite {
        Suite::BalancedVertices => balanced_vertices(spec)?,
        Suite::Interpolation => interpolation(spec)?,
        Suite::Claim9 => claim9(spec)?,
        Suite::Bounds => bounds(spec)?,
        Suite::C0Star => c0_star(spec)?,
        Suite::Perturbed => perturbed(spec)?,
        Suite::Expectation21 => expectation(spec)?,
    };
    let properties: Vec<PropertyReport> = properties.into_iter().map(PropertyReport::finish).collect();
    Ok(VerifyReport {
        suite: spec.suite,
        pass: properties.iter().all(|p| p.pass),
        properties,
    })
}

/// `ε` grid of 16 points over `[1/n, 1/4)`.
fn epsilon_grid(n: usize) -> Vec<f64> {
    let lo = 1.0 / n as f64;
    (0..16).map(|i| lo + (0.25 - lo) * i as f64 / 16.0).collect()
}

fn balanced_vertices(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    let mut prop = PropertyReport::new("count of (1/4 - ε)n-balanced vertices >= εn + 1");
    for &n in &spec.ns {
        if n < 5 || (n * (n - 1) / 2) % 2 == 1 {
            return Err(Error::invalid(format!("balanced colourings need n >= 5 with C(n,2) even, got {n}")));
        }
        for trial in 0..spec.trials {
            let g = random_balanced_colouring(n, instance_seed(spec.seed, n, trial))?;
            for eps in epsilon_grid(n) {
                let r = ((0.25 - eps) * n as f64 - IDENTITY_TOL).ceil().max(0.0) as usize;
                let count = g.r_balanced_vertices(r).len();
                prop.check(count as f64 >= eps * n as f64 + 1.0 - IDENTITY_TOL, || {
                    json!({ "n": n, "trial": trial, "epsilon": eps, "r": r, "count": count })
                });
            }
        }
    }
    Ok(vec![prop])
}

fn family(n: usize, i: usize, seed: u64) -> Result<Forest> {
    let spec = match i % 3 {
        0 => ForestSpec::new(ForestKind::Star, n, None, seed),
        1 => ForestSpec::new(ForestKind::Path, n, None, seed),
        _ => ForestSpec::new(ForestKind::Random, n, Some((n / 4).max(2)), seed),
    };
    make_forest(&spec)
}

/// The most negative and most positive of 200 uniform embeddings, so the
/// walk between them has work to do.
fn extreme_pair(f: &Forest, g: &ColouredCompleteGraph, seed: u64) -> Result<Option<SignedPair>> {
    let mut rng = rng_from_seed(seed);
    let empty = PartialEmbedding::empty(f.n(), g.n());
    let mut lo: Option<Embedding> = None;
    let mut hi: Option<Embedding> = None;
    for _ in 0..200 {
        let e = empty.sample_extension(f, g, &mut rng)?;
        if lo.as_ref().is_none_or(|l| e.sum() < l.sum()) {
            lo = Some(e.clone());
        }
        if hi.as_ref().is_none_or(|h| e.sum() > h.sum()) {
            hi = Some(e);
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) if lo.sum() <= 0 && hi.sum() >= 0 => SignedPair::new(lo, hi, f).map(Some),
        _ => Ok(None),
    }
}

fn interpolation(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    let mut result = PropertyReport::new("|sum| <= Δ_I + δ after interpolation");
    let mut steps = PropertyReport::new("per-step |Δsum| <= 2(Δ_I + δ)");
    let mut skipped = 0;
    for &n in &spec.ns {
        for trial in 0..spec.trials {
            let seed = instance_seed(spec.seed, n, trial);
            let g = random_balanced_colouring(n, seed)?;
            let f = family(n, trial, seed)?;
            let Some(pair) = extreme_pair(&f, &g, seed)? else {
                skipped += 1;
                continue;
            };
            let bound = pair.guarantee(&f) as u64;
            let trace = interpolate_traced(&pair, &f, &g)?;
            let witness = || json!({ "n": n, "trial": trial, "seed": seed, "bound": bound });
            result.check(trace.result.imbalance() <= bound, witness);
            for w in trace.steps.windows(2).filter(|w| w[1].swap.is_some()) {
                let jump = (w[1].sum - w[0].sum).unsigned_abs();
                steps.check(jump <= 2 * bound, || json!({ "n": n, "trial": trial, "step": w[1].step, "jump": jump }));
            }
        }
    }
    result.detail = json!({ "skipped_single_signed": skipped });
    Ok(vec![result, steps])
}

/// `(f, g, N, a, U)`
type Claim9Instance = (PartialEmbedding, PartialEmbedding, Vec<usize>, usize, Vec<usize>);

/// A random instance where `f` and `g` agree on `N` and their images overlap.
fn claim9_instance(n: usize, rng: &mut impl Rng) -> Result<Claim9Instance> {
    let mut host: Vec<usize> = (0..n).collect();
    host.shuffle(rng);
    let u_size = rng.gen_range(n / 2 + 1..=n);
    let mut u: Vec<usize> = host[..u_size].to_vec();
    let m_size = rng.gen_range(1..u_size);
    let mut vertices: Vec<usize> = (0..n).collect();
    vertices.shuffle(rng);
    let m = &vertices[..m_size];
    let n_size = rng.gen_range(0..m_size);
    let (n_part, rest) = m.split_at(n_size);

    u.shuffle(rng);
    let g_images = &u[..m_size];
    let g = PartialEmbedding::from_pairs(n, n, m.iter().copied().zip(g_images.iter().copied()))?;
    let a = u[m_size];

    // f keeps N, then places M \ N on a shuffle of U \ g(N), which overlaps g(M \ N) and may use a
    let mut free: Vec<usize> = u.iter().copied().filter(|t| !g_images[..n_size].contains(t)).collect();
    free.shuffle(rng);
    let pairs = n_part
        .iter()
        .map(|&v| (v, g.get(v).expect("v in M")))
        .chain(rest.iter().copied().zip(free));
    let f = PartialEmbedding::from_pairs(n, n, pairs)?;
    u.sort_unstable();
    Ok((f, g, n_part.to_vec(), a, u))
}

fn claim9(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    let mut prop = PropertyReport::new("sequence conclusions hold at every index");
    let mut overlapping = 0;
    for &n in &spec.ns {
        if n < 3 {
            return Err(Error::invalid(format!("claim9 instances need n >= 3, got {n}")));
        }
        for trial in 0..spec.trials {
            let mut rng = rng_from_seed(instance_seed(spec.seed, n, trial));
            let (f, g, n_set, a, u) = claim9_instance(n, &mut rng)?;
            let gi = g.image();
            if f.image().iter().any(|t| gi.contains(t)) {
                overlapping += 1;
            }
            let seq = claim9_sequence(&f, &g, &n_set, a)?;
            let bad = claim9_violations(&seq, &f, &g, a, &u);
            prop.check(bad.is_empty(), || {
                json!({
                    "n": n, "trial": trial, "a": a, "N": n_set, "U": u,
                    "f": f.entries().collect::<Vec<_>>(), "g": g.entries().collect::<Vec<_>>(),
                    "violations": bad,
                })
            });
        }
    }
    prop.detail = json!({ "overlapping_instances": overlapping });
    Ok(vec![prop])
}

/// `max(1 + 2/ε, (2 + ξn + 2εn)+)`, the quantity minimised over `ε`.
fn lemma8_objective(n: usize, xi: f64, eps: f64) -> (f64, f64) {
    let nf = n as f64;
    (1.0 + 2.0 / eps, (2.0 + xi * nf + 2.0 * eps * nf).max(0.0))
}

fn bounds(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    const GRID: usize = 10_000;
    let mut closed_form = PropertyReport::new("φ(n, ξ) matches the grid infimum within one grid step");
    let mut range = PropertyReport::new("ε* lies in [1/n, 1/8]");
    let mut crossing = PropertyReport::new("crossing identity at ε*");
    for &n in &spec.ns {
        if n < 32 {
            return Err(Error::invalid(format!("bounds suite needs n >= 32, got {n}")));
        }
        let nf = n as f64;
        let (lo_xi, lo_eps) = (-0.25 + 16.0 / nf, 1.0 / nf);
        let step = (0.125 - lo_eps) / (GRID - 1) as f64;
        for k in 0..spec.trials {
            let xi = if spec.trials == 1 {
                0.0
            } else {
                lo_xi + (0.25 - lo_xi) * k as f64 / (spec.trials - 1) as f64
            };
            let p = phi(n, xi)?;
            let e = epsilon_star(n, xi)?;
            let (best_eps, best) = (0..GRID)
                .map(|i| lo_eps + step * i as f64)
                .map(|eps| {
                    let (a, b) = lemma8_objective(n, xi, eps);
                    (eps, a.max(b))
                })
                .fold((f64::NAN, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            // neighbouring grid values bound how far the sampled minimum can sit above the true one
            let slack = [best_eps - step, best_eps + step]
                .into_iter()
                .filter(|eps| (lo_eps..=0.125).contains(eps))
                .map(|eps| {
                    let (a, b) = lemma8_objective(n, xi, eps);
                    (a.max(b) - best).abs()
                })
                .fold(0.0, f64::max);
            let witness = || json!({ "n": n, "xi": xi, "phi": p, "grid_min": best, "grid_eps": best_eps, "epsilon_star": e });
            closed_form.check(p <= best + 1e-9 && best - p <= slack + 1e-9, witness);
            range.check(e >= lo_eps - IDENTITY_TOL && e <= 0.125 + IDENTITY_TOL, witness);
            let (f_val, g_val) = lemma8_objective(n, xi, e);
            crossing.check((f_val - g_val).abs() <= 1e-9 * f_val.max(1.0) && (f_val - p).abs() <= 1e-9 * p, witness);
        }
    }
    Ok(vec![closed_form, range, crossing])
}

fn c0_star(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    let mut prop = PropertyReport::new("star minimum in c0(n) equals (n - 2)/2");
    for &n in &spec.ns {
        let expected = c0_star_imbalance(n)?;
        let g = c0_colouring(n)?;
        let star = make_forest(&ForestSpec::new(ForestKind::Star, n, None, 0))?;
        let got = exact_min_imbalance(&star, &g)?.value;
        prop.check(got == expected, || json!({ "n": n, "expected": expected, "got": got }));
    }
    Ok(vec![prop])
}

fn perturbed(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    let eps = Rational::new(1, 10);
    let mut density = PropertyReport::new("red density within [0.4, 0.6]");
    let mut star = PropertyReport::new("star imbalance >= (1/2 + ε^2)n - 4 at every centre");
    for &n in &spec.ns {
        let params = PerturbedParams::with_default_density(n, eps)?;
        let g = perturbed_colouring(&params)?;
        let d = g.red_edge_count() as f64 / g.edge_count() as f64;
        density.check((0.4..=0.6).contains(&d), || json!({ "n": n, "density": d }));
        let e = 0.1f64;
        let floor = (0.5 + e * e) * n as f64 - 4.0;
        let worst = (0..n).map(|v| g.signed_degree(v).unsigned_abs()).min().unwrap_or(0);
        for v in 0..n {
            let imbalance = g.signed_degree(v).unsigned_abs();
            star.check(imbalance as f64 >= floor, || json!({ "n": n, "centre": v, "imbalance": imbalance, "floor": floor }));
        }
        star.detail = json!({ "n": n, "min_imbalance": worst, "floor": floor, "d": params.d().to_string() });
        density.detail = json!({ "n": n, "density": d });
    }
    Ok(vec![density, star])
}

/// A broom on `n` vertices whose centre has degree `⌈5n/8⌉`, so `Δ >= n/2`
/// and every other degree is at most 2.
pub fn expectation_forest(n: usize) -> Result<Forest> {
    let d = (5 * n).div_ceil(8);
    make_forest(&ForestSpec::new(ForestKind::Broom, n, Some(d), 0))
}

/// The first `(n/4 - 1)`-balanced host vertex, or the most balanced one.
pub fn expectation_anchor(g: &ColouredCompleteGraph) -> usize {
    let r = (g.n() / 4).saturating_sub(1);
    g.r_balanced_vertices(r).first().copied().unwrap_or_else(|| g.most_balanced_vertex())
}

fn expectation(spec: &VerifySuiteSpec) -> Result<Vec<PropertyReport>> {
    let mut prop = PropertyReport::new("mean |sum| <= Δ/2 + 4 + 3·SE with the top vertex anchored");
    let mut details = Vec::new();
    for &n in &spec.ns {
        if n < 16 || n % 4 > 1 {
            return Err(Error::invalid(format!("expectation suite needs n >= 16 with n ≡ 0, 1 mod 4, got {n}")));
        }
        let f = expectation_forest(n)?;
        let order = f.by_degree();
        let (top, second) = (f.degree(order[0]), f.degree(order[1]));
        if 2 * top < n || 2 * second >= top {
            return Err(Error::invalid("expectation forest must have Δ >= n/2 and Δ' < Δ/2"));
        }
        for colouring in 0..4 {
            let seed = instance_seed(spec.seed, n, colouring);
            let g = random_balanced_colouring(n, seed)?;
            let x = expectation_anchor(&g);
            let anchor = PartialEmbedding::from_pairs(n, n, [(order[0], x)])?;
            let mut rng = rng_from_seed(seed);
            let samples: Vec<f64> = (0..spec.trials)
                .map(|_| anchor.sample_extension(&f, &g, &mut rng).map(|e| e.imbalance() as f64))
                .collect::<Result<_>>()?;
            let k = samples.len() as f64;
            let mean = samples.iter().sum::<f64>() / k;
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
            let se = (var / k).sqrt();
            let bound = 0.5 * top as f64 + 4.0 + 3.0 * se;
            prop.check(mean <= bound, || json!({ "n": n, "seed": seed, "anchor": x, "mean": mean, "bound": bound }));
            details.push(json!({ "n": n, "seed": seed, "delta": top, "anchor": x, "mean": mean, "se": se, "bound": bound }));
        }
    }
    prop.detail = Value::Array(details);
    Ok(vec![prop])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite, ns: &[usize], trials: usize) -> VerifyReport {
        run_verify(&VerifySuiteSpec {
            suite,
            ns: ns.to_vec(),
            trials,
            seed: 3,
        })
        .unwrap()
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_value(s).unwrap(), json!(s.name()));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        assert!(small(Suite::BalancedVertices, &[8, 9], 10).pass);
        let r = small(Suite::Interpolation, &[9, 12], 10);
        assert!(r.pass, "{}", serde_json::to_string_pretty(&r).unwrap());
        assert!(small(Suite::Claim9, &[6, 10], 20).pass);
        assert!(small(Suite::Bounds, &[100], 5).pass);
        assert!(small(Suite::C0Star, &[8, 12], 1).pass);
        assert!(small(Suite::Perturbed, &[200], 1).pass);
        assert!(small(Suite::Expectation21, &[32], 500).pass);
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(run_verify(&VerifySuiteSpec { suite: Suite::C0Star, ns: vec![8], trials: 0, seed: 0 }).is_err());
        assert!(run_verify(&VerifySuiteSpec { suite: Suite::BalancedVertices, ns: vec![7], trials: 1, seed: 0 }).is_err());
        assert!(run_verify(&VerifySuiteSpec { suite: Suite::C0Star, ns: vec![10], trials: 1, seed: 0 }).is_err());
    }

    #[test]
    fn empty_property_fails() {
        let p = PropertyReport::new("nothing").finish();
        assert!(!p.pass);
    }
}
