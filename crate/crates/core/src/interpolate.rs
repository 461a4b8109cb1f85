//! Swap interpolation between a non-positive and a non-negative embedding,
//! and the one-vertex-at-a-time interpolation of partial embeddings.
//!
//! Walking from the non-negative embedding to the non-positive one by
//! transpositions of images changes the sum by at most `2(Δ_I + δ)` per
//! step, where `Δ_I` is the largest degree among vertices the two endpoints
//! disagree on. A transposition of two high-degree vertices is routed
//! through a minimum-degree vertex `w` as three transpositions, each touching
//! `w`. Some intermediate embedding therefore has `|sum| <= Δ_I + δ`.

use serde::{Deserialize, Serialize};

use crate::colouring::ColouredCompleteGraph;
use crate::embedding::{Embedding, PartialEmbedding};
use crate::error::{Error, Result};
use crate::forest::Forest;

/// Two full embeddings with `neg.sum() <= 0 <= pos.sum()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPair {
    neg: Embedding,
    pos: Embedding,
    disagreement: Vec<usize>,
    delta_i: usize,
}

impl SignedPair {
    pub fn new(neg: Embedding, pos: Embedding, forest: &Forest) -> Result<Self> {
        if neg.sum() > 0 || pos.sum() < 0 {
            return Err(Error::invalid(format!(
                "signed pair needs sums <= 0 <= .., got {} and {}",
                neg.sum(),
                pos.sum()
            )));
        }
        if neg.n() != forest.n() || pos.n() != forest.n() {
            return Err(Error::invalid("signed pair does not match the forest"));
        }
        let disagreement = neg.disagreement(&pos);
        let delta_i = disagreement.iter().map(|&v| forest.degree(v)).max().unwrap_or(0);
        Ok(SignedPair {
            neg,
            pos,
            disagreement,
            delta_i,
        })
    }

    pub fn neg(&self) -> &Embedding {
        &self.neg
    }

    pub fn pos(&self) -> &Embedding {
        &self.pos
    }

    /// `I`: vertices whose images differ.
    pub fn disagreement(&self) -> &[usize] {
        &self.disagreement
    }

    /// `Δ_I`, zero when `I` is empty.
    pub fn delta_i(&self) -> usize {
        self.delta_i
    }

    /// `Δ_I + δ_F`.
    pub fn guarantee(&self, forest: &Forest) -> usize {
        self.delta_i + forest.min_degree()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    /// `None` for the starting embedding.
    pub swap: Option<(usize, usize)>,
    pub sum: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpolationTrace {
    pub steps: Vec<TraceStep>,
    pub result: Embedding,
    /// `Δ_I + δ_F`.
    pub achieved_bound: usize,
}

impl InterpolationTrace {
    /// JSON lines, one object per step.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s).expect("trace steps serialise"));
            out.push('\n');
        }
        out
    }
}

/// An embedding with `|sum| <= Δ_I + δ_F`.
pub fn interpolate(pair: &SignedPair, forest: &Forest, graph: &ColouredCompleteGraph) -> Result<Embedding> {
    interpolate_traced(pair, forest, graph).map(|t| t.result)
}

pub fn interpolate_traced(pair: &SignedPair, forest: &Forest, graph: &ColouredCompleteGraph) -> Result<InterpolationTrace> {
    let bound = pair.guarantee(forest);
    let within = |e: &Embedding| e.imbalance() <= bound as u64;

    let mut current = pair.pos.clone();
    let mut steps = vec![TraceStep {
        step: 0,
        swap: None,
        sum: current.sum(),
    }];
    let finish = |steps: Vec<TraceStep>, result: Embedding| InterpolationTrace {
        steps,
        result,
        achieved_bound: bound,
    };
    if within(&current) {
        return Ok(finish(steps, current));
    }
    if within(&pair.neg) {
        steps.push(TraceStep {
            step: 1,
            swap: None,
            sum: pair.neg.sum(),
        });
        return Ok(finish(steps, pair.neg.clone()));
    }

    let min_degree = forest.min_degree();
    for v in 0..forest.n() {
        let target = pair.neg.image(v);
        if current.image(v) == target {
            continue;
        }
        let u = current.preimage(target);
        let moves: Vec<(usize, usize)> = if forest.degree(u) == min_degree || forest.degree(v) == min_degree {
            vec![(u, v)]
        } else {
            let w = forest
                .min_degree_vertex_excluding(&[u, v])
                .ok_or_else(|| Error::invalid("three-step swap needs a third vertex (n >= 3)"))?;
            vec![(u, w), (v, w), (u, w)]
        };
        for (a, b) in moves {
            current.swap_images(forest, graph, a, b)?;
            steps.push(TraceStep {
                step: steps.len(),
                swap: Some((a, b)),
                sum: current.sum(),
            });
            if within(&current) {
                return Ok(finish(steps, current));
            }
        }
    }
    unreachable!(
        "interpolation reached the non-positive end (sum {}) without passing |sum| <= {bound}",
        current.sum()
    )
}

/// The partial embeddings `h_0 = g, .., h_{3r} = f` between two placements
/// of the same set `M` that agree on `N`, using the spare host vertex `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Claim9Sequence {
    /// `v_1, .., v_r`: `M \ N` ascending, except that the vertex `f` sends to `a` (if any) goes last.
    pub order: Vec<usize>,
    pub steps: Vec<PartialEmbedding>,
}

pub fn claim9_sequence(
    f: &PartialEmbedding,
    g: &PartialEmbedding,
    n_set: &[usize],
    a: usize,
) -> Result<Claim9Sequence> {
    let m = f.domain();
    if g.domain() != m || f.forest_n() != g.forest_n() || f.host_n() != g.host_n() {
        return Err(Error::invalid("f and g must share their domain M"));
    }
    if !f.is_injective() || !g.is_injective() {
        return Err(Error::invalid("f and g must be injective"));
    }
    if let Some(&v) = n_set.iter().find(|v| !m.contains(v)) {
        return Err(Error::invalid(format!("N must lie inside M; {v} does not")));
    }
    if let Some(&v) = n_set.iter().find(|&&v| f.get(v) != g.get(v)) {
        return Err(Error::invalid(format!("f and g disagree on {v} in N")));
    }
    if a >= f.host_n() || g.preimage(a).is_some() {
        return Err(Error::invalid(format!("spare vertex {a} must be a host vertex outside g(M)")));
    }

    let mut order: Vec<usize> = m.iter().copied().filter(|v| !n_set.contains(v)).collect();
    if let Some(pos) = order.iter().position(|&v| f.get(v) == Some(a)) {
        let v = order.remove(pos);
        order.push(v);
    }

    let image = |h: &PartialEmbedding, v: usize| h.get(v).expect("v in M");
    let mut steps = vec![g.clone()];
    for (i, &vi) in order.iter().enumerate() {
        let prev = steps.last().expect("h_0 present").clone();
        let fi = image(f, vi);

        let mut first = prev.clone();
        if image(&prev, vi) != fi {
            if let Some(j) = order[i + 1..].iter().position(|&vj| image(&prev, vj) == fi) {
                first.set_unchecked(order[i + 1 + j], a);
            }
        }

        let mut second = first.clone();
        second.set_unchecked(vi, fi);

        let mut third = second.clone();
        for &vj in &order[i + 1..] {
            if image(&second, vj) == a {
                third.set_unchecked(vj, image(&prev, vi));
            }
        }
        steps.extend([first, second, third]);
    }
    Ok(Claim9Sequence { order, steps })
}

/// Checks every conclusion about a sequence from [`claim9_sequence`] and
/// returns a description of each violation found.
pub fn claim9_violations(
    seq: &Claim9Sequence,
    f: &PartialEmbedding,
    g: &PartialEmbedding,
    a: usize,
    allowed: &[usize],
) -> Vec<String> {
    let mut out = Vec::new();
    let r = seq.order.len();
    if seq.steps.len() != 3 * r + 1 {
        out.push(format!("expected {} steps, got {}", 3 * r + 1, seq.steps.len()));
        return out;
    }
    if seq.steps[0] != *g {
        out.push("h_0 differs from g".into());
    }
    if seq.steps[3 * r] != *f {
        out.push("h_3r differs from f".into());
    }
    let m = f.domain();
    for (k, h) in seq.steps.iter().enumerate() {
        if !h.is_injective() {
            out.push(format!("h_{k} is not injective"));
        }
        if h.domain() != m {
            out.push(format!("h_{k} has the wrong domain"));
        }
        if let Some(t) = h.image().into_iter().find(|t| !allowed.contains(t)) {
            out.push(format!("h_{k} sends a vertex to {t} outside U"));
        }
        if k > 0 {
            let prev = &seq.steps[k - 1];
            let moved = m.iter().filter(|&&v| prev.get(v) != h.get(v)).count();
            if moved > 1 {
                out.push(format!("h_{} and h_{k} differ on {moved} vertices", k - 1));
            }
        }
    }
    for i in 1..=r {
        let h = &seq.steps[3 * i];
        if i < r && h.preimage(a).is_some() {
            out.push(format!("a is used by h_{}", 3 * i));
        }
        for &vj in &seq.order[..i] {
            if h.get(vj) != f.get(vj) {
                out.push(format!("h_{}({vj}) differs from f({vj})", 3 * i));
            }
        }
    }
    out
}
