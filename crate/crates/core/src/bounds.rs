//! Closed-form guarantees on the minimum achievable imbalance.
//!
//! Real-valued bounds are evaluated in `f64`. When a bound is compared with
//! an integer sum use [`within_bound`], which rounds the bound up by a small
//! relative margin so floating error never turns a true bound into a false
//! rejection or a false bound into an acceptance beyond `1e-9`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for floating identity checks.
pub const IDENTITY_TOL: f64 = 1e-9;

/// `|sum| <= bound`, with the bound nudged upward by `1e-9` relative.
pub fn within_bound(imbalance: u64, bound: f64) -> bool {
    (imbalance as f64) <= bound + IDENTITY_TOL * bound.abs().max(1.0)
}

/// `Δ/2 + 18`, exact.
pub fn theorem2_bound(max_degree: usize) -> Ratio<i64> {
    Ratio::new(max_degree as i64, 2) + 18
}

/// `Δ/2 + 9` when `Δ >= n/2` or `Δ <= 15`, otherwise
/// `(Δ - n/4 + 3)/2 + sqrt((Δ - n/4 + 1)^2 / 4 + 4n)`.
pub fn theorem3_bound(n: usize, max_degree: usize) -> f64 {
    let (n, d) = (n as f64, max_degree as f64);
    if 2.0 * d >= n || max_degree <= 15 {
        0.5 * d + 9.0
    } else {
        let x = d - 0.25 * n;
        0.5 * (x + 3.0) + (0.25 * (x + 1.0).powi(2) + 4.0 * n).sqrt()
    }
}

/// `ξ = (Δ - n/4) / n`.
pub fn xi(n: usize, max_degree: usize) -> f64 {
    (max_degree as f64 - 0.25 * n as f64) / n as f64
}

fn check_optim_domain(n: usize, xi: f64) -> Result<()> {
    if n < 32 {
        return Err(Error::invalid(format!("n must be >= 32, got {n}")));
    }
    let lo = -0.25 + 16.0 / n as f64;
    if !(xi >= lo - IDENTITY_TOL && xi <= 0.25 + IDENTITY_TOL) {
        return Err(Error::invalid(format!("xi = {xi} outside [{lo}, 0.25]")));
    }
    Ok(())
}

/// `(3 + ξn)/2 + sqrt((1 + ξn)^2 + 16n)/2`, the optimum of [`lemma8_bound`] over `ε`.
pub fn phi(n: usize, xi: f64) -> Result<f64> {
    check_optim_domain(n, xi)?;
    let (nf, xn) = (n as f64, xi * n as f64);
    Ok((3.0 + xn) / 2.0 + ((1.0 + xn).powi(2) + 16.0 * nf).sqrt() / 2.0)
}

/// The `ε` at which `2/ε + 1` and `2 + ξn + 2εn` cross.
pub fn epsilon_star(n: usize, xi: f64) -> Result<f64> {
    check_optim_domain(n, xi)?;
    let (nf, xn) = (n as f64, xi * n as f64);
    let eps = (-1.0 - xn + ((1.0 + xn).powi(2) + 16.0 * nf).sqrt()) / (4.0 * nf);
    assert!(
        eps >= 1.0 / nf - IDENTITY_TOL && eps <= 0.125 + IDENTITY_TOL,
        "epsilon* = {eps} escaped [1/n, 1/8]"
    );
    Ok(eps)
}

/// `(x)+ = max(x, 0)`.
pub fn positive_part(x: f64) -> f64 {
    x.max(0.0)
}

/// `max(1 + 2/ε, 2 + (Δ - (1/4 - 2ε)n)+)`.
pub fn lemma8_bound(n: usize, max_degree: usize, eps: f64) -> Result<f64> {
    if n < 32 {
        return Err(Error::invalid(format!("n must be >= 32, got {n}")));
    }
    if 2 * max_degree > n {
        return Err(Error::invalid(format!("Δ = {max_degree} exceeds n/2")));
    }
    let nf = n as f64;
    if !(eps >= 1.0 / nf && eps <= 0.125) {
        return Err(Error::invalid(format!("ε = {eps} outside [1/n, 1/8]")));
    }
    let (left, right) = lemma8_terms(n, max_degree, eps);
    Ok(left.max(right))
}

/// The two arguments of the maximum in [`lemma8_bound`], unchecked.
pub fn lemma8_terms(n: usize, max_degree: usize, eps: f64) -> (f64, f64) {
    let nf = n as f64;
    (
        1.0 + 2.0 / eps,
        2.0 + positive_part(max_degree as f64 - (0.25 - 2.0 * eps) * nf),
    )
}

/// `4n / (ηn - 2)`, the explicit form behind the `(1 + o(1)) 4/η` bound.
pub fn corollary4_bound(n: usize, max_degree: usize, eta: f64) -> Result<f64> {
    let nf = n as f64;
    if !(eta > 0.0 && eta < 0.25) {
        return Err(Error::invalid(format!("η = {eta} outside (0, 1/4)")));
    }
    if eta * nf <= 2.0 {
        return Err(Error::invalid(format!("ηn = {} must exceed 2", eta * nf)));
    }
    if max_degree < 15 || max_degree as f64 > (0.25 - eta) * nf + IDENTITY_TOL {
        return Err(Error::invalid(format!(
            "Δ = {max_degree} outside [15, (1/4 - η)n = {}]",
            (0.25 - eta) * nf
        )));
    }
    Ok(4.0 * nf / (eta * nf - 2.0))
}

/// `(n - 2)/2`: every embedding of the spanning star into `c0(n)` has this imbalance.
pub fn c0_star_imbalance(n: usize) -> Result<u64> {
    if n == 0 || !n.is_multiple_of(4) {
        return Err(Error::invalid(format!("c0 needs n divisible by 4, got {n}")));
    }
    Ok((n as u64 - 2) / 2)
}

/// Every guarantee evaluated for one `(n, Δ)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub max_degree: usize,
    pub theorem2: f64,
    pub theorem3: f64,
    pub lemma10_phi: Option<f64>,
    pub epsilon_star: Option<f64>,
    pub corollary4: Option<f64>,
    pub xi: f64,
}

impl BoundReport {
    pub fn new(n: usize, max_degree: usize, eta: Option<f64>) -> Self {
        let xi = xi(n, max_degree);
        let t2 = theorem2_bound(max_degree);
        BoundReport {
            n,
            max_degree,
            theorem2: *t2.numer() as f64 / *t2.denom() as f64,
            theorem3: theorem3_bound(n, max_degree),
            lemma10_phi: phi(n, xi).ok(),
            epsilon_star: epsilon_star(n, xi).ok(),
            corollary4: eta.and_then(|eta| corollary4_bound(n, max_degree, eta).ok()),
            xi,
        }
    }
}
