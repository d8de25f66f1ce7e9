//! Spread-time bounds evaluated on a schedule prefix.
//!
//! - `T(𝒢, c)`: first step `t` with `Σ_{p≤t} Φ(G^(p))·ρ(G^(p)) ≥ C·ln n`,
//!   where `C = (10c + 20)/c₀` and `c₀ = 1/2 − 1/e`;
//! - `T_abs(𝒢)`: first step `t` with `Σ_{p≤t} [G^(p) connected]·ρ̄(G^(p)) ≥ 2n`.
//!
//! A bound that the prefix never reaches is reported as such, with the final
//! running sum, rather than as an error.

use std::borrow::Borrow;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::metrics::{self, ratio, to_f64, Rational};

pub const DEFAULT_C: f64 = 2.0;

/// `c₀ = 1/2 − 1/e`.
pub fn c0() -> f64 {
    0.5 - 1.0 / std::f64::consts::E
}

/// `C = (10c + 20)/c₀`.
pub fn big_c(c: f64) -> f64 {
    (10.0 * c + 20.0) / c0()
}

/// `C·ln n`.
pub fn conductance_threshold(n: usize, c: f64) -> f64 {
    big_c(c) * (n as f64).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Crossing {
    Reached { step: u64, sum: f64 },
    NotReached { final_sum: f64 },
}

impl Crossing {
    pub fn step(&self) -> Option<u64> {
        match *self {
            Crossing::Reached { step, .. } => Some(step),
            Crossing::NotReached { .. } => None,
        }
    }

    /// Whether a run finishing at continuous time `time` beat the bound.
    /// A bound not reached within the prefix counts as beaten only if the
    /// prefix covers every step up to `⌈time⌉ − 1`.
    pub fn covers(&self, time: f64, prefix_len: usize) -> bool {
        match *self {
            Crossing::Reached { step, .. } => time <= step as f64,
            Crossing::NotReached { .. } => time.ceil() <= prefix_len as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub step: u64,
    pub connected: bool,
    /// Exact Φ and ρ, absent when the snapshot exceeds the enumeration cap.
    pub conductance: Option<f64>,
    pub diligence: Option<f64>,
    pub absolute_diligence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConstants {
    pub c: f64,
    pub c0: f64,
    pub big_c: f64,
    pub log_base: &'static str,
    pub conductance_threshold: f64,
    pub absolute_threshold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub rows: Vec<BoundRow>,
    /// `None` when some snapshot was over the enumeration cap.
    pub t_conductance: Option<Crossing>,
    pub t_absolute: Crossing,
    pub combined: Option<u64>,
    pub constants: BoundConstants,
}

fn check_prefix<G: Borrow<Graph>>(prefix: &[G]) -> Result<usize> {
    let Some(first) = prefix.first() else { return Ok(0) };
    let n = first.borrow().n();
    if prefix.iter().any(|g| g.borrow().n() != n) {
        return Err(Error::pre("prefix snapshots have different vertex counts"));
    }
    Ok(n)
}

/// Exact `Φ·ρ` per snapshot, reusing the previous value for repeated snapshots.
fn conductance_terms<G: Borrow<Graph>>(prefix: &[G], cap: usize) -> Result<Vec<(Rational, Rational)>> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(prefix.len());
    for (i, g) in prefix.iter().enumerate() {
        let g = g.borrow();
        if i > 0 && prefix[i - 1].borrow() == g {
            let last = out[i - 1].clone();
            out.push(last);
            continue;
        }
        let r = metrics::metric_report(g, cap)?;
        out.push((r.conductance, r.diligence));
    }
    Ok(out)
}

/// `T(𝒢, c)` over the prefix.
pub fn bound_t<G: Borrow<Graph>>(prefix: &[G], c: f64, cap: usize) -> Result<Crossing> {
    if !(c > 1.0) {
        return Err(Error::pre(format!("c must exceed 1, got {c}")));
    }
    let n = check_prefix(prefix)?;
    if n == 0 {
        return Ok(Crossing::NotReached { final_sum: 0.0 });
    }
    let threshold = conductance_threshold(n, c);
    let mut sum = Rational::zero();
    for (t, (phi, rho)) in conductance_terms(prefix, cap)?.into_iter().enumerate() {
        sum += phi * rho;
        let s = to_f64(&sum);
        if s >= threshold {
            return Ok(Crossing::Reached { step: t as u64, sum: s });
        }
    }
    Ok(Crossing::NotReached { final_sum: to_f64(&sum) })
}

/// `T_abs(𝒢)` over the prefix; polynomial, so no cap.
pub fn bound_t_abs<G: Borrow<Graph>>(prefix: &[G]) -> Result<Crossing> {
    let n = check_prefix(prefix)?;
    let threshold = Rational::from_integer((2 * n).into());
    let mut sum = Rational::zero();
    for (t, g) in prefix.iter().enumerate() {
        let g = g.borrow();
        if g.is_connected() {
            sum += metrics::absolute_diligence(g).value;
        }
        if n > 0 && sum >= threshold {
            return Ok(Crossing::Reached { step: t as u64, sum: to_f64(&sum) });
        }
    }
    Ok(Crossing::NotReached { final_sum: to_f64(&sum) })
}

/// `min{T(𝒢,c), T_abs(𝒢)}`, with "not reached" as +∞.
pub fn combined_bound<G: Borrow<Graph>>(prefix: &[G], c: f64, cap: usize) -> Result<Option<u64>> {
    let t = bound_t(prefix, c, cap)?;
    let t_abs = bound_t_abs(prefix)?;
    Ok(min_step(Some(t), t_abs))
}

fn min_step(t: Option<Crossing>, t_abs: Crossing) -> Option<u64> {
    match (t.and_then(|x| x.step()), t_abs.step()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Full table plus both crossings. Snapshots over `cap` drop the `T(𝒢,c)`
/// arm instead of failing the report.
pub fn bound_report<G: Borrow<Graph>>(prefix: &[G], c: f64, cap: usize) -> Result<BoundReport> {
    let n = check_prefix(prefix)?;
    let within_cap = prefix.iter().all(|g| g.borrow().n() <= cap);
    let terms = if within_cap { Some(conductance_terms(prefix, cap)?) } else { None };
    let rows = prefix
        .iter()
        .enumerate()
        .map(|(t, g)| {
            let g = g.borrow();
            BoundRow {
                step: t as u64,
                connected: g.is_connected(),
                conductance: terms.as_ref().map(|v| to_f64(&v[t].0)),
                diligence: terms.as_ref().map(|v| to_f64(&v[t].1)),
                absolute_diligence: to_f64(&metrics::absolute_diligence(g).value),
            }
        })
        .collect();
    let t_conductance = if within_cap { Some(bound_t(prefix, c, cap)?) } else { None };
    let t_absolute = bound_t_abs(prefix)?;
    Ok(BoundReport {
        n,
        rows,
        t_conductance,
        t_absolute,
        combined: min_step(t_conductance, t_absolute),
        constants: BoundConstants {
            c,
            c0: c0(),
            big_c: big_c(c),
            log_base: "e",
            conductance_threshold: if n > 0 { conductance_threshold(n, c) } else { 0.0 },
            absolute_threshold: 2 * n,
        },
    })
}

/// Both crossings for the schedule that repeats `g` forever. The prefix is
/// grown just far enough for each sum to cross (or shown never to).
pub fn static_crossings(g: &Graph, c: f64, cap: usize) -> Result<(Crossing, Crossing)> {
    let n = g.n();
    let r = metrics::metric_report(g, cap)?;
    let term = to_f64(&(r.conductance * r.diligence));
    let t = if term > 0.0 {
        let len = (conductance_threshold(n, c) / term).ceil() as usize + 1;
        bound_t(&vec![g; len.max(1)], c, cap)?
    } else {
        Crossing::NotReached { final_sum: 0.0 }
    };
    let abs = to_f64(&r.absolute_diligence);
    let t_abs = if r.connected && abs > 0.0 {
        let len = ((2 * n) as f64 / abs).ceil() as usize + 1;
        bound_t_abs(&vec![g; len])?
    } else {
        Crossing::NotReached { final_sum: 0.0 }
    };
    Ok((t, t_abs))
}

/// `Φ(g)·ρ(g)·min(|I|, |U|)`, the guaranteed floor on the spreading rate.
pub fn rate_lower_bound(g: &Graph, informed: &VertexSet, cap: usize) -> Result<Rational> {
    if informed.universe() != g.n() || informed.is_empty() || informed.is_full() {
        return Err(Error::pre("informed set must be a non-empty proper subset of the vertices"));
    }
    let r = metrics::metric_report(g, cap)?;
    let m = informed.len().min(g.n() - informed.len());
    Ok(r.conductance * r.diligence * ratio(m as u128, 1))
}
