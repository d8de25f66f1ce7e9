//! Conductance, diligence and absolute diligence.
//!
//! Conductance and diligence quantify over all vertex subsets, so they are
//! computed by exhaustive enumeration (Gray-code order, one vertex flip per
//! step) on graphs up to a configurable size cap. All values are exact
//! rationals; inner loops compare ratios by integer cross-multiplication.
//!
//! Conventions:
//! - a disconnected graph has conductance 0 and diligence 0;
//! - subsets whose smaller side has zero volume are skipped;
//! - ties between witness subsets go to the lexicographically smallest set.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::generators::HGraph;
use crate::graph::{Graph, VertexSet};

pub type Rational = BigRational;

pub const DEFAULT_CAP: usize = 20;
const HARD_CAP: usize = 63;

pub(crate) fn ratio(num: u128, den: u128) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conductance {
    pub value: Rational,
    pub witness: Option<VertexSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diligence {
    pub value: Rational,
    pub witness: Option<VertexSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsoluteDiligence {
    pub value: Rational,
    pub witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CutDiligence {
    Value(Rational),
    NoCrossingEdge,
}

/// A cut `E(S, S̄)` with the quantities diligence is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CutView {
    pub subset: VertexSet,
    pub cut_edges: Vec<(usize, usize)>,
    pub vol_s: usize,
    pub vol_complement: usize,
    /// `vol / |side|` of the side with the smaller volume (ties: `S`).
    pub avg_degree_smaller_side: Option<Rational>,
}

pub fn cut_view(g: &Graph, s: &VertexSet) -> CutView {
    let vol_s = g.volume(s);
    let vol_complement = g.total_volume() - vol_s;
    let (vol, size) = if vol_s <= vol_complement { (vol_s, s.len()) } else { (vol_complement, g.n() - s.len()) };
    CutView {
        subset: s.clone(),
        cut_edges: g.cut_edges(s),
        vol_s,
        vol_complement,
        avg_degree_smaller_side: (size > 0).then(|| ratio(vol as u128, size as u128)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub n: usize,
    pub connected: bool,
    pub conductance: Rational,
    pub diligence: Rational,
    pub absolute_diligence: Rational,
    pub conductance_witness: Option<VertexSet>,
    pub diligence_witness: Option<VertexSet>,
    pub absolute_witness: Option<(usize, usize)>,
}

/// `ρ̄(G) = min over edges of max(1/d_u, 1/d_v)`, or 0 without edges.
pub fn absolute_diligence(g: &Graph) -> AbsoluteDiligence {
    // max(1/du, 1/dv) = 1 / min(du, dv); minimizing it maximizes min(du, dv).
    let mut best: Option<(usize, (usize, usize))> = None;
    for (u, v) in g.edges() {
        let m = g.degree(u).min(g.degree(v));
        if best.is_none_or(|(b, _)| m > b) {
            best = Some((m, (u, v)));
        }
    }
    match best {
        Some((m, e)) => AbsoluteDiligence { value: ratio(1, m as u128), witness: Some(e) },
        None => AbsoluteDiligence { value: Rational::zero(), witness: None },
    }
}

/// `ρ(S)` for a set with `0 < vol(S) <= vol(G)/2`.
pub fn cut_diligence(g: &Graph, s: &VertexSet) -> Result<CutDiligence> {
    if s.universe() != g.n() {
        return Err(Error::pre("vertex set universe differs from the graph"));
    }
    let vol_s = g.volume(s);
    if vol_s == 0 {
        return Err(Error::pre("cut diligence needs vol(S) > 0"));
    }
    if 2 * vol_s > g.total_volume() {
        return Err(Error::pre(format!(
            "cut diligence needs vol(S) <= vol(G)/2, got {vol_s} > {}/2",
            g.total_volume()
        )));
    }
    let widest = g.cut_edges(s).into_iter().map(|(u, v)| g.degree(u).min(g.degree(v))).max();
    Ok(match widest {
        Some(m) => CutDiligence::Value(ratio(vol_s as u128, (s.len() * m) as u128)),
        None => CutDiligence::NoCrossingEdge,
    })
}

fn check_cap(what: &'static str, g: &Graph, cap: usize) -> Result<()> {
    let cap = cap.min(HARD_CAP);
    if g.n() > cap {
        return Err(Error::OverCap { what, n: g.n(), cap });
    }
    Ok(())
}

pub fn conductance_exact(g: &Graph, cap: usize) -> Result<Conductance> {
    let r = metric_report(g, cap)?;
    Ok(Conductance { value: r.conductance, witness: r.conductance_witness })
}

pub fn diligence_exact(g: &Graph, cap: usize) -> Result<Diligence> {
    let r = metric_report(g, cap)?;
    Ok(Diligence { value: r.diligence, witness: r.diligence_witness })
}

/// Lexicographic order of the sorted element lists of two masks.
fn mask_lex_cmp(mut a: u64, mut b: u64) -> Ordering {
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x.cmp(&y);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// Running minimum of `num/den` with a mask witness.
struct MinRatio {
    num: u128,
    den: u128,
    mask: u64,
    set: bool,
}

impl MinRatio {
    fn new() -> Self {
        MinRatio { num: 0, den: 1, mask: 0, set: false }
    }

    #[inline]
    fn offer(&mut self, num: u128, den: u128, mask: u64) {
        if !self.set {
            *self = MinRatio { num, den, mask, set: true };
            return;
        }
        match (num * self.den).cmp(&(self.num * den)) {
            Ordering::Less => *self = MinRatio { num, den, mask, set: true },
            Ordering::Equal if mask_lex_cmp(mask, self.mask) == Ordering::Less => self.mask = mask,
            _ => {}
        }
    }
}

struct Enumerator {
    adj: Vec<u64>,
    deg: Vec<u32>,
    /// `(degree, vertices with at least that degree)`, degrees descending.
    levels: Vec<(u32, u64)>,
}

impl Enumerator {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let adj = (0..n).map(|u| g.neighbors(u).iter().fold(0u64, |m, &v| m | 1 << v)).collect();
        let deg: Vec<u32> = (0..n).map(|u| g.degree(u) as u32).collect();
        let mut distinct: Vec<u32> = deg.iter().copied().filter(|&d| d > 0).collect();
        distinct.sort_unstable_by(|a, b| b.cmp(a));
        distinct.dedup();
        let levels = distinct
            .into_iter()
            .map(|d| (d, (0..n).filter(|&u| deg[u] >= d).fold(0u64, |m, u| m | 1 << u)))
            .collect();
        Enumerator { adj, deg, levels }
    }

    /// Largest `min(d_u, d_v)` over edges crossing `s`, or 0 if none cross.
    #[inline]
    fn widest_crossing(&self, s: &u64, full: u64) -> u32 {
        let outside = full & !s;
        for &(d, ge) in &self.levels {
            let mut inside = s & ge;
            while inside != 0 {
                let u = inside.trailing_zeros() as usize;
                if self.adj[u] & outside & ge != 0 {
                    return d;
                }
                inside &= inside - 1;
            }
        }
        0
    }
}

/// Exact conductance, diligence and absolute diligence in one enumeration.
pub fn metric_report(g: &Graph, cap: usize) -> Result<MetricReport> {
    check_cap("exact conductance/diligence", g, cap)?;
    let n = g.n();
    let abs = absolute_diligence(g);
    let connected = g.is_connected();
    if !connected || g.num_edges() == 0 || n == 1 {
        let witness = (g.num_edges() > 0).then(|| component_of_zero(g));
        return Ok(MetricReport {
            n,
            connected,
            conductance: Rational::zero(),
            diligence: Rational::zero(),
            absolute_diligence: abs.value,
            conductance_witness: witness.clone(),
            diligence_witness: None,
            absolute_witness: abs.witness,
        });
    }

    let e = Enumerator::new(g);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let total_vol = 2 * g.num_edges() as u64;
    let mut phi = MinRatio::new();
    let mut rho = MinRatio::new();

    // Vertex n-1 stays outside; the complement covers the other half.
    let (mut mask, mut vol, mut size, mut cut) = (0u64, 0u64, 0u64, 0u64);
    let steps: u64 = 1 << (n - 1);
    for i in 1..steps {
        let v = i.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let d = e.deg[v] as u64;
        if mask & bit == 0 {
            let inside = (e.adj[v] & mask).count_ones() as u64;
            mask |= bit;
            vol += d;
            size += 1;
            cut = cut + d - 2 * inside;
        } else {
            mask &= !bit;
            let inside = (e.adj[v] & mask).count_ones() as u64;
            vol -= d;
            size -= 1;
            cut = cut + 2 * inside - d;
        }

        let comp = full & !mask;
        let vol_c = total_vol - vol;
        let den = vol.min(vol_c);
        if den > 0 {
            // S and its complement share the value; prefer the lex-smaller.
            let w = if mask_lex_cmp(mask, comp) == Ordering::Less { mask } else { comp };
            phi.offer(cut as u128, den as u128, w);
        }

        if cut > 0 {
            if vol > 0 && 2 * vol <= total_vol {
                let m = e.widest_crossing(&mask, full) as u128;
                rho.offer(vol as u128, size as u128 * m, mask);
            }
            if vol_c > 0 && 2 * vol_c <= total_vol {
                let m = e.widest_crossing(&comp, full) as u128;
                rho.offer(vol_c as u128, (n as u64 - size) as u128 * m, comp);
            }
        }
    }

    Ok(MetricReport {
        n,
        connected,
        conductance: ratio(phi.num, phi.den),
        diligence: ratio(rho.num, rho.den),
        absolute_diligence: abs.value,
        conductance_witness: Some(VertexSet::from_mask(n, phi.mask)),
        diligence_witness: Some(VertexSet::from_mask(n, rho.mask)),
        absolute_witness: abs.witness,
    })
}

fn component_of_zero(g: &Graph) -> VertexSet {
    let mut seen = VertexSet::new(g.n());
    let mut stack = vec![0];
    seen.insert(0);
    while let Some(u) = stack.pop() {
        for &v in g.neighbors(u) {
            if seen.insert(v) {
                stack.push(v);
            }
        }
    }
    seen
}

/// Exact metrics of an `H_{k,Δ}` instance next to the predictors
/// `Δ²/(kΔ²+n)` (conductance) and `1/Δ` (diligence).
#[derive(Debug, Clone)]
pub struct FamilyCheck {
    pub n: usize,
    pub k: usize,
    pub delta: usize,
    pub conductance: Rational,
    pub diligence: Rational,
    pub predicted_conductance: Rational,
    pub predicted_diligence: Rational,
    pub conductance_ratio: f64,
    pub diligence_ratio: f64,
    /// For `q = 1..=k`: `(q, |E(A_q, rest)|, vol(A_q), vol(rest))` with
    /// `A_q = A ∪ S_1 ∪ … ∪ S_q`.
    pub layer_cuts: Vec<(usize, usize, usize, usize)>,
}

pub fn observed_family_metrics(h: &HGraph, cap: usize) -> Result<FamilyCheck> {
    let g = &h.graph;
    let report = metric_report(g, cap)?;
    let (n, k, delta) = (g.n(), h.layers.k(), h.layers.delta());
    let d2 = (delta * delta) as u128;
    let predicted_conductance = ratio(d2, k as u128 * d2 + n as u128);
    let predicted_diligence = ratio(1, delta as u128);
    let mut layer_cuts = Vec::with_capacity(k);
    let mut a_q = h.a_side.clone();
    for q in 1..=k {
        for &v in &h.layers.layers[q] {
            a_q.insert(v);
        }
        let vol = g.volume(&a_q);
        layer_cuts.push((q, g.cut_size(&a_q), vol, g.total_volume() - vol));
    }
    Ok(FamilyCheck {
        n,
        k,
        delta,
        conductance_ratio: to_f64(&report.conductance) / to_f64(&predicted_conductance),
        diligence_ratio: to_f64(&report.diligence) / to_f64(&predicted_diligence),
        conductance: report.conductance,
        diligence: report.diligence,
        predicted_conductance,
        predicted_diligence,
        layer_cuts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn q(a: u128, b: u128) -> Rational {
        ratio(a, b)
    }

    #[test]
    fn k4_conductance() {
        let r = metric_report(&Graph::complete(4).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(r.conductance, q(2, 3));
        assert_eq!(r.conductance_witness.unwrap().len(), 2);
        assert_eq!(r.diligence, Rational::one());
    }

    #[test]
    fn star_is_one_everywhere() {
        let g = Graph::star(4, 0).unwrap();
        let r = metric_report(&g, DEFAULT_CAP).unwrap();
        assert_eq!(r.conductance, Rational::one());
        assert_eq!(r.diligence, Rational::one());
        assert_eq!(r.absolute_diligence, Rational::one());
    }

    #[test]
    fn disconnected_is_zero() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let r = metric_report(&g, DEFAULT_CAP).unwrap();
        assert!(r.conductance.is_zero());
        assert!(r.diligence.is_zero());
        assert_eq!(r.conductance_witness, Some(VertexSet::from_vertices(4, [0, 1])));
        // an isolated vertex alone disconnects the graph
        let g = Graph::from_edges(4, &[(0, 1), (1, 2)]).unwrap();
        assert!(metric_report(&g, DEFAULT_CAP).unwrap().conductance.is_zero());
    }

    #[test]
    fn edgeless() {
        let g = Graph::empty(3).unwrap();
        let r = metric_report(&g, DEFAULT_CAP).unwrap();
        assert!(r.conductance.is_zero());
        assert!(r.conductance_witness.is_none());
        assert!(r.absolute_diligence.is_zero());
        assert!(r.absolute_witness.is_none());
    }

    #[test]
    fn p4_cut_diligence() {
        let g = Graph::path(4).unwrap();
        let s = VertexSet::from_vertices(4, [0, 1]);
        assert_eq!(cut_diligence(&g, &s).unwrap(), CutDiligence::Value(q(3, 4)));
        let view = cut_view(&g, &s);
        assert_eq!(view.avg_degree_smaller_side, Some(q(3, 2)));
        assert_eq!(view.cut_edges, vec![(1, 2)]);
    }

    #[test]
    fn cut_diligence_preconditions() {
        let g = Graph::path(4).unwrap();
        assert!(cut_diligence(&g, &VertexSet::new(4)).is_err());
        assert!(cut_diligence(&g, &VertexSet::from_vertices(4, [0, 1, 2])).is_err());
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(
            cut_diligence(&g, &VertexSet::from_vertices(4, [0, 1])).unwrap(),
            CutDiligence::NoCrossingEdge
        );
    }

    #[test]
    fn star_leaf_cut() {
        let n = 7;
        let g = Graph::star(n, 0).unwrap();
        let leaf = VertexSet::from_vertices(n, [3]);
        assert_eq!(cut_diligence(&g, &leaf).unwrap(), CutDiligence::Value(Rational::one()));
    }

    #[test]
    fn cycle_diligence_is_one() {
        let r = diligence_exact(&Graph::cycle(5).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!(r.value, Rational::one());
    }

    #[test]
    fn cap_refusal() {
        let g = Graph::path(21).unwrap();
        match conductance_exact(&g, DEFAULT_CAP) {
            Err(Error::OverCap { cap, n, .. }) => assert_eq!((cap, n), (20, 21)),
            other => panic!("expected cap refusal, got {other:?}"),
        }
        assert!(conductance_exact(&g, 21).is_ok());
    }

    #[test]
    fn absolute_diligence_cases() {
        assert_eq!(absolute_diligence(&Graph::star(6, 2).unwrap()).value, Rational::one());
        let k5 = Graph::complete(5).unwrap();
        assert_eq!(absolute_diligence(&k5).value, q(1, 4));
        assert!(absolute_diligence(&Graph::empty(4).unwrap()).value.is_zero());
    }

    #[test]
    fn mask_lex() {
        assert_eq!(mask_lex_cmp(0b1001, 0b10001), Ordering::Less);
        assert_eq!(mask_lex_cmp(0b10001, 0b10), Ordering::Less);
        assert_eq!(mask_lex_cmp(0b11, 0b1), Ordering::Greater);
    }
}
