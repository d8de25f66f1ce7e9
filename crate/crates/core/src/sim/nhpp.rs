use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::metrics::{ratio, Rational};

/// Piecewise-constant rate: `rates[i]` holds on `[breaks[i], breaks[i+1])`
/// and the rate is 0 outside `[breaks[0], breaks[last])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRate {
    breaks: Vec<f64>,
    rates: Vec<f64>,
}

impl StepRate {
    pub fn new(breaks: Vec<f64>, rates: Vec<f64>) -> Result<Self> {
        if breaks.len() != rates.len() + 1 || rates.is_empty() {
            return Err(Error::pre("a step rate needs one more break point than pieces"));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::pre("break points must be strictly increasing"));
        }
        if let Some(r) = rates.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(Error::pre(format!("rate pieces must be finite and non-negative, got {r}")));
        }
        Ok(StepRate { breaks, rates })
    }

    pub fn constant(a: f64, b: f64, rate: f64) -> Result<Self> {
        StepRate::new(vec![a, b], vec![rate])
    }

    pub fn at(&self, t: f64) -> f64 {
        if t < self.breaks[0] {
            return 0.0;
        }
        let i = self.breaks.partition_point(|&b| b <= t);
        if i >= self.breaks.len() {
            0.0
        } else {
            self.rates[i - 1]
        }
    }

    /// `∫_a^b λ`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.rates
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let lo = self.breaks[i].max(a);
                let hi = self.breaks[i + 1].min(b);
                if hi > lo {
                    r * (hi - lo)
                } else {
                    0.0
                }
            })
            .sum()
    }

    fn max_on(&self, a: f64, b: f64) -> f64 {
        (0..self.rates.len())
            .filter(|&i| self.breaks[i] < b && self.breaks[i + 1] > a)
            .map(|i| self.rates[i])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NhppSample {
    pub start: f64,
    pub end: f64,
    pub arrivals: Vec<f64>,
}

/// Arrivals of a Poisson process with rate `rate` on `[a, b]`, by thinning a
/// homogeneous process at the largest rate seen on the interval.
pub fn sample_nhpp(rate: &StepRate, a: f64, b: f64, seed: u64) -> Result<NhppSample> {
    if !(a <= b) {
        return Err(Error::pre(format!("empty interval [{a}, {b}]")));
    }
    let max = rate.max_on(a, b);
    let mut arrivals = Vec::new();
    if max > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = a;
        loop {
            t += -(1.0 - rng.gen::<f64>()).ln() / max;
            if t > b {
                break;
            }
            if rng.gen::<f64>() * max < rate.at(t) {
                arrivals.push(t);
            }
        }
    }
    Ok(NhppSample { start: a, end: b, arrivals })
}

/// `e^{r(1/e + 1/2 − 1)}`, an upper bound on `Pr[X ≤ r/2]` for `X ~ Poisson(r)`.
pub fn poisson_lower_tail_bound(r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::pre(format!("Poisson rate must be positive, got {r}")));
    }
    Ok((r * (1.0 / std::f64::consts::E + 0.5 - 1.0)).exp())
}

/// Exact `Pr[X ≤ k]` for `X ~ Poisson(r)` by summing the mass function.
pub fn poisson_cdf(k: u64, r: f64) -> f64 {
    let mut term = (-r).exp();
    let mut sum = term;
    for i in 1..=k {
        term *= r / i as f64;
        sum += term;
    }
    sum.min(1.0)
}

/// `λ = Σ over cut edges {u,v} of 1/d_u + 1/d_v`, exactly.
pub fn instantaneous_rate(g: &Graph, informed: &VertexSet) -> Result<Rational> {
    if informed.universe() != g.n() {
        return Err(Error::pre("informed set universe differs from the graph"));
    }
    if informed.is_empty() || informed.is_full() {
        return Err(Error::pre("informed set must be a non-empty proper subset"));
    }
    let mut sum = Rational::from_integer(0.into());
    for (u, v) in g.cut_edges(informed) {
        sum += ratio(1, g.degree(u) as u128) + ratio(1, g.degree(v) as u128);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_examples() {
        let k2 = Graph::complete(2).unwrap();
        assert_eq!(instantaneous_rate(&k2, &VertexSet::from_vertices(2, [0])).unwrap(), ratio(2, 1));
        let star = Graph::star(4, 0).unwrap();
        assert_eq!(instantaneous_rate(&star, &VertexSet::from_vertices(4, [0])).unwrap(), ratio(4, 1));
        let p3 = Graph::path(3).unwrap();
        assert_eq!(instantaneous_rate(&p3, &VertexSet::from_vertices(3, [0])).unwrap(), ratio(3, 2));
        assert!(instantaneous_rate(&p3, &VertexSet::new(3)).is_err());
        assert!(instantaneous_rate(&p3, &VertexSet::full(3)).is_err());
    }

    #[test]
    fn step_rate_lookup_and_integral() {
        let r = StepRate::new(vec![0.0, 1.0, 2.0], vec![1.0, 3.0]).unwrap();
        assert_eq!(r.at(-0.5), 0.0);
        assert_eq!(r.at(0.0), 1.0);
        assert_eq!(r.at(1.0), 3.0);
        assert_eq!(r.at(2.0), 0.0);
        assert_eq!(r.integral(0.0, 2.0), 4.0);
        assert_eq!(r.integral(0.5, 1.5), 2.0);
        assert!(StepRate::new(vec![0.0, 1.0], vec![-1.0]).is_err());
        assert!(StepRate::new(vec![1.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn zero_rate_has_no_arrivals() {
        let r = StepRate::constant(0.0, 10.0, 0.0).unwrap();
        for seed in 0..20 {
            assert!(sample_nhpp(&r, 0.0, 10.0, seed).unwrap().arrivals.is_empty());
        }
    }

    #[test]
    fn constant_rate_mean_count() {
        let r = StepRate::constant(0.0, 10.0, 1.0).unwrap();
        let trials = 20_000;
        let total: usize = (0..trials).map(|s| sample_nhpp(&r, 0.0, 10.0, s).unwrap().arrivals.len()).sum();
        assert!((total as f64 / trials as f64 - 10.0).abs() < 0.1);
    }

    #[test]
    fn step_rate_mean_count() {
        let r = StepRate::new(vec![0.0, 1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let trials = 20_000;
        let total: usize = (0..trials).map(|s| sample_nhpp(&r, 0.0, 2.0, s).unwrap().arrivals.len()).sum();
        assert!((total as f64 / trials as f64 - 4.0).abs() < 0.1);
    }

    #[test]
    fn tail_bound_examples() {
        let b10 = poisson_lower_tail_bound(10.0).unwrap();
        assert!((b10.ln() - 10.0 * (1.0 / std::f64::consts::E - 0.5)).abs() < 1e-12);
        assert!(poisson_cdf(5, 10.0) <= b10);
        assert!(poisson_lower_tail_bound(1.0).unwrap() >= poisson_cdf(0, 1.0));
        assert!((poisson_cdf(0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let tiny = poisson_lower_tail_bound(1e-9).unwrap();
        assert!(tiny <= 1.0 && tiny > 1.0 - 1e-8);
        assert!(poisson_lower_tail_bound(0.0).is_err());
    }
}
