//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the report is printed even
//! without `--nocapture`. Sized to finish in a few minutes on one core with
//! the test profile's optimizations.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dyngossip::bounds::rate_lower_bound;
use dyngossip::experiment::{self as output, run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult};
use dyngossip::generators::random_regular_connected;
use dyngossip::metrics::{metric_report, to_f64};
use dyngossip::sim::{
    first_transition_time, instantaneous_rate, poisson_cdf, poisson_lower_tail_bound, sample_nhpp, simulate, Protocol,
    SimConfig, StepRate,
};
use dyngossip::stats::{chi_square_gof, ks_one_sample, mean};
use dyngossip::{static_schedule, Graph, VertexSet};

const ALPHA: f64 = 0.01;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p = rng.gen_range(0.0..0.7);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edge_iter(n, edges).unwrap()
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn metric_oracle_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    let graphs = 600;
    for i in 0..graphs {
        let n = rng.gen_range(2..=8);
        let g = random_connected(&mut rng, n);
        let r = metric_report(&g, 20).unwrap();
        let floor = rational(1, n as i64 - 1);
        if !(r.diligence >= floor && r.diligence <= BigRational::one()) {
            failures.push(format!("graph {i}: ρ = {}", r.diligence));
        }
        if r.absolute_diligence < floor {
            failures.push(format!("graph {i}: ρ̄ = {}", r.absolute_diligence));
        }
        if r.conductance <= BigRational::zero() {
            failures.push(format!("graph {i}: Φ = {}", r.conductance));
        }
    }
    let mut regular = 0;
    for (n, d) in [(6, 3), (8, 3), (8, 4), (10, 4), (12, 3), (12, 5), (14, 4)] {
        for seed in 0..5 {
            let g = random_regular_connected(n, d, seed).unwrap();
            regular += 1;
            if !metric_report(&g, 20).unwrap().diligence.is_one() {
                failures.push(format!("{d}-regular n={n} seed={seed}: ρ ≠ 1"));
            }
        }
    }
    for n in 2..=12 {
        let r = metric_report(&Graph::star(n, 0).unwrap(), 20).unwrap();
        if !(r.diligence.is_one() && r.absolute_diligence.is_one()) {
            failures.push(format!("star n={n}: ρ = {}, ρ̄ = {}", r.diligence, r.absolute_diligence));
        }
    }
    outcome(
        failures.is_empty(),
        format!("{graphs} connected graphs, {regular} regular, 11 stars; {} violations {:?}", failures.len(), failures.first()),
    )
}

fn rate_floor_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: Option<f64> = None;
    let mut bad = 0;
    let pairs = 1000;
    for _ in 0..pairs {
        let n = rng.gen_range(2..=12);
        let g = random_connected(&mut rng, n);
        let size = rng.gen_range(1..n);
        let mut vs: Vec<usize> = (0..n).collect();
        for i in 0..size {
            let j = rng.gen_range(i..n);
            vs.swap(i, j);
        }
        let informed = VertexSet::from_vertices(n, vs[..size].iter().copied());
        let floor = rate_lower_bound(&g, &informed, 20).unwrap();
        let rate = instantaneous_rate(&g, &informed).unwrap();
        if floor > rate {
            bad += 1;
        }
        let ratio = to_f64(&(floor / rate));
        worst = Some(worst.map_or(ratio, |w: f64| w.max(ratio)));
    }
    outcome(bad == 0, format!("{pairs} pairs, {bad} violations, largest floor/rate = {:.4}", worst.unwrap_or(0.0)))
}

fn exponential_race() -> Outcome {
    let k2 = Graph::complete(2).unwrap();
    let trials = 100_000u64;
    let times: Vec<f64> = (0..trials)
        .map(|seed| {
            let cfg = SimConfig::new(Protocol::AsyncPushPull, seed, VertexSet::from_vertices(2, [0]));
            simulate(&mut static_schedule(k2.clone()), &cfg).unwrap().completion_time.unwrap()
        })
        .collect();
    let m = mean(&times);
    let mut ok = (m - 0.5).abs() <= 0.01;
    let mut notes = vec![format!("K2 mean {m:.4}")];

    let states = [
        ("path6 {0}", Graph::path(6).unwrap(), vec![0]),
        ("star7 {leaf 3}", Graph::star(7, 0).unwrap(), vec![3]),
        ("K4+pendant {0,1}", Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap(), vec![0, 1]),
    ];
    for (name, g, inf) in states {
        let informed = VertexSet::from_vertices(g.n(), inf);
        let rate = to_f64(&instantaneous_rate(&g, &informed).unwrap());
        let xs: Vec<f64> =
            (0..100_000).map(|seed| first_transition_time(&g, &informed, seed, 1e3).unwrap().unwrap()).collect();
        let ks = ks_one_sample(&xs, |t| 1.0 - (-rate * t.max(0.0)).exp()).unwrap();
        ok &= ks.p_value > ALPHA;
        notes.push(format!("{name}: λ={rate:.4} KS p={:.3}", ks.p_value));
    }
    outcome(ok, notes.join("; "))
}

fn nhpp_counts() -> Outcome {
    let rate = StepRate::new(vec![0.0, 0.7, 1.5, 3.0], vec![2.0, 0.5, 3.5]).unwrap();
    let mu = rate.integral(0.0, 3.0);
    let samples = 100_000u64;
    let max_k = 40usize;
    let mut observed = vec![0u64; max_k + 1];
    for seed in 0..samples {
        let k = sample_nhpp(&rate, 0.0, 3.0, seed).unwrap().arrivals.len();
        observed[k.min(max_k)] += 1;
    }
    // last bin collects the upper tail
    let mut expected: Vec<f64> = (0..max_k).map(|k| samples as f64 * poisson_pmf(k as u64, mu)).collect();
    expected.push(samples as f64 - expected.iter().sum::<f64>());
    let chi = chi_square_gof(&observed, &expected, 0).unwrap();
    outcome(chi.p_value > ALPHA, format!("∫λ = {mu}, χ² = {:.2} on {} dof, p = {:.3}", chi.statistic, chi.dof, chi.p_value))
}

fn poisson_pmf(k: u64, mu: f64) -> f64 {
    let ln = k as f64 * mu.ln() - mu - (1..=k).map(|i| (i as f64).ln()).sum::<f64>();
    ln.exp()
}

fn poisson_tail_inequality() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for r in [1u32, 2, 5, 10, 20, 50] {
        let rf = r as f64;
        // exact: e^{-r} Σ_{k ≤ r/2} r^k / k! in rationals, then one rounding
        let kmax = r / 2;
        let mut sum = BigRational::zero();
        let mut term = BigRational::one();
        for k in 0..=kmax {
            if k > 0 {
                term *= rational(r as i64, k as i64);
            }
            sum += &term;
        }
        let cdf = sum.to_f64().unwrap() * (-rf).exp();
        let bound = (rf * ((-1f64).exp() + 0.5 - 1.0)).exp();
        let lib = poisson_cdf(kmax as u64, rf);
        let lib_bound = poisson_lower_tail_bound(rf).unwrap();
        ok &= cdf <= bound && (lib - cdf).abs() <= 1e-12 && (lib_bound - bound).abs() <= 1e-12 * bound;
        notes.push(format!("r={r}: {cdf:.3e} ≤ {bound:.3e}"));
    }
    outcome(ok, notes.join("; "))
}

fn verdicts_named(result: &ExperimentResult, names: impl Fn(&str) -> bool) -> Outcome {
    let picked: Vec<_> = result.verdicts.iter().filter(|v| names(&v.criterion)).collect();
    let failed: Vec<String> = picked
        .iter()
        .filter(|v| !v.passed)
        .map(|v| format!("{} (observed {:.4}, threshold {:.4}, slack {:.4})", v.criterion, v.observed, v.threshold, v.slack))
        .collect();
    if picked.is_empty() {
        return outcome(false, "no verdicts produced");
    }
    let detail = if failed.is_empty() {
        format!("{} verdicts passed", picked.len())
    } else {
        format!("{}/{} verdicts failed: {}", failed.len(), picked.len(), failed.join("; "))
    };
    outcome(failed.is_empty(), detail)
}

fn config(kind: ExperimentKind, toml_sweep: &str) -> ExperimentConfig {
    let text = format!("experiment = \"{}\"\ntrials = 1000\nseed_base = 1\n{toml_sweep}", kind.code());
    ExperimentConfig::from_toml(&text).unwrap()
}

fn dichotomy() -> Outcome {
    let cfg = config(
        ExperimentKind::Dichotomy,
        "[sweep]\nn = [16, 32, 64, 128]\nexact_n = [16, 64, 256]\nk = [4, 6, 8]\ntail_n = 1024\n",
    );
    let result = run_experiment(&cfg).unwrap();
    verdicts_named(&result, |c| {
        c == "dichotomy.sync-dynamic-star-exactly-n-rounds"
            || c == "dichotomy.async-dynamic-star-median-sublinear"
            || c == "dichotomy.async-two-clique-median-linear"
            || c.starts_with("dichotomy.async-dynamic-star-tail")
    })
}

fn coverage() -> Outcome {
    let result = run_experiment(&config(ExperimentKind::UpperBoundCoverage, "")).unwrap();
    let o = verdicts_named(&result, |c| c.starts_with("coverage."));
    let families: std::collections::BTreeSet<_> = result.summary.iter().map(|s| s.point.clone()).collect();
    outcome(o.passed && families.len() >= 3, format!("{} families; {}", families.len(), o.detail))
}

fn run_theorem2() -> ExperimentResult {
    run_experiment(&config(ExperimentKind::Theorem2Scaling, "")).unwrap()
}

fn lower_bound_scaling(theorem2: &ExperimentResult) -> Outcome {
    let t4 = run_experiment(&config(ExperimentKind::Theorem4Scaling, "")).unwrap();
    let a = verdicts_named(&t4, |c| c.starts_with("theorem4."));
    let b = verdicts_named(theorem2, |c| c.starts_with("theorem2."));
    outcome(a.passed && b.passed, format!("Ḡ: {}; G: {}", a.detail, b.detail))
}

fn determinism() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (kind, sweep) in [
        (ExperimentKind::Dichotomy, "[sweep]\nn = [16, 32]\nexact_n = [16]\nk = [4]\ntail_n = 64\n"),
        (ExperimentKind::UpperBoundCoverage, ""),
        (ExperimentKind::PhaseLemmas, "[sweep]\nk = [4]\ntail_n = 128\n"),
    ] {
        let mut cfg = config(kind, sweep);
        cfg.trials = 200;
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        let (ra, rb) = (output::raw_csv_bytes(&a.raw).unwrap(), output::raw_csv_bytes(&b.raw).unwrap());
        let same = ra == rb;
        // the written summary must be recomputable from the raw rows
        let dir = tempfile::tempdir().unwrap();
        a.write(dir.path()).unwrap();
        let verified = output::load_and_verify(dir.path()).is_ok();
        ok &= same && verified;
        notes.push(format!("{}: {} bytes identical={same} summary-verified={verified}", kind.code(), ra.len()));
    }
    outcome(ok, notes.join("; "))
}

fn main() -> ExitCode {
    println!("acceptance suite");
    let mut all = true;
    let mut report = |idx: usize, name: &str, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "{} {idx:>2}. {name} [{:.1}s] {}",
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    };
    report(1, "metric oracle suite", &mut metric_oracle_suite);
    report(2, "rate floor vs instantaneous rate (exact)", &mut rate_floor_exact);
    report(3, "exponential-race fidelity", &mut exponential_race);
    report(4, "NHPP counts are Poisson", &mut nhpp_counts);
    report(5, "Poisson lower-tail inequality", &mut poisson_tail_inequality);
    report(6, "synchronous/asynchronous dichotomy", &mut dichotomy);
    report(7, "upper-bound coverage", &mut coverage);
    let theorem2 = run_theorem2();
    report(8, "lower-bound scaling", &mut || lower_bound_scaling(&theorem2));
    report(9, "forward 2-push layer moment", &mut || verdicts_named(&theorem2, |c| c.starts_with("lemma3.")));
    report(10, "determinism", &mut determinism);
    if all {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("some criteria failed");
        ExitCode::FAILURE
    }
}
