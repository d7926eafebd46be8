//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Bernoulli, Binomial, Distribution};

use replical::diagnostics::{
    bad_fraction, classify_thresholds, set_divergence, IntervalProfile, PairedSets, ThresholdFlag,
};
use replical::harness::{
    halving_transitions, label_complexity_sweep, ClassSpec, Experiment, ExperimentConfig, PairOutcome,
};
use replical::hypothesis::{
    conditional_true_error, disagreement_coefficient, true_error, DataModel, DataRng, HypothesisClass,
    VersionSpace,
};
use replical::replicable::{build_grid, GridPhase};
use replical::rstat::{offset_agreement_probability, required_sample_size, rstat_answer, OffsetGrid, SqParams};
use replical::shared_randomness::{RandomString, Seed};
use replical::{Algorithm, LearnerOptions};

struct Verdict {
    pass: bool,
    detail: String,
}

fn three_sigma(p: f64, n: usize) -> f64 {
    3.0 * (p * (1.0 - p) / n as f64).sqrt()
}

fn within(limit: Duration, started: Instant) -> (bool, String) {
    let t = started.elapsed();
    (t < limit, format!("{:.2}s (limit {}s)", t.as_secs_f64(), limit.as_secs()))
}

fn master(tag: &str) -> Seed {
    Seed::from_u64(20_240_601).derive(tag, 0)
}

fn c1_theta_exact() -> Verdict {
    let started = Instant::now();
    let mut details = Vec::new();
    let mut pass = true;
    for n in [4usize, 16, 64] {
        let class = HypothesisClass::worst_case(n).unwrap();
        let model = DataModel::realizable(&class, DataModel::uniform_weights(n), 0).unwrap();
        let theta = disagreement_coefficient(&class, &model, 0).unwrap();
        pass &= theta == n as f64;
        details.push(format!("n={n}: theta={theta}"));
    }
    let (fast, t) = within(Duration::from_secs(1), started);
    Verdict {
        pass: pass && fast,
        detail: format!("{}; {t}", details.join(", ")),
    }
}

fn rstat_params() -> SqParams {
    SqParams::new(0.2, 0.1, 0.01).unwrap()
}

fn bernoulli_values(rng: &mut DataRng, p: f64, k: u64) -> Vec<f64> {
    let d = Bernoulli::new(p).unwrap();
    (0..k).map(|_| if d.sample(rng) { 1.0 } else { 0.0 }).collect()
}

fn c2_rstat_tolerance() -> Verdict {
    let started = Instant::now();
    let p = rstat_params();
    let k = required_sample_size(&p).unwrap();
    let seed = master("c2");
    let trials = 2000;
    let mut ok = 0;
    for t in 0..trials {
        let mut rng = seed.derive("data", t).data_rng();
        let mut rs = RandomString::new(seed.derive("b", t));
        let values = bernoulli_values(&mut rng, 0.37, k);
        let answer = rstat_answer(&p, &values, &mut rs, "q").unwrap();
        ok += ((answer - 0.37).abs() <= p.tau) as usize;
    }
    let rate = ok as f64 / trials as f64;
    let (fast, t) = within(Duration::from_secs(30), started);
    Verdict {
        pass: rate >= 0.99 && fast,
        detail: format!("k={k}, within tau {ok}/{trials} = {rate:.4} (need >= 0.99); {t}"),
    }
}

fn c3_rstat_replicability() -> Verdict {
    let started = Instant::now();
    let p = rstat_params();
    let k = required_sample_size(&p).unwrap();
    let seed = master("c3");
    let pairs = 2000;
    let mut disagree = 0;
    for t in 0..pairs {
        let b = seed.derive("b", t);
        let mut answers = [0.0; 2];
        for (side, a) in answers.iter_mut().enumerate() {
            let mut rng = seed.derive("data", 2 * t + side as u64).data_rng();
            let values = bernoulli_values(&mut rng, 0.37, k);
            *a = rstat_answer(&p, &values, &mut RandomString::new(b), "q").unwrap();
        }
        disagree += (answers[0] != answers[1]) as usize;
    }
    let rate = disagree as f64 / pairs as f64;
    let limit = p.rho + three_sigma(p.rho, pairs as usize);
    let (fast, t) = within(Duration::from_secs(60), started);
    Verdict {
        pass: rate <= limit && fast,
        detail: format!("disagreement {disagree}/{pairs} = {rate:.4} (limit {limit:.4}); {t}"),
    }
}

fn c4_micro_oracle() -> Verdict {
    let p = rstat_params();
    let s = p.spacing();
    let (k, q) = (4u64, 0.37f64);
    let pmf: Vec<f64> = (0..=k)
        .map(|j| {
            let c = (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64);
            c * q.powi(j as i32) * (1.0 - q).powi((k - j) as i32)
        })
        .collect();
    let mut exact = 0.0;
    for a in 0..=k {
        for b in 0..=k {
            exact += pmf[a as usize]
                * pmf[b as usize]
                * offset_agreement_probability(a as f64 / k as f64, b as f64 / k as f64, s);
        }
    }
    let seed = master("c4");
    let mut rng = seed.derive("data", 0).data_rng();
    let mut rs = RandomString::new(seed.derive("b", 0));
    let binom = Binomial::new(k, q).unwrap();
    let trials = 200_000;
    let mut agree = 0;
    for _ in 0..trials {
        let grid = OffsetGrid {
            offset: rs.derive_uniform("offset") * s,
            spacing: s,
        };
        let a = binom.sample(&mut rng) as f64 / k as f64;
        let b = binom.sample(&mut rng) as f64 / k as f64;
        agree += (grid.round(a) == grid.round(b)) as usize;
    }
    let mc = agree as f64 / trials as f64;
    Verdict {
        pass: (exact - mc).abs() <= 0.01,
        detail: format!("exhaustive {exact:.5} vs Monte-Carlo {mc:.5} (tolerance 0.01)"),
    }
}

fn thresholds_config(algorithm: Algorithm, eps: f64, delta: f64) -> ExperimentConfig {
    ExperimentConfig {
        class: ClassSpec::Thresholds { domain_size: 128 },
        algorithm,
        epsilon: eps,
        delta,
        ..Default::default()
    }
}

fn single_runs(exp: &Experiment, tag: &str, n: u64) -> Vec<replical::Result<replical::RunResult>> {
    let seed = master(tag);
    (0..n)
        .map(|t| exp.run_single(seed.derive("b", t), seed.derive("data", t)))
        .collect()
}

fn c5_cal() -> Verdict {
    let exp = Experiment::new(thresholds_config(Algorithm::Cal, 0.05, 0.05)).unwrap();
    let runs = single_runs(&exp, "c5", 200);
    let n_max = replical::baselines::realizable_round_bound(0.05);
    let (mut good, mut within_rounds, mut transitions, mut halved, mut failed) = (0, 0, 0, 0, 0);
    for r in &runs {
        match r {
            Ok(r) => {
                good += (true_error(&exp.class, &exp.model, r.hypothesis).unwrap() <= 0.05) as usize;
                within_rounds += (r.rounds <= n_max) as usize;
                let (t, h) = halving_transitions(r);
                transitions += t;
                halved += h;
            }
            Err(_) => failed += 1,
        }
    }
    let halving = halved as f64 / transitions.max(1) as f64;
    Verdict {
        pass: good as f64 >= 0.95 * 200.0 && within_rounds == 200 && halving >= 0.9,
        detail: format!(
            "err<=eps {good}/200; rounds<={n_max} in {within_rounds}/200; halving {halved}/{transitions} = {halving:.3}; failures {failed}"
        ),
    }
}

fn c6_scaling() -> Verdict {
    let started = Instant::now();
    let cfg = ExperimentConfig {
        trials: 100,
        b_seed: master("c6-b"),
        data_seed: master("c6-data"),
        ..thresholds_config(Algorithm::Cal, 0.08, 0.05)
    };
    let table = label_complexity_sweep(&cfg, &[0.08, 0.01], &[Algorithm::Cal, Algorithm::Erm]).unwrap();
    let ratio = |a| table.row(a, 0.01).unwrap().mean_labels / table.row(a, 0.08).unwrap().mean_labels;
    let (cal, erm) = (ratio(Algorithm::Cal), ratio(Algorithm::Erm));
    let complete = table.rows.iter().all(|r| r.completed == 100);
    let (fast, t) = within(Duration::from_secs(120), started);
    Verdict {
        pass: cal <= 2.5 && erm >= 4.0 && complete && fast,
        detail: format!("CAL label growth {cal:.3}x (<= 2.5), ERM {erm:.3}x (>= 4); all runs completed: {complete}; {t}"),
    }
}

struct PairedBatch {
    exp: Experiment,
    outcomes: Vec<PairOutcome>,
    elapsed: Duration,
}

fn paired(cfg: ExperimentConfig) -> PairedBatch {
    let started = Instant::now();
    let exp = Experiment::new(cfg).unwrap();
    let outcomes = exp.run_pairs();
    PairedBatch {
        exp,
        outcomes,
        elapsed: started.elapsed(),
    }
}

fn replical_batch() -> PairedBatch {
    paired(ExperimentConfig {
        rho: Some(0.3),
        trials: 500,
        b_seed: master("c8-b"),
        data_seed: master("c8-data"),
        ..thresholds_config(Algorithm::Replical, 0.05, 0.05)
    })
}

fn c7_target_survival(batch: &PairedBatch) -> Verdict {
    let target = batch.exp.model.target().unwrap();
    let (mut runs, mut kept) = (0, 0);
    for o in &batch.outcomes {
        for r in o.sides.iter().flatten() {
            runs += 1;
            kept += r.survivors.iter().any(|&h| batch.exp.class.same_signature(h, target)) as usize;
        }
    }
    Verdict {
        pass: runs == 1000 && kept == runs,
        detail: format!("target kept in {kept}/{runs} runs (both sides of 500 pairs)"),
    }
}

fn c8_replical(batch: &PairedBatch) -> Verdict {
    let rho = 0.3;
    let pairs = batch.outcomes.len();
    let agree = batch.outcomes.iter().filter(|o| o.agreed()).count();
    let rate = agree as f64 / pairs as f64;
    let floor = 1.0 - rho - three_sigma(rho, pairs);
    let (mut sides, mut good) = (0, 0);
    for o in &batch.outcomes {
        for r in &o.sides {
            sides += 1;
            if let Ok(r) = r {
                good += (true_error(&batch.exp.class, &batch.exp.model, r.hypothesis).unwrap() <= 0.05) as usize;
            }
        }
    }
    let acc = good as f64 / sides as f64;
    let fast = batch.elapsed < Duration::from_secs(600);
    Verdict {
        pass: rate >= floor && acc >= 0.95 && fast,
        detail: format!(
            "agreement {agree}/{pairs} = {rate:.4} (>= {floor:.4}); err<=eps {good}/{sides} = {acc:.4} (>= 0.95); {:.2}s (limit 600s)",
            batch.elapsed.as_secs_f64()
        ),
    }
}

fn c9_replay() -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    let cases = [
        (Algorithm::Cal, None, None),
        (Algorithm::A2, None, Some(0.05)),
        (Algorithm::Replical, Some(0.3), None),
        (Algorithm::Replica2, Some(0.3), Some(0.05)),
    ];
    for (algo, rho, nu) in cases {
        let eps = if nu.is_some() { 0.1 } else { 0.05 };
        let delta = if nu.is_some() { 0.1 } else { 0.05 };
        let exp = Experiment::new(ExperimentConfig {
            rho,
            nu,
            ..thresholds_config(algo, eps, delta)
        })
        .unwrap();
        let seed = master("c9");
        let mut same = 0;
        for t in 0..100 {
            let (b, d) = (seed.derive("b", t), seed.derive("data", t));
            let first = serde_json::to_string(&exp.run_single(b, d).unwrap()).unwrap();
            let second = serde_json::to_string(&exp.run_single(b, d).unwrap()).unwrap();
            same += (first == second) as usize;
        }
        pass &= same == 100;
        details.push(format!("{algo} {same}/100"));
    }
    Verdict {
        pass,
        detail: details.join(", "),
    }
}

/// Literal re-evaluation of the two bad-threshold conditions, straight from
/// the reference errors.
fn reference_flags(errors: &[f64], v_init: f64, spacing: f64, count: usize, rho: f64) -> Vec<(bool, bool)> {
    let bucket = |e: f64| -> Option<i64> {
        if e < v_init {
            Some(-1)
        } else {
            let i = ((e - v_init) / spacing).floor() as i64;
            (i <= count as i64).then_some(i)
        }
    };
    let mut sizes = vec![0.0; count + 1];
    let mut under = 0.0;
    for &e in errors {
        match bucket(e) {
            Some(-1) => under += 1.0,
            Some(i) => sizes[i as usize] += 1.0,
            None => {}
        }
    }
    let size = |i: usize| sizes[i];
    let upto = |i: usize| under + sizes[..=i].iter().sum::<f64>();
    (1..=count)
        .map(|i| {
            let before = upto(i - 1);
            let c1 = size(i) > rho / 30.0 * before;
            let c2 = (1..=count - i).any(|j| size(i + j) >= (j as f64).exp() * before);
            (c1, c2)
        })
        .collect()
}

fn random_class(rng: &mut DataRng) -> HypothesisClass {
    loop {
        let n = rng.random_range(4..=40);
        let size = rng.random_range(2..=512);
        let density: f64 = rng.random_range(0.1..0.9);
        let rows: Vec<Vec<u8>> = (0..size)
            .map(|_| (0..n).map(|_| rng.random_bool(density) as u8).collect())
            .collect();
        let class = HypothesisClass::from_rows(rows).unwrap();
        if class.distinct_signatures() > 1 {
            return class;
        }
    }
}

fn c10_bad_fraction() -> Verdict {
    let seed = master("c10");
    let mut rng = seed.derive("classes", 0).data_rng();
    let opts = LearnerOptions::default();
    let mut worst = [0.0f64; 3];
    let mut mismatches = 0;
    let mut pass = true;
    for c in 0..50u64 {
        let class = random_class(&mut rng);
        let n = class.domain_size();
        let target = rng.random_range(0..class.len());
        let model = DataModel::realizable(&class, DataModel::uniform_weights(n), target).unwrap();
        let theta = disagreement_coefficient(&class, &model, target).unwrap().max(1.0);
        let all = VersionSpace::full(class.len());
        let errors: Vec<f64> = all
            .iter()
            .map(|h| conditional_true_error(&class, &model, &all, h).unwrap())
            .collect();
        for (slot, rho) in [0.05, 0.1, 0.3].into_iter().enumerate() {
            let mut rs = RandomString::new(seed.derive("b", c * 3 + slot as u64));
            let grid = build_grid(theta, rho, class.len(), GridPhase::Realizable, 0.05, 0.0, &mut rs, &opts).unwrap();
            let profile = IntervalProfile::from_errors(grid, errors.clone());
            let flags: Vec<ThresholdFlag> = classify_thresholds(&profile, rho);
            let expected = reference_flags(&errors, grid.v_init, grid.spacing, grid.count, rho);
            let got: Vec<(bool, bool)> = flags.iter().map(|f| (f.crowded, f.steep)).collect();
            mismatches += (got != expected) as usize;
            let fraction = bad_fraction(&profile, rho);
            worst[slot] = worst[slot].max(fraction);
            pass &= fraction <= (40.0 * rho).min(1.0);
        }
    }
    Verdict {
        pass: pass && mismatches == 0,
        detail: format!(
            "max bad fraction rho=0.05: {:.4}, rho=0.1: {:.4}, rho=0.3: {:.4} (bound min(1, 40 rho)); flag mismatches vs literal re-evaluation: {mismatches}",
            worst[0], worst[1], worst[2]
        ),
    }
}

fn c11_a2() -> Verdict {
    let exp = Experiment::new(ExperimentConfig {
        nu: Some(0.05),
        ..thresholds_config(Algorithm::A2, 0.1, 0.1)
    })
    .unwrap();
    let runs = single_runs(&exp, "c11", 200);
    let target = exp.error_target(0.1) + 1e-12;
    let good = runs
        .iter()
        .flatten()
        .filter(|r| true_error(&exp.class, &exp.model, r.hypothesis).unwrap() <= target)
        .count();
    let failed = runs.iter().filter(|r| r.is_err()).count();
    Verdict {
        pass: good as f64 >= 0.9 * 200.0,
        detail: format!("nu={:.4}, err<=nu+eps {good}/200 (>= 180); failures {failed}", exp.nu),
    }
}

fn c12_replica2() -> Verdict {
    let rho = 0.3;
    let batch = paired(ExperimentConfig {
        nu: Some(0.05),
        rho: Some(rho),
        trials: 300,
        b_seed: master("c12-b"),
        data_seed: master("c12-data"),
        ..thresholds_config(Algorithm::Replica2, 0.1, 0.1)
    });
    let exp = &batch.exp;
    let pairs = batch.outcomes.len();
    let agree = batch.outcomes.iter().filter(|o| o.agreed()).count();
    let floor = 1.0 - rho - three_sigma(rho, pairs);
    let target = exp.error_target(0.1) + 1e-12;
    let (mut sides, mut good, mut kept) = (0, 0, 0);
    for o in &batch.outcomes {
        for r in &o.sides {
            sides += 1;
            if let Ok(r) = r {
                good += (true_error(&exp.class, &exp.model, r.hypothesis).unwrap() <= target) as usize;
                kept += exp.best_survived(r) as usize;
            }
        }
    }
    let rate = agree as f64 / pairs as f64;
    let acc = good as f64 / sides as f64;
    let survival = kept as f64 / sides as f64;
    let fast = batch.elapsed < Duration::from_secs(900);
    Verdict {
        pass: acc >= 0.9 && rate >= floor && survival >= 0.9 && fast,
        detail: format!(
            "err<=nu+eps {good}/{sides} = {acc:.4} (>= 0.9); agreement {agree}/{pairs} = {rate:.4} (>= {floor:.4}); h* kept {kept}/{sides} = {survival:.4} (>= 0.9); {:.2}s (limit 900s)",
            batch.elapsed.as_secs_f64()
        ),
    }
}

fn c13_divergence_link(batch: &PairedBatch) -> Verdict {
    let rho: f64 = 0.3;
    let (mut selected, mut agree) = (0, 0);
    for o in &batch.outcomes {
        if let [Ok(a), Ok(b)] = &o.sides {
            // Both sides of a pair share b by construction.
            let sets = PairedSets::from_runs(&batch.exp.class, a, b);
            if set_divergence(&sets).value <= rho / 4.0 {
                selected += 1;
                agree += (a.signature == b.signature) as usize;
            }
        }
    }
    let floor = 1.0 - rho / 4.0 - three_sigma(rho / 4.0, selected.max(1));
    let rate = agree as f64 / selected.max(1) as f64;
    Verdict {
        pass: selected > 0 && rate >= floor,
        detail: format!("{selected} pairs with divergence <= rho/4; agreement {agree}/{selected} = {rate:.4} (>= {floor:.4})"),
    }
}

fn main() {
    let mut failures = 0;
    let mut report = |id: u32, name: &str, v: Verdict| {
        println!("{} criterion {id:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failures += (!v.pass) as usize;
    };
    report(1, "theta exactness", c1_theta_exact());
    report(2, "rstat tolerance", c2_rstat_tolerance());
    report(3, "rstat replicability", c3_rstat_replicability());
    report(4, "rstat micro-oracle", c4_micro_oracle());
    report(5, "CAL correctness and rounds", c5_cal());
    report(6, "active vs passive scaling", c6_scaling());
    let batch = replical_batch();
    report(7, "RepliCAL target survival", c7_target_survival(&batch));
    report(8, "RepliCAL replicability", c8_replical(&batch));
    report(9, "full-determinism replay", c9_replay());
    report(10, "bad-threshold fraction", c10_bad_fraction());
    report(11, "A2 agnostic correctness", c11_a2());
    report(12, "ReplicA2", c12_replica2());
    report(13, "set-divergence link", c13_divergence_link(&batch));
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
