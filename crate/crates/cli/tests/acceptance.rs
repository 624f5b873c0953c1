//! Acceptance suite: one test per criterion, each printing a pass line with
//! its measured quantity. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines on success.

use std::time::Instant;

use astro_float::{BigFloat, Consts, RoundingMode};
use chrono::NaiveDateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use intravol::attention::{chain_pair, ChainedSeries, RawBatch};
use intravol::diagnostics::{simulate, SynthConfig};
use intravol::implied::diff_log_iv;
use intravol::inference::{
    auto_portmanteau, stationary_bootstrap_pvalues, BootstrapConfig,
};
use intravol::model::{build_design, build_designs_common, ols_fit, DesignInputs, ModelSpec};
use intravol::variance::{annualized_volatility, realized_variance};

fn hour(h: i64) -> NaiveDateTime {
    chrono::NaiveDate::from_ymd_opt(2022, 1, 3)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
        + chrono::Duration::hours(h)
}

// ---------------------------------------------------------------------------
// Criterion 1: chaining golden test, exact values, < 1 ms
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_chaining_golden() {
    let earlier = RawBatch::clamp("term", hour(0), vec![50, 60, 70, 80, 100, 40, 30, 5, 25, 5])
        .unwrap();
    let later = RawBatch::clamp("term", hour(7), vec![20, 100, 18, 14, 28, 26, 15, 14, 12, 10])
        .unwrap();
    let expected: [f64; 17] = [
        200.0, 240.0, 280.0, 320.0, 400.0, 160.0, 120.0, 20.0, 100.0, 18.0, 14.0, 28.0, 26.0,
        15.0, 14.0, 12.0, 10.0,
    ];

    let earlier_series = ChainedSeries::from(&earlier);
    let mut best = std::time::Duration::MAX;
    let mut chained = None;
    for _ in 0..10 {
        let start = Instant::now();
        let result = chain_pair(&earlier_series, &later).unwrap();
        best = best.min(start.elapsed());
        chained = Some(result);
    }
    let chained = chained.unwrap();
    assert_eq!(chained.values(), &expected, "chained values must match exactly");
    assert!(
        best.as_micros() < 1000,
        "chaining took {best:?}, budget is 1 ms"
    );
    println!(
        "[PASS] criterion 1: chain_pair reproduces the worked example exactly ({} values, {:?})",
        chained.len(),
        best
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: annualized-volatility conversions within 0.5%
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_annualization() {
    let cases = [(8.0, 54.5), (10.0, 148.4), (12.19, 443.6), (5.88, 18.9)];
    for (ln_rv, quoted) in cases {
        let got = annualized_volatility(ln_rv);
        let relative = (got - quoted).abs() / quoted;
        assert!(
            relative < 0.005,
            "sqrt(exp({ln_rv})) = {got}, quoted {quoted}, rel {relative}"
        );
    }
    println!("[PASS] criterion 2: annualization matches quoted conversions within 0.5%");
}

// ---------------------------------------------------------------------------
// Criterion 3: coefficient recovery on the synthetic generating process
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_coefficient_recovery() {
    let started = Instant::now();
    let datasets = 200usize;
    let bootstrap_reps = 399usize;

    let results: Vec<(usize, usize)> = (0..datasets)
        .into_par_iter()
        .map(|d| {
            let mut config = SynthConfig::default();
            config.seed = 10_000 + d as u64;
            let data = simulate(&config).unwrap();
            let dln_iv = diff_log_iv(&data.ln_iv);
            let inputs = DesignInputs {
                dln_iv: Some(&dln_iv),
                ..data.design_inputs()
            };
            let spec = ModelSpec::numbered(7).unwrap();
            let design = build_design(&data.grid, &inputs, &spec).unwrap();
            let fit = ols_fit(&design).unwrap();
            let bootstrap = stationary_bootstrap_pvalues(
                &design,
                &fit,
                &BootstrapConfig {
                    replications: bootstrap_reps,
                    seed: 77_000 + d as u64,
                    expected_block_length: None,
                },
            )
            .unwrap();

            assert_eq!(
                design.labels,
                data.truth.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>(),
                "design labels must line up with the generating truth"
            );
            let mut covered = 0usize;
            for (j, (_, truth)) in data.truth.iter().enumerate() {
                let err = (fit.coefficients[j] - truth).abs();
                if err <= 3.0 * bootstrap.standard_errors[j] {
                    covered += 1;
                }
            }
            (covered, data.truth.len())
        })
        .collect();

    let covered: usize = results.iter().map(|(c, _)| c).sum();
    let total: usize = results.iter().map(|(_, t)| t).sum();
    let fraction = covered as f64 / total as f64;
    assert!(
        fraction >= 0.95,
        "coverage {fraction:.4} below 0.95 ({covered}/{total})"
    );
    println!(
        "[PASS] criterion 3: {covered}/{total} (dataset, coefficient) pairs within 3 bootstrap SEs \
         ({:.1}%, {:.1?})",
        100.0 * fraction,
        started.elapsed()
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: portmanteau size and power
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_portmanteau_size_and_power() {
    let started = Instant::now();
    let reps = 2000usize;
    let n = 400usize;

    let size_rejections: usize = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(50_000 + r as u64);
            let series: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            usize::from(auto_portmanteau(&series, 30).unwrap().p_value < 0.05)
        })
        .sum();
    let size = size_rejections as f64 / reps as f64;
    assert!(
        (0.03..=0.07).contains(&size),
        "size {size:.4} outside [0.03, 0.07]"
    );

    let power_rejections: usize = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(60_000 + r as u64);
            let mut prev = 0.0f64;
            let series: Vec<f64> = (0..n)
                .map(|_| {
                    let eps: f64 = StandardNormal.sample(&mut rng);
                    prev = 0.5 * prev + eps;
                    prev
                })
                .collect();
            usize::from(auto_portmanteau(&series, 30).unwrap().p_value < 0.05)
        })
        .sum();
    let power = power_rejections as f64 / reps as f64;
    assert!(power > 0.90, "power {power:.4} not above 0.90");

    println!(
        "[PASS] criterion 4: portmanteau size {:.2}% in [3%, 7%], power {:.1}% > 90% ({:.1?})",
        100.0 * size,
        100.0 * power,
        started.elapsed()
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: bootstrap test size for a zero coefficient
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_bootstrap_size() {
    let started = Instant::now();
    let datasets = 500usize;
    let reps = 999usize;

    let rejections: usize = (0..datasets)
        .into_par_iter()
        .map(|d| {
            let mut config = SynthConfig::default();
            config.seed = 90_000 + d as u64;
            config.coefficients.attention[1] = 0.0; // ruble attention truly zero
            let data = simulate(&config).unwrap();
            let dln_iv = diff_log_iv(&data.ln_iv);
            let inputs = DesignInputs {
                dln_iv: Some(&dln_iv),
                ..data.design_inputs()
            };
            let spec = ModelSpec::numbered(7).unwrap();
            let design = build_design(&data.grid, &inputs, &spec).unwrap();
            let fit = ols_fit(&design).unwrap();
            let bootstrap = stationary_bootstrap_pvalues(
                &design,
                &fit,
                &BootstrapConfig {
                    replications: reps,
                    seed: 123_000 + d as u64,
                    expected_block_length: None,
                },
            )
            .unwrap();
            let index = design
                .labels
                .iter()
                .position(|l| l == "ln R[t-1]")
                .expect("ruble attention column");
            usize::from(bootstrap.p_values[index] < 0.05)
        })
        .sum();

    let rate = rejections as f64 / datasets as f64;
    assert!(
        (0.025..=0.08).contains(&rate),
        "rejection rate {rate:.4} outside [0.025, 0.08]"
    );
    println!(
        "[PASS] criterion 5: 5%-level bootstrap rejection rate {:.2}% in [2.5%, 8%] ({:.1?})",
        100.0 * rate,
        started.elapsed()
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: realized variance vs. extended-precision oracle
// ---------------------------------------------------------------------------

/// Eq.-style realized variance evaluated in 256-bit arithmetic.
fn rv_oracle(prices: &[f64], windows_per_day: u32, consts: &mut Consts) -> BigFloat {
    const P: usize = 256;
    const RM: RoundingMode = RoundingMode::ToEven;
    let hundred = BigFloat::from_f64(100.0, P);
    let mut sum = BigFloat::from_f64(0.0, P);
    let mut prev_ln = BigFloat::from_f64(prices[0], P).ln(P, RM, consts);
    for &p in &prices[1..] {
        let ln = BigFloat::from_f64(p, P).ln(P, RM, consts);
        let ret = ln.sub(&prev_ln, P, RM).mul(&hundred, P, RM);
        sum = sum.add(&ret.mul(&ret, P, RM), P, RM);
        prev_ln = ln;
    }
    let factor = BigFloat::from_f64(252.0 * f64::from(windows_per_day), P);
    sum.mul(&factor, P, RM)
}

fn relative_gap(value: f64, oracle: &BigFloat) -> f64 {
    const P: usize = 256;
    const RM: RoundingMode = RoundingMode::ToEven;
    let gap = BigFloat::from_f64(value, P).sub(oracle, P, RM).abs();
    let rel = gap.div(&oracle.abs(), P, RM);
    // The ratio is tiny and positive; a 64-bit read-back is exact enough.
    format!("{rel}").parse::<f64>().unwrap_or(f64::INFINITY)
}

#[test]
fn criterion_6_rv_oracle_equivalence() {
    let started = Instant::now();
    let mut consts = Consts::new().expect("constants cache");
    let mut rng = ChaCha8Rng::seed_from_u64(7_777);
    let mut worst_oracle_gap = 0.0f64;
    let mut worst_invariance_gap = 0.0f64;

    for _ in 0..1000 {
        let mut price = 10.0 * (1.0 + rng.random::<f64>() * 9.0);
        let path: Vec<f64> = (0..48)
            .map(|_| {
                let step: f64 = StandardNormal.sample(&mut rng);
                price *= (0.002 * step).exp();
                price
            })
            .collect();
        let value = realized_variance(&path, 6).unwrap();
        let oracle = rv_oracle(&path, 6, &mut consts);
        worst_oracle_gap = worst_oracle_gap.max(relative_gap(value, &oracle));

        let inverted: Vec<f64> = path.iter().map(|p| 1.0 / p).collect();
        let scaled: Vec<f64> = path.iter().map(|p| p * 17.5).collect();
        let inv = realized_variance(&inverted, 6).unwrap();
        let sc = realized_variance(&scaled, 6).unwrap();
        worst_invariance_gap = worst_invariance_gap
            .max((inv - value).abs() / value)
            .max((sc - value).abs() / value);
    }

    assert!(
        worst_oracle_gap < 1e-10,
        "worst oracle gap {worst_oracle_gap:e} not below 1e-10"
    );
    assert!(
        worst_invariance_gap < 1e-12,
        "worst invariance gap {worst_invariance_gap:e} not below 1e-12"
    );
    println!(
        "[PASS] criterion 6: 1000 paths, worst oracle gap {worst_oracle_gap:.2e} < 1e-10, \
         worst inversion/scaling gap {worst_invariance_gap:.2e} < 1e-12 ({:.1?})",
        started.elapsed()
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: nested R-squared monotonicity with common rows
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_nesting_monotonicity() {
    let config = SynthConfig {
        seed: 4242,
        ..SynthConfig::default()
    };
    let data = simulate(&config).unwrap();
    let dln_iv = diff_log_iv(&data.ln_iv);
    let inputs = DesignInputs {
        dln_iv: Some(&dln_iv),
        ..data.design_inputs()
    };
    let specs = ModelSpec::all_numbered();
    let designs = build_designs_common(&data.grid, &inputs, &specs).unwrap();
    let r2: Vec<f64> = designs.iter().map(|d| ols_fit(d).unwrap().r_squared).collect();

    for chain in [vec![1usize, 2, 4, 7], vec![1, 3, 4], vec![1, 5, 6, 7]] {
        for pair in chain.windows(2) {
            let (small, large) = (pair[0] - 1, pair[1] - 1);
            assert!(
                r2[large] >= r2[small],
                "R^2(Model {}) = {} < R^2(Model {}) = {}",
                pair[1],
                r2[large],
                pair[0],
                r2[small]
            );
        }
    }
    println!(
        "[PASS] criterion 7: R^2 nondecreasing along 1->2->4->7, 1->3->4, 1->5->6->7 \
         (Model 1 {:.3} .. Model 7 {:.3})",
        r2[0], r2[6]
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: byte-identical report bundles at full replication count
// ---------------------------------------------------------------------------

fn collect_files(dir: &std::path::Path, into: &mut Vec<std::path::PathBuf>) {
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect_files(&path, into);
        } else {
            into.push(path);
        }
    }
}

#[test]
fn criterion_8_pipeline_determinism() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("bundle");
    let synth = SynthConfig {
        seed: 2022,
        ..SynthConfig::default()
    };
    intravol_cli::synth::write_synthetic_bundle(&synth, &bundle).unwrap();

    let mut config = intravol_cli::PipelineConfig::load(&bundle.join("pipeline.json")).unwrap();
    assert_eq!(config.inference.replications, 4999);

    let out_a = dir.path().join("out_a");
    let out_b = dir.path().join("out_b");
    config.output_dir = out_a.clone();
    intravol_cli::run_pipeline(&config, true).unwrap();
    config.output_dir = out_b.clone();
    intravol_cli::run_pipeline(&config, true).unwrap();

    let mut files_a = Vec::new();
    let mut files_b = Vec::new();
    collect_files(&out_a, &mut files_a);
    collect_files(&out_b, &mut files_b);
    assert!(!files_a.is_empty());
    assert_eq!(files_a.len(), files_b.len());
    for (a, b) in files_a.iter().zip(&files_b) {
        assert_eq!(
            a.strip_prefix(&out_a).unwrap(),
            b.strip_prefix(&out_b).unwrap(),
            "bundle layouts differ"
        );
        let bytes_a = std::fs::read(a).unwrap();
        let bytes_b = std::fs::read(b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{} differs between runs", a.display());
    }
    println!(
        "[PASS] criterion 8: two pipeline runs at 4999 replications produced {} byte-identical \
         files ({:.1?})",
        files_a.len(),
        started.elapsed()
    );
}
