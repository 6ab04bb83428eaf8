use qsearch::ansatz::{ansatz_state, AnsatzParams};
use qsearch::bench::table::{read_csv, write_csv};
use qsearch::bench::{
    curve_from_record, depth_report, run_grover_search, run_trials, run_vqe_search, success_vs_nfev, summarize, sweep,
    Backend, CurveRow, ExperimentConfig, Mode, RunRecord, SweepRow, SweepSpec,
};
use qsearch::grover::grover_success_ideal;
use qsearch::optimize::{BudgetProfile, Method};
use qsearch::oracle::build_oracle;
use qsearch::{BitString, Error};

fn vqe(n: usize) -> ExperimentConfig {
    ExperimentConfig { n, trials: 3, ..Default::default() }
}

#[test]
fn single_qubit_vqe_finds_target() {
    for t in ["0", "1"] {
        let config = ExperimentConfig {
            n: 1,
            target: Some(t.parse().unwrap()),
            exact_objective: true,
            iterations: Some(20),
            ..Default::default()
        };
        let r = run_vqe_search(&config).unwrap();
        assert!(r.success_probability >= 0.99, "{t}: {}", r.success_probability);
        assert_eq!(r.nfev_total, 50 + 2 * 20);
    }
}

#[test]
fn records_are_reproducible() {
    for config in [
        vqe(3),
        ExperimentConfig { backend: Backend::Noisy, ..vqe(3) },
        ExperimentConfig { optimizer: Some(Method::OneEval), ..vqe(4) },
        ExperimentConfig { mode: Mode::Grover, backend: Backend::Noisy, ..vqe(4) },
    ] {
        let a = run_trials(&config).unwrap();
        let b = run_trials(&config).unwrap();
        assert_eq!(a, b);
        let json_a = serde_json::to_value(&a[0]).unwrap();
        let json_b = serde_json::to_value(&b[0]).unwrap();
        assert_eq!(json_a["evaluations"], json_b["evaluations"]);
        assert_eq!(json_a["counts"], json_b["counts"]);
        let back: RunRecord = serde_json::from_value(json_a).unwrap();
        assert_eq!(back, a[0]);
    }
    let a = run_trials(&vqe(3)).unwrap();
    let b = run_trials(&ExperimentConfig { seed: 1, ..vqe(3) }).unwrap();
    assert_ne!(a, b);
}

#[test]
fn record_invariants() {
    for config in [
        vqe(4),
        ExperimentConfig { backend: Backend::Noisy, ..vqe(4) },
        ExperimentConfig { exact_objective: true, ..vqe(4) },
        ExperimentConfig { profile: BudgetProfile::Hardware, iterations: Some(40), ..vqe(4) },
    ] {
        for r in run_trials(&config).unwrap() {
            assert_eq!(r.counts.values().sum::<u64>(), config.shots_final);
            assert!((0.0..=1.0).contains(&r.success_probability));
            let hits = *r.counts.get(&r.target).unwrap_or(&0);
            assert_eq!(r.success_probability, hits as f64 / config.shots_final as f64);
            assert_eq!(r.evaluations.len(), r.nfev_total);
            let min = r.evaluations.iter().map(|e| e.value).fold(f64::INFINITY, f64::min);
            assert_eq!(r.best_expectation, Some(min));
            let exact = build_oracle(&r.target)
                .expectation_exact(&ansatz_state(&AnsatzParams::new(4, r.best_theta.clone()).unwrap()).unwrap())
                .unwrap();
            assert_eq!(r.final_expectation_exact, Some(exact));
            if config.exact_objective {
                assert_eq!(r.best_expectation, Some(exact));
            }
            match config.optimizer() {
                Method::Spsa => assert_eq!(r.nfev_total, 50 + 2 * r.iterations),
                Method::OneEval => assert_eq!(r.nfev_total - r.setup_nfev, r.iterations),
            }
            assert_eq!(r.depth.logical, 9);
        }
    }
}

#[test]
fn targets_follow_their_own_stream() {
    let a = vqe(6).targets().unwrap();
    let b = ExperimentConfig { mode: Mode::Grover, backend: Backend::Noisy, optimizer: Some(Method::OneEval), ..vqe(6) }
        .targets()
        .unwrap();
    assert_eq!(a, b);
    let fixed: BitString = "010".parse().unwrap();
    let c = ExperimentConfig { target: Some(fixed), ..vqe(3) };
    assert!(c.targets().unwrap().iter().all(|t| *t == fixed));
    let records = run_trials(&vqe(6)).unwrap();
    assert_eq!(records.iter().map(|r| r.target).collect::<Vec<_>>(), a);
}

#[test]
fn ideal_grover_matches_closed_form() {
    let shots = 4096u64;
    for n in 2..=8 {
        let config = ExperimentConfig { mode: Mode::Grover, n, trials: 2, shots_final: shots, ..Default::default() };
        let p = grover_success_ideal(n);
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        for r in run_trials(&config).unwrap() {
            assert!((r.success_probability - p).abs() <= 3.0 * sigma + 1e-12, "n={n}");
        }
    }
    let config = ExperimentConfig { mode: Mode::Grover, n: 2, ..Default::default() };
    assert!(run_grover_search(&config).unwrap().success_probability >= 0.999);
}

#[test]
fn validation_errors() {
    let too_big = ExperimentConfig { n: 15, ..Default::default() };
    assert!(matches!(run_trials(&too_big), Err(Error::ResourceLimit(_))));
    let exact_noisy = ExperimentConfig { exact_objective: true, backend: Backend::Noisy, ..Default::default() };
    assert!(matches!(run_trials(&exact_noisy), Err(Error::Config(_))));
    let mismatch = ExperimentConfig { n: 4, target: Some("01".parse().unwrap()), ..Default::default() };
    assert!(matches!(run_trials(&mismatch), Err(Error::Config(_))));
    let grover_as_vqe = ExperimentConfig { mode: Mode::Grover, ..Default::default() };
    assert!(run_vqe_search(&grover_as_vqe).is_err());
}

#[test]
fn sweep_rows_are_ordered_and_round_trip() {
    let spec = SweepSpec {
        ns: vec![2, 3],
        modes: vec![Mode::Vqe, Mode::Grover],
        backends: vec![Backend::Ideal, Backend::Noisy],
        base: ExperimentConfig { trials: 2, shots_eval: 256, shots_final: 512, ..Default::default() },
    };
    let rows = sweep(&spec).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2 * 2);
    let keys: Vec<_> = rows.iter().map(|r| (r.n, r.mode, r.backend, r.trial)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(rows, sweep(&spec).unwrap());

    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("n,mode,backend,trial,target,success_prob,nfev_total,depth\n"));
    assert_eq!(read_csv::<SweepRow, _>(buf.as_slice()).unwrap(), rows);

    let summary = summarize(&rows);
    assert_eq!(summary.len(), 8);
    assert!(summary.iter().all(|s| s.trials == 2));
}

#[test]
fn curve_is_a_replay_of_the_trace() {
    let config = ExperimentConfig { n: 4, trials: 2, exact_objective: true, ..Default::default() };
    let checkpoints = [0.0, 1.0, 5.0, 32.5, 40.0];
    let rows = success_vs_nfev(&config, &checkpoints).unwrap();
    let records = run_trials(&config).unwrap();
    // ⌊√16⌋ = 4: the run spends 130 evaluations, so checkpoint 40 (160) is past the end
    assert_eq!(records[0].nfev_total, 50 + 2 * 40);
    assert_eq!(rows.len(), 2 * 4);
    for (r, chunk) in records.iter().zip(rows.chunks(4)) {
        assert_eq!(chunk, curve_from_record(r, &checkpoints).unwrap().as_slice());
        assert_eq!(chunk.iter().map(|c| c.nfev).collect::<Vec<_>>(), [0, 4, 20, 130]);
        assert!(chunk.iter().all(|c| c.target == r.target && c.seed == r.trial_seed));
    }
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).unwrap();
    assert!(String::from_utf8(buf.clone()).unwrap().starts_with("n,target,seed,nfev_units_sqrtN,nfev,success_prob\n"));
    assert_eq!(read_csv::<CurveRow, _>(buf.as_slice()).unwrap(), rows);
}

#[test]
fn untrained_success_is_near_random_guessing() {
    let n = 5;
    let config = ExperimentConfig { n, trials: 40, shots_final: 1024, ..Default::default() };
    let rows = success_vs_nfev(&config, &[0.0]).unwrap();
    let mean = rows.iter().map(|r| r.success_prob).sum::<f64>() / rows.len() as f64;
    // random real-amplitude states put on average 1/N on any fixed string
    assert!(mean < 4.0 / 32.0, "{mean}");
}

#[test]
fn depth_table() {
    let rows = depth_report(&(1..=12).collect::<Vec<_>>()).unwrap();
    for r in &rows[1..] {
        assert_eq!(r.ansatz_depth, 2 * r.n + 1);
        let k = (std::f64::consts::FRAC_PI_4 * ((1u64 << r.n) as f64).sqrt()).floor().max(1.0) as usize;
        assert_eq!(r.grover_logical_depth, 1 + 8 * k, "n={}", r.n);
    }
    assert_eq!(rows[0].ansatz_depth, 3);
    let r12 = &rows[11];
    assert_eq!(r12.grover_logical_depth, 1 + 8 * 50);
    assert_eq!(r12.ansatz_depth, 25);
    // MCZ over 12 qubits charged 8·11 − 12 = 76 layers in both halves of a round
    assert_eq!(r12.grover_decomposed_depth, 1 + 50 * (2 + 76 + 4 + 76));
    let ratios: Vec<f64> = rows.iter().map(|r| r.grover_logical_depth as f64 / r.ansatz_depth as f64).collect();
    assert!(ratios[4..].windows(2).all(|w| w[1] >= w[0]));
    assert!(rows.iter().all(|r| r.grover_decomposed_depth >= r.grover_logical_depth));
    assert!(depth_report(&[0]).is_err());
}
