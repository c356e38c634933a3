//! Acceptance suite: one test per release gate.
//!
//! The first nine tests are self-contained numerical and protocol checks.
//! The remaining five reproduce the reference classification figures and
//! need the public TPEHGT / TPEHG recordings on disk; they are ignored by
//! default and run with
//!
//! ```text
//! EHG_DATA_ROOT=/path/to/data cargo test -p ehg-core --test acceptance -- --ignored
//! ```
//!
//! where the root holds `tpehgt/` and `tpehg/` directories of WFDB records,
//! each with an `annotations.csv` interval manifest where the annotated
//! regime is exercised.

use ehg_core::classify::{LabeledDataset, ModelKind, ModelSpec, RowProvenance};
use ehg_core::eigen::symmetric_eigen;
use ehg_core::eval::{
    balanced_subsample, cells_csv, confusion, metrics, roc_auc, run_experiment, stratified_kfold,
    summary_csv, ChannelSet, EvalReport, ExperimentPlan, ModelSummary, Regime,
};
use ehg_core::features::{extract_batch, FeatureConfig, KltParams};
use ehg_core::klt;
use ehg_core::preprocess::{
    apply_zero_phase, design_butterworth_bandpass, segment_annotated, segment_fixed, WindowKind,
    DEFAULT_FILTER_ORDER, DEFAULT_HIGH_CUT_HZ, DEFAULT_LOW_CUT_HZ,
};
use ehg_core::record::{is_filtered_label, load_annotations, load_record, role_of_label, ChannelRole, Group};
use ehg_core::rng::{derive_seed, SplitMix64};
use ehg_core::spectral::{hz_to_mel, mel_to_hz};
use ehg_core::wavelet::{dwt_db8, idwt_db8};
use ndarray::{array, Array1, Array2};
use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;

#[test]
fn bandpass_edges_at_minus_three_db_and_dc_rejected() {
    let filter = design_butterworth_bandpass(
        DEFAULT_FILTER_ORDER,
        DEFAULT_LOW_CUT_HZ,
        DEFAULT_HIGH_CUT_HZ,
        20.0,
    )
    .unwrap();
    for edge in [DEFAULT_LOW_CUT_HZ, DEFAULT_HIGH_CUT_HZ] {
        let db = 20.0 * filter.magnitude_at(edge).log10();
        assert!(
            (db + 3.0).abs() <= 0.3,
            "gain at {edge} Hz is {db:.3} dB, expected -3 dB within 0.3 dB"
        );
    }
    let dc = 20.0 * filter.magnitude_at(0.0).log10();
    assert!(dc <= -40.0, "DC gain {dc:.1} dB, need at least 40 dB rejection");
}

#[test]
fn klt_with_full_subspace_reproduces_the_input() {
    let mut rng = SplitMix64::new(0x1D);
    for case in 0..100usize {
        let n = 256 + 7 * case;
        let x: Vec<f64> = (0..n).map(|_| rng.next_gaussian() + 0.25).collect();
        // an infinite jump threshold never splits the spectrum, so every
        // component is retained and the transform must be the identity
        let y = klt::denoise(&x, klt::DEFAULT_LAG, f64::INFINITY).unwrap();
        let worst = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "case {case}: max deviation {worst:e}");
    }
}

#[test]
fn eigensolver_is_orthonormal_and_reconstructs_on_random_matrices() {
    let basis = symmetric_eigen(&array![[2.0, 1.0], [1.0, 2.0]]).unwrap();
    assert!((basis.eigenvalues[0] - 1.0).abs() < 1e-12);
    assert!((basis.eigenvalues[1] - 3.0).abs() < 1e-12);

    let mut rng = SplitMix64::new(0xE16E);
    for case in 0..1000usize {
        let n = 2 + case % 49;
        let mut m = Array2::<f64>::zeros((n, n));
        for r in 0..n {
            for c in 0..=r {
                let v = rng.next_gaussian();
                m[[r, c]] = v;
                m[[c, r]] = v;
            }
        }
        let basis = symmetric_eigen(&m).unwrap();
        let q = &basis.eigenvectors;
        let gram = q.t().dot(q);
        let mut ortho = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((gram[[i, j]] - want).abs());
            }
        }
        assert!(ortho < 1e-10, "case {case} (n={n}): orthonormality error {ortho:e}");
        let lambda = Array2::from_diag(&Array1::from(basis.eigenvalues.clone()));
        let residual = &m.dot(q) - &q.dot(&lambda);
        let worst = residual.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(worst < 1e-8, "case {case} (n={n}): residual {worst:e}");
    }
}

#[test]
fn db8_preserves_energy_and_reconstructs_exactly() {
    let mut rng = SplitMix64::new(0xDB8);
    for case in 0..100usize {
        let x: Vec<f64> = (0..1024).map(|_| rng.next_gaussian()).collect();
        let dec = dwt_db8(&x, 5).unwrap();
        let coeff_energy: f64 = dec
            .details
            .iter()
            .flatten()
            .chain(dec.approx.iter())
            .map(|&c| c * c)
            .sum();
        let signal_energy: f64 = x.iter().map(|&v| v * v).sum();
        assert!(
            (coeff_energy - signal_energy).abs() < 1e-8,
            "case {case}: energy drifted by {:e}",
            (coeff_energy - signal_energy).abs()
        );
        let rec = idwt_db8(&dec);
        assert_eq!(rec.len(), x.len());
        let worst = x
            .iter()
            .zip(&rec)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "case {case}: reconstruction error {worst:e}");
    }
}

#[test]
fn mel_map_hits_the_anchor_and_inverts() {
    let anchor = hz_to_mel(700.0).unwrap();
    assert!(
        (anchor - 781.17).abs() <= 0.01,
        "hz_to_mel(700) = {anchor}, expected 781.17 within 0.01"
    );
    for i in 0..=1000 {
        let hz = i as f64 * 10.0;
        let back = mel_to_hz(hz_to_mel(hz).unwrap()).unwrap();
        assert!(
            (back - hz).abs() < 1e-9,
            "round trip at {hz} Hz came back as {back}"
        );
    }
}

#[test]
fn confusion_metrics_match_hand_counts_and_auc_matches_brute_force() {
    // 5 positives, 3 negatives; predictions give tp=3 fn=2 fp=1 tn=2
    let y_true = [1u8, 1, 1, 1, 1, 0, 0, 0];
    let y_pred = [1u8, 1, 1, 0, 0, 1, 0, 0];
    let counts = confusion(&y_true, &y_pred).unwrap();
    let m = metrics(&counts, 0.5).unwrap();
    assert!((m.accuracy - 0.625).abs() < 1e-12, "accuracy {}", m.accuracy);
    assert!((m.precision - 0.75).abs() < 1e-12, "precision {}", m.precision);
    assert!((m.recall - 0.6).abs() < 1e-12, "recall {}", m.recall);
    assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12, "f1 {}", m.f1);

    let mut rng = SplitMix64::new(0x5C0E5);
    for case in 0..1000usize {
        let n = 5 + rng.next_below(40);
        // coarse score grid so ties are frequent
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.next_below(9) as f64 / 4.0 - 1.0)
            .collect();
        let mut labels: Vec<u8> = (0..n).map(|_| rng.next_below(2) as u8).collect();
        labels[0] = 1;
        labels[1] = 0;
        let fast = roc_auc(&scores, &labels).unwrap();
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &si) in scores.iter().enumerate() {
            if labels[i] == 0 {
                continue;
            }
            for (j, &sj) in scores.iter().enumerate() {
                if labels[j] == 1 {
                    continue;
                }
                pairs += 1.0;
                if si > sj {
                    wins += 1.0;
                } else if si == sj {
                    wins += 0.5;
                }
            }
        }
        let brute = wins / pairs;
        assert!(
            (fast - brute).abs() < 1e-12,
            "case {case}: rank AUC {fast} vs pairwise {brute}"
        );
    }
}

#[test]
fn klt_denoising_raises_correlation_with_the_clean_signal() {
    let fs = 20.0;
    let n = 1200;
    let clean: Vec<f64> = (0..n)
        .map(|i| (2.0 * PI * 0.5 * i as f64 / fs).sin())
        .collect();
    let signal_power = 0.5;
    let mut improved = 0;
    for seed in 0..100u64 {
        let snr_db = (seed % 11) as f64;
        let sigma = (signal_power / 10f64.powf(snr_db / 10.0)).sqrt();
        let mut rng = SplitMix64::new(1000 + seed);
        let noisy: Vec<f64> = clean
            .iter()
            .map(|&c| c + sigma * rng.next_gaussian())
            .collect();
        let denoised =
            klt::denoise(&noisy, klt::DEFAULT_LAG, klt::DEFAULT_JUMP_THRESHOLD).unwrap();
        if pearson(&denoised, &clean) > pearson(&noisy, &clean) {
            improved += 1;
        }
    }
    assert!(
        improved >= 95,
        "denoising raised the correlation in only {improved} of 100 trials"
    );
}

#[test]
fn experiments_are_deterministic_and_label_permutation_scores_at_chance() {
    let dataset = blob_dataset(30, 2, 4, 0xA11CE, false);
    let specs: Vec<ModelSpec> = ModelKind::ALL
        .iter()
        .map(|&kind| ModelSpec::new(kind, 5))
        .collect();
    let plan = ExperimentPlan {
        n_iterations: 2,
        k_folds: 5,
        master_seed: 11,
        regime: Regime::Fixed,
        channel_set: ChannelSet::EhgOnly,
        klt_enabled: false,
        grouped_by_record: false,
    };
    let first = run_experiment(&plan, &dataset, &specs).unwrap();
    let second = run_experiment(&plan, &dataset, &specs).unwrap();
    assert_eq!(
        summary_csv(&first),
        summary_csv(&second),
        "same plan and seed must give byte-identical summaries"
    );
    assert_eq!(cells_csv(&first), cells_csv(&second));

    // permuted-label null, averaged over independent datasets so one
    // unlucky cross-validation draw cannot dominate
    const REPS: u64 = 3;
    let mut auc_sums = [0.0f64; ModelKind::ALL.len()];
    for rep in 0..REPS {
        let null = blob_dataset(50, 2, 4, 0xD00D + rep, true);
        let null_plan = ExperimentPlan {
            n_iterations: 3,
            master_seed: 100 + rep,
            ..plan.clone()
        };
        let report = run_experiment(&null_plan, &null, &specs).unwrap();
        for (slot, &kind) in auc_sums.iter_mut().zip(ModelKind::ALL.iter()) {
            *slot += summary_of(&report, kind).mean.auc;
        }
    }
    for (&kind, &sum) in ModelKind::ALL.iter().zip(&auc_sums) {
        let mean = sum / REPS as f64;
        assert!(
            (0.4..=0.6).contains(&mean),
            "{} scores {mean:.3} mean AUC on permuted labels, outside 0.5 +/- 0.1",
            kind.as_str()
        );
    }
}

#[test]
fn no_train_test_leakage_across_a_full_synthetic_run() {
    let dataset = blob_dataset(25, 4, 4, 0xBEEF, false);
    let specs = [
        ModelSpec::new(ModelKind::Qda, 3),
        ModelSpec::new(ModelKind::Dt, 3),
    ];
    let plan = ExperimentPlan {
        n_iterations: 20,
        k_folds: 5,
        master_seed: 33,
        regime: Regime::Fixed,
        channel_set: ChannelSet::EhgOnly,
        klt_enabled: false,
        grouped_by_record: false,
    };
    // the runner audits every fold internally and fails on any overlap
    let report = run_experiment(&plan, &dataset, &specs).unwrap();
    assert_eq!(
        report.cells.len(),
        plan.n_iterations * plan.k_folds * specs.len()
    );

    // independently re-derive every split from the seeding contract and
    // check disjointness and coverage cell by cell
    for iteration in 0..plan.n_iterations {
        let mut rng = SplitMix64::new(derive_seed(plan.master_seed, iteration as u64));
        let rows = balanced_subsample(&dataset.y, &mut rng).unwrap();
        let labels: Vec<u8> = rows.iter().map(|&r| dataset.y[r]).collect();
        let folds = stratified_kfold(&labels, plan.k_folds, &mut rng).unwrap();
        assert_eq!(folds.len(), plan.k_folds);
        let mut covered = BTreeSet::new();
        for (k, fold) in folds.iter().enumerate() {
            let test: BTreeSet<usize> = fold.iter().map(|&p| rows[p]).collect();
            let train: BTreeSet<usize> = (0..rows.len())
                .filter(|p| !fold.contains(p))
                .map(|p| rows[p])
                .collect();
            assert!(
                train.is_disjoint(&test),
                "iteration {iteration} fold {k}: a row sits on both sides of the split"
            );
            assert_eq!(
                train.len() + test.len(),
                rows.len(),
                "iteration {iteration} fold {k}: split loses rows"
            );
            covered.extend(test);
        }
        assert_eq!(
            covered.len(),
            rows.len(),
            "iteration {iteration}: folds do not cover the whole subsample"
        );
    }

    // record-grouped folding runs under the same audit
    let grouped = ExperimentPlan {
        grouped_by_record: true,
        ..plan
    };
    run_experiment(&grouped, &dataset, &specs[..1]).unwrap();
}

// ---------------------------------------------------------------------------
// Dataset-gated checks against the reference figures.
// ---------------------------------------------------------------------------

#[test]
#[ignore = "needs the TPEHGT recordings under $EHG_DATA_ROOT/tpehgt"]
fn tpehgt_annotated_intervals_reach_reference_accuracy() {
    let data = load_corpus("tpehgt", true, None, true);
    let report = evaluate(
        &data,
        &[ModelKind::Qda, ModelKind::Rf, ModelKind::Gb],
        reference_plan(ChannelSet::EhgPlusToco, Regime::Annotated, true),
    );
    let qda_acc = 100.0 * summary_of(&report, ModelKind::Qda).mean.accuracy;
    assert!(
        (qda_acc - 94.00).abs() <= 4.0,
        "QDA accuracy {qda_acc:.2} strays from the 94.00 reference by more than 4 points"
    );
    for kind in [ModelKind::Rf, ModelKind::Gb] {
        let auc = summary_of(&report, kind).mean.auc;
        assert!(
            auc >= 0.94,
            "{} AUC {auc:.4} fell below the 0.94 reference floor",
            kind.as_str()
        );
    }
}

#[test]
#[ignore = "needs the TPEHGT recordings under $EHG_DATA_ROOT/tpehgt"]
fn tpehgt_klt_denoising_lifts_qda_accuracy() {
    let denoised = load_corpus("tpehgt", true, None, true);
    let raw = load_corpus("tpehgt", true, None, false);
    let with = evaluate(
        &denoised,
        &[ModelKind::Qda],
        reference_plan(ChannelSet::EhgPlusToco, Regime::Annotated, true),
    );
    let without = evaluate(
        &raw,
        &[ModelKind::Qda],
        reference_plan(ChannelSet::EhgPlusToco, Regime::Annotated, false),
    );
    let acc_on = 100.0 * summary_of(&with, ModelKind::Qda).mean.accuracy;
    let acc_off = 100.0 * summary_of(&without, ModelKind::Qda).mean.accuracy;
    assert!(
        acc_on - acc_off >= 2.0,
        "denoising moved QDA accuracy {acc_off:.2} -> {acc_on:.2}, \
         expected at least +2 points (reference 89.05 -> 94.00)"
    );
}

#[test]
#[ignore = "needs the TPEHGT recordings under $EHG_DATA_ROOT/tpehgt"]
fn tpehgt_fixed_windows_with_toco_reach_reference_accuracy() {
    let data = load_corpus("tpehgt", true, Some(180.0), true);
    let report = evaluate(
        &data,
        &[ModelKind::Rf, ModelKind::Gb],
        reference_plan(ChannelSet::EhgPlusToco, Regime::Fixed, true),
    );
    let best_acc = 100.0 * best_metric(&report, |s| s.mean.accuracy);
    let best_auc = best_metric(&report, |s| s.mean.auc);
    assert!(best_acc >= 93.0, "best ensemble accuracy {best_acc:.2} below 93");
    assert!(best_auc >= 0.97, "best ensemble AUC {best_auc:.4} below 0.97");
    let gb = summary_of(&report, ModelKind::Gb);
    let gb_acc = 100.0 * gb.mean.accuracy;
    assert!(
        (gb_acc - 96.70).abs() <= 4.0,
        "boosted-ensemble accuracy {gb_acc:.2} strays from 96.70 by more than 4 points"
    );
    assert!(
        (gb.mean.auc - 0.9969).abs() <= 0.03,
        "boosted-ensemble AUC {:.4} strays from 0.9969 by more than 0.03",
        gb.mean.auc
    );
}

#[test]
#[ignore = "needs the TPEHGT recordings under $EHG_DATA_ROOT/tpehgt"]
fn tpehgt_fixed_windows_without_toco_stay_close_to_toco_results() {
    let with_toco = load_corpus("tpehgt", true, Some(180.0), true);
    let ehg_only = load_corpus("tpehgt", false, Some(180.0), true);
    let report_with = evaluate(
        &with_toco,
        &[ModelKind::Rf, ModelKind::Gb],
        reference_plan(ChannelSet::EhgPlusToco, Regime::Fixed, true),
    );
    let report_without = evaluate(
        &ehg_only,
        &[ModelKind::Rf, ModelKind::Gb],
        reference_plan(ChannelSet::EhgOnly, Regime::Fixed, true),
    );
    let best_with = 100.0 * best_metric(&report_with, |s| s.mean.accuracy);
    let best_without = 100.0 * best_metric(&report_without, |s| s.mean.accuracy);
    assert!(
        (best_without - 96.82).abs() <= 4.0,
        "EHG-only best accuracy {best_without:.2} strays from 96.82 by more than 4 points"
    );
    assert!(
        (best_with - best_without).abs() <= 3.0,
        "accuracy gap between TOCO ({best_with:.2}) and EHG-only ({best_without:.2}) \
         exceeds 3 points"
    );
}

#[test]
#[ignore = "needs the TPEHG recordings under $EHG_DATA_ROOT/tpehg"]
fn tpehg_fixed_windows_reach_reference_auc() {
    let data = load_corpus("tpehg", false, Some(180.0), true);
    let report = evaluate(
        &data,
        &[ModelKind::Rf, ModelKind::Gb],
        reference_plan(ChannelSet::EhgOnly, Regime::Fixed, true),
    );
    let best_acc = 100.0 * best_metric(&report, |s| s.mean.accuracy);
    let best_auc = best_metric(&report, |s| s.mean.auc);
    assert!(
        best_auc >= 0.90,
        "best ensemble AUC {best_auc:.4} below the 0.90 reference floor"
    );
    assert!(
        best_acc >= 84.0,
        "best ensemble accuracy {best_acc:.2} below the 84-point reference floor"
    );
}

// ---------------------------------------------------------------------------
// Helpers.
// ---------------------------------------------------------------------------

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}

/// Two gaussian blobs separated along every axis, one record per subject
/// with `segs` rows each. With `permute_labels` the labels are shuffled
/// across rows afterwards, which severs the feature-label link while
/// keeping the class counts balanced.
fn blob_dataset(
    records_per_class: usize,
    segs: usize,
    d: usize,
    seed: u64,
    permute_labels: bool,
) -> LabeledDataset {
    let n = 2 * records_per_class * segs;
    let mut rng = SplitMix64::new(seed);
    let mut x = Array2::<f64>::zeros((n, d));
    let mut y = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    let mut row = 0;
    for record in 0..2 * records_per_class {
        let label = (record % 2) as u8;
        let shift = if label == 1 { 0.8 } else { -0.8 };
        for seg in 0..segs {
            for col in 0..d {
                x[[row, col]] = rng.next_gaussian() + shift;
            }
            y.push(label);
            provenance.push(RowProvenance {
                record_name: format!("r{record:03}"),
                segment_index: seg,
                window_kind: WindowKind::Fixed,
            });
            row += 1;
        }
    }
    if permute_labels {
        rng.shuffle(&mut y);
    }
    let feature_names = (0..d).map(|i| format!("f{i}")).collect();
    let dataset = LabeledDataset {
        x,
        y,
        provenance,
        feature_names,
    };
    dataset.validate().unwrap();
    dataset
}

fn summary_of(report: &EvalReport, kind: ModelKind) -> &ModelSummary {
    report
        .summaries
        .iter()
        .find(|s| s.model == kind)
        .expect("summary for every requested model")
}

fn best_metric(report: &EvalReport, pick: impl Fn(&ModelSummary) -> f64) -> f64 {
    report
        .summaries
        .iter()
        .map(pick)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn reference_plan(channel_set: ChannelSet, regime: Regime, klt_enabled: bool) -> ExperimentPlan {
    ExperimentPlan {
        n_iterations: 20,
        k_folds: 5,
        master_seed: 42,
        regime,
        channel_set,
        klt_enabled,
        grouped_by_record: false,
    }
}

fn evaluate(dataset: &LabeledDataset, kinds: &[ModelKind], plan: ExperimentPlan) -> EvalReport {
    let specs: Vec<ModelSpec> = kinds
        .iter()
        .map(|&kind| ModelSpec::new(kind, plan.master_seed))
        .collect();
    run_experiment(&plan, dataset, &specs).expect("experiment run")
}

fn dataset_dir(name: &str) -> PathBuf {
    let root = std::env::var("EHG_DATA_ROOT").unwrap_or_else(|_| {
        panic!("set EHG_DATA_ROOT to a directory containing the {name} dataset")
    });
    PathBuf::from(root).join(name)
}

/// Loads one dataset the same way the pipeline does: unfiltered EHG
/// channels (plus TOCO on request) band-passed at 0.08-5 Hz, cut into
/// annotated intervals or fixed windows, then run through the feature
/// extractor with or without subspace denoising.
fn load_corpus(
    dataset: &str,
    include_toco: bool,
    fixed_window: Option<f64>,
    klt_on: bool,
) -> LabeledDataset {
    let dir = dataset_dir(dataset);
    let mut headers: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", dir.display()))
        .filter_map(|entry| {
            let path = entry.expect("directory entry").path();
            (path.extension().is_some_and(|x| x == "hea")).then_some(path)
        })
        .collect();
    headers.sort();
    assert!(!headers.is_empty(), "no .hea records under {}", dir.display());

    let annotations = if fixed_window.is_some() {
        Vec::new()
    } else {
        let path = dir.join("annotations.csv");
        let text = std::fs::read_to_string(&path).unwrap_or_else(|e| {
            panic!(
                "{} is required for the annotated regime (export the .atr interval \
                 annotations to CSV first): {e}",
                path.display()
            )
        });
        load_annotations(&text).expect("interval manifest")
    };

    let mut segments = Vec::new();
    let mut fs_hz = 0.0;
    for path in &headers {
        let record =
            load_record(path, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        if record.group == Group::NonPregnant {
            continue;
        }
        let keep: Vec<usize> = record
            .header
            .signals
            .iter()
            .enumerate()
            .filter_map(|(i, sig)| {
                if is_filtered_label(&sig.label) {
                    return None;
                }
                match role_of_label(&sig.label) {
                    ChannelRole::Ehg => Some(i),
                    ChannelRole::Toco => include_toco.then_some(i),
                }
            })
            .collect();
        let mut record = record.select_channels(&keep).expect("channel subset");
        fs_hz = record.sampling_rate_hz();
        let filter = design_butterworth_bandpass(
            DEFAULT_FILTER_ORDER,
            DEFAULT_LOW_CUT_HZ,
            DEFAULT_HIGH_CUT_HZ,
            fs_hz,
        )
        .expect("band-pass design");
        for channel in &mut record.signals {
            *channel = apply_zero_phase(&filter, channel).expect("zero-phase filtering");
        }
        let mut segs = match fixed_window {
            Some(seconds) => segment_fixed(&record, seconds).expect("fixed windows"),
            None => segment_annotated(&record, &annotations).expect("annotated windows"),
        };
        segments.append(&mut segs);
    }

    let cfg = FeatureConfig {
        klt: klt_on.then_some(KltParams::default()),
        ..FeatureConfig::default()
    };
    extract_batch(&segments, fs_hz, &cfg).expect("feature extraction")
}
