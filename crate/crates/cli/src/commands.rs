//! The five CLI verbs. Each returns `Ok(())` on success and prints its
//! own progress lines to stdout; errors bubble up to `main` for exit-code
//! mapping.

use crate::config::{emit_config, PipelineConfig};
use crate::pipeline::{self, FeatureBuild};
use ehg_core::eval::{
    cells_csv, model_output_labels, run_experiment, summary_csv, ChannelSet, EvalReport,
    Regime, METRIC_NAMES,
};
use ehg_core::features::{feature_names, read_features_csv, write_features_csv};
use ehg_core::record::load_record;
use ehg_core::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// Scans the dataset and writes a per-record manifest CSV.
pub fn cmd_ingest(cfg: &PipelineConfig, out_dir: &Path) -> Result<()> {
    let paths = pipeline::scan_header_paths(&cfg.dataset_root)?;
    let index = pipeline::load_group_index_opt(cfg)?;

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for path in &paths {
        match load_record(path, index.as_ref()) {
            Ok(r) => rows.push(format!(
                "{},{},{},{},{},{}",
                r.name(),
                r.group.as_str(),
                r.sampling_rate_hz(),
                r.n_samples(),
                r.header.n_channels(),
                r.gestation_weeks.map_or(String::new(), |w| w.to_string()),
            )),
            Err(e) => failures.push(format!("{}: {e}", path.display())),
        }
    }
    if !failures.is_empty() {
        return Err(Error::Validation(format!(
            "{} of {} records failed to load:\n  {}",
            failures.len(),
            paths.len(),
            failures.join("\n  ")
        )));
    }
    rows.sort();

    let mut csv = String::from(
        "# ehg-ingest v1\nrecord,group,sampling_rate_hz,n_samples,n_channels,gestation_weeks\n",
    );
    for row in &rows {
        csv.push_str(row);
        csv.push('\n');
    }
    let path = write_file(out_dir, "ingest.csv", &csv)?;
    println!("ingested {} records -> {}", rows.len(), path.display());
    Ok(())
}

/// Extracts the feature matrix and writes `features.csv` (plus
/// `feature_failures.csv` when segments were dropped).
pub fn cmd_features(cfg: &PipelineConfig, out_dir: &Path) -> Result<()> {
    let FeatureBuild {
        dataset,
        failures,
        n_segments,
        n_records,
    } = pipeline::build_features(cfg)?;

    let path = write_file(out_dir, "features.csv", &write_features_csv(&dataset)?)?;
    if !failures.is_empty() {
        let mut csv = String::from("# ehg-feature-failures v1\nrecord,segment_index,error\n");
        for f in &failures {
            let _ = writeln!(csv, "{},{},{}", f.record_name, f.segment_index, f.message);
        }
        let fail_path = write_file(out_dir, "feature_failures.csv", &csv)?;
        println!(
            "dropped {}/{} segments; details -> {}",
            failures.len(),
            n_segments,
            fail_path.display()
        );
    }
    println!(
        "extracted {} rows x {} features from {} records -> {}",
        dataset.n_samples(),
        dataset.n_features(),
        n_records,
        path.display()
    );
    Ok(())
}

/// Per-model AUC in gnuplot-friendly whitespace-delimited form.
fn auc_plot_data(report: &EvalReport) -> String {
    let mut out = String::from("# ehg-auc v1\n# model mean_auc sd_auc\n");
    for s in &report.summaries {
        for label in model_output_labels(s.model) {
            let _ = writeln!(out, "{label} {} {}", s.mean.auc, s.sd.auc);
        }
    }
    out
}

fn summary_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>16} {:>16} {:>16} {:>16} {:>16}",
        "model", "accuracy", "precision", "recall", "f1", "auc"
    );
    for s in &report.summaries {
        for label in model_output_labels(s.model) {
            let mut line = format!("{label:<14}");
            for metric in METRIC_NAMES {
                let cell = format!(
                    "{:.4}±{:.4}",
                    s.mean.get(metric).unwrap(),
                    s.sd.get(metric).unwrap()
                );
                let _ = write!(line, " {cell:>16}");
            }
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

fn run_plan(
    cfg: &PipelineConfig,
    dataset: &ehg_core::classify::LabeledDataset,
    master_seed: u64,
) -> Result<EvalReport> {
    let specs = cfg.build_specs(master_seed)?;
    run_experiment(&cfg.plan(master_seed), dataset, &specs)
}

/// Runs the evaluation protocol on a previously extracted feature CSV.
pub fn cmd_evaluate(
    cfg: &PipelineConfig,
    features_path: &Path,
    seed: Option<u64>,
    out_dir: &Path,
) -> Result<()> {
    let text = std::fs::read_to_string(features_path)?;
    let dataset = read_features_csv(&text)?;

    // reject schema drift before any training happens
    let expected = feature_names(cfg.n_channels(), &cfg.feature_config());
    if dataset.feature_names != expected {
        let detail = dataset
            .feature_names
            .iter()
            .zip(&expected)
            .position(|(a, b)| a != b)
            .map(|i| {
                format!(
                    "first difference at column {}: file has `{}`, config expects `{}`",
                    i, dataset.feature_names[i], expected[i]
                )
            })
            .unwrap_or_else(|| "they differ in trailing columns".into());
        return Err(Error::Validation(format!(
            "feature schema mismatch: file has {} feature columns, configuration expects {}; {}",
            dataset.feature_names.len(),
            expected.len(),
            detail
        )));
    }

    let master_seed = seed.unwrap_or(cfg.master_seed);
    let report = run_plan(cfg, &dataset, master_seed)?;

    write_file(out_dir, "summary.csv", &summary_csv(&report))?;
    write_file(out_dir, "cells.csv", &cells_csv(&report))?;
    write_file(out_dir, "auc_plot.dat", &auc_plot_data(&report))?;
    let mut effective = cfg.clone();
    effective.master_seed = master_seed;
    write_file(out_dir, "effective_config.ini", &emit_config(&effective))?;

    for note in &report.notes {
        println!("note: {note}");
    }
    print!("{}", summary_table(&report));
    println!(
        "wrote summary, per-cell metrics, AUC plot data and the effective config under {}",
        out_dir.display()
    );
    Ok(())
}

fn ablate_cell_dir_name(regime: Regime, klt_on: bool, channels: ChannelSet) -> String {
    format!(
        "{}_klt-{}_{}",
        regime.as_str(),
        if klt_on { "on" } else { "off" },
        match channels {
            ChannelSet::EhgOnly => "ehg_only",
            ChannelSet::EhgPlusToco => "ehg_plus_toco",
        }
    )
}

/// Sweeps the regime × KLT × channel-set grid, re-extracting features and
/// re-running the protocol per cell, then merges all summaries.
pub fn cmd_ablate(cfg: &PipelineConfig, seed: Option<u64>, out_dir: &Path) -> Result<()> {
    let master_seed = seed.unwrap_or(cfg.master_seed);
    let mut merged = String::from("# ehg-ablation v1\n");
    let _ = writeln!(
        merged,
        "# iterations={} k_folds={} master_seed={}",
        cfg.iterations, cfg.folds, master_seed
    );
    merged.push_str("regime,klt,toco,model,metric,mean,sd\n");

    let mut n_cells = 0usize;
    for &regime in &cfg.ablate_regimes {
        for &klt_on in &cfg.ablate_klt {
            for &channels in &cfg.ablate_channels {
                let mut cell_cfg = cfg.clone();
                cell_cfg.regime = regime;
                cell_cfg.klt_enabled = klt_on;
                cell_cfg.channel_set = channels;
                if cell_cfg.dataset_kind == crate::config::DatasetKind::Tpehg
                    && channels == ChannelSet::EhgPlusToco
                {
                    return Err(Error::Validation(
                        "ablate.channels includes ehg_plus_toco but tpehg records have no \
                         TOCO channel; set ablate.channels = ehg_only"
                            .into(),
                    ));
                }

                let build = pipeline::build_features(&cell_cfg)?;
                let report = run_plan(&cell_cfg, &build.dataset, master_seed)?;

                let cell_dir = out_dir.join("ablate").join(ablate_cell_dir_name(
                    regime, klt_on, channels,
                ));
                write_file(&cell_dir, "summary.csv", &summary_csv(&report))?;
                write_file(&cell_dir, "cells.csv", &cells_csv(&report))?;

                let toco = if channels == ChannelSet::EhgPlusToco {
                    "on"
                } else {
                    "off"
                };
                let klt = if klt_on { "on" } else { "off" };
                for s in &report.summaries {
                    for label in model_output_labels(s.model) {
                        for metric in METRIC_NAMES {
                            let _ = writeln!(
                                merged,
                                "{},{klt},{toco},{label},{metric},{},{}",
                                regime.as_str(),
                                s.mean.get(metric).unwrap(),
                                s.sd.get(metric).unwrap()
                            );
                        }
                    }
                }
                n_cells += 1;
                println!(
                    "cell regime={} klt={klt} channels={} -> {}",
                    regime.as_str(),
                    match channels {
                        ChannelSet::EhgOnly => "ehg_only",
                        ChannelSet::EhgPlusToco => "ehg_plus_toco",
                    },
                    cell_dir.display()
                );
            }
        }
    }
    let path = write_file(out_dir, "ablation.csv", &merged)?;
    println!("merged {n_cells} grid cells -> {}", path.display());
    Ok(())
}

/// Rebuilds plot data and a console table from an existing summary CSV.
pub fn cmd_report(summary_path: &Path, out_dir: &Path) -> Result<()> {
    let text = std::fs::read_to_string(summary_path)?;
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some("model,metric,mean,sd") => {}
        _ => {
            return Err(Error::Validation(
                "summary file must start with a `model,metric,mean,sd` header".into(),
            ))
        }
    }

    // (model, metric) -> (mean, sd), models in order of first appearance
    let mut order: Vec<String> = Vec::new();
    let mut table: Vec<(String, String, f64, f64)> = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let mean: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("mean `{}` is not a number", fields[2]),
        })?;
        let sd: f64 = fields[3].parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("sd `{}` is not a number", fields[3]),
        })?;
        if !order.iter().any(|m| m == fields[0]) {
            order.push(fields[0].to_string());
        }
        table.push((fields[0].to_string(), fields[1].to_string(), mean, sd));
    }
    if table.is_empty() {
        return Err(Error::Validation("summary file has no data rows".into()));
    }

    let mut plot = String::from("# ehg-auc v1\n# model mean_auc sd_auc\n");
    let mut printed = String::new();
    let _ = writeln!(
        printed,
        "{:<14} {:>16} {:>16} {:>16} {:>16} {:>16}",
        "model", "accuracy", "precision", "recall", "f1", "auc"
    );
    for model in &order {
        let mut line = format!("{model:<14}");
        for metric in METRIC_NAMES {
            let cell = table
                .iter()
                .find(|(m, met, _, _)| m == model && met == metric)
                .map(|(_, _, mean, sd)| format!("{mean:.4}±{sd:.4}"))
                .unwrap_or_else(|| "-".into());
            let _ = write!(line, " {cell:>16}");
        }
        let _ = writeln!(printed, "{line}");
        if let Some((_, _, mean, sd)) = table
            .iter()
            .find(|(m, met, _, _)| m == model && met == "auc")
        {
            let _ = writeln!(plot, "{model} {mean} {sd}");
        }
    }

    let path = write_file(out_dir, "auc_plot.dat", &plot)?;
    print!("{printed}");
    println!("plot data -> {}", path.display());
    Ok(())
}
