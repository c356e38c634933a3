//! Pipeline configuration: a small INI dialect with a fixed schema.
//!
//! Every key has a built-in default, so an empty file is a valid
//! configuration. Unknown sections or keys are hard errors; a typo can
//! never silently fall back to a default. Later assignments of the same
//! key override earlier ones. The `EHG_DATA_ROOT` environment variable,
//! when set and non-empty, overrides `dataset.root`. Paths named by the
//! loaded configuration must exist at load time.

use ehg_core::classify::{ModelKind, ModelSpec};
use ehg_core::eval::{ChannelSet, ExperimentPlan, Regime};
use ehg_core::features::{FeatureConfig, KltParams};
use ehg_core::{Error, Result};
use std::path::{Path, PathBuf};

pub const DATA_ROOT_ENV: &str = "EHG_DATA_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Tpehgt,
    Tpehg,
}

impl DatasetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::Tpehgt => "tpehgt",
            DatasetKind::Tpehg => "tpehg",
        }
    }

    fn parse(s: &str) -> Option<DatasetKind> {
        match s.to_ascii_lowercase().as_str() {
            "tpehgt" => Some(DatasetKind::Tpehgt),
            "tpehg" => Some(DatasetKind::Tpehg),
            _ => None,
        }
    }
}

/// Whether KLT denoising runs on whole-record channels before
/// segmentation or on each segment independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KltScope {
    Segment,
    Record,
}

impl KltScope {
    pub fn as_str(self) -> &'static str {
        match self {
            KltScope::Segment => "segment",
            KltScope::Record => "record",
        }
    }

    fn parse(s: &str) -> Option<KltScope> {
        match s.to_ascii_lowercase().as_str() {
            "segment" => Some(KltScope::Segment),
            "record" => Some(KltScope::Record),
            _ => None,
        }
    }
}

fn channel_set_key(set: ChannelSet) -> &'static str {
    match set {
        ChannelSet::EhgOnly => "ehg_only",
        ChannelSet::EhgPlusToco => "ehg_plus_toco",
    }
}

fn parse_channel_set(s: &str) -> Option<ChannelSet> {
    match s.to_ascii_lowercase().as_str() {
        "ehg_only" => Some(ChannelSet::EhgOnly),
        "ehg_plus_toco" => Some(ChannelSet::EhgPlusToco),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dataset_root: PathBuf,
    pub dataset_kind: DatasetKind,
    /// Optional record→group CSV; falls back to `<root>/groups.csv` if present.
    pub group_index: Option<PathBuf>,
    /// Optional interval manifest; falls back to `<root>/annotations.csv`.
    pub annotations: Option<PathBuf>,
    pub regime: Regime,
    pub window_seconds: f64,
    pub channel_set: ChannelSet,
    pub klt_enabled: bool,
    pub klt_lag: usize,
    pub klt_jump_threshold: f64,
    pub klt_scope: KltScope,
    pub psd_seg_len: usize,
    pub psd_overlap: f64,
    pub pa_low_hz: f64,
    pub pa_high_hz: f64,
    pub mfcc_n_coeffs: usize,
    pub mfcc_n_filters: usize,
    pub mfcc_frame_len: usize,
    pub mfcc_hop: usize,
    pub wavelet_levels: usize,
    pub models: Vec<ModelKind>,
    /// `[models.<kind>]` overrides in file order, raw values; applied via
    /// `ModelSpec::set_param` when specs are built.
    pub model_overrides: Vec<(ModelKind, String, String)>,
    pub iterations: usize,
    pub folds: usize,
    pub master_seed: u64,
    pub grouped_by_record: bool,
    pub output_dir: PathBuf,
    pub ablate_regimes: Vec<Regime>,
    pub ablate_klt: Vec<bool>,
    pub ablate_channels: Vec<ChannelSet>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dataset_root: PathBuf::from("."),
            dataset_kind: DatasetKind::Tpehgt,
            group_index: None,
            annotations: None,
            regime: Regime::Fixed,
            window_seconds: 180.0,
            channel_set: ChannelSet::EhgOnly,
            klt_enabled: true,
            klt_lag: 50,
            klt_jump_threshold: 0.10,
            klt_scope: KltScope::Segment,
            psd_seg_len: 256,
            psd_overlap: 0.5,
            pa_low_hz: 0.08,
            pa_high_hz: 5.0,
            mfcc_n_coeffs: 20,
            mfcc_n_filters: 26,
            mfcc_frame_len: 256,
            mfcc_hop: 128,
            wavelet_levels: 5,
            models: ModelKind::ALL.to_vec(),
            model_overrides: Vec::new(),
            iterations: 20,
            folds: 5,
            master_seed: 42,
            grouped_by_record: false,
            output_dir: PathBuf::from("out"),
            ablate_regimes: vec![Regime::Annotated, Regime::Fixed],
            ablate_klt: vec![true, false],
            ablate_channels: vec![ChannelSet::EhgOnly, ChannelSet::EhgPlusToco],
        }
    }
}

impl PipelineConfig {
    /// Feature extraction parameters; KLT appears here only when it runs
    /// per segment (record-scope denoising happens before segmentation).
    pub fn feature_config(&self) -> FeatureConfig {
        FeatureConfig {
            klt: (self.klt_enabled && self.klt_scope == KltScope::Segment).then_some(KltParams {
                lag: self.klt_lag,
                jump_threshold: self.klt_jump_threshold,
            }),
            psd_seg_len: self.psd_seg_len,
            psd_overlap: self.psd_overlap,
            pa_band: (self.pa_low_hz, self.pa_high_hz),
            mfcc_n_coeffs: self.mfcc_n_coeffs,
            mfcc_n_filters: self.mfcc_n_filters,
            mfcc_frame_len: self.mfcc_frame_len,
            mfcc_hop: self.mfcc_hop,
            wavelet_levels: self.wavelet_levels,
        }
    }

    /// Channels a conforming record contributes: three EHG leads, plus
    /// the TOCO lead where the dataset records one.
    pub fn n_channels(&self) -> usize {
        match (self.dataset_kind, self.channel_set) {
            (DatasetKind::Tpehgt, ChannelSet::EhgPlusToco) => 4,
            _ => 3,
        }
    }

    pub fn build_specs(&self, master_seed: u64) -> Result<Vec<ModelSpec>> {
        let mut specs = Vec::with_capacity(self.models.len());
        for &kind in &self.models {
            let mut spec = ModelSpec::new(kind, master_seed);
            for (k, key, value) in &self.model_overrides {
                if *k == kind {
                    spec.set_param(key, value)?;
                }
            }
            specs.push(spec);
        }
        Ok(specs)
    }

    pub fn plan(&self, master_seed: u64) -> ExperimentPlan {
        ExperimentPlan {
            n_iterations: self.iterations,
            k_folds: self.folds,
            master_seed,
            regime: self.regime,
            channel_set: self.channel_set,
            klt_enabled: self.klt_enabled,
            grouped_by_record: self.grouped_by_record,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.window_seconds.is_finite() && self.window_seconds > 0.0) {
            return Err(Error::Validation(format!(
                "segmentation.window_seconds must be positive, got {}",
                self.window_seconds
            )));
        }
        if self.klt_lag == 0 {
            return Err(Error::Validation("klt.lag must be at least 1".into()));
        }
        if !(self.klt_jump_threshold.is_finite() && self.klt_jump_threshold > 0.0) {
            return Err(Error::Validation(format!(
                "klt.jump_threshold must be positive, got {}",
                self.klt_jump_threshold
            )));
        }
        if self.psd_seg_len < 2 {
            return Err(Error::Validation("psd.seg_len must be at least 2".into()));
        }
        if !(0.0..1.0).contains(&self.psd_overlap) {
            return Err(Error::Validation(format!(
                "psd.overlap must lie in [0, 1), got {}",
                self.psd_overlap
            )));
        }
        if !(self.pa_low_hz.is_finite() && self.pa_high_hz.is_finite())
            || self.pa_low_hz < 0.0
            || self.pa_low_hz >= self.pa_high_hz
        {
            return Err(Error::Validation(format!(
                "pa band [{}, {}] must satisfy 0 <= f_low < f_high",
                self.pa_low_hz, self.pa_high_hz
            )));
        }
        if self.mfcc_n_coeffs == 0
            || self.mfcc_n_filters == 0
            || self.mfcc_frame_len == 0
            || self.mfcc_hop == 0
        {
            return Err(Error::Validation("mfcc parameters must be nonzero".into()));
        }
        if self.mfcc_n_coeffs > self.mfcc_n_filters {
            return Err(Error::Validation(format!(
                "mfcc.n_coeffs ({}) cannot exceed mfcc.n_filters ({})",
                self.mfcc_n_coeffs, self.mfcc_n_filters
            )));
        }
        if self.wavelet_levels == 0 || self.wavelet_levels > 20 {
            return Err(Error::Validation(format!(
                "wavelet.levels must lie in 1..=20, got {}",
                self.wavelet_levels
            )));
        }
        if self.models.is_empty() {
            return Err(Error::Validation("models.list must not be empty".into()));
        }
        let mut seen = self.models.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.models.len() {
            return Err(Error::Validation("models.list repeats a model".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Validation(
                "evaluation.iterations must be at least 1".into(),
            ));
        }
        if self.folds < 2 {
            return Err(Error::Validation(
                "evaluation.folds must be at least 2".into(),
            ));
        }
        if self.dataset_kind == DatasetKind::Tpehg && self.channel_set == ChannelSet::EhgPlusToco {
            return Err(Error::Validation(
                "the tpehg records carry no TOCO channel; use channels.set = ehg_only".into(),
            ));
        }
        if self.ablate_regimes.is_empty()
            || self.ablate_klt.is_empty()
            || self.ablate_channels.is_empty()
        {
            return Err(Error::Validation(
                "ablate axes must each list at least one value".into(),
            ));
        }
        Ok(())
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_bool(value: &str, line: usize, key: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "on" | "1" | "yes" => Ok(true),
        "false" | "off" | "0" | "no" => Ok(false),
        _ => Err(parse_err(line, format!("`{key}` expects a boolean, got `{value}`"))),
    }
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize, key: &str, what: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("`{key}` expects {what}, got `{value}`")))
}

fn parse_list<T>(
    value: &str,
    line: usize,
    key: &str,
    mut one: impl FnMut(&str) -> Option<T>,
) -> Result<Vec<T>>
where
    T: PartialEq,
{
    let mut out = Vec::new();
    for item in value.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(parse_err(line, format!("`{key}` has an empty list entry")));
        }
        match one(item) {
            Some(v) => {
                if out.contains(&v) {
                    return Err(parse_err(line, format!("`{key}` repeats `{item}`")));
                }
                out.push(v);
            }
            None => {
                return Err(parse_err(
                    line,
                    format!("`{key}` has an unrecognized entry `{item}`"),
                ))
            }
        }
    }
    if out.is_empty() {
        return Err(parse_err(line, format!("`{key}` must not be empty")));
    }
    Ok(out)
}

/// Loads a configuration file, applies the `EHG_DATA_ROOT` override and
/// checks that referenced paths exist.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path)?;
    load_config_text(&text)
}

/// Parses configuration text over the built-in defaults.
pub fn load_config_text(text: &str) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let mut section = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(line_no, "unterminated section header"))?
                .trim();
            if name.is_empty() {
                return Err(parse_err(line_no, "empty section name"));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, "expected `key = value`"))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(parse_err(line_no, "empty key"));
        }
        if section.is_empty() {
            return Err(parse_err(line_no, "key assigned outside any section"));
        }
        apply_key(&mut cfg, &section, key, value, line_no)?;
    }

    if let Ok(root) = std::env::var(DATA_ROOT_ENV) {
        if !root.is_empty() {
            cfg.dataset_root = PathBuf::from(root);
        }
    }
    cfg.validate()?;
    check_paths(&cfg)?;
    Ok(cfg)
}

fn apply_key(
    cfg: &mut PipelineConfig,
    section: &str,
    key: &str,
    value: &str,
    line: usize,
) -> Result<()> {
    let full = format!("{section}.{key}");
    let unknown = || parse_err(line, format!("unknown config key `{full}`"));
    let bad_value = |what: &str| parse_err(line, format!("`{full}` expects {what}, got `{value}`"));

    if let Some(kind_name) = section.strip_prefix("models.") {
        let kind = ModelKind::parse(kind_name)
            .ok_or_else(|| parse_err(line, format!("unknown model section `{section}`")))?;
        // probe the assignment now so a bad key or value fails with a
        // line number instead of surfacing mid-run
        ModelSpec::new(kind, 0)
            .set_param(key, value)
            .map_err(|e| parse_err(line, e.to_string()))?;
        cfg.model_overrides
            .retain(|(k, ov_key, _)| !(*k == kind && ov_key == key));
        cfg.model_overrides
            .push((kind, key.to_string(), value.to_string()));
        return Ok(());
    }

    match (section, key) {
        ("dataset", "root") => cfg.dataset_root = PathBuf::from(value),
        ("dataset", "kind") => {
            cfg.dataset_kind = DatasetKind::parse(value).ok_or_else(|| bad_value("tpehgt or tpehg"))?
        }
        ("dataset", "index") => {
            cfg.group_index = (!value.is_empty()).then(|| PathBuf::from(value))
        }
        ("dataset", "annotations") => {
            cfg.annotations = (!value.is_empty()).then(|| PathBuf::from(value))
        }
        ("segmentation", "mode") => {
            cfg.regime = Regime::parse(value).ok_or_else(|| bad_value("annotated or fixed"))?
        }
        ("segmentation", "window_seconds") => {
            cfg.window_seconds = parse_num(value, line, &full, "a number of seconds")?
        }
        ("channels", "set") => {
            cfg.channel_set =
                parse_channel_set(value).ok_or_else(|| bad_value("ehg_only or ehg_plus_toco"))?
        }
        ("klt", "enabled") => cfg.klt_enabled = parse_bool(value, line, &full)?,
        ("klt", "lag") => cfg.klt_lag = parse_num(value, line, &full, "an integer")?,
        ("klt", "jump_threshold") => {
            cfg.klt_jump_threshold = parse_num(value, line, &full, "a number")?
        }
        ("klt", "scope") => {
            cfg.klt_scope = KltScope::parse(value).ok_or_else(|| bad_value("segment or record"))?
        }
        ("psd", "seg_len") => cfg.psd_seg_len = parse_num(value, line, &full, "an integer")?,
        ("psd", "overlap") => cfg.psd_overlap = parse_num(value, line, &full, "a fraction")?,
        ("pa", "f_low") => cfg.pa_low_hz = parse_num(value, line, &full, "a frequency in Hz")?,
        ("pa", "f_high") => cfg.pa_high_hz = parse_num(value, line, &full, "a frequency in Hz")?,
        ("mfcc", "n_coeffs") => cfg.mfcc_n_coeffs = parse_num(value, line, &full, "an integer")?,
        ("mfcc", "n_filters") => cfg.mfcc_n_filters = parse_num(value, line, &full, "an integer")?,
        ("mfcc", "frame_len") => cfg.mfcc_frame_len = parse_num(value, line, &full, "an integer")?,
        ("mfcc", "hop") => cfg.mfcc_hop = parse_num(value, line, &full, "an integer")?,
        ("wavelet", "levels") => cfg.wavelet_levels = parse_num(value, line, &full, "an integer")?,
        ("models", "list") => cfg.models = parse_list(value, line, &full, ModelKind::parse)?,
        ("evaluation", "iterations") => {
            cfg.iterations = parse_num(value, line, &full, "an integer")?
        }
        ("evaluation", "folds") => cfg.folds = parse_num(value, line, &full, "an integer")?,
        ("evaluation", "master_seed") => {
            cfg.master_seed = parse_num(value, line, &full, "an unsigned integer")?
        }
        ("evaluation", "grouped_by_record") => {
            cfg.grouped_by_record = parse_bool(value, line, &full)?
        }
        ("output", "dir") => cfg.output_dir = PathBuf::from(value),
        ("ablate", "regimes") => {
            cfg.ablate_regimes = parse_list(value, line, &full, Regime::parse)?
        }
        ("ablate", "klt") => {
            cfg.ablate_klt = parse_list(value, line, &full, |s| {
                parse_bool(s, line, &full).ok()
            })?
        }
        ("ablate", "channels") => {
            cfg.ablate_channels = parse_list(value, line, &full, parse_channel_set)?
        }
        _ => return Err(unknown()),
    }
    Ok(())
}

fn check_paths(cfg: &PipelineConfig) -> Result<()> {
    if !cfg.dataset_root.is_dir() {
        return Err(Error::Validation(format!(
            "dataset root `{}` is not a directory (set dataset.root or {DATA_ROOT_ENV})",
            cfg.dataset_root.display()
        )));
    }
    for (label, path) in [
        ("dataset.index", &cfg.group_index),
        ("dataset.annotations", &cfg.annotations),
    ] {
        if let Some(p) = path {
            if !p.is_file() {
                return Err(Error::Validation(format!(
                    "{label} `{}` does not exist",
                    p.display()
                )));
            }
        }
    }
    Ok(())
}

/// Renders every effective setting back to config-file text. Loading the
/// output reproduces the same configuration.
pub fn emit_config(cfg: &PipelineConfig) -> String {
    fn on_off(b: bool) -> &'static str {
        if b {
            "on"
        } else {
            "off"
        }
    }
    fn join<T, F: Fn(&T) -> &str>(items: &[T], f: F) -> String {
        items.iter().map(f).collect::<Vec<_>>().join(",")
    }

    let mut out = String::from("# ehg pipeline configuration (effective settings)\n");
    out.push_str(&format!(
        "\n[dataset]\nroot = {}\nkind = {}\nindex = {}\nannotations = {}\n",
        cfg.dataset_root.display(),
        cfg.dataset_kind.as_str(),
        cfg.group_index.as_deref().map_or(String::new(), |p| p.display().to_string()),
        cfg.annotations.as_deref().map_or(String::new(), |p| p.display().to_string()),
    ));
    out.push_str(&format!(
        "\n[segmentation]\nmode = {}\nwindow_seconds = {}\n",
        cfg.regime.as_str(),
        cfg.window_seconds
    ));
    out.push_str(&format!(
        "\n[channels]\nset = {}\n",
        channel_set_key(cfg.channel_set)
    ));
    out.push_str(&format!(
        "\n[klt]\nenabled = {}\nlag = {}\njump_threshold = {}\nscope = {}\n",
        cfg.klt_enabled,
        cfg.klt_lag,
        cfg.klt_jump_threshold,
        cfg.klt_scope.as_str()
    ));
    out.push_str(&format!(
        "\n[psd]\nseg_len = {}\noverlap = {}\n",
        cfg.psd_seg_len, cfg.psd_overlap
    ));
    out.push_str(&format!(
        "\n[pa]\nf_low = {}\nf_high = {}\n",
        cfg.pa_low_hz, cfg.pa_high_hz
    ));
    out.push_str(&format!(
        "\n[mfcc]\nn_coeffs = {}\nn_filters = {}\nframe_len = {}\nhop = {}\n",
        cfg.mfcc_n_coeffs, cfg.mfcc_n_filters, cfg.mfcc_frame_len, cfg.mfcc_hop
    ));
    out.push_str(&format!("\n[wavelet]\nlevels = {}\n", cfg.wavelet_levels));
    out.push_str(&format!(
        "\n[models]\nlist = {}\n",
        join(&cfg.models, |k| k.as_str())
    ));
    for &kind in &cfg.models {
        let overrides: Vec<_> = cfg
            .model_overrides
            .iter()
            .filter(|(k, _, _)| *k == kind)
            .collect();
        if !overrides.is_empty() {
            out.push_str(&format!("\n[models.{}]\n", kind.as_str()));
            for (_, key, value) in overrides {
                out.push_str(&format!("{key} = {value}\n"));
            }
        }
    }
    out.push_str(&format!(
        "\n[evaluation]\niterations = {}\nfolds = {}\nmaster_seed = {}\ngrouped_by_record = {}\n",
        cfg.iterations, cfg.folds, cfg.master_seed, cfg.grouped_by_record
    ));
    out.push_str(&format!("\n[output]\ndir = {}\n", cfg.output_dir.display()));
    out.push_str(&format!(
        "\n[ablate]\nregimes = {}\nklt = {}\nchannels = {}\n",
        join(&cfg.ablate_regimes, |r| r.as_str()),
        join(&cfg.ablate_klt, |&b| on_off(b)),
        join(&cfg.ablate_channels, |&c| channel_set_key(c)),
    ));
    out
}
