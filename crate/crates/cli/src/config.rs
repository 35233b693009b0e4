//! Configuration files, `--set` overrides and their resolution into model types.
//!
//! A configuration is built in layers: a base (the global defaults or a figure
//! recipe), then the user's file, then `--set key=value` overrides. Layers are
//! merged as TOML tables, so every layer only needs the keys it changes.

use std::path::Path;

use multiris::analytics::{AnalyticsParams, UserDensity};
use multiris::channel::SystemParams;
use multiris::geometry::DeploymentModel;
use multiris::linkselect::SubsetSearch;
use multiris::mcsim::{ExperimentConfig, MetricMode, SchemeConfig};
use multiris::phasectl::{Scheme, DEFAULT_QB_BLOCK, DEFAULT_QB_TOL};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Ppp,
    Pcp,
    FixedCount,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeploymentSection {
    pub model: ModelKind,
    /// λ_R, per m².
    pub ris_density: f64,
    pub mean_per_cluster: f64,
    /// Thomas-process scatter; a quarter of the cell radius when absent.
    pub scatter_std_m: Option<f64>,
}

impl Default for DeploymentSection {
    fn default() -> Self {
        Self {
            model: ModelKind::Ppp,
            ris_density: 1e-3,
            mean_per_cluster: 3.0,
            scatter_std_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub control: Scheme,
    pub selected_ris: usize,
    pub subset_search: SubsetSearch,
    pub shortlist: usize,
    pub qb_block: usize,
    pub qb_tol: f64,
    pub metric: MetricMode,
    pub interference: bool,
    /// Schemes run side by side by `compare`.
    pub compare: Vec<Scheme>,
}

impl Default for SchemeSection {
    fn default() -> Self {
        let s = SchemeConfig::default();
        Self {
            control: s.control,
            selected_ris: s.selected_ris,
            subset_search: s.subset_search,
            shortlist: s.shortlist,
            qb_block: DEFAULT_QB_BLOCK,
            qb_tol: DEFAULT_QB_TOL,
            metric: s.metric,
            interference: s.interference,
            compare: vec![Scheme::Optimal, Scheme::Suboptimal, Scheme::Quantized(4), Scheme::Random],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyticsSection {
    pub quad_tol: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Path-loss intercepts; the free-space constant when absent.
    pub c_los: Option<f64>,
    pub c_nlos: Option<f64>,
    /// User density λ_u(ξ) = user_density · ξ^user_density_exponent.
    pub user_density: f64,
    pub user_density_exponent: f64,
    pub support_max_m: Option<f64>,
    /// Thresholds of the analytical density sweep.
    pub thresholds_db: Vec<f64>,
}

impl Default for AnalyticsSection {
    fn default() -> Self {
        Self {
            quad_tol: 1e-5,
            alpha_los: 2.0,
            alpha_nlos: 4.0,
            c_los: None,
            c_nlos: None,
            user_density: 1.0,
            user_density_exponent: 0.0,
            support_max_m: None,
            thresholds_db: vec![0.0, 10.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub thresholds_db: Vec<f64>,
    pub ris_densities: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub rate_cap_db: f64,
    /// Score a single user at this distance instead of every user.
    pub user_distance_m: Option<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            thresholds_db: (-10..=30).step_by(5).map(f64::from).collect(),
            ris_densities: vec![1e-4, 3e-4, 6e-4, 1e-3, 2e-3, 5e-3],
            trials: 1000,
            seed: 1,
            rate_cap_db: -3.0,
            user_distance_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemParams,
    pub deployment: DeploymentSection,
    pub scheme: SchemeSection,
    pub analytics: AnalyticsSection,
    pub sweep: SweepSection,
}

/// Every settable key, by section. Optional keys are listed too, since they
/// are absent from a serialized default.
pub const KEYS: &[(&str, &[&str])] = &[
    (
        "system",
        &[
            "carrier_ghz",
            "bandwidth_mhz",
            "tx_power_dbm",
            "interferer_power_dbm",
            "noise_figure_db",
            "n_bs_antennas",
            "n_ue_antennas",
            "cell_radius_m",
            "path_loss_exponent",
            "gain_bs_dbi",
            "gain_ris_dbi",
            "gain_ue_dbi",
            "nakagami_m_los",
            "nakagami_m_nlos",
            "ris_elements",
            "n_users",
            "h_ut_m",
            "reference_distance_m",
            "tx_pattern",
            "rx_pattern",
            "channel_model",
        ],
    ),
    ("deployment", &["model", "ris_density", "mean_per_cluster", "scatter_std_m"]),
    (
        "scheme",
        &[
            "control",
            "selected_ris",
            "subset_search",
            "shortlist",
            "qb_block",
            "qb_tol",
            "metric",
            "interference",
            "compare",
        ],
    ),
    (
        "analytics",
        &[
            "quad_tol",
            "alpha_los",
            "alpha_nlos",
            "c_los",
            "c_nlos",
            "user_density",
            "user_density_exponent",
            "support_max_m",
            "thresholds_db",
        ],
    ),
    (
        "sweep",
        &["thresholds_db", "ris_densities", "trials", "seed", "rate_cap_db", "user_distance_m"],
    ),
];

/// Maps `section.key` or a bare key to its section and key.
pub fn resolve_key(key: &str) -> Result<(&'static str, &'static str), CliError> {
    let unknown = || CliError::UnknownKey(key.to_string());
    if let Some((section, name)) = key.split_once('.') {
        let (s, keys) = KEYS.iter().find(|(s, _)| *s == section).ok_or_else(unknown)?;
        let k = keys.iter().find(|k| **k == name).ok_or_else(unknown)?;
        return Ok((s, k));
    }
    let hits: Vec<(&'static str, &'static str)> = KEYS
        .iter()
        .flat_map(|(s, keys)| keys.iter().filter(|k| **k == key).map(move |k| (*s, *k)))
        .collect();
    match hits.as_slice() {
        [] => Err(unknown()),
        [one] => Ok(*one),
        many => Err(CliError::AmbiguousKey {
            key: key.to_string(),
            candidates: many.iter().map(|(s, k)| format!("{s}.{k}")).collect::<Vec<_>>().join(", "),
        }),
    }
}

/// Reads a value the way it would appear on the right of `=` in TOML; bare
/// words that are not valid TOML are taken as strings.
pub fn parse_value(raw: &str) -> Value {
    let raw = raw.trim();
    match toml::from_str::<Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn merge(base: &mut Table, layer: Table) {
    for (k, v) in layer {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(l)) => merge(b, l),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn to_table(cfg: &ConfigFile) -> Table {
    Table::try_from(cfg).expect("configuration serializes to a TOML table")
}

/// Accumulates configuration layers.
#[derive(Debug, Clone)]
pub struct ConfigBuilder {
    table: Table,
}

impl ConfigBuilder {
    pub fn new(base: &ConfigFile) -> Self {
        Self { table: to_table(base) }
    }

    /// Layers a TOML file, or the configuration recorded in a JSON run manifest.
    pub fn file(mut self, path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            context: format!("reading {}", path.display()),
            source: e,
        })?;
        let config_err = |message: String| CliError::Config {
            origin: path.display().to_string(),
            message,
        };
        let layer = if path.extension().is_some_and(|e| e == "json") {
            let manifest: serde_json::Value = serde_json::from_str(&text).map_err(|e| config_err(e.to_string()))?;
            let cfg: ConfigFile = serde_json::from_value(manifest.get("config").cloned().unwrap_or(manifest))
                .map_err(|e| config_err(e.to_string()))?;
            to_table(&cfg)
        } else {
            // Parse once into the typed form so that errors carry file positions.
            toml::from_str::<ConfigFile>(&text).map_err(|e| config_err(e.to_string()))?;
            toml::from_str::<Table>(&text).map_err(|e| config_err(e.to_string()))?
        };
        merge(&mut self.table, layer);
        Ok(self)
    }

    /// Applies one `key=value` override.
    pub fn set(mut self, assignment: &str) -> Result<Self, CliError> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::MalformedOverride(assignment.to_string()))?;
        let (section, name) = resolve_key(key.trim())?;
        let mut layer = Table::new();
        let mut inner = Table::new();
        inner.insert(name.to_string(), parse_value(raw));
        layer.insert(section.to_string(), Value::Table(inner));
        let mut next = self.table.clone();
        merge(&mut next, layer);
        ConfigFile::deserialize(Value::Table(next.clone())).map_err(|e| CliError::Config {
            origin: format!("override `{assignment}`"),
            message: e.to_string(),
        })?;
        self.table = next;
        Ok(self)
    }

    pub fn build(self) -> Result<ConfigFile, CliError> {
        ConfigFile::deserialize(Value::Table(self.table)).map_err(|e| CliError::Config {
            origin: "configuration".into(),
            message: e.to_string(),
        })
    }
}

impl ConfigFile {
    pub fn experiment(&self) -> multiris::Result<ExperimentConfig> {
        let system = self.system.resolve()?;
        let deployment = match self.deployment.model {
            ModelKind::Ppp => DeploymentModel::Ppp,
            ModelKind::FixedCount => DeploymentModel::FixedCount,
            ModelKind::Pcp => DeploymentModel::Pcp {
                mean_per_cluster: self.deployment.mean_per_cluster,
                scatter_std: self.deployment.scatter_std_m.unwrap_or(0.25 * system.cell_radius_m),
            },
        };
        let s = &self.scheme;
        let cfg = ExperimentConfig {
            system,
            ris_density: self.deployment.ris_density,
            deployment,
            scheme: SchemeConfig {
                control: s.control,
                selected_ris: s.selected_ris,
                subset_search: s.subset_search,
                shortlist: s.shortlist,
                qb_block: s.qb_block,
                qb_tol: s.qb_tol,
                metric: s.metric,
                interference: s.interference,
            },
            thresholds_db: self.sweep.thresholds_db.clone(),
            n_trials: self.sweep.trials,
            base_seed: self.sweep.seed,
            rate_cap_db: self.sweep.rate_cap_db,
            user_distance: self.sweep.user_distance_m,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn analytics(&self, ris_density: f64) -> multiris::Result<AnalyticsParams> {
        let system = self.system.resolve()?;
        let a = &self.analytics;
        let mut p = AnalyticsParams::from_system(&system, ris_density);
        p.quad_tol = a.quad_tol;
        p.alpha_los = a.alpha_los;
        p.alpha_nlos = a.alpha_nlos;
        if let Some(c) = a.c_los {
            p.c_los = c;
        }
        if let Some(c) = a.c_nlos {
            p.c_nlos = c;
        }
        p.support_max = a.support_max_m;
        p.user_density = if a.user_density_exponent == 0.0 {
            UserDensity::Constant { value: a.user_density }
        } else {
            UserDensity::PowerLaw {
                scale: a.user_density,
                exponent: a.user_density_exponent,
            }
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks that every section resolves.
    pub fn validate(&self) -> multiris::Result<()> {
        self.experiment()?;
        self.analytics(self.deployment.ris_density)?;
        Ok(())
    }

    /// SHA-256 of the canonical TOML rendering.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_table_covers_serialized_defaults() {
        let table = to_table(&ConfigFile::default());
        for (section, body) in &table {
            let keys = KEYS.iter().find(|(s, _)| s == section).unwrap().1;
            for k in body.as_table().unwrap().keys() {
                assert!(keys.contains(&k.as_str()), "{section}.{k} missing from KEYS");
            }
        }
    }

    #[test]
    fn bare_and_qualified_keys_resolve() {
        assert_eq!(resolve_key("ris_density").unwrap(), ("deployment", "ris_density"));
        assert_eq!(resolve_key("sweep.trials").unwrap(), ("sweep", "trials"));
        assert!(matches!(resolve_key("thresholds_db"), Err(CliError::AmbiguousKey { .. })));
        assert!(matches!(resolve_key("bogus"), Err(CliError::UnknownKey(k)) if k == "bogus"));
        assert!(matches!(resolve_key("system.bogus"), Err(CliError::UnknownKey(_))));
    }

    #[test]
    fn values_parse_as_toml_or_fall_back_to_strings() {
        assert_eq!(parse_value("1.5e-4"), Value::Float(1.5e-4));
        assert_eq!(parse_value("12"), Value::Integer(12));
        assert_eq!(parse_value("quantized:4"), Value::String("quantized:4".into()));
        assert_eq!(parse_value("[0.0, 10.0]"), Value::Array(vec![Value::Float(0.0), Value::Float(10.0)]));
    }

    #[test]
    fn overrides_layer_on_top_of_the_base() {
        let cfg = ConfigBuilder::new(&ConfigFile::default())
            .set("ris_density=1.5e-4")
            .unwrap()
            .set("scheme.control=quantized:3")
            .unwrap()
            .set("system.tx_pattern=[20.0, -10.0, 60.0]")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(cfg.deployment.ris_density, 1.5e-4);
        assert_eq!(cfg.scheme.control, Scheme::Quantized(3));
        assert_eq!(cfg.system.tx_pattern, Some([20.0, -10.0, 60.0]));
        assert_eq!(cfg.sweep, SweepSection::default());
    }

    #[test]
    fn integer_literal_is_accepted_for_float_keys() {
        let cfg = ConfigBuilder::new(&ConfigFile::default()).set("rate_cap_db=0").unwrap().build().unwrap();
        assert_eq!(cfg.sweep.rate_cap_db, 0.0);
    }

    #[test]
    fn badly_typed_override_names_the_assignment() {
        let err = ConfigBuilder::new(&ConfigFile::default()).set("trials=many").unwrap_err();
        assert!(err.to_string().contains("trials=many"), "{err}");
    }

    #[test]
    fn hash_tracks_content() {
        let a = ConfigFile::default();
        let mut b = a.clone();
        b.sweep.seed = 2;
        assert_eq!(a.content_hash(), ConfigFile::default().content_hash());
        assert_ne!(a.content_hash(), b.content_hash());
    }
}
