use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::ant::AntConfig;
use crate::error::{check_positive, Error, Result};
use crate::retail::RetailConfig;
use crate::team::TeamConfig;

/// Parameters of one of the built-in models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelConfig {
    AntForaging(AntConfig),
    Retail(RetailConfig),
    TeamComms(TeamConfig),
}

impl ModelConfig {
    pub const NAMES: [&'static str; 3] = ["ant_foraging", "retail", "team_comms"];

    pub fn name(&self) -> &'static str {
        match self {
            ModelConfig::AntForaging(_) => "ant_foraging",
            ModelConfig::Retail(_) => "retail",
            ModelConfig::TeamComms(_) => "team_comms",
        }
    }

    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "ant_foraging" => ModelConfig::AntForaging(AntConfig::default()),
            "retail" => ModelConfig::Retail(RetailConfig::default()),
            "team_comms" => ModelConfig::TeamComms(TeamConfig::default()),
            _ => return None,
        })
    }

    fn keys(name: &str) -> &'static [&'static str] {
        match name {
            "ant_foraging" => AntConfig::KEYS,
            "retail" => RetailConfig::KEYS,
            _ => TeamConfig::KEYS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::AntForaging(c) => c.validate(),
            ModelConfig::Retail(c) => c.validate(),
            ModelConfig::TeamComms(c) => c.validate(),
        }
    }
}

/// A complete, validated parameterisation of one model and one run plan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub ticks: u64,
    pub replications: u32,
    pub metric_interval: u64,
    #[serde(flatten)]
    pub model: ModelConfig,
}

const COMMON_KEYS: [&str; 6] = ["name", "model", "seed", "ticks", "replications", "metric_interval"];

impl Scenario {
    pub const DEFAULT_TICKS: u64 = 1000;
    pub const DEFAULT_INTERVAL: u64 = 100;

    pub fn new(name: &str, model: ModelConfig) -> Self {
        Self {
            name: name.to_string(),
            seed: 0,
            ticks: Self::DEFAULT_TICKS,
            replications: 1,
            metric_interval: Self::DEFAULT_INTERVAL,
            model,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("ticks", self.ticks)?;
        check_positive("replications", self.replications)?;
        check_positive("metric_interval", self.metric_interval)?;
        self.model.validate()
    }

    /// The scenario as a JSON document that [`load_scenario`] accepts.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenarios serialize")
    }
}

fn serde_error(e: serde_json::Error) -> Error {
    let msg = e.to_string();
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        if let Some(end) = rest.find('`') {
            return Error::UnknownKey(rest[..end].to_string());
        }
    }
    Error::Config(msg)
}

fn take_u64(doc: &mut Map<String, Value>, key: &str, default: u64) -> Result<u64> {
    match doc.remove(key) {
        None => Ok(default),
        Some(v) => v
            .as_u64()
            .ok_or_else(|| Error::range(key, v, "a non-negative integer")),
    }
}

/// Parses and validates a scenario document, filling documented defaults.
pub fn load_scenario(document: &str) -> Result<Scenario> {
    let value: Value = serde_json::from_str(document).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
    let Value::Object(mut doc) = value else {
        return Err(Error::Config("scenario must be a JSON object".into()));
    };
    let model = match doc.remove("model") {
        None => return Err(Error::MissingKey("model".into())),
        Some(Value::String(s)) if ModelConfig::NAMES.contains(&s.as_str()) => s,
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown model {other}, expected one of {}",
                ModelConfig::NAMES.join(", ")
            )))
        }
    };
    let keys = ModelConfig::keys(&model);
    if let Some(k) = doc
        .keys()
        .find(|k| !COMMON_KEYS.contains(&k.as_str()) && !keys.contains(&k.as_str()))
    {
        return Err(Error::UnknownKey(k.clone()));
    }
    let name = match doc.remove("name") {
        None => model.clone(),
        Some(Value::String(s)) if !s.is_empty() => s,
        Some(other) => return Err(Error::Config(format!("`name` must be a non-empty string, got {other}"))),
    };
    let seed = take_u64(&mut doc, "seed", 0)?;
    let ticks = take_u64(&mut doc, "ticks", Scenario::DEFAULT_TICKS)?;
    let replications = take_u64(&mut doc, "replications", 1)?;
    let metric_interval = take_u64(&mut doc, "metric_interval", Scenario::DEFAULT_INTERVAL)?;
    let replications = u32::try_from(replications).map_err(|_| Error::range("replications", replications, "<= 4294967295"))?;
    doc.insert("model".into(), Value::String(model));
    let model: ModelConfig = serde_json::from_value(Value::Object(doc)).map_err(serde_error)?;
    let scenario = Scenario {
        name,
        seed,
        ticks,
        replications,
        metric_interval,
        model,
    };
    scenario.validate()?;
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document_gets_defaults() {
        let s = load_scenario(r#"{"model": "ant_foraging"}"#).unwrap();
        assert_eq!(s.name, "ant_foraging");
        assert_eq!((s.seed, s.ticks, s.replications, s.metric_interval), (0, 1000, 1, 100));
        assert_eq!(s.model, ModelConfig::AntForaging(AntConfig::default()));
    }

    #[test]
    fn range_errors_name_field_and_bound() {
        let e = load_scenario(r#"{"model": "ant_foraging", "evaporation_rate": 1.5}"#).unwrap_err();
        match &e {
            Error::Range { field, bound, .. } => {
                assert_eq!(field, "evaporation_rate");
                assert_eq!(bound, "[0,1]");
            }
            other => panic!("{other:?}"),
        }
        assert!(e.to_string().contains("[0,1]"));
        assert!(matches!(
            load_scenario(r#"{"model": "retail", "replications": 0}"#),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn unknown_keys_are_named() {
        let e = load_scenario(r#"{"model": "ant_foraging", "stratgy": "mass_recruitment"}"#).unwrap_err();
        assert_eq!(e, Error::UnknownKey("stratgy".into()));
        let e = load_scenario(r#"{"model": "ant_foraging", "grid": {"width": 5, "heigth": 5}}"#).unwrap_err();
        assert_eq!(e, Error::UnknownKey("heigth".into()));
        let e = load_scenario(r#"{"model": "retail", "capacity": 2}"#).unwrap_err();
        assert_eq!(e, Error::UnknownKey("capacity".into()));
    }

    #[test]
    fn model_is_required_and_known() {
        assert_eq!(load_scenario(r#"{"seed": 3}"#), Err(Error::MissingKey("model".into())));
        assert!(matches!(load_scenario(r#"{"model": "bees"}"#), Err(Error::Config(_))));
        assert!(matches!(load_scenario("[1, 2]"), Err(Error::Config(_))));
        assert!(matches!(load_scenario("{"), Err(Error::Config(_))));
    }

    #[test]
    fn round_trips_through_json() {
        let doc = r#"{
            "name": "gated", "model": "team_comms", "seed": 9, "ticks": 200,
            "replications": 4, "policy": "gatewayed", "liaison_capacity": 1,
            "teams": [{"size": 3, "liaison": 0}, {"size": 4, "liaison": 1}],
            "facts": {"universe": 10, "cross_team": 5, "share_window": 3}
        }"#;
        let s = load_scenario(doc).unwrap();
        assert_eq!(load_scenario(&s.to_json()).unwrap(), s);
        let ModelConfig::TeamComms(t) = &s.model else { panic!() };
        assert_eq!(t.tasks, crate::team::TaskSpec::default());
    }
}
