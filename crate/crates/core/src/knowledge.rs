//! Expert knowledge about which variables carry heteroskedastic noise and
//! what their noise variance depends on.
//!
//! File form is a JSON object keyed by variable name:
//!
//! ```json
//! {"X": {"parent": "Z"}, "Y": "sampling_index", "Z": "none"}
//! ```
//!
//! `false` and `null` are accepted as synonyms for `"none"`.

use crate::error::{Error, Result};
use serde_json::{Map, Value};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HeteroSpec {
    NoneDeclared,
    SamplingIndex,
    /// Noise variance is a function of the named observed variable.
    ParentDriven(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpertKnowledge {
    entries: BTreeMap<String, HeteroSpec>,
}

impl ExpertKnowledge {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, spec: HeteroSpec) -> Self {
        self.insert(var, spec);
        self
    }

    pub fn insert(&mut self, var: impl Into<String>, spec: HeteroSpec) {
        self.entries.insert(var.into(), spec);
    }

    /// Declaration for `var`; undeclared variables are homoskedastic.
    pub fn get(&self, var: &str) -> &HeteroSpec {
        self.entries.get(var).unwrap_or(&HeteroSpec::NoneDeclared)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &HeteroSpec)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.values().all(|s| matches!(s, HeteroSpec::NoneDeclared))
    }

    /// Checks that every key and every driver names a variable in `names`.
    pub fn validate(&self, names: &[String]) -> Result<()> {
        for (key, spec) in &self.entries {
            if !names.contains(key) {
                return Err(Error::Knowledge {
                    key: key.clone(),
                    reason: "not a variable of the dataset".into(),
                });
            }
            if let HeteroSpec::ParentDriven(driver) = spec {
                if !names.contains(driver) {
                    return Err(Error::Knowledge {
                        key: key.clone(),
                        reason: format!("driver `{driver}` is not a variable of the dataset"),
                    });
                }
                if driver == key {
                    return Err(Error::Knowledge {
                        key: key.clone(),
                        reason: "a variable cannot drive its own noise".into(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(s)?;
        let Value::Object(map) = value else {
            return Err(Error::Knowledge {
                key: "<root>".into(),
                reason: "expected a JSON object".into(),
            });
        };
        let mut out = Self::new();
        for (key, v) in map {
            let spec = match &v {
                Value::Null | Value::Bool(false) => HeteroSpec::NoneDeclared,
                Value::String(s) if s == "none" => HeteroSpec::NoneDeclared,
                Value::String(s) if s == "sampling_index" => HeteroSpec::SamplingIndex,
                Value::Object(o) if o.len() == 1 && o.contains_key("parent") => match &o["parent"] {
                    Value::String(p) if !p.is_empty() => HeteroSpec::ParentDriven(p.clone()),
                    _ => {
                        return Err(Error::Knowledge {
                            key,
                            reason: "`parent` must be a non-empty variable name".into(),
                        })
                    }
                },
                other => {
                    return Err(Error::Knowledge {
                        key,
                        reason: format!("expected \"none\", \"sampling_index\" or {{\"parent\": NAME}}, found {other}"),
                    })
                }
            };
            out.insert(key, spec);
        }
        Ok(out)
    }

    pub fn to_json_value(&self) -> Value {
        let mut map = Map::new();
        for (k, spec) in &self.entries {
            let v = match spec {
                HeteroSpec::NoneDeclared => Value::String("none".into()),
                HeteroSpec::SamplingIndex => Value::String("sampling_index".into()),
                HeteroSpec::ParentDriven(p) => {
                    let mut o = Map::new();
                    o.insert("parent".into(), Value::String(p.clone()));
                    Value::Object(o)
                }
            };
            map.insert(k.clone(), v);
        }
        Value::Object(map)
    }
}
