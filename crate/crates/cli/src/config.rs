//! The JSON spider description read by every subcommand.

use std::fmt;

use serde::de::{self, SeqAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use spiderlab_core::workspace::{Leg, SpiderSpec};
use spiderlab_core::{ChargeTriple, Point, Triangle, Weights};

/// A link length shared by all legs, or one per leg in foot order A, B, C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Lengths {
    Uniform(f64),
    PerLeg([f64; 3]),
}

impl Lengths {
    pub fn get(&self, leg: usize) -> f64 {
        match self {
            Lengths::Uniform(v) => *v,
            Lengths::PerLeg(v) => v[leg],
        }
    }
}

impl<'de> Deserialize<'de> for Lengths {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Lengths;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an array of three numbers")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Lengths, E> {
                Ok(Lengths::Uniform(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Lengths, E> {
                Ok(Lengths::Uniform(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Lengths, E> {
                Ok(Lengths::Uniform(v as f64))
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Lengths, A::Error> {
                let mut out = [0.0; 3];
                for (i, slot) in out.iter_mut().enumerate() {
                    *slot = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(i, &self))?;
                }
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(Lengths::PerLeg(out))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpiderConfig {
    pub feet: [[f64; 2]; 3],
    pub thigh: Lengths,
    pub shin: Lengths,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charges: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {path}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] spiderlab_core::Error),
}

impl ConfigError {
    /// Name written into error reports.
    pub fn name(&self) -> &'static str {
        match self {
            ConfigError::Parse { .. } => "ConfigParse",
            ConfigError::Invalid(e) => e.name(),
        }
    }
}

impl SpiderConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SpiderConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let message = inner.to_string();
            // serde_json appends its own position; keep the bare message.
            let message = match message.rfind(" at line ") {
                Some(i) => message[..i].to_string(),
                None => message,
            };
            ConfigError::Parse { path, line: inner.line(), column: inner.column(), message }
        })?;
        cfg.spec()?;
        cfg.charges()?;
        cfg.weights()?;
        Ok(cfg)
    }

    pub fn from_spec(spec: &SpiderSpec) -> Self {
        let feet = spec.feet.vertices().map(|p| [p.x, p.y]);
        SpiderConfig {
            feet,
            thigh: Lengths::PerLeg(spec.legs.map(|l| l.thigh)),
            shin: Lengths::PerLeg(spec.legs.map(|l| l.shin)),
            charges: None,
            weights: None,
        }
    }

    pub fn spec(&self) -> Result<SpiderSpec, spiderlab_core::Error> {
        let [a, b, c] = self.feet.map(Point::from);
        let feet = Triangle::new(a, b, c)?;
        let legs = std::array::from_fn(|i| Leg { thigh: self.thigh.get(i), shin: self.shin.get(i) });
        SpiderSpec::new(feet, legs)
    }

    /// Configured charges, or equal charges.
    pub fn charges(&self) -> Result<ChargeTriple, spiderlab_core::Error> {
        self.charges.map_or(Ok(ChargeTriple::equal()), ChargeTriple::new)
    }

    /// Configured Hooke weights, or unit weights.
    pub fn weights(&self) -> Result<Weights, spiderlab_core::Error> {
        self.weights.map_or(Ok(Weights::unit()), |[a, b, c]| Weights::new(a, b, c))
    }
}
