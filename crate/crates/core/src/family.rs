use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Perturbation families `f_j → f` used by the continuity experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `(1 + 1/j)·f`
    Scaling,
    /// `f + g/j` for a fixed bump `g`
    Additive,
    /// `f(· − 1/j)`; continuous functions only
    Translate,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "scaling" => Ok(Family::Scaling),
            "additive" => Ok(Family::Additive),
            "translate" => Ok(Family::Translate),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Scaling => "scaling",
            Family::Additive => "additive",
            Family::Translate => "translate",
        })
    }
}
