//! Comb and pump configuration files.
//!
//! ```json
//! {
//!   "modes": 4,
//!   "polarized": false,
//!   "window": [1, 4],
//!   "pumps": [{ "sum": 5 }, { "sum": 7, "interaction": "unpolarized", "weight": 1.0 }],
//!   "target": ["1", "2", "3", "4"]
//! }
//! ```
//!
//! `window` defaults to `[1, modes]` (or `[1, modes/2]` when polarized),
//! `interaction` to `unpolarized` and `weight` to 1. `target` is only read by
//! the spurious-coupling check.

use std::collections::BTreeSet;
use std::path::Path;

use combsim_core::{CombSpec, Interaction, ModeLabel, Polarization, PumpSpec};
use serde::{Deserialize, Serialize};

use crate::io::InputError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpEntry {
    pub sum: u32,
    #[serde(default = "default_interaction")]
    pub interaction: String,
    #[serde(default = "default_weight")]
    pub weight: f64,
}

fn default_interaction() -> String {
    "unpolarized".into()
}

fn default_weight() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CombConfig {
    pub modes: usize,
    #[serde(default)]
    pub polarized: bool,
    #[serde(default)]
    pub window: Option<(u32, u32)>,
    pub pumps: Vec<PumpEntry>,
    #[serde(default)]
    pub target: Option<Vec<String>>,
}

impl CombConfig {
    pub fn load(path: &Path) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| InputError::Json(path.display().to_string(), e))
    }

    pub fn comb(&self) -> Result<CombSpec, InputError> {
        let span = if self.polarized { self.modes / 2 } else { self.modes } as u32;
        let window = self.window.unwrap_or((1, span.max(1)));
        Ok(CombSpec::new(self.modes, self.polarized, window)?)
    }

    pub fn pumps(&self) -> Result<Vec<PumpSpec>, InputError> {
        self.pumps
            .iter()
            .map(|p| {
                let interaction = Interaction::from_name(&p.interaction)
                    .ok_or_else(|| InputError::Invalid(format!("unknown interaction '{}'", p.interaction)))?;
                Ok(PumpSpec::new(p.sum, interaction, p.weight)?)
            })
            .collect()
    }

    /// Target modes; all modes of the comb when unset.
    pub fn target(&self) -> Result<BTreeSet<ModeLabel>, InputError> {
        match &self.target {
            None => Ok(self.comb()?.modes().into_iter().collect()),
            Some(labels) => labels.iter().map(|s| parse_label(s)).collect(),
        }
    }
}

/// `"3"`, `"3H"` or `"3V"`.
pub fn parse_label(s: &str) -> Result<ModeLabel, InputError> {
    let s = s.trim();
    let (digits, pol) = match s.chars().last() {
        Some('H' | 'h') => (&s[..s.len() - 1], Polarization::H),
        Some('V' | 'v') => (&s[..s.len() - 1], Polarization::V),
        _ => (s, Polarization::None),
    };
    let freq = digits
        .parse::<u32>()
        .map_err(|_| InputError::Invalid(format!("bad mode label '{s}'")))?;
    Ok(ModeLabel::new(freq, pol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg: CombConfig = serde_json::from_str(r#"{"modes": 4, "pumps": [{"sum": 5}, {"sum": 7}]}"#).unwrap();
        assert_eq!(cfg.comb().unwrap().window(), (1, 4));
        let pumps = cfg.pumps().unwrap();
        assert_eq!(pumps[1].freq_sum, 7);
        assert_eq!(pumps[1].interaction, Interaction::Unpolarized);
        assert_eq!(cfg.target().unwrap().len(), 4);
    }

    #[test]
    fn labels() {
        assert_eq!(parse_label("12").unwrap(), ModeLabel::unpolarized(12));
        assert_eq!(parse_label("2V").unwrap(), ModeLabel::new(2, Polarization::V));
        assert!(parse_label("x").is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<CombConfig>(r#"{"modes": 4, "pumps": [], "pump": 1}"#).is_err());
    }
}
