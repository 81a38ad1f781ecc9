use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::roles::RoleKind;

/// Which end of the Dishwasher's hand is forced to the Chef.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DishwasherGives {
    /// Two highest faces (the least rare cards).
    #[default]
    Highest,
    /// Two lowest faces, as in the Dalmuti-style tax.
    Lowest,
}

/// Points earned per shift by each role.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RolePoints {
    pub chef: u32,
    pub sous_chef: u32,
    pub waiter: u32,
    pub dishwasher: u32,
}

impl Default for RolePoints {
    fn default() -> Self {
        Self {
            chef: 3,
            sous_chef: 2,
            waiter: 1,
            dishwasher: 0,
        }
    }
}

impl RolePoints {
    pub fn for_role(&self, kind: RoleKind) -> u32 {
        match kind {
            RoleKind::Chef => self.chef,
            RoleKind::SousChef => self.sous_chef,
            RoleKind::Waiter => self.waiter,
            RoleKind::Dishwasher => self.dishwasher,
        }
    }
}

/// Tunable rules. The deck composition and board size are fixed; everything a
/// table can vary lives here. Missing fields in a rules file take the defaults.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleConfig {
    /// A match ends at the first shift boundary where a score reaches this.
    pub target_score: u32,
    pub role_points: RolePoints,
    /// Hard stop; the leader after this many shifts wins by cutoff.
    pub max_shifts: u32,
    pub exchange_dishwasher_gives: DishwasherGives,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            target_score: 15,
            role_points: RolePoints::default(),
            max_shifts: 50,
            exchange_dishwasher_gives: DishwasherGives::Highest,
        }
    }
}

impl RuleConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.target_score == 0 {
            return Err(EngineError::InvalidConfig("target_score must be at least 1".into()));
        }
        if self.max_shifts == 0 {
            return Err(EngineError::InvalidConfig("max_shifts must be at least 1".into()));
        }
        if self.role_points.chef == 0 {
            return Err(EngineError::InvalidConfig(
                "the Chef must earn points or no match can reach the target".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let config: RuleConfig = serde_json::from_str(text)
            .map_err(|e| EngineError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}
