use serde::{Deserialize, Serialize};

use crate::config::RuleConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoleKind {
    Chef,
    SousChef,
    Waiter,
    Dishwasher,
}

/// Physical marker worn by each role at the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Attribute {
    ChefHat,
    SousChefHat,
    BowTie,
    Cloth,
}

impl RoleKind {
    /// Highest role first.
    pub const ORDER: [RoleKind; 4] = [
        RoleKind::Chef,
        RoleKind::SousChef,
        RoleKind::Waiter,
        RoleKind::Dishwasher,
    ];

    /// Role earned by the seat that finished in `position` (0-based).
    pub fn for_finish_position(position: usize) -> RoleKind {
        Self::ORDER[position.min(3)]
    }

    /// 0 for the Chef through 3 for the Dishwasher.
    pub fn rank(self) -> usize {
        self as usize
    }

    /// Chef and Dishwasher trade places, as do Sous-Chef and Waiter.
    pub fn inverted(self) -> RoleKind {
        Self::ORDER[3 - self.rank()]
    }

    pub fn attribute(self) -> Attribute {
        match self {
            RoleKind::Chef => Attribute::ChefHat,
            RoleKind::SousChef => Attribute::SousChefHat,
            RoleKind::Waiter => Attribute::BowTie,
            RoleKind::Dishwasher => Attribute::Cloth,
        }
    }
}

/// A role together with its scoring and presentation metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Role {
    pub kind: RoleKind,
    pub points_per_shift: u32,
    pub attribute: Attribute,
}

impl Role {
    pub fn new(kind: RoleKind, config: &RuleConfig) -> Self {
        Self {
            kind,
            points_per_shift: config.role_points.for_role(kind),
            attribute: kind.attribute(),
        }
    }
}
