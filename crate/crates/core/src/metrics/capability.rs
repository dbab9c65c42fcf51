use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perturb::Category;

/// Strict optimality bound on an AOP-20 percentage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Threshold {
    Above { min: f64 },
    Below { max: f64 },
    Between { min: f64, max: f64 },
}

impl Threshold {
    pub fn accepts(self, value: f64) -> bool {
        match self {
            Threshold::Above { min } => value > min,
            Threshold::Below { max } => value < max,
            Threshold::Between { min, max } => value > min && value < max,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Above { min } => write!(f, ">{min}"),
            Threshold::Below { max } => write!(f, "<{max}"),
            Threshold::Between { min, max } => write!(f, "{min}-{max}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub rules: Vec<(Category, Threshold)>,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            rules: vec![
                (Category::LlHs, Threshold::Above { min: 75.0 }),
                (Category::LoHs, Threshold::Above { min: 70.0 }),
                (Category::LlPs, Threshold::Between { min: 50.0, max: 70.0 }),
                (Category::LoPs, Threshold::Between { min: 50.0, max: 70.0 }),
                (Category::LoDs, Threshold::Below { max: 20.0 }),
            ],
        }
    }
}

impl Thresholds {
    pub fn get(&self, category: Category) -> Option<Threshold> {
        self.rules.iter().find(|(c, _)| *c == category).map(|(_, t)| *t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityCell {
    pub category: Category,
    pub value: f64,
    pub threshold: Threshold,
    pub optimal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityMatrix {
    pub cells: Vec<CapabilityCell>,
}

impl CapabilityMatrix {
    pub fn optimal(&self) -> Vec<Category> {
        self.cells.iter().filter(|c| c.optimal).map(|c| c.category).collect()
    }

    pub fn is_optimal(&self, category: Category) -> Option<bool> {
        self.cells.iter().find(|c| c.category == category).map(|c| c.optimal)
    }
}

/// Marks each category's AOP-20 value optimal or not; all five must be present.
pub fn capability_matrix(values: &[(Category, f64)], thresholds: &Thresholds) -> Result<CapabilityMatrix> {
    let cells = Category::ALL
        .into_iter()
        .map(|cat| {
            let value = values
                .iter()
                .find(|(c, _)| *c == cat)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Validation(format!("capability matrix is missing category {cat}")))?;
            let threshold =
                thresholds.get(cat).ok_or_else(|| Error::Validation(format!("no threshold for category {cat}")))?;
            Ok(CapabilityCell { category: cat, value, threshold, optimal: threshold.accepts(value) })
        })
        .collect::<Result<_>>()?;
    Ok(CapabilityMatrix { cells })
}
