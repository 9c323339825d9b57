use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::group::{GroupSpec, OperatorFamily};
use crate::imaging::TransformSpec;
use crate::models::ModelVariant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKindConfig {
    Cyclic,
    Direct,
    /// Rotations first, acting on the translations that follow.
    SemiDirect,
}

/// Transformation group as seen by a model: factor orders listed in the
/// order the transformations are applied (rotation, x, y).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupConfig {
    pub kind: GroupKindConfig,
    pub orders: Vec<usize>,
    /// Action of the rotations on the translations; only `"rotation"`
    /// (quarter turns) is recognized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
}

impl GroupConfig {
    pub fn cyclic(k: usize) -> Self {
        Self {
            kind: GroupKindConfig::Cyclic,
            orders: vec![k],
            action: None,
        }
    }

    pub fn direct(orders: Vec<usize>) -> Self {
        Self {
            kind: GroupKindConfig::Direct,
            orders,
            action: None,
        }
    }

    pub fn semi_direct(orders: Vec<usize>) -> Self {
        Self {
            kind: GroupKindConfig::SemiDirect,
            orders,
            action: Some("rotation".into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.orders.is_empty() || self.orders.contains(&0) {
            return Err(Error::Validation(format!("group orders {:?} are invalid", self.orders)));
        }
        match self.kind {
            GroupKindConfig::Cyclic if self.orders.len() != 1 => Err(Error::Validation(format!(
                "cyclic group given {} orders",
                self.orders.len()
            ))),
            GroupKindConfig::SemiDirect if self.orders.len() != 3 => Err(Error::Validation(format!(
                "semi-direct group needs (rotation, x, y) orders, got {:?}",
                self.orders
            ))),
            _ => match self.action.as_deref() {
                None | Some("rotation") => Ok(()),
                Some(a) => Err(Error::Validation(format!("unknown group action {a:?}"))),
            },
        }
    }

    /// Group that labels the training pairs.
    pub fn label_group(&self) -> Result<GroupSpec> {
        self.validate()?;
        if self.orders.len() == 1 {
            GroupSpec::cyclic(self.orders[0])
        } else {
            GroupSpec::direct(self.orders.clone())
        }
    }

    /// The group configuration matching a dataset's transforms.
    pub fn for_transforms(t: &TransformSpec) -> Self {
        let orders: Vec<usize> = t.factors().iter().map(|&(_, k)| k).collect();
        match orders.len() {
            1 => Self::cyclic(orders[0]),
            3 => Self::semi_direct(orders),
            _ => Self::direct(orders),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakConfig {
    /// Number of latent transformations `K_L`.
    pub k_latent: usize,
    /// Softmax temperature `τ`.
    pub temperature: f64,
}

impl Default for WeakConfig {
    fn default() -> Self {
        Self {
            k_latent: 10,
            temperature: 1.0,
        }
    }
}

fn default_init_scale() -> f64 {
    1.0
}

fn is_default_init_scale(s: &f64) -> bool {
    *s == 1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub variant: ModelVariant,
    pub group: GroupConfig,
    pub latent_dim: usize,
    pub lr: f64,
    pub batch: usize,
    pub epochs: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weak: Option<WeakConfig>,
    /// Multiplier on the `1/√fan_in` bound of the uniform initialization.
    #[serde(default = "default_init_scale", skip_serializing_if = "is_default_init_scale")]
    pub init_scale: f64,
}

impl TrainConfig {
    /// Desk-scale defaults: batch 16, lr 1e−3, 20 epochs.
    pub fn new(variant: ModelVariant, group: GroupConfig, latent_dim: usize) -> Self {
        Self {
            variant,
            group,
            latent_dim,
            lr: 1e-3,
            batch: 16,
            epochs: 20,
            seed: 0,
            weak: (variant == ModelVariant::Weak).then(WeakConfig::default),
            init_scale: 1.0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn weak_config(&self) -> WeakConfig {
        self.weak.unwrap_or_default()
    }

    /// Number of operator stages applied to a latent code.
    pub fn stage_count(&self) -> usize {
        match self.variant {
            ModelVariant::Stacked => self.group.orders.len(),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.group.validate()?;
        if self.latent_dim == 0 || self.batch == 0 {
            return Err(Error::Validation("latent_dim and batch must be positive".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Validation(format!("learning rate {} must be positive", self.lr)));
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return Err(Error::Validation(format!("init scale {} must be positive", self.init_scale)));
        }
        let n = self.group.orders.len();
        match self.variant {
            ModelVariant::Stacked if !(2..=3).contains(&n) => {
                return Err(Error::Unsupported(format!(
                    "stacked model needs 2 or 3 factors, got {n}"
                )))
            }
            ModelVariant::Shift | ModelVariant::ShiftComplex | ModelVariant::Disentangled | ModelVariant::Weak
                if n != 1 =>
            {
                return Err(Error::Unsupported(format!(
                    "{} model handles a single transformation, got {n} factors",
                    self.variant.name()
                )))
            }
            _ => {}
        }
        if self.variant == ModelVariant::Weak {
            let w = self.weak_config();
            if w.k_latent == 0 {
                return Err(Error::Validation("k_latent must be at least 1".into()));
            }
            if !(w.temperature.is_finite() && w.temperature > 0.0) {
                return Err(Error::Validation(format!(
                    "temperature {} must be positive",
                    w.temperature
                )));
            }
        }
        for fam in self.families() {
            fam.check_dim(self.latent_dim)?;
        }
        Ok(())
    }

    /// Operator family of each stage.
    pub fn families(&self) -> Vec<OperatorFamily> {
        let k = self.group.orders[0];
        match self.variant {
            ModelVariant::Shift => vec![OperatorFamily::PermutationShift { order: k }],
            ModelVariant::ShiftComplex => vec![OperatorFamily::ComplexShift { order: k }],
            ModelVariant::Disentangled => vec![OperatorFamily::Disentangled { order: k }],
            ModelVariant::Weak => vec![OperatorFamily::ComplexShift {
                order: self.weak_config().k_latent,
            }],
            ModelVariant::Stacked => self
                .group
                .orders
                .iter()
                .map(|&order| OperatorFamily::ComplexShift { order })
                .collect(),
        }
    }

    /// Fails with a dimension error naming the mismatch when the dataset
    /// does not fit this configuration.
    pub fn check_data(&self, data_group: &GroupSpec, pixel_dim: usize) -> Result<()> {
        let want = self.group.label_group()?;
        if want.factors() != data_group.factors() {
            return Err(Error::Dimension(format!(
                "config group orders {:?} do not match dataset group orders {:?}",
                want.factors(),
                data_group.factors()
            )));
        }
        if pixel_dim == 0 {
            return Err(Error::Dimension("dataset has no pixels".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema() {
        let text = r#"{"variant":"weak","group":{"kind":"cyclic","orders":[10]},"latent_dim":784,
            "lr":0.001,"batch":16,"epochs":3,"seed":7,"weak":{"k_latent":21,"temperature":0.5}}"#;
        let c = TrainConfig::from_json(text).unwrap();
        assert_eq!(c.weak_config().k_latent, 21);
        assert_eq!(c.init_scale, 1.0);
        let again = TrainConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.hash(), c.hash());
    }

    #[test]
    fn latent_must_be_a_multiple_of_the_order() {
        TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(10), 800).validate().unwrap();
        let bad = TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(10), 784);
        assert!(bad.validate().is_err());
        // complex diagonals truncate the last cycle
        TrainConfig::new(ModelVariant::ShiftComplex, GroupConfig::cyclic(10), 784).validate().unwrap();
    }

    #[test]
    fn factor_restrictions() {
        let weak = TrainConfig::new(ModelVariant::Weak, GroupConfig::direct(vec![10, 5]), 800);
        assert!(matches!(weak.validate(), Err(Error::Unsupported(_))));
        let st = TrainConfig::new(ModelVariant::Stacked, GroupConfig::cyclic(5), 800);
        assert!(matches!(st.validate(), Err(Error::Unsupported(_))));
        let st = TrainConfig::new(ModelVariant::Stacked, GroupConfig::semi_direct(vec![5, 5, 5]), 800);
        st.validate().unwrap();
        let mut t = TrainConfig::new(ModelVariant::Weak, GroupConfig::cyclic(10), 784);
        t.weak = Some(WeakConfig {
            k_latent: 10,
            temperature: 0.0,
        });
        assert!(t.validate().is_err());
    }

    #[test]
    fn data_mismatch_names_orders() {
        let c = TrainConfig::new(ModelVariant::Shift, GroupConfig::cyclic(10), 800);
        let err = c.check_data(&GroupSpec::cyclic(5).unwrap(), 784).unwrap_err();
        assert!(err.to_string().contains("[10]"));
    }
}
