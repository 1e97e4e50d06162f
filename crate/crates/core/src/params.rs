//! Named parameter vectors and their estimation-scale transforms.
//!
//! Estimation works on transformed coordinates: `mu_h` identity, `phi`
//! logit on (0,1), `sigma_eta` and `sigma_nu` log, `rho` Fisher, `f0`
//! identity. `f0` is an initial-value parameter: it only affects the
//! initial latent state.

use crate::error::{Error, Result};
use crate::model::{FixedLevParams, RwLevParams, Variant};
use crate::transform::Transform;

/// Static description of one model parameter.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub transform: Transform,
    /// Initial-value parameter: perturbed only at t=0 during iterated filtering.
    pub ivp: bool,
}

const FIXED_SPECS: [ParamSpec; 4] = [
    ParamSpec {
        name: "mu_h",
        transform: Transform::Identity,
        ivp: false,
    },
    ParamSpec {
        name: "phi",
        transform: Transform::Logit01,
        ivp: false,
    },
    ParamSpec {
        name: "sigma_eta",
        transform: Transform::Log,
        ivp: false,
    },
    ParamSpec {
        name: "rho",
        transform: Transform::Fisher,
        ivp: false,
    },
];

const RW_SPECS: [ParamSpec; 5] = [
    ParamSpec {
        name: "mu_h",
        transform: Transform::Identity,
        ivp: false,
    },
    ParamSpec {
        name: "phi",
        transform: Transform::Logit01,
        ivp: false,
    },
    ParamSpec {
        name: "sigma_eta",
        transform: Transform::Log,
        ivp: false,
    },
    ParamSpec {
        name: "sigma_nu",
        transform: Transform::Log,
        ivp: false,
    },
    ParamSpec {
        name: "f0",
        transform: Transform::Identity,
        ivp: true,
    },
];

/// Parameter layout of a model variant, in serialization order.
pub fn param_specs(variant: Variant) -> &'static [ParamSpec] {
    match variant {
        Variant::Fixed => &FIXED_SPECS,
        Variant::RandomWalk => &RW_SPECS,
    }
}

/// Union of parameter names across variants, in CSV column order.
pub const ALL_PARAM_NAMES: [&str; 6] = ["mu_h", "phi", "sigma_eta", "rho", "sigma_nu", "f0"];

/// A named, natural-scale parameter vector for one model variant.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    variant: Variant,
    values: Vec<f64>,
}

impl ParamVector {
    /// Build from natural-scale values in `param_specs(variant)` order.
    pub fn new(variant: Variant, values: Vec<f64>) -> Result<Self> {
        let specs = param_specs(variant);
        if values.len() != specs.len() {
            return Err(Error::domain(format!(
                "{variant} model takes {} parameters, got {}",
                specs.len(),
                values.len()
            )));
        }
        let v = ParamVector { variant, values };
        v.validate()?;
        Ok(v)
    }

    pub fn from_fixed(p: &FixedLevParams) -> Self {
        ParamVector {
            variant: Variant::Fixed,
            values: vec![p.mu_h, p.phi, p.sigma_eta, p.rho],
        }
    }

    pub fn from_rw(p: &RwLevParams) -> Self {
        ParamVector {
            variant: Variant::RandomWalk,
            values: vec![p.mu_h, p.phi, p.sigma_eta, p.sigma_nu, p.f0],
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn specs(&self) -> &'static [ParamSpec] {
        param_specs(self.variant)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.specs()
            .iter()
            .position(|s| s.name == name)
            .map(|i| self.values[i])
    }

    /// Replace one named parameter, revalidating the vector.
    pub fn with(&self, name: &str, value: f64) -> Result<Self> {
        let idx = self
            .specs()
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| {
                Error::domain(format!(
                    "no parameter `{name}` in the {} model",
                    self.variant
                ))
            })?;
        let mut values = self.values.clone();
        values[idx] = value;
        ParamVector::new(self.variant, values)
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            Variant::Fixed => self.as_fixed().map(|_| ()),
            Variant::RandomWalk => self.as_rw().map(|_| ()),
        }
    }

    pub fn as_fixed(&self) -> Result<FixedLevParams> {
        if self.variant != Variant::Fixed {
            return Err(Error::domain("parameter vector is not for the fixed model"));
        }
        FixedLevParams::new(
            self.values[0],
            self.values[1],
            self.values[2],
            self.values[3],
        )
    }

    pub fn as_rw(&self) -> Result<RwLevParams> {
        if self.variant != Variant::RandomWalk {
            return Err(Error::domain(
                "parameter vector is not for the random-walk model",
            ));
        }
        RwLevParams::new(
            self.values[0],
            self.values[1],
            self.values[2],
            self.values[3],
            self.values[4],
        )
    }

    /// Map to the estimation scale (componentwise forward transforms).
    pub fn to_estimation(&self) -> Result<Vec<f64>> {
        self.specs()
            .iter()
            .zip(&self.values)
            .map(|(s, &v)| s.transform.forward(v))
            .collect()
    }

    /// Map estimation-scale coordinates back to a natural-scale vector.
    ///
    /// Total: inverse transforms saturate inside their domains, so the result
    /// is always a valid parameter vector.
    pub fn from_estimation(variant: Variant, est: &[f64]) -> Result<Self> {
        let specs = param_specs(variant);
        if est.len() != specs.len() {
            return Err(Error::domain(format!(
                "{variant} model takes {} parameters, got {}",
                specs.len(),
                est.len()
            )));
        }
        let values = specs
            .iter()
            .zip(est)
            .map(|(s, &u)| s.transform.inverse(u))
            .collect();
        Ok(ParamVector { variant, values })
    }
}
