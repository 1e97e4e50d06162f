//! Estimation-scale parameter transforms.
//!
//! Constrained model parameters are mapped to the real line before being
//! perturbed or differentiated, and mapped back afterwards. Inverse maps are
//! total functions: they clamp into the open constrained domain so that any
//! real input produces a valid parameter value.

use crate::error::{Error, Result};

/// Largest double strictly below 1; used to keep inverse maps inside open intervals.
const ONE_INTERIOR: f64 = 1.0 - f64::EPSILON / 2.0;

/// Bijective map between a constrained parameter domain and the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    /// No-op, for unconstrained parameters.
    Identity,
    /// log : (0, inf) -> R.
    Log,
    /// logit : (0, 1) -> R.
    Logit01,
    /// Fisher map atanh : (-1, 1) -> R.
    Fisher,
}

impl Transform {
    pub fn name(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Log => "log",
            Transform::Logit01 => "logit01",
            Transform::Fisher => "fisher",
        }
    }

    /// Constrained domain -> R. Errors when `x` is outside the domain.
    pub fn forward(self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::domain(format!(
                "{} transform requires a finite input, got {x}",
                self.name()
            )));
        }
        match self {
            Transform::Identity => Ok(x),
            Transform::Log => {
                if x > 0.0 {
                    Ok(x.ln())
                } else {
                    Err(Error::domain(format!(
                        "log transform requires x > 0, got {x}"
                    )))
                }
            }
            Transform::Logit01 => {
                if x > 0.0 && x < 1.0 {
                    Ok((x / (1.0 - x)).ln())
                } else {
                    Err(Error::domain(format!(
                        "logit transform requires x in (0,1), got {x}"
                    )))
                }
            }
            Transform::Fisher => {
                if x > -1.0 && x < 1.0 {
                    Ok(0.5 * ((1.0 + x) / (1.0 - x)).ln())
                } else {
                    Err(Error::domain(format!(
                        "fisher transform requires x in (-1,1), got {x}"
                    )))
                }
            }
        }
    }

    /// R -> constrained domain. Total: saturates strictly inside the domain.
    pub fn inverse(self, u: f64) -> f64 {
        match self {
            Transform::Identity => u,
            Transform::Log => u.exp().clamp(f64::MIN_POSITIVE, f64::MAX),
            Transform::Logit01 => {
                let s = 1.0 / (1.0 + (-u).exp());
                s.clamp(f64::MIN_POSITIVE, ONE_INTERIOR)
            }
            Transform::Fisher => saturating_tanh(u),
        }
    }

    /// Derivative of `inverse` at `u`, for delta-method standard errors.
    pub fn inverse_deriv(self, u: f64) -> f64 {
        match self {
            Transform::Identity => 1.0,
            Transform::Log => self.inverse(u),
            Transform::Logit01 => {
                let s = self.inverse(u);
                s * (1.0 - s)
            }
            Transform::Fisher => {
                let t = self.inverse(u);
                1.0 - t * t
            }
        }
    }
}

/// tanh with an explicit saturating branch: the result stays strictly inside
/// (-1, 1) even where floating tanh would round to exactly +-1.
pub(crate) fn saturating_tanh(u: f64) -> f64 {
    const BOUND: f64 = 1.0 - 1e-15;
    if u.abs() > 20.0 {
        BOUND.copysign(u)
    } else {
        u.tanh().clamp(-BOUND, BOUND)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [Transform; 4] = [
        Transform::Identity,
        Transform::Log,
        Transform::Logit01,
        Transform::Fisher,
    ];

    #[test]
    fn forward_rejects_out_of_domain() {
        assert!(Transform::Log.forward(0.0).is_err());
        assert!(Transform::Log.forward(-1.0).is_err());
        assert!(Transform::Logit01.forward(1.0).is_err());
        assert!(Transform::Logit01.forward(-0.2).is_err());
        assert!(Transform::Fisher.forward(1.0).is_err());
        assert!(Transform::Fisher.forward(-1.5).is_err());
        for t in ALL {
            assert!(t.forward(f64::NAN).is_err());
            assert!(t.forward(f64::INFINITY).is_err());
        }
    }

    #[test]
    fn inverse_stays_inside_domain_even_for_huge_inputs() {
        for u in [-1e6, -60.0, -1.0, 0.0, 1.0, 60.0, 1e6] {
            let s = Transform::Logit01.inverse(u);
            assert!(s > 0.0 && s < 1.0, "logit01 inverse {u} -> {s}");
            let t = Transform::Fisher.inverse(u);
            assert!(t > -1.0 && t < 1.0, "fisher inverse {u} -> {t}");
            let e = Transform::Log.inverse(u);
            assert!(e > 0.0 && e.is_finite(), "log inverse {u} -> {e}");
        }
    }

    #[test]
    fn inverse_deriv_matches_finite_difference() {
        let du = 1e-6;
        for t in ALL {
            for u in [-2.0, -0.3, 0.0, 0.7, 3.0] {
                let num = (t.inverse(u + du) - t.inverse(u - du)) / (2.0 * du);
                let ana = t.inverse_deriv(u);
                assert!(
                    (num - ana).abs() <= 1e-6 * (1.0 + ana.abs()),
                    "{}: u={u} num={num} ana={ana}",
                    t.name()
                );
            }
        }
    }

    proptest! {
        #[test]
        fn log_round_trip(x in 1e-6f64..1e6) {
            let rt = Transform::Log.inverse(Transform::Log.forward(x).unwrap());
            prop_assert!((rt - x).abs() <= 1e-12 * x.abs().max(1.0));
        }

        #[test]
        fn logit_round_trip(x in 1e-6f64..0.999999) {
            let rt = Transform::Logit01.inverse(Transform::Logit01.forward(x).unwrap());
            prop_assert!((rt - x).abs() <= 1e-12);
        }

        #[test]
        fn fisher_round_trip(x in -0.999999f64..0.999999) {
            let rt = Transform::Fisher.inverse(Transform::Fisher.forward(x).unwrap());
            prop_assert!((rt - x).abs() <= 1e-12);
        }

        #[test]
        fn identity_round_trip(x in -1e9f64..1e9) {
            let rt = Transform::Identity.inverse(Transform::Identity.forward(x).unwrap());
            prop_assert!(rt == x);
        }
    }
}
