use std::str::FromStr;

use opsent::amplitude::{Basis, StateTensor};
use opsent::correlations::{deformed_singlet, para_pair, TwoQubitState};

use crate::Failure;

/// Reference states available without kinematics.
pub enum NamedState {
    Triple(StateTensor),
    Pair {
        name: String,
        state: TwoQubitState,
        /// Deformation angle of the singlet family.
        alpha: Option<f64>,
    },
}

impl NamedState {
    pub fn three_photon(&self, command: &str) -> Result<&StateTensor, Failure> {
        match self {
            Self::Triple(state) => Ok(state),
            Self::Pair { name, .. } => Err(Failure::validation(format!(
                "{command} needs a three-photon state; {name} has two photons"
            ))),
        }
    }
}

impl FromStr for NamedState {
    type Err = Failure;

    fn from_str(s: &str) -> Result<Self, Failure> {
        let name = s.trim().to_ascii_lowercase();
        let triple = |state| Ok(Self::Triple(state));
        match name.as_str() {
            "ghz" => return triple(StateTensor::ghz()),
            "w" => return triple(StateTensor::w()),
            "product" => return triple(StateTensor::basis_ket(Basis::Linear, 0)),
            "para" => {
                return Ok(Self::Pair {
                    name,
                    state: para_pair(),
                    alpha: None,
                })
            }
            _ => {}
        }
        // singlet:<alpha> or singlet(<alpha>)
        let arg = name
            .strip_prefix("singlet:")
            .or_else(|| name.strip_prefix("singlet(").and_then(|r| r.strip_suffix(')')));
        if let Some(arg) = arg {
            let alpha: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Failure::validation(format!("singlet angle {arg:?} is not a number")))?;
            if !alpha.is_finite() {
                return Err(Failure::validation(format!("singlet angle {alpha} is not finite")));
            }
            return Ok(Self::Pair {
                name: name.clone(),
                state: deformed_singlet(alpha),
                alpha: Some(alpha),
            });
        }
        Err(Failure::validation(format!(
            "unknown state {s:?} (expected ghz, w, product, para or singlet:<alpha>)"
        )))
    }
}
