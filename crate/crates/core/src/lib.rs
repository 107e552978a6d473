//! Polarization entanglement of the three photons from ortho-positronium
//! decay.
//!
//! The crate builds decay kinematics on the Dalitz triangle, evaluates the
//! lowest-order helicity amplitudes for each spin projection of the
//! positronium, classifies the resulting three-qubit state (product,
//! biseparable, W or GHZ class), evaluates Bell-type correlators in the
//! two-level and spin-1 formalisms and searches phase space for zeros of
//! the Cayley hyperdeterminant.
//!
//! ```
//! use opsent::{build_event, classify, state_tensor, DalitzPoint, Orientation, SpinProjection, Tolerances};
//!
//! let t = build_event(DalitzPoint::symmetric(), Orientation::identity()).unwrap();
//! let psi = state_tensor(&t, SpinProjection::Zero).unwrap();
//! let report = classify(&psi, &Tolerances::default()).unwrap();
//! println!("{} tangle = {:.4}", report.class, report.three_tangle);
//! ```

pub mod amplitude;
pub mod correlations;
pub mod entanglement;
pub mod error;
pub mod kinematics;
pub mod optimize;
pub mod search;

pub use amplitude::{
    closed_form_coefficients, decay_weight, matrix_element, state_tensor, state_tensor_superposed, Basis,
    HelicityTriple, SpinProjection, SpinWeights, StateTensor,
};
pub use correlations::{
    correlation_2d, correlation_3d, embed_3d, mermin_value, svetlichny_value, AnalyzerSetting, BellSettings, Formalism,
    TripleCorrelator,
};
pub use entanglement::{
    classify, hyperdeterminant, three_tangle, Cut, EntanglementClass, EntanglementReport, Tolerances,
};
pub use error::{Error, Result};
pub use kinematics::{build_event, dalitz_sample, DalitzPoint, Helicity, Orientation, PhotonTriple, Vec3};
pub use search::{find_hdet_zeros, optimize_settings, sample_events, scan_dalitz};
