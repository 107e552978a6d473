//! Decay amplitudes and the three-photon polarization state.
//!
//! The vector kernel `V` is a cyclic sum over conjugated polarization
//! vectors; projecting it onto the positronium spin state gives the matrix
//! element `M` for each helicity configuration. The eight matrix elements
//! of one event form the unnormalized [`StateTensor`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{f_factors, CVec3, Helicity, PhotonTriple};

/// States with a norm below this are treated as vanishing.
pub const ZERO_NORM: f64 = 1e-12;

const PLUS: Helicity = Helicity::Plus;
const MINUS: Helicity = Helicity::Minus;

/// Helicities `(l1, l2, l3)` of the three photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HelicityTriple(pub [Helicity; 3]);

impl HelicityTriple {
    /// All eight triples in lexicographic order with `+` before `-`.
    pub const ALL: [HelicityTriple; 8] = [
        HelicityTriple([PLUS, PLUS, PLUS]),
        HelicityTriple([PLUS, PLUS, MINUS]),
        HelicityTriple([PLUS, MINUS, PLUS]),
        HelicityTriple([PLUS, MINUS, MINUS]),
        HelicityTriple([MINUS, PLUS, PLUS]),
        HelicityTriple([MINUS, PLUS, MINUS]),
        HelicityTriple([MINUS, MINUS, PLUS]),
        HelicityTriple([MINUS, MINUS, MINUS]),
    ];

    /// Position in [`HelicityTriple::ALL`]; `-` counts as bit 1.
    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, h| 2 * acc + usize::from(*h == MINUS))
    }

    pub fn from_index(idx: usize) -> Self {
        Self::ALL[idx & 7]
    }

    pub fn signs(&self) -> [f64; 3] {
        self.0.map(Helicity::sign)
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.map(Helicity::flipped))
    }
}

impl fmt::Display for HelicityTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}{}{}>", self.0[0], self.0[1], self.0[2])
    }
}

/// Positronium spin projection on the lab z axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum SpinProjection {
    Minus,
    Zero,
    Plus,
}

impl SpinProjection {
    pub const ALL: [SpinProjection; 3] = [Self::Minus, Self::Zero, Self::Plus];

    pub fn value(self) -> i8 {
        match self {
            Self::Minus => -1,
            Self::Zero => 0,
            Self::Plus => 1,
        }
    }
}

impl TryFrom<i8> for SpinProjection {
    type Error = Error;
    fn try_from(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(Self::Minus),
            0 => Ok(Self::Zero),
            1 => Ok(Self::Plus),
            _ => Err(Error::InvalidInput(format!(
                "spin projection must be -1, 0 or +1, got {v}"
            ))),
        }
    }
}

impl From<SpinProjection> for i8 {
    fn from(s: SpinProjection) -> i8 {
        s.value()
    }
}

impl fmt::Display for SpinProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plus => f.write_str("+1"),
            Self::Zero => f.write_str("0"),
            Self::Minus => f.write_str("-1"),
        }
    }
}

impl std::str::FromStr for SpinProjection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v: i8 = s
            .trim()
            .trim_start_matches('+')
            .parse()
            .map_err(|_| Error::InvalidInput(format!("cannot parse spin projection {s:?}")))?;
        Self::try_from(v)
    }
}

/// Complex weights of a superposition of the three spin projections,
/// ordered `(-1, 0, +1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 3]", into = "[[f64; 2]; 3]")]
pub struct SpinWeights(pub [Complex64; 3]);

impl From<[[f64; 2]; 3]> for SpinWeights {
    fn from(w: [[f64; 2]; 3]) -> Self {
        SpinWeights(w.map(|[re, im]| Complex64::new(re, im)))
    }
}

impl From<SpinWeights> for [[f64; 2]; 3] {
    fn from(w: SpinWeights) -> Self {
        w.0.map(|c| [c.re, c.im])
    }
}

impl From<SpinProjection> for SpinWeights {
    fn from(s: SpinProjection) -> Self {
        let mut w = [Complex64::new(0.0, 0.0); 3];
        w[(s.value() + 1) as usize] = Complex64::new(1.0, 0.0);
        SpinWeights(w)
    }
}

/// Label of the basis an amplitude tensor is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// Helicity kets `|+>`, `|->`.
    Circular,
    /// Linear polarization kets `|0> = |H>`, `|1> = |V>`.
    Linear,
}

/// Amplitudes `c_{abc}` of a three-qubit pure state, unnormalized.
///
/// Index `4a + 2b + c` with `+ -> 0`, `- -> 1` in the circular basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct StateTensor {
    basis: Basis,
    amplitudes: [Complex64; 8],
    norm: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateRepr {
    basis: Basis,
    amplitudes: [[f64; 2]; 8],
}

impl TryFrom<StateRepr> for StateTensor {
    type Error = Error;
    fn try_from(r: StateRepr) -> Result<Self> {
        if r.amplitudes.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(StateTensor::new(
            r.basis,
            r.amplitudes.map(|[re, im]| Complex64::new(re, im)),
        ))
    }
}

impl From<StateTensor> for StateRepr {
    fn from(s: StateTensor) -> Self {
        StateRepr {
            basis: s.basis,
            amplitudes: s.amplitudes.map(|c| [c.re, c.im]),
        }
    }
}

impl StateTensor {
    pub fn new(basis: Basis, amplitudes: [Complex64; 8]) -> Self {
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Self {
            basis,
            amplitudes,
            norm,
        }
    }

    pub fn from_real(basis: Basis, amplitudes: [f64; 8]) -> Self {
        Self::new(basis, amplitudes.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64; 8] {
        &self.amplitudes
    }

    pub fn amplitude(&self, idx: usize) -> Complex64 {
        self.amplitudes[idx]
    }

    pub fn at(&self, h: HelicityTriple) -> Complex64 {
        self.amplitudes[h.index()]
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.norm < ZERO_NORM {
            return Err(Error::ZeroNormState { norm: self.norm });
        }
        let inv = 1.0 / self.norm;
        Ok(Self::new(self.basis, self.amplitudes.map(|c| c * inv)))
    }

    /// `(|000> + |111>) / sqrt 2` in the linear basis.
    pub fn ghz() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(Basis::Linear, [s, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, s])
    }

    /// `(|001> + |010> + |100>) / sqrt 3` in the linear basis.
    pub fn w() -> Self {
        let s = 1.0 / 3f64.sqrt();
        Self::from_real(Basis::Linear, [0.0, s, s, 0.0, s, 0.0, 0.0, 0.0])
    }

    /// Computational basis ket `|abc>` with `idx = 4a + 2b + c`.
    pub fn basis_ket(basis: Basis, idx: usize) -> Self {
        let mut a = [0.0; 8];
        a[idx & 7] = 1.0;
        Self::from_real(basis, a)
    }
}

/// `V(k1, l1; k2, l2; k3, l3)`, the cyclic three-term kernel built from the
/// conjugated polarization vectors, with `a . b` the bilinear product.
pub fn v_tensor(t: &PhotonTriple, h: HelicityTriple) -> CVec3 {
    let lam = h.signs();
    let eps: [CVec3; 3] = [0, 1, 2].map(|i| t.polarization(i, h.0[i]).conj());
    let mut v = CVec3::zeros();
    for i in 0..3 {
        let j = (i + 1) % 3;
        let k = (i + 2) % 3;
        let weight = (lam[i] - lam[j]) * (lam[j] + lam[k]);
        if weight == 0.0 {
            continue;
        }
        let dot = eps[j].dot(&eps[k]);
        v += eps[i] * (dot * weight);
    }
    v
}

/// Matrix element for spin projection `s`:
/// `-sqrt 2 V_3` for `S_z = 0` and `+-V_1 + i V_2` for `S_z = +-1`.
pub fn matrix_element(t: &PhotonTriple, s: SpinProjection, h: HelicityTriple) -> Complex64 {
    project(&v_tensor(t, h), s)
}

fn project(v: &CVec3, s: SpinProjection) -> Complex64 {
    let i = Complex64::i();
    match s {
        SpinProjection::Zero => v.z * (-std::f64::consts::SQRT_2),
        SpinProjection::Plus => v.x + i * v.y,
        SpinProjection::Minus => -v.x + i * v.y,
    }
}

/// Raw matrix elements of the event as a circular-basis state.
pub fn state_tensor(t: &PhotonTriple, s: SpinProjection) -> Result<StateTensor> {
    state_tensor_superposed(t, &SpinWeights::from(s))
}

/// State for a coherent superposition of spin projections.
pub fn state_tensor_superposed(t: &PhotonTriple, w: &SpinWeights) -> Result<StateTensor> {
    let mut amps = [Complex64::new(0.0, 0.0); 8];
    for h in HelicityTriple::ALL {
        let v = v_tensor(t, h);
        amps[h.index()] = SpinProjection::ALL
            .iter()
            .zip(w.0.iter())
            .filter(|(_, w)| **w != Complex64::new(0.0, 0.0))
            .map(|(s, w)| project(&v, *s) * w)
            .sum();
    }
    let state = StateTensor::new(Basis::Circular, amps);
    if state.norm() < ZERO_NORM {
        return Err(Error::ZeroNormState { norm: state.norm() });
    }
    Ok(state)
}

/// Unpolarized decay weight `(1/3) sum_{S_z} sum_h |M|^2`.
pub fn decay_weight(t: &PhotonTriple) -> f64 {
    let total: f64 = HelicityTriple::ALL
        .iter()
        .map(|&h| {
            let v = v_tensor(t, h);
            SpinProjection::ALL
                .iter()
                .map(|&s| project(&v, s).norm_sqr())
                .sum::<f64>()
        })
        .sum();
    total / 3.0
}

/// Per-projection weights `sum_h |M_s|^2`, ordered `(-1, 0, +1)`.
pub fn spin_weights(t: &PhotonTriple) -> [f64; 3] {
    let mut out = [0.0; 3];
    for h in HelicityTriple::ALL {
        let v = v_tensor(t, h);
        for (k, s) in SpinProjection::ALL.iter().enumerate() {
            out[k] += project(&v, *s).norm_sqr();
        }
    }
    out
}

/// One closed-form coefficient and the ket it multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormEntry {
    pub label: &'static str,
    #[serde(serialize_with = "ser_ket")]
    pub ket: HelicityTriple,
    #[serde(serialize_with = "complex_pair::serialize")]
    pub value: Complex64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryRepr {
    label: String,
    ket: String,
    #[serde(with = "complex_pair")]
    value: Complex64,
}

impl TryFrom<EntryRepr> for ClosedFormEntry {
    type Error = Error;
    fn try_from(r: EntryRepr) -> Result<Self> {
        let (label, ket) = CLOSED_FORM_KETS
            .iter()
            .find(|(l, _)| *l == r.label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown closed-form label {:?}", r.label)))?;
        if ket.to_string() != r.ket {
            return Err(Error::InvalidInput(format!("{label} multiplies {ket}, not {}", r.ket)));
        }
        Ok(Self {
            label,
            ket: *ket,
            value: r.value,
        })
    }
}

impl<'de> Deserialize<'de> for ClosedFormEntry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Self::try_from(EntryRepr::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

fn ser_ket<S: serde::Serializer>(h: &HelicityTriple, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&h.to_string())
}

/// Closed-form coefficient set for one spin projection, with the global
/// factor that maps it onto the raw amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedForm {
    pub spin: SpinProjection,
    pub entries: [ClosedFormEntry; 6],
    /// Least-squares `g` with `state ~ g * closed_form`.
    #[serde(with = "complex_pair")]
    pub global_factor: Complex64,
    /// `|state - g * closed_form| / |state|`.
    pub residual: f64,
}

impl ClosedForm {
    /// Closed form expanded into an eight-component circular state.
    pub fn as_state(&self) -> StateTensor {
        let mut a = [Complex64::new(0.0, 0.0); 8];
        for e in &self.entries {
            a[e.ket.index()] = e.value;
        }
        StateTensor::new(Basis::Circular, a)
    }
}

/// Ket assignment of the closed-form coefficients, in the order they
/// multiply the kets: `(gamma, beta, alpha)` pairs.
pub const CLOSED_FORM_KETS: [(&str, HelicityTriple); 6] = [
    ("gamma1", HelicityTriple([PLUS, PLUS, MINUS])),
    ("gamma2", HelicityTriple([MINUS, MINUS, PLUS])),
    ("beta1", HelicityTriple([PLUS, MINUS, PLUS])),
    ("beta2", HelicityTriple([MINUS, PLUS, MINUS])),
    ("alpha1", HelicityTriple([MINUS, PLUS, PLUS])),
    ("alpha2", HelicityTriple([PLUS, MINUS, MINUS])),
];

/// Closed-form state coefficients.
///
/// `S_z = 0`: `gamma0 = sin t3 f12`, `beta0 = sin t2 f13`,
/// `alpha0 = sin t1 f23`, entering as `gamma0 (|++-> - |--+>) + ...`.
///
/// `S_z = +-1`: `gamma(1) = e^{+-i p3} (cos t3 - 1) f12` on `|++->`,
/// `gamma(2) = e^{+-i p3} (-cos t3 - 1) f12` on `|--+>`, and likewise for
/// `beta` (photon 2, `f13`) and `alpha` (photon 1, `f23`). The `alpha`
/// pair uses the polar angle of photon 1.
///
/// These forms assume each same-helicity product `eps*_i . eps*_j` equals
/// `f_ij / 2` with no phase, which holds when the decay plane is
/// perpendicular to z. For tilted planes the residual against the raw
/// amplitudes is reported rather than hidden.
pub fn closed_form_coefficients(t: &PhotonTriple, s: SpinProjection) -> Result<ClosedForm> {
    let [f12, f13, f23] = f_factors(t);
    let [(t1, p1), (t2, p2), (t3, p3)] = t.angles();
    let values: [Complex64; 6] = match s {
        SpinProjection::Zero => {
            let g = t3.sin() * f12;
            let b = t2.sin() * f13;
            let a = t1.sin() * f23;
            [g, -g, b, -b, a, -a].map(|v| Complex64::new(v, 0.0))
        }
        SpinProjection::Plus | SpinProjection::Minus => {
            let sign = f64::from(s.value());
            let ph = |p: f64| Complex64::from_polar(1.0, sign * p);
            [
                ph(p3) * ((t3.cos() - 1.0) * f12),
                ph(p3) * ((-t3.cos() - 1.0) * f12),
                ph(p2) * ((t2.cos() - 1.0) * f13),
                ph(p2) * ((-t2.cos() - 1.0) * f13),
                ph(p1) * ((t1.cos() - 1.0) * f23),
                ph(p1) * ((-t1.cos() - 1.0) * f23),
            ]
        }
    };
    let entries = [0, 1, 2, 3, 4, 5].map(|k| ClosedFormEntry {
        label: CLOSED_FORM_KETS[k].0,
        ket: CLOSED_FORM_KETS[k].1,
        value: values[k],
    });
    let raw = state_tensor(t, s)?;
    let mut out = ClosedForm {
        spin: s,
        entries,
        global_factor: Complex64::new(0.0, 0.0),
        residual: 0.0,
    };
    let (g, r) = global_factor(&raw, &out.as_state());
    out.global_factor = g;
    out.residual = r;
    Ok(out)
}

/// Best complex `g` with `state ~ g * reference` and the relative residual.
pub fn global_factor(state: &StateTensor, reference: &StateTensor) -> (Complex64, f64) {
    let num: Complex64 = reference
        .amplitudes()
        .iter()
        .zip(state.amplitudes())
        .map(|(r, s)| r.conj() * s)
        .sum();
    let den = reference.norm().powi(2);
    let g = if den > 0.0 { num / den } else { Complex64::new(0.0, 0.0) };
    let resid: f64 = state
        .amplitudes()
        .iter()
        .zip(reference.amplitudes())
        .map(|(s, r)| (s - g * r).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let scale = state.norm();
    (g, if scale > 0.0 { resid / scale } else { resid })
}

pub(crate) mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{build_event, DalitzPoint, Orientation};
    use approx::assert_abs_diff_eq;

    fn symmetric() -> PhotonTriple {
        build_event(DalitzPoint::symmetric(), Orientation::identity()).unwrap()
    }

    #[test]
    fn helicity_index_order() {
        for (k, h) in HelicityTriple::ALL.iter().enumerate() {
            assert_eq!(h.index(), k);
            assert_eq!(HelicityTriple::from_index(k), *h);
        }
        assert_eq!(HelicityTriple::ALL[1].to_string(), "|++->");
    }

    #[test]
    fn spin_projection_parse() {
        assert_eq!("+1".parse::<SpinProjection>().unwrap(), SpinProjection::Plus);
        assert_eq!("-1".parse::<SpinProjection>().unwrap(), SpinProjection::Minus);
        assert_eq!("0".parse::<SpinProjection>().unwrap(), SpinProjection::Zero);
        assert!("2".parse::<SpinProjection>().is_err());
    }

    #[test]
    fn equal_helicities_vanish() {
        let t = build_event(DalitzPoint::new(0.9, 0.55).unwrap(), Orientation::new(0.4, 1.3, 2.2)).unwrap();
        for h in [HelicityTriple::ALL[0], HelicityTriple::ALL[7]] {
            assert_eq!(v_tensor(&t, h).norm(), 0.0);
            for s in SpinProjection::ALL {
                assert_eq!(matrix_element(&t, s, h).norm(), 0.0);
            }
        }
    }

    #[test]
    fn symmetric_sz0_state() {
        let st = state_tensor(&symmetric(), SpinProjection::Zero).unwrap();
        // |++->, |--+>, |+-+>, |-+->, |-++>, |+-->
        let order = [1, 6, 2, 5, 4, 3];
        let first = st.amplitude(order[0]);
        for (k, &idx) in order.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!((st.amplitude(idx) - first * sign).norm(), 0.0, epsilon = 1e-14);
        }
        // M = -sqrt2 V3 = -2 * gamma0 with gamma0 = 3/2
        assert_abs_diff_eq!(first.re, -3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(first.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn collinear_pair_kills_its_coefficient() {
        // x = (1, 1/2, 1/2): photons 2 and 3 collinear, f23 = 0
        let t = build_event(DalitzPoint::new(1.0, 0.5).unwrap(), Orientation::identity()).unwrap();
        let st = state_tensor(&t, SpinProjection::Zero).unwrap();
        assert!(st.amplitude(4).norm() < 1e-15);
        assert!(st.amplitude(3).norm() < 1e-15);
        // x = (1/2, 1/2, 1): photons 1 and 2 collinear, gamma0 = 0
        let t = build_event(DalitzPoint::new(0.5, 0.5).unwrap(), Orientation::identity()).unwrap();
        let st = state_tensor(&t, SpinProjection::Zero).unwrap();
        assert!(st.amplitude(1).norm() < 1e-15);
    }

    #[test]
    fn planar_closed_forms() {
        let t = build_event(DalitzPoint::new(0.85, 0.6).unwrap(), Orientation::new(0.7, 0.0, 0.0)).unwrap();
        let [f12, f13, f23] = f_factors(&t);
        let cf = closed_form_coefficients(&t, SpinProjection::Zero).unwrap();
        assert_abs_diff_eq!(cf.entries[0].value.re, f12, epsilon = 1e-14);
        assert_abs_diff_eq!(cf.entries[2].value.re, f13, epsilon = 1e-14);
        assert_abs_diff_eq!(cf.entries[4].value.re, f23, epsilon = 1e-14);
        assert!(cf.residual < 1e-13);
        assert_abs_diff_eq!(cf.global_factor.re, -2.0, epsilon = 1e-13);

        let cf = closed_form_coefficients(&t, SpinProjection::Plus).unwrap();
        assert_abs_diff_eq!(cf.entries[0].value.norm(), f12, epsilon = 1e-14);
        assert_abs_diff_eq!(cf.entries[1].value.norm(), f12, epsilon = 1e-14);
        assert!(cf.residual < 1e-13);
        assert_abs_diff_eq!(cf.global_factor.re, -std::f64::consts::SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn pole_case_gamma_vanishes() {
        // photon 3 along +z: tilt the plane so k3 hits the pole
        let d = DalitzPoint::new(0.8, 0.7).unwrap();
        let t0 = build_event(d, Orientation::identity()).unwrap();
        let (_, phi3) = t0.angles_of(2);
        // turn k3 onto -x, then Ry(pi/2) carries -x to +z
        let o = Orientation::new(0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI - phi3);
        let t = build_event(d, o).unwrap();
        assert_abs_diff_eq!(t.angles_of(2).0, 0.0, epsilon = 1e-7);
        let cf = closed_form_coefficients(&t, SpinProjection::Plus).unwrap();
        assert!(cf.entries[0].value.norm() < 1e-13);
    }

    #[test]
    fn state_json_roundtrip() {
        let st = state_tensor(&symmetric(), SpinProjection::Plus).unwrap();
        let js = serde_json::to_string(&st).unwrap();
        assert!(js.starts_with(r#"{"basis":"circular","amplitudes":[["#));
        let back: StateTensor = serde_json::from_str(&js).unwrap();
        assert_eq!(back, st);
        assert!(serde_json::from_str::<StateTensor>(r#"{"basis":"circular","amplitudes":[]}"#).is_err());
    }

    #[test]
    fn superposition_is_linear() {
        let t = build_event(DalitzPoint::new(0.7, 0.9).unwrap(), Orientation::new(1.0, 0.5, 0.2)).unwrap();
        let w = SpinWeights([
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.0, 0.8),
        ]);
        let mix = state_tensor_superposed(&t, &w).unwrap();
        for h in HelicityTriple::ALL {
            let direct: Complex64 = SpinProjection::ALL
                .iter()
                .zip(w.0)
                .map(|(s, c)| matrix_element(&t, *s, h) * c)
                .sum();
            assert!((mix.at(h) - direct).norm() < 1e-14);
        }
    }
}
