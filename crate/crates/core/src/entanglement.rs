//! Three-qubit entanglement: basis change, Cayley hyperdeterminant,
//! three-tangle, bipartite Schmidt coefficients and the
//! PRODUCT / BISEPARABLE / W / GHZ decision tree.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{complex_pair, Basis, StateTensor};
use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

/// Thresholds used by [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// A cut is rank 1 when its second singular value is below this.
    pub rank: f64,
    /// States with three-tangle below this count as W class.
    pub tangle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-9,
            tangle: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("rank", self.rank), ("tangle", self.tangle)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "tolerance {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Single-photon map from helicity to linear kets:
/// `|+> = (|0> + i|1>)/sqrt 2`, `|-> = (|0> - i|1>)/sqrt 2`.
/// Column `lambda` holds the linear components of `|lambda>`.
pub fn circular_to_linear_matrix() -> Matrix2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(0.0, s), c(0.0, -s)]]
}

fn dagger(m: &Matrix2) -> Matrix2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

/// Applies `m0 (x) m1 (x) m2` to the eight amplitudes.
pub fn apply_local(amps: &[Complex64; 8], ops: [&Matrix2; 3]) -> [Complex64; 8] {
    let mut cur = *amps;
    for (slot, op) in ops.iter().enumerate() {
        let shift = 2 - slot;
        let mut next = [c(0.0, 0.0); 8];
        for (idx, out) in next.iter_mut().enumerate() {
            let bit = (idx >> shift) & 1;
            let base = idx & !(1 << shift);
            *out = op[bit][0] * cur[base] + op[bit][1] * cur[base | (1 << shift)];
        }
        cur = next;
    }
    cur
}

/// Rewrites a helicity-basis state in linear polarization kets.
pub fn to_linear_basis(s: &StateTensor) -> Result<StateTensor> {
    if s.basis() != Basis::Circular {
        return Err(Error::Basis("state is already in the linear basis".into()));
    }
    let u = circular_to_linear_matrix();
    Ok(StateTensor::new(
        Basis::Linear,
        apply_local(s.amplitudes(), [&u, &u, &u]),
    ))
}

/// Inverse of [`to_linear_basis`].
pub fn to_circular_basis(s: &StateTensor) -> Result<StateTensor> {
    if s.basis() != Basis::Linear {
        return Err(Error::Basis("state is already in the circular basis".into()));
    }
    let u = dagger(&circular_to_linear_matrix());
    Ok(StateTensor::new(
        Basis::Circular,
        apply_local(s.amplitudes(), [&u, &u, &u]),
    ))
}

/// Cayley hyperdeterminant of raw (not normalized) amplitudes
/// `a[4i + 2j + k]`.
pub fn cayley(a: &[Complex64; 8]) -> Complex64 {
    let [a000, a001, a010, a011, a100, a101, a110, a111] = *a;
    let squares =
        a000 * a000 * a111 * a111 + a001 * a001 * a110 * a110 + a010 * a010 * a101 * a101 + a100 * a100 * a011 * a011;
    let pairs = a000 * a111 * a011 * a100
        + a000 * a111 * a101 * a010
        + a000 * a111 * a110 * a001
        + a011 * a100 * a101 * a010
        + a011 * a100 * a110 * a001
        + a101 * a010 * a110 * a001;
    let quads = a000 * a110 * a101 * a011 + a111 * a001 * a010 * a100;
    squares - pairs * 2.0 + quads * 4.0
}

/// Hyperdeterminant of the normalized state.
pub fn hyperdeterminant(s: &StateTensor) -> Result<Complex64> {
    Ok(cayley(s.normalized()?.amplitudes()))
}

/// `4 |Hdet|` of the normalized state, clamped to `[0, 1]`.
pub fn three_tangle(s: &StateTensor) -> Result<f64> {
    Ok(tangle_from_hdet(hyperdeterminant(s)?))
}

fn tangle_from_hdet(h: Complex64) -> f64 {
    (4.0 * h.norm()).min(1.0)
}

/// Product `(-a + b - g)(a - b - g)(-a - b + g)(a + b + g)` for the
/// `S_z = 0` coefficients `(alpha0, beta0, gamma0)`.
///
/// For coefficients with `alpha0^2 + beta0^2 + gamma0^2 = 1/2` (unit-norm
/// state), the Cayley hyperdeterminant of [`s_z0_state`] after
/// [`to_linear_basis`] equals `S_Z0_PRODUCT_FACTOR` times this value.
pub fn s_z0_hdet_product(alpha0: f64, beta0: f64, gamma0: f64) -> f64 {
    (-alpha0 + beta0 - gamma0) * (alpha0 - beta0 - gamma0) * (-alpha0 - beta0 + gamma0) * (alpha0 + beta0 + gamma0)
}

/// Constant between [`s_z0_hdet_product`] and the linear-basis Cayley
/// hyperdeterminant. In the circular basis the constant is `+1`: each
/// local basis change multiplies Hdet by `det(U)^2 = -1`.
pub const S_Z0_PRODUCT_FACTOR: f64 = -1.0;

/// `gamma0 (|++-> - |--+>) + beta0 (|+-+> - |-+->) + alpha0 (|-++> - |+-->)`.
pub fn s_z0_state(alpha0: f64, beta0: f64, gamma0: f64) -> StateTensor {
    let mut a = [0.0; 8];
    a[0b001] = gamma0;
    a[0b110] = -gamma0;
    a[0b010] = beta0;
    a[0b101] = -beta0;
    a[0b100] = alpha0;
    a[0b011] = -alpha0;
    StateTensor::from_real(Basis::Circular, a)
}

/// Bipartition of the three photons into one photon and the rest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cut {
    /// `1|23`
    One,
    /// `2|13`
    Two,
    /// `3|12`
    Three,
}

impl Cut {
    pub const ALL: [Cut; 3] = [Cut::One, Cut::Two, Cut::Three];

    fn slot(self) -> usize {
        match self {
            Cut::One => 0,
            Cut::Two => 1,
            Cut::Three => 2,
        }
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cut::One => "1|23",
            Cut::Two => "2|13",
            Cut::Three => "3|12",
        })
    }
}

impl FromStr for Cut {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1|23" | "1" => Ok(Cut::One),
            "2|13" | "2" => Ok(Cut::Two),
            "3|12" | "3" => Ok(Cut::Three),
            _ => Err(Error::InvalidInput(format!("unknown cut {s:?}"))),
        }
    }
}

/// Descending singular values of the `2 x 4` matrix that separates the
/// photon of `cut` from the other two, for the normalized state.
///
/// The smaller value is obtained as `sqrt(det) / s1` with the determinant
/// summed from 2x2 minors, which keeps it accurate near rank 1.
pub fn bipartition_schmidt(s: &StateTensor, cut: Cut) -> Result<[f64; 2]> {
    let n = s.normalized()?;
    let a = n.amplitudes();
    let shift = 2 - cut.slot();
    let mut m = [[c(0.0, 0.0); 4]; 2];
    for (idx, amp) in a.iter().enumerate() {
        let row = (idx >> shift) & 1;
        let low = idx & ((1 << shift) - 1);
        let high = idx >> (shift + 1);
        let col = (high << shift) | low;
        m[row][col] = *amp;
    }
    let p: f64 = m[0].iter().map(|z| z.norm_sqr()).sum();
    let q: f64 = m[1].iter().map(|z| z.norm_sqr()).sum();
    let off: Complex64 = m[0].iter().zip(&m[1]).map(|(x, y)| x * y.conj()).sum();
    let mut det = 0.0;
    for j in 0..4 {
        for k in (j + 1)..4 {
            det += (m[0][j] * m[1][k] - m[0][k] * m[1][j]).norm_sqr();
        }
    }
    let half = 0.5 * (p + q);
    let disc = (0.25 * (p - q) * (p - q) + off.norm_sqr()).sqrt();
    let s1 = (half + disc).sqrt();
    let s2 = if s1 > 0.0 { det.sqrt() / s1 } else { 0.0 };
    Ok([s1, s2.min(s1)])
}

/// Entanglement class of a pure three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntanglementClass {
    Product,
    Biseparable(Cut),
    WClass,
    GhzClass,
}

impl EntanglementClass {
    /// Small integer code used in numeric scan columns.
    pub fn code(&self) -> u8 {
        match self {
            Self::Product => 0,
            Self::Biseparable(_) => 1,
            Self::WClass => 2,
            Self::GhzClass => 3,
        }
    }

    pub fn is_factorizing(&self) -> bool {
        matches!(self, Self::Product | Self::Biseparable(_))
    }
}

impl fmt::Display for EntanglementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Product => f.write_str("PRODUCT"),
            Self::Biseparable(cut) => write!(f, "BISEPARABLE({cut})"),
            Self::WClass => f.write_str("W_CLASS"),
            Self::GhzClass => f.write_str("GHZ_CLASS"),
        }
    }
}

impl FromStr for EntanglementClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "PRODUCT" => Ok(Self::Product),
            "W_CLASS" => Ok(Self::WClass),
            "GHZ_CLASS" => Ok(Self::GhzClass),
            _ => s
                .strip_prefix("BISEPARABLE(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::InvalidInput(format!("unknown class {s:?}")))?
                .parse()
                .map(Self::Biseparable),
        }
    }
}

impl Serialize for EntanglementClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntanglementClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything [`classify`] computed on the way to the class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntanglementReport {
    #[serde(with = "complex_pair")]
    pub hyperdeterminant: Complex64,
    pub three_tangle: f64,
    /// Schmidt coefficients for cuts `1|23`, `2|13`, `3|12`.
    pub singular_values: [[f64; 2]; 3],
    pub class: EntanglementClass,
    pub tolerances: Tolerances,
}

/// Runs the decision tree: all cuts rank 1 is PRODUCT, one rank-1 cut is
/// BISEPARABLE, otherwise W below the tangle threshold and GHZ above it.
///
/// Two rank-1 cuts cannot occur for an exact pure state; if rounding
/// produces them the state is reported as PRODUCT.
pub fn classify(s: &StateTensor, tol: &Tolerances) -> Result<EntanglementReport> {
    tol.validate()?;
    let hdet = hyperdeterminant(s)?;
    let tangle = tangle_from_hdet(hdet);
    let mut sv = [[0.0; 2]; 3];
    for (k, cut) in Cut::ALL.iter().enumerate() {
        sv[k] = bipartition_schmidt(s, *cut)?;
    }
    let rank_one: Vec<Cut> = Cut::ALL
        .iter()
        .zip(&sv)
        .filter(|(_, v)| v[1] < tol.rank)
        .map(|(c, _)| *c)
        .collect();
    let class = match rank_one.as_slice() {
        [] if tangle < tol.tangle => EntanglementClass::WClass,
        [] => EntanglementClass::GhzClass,
        [cut] => EntanglementClass::Biseparable(*cut),
        _ => EntanglementClass::Product,
    };
    Ok(EntanglementReport {
        hyperdeterminant: hdet,
        three_tangle: tangle,
        singular_values: sv,
        class,
        tolerances: *tol,
    })
}
