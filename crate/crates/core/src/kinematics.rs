//! Three-photon kinematics of positronium decay at rest.
//!
//! Units are fixed by setting the total energy to `m = 2`, so each photon
//! energy equals its dimensionless Dalitz fraction `x_i = 2 k_i / m`.
//! The reference orientation places the decay plane in the lab x-y plane
//! with photon 1 along +x; an [`Orientation`] rotates that configuration
//! into the lab. The spin quantization axis is always the lab z axis.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Rotation3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type CVec3 = Vector3<Complex64>;

/// Energy fractions below this are treated as a vanishing photon.
pub const DEGENERATE_ENERGY: f64 = 1e-9;
/// Minimum `|k1 x k2|` for the decay plane to be defined.
pub const DEGENERATE_CROSS: f64 = 1e-12;
/// Below this `sin(theta)` the azimuth is pinned to zero.
pub const POLE_SIN: f64 = 1e-12;

const X3_SLACK: f64 = 4.0 * f64::EPSILON;

/// Point of the massless three-body Dalitz triangle.
///
/// Only `x1` and `x2` are stored; `x3 = 2 - x1 - x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DalitzRepr", into = "DalitzRepr")]
pub struct DalitzPoint {
    x1: f64,
    x2: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DalitzRepr {
    x1: f64,
    x2: f64,
}

impl TryFrom<DalitzRepr> for DalitzPoint {
    type Error = Error;
    fn try_from(r: DalitzRepr) -> Result<Self> {
        DalitzPoint::new(r.x1, r.x2)
    }
}

impl From<DalitzPoint> for DalitzRepr {
    fn from(d: DalitzPoint) -> Self {
        DalitzRepr { x1: d.x1, x2: d.x2 }
    }
}

impl DalitzPoint {
    /// Validates `0 <= x1, x2, x3 <= 1`.
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(x1) {
            return Err(Error::InvalidInput(format!("x1 out of range: {x1} not in [0, 1]")));
        }
        if !in_unit(x2) {
            return Err(Error::InvalidInput(format!("x2 out of range: {x2} not in [0, 1]")));
        }
        // one ulp of slack so grid points on x1 + x2 = 1 are accepted
        let x3 = 2.0 - x1 - x2;
        if !(-X3_SLACK..=1.0 + X3_SLACK).contains(&x3) {
            return Err(Error::InvalidInput(format!(
                "x3 = 2 - x1 - x2 out of range: {x3} not in [0, 1]"
            )));
        }
        Ok(Self { x1, x2 })
    }

    /// The fully symmetric point `x = (2/3, 2/3, 2/3)`.
    pub fn symmetric() -> Self {
        Self {
            x1: 2.0 / 3.0,
            x2: 2.0 / 3.0,
        }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn x3(&self) -> f64 {
        (2.0 - self.x1 - self.x2).clamp(0.0, 1.0)
    }

    pub fn fractions(&self) -> [f64; 3] {
        [self.x1, self.x2, self.x3()]
    }

    /// True when no photon is soft enough to leave its direction undefined.
    pub fn is_interior(&self) -> bool {
        self.fractions().iter().all(|&x| x >= DEGENERATE_ENERGY)
    }
}

/// Uniform map from the unit square onto the Dalitz triangle.
///
/// The triangle `{x1, x2 <= 1, x1 + x2 >= 1}` is exactly the upper half of
/// the unit square. Points of the lower half are folded through the centre
/// `(1/2, 1/2)`, which is a measure-preserving two-to-one map. Inputs are
/// clamped to `[0, 1]`.
pub fn dalitz_sample(u1: f64, u2: f64) -> DalitzPoint {
    let u1 = if u1.is_nan() { 0.5 } else { u1.clamp(0.0, 1.0) };
    let u2 = if u2.is_nan() { 0.5 } else { u2.clamp(0.0, 1.0) };
    let (x1, x2) = if u1 + u2 >= 1.0 { (u1, u2) } else { (1.0 - u1, 1.0 - u2) };
    DalitzPoint { x1, x2 }
}

/// ZYZ Euler angles: `R = Rz(alpha) Ry(beta) Rz(gamma)`.
///
/// Stored with `alpha, gamma in [0, 2pi)` and `beta in [0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "OrientationRepr", into = "OrientationRepr")]
pub struct Orientation {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrientationRepr {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl From<OrientationRepr> for Orientation {
    fn from(r: OrientationRepr) -> Self {
        Orientation::new(r.alpha, r.beta, r.gamma)
    }
}

impl From<Orientation> for OrientationRepr {
    fn from(o: Orientation) -> Self {
        OrientationRepr {
            alpha: o.alpha,
            beta: o.beta,
            gamma: o.gamma,
        }
    }
}

fn wrap_tau(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl Default for Orientation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Orientation {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        // beta -> -beta is absorbed by alpha + pi, gamma + pi.
        let mut b = beta.rem_euclid(TAU);
        let (mut a, mut g) = (alpha, gamma);
        if b > PI {
            b = TAU - b;
            a += PI;
            g += PI;
        }
        Self {
            alpha: wrap_tau(a),
            beta: b,
            gamma: wrap_tau(g),
        }
    }

    pub fn identity() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rotation(&self) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&Vector3::z_axis(), self.alpha)
            * Rotation3::from_axis_angle(&Vector3::y_axis(), self.beta)
            * Rotation3::from_axis_angle(&Vector3::z_axis(), self.gamma)
    }

    /// Uniform (Haar) orientation from three unit-interval variates.
    pub fn from_unit(u1: f64, u2: f64, u3: f64) -> Self {
        let cos_beta = (1.0 - 2.0 * u2).clamp(-1.0, 1.0);
        Self::new(TAU * u1, cos_beta.acos(), TAU * u3)
    }
}

/// Polar and azimuthal angle of a unit vector.
///
/// The azimuth is set to zero at the poles, where it is undefined.
pub fn direction_angles(k: &Vec3) -> (f64, f64) {
    let theta = k.z.clamp(-1.0, 1.0).acos();
    let sin_theta = k.x.hypot(k.y);
    // adding 0.0 turns a -0.0 component into +0.0, so phi stays in (-pi, pi]
    let phi = if sin_theta < POLE_SIN {
        0.0
    } else {
        (k.y + 0.0).atan2(k.x)
    };
    (theta, phi)
}

pub fn unit_from_angles(theta: f64, phi: f64) -> Vec3 {
    Vec3::new(phi.cos() * theta.sin(), phi.sin() * theta.sin(), theta.cos())
}

/// One decay event: three photon momenta in the lab frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleRepr", into = "TripleRepr")]
pub struct PhotonTriple {
    dalitz: DalitzPoint,
    orientation: Orientation,
    energies: [f64; 3],
    directions: [Vec3; 3],
}

#[derive(Serialize, Deserialize)]
struct TripleRepr {
    dalitz: DalitzPoint,
    orientation: Orientation,
    #[serde(default, skip_deserializing)]
    energies: [f64; 3],
    #[serde(default, skip_deserializing)]
    directions: [[f64; 3]; 3],
    #[serde(default, skip_deserializing)]
    theta: [f64; 3],
    #[serde(default, skip_deserializing)]
    phi: [f64; 3],
}

impl TryFrom<TripleRepr> for PhotonTriple {
    type Error = Error;
    fn try_from(r: TripleRepr) -> Result<Self> {
        build_event(r.dalitz, r.orientation)
    }
}

impl From<PhotonTriple> for TripleRepr {
    fn from(t: PhotonTriple) -> Self {
        let angles = t.angles();
        TripleRepr {
            dalitz: t.dalitz,
            orientation: t.orientation,
            energies: t.energies,
            directions: t.directions.map(|d| [d.x, d.y, d.z]),
            theta: angles.map(|a| a.0),
            phi: angles.map(|a| a.1),
        }
    }
}

impl PhotonTriple {
    pub fn dalitz(&self) -> DalitzPoint {
        self.dalitz
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn energies(&self) -> [f64; 3] {
        self.energies
    }

    pub fn directions(&self) -> &[Vec3; 3] {
        &self.directions
    }

    /// `(theta, phi)` of photon `idx` (0-based).
    pub fn angles_of(&self, idx: usize) -> (f64, f64) {
        direction_angles(&self.directions[idx])
    }

    pub fn angles(&self) -> [(f64, f64); 3] {
        [0, 1, 2].map(|i| self.angles_of(i))
    }

    pub fn momentum_residual(&self) -> f64 {
        (0..3)
            .map(|i| self.directions[i] * self.energies[i])
            .sum::<Vec3>()
            .amax()
    }

    pub fn energy_residual(&self) -> f64 {
        (self.energies.iter().sum::<f64>() - 2.0).abs()
    }

    /// Largest deviation of any direction from unit length.
    pub fn direction_norm_residual(&self) -> f64 {
        self.directions
            .iter()
            .map(|d| (d.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// The decay-plane polarization vector of photon `idx` for `helicity`.
    pub fn polarization(&self, idx: usize, helicity: Helicity) -> PolarizationVector {
        let (theta, phi) = self.angles_of(idx);
        polarization_vector(theta, phi, helicity)
    }

    /// Same event with photons relabelled: photon `i` of the result is
    /// photon `perm[i]` of `self`. Orientation metadata is kept.
    pub fn permuted(&self, perm: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return Err(Error::InvalidInput(format!("not a permutation of (0, 1, 2): {perm:?}")));
            }
            seen[p] = true;
        }
        let energies = perm.map(|p| self.energies[p]);
        Ok(Self {
            dalitz: DalitzPoint {
                x1: energies[0],
                x2: energies[1],
            },
            orientation: self.orientation,
            energies,
            directions: perm.map(|p| self.directions[p]),
        })
    }
}

/// Builds the event for Dalitz point `d`, rotated by `o`.
///
/// In the reference orientation photon 1 is along +x, photon 2 lies in the
/// upper half of the x-y plane at the opening angle fixed by the law of
/// cosines, and photon 3 balances the momentum.
pub fn build_event(d: DalitzPoint, o: Orientation) -> Result<PhotonTriple> {
    let [x1, x2, x3] = d.fractions();
    if let Some(i) = [x1, x2, x3].iter().position(|&x| x < DEGENERATE_ENERGY) {
        return Err(Error::DegenerateKinematics(format!(
            "photon {} has vanishing energy x{} = {:e}",
            i + 1,
            i + 1,
            [x1, x2, x3][i]
        )));
    }
    // 1 - cos12 = 2 (x1 + x2 - 1) / (x1 x2); going through the excess keeps
    // the opening angle accurate near the collinear edge x3 = 1
    let excess = x1 + x2 - 1.0;
    let excess = if excess.abs() <= X3_SLACK { 0.0 } else { excess };
    let f12 = (2.0 * excess / (x1 * x2)).clamp(0.0, 2.0);
    let cos12 = 1.0 - f12;
    let sin12 = (f12 * (2.0 - f12)).sqrt();
    let k1 = Vec3::x();
    let k2 = Vec3::new(cos12, sin12, 0.0);
    let k3 = -(k1 * x1 + k2 * x2) / x3;

    let rot = o.rotation();
    Ok(PhotonTriple {
        dalitz: d,
        orientation: o,
        energies: [x1, x2, x3],
        directions: [rot * k1, rot * k2, rot * k3],
    })
}

/// Unit normal `k1 x k2 / |k1 x k2|` of the decay plane.
pub fn plane_normal(t: &PhotonTriple) -> Result<Vec3> {
    let n = t.directions[0].cross(&t.directions[1]);
    let len = n.norm();
    if len < DEGENERATE_CROSS {
        return Err(Error::DegenerateKinematics(format!(
            "photons 1 and 2 are collinear (|k1 x k2| = {len:e}); decay plane undefined"
        )));
    }
    Ok(n / len)
}

/// Photon helicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Helicity {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Helicity {
    pub fn sign(self) -> f64 {
        match self {
            Helicity::Plus => 1.0,
            Helicity::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Helicity::Plus => Helicity::Minus,
            Helicity::Minus => Helicity::Plus,
        }
    }
}

impl fmt::Display for Helicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Helicity::Plus => "+",
            Helicity::Minus => "-",
        })
    }
}

/// Circular polarization vector of a photon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationVector {
    components: CVec3,
    direction: Vec3,
    helicity: Helicity,
}

impl PolarizationVector {
    pub fn components(&self) -> &CVec3 {
        &self.components
    }

    pub fn conj(&self) -> CVec3 {
        self.components.map(|c| c.conj())
    }

    pub fn direction(&self) -> &Vec3 {
        &self.direction
    }

    pub fn helicity(&self) -> Helicity {
        self.helicity
    }

    /// Complex (bilinear) dot product with the momentum direction.
    pub fn transversality(&self) -> Complex64 {
        self.components
            .iter()
            .zip(self.direction.iter())
            .map(|(e, k)| e * k)
            .sum()
    }
}

/// `eps(k, lambda) = -(lambda / sqrt 2) (cos t cos p - i lambda sin p,
/// cos t sin p + i lambda cos p, -sin t)` for `k` at polar angle `t` and
/// azimuth `p`.
///
/// At `theta = 0` this gives `-(1/sqrt 2)(1, i, 0)` for positive helicity;
/// the overall sign is kept.
pub fn polarization_vector(theta: f64, phi: f64, helicity: Helicity) -> PolarizationVector {
    let lam = helicity.sign();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let pref = -lam * std::f64::consts::FRAC_1_SQRT_2;
    let components = CVec3::new(
        Complex64::new(ct * cp, -lam * sp),
        Complex64::new(ct * sp, lam * cp),
        Complex64::new(-st, 0.0),
    ) * Complex64::new(pref, 0.0);
    PolarizationVector {
        components,
        direction: unit_from_angles(theta, phi),
        helicity,
    }
}

/// `f_ij = 1 - k_i . k_j` for photon labels `i, j` in `1..=3`.
pub fn f_factor(t: &PhotonTriple, i: usize, j: usize) -> Result<f64> {
    if i == j || !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(Error::Index { i, j });
    }
    let dot = t.directions[i - 1].dot(&t.directions[j - 1]);
    Ok((1.0 - dot).clamp(0.0, 2.0))
}

/// The three `f` factors ordered as `(f12, f13, f23)`.
pub fn f_factors(t: &PhotonTriple) -> [f64; 3] {
    let f = |i: usize, j: usize| (1.0 - t.directions[i].dot(&t.directions[j])).clamp(0.0, 2.0);
    [f(0, 1), f(0, 2), f(1, 2)]
}

/// Opening cosine predicted from the energies alone.
pub fn law_of_cosines(d: &DalitzPoint, i: usize, j: usize) -> f64 {
    let x = d.fractions();
    let l = 3 - i - j;
    (x[l] * x[l] - x[i] * x[i] - x[j] * x[j]) / (2.0 * x[i] * x[j])
}
