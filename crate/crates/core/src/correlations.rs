//! Correlation functions in the two-component (qubit / Jones) and the
//! three-component (spin-1 adjoint) descriptions of photon polarization.
//!
//! Two-party correlators of the deformed singlet use spin operators
//! `S = sigma / 2`. Three-party qubit correlators use bare Pauli matrices.
//! Three-party spin-1 correlators use `(S_i)_jk = -i eps_ijk`.

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::{Basis, HelicityTriple, StateTensor, ZERO_NORM};
use crate::entanglement::Matrix2;
use crate::error::{Error, Result};
use crate::kinematics::{CVec3, PhotonTriple, Vec3};

/// Tolerance on unit norms and orthonormality of analyzer input.
pub const SETTING_TOL: f64 = 1e-12;

/// Classical (local hidden variable) bound on the Mermin combination.
pub const MERMIN_CLASSICAL_BOUND: f64 = 2.0;
/// Hybrid local-nonlocal bound on the Svetlichny combination.
pub const SVETLICHNY_CLASSICAL_BOUND: f64 = 4.0;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_unit(v: &Vec3, what: &str) -> Result<()> {
    if (v.norm() - 1.0).abs() > SETTING_TOL || !v.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "{what} must be a unit vector, |v| = {}",
            v.norm()
        )));
    }
    Ok(())
}

/// `a . sigma` as a 2x2 matrix.
pub fn pauli_dot(a: &Vec3) -> Matrix2 {
    [[c(a.z, 0.0), c(a.x, -a.y)], [c(a.x, a.y), c(-a.z, 0.0)]]
}

/// Two-qubit pure state, amplitudes ordered `|00>, |01>, |10>, |11>` with
/// `0 = up` (or `+`, or `H`) and `1 = down` (or `-`, or `V`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState(pub [Complex64; 4]);

impl TwoQubitState {
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `(|up down> - e^{i alpha} |down up>) / sqrt 2`.
pub fn deformed_singlet(alpha: f64) -> TwoQubitState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitState([c(0.0, 0.0), c(s, 0.0), -Complex64::from_polar(s, alpha), c(0.0, 0.0)])
}

/// `(|H>|V> + e^{i alpha} |V>|H>) / sqrt 2`, which is
/// [`deformed_singlet`] at `alpha + pi` after `up -> H`, `down -> V`.
pub fn linear_deformed_pair(alpha: f64) -> TwoQubitState {
    deformed_singlet(alpha + std::f64::consts::PI)
}

/// Two-photon state of para-positronium decay, `(|++> - |-->) / sqrt 2`.
pub fn para_pair() -> TwoQubitState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    TwoQubitState([c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)])
}

/// `-(1/4) [cos(alpha) a.b + a_z b_z (1 - cos alpha) - (a x b)_z sin(alpha)]`.
pub fn deformed_correlation_closed(alpha: f64, a: &Vec3, b: &Vec3) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    -0.25 * (ca * a.dot(b) + a.z * b.z * (1.0 - ca) - a.cross(b).z * sa)
}

/// `<psi| (x)_i (axis_i . sigma) |psi> / <psi|psi>` for an `n`-qubit state
/// with `2^n` amplitudes, returned with its imaginary part.
pub fn pauli_correlation_complex(amps: &[Complex64], axes: &[Vec3]) -> Result<Complex64> {
    let ops: Vec<Matrix2> = axes.iter().map(pauli_dot).collect();
    let refs: Vec<&Matrix2> = ops.iter().collect();
    expectation_2d(amps, &refs)
}

fn expectation_2d(amps: &[Complex64], ops: &[&Matrix2]) -> Result<Complex64> {
    let n = ops.len();
    if amps.len() != 1 << n {
        return Err(Error::InvalidInput(format!(
            "{} amplitudes do not match {} qubits",
            amps.len(),
            n
        )));
    }
    let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if norm2.sqrt() < ZERO_NORM {
        return Err(Error::ZeroNormState { norm: norm2.sqrt() });
    }
    let mut cur = amps.to_vec();
    for (slot, op) in ops.iter().enumerate() {
        let shift = n - 1 - slot;
        let mut next = vec![c(0.0, 0.0); cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let bit = (idx >> shift) & 1;
            let base = idx & !(1 << shift);
            *out = op[bit][0] * cur[base] + op[bit][1] * cur[base | (1 << shift)];
        }
        cur = next;
    }
    let val: Complex64 = amps.iter().zip(&cur).map(|(p, q)| p.conj() * q).sum();
    Ok(val / norm2)
}

/// `<psi| (a . S) (x) (b . S) |psi>` with `S = sigma / 2`.
pub fn two_qubit_correlation(state: &TwoQubitState, a: &Vec3, b: &Vec3) -> Result<f64> {
    Ok(pauli_correlation_complex(&state.0, &[*a, *b])?.re / 4.0)
}

/// Spin-1 operator `axis . S` in the adjoint representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spin1Matrix(pub Matrix3<Complex64>);

/// `(axis . S)_jk = -i sum_i axis_i eps_ijk`.
pub fn spin1_matrix(axis: &Vec3) -> Spin1Matrix {
    let (x, y, z) = (axis.x, axis.y, axis.z);
    let m = Matrix3::new(
        c(0.0, 0.0),
        c(0.0, -z),
        c(0.0, y),
        c(0.0, z),
        c(0.0, 0.0),
        c(0.0, -x),
        c(0.0, -y),
        c(0.0, x),
        c(0.0, 0.0),
    );
    Spin1Matrix(m)
}

impl Spin1Matrix {
    pub fn hermiticity_residual(&self) -> f64 {
        (self.0 - self.0.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Eigenpairs sorted by eigenvalue, ascending. Each eigenvector is
    /// phased so that its first non-negligible component is real positive.
    pub fn eigen(&self) -> [(f64, CVec3); 3] {
        let eig = self.0.symmetric_eigen();
        let mut pairs: Vec<(f64, CVec3)> = (0..3)
            .map(|k| (eig.eigenvalues[k], fix_phase(eig.eigenvectors.column(k).into_owned())))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        [pairs[0], pairs[1], pairs[2]]
    }
}

fn fix_phase(v: CVec3) -> CVec3 {
    let v = v / Complex64::new(v.norm(), 0.0);
    match v.iter().find(|z| z.norm() > 1e-8) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v,
    }
}

/// Three-photon state embedded in `C^3 (x) C^3 (x) C^3`, index `9j + 3k + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedded3 {
    components: [Complex64; 27],
}

impl Embedded3 {
    pub fn components(&self) -> &[Complex64; 27] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < ZERO_NORM {
            return Err(Error::ZeroNormState { norm: n });
        }
        Ok(Self {
            components: self.components.map(|z| z / n),
        })
    }

    /// Contracts slot `slot` (0-based) with `v` using the bilinear product.
    pub fn contract(&self, slot: usize, v: &Vec3) -> [Complex64; 9] {
        let mut out = [c(0.0, 0.0); 9];
        for (idx, z) in self.components.iter().enumerate() {
            let digits = [idx / 9, (idx / 3) % 3, idx % 3];
            let rest: Vec<usize> = (0..3).filter(|&s| s != slot).map(|s| digits[s]).collect();
            out[3 * rest[0] + rest[1]] += z * v[digits[slot]];
        }
        out
    }

    /// Applies the same real rotation to every slot.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        let mut out = [c(0.0, 0.0); 27];
        for (idx, o) in out.iter_mut().enumerate() {
            let (a, b, d) = (idx / 9, (idx / 3) % 3, idx % 3);
            let mut acc = c(0.0, 0.0);
            for (jdx, z) in self.components.iter().enumerate() {
                let (j, k, l) = (jdx / 9, (jdx / 3) % 3, jdx % 3);
                acc += z * (r[(a, j)] * r[(b, k)] * r[(d, l)]);
            }
            *o = acc;
        }
        Self { components: out }
    }
}

/// `sum_h c_h eps(k1, l1) (x) eps(k2, l2) (x) eps(k3, l3)`.
pub fn embed_3d(s: &StateTensor, t: &PhotonTriple) -> Result<Embedded3> {
    if s.basis() != Basis::Circular {
        return Err(Error::Basis("embedding needs a helicity-basis state".into()));
    }
    if s.norm() < ZERO_NORM {
        return Err(Error::ZeroNormState { norm: s.norm() });
    }
    let mut comps = [c(0.0, 0.0); 27];
    for h in HelicityTriple::ALL {
        let amp = s.at(h);
        if amp == c(0.0, 0.0) {
            continue;
        }
        let e = [0, 1, 2].map(|i| *t.polarization(i, h.0[i]).components());
        for (idx, out) in comps.iter_mut().enumerate() {
            *out += amp * e[0][idx / 9] * e[1][(idx / 3) % 3] * e[2][idx % 3];
        }
    }
    Ok(Embedded3 { components: comps })
}

/// `<psi| (a.S) (x) (b.S) (x) (c.S) |psi> / <psi|psi>` with its imaginary part.
pub fn correlation_3d_complex(psi: &Embedded3, a: &Vec3, b: &Vec3, cc: &Vec3) -> Result<Complex64> {
    let norm = psi.norm();
    if norm < ZERO_NORM {
        return Err(Error::ZeroNormState { norm });
    }
    let ops = [spin1_matrix(a).0, spin1_matrix(b).0, spin1_matrix(cc).0];
    let mut cur = psi.components;
    for (slot, op) in ops.iter().enumerate() {
        let stride = [9, 3, 1][slot];
        let mut next = [c(0.0, 0.0); 27];
        for (idx, out) in next.iter_mut().enumerate() {
            let d = (idx / stride) % 3;
            let base = idx - d * stride;
            *out = (0..3).map(|e| op[(d, e)] * cur[base + e * stride]).sum();
        }
        cur = next;
    }
    let val: Complex64 = psi.components.iter().zip(&cur).map(|(p, q)| p.conj() * q).sum();
    Ok(val / (norm * norm))
}

pub fn correlation_3d(psi: &Embedded3, a: &Vec3, b: &Vec3, cc: &Vec3) -> Result<f64> {
    Ok(correlation_3d_complex(psi, a, b, cc)?.re)
}

/// Which operator algebra the analyzers act with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formalism {
    #[serde(rename = "QUBIT_2D")]
    Qubit2d,
    #[serde(rename = "SPIN1_3D")]
    Spin13d,
}

impl std::str::FromStr for Formalism {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qubit_2d" | "2d" | "qubit" => Ok(Self::Qubit2d),
            "spin1_3d" | "3d" | "spin1" => Ok(Self::Spin13d),
            _ => Err(Error::InvalidInput(format!("unknown formalism {s:?}"))),
        }
    }
}

/// Analyzer directions for each party, plus optional per-party local
/// qubit bases for the two-component formalism.
///
/// A local basis is given as two complex 2-vectors: the images of `|0>`
/// and `|1>`. The analyzer operator of that party becomes
/// `U (a . sigma) U^dagger` with `U` holding the two vectors as columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SettingRepr", into = "SettingRepr")]
pub struct AnalyzerSetting {
    formalism: Formalism,
    axes: Vec<Vec3>,
    local_bases: Option<Vec<Matrix2>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SettingRepr {
    formalism: Formalism,
    axes: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    local_bases: Option<Vec<[[[f64; 2]; 2]; 2]>>,
}

impl TryFrom<SettingRepr> for AnalyzerSetting {
    type Error = Error;
    fn try_from(r: SettingRepr) -> Result<Self> {
        let axes = r.axes.iter().map(|a| Vec3::new(a[0], a[1], a[2])).collect();
        // stored as vectors; U[row][col] = vectors[col][row]
        let bases = r.local_bases.map(|bs| {
            bs.iter()
                .map(|[v0, v1]| {
                    [
                        [c(v0[0][0], v0[0][1]), c(v1[0][0], v1[0][1])],
                        [c(v0[1][0], v0[1][1]), c(v1[1][0], v1[1][1])],
                    ]
                })
                .collect()
        });
        AnalyzerSetting::new(r.formalism, axes, bases)
    }
}

impl From<AnalyzerSetting> for SettingRepr {
    fn from(s: AnalyzerSetting) -> Self {
        SettingRepr {
            formalism: s.formalism,
            axes: s.axes.iter().map(|a| [a.x, a.y, a.z]).collect(),
            local_bases: s.local_bases.map(|bs| {
                bs.iter()
                    .map(|u| {
                        [
                            [[u[0][0].re, u[0][0].im], [u[1][0].re, u[1][0].im]],
                            [[u[0][1].re, u[0][1].im], [u[1][1].re, u[1][1].im]],
                        ]
                    })
                    .collect()
            }),
        }
    }
}

impl AnalyzerSetting {
    pub fn new(formalism: Formalism, axes: Vec<Vec3>, local_bases: Option<Vec<Matrix2>>) -> Result<Self> {
        for (k, a) in axes.iter().enumerate() {
            check_unit(a, &format!("analyzer axis {}", k + 1))?;
        }
        if let Some(bases) = &local_bases {
            if formalism != Formalism::Qubit2d {
                return Err(Error::Basis("local bases only apply to the QUBIT_2D formalism".into()));
            }
            if bases.len() != axes.len() {
                return Err(Error::Basis(format!(
                    "{} local bases for {} parties",
                    bases.len(),
                    axes.len()
                )));
            }
            for (k, u) in bases.iter().enumerate() {
                check_orthonormal(u).map_err(|e| Error::Basis(format!("party {}: {e}", k + 1)))?;
            }
        }
        Ok(Self {
            formalism,
            axes,
            local_bases,
        })
    }

    pub fn qubit(axes: Vec<Vec3>) -> Result<Self> {
        Self::new(Formalism::Qubit2d, axes, None)
    }

    pub fn formalism(&self) -> Formalism {
        self.formalism
    }

    pub fn axes(&self) -> &[Vec3] {
        &self.axes
    }

    pub fn local_bases(&self) -> Option<&[Matrix2]> {
        self.local_bases.as_deref()
    }
}

fn check_orthonormal(u: &Matrix2) -> std::result::Result<(), String> {
    let col = |j: usize| [u[0][j], u[1][j]];
    let dot = |p: [Complex64; 2], q: [Complex64; 2]| p[0].conj() * q[0] + p[1].conj() * q[1];
    let g00 = dot(col(0), col(0));
    let g11 = dot(col(1), col(1));
    let g01 = dot(col(0), col(1));
    let err = (g00 - 1.0).norm().max((g11 - 1.0).norm()).max(g01.norm());
    if err > SETTING_TOL {
        return Err(format!("local basis not orthonormal (deviation {err:e})"));
    }
    Ok(())
}

fn conjugate_by(u: &Matrix2, m: &Matrix2) -> Matrix2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, o) in row.iter_mut().enumerate() {
            for k in 0..2 {
                for l in 0..2 {
                    *o += u[i][k] * m[k][l] * u[j][l].conj();
                }
            }
        }
    }
    out
}

/// Three-party qubit correlator `<psi| (a.sigma)(b.sigma)(c.sigma) |psi>`
/// on the normalized state.
pub fn correlation_2d_complex(s: &StateTensor, setting: &AnalyzerSetting) -> Result<Complex64> {
    if setting.formalism != Formalism::Qubit2d {
        return Err(Error::InvalidInput("correlation_2d needs a QUBIT_2D setting".into()));
    }
    if setting.axes.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "three analyzer axes required, got {}",
            setting.axes.len()
        )));
    }
    let mut ops: Vec<Matrix2> = setting.axes.iter().map(pauli_dot).collect();
    if let Some(bases) = &setting.local_bases {
        for (op, u) in ops.iter_mut().zip(bases) {
            *op = conjugate_by(u, op);
        }
    }
    let refs: Vec<&Matrix2> = ops.iter().collect();
    expectation_2d(s.amplitudes(), &refs)
}

pub fn correlation_2d(s: &StateTensor, setting: &AnalyzerSetting) -> Result<f64> {
    Ok(correlation_2d_complex(s, setting)?.re)
}

/// Anything that returns a three-party correlator for three unit axes.
pub trait TripleCorrelator {
    fn correlate(&self, a: &Vec3, b: &Vec3, c: &Vec3) -> Result<f64>;
}

/// Qubit correlator with fixed local bases (identity when `None`).
pub struct Qubit2d<'a> {
    pub state: &'a StateTensor,
    pub local_bases: Option<[Matrix2; 3]>,
}

impl TripleCorrelator for Qubit2d<'_> {
    fn correlate(&self, a: &Vec3, b: &Vec3, cc: &Vec3) -> Result<f64> {
        let mut ops = [pauli_dot(a), pauli_dot(b), pauli_dot(cc)];
        if let Some(bases) = &self.local_bases {
            for (op, u) in ops.iter_mut().zip(bases) {
                *op = conjugate_by(u, op);
            }
        }
        Ok(expectation_2d(self.state.amplitudes(), &[&ops[0], &ops[1], &ops[2]])?.re)
    }
}

/// Spin-1 correlator on an embedded state.
pub struct Spin1<'a>(pub &'a Embedded3);

impl TripleCorrelator for Spin1<'_> {
    fn correlate(&self, a: &Vec3, b: &Vec3, cc: &Vec3) -> Result<f64> {
        correlation_3d(self.0, a, b, cc)
    }
}

/// Two settings per party: index 0 unprimed, index 1 primed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BellSettings {
    pub a: [Vec3; 2],
    pub b: [Vec3; 2],
    pub c: [Vec3; 2],
}

impl BellSettings {
    /// All six axes equal to `a`, `b`, `c` respectively.
    pub fn degenerate(a: Vec3, b: Vec3, c: Vec3) -> Self {
        Self {
            a: [a, a],
            b: [b, b],
            c: [c, c],
        }
    }

    /// Primed and unprimed roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            a: [self.a[1], self.a[0]],
            b: [self.b[1], self.b[0]],
            c: [self.c[1], self.c[0]],
        }
    }
}

/// `M = E(a,b,c') + E(a,b',c) + E(a',b,c) - E(a',b',c')`.
pub fn mermin_value<C: TripleCorrelator + ?Sized>(corr: &C, s: &BellSettings) -> Result<f64> {
    let e = |i: usize, j: usize, k: usize| corr.correlate(&s.a[i], &s.b[j], &s.c[k]);
    Ok(e(0, 0, 1)? + e(0, 1, 0)? + e(1, 0, 0)? - e(1, 1, 1)?)
}

/// `M + M'` with `M'` the Mermin combination with primes exchanged.
pub fn svetlichny_value<C: TripleCorrelator + ?Sized>(corr: &C, s: &BellSettings) -> Result<f64> {
    Ok(mermin_value(corr, s)? + mermin_value(corr, &s.swapped())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn singlet_limits() {
        let z = Vec3::z();
        for alpha in [0.0, 0.4, 2.0, -1.3] {
            assert_abs_diff_eq!(deformed_correlation_closed(alpha, &z, &z), -0.25, epsilon = 1e-16);
        }
        let s = deformed_singlet(0.0);
        assert_abs_diff_eq!(two_qubit_correlation(&s, &z, &z).unwrap(), -0.25, epsilon = 1e-15);
        let x = Vec3::x();
        assert_abs_diff_eq!(two_qubit_correlation(&s, &x, &x).unwrap(), -0.25, epsilon = 1e-15);
        let d = deformed_singlet(std::f64::consts::FRAC_PI_2);
        assert_abs_diff_eq!(
            two_qubit_correlation(&d, &x, &Vec3::y()).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            deformed_correlation_closed(std::f64::consts::FRAC_PI_2, &x, &Vec3::y()),
            0.25,
            epsilon = 1e-16
        );
    }

    #[test]
    fn triplet_at_pi() {
        let t = deformed_singlet(std::f64::consts::PI);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((t.0[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((t.0[2] - c(s, 0.0)).norm() < 1e-15);
        let lin = linear_deformed_pair(0.3);
        assert!((lin.0[2] - Complex64::from_polar(s, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn para_pair_correlations() {
        let p = para_pair();
        let (x, y, z) = (Vec3::x(), Vec3::y(), Vec3::z());
        assert_abs_diff_eq!(two_qubit_correlation(&p, &z, &z).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(two_qubit_correlation(&p, &x, &x).unwrap(), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(two_qubit_correlation(&p, &y, &y).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn spin1_z_eigenvectors() {
        let m = spin1_matrix(&Vec3::z());
        assert_eq!(m.hermiticity_residual(), 0.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = CVec3::new(c(s, 0.0), c(0.0, s), c(0.0, 0.0));
        assert!((m.0 * v - v).norm() < 1e-15);
        let eig = m.eigen();
        assert_abs_diff_eq!(eig[2].0, 1.0, epsilon = 1e-14);
        assert!((eig[2].1 - v).norm() < 1e-12);
        assert_abs_diff_eq!(eig[1].0, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn embedded_single_ket() {
        use crate::kinematics::{build_event, DalitzPoint, Orientation};
        let t = build_event(DalitzPoint::new(0.9, 0.8).unwrap(), Orientation::new(0.3, 0.9, 1.4)).unwrap();
        let ket = StateTensor::basis_ket(Basis::Circular, 1);
        let e = embed_3d(&ket, &t).unwrap();
        assert_abs_diff_eq!(e.norm(), 1.0, epsilon = 1e-15);
        assert!(embed_3d(&StateTensor::ghz(), &t).is_err());
    }

    #[test]
    fn ghz_mermin_analytic_optimum() {
        let ghz = StateTensor::ghz();
        let corr = Qubit2d {
            state: &ghz,
            local_bases: None,
        };
        let at = |phi: f64| Vec3::new(phi.cos(), phi.sin(), 0.0);
        let (u, p) = (-std::f64::consts::PI / 6.0, std::f64::consts::PI / 3.0);
        let s = BellSettings {
            a: [at(u), at(p)],
            b: [at(u), at(p)],
            c: [at(u), at(p)],
        };
        assert_abs_diff_eq!(mermin_value(&corr, &s).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn setting_validation() {
        assert!(AnalyzerSetting::qubit(vec![Vec3::new(1.0, 1.0, 0.0)]).is_err());
        let bad = [[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
        let r = AnalyzerSetting::new(Formalism::Qubit2d, vec![Vec3::z()], Some(vec![bad]));
        assert!(matches!(r, Err(Error::Basis(_))));
        let js = r#"{"formalism":"QUBIT_2D","axes":[[0,0,1],[1,0,0],[0,1,0]],
            "local_bases":[[[[1,0],[0,0]],[[0,0],[1,0]]],[[[1,0],[0,0]],[[0,0],[1,0]]],[[[0,0],[1,0]],[[1,0],[0,0]]]]}"#;
        let s: AnalyzerSetting = serde_json::from_str(js).unwrap();
        let back: AnalyzerSetting = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn local_basis_swap_flips_z() {
        let ket = StateTensor::basis_ket(Basis::Linear, 0);
        let id = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
        let swap = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let z = Vec3::z();
        let plain = AnalyzerSetting::qubit(vec![z, z, z]).unwrap();
        assert_abs_diff_eq!(correlation_2d(&ket, &plain).unwrap(), 1.0, epsilon = 1e-15);
        let s = AnalyzerSetting::new(Formalism::Qubit2d, vec![z, z, z], Some(vec![id, id, swap])).unwrap();
        assert_abs_diff_eq!(correlation_2d(&ket, &s).unwrap(), -1.0, epsilon = 1e-15);
    }
}
