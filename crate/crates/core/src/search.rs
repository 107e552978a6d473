//! Phase-space scans, the hyperdeterminant zero search, analyzer-setting
//! optimization and Monte Carlo event generation.
//!
//! Parallel work (grid points, restarts) is merged by index, so results do
//! not depend on scheduling. Random streams are derived from one master
//! seed with one ChaCha stream per task.

// Range checks are written as `!(x < limit)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amplitude::{
    decay_weight, spin_weights, state_tensor, state_tensor_superposed, SpinProjection, SpinWeights, StateTensor,
};
use crate::correlations::{
    correlation_2d, correlation_3d, embed_3d, mermin_value, svetlichny_value, AnalyzerSetting, BellSettings, Formalism,
    TripleCorrelator,
};
use crate::entanglement::{classify, hyperdeterminant, EntanglementReport, Tolerances};
use crate::error::{Error, Result};
use crate::kinematics::{build_event, dalitz_sample, unit_from_angles, DalitzPoint, Orientation, PhotonTriple, Vec3};
use crate::optimize::{nelder_mead, NelderMeadOptions};

fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Quantity evaluated at each scan point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Tangle,
    /// `|Hdet|` of the normalized state.
    Hdet,
    /// Numeric class code: 0 product, 1 biseparable, 2 W, 3 GHZ.
    Class,
    Weight,
    Correlator(AnalyzerSetting),
}

impl Observable {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Tangle => "tangle",
            Self::Hdet => "hdet",
            Self::Class => "class",
            Self::Weight => "weight",
            Self::Correlator(_) => "correlator",
        }
    }
}

/// Grid scan over the Dalitz triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    /// Grid points per Dalitz axis, at least 2.
    pub n: usize,
    pub spin: SpinProjection,
    pub orientation: Orientation,
    pub observable: Observable,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub dalitz: DalitzPoint,
    pub theta: [f64; 3],
    pub phi: [f64; 3],
    pub spin: SpinProjection,
    pub value: f64,
    pub report: EntanglementReport,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub observable: String,
    pub rows: Vec<ScanRow>,
    /// Grid points inside the triangle that were skipped as degenerate.
    pub skipped: usize,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub const SCAN_CSV_HEADER: &str = "x1,x2,theta1,theta2,theta3,phi1,phi2,phi3,s_z,observable,value,class,norm";

impl ScanTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{SCAN_CSV_HEADER}")?;
        for r in &self.rows {
            let mut fields: Vec<String> = vec![fmt_f64(r.dalitz.x1()), fmt_f64(r.dalitz.x2())];
            fields.extend(r.theta.iter().map(|v| fmt_f64(*v)));
            fields.extend(r.phi.iter().map(|v| fmt_f64(*v)));
            fields.push(r.spin.to_string());
            fields.push(self.observable.clone());
            fields.push(fmt_f64(r.value));
            fields.push(r.report.class.to_string());
            fields.push(fmt_f64(r.norm));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Grid coordinate `k / (n - 1)`.
fn grid_coord(k: usize, n: usize) -> f64 {
    k as f64 / (n - 1) as f64
}

/// Evaluates the observable on every grid point of the closed triangle,
/// in row-major `(x1, x2)` order. Points where a photon is soft are
/// skipped and counted.
pub fn scan_dalitz(spec: &ScanSpec) -> Result<ScanTable> {
    if spec.n < 2 {
        return Err(Error::InvalidInput(format!("scan needs n >= 2, got {}", spec.n)));
    }
    spec.tolerances.validate()?;
    let n = spec.n;
    let mut grid = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + j >= n - 1 {
                grid.push((i, j));
            }
        }
    }
    let rows: Vec<Option<ScanRow>> = par_map(&grid, |&(i, j)| {
        let d = DalitzPoint::new(grid_coord(i, n), grid_coord(j, n)).ok()?;
        let t = build_event(d, spec.orientation).ok()?;
        scan_point(&t, spec).ok()
    });
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    Ok(ScanTable {
        observable: spec.observable.name().to_string(),
        rows: rows.into_iter().flatten().collect(),
        skipped,
    })
}

fn scan_point(t: &PhotonTriple, spec: &ScanSpec) -> Result<ScanRow> {
    let state = state_tensor(t, spec.spin)?;
    let report = classify(&state, &spec.tolerances)?;
    let value = match &spec.observable {
        Observable::Tangle => report.three_tangle,
        Observable::Hdet => report.hyperdeterminant.norm(),
        Observable::Class => f64::from(report.class.code()),
        Observable::Weight => decay_weight(t),
        Observable::Correlator(setting) => observable_correlator(&state, t, setting)?,
    };
    let angles = t.angles();
    Ok(ScanRow {
        dalitz: t.dalitz(),
        theta: angles.map(|a| a.0),
        phi: angles.map(|a| a.1),
        spin: spec.spin,
        value,
        report,
        norm: state.norm(),
    })
}

fn observable_correlator(state: &StateTensor, t: &PhotonTriple, setting: &AnalyzerSetting) -> Result<f64> {
    match setting.formalism() {
        Formalism::Qubit2d => correlation_2d(state, setting),
        Formalism::Spin13d => {
            let axes = setting.axes();
            if axes.len() != 3 {
                return Err(Error::InvalidInput("three analyzer axes required".into()));
            }
            correlation_3d(&embed_3d(state, t)?, &axes[0], &axes[1], &axes[2])
        }
    }
}

/// Which frames the hyperdeterminant search ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantizationPolicy {
    /// Decay plane normal along the quantization axis (identity orientation).
    PlaneNormal,
    /// Quantization axis fixed to lab z; the plane orientation is searched
    /// with the rotation about z gauge-fixed to zero.
    FixedZ,
}

impl FromStr for QuantizationPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plane-normal" => Ok(Self::PlaneNormal),
            "fixed-z" => Ok(Self::FixedZ),
            _ => Err(Error::InvalidInput(format!(
                "unknown policy {s:?} (expected plane-normal or fixed-z)"
            ))),
        }
    }
}

impl fmt::Display for QuantizationPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PlaneNormal => "plane-normal",
            Self::FixedZ => "fixed-z",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HdetSearch {
    pub spin: SpinWeights,
    pub policy: QuantizationPolicy,
    /// Dalitz grid points per axis for the coarse scan.
    pub grid: usize,
    /// `(beta, gamma)` grid sizes for the fixed-z policy.
    pub orientation_grid: [usize; 2],
    /// Coarse-grid local minima below this seed a refinement.
    pub trigger: f64,
    /// Refined points with `|Hdet|` below this count as zeros.
    pub zero_tol: f64,
    pub tolerances: Tolerances,
    pub refine: NelderMeadOptions,
}

impl HdetSearch {
    pub fn new(spin: impl Into<SpinWeights>, policy: QuantizationPolicy) -> Self {
        Self {
            spin: spin.into(),
            policy,
            grid: 51,
            orientation_grid: [5, 8],
            trigger: 1e-4,
            zero_tol: 1e-10,
            tolerances: Tolerances::default(),
            refine: NelderMeadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchPoint {
    pub dalitz: DalitzPoint,
    pub orientation: Orientation,
    /// `|Hdet|` at the refined point.
    pub objective: f64,
    /// `|Hdet|` at the coarse-grid seed.
    pub seed_objective: f64,
    pub report: EntanglementReport,
    pub converged: bool,
    pub iterations: usize,
    pub is_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub policy: QuantizationPolicy,
    pub grid_points: usize,
    pub seeds: usize,
    pub points: Vec<SearchPoint>,
    /// Seeds whose refinement hit the iteration budget.
    pub not_converged: usize,
}

impl SearchResult {
    /// Refined points that are zeros of the hyperdeterminant.
    pub fn zeros(&self) -> Vec<&SearchPoint> {
        self.points.iter().filter(|p| p.is_zero).collect()
    }

    /// Zeros that are genuinely tripartite (W class).
    pub fn w_class(&self) -> Vec<&SearchPoint> {
        self.points
            .iter()
            .filter(|p| p.is_zero && p.report.class == crate::entanglement::EntanglementClass::WClass)
            .collect()
    }

    /// Lowest objective; ties broken by smallest `(x1, x2)`.
    pub fn best(&self) -> Option<&SearchPoint> {
        self.points.iter().min_by(|a, b| {
            a.objective
                .total_cmp(&b.objective)
                .then(a.dalitz.x1().total_cmp(&b.dalitz.x1()))
                .then(a.dalitz.x2().total_cmp(&b.dalitz.x2()))
        })
    }
}

/// Nearest point of the Dalitz triangle and the distance moved.
fn project_triangle(x1: f64, x2: f64) -> (f64, f64, f64) {
    let (mut p1, mut p2) = (x1.clamp(0.0, 1.0), x2.clamp(0.0, 1.0));
    if p1 + p2 < 1.0 {
        let shift = 0.5 * (1.0 - p1 - p2);
        p1 = (p1 + shift).min(1.0);
        p2 = (1.0 - p1).max(0.0);
    }
    let dist = ((x1 - p1).powi(2) + (x2 - p2).powi(2)).sqrt();
    (p1, p2, dist)
}

const INVALID_OBJECTIVE: f64 = 1e3;

/// Refined points closer than this to a triangle edge are tried on the edge.
const EDGE_SNAP: f64 = 1e-7;

/// Moves `x` onto the nearest triangle edge when it is within
/// [`EDGE_SNAP`] and the objective does not get worse. The simplex stops
/// a diameter away from an edge minimum, which leaves a small spurious
/// second Schmidt coefficient.
fn snap_to_edge(x: &[f64], value: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let (x1, x2, _) = project_triangle(x[0], x[1]);
    let s = 0.5 * (x1 + x2 - 1.0);
    let candidates = [
        (1.0 - x1, [1.0, x2]),
        (1.0 - x2, [x1, 1.0]),
        (s * std::f64::consts::SQRT_2, [x1 - s, x2 - s]),
    ];
    let mut best = (value, x.to_vec());
    for (dist, [c1, c2]) in candidates {
        if dist > EDGE_SNAP {
            continue;
        }
        let mut p = x.to_vec();
        p[0] = c1;
        p[1] = c2;
        let v = f(&p);
        if v <= best.0 {
            best = (v, p);
        }
    }
    best.1
}

struct HdetObjective<'a> {
    search: &'a HdetSearch,
}

impl HdetObjective<'_> {
    fn frame(&self, p: &[f64]) -> (f64, f64, f64, Orientation) {
        let (x1, x2, dist) = project_triangle(p[0], p[1]);
        let o = match self.search.policy {
            QuantizationPolicy::PlaneNormal => Orientation::identity(),
            QuantizationPolicy::FixedZ => Orientation::new(0.0, p[2], p[3]),
        };
        (x1, x2, dist, o)
    }

    fn state(&self, x1: f64, x2: f64, o: Orientation) -> Result<(PhotonTriple, StateTensor)> {
        let t = build_event(DalitzPoint::new(x1, x2)?, o)?;
        let s = state_tensor_superposed(&t, &self.search.spin)?;
        Ok((t, s))
    }

    fn value(&self, p: &[f64]) -> f64 {
        let (x1, x2, dist, o) = self.frame(p);
        match self.state(x1, x2, o).and_then(|(_, s)| hyperdeterminant(&s)) {
            Ok(h) => h.norm() + dist,
            Err(_) => INVALID_OBJECTIVE + dist,
        }
    }
}

/// Looks for zeros of `|Hdet|` over the Dalitz triangle (and, for the
/// fixed-z policy, over plane orientations).
///
/// A coarse grid is scanned first; every grid local minimum below
/// `trigger` is refined with Nelder-Mead and re-classified.
pub fn find_hdet_zeros(search: &HdetSearch) -> Result<SearchResult> {
    if search.grid < 2 {
        return Err(Error::InvalidInput(
            "search grid needs at least 2 points per axis".into(),
        ));
    }
    search.tolerances.validate()?;
    let objective = HdetObjective { search };
    let n = search.grid;
    let [nb, ng] = match search.policy {
        QuantizationPolicy::PlaneNormal => [1, 1],
        QuantizationPolicy::FixedZ => search.orientation_grid.map(|v| v.max(1)),
    };
    let beta_at = |b: usize| if nb == 1 { 0.0 } else { PI * b as f64 / (nb - 1) as f64 };
    let gamma_at = |g: usize| TAU * g as f64 / ng as f64;

    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + j < n - 1 {
                continue;
            }
            for b in 0..nb {
                for g in 0..ng {
                    cells.push([i, j, b, g]);
                }
            }
        }
    }
    let params = |c: &[usize; 4]| -> Vec<f64> {
        let mut p = vec![grid_coord(c[0], n), grid_coord(c[1], n)];
        if search.policy == QuantizationPolicy::FixedZ {
            p.push(beta_at(c[2]));
            p.push(gamma_at(c[3]));
        }
        p
    };
    let values: Vec<f64> = par_map(&cells, |c| objective.value(&params(c)));
    let lookup = |c: [isize; 4]| -> Option<f64> {
        let (i, j) = (c[0], c[1]);
        if i < 0 || j < 0 || i >= n as isize || j >= n as isize || i + j < n as isize - 1 {
            return None;
        }
        if c[2] < 0 || c[2] >= nb as isize {
            return None;
        }
        let g = c[3].rem_euclid(ng as isize) as usize;
        let (i, j, b) = (i as usize, j as usize, c[2] as usize);
        // row-major position of (i, j, b, g) in `cells`
        let before_row: usize = (0..i).map(|r| r + 1).sum();
        let in_row = j - (n - 1 - i);
        Some(values[((before_row + in_row) * nb + b) * ng + g])
    };

    let mut seeds = Vec::new();
    for (k, c) in cells.iter().enumerate() {
        let v = values[k];
        if !(v < search.trigger) {
            continue;
        }
        let here = c.map(|x| x as isize);
        let is_min = (0..4).all(|axis| {
            [-1isize, 1].iter().all(|step| {
                let mut nb_cell = here;
                nb_cell[axis] += step;
                if axis == 3 && ng == 1 {
                    return true;
                }
                lookup(nb_cell).is_none_or(|w| v <= w)
            })
        });
        if is_min {
            seeds.push(k);
        }
    }

    let h = 1.0 / (n - 1) as f64;
    let db = if nb > 1 { PI / (nb - 1) as f64 } else { 0.5 };
    let dg = TAU / ng as f64;
    let refined: Vec<Result<SearchPoint>> = par_map(&seeds, |&k| {
        let p0 = params(&cells[k]);
        let mut steps = vec![
            if p0[0] + h <= 1.0 { h } else { -h },
            if p0[1] + h <= 1.0 { h } else { -h },
        ];
        if search.policy == QuantizationPolicy::FixedZ {
            steps.push(0.5 * db);
            steps.push(0.5 * dg);
        }
        let out = nelder_mead(|p| objective.value(p), &p0, &steps, &search.refine);
        let x = snap_to_edge(&out.x, out.value, |p| objective.value(p));
        let (x1, x2, _, o) = objective.frame(&x);
        let (_, state) = objective.state(x1, x2, o)?;
        let report = classify(&state, &search.tolerances)?;
        let value = report.hyperdeterminant.norm();
        Ok(SearchPoint {
            dalitz: DalitzPoint::new(x1, x2)?,
            orientation: o,
            objective: value,
            seed_objective: values[k],
            is_zero: value < search.zero_tol,
            report,
            converged: out.converged,
            iterations: out.iterations,
        })
    });
    let points: Vec<SearchPoint> = refined.into_iter().filter_map(|r| r.ok()).collect();
    let not_converged = points.iter().filter(|p| !p.converged).count();
    Ok(SearchResult {
        policy: search.policy,
        grid_points: cells.len(),
        seeds: seeds.len(),
        points,
        not_converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellObjective {
    Mermin,
    Svetlichny,
}

impl FromStr for BellObjective {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mermin" => Ok(Self::Mermin),
            "svetlichny" => Ok(Self::Svetlichny),
            _ => Err(Error::InvalidInput(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SettingsSearch {
    pub objective: BellObjective,
    pub restarts: usize,
    pub seed: u64,
    pub optimizer: NelderMeadOptions,
    /// Extra Nelder-Mead runs restarted from each run's optimum.
    pub polish_rounds: usize,
}

impl SettingsSearch {
    pub fn new(objective: BellObjective, restarts: usize, seed: u64) -> Self {
        Self {
            objective,
            restarts,
            seed,
            optimizer: NelderMeadOptions {
                max_iter: 5000,
                diameter_tol: 1e-10,
                value_tol: 1e-15,
            },
            polish_rounds: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub value: f64,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingsOptimum {
    pub objective: BellObjective,
    pub value: f64,
    pub settings: BellSettings,
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
    pub classical_bound: f64,
}

/// Axes from 12 spherical angles `(theta, phi)` in the order
/// `a, a', b, b', c, c'`; unit length holds by construction.
fn settings_from_angles(p: &[f64]) -> BellSettings {
    let ax = |k: usize| unit_from_angles(p[2 * k], p[2 * k + 1]);
    BellSettings {
        a: [ax(0), ax(1)],
        b: [ax(2), ax(3)],
        c: [ax(4), ax(5)],
    }
}

fn random_unit_angles<R: Rng>(rng: &mut R) -> (f64, f64) {
    let z: f64 = 1.0 - 2.0 * rng.random::<f64>();
    let phi = TAU * rng.random::<f64>();
    (z.clamp(-1.0, 1.0).acos(), phi)
}

/// Maximizes the Mermin or Svetlichny combination over analyzer axes.
///
/// Restart `k` draws its start from stream `k` of the seed, so adding
/// restarts never changes earlier ones and the best value is monotone in
/// the restart count.
pub fn optimize_settings<C>(corr: &C, search: &SettingsSearch) -> Result<SettingsOptimum>
where
    C: TripleCorrelator + Sync + ?Sized,
{
    if search.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let eval = |p: &[f64]| -> f64 {
        let s = settings_from_angles(p);
        let v = match search.objective {
            BellObjective::Mermin => mermin_value(corr, &s),
            BellObjective::Svetlichny => svetlichny_value(corr, &s),
        };
        v.map(|v| -v).unwrap_or(f64::INFINITY)
    };
    let ids: Vec<usize> = (0..search.restarts).collect();
    let runs: Vec<(Vec<f64>, RestartSummary)> = par_map(&ids, |&k| {
        let mut rng = stream_rng(search.seed, k as u64);
        let mut x: Vec<f64> = (0..6)
            .flat_map(|_| {
                let (t, p) = random_unit_angles(&mut rng);
                [t, p]
            })
            .collect();
        let mut out = nelder_mead(eval, &x, &[0.5; 12], &search.optimizer);
        let mut evaluations = out.evaluations;
        for _ in 0..search.polish_rounds {
            let again = nelder_mead(eval, &out.x, &[0.05; 12], &search.optimizer);
            evaluations += again.evaluations;
            let improved = again.value < out.value - 1e-15;
            if again.value <= out.value {
                out = again;
            }
            if !improved {
                break;
            }
        }
        x.clone_from(&out.x);
        (
            x,
            RestartSummary {
                value: -out.value,
                converged: out.converged,
                evaluations,
            },
        )
    });
    if runs.iter().all(|(_, r)| !r.converged) {
        return Err(Error::NoConvergence(format!(
            "none of {} restarts met the stopping criteria within {} iterations",
            search.restarts, search.optimizer.max_iter
        )));
    }
    let (best, _) = runs
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |(bi, bv), (k, (_, r))| {
            if r.value > bv {
                (k, r.value)
            } else {
                (bi, bv)
            }
        });
    Ok(SettingsOptimum {
        objective: search.objective,
        value: runs[best].1.value,
        settings: settings_from_angles(&runs[best].0),
        best_restart: best,
        restarts: runs.into_iter().map(|(_, r)| r).collect(),
        classical_bound: match search.objective {
            BellObjective::Mermin => crate::correlations::MERMIN_CLASSICAL_BOUND,
            BellObjective::Svetlichny => crate::correlations::SVETLICHNY_CLASSICAL_BOUND,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Uniform,
    MatrixElement,
}

impl FromStr for Weighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "matrix-element" => Ok(Self::MatrixElement),
            _ => Err(Error::InvalidInput(format!(
                "unknown weighting {s:?} (expected uniform or matrix-element)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOptions {
    pub n: usize,
    pub weighting: Weighting,
    /// Fixed spin projection, or `None` to draw it per event with
    /// probability proportional to `sum_h |M_s|^2`.
    pub spin: Option<SpinProjection>,
    pub seed: u64,
    /// Uniform points used to find the maximum weight.
    pub envelope_points: usize,
    pub envelope_safety: f64,
}

impl SampleOptions {
    pub fn new(n: usize, weighting: Weighting, seed: u64) -> Self {
        Self {
            n,
            weighting,
            spin: None,
            seed,
            envelope_points: 10_000,
            envelope_safety: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub triple: PhotonTriple,
    pub s_z: SpinProjection,
    pub state: StateTensor,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleRun {
    pub events: Vec<Event>,
    pub trials: usize,
    pub acceptance_rate: f64,
    pub envelope: Option<f64>,
}

fn random_event<R: Rng>(rng: &mut R) -> Option<PhotonTriple> {
    let d = dalitz_sample(rng.random(), rng.random());
    let o = Orientation::from_unit(rng.random(), rng.random(), rng.random());
    build_event(d, o).ok()
}

/// Maximum decay weight over `points` uniform events, times `safety`.
pub fn weight_envelope(points: usize, safety: f64, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 1);
    let mut max = 0.0f64;
    let mut seen = 0;
    while seen < points {
        if let Some(t) = random_event(&mut rng) {
            max = max.max(decay_weight(&t));
            seen += 1;
        }
    }
    max * safety
}

/// Generates `n` events, flat in the Dalitz triangle and in orientation, or
/// distributed according to the decay weight by rejection sampling.
pub fn sample_events(opts: &SampleOptions) -> Result<SampleRun> {
    if opts.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let envelope = match opts.weighting {
        Weighting::Uniform => None,
        Weighting::MatrixElement => {
            if !(opts.envelope_safety >= 1.0) || opts.envelope_points == 0 {
                return Err(Error::InvalidInput(
                    "envelope needs at least one point and a safety factor >= 1".into(),
                ));
            }
            Some(weight_envelope(opts.envelope_points, opts.envelope_safety, opts.seed))
        }
    };
    let mut rng = stream_rng(opts.seed, 0);
    let mut events = Vec::with_capacity(opts.n);
    let mut trials = 0usize;
    while events.len() < opts.n {
        trials += 1;
        let Some(t) = random_event(&mut rng) else {
            continue;
        };
        let weight = decay_weight(&t);
        if let Some(env) = envelope {
            if weight > env {
                return Err(Error::EnvelopeExceeded {
                    weight,
                    envelope: env,
                    x1: t.dalitz().x1(),
                    x2: t.dalitz().x2(),
                });
            }
            if rng.random::<f64>() * env >= weight {
                continue;
            }
        }
        let s_z = match opts.spin {
            Some(s) => s,
            None => {
                let w = spin_weights(&t);
                let total: f64 = w.iter().sum();
                let mut u = rng.random::<f64>() * total;
                let mut pick = SpinProjection::Plus;
                for (k, s) in SpinProjection::ALL.iter().enumerate() {
                    if u < w[k] {
                        pick = *s;
                        break;
                    }
                    u -= w[k];
                }
                pick
            }
        };
        let Ok(state) = state_tensor(&t, s_z) else {
            continue;
        };
        events.push(Event {
            triple: t,
            s_z,
            state,
            weight,
        });
    }
    Ok(SampleRun {
        acceptance_rate: events.len() as f64 / trials as f64,
        events,
        trials,
        envelope,
    })
}

/// Complex spin weights parsed from `"w_-1,w_0,w_+1"`, each `re` or `re:im`.
pub fn parse_spin_weights(s: &str) -> Result<SpinWeights> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "expected three comma-separated weights for S_z = -1, 0, +1, got {s:?}"
        )));
    }
    let mut w = [Complex64::new(0.0, 0.0); 3];
    for (k, p) in parts.iter().enumerate() {
        let (re, im) = match p.split_once(':') {
            Some((r, i)) => (r, i),
            None => (*p, "0"),
        };
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad weight component {v:?}")))
        };
        w[k] = Complex64::new(parse(re)?, parse(im)?);
    }
    if w.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::InvalidInput("spin weights are all zero".into()));
    }
    Ok(SpinWeights(w))
}

/// Unit vector from `"x,y,z"`, normalized.
pub fn parse_axis(s: &str) -> Result<Vec3> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("cannot parse axis {s:?}")))?;
    if v.len() != 3 {
        return Err(Error::InvalidInput(format!("axis needs three components, got {s:?}")));
    }
    let a = Vec3::new(v[0], v[1], v[2]);
    let n = a.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidInput(format!("axis {s:?} has zero length")));
    }
    Ok(a / n)
}
