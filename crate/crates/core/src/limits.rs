//! Nonrelativistic-limit studies: spectra, small-component elimination,
//! Dirac → Pauli convergence in `c`, noncommutative shift sweeps and
//! series-truncation errors.
//!
//! ## Interior levels
//!
//! Truncating the oscillator basis corrupts eigenvectors that reach the top
//! ladder states. A level is kept only through its *interior* directions:
//! within each cluster of (numerically) degenerate eigenvalues we diagonalize
//! the boundary weight `V† P_∂ V` and keep the directions whose weight is below
//! [`BOUNDARY_WEIGHT_TOL`]. Those directions are exact eigenvectors of the
//! untruncated operator whenever the Hamiltonian couples only neighbouring
//! ladder states, which is the case for every builder in this crate.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{
    dirac_h, kinetic_momentum, nc_dirac_h, nc_pauli_h, nc_pauli_h_resummed, pauli_h_full, q_theta_pauli, spectral_radius,
    theta_matrix, EMPotential, HamiltonianKind, HamiltonianMatrix, PhysParams, QThetaMode,
};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, inner, solve, vec_norm, MatrixC};
use crate::phase_space::{build_canonical_ops, BasisSpec, NCParams};
use crate::spinor_algebra::standard_rep;

/// Relative width (in units of `max(m₀c², |E|)`) of a degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Largest boundary weight of a direction that still counts as interior.
pub const BOUNDARY_WEIGHT_TOL: f64 = 1e-8;

/// Ascending eigenvalues of a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub kind: HamiltonianKind,
    pub phys: PhysParams,
    pub nc: NCParams,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// The `k` smallest eigenvalues.
pub fn spectrum(h: &HamiltonianMatrix, k: usize) -> Result<Spectrum> {
    if k > h.dim() {
        return Err(invalid("k", format!("requested {k} eigenvalues of a {}-dimensional operator", h.dim())));
    }
    let mut values = hermitian_eigenvalues(&h.matrix)?;
    values.truncate(k);
    Ok(Spectrum { eigenvalues: values, kind: h.kind, phys: h.phys, nc: h.nc })
}

/// The `k` eigenvalues closest to `target`, ascending.
pub fn spectrum_near(h: &HamiltonianMatrix, k: usize, target: f64) -> Result<Spectrum> {
    if k > h.dim() {
        return Err(invalid("k", format!("requested {k} eigenvalues of a {}-dimensional operator", h.dim())));
    }
    let mut values = hermitian_eigenvalues(&h.matrix)?;
    values.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()).then(a.total_cmp(b)));
    values.truncate(k);
    values.sort_by(f64::total_cmp);
    Ok(Spectrum { eigenvalues: values, kind: h.kind, phys: h.phys, nc: h.nc })
}

/// Which eigenvectors may represent a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelSelection {
    /// Only directions without weight on the truncation boundary.
    Interior,
    /// Every eigenvector; right when truncation commutes with the operator,
    /// e.g. the field-free problem where everything is a function of `p`.
    All,
}

/// A degenerate eigenspace.
#[derive(Clone, Debug)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
    /// Orthonormal columns spanning the level.
    pub vectors: MatrixC,
}

impl Level {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

fn boundary_mask(basis: &BasisSpec, margin: usize, components: usize) -> Result<Vec<bool>> {
    Ok(basis.spinor_interior_mask(margin, components)?.into_iter().map(|k| !k).collect())
}

/// Degenerate levels with energy inside `window` (open interval), ascending.
pub fn levels(h: &HamiltonianMatrix, selection: LevelSelection, margin: usize, window: Option<(f64, f64)>) -> Result<Vec<Level>> {
    let eig = hermitian_eigen(&h.matrix)?;
    let vecs = eig.vectors.expect("vectors requested");
    let inside = |e: f64| window.map_or(true, |(lo, hi)| e > lo && e < hi);
    let idx: Vec<usize> = (0..eig.values.len()).filter(|&k| inside(eig.values[k])).collect();
    let scale = idx.iter().fold(h.phys.rest_energy(), |s, &k| s.max(eig.values[k].abs()));
    let tol = CLUSTER_TOL * scale;
    let boundary = boundary_mask(&h.basis, margin, h.spinor_components())?;

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &k in &idx {
        match clusters.last_mut() {
            Some(c) if eig.values[k] - eig.values[*c.last().expect("nonempty")] <= tol => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }

    let dim = h.dim();
    let mut out = Vec::new();
    for cluster in clusters {
        let v = MatrixC::from_fn(dim, cluster.len(), |i, j| vecs[(i, cluster[j])]);
        let w = match selection {
            LevelSelection::All => v,
            LevelSelection::Interior => {
                // boundary weight operator restricted to the cluster
                let m = MatrixC::from_fn(cluster.len(), cluster.len(), |a, b| {
                    (0..dim).filter(|&i| boundary[i]).map(|i| v[(i, a)].conj() * v[(i, b)]).sum()
                });
                let me = hermitian_eigen(&m)?;
                let mu = me.vectors.expect("vectors requested");
                let keep: Vec<usize> = (0..cluster.len()).filter(|&k| me.values[k] < BOUNDARY_WEIGHT_TOL).collect();
                if keep.is_empty() {
                    continue;
                }
                let u = MatrixC::from_fn(cluster.len(), keep.len(), |i, j| mu[(i, keep[j])]);
                &v * &u
            }
        };
        // re-diagonalize inside the kept subspace so energies are Rayleigh quotients
        let hw = &h.matrix * &w;
        let small = &w.adjoint() * &hw;
        let se = hermitian_eigen(&hermitize(&small))?;
        let rot = se.vectors.expect("vectors requested");
        let energy = se.values.iter().sum::<f64>() / se.values.len() as f64;
        out.push(Level { energy, multiplicity: w.cols(), vectors: &w * &rot });
    }
    Ok(out)
}

fn hermitize(m: &MatrixC) -> MatrixC {
    let a = m.adjoint();
    (m + &a).scale_real(0.5)
}

/// Positive-branch Dirac levels, `0 < E < 2m₀c²`.
pub fn dirac_positive_levels(h: &HamiltonianMatrix, selection: LevelSelection, margin: usize) -> Result<Vec<Level>> {
    levels(h, selection, margin, Some((0.0, 2.0 * h.phys.rest_energy())))
}

/// Eigenvalues of `P op P` on a level: the first-order shifts per unit coupling.
pub fn first_order_shifts(level: &Level, op: &MatrixC) -> Result<Vec<f64>> {
    let w = &level.vectors;
    let m = &w.adjoint() * &(op * w);
    hermitian_eigenvalues(&hermitize(&m))
}

/// How the small component is predicted from the large one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EliminationMode {
    /// `χ = cσ·Π φ / 2m₀c²`.
    Commutative,
    /// `χ = (2m₀c² − (e/ħ)θ Q_θ)⁻¹ cσ·Π φ` with the two-component `Q_θ`.
    Nc { qtheta_mode: QThetaMode },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EliminationReport {
    pub level_index: usize,
    /// `‖χ‖ / ‖φ‖`.
    pub ratio_small_large: f64,
    /// `‖χ − χ_pred‖`.
    pub residual: f64,
    /// `‖χ − χ_pred‖ / ‖χ‖`; `None` when `χ = 0`.
    pub relative_residual: Option<f64>,
}

/// Splits a four-spinor eigenvector of `h` into `(φ, χ)` and compares `χ` to
/// its large-component prediction.
pub fn eliminate_small_component(
    eigvec: &[C64],
    h: &HamiltonianMatrix,
    mode: EliminationMode,
    level_index: usize,
) -> Result<EliminationReport> {
    if h.spinor_components() != 4 {
        return Err(invalid("hamiltonian", "small-component elimination needs a Dirac-type operator"));
    }
    if eigvec.len() != h.dim() {
        return Err(Error::Dimension(format!("vector of length {} for a {}-dimensional operator", eigvec.len(), h.dim())));
    }
    let half = h.dim() / 2;
    let (phi, chi) = eigvec.split_at(half);
    let phys = &h.phys;
    let ops = build_canonical_ops(&h.basis, phys.hbar)?;
    let (pi_x, pi_y) = kinetic_momentum(&ops, &h.potential, phys)?;
    let rep = standard_rep();
    let sp = &rep.sigma[0].kron(&pi_x) + &rep.sigma[1].kron(&pi_y);
    let rhs: Vec<C64> = sp.matvec(phi)?.into_iter().map(|z| z * phys.c).collect();
    let two_mc2 = 2.0 * phys.rest_energy();
    let pred = match mode {
        EliminationMode::Nc { qtheta_mode } if h.nc.theta != 0.0 => {
            let q = q_theta_pauli(&h.basis, &h.potential, phys, qtheta_mode)?;
            let mut denom = q.scale_real(-phys.e * h.nc.theta / phys.hbar);
            for i in 0..denom.rows() {
                denom[(i, i)] += two_mc2;
            }
            solve(&denom, &rhs)?
        }
        _ => rhs.iter().map(|z| z / two_mc2).collect(),
    };
    let diff: Vec<C64> = chi.iter().zip(&pred).map(|(a, b)| a - b).collect();
    let (np, nc) = (vec_norm(phi), vec_norm(chi));
    let residual = vec_norm(&diff);
    Ok(EliminationReport {
        level_index,
        ratio_small_large: nc / np,
        residual,
        relative_residual: (nc > 0.0).then(|| residual / nc),
    })
}

/// How the magnetic field follows `c` in a sweep.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldScaling {
    /// `B` fixed. With the Gaussian coupling `(e/c)A` the nonrelativistic
    /// energies `ħ|eB|/m₀c` then shrink with `c`.
    FixedField,
    /// `B ∝ c`, so `ω_c = |eB|/m₀c` and the whole Pauli problem stay fixed.
    #[default]
    FixedCyclotron,
}

/// A physical setup that can be rebuilt at any `c`.
///
/// `phys.c` is the reference speed of light at which the field equals `b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_max: usize,
    pub margin: usize,
    pub phys: PhysParams,
    /// Symmetric-gauge field at the reference `c`; 0 for the free particle.
    pub b: f64,
    pub scaling: FieldScaling,
    /// Gradient of the scalar potential, `A₀ = g·x`; held fixed in `c`.
    pub a0: [f64; 2],
    /// Oscillator length for `b = 0`; with a field the Larmor length is used.
    pub free_length: f64,
    pub qtheta_mode: QThetaMode,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            n_max: 16,
            margin: 2,
            phys: PhysParams::default(),
            b: 1.0,
            scaling: FieldScaling::default(),
            a0: [0.0; 2],
            free_length: 1.0,
            qtheta_mode: QThetaMode::default(),
        }
    }
}

impl Scenario {
    pub fn field_at(&self, c: f64) -> f64 {
        match self.scaling {
            FieldScaling::FixedField => self.b,
            FieldScaling::FixedCyclotron => self.b * c / self.phys.c,
        }
    }

    pub fn phys_at(&self, c: f64) -> PhysParams {
        self.phys.with_c(c)
    }

    pub fn potential_at(&self, c: f64) -> EMPotential {
        let gauge = if self.b == 0.0 { EMPotential::zero() } else { EMPotential::symmetric_gauge(self.field_at(c)) };
        if self.a0 == [0.0; 2] {
            gauge
        } else {
            EMPotential::linear(gauge.a, self.a0)
        }
    }

    pub fn basis_at(&self, c: f64) -> Result<BasisSpec> {
        let phys = self.phys_at(c);
        let length = phys.larmor_length(self.field_at(c)).unwrap_or(self.free_length);
        BasisSpec::new(self.n_max, length)
    }

    /// Interior levels with a field; every level for the free particle.
    pub fn selection(&self) -> LevelSelection {
        if self.b == 0.0 || self.phys.e == 0.0 {
            LevelSelection::All
        } else {
            LevelSelection::Interior
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.phys.validate()?;
        BasisSpec::new(self.n_max, 1.0)?;
        if self.margin >= self.n_max {
            return Err(invalid("margin", format!("must be below n_max = {}", self.n_max)));
        }
        if !self.b.is_finite() {
            return Err(invalid("B", "must be finite"));
        }
        if self.a0.iter().any(|g| !g.is_finite()) {
            return Err(invalid("a0", "must be finite"));
        }
        if !(self.free_length > 0.0 && self.free_length.is_finite()) {
            return Err(invalid("osc_length", "must be positive and finite"));
        }
        Ok(())
    }

    pub fn nc(&self, theta: f64, eta: f64) -> Result<NCParams> {
        NCParams::new(theta, eta, self.phys.hbar)
    }
}

/// Dirac-versus-Pauli level data at one `c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub c: f64,
    /// `E_Dirac − m₀c²` per tracked level.
    pub dirac_minus_rest: Vec<f64>,
    pub e_pauli: Vec<f64>,
    pub abs_err: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub c_values: Vec<f64>,
    pub level_indices: Vec<usize>,
    pub points: Vec<ConvergencePoint>,
    /// `max_level |(E_Dirac − m₀c²) − E_Pauli|` per `c`.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log err` against `log c`; `None` without levels.
    pub fitted_slope: Option<f64>,
    /// `ROUNDOFF_FACTOR · ε · m₀c²` per `c`: discrepancies below this are
    /// eigensolver noise on energies of size `m₀c²`.
    pub roundoff: Vec<f64>,
}

/// Multiple of `ε·m₀c²` below which a Dirac − Pauli discrepancy is roundoff.
pub const ROUNDOFF_FACTOR: f64 = 1e3;

/// How one level's discrepancy behaves over the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelTrend {
    StrictlyDecreasing,
    /// Discrepancy at or below the roundoff floor for every `c` (exact level).
    AtRoundoff,
    NotDecreasing,
}

impl ConvergenceReport {
    /// The per-`c` maximum error decreases strictly.
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn level_trend(&self, l: usize) -> LevelTrend {
        let errs: Vec<f64> = self.points.iter().map(|p| p.abs_err[l]).collect();
        if errs.iter().zip(&self.roundoff).all(|(e, r)| e <= r) {
            LevelTrend::AtRoundoff
        } else if errs.windows(2).all(|w| w[1] < w[0]) {
            LevelTrend::StrictlyDecreasing
        } else {
            LevelTrend::NotDecreasing
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("c_list", "need at least two points of equal length"));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Numerical("log-log fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

/// `‖U†W‖_F² / dim U`: the fraction of `U` contained in `span W`.
fn subspace_overlap(u: &MatrixC, w: &MatrixC) -> f64 {
    let m = &u.adjoint() * w;
    m.frobenius().powi(2) / u.cols() as f64
}

/// Upper (large) spinor half of Dirac level vectors.
fn large_components(level: &Level) -> MatrixC {
    let half = level.vectors.rows() / 2;
    level.vectors.block(0, 0, half, level.vectors.cols())
}

const TRACKING_OVERLAP: f64 = 0.9;

fn best_match(u: &MatrixC, candidates: &[Level], project: impl Fn(&Level) -> MatrixC) -> Option<(usize, f64)> {
    candidates
        .iter()
        .enumerate()
        .map(|(j, l)| (j, subspace_overlap(u, &project(l))))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
}

struct LevelsAtC {
    dirac: Vec<Level>,
    pauli: Vec<Level>,
    rest: f64,
}

fn levels_at(scenario: &Scenario, c: f64) -> Result<LevelsAtC> {
    let phys = scenario.phys_at(c);
    let basis = scenario.basis_at(c)?;
    let pot = scenario.potential_at(c);
    let sel = scenario.selection();
    let dirac = dirac_positive_levels(&dirac_h(&basis, &pot, &phys)?, sel, scenario.margin)?;
    let pauli = levels(&pauli_h_full(&basis, &pot, &phys)?, sel, scenario.margin, None)?;
    Ok(LevelsAtC { dirac, pauli, rest: phys.rest_energy() })
}

/// Dirac → Pauli convergence of the listed Pauli levels over `c_list`.
///
/// Levels are identified at the first `c` by their index among Pauli levels,
/// followed to later `c` by eigenvector overlap, and paired with the Dirac
/// level whose large component spans the same space.
pub fn nonrel_convergence(scenario: &Scenario, c_list: &[f64], level_indices: &[usize]) -> Result<ConvergenceReport> {
    scenario.validate()?;
    if c_list.len() < 3 {
        return Err(invalid("c_list", "need at least three values"));
    }
    if c_list.iter().any(|&c| c.is_nan() || c <= 0.0 || c.is_infinite()) || c_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("c_list", "must be positive and strictly increasing"));
    }
    let data: Vec<LevelsAtC> = c_list.par_iter().map(|&c| levels_at(scenario, c)).collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(c_list.len());
    let mut tracked: Vec<usize> = level_indices.to_vec();
    for (k, (d, &c)) in data.iter().zip(c_list).enumerate() {
        if k == 0 {
            if let Some(&bad) = level_indices.iter().find(|&&l| l >= d.pauli.len()) {
                return Err(Error::LevelTracking(format!("level {bad} not among the {} interior Pauli levels", d.pauli.len())));
            }
        } else {
            let prev = &data[k - 1].pauli;
            for (slot, &orig) in tracked.iter_mut().zip(level_indices) {
                let (j, ov) = best_match(&prev[*slot].vectors, &d.pauli, |l| l.vectors.clone())
                    .ok_or_else(|| Error::LevelTracking(format!("no Pauli levels at c = {c}")))?;
                if ov < TRACKING_OVERLAP {
                    return Err(Error::LevelTracking(format!("level {orig} lost between c = {} and c = {c} (overlap {ov:.3})", c_list[k - 1])));
                }
                *slot = j;
            }
        }
        let mut dm = Vec::new();
        let mut ep = Vec::new();
        let mut err = Vec::new();
        for (&slot, &orig) in tracked.iter().zip(level_indices) {
            let pl = &d.pauli[slot];
            let (j, ov) = best_match(&pl.vectors, &d.dirac, large_components)
                .ok_or_else(|| Error::LevelTracking(format!("no positive-branch Dirac levels at c = {c}")))?;
            // the large component carries 1 − O(1/c²) of the norm
            if ov < TRACKING_OVERLAP * 0.5 {
                return Err(Error::LevelTracking(format!("level {orig} has no Dirac partner at c = {c} (overlap {ov:.3})")));
            }
            let e_d = d.dirac[j].energy - d.rest;
            dm.push(e_d);
            ep.push(pl.energy);
            err.push((e_d - pl.energy).abs());
        }
        points.push(ConvergencePoint { c, dirac_minus_rest: dm, e_pauli: ep, abs_err: err });
    }
    let errors: Vec<f64> = points.iter().map(|p| p.abs_err.iter().fold(0.0, |m: f64, &e| m.max(e))).collect();
    let fitted_slope = if level_indices.is_empty() { None } else { Some(loglog_slope(c_list, &errors)?) };
    let roundoff = data.iter().map(|d| ROUNDOFF_FACTOR * f64::EPSILON * d.rest).collect();
    Ok(ConvergenceReport { c_values: c_list.to_vec(), level_indices: level_indices.to_vec(), points, errors, fitted_slope, roundoff })
}

/// Small-component elimination for one Dirac level across `c_list`.
pub fn elimination_scan(scenario: &Scenario, c_list: &[f64], level: usize, mode: EliminationMode, theta: f64) -> Result<Vec<(f64, EliminationReport)>> {
    scenario.validate()?;
    c_list
        .par_iter()
        .map(|&c| {
            let phys = scenario.phys_at(c);
            let basis = scenario.basis_at(c)?;
            let pot = scenario.potential_at(c);
            let nc = scenario.nc(theta, 0.0)?;
            let h = nc_dirac_h(&basis, &pot, &phys, &nc)?;
            let lv = dirac_positive_levels(&h, scenario.selection(), scenario.margin)?;
            let l = lv
                .get(level)
                .ok_or_else(|| Error::LevelTracking(format!("only {} positive-branch levels at c = {c}", lv.len())))?;
            Ok((c, eliminate_small_component(&l.vector(0), &h, mode, level)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcSweepRow {
    pub theta: f64,
    pub eta: f64,
    pub hamiltonian: String,
    pub level: usize,
    pub energy: f64,
    /// `E(θ, η) − E(0, 0)`.
    pub shift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcSweepReport {
    pub rows: Vec<NcSweepRow>,
    /// NC Pauli matrices are bitwise identical across `η` at every `θ`.
    pub pauli_eta_independent: bool,
    /// Largest `|E(θ, η) − E(θ, η₀)|` of NC Dirac levels over the `η` list.
    pub dirac_eta_sensitivity: f64,
}

struct GridPoint {
    dirac: Vec<f64>,
    pauli: Vec<f64>,
    pauli_matrix: MatrixC,
}

/// Low-lying NC Dirac and NC Pauli levels over a `(θ, η)` grid at the
/// scenario's reference `c`.
///
/// Dirac levels follow the scenario's [`LevelSelection`]. Large `η` changes
/// the effective field, the Larmor-matched basis stops fitting and interior
/// levels disappear; that is reported as [`Error::LevelTracking`].
pub fn nc_shift_sweep(scenario: &Scenario, thetas: &[f64], etas: &[f64], level_count: usize, order: u32) -> Result<NcSweepReport> {
    scenario.validate()?;
    if thetas.is_empty() || etas.is_empty() {
        return Err(invalid("theta_list", "theta and eta lists must be nonempty"));
    }
    let c = scenario.phys.c;
    let phys = scenario.phys;
    let basis = scenario.basis_at(c)?;
    let pot = scenario.potential_at(c);
    let sel = scenario.selection();
    let grid: Vec<(f64, f64)> = std::iter::once((0.0, 0.0))
        .chain(thetas.iter().flat_map(|&t| etas.iter().map(move |&e| (t, e))))
        .collect();
    let take = |lv: Vec<Level>| -> Result<Vec<f64>> {
        if lv.len() < level_count {
            return Err(Error::LevelTracking(format!("only {} interior levels, {level_count} requested", lv.len())));
        }
        Ok(lv.into_iter().take(level_count).map(|l| l.energy).collect())
    };
    let points: Vec<GridPoint> = grid
        .par_iter()
        .map(|&(theta, eta)| {
            let nc = scenario.nc(theta, eta)?;
            let hd = nc_dirac_h(&basis, &pot, &phys, &nc)?;
            let hp = nc_pauli_h(&basis, &pot, &phys, &nc, order, scenario.qtheta_mode)?;
            Ok(GridPoint {
                dirac: take(dirac_positive_levels(&hd, sel, scenario.margin)?)?,
                // the linear Pauli operator has no diamagnetic term and does not
                // confine, so no eigenvector is interior: report the truncated spectrum
                pauli: take(levels(&hp, LevelSelection::All, scenario.margin, None)?)?,
                pauli_matrix: hp.matrix,
            })
        })
        .collect::<Result<_>>()?;

    let base = &points[0];
    let mut rows = Vec::new();
    for (&(theta, eta), p) in grid.iter().zip(&points).skip(1) {
        for (name, e, e0) in [("nc-dirac", &p.dirac, &base.dirac), ("nc-pauli", &p.pauli, &base.pauli)] {
            for l in 0..level_count {
                rows.push(NcSweepRow { theta, eta, hamiltonian: name.into(), level: l, energy: e[l], shift: e[l] - e0[l] });
            }
        }
    }
    let ne = etas.len();
    let mut pauli_eta_independent = true;
    let mut dirac_eta_sensitivity = 0.0f64;
    for t in 0..thetas.len() {
        let first = &points[1 + t * ne];
        for e in 1..ne {
            let p = &points[1 + t * ne + e];
            pauli_eta_independent &= p.pauli_matrix.bitwise_eq(&first.pauli_matrix);
            for l in 0..level_count {
                dirac_eta_sensitivity = dirac_eta_sensitivity.max((p.dirac[l] - first.dirac[l]).abs());
            }
        }
    }
    Ok(NcSweepReport { rows, pauli_eta_independent, dirac_eta_sensitivity })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub order: u32,
    /// Largest eigenvalue difference against the exact-inverse operator.
    pub spectral_distance: f64,
    /// Max-abs entry of the matrix difference.
    pub matrix_distance: f64,
    /// `spectral_distance(order) / spectral_distance(previous order)`.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub theta: f64,
    pub spectral_radius: f64,
    pub rows: Vec<SeriesRow>,
}

/// Truncated Maclaurin series of the NC Pauli kinetic factor against its
/// exact resummation, at the scenario's reference `c`.
pub fn series_truncation_error(scenario: &Scenario, theta: f64, orders: &[u32]) -> Result<SeriesReport> {
    scenario.validate()?;
    let c = scenario.phys.c;
    let phys = scenario.phys;
    let basis = scenario.basis_at(c)?;
    let pot = scenario.potential_at(c);
    let nc = scenario.nc(theta, 0.0)?;
    let rho = spectral_radius(&theta_matrix(&basis, &pot, &phys, theta, scenario.qtheta_mode)?)?;
    let exact = nc_pauli_h_resummed(&basis, &pot, &phys, &nc, scenario.qtheta_mode)?;
    let exact_vals = hermitian_eigenvalues(&exact.matrix)?;
    let computed: Vec<(u32, f64, f64)> = orders
        .par_iter()
        .map(|&order| {
            let h = nc_pauli_h(&basis, &pot, &phys, &nc, order, scenario.qtheta_mode)?;
            let vals = hermitian_eigenvalues(&h.matrix)?;
            let sd = vals.iter().zip(&exact_vals).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            Ok((order, sd, (&h.matrix - &exact.matrix).max_abs()))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SeriesRow> = Vec::with_capacity(computed.len());
    for (order, sd, md) in computed {
        let ratio = rows.last().and_then(|p| (p.spectral_distance > 0.0).then(|| sd / p.spectral_distance));
        rows.push(SeriesRow { order, spectral_distance: sd, matrix_distance: md, ratio });
    }
    Ok(SeriesReport { theta, spectral_radius: rho, rows })
}

/// `⟨v|H|v⟩` for a normalized `v`.
pub fn expectation(h: &MatrixC, v: &[C64]) -> Result<f64> {
    Ok(inner(v, &h.matvec(v)?).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::rest_frame_h;

    #[test]
    fn slope_of_exact_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-2.0)).collect();
        assert!((loglog_slope(&x, &y).unwrap() + 2.0).abs() < 1e-12);
        assert!(loglog_slope(&x, &[1.0, 0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn spectrum_near_target() {
        let phys = PhysParams { c: 3.0, ..PhysParams::default() };
        let h = rest_frame_h(&BasisSpec::new(4, 1.0).unwrap(), &phys, &NCParams::commutative()).unwrap();
        let s = spectrum_near(&h, 3, 9.0).unwrap();
        assert_eq!(s.eigenvalues, vec![9.0; 3]);
        assert!(spectrum(&h, h.dim() + 1).is_err());
    }

    #[test]
    fn field_scaling() {
        let mut s = Scenario { phys: PhysParams { c: 10.0, ..PhysParams::default() }, ..Scenario::default() };
        assert_eq!(s.field_at(40.0), 4.0);
        let l10 = s.basis_at(10.0).unwrap().osc_length;
        let l40 = s.basis_at(40.0).unwrap().osc_length;
        assert!((l10 - l40).abs() < 1e-12);
        s.scaling = FieldScaling::FixedField;
        assert_eq!(s.field_at(40.0), 1.0);
    }

    #[test]
    fn convergence_needs_three_increasing_values() {
        let s = Scenario { n_max: 6, ..Scenario::default() };
        assert!(nonrel_convergence(&s, &[10.0, 20.0], &[0]).is_err());
        assert!(nonrel_convergence(&s, &[10.0, 20.0, 15.0], &[0]).is_err());
    }
}
