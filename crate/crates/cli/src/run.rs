//! Command dispatch: resolved [`RunConfig`] in, typed [`Payload`] out.

use ncdirac::hamiltonians::{dirac_h, g_factor_check, kinetic_pauli_residual, pauli_h_full, EMPotential, PhysParams};
use ncdirac::limits::{
    dirac_positive_levels, levels, nc_shift_sweep, nonrel_convergence, series_truncation_error, LevelSelection,
    LevelTrend, Scenario,
};
use ncdirac::phase_space::{bopp_shift, bopp_shift_with, build_canonical_ops, nc_algebra_residuals, BasisSpec, BoppSigns, NCParams};
use ncdirac::spinor_algebra::{clifford_residual, pauli_identity_residual_real, standard_rep};
use ncdirac::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{Command, RunConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationRow {
    pub theta: f64,
    pub eta: f64,
    pub relation: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandauRow {
    pub hamiltonian: String,
    pub level: usize,
    pub energy: f64,
    pub multiplicity: usize,
    pub oracle: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub c: f64,
    pub level: usize,
    #[serde(rename = "E_dirac_minus_rest")]
    pub e_dirac_minus_rest: f64,
    #[serde(rename = "E_pauli")]
    pub e_pauli: f64,
    pub abs_err: f64,
}

pub use ncdirac::limits::{NcSweepRow as SweepRow, SeriesRow};

/// Command-specific results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    AlgebraCheck {
        rows: Vec<CheckRow>,
    },
    NcAlgebra {
        rows: Vec<RelationRow>,
    },
    Landau {
        cyclotron_frequency: f64,
        rows: Vec<LandauRow>,
    },
    Convergence {
        field_at_reference: f64,
        fitted_slope: Option<f64>,
        strictly_decreasing: bool,
        level_trends: Vec<LevelTrend>,
        rows: Vec<ConvergenceRow>,
    },
    NcSweep {
        pauli_eta_independent: bool,
        dirac_eta_sensitivity: f64,
        rows: Vec<SweepRow>,
    },
    Series {
        theta: f64,
        spectral_radius: f64,
        rows: Vec<SeriesRow>,
    },
}

impl RunConfig {
    pub fn phys_params(&self) -> Result<PhysParams> {
        PhysParams::new(self.phys.m0, self.phys.c, self.phys.e, self.phys.hbar)
    }

    /// Scenario whose reference speed of light is `c_ref`.
    pub fn scenario(&self, c_ref: f64) -> Result<Scenario> {
        let s = Scenario {
            n_max: self.basis.n_max,
            margin: self.basis.margin,
            phys: self.phys_params()?.with_c(c_ref),
            b: self.potential.b,
            scaling: self.potential.field_scaling,
            a0: self.potential.a0,
            free_length: self.basis.osc_length,
            qtheta_mode: self.qtheta_mode,
        };
        s.validate()?;
        Ok(s)
    }

    /// Basis matched to the field at `phys.c`, or `osc_length` without one.
    fn basis(&self, phys: &PhysParams) -> Result<BasisSpec> {
        let length = phys.larmor_length(self.potential.b).unwrap_or(self.basis.osc_length);
        BasisSpec::new(self.basis.n_max, length)
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Payload> {
    match cfg.command {
        Command::AlgebraCheck => algebra_check(cfg),
        Command::NcAlgebra => nc_algebra(cfg),
        Command::Landau => landau(cfg),
        Command::Convergence => convergence(cfg),
        Command::NcSweep => nc_sweep(cfg),
        Command::Series => series(cfg),
    }
}

fn algebra_check(cfg: &RunConfig) -> Result<Payload> {
    let rep = standard_rep();
    let mut rows = vec![CheckRow { check: "clifford".into(), residual: clifford_residual(&rep) }];

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst = 0.0f64;
    for _ in 0..cfg.pairs {
        let a: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let b: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        worst = worst.max(pauli_identity_residual_real(&rep, a, b));
    }
    rows.push(CheckRow { check: "pauli_identity_random".into(), residual: worst });

    let phys = cfg.phys_params()?;
    let basis = cfg.basis(&phys)?;
    let pot = EMPotential::symmetric_gauge(cfg.potential.b);
    rows.push(CheckRow {
        check: "pauli_identity_kinetic".into(),
        residual: kinetic_pauli_residual(&basis, &pot, &phys, cfg.basis.margin)?,
    });

    let ops = build_canonical_ops(&basis, phys.hbar)?;
    let report = nc_algebra_residuals(&ops, &NCParams::commutative(), cfg.basis.margin)?;
    for (label, r) in report.entries() {
        rows.push(CheckRow { check: format!("canonical {label}"), residual: r });
    }

    if cfg.potential.b != 0.0 && phys.e != 0.0 {
        let g = g_factor_check(&basis, cfg.potential.b, &phys, 1, cfg.basis.margin)?;
        rows.push(CheckRow { check: "g_factor_minus_2".into(), residual: (g.ratio - 2.0).abs() });
    }
    Ok(Payload::AlgebraCheck { rows })
}

fn nc_algebra(cfg: &RunConfig) -> Result<Payload> {
    let hbar = cfg.phys.hbar;
    let basis = BasisSpec::new(cfg.basis.n_max, cfg.basis.osc_length)?;
    let ops = build_canonical_ops(&basis, hbar)?;
    let mut rows = Vec::new();
    for &theta in &cfg.nc.theta_list {
        for &eta in &cfg.nc.eta_list {
            let nc = NCParams::new(theta, eta, hbar)?;
            let shifted = bopp_shift(&ops, &nc)?;
            let report = nc_algebra_residuals(&shifted, &nc, cfg.basis.margin)?;
            for (label, r) in report.entries() {
                rows.push(RelationRow { theta, eta, relation: label.into(), residual: r });
            }
            rows.push(RelationRow {
                theta,
                eta,
                relation: "hbar_eff".into(),
                residual: (report.measured_hbar_eff - nc.hbar_eff()).abs(),
            });
            let literal = bopp_shift_with(&ops, &nc, BoppSigns::ReversedY)?;
            let lit = nc_algebra_residuals(&literal, &nc, cfg.basis.margin)?;
            rows.push(RelationRow { theta, eta, relation: "[x,y]-i*theta (reversed-y signs)".into(), residual: lit.x_y });
        }
    }
    Ok(Payload::NcAlgebra { rows })
}

fn landau(cfg: &RunConfig) -> Result<Payload> {
    let phys = cfg.phys_params()?;
    let b = cfg.potential.b;
    let basis = cfg.basis(&phys)?;
    let pot = EMPotential::symmetric_gauge(b);
    let omega = phys.cyclotron_frequency(b);
    let hw = phys.hbar * omega;
    let rest = phys.rest_energy();

    let need = |found: usize, what: &str| -> Result<()> {
        if found < cfg.levels {
            return Err(Error::LevelTracking(format!("only {found} interior {what} levels, {} requested", cfg.levels)));
        }
        Ok(())
    };
    let mut rows = Vec::new();
    let hd = dirac_h(&basis, &pot, &phys)?;
    let dirac = dirac_positive_levels(&hd, LevelSelection::Interior, cfg.basis.margin)?;
    need(dirac.len(), "Dirac")?;
    for (n, l) in dirac.iter().take(cfg.levels).enumerate() {
        let oracle = rest * (1.0 + 2.0 * n as f64 * hw / rest).sqrt();
        rows.push(LandauRow {
            hamiltonian: "dirac".into(),
            level: n,
            energy: l.energy,
            multiplicity: l.multiplicity,
            oracle,
            rel_err: (l.energy - oracle).abs() / oracle,
        });
    }
    let hp = pauli_h_full(&basis, &pot, &phys)?;
    let pauli = levels(&hp, LevelSelection::Interior, cfg.basis.margin, None)?;
    need(pauli.len(), "Pauli")?;
    for (n, l) in pauli.iter().take(cfg.levels).enumerate() {
        let oracle = n as f64 * hw;
        rows.push(LandauRow {
            hamiltonian: "pauli-full".into(),
            level: n,
            energy: l.energy,
            multiplicity: l.multiplicity,
            oracle,
            // level 0 sits at zero: measure against ħω_c instead
            rel_err: (l.energy - oracle).abs() / oracle.max(hw),
        });
    }
    Ok(Payload::Landau { cyclotron_frequency: omega, rows })
}

fn convergence(cfg: &RunConfig) -> Result<Payload> {
    // the field is specified at the smallest c of the sweep
    let c_ref = cfg.phys.c_list[0];
    let scenario = cfg.scenario(c_ref)?;
    let idx: Vec<usize> = (0..cfg.levels).collect();
    let report = nonrel_convergence(&scenario, &cfg.phys.c_list, &idx)?;
    let mut rows = Vec::new();
    for p in &report.points {
        for (k, &l) in idx.iter().enumerate() {
            rows.push(ConvergenceRow {
                c: p.c,
                level: l,
                e_dirac_minus_rest: p.dirac_minus_rest[k],
                e_pauli: p.e_pauli[k],
                abs_err: p.abs_err[k],
            });
        }
    }
    Ok(Payload::Convergence {
        field_at_reference: scenario.b,
        fitted_slope: report.fitted_slope,
        strictly_decreasing: report.strictly_decreasing(),
        level_trends: (0..idx.len()).map(|l| report.level_trend(l)).collect(),
        rows,
    })
}

fn nc_sweep(cfg: &RunConfig) -> Result<Payload> {
    let scenario = cfg.scenario(cfg.phys.c)?;
    let r = nc_shift_sweep(&scenario, &cfg.nc.theta_list, &cfg.nc.eta_list, cfg.levels, cfg.series.order)?;
    Ok(Payload::NcSweep {
        pauli_eta_independent: r.pauli_eta_independent,
        dirac_eta_sensitivity: r.dirac_eta_sensitivity,
        rows: r.rows,
    })
}

fn series(cfg: &RunConfig) -> Result<Payload> {
    let scenario = cfg.scenario(cfg.phys.c)?;
    let r = series_truncation_error(&scenario, cfg.nc.theta, &cfg.series.orders)?;
    Ok(Payload::Series { theta: r.theta, spectral_radius: r.spectral_radius, rows: r.rows })
}
