//! Dirac and Pauli Hamiltonians, commutative and noncommutative, as dense
//! matrices on `spinor ⊗ orbital` with the spinor as the slow index.
//!
//! Potentials are affine: `A_i(x) = h_ij x_j`, `A₀(x) = g·x`. The magnetic
//! field is then the constant `B = ∂x A_y − ∂y A_x = h_10 − h_01`.
//!
//! | builder | operator |
//! |---|---|
//! | [`dirac_h`] | `cα·Π + eA₀ + βm₀c²` |
//! | [`nc_dirac_h`] | `dirac_h + (c/ħ)η Q_η + (e/ħ)θ Q_θ` |
//! | [`rest_frame_h`] | `βm₀c² + (c/ħ)η Q_η` |
//! | [`pauli_h_full`] | `Π²/2m₀ − (eħ/2m₀c)σ·B + eA₀` |
//! | [`pauli_h_linear`] | `p²/2m₀ − (e/2m₀c)(L_z + 2S_z)B + eA₀` |
//! | [`nc_pauli_h`] | `½{Σ_j Θ^j, K} + eA₀ + 2m₀c²Θ` |
//!
//! with `Π = p − (e/c)A`, `K` the kinetic part of [`pauli_h_linear`] and
//! `Θ = (e/2m₀ħc²) Q_θ` evaluated in the two-component space (see [`QThetaMode`]).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::Spectrum;
use crate::linalg::{hermitian_eigenvalues, inverse, MatrixC, ZERO};
use crate::phase_space::{build_canonical_ops, BasisSpec, NCParams, OperatorSet};
use crate::spinor_algebra::{standard_rep, SpinorRep};

/// Rest mass, speed of light, coupling charge and Planck constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub m0: f64,
    pub c: f64,
    pub e: f64,
    pub hbar: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self { m0: 1.0, c: 50.0, e: 1.0, hbar: 1.0 }
    }
}

impl PhysParams {
    pub fn new(m0: f64, c: f64, e: f64, hbar: f64) -> Result<Self> {
        let p = Self { m0, c, e, hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.m0) {
            return Err(invalid("m0", "must be positive and finite"));
        }
        if !positive(self.c) {
            return Err(invalid("c", "must be positive and finite"));
        }
        if !self.e.is_finite() {
            return Err(invalid("e", "must be finite"));
        }
        if !positive(self.hbar) {
            return Err(invalid("hbar", "must be positive and finite"));
        }
        Ok(())
    }

    pub fn with_c(self, c: f64) -> Self {
        Self { c, ..self }
    }

    pub fn rest_energy(&self) -> f64 {
        self.m0 * self.c * self.c
    }

    /// `ω_c = |eB|/(m₀c)`.
    pub fn cyclotron_frequency(&self, b: f64) -> f64 {
        (self.e * b).abs() / (self.m0 * self.c)
    }

    /// Oscillator length that makes the Landau problem block-diagonal in
    /// `n_x + n_y`: `ℓ = √(2ħc/|eB|)`.
    pub fn larmor_length(&self, b: f64) -> Option<f64> {
        let eb = (self.e * b).abs();
        (eb > 0.0).then(|| (2.0 * self.hbar * self.c / eb).sqrt())
    }
}

/// How an [`EMPotential`] was specified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PotentialDescriptor {
    Zero,
    SymmetricGauge { b: f64 },
    Linear,
}

/// Affine potential `A₀ = g·x`, `A_i = h_ij x_j` in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EMPotential {
    pub a0: [f64; 2],
    pub a: [[f64; 2]; 2],
    pub descriptor: PotentialDescriptor,
}

impl Default for EMPotential {
    fn default() -> Self {
        Self::zero()
    }
}

impl EMPotential {
    pub fn zero() -> Self {
        Self { a0: [0.0; 2], a: [[0.0; 2]; 2], descriptor: PotentialDescriptor::Zero }
    }

    /// `A = ½ B×x = (−By/2, Bx/2)`, `A₀ = 0`.
    pub fn symmetric_gauge(b: f64) -> Self {
        Self { a0: [0.0; 2], a: [[0.0, -b / 2.0], [b / 2.0, 0.0]], descriptor: PotentialDescriptor::SymmetricGauge { b } }
    }

    pub fn linear(h: [[f64; 2]; 2], g: [f64; 2]) -> Self {
        Self { a0: g, a: h, descriptor: PotentialDescriptor::Linear }
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.iter().flatten().chain(&self.a0).any(|v| !v.is_finite()) {
            return Err(invalid("potential", "coefficients must be finite"));
        }
        Ok(())
    }

    /// `B_z = ∂x A_y − ∂y A_x`.
    pub fn field_b(&self) -> f64 {
        self.a[1][0] - self.a[0][1]
    }

    pub fn has_vector_potential(&self) -> bool {
        self.a.iter().flatten().any(|&v| v != 0.0)
    }

    pub fn has_scalar_potential(&self) -> bool {
        self.a0.iter().any(|&v| v != 0.0)
    }
}

/// Reduction of the four-spinor `Q_θ` to two-component space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QThetaMode {
    /// Replace `α_i` by `σ_i`.
    #[default]
    Sigma,
    /// Keep the upper-left 2x2 block of each spinor coefficient. The `α`
    /// terms are block-off-diagonal, so only the `A₀` part survives.
    UpperBlock,
}

impl QThetaMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            QThetaMode::Sigma => "sigma",
            QThetaMode::UpperBlock => "upper-block",
        }
    }
}

impl std::str::FromStr for QThetaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(QThetaMode::Sigma),
            "upper-block" => Ok(QThetaMode::UpperBlock),
            other => Err(invalid("qtheta_mode", format!("expected sigma or upper-block, got {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum HamiltonianKind {
    Dirac,
    NcDirac,
    PauliFull,
    PauliLinear,
    NcPauli { order: u32 },
    NcPauliResummed,
    RestFrame,
    NcRestFrame,
}

impl HamiltonianKind {
    /// 4 for Dirac-type operators, 2 for Pauli-type.
    pub fn spinor_components(&self) -> usize {
        match self {
            HamiltonianKind::Dirac | HamiltonianKind::NcDirac | HamiltonianKind::RestFrame | HamiltonianKind::NcRestFrame => 4,
            _ => 2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            HamiltonianKind::Dirac => "dirac".into(),
            HamiltonianKind::NcDirac => "nc-dirac".into(),
            HamiltonianKind::PauliFull => "pauli-full".into(),
            HamiltonianKind::PauliLinear => "pauli-linear".into(),
            HamiltonianKind::NcPauli { order } => format!("nc-pauli({order})"),
            HamiltonianKind::NcPauliResummed => "nc-pauli(exact)".into(),
            HamiltonianKind::RestFrame => "rest-frame".into(),
            HamiltonianKind::NcRestFrame => "nc-rest-frame".into(),
        }
    }
}

/// A Hamiltonian matrix together with everything needed to rebuild it.
#[derive(Clone, Debug)]
pub struct HamiltonianMatrix {
    pub matrix: MatrixC,
    pub kind: HamiltonianKind,
    pub basis: BasisSpec,
    pub phys: PhysParams,
    pub nc: NCParams,
    pub potential: EMPotential,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn spinor_components(&self) -> usize {
        self.kind.spinor_components()
    }
}

/// Derived operators shared by the builders.
#[derive(Clone, Debug)]
pub struct OperatorBundle {
    /// Orbital `Π_x`, `Π_y`.
    pub pi_x: MatrixC,
    pub pi_y: MatrixC,
    /// Orbital `L_z = x p_y − y p_x`.
    pub lz: MatrixC,
    /// `(ħ/2)σ_z ⊗ I`.
    pub sz: MatrixC,
    /// Four-spinor `α_x y − α_y x`.
    pub q_eta: MatrixC,
    /// Four-spinor `[∇(α·A − A₀) × p]_z`.
    pub q_theta: MatrixC,
    /// Two-component `(e/2m₀ħc²) Q_θ`.
    pub theta_theta: MatrixC,
}

pub fn operator_bundle(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams, mode: QThetaMode) -> Result<OperatorBundle> {
    let (ops, rep) = setup(basis, pot, phys)?;
    let (pi_x, pi_y) = kinetic_momentum(&ops, pot, phys)?;
    let n = ops.basis.dim();
    Ok(OperatorBundle {
        pi_x,
        pi_y,
        lz: angular_momentum(&ops),
        sz: rep.sigma[2].scale_real(phys.hbar / 2.0).kron(&MatrixC::identity(n)),
        q_eta: q_eta_ops(&ops, &rep),
        q_theta: q_theta_ops(&ops, pot, &rep),
        theta_theta: theta_operator(&ops, pot, phys, &rep, mode),
        })
}

fn setup(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams) -> Result<(OperatorSet, SpinorRep)> {
    phys.validate()?;
    pot.validate()?;
    Ok((build_canonical_ops(basis, phys.hbar)?, standard_rep()))
}

fn check_nc(nc: &NCParams, phys: &PhysParams) -> Result<NCParams> {
    let nc = NCParams::new(nc.theta, nc.eta, nc.hbar)?;
    if nc.hbar != phys.hbar {
        return Err(invalid("hbar", format!("noncommutativity uses ħ = {} but the physical parameters use ħ = {}", nc.hbar, phys.hbar)));
    }
    Ok(nc)
}

/// `c_x x + c_y y`, or `None` if both coefficients vanish.
fn affine(ops: &OperatorSet, cx: f64, cy: f64) -> Option<MatrixC> {
    match (cx != 0.0, cy != 0.0) {
        (false, false) => None,
        (true, false) => Some(ops.x.scale_real(cx)),
        (false, true) => Some(ops.y.scale_real(cy)),
        (true, true) => Some(&ops.x.scale_real(cx) + &ops.y.scale_real(cy)),
    }
}

/// `Π_i = p_i − (e/c)A_i(x)`.
///
/// Accepts canonical or Bopp-shifted operators; the potential is evaluated on
/// whatever `x`, `y` the set carries.
pub fn kinetic_momentum(ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams) -> Result<(MatrixC, MatrixC)> {
    phys.validate()?;
    pot.validate()?;
    let k = -phys.e / phys.c;
    let shift = |p: &MatrixC, row: [f64; 2]| match affine(ops, k * row[0], k * row[1]) {
        Some(a) if phys.e != 0.0 => p + &a,
        _ => p.clone(),
    };
    Ok((shift(&ops.px, pot.a[0]), shift(&ops.py, pot.a[1])))
}

/// `L_z = x p_y − y p_x`.
pub fn angular_momentum(ops: &OperatorSet) -> MatrixC {
    &(&ops.x * &ops.py) - &(&ops.y * &ops.px)
}

fn scalar_potential(ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams) -> Option<MatrixC> {
    if phys.e == 0.0 {
        return None;
    }
    affine(ops, phys.e * pot.a0[0], phys.e * pot.a0[1])
}

/// `Σ_i S_i ⊗ O_i`, skipping absent terms.
fn spin_sum<'a>(dim: usize, terms: impl IntoIterator<Item = (&'a MatrixC, Option<MatrixC>)>) -> MatrixC {
    let mut out: Option<MatrixC> = None;
    for (s, o) in terms {
        if let Some(o) = o {
            let t = s.kron(&o);
            out = Some(match out {
                None => t,
                Some(acc) => &acc + &t,
            });
        }
    }
    out.unwrap_or_else(|| MatrixC::zeros(dim, dim))
}

fn dirac_matrix(ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams, rep: &SpinorRep) -> Result<MatrixC> {
    let n = ops.basis.dim();
    let (pi_x, pi_y) = kinetic_momentum(ops, pot, phys)?;
    let id4 = MatrixC::identity(4);
    let mut h = spin_sum(
        4 * n,
        [
            (&rep.alpha[0], Some(pi_x.scale_real(phys.c))),
            (&rep.alpha[1], Some(pi_y.scale_real(phys.c))),
            (&rep.beta, Some(MatrixC::identity(n).scale_real(phys.rest_energy()))),
            (&id4, scalar_potential(ops, pot, phys)),
        ],
    );
    // keep the matrix exactly Hermitian
    symmetrize(&mut h);
    Ok(h)
}

/// Averages `H` with `H†` in place; a no-op for exactly Hermitian input.
fn symmetrize(h: &mut MatrixC) {
    let n = h.rows();
    for i in 0..n {
        h[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let (a, b) = (h[(i, j)], h[(j, i)].conj());
            if a != b {
                let m = (a + b) * 0.5;
                h[(i, j)] = m;
                h[(j, i)] = m.conj();
            }
        }
    }
}

/// `cα·Π + eA₀ + βm₀c²`.
pub fn dirac_h(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams) -> Result<HamiltonianMatrix> {
    let (ops, rep) = setup(basis, pot, phys)?;
    Ok(HamiltonianMatrix {
        matrix: dirac_matrix(&ops, pot, phys, &rep)?,
        kind: HamiltonianKind::Dirac,
        basis: ops.basis,
        phys: *phys,
        nc: NCParams { hbar: phys.hbar, ..NCParams::commutative() },
        potential: *pot,
    })
}

fn q_eta_ops(ops: &OperatorSet, rep: &SpinorRep) -> MatrixC {
    &rep.alpha[0].kron(&ops.y) - &rep.alpha[1].kron(&ops.x)
}

/// `Q_η = (α×x)·ẑ = α_x y − α_y x` on the four-spinor space.
pub fn q_eta(basis: &BasisSpec, rep: &SpinorRep) -> Result<MatrixC> {
    let ops = build_canonical_ops(basis, 1.0)?;
    Ok(q_eta_ops(&ops, rep))
}

/// Spinor coefficients `(∂x(α·A − A₀), ∂y(α·A − A₀))` for spin matrices `s`.
fn gradient_coefficients(pot: &EMPotential, s: [&MatrixC; 2]) -> [MatrixC; 2] {
    let dim = s[0].rows();
    let id = MatrixC::identity(dim);
    [0, 1].map(|j| {
        let mut m = id.scale_real(-pot.a0[j]);
        for (i, si) in s.iter().enumerate() {
            if pot.a[i][j] != 0.0 {
                m += &si.scale_real(pot.a[i][j]);
            }
        }
        m
    })
}

/// `∂x(S·A − A₀) ⊗ p_y − ∂y(S·A − A₀) ⊗ p_x`.
fn q_theta_from(ops: &OperatorSet, grad: &[MatrixC; 2]) -> MatrixC {
    let n = ops.basis.dim();
    let nz = |m: &MatrixC| m.max_abs() != 0.0;
    spin_sum(
        grad[0].rows() * n,
        [
            (&grad[0], nz(&grad[0]).then(|| ops.py.clone())),
            (&grad[1], nz(&grad[1]).then(|| -&ops.px)),
        ],
    )
}

fn q_theta_ops(ops: &OperatorSet, pot: &EMPotential, rep: &SpinorRep) -> MatrixC {
    q_theta_from(ops, &gradient_coefficients(pot, [&rep.alpha[0], &rep.alpha[1]]))
}

/// `Q_θ = [∇(α·A − A₀) × p]_z` on the four-spinor space; `A₀` enters as `A₀·I₄`.
pub fn q_theta(basis: &BasisSpec, pot: &EMPotential, rep: &SpinorRep, phys: &PhysParams) -> Result<MatrixC> {
    let (ops, _) = setup(basis, pot, phys)?;
    Ok(q_theta_ops(&ops, pot, rep))
}

fn q_theta_pauli_ops(ops: &OperatorSet, pot: &EMPotential, rep: &SpinorRep, mode: QThetaMode) -> MatrixC {
    let grad = match mode {
        QThetaMode::Sigma => gradient_coefficients(pot, [&rep.sigma[0], &rep.sigma[1]]),
        QThetaMode::UpperBlock => gradient_coefficients(pot, [&rep.alpha[0], &rep.alpha[1]]).map(|g| g.block(0, 0, 2, 2)),
    };
    q_theta_from(ops, &grad)
}

/// Two-component `Q_θ` under the chosen reduction.
pub fn q_theta_pauli(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams, mode: QThetaMode) -> Result<MatrixC> {
    let (ops, rep) = setup(basis, pot, phys)?;
    Ok(q_theta_pauli_ops(&ops, pot, &rep, mode))
}

fn theta_operator(ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams, rep: &SpinorRep, mode: QThetaMode) -> MatrixC {
    let k = phys.e / (2.0 * phys.m0 * phys.hbar * phys.c * phys.c);
    q_theta_pauli_ops(ops, pot, rep, mode).scale_real(k)
}

/// `Θ_θ = (eθ/2m₀ħc²) Q_θ` in two-component space (θ included).
pub fn theta_matrix(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams, theta: f64, mode: QThetaMode) -> Result<MatrixC> {
    let (ops, rep) = setup(basis, pot, phys)?;
    Ok(theta_operator(&ops, pot, phys, &rep, mode).scale_real(theta))
}

/// `cα·Π + eA₀ + βm₀c² + (c/ħ)η Q_η + (e/ħ)θ Q_θ` with canonical operators.
///
/// Zero `θ` or `η` terms are skipped, so `θ = η = 0` reproduces [`dirac_h`] bit for bit.
pub fn nc_dirac_h(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams, nc: &NCParams) -> Result<HamiltonianMatrix> {
    let nc = check_nc(nc, phys)?;
    let (ops, rep) = setup(basis, pot, phys)?;
    let mut h = dirac_matrix(&ops, pot, phys, &rep)?;
    if nc.eta != 0.0 {
        h += &q_eta_ops(&ops, &rep).scale_real(phys.c * nc.eta / phys.hbar);
    }
    if nc.theta != 0.0 {
        h += &q_theta_ops(&ops, pot, &rep).scale_real(phys.e * nc.theta / phys.hbar);
    }
    if !nc.is_commutative() {
        symmetrize(&mut h);
    }
    Ok(HamiltonianMatrix {
        matrix: h,
        kind: if nc.is_commutative() { HamiltonianKind::Dirac } else { HamiltonianKind::NcDirac },
        basis: ops.basis,
        phys: *phys,
        nc,
        potential: *pot,
    })
}

/// `βm₀c² + (c/ħ)η Q_η`.
pub fn rest_frame_h(basis: &BasisSpec, phys: &PhysParams, nc: &NCParams) -> Result<HamiltonianMatrix> {
    let nc = check_nc(nc, phys)?;
    let (ops, rep) = setup(basis, &EMPotential::zero(), phys)?;
    let n = ops.basis.dim();
    let mut h = rep.beta.scale_real(phys.rest_energy()).kron(&MatrixC::identity(n));
    if nc.eta != 0.0 {
        h += &q_eta_ops(&ops, &rep).scale_real(phys.c * nc.eta / phys.hbar);
    }
    Ok(HamiltonianMatrix {
        matrix: h,
        kind: if nc.eta == 0.0 { HamiltonianKind::RestFrame } else { HamiltonianKind::NcRestFrame },
        basis: ops.basis,
        phys: *phys,
        nc,
        potential: EMPotential::zero(),
    })
}

/// Full spectrum of [`rest_frame_h`].
pub fn rest_frame_spectrum(phys: &PhysParams, nc: &NCParams, basis: &BasisSpec) -> Result<Spectrum> {
    let h = rest_frame_h(basis, phys, nc)?;
    crate::limits::spectrum(&h, h.dim())
}

fn pauli_spin_field(ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams, rep: &SpinorRep) -> Option<MatrixC> {
    let b = pot.field_b();
    (b != 0.0 && phys.e != 0.0).then(|| {
        rep.sigma[2].scale_real(-phys.e * phys.hbar * b / (2.0 * phys.m0 * phys.c)).kron(&MatrixC::identity(ops.basis.dim()))
    })
}

/// `Π²/2m₀ − (eħ/2m₀c) σ_z B + eA₀` on the two-component space.
pub fn pauli_h_full(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams) -> Result<HamiltonianMatrix> {
    let (ops, rep) = setup(basis, pot, phys)?;
    let n = ops.basis.dim();
    let (pi_x, pi_y) = kinetic_momentum(&ops, pot, phys)?;
    let pi2 = &(&pi_x * &pi_x) + &(&pi_y * &pi_y);
    let mut orbital = pi2.scale_real(1.0 / (2.0 * phys.m0));
    if let Some(v) = scalar_potential(&ops, pot, phys) {
        orbital += &v;
    }
    let mut h = MatrixC::identity(2).kron(&orbital);
    if let Some(s) = pauli_spin_field(&ops, pot, phys, &rep) {
        h += &s;
    }
    symmetrize(&mut h);
    debug_assert_eq!(h.rows(), 2 * n);
    Ok(HamiltonianMatrix {
        matrix: h,
        kind: HamiltonianKind::PauliFull,
        basis: ops.basis,
        phys: *phys,
        nc: NCParams { hbar: phys.hbar, ..NCParams::commutative() },
        potential: *pot,
    })
}

/// `K = p²/2m₀ − (e/2m₀c)(L_z + 2S_z)B`, two-component.
fn linear_kinetic(ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams, rep: &SpinorRep) -> MatrixC {
    let p2 = &(&ops.px * &ops.px) + &(&ops.py * &ops.py);
    let mut orbital = p2.scale_real(1.0 / (2.0 * phys.m0));
    let b = pot.field_b();
    let mut h;
    if b != 0.0 && phys.e != 0.0 {
        let k = -phys.e * b / (2.0 * phys.m0 * phys.c);
        orbital += &angular_momentum(ops).scale_real(k);
        h = MatrixC::identity(2).kron(&orbital);
        // 2 S_z = ħ σ_z
        h += &rep.sigma[2].scale_real(k * phys.hbar).kron(&MatrixC::identity(ops.basis.dim()));
    } else {
        h = MatrixC::identity(2).kron(&orbital);
    }
    symmetrize(&mut h);
    h
}

fn with_scalar_potential(mut h: MatrixC, ops: &OperatorSet, pot: &EMPotential, phys: &PhysParams) -> MatrixC {
    if let Some(v) = scalar_potential(ops, pot, phys) {
        h += &MatrixC::identity(2).kron(&v);
    }
    h
}

/// `p²/2m₀ − (e/2m₀c)(L_z + 2S_z)B + eA₀`: the Pauli operator without the
/// diamagnetic `A²` term, `B` taken from `pot`.
pub fn pauli_h_linear(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams) -> Result<HamiltonianMatrix> {
    let (ops, rep) = setup(basis, pot, phys)?;
    let h = with_scalar_potential(linear_kinetic(&ops, pot, phys, &rep), &ops, pot, phys);
    Ok(HamiltonianMatrix {
        matrix: h,
        kind: HamiltonianKind::PauliLinear,
        basis: ops.basis,
        phys: *phys,
        nc: NCParams { hbar: phys.hbar, ..NCParams::commutative() },
        potential: *pot,
    })
}

/// Largest `|λ|` of a Hermitian matrix.
pub fn spectral_radius(m: &MatrixC) -> Result<f64> {
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    Ok(hermitian_eigenvalues(m)?.into_iter().fold(0.0, |r, v| r.max(v.abs())))
}

/// `½(A B + B A)`.
fn sym_product(a: &MatrixC, b: &MatrixC) -> MatrixC {
    let mut out = &(a * b) + &(b * a);
    out = out.scale_real(0.5);
    symmetrize(&mut out);
    out
}

struct NcPauliParts {
    ops: OperatorSet,
    kinetic: MatrixC,
    theta: MatrixC,
    nc: NCParams,
}

fn nc_pauli_parts(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams, nc: &NCParams, mode: QThetaMode) -> Result<NcPauliParts> {
    let nc = check_nc(nc, phys)?;
    let (ops, rep) = setup(basis, pot, phys)?;
    let kinetic = linear_kinetic(&ops, pot, phys, &rep);
    let theta = if nc.theta == 0.0 {
        MatrixC::zeros(kinetic.rows(), kinetic.cols())
    } else {
        theta_operator(&ops, pot, phys, &rep, mode).scale_real(nc.theta)
    };
    let rho = spectral_radius(&theta)?;
    if rho >= 1.0 {
        return Err(Error::SeriesDivergence { spectral_radius: rho });
    }
    Ok(NcPauliParts { ops, kinetic, theta, nc })
}

fn assemble_nc_pauli(parts: NcPauliParts, factor: Option<MatrixC>, pot: &EMPotential, phys: &PhysParams, kind: HamiltonianKind) -> HamiltonianMatrix {
    let NcPauliParts { ops, kinetic, theta, nc } = parts;
    let mut h = match factor {
        Some(f) => sym_product(&f, &kinetic),
        None => kinetic,
    };
    h = with_scalar_potential(h, &ops, pot, phys);
    if theta.max_abs() != 0.0 {
        h += &theta.scale_real(2.0 * phys.rest_energy());
        symmetrize(&mut h);
    }
    HamiltonianMatrix { matrix: h, kind, basis: ops.basis, phys: *phys, nc, potential: *pot }
}

/// `½{Σ_{j≤order} Θ^j, K} + eA₀ + 2m₀c²Θ` with `Θ = (eθ/2m₀ħc²) Q_θ`.
///
/// `η` does not enter. Fails with [`Error::SeriesDivergence`] when the
/// spectral radius of `Θ` is at least 1. At `θ = 0` the result equals
/// [`pauli_h_linear`] entrywise.
pub fn nc_pauli_h(
    basis: &BasisSpec,
    pot: &EMPotential,
    phys: &PhysParams,
    nc: &NCParams,
    order: u32,
    mode: QThetaMode,
) -> Result<HamiltonianMatrix> {
    let parts = nc_pauli_parts(basis, pot, phys, nc, mode)?;
    let factor = (parts.theta.max_abs() != 0.0).then(|| {
        let dim = parts.theta.rows();
        let mut sum = MatrixC::identity(dim);
        let mut power = MatrixC::identity(dim);
        for _ in 0..order {
            power = &power * &parts.theta;
            sum += &power;
        }
        sum
    });
    Ok(assemble_nc_pauli(parts, factor, pot, phys, HamiltonianKind::NcPauli { order }))
}

/// Same as [`nc_pauli_h`] with the series replaced by the exact `(1 − Θ)⁻¹`.
pub fn nc_pauli_h_resummed(
    basis: &BasisSpec,
    pot: &EMPotential,
    phys: &PhysParams,
    nc: &NCParams,
    mode: QThetaMode,
) -> Result<HamiltonianMatrix> {
    let parts = nc_pauli_parts(basis, pot, phys, nc, mode)?;
    let factor = if parts.theta.max_abs() != 0.0 {
        let one_minus = &MatrixC::identity(parts.theta.rows()) - &parts.theta;
        Some(inverse(&one_minus)?)
    } else {
        None
    };
    Ok(assemble_nc_pauli(parts, factor, pot, phys, HamiltonianKind::NcPauliResummed))
}

/// `‖P((σ·Π)² − Π² + (e/c)ħ σ_z B)P‖_max` on the interior projector.
pub fn kinetic_pauli_residual(basis: &BasisSpec, pot: &EMPotential, phys: &PhysParams, margin: usize) -> Result<f64> {
    let (ops, rep) = setup(basis, pot, phys)?;
    let n = ops.basis.dim();
    let (pi_x, pi_y) = kinetic_momentum(&ops, pot, phys)?;
    let sp = &rep.sigma[0].kron(&pi_x) + &rep.sigma[1].kron(&pi_y);
    let lhs = &sp * &sp;
    let pi2 = &(&pi_x * &pi_x) + &(&pi_y * &pi_y);
    let mut rhs = MatrixC::identity(2).kron(&pi2);
    rhs += &rep.sigma[2].scale_real(-phys.e * phys.hbar * pot.field_b() / phys.c).kron(&MatrixC::identity(n));
    let keep = ops.basis.spinor_interior_mask(margin, 2)?;
    Ok((&lhs - &rhs).project(&keep).max_abs())
}

/// Spin and orbital Zeeman splittings of [`pauli_h_linear`] in one oscillator shell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GFactorReport {
    pub shell: usize,
    /// `E(m_s + 1) − E(m_s)` at fixed orbital state.
    pub delta_spin: f64,
    /// `E(m_l + 1) − E(m_l)` at fixed spin.
    pub delta_orbital: f64,
    /// `delta_spin / delta_orbital`; 2 for the Pauli coupling.
    pub ratio: f64,
}

/// Compares spin and orbital Zeeman steps using `L_z` eigenstates of the
/// oscillator shell `n_x + n_y = shell`.
///
/// Within a shell `⟨p²⟩` is the same for every state, so energy differences
/// isolate the `(L_z + 2S_z)` coupling.
pub fn g_factor_check(basis: &BasisSpec, b: f64, phys: &PhysParams, shell: usize, margin: usize) -> Result<GFactorReport> {
    if shell == 0 {
        return Err(invalid("shell", "needs at least two m_l values, use shell >= 1"));
    }
    if shell + margin >= basis.n_max {
        return Err(invalid("shell", format!("shell {shell} touches the truncation boundary (n_max = {}, margin = {margin})", basis.n_max)));
    }
    let pot = EMPotential::symmetric_gauge(b);
    let (ops, _) = setup(basis, &pot, phys)?;
    let h = pauli_h_linear(basis, &pot, phys)?.matrix;
    let lz = angular_momentum(&ops);
    let idx: Vec<usize> = (0..=shell).map(|nx| ops.basis.index(nx, shell - nx)).collect();
    let eig = crate::linalg::hermitian_eigen(&lz.submatrix(&idx))?;
    let vecs = eig.vectors.expect("vectors requested");
    let n = ops.basis.dim();
    let energy = |k: usize, spin: usize| -> Result<f64> {
        let mut v = vec![ZERO; 2 * n];
        for (r, &g) in idx.iter().enumerate() {
            v[spin * n + g] = vecs[(r, k)];
        }
        let hv = h.matvec(&v)?;
        Ok(crate::linalg::inner(&v, &hv).re)
    };
    // m_l steps by 2 within a shell; spin index 0 is m_s = +½
    let (lo, hi) = (0, shell);
    let dm_l = (eig.values[hi] - eig.values[lo]) / phys.hbar;
    let delta_orbital = (energy(hi, 1)? - energy(lo, 1)?) / dm_l;
    let delta_spin = energy(lo, 0)? - energy(lo, 1)?;
    Ok(GFactorReport { shell, delta_spin, delta_orbital, ratio: delta_spin / delta_orbital })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize) -> BasisSpec {
        BasisSpec::new(n, 1.0).unwrap()
    }

    #[test]
    fn zero_potential_gives_canonical_momentum() {
        let phys = PhysParams::default();
        let ops = build_canonical_ops(&basis(6), 1.0).unwrap();
        let (px, py) = kinetic_momentum(&ops, &EMPotential::zero(), &phys).unwrap();
        assert!(px.bitwise_eq(&ops.px) && py.bitwise_eq(&ops.py));
        let neutral = PhysParams { e: 0.0, ..phys };
        let (px, _) = kinetic_momentum(&ops, &EMPotential::symmetric_gauge(1.0), &neutral).unwrap();
        assert!(px.bitwise_eq(&ops.px));
    }

    #[test]
    fn symmetric_gauge_field() {
        assert_eq!(EMPotential::symmetric_gauge(2.5).field_b(), 2.5);
        assert_eq!(EMPotential::linear([[0.0, 0.0], [3.0, 0.0]], [0.0; 2]).field_b(), 3.0);
    }

    #[test]
    fn q_theta_special_cases() {
        let rep = standard_rep();
        let phys = PhysParams::default();
        let b = basis(5);
        assert_eq!(q_theta(&b, &EMPotential::zero(), &rep, &phys).unwrap().max_abs(), 0.0);

        let ops = build_canonical_ops(&b, 1.0).unwrap();
        let q = q_theta(&b, &EMPotential::linear([[0.0; 2]; 2], [0.7, 0.0]), &rep, &phys).unwrap();
        let expect = MatrixC::identity(4).kron(&ops.py.scale_real(-0.7));
        assert!((&q - &expect).max_abs() < 1e-15);

        let q = q_theta(&b, &EMPotential::symmetric_gauge(2.0), &rep, &phys).unwrap();
        let expect = &rep.alpha[0].kron(&ops.px) + &rep.alpha[1].kron(&ops.py);
        assert!((&q - &expect).max_abs() < 1e-15);
    }

    #[test]
    fn upper_block_keeps_only_scalar_potential() {
        let phys = PhysParams::default();
        let b = basis(5);
        let q = q_theta_pauli(&b, &EMPotential::symmetric_gauge(1.0), &phys, QThetaMode::UpperBlock).unwrap();
        assert_eq!(q.max_abs(), 0.0);
        let q = q_theta_pauli(&b, &EMPotential::symmetric_gauge(1.0), &phys, QThetaMode::Sigma).unwrap();
        assert!(q.max_abs() > 0.1);
    }

    #[test]
    fn nc_builders_reject_mismatched_hbar() {
        let phys = PhysParams::default();
        let nc = NCParams::new(0.1, 0.0, 2.0).unwrap();
        assert!(matches!(
            nc_dirac_h(&basis(4), &EMPotential::zero(), &phys, &nc),
            Err(Error::InvalidParameter { field: "hbar", .. })
        ));
    }

    #[test]
    fn qtheta_mode_parses() {
        assert_eq!("sigma".parse::<QThetaMode>().unwrap(), QThetaMode::Sigma);
        assert_eq!("upper-block".parse::<QThetaMode>().unwrap(), QThetaMode::UpperBlock);
        assert!("alpha".parse::<QThetaMode>().is_err());
    }

    #[test]
    fn dimensions() {
        let phys = PhysParams::default();
        let b = basis(4);
        assert_eq!(dirac_h(&b, &EMPotential::zero(), &phys).unwrap().dim(), 64);
        assert_eq!(pauli_h_full(&b, &EMPotential::zero(), &phys).unwrap().dim(), 32);
    }
}
