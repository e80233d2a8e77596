//! Commutative and noncommutative phase space on a truncated oscillator basis.
//!
//! The orbital carrier is the product of two truncated 1D oscillator bases,
//! `|n_x, n_y⟩` with `0 <= n_x, n_y < n_max` and flat index `n_x * n_max + n_y`.
//! Position and momentum are the usual ladder combinations
//!
//! ```text
//! x = (ℓ/√2)(a + a†),   p = (iħ/(√2 ℓ))(a† − a)
//! ```
//!
//! with `ℓ` the oscillator length. Truncation breaks `[x, p] = iħ` only on the
//! top level of each axis, so every algebraic check is made on the interior
//! projector that drops the top `margin` levels.
//!
//! The noncommutative operators follow from the Bopp shift
//!
//! ```text
//! x' = x − (θ/2ħ) p_y      y' = y + (θ/2ħ) p_x
//! p_x' = p_x + (η/2ħ) y    p_y' = p_y − (η/2ħ) x
//! ```
//!
//! which realizes `[x', y'] = iθ`, `[p_x', p_y'] = iη` and
//! `[x_i', p_j'] = iħ_eff δ_ij` with `ħ_eff = ħ(1 + θη/4ħ²)`.

mod moyal;

pub use moyal::{rational, star_first_order, star_product, Coefficient, ExactCoeff, PolySymbol};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{MatrixC, I, ZERO};

/// Noncommutativity parameters, both aligned with the z axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NCParams {
    pub theta: f64,
    pub eta: f64,
    pub hbar: f64,
}

impl NCParams {
    pub fn new(theta: f64, eta: f64, hbar: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(invalid("theta", "must be finite"));
        }
        if !eta.is_finite() {
            return Err(invalid("eta", "must be finite"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", "must be positive and finite"));
        }
        Ok(Self { theta, eta, hbar })
    }

    /// `θ = η = 0`, `ħ = 1`.
    pub fn commutative() -> Self {
        Self { theta: 0.0, eta: 0.0, hbar: 1.0 }
    }

    pub fn is_commutative(&self) -> bool {
        self.theta == 0.0 && self.eta == 0.0
    }

    pub fn hbar_eff(&self) -> f64 {
        hbar_eff(self)
    }
}

impl Default for NCParams {
    fn default() -> Self {
        Self::commutative()
    }
}

/// `ħ_eff = ħ(1 + θη/4ħ²)`.
pub fn hbar_eff(nc: &NCParams) -> f64 {
    nc.hbar * (1.0 + nc.theta * nc.eta / (4.0 * nc.hbar * nc.hbar))
}

/// Truncated 2D oscillator basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub n_max: usize,
    pub osc_length: f64,
}

pub const MIN_LEVELS: usize = 4;

impl BasisSpec {
    pub fn new(n_max: usize, osc_length: f64) -> Result<Self> {
        if n_max < MIN_LEVELS {
            return Err(invalid("n_max", format!("must be at least {MIN_LEVELS}, got {n_max}")));
        }
        if !(osc_length > 0.0 && osc_length.is_finite()) {
            return Err(invalid("osc_length", "must be positive and finite"));
        }
        Ok(Self { n_max, osc_length })
    }

    /// Orbital dimension `n_max²`.
    pub fn dim(&self) -> usize {
        self.n_max * self.n_max
    }

    pub fn index(&self, nx: usize, ny: usize) -> usize {
        nx * self.n_max + ny
    }

    pub fn quantum_numbers(&self, idx: usize) -> (usize, usize) {
        (idx / self.n_max, idx % self.n_max)
    }

    fn check_margin(&self, margin: usize) -> Result<()> {
        if margin >= self.n_max {
            return Err(invalid("margin", format!("must be below n_max = {}, got {margin}", self.n_max)));
        }
        Ok(())
    }

    /// Orbital states with `n_x, n_y <= n_max − 1 − margin`.
    pub fn interior_mask(&self, margin: usize) -> Result<Vec<bool>> {
        self.check_margin(margin)?;
        let top = self.n_max - 1 - margin;
        Ok((0..self.dim())
            .map(|i| {
                let (nx, ny) = self.quantum_numbers(i);
                nx <= top && ny <= top
            })
            .collect())
    }

    /// Interior mask repeated over `spin_components` slow spinor blocks.
    pub fn spinor_interior_mask(&self, margin: usize, spin_components: usize) -> Result<Vec<bool>> {
        let m = self.interior_mask(margin)?;
        Ok((0..spin_components).flat_map(|_| m.iter().copied()).collect())
    }
}

/// Whether an [`OperatorSet`] is canonical or Bopp-shifted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OperatorTag {
    Commutative,
    BoppShifted(NCParams),
}

/// `x, y, p_x, p_y` on the orbital space of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSet {
    pub x: MatrixC,
    pub y: MatrixC,
    pub px: MatrixC,
    pub py: MatrixC,
    pub basis: BasisSpec,
    pub hbar: f64,
    pub tag: OperatorTag,
}

/// 1D position and momentum on `n` levels.
pub fn ladder_xp(n: usize, length: f64, hbar: f64) -> (MatrixC, MatrixC) {
    let xs = length / std::f64::consts::SQRT_2;
    let ps = hbar / (std::f64::consts::SQRT_2 * length);
    // a|k⟩ = √k |k−1⟩, so ⟨k−1|a|k⟩ = √k and ⟨k|a†|k−1⟩ = √k
    let x = MatrixC::from_fn(n, n, |i, j| {
        if i + 1 == j {
            C64::new(xs * (j as f64).sqrt(), 0.0)
        } else if j + 1 == i {
            C64::new(xs * (i as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let p = MatrixC::from_fn(n, n, |i, j| {
        if i + 1 == j {
            C64::new(0.0, -ps * (j as f64).sqrt())
        } else if j + 1 == i {
            C64::new(0.0, ps * (i as f64).sqrt())
        } else {
            ZERO
        }
    });
    (x, p)
}

/// Canonical `x, y, p_x, p_y` with `[x_i, p_j] = iħ δ_ij` on the interior.
pub fn build_canonical_ops(basis: &BasisSpec, hbar: f64) -> Result<OperatorSet> {
    let basis = BasisSpec::new(basis.n_max, basis.osc_length)?;
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(invalid("hbar", "must be positive and finite"));
    }
    let (x1, p1) = ladder_xp(basis.n_max, basis.osc_length, hbar);
    let id = MatrixC::identity(basis.n_max);
    Ok(OperatorSet {
        x: x1.kron(&id),
        y: id.kron(&x1),
        px: p1.kron(&id),
        py: id.kron(&p1),
        basis,
        hbar,
        tag: OperatorTag::Commutative,
    })
}

/// Sign pattern of the Bopp shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoppSigns {
    /// `y' = y + (θ/2ħ) p_x`; reproduces `[x', y'] = iθ`.
    Standard,
    /// `y' = y − (θ/2ħ) p_x`; the `θ` contributions to `[x', y']` cancel.
    ReversedY,
}

/// `base + coeff * other`, leaving `base` untouched when `coeff == 0`.
fn add_scaled(base: &MatrixC, coeff: f64, other: &MatrixC) -> MatrixC {
    if coeff == 0.0 {
        base.clone()
    } else {
        base + &other.scale_real(coeff)
    }
}

/// Bopp shift with the sign convention that satisfies the noncommutative algebra.
pub fn bopp_shift(ops: &OperatorSet, nc: &NCParams) -> Result<OperatorSet> {
    bopp_shift_with(ops, nc, BoppSigns::Standard)
}

pub fn bopp_shift_with(ops: &OperatorSet, nc: &NCParams, signs: BoppSigns) -> Result<OperatorSet> {
    if ops.tag != OperatorTag::Commutative {
        return Err(Error::AlreadyShifted);
    }
    let nc = NCParams::new(nc.theta, nc.eta, nc.hbar)?;
    if nc.hbar != ops.hbar {
        return Err(invalid("hbar", format!("operators built with ħ = {}, shift requested with ħ = {}", ops.hbar, nc.hbar)));
    }
    let t = nc.theta / (2.0 * nc.hbar);
    let e = nc.eta / (2.0 * nc.hbar);
    let ty = match signs {
        BoppSigns::Standard => t,
        BoppSigns::ReversedY => -t,
    };
    Ok(OperatorSet {
        x: add_scaled(&ops.x, -t, &ops.py),
        y: add_scaled(&ops.y, ty, &ops.px),
        px: add_scaled(&ops.px, e, &ops.y),
        py: add_scaled(&ops.py, -e, &ops.x),
        basis: ops.basis,
        hbar: ops.hbar,
        tag: OperatorTag::BoppShifted(nc),
    })
}

/// `AB − BA`.
pub fn commutator(a: &MatrixC, b: &MatrixC) -> Result<MatrixC> {
    a.commutator(b)
}

/// Interior residuals of the six noncommutative commutation relations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcAlgebraReport {
    /// `[x, y] − iθ`
    pub x_y: f64,
    /// `[p_x, p_y] − iη`
    pub px_py: f64,
    /// `[x, p_x] − iħ_eff`
    pub x_px: f64,
    /// `[y, p_y] − iħ_eff`
    pub y_py: f64,
    /// `[x, p_y]`
    pub x_py: f64,
    /// `[y, p_x]`
    pub y_px: f64,
    /// `i` times the interior mean diagonal of `[x, p_x]`
    pub measured_hbar_eff: f64,
}

impl NcAlgebraReport {
    pub fn max_residual(&self) -> f64 {
        [self.x_y, self.px_py, self.x_px, self.y_py, self.x_py, self.y_px].into_iter().fold(0.0, f64::max)
    }

    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("[x,y]-i*theta", self.x_y),
            ("[px,py]-i*eta", self.px_py),
            ("[x,px]-i*hbar_eff", self.x_px),
            ("[y,py]-i*hbar_eff", self.y_py),
            ("[x,py]", self.x_py),
            ("[y,px]", self.y_px),
        ]
    }
}

/// Residual `‖P([A,B] − target·I)P‖_max`.
pub fn interior_commutator_residual(a: &MatrixC, b: &MatrixC, target: C64, keep: &[bool]) -> Result<f64> {
    let mut c = a.commutator(b)?;
    for i in 0..c.rows() {
        c[(i, i)] -= target;
    }
    Ok(c.project(keep).max_abs())
}

/// Checks `ops` against the algebra generated by `nc`.
///
/// `ops` must either be commutative (then `nc` must be commutative too) or
/// Bopp-shifted with exactly `nc`.
pub fn nc_algebra_report(ops: &OperatorSet, nc: &NCParams, margin: usize) -> Result<NcAlgebraReport> {
    match ops.tag {
        OperatorTag::Commutative if nc.is_commutative() && nc.hbar == ops.hbar => {}
        OperatorTag::BoppShifted(tag) if tag == *nc => {}
        _ => return Err(Error::TagMismatch),
    }
    nc_algebra_residuals(ops, nc, margin)
}

/// Same residuals as [`nc_algebra_report`] without the tag check; used to test
/// operator sets built with other sign conventions.
pub fn nc_algebra_residuals(ops: &OperatorSet, nc: &NCParams, margin: usize) -> Result<NcAlgebraReport> {
    let keep = ops.basis.interior_mask(margin)?;
    let heff = hbar_eff(nc);
    let r = |a: &MatrixC, b: &MatrixC, t: C64| interior_commutator_residual(a, b, t, &keep);
    let xpx = ops.x.commutator(&ops.px)?;
    let (sum, count) = keep
        .iter()
        .enumerate()
        .filter(|(_, &k)| k)
        .fold((ZERO, 0usize), |(s, n), (i, _)| (s + xpx[(i, i)], n + 1));
    let measured = (sum / count as f64 * -I).re;
    Ok(NcAlgebraReport {
        x_y: r(&ops.x, &ops.y, I * nc.theta)?,
        px_py: r(&ops.px, &ops.py, I * nc.eta)?,
        x_px: r(&ops.x, &ops.px, I * heff)?,
        y_py: r(&ops.y, &ops.py, I * heff)?,
        x_py: r(&ops.x, &ops.py, ZERO)?,
        y_px: r(&ops.y, &ops.px, ZERO)?,
        measured_hbar_eff: measured,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis8() -> BasisSpec {
        BasisSpec::new(8, 1.0).unwrap()
    }

    #[test]
    fn small_basis_is_rejected() {
        assert!(matches!(BasisSpec::new(3, 1.0), Err(Error::InvalidParameter { field: "n_max", .. })));
        assert!(BasisSpec::new(4, 1.0).is_ok());
        assert!(BasisSpec::new(8, 0.0).is_err());
    }

    #[test]
    fn index_layout() {
        let b = basis8();
        assert_eq!(b.index(2, 5), 21);
        assert_eq!(b.quantum_numbers(21), (2, 5));
        let m = b.interior_mask(2).unwrap();
        assert!(m[b.index(5, 5)]);
        assert!(!m[b.index(6, 0)]);
        assert!(b.interior_mask(8).is_err());
    }

    #[test]
    fn canonical_commutators_on_interior() {
        let ops = build_canonical_ops(&basis8(), 1.0).unwrap();
        let keep = ops.basis.interior_mask(2).unwrap();
        assert!(interior_commutator_residual(&ops.x, &ops.px, I, &keep).unwrap() < 1e-12);
        assert_eq!(ops.x.commutator(&ops.y).unwrap().max_abs(), 0.0);
        assert_eq!(ops.px.commutator(&ops.py).unwrap().max_abs(), 0.0);
        for m in [&ops.x, &ops.y, &ops.px, &ops.py] {
            assert_eq!(m.hermiticity_residual(), 0.0);
        }
    }

    #[test]
    fn truncation_corner_deviates_by_hbar_n_max() {
        let hbar = 0.7;
        let b = basis8();
        let ops = build_canonical_ops(&b, hbar).unwrap();
        let c = ops.x.commutator(&ops.px).unwrap();
        let corner = b.index(7, 3);
        let dev = (c[(corner, corner)] - I * hbar).norm();
        assert!((dev - hbar * 8.0).abs() < 1e-12, "deviation {dev}");
    }

    #[test]
    fn zero_shift_is_bitwise_identity() {
        let ops = build_canonical_ops(&basis8(), 1.0).unwrap();
        let s = bopp_shift(&ops, &NCParams::commutative()).unwrap();
        assert!(s.x.bitwise_eq(&ops.x) && s.y.bitwise_eq(&ops.y));
        assert!(s.px.bitwise_eq(&ops.px) && s.py.bitwise_eq(&ops.py));
    }

    #[test]
    fn double_shift_is_rejected() {
        let ops = build_canonical_ops(&basis8(), 1.0).unwrap();
        let nc = NCParams::new(0.1, 0.0, 1.0).unwrap();
        let s = bopp_shift(&ops, &nc).unwrap();
        assert_eq!(bopp_shift(&s, &nc), Err(Error::AlreadyShifted));
    }

    #[test]
    fn hbar_eff_values() {
        assert_eq!(hbar_eff(&NCParams::new(0.0, 0.3, 1.3).unwrap()), 1.3);
        assert_eq!(hbar_eff(&NCParams::new(0.3, 0.0, 1.3).unwrap()), 1.3);
        let h = hbar_eff(&NCParams::new(0.1, 0.2, 1.0).unwrap());
        assert!((h - 1.005).abs() < 1e-15);
    }

    #[test]
    fn report_requires_matching_tag() {
        let ops = build_canonical_ops(&basis8(), 1.0).unwrap();
        let nc = NCParams::new(0.1, 0.2, 1.0).unwrap();
        assert_eq!(nc_algebra_report(&ops, &nc, 2), Err(Error::TagMismatch));
        let r = nc_algebra_report(&ops, &NCParams::commutative(), 2).unwrap();
        assert!(r.max_residual() < 1e-12);
        let s = bopp_shift(&ops, &nc).unwrap();
        assert!(nc_algebra_report(&s, &nc, 8).is_err());
    }

    #[test]
    fn commutator_of_pauli_matrices() {
        let rep = crate::spinor_algebra::standard_rep();
        let c = commutator(&rep.sigma[0], &rep.sigma[1]).unwrap();
        assert_eq!(c, rep.sigma[2].scale(I * 2.0));
        assert_eq!(commutator(&rep.sigma[0], &rep.sigma[0]).unwrap().max_abs(), 0.0);
    }
}
