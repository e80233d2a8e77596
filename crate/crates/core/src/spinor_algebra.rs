//! Pauli and Dirac matrices in the standard representation.
//!
//! Spinor indices are always the slow (outer) Kronecker factor: a spinor-valued
//! operator on an orbital space of dimension `N` is `S ⊗ O` with row index
//! `s * N + orbital`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{MatrixC, I, ONE, ZERO};

/// `σ_x, σ_y, σ_z`, `α_x, α_y, α_z` and `β`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorRep {
    pub sigma: [MatrixC; 3],
    pub alpha: [MatrixC; 3],
    pub beta: MatrixC,
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> MatrixC {
    MatrixC::from_row_major(2, 2, vec![a, b, c, d]).expect("2x2")
}

/// Block matrix `[[a, b], [c, d]]` from 2x2 blocks.
fn blocks4(a: &MatrixC, b: &MatrixC, c: &MatrixC, d: &MatrixC) -> MatrixC {
    MatrixC::from_fn(4, 4, |i, j| {
        let blk = match (i / 2, j / 2) {
            (0, 0) => a,
            (0, 1) => b,
            (1, 0) => c,
            _ => d,
        };
        blk[(i % 2, j % 2)]
    })
}

/// Dirac representation: `α_i = [[0, σ_i], [σ_i, 0]]`, `β = diag(I₂, -I₂)`.
pub fn standard_rep() -> SpinorRep {
    let sx = m2(ZERO, ONE, ONE, ZERO);
    let sy = m2(ZERO, -I, I, ZERO);
    let sz = m2(ONE, ZERO, ZERO, -ONE);
    let z = MatrixC::zeros(2, 2);
    let id = MatrixC::identity(2);
    let alpha = [sx.clone(), sy.clone(), sz.clone()].map(|s| blocks4(&z, &s, &s, &z));
    let beta = blocks4(&id, &z, &z, &(-&id));
    SpinorRep { sigma: [sx, sy, sz], alpha, beta }
}

/// Max-abs violation of `{α_i, α_j} = 2δ_ij`, `{α_i, β} = 0`, `α_i² = β² = 1`.
pub fn clifford_residual(rep: &SpinorRep) -> f64 {
    let id = MatrixC::identity(4);
    let two = id.scale_real(2.0);
    let mut worst = 0.0f64;
    let mut track = |m: Result<MatrixC>| match m {
        Ok(m) => worst = worst.max(m.max_abs()),
        Err(_) => worst = f64::INFINITY,
    };
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { &two } else { &MatrixC::zeros(4, 4) };
            track(rep.alpha[i].anticommutator(&rep.alpha[j]).and_then(|a| a.try_sub(target)));
        }
        track(rep.alpha[i].anticommutator(&rep.beta));
        track(rep.alpha[i].try_matmul(&rep.alpha[i]).and_then(|a| a.try_sub(&id)));
    }
    track(rep.beta.try_matmul(&rep.beta).and_then(|b| b.try_sub(&id)));
    worst
}

/// One entry of a 3-vector that is contracted with `σ`.
#[derive(Clone, Debug)]
pub enum Component {
    Scalar(C64),
    Operator(MatrixC),
}

impl Component {
    pub fn real(x: f64) -> Self {
        Component::Scalar(C64::new(x, 0.0))
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Component::Scalar(_) => None,
            Component::Operator(m) => Some(m.rows()),
        }
    }

    fn as_matrix(&self, dim: usize) -> MatrixC {
        match self {
            Component::Scalar(s) => MatrixC::identity(dim).scale(*s),
            Component::Operator(m) => m.clone(),
        }
    }
}

fn common_dim(v: &[&Component]) -> Result<usize> {
    let mut dim = None;
    for c in v {
        if let Component::Operator(m) = c {
            if !m.is_square() {
                return Err(Error::Dimension(format!("component is {}x{}, not square", m.rows(), m.cols())));
            }
        }
        match (dim, c.dim()) {
            (None, d) => dim = d,
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Dimension(format!("components have dimensions {a} and {b}")))
            }
            _ => {}
        }
    }
    Ok(dim.unwrap_or(1))
}

/// `σ·v = Σ_i σ_i ⊗ v_i`.
///
/// With all-scalar components the result is 2x2. If any component is an
/// operator of dimension `N`, scalars are promoted to multiples of `I_N` and the
/// result is `2N x 2N` with spin as the slow index.
pub fn sigma_dot(rep: &SpinorRep, v: &[Component; 3]) -> Result<MatrixC> {
    let dim = common_dim(&v.iter().collect::<Vec<_>>())?;
    let mut out = MatrixC::zeros(2 * dim, 2 * dim);
    for (s, c) in rep.sigma.iter().zip(v) {
        if let Component::Scalar(z) = c {
            if *z == ZERO {
                continue;
            }
        }
        out += &s.kron(&c.as_matrix(dim));
    }
    Ok(out)
}

fn cross(a: &[Component; 3], b: &[Component; 3], dim: usize) -> Result<[MatrixC; 3]> {
    let prod = |i: usize, j: usize| a[i].as_matrix(dim).try_matmul(&b[j].as_matrix(dim));
    Ok([
        prod(1, 2)?.try_sub(&prod(2, 1)?)?,
        prod(2, 0)?.try_sub(&prod(0, 2)?)?,
        prod(0, 1)?.try_sub(&prod(1, 0)?)?,
    ])
}

/// `‖(σ·A)(σ·B) − (A·B) I − i σ·(A×B)‖_max`, products kept in `A`-then-`B` order.
///
/// The identity holds exactly for any operator-valued components once the dot
/// and cross products preserve that order, so the residual measures roundoff
/// only. The field-dependent form `(σ·Π)² = Π² − (e/c)ħ σ·B` additionally needs
/// the kinetic-momentum commutator and lives in
/// [`crate::hamiltonians::kinetic_pauli_residual`].
///
/// `keep` restricts the comparison to a diagonal projector on the orbital space.
pub fn pauli_identity_residual(
    rep: &SpinorRep,
    a: &[Component; 3],
    b: &[Component; 3],
    keep: Option<&[bool]>,
) -> Result<f64> {
    let dim = common_dim(&a.iter().chain(b.iter()).collect::<Vec<_>>())?;
    let lhs = sigma_dot(rep, a)?.try_matmul(&sigma_dot(rep, b)?)?;
    let mut dot = MatrixC::zeros(dim, dim);
    for i in 0..3 {
        dot += &a[i].as_matrix(dim).try_matmul(&b[i].as_matrix(dim))?;
    }
    let [c0, c1, c2] = cross(a, b, dim)?;
    let rhs_cross = sigma_dot(
        rep,
        &[Component::Operator(c0.scale(I)), Component::Operator(c1.scale(I)), Component::Operator(c2.scale(I))],
    )?;
    let rhs = MatrixC::identity(2).kron(&dot).try_add(&rhs_cross)?;
    let diff = lhs.try_sub(&rhs)?;
    Ok(match keep {
        Some(mask) => {
            if mask.len() != dim {
                return Err(Error::Dimension(format!("projector has length {}, space has {dim}", mask.len())));
            }
            let spin_mask: Vec<bool> = mask.iter().chain(mask.iter()).copied().collect();
            diff.project(&spin_mask).max_abs()
        }
        None => diff.max_abs(),
    })
}

/// Convenience for real 3-vectors.
pub fn pauli_identity_residual_real(rep: &SpinorRep, a: [f64; 3], b: [f64; 3]) -> f64 {
    pauli_identity_residual(rep, &a.map(Component::real), &b.map(Component::real), None)
        .expect("scalar components always share a dimension")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_rep_entries() {
        let rep = standard_rep();
        let beta_diag: Vec<f64> = (0..4).map(|i| rep.beta[(i, i)].re).collect();
        assert_eq!(beta_diag, vec![1.0, 1.0, -1.0, -1.0]);
        let ax_row1: Vec<C64> = rep.alpha[0].row(0).to_vec();
        assert_eq!(ax_row1, vec![ZERO, ZERO, ZERO, ONE]);
        assert_eq!(rep.sigma[2][(0, 0)], ONE);
        assert_eq!(rep.sigma[2][(1, 1)], -ONE);
        for s in &rep.sigma {
            assert_eq!(s.trace(), ZERO);
            assert_eq!(s.hermiticity_residual(), 0.0);
            assert_eq!((&(s * s) - &MatrixC::identity(2)).max_abs(), 0.0);
        }
    }

    #[test]
    fn clifford_residual_is_exactly_zero() {
        assert_eq!(clifford_residual(&standard_rep()), 0.0);
    }

    #[test]
    fn perturbed_alpha_is_detected() {
        let mut rep = standard_rep();
        rep.alpha[0] = rep.sigma[0].kron(&MatrixC::identity(2));
        rep.alpha[0][(0, 1)] += C64::new(1e-3, 0.0);
        assert!(clifford_residual(&rep) >= 1e-3);
    }

    #[test]
    fn clifford_relations_survive_beta_sign_flip() {
        let mut rep = standard_rep();
        rep.beta = -&rep.beta;
        assert_eq!(clifford_residual(&rep), 0.0);
    }

    #[test]
    fn sigma_dot_scalar_cases() {
        let rep = standard_rep();
        let z = sigma_dot(&rep, &[0.0, 0.0, 1.0].map(Component::real)).unwrap();
        assert_eq!(z, rep.sigma[2]);
        let x = sigma_dot(&rep, &[1.0, 0.0, 0.0].map(Component::real)).unwrap();
        assert_eq!(x, rep.sigma[0]);
    }

    #[test]
    fn sigma_dot_rejects_mixed_dimensions() {
        let rep = standard_rep();
        let v = [
            Component::Operator(MatrixC::identity(3)),
            Component::Operator(MatrixC::identity(4)),
            Component::real(0.0),
        ];
        assert!(matches!(sigma_dot(&rep, &v), Err(Error::Dimension(_))));
    }

    #[test]
    fn pauli_identity_scalar_examples() {
        let rep = standard_rep();
        assert_eq!(pauli_identity_residual_real(&rep, [1., 0., 0.], [0., 1., 0.]), 0.0);
        assert_eq!(pauli_identity_residual_real(&rep, [1., 2., 3.], [1., 2., 3.]), 0.0);
    }
}
