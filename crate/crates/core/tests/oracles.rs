//! Closed-form and structural oracles.

use ncdirac::hamiltonians::{
    dirac_h, kinetic_momentum, nc_dirac_h, nc_pauli_h, nc_pauli_h_resummed, pauli_h_full, q_eta, q_theta,
    rest_frame_spectrum, EMPotential, PhysParams, QThetaMode,
};
use ncdirac::limits::{dirac_positive_levels, levels, LevelSelection};
use ncdirac::linalg::{hermitian_eigenvalues, MatrixC};
use ncdirac::phase_space::{bopp_shift, build_canonical_ops, ladder_xp, star_product, BasisSpec, NCParams, PolySymbol};
use ncdirac::spinor_algebra::standard_rep;
use num_complex::Complex64 as C64;

/// Weyl (symmetric) ordering of `x^a y^b` with operator arguments.
fn weyl_monomial(x: &MatrixC, y: &MatrixC, a: u32, b: u32) -> MatrixC {
    let n = (a + b) as usize;
    let mut total = MatrixC::zeros(x.rows(), x.cols());
    let mut count = 0u32;
    // every placement of the `a` x-factors among `n` slots
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != a {
            continue;
        }
        let mut word = MatrixC::identity(x.rows());
        for k in 0..n {
            word = &word * if mask & (1 << k) != 0 { x } else { y };
        }
        total += &word;
        count += 1;
    }
    total.scale_real(1.0 / f64::from(count))
}

fn weyl(p: &PolySymbol<C64>, x: &MatrixC, y: &MatrixC) -> MatrixC {
    let mut out = MatrixC::zeros(x.rows(), x.cols());
    for (&(a, b), &c) in p.terms() {
        out += &weyl_monomial(x, y, a, b).scale(c);
    }
    out
}

#[test]
fn star_product_is_the_symbol_of_the_operator_product() {
    // x = X, y = P with [X, P] = iθ realise the Moyal plane on a truncated oscillator
    let theta = 0.7;
    let n = 24;
    let (x, y) = ladder_xp(n, 1.1, theta);
    let f = PolySymbol::from_terms([((1, 1), C64::new(1.0, 0.0)), ((0, 2), C64::new(-0.5, 0.25)), ((1, 0), C64::new(2.0, 0.0))]);
    let g = PolySymbol::from_terms([((2, 0), C64::new(1.0, 0.0)), ((0, 1), C64::new(0.0, 3.0)), ((1, 2), C64::new(0.3, 0.0))]);
    let lhs = weyl(&star_product(&f, &g, &C64::new(theta, 0.0), 8), &x, &y);
    let rhs = &weyl(&f, &x, &y) * &weyl(&g, &x, &y);
    // products of degree ≤ 5 only feel the truncation within 5 levels of the top
    let keep: Vec<usize> = (0..n - 6).collect();
    let err = (&lhs.submatrix(&keep) - &rhs.submatrix(&keep)).max_abs();
    assert!(err < 1e-9 * rhs.submatrix(&keep).max_abs(), "Weyl mismatch {err:e}");
    // and the pointwise product is not the answer
    let pointwise = weyl(&(&f * &g), &x, &y);
    assert!((&pointwise.submatrix(&keep) - &rhs.submatrix(&keep)).max_abs() > 1e-3);
}

fn dirac_from_ops(ops: &ncdirac::phase_space::OperatorSet, pot: &EMPotential, phys: &PhysParams) -> MatrixC {
    let rep = standard_rep();
    let (px, py) = kinetic_momentum(ops, pot, phys).unwrap();
    let n = ops.basis.dim();
    &(&rep.alpha[0].kron(&px.scale_real(phys.c)) + &rep.alpha[1].kron(&py.scale_real(phys.c)))
        + &rep.beta.kron(&MatrixC::identity(n).scale_real(phys.rest_energy()))
}

/// Substituting the Bopp-shifted operators into the ordinary Dirac operator
/// yields `½[(c/ħ)ηQ_η + (e/ħ)θQ_θ]`; `nc_dirac_h` carries the full
/// coefficients. This pins the factor of two between the two constructions.
#[test]
fn bopp_substitution_gives_half_the_nc_dirac_coefficients() {
    let phys = PhysParams::new(1.0, 7.0, 1.3, 0.9).unwrap();
    let basis = BasisSpec::new(6, 1.2).unwrap();
    let pot = EMPotential::symmetric_gauge(0.8);
    let rep = standard_rep();
    let ops = build_canonical_ops(&basis, phys.hbar).unwrap();
    let (theta, eta) = (0.03, -0.02);
    let nc = NCParams::new(theta, eta, phys.hbar).unwrap();
    let delta_bopp = &dirac_from_ops(&bopp_shift(&ops, &nc).unwrap(), &pot, &phys) - &dirac_from_ops(&ops, &pot, &phys);

    let qe = q_eta(&basis, &rep).unwrap().scale_real(phys.c * eta / phys.hbar);
    let qt = q_theta(&basis, &pot, &rep, &phys).unwrap().scale_real(phys.e * theta / phys.hbar);
    let full = &qe + &qt;
    assert!((&delta_bopp - &full.scale_real(0.5)).max_abs() < 1e-12 * full.max_abs());

    let delta_nc = &nc_dirac_h(&basis, &pot, &phys, &nc).unwrap().matrix - &dirac_h(&basis, &pot, &phys).unwrap().matrix;
    assert!((&delta_nc - &full).max_abs() < 1e-12 * full.max_abs());
}

#[test]
fn rest_frame_deviation_is_quadratic_in_eta() {
    let phys = PhysParams::default();
    let basis = BasisSpec::new(12, 1.0).unwrap();
    let mc2 = phys.rest_energy();
    let dev = |eta: f64| {
        let s = rest_frame_spectrum(&phys, &NCParams::new(0.0, eta, 1.0).unwrap(), &basis).unwrap();
        let n = s.len();
        let asym = (0..n).map(|i| (s.eigenvalues[i] + s.eigenvalues[n - 1 - i]).abs()).fold(0.0, f64::max);
        assert!(asym < 1e-9 * mc2, "spectrum not symmetric: {asym:e}");
        s.eigenvalues.iter().map(|e| e.abs() - mc2).fold(0.0, f64::max)
    };
    let d = [0.1, 0.05, 0.025].map(dev);
    for w in d.windows(2) {
        let r = w[0] / w[1];
        assert!((3.9..=4.1).contains(&r), "halving η divided the deviation by {r}");
    }
}

#[test]
fn rest_frame_theta_alone_changes_nothing() {
    let phys = PhysParams::default();
    let basis = BasisSpec::new(6, 1.0).unwrap();
    let s = rest_frame_spectrum(&phys, &NCParams::new(0.4, 0.0, 1.0).unwrap(), &basis).unwrap();
    assert!(s.eigenvalues.iter().all(|e| e.abs() == phys.rest_energy()));
}

#[test]
fn landau_levels_do_not_depend_on_the_sign_of_the_charge() {
    for (b, e) in [(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-2.0, -0.5)] {
        let phys = PhysParams::new(1.0, 30.0, e, 1.0).unwrap();
        let basis = BasisSpec::new(12, phys.larmor_length(b).unwrap()).unwrap();
        let pot = EMPotential::symmetric_gauge(b);
        let hw = phys.hbar * phys.cyclotron_frequency(b);
        let pauli = levels(&pauli_h_full(&basis, &pot, &phys).unwrap(), LevelSelection::Interior, 2, None).unwrap();
        let dirac = dirac_positive_levels(&dirac_h(&basis, &pot, &phys).unwrap(), LevelSelection::Interior, 2).unwrap();
        assert!(pauli.len() >= 3 && dirac.len() >= 3, "B = {b}, e = {e}");
        let mc2 = phys.rest_energy();
        for n in 0..3 {
            assert!((pauli[n].energy - n as f64 * hw).abs() < 1e-10 * hw, "B = {b}, e = {e}, n = {n}");
            let oracle = mc2 * (1.0 + 2.0 * n as f64 * hw / mc2).sqrt();
            assert!((dirac[n].energy - oracle).abs() < 1e-12 * oracle);
        }
    }
}

#[test]
fn resummed_nc_pauli_is_the_limit_of_the_series() {
    let phys = PhysParams::new(1.0, 10.0, 1.0, 1.0).unwrap();
    let basis = BasisSpec::new(8, phys.larmor_length(1.0).unwrap()).unwrap();
    let pot = EMPotential::linear(EMPotential::symmetric_gauge(1.0).a, [0.3, -0.2]);
    let nc = NCParams::new(20.0, 0.0, 1.0).unwrap();
    for mode in [QThetaMode::Sigma, QThetaMode::UpperBlock] {
        let exact = hermitian_eigenvalues(&nc_pauli_h_resummed(&basis, &pot, &phys, &nc, mode).unwrap().matrix).unwrap();
        let dist = |order| {
            let s = hermitian_eigenvalues(&nc_pauli_h(&basis, &pot, &phys, &nc, order, mode).unwrap().matrix).unwrap();
            s.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (d2, d12) = (dist(2), dist(12));
        assert!(d12 < d2, "{mode:?}: order 12 ({d12:e}) not closer than order 2 ({d2:e})");
        assert!(d12 < 1e-8, "{mode:?}: {d12:e}");
    }
}

#[test]
fn sigma_and_upper_block_modes_differ_only_through_the_scalar_potential() {
    let phys = PhysParams::new(1.0, 10.0, 1.0, 1.0).unwrap();
    let basis = BasisSpec::new(6, 1.0).unwrap();
    let nc = NCParams::new(1e-2, 0.0, 1.0).unwrap();
    let magnetic = EMPotential::symmetric_gauge(1.0);
    let electric = EMPotential::linear([[0.0; 2]; 2], [0.5, 0.1]);
    let h = |pot: &EMPotential, mode| nc_pauli_h(&basis, pot, &phys, &nc, 4, mode).unwrap().matrix;
    // with A₀ only, both reductions see the same −∇A₀ term
    assert!((&h(&electric, QThetaMode::Sigma) - &h(&electric, QThetaMode::UpperBlock)).max_abs() < 1e-15);
    // the upper block of α vanishes, so only the σ reduction keeps the vector-potential term
    assert!((&h(&magnetic, QThetaMode::Sigma) - &h(&magnetic, QThetaMode::UpperBlock)).max_abs() > 1e-6);
}
