//! Moyal star product on polynomial phase-space symbols in two dimensions.
//!
//! ```text
//! f ⋆ g = Σ_n (1/n!) (iθ/2)^n Σ_k C(n,k) (−1)^(n−k) ∂x^k ∂y^(n−k) f · ∂y^k ∂x^(n−k) g
//! ```
//!
//! which is the expansion of `f exp((iθ/2)(←∂x →∂y − ←∂y →∂x)) g`. For
//! polynomials the series terminates, so `order >= deg f` (or `deg g`) is exact.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::{Complex, Complex64 as C64};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Exact complex-rational coefficient.
pub type ExactCoeff = Complex<BigRational>;

/// Field operations needed by the star product.
pub trait Coefficient:
    Clone + PartialEq + Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self> + Div<Output = Self>
{
    fn imag_unit() -> Self;
    fn from_integer(n: i64) -> Self;
}

impl Coefficient for C64 {
    fn imag_unit() -> Self {
        C64::new(0.0, 1.0)
    }
    fn from_integer(n: i64) -> Self {
        C64::new(n as f64, 0.0)
    }
}

impl Coefficient for ExactCoeff {
    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }
    fn from_integer(n: i64) -> Self {
        Complex::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }
}

/// `n / d` as an exact real coefficient.
pub fn rational(n: i64, d: i64) -> ExactCoeff {
    Complex::new(BigRational::new(BigInt::from(n), BigInt::from(d)), BigRational::zero())
}

/// Sparse polynomial `Σ c_{a,b} x^a y^b`. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol<C> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Coefficient> Default for PolySymbol<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> PolySymbol<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, C::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, C::one())
    }

    /// `c x^a y^b`.
    pub fn monomial(a: u32, b: u32, c: C) -> Self {
        let mut p = Self::zero();
        p.add_term(a, b, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), C)>) -> Self {
        let mut p = Self::zero();
        for ((a, b), c) in terms {
            p.add_term(a, b, c);
        }
        p
    }

    /// Adds `c x^a y^b`, dropping the entry if it cancels.
    pub fn add_term(&mut self, a: u32, b: u32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&(a, b)) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert((a, b), s);
                }
            }
            None => {
                self.terms.insert((a, b), c);
            }
        }
    }

    pub fn coeff(&self, a: u32, b: u32) -> C {
        self.terms.get(&(a, b)).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, c)| (*k, c.clone() * s.clone())))
    }

    /// `∂x^kx ∂y^ky`.
    pub fn derivative(&self, kx: u32, ky: u32) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if a < kx || b < ky {
                continue;
            }
            let f = falling::<C>(a, kx) * falling::<C>(b, ky);
            out.add_term(a - kx, b - ky, c.clone() * f);
        }
        out
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> PolySymbol<D> {
        PolySymbol::from_terms(self.terms.iter().map(|(k, c)| (*k, f(c))))
    }

    fn pointwise(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                out.add_term(a + a2, b + b2, c.clone() * c2.clone());
            }
        }
        out
    }
}

impl PolySymbol<ExactCoeff> {
    /// Floating-point copy.
    pub fn to_f64(&self) -> PolySymbol<C64> {
        use num_traits::ToPrimitive;
        self.map_coeffs(|c| C64::new(c.re.to_f64().unwrap_or(f64::NAN), c.im.to_f64().unwrap_or(f64::NAN)))
    }
}

/// `a (a−1) ⋯ (a−k+1)`.
fn falling<C: Coefficient>(a: u32, k: u32) -> C {
    (0..k).fold(C::one(), |acc, j| acc * C::from_integer(i64::from(a - j)))
}

fn binomial<C: Coefficient>(n: u32, k: u32) -> C {
    falling::<C>(n, k) / falling::<C>(k, k)
}

impl<C: Coefficient> Add for &PolySymbol<C> {
    type Output = PolySymbol<C>;
    fn add(self, rhs: Self) -> PolySymbol<C> {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl<C: Coefficient> Sub for &PolySymbol<C> {
    type Output = PolySymbol<C>;
    fn sub(self, rhs: Self) -> PolySymbol<C> {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c.clone());
        }
        out
    }
}

/// Ordinary (commutative) product.
impl<C: Coefficient> Mul for &PolySymbol<C> {
    type Output = PolySymbol<C>;
    fn mul(self, rhs: Self) -> PolySymbol<C> {
        self.pointwise(rhs)
    }
}

/// Star product truncated after the `order`-th power of `θ`.
pub fn star_product<C: Coefficient>(f: &PolySymbol<C>, g: &PolySymbol<C>, theta: &C, order: u32) -> PolySymbol<C> {
    let (Some(df), Some(dg)) = (f.degree(), g.degree()) else {
        return PolySymbol::zero();
    };
    let two = C::from_integer(2);
    let half_i_theta = C::imag_unit() * theta.clone() / two;
    let top = order.min(df).min(dg);
    let mut out = f * g;
    let mut prefactor = C::one();
    for n in 1..=top {
        prefactor = prefactor * half_i_theta.clone() / C::from_integer(i64::from(n));
        if prefactor.is_zero() {
            break;
        }
        let mut term = PolySymbol::zero();
        for k in 0..=n {
            let fd = f.derivative(k, n - k);
            if fd.is_zero() {
                continue;
            }
            let gd = g.derivative(n - k, k);
            if gd.is_zero() {
                continue;
            }
            let mut w = binomial::<C>(n, k);
            if (n - k) % 2 == 1 {
                w = -w;
            }
            term = &term + &(&fd * &gd).scale(&w);
        }
        out = &out + &term.scale(&prefactor);
    }
    out
}

/// `f g + (iθ/2)(∂x f ∂y g − ∂y f ∂x g)`; exact whenever `f` or `g` is affine.
pub fn star_first_order<C: Coefficient>(f: &PolySymbol<C>, g: &PolySymbol<C>, theta: &C) -> PolySymbol<C> {
    star_product(f, g, theta, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = PolySymbol<ExactCoeff>;

    #[test]
    fn x_star_y() {
        let th = rational(1, 10);
        let xy = star_first_order(&P::x(), &P::y(), &th);
        let expect = &P::monomial(1, 1, rational(1, 1)) + &P::constant(ExactCoeff::imag_unit() * rational(1, 20));
        assert_eq!(xy, expect);
        let bracket = &star_product(&P::x(), &P::y(), &th, 4) - &star_product(&P::y(), &P::x(), &th, 4);
        assert_eq!(bracket, P::constant(ExactCoeff::imag_unit() * th));
    }

    #[test]
    fn one_is_the_identity() {
        let g = P::from_terms([((2, 1), rational(3, 7)), ((0, 3), rational(-1, 2))]);
        assert_eq!(star_product(&P::one(), &g, &rational(5, 3), 6), g);
        assert_eq!(star_product(&g, &P::one(), &rational(5, 3), 6), g);
    }

    #[test]
    fn second_order_term_of_squares() {
        // x² ⋆ y² = x²y² + 2iθ xy − θ²/2
        let th = rational(1, 1);
        let x2 = P::monomial(2, 0, rational(1, 1));
        let y2 = P::monomial(0, 2, rational(1, 1));
        let exact = star_product(&x2, &y2, &th, 8);
        let first = star_first_order(&x2, &y2, &th);
        assert_eq!(exact.coeff(1, 1), ExactCoeff::imag_unit() * rational(2, 1));
        assert_eq!(&exact - &first, P::constant(rational(-1, 2)));
    }

    #[test]
    fn zero_theta_is_pointwise() {
        let f = P::from_terms([((1, 2), rational(2, 1)), ((3, 0), rational(1, 3))]);
        let g = P::from_terms([((0, 1), rational(1, 1)), ((2, 2), rational(-4, 5))]);
        assert_eq!(star_product(&f, &g, &rational(0, 1), 10), &f * &g);
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let p = &P::x() - &P::x();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
        assert_eq!(P::monomial(2, 2, rational(0, 1)).num_terms(), 0);
    }

    #[test]
    fn float_and_exact_agree() {
        let f = P::from_terms([((1, 1), rational(1, 2)), ((0, 2), rational(1, 1))]);
        let g = P::from_terms([((2, 0), rational(1, 1)), ((1, 0), rational(-3, 1))]);
        let exact = star_product(&f, &g, &rational(1, 4), 4).to_f64();
        let float = star_product(&f.to_f64(), &g.to_f64(), &C64::new(0.25, 0.0), 4);
        for ((k, a), (k2, b)) in exact.terms().zip(float.terms()) {
            assert_eq!(k, k2);
            assert!((a - b).norm() < 1e-15);
        }
    }
}
