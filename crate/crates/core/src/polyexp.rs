//! Exact algebra of functions `u ↦ p(u)·e^(−u)` on the half-line `u ≥ 0`
//! with rational polynomial `p`.
//!
//! After the substitution `u = x² + y²` every diagonal Hermite-state Wigner
//! function becomes a product of such factors, one per mode. Ball integrals
//! then reduce to simplex convolutions followed by one definite integral,
//! both of which stay inside the class and can be carried out in exact
//! rational arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Dense polynomial with exact rational coefficients; `coeffs[k]` multiplies `u^k`.
///
/// The coefficient vector never carries trailing zeros, so the zero
/// polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RationalPoly {
            coeffs: vec![Rational::one()],
        }
    }

    pub fn monomial(coeff: Rational, power: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = coeff;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..len).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    /// `p(c·u)` as a polynomial in `u`.
    pub fn dilate(&self, c: &Rational) -> Self {
        let mut power = Rational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &power);
            power *= c;
        }
        Self::new(out)
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * u + c)
    }

    /// Compensated Horner evaluation of the rounded coefficients.
    pub fn eval_f64(&self, u: f64) -> f64 {
        let coeffs: Vec<f64> = self.coeffs.iter().map(to_f64).collect();
        compensated_horner(&coeffs, u)
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

fn compensated_horner(coeffs: &[f64], x: f64) -> f64 {
    let Some((&top, rest)) = coeffs.split_last() else {
        return 0.0;
    };
    let mut s = top;
    let mut err = 0.0;
    for &a in rest.iter().rev() {
        let (p, pi) = two_prod(s, x);
        let (t, sigma) = two_sum(p, a);
        s = t;
        err = err * x + (pi + sigma);
    }
    s + err
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·u")?,
                _ => write!(f, "({c})·u^{k}")?,
            }
        }
        Ok(())
    }
}

/// The function `u ↦ poly(u)·e^(−u)` on `u ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PolyExp {
    pub poly: RationalPoly,
}

impl PolyExp {
    pub fn new(poly: RationalPoly) -> Self {
        PolyExp { poly }
    }

    /// `e^(−u)`.
    pub fn exp() -> Self {
        PolyExp::new(RationalPoly::one())
    }

    pub fn add(&self, other: &Self) -> Self {
        PolyExp::new(self.poly.add(&other.poly))
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        PolyExp::new(self.poly.scale(factor))
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        self.poly.eval_f64(u) * (-u).exp()
    }
}

/// Laguerre polynomial `L_j^α` in exact rational coefficients, built by the
/// three-term recurrence in `j`.
pub fn laguerre_exact(j: u32, alpha: u32) -> RationalPoly {
    let alpha = rat(alpha as i64);
    let x = RationalPoly::monomial(Rational::one(), 1);
    let mut prev = RationalPoly::one();
    if j == 0 {
        return prev;
    }
    // L_1^α = 1 + α − u
    let mut cur = RationalPoly::new(vec![Rational::one() + &alpha, rat(-1)]);
    for k in 1..j {
        let kk = rat(k as i64);
        let lead = RationalPoly::new(vec![rat(2) * &kk + rat(1) + &alpha]).sub(&x);
        let next = lead
            .mul(&cur)
            .sub(&prev.scale(&(&kk + &alpha)))
            .scale(&(Rational::one() / (&kk + rat(1))));
        prev = cur;
        cur = next;
    }
    cur
}

/// Per-mode radial density `(−1)^k L_k(2u)·e^(−u)` of the Wigner function of
/// `h_k` in the variable `u = x² + y²`.
pub fn radial_integrand(k: u32) -> PolyExp {
    let sign = if k % 2 == 0 { rat(1) } else { rat(-1) };
    PolyExp::new(laguerre_exact(k, 0).dilate(&rat(2)).scale(&sign))
}

/// Half-line convolution `s ↦ ∫₀^s f(t)·g(s−t) dt`.
///
/// Uses `(u^a e^(−u)) ⋆ (u^b e^(−u)) = a!·b!/(a+b+1)! · s^(a+b+1) e^(−s)`.
pub fn convolve(f: &PolyExp, g: &PolyExp) -> PolyExp {
    let (Some(df), Some(dg)) = (f.poly.degree(), g.poly.degree()) else {
        return PolyExp::default();
    };
    let facts: Vec<BigInt> = {
        let top = (df + dg + 1) as u32;
        let mut v = Vec::with_capacity(top as usize + 1);
        let mut acc = BigInt::one();
        v.push(acc.clone());
        for k in 1..=top {
            acc *= BigInt::from(k);
            v.push(acc.clone());
        }
        v
    };
    let mut out = vec![Rational::zero(); df + dg + 2];
    for (a, fa) in f.poly.coeffs().iter().enumerate() {
        if fa.is_zero() {
            continue;
        }
        for (b, gb) in g.poly.coeffs().iter().enumerate() {
            if gb.is_zero() {
                continue;
            }
            let weight = Rational::new(&facts[a] * &facts[b], facts[a + b + 1].clone());
            out[a + b + 1] += fa * gb * weight;
        }
    }
    PolyExp::new(RationalPoly::new(out))
}

/// Convolution of a sequence of factors; the empty product is the unit
/// point mass and is not representable, so at least one factor is required.
pub fn convolve_all<'a, I>(factors: I) -> Option<PolyExp>
where
    I: IntoIterator<Item = &'a PolyExp>,
{
    let mut it = factors.into_iter();
    let first = it.next()?.clone();
    Some(it.fold(first, |acc, f| convolve(&acc, f)))
}

/// Closed form `s ↦ constant − poly(s)·e^(−s)` of a cumulative integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CumulativeForm {
    pub constant: Rational,
    pub poly: RationalPoly,
}

impl CumulativeForm {
    pub fn eval(&self, s: f64) -> f64 {
        to_f64(&self.constant) - self.poly.eval_f64(s) * (-s).exp()
    }

    pub fn sub(&self, other: &Self) -> Self {
        CumulativeForm {
            constant: &self.constant - &other.constant,
            poly: self.poly.sub(&other.poly),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        CumulativeForm {
            constant: &self.constant + &other.constant,
            poly: self.poly.add(&other.poly),
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        CumulativeForm {
            constant: &self.constant * factor,
            poly: self.poly.scale(factor),
        }
    }

    pub fn zero() -> Self {
        CumulativeForm {
            constant: Rational::zero(),
            poly: RationalPoly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.poly.is_zero()
    }
}

impl fmt::Display for CumulativeForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} − [{}]·e^(−s)", self.constant, self.poly)
    }
}

/// Antiderivative of `f` vanishing at zero: `∫₀^s f = c − q(s)e^(−s)` with
/// `q = p + p′ + p″ + …` and `c = q(0)`.
pub fn cumulative(f: &PolyExp) -> CumulativeForm {
    let mut q = RationalPoly::zero();
    let mut d = f.poly.clone();
    while !d.is_zero() {
        q = q.add(&d);
        d = d.derivative();
    }
    CumulativeForm {
        constant: q.coeff(0),
        poly: q,
    }
}

/// Definite integral over `[0, upper]`, exact form plus its value.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiniteIntegral {
    pub form: CumulativeForm,
    pub value: f64,
}

pub fn integrate_to(f: &PolyExp, upper: f64) -> DefiniteIntegral {
    let form = cumulative(f);
    let value = if upper == 0.0 { 0.0 } else { form.eval(upper) };
    DefiniteIntegral { form, value }
}
