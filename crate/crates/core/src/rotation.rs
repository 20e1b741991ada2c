//! Rotations acting on the eigenspaces `span{H_μ : |μ| = λ}`.
//!
//! A basis function `H_μ` is stored as `π^(−n/4)·√w·P(x)·e^(−|x|²/2)` where
//! `P = Π_j H_{μ_j}(x_j)` is a product of physicists' Hermite polynomials
//! (integer coefficients) and `w = 1/(2^|μ| μ!)` is a rational
//! normalization. Rotating only touches `P`, since the Gaussian is radial.
//! At `θ = π/4` the substitution has coefficients in `ℚ(√2)`, which keeps
//! every rotation coefficient exact.
//!
//! Expanding a rotated polynomial back into Hermite functions reads the
//! coefficients off the top-degree monomials (each `H_ν` has leading term
//! `2^|ν| x^ν`) and then checks that nothing is left after subtracting the
//! whole degree-λ combination.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::localization::{diagonal_form, BallSpec};
use crate::polyexp::{factorial, rat, to_f64, CumulativeForm, Rational};

/// Largest total degree accepted by [`hermite_to_poly`].
pub const MAX_EXACT_DEGREE: u32 = 30;
/// Tolerance of the floating-point invariance check.
pub const INVARIANCE_TOLERANCE: f64 = 1e-12;
/// Residual tolerance when expanding floating-point polynomials, relative
/// to the largest coefficient.
const FLOAT_RELATIVE_TOLERANCE: f64 = 1e-10;

/// Element `a + b√2` of `ℚ(√2)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QSqrt2 {
    pub a: Rational,
    pub b: Rational,
}

impl QSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt2 { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        QSqrt2 {
            a,
            b: Rational::zero(),
        }
    }

    pub fn one() -> Self {
        QSqrt2::rational(Rational::one())
    }

    /// `1/√2 = √2/2`.
    pub fn inv_sqrt2() -> Self {
        QSqrt2 {
            a: Rational::zero(),
            b: Rational::new(BigInt::one(), BigInt::from(2)),
        }
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}√2", self.b),
            (false, false) => write!(f, "{} + {}√2", self.a, self.b),
        }
    }
}

impl Add for &QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl Sub for &QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl Mul for &QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(
            &self.a * &o.a + rat(2) * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
        )
    }
}

impl Neg for &QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-&self.a, -&self.b)
    }
}

/// Field of polynomial coefficients: exact `ℚ(√2)` or floating point.
pub trait Coefficient: Clone + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Zero for exact fields; at most a relative tolerance times `scale`
    /// for floats.
    fn is_negligible(&self, scale: f64) -> bool;
    fn to_f64(&self) -> f64;
    /// `(cos θ, sin θ)` in this field.
    fn cos_sin(theta: f64) -> Result<(Self, Self)>;
}

impl Coefficient for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::rational(Rational::zero())
    }
    fn from_rational(r: &Rational) -> Self {
        QSqrt2::rational(r.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_negligible(&self, _scale: f64) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
    fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * std::f64::consts::SQRT_2
    }
    fn cos_sin(theta: f64) -> Result<(Self, Self)> {
        if theta == FRAC_PI_4 {
            Ok((QSqrt2::inv_sqrt2(), QSqrt2::inv_sqrt2()))
        } else if theta == 0.0 {
            Ok((QSqrt2::rational(Rational::one()), QSqrt2::zero()))
        } else {
            Err(Error::InexactAngle { theta })
        }
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= FLOAT_RELATIVE_TOLERANCE * scale
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn cos_sin(theta: f64) -> Result<(Self, Self)> {
        Ok((theta.cos(), theta.sin()))
    }
}

/// `π^(−n/4)·√norm_sq·P(x)·e^(−|x|²/2)` with `P` stored as exponent → coefficient.
#[derive(Clone, Debug)]
pub struct GaussHermitePoly<C> {
    n: usize,
    coeffs: BTreeMap<Vec<u32>, C>,
    norm_sq: Rational,
}

impl<C: Coefficient> GaussHermitePoly<C> {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Square of the common normalization factor in front of `P`.
    pub fn norm_sq(&self) -> &Rational {
        &self.norm_sq
    }

    /// Coefficient of `x^exps` in `P` (without the normalization factor).
    pub fn raw_coefficient(&self, exps: &[u32]) -> Option<&C> {
        self.coeffs.get(exps)
    }

    /// Coefficient of `x^exps` in `√norm_sq·P`, i.e. of the function divided
    /// by `π^(−n/4)e^(−|x|²/2)`.
    pub fn coefficient_f64(&self, exps: &[u32]) -> f64 {
        self.coeffs
            .get(exps)
            .map_or(0.0, |c| c.to_f64() * to_f64(&self.norm_sq).sqrt())
    }

    /// Largest coefficient magnitude of `P`.
    pub fn scale(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// Total degree of `P`, ignoring negligible coefficients.
    pub fn degree(&self) -> Option<u32> {
        let scale = self.scale();
        self.coeffs
            .iter()
            .filter(|(_, c)| !c.is_negligible(scale))
            .map(|(e, _)| e.iter().sum())
            .max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &C)> {
        self.coeffs.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn accumulate(&mut self, exps: Vec<u32>, c: C) {
        match self.coeffs.get_mut(&exps) {
            Some(v) => *v = v.add(&c),
            None => {
                self.coeffs.insert(exps, c);
            }
        }
    }
}

/// Physicists' Hermite polynomial `H_k` with integer coefficients.
fn physicists_hermite(k: u32) -> Vec<Rational> {
    let mut prev = vec![rat(1)];
    if k == 0 {
        return prev;
    }
    let mut cur = vec![rat(0), rat(2)];
    for j in 1..k {
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += rat(2) * c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= rat(2 * j as i64) * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn product_hermite<C: Coefficient>(mu: &MultiIndex) -> BTreeMap<Vec<u32>, C> {
    let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    acc.insert(Vec::new(), Rational::one());
    for &k in mu.entries() {
        let h = physicists_hermite(k);
        let mut next = BTreeMap::new();
        for (exps, c) in &acc {
            for (p, hc) in h.iter().enumerate() {
                if hc.is_zero() {
                    continue;
                }
                let mut e = exps.clone();
                e.push(p as u32);
                *next.entry(e).or_insert_with(Rational::zero) += c * hc;
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(e, c)| (e, C::from_rational(&c)))
        .collect()
}

/// Explicit polynomial form of `H_μ`.
pub fn hermite_to_poly<C: Coefficient>(mu: &MultiIndex) -> Result<GaussHermitePoly<C>> {
    let lambda = mu.degree();
    if lambda > MAX_EXACT_DEGREE {
        return Err(Error::IndexOutOfRange {
            index: lambda as usize,
            max: MAX_EXACT_DEGREE as usize,
        });
    }
    let mut denom = BigInt::one() << lambda as usize;
    for &k in mu.entries() {
        denom *= factorial(k);
    }
    Ok(GaussHermitePoly {
        n: mu.dim(),
        coeffs: product_hermite(mu),
        norm_sq: Rational::new(BigInt::one(), denom),
    })
}

/// Rotation (composed with a reflection) in the coordinate plane `(a, b)`:
/// `x_a ← x_a cos θ + x_b sin θ`, `x_b ← x_a sin θ − x_b cos θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneRotation {
    a: usize,
    b: usize,
    theta: f64,
}

impl PlaneRotation {
    pub fn new(a: usize, b: usize, theta: f64) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(format!(
                "rotation axes must satisfy a < b, got ({a}, {b})"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(
                "rotation angle must be finite".into(),
            ));
        }
        Ok(PlaneRotation { a, b, theta })
    }

    /// `x_a → (x_a + x_b)/√2`, `x_b → (x_a − x_b)/√2`.
    pub fn quarter(a: usize, b: usize) -> Result<Self> {
        Self::new(a, b, FRAC_PI_4)
    }

    pub fn axes(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_exact(&self) -> bool {
        QSqrt2::cos_sin(self.theta).is_ok()
    }
}

impl fmt::Display for PlaneRotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.theta == FRAC_PI_4 {
            write!(f, "π/4 in plane ({},{})", self.a, self.b)
        } else {
            write!(f, "{} rad in plane ({},{})", self.theta, self.a, self.b)
        }
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

fn powers<C: Coefficient>(base: &C, max: u32) -> Vec<C> {
    let mut out = Vec::with_capacity(max as usize + 1);
    let mut p = C::from_rational(&Rational::one());
    for _ in 0..=max {
        out.push(p.clone());
        p = p.mul(base);
    }
    out
}

/// Substitutes the plane rotation into `P`.
pub fn apply_rotation<C: Coefficient>(
    f: &GaussHermitePoly<C>,
    rot: &PlaneRotation,
) -> Result<GaussHermitePoly<C>> {
    if rot.b >= f.n {
        return Err(Error::DimensionMismatch {
            expected: f.n,
            found: rot.b + 1,
        });
    }
    let (cos, sin) = C::cos_sin(rot.theta)?;
    let neg_cos = cos.neg();
    let top = f
        .coeffs
        .keys()
        .map(|e| e[rot.a] + e[rot.b])
        .max()
        .unwrap_or(0);
    let cos_p = powers(&cos, top);
    let sin_p = powers(&sin, top);
    let neg_cos_p = powers(&neg_cos, top);

    let mut out = GaussHermitePoly {
        n: f.n,
        coeffs: BTreeMap::new(),
        norm_sq: f.norm_sq.clone(),
    };
    for (exps, c) in &f.coeffs {
        let (p, q) = (exps[rot.a], exps[rot.b]);
        // (cos x_a + sin x_b)^p (sin x_a − cos x_b)^q
        for i in 0..=p {
            let left = C::from_rational(&binomial(p, i))
                .mul(&cos_p[i as usize])
                .mul(&sin_p[(p - i) as usize]);
            for k in 0..=q {
                let right = C::from_rational(&binomial(q, k))
                    .mul(&sin_p[k as usize])
                    .mul(&neg_cos_p[(q - k) as usize]);
                let mut e = exps.clone();
                e[rot.a] = i + k;
                e[rot.b] = (p - i) + (q - k);
                out.accumulate(e, c.mul(&left).mul(&right));
            }
        }
    }
    out.coeffs.retain(|_, c| !c.is_negligible(0.0));
    Ok(out)
}

/// Coefficient `c_ν` of a Hermite expansion, stored as `scaled·√radicand`.
#[derive(Clone, Debug)]
pub struct ExpansionTerm<C> {
    pub nu: MultiIndex,
    pub scaled: C,
    pub radicand: Rational,
}

impl<C: Coefficient> ExpansionTerm<C> {
    pub fn value_f64(&self) -> f64 {
        self.scaled.to_f64() * to_f64(&self.radicand).sqrt()
    }

    /// `|c_ν|²`, exact in the coefficient field.
    pub fn weight(&self) -> C {
        self.scaled
            .mul(&self.scaled)
            .mul(&C::from_rational(&self.radicand))
    }

    pub fn is_nonzero(&self) -> bool {
        !self
            .scaled
            .is_negligible(to_f64(&self.radicand).sqrt().recip())
    }
}

/// Expansion `f = Σ_{|ν|=λ} c_ν H_ν`.
#[derive(Clone, Debug)]
pub struct HermiteExpansion<C> {
    pub lambda: u32,
    pub terms: Vec<ExpansionTerm<C>>,
}

impl<C: Coefficient> HermiteExpansion<C> {
    pub fn term(&self, nu: &MultiIndex) -> Option<&ExpansionTerm<C>> {
        self.terms.iter().find(|t| &t.nu == nu)
    }

    /// `Σ_ν |c_ν|²`.
    pub fn weight_sum(&self) -> C {
        self.terms
            .iter()
            .fold(C::zero(), |acc, t| acc.add(&t.weight()))
    }
}

/// Hermite coefficients of a polynomial lying in one eigenspace.
pub fn poly_to_hermite<C: Coefficient>(f: &GaussHermitePoly<C>) -> Result<HermiteExpansion<C>> {
    let scale = f.scale();
    let lambda = f.degree().unwrap_or(0);
    let lead_scale = Rational::new(BigInt::one(), BigInt::one() << lambda as usize);
    let lead_scale = C::from_rational(&lead_scale);
    let mut residual = f.coeffs.clone();
    let mut terms = Vec::new();
    for nu in MultiIndex::with_degree(f.n, lambda) {
        let top = f
            .coeffs
            .get(nu.entries())
            .cloned()
            .unwrap_or_else(C::zero)
            .mul(&lead_scale);
        if !top.is_negligible(0.0) {
            for (e, h) in product_hermite::<C>(&nu) {
                let delta = top.mul(&h);
                match residual.get_mut(&e) {
                    Some(v) => *v = v.sub(&delta),
                    None => {
                        residual.insert(e, delta.neg());
                    }
                }
            }
        }
        let mut radicand =
            f.norm_sq.clone() * Rational::from_integer(BigInt::one() << lambda as usize);
        for &k in nu.entries() {
            radicand *= Rational::from_integer(factorial(k));
        }
        terms.push(ExpansionTerm {
            nu,
            scaled: top,
            radicand,
        });
    }
    if let Some((e, c)) = residual.iter().find(|(_, c)| !c.is_negligible(scale)) {
        return Err(Error::EigenspaceViolation {
            exponent: format!("{e:?}"),
            residual: c.to_f64(),
        });
    }
    Ok(HermiteExpansion { lambda, terms })
}

/// Coefficients `c_ν(μ, R)` of `H_μ(Rx) = Σ_ν c_ν H_ν(x)`.
pub fn rotation_coefficients<C: Coefficient>(
    mu: &MultiIndex,
    rot: &PlaneRotation,
) -> Result<HermiteExpansion<C>> {
    poly_to_hermite(&apply_rotation(&hermite_to_poly::<C>(mu)?, rot)?)
}

/// One rotation of a maximizer chain, landing on `to` with coefficient `c ≠ 0`.
#[derive(Clone, Debug)]
pub struct ChainStep {
    pub rotation: PlaneRotation,
    pub from: MultiIndex,
    pub to: MultiIndex,
    pub coefficient: f64,
    /// `|c|²`, exact.
    pub weight: QSqrt2,
}

fn chain_step(from: &MultiIndex, to: MultiIndex, plane: usize) -> Result<ChainStep> {
    let rotation = PlaneRotation::quarter(0, plane)?;
    let expansion = rotation_coefficients::<QSqrt2>(from, &rotation)?;
    let term = expansion
        .term(&to)
        .filter(|t| t.is_nonzero())
        .ok_or_else(|| Error::ChainBroken {
            from: from.to_string(),
            to: to.to_string(),
        })?;
    Ok(ChainStep {
        rotation,
        from: from.clone(),
        coefficient: term.value_f64(),
        weight: term.weight(),
        to,
    })
}

/// Sequence of `π/4` rotations carrying `start` to `target` inside one
/// eigenspace: first fold every mode into mode 0 through the planes `(0, j)`,
/// then peel `target_j` quanta back out of mode 0 through the same planes.
pub fn maximizer_chain(start: &MultiIndex, target: &MultiIndex) -> Result<Vec<ChainStep>> {
    start.check_dim(target.dim())?;
    if start.degree() != target.degree() {
        return Err(Error::DegreeMismatch {
            start: start.degree(),
            target: target.degree(),
        });
    }
    let mut steps = Vec::new();
    if start == target {
        return Ok(steps);
    }
    let n = start.dim();
    let mut current = start.clone();
    for j in 1..n {
        if current.get(j) > 0 {
            let to = current.with(0, current.get(0) + current.get(j)).with(j, 0);
            steps.push(chain_step(&current, to.clone(), j)?);
            current = to;
        }
    }
    for j in 1..n {
        if target.get(j) > 0 {
            let to = current
                .with(0, current.get(0) - target.get(j))
                .with(j, target.get(j));
            steps.push(chain_step(&current, to.clone(), j)?);
            current = to;
        }
    }
    debug_assert_eq!(&current, target);
    Ok(steps)
}

/// Result of comparing `Σ_ν |c_ν|² I_ν(r)` with `I_μ(r)`.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub mu: MultiIndex,
    pub rotation: PlaneRotation,
    pub weights: Vec<(MultiIndex, f64)>,
    pub rotated_value: f64,
    pub original_value: f64,
    pub residual: f64,
    /// `|Σ_ν|c_ν|² − 1|` in floating point.
    pub unitarity_residual: f64,
    /// Exact equality of the closed forms, when the angle is exact.
    pub exact_identity: Option<bool>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.residual <= INVARIANCE_TOLERANCE
            && self.unitarity_residual <= INVARIANCE_TOLERANCE
            && self.exact_identity != Some(false)
    }
}

/// Checks that rotating `H_μ` leaves its ball integral unchanged.
pub fn verify_rotation_invariance(
    mu: &MultiIndex,
    rot: &PlaneRotation,
    ball: &BallSpec,
) -> Result<InvarianceReport> {
    mu.check_dim(ball.n)?;
    let s = ball.radius_sq();
    let value = |form: &CumulativeForm| if ball.r == 0.0 { 0.0 } else { form.eval(s) };
    let original = diagonal_form(mu);

    let (weights, forms, exact_identity) = if rot.is_exact() {
        let expansion = rotation_coefficients::<QSqrt2>(mu, rot)?;
        let mut rational_part = CumulativeForm::zero();
        let mut surd_part = CumulativeForm::zero();
        let mut weights = Vec::new();
        let mut forms = Vec::new();
        for t in &expansion.terms {
            let w = t.weight();
            let form = diagonal_form(&t.nu);
            rational_part = rational_part.add(&form.scale(&w.a));
            surd_part = surd_part.add(&form.scale(&w.b));
            weights.push((t.nu.clone(), w.to_f64()));
            forms.push(form);
        }
        let exact = rational_part == original && surd_part.is_zero();
        (weights, forms, Some(exact))
    } else {
        let expansion = rotation_coefficients::<f64>(mu, rot)?;
        let weights = expansion
            .terms
            .iter()
            .map(|t| (t.nu.clone(), t.weight()))
            .collect();
        let forms = expansion
            .terms
            .iter()
            .map(|t| diagonal_form(&t.nu))
            .collect();
        (weights, forms, None)
    };

    let rotated_value: f64 = weights
        .iter()
        .zip(&forms)
        .map(|((_, w), form)| w * value(form))
        .sum();
    let original_value = value(&original);
    let weight_sum: f64 = weights.iter().map(|(_, w)| w).sum();
    Ok(InvarianceReport {
        mu: mu.clone(),
        rotation: *rot,
        weights,
        rotated_value,
        original_value,
        residual: (rotated_value - original_value).abs(),
        unitarity_residual: (weight_sum - 1.0).abs(),
        exact_identity,
    })
}
