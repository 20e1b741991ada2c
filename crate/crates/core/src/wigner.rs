//! Pointwise Wigner and mixed Wigner distributions of Hermite states.
//!
//! Convention: `W_{ψ₁,ψ₂}(x, y) = (2π)^(−n) ∫ ψ₁(x+τ/2) ψ₂*(x−τ/2) e^(−iτ·y) dτ`.
//! Under this kernel the closed form of `W_{h_j,h_k}` for `j ≥ k` carries
//! the power `(√2 z̄)^(j−k)` with `z = x + iy`; the `k > j` branch is its
//! complex conjugate mirror.

use std::collections::HashSet;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::quadrature::GaussLegendreRule;
use crate::special::{hermite_h_unchecked, laguerre_unchecked, MAX_INDEX};

/// Largest tolerated imaginary residual when assembling a real Wigner value.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Tolerance on `Σ|c_μ|² = 1` for a superposition.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Phase-space point `(x, y) ∈ ℝ^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidArgument("phase point needs n ≥ 1".into()));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        Ok(PhasePoint { x, y })
    }

    pub fn origin(n: usize) -> Self {
        PhasePoint {
            x: vec![0.0; n.max(1)],
            y: vec![0.0; n.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `Σ_j x_j² + y_j²`.
    pub fn radius_sq(&self) -> f64 {
        self.x.iter().zip(&self.y).map(|(a, b)| a * a + b * b).sum()
    }
}

/// Normalized finite superposition `ψ = Σ c_μ H_μ`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteSuperposition {
    n: usize,
    terms: Vec<(MultiIndex, Complex64)>,
}

impl HermiteSuperposition {
    pub fn new(terms: Vec<(MultiIndex, Complex64)>) -> Result<Self> {
        let n = validate_terms(&terms)?;
        let norm_sq: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(HermiteSuperposition { n, terms })
    }

    /// Rescales the coefficients to unit norm. Returns the state together
    /// with the squared norm it had before rescaling.
    pub fn normalized(terms: Vec<(MultiIndex, Complex64)>) -> Result<(Self, f64)> {
        let n = validate_terms(&terms)?;
        let norm_sq: f64 = terms.iter().map(|(_, c)| c.norm_sqr()).sum();
        if !(norm_sq > 0.0) || !norm_sq.is_finite() {
            return Err(Error::NotNormalized { norm_sq });
        }
        let scale = norm_sq.sqrt().recip();
        let terms = terms.into_iter().map(|(m, c)| (m, c * scale)).collect();
        Ok((HermiteSuperposition { n, terms }, norm_sq))
    }

    pub fn basis(mu: MultiIndex) -> Self {
        HermiteSuperposition {
            n: mu.dim(),
            terms: vec![(mu, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(MultiIndex, Complex64)] {
        &self.terms
    }
}

fn validate_terms(terms: &[(MultiIndex, Complex64)]) -> Result<usize> {
    let Some((first, _)) = terms.first() else {
        return Err(Error::InvalidArgument("superposition has no terms".into()));
    };
    let n = first.dim();
    let mut seen = HashSet::new();
    for (mu, c) in terms {
        mu.check_dim(n)?;
        if !seen.insert(mu) {
            return Err(Error::DuplicateIndex(mu.to_string()));
        }
        if let Some(&m) = mu.entries().iter().find(|&&m| m > MAX_INDEX) {
            return Err(Error::IndexOutOfRange {
                index: m as usize,
                max: MAX_INDEX as usize,
            });
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "coefficient of {mu} is not finite"
            )));
        }
    }
    Ok(n)
}

/// Mixed Wigner distribution `W_{h_j,h_k}(x, y)` of two 1-D Hermite functions.
pub fn wigner_pair_1d(j: u32, k: u32, x: f64, y: f64) -> Result<Complex64> {
    for idx in [j, k] {
        if idx > MAX_INDEX {
            return Err(Error::IndexOutOfRange {
                index: idx as usize,
                max: MAX_INDEX as usize,
            });
        }
    }
    Ok(pair_1d(j, k, x, y))
}

pub(crate) fn pair_1d(j: u32, k: u32, x: f64, y: f64) -> Complex64 {
    let u = x * x + y * y;
    let gauss = (-u).exp();
    let (hi, lo, base) = if j >= k {
        (j, k, Complex64::new(SQRT_2 * x, -SQRT_2 * y))
    } else {
        (k, j, Complex64::new(SQRT_2 * x, SQRT_2 * y))
    };
    let mut ratio = 1.0;
    for i in (lo + 1)..=hi {
        ratio /= (i as f64).sqrt();
    }
    let sign = if lo % 2 == 0 { 1.0 } else { -1.0 };
    let mut power = Complex64::new(1.0, 0.0);
    for _ in 0..(hi - lo) {
        power *= base;
    }
    let lag = laguerre_unchecked(lo, hi - lo, 2.0 * u);
    power * (sign * ratio * gauss * lag / PI)
}

/// All `W_{h_a,h_b}(x, y)` for `a, b ≤ max`, row-major in `a`.
pub(crate) fn pair_table_1d(max: u32, x: f64, y: f64, out: &mut [Complex64]) {
    let m = max as usize + 1;
    debug_assert_eq!(out.len(), m * m);
    let u = x * x + y * y;
    let gauss = (-u).exp() / PI;
    let zbar = Complex64::new(SQRT_2 * x, -SQRT_2 * y);
    let mut powers = Vec::with_capacity(m);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        powers.push(p);
        p *= zbar;
    }
    for lo in 0..m {
        let sign = if lo % 2 == 0 { 1.0 } else { -1.0 };
        let mut ratio = 1.0;
        for hi in lo..m {
            if hi > lo {
                ratio /= (hi as f64).sqrt();
            }
            let lag = laguerre_unchecked(lo as u32, (hi - lo) as u32, 2.0 * u);
            let v = powers[hi - lo] * (sign * ratio * gauss * lag);
            out[hi * m + lo] = v;
            out[lo * m + hi] = v.conj();
        }
    }
}

/// `W_{H_μ,H_ν}(p) = Π_j W_{h_{μ_j},h_{ν_j}}(x_j, y_j)`.
pub fn wigner_pair(mu: &MultiIndex, nu: &MultiIndex, p: &PhasePoint) -> Result<Complex64> {
    mu.check_dim(p.dim())?;
    nu.check_dim(p.dim())?;
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..p.dim() {
        acc *= wigner_pair_1d(mu.get(j), nu.get(j), p.x[j], p.y[j])?;
    }
    Ok(acc)
}

pub(crate) fn pair_unchecked(mu: &[u32], nu: &[u32], x: &[f64], y: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..x.len() {
        acc *= pair_1d(mu[j], nu[j], x[j], y[j]);
    }
    acc
}

/// `W_ψ(p) = Σ_μ Σ_ν c_μ c_ν* W_{H_μ,H_ν}(p)`.
///
/// Fails if the assembled sum has an imaginary part above
/// [`HERMITIAN_TOLERANCE`].
pub fn wigner_state(psi: &HermiteSuperposition, p: &PhasePoint) -> Result<f64> {
    if psi.dim() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: psi.dim(),
            found: p.dim(),
        });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (mu, cm) in psi.terms() {
        for (nu, cn) in psi.terms() {
            let w = pair_unchecked(mu.entries(), nu.entries(), &p.x, &p.y);
            sum += cm * cn.conj() * w;
        }
    }
    if sum.im.abs() > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitianResidual { imag: sum.im });
    }
    Ok(sum.re)
}

/// Direct evaluation of the defining integral for two wave functions, with a
/// tensor Gauss–Legendre rule on `[−half_width, half_width]^n`.
pub fn wigner_numeric_mixed<F, G>(
    psi1: F,
    psi2: G,
    p: &PhasePoint,
    half_width: f64,
    nodes: usize,
) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
    G: Fn(&[f64]) -> Complex64,
{
    let n = p.dim();
    let rule: Vec<(f64, f64)> = GaussLegendreRule::new(nodes)
        .mapped(-half_width, half_width)
        .collect();
    let mut counter = vec![0usize; n];
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    let mut sum = Complex64::new(0.0, 0.0);
    loop {
        let mut weight = 1.0;
        let mut phase = 0.0;
        for j in 0..n {
            let (tau, w) = rule[counter[j]];
            weight *= w;
            phase += tau * p.y[j];
            plus[j] = p.x[j] + 0.5 * tau;
            minus[j] = p.x[j] - 0.5 * tau;
        }
        sum += psi1(&plus) * psi2(&minus).conj() * Complex64::from_polar(weight, -phase);

        let mut j = 0;
        loop {
            if j == n {
                return sum / (2.0 * PI).powi(n as i32);
            }
            counter[j] += 1;
            if counter[j] < nodes {
                break;
            }
            counter[j] = 0;
            j += 1;
        }
    }
}

/// Direct evaluation of `W_ψ(p)` from the defining integral; an oracle for the
/// closed forms.
pub fn wigner_numeric<F>(psi: F, p: &PhasePoint, half_width: f64, nodes: usize) -> f64
where
    F: Fn(&[f64]) -> Complex64,
{
    wigner_numeric_mixed(&psi, &psi, p, half_width, nodes).re
}

/// Wave function of a basis state `H_μ`, for use with [`wigner_numeric`].
pub fn hermite_wave(mu: &MultiIndex) -> impl Fn(&[f64]) -> Complex64 + '_ {
    move |x: &[f64]| {
        let v: f64 = mu
            .entries()
            .iter()
            .zip(x)
            .map(|(&k, &xj)| hermite_h_unchecked(k, xj))
            .product();
        Complex64::new(v, 0.0)
    }
}

/// Wave function of a superposition, for use with [`wigner_numeric`].
pub fn superposition_wave(psi: &HermiteSuperposition) -> impl Fn(&[f64]) -> Complex64 + '_ {
    move |x: &[f64]| {
        psi.terms()
            .iter()
            .map(|(mu, c)| {
                let v: f64 = mu
                    .entries()
                    .iter()
                    .zip(x)
                    .map(|(&k, &xj)| hermite_h_unchecked(k, xj))
                    .product();
                c * v
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pair_1d_values() {
        let v = wigner_pair_1d(0, 0, 0.0, 0.0).unwrap();
        assert_relative_eq!(v.re, 1.0 / PI, epsilon = 1e-16);
        assert_eq!(v.im, 0.0);
        assert_relative_eq!(
            wigner_pair_1d(1, 1, 0.0, 0.0).unwrap().re,
            -1.0 / PI,
            epsilon = 1e-16
        );
        let v = wigner_pair_1d(1, 0, 1.0, 0.0).unwrap();
        assert_relative_eq!(v.re, SQRT_2 * (-1f64).exp() / PI, epsilon = 1e-16);
        assert!((v.re - 0.165603).abs() < 1e-6);
        assert!(wigner_pair_1d(201, 0, 0.0, 0.0).is_err());
    }

    #[test]
    fn pair_values() {
        let o = PhasePoint::origin(2);
        let v = wigner_pair(&MultiIndex::from([0, 0]), &MultiIndex::from([0, 0]), &o).unwrap();
        assert_relative_eq!(v.re, 1.0 / (PI * PI), epsilon = 1e-16);

        let p = PhasePoint::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let v = wigner_pair(&MultiIndex::from([1, 0]), &MultiIndex::from([0, 0]), &p).unwrap();
        assert_relative_eq!(v.re, SQRT_2 * (-1f64).exp() / PI / PI, epsilon = 1e-16);

        assert!(matches!(
            wigner_pair(&MultiIndex::from([1]), &MultiIndex::from([0, 0]), &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn leading_index_reduces_to_laguerre() {
        let p = PhasePoint::new(vec![0.3, -0.7, 1.1], vec![0.4, 0.2, -0.5]).unwrap();
        for lambda in 0..=6 {
            let mu = MultiIndex::leading(3, lambda);
            let v = wigner_pair(&mu, &mu, &p).unwrap();
            let sign = if lambda % 2 == 0 { 1.0 } else { -1.0 };
            let z1 = 0.3f64 * 0.3 + 0.4 * 0.4;
            let expected = sign
                * PI.powi(-3)
                * (-p.radius_sq()).exp()
                * laguerre_unchecked(lambda, 0, 2.0 * z1);
            assert_relative_eq!(v.re, expected, epsilon = 1e-15, max_relative = 1e-12);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn table_matches_pointwise() {
        let mut table = vec![c(0.0, 0.0); 36];
        pair_table_1d(5, 0.8, -0.3, &mut table);
        for a in 0..6 {
            for b in 0..6 {
                let v = pair_1d(a, b, 0.8, -0.3);
                assert!((table[a as usize * 6 + b as usize] - v).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn state_values() {
        let o = PhasePoint::origin(2);
        let psi = HermiteSuperposition::basis(MultiIndex::zero(2));
        assert_relative_eq!(wigner_state(&psi, &o).unwrap(), PI.powi(-2));

        let s = 0.5f64.sqrt();
        let psi = HermiteSuperposition::new(vec![
            (MultiIndex::from([0]), c(s, 0.0)),
            (MultiIndex::from([1]), c(s, 0.0)),
        ])
        .unwrap();
        let p = PhasePoint::new(vec![1.0], vec![0.0]).unwrap();
        let w0 = (-1f64).exp() / PI;
        let w1 = -(-1f64).exp() * laguerre_unchecked(1, 0, 2.0) / PI;
        let w01 = wigner_pair_1d(0, 1, 1.0, 0.0).unwrap().re;
        assert_relative_eq!(
            wigner_state(&psi, &p).unwrap(),
            0.5 * w0 + 0.5 * w1 + w01,
            epsilon = 1e-15
        );

        let mu = MultiIndex::from([2, 1]);
        let p = PhasePoint::new(vec![0.2, 0.9], vec![-0.4, 0.1]).unwrap();
        let psi = HermiteSuperposition::basis(mu.clone());
        assert_eq!(
            wigner_state(&psi, &p).unwrap(),
            wigner_pair(&mu, &mu, &p).unwrap().re
        );
    }

    #[test]
    fn superposition_validation() {
        let dup = HermiteSuperposition::new(vec![
            (MultiIndex::from([0]), c(0.5f64.sqrt(), 0.0)),
            (MultiIndex::from([0]), c(0.5f64.sqrt(), 0.0)),
        ]);
        assert!(matches!(dup, Err(Error::DuplicateIndex(_))));
        let unnorm = HermiteSuperposition::new(vec![(MultiIndex::from([0]), c(0.9, 0.0))]);
        assert!(matches!(unnorm, Err(Error::NotNormalized { .. })));
        let mixed = HermiteSuperposition::new(vec![
            (MultiIndex::from([0]), c(1.0, 0.0)),
            (MultiIndex::from([0, 1]), c(0.0, 0.0)),
        ]);
        assert!(matches!(mixed, Err(Error::DimensionMismatch { .. })));
        let (psi, norm_sq) = HermiteSuperposition::normalized(vec![
            (MultiIndex::from([0]), c(3.0, 0.0)),
            (MultiIndex::from([2]), c(0.0, 4.0)),
        ])
        .unwrap();
        assert_eq!(norm_sq, 25.0);
        assert_relative_eq!(psi.terms()[1].1.im, 0.8);
    }

    #[test]
    fn numeric_definition_examples() {
        let h0 = MultiIndex::from([0]);
        let h1 = MultiIndex::from([1]);
        let o = PhasePoint::origin(1);
        assert!((wigner_numeric(hermite_wave(&h0), &o, 12.0, 96) - 1.0 / PI).abs() < 1e-8);
        assert!((wigner_numeric(hermite_wave(&h1), &o, 12.0, 96) + 1.0 / PI).abs() < 1e-8);
        let p = PhasePoint::new(vec![2.0], vec![1.0]).unwrap();
        let v = wigner_numeric(hermite_wave(&h0), &p, 12.0, 96);
        assert!((v - (-5f64).exp() / PI).abs() < 1e-8);
    }

    #[test]
    fn off_diagonal_closed_form_matches_definition() {
        // Pins the sign of the Fourier kernel: with e^(−iτ·y) the j > k branch
        // carries z̄, not z.
        for (j, k) in [(1u32, 0u32), (0, 1), (3, 1), (2, 4), (4, 0)] {
            let a = MultiIndex::from([j]);
            let b = MultiIndex::from([k]);
            for &(x, y) in &[(0.7, 0.4), (-0.3, 1.2), (1.5, -0.8)] {
                let p = PhasePoint::new(vec![x], vec![y]).unwrap();
                let num = wigner_numeric_mixed(hermite_wave(&a), hermite_wave(&b), &p, 12.0, 96);
                let closed = wigner_pair_1d(j, k, x, y).unwrap();
                assert!(
                    (num - closed).norm() < 1e-8,
                    "({j},{k}) at ({x},{y}): {num} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn complex_superposition_matches_definition() {
        let psi = HermiteSuperposition::normalized(vec![
            (MultiIndex::from([0, 1]), c(0.6, 0.2)),
            (MultiIndex::from([2, 0]), c(-0.1, 0.7)),
            (MultiIndex::from([1, 1]), c(0.3, -0.4)),
        ])
        .unwrap()
        .0;
        let p = PhasePoint::new(vec![0.4, -0.6], vec![0.9, 0.3]).unwrap();
        let num = wigner_numeric(superposition_wave(&psi), &p, 12.0, 64);
        assert!((num - wigner_state(&psi, &p).unwrap()).abs() < 1e-8);
    }

    fn arb_point(n: usize) -> impl Strategy<Value = PhasePoint> {
        (
            prop::collection::vec(-3.0f64..3.0, n),
            prop::collection::vec(-3.0f64..3.0, n),
        )
            .prop_map(|(x, y)| PhasePoint::new(x, y).unwrap())
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(
            mu in prop::collection::vec(0u32..8, 2),
            nu in prop::collection::vec(0u32..8, 2),
            p in arb_point(2),
        ) {
            let mu = MultiIndex::new(mu).unwrap();
            let nu = MultiIndex::new(nu).unwrap();
            let a = wigner_pair(&mu, &nu, &p).unwrap();
            let b = wigner_pair(&nu, &mu, &p).unwrap();
            prop_assert_eq!(a, b.conj());
            let d = wigner_pair(&mu, &mu, &p).unwrap();
            prop_assert_eq!(d.im, 0.0);
        }

        #[test]
        fn basis_states_respect_sup_bound(mu in prop::collection::vec(0u32..10, 3), p in arb_point(3)) {
            let mu = MultiIndex::new(mu).unwrap();
            let v = wigner_state(&HermiteSuperposition::basis(mu), &p).unwrap();
            prop_assert!(v.abs() <= PI.powi(-3) + 1e-10);
        }
    }
}
