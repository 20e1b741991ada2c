//! Integrals of Hermite-state Wigner functions over centered balls
//! `B^{2n}(r)` in phase space.
//!
//! Diagonal integrals are exact: in the coordinates `u_j = x_j² + y_j²` the
//! integrand factorizes into per-mode [`radial_integrand`]s whose simplex
//! convolution, integrated up to `r²`, yields a closed form
//! `c − q(r²)e^(−r²)`. Off-diagonal integrals are computed by quadrature only.

use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::polyexp::{
    convolve_all, cumulative, radial_integrand, rat, CumulativeForm, Rational, RationalPoly,
};
use crate::quadrature::{periodic_trapezoid, simplex_product, GaussLegendreRule};
use crate::special::regularized_upper_gamma;
use crate::wigner::{pair_1d, pair_table_1d, HermiteSuperposition};

pub const DEFAULT_ANGULAR_NODES: usize = 64;
pub const DEFAULT_RADIAL_NODES: usize = 48;

/// Centered ball `B^{2n}(r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallSpec {
    pub n: usize,
    pub r: f64,
}

impl BallSpec {
    pub fn new(n: usize, r: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "number of modes must be at least 1".into(),
            ));
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be finite and non-negative, got {r}"
            )));
        }
        Ok(BallSpec { n, r })
    }

    pub fn radius_sq(&self) -> f64 {
        self.r * self.r
    }

    /// Lebesgue volume `π^n r^{2n} / n!`.
    pub fn volume(&self) -> f64 {
        let mut v = 1.0;
        for k in 1..=self.n {
            v *= std::f64::consts::PI * self.radius_sq() / k as f64;
        }
        v
    }
}

/// Exact closed form of `r ↦ ∫_{B^{2n}(r)} W_{H_μ}` in the variable `s = r²`.
pub fn diagonal_form(mu: &MultiIndex) -> CumulativeForm {
    let factors: Vec<_> = mu.entries().iter().map(|&k| radial_integrand(k)).collect();
    let density = convolve_all(&factors).expect("multi-index has at least one mode");
    cumulative(&density)
}

/// Exact ball integral of a diagonal state, with its value at the ball radius.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalIntegral {
    pub form: CumulativeForm,
    pub value: f64,
}

pub fn ball_integral_diagonal(mu: &MultiIndex, ball: &BallSpec) -> Result<DiagonalIntegral> {
    mu.check_dim(ball.n)?;
    let form = diagonal_form(mu);
    let value = if ball.r == 0.0 {
        0.0
    } else {
        form.eval(ball.radius_sq())
    };
    Ok(DiagonalIntegral { form, value })
}

/// `1 − Γ(n, s)/(n−1)!` as the exact form `1 − (Σ_{k<n} s^k/k!) e^(−s)`.
pub fn theorem1_form(n: usize) -> CumulativeForm {
    let mut coeffs = Vec::with_capacity(n);
    let mut term = Rational::one();
    for k in 0..n {
        if k > 0 {
            term /= rat(k as i64);
        }
        coeffs.push(term.clone());
    }
    CumulativeForm {
        constant: Rational::one(),
        poly: RationalPoly::new(coeffs),
    }
}

/// Maximal ball localization `1 − Γ(n, r²)/(n−1)!`, attained by the Gaussian.
pub fn theorem1_value(ball: &BallSpec) -> f64 {
    if ball.r == 0.0 {
        return 0.0;
    }
    1.0 - regularized_upper_gamma(ball.n as u32, ball.radius_sq())
        .expect("ball dimension and radius are validated")
}

fn check_offdiag(mu: &MultiIndex, nu: &MultiIndex, ball: &BallSpec) -> Result<()> {
    mu.check_dim(ball.n)?;
    nu.check_dim(ball.n)?;
    if mu == nu {
        return Err(Error::DiagonalPair(mu.to_string()));
    }
    Ok(())
}

fn check_nodes(angular: usize, radial: usize) -> Result<()> {
    if angular < 8 || radial < 8 {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least 8 nodes, got angular {angular}, radial {radial}"
        )));
    }
    Ok(())
}

/// Complex value of `∫_{B^{2n}(r)} W_{H_μ,H_ν}` by polar quadrature: per mode a
/// periodic trapezoid in the angle, and nested Gauss–Legendre rules over the
/// simplex `{u ≥ 0, Σu_j ≤ r²}`.
pub fn ball_integral_offdiag_complex(
    mu: &MultiIndex,
    nu: &MultiIndex,
    ball: &BallSpec,
    angular_nodes: usize,
    radial_nodes: usize,
) -> Result<Complex64> {
    check_offdiag(mu, nu, ball)?;
    check_nodes(angular_nodes, radial_nodes)?;
    if ball.r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = GaussLegendreRule::new(radial_nodes);
    let g = |j: usize, u: f64| {
        let rho = u.sqrt();
        let (a, b) = (mu.get(j), nu.get(j));
        // dx dy = ½ du dφ
        periodic_trapezoid(angular_nodes, |phi| {
            pair_1d(a, b, rho * phi.cos(), rho * phi.sin())
        }) * 0.5
    };
    Ok(simplex_product(ball.n, ball.radius_sq(), &rule, &g))
}

/// Real part of [`ball_integral_offdiag_complex`]; the true value is zero for
/// every `μ ≠ ν`.
pub fn ball_integral_offdiag(
    mu: &MultiIndex,
    nu: &MultiIndex,
    ball: &BallSpec,
    angular_nodes: usize,
    radial_nodes: usize,
) -> Result<f64> {
    ball_integral_offdiag_complex(mu, nu, ball, angular_nodes, radial_nodes).map(|v| v.re)
}

/// The off-diagonal quadrature of [`ball_integral_offdiag_complex`] for many
/// index pairs at once.
///
/// The simplex nodes depend only on `(n, r, radial_nodes)`, so the per-mode
/// angular integrals of every `W_{h_a,h_b}` with `a, b ≤ max_index` are
/// tabulated once per node and each pair costs one pass over the node tree.
pub struct OffDiagonalSweep {
    ball: BallSpec,
    max_index: u32,
    radial_nodes: usize,
    // One entry per simplex level; node `i` at level `l` has parent `i / radial_nodes`.
    levels: Vec<Level>,
}

struct Level {
    weights: Vec<f64>,
    tables: Vec<Complex64>,
}

impl OffDiagonalSweep {
    pub fn new(
        ball: BallSpec,
        max_index: u32,
        angular_nodes: usize,
        radial_nodes: usize,
    ) -> Result<Self> {
        check_nodes(angular_nodes, radial_nodes)?;
        let rule = GaussLegendreRule::new(radial_nodes);
        let m = max_index as usize + 1;
        let mut levels = Vec::with_capacity(ball.n);
        let mut remaining = vec![ball.radius_sq()];
        for _ in 0..ball.n {
            let mut us = Vec::with_capacity(remaining.len() * radial_nodes);
            let mut weights = Vec::with_capacity(remaining.len() * radial_nodes);
            let mut next = Vec::with_capacity(remaining.len() * radial_nodes);
            for &rem in &remaining {
                for (u, w) in rule.mapped(0.0, rem.max(0.0)) {
                    us.push(u);
                    weights.push(w);
                    next.push(rem - u);
                }
            }
            let mut tables = vec![Complex64::new(0.0, 0.0); us.len() * m * m];
            tables
                .par_chunks_mut(m * m)
                .zip(us.par_iter())
                .for_each(|(table, &u)| angular_table(max_index, angular_nodes, u, table));
            levels.push(Level { weights, tables });
            remaining = next;
        }
        Ok(OffDiagonalSweep {
            ball,
            max_index,
            radial_nodes,
            levels,
        })
    }

    pub fn ball(&self) -> &BallSpec {
        &self.ball
    }

    /// Same quantity as [`ball_integral_offdiag_complex`] with this sweep's nodes.
    pub fn integral(&self, mu: &MultiIndex, nu: &MultiIndex) -> Result<Complex64> {
        check_offdiag(mu, nu, &self.ball)?;
        for &k in mu.entries().iter().chain(nu.entries()) {
            if k > self.max_index {
                return Err(Error::IndexOutOfRange {
                    index: k as usize,
                    max: self.max_index as usize,
                });
            }
        }
        if self.ball.r == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let m = self.max_index as usize + 1;
        let entry = |level: usize, node: usize| {
            let j = level;
            let idx = mu.get(j) as usize * m + nu.get(j) as usize;
            self.levels[level].tables[node * m * m + idx] * self.levels[level].weights[node]
        };
        let last = self.levels.len() - 1;
        let mut acc: Vec<Complex64> = (0..self.levels[last].weights.len())
            .map(|i| entry(last, i))
            .collect();
        for level in (0..last).rev() {
            acc = acc
                .chunks(self.radial_nodes)
                .enumerate()
                .map(|(i, children)| entry(level, i) * children.iter().sum::<Complex64>())
                .collect();
        }
        Ok(acc.iter().sum())
    }
}

fn angular_table(max_index: u32, angular_nodes: usize, u: f64, out: &mut [Complex64]) {
    let rho = u.sqrt();
    let step = std::f64::consts::TAU / angular_nodes as f64;
    let mut scratch = vec![Complex64::new(0.0, 0.0); out.len()];
    out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
    for i in 0..angular_nodes {
        let phi = step * i as f64;
        pair_table_1d(max_index, rho * phi.cos(), rho * phi.sin(), &mut scratch);
        for (o, s) in out.iter_mut().zip(&scratch) {
            *o += s;
        }
    }
    out.iter_mut().for_each(|v| *v *= 0.5 * step);
}

/// How [`energy_of_state_with`] treats the cross terms `μ ≠ ν`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnergyMethod {
    /// Cross terms dropped; their ball integrals vanish identically.
    Analytic,
    /// Cross terms integrated by the off-diagonal quadrature, for auditing.
    FullQuadrature {
        angular_nodes: usize,
        radial_nodes: usize,
    },
}

/// `∫_{B^{2n}(r)} W_ψ = Σ_μ |c_μ|² ∫_{B^{2n}(r)} W_{H_μ}`.
pub fn energy_of_state(psi: &HermiteSuperposition, ball: &BallSpec) -> Result<f64> {
    energy_of_state_with(psi, ball, EnergyMethod::Analytic)
}

pub fn energy_of_state_with(
    psi: &HermiteSuperposition,
    ball: &BallSpec,
    method: EnergyMethod,
) -> Result<f64> {
    if psi.dim() != ball.n {
        return Err(Error::DimensionMismatch {
            expected: ball.n,
            found: psi.dim(),
        });
    }
    let mut total = 0.0;
    for (mu, c) in psi.terms() {
        total += c.norm_sqr() * ball_integral_diagonal(mu, ball)?.value;
    }
    if let EnergyMethod::FullQuadrature {
        angular_nodes,
        radial_nodes,
    } = method
    {
        let mut cross = Complex64::new(0.0, 0.0);
        for (mu, cm) in psi.terms() {
            for (nu, cn) in psi.terms() {
                if mu != nu {
                    let v =
                        ball_integral_offdiag_complex(mu, nu, ball, angular_nodes, radial_nodes)?;
                    cross += cm * cn.conj() * v;
                }
            }
        }
        total += cross.re;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalityViolation {
    pub mu: MultiIndex,
    pub r: f64,
    pub gap: f64,
}

/// Outcome of comparing every excited state against the Gaussian bound.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalityReport {
    pub n: usize,
    pub lambda_max: u32,
    pub checked: usize,
    /// Smallest `theorem1_value − ball integral` over all checked pairs.
    pub min_gap: f64,
    pub min_gap_at: Option<(MultiIndex, f64)>,
    pub violations: Vec<OptimalityViolation>,
}

impl OptimalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

fn check_grid(r_grid: &[f64]) -> Result<()> {
    if r_grid.is_empty() {
        return Err(Error::InvalidArgument("radius grid is empty".into()));
    }
    if let Some(&r) = r_grid.iter().find(|&&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "grid radii must be positive and finite, got {r}"
        )));
    }
    Ok(())
}

/// Checks `∫_{B^{2n}(r)} W_{H_μ} < 1 − Γ(n, r²)/(n−1)!` strictly for every
/// `1 ≤ |μ| ≤ lambda_max` and every grid radius.
///
/// The gap is evaluated from the exact difference of the two closed forms,
/// whose constant terms cancel, so no cancellation occurs in floating point.
pub fn verify_optimality(lambda_max: u32, n: usize, r_grid: &[f64]) -> Result<OptimalityReport> {
    if lambda_max < 1 {
        return Err(Error::InvalidArgument(
            "lambda_max must be at least 1".into(),
        ));
    }
    BallSpec::new(n, 0.0)?;
    check_grid(r_grid)?;
    let bound = theorem1_form(n);
    let indices: Vec<MultiIndex> = (1..=lambda_max)
        .flat_map(|l| MultiIndex::with_degree(n, l))
        .collect();
    let per_index: Vec<Vec<(f64, f64)>> = indices
        .par_iter()
        .map(|mu| {
            let gap_form = bound.sub(&diagonal_form(mu));
            r_grid.iter().map(|&r| (r, gap_form.eval(r * r))).collect()
        })
        .collect();

    let mut report = OptimalityReport {
        n,
        lambda_max,
        checked: 0,
        min_gap: f64::INFINITY,
        min_gap_at: None,
        violations: Vec::new(),
    };
    for (mu, gaps) in indices.iter().zip(per_index) {
        for (r, gap) in gaps {
            report.checked += 1;
            if gap < report.min_gap {
                report.min_gap = gap;
                report.min_gap_at = Some((mu.clone(), r));
            }
            if !(gap > 0.0) {
                report.violations.push(OptimalityViolation {
                    mu: mu.clone(),
                    r,
                    gap,
                });
            }
        }
    }
    Ok(report)
}

/// Finds radii `r₁ < r₂` on the grid with `I(r₁) > I(r₂)` for the ball
/// integral `I` of `H_{(λ,0,…,0)}`, choosing the pair with the largest drop.
///
/// Drops within a few ulps are treated as rounding noise. The grid must be
/// strictly increasing and positive; it should be dense (a hundred points or
/// more) for the answer to be meaningful.
pub fn nonmonotonicity_witness(
    lambda: u32,
    n: usize,
    r_grid: &[f64],
) -> Result<Option<(f64, f64)>> {
    BallSpec::new(n, 0.0)?;
    check_grid(r_grid)?;
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "radius grid must be strictly increasing".into(),
        ));
    }
    let form = diagonal_form(&MultiIndex::leading(n, lambda));
    let values: Vec<f64> = r_grid.iter().map(|&r| form.eval(r * r)).collect();
    let noise = 16.0 * f64::EPSILON;
    let mut best: Option<(f64, f64, f64)> = None;
    let (mut peak, mut peak_r) = (values[0], r_grid[0]);
    for (&v, &r) in values.iter().zip(r_grid).skip(1) {
        let drop = peak - v;
        if drop > noise && best.is_none_or(|(d, _, _)| drop > d) {
            best = Some((drop, peak_r, r));
        }
        if v > peak {
            peak = v;
            peak_r = r;
        }
    }
    Ok(best.map(|(_, r1, r2)| (r1, r2)))
}

/// Radial non-increasing step weight `w(ρ) = Σ_i a_i·[ρ ≤ r_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepWeight {
    radii: Vec<f64>,
    increments: Vec<f64>,
}

impl StepWeight {
    pub fn new(radii: Vec<f64>, increments: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.len() != increments.len() {
            return Err(Error::InvalidArgument(
                "step weight needs matching, non-empty radii and increments".into(),
            ));
        }
        check_grid(&radii)?;
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "step radii must be strictly increasing".into(),
            ));
        }
        if increments.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(Error::InvalidArgument(
                "step increments must be positive".into(),
            ));
        }
        Ok(StepWeight { radii, increments })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Value of the weight at phase-space radius `rho`.
    pub fn at(&self, rho: f64) -> f64 {
        self.radii
            .iter()
            .zip(&self.increments)
            .filter(|(&r, _)| rho <= r)
            .map(|(_, a)| a)
            .sum()
    }
}

/// `∫ w·W_ψ` for a step weight, as `Σ_i a_i ∫_{B^{2n}(r_i)} W_ψ`.
pub fn weighted_energy(psi: &HermiteSuperposition, weight: &StepWeight) -> Result<f64> {
    weight
        .radii
        .iter()
        .zip(&weight.increments)
        .map(|(&r, &a)| Ok(a * energy_of_state(psi, &BallSpec::new(psi.dim(), r)?)?))
        .sum()
}

/// Ball integral of one basis state sampled on a radius grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationCurve {
    pub mu: MultiIndex,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub form: CumulativeForm,
}

pub fn localization_curve(mu: &MultiIndex, radii: &[f64]) -> Result<LocalizationCurve> {
    if let Some(&r) = radii.iter().find(|&&r| !(r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid radius {r}")));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "radius grid must be strictly increasing".into(),
        ));
    }
    let form = diagonal_form(mu);
    let values = radii
        .iter()
        .map(|&r| if r == 0.0 { 0.0 } else { form.eval(r * r) })
        .collect();
    Ok(LocalizationCurve {
        mu: mu.clone(),
        radii: radii.to_vec(),
        values,
        form,
    })
}
