//! Independent numerical checks of the exact pipeline: nested Gauss–Legendre
//! integration over the radial simplex and Monte Carlo over the ball.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::localization::{BallSpec, DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES};
use crate::quadrature::{simplex_product, GaussLegendreRule};
use crate::special::laguerre_eval;
use crate::wigner::pair_unchecked;

pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x5EED;
pub const MIN_NODES: usize = 8;
pub const MIN_MC_SAMPLES: u64 = 10_000;
/// Number of independent random streams. Fixed so results do not depend on
/// the size of the thread pool.
const SHARDS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub mc_samples: u64,
    pub rng_seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: DEFAULT_RADIAL_NODES,
            angular_nodes: DEFAULT_ANGULAR_NODES,
            mc_samples: DEFAULT_MC_SAMPLES,
            rng_seed: DEFAULT_SEED,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < MIN_NODES || self.angular_nodes < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "node counts must be at least {MIN_NODES}, got radial {} angular {}",
                self.radial_nodes, self.angular_nodes
            )));
        }
        if self.mc_samples < MIN_MC_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "at least {MIN_MC_SAMPLES} Monte Carlo samples required, got {}",
                self.mc_samples
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        QuadratureSpec { rng_seed, ..self }
    }

    pub fn with_samples(self, mc_samples: u64) -> Self {
        QuadratureSpec { mc_samples, ..self }
    }
}

/// Monte Carlo estimate of a complex integral, with per-component standard errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: Complex64,
    pub std_error: Complex64,
}

impl McEstimate {
    /// Largest deviation from `target` in units of the standard error,
    /// taken over real and imaginary parts.
    pub fn sigmas_from(&self, target: Complex64) -> f64 {
        let z = |d: f64, se: f64| {
            if se > 0.0 {
                d.abs() / se
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        let d = self.estimate - target;
        z(d.re, self.std_error.re).max(z(d.im, self.std_error.im))
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: Complex64,
    sum_sq_re: f64,
    sum_sq_im: f64,
}

fn sample_shard(
    mu: &[u32],
    nu: &[u32],
    n: usize,
    r: f64,
    seed: u64,
    shard: u64,
    samples: u64,
) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard);
    let mut dir = vec![0.0; 2 * n];
    let mut m = Moments::default();
    for _ in 0..samples {
        let norm = loop {
            for d in dir.iter_mut() {
                *d = rng.sample(StandardNormal);
            }
            let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
            if norm > 0.0 {
                break norm;
            }
        };
        let u: f64 = rng.random();
        let scale = r * u.powf(1.0 / (2 * n) as f64) / norm;
        for d in dir.iter_mut() {
            *d *= scale;
        }
        let w = pair_unchecked(mu, nu, &dir[..n], &dir[n..]);
        m.sum += w;
        m.sum_sq_re += w.re * w.re;
        m.sum_sq_im += w.im * w.im;
    }
    m
}

/// Monte Carlo estimate of `∫_{B(r)} W(H_μ, H_ν)` with complex value.
pub fn mc_ball_integral_complex(
    mu: &MultiIndex,
    nu: &MultiIndex,
    ball: &BallSpec,
    spec: &QuadratureSpec,
) -> Result<McEstimate> {
    mu.check_dim(ball.n)?;
    nu.check_dim(ball.n)?;
    spec.validate()?;
    if ball.r == 0.0 {
        return Ok(McEstimate {
            estimate: Complex64::new(0.0, 0.0),
            std_error: Complex64::new(0.0, 0.0),
        });
    }
    let total = spec.mc_samples;
    let shards: Vec<Moments> = (0..SHARDS)
        .into_par_iter()
        .map(|s| {
            let count = total / SHARDS + u64::from(s < total % SHARDS);
            sample_shard(
                mu.entries(),
                nu.entries(),
                ball.n,
                ball.r,
                spec.rng_seed,
                s,
                count,
            )
        })
        .collect();
    let m = shards.iter().fold(Moments::default(), |acc, s| Moments {
        sum: acc.sum + s.sum,
        sum_sq_re: acc.sum_sq_re + s.sum_sq_re,
        sum_sq_im: acc.sum_sq_im + s.sum_sq_im,
    });
    let count = total as f64;
    let mean = m.sum / count;
    let var = |sq: f64, mean: f64| ((sq / count - mean * mean) * count / (count - 1.0)).max(0.0);
    let vol = ball.volume();
    Ok(McEstimate {
        estimate: mean * vol,
        std_error: Complex64::new(
            vol * (var(m.sum_sq_re, mean.re) / count).sqrt(),
            vol * (var(m.sum_sq_im, mean.im) / count).sqrt(),
        ),
    })
}

/// Real part of [`mc_ball_integral_complex`] as `(estimate, std_error)`.
pub fn mc_ball_integral(
    mu: &MultiIndex,
    nu: &MultiIndex,
    ball: &BallSpec,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let e = mc_ball_integral_complex(mu, nu, ball, spec)?;
    Ok((e.estimate.re, e.std_error.re))
}

/// `∫_{Σu_j ≤ r²} Π_j (−1)^{μ_j} L_{μ_j}(2u_j) e^{−u_j} du` by nested
/// Gauss–Legendre rules with `spec.radial_nodes` nodes per level.
pub fn simplex_quad_integral(
    mu: &MultiIndex,
    ball: &BallSpec,
    spec: &QuadratureSpec,
) -> Result<f64> {
    mu.check_dim(ball.n)?;
    if spec.radial_nodes < MIN_NODES {
        return Err(Error::InvalidArgument(format!(
            "radial nodes must be at least {MIN_NODES}, got {}",
            spec.radial_nodes
        )));
    }
    for &k in mu.entries() {
        laguerre_eval(k, 0, 0.0)?;
    }
    let rule = GaussLegendreRule::new(spec.radial_nodes);
    let entries = mu.entries();
    let g = |level: usize, u: f64| {
        let k = entries[level];
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let l = laguerre_eval(k, 0, 2.0 * u).expect("index checked above");
        Complex64::new(sign * l * (-u).exp(), 0.0)
    };
    Ok(simplex_product(ball.n, ball.radius_sq(), &rule, &g).re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localization::{ball_integral_diagonal, theorem1_value};

    fn small() -> QuadratureSpec {
        QuadratureSpec::default().with_samples(200_000)
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let mut s = QuadratureSpec::default();
        s.radial_nodes = 4;
        assert!(s.validate().is_err());
        assert!(QuadratureSpec::default()
            .with_samples(100)
            .validate()
            .is_err());
    }

    #[test]
    fn mc_examples() {
        let ball = BallSpec::new(1, 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let (e, se) =
            mc_ball_integral(&MultiIndex::from([0]), &MultiIndex::from([0]), &ball, &spec).unwrap();
        let exact = 1.0 - (-1f64).exp();
        assert!((e - exact).abs() <= 3.0 * se, "{e} ± {se}");
        assert!(se < 1e-3);

        let est =
            mc_ball_integral_complex(&MultiIndex::from([1]), &MultiIndex::from([0]), &ball, &spec)
                .unwrap();
        assert!(est.sigmas_from(Complex64::new(0.0, 0.0)) <= 3.0, "{est:?}");

        let ball = BallSpec::new(2, 0.0).unwrap();
        let (e, se) = mc_ball_integral(
            &MultiIndex::from([0, 0]),
            &MultiIndex::from([0, 0]),
            &ball,
            &spec,
        )
        .unwrap();
        assert_eq!((e, se), (0.0, 0.0));
    }

    #[test]
    fn mc_is_deterministic() {
        let ball = BallSpec::new(2, 1.3).unwrap();
        let mu = MultiIndex::from([1, 0]);
        let nu = MultiIndex::from([0, 2]);
        let a = mc_ball_integral_complex(&mu, &nu, &ball, &small()).unwrap();
        let b = mc_ball_integral_complex(&mu, &nu, &ball, &small()).unwrap();
        assert_eq!(a, b);
        let c = mc_ball_integral_complex(&mu, &nu, &ball, &small().with_seed(1)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn simplex_examples() {
        let spec = QuadratureSpec::default();
        let v = simplex_quad_integral(
            &MultiIndex::from([0]),
            &BallSpec::new(1, 1.0).unwrap(),
            &spec,
        )
        .unwrap();
        assert!((v - (1.0 - (-1f64).exp())).abs() < 1e-12);

        let ball = BallSpec::new(2, 1.5).unwrap();
        let mu = MultiIndex::from([1, 1]);
        let v = simplex_quad_integral(&mu, &ball, &spec).unwrap();
        assert!((v - ball_integral_diagonal(&mu, &ball).unwrap().value).abs() < 1e-10);

        let ball = BallSpec::new(3, 2.0).unwrap();
        let v = simplex_quad_integral(&MultiIndex::zero(3), &ball, &spec).unwrap();
        assert!((v - theorem1_value(&ball)).abs() < 1e-10);
    }

    #[test]
    fn simplex_agrees_with_exact_pipeline() {
        let spec = QuadratureSpec::default();
        for n in 1..=3 {
            for mu in MultiIndex::up_to_degree(n, 6) {
                for r in [0.5, 1.0, 2.0, 3.0] {
                    let ball = BallSpec::new(n, r).unwrap();
                    let q = simplex_quad_integral(&mu, &ball, &spec).unwrap();
                    let e = ball_integral_diagonal(&mu, &ball).unwrap().value;
                    assert!((q - e).abs() < 1e-10, "mu={mu} r={r} q={q} e={e}");
                }
            }
        }
    }

    #[test]
    fn doubling_nodes_converges() {
        let spec = QuadratureSpec::default();
        let doubled = QuadratureSpec {
            radial_nodes: 2 * spec.radial_nodes,
            ..spec
        };
        for (mu, r) in [
            (MultiIndex::from([3, 1]), 2.0),
            (MultiIndex::from([6]), 3.0),
            (MultiIndex::from([1, 1, 2]), 1.5),
        ] {
            let ball = BallSpec::new(mu.dim(), r).unwrap();
            let a = simplex_quad_integral(&mu, &ball, &spec).unwrap();
            let b = simplex_quad_integral(&mu, &ball, &doubled).unwrap();
            assert!((a - b).abs() < 1e-11, "mu={mu}");
        }
    }

    #[test]
    fn three_way_cross_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let spec = small();
        for _ in 0..20 {
            let n = rng.random_range(1..=2usize);
            let lambda = rng.random_range(0..=4u32);
            let class = MultiIndex::with_degree(n, lambda);
            let mu = class[rng.random_range(0..class.len())].clone();
            let r = rng.random_range(0.2..2.5);
            let ball = BallSpec::new(n, r).unwrap();
            let exact = ball_integral_diagonal(&mu, &ball).unwrap().value;
            let quad = simplex_quad_integral(&mu, &ball, &spec).unwrap();
            let (mc, se) = mc_ball_integral(&mu, &mu, &ball, &spec).unwrap();
            assert!((exact - quad).abs() < 1e-10, "mu={mu} r={r}");
            assert!(
                (exact - mc).abs() <= 3.0 * se,
                "mu={mu} r={r} mc={mc}±{se} exact={exact}"
            );
        }
    }
}
