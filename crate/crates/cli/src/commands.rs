use std::fmt::Write as _;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wigner_ball::localization::{
    ball_integral_diagonal, diagonal_form, energy_of_state, localization_curve,
    nonmonotonicity_witness, theorem1_form, verify_optimality, BallSpec, OffDiagonalSweep,
    DEFAULT_ANGULAR_NODES, DEFAULT_RADIAL_NODES,
};
use wigner_ball::oracle::{mc_ball_integral, simplex_quad_integral, QuadratureSpec, DEFAULT_SEED};
use wigner_ball::rotation::{
    maximizer_chain, rotation_coefficients, verify_rotation_invariance, PlaneRotation, QSqrt2,
    INVARIANCE_TOLERANCE,
};
use wigner_ball::special::regularized_upper_gamma;
use wigner_ball::MultiIndex;

use crate::config::{Command, Format, RunConfig};
use crate::state::parse_state;
use crate::UsageError;

pub const LEMMA1_TOLERANCE: f64 = 1e-10;
pub const THEOREM1_TOLERANCE: f64 = 1e-12;
pub const SIMPLEX_TOLERANCE: f64 = 1e-10;
pub const MC_SIGMAS: f64 = 3.0;
const RANDOM_CHAINS: usize = 50;
const ORACLE_CASES: usize = 20;

/// Text to emit and whether every verification passed.
pub struct Output {
    pub text: String,
    pub passed: bool,
    pub warnings: Vec<String>,
}

impl Output {
    fn data(text: String) -> Self {
        Output {
            text,
            passed: true,
            warnings: Vec::new(),
        }
    }
}

/// Shortest representation that reads back to the same `f64`
/// (at most 17 significant digits).
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn verdict(out: &mut String, passed: bool, summary: &str) {
    let _ = writeln!(out, "{}: {summary}", if passed { "PASS" } else { "FAIL" });
}

pub fn run(cfg: &RunConfig) -> Result<Output> {
    match cfg.command {
        Command::Curve => curve(cfg),
        Command::Energy => energy(cfg),
        Command::VerifyLemma1 => verify_lemma1(cfg),
        Command::VerifyLemma2 => verify_lemma2(cfg),
        Command::VerifyTheorem1 => verify_theorem1(cfg),
        Command::Nonmonotone => nonmonotone(cfg),
        Command::RotationChain => rotation_chain(cfg),
        Command::OracleCheck => oracle_check(cfg),
    }
}

fn sorted_indices(n: usize, lambda_max: u32) -> Vec<MultiIndex> {
    let mut all = MultiIndex::up_to_degree(n, lambda_max);
    all.sort_by(|a, b| a.entries().cmp(b.entries()));
    all
}

fn curve(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid();
    let mut out = String::new();
    match cfg.format {
        Format::Csv => out.push_str("mu;r;value\n"),
        Format::Text => {
            let _ = writeln!(out, "{:<16} {:<22} {}", "mu", "r", "value");
        }
    }
    for mu in sorted_indices(cfg.n, cfg.lambda_max) {
        let c = localization_curve(&mu, &grid)?;
        for (r, v) in c.radii.iter().zip(&c.values) {
            match cfg.format {
                Format::Csv => {
                    let _ = writeln!(out, "{};{};{}", mu.dashed(), fmt_num(*r), fmt_num(*v));
                }
                Format::Text => {
                    let _ = writeln!(
                        out,
                        "{:<16} {:<22} {}",
                        mu.to_string(),
                        fmt_num(*r),
                        fmt_num(*v)
                    );
                }
            }
        }
    }
    Ok(Output::data(out))
}

fn energy(cfg: &RunConfig) -> Result<Output> {
    let path = cfg.state_path.as_ref().expect("validated");
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read state file {}: {e}", path.display())))?;
    let loaded = parse_state(&text)?;
    let n = loaded.state.dim();
    if cfg.n_explicit && cfg.n != n {
        return Err(
            UsageError(format!("--n is {} but the state file has {n} modes", cfg.n)).into(),
        );
    }
    let mut out = String::new();
    match cfg.format {
        Format::Csv => out.push_str("r;energy\n"),
        Format::Text => {
            let _ = writeln!(out, "{:<22} {}", "r", "energy");
        }
    }
    for r in cfg.grid() {
        let e = energy_of_state(&loaded.state, &BallSpec::new(n, r)?)?;
        match cfg.format {
            Format::Csv => {
                let _ = writeln!(out, "{};{}", fmt_num(r), fmt_num(e));
            }
            Format::Text => {
                let _ = writeln!(out, "{:<22} {}", fmt_num(r), fmt_num(e));
            }
        }
    }
    let mut o = Output::data(out);
    o.warnings.extend(loaded.warning);
    Ok(o)
}

fn verify_lemma1(cfg: &RunConfig) -> Result<Output> {
    let indices = sorted_indices(cfg.n, cfg.lambda_max);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "off-diagonal ball integrals, n={}, |μ|,|ν| ≤ {}, {} radii, quadrature {}×{} nodes",
        cfg.n,
        cfg.lambda_max,
        cfg.positive_grid().len(),
        DEFAULT_ANGULAR_NODES,
        DEFAULT_RADIAL_NODES
    );
    let _ = writeln!(out, "tolerance: {LEMMA1_TOLERANCE:e}");
    let mut worst = (0.0f64, None);
    let mut checked = 0usize;
    let mut failures = 0usize;
    for r in cfg.positive_grid() {
        let sweep = OffDiagonalSweep::new(
            BallSpec::new(cfg.n, r)?,
            cfg.lambda_max,
            DEFAULT_ANGULAR_NODES,
            DEFAULT_RADIAL_NODES,
        )?;
        for mu in &indices {
            for nu in indices.iter().filter(|nu| *nu != mu) {
                let v = sweep.integral(mu, nu)?.norm();
                checked += 1;
                if v > LEMMA1_TOLERANCE {
                    failures += 1;
                    if failures <= 10 {
                        let _ =
                            writeln!(out, "violation: μ={mu} ν={nu} r={} |I|={v:e}", fmt_num(r));
                    }
                }
                if v >= worst.0 {
                    worst = (v, Some((mu.clone(), nu.clone(), r)));
                }
            }
        }
    }
    let _ = write!(out, "worst residual: {:e}", worst.0);
    if let Some((mu, nu, r)) = &worst.1 {
        let _ = write!(out, " at μ={mu} ν={nu} r={}", fmt_num(*r));
    }
    out.push('\n');
    let passed = failures == 0;
    verdict(
        &mut out,
        passed,
        &format!("{checked} off-diagonal integrals, {failures} above tolerance"),
    );
    Ok(Output {
        text: out,
        passed,
        warnings: Vec::new(),
    })
}

fn verify_lemma2(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "closed forms within each eigenvalue class, n={}, λ ≤ {}",
        cfg.n, cfg.lambda_max
    );
    let _ = writeln!(out, "tolerance: 0 (exact rational equality)");
    let mut worst = 0.0f64;
    let mut broken = Vec::new();
    for lambda in 0..=cfg.lambda_max {
        let class = MultiIndex::with_degree(cfg.n, lambda);
        let reference = diagonal_form(&class[0]);
        for mu in &class[1..] {
            let form = diagonal_form(mu);
            if form != reference {
                broken.push(format!("λ={lambda}: {} vs {}", class[0], mu));
            }
            for &r in &grid {
                worst = worst.max((form.eval(r * r) - reference.eval(r * r)).abs());
            }
        }
    }
    let _ = writeln!(
        out,
        "worst residual: {worst:e} (floating point, over the radius grid)"
    );
    for b in &broken {
        let _ = writeln!(out, "mismatch: {b}");
    }
    let passed = broken.is_empty();
    let classes = cfg.lambda_max + 1;
    if passed {
        verdict(
            &mut out,
            true,
            &format!("{classes} eigenvalue classes, exact identity"),
        );
    } else {
        verdict(
            &mut out,
            false,
            &format!(
                "{} mismatching indices in {classes} eigenvalue classes",
                broken.len()
            ),
        );
    }
    Ok(Output {
        text: out,
        passed,
        warnings: Vec::new(),
    })
}

fn verify_theorem1(cfg: &RunConfig) -> Result<Output> {
    let n = cfg.n;
    let mut out = String::new();
    let zero = MultiIndex::zero(n);
    let exact = diagonal_form(&zero) == theorem1_form(n);
    let _ = writeln!(out, "ground state vs 1 − Γ(n, r²)/(n−1)!, n={n}");
    let _ = writeln!(
        out,
        "exact closed form identity: {}",
        if exact { "yes" } else { "no" }
    );
    let _ = writeln!(
        out,
        "tolerance: {THEOREM1_TOLERANCE:e} (floating point), gap > 0 (optimality)"
    );
    let mut worst = 0.0f64;
    for r in cfg.grid() {
        let v = ball_integral_diagonal(&zero, &BallSpec::new(n, r)?)?.value;
        let g = 1.0 - regularized_upper_gamma(n as u32, r * r)?;
        worst = worst.max((v - g).abs());
    }
    let _ = writeln!(out, "worst residual: {worst:e}");
    let grid = cfg.positive_grid();
    let report = verify_optimality(cfg.lambda_max, n, &grid)?;
    let _ = write!(out, "smallest gap: {:e}", report.min_gap);
    if let Some((mu, r)) = &report.min_gap_at {
        let _ = write!(out, " at μ={mu} r={}", fmt_num(*r));
    }
    out.push('\n');
    for v in report.violations.iter().take(10) {
        let _ = writeln!(
            out,
            "violation: μ={} r={} gap={:e}",
            v.mu,
            fmt_num(v.r),
            v.gap
        );
    }
    let passed = exact && worst <= THEOREM1_TOLERANCE && report.passed();
    verdict(
        &mut out,
        passed,
        &format!(
            "{} strict comparisons for 1 ≤ |μ| ≤ {}, {} violations",
            report.checked,
            cfg.lambda_max,
            report.violations.len()
        ),
    );
    Ok(Output {
        text: out,
        passed,
        warnings: Vec::new(),
    })
}

fn nonmonotone(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.positive_grid();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "non-monotone ball integrals of H_(λ,0,…), n={}, {} radii",
        cfg.n,
        grid.len()
    );
    let _ = writeln!(out, "tolerance: drops above 16 ulp count");
    let mut found = 0;
    let mut largest = 0.0f64;
    for lambda in 1..=cfg.lambda_max {
        let form = diagonal_form(&MultiIndex::leading(cfg.n, lambda));
        match nonmonotonicity_witness(lambda, cfg.n, &grid)? {
            Some((r1, r2)) => {
                let (v1, v2) = (form.eval(r1 * r1), form.eval(r2 * r2));
                largest = largest.max(v1 - v2);
                found += 1;
                let _ = writeln!(
                    out,
                    "λ={lambda}: I({}) = {} > I({}) = {}",
                    fmt_num(r1),
                    fmt_num(v1),
                    fmt_num(r2),
                    fmt_num(v2)
                );
            }
            None => {
                let _ = writeln!(out, "λ={lambda}: monotone on this grid");
            }
        }
    }
    let _ = writeln!(out, "worst residual: largest drop {largest:e}");
    let passed = found > 0;
    verdict(
        &mut out,
        passed,
        &format!("witnesses for {found} of {} degrees", cfg.lambda_max),
    );
    Ok(Output {
        text: out,
        passed,
        warnings: Vec::new(),
    })
}

fn random_index(rng: &mut ChaCha8Rng, n: usize, lambda: u32) -> MultiIndex {
    let class = MultiIndex::with_degree(n, lambda);
    class[rng.random_range(0..class.len())].clone()
}

fn rotation_chain(cfg: &RunConfig) -> Result<Output> {
    let n = cfg.n;
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "rotations at π/4, n={n}, |μ| ≤ {}, seed {seed}",
        cfg.lambda_max
    );
    let _ = writeln!(
        out,
        "tolerance: unitarity exact, invariance {INVARIANCE_TOLERANCE:e}"
    );
    let indices = sorted_indices(n, cfg.lambda_max);
    let planes: Vec<PlaneRotation> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| PlaneRotation::quarter(a, b).expect("a < b")))
        .collect();
    let one = QSqrt2::one();
    let mut unitarity_failures = 0;
    for mu in &indices {
        for rot in &planes {
            if rotation_coefficients::<QSqrt2>(mu, rot)?.weight_sum() != one {
                unitarity_failures += 1;
                let _ = writeln!(out, "unitarity violated: μ={mu}, {rot}");
            }
        }
    }
    let mut worst = 0.0f64;
    let mut invariance_failures = 0;
    for r in cfg.positive_grid() {
        let ball = BallSpec::new(n, r)?;
        for mu in &indices {
            for rot in &planes {
                let report = verify_rotation_invariance(mu, rot, &ball)?;
                worst = worst.max(report.residual).max(report.unitarity_residual);
                if !report.passed() {
                    invariance_failures += 1;
                    let _ = writeln!(out, "invariance violated: μ={mu}, {rot}, r={}", fmt_num(r));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chain_failures = 0;
    let mut steps_total = 0;
    let mut smallest = f64::INFINITY;
    for _ in 0..RANDOM_CHAINS {
        let lambda = rng.random_range(0..=cfg.lambda_max);
        let start = random_index(&mut rng, n, lambda);
        let target = random_index(&mut rng, n, lambda);
        match maximizer_chain(&start, &target) {
            Ok(steps) => {
                steps_total += steps.len();
                for s in &steps {
                    smallest = smallest.min(s.coefficient.abs());
                }
            }
            Err(e) => {
                chain_failures += 1;
                let _ = writeln!(out, "chain {start} → {target} failed: {e}");
            }
        }
    }
    let _ = writeln!(out, "worst residual: {worst:e}");
    if smallest.is_finite() {
        let _ = writeln!(out, "smallest chain coefficient: {}", fmt_num(smallest));
    }
    let passed = unitarity_failures == 0 && invariance_failures == 0 && chain_failures == 0;
    verdict(
        &mut out,
        passed,
        &format!(
            "{} unitarity checks, {RANDOM_CHAINS} chains with {steps_total} rotations, {} failures",
            indices.len() * planes.len(),
            unitarity_failures + invariance_failures + chain_failures
        ),
    );
    Ok(Output {
        text: out,
        passed,
        warnings: Vec::new(),
    })
}

fn oracle_check(cfg: &RunConfig) -> Result<Output> {
    let n = cfg.n;
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let mut spec = QuadratureSpec::default().with_seed(seed);
    if let Some(s) = cfg.mc_samples {
        spec = spec.with_samples(s);
    }
    spec.validate().map_err(|e| UsageError(e.to_string()))?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "exact vs simplex quadrature vs Monte Carlo, n={n}, |μ| ≤ {}, {} samples, seed {seed}",
        cfg.lambda_max, spec.mc_samples
    );
    let _ = writeln!(
        out,
        "tolerance: quadrature {SIMPLEX_TOLERANCE:e}, Monte Carlo {MC_SIGMAS} standard errors"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst_quad, mut worst_sigma) = (0.0f64, 0.0f64);
    let mut failures = 0;
    let lo = cfg.r_min.max(cfg.r_max * 1e-3);
    for _ in 0..ORACLE_CASES {
        let lambda = rng.random_range(0..=cfg.lambda_max);
        let mu = random_index(&mut rng, n, lambda);
        let r = rng.random_range(lo..=cfg.r_max);
        let ball = BallSpec::new(n, r)?;
        let exact = ball_integral_diagonal(&mu, &ball)?.value;
        let quad = simplex_quad_integral(&mu, &ball, &spec)?;
        let (mc, se) = mc_ball_integral(&mu, &mu, &ball, &spec)?;
        let dq = (exact - quad).abs();
        let sigma = if se > 0.0 {
            (exact - mc).abs() / se
        } else {
            0.0
        };
        worst_quad = worst_quad.max(dq);
        worst_sigma = worst_sigma.max(sigma);
        let ok = dq <= SIMPLEX_TOLERANCE && sigma <= MC_SIGMAS;
        if !ok {
            failures += 1;
        }
        let _ = writeln!(
            out,
            "{} μ={mu} r={:.6} exact={exact:.12} quad Δ={dq:.1e} mc={mc:.6}±{se:.1e} ({sigma:.2}σ)",
            if ok { "ok  " } else { "FAIL" },
            r
        );
    }
    let _ = writeln!(
        out,
        "worst residual: quadrature {worst_quad:e}, Monte Carlo {worst_sigma:.3}σ"
    );
    let passed = failures == 0;
    verdict(
        &mut out,
        passed,
        &format!("{ORACLE_CASES} cases, {failures} disagreements"),
    );
    Ok(Output {
        text: out,
        passed,
        warnings: Vec::new(),
    })
}
