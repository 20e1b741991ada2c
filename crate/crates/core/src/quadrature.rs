use gauss_quad::GaussLegendre;
use num_complex::Complex64;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendreRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendreRule {
    /// Panics if `degree < 2`.
    pub fn new(degree: usize) -> Self {
        let rule = GaussLegendre::new(degree).expect("Gauss–Legendre degree must be at least 2");
        let (nodes, weights) = rule.iter().map(|(x, w)| (*x, *w)).unzip();
        GaussLegendreRule { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// `∫_{u ≥ 0, Σu_j ≤ total} Π_j g(j, u_j) du` by nested Gauss–Legendre rules,
/// one level per factor.
pub fn simplex_product<G>(levels: usize, total: f64, rule: &GaussLegendreRule, g: &G) -> Complex64
where
    G: Fn(usize, f64) -> Complex64,
{
    fn go<G: Fn(usize, f64) -> Complex64>(
        level: usize,
        levels: usize,
        remaining: f64,
        rule: &GaussLegendreRule,
        g: &G,
    ) -> Complex64 {
        if level == levels {
            return Complex64::new(1.0, 0.0);
        }
        if remaining <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        rule.mapped(0.0, remaining)
            .map(|(u, w)| {
                let inner = go(level + 1, levels, remaining - u, rule, g);
                g(level, u) * inner * w
            })
            .sum()
    }
    go(0, levels, total, rule, g)
}

/// Periodic trapezoid rule for `∫₀^{2π} f(φ) dφ`.
pub fn periodic_trapezoid<F: FnMut(f64) -> Complex64>(nodes: usize, mut f: F) -> Complex64 {
    let step = std::f64::consts::TAU / nodes as f64;
    let sum: Complex64 = (0..nodes).map(|i| f(step * i as f64)).sum();
    sum * step
}
