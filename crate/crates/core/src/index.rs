use std::fmt;

use crate::error::{Error, Result};

/// Excitation numbers of an `n`-mode Hermite basis state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument(
                "multi-index needs at least one mode".into(),
            ));
        }
        Ok(MultiIndex(entries))
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n.max(1)])
    }

    /// `(lambda, 0, ..., 0)` in `n` modes.
    pub fn leading(n: usize, lambda: u32) -> Self {
        let mut v = vec![0; n.max(1)];
        v[0] = lambda;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub(crate) fn with(&self, j: usize, value: u32) -> Self {
        let mut v = self.0.clone();
        v[j] = value;
        MultiIndex(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&m| m == 0)
    }

    /// Dash-joined form used in CSV output, e.g. `2-0-1`.
    pub fn dashed(&self) -> String {
        self.0
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join("-")
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.dim(),
            });
        }
        Ok(())
    }

    /// All multi-indices of `n` modes with total degree `lambda`, in
    /// lexicographic order.
    pub fn with_degree(n: usize, lambda: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut current = vec![0u32; n];
        fill(&mut current, 0, lambda, &mut out);
        out
    }

    /// All multi-indices of `n` modes with total degree at most `lambda_max`,
    /// ordered by degree and then lexicographically.
    pub fn up_to_degree(n: usize, lambda_max: u32) -> Vec<MultiIndex> {
        (0..=lambda_max)
            .flat_map(|l| MultiIndex::with_degree(n, l))
            .collect()
    }
}

fn fill(current: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if pos + 1 == n {
        current[pos] = remaining;
        out.push(MultiIndex(current.clone()));
        return;
    }
    for k in (0..=remaining).rev() {
        current[pos] = k;
        fill(current, pos + 1, remaining - k, out);
    }
    current[pos] = 0;
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, ")")
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(v: &[u32]) -> Self {
        assert!(!v.is_empty(), "multi-index needs at least one mode");
        MultiIndex(v.to_vec())
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        assert!(N > 0, "multi-index needs at least one mode");
        MultiIndex(v.to_vec())
    }
}
