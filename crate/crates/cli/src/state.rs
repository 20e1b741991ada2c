use num_complex::Complex64;
use wigner_ball::wigner::HermiteSuperposition;
use wigner_ball::MultiIndex;

use crate::UsageError;

/// Deviation of `‖c‖` from 1 above which loading warns.
pub const NORM_WARNING_THRESHOLD: f64 = 1e-6;

pub struct LoadedState {
    pub state: HermiteSuperposition,
    /// Present when the file was not normalized to within the threshold.
    pub warning: Option<String>,
}

/// Parses lines `mu_1 … mu_n re im`; `#` starts a comment.
pub fn parse_state(text: &str) -> Result<LoadedState, UsageError> {
    let mut terms = Vec::new();
    let mut n = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err =
            |what: &str| UsageError(format!("state file line {}: {what}: {raw:?}", lineno + 1));
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(err("expected at least one index followed by re and im"));
        }
        let (idx, coeff) = tokens.split_at(tokens.len() - 2);
        let mu: Vec<u32> = idx
            .iter()
            .map(|t| t.parse::<u32>())
            .collect::<Result<_, _>>()
            .map_err(|_| err("indices must be non-negative integers"))?;
        let re: f64 = coeff[0]
            .parse()
            .map_err(|_| err("real part is not a number"))?;
        let im: f64 = coeff[1]
            .parse()
            .map_err(|_| err("imaginary part is not a number"))?;
        match n {
            None => n = Some(mu.len()),
            Some(k) if k != mu.len() => {
                return Err(err(&format!("expected {k} indices like the first term")))
            }
            _ => {}
        }
        terms.push((
            MultiIndex::new(mu).map_err(|e| err(&e.to_string()))?,
            Complex64::new(re, im),
        ));
    }
    if terms.is_empty() {
        return Err(UsageError("state file contains no terms".into()));
    }
    let (state, norm_sq) = HermiteSuperposition::normalized(terms)
        .map_err(|e| UsageError(format!("invalid state: {e}")))?;
    let norm = norm_sq.sqrt();
    let warning = ((norm - 1.0).abs() > NORM_WARNING_THRESHOLD)
        .then(|| format!("warning: state norm was {norm}, coefficients rescaled to unit norm"));
    Ok(LoadedState { state, warning })
}
