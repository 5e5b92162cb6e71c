use statrs::function::gamma::ln_gamma;

use super::pair_count;
use crate::error::{Error, Result};

/// Combinatorial entropy of G(n, k): `ln[ C(C(n,2), k) / n! ]`.
///
/// Evaluated with log-gamma throughout. The two lower factorials are
/// combined in a fixed (min, max) order so that `k` and `C(n,2) - k` give
/// bitwise identical results.
pub fn gibbs_entropy(n: usize, k: usize) -> Result<f64> {
    let m = pair_count(n);
    if k > m {
        return Err(Error::EdgeCountOutOfRange { k, max: m });
    }
    let lo = k.min(m - k) as f64;
    let hi = k.max(m - k) as f64;
    let ln_binom = ln_gamma(m as f64 + 1.0) - ln_gamma(lo + 1.0) - ln_gamma(hi + 1.0);
    Ok(ln_binom - ln_gamma(n as f64 + 1.0))
}
