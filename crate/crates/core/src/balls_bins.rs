//! The minimum product `m(a_1, ..., a_n; N)` over distributions of `N` balls
//! into bins of capacities `a_i`, each bin holding at least one ball.

use crate::error::{guard, Error, Result};
use num_bigint::BigUint;
use num_traits::One;

/// Bin capacities, kept sorted descending with the permutation back to the caller's order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinProfile {
    caps: Vec<u64>,
    /// `order[k]` is the caller's index of the `k`-th largest cap.
    order: Vec<usize>,
}

impl BinProfile {
    pub fn new(caps: &[u64]) -> Result<Self> {
        if caps.is_empty() {
            return Err(Error::Invalid("at least one bin is required".into()));
        }
        if caps.contains(&0) {
            return Err(Error::Invalid("bin capacities must be positive".into()));
        }
        let mut order: Vec<usize> = (0..caps.len()).collect();
        // Stable, so equal caps keep the caller's relative order.
        order.sort_by(|&i, &j| caps[j].cmp(&caps[i]));
        Ok(BinProfile {
            caps: order.iter().map(|&i| caps[i]).collect(),
            order,
        })
    }

    /// Equal capacities `a` in `n` bins.
    pub fn uniform(a: u64, n: usize) -> Result<Self> {
        Self::new(&vec![a; n])
    }

    pub fn len(&self) -> usize {
        self.caps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.caps.is_empty()
    }

    /// Capacities in descending order.
    pub fn sorted_caps(&self) -> &[u64] {
        &self.caps
    }

    pub fn total(&self) -> u64 {
        self.caps.iter().sum()
    }

    pub fn product(&self) -> BigUint {
        self.caps.iter().map(|&a| BigUint::from(a)).product()
    }

    fn uniform_cap(&self) -> Option<u64> {
        let a = self.caps[0];
        self.caps.iter().all(|&c| c == a).then_some(a)
    }
}

/// Ball counts `y_i` with `1 <= y_i <= a_i` and `sum y_i = N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    /// Counts in the caller's original bin order.
    pub counts: Vec<u64>,
    pub target: u64,
}

impl Distribution {
    pub fn product(&self) -> BigUint {
        self.counts.iter().map(|&y| BigUint::from(y)).product()
    }
}

/// One ball per bin, then fill bins to capacity from the largest down.
pub fn greedy_distribution(profile: &BinProfile, n_balls: i64) -> Result<Distribution> {
    let n = profile.len() as i64;
    let total = profile.total() as i64;
    if n_balls < n || n_balls > total {
        return Err(Error::NoDistribution {
            n: n_balls,
            lo: n,
            hi: total,
        });
    }
    let mut spare = (n_balls - n) as u64;
    let mut sorted = vec![1u64; profile.len()];
    for (y, &a) in sorted.iter_mut().zip(&profile.caps) {
        let extra = spare.min(a - 1);
        *y += extra;
        spare -= extra;
    }
    let mut counts = vec![0; profile.len()];
    for (k, &orig) in profile.order.iter().enumerate() {
        counts[orig] = sorted[k];
    }
    Ok(Distribution {
        counts,
        target: n_balls as u64,
    })
}

/// `(R + 1) a^k` with `N - n = k (a - 1) + R`, `0 <= R < a - 1`, valid for `n <= N <= a n`.
pub fn closed_form_equal_caps(a: u64, n: usize, n_balls: i64) -> Result<BigUint> {
    if a < 2 {
        return Err(Error::OutOfRange {
            what: "uniform capacity",
            detail: format!("a = {a}, need a >= 2"),
        });
    }
    let n_i = n as i64;
    if n_balls < n_i || n_balls > a as i64 * n_i {
        return Err(Error::NoDistribution {
            n: n_balls,
            lo: n_i,
            hi: a as i64 * n_i,
        });
    }
    let excess = (n_balls - n_i) as u64;
    let (k, r) = (excess / (a - 1), excess % (a - 1));
    Ok(BigUint::from(r + 1) * BigUint::from(a).pow(k as u32))
}

/// `m(a; N)` together with whether the equal-capacity closed form produced it.
pub fn min_product_detailed(profile: &BinProfile, n_balls: i64) -> (BigUint, bool) {
    let n = profile.len() as i64;
    if n_balls < n {
        return (BigUint::one(), false);
    }
    if n_balls > profile.total() as i64 {
        return (profile.product(), false);
    }
    if let Some(a) = profile.uniform_cap().filter(|&a| a >= 2) {
        let m = closed_form_equal_caps(a, profile.len(), n_balls).expect("range checked above");
        return (m, true);
    }
    let d = greedy_distribution(profile, n_balls).expect("range checked above");
    (d.product(), false)
}

/// Total function: 1 below `n`, `prod a_i` above `sum a_i`, greedy product between.
pub fn min_product(profile: &BinProfile, n_balls: i64) -> BigUint {
    min_product_detailed(profile, n_balls).0
}

/// Exhaustive minimum over all distributions; a test oracle for [`min_product`].
pub fn brute_force_min_product(profile: &BinProfile, n_balls: i64) -> Result<BigUint> {
    if profile.len() > 8 {
        return Err(guard("bins", profile.len(), 8));
    }
    if profile.total() > 40 {
        return Err(guard("total capacity", profile.total(), 40));
    }
    let n = profile.len() as i64;
    if n_balls < n {
        return Ok(BigUint::one());
    }
    if n_balls > profile.total() as i64 {
        return Ok(profile.product());
    }
    fn search(caps: &[u64], left: u64, acc: u64, best: &mut u64) {
        match caps.split_first() {
            None => {
                if left == 0 {
                    *best = (*best).min(acc);
                }
            }
            Some((&a, rest)) => {
                let rest_min = rest.len() as u64;
                let rest_max: u64 = rest.iter().sum();
                for y in 1..=a {
                    if y + rest_min > left {
                        break;
                    }
                    if y + rest_max < left {
                        continue;
                    }
                    search(rest, left - y, acc * y, best);
                }
            }
        }
    }
    let mut best = u64::MAX;
    search(&profile.caps, n_balls as u64, 1, &mut best);
    Ok(BigUint::from(best))
}
