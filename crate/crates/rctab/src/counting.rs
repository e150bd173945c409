//! Exact and asymptotic enumeration of table classes.
//!
//! Exact paths use arbitrary-precision integers throughout; no floating
//! point enters a count. The brute-force enumerator is kept deliberately
//! independent of the memoized counter so each can check the other.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::table::{Margins, Table};

/// Exact cardinality of a table class. Serializes as a decimal string so
/// arbitrary precision survives JSON round-trips.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn one() -> Self {
        BigCount(BigUint::one())
    }

    /// Natural log, accurate to ~1e-15 relative even far beyond f64 range.
    pub fn ln(&self) -> f64 {
        let bits = self.0.bits();
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        if bits <= 53 {
            return self.0.to_f64().expect("fits f64").ln();
        }
        let shift = bits - 53;
        let head = (&self.0 >> shift).to_f64().expect("53-bit head");
        head.ln() + shift as f64 * std::f64::consts::LN_2
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.0.to_f64().filter(|f| f.is_finite())
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for BigCount {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let v = s
            .parse::<BigUint>()
            .map_err(|e| serde::de::Error::custom(format!("bad count {s:?}: {e}")))?;
        Ok(BigCount(v))
    }
}

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigCount {
    if k > n {
        return BigCount::zero();
    }
    BigCount(num_integer::binomial(BigUint::from(n), BigUint::from(k)))
}

// ---------------------------------------------------------------------------
// Brute-force enumeration
// ---------------------------------------------------------------------------

/// All tables with the given margins, in lexicographic order of the
/// row-major entry vector. Aborts with a resource error when more than
/// `cap` tables would be produced.
pub fn enumerate_tables(margins: &Margins, cap: usize) -> Result<Vec<Table>> {
    let (m, n) = (margins.m(), margins.n());
    let mut rem_row = margins.row().to_vec();
    let mut rem_col = margins.col().to_vec();
    let mut entries = vec![0u64; m * n];
    let mut out: Vec<Table> = Vec::new();

    fn rec(
        i: usize,
        j: usize,
        m: usize,
        n: usize,
        entries: &mut Vec<u64>,
        rem_row: &mut Vec<u64>,
        rem_col: &mut Vec<u64>,
        margins: &Margins,
        out: &mut Vec<Table>,
        cap: usize,
    ) -> Result<()> {
        if i == m {
            if out.len() == cap {
                return Err(Error::ResourceCap(format!(
                    "enumeration exceeds {cap} tables"
                )));
            }
            out.push(Table::from_parts(entries.clone(), margins.clone())?);
            return Ok(());
        }
        let (ni, nj) = if j + 1 < n { (i, j + 1) } else { (i + 1, 0) };
        // last column is forced by the row margin, last row by column margins
        let forced_by_row = j == n - 1;
        let forced_by_col = i == m - 1;
        let lo = if forced_by_row {
            rem_row[i]
        } else if forced_by_col {
            rem_col[j]
        } else {
            0
        };
        let hi = rem_row[i].min(rem_col[j]);
        if lo > hi {
            return Ok(());
        }
        for v in lo..=hi {
            if (forced_by_row && v != rem_row[i]) || (forced_by_col && v != rem_col[j]) {
                continue;
            }
            entries[i * n + j] = v;
            rem_row[i] -= v;
            rem_col[j] -= v;
            rec(ni, nj, m, n, entries, rem_row, rem_col, margins, out, cap)?;
            rem_row[i] += v;
            rem_col[j] += v;
            entries[i * n + j] = 0;
        }
        Ok(())
    }

    rec(
        0,
        0,
        m,
        n,
        &mut entries,
        &mut rem_row,
        &mut rem_col,
        margins,
        &mut out,
        cap,
    )?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Memoized exact counting
// ---------------------------------------------------------------------------

/// Exact number of tables with the given margins.
///
/// Column-by-column recursion, memoized on the sorted vector of remaining
/// row margins and the column index. Sorting is valid because the count is
/// invariant under permuting rows, and the columns still ahead are the same
/// for every state at a given index.
pub fn count_exact(margins: &Margins) -> BigCount {
    let cols = margins.col().to_vec();
    let mut rows = margins.row().to_vec();
    rows.sort_unstable();
    let mut memo: HashMap<(Vec<u64>, usize), BigUint> = HashMap::new();
    BigCount(count_rec(&rows, 0, &cols, &mut memo))
}

fn count_rec(
    rows_sorted: &[u64],
    j: usize,
    cols: &[u64],
    memo: &mut HashMap<(Vec<u64>, usize), BigUint>,
) -> BigUint {
    if j == cols.len() {
        return if rows_sorted.iter().all(|&r| r == 0) {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    let key = (rows_sorted.to_vec(), j);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let future: u64 = cols[j + 1..].iter().sum();
    let mut total = BigUint::zero();
    let m = rows_sorted.len();
    let mut assign = vec![0u64; m];

    // ordered compositions of cols[j] over the rows, each part capped by the
    // remaining row margin; rows left with more than the future column mass
    // can never be completed, so prune them here
    fn compose(
        idx: usize,
        left: u64,
        rows: &[u64],
        assign: &mut [u64],
        j: usize,
        cols: &[u64],
        future: u64,
        memo: &mut HashMap<(Vec<u64>, usize), BigUint>,
        total: &mut BigUint,
    ) {
        let m = rows.len();
        if idx == m {
            if left == 0 {
                let mut child: Vec<u64> = rows
                    .iter()
                    .zip(assign.iter())
                    .map(|(r, a)| r - a)
                    .collect();
                if child.iter().any(|&r| r > future) {
                    return;
                }
                child.sort_unstable();
                *total += count_rec(&child, j + 1, cols, memo);
            }
            return;
        }
        // remaining rows cannot absorb `left` -> dead branch
        let capacity: u64 = rows[idx..].iter().sum();
        if capacity < left {
            return;
        }
        let hi = rows[idx].min(left);
        for x in 0..=hi {
            assign[idx] = x;
            compose(idx + 1, left - x, rows, assign, j, cols, future, memo, total);
        }
        assign[idx] = 0;
    }

    compose(
        0,
        cols[j],
        rows_sorted,
        &mut assign,
        j,
        cols,
        future,
        memo,
        &mut total,
    );
    memo.insert(key, total.clone());
    total
}

// ---------------------------------------------------------------------------
// Bounded compositions (two-column classes) via generating functions
// ---------------------------------------------------------------------------

/// Coefficients of `Π_ℓ (1 + q + … + q^{a_ℓ})`.
///
/// Coefficient `r` counts the ways of writing `r` as an ordered sum of
/// parts with part `ℓ` at most `a_ℓ` — equivalently, the number of tables
/// with row margins `a` and column margins `(r, S − r)`. The coefficient
/// sequence is symmetric and unimodal.
#[derive(Clone, Debug)]
pub struct CompositionPolynomial {
    caps: Vec<u64>,
    coeffs: Vec<BigUint>,
}

impl CompositionPolynomial {
    pub fn new(caps: &[u64]) -> Self {
        let mut coeffs = vec![BigUint::one()];
        for &a in caps {
            // multiply by (1 + q + ... + q^a) via prefix sums:
            // new[k] = sum_{i=max(0,k-a)}^{k} old[i]
            let old_deg = coeffs.len() - 1;
            let new_deg = old_deg + a as usize;
            let mut prefix = Vec::with_capacity(coeffs.len() + 1);
            prefix.push(BigUint::zero());
            for c in &coeffs {
                let last = prefix.last().unwrap().clone();
                prefix.push(last + c);
            }
            let mut next = Vec::with_capacity(new_deg + 1);
            for k in 0..=new_deg {
                let hi = k.min(old_deg);
                let lo = k.saturating_sub(a as usize);
                if lo > hi {
                    next.push(BigUint::zero());
                } else {
                    next.push(&prefix[hi + 1] - &prefix[lo]);
                }
            }
            coeffs = next;
        }
        CompositionPolynomial {
            caps: caps.to_vec(),
            coeffs,
        }
    }

    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    /// Total degree S = Σ a_ℓ.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, r: u64) -> BigCount {
        match self.coeffs.get(r as usize) {
            Some(c) => BigCount(c.clone()),
            None => BigCount::zero(),
        }
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coeffs
    }

    /// c_j = c_{S-j} for every j.
    pub fn is_symmetric(&self) -> bool {
        let s = self.degree();
        (0..=s / 2).all(|j| self.coeffs[j] == self.coeffs[s - j])
    }

    /// Non-decreasing up to the middle, non-increasing after.
    pub fn is_unimodal(&self) -> bool {
        let mid = self.degree() / 2;
        self.coeffs.windows(2).enumerate().all(|(j, w)| {
            if j < mid {
                w[0] <= w[1]
            } else {
                w[0] >= w[1]
            }
        })
    }
}

/// Number of ways to write `r` as an ordered sum with part `ℓ` at most
/// `caps[ℓ]`. Returns 0 when `r` exceeds the total cap.
pub fn bounded_compositions(caps: &[u64], r: u64) -> BigCount {
    CompositionPolynomial::new(caps).coefficient(r)
}

// ---------------------------------------------------------------------------
// Margin smoothing and maximality
// ---------------------------------------------------------------------------

/// Replace `b[i]` and `b[j]` by the balanced split of their sum
/// (`⌊s/2⌋` at `i`, `⌈s/2⌉` at `j`). Total is preserved.
pub fn smooth_margin(b: &[u64], i: usize, j: usize) -> Result<Vec<u64>> {
    if i == j {
        return Err(Error::Domain("smoothing positions must differ".into()));
    }
    if i >= b.len() || j >= b.len() {
        return Err(Error::IndexOutOfRange(format!(
            "positions ({i},{j}) in a vector of length {}",
            b.len()
        )));
    }
    let s = b[i] + b[j];
    let mut out = b.to_vec();
    out[i] = s / 2;
    out[j] = s - s / 2;
    Ok(out)
}

/// The balanced margin vector of given length and total: `N mod parts`
/// entries of `⌈N/parts⌉` followed by entries of `⌊N/parts⌋`.
pub fn balanced_margin(total: u64, parts: usize) -> Vec<u64> {
    let p = parts as u64;
    let rem = (total % p) as usize;
    let base = total / p;
    let mut v = vec![base + 1; rem];
    v.extend(std::iter::repeat(base).take(parts - rem));
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalityReport {
    pub m: usize,
    pub n: usize,
    pub total: u64,
    pub pairs_tested: u64,
    pub max_count: BigCount,
    pub maximizer_row: Vec<u64>,
    pub maximizer_col: Vec<u64>,
    pub balanced_row: Vec<u64>,
    pub balanced_col: Vec<u64>,
    pub balanced_count: BigCount,
    /// Balanced margins attain the maximum count.
    pub balanced_is_max: bool,
    /// Number of (pair, smoothing) combinations where smoothing a column
    /// margin decreased the count. Zero is the expected value.
    pub smoothing_violations: u64,
}

/// Exhaustively check, over all positive margin pairs of shape `m x n` with
/// total `N`, that balanced margins maximize the table count, and that
/// two-position smoothing never decreases it.
pub fn verify_margin_maximality(
    m: usize,
    n: usize,
    total: u64,
    max_pairs: u64,
) -> Result<MaximalityReport> {
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch("m, n must be >= 1".into()));
    }
    if total < m as u64 || total < n as u64 {
        return Err(Error::Domain(format!(
            "no positive margins of length {m}/{n} sum to {total}"
        )));
    }
    let rows = positive_compositions(total, m);
    let cols = positive_compositions(total, n);
    let pairs = rows.len() as u64 * cols.len() as u64;
    if pairs > max_pairs {
        return Err(Error::ResourceCap(format!(
            "{pairs} margin pairs exceed the cap {max_pairs}"
        )));
    }

    let mut max_count = BigCount::zero();
    let mut maximizer = (rows[0].clone(), cols[0].clone());
    let mut smoothing_violations = 0u64;

    for a in &rows {
        for b in &cols {
            let margins = Margins::new(a.clone(), b.clone())?;
            let count = count_exact(&margins);
            if count > max_count {
                max_count = count.clone();
                maximizer = (a.clone(), b.clone());
            }
            // smoothing any two column positions must not decrease the count
            for i in 0..n {
                for j in (i + 1)..n {
                    let b2 = smooth_margin(b, i, j)?;
                    let smoothed = count_exact(&Margins::new(a.clone(), b2)?);
                    if smoothed < count {
                        smoothing_violations += 1;
                    }
                }
            }
        }
    }

    let balanced_row = balanced_margin(total, m);
    let balanced_col = balanced_margin(total, n);
    let balanced_count = count_exact(&Margins::new(balanced_row.clone(), balanced_col.clone())?);
    let balanced_is_max = balanced_count == max_count;

    Ok(MaximalityReport {
        m,
        n,
        total,
        pairs_tested: pairs,
        max_count,
        maximizer_row: maximizer.0,
        maximizer_col: maximizer.1,
        balanced_row,
        balanced_col,
        balanced_count,
        balanced_is_max,
        smoothing_violations,
    })
}

/// All compositions of `total` into `parts` strictly positive parts.
pub fn positive_compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(left: u64, parts_left: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts_left == 1 {
            if left >= 1 {
                cur.push(left);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        // keep at least 1 for each remaining part
        for v in 1..=left.saturating_sub(parts_left as u64 - 1) {
            cur.push(v);
            rec(left - v, parts_left - 1, cur, out);
            cur.pop();
        }
    }
    if parts >= 1 && total >= parts as u64 {
        rec(total, parts, &mut cur, &mut out);
    }
    out
}

/// All compositions of `total` into `parts` non-negative parts.
pub fn weak_compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(left: u64, parts_left: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts_left == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(left - v, parts_left - 1, cur, out);
            cur.pop();
        }
    }
    if parts >= 1 {
        rec(total, parts, &mut cur, &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Logarithmic binomial machinery
// ---------------------------------------------------------------------------

/// ln C(n, k) by summed logarithms; exact to ~1e-14 relative.
pub fn log_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::Domain(format!("log_binomial({n}, {k}): k > n")));
    }
    let k = k.min(n - k);
    let mut acc = 0.0;
    for i in 1..=k {
        acc += ((n - k + i) as f64).ln() - (i as f64).ln();
    }
    Ok(acc)
}

/// Second-order entropy estimate of `ln C(n, γn)`:
/// `h(γ)·n + ½·ln(1/γ) − ½·ln(2π(1−γ)n)` with
/// `h(γ) = γ·ln(1/γ) + (1−γ)·ln(1/(1−γ))`.
pub fn binom_entropy_estimate(n: u64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma {gamma} outside (0, 1)")));
    }
    let h = gamma * (1.0 / gamma).ln() + (1.0 - gamma) * (1.0 / (1.0 - gamma)).ln();
    Ok(h * n as f64 + 0.5 * (1.0 / gamma).ln() - 0.5 * (2.0 * std::f64::consts::PI * (1.0 - gamma) * n as f64).ln())
}

/// Binary entropy h(γ) in nats.
pub fn binary_entropy(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma {gamma} outside (0, 1)")));
    }
    Ok(gamma * (1.0 / gamma).ln() + (1.0 - gamma) * (1.0 / (1.0 - gamma)).ln())
}

// ---------------------------------------------------------------------------
// Canfield–McKay asymptotic count for equal margins
// ---------------------------------------------------------------------------

/// Closed-form asymptotic for the log-count of `m x n` tables with all row
/// sums `r` and column sums `c` (`mr = nc`), with its applicability flag.
#[derive(Clone, Debug, Serialize)]
pub struct CMEstimate {
    pub log_count: f64,
    /// λ = r/n = c/m, the mean entry.
    pub lambda: f64,
    /// A = λ(1+λ)/2.
    pub big_a: f64,
    /// Hypothesis holds for the chosen constants `a`, `b`.
    pub applicable: bool,
    pub const_a: f64,
    pub const_b: f64,
}

/// Defaults a = 0.25, b = 0.2 satisfy a + b < 1/2.
pub const CM_DEFAULT_A: f64 = 0.25;
pub const CM_DEFAULT_B: f64 = 0.2;

pub fn cm_log_count(m: u64, n: u64, r: u64, c: u64, a: f64, b: f64) -> Result<CMEstimate> {
    if m == 0 || n == 0 || r == 0 || c == 0 {
        return Err(Error::Domain("cm_log_count needs positive m, n, r, c".into()));
    }
    if m * r != n * c {
        return Err(Error::Domain(format!(
            "margin totals differ: {m}*{r} != {n}*{c}"
        )));
    }
    let (mf, nf) = (m as f64, n as f64);
    let lambda = r as f64 / nf;
    let big_a = lambda * (1.0 + lambda) / 2.0;
    let log_count = mf * nf * (-lambda * lambda.ln() + (1.0 + lambda) * (1.0 + lambda).ln())
        - (mf + nf - 1.0) / 2.0 * (4.0 * std::f64::consts::PI * big_a).ln()
        - (nf - 1.0) / 2.0 * mf.ln()
        - (mf - 1.0) / 2.0 * nf.ln()
        + 0.5
        - (1.0 + 2.0 * big_a) / (24.0 * big_a) * (mf / nf + nf / mf);
    let hypothesis = (1.0 + 2.0 * lambda).powi(2) / (4.0 * lambda * (1.0 + lambda))
        * (1.0 + 5.0 * mf / (6.0 * nf) + 5.0 * nf / (6.0 * mf));
    let applicable = a > 0.0 && b > 0.0 && a + b < 0.5 && hypothesis <= a * nf.ln();
    Ok(CMEstimate {
        log_count,
        lambda,
        big_a,
        applicable,
        const_a: a,
        const_b: b,
    })
}

// ---------------------------------------------------------------------------
// Row classes and the projected-law ratio
// ---------------------------------------------------------------------------

/// Number of `r x n` non-negative integer matrices with every row sum `Cn`
/// and free columns: `C(Cn+n−1, n−1)^r`.
pub fn count_row_class(n: u64, c: u64, r: u32) -> BigCount {
    let per_row = binomial(c * n + n - 1, n - 1);
    BigCount(per_row.0.pow(r))
}

/// The density ratio `(#R(Cn,r)/#M(Cn,n)) · #M((Cn)_{n−r}, (C(n−r))_n)` and
/// its limit `e^{r/2}`.
#[derive(Clone, Debug, Serialize)]
pub struct RnRatioReport {
    pub n: u64,
    pub c: u64,
    pub r: u64,
    pub ratio: f64,
    pub limit: f64,
    pub abs_error: f64,
    /// "exact" (big-integer counts) or "estimated" (asymptotic counts).
    pub method: String,
}

/// Largest n for which the exact route is attempted by default.
pub const RN_RATIO_EXACT_MAX_N: u64 = 8;

pub fn rn_ratio(n: u64, c: u64, r: u64) -> Result<RnRatioReport> {
    if r >= n {
        return Err(Error::Domain(format!("need r < n, got r={r}, n={n}")));
    }
    if c == 0 {
        return Err(Error::Domain("density C must be >= 1".into()));
    }
    let limit = (r as f64 / 2.0).exp();
    let (ln_ratio, method) = if n <= RN_RATIO_EXACT_MAX_N {
        let count_r = count_row_class(n, c, r as u32);
        let whole = count_exact(&Margins::new(
            vec![c * n; n as usize],
            vec![c * n; n as usize],
        )?);
        let complement = count_exact(&Margins::new(
            vec![c * n; (n - r) as usize],
            vec![c * (n - r); n as usize],
        )?);
        (count_r.ln() + complement.ln() - whole.ln(), "exact")
    } else {
        let ln_r = r as f64 * log_binomial(c * n + n - 1, n - 1)?;
        let whole = cm_log_count(n, n, c * n, c * n, CM_DEFAULT_A, CM_DEFAULT_B)?;
        let complement = cm_log_count(n - r, n, c * n, c * (n - r), CM_DEFAULT_A, CM_DEFAULT_B)?;
        (
            ln_r + complement.log_count - whole.log_count,
            "estimated",
        )
    };
    let ratio = ln_ratio.exp();
    Ok(RnRatioReport {
        n,
        c,
        r,
        ratio,
        limit,
        abs_error: (ratio - limit).abs(),
        method: method.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::UniformMargins;
    use proptest::prelude::*;

    fn margins(row: &[u64], col: &[u64]) -> Margins {
        Margins::new(row.to_vec(), col.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let two = enumerate_tables(&margins(&[1, 1], &[1, 1]), 1000).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].entries(), &[0, 1, 1, 0]);
        assert_eq!(two[1].entries(), &[1, 0, 0, 1]);

        let three = enumerate_tables(&margins(&[2, 2], &[2, 2]), 1000).unwrap();
        assert_eq!(three.len(), 3);

        let forced = enumerate_tables(&margins(&[3], &[1, 1, 1]), 1000).unwrap();
        assert_eq!(forced.len(), 1);
        assert_eq!(forced[0].entries(), &[1, 1, 1]);
    }

    #[test]
    fn enumerate_is_lexicographic_and_valid() {
        let tables = enumerate_tables(&margins(&[3, 2, 4], &[2, 3, 4]), 100_000).unwrap();
        for w in tables.windows(2) {
            assert!(w[0].entries() < w[1].entries());
        }
        for t in &tables {
            assert!(t.validate().unwrap());
        }
    }

    #[test]
    fn enumerate_cap_is_enforced() {
        let r = enumerate_tables(&margins(&[4, 4], &[4, 4]), 3);
        assert!(matches!(r, Err(Error::ResourceCap(_))));
    }

    #[test]
    fn count_examples() {
        assert_eq!(
            count_exact(&UniformMargins::new(2, 2).unwrap().margins()),
            BigCount::from(5)
        );
        // frozen from the enumeration oracle
        assert_eq!(
            count_exact(&UniformMargins::new(3, 1).unwrap().margins()),
            BigCount::from(55)
        );
        assert_eq!(count_exact(&margins(&[1, 1], &[1, 1])), BigCount::from(2));
        // larger frozen values, same oracle
        assert_eq!(
            count_exact(&UniformMargins::new(3, 2).unwrap().margins()),
            BigCount::from(406)
        );
        assert_eq!(
            count_exact(&UniformMargins::new(4, 2).unwrap().margins()),
            BigCount::from(981_541)
        );
        assert_eq!(
            count_exact(&UniformMargins::new(5, 2).unwrap().margins()),
            BigCount::from(79_315_936_751)
        );
    }

    #[test]
    fn count_accepts_zero_margins() {
        assert_eq!(
            count_exact(&margins(&[0, 2], &[1, 1])),
            BigCount::from(1)
        );
        assert_eq!(count_exact(&margins(&[0], &[0])), BigCount::from(1));
        // zero column total: infeasible remainder
        assert_eq!(count_exact(&margins(&[2, 1], &[0, 3])), BigCount::from(1));
    }

    #[test]
    fn count_matches_enumeration_small_grid() {
        for n_total in 0..=6u64 {
            for rows in weak_compositions(n_total, 2) {
                for cols in weak_compositions(n_total, 3) {
                    let m = margins(&rows, &cols);
                    let listed = enumerate_tables(&m, 100_000).unwrap();
                    assert_eq!(
                        count_exact(&m),
                        BigCount::from(listed.len() as u64),
                        "margins {m}"
                    );
                }
            }
        }
    }

    #[test]
    fn composition_examples() {
        assert_eq!(bounded_compositions(&[1, 1, 1], 2), BigCount::from(3));
        assert_eq!(bounded_compositions(&[5, 7], 0), BigCount::from(1));
        assert_eq!(bounded_compositions(&[2, 2], 2), BigCount::from(3));
        assert_eq!(bounded_compositions(&[2, 2], 5), BigCount::zero());
    }

    #[test]
    fn composition_polynomial_invariants() {
        let p = CompositionPolynomial::new(&[3, 1, 4, 2]);
        assert_eq!(p.degree(), 10);
        assert!(p.is_symmetric());
        assert!(p.is_unimodal());
        assert_eq!(p.coefficient(0), BigCount::one());
        assert_eq!(p.coefficient(10), BigCount::one());
    }

    #[test]
    fn two_column_identity() {
        // coefficient r of the caps polynomial equals the count with column
        // margins (r, S-r)
        for caps in [vec![1, 2, 3], vec![2, 2], vec![4, 1, 1, 2]] {
            let s: u64 = caps.iter().sum();
            for r in 0..=s {
                let m = margins(&caps, &[r, s - r]);
                assert_eq!(
                    bounded_compositions(&caps, r),
                    count_exact(&m),
                    "caps {caps:?}, r {r}"
                );
            }
        }
    }

    #[test]
    fn smoothing_examples() {
        assert_eq!(smooth_margin(&[4, 2], 0, 1).unwrap(), vec![3, 3]);
        assert_eq!(smooth_margin(&[4, 1], 0, 1).unwrap(), vec![2, 3]);
        assert_eq!(smooth_margin(&[3, 3], 0, 1).unwrap(), vec![3, 3]);
        assert!(smooth_margin(&[3, 3], 1, 1).is_err());
    }

    #[test]
    fn maximality_examples() {
        let r = verify_margin_maximality(2, 2, 4, 10_000).unwrap();
        assert!(r.balanced_is_max);
        assert_eq!(r.balanced_row, vec![2, 2]);
        assert_eq!(r.balanced_count, BigCount::from(3));
        assert_eq!(r.smoothing_violations, 0);

        let r = verify_margin_maximality(2, 2, 2, 10_000).unwrap();
        assert!(r.balanced_is_max);
        assert_eq!(r.balanced_count, BigCount::from(2));

        // single row: every pair counts exactly 1
        let r = verify_margin_maximality(1, 3, 5, 10_000).unwrap();
        assert_eq!(r.max_count, BigCount::one());
        assert!(r.balanced_is_max);
    }

    #[test]
    fn log_binomial_examples() {
        assert!((log_binomial(4, 2).unwrap() - 6f64.ln()).abs() < 1e-12);
        assert_eq!(log_binomial(17, 0).unwrap(), 0.0);
        assert!((log_binomial(10, 5).unwrap() - 252f64.ln()).abs() < 1e-12);
        assert!(log_binomial(3, 5).is_err());
    }

    #[test]
    fn entropy_estimate_tracks_exact() {
        assert!((binary_entropy(0.5).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
        let est = binom_entropy_estimate(100, 0.5).unwrap();
        assert!((est - log_binomial(100, 50).unwrap()).abs() < 0.01);
        let est = binom_entropy_estimate(1000, 0.3).unwrap();
        assert!((est - log_binomial(1000, 300).unwrap()).abs() < 0.01);
        assert!(binom_entropy_estimate(10, 0.0).is_err());
        assert!(binom_entropy_estimate(10, 1.0).is_err());
    }

    #[test]
    fn cm_estimate_basics() {
        // C=2 square: lambda = 2, A = 3
        let e = cm_log_count(5, 5, 10, 10, CM_DEFAULT_A, CM_DEFAULT_B).unwrap();
        assert!((e.lambda - 2.0).abs() < 1e-15);
        assert!((e.big_a - 3.0).abs() < 1e-15);

        // symmetric in (m, r) <-> (n, c)
        let a = cm_log_count(4, 6, 9, 6, 0.25, 0.2).unwrap();
        let b = cm_log_count(6, 4, 6, 9, 0.25, 0.2).unwrap();
        assert!((a.log_count - b.log_count).abs() < 1e-10);

        assert!(cm_log_count(3, 4, 5, 2, 0.25, 0.2).is_err());
    }

    #[test]
    fn cm_error_decreases_on_exact_counts() {
        // |cm - ln(exact)| for C=2 squares, frozen exact counts above
        let exact = [406u64, 981_541, 79_315_936_751];
        let mut errs = Vec::new();
        for (i, n) in [3u64, 4, 5].iter().enumerate() {
            let cm = cm_log_count(*n, *n, 2 * n, 2 * n, CM_DEFAULT_A, CM_DEFAULT_B).unwrap();
            errs.push((cm.log_count - (exact[i] as f64).ln()).abs());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "errors {errs:?}");
    }

    #[test]
    fn row_class_examples() {
        assert_eq!(count_row_class(2, 2, 1), BigCount::from(5));
        assert_eq!(count_row_class(3, 1, 1), BigCount::from(10));
        assert_eq!(count_row_class(7, 3, 0), BigCount::one());
    }

    #[test]
    fn rn_ratio_exact_values() {
        // frozen from big-integer counts: 28*19/406, 165*8623/981541, ...
        let r3 = rn_ratio(3, 2, 1).unwrap();
        assert_eq!(r3.method, "exact");
        assert!((r3.ratio - 532.0 / 406.0).abs() < 1e-12);

        let r4 = rn_ratio(4, 2, 1).unwrap();
        assert!((r4.ratio - 165.0 * 8623.0 / 981_541.0).abs() < 1e-9);

        let r5 = rn_ratio(5, 2, 1).unwrap();
        assert!(r3.abs_error > r4.abs_error && r4.abs_error > r5.abs_error);
        assert!((r3.limit - 0.5f64.exp()).abs() < 1e-15);

        // estimated route engages past the exact cutoff
        let r12 = rn_ratio(12, 2, 1).unwrap();
        assert_eq!(r12.method, "estimated");
        assert!(r12.ratio > 1.0 && r12.ratio < 2.5);

        assert!(rn_ratio(3, 2, 3).is_err());
    }

    #[test]
    fn big_count_serde_decimal() {
        let c = count_exact(&UniformMargins::new(5, 2).unwrap().margins());
        let js = serde_json::to_string(&c).unwrap();
        assert_eq!(js, "\"79315936751\"");
        let back: BigCount = serde_json::from_str(&js).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn big_count_ln_large() {
        // 2^200: ln = 200 ln 2
        let big = BigCount(BigUint::from(1u8) << 200);
        assert!((big.ln() - 200.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn count_transpose_and_permutation_invariance(
            rows in proptest::collection::vec(0u64..4, 1..4),
            cols_len in 1usize..4,
            perm_seed in 0u64..1000,
        ) {
            let total: u64 = rows.iter().sum();
            // random-ish column split of the same total
            let mut cols = vec![0u64; cols_len];
            let mut left = total;
            let mut s = perm_seed;
            for j in 0..cols_len - 1 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = if left == 0 { 0 } else { s % (left + 1) };
                cols[j] = v;
                left -= v;
            }
            cols[cols_len - 1] = left;

            let m = margins(&rows, &cols);
            let c = count_exact(&m);
            prop_assert_eq!(count_exact(&m.transposed()), c.clone());

            let mut rows_rev = rows.clone();
            rows_rev.reverse();
            let mut cols_rev = cols.clone();
            cols_rev.reverse();
            prop_assert_eq!(count_exact(&margins(&rows_rev, &cols_rev)), c);
        }

        #[test]
        fn composition_symmetric_unimodal(
            caps in proptest::collection::vec(1u64..5, 1..6),
        ) {
            let p = CompositionPolynomial::new(&caps);
            prop_assert!(p.is_symmetric());
            prop_assert!(p.is_unimodal());
            let s: u64 = caps.iter().sum();
            prop_assert_eq!(p.degree() as u64, s);
        }

        #[test]
        fn smoothing_never_decreases_count(
            rows in proptest::collection::vec(1u64..4, 1..4),
            cols_pair in (1u64..5, 1u64..5),
            extra in proptest::collection::vec(1u64..4, 0..2),
        ) {
            let mut cols = vec![cols_pair.0, cols_pair.1];
            cols.extend(&extra);
            let col_total: u64 = cols.iter().sum();
            let row_total: u64 = rows.iter().sum();
            prop_assume!(col_total >= row_total && !rows.is_empty());
            // pad rows with a slack row to equalize totals
            let mut rows = rows.clone();
            if col_total > row_total {
                rows.push(col_total - row_total);
            }
            let m = margins(&rows, &cols);
            let base = count_exact(&m);
            let smoothed = smooth_margin(&cols, 0, 1).unwrap();
            let m2 = margins(&rows, &smoothed);
            prop_assert!(count_exact(&m2) >= base);
        }
    }
}
