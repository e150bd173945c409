//! Uniform samplers over a table class.
//!
//! Two routes with complementary ranges:
//!
//! - **Rejection**: draw every entry independently from the geometric law
//!   attached to the typical table and accept iff the margins hold. The
//!   accepted table is *exactly* uniform, but the acceptance probability
//!   shrinks exponentially in the margin dimension, so this only works on
//!   small instances.
//! - **Swap chain**: a Markov chain whose moves add ±1 around a random 2x2
//!   minor. The proposal is symmetric and a move is accepted iff no entry
//!   goes negative, so the uniform law is stationary; the swap graph on a
//!   table class is connected, which makes the chain ergodic.
//!
//! Every sampler is driven by a labelled stream from a [`Seed`], so a seed
//! pins the full output.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::Seed;
use crate::table::{Margins, Table};

// ---------------------------------------------------------------------------
// Geometric entry models
// ---------------------------------------------------------------------------

/// Matrix of independent geometric laws, entry `(i,j)` with mean
/// `means[i*n+j]`.
#[derive(Clone, Debug)]
pub struct GeometricModel {
    pub m: usize,
    pub n: usize,
    means: Vec<f64>,
    inv_ln_q: Vec<f64>, // cached 1/ln(mean/(1+mean)) per entry
}

impl GeometricModel {
    pub fn new(m: usize, n: usize, means: Vec<f64>) -> Result<Self> {
        if means.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "{} means for a {m}x{n} model",
                means.len()
            )));
        }
        if means.iter().any(|&z| !(z > 0.0)) {
            return Err(Error::Domain("geometric means must be positive".into()));
        }
        let inv_ln_q = means.iter().map(|&z| 1.0 / (z / (1.0 + z)).ln()).collect();
        Ok(GeometricModel {
            m,
            n,
            means,
            inv_ln_q,
        })
    }

    /// Constant-mean model: the typical table of uniform margins is the
    /// constant matrix C, so every entry is Geom(C).
    pub fn uniform(n: usize, c: u64) -> Self {
        GeometricModel::new(n, n, vec![c as f64; n * n]).expect("positive constant mean")
    }

    /// Model attached to a solved typical table.
    pub fn from_typical(tt: &crate::entropy::TypicalTable) -> Result<Self> {
        GeometricModel::new(tt.m, tt.n, tt.z.clone())
    }

    pub fn mean(&self, i: usize, j: usize) -> f64 {
        self.means[i * self.n + j]
    }

    /// pmf of entry (i,j) at x: `(1/(1+z))·(z/(1+z))^x`.
    pub fn pmf(&self, i: usize, j: usize, x: u64) -> f64 {
        let z = self.mean(i, j);
        (z / (1.0 + z)).powi(x as i32) / (1.0 + z)
    }

    /// One draw of entry (i,j): exact inverse of the closed-form CDF
    /// `1 − (z/(1+z))^{x+1}`, branch-free in the value.
    fn draw(&self, idx: usize, rng: &mut ChaCha12Rng) -> u64 {
        let u: f64 = rng.gen();
        ((1.0 - u).ln() * self.inv_ln_q[idx]).floor() as u64
    }
}

/// Independent draws from the model; entry (i,j) ~ Geom(means[i,j]).
pub fn sample_geometric_matrix(model: &GeometricModel, seed: Seed) -> Vec<u64> {
    let mut rng = seed.stream("geom-matrix");
    (0..model.m * model.n)
        .map(|idx| model.draw(idx, &mut rng))
        .collect()
}

// ---------------------------------------------------------------------------
// Rejection sampling
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct RejectionConfig {
    pub max_attempts: u64,
}

impl Default for RejectionConfig {
    fn default() -> Self {
        RejectionConfig {
            max_attempts: 100_000_000,
        }
    }
}

/// Outcome of a rejection run.
#[derive(Clone, Debug)]
pub enum RejectionOutcome {
    Accepted { table: Table, attempts: u64 },
    Exhausted { attempts: u64 },
}

impl RejectionOutcome {
    pub fn table(self) -> Option<Table> {
        match self {
            RejectionOutcome::Accepted { table, .. } => Some(table),
            RejectionOutcome::Exhausted { .. } => None,
        }
    }
}

/// Draw geometric matrices until one satisfies the margins.
///
/// Conditioned on acceptance the output is exactly uniform on the table
/// class. Rows are drawn one at a time and an attempt is abandoned at the
/// first row whose sum is off; this changes nothing statistically (entries
/// are independent) and saves most of the work.
pub fn rejection_sample(
    margins: &Margins,
    model: &GeometricModel,
    cfg: &RejectionConfig,
    seed: Seed,
) -> Result<RejectionOutcome> {
    if model.m != margins.m() || model.n != margins.n() {
        return Err(Error::DimensionMismatch(
            "model shape does not match margins".into(),
        ));
    }
    let (m, n) = (margins.m(), margins.n());
    let mut rng = seed.stream("rejection");
    let mut entries = vec![0u64; m * n];
    'attempt: for attempt in 1..=cfg.max_attempts {
        for i in 0..m {
            let mut row_sum = 0u64;
            for j in 0..n {
                let v = model.draw(i * n + j, &mut rng);
                entries[i * n + j] = v;
                row_sum += v;
            }
            if row_sum != margins.row()[i] {
                continue 'attempt;
            }
        }
        for j in 0..n {
            let col_sum: u64 = (0..m).map(|i| entries[i * n + j]).sum();
            if col_sum != margins.col()[j] {
                continue 'attempt;
            }
        }
        return Ok(RejectionOutcome::Accepted {
            table: Table::from_parts(entries, margins.clone())?,
            attempts: attempt,
        });
    }
    Ok(RejectionOutcome::Exhausted {
        attempts: cfg.max_attempts,
    })
}

/// Collect `count` accepted tables, continuing the same stream.
pub fn rejection_sample_many(
    margins: &Margins,
    model: &GeometricModel,
    cfg: &RejectionConfig,
    count: usize,
    seed: Seed,
) -> Result<Vec<Table>> {
    let (m, n) = (margins.m(), margins.n());
    if model.m != m || model.n != n {
        return Err(Error::DimensionMismatch(
            "model shape does not match margins".into(),
        ));
    }
    let mut rng = seed.stream("rejection");
    let mut out = Vec::with_capacity(count);
    let mut entries = vec![0u64; m * n];
    let mut attempts = 0u64;
    while out.len() < count {
        attempts += 1;
        if attempts > cfg.max_attempts {
            return Err(Error::ResourceCap(format!(
                "{} accepted of {count} after {attempts} attempts",
                out.len()
            )));
        }
        let mut ok = true;
        'rows: for i in 0..m {
            let mut row_sum = 0u64;
            for j in 0..n {
                let v = model.draw(i * n + j, &mut rng);
                entries[i * n + j] = v;
                row_sum += v;
            }
            if row_sum != margins.row()[i] {
                ok = false;
                break 'rows;
            }
        }
        if ok {
            for j in 0..n {
                let col_sum: u64 = (0..m).map(|i| entries[i * n + j]).sum();
                if col_sum != margins.col()[j] {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(Table::from_parts(entries.clone(), margins.clone())?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Swap-move Markov chain
// ---------------------------------------------------------------------------

#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
pub struct ChainConfig {
    pub burn_in: u64,
    pub thin: u64,
    pub samples: u64,
}

impl ChainConfig {
    /// Heuristic diffusive defaults: burn-in 50·mn steps, thinning mn.
    pub fn default_for(margins: &Margins) -> Self {
        let cells = (margins.m() * margins.n()) as u64;
        ChainConfig {
            burn_in: 50 * cells,
            thin: cells.max(1),
            samples: 1000,
        }
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }
}

/// Greedy northwest-corner start: fill each cell with
/// `min(remaining row, remaining column)` scanning row-major. Always valid.
pub fn northwest_start(margins: &Margins) -> Table {
    let (m, n) = (margins.m(), margins.n());
    let mut rem_row = margins.row().to_vec();
    let mut rem_col = margins.col().to_vec();
    let mut entries = vec![0u64; m * n];
    for i in 0..m {
        for j in 0..n {
            let v = rem_row[i].min(rem_col[j]);
            entries[i * n + j] = v;
            rem_row[i] -= v;
            rem_col[j] -= v;
        }
    }
    Table::from_parts(entries, margins.clone()).expect("shape fixed by construction")
}

/// Valid table close to the proportional fill `r_i·c_j/N`: entry-wise
/// floor, then the leftover margin mass placed by a northwest pass over
/// the residual margins.
///
/// For uniform margins this is exactly the constant-C table. The chain
/// starts here rather than at the northwest corner: the corner staircase
/// has ~m+n nonzero cells, so almost every swap proposal hits a zero and
/// the transient grows far beyond the diffusive burn-in scale, while the
/// proportional table accepts moves at once.
pub fn proportional_start(margins: &Margins) -> Table {
    let (m, n) = (margins.m(), margins.n());
    let total = margins.total();
    if total == 0 {
        return Table::from_parts(vec![0; m * n], margins.clone()).expect("zero table");
    }
    let mut entries = vec![0u64; m * n];
    let mut rem_row = margins.row().to_vec();
    let mut rem_col = margins.col().to_vec();
    for i in 0..m {
        for j in 0..n {
            let v = margins.row()[i] * margins.col()[j] / total;
            let v = v.min(rem_row[i]).min(rem_col[j]);
            entries[i * n + j] = v;
            rem_row[i] -= v;
            rem_col[j] -= v;
        }
    }
    // residual margins have equal totals; a northwest pass finishes the job
    for i in 0..m {
        for j in 0..n {
            let v = rem_row[i].min(rem_col[j]);
            entries[i * n + j] += v;
            rem_row[i] -= v;
            rem_col[j] -= v;
        }
    }
    Table::from_parts(entries, margins.clone()).expect("shape fixed by construction")
}

/// In-place chain state; proposals mutate the buffer directly.
struct ChainState {
    m: usize,
    n: usize,
    entries: Vec<u64>,
}

impl ChainState {
    /// One proposal: uniform distinct row pair, distinct column pair, and
    /// sign; accept iff both decremented entries are positive. Returns
    /// whether the move was applied.
    fn step(&mut self, rng: &mut ChaCha12Rng) -> bool {
        let (m, n) = (self.m, self.n);
        let i = rng.gen_range(0..m);
        let mut i2 = rng.gen_range(0..m - 1);
        if i2 >= i {
            i2 += 1;
        }
        let j = rng.gen_range(0..n);
        let mut j2 = rng.gen_range(0..n - 1);
        if j2 >= j {
            j2 += 1;
        }
        let positive = rng.gen::<bool>();
        // sign +1 adds at (i,j),(i2,j2) and removes at (i,j2),(i2,j)
        let (dec_a, dec_b, inc_a, inc_b) = if positive {
            ((i, j2), (i2, j), (i, j), (i2, j2))
        } else {
            ((i, j), (i2, j2), (i, j2), (i2, j))
        };
        let da = dec_a.0 * n + dec_a.1;
        let db = dec_b.0 * n + dec_b.1;
        if self.entries[da] == 0 || self.entries[db] == 0 {
            return false;
        }
        self.entries[da] -= 1;
        self.entries[db] -= 1;
        self.entries[inc_a.0 * n + inc_a.1] += 1;
        self.entries[inc_b.0 * n + inc_b.1] += 1;
        true
    }
}

/// Run the swap chain from the northwest start and return the retained
/// samples: `burn_in` steps discarded, then one table every `thin` steps.
pub fn swap_chain_run(margins: &Margins, cfg: &ChainConfig, seed: Seed) -> Result<Vec<Table>> {
    if margins.m() < 2 || margins.n() < 2 {
        return Err(Error::Domain(
            "swap chain needs at least a 2x2 instance".into(),
        ));
    }
    if cfg.thin == 0 || cfg.samples == 0 {
        return Err(Error::Domain("thin and samples must be positive".into()));
    }
    let start = proportional_start(margins);
    let mut state = ChainState {
        m: margins.m(),
        n: margins.n(),
        entries: start.entries().to_vec(),
    };
    let mut rng = seed.stream("swap-chain");
    for _ in 0..cfg.burn_in {
        state.step(&mut rng);
    }
    let mut out = Vec::with_capacity(cfg.samples as usize);
    for _ in 0..cfg.samples {
        for _ in 0..cfg.thin {
            state.step(&mut rng);
        }
        out.push(Table::from_parts(state.entries.clone(), margins.clone())?);
    }
    Ok(out)
}

/// Run the chain and fold each retained sample into an accumulator without
/// keeping the trajectory (for large instances).
pub fn swap_chain_fold<A>(
    margins: &Margins,
    cfg: &ChainConfig,
    seed: Seed,
    mut acc: A,
    mut f: impl FnMut(&mut A, &[u64]),
) -> Result<A> {
    if margins.m() < 2 || margins.n() < 2 {
        return Err(Error::Domain(
            "swap chain needs at least a 2x2 instance".into(),
        ));
    }
    let start = proportional_start(margins);
    let mut state = ChainState {
        m: margins.m(),
        n: margins.n(),
        entries: start.entries().to_vec(),
    };
    let mut rng = seed.stream("swap-chain");
    for _ in 0..cfg.burn_in {
        state.step(&mut rng);
    }
    for _ in 0..cfg.samples {
        for _ in 0..cfg.thin {
            state.step(&mut rng);
        }
        f(&mut acc, &state.entries);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Truncated geometric model
// ---------------------------------------------------------------------------

/// Geometric law with mean C conditioned on not exceeding the cap
/// `K = ⌊10·ln n / ln((C+1)/C)⌋`, with normalizer
/// `Z_n = 1 − (C/(1+C))^{K+1}`.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct TruncatedGeomModel {
    pub c: u64,
    pub n: u64,
    pub cap: u64,
    pub normalizer: f64,
}

impl TruncatedGeomModel {
    pub fn new(n: u64, c: u64) -> Result<Self> {
        if n < 2 || c == 0 {
            return Err(Error::Domain("need n >= 2 and C >= 1".into()));
        }
        let lambda = ((c as f64 + 1.0) / c as f64).ln();
        let cap = (10.0 * (n as f64).ln() / lambda).floor() as u64;
        let q = c as f64 / (c as f64 + 1.0);
        let normalizer = 1.0 - q.powi(cap as i32 + 1);
        Ok(TruncatedGeomModel {
            c,
            n,
            cap,
            normalizer,
        })
    }

    /// pmf at x: `(1/Z_n)·(1/(1+C))·(C/(1+C))^x` on `0..=cap`, else 0.
    pub fn pmf(&self, x: u64) -> f64 {
        if x > self.cap {
            return 0.0;
        }
        let c = self.c as f64;
        let q = c / (1.0 + c);
        q.powi(x as i32) / (1.0 + c) / self.normalizer
    }

    /// Inverse-CDF draw, clamped to the cap.
    fn draw(&self, rng: &mut ChaCha12Rng) -> u64 {
        let c = self.c as f64;
        let q = c / (1.0 + c);
        let u: f64 = rng.gen();
        let x = ((1.0 - u * self.normalizer).ln() / q.ln()).floor() as u64;
        x.min(self.cap)
    }
}

/// pmf of the truncated model (free function mirror of
/// [`TruncatedGeomModel::pmf`]).
pub fn truncated_geom_pmf(model: &TruncatedGeomModel, x: u64) -> f64 {
    model.pmf(x)
}

/// Rejection sampling with truncated-geometric entries. On any class whose
/// entries cannot exceed the cap, this is distributionally identical to
/// [`rejection_sample_many`] with the constant-C model.
pub fn rejection_sample_truncated(
    margins: &Margins,
    model: &TruncatedGeomModel,
    cfg: &RejectionConfig,
    count: usize,
    seed: Seed,
) -> Result<Vec<Table>> {
    let (m, n) = (margins.m(), margins.n());
    let mut rng = seed.stream("rejection-truncated");
    let mut out = Vec::with_capacity(count);
    let mut entries = vec![0u64; m * n];
    let mut attempts = 0u64;
    while out.len() < count {
        attempts += 1;
        if attempts > cfg.max_attempts {
            return Err(Error::ResourceCap(format!(
                "{} accepted of {count} after {attempts} attempts",
                out.len()
            )));
        }
        let mut ok = true;
        'rows: for i in 0..m {
            let mut row_sum = 0u64;
            for j in 0..n {
                let v = model.draw(&mut rng);
                entries[i * n + j] = v;
                row_sum += v;
            }
            if row_sum != margins.row()[i] {
                ok = false;
                break 'rows;
            }
        }
        if ok {
            for j in 0..n {
                let col_sum: u64 = (0..m).map(|i| entries[i * n + j]).sum();
                if col_sum != margins.col()[j] {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            out.push(Table::from_parts(entries.clone(), margins.clone())?);
        }
    }
    Ok(out)
}
