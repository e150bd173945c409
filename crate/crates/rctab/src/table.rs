//! Problem-instance types: margins, tables, and margin-preserving moves.
//!
//! All types are immutable values; operations return new values. Entries and
//! margins are `u64` throughout — desk-scale instances never approach the
//! limits, and unsigned arithmetic keeps validity checks exact.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pair of margin vectors with equal totals.
///
/// `row[i]` prescribes the sum of row `i`, `col[j]` the sum of column `j`.
/// Entries may be zero (zero rows/columns are legitimate in recursive
/// counting); lengths must be at least 1 and totals must agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Margins {
    row: Vec<u64>,
    col: Vec<u64>,
}

impl Margins {
    pub fn new(row: Vec<u64>, col: Vec<u64>) -> Result<Self> {
        if row.is_empty() || col.is_empty() {
            return Err(Error::DimensionMismatch(
                "margin vectors must have length >= 1".into(),
            ));
        }
        let (r, c): (u64, u64) = (row.iter().sum(), col.iter().sum());
        if r != c {
            return Err(Error::DimensionMismatch(format!(
                "row total {r} != column total {c}"
            )));
        }
        Ok(Margins { row, col })
    }

    pub fn row(&self) -> &[u64] {
        &self.row
    }

    pub fn col(&self) -> &[u64] {
        &self.col
    }

    /// Number of rows.
    pub fn m(&self) -> usize {
        self.row.len()
    }

    /// Number of columns.
    pub fn n(&self) -> usize {
        self.col.len()
    }

    /// Common total N.
    pub fn total(&self) -> u64 {
        self.row.iter().sum()
    }

    /// True when every margin entry is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.row.iter().all(|&r| r > 0) && self.col.iter().all(|&c| c > 0)
    }

    /// Margins of the transposed problem.
    pub fn transposed(&self) -> Margins {
        Margins {
            row: self.col.clone(),
            col: self.row.clone(),
        }
    }
}

impl fmt::Display for Margins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{:?}", self.row, self.col)
    }
}

/// Square instance with every row and column sum equal to `C·n`.
///
/// The density `C` is assumed to be at least 2 in the asymptotic statements
/// this crate reproduces; `C = 1` is accepted everywhere because small state
/// spaces are precious in tests, and [`UniformMargins::below_density_range`]
/// flags it so reports can carry the caveat.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformMargins {
    pub n: usize,
    pub c: u64,
}

impl UniformMargins {
    pub fn new(n: usize, c: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("n must be >= 1".into()));
        }
        if c == 0 {
            return Err(Error::Domain("density C must be >= 1".into()));
        }
        Ok(UniformMargins { n, c })
    }

    /// The margin pair (Cn, …, Cn) / (Cn, …, Cn).
    pub fn margins(&self) -> Margins {
        let s = self.c * self.n as u64;
        Margins {
            row: vec![s; self.n],
            col: vec![s; self.n],
        }
    }

    /// True when C = 1, outside the density range of the limit laws.
    pub fn below_density_range(&self) -> bool {
        self.c < 2
    }
}

/// A non-negative integer matrix together with the margins it is supposed
/// to satisfy. Construction does not force validity — see [`Table::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    entries: Vec<u64>, // row-major, m*n
    margins: Margins,
}

impl Table {
    /// Wrap entries and margins without checking the sums.
    pub fn from_parts(entries: Vec<u64>, margins: Margins) -> Result<Self> {
        if entries.len() != margins.m() * margins.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} instance",
                entries.len(),
                margins.m(),
                margins.n()
            )));
        }
        Ok(Table { entries, margins })
    }

    /// Build a table from entries alone; margins are computed from the sums.
    pub fn from_entries(m: usize, n: usize, entries: Vec<u64>) -> Result<Self> {
        if m == 0 || n == 0 || entries.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {m}x{n} matrix",
                entries.len()
            )));
        }
        let mut row = vec![0u64; m];
        let mut col = vec![0u64; n];
        for i in 0..m {
            for j in 0..n {
                row[i] += entries[i * n + j];
                col[j] += entries[i * n + j];
            }
        }
        Ok(Table {
            entries,
            margins: Margins { row, col },
        })
    }

    pub fn margins(&self) -> &Margins {
        &self.margins
    }

    pub fn m(&self) -> usize {
        self.margins.m()
    }

    pub fn n(&self) -> usize {
        self.margins.n()
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n() + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Check the margin constraints.
    ///
    /// Returns `Ok(true)` when every row and column sums to its margin,
    /// `Ok(false)` when some sum is off, and a structural error when the
    /// entry buffer does not match the margin dimensions.
    pub fn validate(&self) -> Result<bool> {
        let (m, n) = (self.m(), self.n());
        if self.entries.len() != m * n {
            return Err(Error::DimensionMismatch(
                "entry count does not match margins".into(),
            ));
        }
        for i in 0..m {
            let s: u64 = self.entries[i * n..(i + 1) * n].iter().sum();
            if s != self.margins.row[i] {
                return Ok(false);
            }
        }
        for j in 0..n {
            let s: u64 = (0..m).map(|i| self.entries[i * n + j]).sum();
            if s != self.margins.col[j] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Apply a swap move, returning `None` when an entry would go negative.
    ///
    /// The move adds `sign` at `(r1, c1)` and `(r2, c2)` and subtracts it at
    /// `(r1, c2)` and `(r2, c1)`, so margins are preserved by construction.
    pub fn try_swap(&self, mv: &SwapMove) -> Result<Option<Table>> {
        let (m, n) = (self.m(), self.n());
        let (i, i2) = mv.rows;
        let (j, j2) = mv.cols;
        if i >= m || i2 >= m || j >= n || j2 >= n {
            return Err(Error::IndexOutOfRange(format!(
                "move ({i},{i2})x({j},{j2}) on a {m}x{n} table"
            )));
        }
        let (inc_a, inc_b, dec_a, dec_b) = if mv.sign > 0 {
            ((i, j), (i2, j2), (i, j2), (i2, j))
        } else {
            ((i, j2), (i2, j), (i, j), (i2, j2))
        };
        if self.get(dec_a.0, dec_a.1) == 0 || self.get(dec_b.0, dec_b.1) == 0 {
            return Ok(None);
        }
        let mut entries = self.entries.clone();
        entries[inc_a.0 * n + inc_a.1] += 1;
        entries[inc_b.0 * n + inc_b.1] += 1;
        entries[dec_a.0 * n + dec_a.1] -= 1;
        entries[dec_b.0 * n + dec_b.1] -= 1;
        Ok(Some(Table {
            entries,
            margins: self.margins.clone(),
        }))
    }

    /// Transpose; margins swap accordingly.
    pub fn transposed(&self) -> Table {
        let (m, n) = (self.m(), self.n());
        let mut entries = vec![0u64; m * n];
        for i in 0..m {
            for j in 0..n {
                entries[j * m + i] = self.entries[i * n + j];
            }
        }
        Table {
            entries,
            margins: self.margins.transposed(),
        }
    }

    /// For a table with uniform margins Cn: the first-row tail sum minus its
    /// mean, `Σ_{j≥2} X_{1j} − C(n−1)`. Equal to `C − X_{11}` exactly because
    /// the first row sums to `Cn`.
    pub fn row_sum_identity_residual(&self, c: u64) -> i64 {
        let n = self.n() as u64;
        let tail: u64 = self.entries[1..self.n()].iter().sum();
        tail as i64 - (c * (n - 1)) as i64
    }

    // ---- serialization ----------------------------------------------------

    /// CSV: one line per row, comma-separated integers.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let mut out = String::new();
        for i in 0..self.m() {
            let line: Vec<String> = self.entries[i * n..(i + 1) * n]
                .iter()
                .map(|e| e.to_string())
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse CSV written by [`Table::to_csv`]; margins are computed.
    pub fn from_csv(text: &str) -> Result<Table> {
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<u64>> = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 1)))
                })
                .collect();
            rows.push(row?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("empty CSV".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("ragged CSV rows".into()));
        }
        let m = rows.len();
        Table::from_entries(m, n, rows.concat())
    }

    /// JSON object `{m, n, row, col, entries}` with nested entry rows.
    pub fn to_json(&self) -> serde_json::Value {
        let n = self.n();
        let entries: Vec<Vec<u64>> = (0..self.m())
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect();
        serde_json::json!({
            "m": self.m(),
            "n": n,
            "row": self.margins.row,
            "col": self.margins.col,
            "entries": entries,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Table> {
        #[derive(Deserialize)]
        struct Wire {
            m: usize,
            n: usize,
            row: Vec<u64>,
            col: Vec<u64>,
            entries: Vec<Vec<u64>>,
        }
        let w: Wire = serde_json::from_value(v.clone())?;
        if w.entries.len() != w.m || w.entries.iter().any(|r| r.len() != w.n) {
            return Err(Error::DimensionMismatch("entries shape".into()));
        }
        Table::from_parts(w.entries.concat(), Margins::new(w.row, w.col)?)
    }

    /// Binary frame: `m`, `n` as little-endian u32, then entries row-major
    /// as little-endian u32.
    pub fn write_frame<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(&(self.m() as u32).to_le_bytes())?;
        w.write_all(&(self.n() as u32).to_le_bytes())?;
        for &e in &self.entries {
            let e32 = u32::try_from(e)
                .map_err(|_| Error::Domain(format!("entry {e} does not fit in u32")))?;
            w.write_all(&e32.to_le_bytes())?;
        }
        Ok(())
    }

    /// Read one frame written by [`Table::write_frame`]; `Ok(None)` at EOF.
    pub fn read_frame<R: Read>(r: &mut R) -> Result<Option<Table>> {
        let mut head = [0u8; 4];
        match r.read_exact(&mut head) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => return Ok(None),
            Err(e) => return Err(e.into()),
        }
        let m = u32::from_le_bytes(head) as usize;
        r.read_exact(&mut head)?;
        let n = u32::from_le_bytes(head) as usize;
        if m == 0 || n == 0 || m.saturating_mul(n) > (1 << 28) {
            return Err(Error::Parse(format!("implausible frame header {m}x{n}")));
        }
        let mut entries = Vec::with_capacity(m * n);
        for _ in 0..m * n {
            r.read_exact(&mut head)?;
            entries.push(u32::from_le_bytes(head) as u64);
        }
        Ok(Some(Table::from_entries(m, n, entries)?))
    }
}

/// Margin-preserving elementary move on a 2x2 minor.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SwapMove {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
    pub sign: i8,
}

impl SwapMove {
    pub fn new(rows: (usize, usize), cols: (usize, usize), sign: i8) -> Result<Self> {
        if rows.0 == rows.1 || cols.0 == cols.1 {
            return Err(Error::Domain("swap indices must be distinct".into()));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::Domain("sign must be +1 or -1".into()));
        }
        Ok(SwapMove { rows, cols, sign })
    }

    pub fn inverse(&self) -> SwapMove {
        SwapMove {
            rows: self.rows,
            cols: self.cols,
            sign: -self.sign,
        }
    }
}
