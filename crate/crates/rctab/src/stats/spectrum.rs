//! Singular spectra of centered tables and their semicircle-type limit.
//!
//! The pipeline: center a square table by its exact mean C, scale by
//! 1/√n, form the symmetric product `A·Aᵀ`, and diagonalize it with cyclic
//! Jacobi rotations. Singular values are the square roots of the
//! eigenvalues. The limiting law has density
//! `√(4C(1+C) − y²) / (πC(1+C))` on `[0, 2√(C(C+1))]`; the matching
//! eigenvalue-side density lives on `[0, 4C(1+C)]` and integrates against
//! the change of variables `x = y²`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sampling::{swap_chain_fold, ChainConfig, GeometricModel};
use crate::seed::Seed;
use crate::table::{Table, UniformMargins};

// ---------------------------------------------------------------------------
// Jacobi eigenvalues
// ---------------------------------------------------------------------------

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotation sweeps,
/// ascending. Convergence: off-diagonal Frobenius norm below 1e-12 of the
/// total Frobenius norm (or an exact zero matrix).
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for an {n}x{n} matrix",
            a.len()
        )));
    }
    let total_sq: f64 = a.iter().map(|x| x * x).sum();
    if total_sq == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let tol_sq = total_sq * 1e-24; // (1e-12 of the norm)^2
    let max_sweeps = 60;
    for sweep in 0..=max_sweeps {
        let off_sq: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += a[p * n + q] * a[p * n + q];
                }
            }
            2.0 * s
        };
        if off_sq <= tol_sq {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eig);
        }
        if sweep == max_sweeps {
            return Err(Error::NoConvergence {
                residual: (off_sq / total_sq).sqrt(),
                sweeps: max_sweeps,
            });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rows/cols p and q: A <- J^T A J with J the (p,q) rotation
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    unreachable!("loop returns or errors");
}

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Sorted singular values of a centered, 1/√n-scaled square matrix.
#[derive(Clone, Debug, Serialize)]
pub struct Spectrum {
    /// Ascending singular values σ_1 ≤ … ≤ σ_n.
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Σσ², which must match the squared Frobenius norm of the scaled
    /// matrix.
    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Two-column CSV `index,sigma`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,sigma\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, v));
        }
        out
    }
}

/// Singular values of `(entries − center)/√n` for a square `n×n` entry
/// buffer, via the symmetric product and Jacobi rotations.
pub fn spectrum_of_centered(entries: &[u64], n: usize, center: f64) -> Result<Spectrum> {
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "{} entries for an {n}x{n} matrix",
            entries.len()
        )));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let a: Vec<f64> = entries
        .iter()
        .map(|&e| (e as f64 - center) * scale)
        .collect();
    // b = a * a^T (symmetric PSD)
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[i * n + k] * a[j * n + k];
            }
            b[i * n + j] = acc;
            b[j * n + i] = acc;
        }
    }
    let eig = jacobi_eigenvalues(b, n)?;
    Ok(Spectrum {
        values: eig.iter().map(|&l| l.max(0.0).sqrt()).collect(),
    })
}

/// Singular spectrum of a square table centered by the exact mean C.
pub fn singular_spectrum(t: &Table, c: u64) -> Result<Spectrum> {
    if t.m() != t.n() {
        return Err(Error::Domain(format!(
            "spectrum needs a square table, got {}x{}",
            t.m(),
            t.n()
        )));
    }
    spectrum_of_centered(t.entries(), t.n(), c as f64)
}

// ---------------------------------------------------------------------------
// Limit law
// ---------------------------------------------------------------------------

/// Right edge of the singular-value support, `2√(C(C+1))`.
pub fn mp_edge(c: u64) -> f64 {
    2.0 * ((c * (c + 1)) as f64).sqrt()
}

/// Limiting singular-value density `√(4C(1+C) − y²)/(πC(1+C))` on
/// `[0, 2√(C(C+1))]`.
pub fn mp_density(c: u64, y: f64) -> f64 {
    let a2 = (c * (c + 1)) as f64;
    if y < 0.0 || y > 2.0 * a2.sqrt() {
        return 0.0;
    }
    // the max guards rounding of y^2 right at the support edge
    (4.0 * a2 - y * y).max(0.0).sqrt() / (std::f64::consts::PI * a2)
}

/// Matching eigenvalue-side density `√((4C(1+C) − x)·x)/(2πC(1+C)·x)` on
/// `[0, 4C(1+C)]`; related to [`mp_density`] by `x = y²`.
pub fn mp_eigen_density(c: u64, x: f64) -> f64 {
    let a2 = (c * (c + 1)) as f64;
    let edge = 4.0 * a2;
    if x <= 0.0 || x > edge {
        return 0.0;
    }
    ((edge - x).max(0.0) / x).sqrt() / (2.0 * std::f64::consts::PI * a2)
}

/// CDF of [`mp_density`] by adaptive quadrature (absolute error ~1e-9).
pub fn mp_cdf(c: u64, y: f64) -> f64 {
    let edge = mp_edge(c);
    if y <= 0.0 {
        return 0.0;
    }
    let upper = y.min(edge);
    let v = adaptive_simpson(&|t| mp_density(c, t), 0.0, upper, 1e-10, 40);
    v.clamp(0.0, 1.0)
}

/// CDF of [`mp_eigen_density`] by adaptive quadrature. The integrand has a
/// square-root singularity at 0, handled by an analytic head on `[0, ε]`.
pub fn mp_eigen_cdf(c: u64, x: f64) -> f64 {
    let a2 = (c * (c + 1)) as f64;
    let edge = 4.0 * a2;
    if x <= 0.0 {
        return 0.0;
    }
    let upper = x.min(edge);
    let eps = 1e-9_f64.min(upper / 2.0);
    // integral of sqrt((edge - t)/t)/(2 pi a2) over [0, eps], expanding
    // sqrt(edge - t) = sqrt(edge)(1 - t/(2 edge) + O(t^2)):
    let head = (2.0 * (edge * eps).sqrt() - eps * (eps / edge).sqrt() / 3.0)
        / (2.0 * std::f64::consts::PI * a2);
    let body = adaptive_simpson(&|t| mp_eigen_density(c, t), eps, upper, 1e-10, 48);
    (head + body).clamp(0.0, 1.0)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

// ---------------------------------------------------------------------------
// Empirical-vs-limit statistics
// ---------------------------------------------------------------------------

/// One-sample Kolmogorov–Smirnov statistic of sorted values against a
/// continuous CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        worst = worst.max((f - i as f64 / n).abs());
        worst = worst.max((f - (i as f64 + 1.0) / n).abs());
    }
    worst
}

/// `∫ |F_emp − F| dy` against a continuous CDF, by fine trapezoid over the
/// union of sample points and a uniform grid.
pub fn w1_to_cdf(sorted: &[f64], cdf: impl Fn(f64) -> f64, upper: f64) -> f64 {
    let n = sorted.len() as f64;
    let hi = upper.max(sorted.last().copied().unwrap_or(0.0));
    let mut grid: Vec<f64> = (0..=2000).map(|i| hi * i as f64 / 2000.0).collect();
    grid.extend_from_slice(sorted);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let femp = |y: f64| sorted.partition_point(|&s| s <= y) as f64 / n;
    let mut acc = 0.0;
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        // F_emp is constant on (a, b)
        let diff_a = (femp(mid) - cdf(a)).abs();
        let diff_m = (femp(mid) - cdf(mid)).abs();
        let diff_b = (femp(mid) - cdf(b)).abs();
        acc += (b - a) / 6.0 * (diff_a + 4.0 * diff_m + diff_b);
    }
    acc
}

/// Where the sampled tables for an ESD experiment come from.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EsdSource {
    /// Swap-chain samples of the uniform law on the table class.
    Chain,
    /// Control: iid Geom(C) entries with no margin conditioning (the
    /// classical covariance-matrix setting).
    IidControl,
}

#[derive(Clone, Debug, Serialize)]
pub struct EsdReport {
    pub n: u64,
    pub c: u64,
    pub source: EsdSource,
    pub samples: u64,
    /// KS of the first sample's spectrum against the limit CDF.
    pub ks_first: f64,
    /// Mean per-sample KS.
    pub ks_mean: f64,
    /// KS of all singular values pooled across samples.
    pub ks_pooled: f64,
    pub w1_first: f64,
    pub w1_mean: f64,
    /// Σσ² / Frobenius² consistency worst case across samples.
    pub frobenius_worst_rel: f64,
}

/// Compare empirical singular spectra at size n against the limit law.
pub fn verify_esd(
    n: u64,
    c: u64,
    samples: u64,
    source: EsdSource,
    seed: Seed,
) -> Result<EsdReport> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let nn = n as usize;
    let entry_sets: Vec<Vec<u64>> = match source {
        EsdSource::Chain => {
            let margins = UniformMargins::new(nn, c)?.margins();
            let cfg = ChainConfig::default_for(&margins).with_samples(samples);
            swap_chain_fold(
                &margins,
                &cfg,
                seed.derive(&format!("esd/{n}")),
                Vec::new(),
                |acc: &mut Vec<Vec<u64>>, entries| acc.push(entries.to_vec()),
            )?
        }
        EsdSource::IidControl => {
            let model = GeometricModel::uniform(nn, c);
            let seed = seed.derive(&format!("esd-iid/{n}"));
            (0..samples)
                .map(|k| {
                    crate::sampling::sample_geometric_matrix(
                        &model,
                        seed.derive(&format!("sample/{k}")),
                    )
                })
                .collect()
        }
    };

    let mut spectra = Vec::with_capacity(entry_sets.len());
    let mut frobenius_worst_rel = 0.0f64;
    for entries in &entry_sets {
        let spectrum = spectrum_of_centered(entries, nn, c as f64)?;
        let fro: f64 = entries
            .iter()
            .map(|&e| (e as f64 - c as f64).powi(2) / n as f64)
            .sum();
        if fro > 0.0 {
            frobenius_worst_rel =
                frobenius_worst_rel.max((spectrum.sum_sq() - fro).abs() / fro);
        }
        spectra.push(spectrum);
    }

    let cdf = |y: f64| mp_cdf(c, y);
    let edge = mp_edge(c);
    let ks: Vec<f64> = spectra.iter().map(|s| ks_statistic(&s.values, cdf)).collect();
    let w1: Vec<f64> = spectra
        .iter()
        .map(|s| w1_to_cdf(&s.values, cdf, edge))
        .collect();
    let mut pooled: Vec<f64> = spectra.iter().flat_map(|s| s.values.clone()).collect();
    pooled.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ks_pooled = ks_statistic(&pooled, cdf);

    Ok(EsdReport {
        n,
        c,
        source,
        samples,
        ks_first: ks[0],
        ks_mean: ks.iter().sum::<f64>() / ks.len() as f64,
        ks_pooled,
        w1_first: w1[0],
        w1_mean: w1.iter().sum::<f64>() / w1.len() as f64,
        frobenius_worst_rel,
    })
}
