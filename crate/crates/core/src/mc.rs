//! Monte Carlo oracle: GUE spectra from the β = 2 tridiagonal model.
//!
//! A GUE(N) spectrum under the 1/N normalisation has the law of the
//! eigenvalues of `H / sqrt(N)` where `H` is symmetric tridiagonal with
//! standard normal diagonal and subdiagonal entries `χ_{2(N-i)} / sqrt(2)`,
//! `i = 1..N-1`. Only a real tridiagonal eigensolver is needed.
//!
//! Every row draws from its own ChaCha8 stream: the generator is seeded with
//! `seed_from_u64(seed)` and then switched to stream `row`, so a batch is
//! reproducible bit for bit regardless of how rows are scheduled.
//!
//! # Batch files
//!
//! CSV: one spectrum per line, ascending, comma separated, no header.
//!
//! Binary: the magic bytes `GUE1`, then `n`, `count` and `seed` as
//! little-endian `u64`, then `count × n` little-endian `f64` values row by row.

use crate::error::{Error, Result};
use crate::hermite::EnsembleSize;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::io::{BufRead, Read, Write};

const QL_ITERATIONS: usize = 60;

/// Eigenvalues of the symmetric tridiagonal matrix with the given diagonal
/// and subdiagonal, sorted ascending.
///
/// Implicit QL with Wilkinson-style shifts; each eigenvalue gets at most
/// 60 sweeps.
pub fn tridiag_eigs(diag: &[f64], subdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if subdiag.len() + 1 != n {
        return Err(Error::InvalidParameter(format!(
            "subdiagonal length {} does not match dimension {n}",
            subdiag.len()
        )));
    }
    if diag.iter().chain(subdiag).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("tridiagonal entry"));
    }
    let mut d = diag.to_vec();
    let mut e: Vec<f64> = subdiag.iter().copied().chain(std::iter::once(0.0)).collect();

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == QL_ITERATIONS {
                return Err(Error::EigenNoConvergence {
                    index: l,
                    budget: QL_ITERATIONS,
                });
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// `count` independent ordered GUE(N) spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub n: EnsembleSize,
    pub count: usize,
    pub seed: u64,
    /// Row-major `count × N`, each row ascending.
    pub eigenvalues: Vec<f64>,
}

impl SampleBatch {
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.eigenvalues.chunks_exact(self.n.as_usize())
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n.as_usize();
        &self.eigenvalues[i * n..(i + 1) * n]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"GUE1")?;
        out.write_all(&u64::from(self.n.get()).to_le_bytes())?;
        out.write_all(&(self.count as u64).to_le_bytes())?;
        out.write_all(&self.seed.to_le_bytes())?;
        for v in &self.eigenvalues {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != b"GUE1" {
            return Err(Error::Parse {
                line: 0,
                message: "missing GUE1 magic".into(),
            });
        }
        let mut word = [0u8; 8];
        let mut next_u64 = |input: &mut R| -> Result<u64> {
            input.read_exact(&mut word)?;
            Ok(u64::from_le_bytes(word))
        };
        let n = next_u64(&mut input)?;
        let count = next_u64(&mut input)? as usize;
        let seed = next_u64(&mut input)?;
        let n = u32::try_from(n)
            .map_err(|_| Error::InvalidParameter(format!("ensemble size {n} too large")))
            .and_then(EnsembleSize::new)?;
        let mut eigenvalues = Vec::with_capacity(count * n.as_usize());
        let mut buf = [0u8; 8];
        for _ in 0..count * n.as_usize() {
            input.read_exact(&mut buf)?;
            eigenvalues.push(f64::from_le_bytes(buf));
        }
        Ok(Self {
            n,
            count,
            seed,
            eigenvalues,
        })
    }

    /// Reads a CSV batch; the seed is not stored in CSV and is set to 0.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut eigenvalues = Vec::new();
        let mut width = None;
        let mut count = 0;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            match width {
                None => width = Some(row.len()),
                Some(w) if w != row.len() => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("expected {w} values, found {}", row.len()),
                    })
                }
                _ => {}
            }
            eigenvalues.extend(row);
            count += 1;
        }
        let n = EnsembleSize::new(width.unwrap_or(0) as u32)?;
        Ok(Self {
            n,
            count,
            seed: 0,
            eigenvalues,
        })
    }
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

fn sample_row(n: usize, seed: u64, row: usize) -> Result<Vec<f64>> {
    let mut rng = row_rng(seed, row);
    let diag: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let sub: Vec<f64> = (1..n)
        .map(|i| {
            let dof = 2 * (n - i);
            let ss: f64 = (0..dof)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z * z
                })
                .sum();
            (0.5 * ss).sqrt()
        })
        .collect();
    let scale = (n as f64).sqrt().recip();
    let mut eig = tridiag_eigs(&diag, &sub).map_err(|e| Error::Sampling {
        sample: row,
        source: Box::new(e),
    })?;
    eig.iter_mut().for_each(|v| *v *= scale);
    Ok(eig)
}

pub fn sample_spectra(n: EnsembleSize, count: usize, seed: u64) -> Result<SampleBatch> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be positive".into()));
    }
    let rows: Result<Vec<Vec<f64>>> = (0..count)
        .into_par_iter()
        .map(|row| sample_row(n.as_usize(), seed, row))
        .collect();
    Ok(SampleBatch {
        n,
        count,
        seed,
        eigenvalues: rows?.concat(),
    })
}

/// Fraction of spectra whose largest eigenvalue is at least `threshold`.
pub fn edge_tail_frequency(batch: &SampleBatch, threshold: f64) -> f64 {
    let hits = batch
        .rows()
        .filter(|row| row.last().is_some_and(|&m| m >= threshold))
        .count();
    hits as f64 / batch.count as f64
}

/// Upper bound `N e^{-N r²/2}` on `P(λ_max ≥ 2 + r)`, `r ≥ 0`.
pub fn edge_upper_bound(n: EnsembleSize, threshold: f64) -> f64 {
    let r = (threshold - 2.0).max(0.0);
    let nf = n.as_f64();
    (nf * (-0.5 * nf * r * r).exp()).min(1.0)
}

/// Lower bound `sqrt(N/2π) e^{-N(R+1)²/2}` on `P(λ_max ≥ R)`, from the first
/// diagonal entry alone.
pub fn edge_lower_bound(n: EnsembleSize, threshold: f64) -> f64 {
    let nf = n.as_f64();
    (nf / (2.0 * std::f64::consts::PI)).sqrt() * (-0.5 * nf * (threshold + 1.0).powi(2)).exp()
}

/// Empirical `(1/N) Σ λ^p` averaged over rows, with its standard error.
pub fn empirical_moment(batch: &SampleBatch, p: i32) -> (f64, f64) {
    let nf = batch.n.as_f64();
    let stats: Vec<f64> = batch
        .rows()
        .map(|row| row.iter().map(|v| v.powi(p)).sum::<f64>() / nf)
        .collect();
    mean_and_stderr(&stats)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    (mean, (var / m).sqrt())
}

/// Fraction of all eigenvalues falling in each of `bins` equal bins over
/// `[lo, hi)`.
pub fn histogram(batch: &SampleBatch, lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0usize; bins];
    let width = (hi - lo) / bins as f64;
    for &v in &batch.eigenvalues {
        if v >= lo && v < hi {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let total = batch.eigenvalues.len() as f64;
    counts.into_iter().map(|c| c as f64 / total).collect()
}
