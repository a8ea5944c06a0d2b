use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expansion_certifier::ExpansionCertificate;
use crate::interval::Interval;
use crate::map_model::{monotone_branches, PiecewiseMap, DEFAULT_WORD_BUDGET};
use crate::scalar::{fmt_rational, int, to_f64, Rational};

#[derive(Clone, Debug)]
pub struct UlamOptions {
    pub bins: usize,
    pub max_iter: usize,
    /// Target for both the step and the invariance residual.
    pub tol: f64,
}

impl UlamOptions {
    pub fn new(bins: usize) -> Self {
        UlamOptions { bins, max_iter: 100_000, tol: 1e-12 }
    }
}

#[derive(Clone, Debug)]
pub struct UlamDensity {
    pub edges: Vec<Rational>,
    pub masses: Vec<f64>,
    pub density: Vec<f64>,
    /// `‖v_{t+1} - v_t‖₁` at the last step.
    pub step_residual: f64,
    /// `‖vP - v‖₁` for the returned masses.
    pub invariance_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub certificate_n: usize,
}

impl UlamDensity {
    pub fn bins(&self) -> usize {
        self.masses.len()
    }

    pub fn bin(&self, i: usize) -> (&Rational, &Rational) {
        (&self.edges[i], &self.edges[i + 1])
    }

    /// Density at `x`, with bins left-closed and the last bin closed.
    pub fn density_at(&self, x: f64) -> f64 {
        let lo = to_f64(&self.edges[0]);
        let hi = to_f64(&self.edges[self.bins()]);
        if !(lo..=hi).contains(&x) {
            return 0.0;
        }
        let i = ((x - lo) / (hi - lo) * self.bins() as f64) as usize;
        self.density[i.min(self.bins() - 1)]
    }
}

/// Bin edges and sparse rows.
pub type TransferMatrix = (Vec<Rational>, Vec<Vec<(usize, Rational)>>);

/// Sparse transfer matrix: row `i` lists `(j, |B_i ∩ f^{-1}(B_j)| / |B_i|)`
/// for `m` equal bins. Entries are exact, so rows sum to exactly 1.
pub fn transfer_matrix(f: &PiecewiseMap, m: usize) -> Result<TransferMatrix> {
    f.require_affine()?;
    if m == 0 {
        return Err(Error::InvalidArgument("bin count must be positive".into()));
    }
    let (lo, hi) = (f.lo().clone(), f.hi().clone());
    let width = (&hi - &lo) / int(m as i64);
    let edges: Vec<Rational> = (0..=m).map(|i| &lo + &width * int(i as i64)).collect();
    let index_of = |x: &Rational| -> usize {
        let k = ((x - &lo) / &width).floor().to_integer();
        usize::try_from(k).unwrap_or(0).min(m - 1)
    };
    let rows = (0..m)
        .into_par_iter()
        .map(|i| -> Result<Vec<(usize, Rational)>> {
            let bin = Interval::closed(edges[i].clone(), edges[i + 1].clone());
            let mut row: Vec<(usize, Rational)> = Vec::new();
            for b in 0..f.branch_count() {
                let piece = bin.intersect(&f.branch_domain(b));
                if piece.is_empty() || piece.is_degenerate() {
                    continue;
                }
                let (s, t) = f.affine(b)?;
                let image = piece.affine_image(s, t);
                let share = piece.length() / bin.length() / image.length();
                for j in index_of(&image.lo)..=index_of(&image.hi) {
                    let target = Interval::closed(edges[j].clone(), edges[j + 1].clone());
                    let w = image.intersect(&target).length();
                    if w.is_zero() {
                        continue;
                    }
                    let p = w * &share;
                    match row.iter_mut().find(|(k, _)| *k == j) {
                        Some(entry) => entry.1 += p,
                        None => row.push((j, p)),
                    }
                }
            }
            row.sort_by_key(|(j, _)| *j);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((edges, rows))
}

fn step(rows: &[Vec<(usize, f64)>], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (row, &vi) in rows.iter().zip(v) {
        for &(j, p) in row {
            out[j] += vi * p;
        }
    }
    out
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Ulam estimate of the invariant density. Refuses without a certificate
/// and re-checks `|Df^N| > 1` for the certificate's `N` before computing.
pub fn ulam_acip(f: &PiecewiseMap, opts: &UlamOptions, certificate: Option<&ExpansionCertificate>) -> Result<UlamDensity> {
    let cert = certificate
        .ok_or_else(|| Error::Precondition("no expansion certificate: |Df^N| > 1 is not established".into()))?;
    f.require_affine()?;
    let worst = monotone_branches(f, cert.n, DEFAULT_WORD_BUDGET)?
        .into_iter()
        .map(|b| b.slope.abs())
        .min()
        .expect("branches cover the domain");
    if worst <= Rational::one() || worst != cert.min_expansion {
        return Err(Error::Precondition(format!(
            "certificate does not hold: min |Df^{}| is {}",
            cert.n,
            fmt_rational(&worst)
        )));
    }

    let (edges, exact) = transfer_matrix(f, opts.bins)?;
    let rows: Vec<Vec<(usize, f64)>> =
        exact.iter().map(|r| r.iter().map(|(j, p)| (*j, to_f64(p))).collect()).collect();
    let m = opts.bins;
    let mut v = vec![1.0 / m as f64; m];
    let mut step_residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let mut next = step(&rows, &v);
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        step_residual = l1(&next, &v);
        v = next;
        iterations += 1;
        if step_residual < opts.tol {
            break;
        }
    }
    let invariance_residual = l1(&step(&rows, &v), &v);
    let converged = step_residual < opts.tol && invariance_residual < opts.tol;
    let density = v
        .iter()
        .enumerate()
        .map(|(i, mass)| mass / to_f64(&(&edges[i + 1] - &edges[i])))
        .collect();
    Ok(UlamDensity {
        edges,
        masses: v,
        density,
        step_residual,
        invariance_residual,
        iterations,
        converged,
        certificate_n: cert.n,
    })
}
