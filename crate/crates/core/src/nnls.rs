//! Lawson-Hanson active-set solver for `min ||A z - b||` subject to `z >= 0`.

use crate::error::{GeomError, Result};
use crate::vectorspace::{dot, least_squares};

#[derive(Debug, Clone)]
pub(crate) struct NnlsSolution {
    pub z: Vec<f64>,
    pub residual_norm: f64,
}

fn residual(columns: &[Vec<f64>], b: &[f64], z: &[f64]) -> Vec<f64> {
    let mut r = b.to_vec();
    for (col, &zj) in columns.iter().zip(z) {
        if zj != 0.0 {
            for (ri, ci) in r.iter_mut().zip(col) {
                *ri -= zj * ci;
            }
        }
    }
    r
}

/// `columns` holds the columns of `A`, each of length `b.len()`.
/// `max_iterations` caps the total number of least-squares solves.
pub(crate) fn nnls(columns: &[Vec<f64>], b: &[f64], max_iterations: usize) -> Result<NnlsSolution> {
    let n = columns.len();
    let mut z = vec![0.0; n];
    let mut passive = vec![false; n];
    let mut rejected = vec![false; n];
    let scale =
        columns.iter().map(|c| dot(c, c).sqrt()).fold(0.0, f64::max) * (1.0 + dot(b, b).sqrt());
    let dual_tol = 1e-14 * scale.max(f64::MIN_POSITIVE);
    let mut iterations = 0usize;

    loop {
        let r = residual(columns, b, &z);
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !rejected[j])
            .map(|j| (j, dot(&columns[j], &r)))
            .filter(|&(_, w)| w > dual_tol)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((entering, _)) = candidate else {
            break;
        };
        passive[entering] = true;
        let mut first_pass = true;

        loop {
            iterations += 1;
            if iterations > max_iterations {
                return Err(GeomError::MaxIterationsExceeded(max_iterations));
            }
            let active: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let cols: Vec<&[f64]> = active.iter().map(|&j| columns[j].as_slice()).collect();
            let Some(sol) = least_squares(&cols, b) else {
                // Entering column is numerically dependent on the passive set.
                passive[entering] = false;
                rejected[entering] = true;
                break;
            };
            if first_pass {
                let pos = active
                    .iter()
                    .position(|&j| j == entering)
                    .expect("entering is passive");
                if sol[pos] <= 0.0 {
                    passive[entering] = false;
                    rejected[entering] = true;
                    break;
                }
                first_pass = false;
            }
            if sol.iter().all(|&s| s > 0.0) {
                z.iter_mut().for_each(|v| *v = 0.0);
                for (&j, &s) in active.iter().zip(&sol) {
                    z[j] = s;
                }
                rejected.iter_mut().for_each(|f| *f = false);
                break;
            }
            // Step back toward the feasible region until a passive weight hits zero.
            let alpha = active
                .iter()
                .zip(&sol)
                .filter(|&(_, &s)| s <= 0.0)
                .map(|(&j, &s)| z[j] / (z[j] - s))
                .fold(f64::INFINITY, f64::min);
            for (&j, &s) in active.iter().zip(&sol) {
                z[j] += alpha * (s - z[j]);
            }
            for &j in &active {
                if z[j] <= 1e-15 * (1.0 + z[j].abs()) {
                    z[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }

    let r = residual(columns, b, &z);
    Ok(NnlsSolution {
        residual_norm: dot(&r, &r).sqrt(),
        z,
    })
}
