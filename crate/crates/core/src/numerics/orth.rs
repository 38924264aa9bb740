//! Orthonormalization of small complex frames.

use super::cmatrix::CMatrix;
use crate::{Error, Result, C64};

/// Condition bound above which a frame counts as rank deficient.
const COND_LIMIT: f64 = 1e12;

/// Thin QR of an `n x k` frame by modified Gram–Schmidt with one
/// reorthogonalization pass; `F = Q R`, diagonal of `R` real positive.
pub fn orthonormalize(f: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = f.rows();
    let k = f.cols();
    let mut q = f.clone();
    let mut r = CMatrix::zeros(k, k);
    let scale = f.norm().max(f64::MIN_POSITIVE);
    for j in 0..k {
        for _pass in 0..2 {
            for i in 0..j {
                let mut d = C64::new(0.0, 0.0);
                for t in 0..n {
                    d += q[(t, i)].conj() * q[(t, j)];
                }
                for t in 0..n {
                    let qi = q[(t, i)];
                    q[(t, j)] -= d * qi;
                }
                r[(i, j)] += d;
            }
        }
        let nrm = (0..n).map(|t| q[(t, j)].norm_sqr()).sum::<f64>().sqrt();
        if !(nrm > scale / COND_LIMIT) {
            return Err(Error::RankDeficient(j));
        }
        for t in 0..n {
            q[(t, j)] /= nrm;
        }
        r[(j, j)] = C64::new(nrm, 0.0);
    }
    Ok((q, r))
}

/// `max |Q*Q - I|`.
pub fn orthonormality_drift(q: &CMatrix) -> f64 {
    let g = &q.adjoint() * q;
    let e = &g - &CMatrix::identity(q.cols());
    e.max_abs()
}
