//! Eigendecomposition of small (n <= 6) complex matrices.
//!
//! The characteristic polynomial is expanded exactly by cofactors, its roots
//! found by Aberth–Ehrlich iteration and then polished against the matrix by
//! two-sided inverse iteration with Rayleigh quotients. Clusters of nearly
//! equal eigenvalues are returned as one invariant subspace.

use super::cmatrix::{vdot, vnorm, CMatrix};
use crate::{Error, Result, C64};

pub const MAX_DIM: usize = 6;

#[derive(Clone, Debug)]
pub struct EigenDecomp {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors (for clusters: an orthonormal basis of the
    /// invariant subspace).
    pub right: Vec<Vec<C64>>,
    /// Left vectors with `<w_i, v_j> = delta_ij`.
    pub left: Vec<Vec<C64>>,
    /// Index clusters, each sorted, covering `0..n`.
    pub groups: Vec<Vec<usize>>,
}

impl EigenDecomp {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Coefficients `c[0..=n]` of `det(zI - M) = sum c_k z^k`.
pub fn char_poly(m: &CMatrix) -> Vec<C64> {
    let n = m.rows();
    assert_eq!(n, m.cols());
    assert!(n <= MAX_DIM);
    let full = (1usize << n) - 1;
    let mut memo: Vec<Option<Vec<C64>>> = vec![None; full + 1];
    memo[0] = Some(vec![C64::new(1.0, 0.0)]);
    // subsets in order of increasing popcount so that children are ready
    let mut masks: Vec<usize> = (1..=full).collect();
    masks.sort_by_key(|s| s.count_ones());
    for mask in masks {
        let size = mask.count_ones() as usize;
        let row = n - size;
        let mut acc = vec![C64::new(0.0, 0.0); size + 1];
        let mut before = 0usize;
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let sub = memo[mask & !(1 << j)].as_ref().unwrap();
            let sign = if before.is_multiple_of(2) { 1.0 } else { -1.0 };
            before += 1;
            // entry (row, j) of zI - M
            let c0 = -m[(row, j)] * sign;
            let c1 = if row == j { sign } else { 0.0 };
            for (k, &s) in sub.iter().enumerate() {
                acc[k] += c0 * s;
                if c1 != 0.0 {
                    acc[k + 1] += s * c1;
                }
            }
        }
        memo[mask] = Some(acc);
    }
    memo[full].take().unwrap()
}

fn horner(c: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Roots of a polynomial with nonzero leading coefficient (ascending order of
/// coefficients) by Aberth–Ehrlich iteration.
pub fn poly_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return vec![];
    }
    let lead = coeffs[n];
    let c: Vec<C64> = coeffs.iter().map(|&a| a / lead).collect();
    if n == 1 {
        return vec![-c[0]];
    }
    // Fujiwara bound for the initial circle
    let mut rad = 0.0f64;
    for (k, ck) in c.iter().enumerate().take(n) {
        rad = rad.max(ck.norm().powf(1.0 / (n - k) as f64));
    }
    if rad == 0.0 {
        return vec![C64::new(0.0, 0.0); n];
    }
    let center = -c[n - 1] / n as f64;
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + C64::from_polar(rad, th)
        })
        .collect();
    for _ in 0..800 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = z[k] - z[j];
                    if d.norm() > 0.0 {
                        s += d.inv();
                    }
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[k] -= w;
                moved = moved.max(w.norm() / (1.0 + z[k].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

fn start_vector(n: usize, salt: usize) -> Vec<C64> {
    (0..n)
        .map(|i| {
            let t = (i + 1) as f64 * 0.754_877_666 + salt as f64 * 0.569_840_29;
            C64::new(1.0 + 0.5 * (t * 3.1).sin(), 0.5 * (t * 1.7).cos())
        })
        .collect()
}

fn inverse_iteration(m: &CMatrix, lam: C64, mnorm: f64, salt: usize, iters: usize) -> Vec<C64> {
    let lu = m.shift(lam).lu();
    let floor = f64::EPSILON * (mnorm + lam.norm()).max(f64::MIN_POSITIVE);
    let mut v = start_vector(m.rows(), salt);
    for _ in 0..iters {
        let mut x = lu.solve_regularized(&v, floor);
        let nx = vnorm(&x);
        if !(nx.is_finite() && nx > 0.0) {
            break;
        }
        x.iter_mut().for_each(|z| *z /= nx);
        v = x;
    }
    v
}

fn residual(m: &CMatrix, lam: C64, v: &[C64]) -> f64 {
    let mv = m.mul_vec(v);
    mv.iter().zip(v).map(|(a, b)| (a - lam * b).norm_sqr()).sum::<f64>().sqrt()
}

/// Null space of dimension `dim` of a square matrix, by Gaussian elimination
/// with full pivoting stopped after `n - dim` pivots. Orthonormal columns.
fn forced_null_space(k: &CMatrix, dim: usize) -> CMatrix {
    let n = k.rows();
    let rank = n - dim;
    let mut a = k.clone();
    let mut colperm: Vec<usize> = (0..n).collect();
    for s in 0..rank {
        let (mut pi, mut pj, mut best) = (s, s, -1.0);
        for i in s..n {
            for j in s..n {
                let v = a[(i, j)].norm();
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        for j in 0..n {
            let t = a[(s, j)];
            a[(s, j)] = a[(pi, j)];
            a[(pi, j)] = t;
        }
        for i in 0..n {
            let t = a[(i, s)];
            a[(i, s)] = a[(i, pj)];
            a[(i, pj)] = t;
        }
        colperm.swap(s, pj);
        let piv = a[(s, s)];
        if piv.norm() == 0.0 {
            continue;
        }
        for i in s + 1..n {
            let f = a[(i, s)] / piv;
            for j in s..n {
                let t = a[(s, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    let mut basis = CMatrix::zeros(n, dim);
    for f in 0..dim {
        let mut x = vec![C64::new(0.0, 0.0); n];
        x[rank + f] = C64::new(1.0, 0.0);
        for i in (0..rank).rev() {
            let mut s = C64::new(0.0, 0.0);
            for j in i + 1..n {
                s += a[(i, j)] * x[j];
            }
            let piv = a[(i, i)];
            x[i] = if piv.norm() == 0.0 { C64::new(0.0, 0.0) } else { -s / piv };
        }
        for (p, &orig) in colperm.iter().enumerate() {
            basis[(orig, f)] = x[p];
        }
    }
    match super::orth::orthonormalize(&basis) {
        Ok((q, _)) => q,
        Err(_) => basis,
    }
}

fn mat_pow(m: &CMatrix, p: usize) -> CMatrix {
    let mut r = CMatrix::identity(m.rows());
    for _ in 0..p {
        r = &r * m;
    }
    r
}

/// Compare eigenvalues by real part, ties (within `tol`) by imaginary part.
fn order(a: C64, b: C64, tol: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() > tol {
        a.re.partial_cmp(&b.re).unwrap_or(std::cmp::Ordering::Equal)
    } else {
        a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Power-of-two diagonal `d` such that `diag(d)^{-1} M diag(d)` has
/// comparable row and column norms.
fn balance(m: &CMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut d = vec![1.0f64; n];
    let mut b = m.clone();
    for _sweep in 0..40 {
        let mut changed = false;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += b[(j, i)].l1_norm();
                    row += b[(i, j)].l1_norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let mut f = 1.0f64;
            let total = col + row;
            while col < row / 2.0 {
                col *= 2.0;
                row /= 2.0;
                f *= 2.0;
            }
            while col >= row * 2.0 {
                col /= 2.0;
                row *= 2.0;
                f /= 2.0;
            }
            if (col + row) < 0.95 * total {
                changed = true;
                d[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Eigenvalues with right and biorthonormal left vectors. The matrix is
/// balanced first, which matters for the badly scaled limits of strong
/// shocks.
pub fn eig_small(m: &CMatrix) -> Result<EigenDecomp> {
    let n = m.rows();
    if n != m.cols() || n == 0 || n > MAX_DIM {
        return Err(Error::InvalidParam(format!("eig_small needs a square matrix of size 1..=6, got {}x{}", n, m.cols())));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParam("non-finite matrix entry".into()));
    }
    let d = balance(m);
    if d.iter().all(|&x| x == 1.0) {
        return eig_balanced(m);
    }
    let mut b = m.clone();
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] *= d[j] / d[i];
        }
    }
    let mut e = eig_balanced(&b)?;
    for g in e.groups.clone() {
        let v: Vec<Vec<C64>> = g.iter().map(|&k| e.right[k].iter().zip(&d).map(|(z, s)| z * s).collect()).collect();
        let w: Vec<Vec<C64>> = g.iter().map(|&k| e.left[k].iter().zip(&d).map(|(z, s)| z / s).collect()).collect();
        // V = Q R, W <- W R^H keeps W^H V = I
        let (q, r) = crate::numerics::orth::orthonormalize(&CMatrix::from_columns(&v))?;
        let wm = &CMatrix::from_columns(&w) * &r.adjoint();
        for (col, &k) in g.iter().enumerate() {
            e.right[k] = q.column(col);
            e.left[k] = wm.column(col);
        }
    }
    Ok(e)
}

fn eig_balanced(m: &CMatrix) -> Result<EigenDecomp> {
    let n = m.rows();
    let mnorm = m.norm();
    let scale = 1.0 + mnorm;
    let roots = poly_roots(&char_poly(m));
    let mh = m.adjoint();

    // polish each root against the matrix
    let mut lams = roots.clone();
    let mut rights = Vec::with_capacity(n);
    let mut lefts = Vec::with_capacity(n);
    for k in 0..n {
        let sep = (0..n)
            .filter(|&j| j != k)
            .map(|j| (roots[j] - roots[k]).norm())
            .fold(f64::INFINITY, f64::min);
        let mut lam = roots[k];
        let mut v = inverse_iteration(m, lam, mnorm, k, 3);
        let mut w = inverse_iteration(&mh, lam.conj(), mnorm, k + 7, 3);
        for _ in 0..4 {
            let wv = vdot(&w, &v);
            let cand = if wv.norm() > 1e-8 { vdot(&w, &m.mul_vec(&v)) / wv } else { vdot(&v, &m.mul_vec(&v)) };
            if !(cand.re.is_finite() && cand.im.is_finite()) || (cand - roots[k]).norm() > (0.5 * sep).max(1e-4 * scale) {
                break;
            }
            if (cand - lam).norm() <= 1e-15 * scale {
                lam = cand;
                break;
            }
            lam = cand;
            v = inverse_iteration(m, lam, mnorm, k, 2);
            w = inverse_iteration(&mh, lam.conj(), mnorm, k + 7, 2);
        }
        lams[k] = lam;
        rights.push(v);
        lefts.push(w);
    }

    // cluster
    let gtol = 1e-8 * scale;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (lams[i] - lams[j]).norm() <= gtol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = clusters.len();
            clusters.push(vec![]);
        }
        clusters[root_of[r]].push(i);
    }

    // entries: (eigenvalue, right, left, cluster id)
    let mut entries: Vec<(C64, Vec<C64>, Vec<C64>, usize)> = Vec::with_capacity(n);
    for (cid, cl) in clusters.iter().enumerate() {
        if cl.len() == 1 {
            let k = cl[0];
            let v = rights[k].clone();
            let w0 = lefts[k].clone();
            let wv = vdot(&w0, &v);
            if wv.norm() == 0.0 {
                return Err(Error::NonConvergence(format!("left/right eigenvectors orthogonal for {}", lams[k])));
            }
            let f = wv.conj().inv();
            let w: Vec<C64> = w0.iter().map(|&z| z * f).collect();
            let res = residual(m, lams[k], &v);
            if res > 1e-10 * mnorm.max(f64::MIN_POSITIVE) && res > 1e-300 {
                return Err(Error::NonConvergence(format!("residual {:e} for eigenvalue {}", res, lams[k])));
            }
            entries.push((lams[k], v, w, cid));
        } else {
            let mm = cl.len();
            let c: C64 = cl.iter().map(|&k| lams[k]).sum::<C64>() / mm as f64;
            let shifted = m.shift(c);
            let v = forced_null_space(&mat_pow(&shifted, mm), mm);
            let wraw = forced_null_space(&mat_pow(&shifted.adjoint(), mm), mm);
            let g = &wraw.adjoint() * &v;
            let ginv = g.inverse().ok_or_else(|| Error::NonConvergence("degenerate eigenvalue cluster".into()))?;
            let w = &wraw * &ginv.adjoint();
            let mut sub: Vec<C64> = cl.iter().map(|&k| lams[k]).collect();
            sub.sort_by(|a, b| order(*a, *b, 1e-12 * scale));
            for (t, lam) in sub.into_iter().enumerate() {
                entries.push((lam, v.column(t), w.column(t), cid));
            }
        }
    }
    let tie = 1e-12 * scale;
    entries.sort_by(|a, b| order(a.0, b.0, tie));
    let mut groups: Vec<Vec<usize>> = vec![vec![]; clusters.len()];
    for (i, e) in entries.iter().enumerate() {
        groups[e.3].push(i);
    }
    groups.sort_by_key(|g| g[0]);
    Ok(EigenDecomp {
        eigenvalues: entries.iter().map(|e| e.0).collect(),
        right: entries.iter().map(|e| e.1.clone()).collect(),
        left: entries.iter().map(|e| e.2.clone()).collect(),
        groups,
    })
}
