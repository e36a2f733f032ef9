use nalgebra::{DMatrix, DVector};

use super::C64;

const MAX_SWEEPS: usize = 60;

/// Thin SVD `m = U Σ V†`, returned as `(U, σ, V†)` with `σ` descending and
/// `k = min(rows, cols)` columns in `U`.
///
/// One-sided Jacobi: pairs of columns are rotated until all are mutually
/// orthogonal. Slower than bidiagonalization but accurate on the heavily
/// degenerate spectra of symmetric states, where nalgebra's complex SVD
/// can stall short of convergence. Columns of `U` belonging to zero singular
/// values are completed to an orthonormal set.
pub fn svd(m: &DMatrix<C64>) -> (DMatrix<C64>, DVector<f64>, DMatrix<C64>) {
    // Rows and columns that vanish carry no singular weight; projected states
    // are mostly zeros, so sweep only the block that is left.
    let live_rows: Vec<usize> = (0..m.nrows())
        .filter(|&r| m.row(r).iter().any(|z| *z != C64::new(0.0, 0.0)))
        .collect();
    let live_cols: Vec<usize> = (0..m.ncols())
        .filter(|&c| m.column(c).iter().any(|z| *z != C64::new(0.0, 0.0)))
        .collect();
    if live_rows.len() < m.nrows() || live_cols.len() < m.ncols() {
        return svd_of_block(m, &live_rows, &live_cols);
    }
    if m.nrows() < m.ncols() {
        let (u, s, v_t) = svd(&m.adjoint());
        return (v_t.adjoint(), s, u.adjoint());
    }
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut v = DMatrix::<C64>::identity(cols, cols);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                // phase-align column q, then a real Jacobi rotation
                let phase = gamma.conj() / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let x = mat[(r, p)];
                        let y = mat[(r, q)] * phase;
                        mat[(r, p)] = x * c - y * s;
                        mat[(r, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let top = norms.iter().cloned().fold(0.0, f64::max);

    let sigma = DVector::from_iterator(cols, order.iter().map(|&j| norms[j]));
    let mut u = DMatrix::<C64>::zeros(rows, cols);
    let mut filled = 0;
    for (dst, &j) in order.iter().enumerate() {
        if norms[j] > 1e-300 && norms[j] > top * 1e-15 {
            u.set_column(dst, &(a.column(j) / C64::new(norms[j], 0.0)));
            filled = dst + 1;
        }
    }
    if filled < cols {
        let extra = orthonormal_complement(&u.columns(0, filled).into_owned(), cols - filled);
        u.columns_mut(filled, cols - filled).copy_from(&extra);
    }
    let mut v_sorted = DMatrix::<C64>::zeros(cols, cols);
    for (dst, &j) in order.iter().enumerate() {
        v_sorted.set_column(dst, &v.column(j));
    }
    (u, sigma, v_sorted.adjoint())
}

fn svd_of_block(
    m: &DMatrix<C64>,
    rows: &[usize],
    cols: &[usize],
) -> (DMatrix<C64>, DVector<f64>, DMatrix<C64>) {
    let k = m.nrows().min(m.ncols());
    let mut u = DMatrix::<C64>::zeros(m.nrows(), k);
    let mut v = DMatrix::<C64>::zeros(m.ncols(), k);
    let mut sigma = DVector::<f64>::zeros(k);
    let mut found = 0;
    if !rows.is_empty() && !cols.is_empty() {
        let block = DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]);
        let (bu, bs, bv_t) = svd(&block);
        found = bs.len();
        for j in 0..found {
            sigma[j] = bs[j];
            for (i, &r) in rows.iter().enumerate() {
                u[(r, j)] = bu[(i, j)];
            }
            for (i, &c) in cols.iter().enumerate() {
                v[(c, j)] = bv_t[(j, i)].conj();
            }
        }
    }
    if found < k {
        let extra = orthonormal_complement(&u.columns(0, found).into_owned(), k - found);
        u.columns_mut(found, k - found).copy_from(&extra);
        let extra = orthonormal_complement(&v.columns(0, found).into_owned(), k - found);
        v.columns_mut(found, k - found).copy_from(&extra);
    }
    (u, sigma, v.adjoint())
}

/// `count` orthonormal columns orthogonal to the columns of `basis`.
pub fn orthonormal_complement(basis: &DMatrix<C64>, count: usize) -> DMatrix<C64> {
    let d = basis.nrows();
    let mut found: Vec<DVector<C64>> = Vec::with_capacity(count);
    for i in 0..d {
        if found.len() == count {
            break;
        }
        let mut v = DVector::<C64>::zeros(d);
        v[i] = C64::new(1.0, 0.0);
        // two passes of Gram–Schmidt for numerical orthogonality
        for _ in 0..2 {
            let proj = basis.adjoint() * &v;
            v -= basis * proj;
            for f in &found {
                let c = f.dotc(&v);
                v -= f * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            found.push(v / C64::new(norm, 0.0));
        }
    }
    let mut out = DMatrix::zeros(d, found.len());
    for (j, f) in found.iter().enumerate() {
        out.set_column(j, f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::max_abs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn check(m: &DMatrix<C64>) {
        let (u, s, v_t) = svd(m);
        let k = m.nrows().min(m.ncols());
        assert_eq!(
            (u.shape(), s.len(), v_t.shape()),
            ((m.nrows(), k), k, (k, m.ncols()))
        );
        let d = DMatrix::from_diagonal(&s.map(|x| C64::new(x, 0.0)));
        assert!(max_abs(&(&u * d * &v_t - m)) < 1e-12);
        assert!(max_abs(&(u.adjoint() * &u - DMatrix::identity(k, k))) < 1e-12);
        assert!(max_abs(&(&v_t * v_t.adjoint() - DMatrix::identity(k, k))) < 1e-12);
        assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
    }

    #[test]
    fn random_shapes() {
        check(&random(7, 4, 1));
        check(&random(3, 9, 2));
        check(&random(6, 6, 3));
    }

    #[test]
    fn rank_deficient_and_degenerate() {
        let a = random(8, 2, 4);
        let m = &a * a.adjoint(); // rank 2, 8×8
        check(&m);
        check(&DMatrix::<C64>::identity(5, 5));
        check(&DMatrix::<C64>::zeros(3, 2));
        let mut sparse = DMatrix::<C64>::zeros(9, 6);
        sparse.view_mut((2, 1), (3, 2)).copy_from(&random(3, 2, 5));
        check(&sparse);
        check(&sparse.adjoint());
    }
}
