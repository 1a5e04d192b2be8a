//! Dense non-symmetric complex eigensolver.
//!
//! The matrix is balanced by powers of two, reduced to upper Hessenberg form by Householder
//! reflections and brought to complex Schur form `A = Z T Z†` by implicitly shifted QR
//! iteration. Right eigenvectors come from back substitution in `T`, left eigenvectors
//! (row vectors with `l A = λ l`, i.e. eigenvectors of the transpose) from forward
//! substitution, both mapped back through `Z` and the balancing scale.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{bilinear, vec_norm, ComplexMatrix};
use crate::error::NumericsError;
use crate::scalar::Scalar;

/// Default residual tolerance relative to `‖A‖_F`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalues closer than this times `‖A‖_F` are treated as one cluster when pairing.
pub const PAIRING_TOL: f64 = 1e-6;

/// Full eigendecomposition with paired left and right eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub values: Vec<Complex<T>>,
    /// Right eigenvectors `r_k` (columns), unit 2-norm.
    pub right_vectors: Vec<Vec<Complex<T>>>,
    /// Left eigenvectors `l_k` (rows), scaled so that `l_k · r_k = 1`.
    pub left_vectors: Vec<Vec<Complex<T>>>,
    /// Largest relative residual over both left and right pairs.
    pub max_residual: T,
    /// Index groups whose eigenvalues fall within the pairing tolerance of each other.
    /// Biorthonormality is not verified inside these groups.
    pub degenerate_clusters: Vec<Vec<usize>>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_degenerate(&self, k: usize) -> bool {
        self.degenerate_clusters.iter().any(|c| c.contains(&k))
    }

    /// Matrix of bilinear overlaps `l_j · r_k`.
    pub fn overlap_matrix(&self) -> ComplexMatrix<T> {
        let n = self.len();
        ComplexMatrix::from_fn(n, |j, k| bilinear(&self.left_vectors[j], &self.right_vectors[k]))
    }
}

/// All eigenvalues of `a`, in the order they deflate from the Schur form.
pub fn eigenvalues<T: Scalar>(a: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>, NumericsError> {
    a.check_finite()?;
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut h, _) = balance(a);
    hessenberg(&mut h, None);
    schur_qr(&mut h, None, false)?;
    Ok(h.diagonal())
}

/// Eigenvalues with paired, biorthonormalized left and right eigenvectors.
///
/// Fails with [`NumericsError::NonConvergence`] when QR runs out of iterations and with
/// [`NumericsError::ResidualTooLarge`] when any pair misses `tol · ‖A‖_F`. Near-degenerate
/// eigenvalues are reported in `degenerate_clusters`, not as an error.
pub fn eigendecompose<T: Scalar>(
    a: &ComplexMatrix<T>,
    tol: T,
) -> Result<EigenDecomposition<T>, NumericsError> {
    if !(tol > T::zero()) {
        return Err(NumericsError::InvalidTolerance(tol.as_f64()));
    }
    a.check_finite()?;
    let n = a.dim();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            right_vectors: Vec::new(),
            left_vectors: Vec::new(),
            max_residual: T::zero(),
            degenerate_clusters: Vec::new(),
        });
    }

    let (mut t, scale) = balance(a);
    let mut z = ComplexMatrix::identity(n);
    hessenberg(&mut t, Some(&mut z));
    schur_qr(&mut t, Some(&mut z), true)?;
    let values = t.diagonal();

    let t_norm = t.frobenius_norm();
    let smin = (T::epsilon() * t_norm).max(T::min_positive_value() / T::epsilon());

    let mut right_vectors = Vec::with_capacity(n);
    let mut left_vectors = Vec::with_capacity(n);
    for k in 0..n {
        let x = triangular_right(&t, k, smin);
        let w = triangular_left(&t, k, smin);
        // r = D Z x, l = w Z† D⁻¹
        let mut r: Vec<Complex<T>> = (0..n)
            .map(|m| {
                z.row(m)[..=k]
                    .iter()
                    .zip(&x)
                    .fold(Complex::zero(), |acc, (&zz, &xx)| acc + zz * xx)
                    * scale[m]
            })
            .collect();
        let mut l: Vec<Complex<T>> = (0..n)
            .map(|m| {
                z.row(m)[k..]
                    .iter()
                    .zip(&w)
                    .fold(Complex::zero(), |acc, (&zz, &ww)| acc + zz.conj() * ww)
                    / scale[m]
            })
            .collect();
        normalize_pair(&mut r, &mut l);
        right_vectors.push(r);
        left_vectors.push(l);
    }

    let a_norm = a.frobenius_norm();
    let degenerate_clusters = clusters(&values, T::lit(PAIRING_TOL) * a_norm);
    let max_residual = max_residual(a, &values, &right_vectors, &left_vectors);
    if max_residual > tol {
        return Err(NumericsError::ResidualTooLarge {
            residual: max_residual.as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(EigenDecomposition {
        values,
        right_vectors,
        left_vectors,
        max_residual,
        degenerate_clusters,
    })
}

/// Rescales every pair so `l_k · r_k = 1` with `‖r_k‖₂ = 1`, then checks biorthogonality.
///
/// Errors with [`NumericsError::DegeneratePairing`] when the spectrum has clusters inside the
/// pairing tolerance; off-diagonal overlaps are only meaningful for a simple spectrum.
pub fn biorthonormalize<T: Scalar>(
    mut dec: EigenDecomposition<T>,
) -> Result<EigenDecomposition<T>, NumericsError> {
    if !dec.degenerate_clusters.is_empty() {
        return Err(NumericsError::DegeneratePairing {
            clusters: dec.degenerate_clusters.clone(),
        });
    }
    for (r, l) in dec.right_vectors.iter_mut().zip(dec.left_vectors.iter_mut()) {
        normalize_pair(r, l);
    }
    Ok(dec)
}

fn normalize_pair<T: Scalar>(r: &mut [Complex<T>], l: &mut [Complex<T>]) {
    let rn = vec_norm(r);
    if rn > T::zero() {
        r.iter_mut().for_each(|z| *z = *z / rn);
    }
    let p = bilinear(l, r);
    if p.norm() > T::min_positive_value() {
        let inv = Complex::<T>::one() / p;
        l.iter_mut().for_each(|z| *z = *z * inv);
    }
}

/// Largest of `‖A r − λ r‖ / (‖r‖ ‖A‖_F)` and `‖l A − λ l‖ / (‖l‖ ‖A‖_F)`.
fn max_residual<T: Scalar>(
    a: &ComplexMatrix<T>,
    values: &[Complex<T>],
    right: &[Vec<Complex<T>>],
    left: &[Vec<Complex<T>>],
) -> T {
    let a_norm = a.frobenius_norm();
    if a_norm == T::zero() {
        return T::zero();
    }
    // lattice operators are sparse; iterate over the nonzero pattern only
    let n = a.dim();
    let entries: Vec<(usize, usize, Complex<T>)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| {
            let v = a[(i, j)];
            (!v.is_zero()).then_some((i, j, v))
        })
        .collect();
    let mut worst = T::zero();
    let mut ar = vec![Complex::<T>::zero(); n];
    let mut la = vec![Complex::<T>::zero(); n];
    for ((&lam, r), l) in values.iter().zip(right).zip(left) {
        for (k, (x, y)) in ar.iter_mut().zip(la.iter_mut()).enumerate() {
            *x = -lam * r[k];
            *y = -lam * l[k];
        }
        for &(i, j, v) in &entries {
            ar[i] = ar[i] + v * r[j];
            la[j] = la[j] + l[i] * v;
        }
        worst = worst.max(vec_norm(&ar) / (vec_norm(r) * a_norm));
        worst = worst.max(vec_norm(&la) / (vec_norm(l) * a_norm));
    }
    worst
}

/// Groups eigenvalues connected by gaps at most `tol` (single linkage).
fn clusters<T: Scalar>(values: &[Complex<T>], tol: T) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    // sweep in order of real part so only a narrow band needs pairwise checks
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].re.partial_cmp(&values[j].re).unwrap_or(std::cmp::Ordering::Equal));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if values[j].re - values[i].re > tol {
                break;
            }
            if (values[i] - values[j]).norm() <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().filter(|g| g.len() > 1).collect()
}

#[inline]
fn abs1<T: Scalar>(z: Complex<T>) -> T {
    z.re.abs() + z.im.abs()
}

/// Power-of-two diagonal scaling `A_b = D⁻¹ A D` that evens out row and column norms.
fn balance<T: Scalar>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, Vec<T>) {
    let n = a.dim();
    let mut b = a.clone();
    let mut scale = vec![T::one(); n];
    let two = T::lit(2.0);
    let big = T::lit(2f64.powi(60)).min(T::max_value().sqrt());
    let small = T::one() / big;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + abs1(b[(j, i)]);
                    r = r + abs1(b[(i, j)]);
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let g = r / two;
            while c < g && scale[i] * f < big {
                f = f * two;
                c = c * two * two;
            }
            let g = r * two;
            while c >= g && scale[i] / f > small {
                f = f / two;
                c = c / (two * two);
            }
            // c now holds the rescaled column norm times f
            if (c + r) / f < T::lit(0.95) * s {
                converged = false;
                scale[i] = scale[i] * f;
                for j in 0..n {
                    b[(i, j)] = b[(i, j)] / f;
                    b[(j, i)] = b[(j, i)] * f;
                }
            }
        }
        if converged {
            break;
        }
    }
    (b, scale)
}

/// Householder reduction to upper Hessenberg form; accumulates `Z ← Z Q` when given.
///
/// Reflectors only touch the rows and columns in the support of their Householder vector,
/// so banded lattice operators reduce in far fewer than `n³` operations.
fn hessenberg<T: Scalar>(h: &mut ComplexMatrix<T>, mut z: Option<&mut ComplexMatrix<T>>) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![Complex::<T>::zero(); n];
    let mut acc = vec![Complex::<T>::zero(); n];
    let mut support: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n - 2 {
        support.clear();
        support.extend((k + 1..n).filter(|&i| !h[(i, k)].is_zero()));
        if support.is_empty() || (support.len() == 1 && support[0] == k + 1) {
            continue;
        }
        let norm = support
            .iter()
            .fold(T::zero(), |acc, &i| acc + h[(i, k)].norm_sqr())
            .sqrt();
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            Complex::one()
        };
        let alpha = -phase * norm;
        // v = x − α e₁, reflector P = I − τ v v†
        if support[0] != k + 1 {
            support.insert(0, k + 1);
        }
        for &i in &support {
            v[i] = h[(i, k)];
        }
        v[k + 1] = v[k + 1] - alpha;
        let vnorm2 = support.iter().fold(T::zero(), |acc, &i| acc + v[i].norm_sqr());
        let tau = T::lit(2.0) / vnorm2;

        // H ← P H on rows in the support, columns k..
        acc[k..].iter_mut().for_each(|a| *a = Complex::zero());
        for &i in &support {
            let vc = v[i].conj();
            for (a, &hij) in acc[k..].iter_mut().zip(&h.row(i)[k..]) {
                *a = *a + vc * hij;
            }
        }
        for &i in &support {
            let f = v[i] * tau;
            for (hij, &a) in h.row_mut(i)[k..].iter_mut().zip(&acc[k..]) {
                *hij = *hij - f * a;
            }
        }
        // H ← H P on columns in the support, all rows
        apply_reflector_right(h, &v, &support, tau);
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
        if let Some(z) = z.as_deref_mut() {
            apply_reflector_right(z, &v, &support, tau);
        }
        for &i in &support {
            v[i] = Complex::zero();
        }
    }
}

fn apply_reflector_right<T: Scalar>(m: &mut ComplexMatrix<T>, v: &[Complex<T>], support: &[usize], tau: T) {
    for i in 0..m.dim() {
        let row = m.row_mut(i);
        let s = support
            .iter()
            .fold(Complex::<T>::zero(), |acc, &j| acc + row[j] * v[j])
            * tau;
        if s.is_zero() {
            continue;
        }
        for &j in support {
            row[j] = row[j] - s * v[j].conj();
        }
    }
}

/// Complex Givens rotation `G = [[c, s], [−s̄, c]]` with `G (x, y)ᵀ = (r, 0)ᵀ`.
#[inline]
fn givens<T: Scalar>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), Complex::zero());
    }
    if ax == T::zero() {
        return (T::zero(), Complex::one());
    }
    let nrm = ax.hypot(ay);
    let c = ax / nrm;
    let s = (x / ax) * y.conj() / nrm;
    (c, s)
}

#[inline]
fn rotate_rows<T: Scalar>(
    h: &mut ComplexMatrix<T>,
    i: usize,
    c: T,
    s: Complex<T>,
    cols: std::ops::Range<usize>,
) {
    let (top, bottom) = h.rows_pair_mut(i);
    for (a, b) in top[cols.clone()].iter_mut().zip(&mut bottom[cols]) {
        let (x, y) = (*a, *b);
        *a = x * c + s * y;
        *b = y * c - s.conj() * x;
    }
}

#[inline]
fn rotate_cols<T: Scalar>(
    h: &mut ComplexMatrix<T>,
    i: usize,
    c: T,
    s: Complex<T>,
    rows: std::ops::Range<usize>,
) {
    for r in rows {
        let row = h.row_mut(r);
        let a = row[i];
        let b = row[i + 1];
        row[i] = a * c + b * s.conj();
        row[i + 1] = b * c - a * s;
    }
}

/// Shifted QR iteration on an upper Hessenberg matrix.
///
/// With `full` the whole matrix is updated so it ends upper triangular (Schur form) and
/// rotations are accumulated into `z`; otherwise only the active window is touched and just
/// the diagonal (the eigenvalues) is meaningful afterwards.
fn schur_qr<T: Scalar>(
    h: &mut ComplexMatrix<T>,
    mut z: Option<&mut ComplexMatrix<T>>,
    full: bool,
) -> Result<(), NumericsError> {
    let n = h.dim();
    let eps = T::epsilon();
    let safe_min = T::min_positive_value();
    let small_num = safe_min * (T::lit(n as f64) / eps);
    let budget = 30 * n.max(10);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut rotations: Vec<(T, Complex<T>)> = Vec::with_capacity(n);

    while hi > 0 {
        // look for a negligible subdiagonal element
        let mut lo = hi;
        while lo > 0 {
            let sub = abs1(h[(lo, lo - 1)]);
            if sub <= small_num {
                break;
            }
            let mut tst = abs1(h[(lo - 1, lo - 1)]) + abs1(h[(lo, lo)]);
            if tst == T::zero() {
                if lo >= 2 {
                    tst = tst + h[(lo - 1, lo - 2)].re.abs();
                }
                if lo < hi {
                    tst = tst + h[(lo + 1, lo)].re.abs();
                }
            }
            if sub <= eps * tst {
                // Ahues & Tisseur refinement
                let ab = sub.max(abs1(h[(lo - 1, lo)]));
                let ba = sub.min(abs1(h[(lo - 1, lo)]));
                let d = h[(lo - 1, lo - 1)] - h[(lo, lo)];
                let aa = abs1(h[(lo, lo)]).max(abs1(d));
                let bb = abs1(h[(lo, lo)]).min(abs1(d));
                let s = aa + ab;
                if ba * (ab / s) <= small_num.max(eps * (bb * (aa / s))) {
                    break;
                }
            }
            lo -= 1;
        }
        if lo > 0 {
            h[(lo, lo - 1)] = Complex::zero();
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        total += 1;
        its += 1;
        if total > budget {
            return Err(NumericsError::NonConvergence {
                iterations: total,
                lo,
                hi,
            });
        }

        let shift = if its.is_multiple_of(10) {
            // exceptional shift
            let s = T::lit(0.75) * h[(hi, hi - 1)].re.abs();
            h[(hi, hi)] + Complex::new(s, T::zero())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        // the bulge chase only needs the active window; rotations are replayed on the rest
        // of the Schur form and on Z afterwards, row by row
        rotations.clear();
        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k == lo { k } else { k - 1 };
            rotate_rows(h, k, c, s, first_col..hi + 1);
            if k > lo {
                h[(k + 1, k - 1)] = Complex::zero();
            }
            let last_row = (k + 2).min(hi);
            rotate_cols(h, k, c, s, lo..last_row + 1);
            rotations.push((c, s));
        }
        if full {
            for (idx, &(c, s)) in rotations.iter().enumerate() {
                rotate_rows(h, lo + idx, c, s, hi + 1..n);
            }
            for r in 0..lo {
                replay_on_row(h.row_mut(r), lo, &rotations);
            }
            if let Some(z) = z.as_deref_mut() {
                for r in 0..n {
                    replay_on_row(z.row_mut(r), lo, &rotations);
                }
            }
        }
    }
    Ok(())
}

/// Applies column rotations `(first + i, first + i + 1)` in sequence to one row.
#[inline]
fn replay_on_row<T: Scalar>(row: &mut [Complex<T>], first: usize, rotations: &[(T, Complex<T>)]) {
    let mut a = row[first];
    for (i, &(c, s)) in rotations.iter().enumerate() {
        let b = row[first + i + 1];
        row[first + i] = a * c + b * s.conj();
        a = b * c - a * s;
    }
    row[first + rotations.len()] = a;
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let tr_half = (a + d) * half;
    let diff_half = (a - d) * half;
    let disc = (diff_half * diff_half + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Right eigenvector of upper triangular `t` for diagonal entry `k`; returns entries `0..=k`.
fn triangular_right<T: Scalar>(t: &ComplexMatrix<T>, k: usize, smin: T) -> Vec<Complex<T>> {
    let lam = t[(k, k)];
    let big = T::lit(1e100);
    let mut x = vec![Complex::<T>::zero(); k + 1];
    x[k] = Complex::one();
    for i in (0..k).rev() {
        let row = &t.row(i)[i + 1..=k];
        let s = row
            .iter()
            .zip(&x[i + 1..=k])
            .fold(Complex::<T>::zero(), |acc, (&a, &b)| acc + a * b);
        let mut d = t[(i, i)] - lam;
        if d.norm() < smin {
            d = Complex::new(smin, T::zero());
        }
        x[i] = -s / d;
        if x[i].norm() > big {
            let inv = T::one() / x[i].norm();
            x.iter_mut().for_each(|z| *z = *z * inv);
        }
    }
    x
}

/// Left eigenvector (row) of upper triangular `t` for diagonal entry `k`; returns entries `k..n`.
fn triangular_left<T: Scalar>(t: &ComplexMatrix<T>, k: usize, smin: T) -> Vec<Complex<T>> {
    let n = t.dim();
    let lam = t[(k, k)];
    let big = T::lit(1e100);
    let mut w = vec![Complex::<T>::zero(); n - k];
    // acc[j] = Σ_{i<j} w_i t_ij over entries already solved
    let mut acc = vec![Complex::<T>::zero(); n - k];
    w[0] = Complex::one();
    for j in k..n {
        let jj = j - k;
        if jj > 0 {
            let mut d = t[(j, j)] - lam;
            if d.norm() < smin {
                d = Complex::new(smin, T::zero());
            }
            w[jj] = -acc[jj] / d;
            if w[jj].norm() > big {
                let inv = T::one() / w[jj].norm();
                w[..=jj].iter_mut().for_each(|z| *z = *z * inv);
                acc.iter_mut().for_each(|z| *z = *z * inv);
            }
        }
        let wj = w[jj];
        if wj.is_zero() {
            continue;
        }
        for (a, &tv) in acc[jj + 1..].iter_mut().zip(&t.row(j)[j + 1..]) {
            *a = *a + wj * tv;
        }
    }
    w
}
