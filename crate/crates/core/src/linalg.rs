//! Small dense complex linear algebra.
//!
//! Everything here works on square matrices of the sizes that appear in the
//! optimizer (at most a few hundred rows), so the routines are plain loops
//! over row-major storage. Hermitian eigendecomposition goes through the
//! real symmetric embedding
//!
//! ```text
//!     A = X + iY   ->   [ X  -Y ]
//!                       [ Y   X ]
//! ```
//!
//! whose spectrum is the spectrum of `A` with every eigenvalue repeated
//! twice. A real eigenvector `[x; y]` maps to the complex eigenvector
//! `x + iy`, and its partner `[-y; x]` maps to `i(x + iy)`, so the complex
//! basis is extracted with a pivoted complex Gram-Schmidt pass over the `2n`
//! real eigenvectors.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// `u u†`.
    pub fn outer(u: &[Complex64]) -> Self {
        let n = u.len();
        Self::from_fn(n, |i, j| u[i] * u[j].conj())
    }

    /// Real diagonal matrix.
    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn diag_re(&self) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, i)].re).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// `(A + A†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn scale(&mut self, alpha: f64) {
        for z in &mut self.data {
            *z *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &CMatrix) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * alpha;
        }
    }

    /// `self += alpha * u u†`.
    pub fn add_outer(&mut self, alpha: f64, u: &[Complex64]) {
        let n = self.n;
        debug_assert_eq!(u.len(), n);
        for i in 0..n {
            let ui = u[i] * alpha;
            let row = &mut self.data[i * n..(i + 1) * n];
            for (r, uj) in row.iter_mut().zip(u) {
                *r += ui * uj.conj();
            }
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            let orow = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `U† self U`.
    pub fn congruence_adj(&self, u: &CMatrix) -> Self {
        let n = self.n;
        let t = self.matmul(u);
        let mut out = Self::zeros(n);
        for i in 0..n {
            let trow = &t.data[i * n..(i + 1) * n];
            for a in 0..n {
                let c = u.data[i * n + a].conj();
                let orow = &mut out.data[a * n..(a + 1) * n];
                for (o, tv) in orow.iter_mut().zip(trow) {
                    *o += c * tv;
                }
            }
        }
        out
    }

    /// `U self U†`.
    pub fn congruence(&self, u: &CMatrix) -> Self {
        let n = self.n;
        let t = u.matmul(self);
        // out = t U†, out_ij = sum_k t_ik conj(U_jk)
        Self::from_fn(n, |i, j| {
            let tr = &t.data[i * n..(i + 1) * n];
            let ur = &u.data[j * n..(j + 1) * n];
            tr.iter().zip(ur).map(|(a, b)| a * b.conj()).sum()
        })
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Real part of `v† A v`.
    pub fn quad_form(&self, v: &[Complex64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            let row = self.row(i);
            let s: Complex64 = row.iter().zip(v).map(|(a, b)| a * b).sum();
            acc += (v[i].conj() * s).re;
        }
        acc
    }

    /// Frobenius inner product `Re tr(A B†)`; equals `Re tr(A B)` when `B`
    /// is Hermitian.
    pub fn inner(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermitian symmetry, absolute.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending, eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix: complex Householder reduction
/// to a tridiagonal matrix, a diagonal phase scaling that makes it real, and
/// implicit QL. Eigenvalues ascending.
pub fn hermitian_eigen(a: &CMatrix) -> Result<HermitianEigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0),
        });
    }
    if !a.is_finite() {
        return Err(Error::NumericalTrouble(
            "non-finite matrix in eigensolver".into(),
        ));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut t = a.hermitian_part();
    let mut q = CMatrix::identity(n);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let xnorm = (lo..n).map(|i| t[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail = (lo + 1..n).map(|i| t[(i, k)].norm_sqr()).sum::<f64>();
        if xnorm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = t[(lo, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        for i in lo..n {
            v[i] = t[(i, k)];
        }
        v[lo] -= alpha;
        let vnorm = (lo..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut().take(n).skip(lo) {
            *vi /= vnorm;
        }
        // B <- H B H on the trailing block, H = I - 2 v v†
        for i in lo..n {
            p[i] = (lo..n).map(|j| t[(i, j)] * v[j]).sum();
        }
        let kk: f64 = (lo..n).map(|i| (v[i].conj() * p[i]).re).sum();
        for i in lo..n {
            p[i] -= v[i] * kk;
        }
        for i in lo..n {
            for j in lo..n {
                let upd = v[i] * p[j].conj() + p[i] * v[j].conj();
                t[(i, j)] -= upd * 2.0;
            }
        }
        for i in lo..n {
            t[(i, k)] = zero;
            t[(k, i)] = zero;
        }
        t[(lo, k)] = alpha;
        t[(k, lo)] = alpha.conj();
        // Q <- Q H
        for r in 0..n {
            let s: Complex64 = (lo..n).map(|j| q[(r, j)] * v[j]).sum();
            for j in lo..n {
                let upd = s * v[j].conj();
                q[(r, j)] -= upd * 2.0;
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| t[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut scale = Complex64::new(1.0, 0.0);
    for i in 1..n {
        let sub = t[(i, i - 1)];
        let mag = sub.norm();
        e[i] = mag;
        if mag > 0.0 {
            scale *= sub / mag;
        }
        for r in 0..n {
            q[(r, i)] *= scale;
        }
    }
    tridiagonal_ql(&mut q, n, &mut d, &mut e)?;
    Ok(HermitianEigen {
        values: d,
        vectors: q,
    })
}

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit QL). `a` is row-major `n x n`. Returns ascending eigenvalues and
/// the eigenvector matrix (row-major, eigenvectors in columns).
pub fn symmetric_eigen(a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = a;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, n, &mut d, &mut e);
    tridiagonal_ql(&mut RealColumns { v: &mut v, n }, n, &mut d, &mut e)?;
    Ok((d, v))
}

fn tridiagonalize(v: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    let at = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
                v[at(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n.saturating_sub(1) {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = 0.0;
    }
    v[at(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Eigenvector storage updated by the QL sweeps: columns are rotated and
/// swapped.
trait Columns {
    fn rotate(&mut self, i: usize, c: f64, s: f64);
    fn swap_columns(&mut self, i: usize, k: usize);
}

struct RealColumns<'a> {
    v: &'a mut [f64],
    n: usize,
}

impl Columns for RealColumns<'_> {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let n = self.n;
        for k in 0..n {
            let vk1 = self.v[k * n + i + 1];
            let vk = self.v[k * n + i];
            self.v[k * n + i + 1] = s * vk + c * vk1;
            self.v[k * n + i] = c * vk - s * vk1;
        }
    }

    fn swap_columns(&mut self, i: usize, k: usize) {
        let n = self.n;
        for j in 0..n {
            self.v.swap(j * n + i, j * n + k);
        }
    }
}

impl Columns for CMatrix {
    fn rotate(&mut self, i: usize, c: f64, s: f64) {
        let n = self.n;
        for k in 0..n {
            let vk1 = self.data[k * n + i + 1];
            let vk = self.data[k * n + i];
            self.data[k * n + i + 1] = vk * s + vk1 * c;
            self.data[k * n + i] = vk * c - vk1 * s;
        }
    }

    fn swap_columns(&mut self, i: usize, k: usize) {
        let n = self.n;
        for j in 0..n {
            self.data.swap(j * n + i, j * n + k);
        }
    }
}

fn tridiagonal_ql(v: &mut impl Columns, n: usize, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NumericalTrouble(
                        "QL iteration did not converge".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    v.rotate(i, c, s);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    // selection sort, ascending
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            v.swap_columns(i, k);
        }
    }
    Ok(())
}

/// Cholesky factor `L` with `A = L L†`, or `None` if `A` is not numerically
/// positive definite.
pub fn cholesky(a: &CMatrix) -> Option<CMatrix> {
    let n = a.dim();
    let mut l = CMatrix::zeros(n);
    for j in 0..n {
        let mut diag = a[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        let inv = 1.0 / ljj;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s * inv;
        }
    }
    Some(l)
}

/// `ln det A` for Hermitian positive definite `A`.
pub fn log_det_pd(a: &CMatrix) -> Option<f64> {
    let l = cholesky(a)?;
    Some((0..a.dim()).map(|i| 2.0 * l[(i, i)].re.ln()).sum())
}

/// Solves the real system `A x = b` in place by LU with partial pivoting.
/// `a` is row-major `n x n` and is destroyed; `b` receives the solution.
pub fn solve_dense(a: &mut [f64], n: usize, b: &mut [f64]) -> Result<()> {
    let at = |i: usize, j: usize| i * n + j;
    let scale = a
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[at(col, col)].abs();
        for r in col + 1..n {
            let v = a[at(r, col)].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if !(best > scale * 1e-300) || !best.is_finite() {
            return Err(Error::NumericalTrouble("singular linear system".into()));
        }
        if piv != col {
            for j in 0..n {
                a.swap(at(col, j), at(piv, j));
            }
            b.swap(col, piv);
        }
        let inv = 1.0 / a[at(col, col)];
        for r in col + 1..n {
            let factor = a[at(r, col)] * inv;
            if factor == 0.0 {
                continue;
            }
            a[at(r, col)] = 0.0;
            for j in col + 1..n {
                a[at(r, j)] -= factor * a[at(col, j)];
            }
            b[r] -= factor * b[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for j in col + 1..n {
            s -= a[at(col, j)] * b[j];
        }
        b[col] = s / a[at(col, col)];
    }
    if b.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericalTrouble("non-finite linear solve".into()))
    }
}
