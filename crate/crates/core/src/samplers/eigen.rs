//! Dense complex non-Hermitian eigenvalues: Householder reduction to upper
//! Hessenberg form followed by single-shift implicit QR with Wilkinson shifts.
//!
//! Only eigenvalues are computed, so each QR sweep touches just the active
//! diagonal block.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// Build from a column-major buffer of length `n * n`.
    pub fn from_col_major(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n, "buffer length must be n*n");
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for j in 0..n {
            for i in 0..n {
                m.data[i + j * n] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i + j * self.n]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i + j * self.n] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        let n = self.n;
        &mut self.data[j * n..(j + 1) * n]
    }
}

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// In-place reduction to upper Hessenberg form by a unitary similarity.
pub fn hessenberg_reduce(a: &mut CMatrix) {
    let n = a.n;
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let (alpha, xnorm) = {
            let col = &a.data[k * n + k + 1..(k + 1) * n];
            let tail: f64 = col[1..].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            (col[0], tail)
        };
        if xnorm == 0.0 && alpha.im == 0.0 {
            continue;
        }
        let beta = -alpha.re.signum() * alpha.norm().hypot(xnorm);
        let beta = if beta == 0.0 { alpha.norm().hypot(xnorm) } else { beta };
        let tau = Complex64::new((beta - alpha.re) / beta, -alpha.im / beta);
        let scale = (alpha - beta).inv();
        v[0] = Complex64::new(1.0, 0.0);
        {
            let col = a.col_mut(k);
            for i in 1..m {
                v[i] = col[k + 1 + i] * scale;
                col[k + 1 + i] = Complex64::new(0.0, 0.0);
            }
            col[k + 1] = Complex64::new(beta, 0.0);
        }
        let vv = &v[..m];

        // Left: A[k+1.., k+1..] <- (I - conj(tau) v v^H) A
        let ctau = tau.conj();
        for j in k + 1..n {
            let col = &mut a.data[j * n + k + 1..(j + 1) * n];
            let mut w = Complex64::new(0.0, 0.0);
            for (vi, ci) in vv.iter().zip(col.iter()) {
                w += vi.conj() * ci;
            }
            let f = ctau * w;
            for (vi, ci) in vv.iter().zip(col.iter_mut()) {
                *ci -= f * vi;
            }
        }

        // Right: A[.., k+1..] <- A (I - tau v v^H)
        y.iter_mut().for_each(|e| *e = Complex64::new(0.0, 0.0));
        for (jj, vj) in vv.iter().enumerate() {
            let col = &a.data[(k + 1 + jj) * n..(k + 2 + jj) * n];
            for (yi, ci) in y.iter_mut().zip(col) {
                *yi += ci * vj;
            }
        }
        for (jj, vj) in vv.iter().enumerate() {
            let f = vj.conj();
            let col = &mut a.data[(k + 1 + jj) * n..(k + 2 + jj) * n];
            for (ci, yi) in col.iter_mut().zip(&y) {
                *ci -= tau * yi * f;
            }
        }
    }
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with `G (x, y)^T = (r, 0)^T`.
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0), x);
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0), y);
    }
    let nu = ax.hypot(ay);
    let phase = x / ax;
    let c = ax / nu;
    let s = phase * y.conj() / nu;
    (c, s, phase * nu)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let e1 = mid + disc;
    let e2 = mid - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroys `h`).
///
/// Fails with [`Error::NoConvergence`] once the total number of QR sweeps
/// exceeds `30 n`.
pub fn hessenberg_eigenvalues(h: &mut CMatrix) -> Result<Vec<Complex64>> {
    let n = h.n;
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(eig);
    }
    let budget = 30 * n.max(10);
    let mut sweeps = 0usize;
    let ulp = f64::EPSILON;
    let norm_scale = {
        let s: f64 = h.data.iter().map(|z| cabs1(*z)).fold(0.0, f64::max);
        if s == 0.0 {
            1.0
        } else {
            s
        }
    };
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        // Locate the top of the unreduced block ending at `hi`.
        let mut l = hi;
        while l > 0 {
            let sub = cabs1(h.get(l, l - 1));
            let mut diag = cabs1(h.get(l - 1, l - 1)) + cabs1(h.get(l, l));
            if diag == 0.0 {
                diag = norm_scale;
            }
            if sub <= ulp * diag {
                h.set(l, l - 1, Complex64::new(0.0, 0.0));
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h.get(hi, hi);
            if hi == 0 {
                break;
            }
            hi -= 1;
            its = 0;
            continue;
        }
        if sweeps >= budget {
            return Err(Error::NoConvergence { n, sweeps });
        }
        sweeps += 1;
        its += 1;

        let mu = if its.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            let base = if its.is_multiple_of(20) { h.get(hi, hi) } else { h.get(l, l) };
            let sub = if its.is_multiple_of(20) { h.get(hi, hi - 1) } else { h.get(l + 1, l) };
            base + Complex64::new(0.75 * sub.re.abs(), 0.0)
        } else {
            wilkinson_shift(h.get(hi - 1, hi - 1), h.get(hi - 1, hi), h.get(hi, hi - 1), h.get(hi, hi))
        };

        let n_ = n;
        let data = &mut h.data;
        let idx = |i: usize, j: usize| i + j * n_;
        let mut x = data[idx(l, l)] - mu;
        let mut y = data[idx(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = data[idx(k, k - 1)];
                y = data[idx(k + 1, k - 1)];
            }
            let (c, s, r) = givens(x, y);
            if k > l {
                data[idx(k, k - 1)] = r;
                data[idx(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            let sc = s.conj();
            for j in k..=hi {
                let p = idx(k, j);
                let a = data[p];
                let b = data[p + 1];
                data[p] = a * c + s * b;
                data[p + 1] = b * c - sc * a;
            }
            let top = (k + 2).min(hi);
            let (left, right) = data.split_at_mut(idx(0, k + 1));
            let ck = &mut left[idx(l, k)..=idx(top, k)];
            let ck1 = &mut right[l..=top];
            for (p, q) in ck.iter_mut().zip(ck1.iter_mut()) {
                let pv = *p;
                let qv = *q;
                *p = pv * c + qv * sc;
                *q = qv * c - pv * s;
            }
        }
    }
    Ok(eig)
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues(a: &CMatrix) -> Result<Vec<Complex64>> {
    let mut h = a.clone();
    hessenberg_reduce(&mut h);
    hessenberg_eigenvalues(&mut h)
}

/// `(ln|det A|, det A / |det A|)` by LU with partial pivoting.
/// A singular matrix gives `(-inf, 0)`.
pub fn lu_log_det(a: &CMatrix) -> (f64, Complex64) {
    let n = a.n;
    let mut m = a.clone();
    let mut log_abs = 0.0;
    let mut phase = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, m.get(i, k).norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pmax == 0.0 {
            return (f64::NEG_INFINITY, Complex64::new(0.0, 0.0));
        }
        if piv != k {
            for j in 0..n {
                let t = m.get(k, j);
                m.set(k, j, m.get(piv, j));
                m.set(piv, j, t);
            }
            phase = -phase;
        }
        let d = m.get(k, k);
        log_abs += d.norm().ln();
        phase *= d / d.norm();
        let dinv = d.inv();
        for i in k + 1..n {
            let f = m.get(i, k) * dinv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let v = m.get(i, j) - f * m.get(k, j);
                m.set(i, j, v);
            }
        }
    }
    (log_abs, phase)
}
