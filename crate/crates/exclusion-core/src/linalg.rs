// index-heavy loops below follow the classic Fortran-derived formulation
#![allow(clippy::needless_range_loop)]

//! Dense symmetric eigendecomposition: Householder tridiagonalization
//! followed by implicit-shift QL with accumulated transforms. Desk-scale
//! only; the guideline cap is a dimension of 6000.

use crate::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Hard cap for the dense solver.
pub const MAX_DENSE_DIM: usize = 6000;

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymMat {
    dim: usize,
    data: Vec<f64>,
}

impl SymMat {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim > MAX_DENSE_DIM {
            return Err(Error::Capacity(format!(
                "dense dimension {dim} exceeds cap {MAX_DENSE_DIM}"
            )));
        }
        Ok(SymMat {
            dim,
            data: alloc::vec![0.0; dim * dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Sets entries (i, j) and (j, i) at once.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Result of [`sym_eigen`]: eigenvalues in ascending order, eigenvectors as
/// orthonormal columns (column-major, column `i` pairs with `values[i]`).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub dim: usize,
    pub values: Vec<f64>,
    /// Column-major: entry `x` of eigenvector `i` is `vectors[i * dim + x]`.
    pub vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }
}

/// Full eigendecomposition of a symmetric matrix.
pub fn sym_eigen(m: &SymMat) -> Result<EigenDecomposition> {
    if !m.is_symmetric(1e-12) {
        return Err(Error::InvalidParameter(
            "eigensolver input is not symmetric".into(),
        ));
    }
    let n = m.dim;
    if n == 0 {
        return Ok(EigenDecomposition {
            dim: 0,
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    // v holds the accumulated orthogonal transform, row-major
    let mut v = m.data.clone();
    let mut d = alloc::vec![0.0; n];
    let mut e = alloc::vec![0.0; n];
    tred2(n, &mut v, &mut d, &mut e);
    tql2(n, &mut v, &mut d, &mut e)?;

    // sort ascending, carrying columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let mut values = Vec::with_capacity(n);
    let mut vectors = alloc::vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        values.push(d[old]);
        for x in 0..n {
            vectors[new * n + x] = v[x * n + old];
        }
    }
    Ok(EigenDecomposition {
        dim: n,
        values,
        vectors,
    })
}

// Householder reduction to symmetric tridiagonal form, accumulating the
// transformation in `v`. EISPACK tred2 lineage.
fn tred2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
                v[j * n + i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j * n + i] = f;
                g = e[j] + v[j * n + j] * f;
                for k in j + 1..i {
                    g += v[k * n + j] * d[k];
                    e[k] += v[k * n + j] * f;
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
                    v[k * n + j] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1) * n + j];
                v[i * n + j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1) * n + i] = v[i * n + i];
        v[i * n + i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k * n + i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k * n + i + 1] * v[k * n + j];
                }
                for k in 0..=i {
                    v[k * n + j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k * n + i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1) * n + j];
        v[(n - 1) * n + j] = 0.0;
    }
    v[(n - 1) * n + n - 1] = 1.0;
    e[0] = 0.0;
}

// Implicit-shift QL iteration on the tridiagonal form, updating the
// accumulated transform. EISPACK tql2 lineage.
fn tql2(n: usize, v: &mut [f64], d: &mut [f64], e: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
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
                    return Err(Error::InvalidParameter(
                        "eigensolver failed to converge".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
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
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[k * n + i + 1];
                        v[k * n + i + 1] = s * v[k * n + i] + c * h;
                        v[k * n + i] = c * v[k * n + i] - s * h;
                    }
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
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &SymMat, eig: &EigenDecomposition) -> f64 {
        let n = m.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let v = eig.vector(i);
            for r in 0..n {
                let mut mv = 0.0;
                for c in 0..n {
                    mv += m.get(r, c) * v[c];
                }
                worst = worst.max((mv - eig.values[i] * v[r]).abs());
            }
        }
        worst
    }

    #[test]
    fn two_by_two() {
        let mut m = SymMat::zeros(2).unwrap();
        m.set_sym(0, 1, 1.0);
        let eig = sym_eigen(&m).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_symmetric_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &n in &[1usize, 3, 10, 40] {
            let mut m = SymMat::zeros(n).unwrap();
            for i in 0..n {
                for j in i..n {
                    m.set_sym(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let eig = sym_eigen(&m).unwrap();
            assert!(residual(&m, &eig) < 1e-10 * n as f64);
            // orthonormality
            for a in 0..n {
                for b in a..n {
                    let dot: f64 = eig
                        .vector(a)
                        .iter()
                        .zip(eig.vector(b))
                        .map(|(x, y)| x * y)
                        .sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-10);
                }
            }
            // ascending order
            for w in eig.values.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut m = SymMat::zeros(2).unwrap();
        m.set(0, 1, 1.0);
        m.set(1, 0, 2.0);
        assert!(sym_eigen(&m).is_err());
    }

    #[test]
    fn degenerate_spectrum() {
        // 4x4 all-ones matrix: eigenvalues {0, 0, 0, 4}
        let n = 4;
        let mut m = SymMat::zeros(n).unwrap();
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, 1.0);
            }
        }
        let eig = sym_eigen(&m).unwrap();
        for i in 0..3 {
            assert!(eig.values[i].abs() < 1e-12);
        }
        assert!((eig.values[3] - 4.0).abs() < 1e-12);
        assert!(residual(&m, &eig) < 1e-12);
    }
}
