//! Systematic (n, k) MDS code over GF(2^8).
//!
//! The generator is `[I_k | C]` where `C` is a k x (n-k) Cauchy matrix with
//! `C[i][j] = 1 / (x_i + y_j)`, `x_i = i` and `y_j = k + j`. Every square
//! submatrix of a Cauchy matrix is nonsingular, which makes every k x k column
//! submatrix of the generator invertible.
//!
//! Column indices in this module are 0-based.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf::{mul_add_into, Gf256};

/// Identifies the generator construction in manifests so decoders can
/// rebuild it from `(k, n)` alone.
pub const CONSTRUCTION_ID: &str = "cauchy-systematic-gf256-0x11d-v1";

/// Largest supported code length.
pub const MAX_N: usize = 255;

/// Dense row-major matrix over GF(2^8).
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Gf256>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Gf256::ZERO; rows * cols],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Matrix::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = Gf256::ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Square matrix built from the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (c_out, &c) in cols.iter().enumerate() {
                out[(r, c_out)] = self[(r, c)];
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix dimensions do not agree");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Gf256::ZERO;
                for i in 0..self.cols {
                    acc += self[(r, i)] * rhs[(i, c)];
                }
                out[(r, c)] = acc;
            }
        }
        out
    }

    /// Gauss-Jordan inverse. `None` if the matrix is singular.
    pub fn invert(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "only square matrices can be inverted");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let scale = a[(col, col)].inv()?;
            for c in 0..n {
                a[(col, c)] *= scale;
                inv[(col, c)] *= scale;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a[(r, col)];
                if factor.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let av = a[(col, c)];
                    let iv = inv[(col, c)];
                    a[(r, c)] += factor * av;
                    inv[(r, c)] += factor * iv;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Gf256;
    fn index(&self, (r, c): (usize, usize)) -> &Gf256 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Gf256 {
        &mut self.data[r * self.cols + c]
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| format!("{:02x}", self[(r, c)].0))
                .collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// k x n generator of the outer MDS code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    matrix: Matrix,
    systematic: bool,
}

impl GeneratorMatrix {
    pub fn k(&self) -> usize {
        self.matrix.rows
    }

    pub fn n(&self) -> usize {
        self.matrix.cols
    }

    pub fn is_systematic(&self) -> bool {
        self.systematic
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn coefficient(&self, row: usize, col: usize) -> Gf256 {
        self.matrix[(row, col)]
    }

    /// Precomputes the inverse for decoding from `cols`.
    pub fn decoder(&self, cols: &[usize]) -> Result<Decoder> {
        let k = self.k();
        if cols.len() != k {
            return Err(Error::params(format!(
                "decoding needs exactly {k} columns, got {}",
                cols.len()
            )));
        }
        let distinct: BTreeSet<_> = cols.iter().copied().collect();
        if distinct.len() != cols.len() {
            return Err(Error::params(format!("duplicate column indices in {cols:?}")));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.n()) {
            return Err(Error::params(format!(
                "column {bad} out of range for n = {}",
                self.n()
            )));
        }
        let inverse = self
            .matrix
            .select_columns(cols)
            .invert()
            .expect("k x k submatrix of an MDS generator must be invertible");
        Ok(Decoder {
            cols: cols.to_vec(),
            inverse,
        })
    }

    /// Coded symbol for column `col`, written into `out`.
    pub fn encode_column_into(&self, data: &[&[u8]], col: usize, out: &mut [u8]) {
        out.fill(0);
        for (row, buf) in data.iter().enumerate() {
            mul_add_into(out, buf, self.matrix[(row, col)]);
        }
    }
}

/// Inverse of one k x k column submatrix.
#[derive(Clone, Debug)]
pub struct Decoder {
    cols: Vec<usize>,
    inverse: Matrix,
}

impl Decoder {
    pub fn columns(&self) -> &[usize] {
        &self.cols
    }

    /// Recovers the k data buffers from shares given in `columns()` order.
    pub fn decode(&self, shares: &[&[u8]]) -> Result<Vec<Vec<u8>>> {
        let len = common_len(shares)?;
        let k = self.cols.len();
        if shares.len() != k {
            return Err(Error::shape(format!("expected {k} shares, got {}", shares.len())));
        }
        // data = shares * inverse, so data_j = sum_i shares_i * inverse[i][j]
        let mut out = vec![vec![0u8; len]; k];
        for (j, dst) in out.iter_mut().enumerate() {
            for (i, share) in shares.iter().enumerate() {
                mul_add_into(dst, share, self.inverse[(i, j)]);
            }
        }
        Ok(out)
    }
}

fn common_len(bufs: &[&[u8]]) -> Result<usize> {
    let len = bufs.first().map_or(0, |b| b.len());
    if bufs.iter().any(|b| b.len() != len) {
        return Err(Error::shape("buffers have different lengths"));
    }
    Ok(len)
}

/// Builds the systematic Cauchy generator for an (n, k) code.
pub fn make_generator(k: usize, n: usize) -> Result<GeneratorMatrix> {
    if k == 0 || n == 0 {
        return Err(Error::params("k and n must be positive"));
    }
    if k > n {
        return Err(Error::params(format!("k = {k} exceeds n = {n}")));
    }
    if n > MAX_N {
        return Err(Error::params(format!("n = {n} exceeds the GF(2^8) limit of {MAX_N}")));
    }
    let mut matrix = Matrix::zeros(k, n);
    for i in 0..k {
        matrix[(i, i)] = Gf256::ONE;
    }
    for i in 0..k {
        for j in 0..n - k {
            let x = Gf256(i as u8);
            let y = Gf256((k + j) as u8);
            matrix[(i, k + j)] = (x + y).inv().expect("x_i and y_j are distinct");
        }
    }
    Ok(GeneratorMatrix {
        matrix,
        systematic: true,
    })
}

/// Encodes k equal-length buffers into n.
pub fn mds_encode(data: &[&[u8]], g: &GeneratorMatrix) -> Result<Vec<Vec<u8>>> {
    if data.len() != g.k() {
        return Err(Error::shape(format!(
            "expected {} data buffers, got {}",
            g.k(),
            data.len()
        )));
    }
    let len = common_len(data)?;
    Ok((0..g.n())
        .map(|col| {
            if g.systematic && col < g.k() {
                data[col].to_vec()
            } else {
                let mut out = vec![0u8; len];
                g.encode_column_into(data, col, &mut out);
                out
            }
        })
        .collect())
}

/// Decodes from k `(column, buffer)` pairs.
pub fn mds_decode(shares: &[(usize, &[u8])], g: &GeneratorMatrix) -> Result<Vec<Vec<u8>>> {
    let cols: Vec<usize> = shares.iter().map(|(c, _)| *c).collect();
    let bufs: Vec<&[u8]> = shares.iter().map(|(_, b)| *b).collect();
    common_len(&bufs)?;
    g.decoder(&cols)?.decode(&bufs)
}
