//! Dense tensors and the small dense-matrix arithmetic everything else is
//! built on.
//!
//! Two value types live here. [`Tensor`] is the bulk activation container:
//! row-major f32, arbitrary rank, and the type that crosses module and file
//! boundaries. [`Mat`] is a row-major f64 matrix used for statistics,
//! eigensolving and projection training, where f32 accumulation is not good
//! enough.

use crate::error::{Error, Result};

/// Dense row-major f32 tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    dims: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape(format!("zero extent in dims {dims:?}")));
        }
        let len: usize = dims.iter().product();
        if len != data.len() {
            return Err(Error::Shape(format!(
                "dims {dims:?} imply {len} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        Tensor {
            dims,
            data: vec![0.0; len],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    /// 2-D accessor; callers are expected to have checked rank == 2.
    pub fn at2(&self, r: usize, c: usize) -> f32 {
        self.data[r * self.dims[1] + c]
    }

    pub fn check_finite(&self, what: &str) -> Result<()> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("{what} contains NaN/Inf")));
        }
        Ok(())
    }

    /// Matrix product of two rank-2 tensors, accumulated in f64.
    pub fn matmul(&self, rhs: &Tensor) -> Result<Tensor> {
        if self.rank() != 2 || rhs.rank() != 2 {
            return Err(Error::Shape(format!(
                "matmul needs rank-2 operands, got {:?} x {:?}",
                self.dims, rhs.dims
            )));
        }
        let (m, k) = (self.dims[0], self.dims[1]);
        let (k2, n) = (rhs.dims[0], rhs.dims[1]);
        if k != k2 {
            return Err(Error::Shape(format!(
                "matmul inner dims disagree: {m}x{k} times {k2}x{n}"
            )));
        }
        let mut out = vec![0.0f32; m * n];
        for i in 0..m {
            let row = &self.data[i * k..(i + 1) * k];
            for j in 0..n {
                let mut acc = 0.0f64;
                for (p, &a) in row.iter().enumerate() {
                    acc += a as f64 * rhs.data[p * n + j] as f64;
                }
                out[i * n + j] = acc as f32;
            }
        }
        Tensor::new(vec![m, n], out)
    }

    /// Reshape an (n, d, w, h) activation batch to channel-major (d, n*w*h):
    /// row c holds every value of channel c. The column index runs over
    /// (batch, width, height) with batch slowest, so the mapping is invertible
    /// by [`Tensor::inverse_channel_reshape`].
    pub fn channel_reshape(&self) -> Result<Tensor> {
        if self.rank() != 4 {
            return Err(Error::Shape(format!(
                "channel_reshape needs rank 4, got rank {}",
                self.rank()
            )));
        }
        let (n, d, w, h) = (self.dims[0], self.dims[1], self.dims[2], self.dims[3]);
        let spatial = w * h;
        let cols = n * spatial;
        let mut out = vec![0.0f32; d * cols];
        for b in 0..n {
            for c in 0..d {
                let src = &self.data[(b * d + c) * spatial..(b * d + c + 1) * spatial];
                let dst = &mut out[c * cols + b * spatial..c * cols + (b + 1) * spatial];
                dst.copy_from_slice(src);
            }
        }
        Tensor::new(vec![d, cols], out)
    }

    /// Inverse of [`Tensor::channel_reshape`]; restores the (n, d, w, h)
    /// layout bit-exactly.
    pub fn inverse_channel_reshape(&self, n: usize, w: usize, h: usize) -> Result<Tensor> {
        if self.rank() != 2 {
            return Err(Error::Shape(format!(
                "inverse_channel_reshape needs rank 2, got rank {}",
                self.rank()
            )));
        }
        let d = self.dims[0];
        let spatial = w * h;
        if self.dims[1] != n * spatial {
            return Err(Error::Shape(format!(
                "inverse_channel_reshape: {} columns cannot split into {n} x {w} x {h}",
                self.dims[1]
            )));
        }
        let cols = n * spatial;
        let mut out = vec![0.0f32; n * d * spatial];
        for b in 0..n {
            for c in 0..d {
                let src = &self.data[c * cols + b * spatial..c * cols + (b + 1) * spatial];
                let dst = &mut out[(b * d + c) * spatial..(b * d + c + 1) * spatial];
                dst.copy_from_slice(src);
            }
        }
        Tensor::new(vec![n, d, w, h], out)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| v as f64).collect()
    }

    pub fn from_f64(dims: Vec<usize>, data: &[f64]) -> Result<Tensor> {
        Tensor::new(dims, data.iter().map(|&v| v as f32).collect())
    }
}

/// Dense row-major f64 matrix for statistics and training math.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul inner dims disagree");
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = Mat::zeros(m, n);
        for i in 0..m {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a == 0.0 {
                    continue;
                }
                let rrow = &rhs.data[p * n..(p + 1) * n];
                let orow = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in orow.iter_mut().zip(rrow.iter()) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Keep the first `k` rows.
    pub fn top_rows(&self, k: usize) -> Mat {
        assert!(k <= self.rows);
        Mat {
            rows: k,
            cols: self.cols,
            data: self.data[..k * self.cols].to_vec(),
        }
    }

    /// Keep the first `k` columns.
    pub fn left_cols(&self, k: usize) -> Mat {
        assert!(k <= self.cols);
        let mut out = Mat::zeros(self.rows, k);
        for r in 0..self.rows {
            out.data[r * k..(r + 1) * k]
                .copy_from_slice(&self.row(r)[..k]);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn to_tensor(&self) -> Tensor {
        Tensor::new(
            vec![self.rows, self.cols],
            self.data.iter().map(|&v| v as f32).collect(),
        )
        .expect("consistent dims")
    }

    pub fn from_tensor(t: &Tensor) -> Result<Mat> {
        if t.rank() != 2 {
            return Err(Error::Shape(format!(
                "Mat::from_tensor needs rank 2, got {}",
                t.rank()
            )));
        }
        Ok(Mat {
            rows: t.dims()[0],
            cols: t.dims()[1],
            data: t.to_f64(),
        })
    }
}
