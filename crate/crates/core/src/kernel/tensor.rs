//! Dense tensors and sequence masks.

use crate::error::{Error, Result};

/// Dense n-dimensional value, row-major, with an optional gradient buffer
/// of identical shape.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
    grad: Option<Vec<f64>>,
}

impl Tensor {
    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Tensor {
            shape: shape.to_vec(),
            data: vec![0.0; n],
            grad: None,
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::input(format!(
                "shape {:?} wants {} elements, got {}",
                shape,
                n,
                data.len()
            )));
        }
        Ok(Tensor {
            shape: shape.to_vec(),
            data,
            grad: None,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// Size of dimension `i`; panics on out-of-range like slice indexing.
    pub fn dim(&self, i: usize) -> usize {
        self.shape[i]
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Row `r` of a 2-d tensor.
    pub fn row(&self, r: usize) -> &[f64] {
        debug_assert_eq!(self.shape.len(), 2);
        let w = self.shape[1];
        &self.data[r * w..(r + 1) * w]
    }

    pub fn grad(&self) -> Option<&[f64]> {
        self.grad.as_deref()
    }

    /// Gradient buffer, allocated as zeros on first access.
    pub fn grad_mut(&mut self) -> &mut [f64] {
        let n = self.data.len();
        self.grad.get_or_insert_with(|| vec![0.0; n])
    }

    /// Reset the gradient buffer to zeros (keeps the allocation).
    pub fn zero_grad(&mut self) {
        if let Some(g) = self.grad.as_mut() {
            g.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

/// Validity mask over a padded sequence.
///
/// Valid positions always form a prefix: after truncate-or-pad, padding is
/// a suffix, so a (length, valid length) pair encodes the whole mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mask {
    len: usize,
    valid: usize,
}

impl Mask {
    pub fn new(len: usize, valid: usize) -> Result<Self> {
        if valid > len {
            return Err(Error::input(format!(
                "mask valid length {valid} exceeds length {len}"
            )));
        }
        Ok(Mask { len, valid })
    }

    pub fn all_valid(len: usize) -> Self {
        Mask { len, valid: len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn valid_len(&self) -> usize {
        self.valid
    }

    pub fn is_valid(&self, pos: usize) -> bool {
        pos < self.valid
    }
}
