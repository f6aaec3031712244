//! JSON documents for matrices, channels and codes.
//!
//! A matrix is `{"rows": r, "cols": c, "data": [[re, im], ...]}` with the
//! entries in row-major order. Kets are `n x 1` matrices.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::qec::CodeSpec;
use crate::scalar::{Real, C};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            // `+ 0.0` folds negative zero so reports do not print `-0.0`
            data: m
                .as_slice()
                .iter()
                .map(|z| [z.re.as_f64() + 0.0, z.im.as_f64() + 0.0])
                .collect(),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Format(format!(
                "rows and cols must be positive, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "data: expected {} entries for {}x{}, found {}",
                self.rows * self.cols,
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        if let Some(k) = self.data.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(Error::Format(format!("data[{k}]: entry is not finite")));
        }
        let data = self.data.iter().map(|&[re, im]| C::new(T::of(re), T::of(im))).collect();
        ComplexMatrix::new(self.rows, self.cols, data)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDocument {
    pub in_dim: usize,
    pub out_dim: usize,
    pub elements: Vec<MatrixDocument>,
}

impl ChannelDocument {
    pub fn from_channel<T: Real>(ch: &KrausChannel<T>) -> Self {
        Self {
            in_dim: ch.in_dim(),
            out_dim: ch.out_dim(),
            elements: ch.elements().iter().map(MatrixDocument::from_matrix).collect(),
        }
    }

    pub fn to_channel<T: Real>(&self) -> Result<KrausChannel<T>> {
        if self.elements.is_empty() {
            return Err(Error::Format(
                "elements: a channel needs at least one Kraus element".into(),
            ));
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for (k, doc) in self.elements.iter().enumerate() {
            let m: ComplexMatrix<T> = doc
                .to_matrix()
                .map_err(|e| Error::Format(format!("elements[{k}]: {e}")))?;
            if m.shape() != (self.out_dim, self.in_dim) {
                return Err(Error::Format(format!(
                    "elements[{k}]: expected {}x{} (out_dim x in_dim), found {}x{}",
                    self.out_dim,
                    self.in_dim,
                    m.rows(),
                    m.cols()
                )));
            }
            elements.push(m);
        }
        KrausChannel::new(elements)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDocument {
    pub logical_dim: usize,
    pub encoder: MatrixDocument,
}

impl CodeDocument {
    pub fn from_code<T: Real>(code: &CodeSpec<T>) -> Self {
        Self {
            logical_dim: code.logical_dim(),
            encoder: MatrixDocument::from_matrix(code.encoder()),
        }
    }

    pub fn to_code<T: Real>(&self, tol: T) -> Result<CodeSpec<T>> {
        let c: ComplexMatrix<T> = self
            .encoder
            .to_matrix()
            .map_err(|e| Error::Format(format!("encoder: {e}")))?;
        if c.cols() != self.logical_dim {
            return Err(Error::Format(format!(
                "logical_dim: declared {} but encoder has {} columns",
                self.logical_dim,
                c.cols()
            )));
        }
        CodeSpec::new(c, tol)
    }
}

/// Parses a document, reporting serde's field-level diagnostics.
pub fn parse<D: DeserializeOwned>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

pub fn to_pretty_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("documents serialise")
}
