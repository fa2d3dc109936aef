use std::cell::UnsafeCell;
use std::sync::Arc;

/// Row access to a parameter matrix.
pub trait Rows<F> {
    fn n_rows(&self) -> usize;
    fn dim(&self) -> usize;
    fn row(&self, id: usize) -> &[F];
    fn row_mut(&mut self, id: usize) -> &mut [F];
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Copy + Default> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::default(); rows * cols],
        }
    }
}

impl<F> Matrix<F> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix shape does not match data");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[F] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [F] {
        &mut self.data
    }
}

impl<F> Rows<F> for Matrix<F> {
    fn n_rows(&self) -> usize {
        self.rows
    }

    fn dim(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row(&self, id: usize) -> &[F] {
        &self.data[id * self.cols..(id + 1) * self.cols]
    }

    #[inline]
    fn row_mut(&mut self, id: usize) -> &mut [F] {
        &mut self.data[id * self.cols..(id + 1) * self.cols]
    }
}

/// Shared matrix for Hogwild training.
///
/// Every clone is a handle to the same storage, and each handle hands out
/// mutable rows without synchronizing with the other handles. Concurrent
/// updates to the same row may be lost; SGNS updates touch few rows per
/// step so the impact of such races is small.
pub struct HogwildMatrix<F>(Arc<UnsafeCell<Matrix<F>>>);

impl<F> Clone for HogwildMatrix<F> {
    fn clone(&self) -> Self {
        HogwildMatrix(Arc::clone(&self.0))
    }
}

// Racy writes are the documented contract of this type.
unsafe impl<F: Send> Send for HogwildMatrix<F> {}
unsafe impl<F: Send + Sync> Sync for HogwildMatrix<F> {}

impl<F> HogwildMatrix<F> {
    #[inline]
    fn get(&self) -> &Matrix<F> {
        unsafe { &*self.0.get() }
    }

    #[inline]
    #[allow(clippy::mut_from_ref)]
    fn get_mut(&mut self) -> &mut Matrix<F> {
        unsafe { &mut *self.0.get() }
    }

    /// Recovers the matrix once every other handle has been dropped.
    pub fn into_inner(self) -> Option<Matrix<F>> {
        Arc::try_unwrap(self.0).ok().map(UnsafeCell::into_inner)
    }
}

impl<F> From<Matrix<F>> for HogwildMatrix<F> {
    fn from(m: Matrix<F>) -> Self {
        HogwildMatrix(Arc::new(UnsafeCell::new(m)))
    }
}

impl<F> Rows<F> for HogwildMatrix<F> {
    fn n_rows(&self) -> usize {
        self.get().rows
    }

    fn dim(&self) -> usize {
        self.get().cols
    }

    #[inline]
    fn row(&self, id: usize) -> &[F] {
        self.get().row(id)
    }

    #[inline]
    fn row_mut(&mut self, id: usize) -> &mut [F] {
        self.get_mut().row_mut(id)
    }
}
