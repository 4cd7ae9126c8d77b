use crate::matrix::DenseMatrix;

/// Anything that can multiply dense blocks from either side.
pub trait LinearOperator: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// `A B` for `B` with `cols()` rows.
    fn apply(&self, b: &DenseMatrix) -> DenseMatrix;

    /// `A^T B` for `B` with `rows()` rows.
    fn apply_adjoint(&self, b: &DenseMatrix) -> DenseMatrix;

    fn matvec(&self, v: &[f64]) -> Vec<f64> {
        self.apply(&DenseMatrix::from_vec(v.len(), 1, v.to_vec())).into_data()
    }

    fn matvec_adjoint(&self, v: &[f64]) -> Vec<f64> {
        self.apply_adjoint(&DenseMatrix::from_vec(v.len(), 1, v.to_vec())).into_data()
    }

    /// `A(:, idx)`.
    fn columns(&self, idx: &[usize]) -> DenseMatrix {
        let mut e = DenseMatrix::zeros(self.cols(), idx.len());
        for (c, &j) in idx.iter().enumerate() {
            e.set(j, c, 1.0);
        }
        self.apply(&e)
    }

    /// `A(idx, :)`.
    fn rows_of(&self, idx: &[usize]) -> DenseMatrix {
        let mut e = DenseMatrix::zeros(self.rows(), idx.len());
        for (c, &i) in idx.iter().enumerate() {
            e.set(i, c, 1.0);
        }
        self.apply_adjoint(&e).transpose()
    }

    fn to_dense(&self) -> DenseMatrix {
        self.apply(&DenseMatrix::identity(self.cols()))
    }

    /// The explicit matrix when the operator is stored densely.
    fn as_dense(&self) -> Option<&DenseMatrix> {
        None
    }
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        DenseMatrix::rows(self)
    }

    fn cols(&self) -> usize {
        DenseMatrix::cols(self)
    }

    fn apply(&self, b: &DenseMatrix) -> DenseMatrix {
        self.matmul(b)
    }

    fn apply_adjoint(&self, b: &DenseMatrix) -> DenseMatrix {
        self.t_matmul(b)
    }

    fn matvec(&self, v: &[f64]) -> Vec<f64> {
        DenseMatrix::matvec(self, v)
    }

    fn matvec_adjoint(&self, v: &[f64]) -> Vec<f64> {
        self.t_matvec(v)
    }

    fn columns(&self, idx: &[usize]) -> DenseMatrix {
        self.select_columns(idx)
    }

    fn rows_of(&self, idx: &[usize]) -> DenseMatrix {
        self.select_rows(idx)
    }

    fn to_dense(&self) -> DenseMatrix {
        self.clone()
    }

    fn as_dense(&self) -> Option<&DenseMatrix> {
        Some(self)
    }
}
