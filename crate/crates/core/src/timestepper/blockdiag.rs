use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Cholesky factors of the diagonal blocks of a block-diagonal SPD matrix.
#[derive(Debug, Clone)]
pub struct BlockDiagonal {
    n: usize,
    blocks: Vec<(usize, usize, Cholesky<f64, Dyn>)>,
}

/// Dense copy of the `(off, len)` diagonal block of `m`.
pub(crate) fn dense_block(m: &CsrMatrix, off: usize, len: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(len, len);
    for i in 0..len {
        let (cols, vals) = m.row(off + i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j >= off && j < off + len {
                d[(i, j - off)] = v;
            }
        }
    }
    d
}

/// Checks that `m` has no entries outside the given diagonal blocks.
pub(crate) fn check_block_structure(m: &CsrMatrix, blocks: &[(usize, usize)]) -> Result<()> {
    let mut owner = vec![usize::MAX; m.nrows()];
    for (b, &(off, len)) in blocks.iter().enumerate() {
        owner[off..off + len].iter_mut().for_each(|o| *o = b);
    }
    for (i, j, v) in m.iter() {
        if v != 0.0 && owner[i] != owner[j] {
            return Err(Error::Contract(format!("entry ({i}, {j}) lies outside the diagonal blocks")));
        }
    }
    Ok(())
}

impl BlockDiagonal {
    pub fn new(m: &CsrMatrix, blocks: &[(usize, usize)]) -> Result<Self> {
        check_block_structure(m, blocks)?;
        let factors = blocks
            .par_iter()
            .map(|&(off, len)| {
                Cholesky::new(dense_block(m, off, len))
                    .map(|c| (off, len, c))
                    .ok_or_else(|| Error::Factorization(format!("block at dof {off} is not positive definite")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { n: m.nrows(), blocks: factors })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        for (off, len, c) in &self.blocks {
            let mut b = DVector::from_column_slice(&x[*off..off + len]);
            c.solve_mut(&mut b);
            x[*off..off + len].copy_from_slice(b.as_slice());
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_each_block() {
        let m = CsrMatrix::from_dense(&[
            vec![4.0, 1.0, 0.0],
            vec![1.0, 3.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let bd = BlockDiagonal::new(&m, &[(0, 2), (2, 1)]).unwrap();
        let x = bd.solve(&[1.0, 2.0, 3.0]);
        let r = m.apply(&x);
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn off_block_entries_are_rejected() {
        let m = CsrMatrix::from_dense(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        assert!(BlockDiagonal::new(&m, &[(0, 1), (1, 1)]).is_err());
    }
}
