//! Dense linear algebra over GF(2).

mod bitvec;
mod elim;
pub mod io;
mod matrix;

pub use bitvec::BitVec;
pub use elim::{first_dependency, kernel_basis, rank, rref, Echelon, KernelBasis};
pub use matrix::{assemble_blocks, BitMatrix, Block, SubSelection};

impl BitMatrix {
    pub fn rank(&self) -> usize {
        elim::rank(self)
    }

    pub fn kernel_basis(&self) -> KernelBasis {
        elim::kernel_basis(self)
    }

    /// `cols − rank`.
    pub fn kernel_dim(&self) -> usize {
        self.cols() - self.rank()
    }
}
