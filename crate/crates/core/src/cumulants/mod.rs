//! Free cumulants of *-distributions and the R-diagonality tests built on
//! them.

mod expr;
mod free_product;
mod gamma;
mod nc;
mod rdiag;
mod table;
mod transform;

pub use expr::{distribution_of, Polynomial};
pub use free_product::FreeProduct;
pub use gamma::{auto_gamma, gamma_split, GammaSplit};
pub use nc::{enumerate_nc, NCPartition, MAX_NC_SIZE};
pub use rdiag::{
    circular, corpus, free_polynomial, haar_multiply, is_r_diagonal, quarter_circular, semicircular,
    uniform_positive, CorpusEntry, RDiagonalReport, FIXED_POINT_TOL,
};
pub use table::{CumulantTable, MomentTable, WordTable, MAX_ORDER};
pub use transform::{cumulants_to_moments, moments_to_cumulants};
