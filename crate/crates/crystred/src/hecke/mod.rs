//! Sym^r-valued functions on the Bruhat-Tits tree of GL_2(Q_p) and the
//! Hecke operator T = T+ + T-.

mod compare;
mod function;
mod gl2;
mod modp;
mod poly;
mod vertex;

use crate::padic::PadicError;
use crate::symmod::SymError;

pub use compare::{big_o_compare, ResidualShape};
pub use function::{HeckeOp, TreeFunction};
pub use gl2::Gl2;
pub use modp::{reduce_and_project, FpTreeFunction};
pub use poly::ExtPoly;
pub use vertex::{coset_normalize, Side, TreeVertex};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeckeError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("singular matrix")]
    Singular,
    #[error("matrix {0} has entries outside Q_p")]
    NotInQp(String),
    #[error("{0} is not in GL_2(Z_p)")]
    NotInK(String),
    #[error("bad vertex: {0}")]
    BadVertex(String),
    #[error("coefficient of monomial {monomial} is {value}, which has no residue: {cause}")]
    NonIntegral {
        monomial: usize,
        value: String,
        cause: String,
    },
    #[error("at {vertex}: {cause}")]
    At { vertex: String, cause: Box<HeckeError> },
    #[error("projection at {vertex}: {cause}")]
    Projection { vertex: String, cause: SymError },
    #[error("internal normalization failure: {0}")]
    Internal(String),
}

impl HeckeError {
    pub fn at(self, vertex: &TreeVertex) -> HeckeError {
        HeckeError::At {
            vertex: vertex.to_string(),
            cause: Box::new(self),
        }
    }
}
