pub mod constructions;
pub mod dsl;
pub mod ffg;
pub mod field;
pub mod inference;
pub mod linalg;
pub mod symplectic;

pub use ffg::{Ffg, FfgBuilder, FfgError};
pub use field::{Field, Gf4, PrimeField, Zp};
pub use linalg::{FMatrix, LinalgError, Rref};
pub use symplectic::{GroupCode, SympVector, SymplecticError};

pub type Gf2 = Zp<2>;
pub type Gf3 = Zp<3>;
pub type BinaryMatrix = FMatrix<Gf2>;
pub type PauliVector = SympVector<Gf2>;
pub type StabilizerCode = GroupCode<Gf2>;
pub type BinaryFfg = Ffg<Gf2>;
pub type Channel = inference::ChannelModel<f64>;
