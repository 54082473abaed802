pub mod binary;
pub mod dubreil2;
pub mod error;
pub mod essentiality;
pub mod field;
pub mod form;
pub mod ideal;
pub mod lift3;
pub mod linalg;
pub mod matrix;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use form::Form;
