pub mod cli;
pub mod criticality;
pub mod error;
pub mod linalg;
pub mod qstate;
pub mod quadrature;
pub mod steering;
pub mod xychain;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/conventions.md")]
    mod conventions {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/correlators.md")]
    mod correlators {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/criticality.md")]
    mod criticality {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
