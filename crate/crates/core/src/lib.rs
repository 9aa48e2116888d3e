//! Fredholm determinants of Hankel operators with exponential-sum symbols,
//! the tau functions they define, and the integrable kernels attached to
//! Fuchsian systems.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cauchydet;
pub mod elliptic;
pub mod error;
pub mod expsymbol;
pub mod hardedge;
pub mod hypergeom;
pub mod lame;
pub mod linsys;
pub mod numkit;
pub mod par;
pub mod pvi;

pub use error::{Error, Result};
pub use numkit::{CMat, TauCurve, C64};
