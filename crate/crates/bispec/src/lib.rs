//! Exact symbolic engine for bispectral Darboux transformations: given the
//! data of a self-adjoint transformation of one of the elementary bispectral
//! functions (exponential, Airy, Bessel), it constructs differential
//! operators that are formally symmetric on both sides of the generalized
//! Fourier map and whose bilinear concomitants vanish at prescribed contour
//! endpoints — the algebraic certificate for commuting with the associated
//! integral operator. A rank-1 adelic-Grassmannian toolkit synthesizes such
//! transformations from Lagrangian subspaces of quasi-exponential kernels.

pub mod context;
pub mod darboux;
pub mod exactnum;
pub mod grassmannian;
pub mod linalg;
pub mod orealg;
pub mod parser;
pub mod solver;
