//! Ramification signatures of real quadratic fields and their random
//! polynomial time equivalence with discrete logarithms in `F_p^x` and
//! `F_{p^2}^x`, checked at desk scale.

pub mod dlp;
pub mod gf;
pub mod modarith;
pub mod pipeline;
pub mod quad;
pub mod reduction;
