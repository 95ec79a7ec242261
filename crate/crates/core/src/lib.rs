//! Minimal Weierstrass equations of hyperelliptic curves over ℤ.
//!
//! Given an integral equation `y² + Q(x)·y = P(x)` of a hyperelliptic curve of
//! genus `g ≥ 1` over ℚ, this crate computes an equation that is minimal at
//! every prime (the valuation of the discriminant is as small as possible),
//! the change of variables leading to it, and the factored minimal
//! discriminant. When `P` is monic of degree `2g + 1` and `deg Q ≤ g` the
//! equation is *pointed* and [`pointed::minimize_pointed`] produces the
//! minimal pointed equation, which only uses changes `x = u²x₁ + c`.
//!
//! All arithmetic is exact.
//!
//! ```
//! use hypermin::{curve::WeierstrassEquation, minimize::minimize, zpoly::ZPoly};
//!
//! let eq = WeierstrassEquation::new(1, ZPoly::zero(), ZPoly::from_i64s(&[15625, 0, 0, 1])).unwrap();
//! let res = minimize(&eq, &[]).unwrap();
//! assert_eq!(res.eq_min.p, ZPoly::from_i64s(&[1, 0, 0, 1]));
//! ```

pub mod arith;
pub mod curve;
mod error;
pub mod fppoly;
pub mod localize;
pub mod minimize;
pub mod oracle;
pub mod pointed;
pub mod zpoly;

pub use error::{Error, Result};
