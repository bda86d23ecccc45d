//! Exact coefficient rings: `ℤ[v^{±1/2}]`, `ℤ[q]`, `ℛ = ℤ_v[X_*]` and its fraction field.

mod group_alg;
mod laurent;
mod poly;
mod ratfun;

pub use group_alg::GroupAlgElt;
pub use laurent::HalfLaurent;
pub use poly::IntPoly;
pub use ratfun::RatFun;
