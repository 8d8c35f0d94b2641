pub mod assignment;
pub mod costs;
pub mod elasticity;
pub mod error;
pub mod ffield;
pub mod lagrange;
pub mod matrix;
pub mod schemes;
pub mod sim;

/// Exact rational used for normalized storage sizes and cost formulas.
pub type Rational = num_rational::Ratio<i128>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/lagrange.md")]
    mod lagrange {}
    #[doc = include_str!("../../../book/src/assignment.md")]
    mod assignment {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/elasticity.md")]
    mod elasticity {}
    #[doc = include_str!("../../../book/src/costs.md")]
    mod costs {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
}
