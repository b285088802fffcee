//! The book chapters, compiled so their code blocks run as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/exact-core.md")]
pub mod exact_core {}
#[doc = include_str!("../../../book/src/autonomous.md")]
pub mod autonomous {}
#[doc = include_str!("../../../book/src/umbral.md")]
pub mod umbral {}
#[doc = include_str!("../../../book/src/delta-flows.md")]
pub mod delta_flows {}
#[doc = include_str!("../../../book/src/difference-equations.md")]
pub mod difference_equations {}
#[doc = include_str!("../../../book/src/numerics.md")]
pub mod numerics {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
