//! Exact symbolic toolkit deciding whether a real Lie algebra, given by its
//! Maurer-Cartan equations, carries symplectic, exact-symplectic or contact
//! structures.

pub mod algebra;
pub mod cli;
pub mod exterior;
pub mod ring;
pub mod symplectic;
