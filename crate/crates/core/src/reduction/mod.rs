//! Compiler from V-cycle max2SAT formulas to red/blue point sets.

pub mod book;
pub mod compile;
pub mod gadget;
pub mod layout;
pub mod network;
pub mod proof;
pub mod sat;

pub use book::{two_page_assignment, BookEmbedding, Page};
pub use layout::{LayoutConstants, Rotation};
pub use network::{Network, BLUE, RED};
pub use sat::{Clause, Literal, Max2SatInstance};
