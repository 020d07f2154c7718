//! CART trees and bagged random forests with out-of-bag diagnostics and
//! permutation importance.

pub mod ensemble;
pub mod importance;
pub mod tree;

pub use ensemble::{fit_forest, oob_error, Forest, OobError};
pub use importance::{permutation_vim, VimTable};
pub use tree::{fit_tree, gini_impurity, Node, Tree, TreeParams};
