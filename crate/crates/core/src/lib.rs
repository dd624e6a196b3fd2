pub mod error;
pub mod gf;
pub mod valfield;
pub mod bt_tree;
pub mod groups;
pub mod criterion;
pub mod covering;
pub mod theta;
pub mod cli;
