//! Self-similar groups generated by finite automata: exact arithmetic,
//! kneading automata of polynomial iterated monodromy groups, and statistics
//! of fixed points on the levels of the tree.

pub mod automaton;
pub mod config;
pub mod fixstat;
pub mod imgbuild;
pub mod kneading;
pub mod perm;
pub mod permgeom;
pub mod verdict;
pub mod words;
pub mod wreath;
