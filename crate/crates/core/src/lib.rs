//! Context-free and regular languages of arrows in free categories.
//!
//! Grammars are maps from a species into spliced arrows of a free
//! category; automata are graph homomorphisms with unique lifting of
//! factorizations. The crate implements parsing, the pullback (Bar-Hillel)
//! construction, tree contours and the contour-based decomposition of
//! every context-free language into a chromatic tree contour language,
//! a regular language and a functor.

pub mod automaton;
pub mod cli;
pub mod contour;
pub mod dot;
pub mod dyck;
pub mod error;
pub mod fixtures;
pub mod grammar;
pub mod graph;
pub mod intersection;
pub mod io;
pub mod oracle;
pub mod random;
pub mod species;
pub mod spliced;
pub mod tree_automaton;

pub use error::{Error, Result};
pub use grammar::{AmbiguityCount, Cfg, Chart, ParseResult, Translation};
pub use graph::{EdgeIx, Graph, GraphHom, NodeIx, PathArrow, PathFunctor};
pub use species::{ColorIx, OpIx, OpTree, Species, SpeciesMap};
pub use spliced::{GapType, SplicedArrow};
