pub mod automata;
pub mod equivalence;
pub mod error;
pub mod game;
pub mod graph;
pub mod modelcheck;
pub mod pipeline;
pub mod server;
pub mod session;
pub mod solver;
pub mod syntax;
pub mod transducer;
pub mod ts;

pub use error::{Error, Result};
