pub mod clique;
pub mod cover;

pub use clique::{find_cliques, CliqueGraph, CliqueMode};
pub use cover::{solve_cover, solve_cover_parallel, CoverInstance, CoverMode, CoverResult, Solver};
