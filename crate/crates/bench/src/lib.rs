//! Fixtures shared by the criterion benchmarks.

use deltamass::catalog::{builtin, DEFAULT_SEED};
use deltamass::limitop::blocks;
use deltamass::{ProblemSpec, SLProblem};

/// Bundled specs exercised by every benchmark group.
pub const FIXTURES: [&str; 3] = ["dirichlet-symmetric", "jordan-left", "generic-random"];

pub fn fixture(name: &str) -> ProblemSpec {
    builtin(name, DEFAULT_SEED).unwrap_or_else(|| panic!("unknown fixture {name}"))
}

/// Left outer block of a fixture.
pub fn outer_block(name: &str) -> SLProblem {
    blocks(&fixture(name)).aa
}
