pub mod text;
pub mod upset;
pub mod worlds;
pub mod formulas;
pub mod semantics;
pub mod mutation;
pub mod asimulation;
pub mod suites;
