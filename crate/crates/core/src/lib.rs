pub mod cases;
pub mod cli;
pub mod corpus;
pub mod eval;
pub mod formula;
pub mod fresh;
pub mod herbrand;
pub mod library;
pub mod print;
pub mod sst;
pub mod syntax;
pub mod term;
pub mod types;
