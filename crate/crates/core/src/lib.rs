pub mod cayley;
pub mod cli;
pub mod dehn;
pub mod extension;
pub mod invariants;
pub mod presentation;
pub mod sampling;
pub mod smallcancellation;
pub mod words;
