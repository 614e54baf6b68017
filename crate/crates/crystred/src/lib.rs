pub mod binom;
pub mod cli;
pub mod hecke;
pub mod lemma_verify;
pub mod padic;
pub mod report;
pub mod symmod;
pub mod zigzag;
