pub mod lemma;
pub mod mldegree;
pub mod mle;
pub mod multiplicity;
pub mod sample;
