pub mod corpus;
pub mod lexicon;
pub mod stats;
pub mod text;
pub mod valence;
pub mod sentiment;
pub mod regression;
pub mod pipeline;
