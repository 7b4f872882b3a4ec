pub mod confidence;
pub mod evaluation;
pub mod kg;
pub mod matching;
pub mod pipeline;
pub mod sources;
