pub mod molgraph;
pub mod standardizer;
pub mod tables;
pub mod descriptors;
pub mod fingerprint;
pub mod filters;
pub mod diversity;
pub mod analytics;
pub mod pipeline;
