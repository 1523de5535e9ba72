pub mod cli;
pub mod ingest;
pub mod od;
pub mod report;
pub mod schedule;
pub mod stats;
pub mod steps;
pub mod synthgen;
