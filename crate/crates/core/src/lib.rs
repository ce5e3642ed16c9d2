pub mod exactlin;
pub mod combinat;
pub mod nearby;
pub mod report;
pub mod strata;
pub mod instances;
pub mod monodromy;
pub mod spectral;
pub mod groth;
pub mod config;
pub mod verify;
pub mod cli;
