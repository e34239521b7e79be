//! swelint: a registry-driven static analyzer for smart-contract weaknesses
//! in Solidity sources and Go chaincode.

pub mod config;
pub mod engine;
pub mod keccak;
pub mod registry;
pub mod rules;
pub mod solidity;
