//! Detector catalogs for both supported languages.

pub mod chaincode;
pub mod solidity;
