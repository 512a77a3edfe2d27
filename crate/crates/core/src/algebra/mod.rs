pub mod field;
pub mod multipoly;
pub mod unipoly;
