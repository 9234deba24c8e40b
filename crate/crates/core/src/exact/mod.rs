pub mod linalg;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;
pub mod trunc;
