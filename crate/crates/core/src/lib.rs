//! Pseudo-splitness and s-invariants of finite Galois data, smooth Kato
//! fans with their subdivisions and height bound, and a prime-by-prime
//! root oracle over `Q`.
//!
//! Runnable tours of each part live under `examples/`.

pub mod etale;
pub mod fan;
pub mod frobenian;
pub mod oracle;
pub mod perm;
pub mod problem;
pub mod rational;
