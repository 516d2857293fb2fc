#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod domain;
pub mod fd;
pub mod kernel;
pub mod quad;
pub mod reconstruct;
pub mod special;
pub mod synth;
