//! Colour image encryption driven by Lorenz-system keystreams and DCT2
//! energy compaction.
//!
//! Each RGB component is split into two payloads. The DCT2 coefficients that
//! carry 99.9 % of the component's energy are log-compressed, row-rotated and
//! added on top of integer-valued keystream planes (the *carrier*). What the
//! retained coefficients fail to reconstruct (the *difference image*) is
//! encrypted with three rounds of XOR / sort-permutation / cyclic-shift
//! driven by keystream planes derived from three 6-character keys.
//!
//! Module map:
//!
//! * [`lorenz`] key schedule and fixed-step RK4 integration of the Lorenz system
//! * [`dct`] orthonormal 1D/2D DCT-II and energy-based coefficient selection
//! * [`keystream`] trajectory → per-component byte planes and permutations
//! * [`cipher`] encryption / decryption pipelines
//! * [`analysis`] histogram, correlation, NPCR/UACI/MAE, entropy, PSNR
//! * [`io`] PPM images, the `LDCT` container, and CSV/PGM exports
//! * [`cli`] the `ldct` command-line front end

#![forbid(unsafe_code)]

pub mod analysis;
pub mod cipher;
pub mod cli;
pub mod config;
pub mod dct;
mod error;
mod fft;
pub mod grid;
pub mod io;
pub mod keystream;
pub mod lorenz;
pub mod selftest;

pub use error::{Error, Result};
pub use grid::{Grid, Matrix, Plane};
