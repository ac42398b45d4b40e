//! Generic cochain complexes, short exact sequences with their connecting
//! maps, simplicial cochains and Čech–CE double complexes.

mod complex;
mod double;
mod ses;
mod simplicial;

pub use complex::*;
pub use double::*;
pub use ses::*;
pub use simplicial::*;
