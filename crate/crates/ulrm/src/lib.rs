//! Born-Oppenheimer structure of ultralong-range Rydberg molecules (Rb/Cs):
//! quantum-defect Rydberg states, Fermi-pseudopotential curves with s- and
//! p-wave electron-atom scattering, vibrational levels, electron densities,
//! permanent dipole moments and polyatomic photoassociation spectra.

pub mod basis;
pub mod config;
pub mod density;
pub mod dipole;
pub mod error;
pub mod io;
pub mod pec;
pub mod radial;
pub mod regress;
pub mod scattering;
pub mod species;
pub mod spectra;
pub mod spline;
pub mod units;
pub mod vibrational;
pub mod workflows;

pub use error::{Result, UlrmError};
