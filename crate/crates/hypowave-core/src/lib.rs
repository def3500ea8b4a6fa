//! Spectral workbench for weakly hyperbolic wave equations
//! `∂²ₜu + a(t) L u = 0` on compact and nilpotent Lie groups.
//!
//! The crate is organised around the chain
//!
//! ```text
//! coefficient ──→ mode_ode ──→ wave
//!                      │          │
//! su2 / heisenberg ────┴──→ gevrey┘
//! ```
//!
//! * [`coefficient`] — propagation speeds `a(t)` in four regularity classes,
//!   mollification of `√a`, regularised characteristic roots.
//! * [`mode_ode`] — the scalar mode equation `v'' + β² a(t) v = 0`:
//!   symmetriser energies, adaptive integration, envelope verification.
//! * [`su2`] — matrix symbols of left-invariant operators on SU(2):
//!   ladder operators, sub-Laplacian, Riesz-type words.
//! * [`heisenberg`] — Hermite-basis symbols on the first Heisenberg group.
//! * [`gevrey`] — Gevrey-class diagnostics on spectral coefficient data.
//! * [`wave`] — Fourier decoupling of the group wave equation into modes,
//!   with Sobolev and Gevrey well-posedness checks.

pub mod coefficient;
pub mod gevrey;
pub mod heisenberg;
pub mod linalg;
pub mod mode_ode;
pub mod spectral;
pub mod su2;
pub mod wave;

mod dopri5;

pub use linalg::MatrixNorms;
