//! Non-Bloch band theory for one-dimensional non-Hermitian tight-binding
//! chains: generalized Brillouin zones, open-boundary spectra, saddle
//! points, PT-breaking thresholds, densities of states and the transfer
//! matrix duality.
//!
//! Models are Laurent polynomials `H(β) = Σ h_n β^n`. Most of the crate is
//! generic over the real scalar ([`Real`]); the aliases below fix it to
//! `f64`. The extended types in [`extended`] exist for eigenvalue problems
//! whose non-normality swamps double precision.
//!
//! ```
//! use nonbloch::{pt_threshold, ModelFamily};
//!
//! let family = ModelFamily::third_neighbor(1.0_f64, 0.2, 0.2, 0.0);
//! let t = pt_threshold(&family, (0.0, 0.5)).unwrap();
//! assert!((t.gamma_c.unwrap() - 0.0786).abs() < 5e-4);
//! ```

pub mod dos;
pub mod error;
pub mod extended;
pub mod gbz;
pub mod linalg;
pub mod model;
pub mod resultant;
pub mod rootfind;
pub mod saddle;
pub mod scalar;
pub mod spectra;
pub mod threshold;
pub mod transfer;

pub use dos::{band_integral, dos_at, dos_curve, dos_histogram, vanhove_exponent, DosCurve, DosValue, VanHoveFit};
pub use error::{Error, Result};
pub use extended::{DoubleDouble, QuadDouble};
pub use gbz::{agbz_sweep, detect_cusps, gbz, gbz_filter, gbz_from_spectrum, Cusp, GbzPoint, GbzPointSet};
pub use model::{load_model, LaurentPolynomial, ModelFamily, ModelFile, RealnessCertificate};
pub use resultant::{discriminant_gamma, resultant_at, saddle_energy_poly, sylvester, GammaDiscriminant, SaddleEnergyPoly};
pub use rootfind::{middle_pair, roots, MiddlePair, Polynomial, RootSet};
pub use saddle::{classify_order, coalescence_pairs, max_imag_derivative_check, saddle_points, SaddlePoint};
pub use scalar::{Cplx, Real};
pub use spectra::{
    complex_fraction, obc_eigenvalues, obc_matrix, obc_spectrum, phase_diagram, ObcMatrix, Precision, ScaleMode,
    SpectrumResult, SweepOptions,
};
pub use threshold::{phase_boundary, pt_threshold, pt_threshold_with, GammaCandidate, ThresholdOptions, ThresholdResult};
pub use transfer::{ep_defectiveness, transfer_matrix, TransferMatrix};

/// Double-precision model.
pub type Laurent64 = LaurentPolynomial<f64>;
pub type Family64 = ModelFamily<f64>;
pub type Polynomial64 = Polynomial<f64>;
pub type Saddle64 = SaddlePoint<f64>;
pub type Threshold64 = ThresholdResult<f64>;
pub type Complex64 = num_complex::Complex<f64>;
