//! Yield curve construction: log-discount cubic splines, forward-space
//! quadratics, tenor forward curves and OIS curve calibration.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod curve;
pub mod dates;
pub mod equivalence;
pub mod error;
pub mod forward;
pub mod instruments;
pub mod interpolation;
pub mod io;
pub mod lavery;
pub mod lp;
pub mod par;
pub mod pp;
pub mod tenor;

pub use calibration::{calibrate, CalibrationOptions, CalibrationProblem, CalibrationResult};
pub use curve::{CurveSample, CurveScheme, DateGrid, DiscountCurve, ZeroCurve};
pub use error::{Error, Result};
pub use forward::{ForwardKind, ForwardSplineCurve};
pub use instruments::{Instrument, Quote};
pub use interpolation::{SlopeScheme, SlopeVector};
pub use lavery::{LaveryBoundary, LaverySpec};
pub use par::Execution;
pub use pp::PiecewiseCubic;
pub use tenor::{TenorExtrapolation, TenorForwardCurve};
