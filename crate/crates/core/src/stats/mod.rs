//! Chi-square tests, p-values and Krippendorff's alpha.

mod alpha;
mod chi2;

pub use alpha::{kripp_alpha, RatingsMatrix};
pub use chi2::{chi2_2x2, chi2_gof, chi2_p, Chi2Result};
