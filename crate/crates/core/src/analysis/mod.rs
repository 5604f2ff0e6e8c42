//! Solution fields, error norms and observed convergence rates.

mod field;
mod norms;
mod rates;

pub use field::SolutionField;
pub use norms::{energy_parts, error_energy, error_l2, EnergyParts};
pub use rates::{observed_rates, rate, records_to_csv, ErrorRecord, CSV_HEADER};

use crate::Vec3;

/// A smooth vector field with known curls, used as a manufactured solution.
pub trait ExactSolution: Sync {
    fn dim(&self) -> usize;

    /// `curl^k u` at `x` for `k ≤ 4`; only the leading
    /// [`curl_components`](crate::poly::curl_components) entries are read.
    fn curl_n(&self, k: usize, x: &Vec3) -> Vec3;

    /// Right-hand side `f = curl⁴u + u`.
    fn source(&self, x: &Vec3) -> Vec3;

    fn value(&self, x: &Vec3) -> Vec3 {
        self.curl_n(0, x)
    }
}
