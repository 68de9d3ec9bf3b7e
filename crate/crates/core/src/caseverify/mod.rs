//! Limit-spectrum constraint systems, feasibility scans and closed-form
//! certificates for the case analyses behind the rigidity results.

pub mod cases;
pub mod certificate;
pub mod pct;
pub mod scan;
pub mod system;

pub use cases::NamedCase;
pub use certificate::{certify, closed_form_contradiction, CertificateReport, CertificateValue, Conclusion};
pub use pct::{pct_sets, PctReport, PctVerdict};
pub use scan::{
    scan, scan_with, Cell, FeasibilityStatus, FeasibilityVerdict, GridExecutor, ScanBudget, ScanStats, Sequential,
};
pub use system::{ConstraintSystem, ExtraConstraint, Inequality, SignConstraint, SignKind};
