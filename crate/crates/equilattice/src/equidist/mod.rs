//! Empirical measures of lattice points and sublattices and their limits.

pub mod counting;
pub mod grassmann;
pub mod measure;
pub mod oracle;
pub mod report;
pub mod window;

pub use counting::{rank1_totals, rank1_window_counts, rank2_totals, Rank1Counts};
pub use grassmann::{
    project_sublattice, project_to_grassmannian, project_to_sqrtm_frame, project_to_unit_discriminant, GrassmannPoint,
    UnitDiscriminantPoint,
};
pub use measure::{integrate, EmpiricalMeasure, MeasurePoint, TargetSpace};
pub use oracle::{
    grassmann_haar_oracle, invariant_plane_oracle, oracle_limit_measure, oracle_limit_measure_windowed, OracleEstimate,
};
pub use report::{convergence_report, ConvergenceReport, ConvergenceRow, NamedWindow, ReportOptions};
pub use window::{TupleWindow, Window};
