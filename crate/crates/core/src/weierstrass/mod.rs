//! Weierstrass data, the null form `α`, the induced metric and periods.

mod alpha;
mod data;
mod metric;
mod period;

pub use alpha::{alpha, AlphaForm};
pub use data::{finite_divisor, function_order, OneForm, WeierstrassData};
pub use metric::{
    normal_of, pointwise_geometry, regularity_and_completeness, total_curvature, EndOrder, MetricReport,
    PointGeometry,
};
pub use period::{period_report, period_report_for, PeriodEntry, PeriodReport, DEFAULT_PERIOD_TOL};
