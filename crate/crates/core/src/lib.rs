//! Weighted graph Laplacians, Schrödinger operators and the numerical probes
//! built on them: Dirichlet problems on finite regions, positive ground states
//! by exhaustion, intrinsic metrics, and kernel growth diagnostics.

// `!(a <= b)` is used on purpose so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod dirichlet;
pub mod error;
pub mod function;
pub mod graph;
pub mod ground_state;
pub mod io;
pub(crate) mod linalg;
pub mod metric;
pub mod operators;
pub mod precise;
pub mod probe;

pub use catalog::{Asymptotics, Completeness, PathFamily};
pub use dirichlet::{
    check_harnack, check_minimum_principle, harnack_certificate, solve_dirichlet, DirichletProblem, DirichletSolution,
    HarnackCertificate, HarnackCheck, MinimumPrincipleReport, MinimumPrincipleVerdict, SolveMethod,
};
pub use error::{Error, ErrorClass, Result};
pub use function::GraphFunction;
pub use graph::{
    combinatorial_ball, max_degree, neighbors, region_from_vertexset, CombinatorialBall, FiniteRegion, GraphBuilder,
    GraphSource, VertexId, WeightedGraph,
};
pub use ground_state::{
    exhaustion_step, ground_state_transform, run_exhaustion, ExhaustionReport, ExhaustionState, HarnackWindow, RadiusRow,
};
pub use metric::{
    classify_series, cutoff_function, delta_a, distances_from, distances_to_set, edge_length, kl_proxy_check,
    metric_ball, ray_completeness_diagnostic, CompletenessDiagnostic, MetricBall, SeriesDiagnostic, SeriesVerdict,
    WeightSumDiagnostic,
};
pub use operators::{
    apply_laplacian, apply_schrodinger, gauge_to_schrodinger, inner_product_weighted, quadratic_form,
    vertex_weight_unitary, GaugeDirection, LaplacianSpec, SchrodingerOperator,
};
pub use io::{read_graph, EdgeRecord, ExplicitGraph, FamilyRecord, GraphSpec, LoadedGraph};
pub use precise::DoubleDouble;
pub use probe::{
    agmon_identity_check, form_lower_bound, form_lower_bound_on, kernel_growth_probe, kernel_growth_probe_operator,
    kernel_recurrence, kernel_residual_diagnostic, laplacian_form_lower_bound, ring_estimate_check, AgmonReport,
    FormBound, GrowthVerdict, KernelProbeResult, KernelResidualDiagnostic, RingEstimateReport,
};
