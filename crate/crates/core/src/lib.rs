//! Length-equivalent curve pairs on hyperbolic surfaces.

pub mod bracket;
pub mod intersections;
pub mod pipeline;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod sl2;
pub mod trace;
pub mod word;

pub use sampler::{certify_ping_pong, perturb, sample_representation, PingPongCertificate, Representation, RibbonTopology};
pub use bracket::{bracket, bracket_self, equal_term_pairs, FormalSum};
pub use intersections::{mutual_intersections, self_intersections, IntersectionRecord};
pub use pipeline::{build_pair_general, build_pair_self, check_equal_length, check_nonconjugate, find_min_n, is_filling, CurvePair, Filling};
pub use report::{emit, run, Format, Report, RunConfig, RunError};
pub use scalar::Scalar;
pub use sl2::{Axis, Boundary, HPoint, Mat2};
pub use trace::{trace_polynomial, verify_trace_identity, TracePolynomial};
pub use word::{are_conjugate, cyclic_normal_form, is_conjugate_to_inverse, CyclicWord, Letter, SurfaceSpec, Word};

pub type Mat2F64 = Mat2<f64>;
pub type Mat2F32 = Mat2<f32>;
pub type AxisF64 = Axis<f64>;
pub type HPointF64 = HPoint<f64>;
