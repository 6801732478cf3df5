//! Certification of the weighted integral inequalities behind the fixed
//! point argument, plus a direct check of the Duhamel kernel bound.

mod certify;
pub mod integrals;
mod kernel;
pub mod quadrature;
mod registry;

pub use certify::{
    certify_lemma, sample_points, CertifyOptions, LemmaReport, PointResult, Verdict, DOUBLING_LIMIT,
    REFINEMENT_LIMIT,
};
pub use integrals::{a1, a2, b1, h_tilde};
pub use kernel::{check_kernel_bound, hsrc_consistency, Derivative, HsrcConsistency, KernelSample, SourceBump};
pub use registry::{spot_checks, Domain, Hypothesis, LemmaId, LemmaSpec, Point, SpotCheck, Term};
