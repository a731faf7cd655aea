use thiserror::Error;

use crate::quadrature::LadderReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("radius {r} reaches the curvature singularity")]
    Singularity { r: f64 },

    #[error("radius {r} sits on the horizon pole r = r_s")]
    HorizonPole { r: f64 },

    #[error("no static observer at or inside the horizon (r0 = {r0}, r_s = {horizon})")]
    NoStaticObserver { r0: f64, horizon: f64 },

    #[error("Kruskal map overflows for null coordinate {coordinate}")]
    KruskalRange { coordinate: f64 },

    #[error("proper time {tau} lies outside the worldline domain")]
    OutOfDomain { tau: f64 },

    #[error("coordinate {patch} is undefined at proper time {tau}")]
    Patch { patch: &'static str, tau: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite integrand sample at (tau, tau') = ({tau}, {tau_prime})")]
    NonFinite { tau: f64, tau_prime: f64 },

    #[error("quadrature ladder did not converge{}: {report}", element_suffix(.element))]
    Convergence {
        element: Option<&'static str>,
        report: Box<LadderReport>,
    },

    #[error("density matrix is inconsistent: {0}")]
    Inconsistent(String),

    #[error("infeasible detector placement: {0}")]
    Placement(String),
}

fn element_suffix(element: &Option<&'static str>) -> String {
    match element {
        Some(name) => format!(" for {name}"),
        None => String::new(),
    }
}

impl Error {
    /// Tags a convergence failure with the matrix element it came from.
    pub fn for_element(self, name: &'static str) -> Self {
        match self {
            Error::Convergence { report, .. } => Error::Convergence {
                element: Some(name),
                report,
            },
            other => other,
        }
    }

    pub fn ladder(&self) -> Option<&LadderReport> {
        match self {
            Error::Convergence { report, .. } => Some(report),
            _ => None,
        }
    }
}
