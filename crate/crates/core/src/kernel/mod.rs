//! Interior-point solvers for the two convex subproblems.
//!
//! Both are barrier methods on the epigraph form `max t s.t. g_j >= t`:
//! [`sdp`] works over unit-diagonal Hermitian PSD matrices inside a
//! Frobenius ball, [`concave_box`] over a box of real variables.

pub mod concave_box;
pub mod sdp;

pub use concave_box::{solve_concave_box, ConcaveBoxProblem, ConcaveFn, ConcaveSolution};
pub use sdp::{solve_sdp, LogTerm, SdpProblem, SdpSolution, SmoothConstraint};

/// Outcome of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    Infeasible,
    NumericalTrouble,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Optimal => "optimal",
            Self::MaxIter => "max_iter",
            Self::Infeasible => "infeasible",
            Self::NumericalTrouble => "numerical_trouble",
        }
    }
}

impl core::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective: f64,
    /// Newton steps taken.
    pub iterations: usize,
    pub max_violation: f64,
    /// Duality-gap bound `nu / tau` at the last centered point.
    pub gap: f64,
}

/// One row per centering stage of a barrier solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub tau: f64,
    pub objective: f64,
    /// Newton decrement `lambda² / 2` at the end of the stage.
    pub decrement: f64,
    pub gap: f64,
}

/// Barrier growth factor between centering stages.
pub(crate) const TAU_GROWTH: f64 = 20.0;
/// Centering stops once `lambda² / 2` falls below this.
pub(crate) const CENTERING_TOL: f64 = 1e-9;
/// Armijo fraction and backtracking factor.
pub(crate) const ARMIJO: f64 = 0.25;
pub(crate) const BACKTRACK: f64 = 0.5;
pub(crate) const MAX_BACKTRACK: usize = 60;
/// Largest step tried when the full Newton step keeps decreasing the barrier.
pub(crate) const MAX_EXPAND: f64 = 64.0;
