use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("qubit splitting Omega = 0 makes the coupling rescaling singular (lambda_c = 0)")]
    SingularRescaling,

    #[error("non-unique steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("steady-state linear system is singular after {attempts} pivot-row attempts")]
    SingularSystem { attempts: usize },

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualTooLarge { residual: f64, tol: f64 },

    #[error("Fock cutoff {cutoff} exhausted: tail population {tail:.3e} above {tail_tol:.3e} at the hard maximum")]
    CutoffExhausted {
        cutoff: usize,
        tail: f64,
        tail_tol: f64,
    },

    #[error("tail population {tail:.3e} exceeds {tail_tol:.3e} at t = {time:.4} with cutoff {cutoff}; rerun with a larger cutoff")]
    TailBreach {
        cutoff: usize,
        tail: f64,
        tail_tol: f64,
        time: f64,
    },

    #[error("step size underflow (h = {step:.3e}) at t = {time:.6}")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("integration exceeded {0} steps")]
    TooManySteps(usize),

    #[error("no superradiant fixed point at these parameters")]
    NoSuperradiantPhase,

    #[error("NP_down never destabilizes: r = {r} lies outside [{r_minus}, {r_plus}]")]
    OutsideRatioWindow { r: f64, r_minus: f64, r_plus: f64 },

    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("both couplings vanish; quantity undefined")]
    UndefinedCouplings,

    #[error("alpha_y = 0 (|lam_y| = 1): quadratic coefficients singular")]
    SingularQuadratic,

    #[error("no confining quartic term (beta^3 = {beta_cu:.6e} <= 0)")]
    NoConfiningQuartic { beta_cu: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
