use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operands belong to different mode bases (omega0 {0} vs {1})")]
    BasisMismatch(f64, f64),
    #[error("map violates the symplectic condition (max deviation {0:.3e})")]
    NotSymplectic(f64),
    #[error("generator has a nonzero linear part; only homogeneous quadratics exponentiate to linear maps")]
    LinearGenerator,
    #[error("matrix exponential produced non-finite entries")]
    ExponentialDiverged,
    #[error("cranked oscillator is unstable at omega = {omega} (critical frequency {critical})")]
    UnstableRegime { omega: f64, critical: f64 },
    #[error("Fermi level is degenerate and partially filled ({filled} of {available} orbitals at energy {energy})")]
    OpenShell {
        energy: f64,
        filled: usize,
        available: usize,
    },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("angular momentum {requested} is outside the attainable range [0, {max}]")]
    OutOfRange { requested: f64, max: f64 },
    #[error("parameters jump along the curve at t = {0}")]
    NonSmooth(f64),
    #[error("tangent vectors are attached to different base points")]
    BaseMismatch,
    #[error("deformation in the rotating plane vanishes (w2 = w3 or no quanta imbalance)")]
    DegenerateDeformation,
    #[error("isovector restoring constant {0} is not positive; the scissors mode is unstable")]
    WrongSignCoupling(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
