use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by front ends to pick a stable exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// I/O, parsing and malformed-input problems.
    Input,
    /// The requested design cannot be realized.
    Infeasible,
    /// Simulation or response analysis failed.
    Analysis,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid filter spec: {0}")]
    InvalidSpec(String),
    #[error("invalid prototype order {0}: must be at least 1")]
    InvalidOrder(usize),
    #[error("unsupported prototype order {0}: only second-order designs can be synthesized")]
    UnsupportedOrder(usize),
    #[error("infeasible coupling: delta*k = {0} must be below 1")]
    InfeasibleCoupling(f64),
    #[error("degenerate coupling: delta*k = {0} must be positive (couplings vanish)")]
    DegenerateCoupling(f64),
    #[error("series capacitor C_C = {cc:e} F is too small; minimum feasible C_C is {min:e} F (must exceed it)")]
    CcTooSmall { cc: f64, min: f64 },
    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),
    #[error("invalid netlist: {0}")]
    InvalidNetlist(String),
    #[error("floating node `{0}`: no path to ground")]
    FloatingNode(String),
    #[error("singular nodal matrix at {freq} Hz (pivot at node `{node}`)")]
    SingularSystem { node: String, freq: f64 },
    #[error("transmission line `{element}` is at a resonance pole at {freq} Hz")]
    LineResonance { element: String, freq: f64 },
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("frequency grids differ: {0}")]
    GridMismatch(String),
    #[error("no stopband: |S21| never drops below -3 dB")]
    NoStopband,
    #[error("sweep too narrow: {0}")]
    SweepTooNarrow(String),
    #[error("unknown or unsupported topology variant `{0}`")]
    UnknownVariant(String),
    #[error("no viable topology among candidates: {0}")]
    NoViableTopology(String),
    #[error("calibration infeasible: no probe produced a stopband (last point ca={ca:e} F, cb={cb:e} F)")]
    CalibrationInfeasible { ca: f64, cb: f64 },
    #[error("bias {voltage} V outside the usable range [{min}, {max}] V{}", .row.map(|r| format!(" (row {r})")).unwrap_or_default())]
    BiasOutOfRange {
        voltage: f64,
        min: f64,
        max: f64,
        row: Option<usize>,
    },
    #[error("capacitance {target:e} F is unreachable; achievable range is [{min:e}, {max:e}] F")]
    UnreachableCapacitance { target: f64, min: f64, max: f64 },
    #[error("invalid varactor model: {0}")]
    InvalidVaractor(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid quantity `{0}`")]
    Quantity(String),
    #[error("design file: {0}")]
    DesignFile(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidSpec(_)
            | InvalidOrder(_)
            | UnsupportedOrder(_)
            | InfeasibleCoupling(_)
            | DegenerateCoupling(_)
            | CcTooSmall { .. }
            | UnreachableCapacitance { .. }
            | BiasOutOfRange { .. } => ErrorClass::Infeasible,
            DegenerateNetwork(_)
            | FloatingNode(_)
            | SingularSystem { .. }
            | LineResonance { .. }
            | NoStopband
            | SweepTooNarrow(_)
            | NoViableTopology(_)
            | CalibrationInfeasible { .. }
            | GridMismatch(_) => ErrorClass::Analysis,
            InvalidNetlist(_)
            | InvalidGrid(_)
            | UnknownVariant(_)
            | InvalidVaractor(_)
            | InvalidArgument(_)
            | Parse { .. }
            | Quantity(_)
            | DesignFile(_)
            | Csv(_)
            | Io(_) => ErrorClass::Input,
        }
    }
}
