use thiserror::Error;

/// Errors raised by the numeric layers. Slice indices carried by variants
/// are one-based, matching how frequency slices are usually reported.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("tensor is singular: spectral slice {slice} has reciprocal condition {rcond:e}")]
    SingularTensor { slice: usize, rcond: f64 },

    #[error("matrix is singular (reciprocal condition {rcond:e})")]
    SingularMatrix { rcond: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance for a real result of norm {norm:e}")]
    Consistency { residue: f64, norm: f64 },

    #[error("spectral slice {slice} is defective: eigenvector reciprocal condition {rcond:e}")]
    DefectiveSlice { slice: usize, rcond: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("matrix exponential overflowed")]
    Overflow,

    #[error("{}", uncontrollable_message(*.slice, *.rank, *.required))]
    Uncontrollable {
        slice: Option<usize>,
        rank: usize,
        required: usize,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("desired spectra of slice {slice} are not conjugate to slice {partner}; the gain would be complex")]
    ConjugacyViolation { slice: usize, partner: usize },

    #[error("requested eigenvalues of a real pair are not closed under conjugation")]
    NotConjugateClosed,

    #[error("time grid must start at 0 and be strictly increasing (violated at index {index})")]
    NonMonotoneGrid { index: usize },

    #[error("tensor function `{function}` failed on spectral slice {slice}: {source}")]
    EvaluatorFailure {
        function: String,
        slice: usize,
        #[source]
        source: Box<Error>,
    },
}

fn uncontrollable_message(slice: Option<usize>, rank: usize, required: usize) -> String {
    match slice {
        Some(s) => format!("uncontrollable: slice {s} has Kalman rank {rank} < {required}"),
        None => format!("uncontrollable: Kalman rank {rank} < {required}"),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
