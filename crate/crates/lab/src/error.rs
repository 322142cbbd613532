use coherence_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("format: {0}")]
    Format(String),
    #[error("{0}: {1}")]
    Io(String, std::io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl LabError {
    /// 1 for numerical tolerance violations, 2 for everything that makes the
    /// request itself unusable.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(
                CoreError::Incomplete(_)
                | CoreError::IndefiniteShift { .. }
                | CoreError::NotUnitary(_)
                | CoreError::NotEnergyConserving(_)
                | CoreError::CoherentAncilla(_)
                | CoreError::NotCovariant(_),
            ) => 1,
            _ => 2,
        }
    }
}
