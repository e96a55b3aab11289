use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("`{field}` = {value} is out of range, expected {bound}")]
    Range {
        field: String,
        value: String,
        bound: String,
    },
    #[error("cell ({x}, {y}) is outside the {width}x{height} grid")]
    OutOfBounds { x: i64, y: i64, width: u32, height: u32 },
    #[error("food source is empty")]
    NoFood,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("no path from engineer {from} to engineer {to}")]
    Unreachable { from: u32, to: u32 },
    #[error("need at least 2 replications on each side, got {n_a} and {n_b}")]
    InsufficientReplications { n_a: usize, n_b: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn range(field: &str, value: impl ToString, bound: &str) -> Self {
        Error::Range {
            field: field.to_string(),
            value: value.to_string(),
            bound: bound.to_string(),
        }
    }

    /// True for errors caused by the user's input rather than the run.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::NoFood | Error::Unreachable { .. })
    }
}

/// Checks `lo <= value <= hi`.
pub(crate) fn check_unit(field: &str, value: f64) -> Result<()> {
    check_closed(field, value, 0.0, 1.0)
}

pub(crate) fn check_closed(field: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_nan() || value < lo || value > hi {
        return Err(Error::range(field, value, &format!("[{lo},{hi}]")));
    }
    Ok(())
}

pub(crate) fn check_non_negative(field: &str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 || value.is_infinite() {
        return Err(Error::range(field, value, ">= 0"));
    }
    Ok(())
}

pub(crate) fn check_positive<T: PartialOrd + Default + ToString>(field: &str, value: T) -> Result<()> {
    if value <= T::default() {
        return Err(Error::range(field, value.to_string(), "> 0"));
    }
    Ok(())
}
