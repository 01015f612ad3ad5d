use crate::error::{Error, Result};

/// Environment variable overriding [`Limits::DEFAULT_MAX_VERTICES`].
pub const MAX_VERTICES_ENV: &str = "CYCLELIFT_MAX_VERTICES";

/// Size limits for anything that is enumerated vertex by vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_vertices: u64,
}

impl Limits {
    pub const DEFAULT_MAX_VERTICES: u64 = 1 << 20;

    pub fn new(max_vertices: u64) -> Self {
        Limits { max_vertices }
    }

    /// Default limits, with `CYCLELIFT_MAX_VERTICES` taking precedence when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(MAX_VERTICES_ENV) {
            Ok(raw) => raw
                .trim()
                .parse::<u64>()
                .map(Limits::new)
                .map_err(|e| Error::domain(format!("{MAX_VERTICES_ENV}={raw:?}: {e}"))),
            Err(_) => Ok(Limits::default()),
        }
    }

    pub fn check_vertices(&self, count: u64) -> Result<()> {
        if count > self.max_vertices {
            return Err(Error::overflow(format!(
                "{count} vertices exceeds the limit of {}",
                self.max_vertices
            )));
        }
        Ok(())
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits::new(Self::DEFAULT_MAX_VERTICES)
    }
}
