//! Versioned JSON envelopes for saved models.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    scalar: String,
    payload: T,
}

fn scalar_name<F: 'static>() -> &'static str {
    std::any::type_name::<F>()
}

/// Serialises `payload` with its kind tag, format version and scalar type.
pub fn to_json<T: Serialize, F: 'static>(kind: &str, payload: &T) -> Result<String> {
    let env =
        Envelope { format: kind.to_string(), version: FORMAT_VERSION, scalar: scalar_name::<F>().to_string(), payload };
    Ok(serde_json::to_string(&env)?)
}

pub fn from_json<T: DeserializeOwned, F: 'static>(kind: &str, text: &str) -> Result<T> {
    let env: Envelope<T> = serde_json::from_str(text)?;
    if env.format != kind {
        return Err(Error::Serde(format!("expected a {kind} artifact, found {}", env.format)));
    }
    if env.version != FORMAT_VERSION {
        return Err(Error::Serde(format!(
            "unsupported {kind} version {} (this build reads {FORMAT_VERSION})",
            env.version
        )));
    }
    if env.scalar != scalar_name::<F>() {
        return Err(Error::Serde(format!("artifact stores {} values, expected {}", env.scalar, scalar_name::<F>())));
    }
    Ok(env.payload)
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
