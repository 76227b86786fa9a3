//! Machine-readable result documents.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Operators,
    Consistency,
    Convergence,
    Stability,
    Solvability,
    Oracle,
    Run,
    Eta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// Echo of the validated configuration, if the command took one.
    pub config: Option<Value>,
    pub seed: Option<u64>,
    /// Left empty by default so reruns produce byte-identical documents.
    pub timestamp: Option<String>,
    pub version: String,
}

impl Metadata {
    pub fn new(config: Option<Value>, seed: Option<u64>) -> Self {
        Metadata {
            config,
            seed,
            timestamp: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Failure record attached when a command ends in a numerical error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn from_error(e: &Error) -> Self {
        let mut root = e;
        while let Error::AtStep { source, .. } = root {
            root = source;
        }
        let kind = match root {
            Error::ContractionViolation { .. } => "contraction_violation",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Singular { .. } => "singular",
            Error::BlowUp { .. } => "blow_up",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::Io { .. } => "io",
            _ => "invalid_input",
        };
        ErrorRecord {
            kind: kind.into(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub kind: ReportKind,
    pub payload: Value,
    pub metadata: Metadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
}

impl Report {
    pub fn new<T: Serialize>(kind: ReportKind, payload: &T, metadata: Metadata) -> Result<Self> {
        Ok(Report {
            kind,
            payload: serde_json::to_value(payload)?,
            metadata,
            error: None,
        })
    }

    pub fn failure(kind: ReportKind, error: &Error, metadata: Metadata) -> Self {
        Report {
            kind,
            payload: Value::Null,
            metadata,
            error: Some(ErrorRecord::from_error(error)),
        }
    }

    /// Canonical form: pretty JSON with a trailing newline.
    pub fn to_canonical(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_canonical(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_canonical()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_canonical(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_round_trip() {
        let r = Report::new(
            ReportKind::Operators,
            &json!({"q": 0.1, "values": [1.0, 2.5e-300, -0.0], "name": "x"}),
            Metadata::new(Some(json!({"grid": {"J": 4}})), Some(42)),
        )
        .unwrap();
        let text = r.to_canonical();
        let back = Report::from_canonical(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_canonical(), text);
    }

    #[test]
    fn failure_record_unwraps_step_context() {
        let e = Error::AtStep {
            step: 3,
            source: Box::new(Error::ContractionViolation { q: 1.2 }),
        };
        let r = Report::failure(ReportKind::Run, &e, Metadata::new(None, None));
        let rec = r.error.as_ref().unwrap();
        assert_eq!(rec.kind, "contraction_violation");
        assert!(rec.message.contains('3'));
        assert_eq!(Report::from_canonical(&r.to_canonical()).unwrap(), r);
    }

    #[test]
    fn kind_names() {
        assert_eq!(
            serde_json::to_string(&ReportKind::Solvability).unwrap(),
            "\"solvability\""
        );
    }
}
