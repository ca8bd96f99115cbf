use std::io::{self, Write};

use chrono::{DateTime, Utc};

/// Provenance header written at the top of every output file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub fingerprint: String,
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp: String,
}

impl RunManifest {
    /// Stamps the current time, or `SOURCE_DATE_EPOCH` when it is set so that
    /// whole output files can be reproduced byte for byte.
    pub fn new(command: impl Into<String>, fingerprint: impl Into<String>, seed: Option<u64>) -> Self {
        let now = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.trim().parse::<i64>().ok())
            .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
            .unwrap_or_else(Utc::now);
        Self {
            command: command.into(),
            fingerprint: fingerprint.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp: now.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
        }
    }

    pub fn write_header<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# command: {}", self.command)?;
        writeln!(w, "# scenario_fingerprint: {}", self.fingerprint)?;
        writeln!(w, "# tool_version: {}", self.version)?;
        match self.seed {
            Some(seed) => writeln!(w, "# seed: {seed}")?,
            None => writeln!(w, "# seed:")?,
        }
        writeln!(w, "# timestamp: {}", self.timestamp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let m = RunManifest {
            command: "sweep".into(),
            fingerprint: "abcd".into(),
            version: "0.1.0".into(),
            seed: Some(7),
            timestamp: "2020-01-01T00:00:00Z".into(),
        };
        let mut out = Vec::new();
        m.write_header(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().all(|l| l.starts_with("# ")));
        assert!(text.contains("# seed: 7\n"));
    }

    #[test]
    fn timestamp_is_iso_utc() {
        let m = RunManifest::new("analytic", "ff", None);
        assert!(m.timestamp.ends_with('Z'));
        assert_eq!(m.timestamp.len(), 20);
    }
}
