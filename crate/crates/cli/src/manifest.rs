use serde::Serialize;
use serde_json::Value;

/// Record of how a CSV output was produced.
///
/// Everything except `timestamp` is a function of the command line, so the
/// recorded `config` suffices to regenerate the output bit-for-bit.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub master_seed: Option<u64>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, master_seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            config,
            master_seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
