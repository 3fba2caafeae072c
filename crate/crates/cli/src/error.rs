use serde::Serialize;

/// Exit code for malformed input.
pub const EXIT_PARSE: i32 = 2;
/// Exit code for inputs outside the domain or parameter range.
pub const EXIT_DOMAIN: i32 = 3;
/// Exit code for solver nonconvergence.
pub const EXIT_NONCONVERGENCE: i32 = 4;
/// Exit code when `selftest` finds a failing criterion.
pub const EXIT_SELFTEST_FAILED: i32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    #[serde(skip)]
    pub code: i32,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl CliError {
    pub fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            kind: "parse",
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            kind: "parse",
            field: None,
            message: message.into(),
        }
    }

    pub fn nonconvergence(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NONCONVERGENCE,
            kind: "nonconvergence",
            field: None,
            message: message.into(),
        }
    }

    /// `{"error": {...}}` on one line.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl From<bregman_core::Error> for CliError {
    fn from(e: bregman_core::Error) -> Self {
        use bregman_core::Error as E;
        let (code, kind) = match e {
            E::Domain { .. } | E::Parameter(_) => (EXIT_DOMAIN, "domain"),
            E::NonConvergence { .. } => (EXIT_NONCONVERGENCE, "nonconvergence"),
            E::DimensionMismatch { .. }
            | E::InvalidVector(_)
            | E::InvalidSet(_)
            | E::InvalidFunction(_) => (EXIT_PARSE, "parse"),
        };
        Self {
            code,
            kind,
            field: None,
            message: e.to_string(),
        }
    }
}
