use serde_json::json;

/// Exit code 1: the run completed but a check failed.
pub const CHECK_FAILED: u8 = 1;
/// Exit code 2: bad usage, config or input data.
pub const USAGE: u8 = 2;

/// Core errors that mean the mathematics refused the problem rather than the input being malformed.
const CHECK_KINDS: [&str; 8] = [
    "NonResonanceViolation",
    "Resonance",
    "PreconditionEvidenceFailure",
    "DecayViolation",
    "Separation",
    "SpectrumHit",
    "NoConvergence",
    "Overflow",
];

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn config(kind: &str, message: String) -> Self {
        Failure { code: USAGE, kind: kind.to_string(), message }
    }

    pub fn from_core(e: greensolve::Error) -> Self {
        let kind = e.kind();
        let code = if CHECK_KINDS.contains(&kind) { CHECK_FAILED } else { USAGE };
        Failure { code, kind: kind.to_string(), message: e.to_string() }
    }

    pub fn io(e: std::io::Error) -> Self {
        Failure::config("Io", e.to_string())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "kind": self.kind, "message": self.message })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let resonant = greensolve::Error::NonResonanceViolation { frequency: 2.0, distance: 0.0 };
        assert_eq!(Failure::from_core(resonant).code, CHECK_FAILED);
        assert_eq!(Failure::from_core(greensolve::Error::Invalid("x".into())).code, USAGE);
        let f = Failure::config("Io", "gone".into());
        assert_eq!(f.to_json(), json!({ "kind": "Io", "message": "gone" }));
    }
}
