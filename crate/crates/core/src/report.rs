//! Run reports: serde helpers for exact rationals and a stable JSON envelope.

use serde::{Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::format;
use crate::rational::{self, Rational};
use crate::structure::{AxiomReport, FiniteSemihypergroup};

pub fn ser_rational<S: Serializer>(value: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.serialize_str(&rational::format_short(value))
}

pub fn ser_opt_rational<S: Serializer>(value: &Option<Rational>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => ser_rational(v, serializer),
        None => serializer.serialize_none(),
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the canonical emitted form.
pub fn structure_digest(k: &FiniteSemihypergroup) -> String {
    sha256_hex(&format::emit_structure(k))
}

/// Envelope for one CLI invocation. Field order is the output key order;
/// `result` maps are key-sorted, so identical runs give identical bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub arguments: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axioms: Option<AxiomReport>,
    pub result: serde_json::Value,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str, arguments: &[String]) -> Self {
        RunReport {
            command: command.to_string(),
            arguments: arguments.to_vec(),
            points: None,
            structure_digest: None,
            axioms: None,
            result: serde_json::Value::Null,
            exit_code: 0,
        }
    }

    pub fn with_structure(mut self, k: &FiniteSemihypergroup) -> Self {
        self.points = Some(k.points());
        self.structure_digest = Some(structure_digest(k));
        self.axioms = Some(k.tensor().verify_axioms());
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report values serialize");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;
    use crate::rational::ratio;

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        let a = structure_digest(&builders::right_zero(2).unwrap());
        assert_eq!(a.len(), 64);
        assert_ne!(a, structure_digest(&builders::left_zero(2).unwrap()));
    }

    #[test]
    fn stable_json() {
        #[derive(Serialize)]
        struct Wrapper {
            #[serde(serialize_with = "ser_rational")]
            value: Rational,
            #[serde(serialize_with = "ser_opt_rational")]
            missing: Option<Rational>,
        }
        let w = Wrapper { value: ratio(-2, 6), missing: None };
        assert_eq!(serde_json::to_string(&w).unwrap(), r#"{"value":"-1/3","missing":null}"#);
        let mut report = RunReport::new("amen", &["x.shg".into()]).with_structure(&builders::right_zero(1).unwrap());
        report.result = serde_json::json!({"b": 1, "a": 2});
        let json = report.to_json();
        assert!(json.find("\"a\"").unwrap() < json.find("\"b\"").unwrap());
        assert_eq!(json, report.to_json());
    }
}
