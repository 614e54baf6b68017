use serde::Serialize;

use crate::padic::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The claim is not established for this regime; nothing was asserted.
    NotAsserted,
}

/// Outcome of one machine check.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub claim: String,
    pub status: Status,
    /// Smallest coefficient valuation seen in the residual, if any.
    pub min_valuation: Option<HalfInt>,
    /// Valuation the claim requires.
    pub required: Option<HalfInt>,
    /// First offending item on failure.
    pub witness: Option<String>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, claim: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            claim: claim.into(),
            status: Status::Pass,
            min_valuation: None,
            required: None,
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn fail(&mut self, witness: impl Into<String>) {
        self.status = Status::Fail;
        if self.witness.is_none() {
            self.witness = Some(witness.into());
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Fold another report in: any failure fails the whole.
    pub fn absorb(&mut self, other: &VerificationReport) {
        if other.status == Status::Fail {
            self.fail(format!(
                "{}: {}",
                other.check,
                other.witness.clone().unwrap_or_default()
            ));
        }
        if let Some(v) = other.min_valuation {
            self.min_valuation = Some(self.min_valuation.map_or(v, |m| m.min(v)));
        }
    }
}
