//! Explicit codes: the cyclic code D in H(13,2) and Hamming-code retractions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{hamming_code, max_weight_retraction, FieldTable};
use crate::hamming::{CodeSet, Space};
use crate::partitions::{verify_cr, IntersectionArray};

const D_PATTERNS: [&str; 2] = ["000100ab01c1d", "111011ab10c0d"];

/// All cyclic shifts of 000100ab01c1d and 111011ab10c0d over a,b,c,d ∈ {0,1}.
pub fn construct_code_d() -> Result<CodeSet> {
    let space = Space::new(13, 2)?;
    let mut ranks = Vec::with_capacity(416);
    for pattern in D_PATTERNS {
        for free in 0..16u8 {
            let mut k = 0;
            let word: Vec<u8> = pattern
                .bytes()
                .map(|b| match b {
                    b'0' | b'1' => b - b'0',
                    _ => {
                        k += 1;
                        (free >> (k - 1)) & 1
                    }
                })
                .collect();
            for shift in 0..13 {
                let rotated: Vec<u8> = (0..13).map(|i| word[(i + shift) % 13]).collect();
                ranks.push(space.rank_of(&rotated));
            }
        }
    }
    let code = CodeSet::from_ranks(space, ranks)?;
    debug_assert_eq!(code.len(), 416);
    Ok(code)
}

/// Full-weight words of the Hamming code of redundancy m over GF(q), in H(n, q−1).
pub fn hamming_retraction(m: usize, q: usize) -> Result<CodeSet> {
    let field = FieldTable::new(q)?;
    max_weight_retraction(&hamming_code(m, &field)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SurveyVerdict {
    Cr { array: Option<IntersectionArray>, size: usize, cell_sizes: Vec<u64> },
    NotCr { size: usize, cell_sizes: Vec<u64> },
    NoFullWeight,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyEntry {
    pub m: usize,
    pub q: usize,
    pub n: usize,
    pub verdict: SurveyVerdict,
}

/// Largest (q−1)^n the survey will enumerate.
pub const SURVEY_BUDGET: u64 = 100_000_000;

pub fn retraction_survey(pairs: &[(usize, usize)]) -> Result<Vec<SurveyEntry>> {
    let mut out = Vec::with_capacity(pairs.len());
    for &(m, q) in pairs {
        let field = FieldTable::new(q)?;
        let n = ((q.pow(m as u32)) - 1) / (q - 1);
        let target = ((q - 1) as u64).checked_pow(n as u32);
        let dimension = (q as u64).checked_pow((n - m) as u32);
        let verdict = if q < 3 {
            SurveyVerdict::Skipped { reason: "retraction needs q ≥ 3".into() }
        } else if target.is_none_or(|t| t > SURVEY_BUDGET) || dimension.is_none_or(|d| d > 64 * SURVEY_BUDGET) {
            SurveyVerdict::Skipped { reason: "budget".into() }
        } else {
            match max_weight_retraction(&hamming_code(m, &field)?) {
                Err(Error::NoFullWeight) => SurveyVerdict::NoFullWeight,
                Err(e) => return Err(e),
                Ok(code) => {
                    let v = verify_cr(&code)?;
                    let cell_sizes = v.cell_sizes().to_vec();
                    if v.is_cr() {
                        SurveyVerdict::Cr { array: v.array().cloned(), size: code.len(), cell_sizes }
                    } else {
                        SurveyVerdict::NotCr { size: code.len(), cell_sizes }
                    }
                }
            }
        };
        out.push(SurveyEntry { m, q, n, verdict });
    }
    Ok(out)
}
