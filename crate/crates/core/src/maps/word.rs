//! The cyclic word of a Morse circle map.

use serde::Serialize;

use crate::circle::Angle;
use crate::error::{Error, Result};

use super::MapAnalysis;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CriticalKind {
    LocalMax,
    LocalMin,
}

#[derive(Clone, Debug, Serialize)]
pub struct Letter {
    pub point: Angle,
    pub value: Angle,
    pub kind: CriticalKind,
    /// Lift increment along the branch to the next letter.
    pub increment: f64,
}

/// Critical points in positive domain order with their values and kinds.
#[derive(Clone, Debug, Serialize)]
pub struct CyclicWord {
    pub letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

pub fn cyclic_word(analysis: &MapAnalysis) -> Result<CyclicWord> {
    let cps = analysis.critical_points();
    if cps.is_empty() {
        return Err(Error::NoExceptionalValues);
    }
    let letters: Vec<Letter> = cps
        .iter()
        .zip(analysis.branches())
        .map(|(c, b)| Letter {
            point: c.t,
            value: c.value,
            kind: if c.second_derivative < 0.0 {
                CriticalKind::LocalMax
            } else {
                CriticalKind::LocalMin
            },
            increment: b.increment(),
        })
        .collect();
    let m = letters.len();
    if m % 2 == 1 || (0..m).any(|i| letters[i].kind == letters[(i + 1) % m].kind) {
        return Err(Error::NonAlternatingWord);
    }
    Ok(CyclicWord { letters })
}
