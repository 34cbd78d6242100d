//! Calendar periods for the quarterly and annual panels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency of a series or panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frequency {
    Quarterly,
    Annual,
}

impl Frequency {
    /// Observations per year.
    pub fn periods_per_year(self) -> usize {
        match self {
            Frequency::Quarterly => 4,
            Frequency::Annual => 1,
        }
    }
}

/// One observation period: a calendar quarter or a calendar year.
///
/// Ordering is chronological within a frequency; quarterly and annual keys
/// are never mixed inside one series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Period {
    Quarter { year: i32, quarter: u8 },
    Year { year: i32 },
}

impl Period {
    pub fn quarter(year: i32, quarter: u8) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::invalid(format!(
                "quarter must be 1..=4, got {quarter}"
            )));
        }
        Ok(Period::Quarter { year, quarter })
    }

    pub fn year(year: i32) -> Self {
        Period::Year { year }
    }

    /// Quarter containing the given calendar month (1-12).
    pub fn quarter_of_month(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::invalid(format!("month must be 1..=12, got {month}")));
        }
        Period::quarter(year, (month - 1) / 3 + 1)
    }

    pub fn frequency(&self) -> Frequency {
        match self {
            Period::Quarter { .. } => Frequency::Quarterly,
            Period::Year { .. } => Frequency::Annual,
        }
    }

    pub fn year_value(&self) -> i32 {
        match *self {
            Period::Quarter { year, .. } => year,
            Period::Year { year } => year,
        }
    }

    /// Quarter number (1-4) for quarterly periods, `None` for annual ones.
    pub fn quarter_value(&self) -> Option<u8> {
        match *self {
            Period::Quarter { quarter, .. } => Some(quarter),
            Period::Year { .. } => None,
        }
    }

    /// The immediately following period at the same frequency.
    pub fn next(&self) -> Period {
        match *self {
            Period::Quarter { year, quarter } => {
                if quarter == 4 {
                    Period::Quarter {
                        year: year + 1,
                        quarter: 1,
                    }
                } else {
                    Period::Quarter {
                        year,
                        quarter: quarter + 1,
                    }
                }
            }
            Period::Year { year } => Period::Year { year: year + 1 },
        }
    }

    /// The period `steps` positions after `self` at the same frequency.
    pub fn offset(&self, steps: i64) -> Period {
        match *self {
            Period::Quarter { year, quarter } => {
                let idx = year as i64 * 4 + (quarter as i64 - 1) + steps;
                Period::Quarter {
                    year: idx.div_euclid(4) as i32,
                    quarter: (idx.rem_euclid(4) + 1) as u8,
                }
            }
            Period::Year { year } => Period::Year {
                year: year + steps as i32,
            },
        }
    }

    /// Number of periods from `start` to `self` (0 when equal). Errors when
    /// the two periods have different frequencies.
    pub fn index_from(&self, start: &Period) -> Result<i64> {
        match (start, self) {
            (
                Period::Quarter { year: y0, quarter: q0 },
                Period::Quarter { year: y1, quarter: q1 },
            ) => Ok((*y1 as i64 * 4 + *q1 as i64) - (*y0 as i64 * 4 + *q0 as i64)),
            (Period::Year { year: y0 }, Period::Year { year: y1 }) => {
                Ok(*y1 as i64 - *y0 as i64)
            }
            _ => Err(Error::invalid("mixed quarterly and annual periods")),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Period::Quarter { year, quarter } => write!(f, "{year}Q{quarter}"),
            Period::Year { year } => write!(f, "{year}"),
        }
    }
}
