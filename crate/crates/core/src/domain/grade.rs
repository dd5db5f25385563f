use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A letter grade on the 12-step scale, or `Missing` for a required course
/// that was never completed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LetterGrade {
    A,
    AMinus,
    BPlus,
    B,
    BMinus,
    CPlus,
    C,
    CMinus,
    DPlus,
    D,
    DMinus,
    F,
    Missing,
}

/// The twelve letter grades, best first.
pub const LETTER_GRADES: [LetterGrade; 12] = [
    LetterGrade::A,
    LetterGrade::AMinus,
    LetterGrade::BPlus,
    LetterGrade::B,
    LetterGrade::BMinus,
    LetterGrade::CPlus,
    LetterGrade::C,
    LetterGrade::CMinus,
    LetterGrade::DPlus,
    LetterGrade::D,
    LetterGrade::DMinus,
    LetterGrade::F,
];

impl LetterGrade {
    /// Encoded value; `Missing` counts as an F.
    pub fn encode(self) -> f64 {
        use LetterGrade::*;
        match self {
            A => 2.0,
            AMinus => 1.7,
            BPlus => 1.3,
            B => 1.0,
            BMinus => 0.7,
            CPlus => 0.3,
            C => 0.0,
            CMinus => -0.3,
            DPlus => -0.7,
            D => -1.0,
            DMinus => -1.3,
            F | Missing => -2.0,
        }
    }

    /// Inverse of [`encode`](Self::encode) on the twelve letters. An encoded
    /// -2.0 decodes to `F`, since imputed cells are indistinguishable from F.
    pub fn from_encoded(value: f64) -> Option<LetterGrade> {
        LETTER_GRADES.iter().copied().find(|g| g.encode() == value)
    }

    pub fn symbol(self) -> &'static str {
        use LetterGrade::*;
        match self {
            A => "A",
            AMinus => "A-",
            BPlus => "B+",
            B => "B",
            BMinus => "B-",
            CPlus => "C+",
            C => "C",
            CMinus => "C-",
            DPlus => "D+",
            D => "D",
            DMinus => "D-",
            F => "F",
            Missing => "",
        }
    }

    /// Case-insensitive lookup of a letter symbol. Blank input is `Missing`;
    /// anything else that is not a letter grade yields `None`.
    pub fn parse_symbol(s: &str) -> Option<LetterGrade> {
        let s = s.trim();
        if s.is_empty() {
            return Some(LetterGrade::Missing);
        }
        LETTER_GRADES
            .iter()
            .copied()
            .find(|g| g.symbol().eq_ignore_ascii_case(s))
    }

    pub fn is_missing(self) -> bool {
        self == LetterGrade::Missing
    }
}

impl fmt::Display for LetterGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for LetterGrade {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LetterGrade::parse_symbol(s).ok_or_else(|| format!("unrecognized mark {s:?}"))
    }
}

pub fn encode_grade(g: LetterGrade) -> f64 {
    g.encode()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_table() {
        let expected = [
            2.0, 1.7, 1.3, 1.0, 0.7, 0.3, 0.0, -0.3, -0.7, -1.0, -1.3, -2.0,
        ];
        for (g, v) in LETTER_GRADES.iter().zip(expected) {
            assert_eq!(encode_grade(*g), v, "{g}");
        }
        assert_eq!(encode_grade(LetterGrade::Missing), -2.0);
    }

    #[test]
    fn encoding_is_injective_and_strictly_decreasing() {
        for w in LETTER_GRADES.windows(2) {
            assert!(w[0].encode() > w[1].encode());
        }
        for g in LETTER_GRADES {
            assert_eq!(LetterGrade::from_encoded(g.encode()), Some(g));
        }
        assert_eq!(LetterGrade::from_encoded(0.5), None);
    }

    #[test]
    fn symbols_parse_case_insensitively() {
        assert_eq!(LetterGrade::parse_symbol("b+"), Some(LetterGrade::BPlus));
        assert_eq!(LetterGrade::parse_symbol(" a- "), Some(LetterGrade::AMinus));
        assert_eq!(LetterGrade::parse_symbol(""), Some(LetterGrade::Missing));
        assert_eq!(LetterGrade::parse_symbol("E"), None);
        assert_eq!(LetterGrade::parse_symbol("W"), None);
        for g in LETTER_GRADES {
            assert_eq!(g.symbol().parse::<LetterGrade>(), Ok(g));
        }
    }
}
