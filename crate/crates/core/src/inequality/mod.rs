//! The inequality suite: tags, checkers, instances and evaluation.

mod checks;
mod gram;
mod instance;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use checks::{
    check_bessel, check_bn_lemma, check_bn_lemma_both, check_boas_bellman, check_bombieri, check_bombieri_cor,
    check_cauchy_schwarz, check_invertible, check_lemma_3_2, check_mpf, check_orth_ranges, check_remark_3_12,
    check_scalar_comb, check_thm_3_11, check_thm_3_11_both, Branch, ScalarCombForm, Verdict,
};
pub use gram::GramSummary;
pub use instance::{evaluate, BranchComparison, BranchOutcome, Dims, EvaluationReport, InequalityInstance};

/// Closed set of verifiable inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    #[serde(rename = "bessel_3_1")]
    Bessel,
    #[serde(rename = "lemma_3_2")]
    Lemma,
    #[serde(rename = "bombieri_3_3")]
    Bombieri,
    #[serde(rename = "bombieri_cor_3_4")]
    BombieriCor,
    #[serde(rename = "orth_ranges_3_5")]
    OrthRanges,
    #[serde(rename = "invertible_3_6")]
    Invertible,
    #[serde(rename = "scalar_comb_3_7")]
    ScalarComb,
    #[serde(rename = "mpf_3_8")]
    Mpf,
    #[serde(rename = "boas_bellman_3_9")]
    BoasBellman,
    #[serde(rename = "bn_lemma_3_10")]
    BnLemma,
    #[serde(rename = "thm_3_11")]
    Thm311,
    #[serde(rename = "remark_3_12")]
    Remark,
    #[serde(rename = "cauchy_schwarz")]
    CauchySchwarz,
}

/// Which instance fields a tag uses and how they are laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arity {
    /// Leading `x` in `vectors`.
    pub x: bool,
    /// Family `y_i` / `e_i` after `x`.
    pub family: bool,
    /// One coefficient per family member.
    pub coefficients: bool,
    pub scalars: bool,
    pub operators: bool,
}

impl InequalityId {
    pub const ALL: [InequalityId; 13] = [
        InequalityId::Bessel,
        InequalityId::Lemma,
        InequalityId::Bombieri,
        InequalityId::BombieriCor,
        InequalityId::OrthRanges,
        InequalityId::Invertible,
        InequalityId::ScalarComb,
        InequalityId::Mpf,
        InequalityId::BoasBellman,
        InequalityId::BnLemma,
        InequalityId::Thm311,
        InequalityId::Remark,
        InequalityId::CauchySchwarz,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            InequalityId::Bessel => "bessel_3_1",
            InequalityId::Lemma => "lemma_3_2",
            InequalityId::Bombieri => "bombieri_3_3",
            InequalityId::BombieriCor => "bombieri_cor_3_4",
            InequalityId::OrthRanges => "orth_ranges_3_5",
            InequalityId::Invertible => "invertible_3_6",
            InequalityId::ScalarComb => "scalar_comb_3_7",
            InequalityId::Mpf => "mpf_3_8",
            InequalityId::BoasBellman => "boas_bellman_3_9",
            InequalityId::BnLemma => "bn_lemma_3_10",
            InequalityId::Thm311 => "thm_3_11",
            InequalityId::Remark => "remark_3_12",
            InequalityId::CauchySchwarz => "cauchy_schwarz",
        }
    }

    /// Position in [`InequalityId::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&t| t == self).expect("listed")
    }

    /// Statement label and equation label, when there is one.
    pub fn citation(self) -> (&'static str, Option<&'static str>) {
        match self {
            InequalityId::Bessel => ("Theorem 3.1", Some("Eq. (3.1)")),
            InequalityId::Lemma => ("Lemma 3.2", None),
            InequalityId::Bombieri => ("Theorem 3.3", Some("Eq. (3.2)")),
            InequalityId::BombieriCor => ("Corollary 3.4", None),
            InequalityId::OrthRanges => ("Corollary 3.5", None),
            InequalityId::Invertible => ("Corollary 3.6", None),
            InequalityId::ScalarComb => ("Corollary 3.7", None),
            InequalityId::Mpf => ("Theorem 3.8", Some("Eq. (3.3)")),
            InequalityId::BoasBellman => ("Corollary 3.9", Some("Eq. (3.4)")),
            InequalityId::BnLemma => ("Lemma 3.10", Some("Eq. (3.5)")),
            InequalityId::Thm311 => ("Theorem 3.11", None),
            InequalityId::Remark => ("Remark 3.12", None),
            InequalityId::CauchySchwarz => ("Section 2 (Cauchy-Schwarz)", None),
        }
    }

    /// One-line statement for listings.
    pub fn statement(self) -> &'static str {
        match self {
            InequalityId::Bessel => "sum_i |<e_i,x>|^2 <= |x|^2 for an orthogonal family of unit vectors",
            InequalityId::Lemma => "a*cb + b*c*a <= ||c|| (|a|^2 + |b|^2)",
            InequalityId::Bombieri => "|sum_i y_i a_i|^2 <= (sum_i |a_i|^2) max_i sum_j ||<y_i,y_j>||",
            InequalityId::BombieriCor => "S^2 <= |x|^2 ||S|| max_i sum_j ||<y_i,y_j>||, S = sum_i |<y_i,x>|^2",
            InequalityId::OrthRanges => "|sum_i T_i S_i|^2 <= (sum_i |S_i|^2) max_i ||T_i||^2 when T_i* T_j = 0",
            InequalityId::Invertible => "|T S1 + (T*)^-1 S2|^2 <= (|S1|^2 + |S2|^2)(1 + max(||T||^2, ||T^-1||^2))",
            InequalityId::ScalarComb => "|sum_i l_i T_i|^2 <= max_i |l_i| sum_j |l_j| sum_i |T_i|^2",
            InequalityId::Mpf => {
                "|sum_i a_i <y_i,x>|^2 <= |x|^2 sum_i ||a_i||^2 [max_i ||y_i||^2 + (sum_{i!=j} ||<y_i,y_j>||^2)^1/2]"
            }
            InequalityId::BoasBellman => "the previous bound with a_i = <x,y_i>",
            InequalityId::BnLemma => "|sum_i y_i a_i|^2 <= max_i ||y_i||^2 sum_i |a_i|^2 + B_n (two branches)",
            InequalityId::Thm311 => {
                "|sum_i a_i <y_i,x>|^2 <= |x|^2 Q^1/2 [max_i ||y_i||^2 Q^1/2 + B_n], Q = ||sum_i |a_i*|^2||"
            }
            InequalityId::Remark => "S^2 <= |x|^2 max_i ||y_i||^2 ||S|| for an orthogonal family",
            InequalityId::CauchySchwarz => "<y,x><x,y> <= ||<x,x>|| <y,y>",
        }
    }

    pub fn arity(self) -> Arity {
        let none = Arity {
            x: false,
            family: false,
            coefficients: false,
            scalars: false,
            operators: false,
        };
        match self {
            InequalityId::Bessel | InequalityId::BombieriCor | InequalityId::BoasBellman | InequalityId::Remark => {
                Arity {
                    x: true,
                    family: true,
                    ..none
                }
            }
            InequalityId::Lemma => Arity {
                coefficients: true,
                ..none
            },
            InequalityId::Bombieri | InequalityId::BnLemma => Arity {
                family: true,
                coefficients: true,
                ..none
            },
            InequalityId::Mpf | InequalityId::Thm311 => Arity {
                x: true,
                family: true,
                coefficients: true,
                ..none
            },
            InequalityId::OrthRanges | InequalityId::Invertible => Arity {
                operators: true,
                ..none
            },
            InequalityId::ScalarComb => Arity {
                scalars: true,
                operators: true,
                ..none
            },
            InequalityId::CauchySchwarz => Arity { x: true, ..none },
        }
    }

    /// Field layout in words, for listings and validation messages.
    pub fn fields(self) -> &'static str {
        match self {
            InequalityId::Bessel => "vectors = [x, e_1..e_n]",
            InequalityId::Lemma => "coefficients = [a, b, c]",
            InequalityId::Bombieri | InequalityId::BnLemma => "vectors = [y_1..y_n], coefficients = [a_1..a_n]",
            InequalityId::BombieriCor | InequalityId::BoasBellman | InequalityId::Remark => "vectors = [x, y_1..y_n]",
            InequalityId::OrthRanges => "operators = [T_1..T_n, S_1..S_n]",
            InequalityId::Invertible => "operators = [T, S1, S2]",
            InequalityId::ScalarComb => "scalars = [l_1..l_n], operators = [T_1..T_n]",
            InequalityId::Mpf | InequalityId::Thm311 => "vectors = [x, y_1..y_n], coefficients = [a_1..a_n]",
            InequalityId::CauchySchwarz => "vectors = [x, y]",
        }
    }

    /// Tags with two `B_n` branches.
    pub fn has_branches(self) -> bool {
        matches!(self, InequalityId::BnLemma | InequalityId::Thm311)
    }

    /// Tags whose instances are built from a vector family.
    pub fn uses_family(self) -> bool {
        self.arity().family
    }

    /// Left side is quadratic in the coefficients, so zero coefficients give `0 ≤ 0`.
    pub fn quadratic_in_coefficients(self) -> bool {
        matches!(
            self,
            InequalityId::Lemma
                | InequalityId::Bombieri
                | InequalityId::Mpf
                | InequalityId::BnLemma
                | InequalityId::Thm311
        )
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Short name without the trailing `_3_k` label (`bessel`, `mpf`, ...).
fn short_name(tag: &str) -> &str {
    let mut parts = tag.rsplitn(3, '_');
    let (last, mid, rest) = (parts.next(), parts.next(), parts.next());
    match (last, mid, rest) {
        (Some(l), Some("3"), Some(rest)) if l.chars().all(|c| c.is_ascii_digit()) => rest,
        _ => tag,
    }
}

impl FromStr for InequalityId {
    type Err = String;

    /// Accepts the full tag or its short name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        InequalityId::ALL
            .into_iter()
            .find(|t| t.as_str() == s || short_name(t.as_str()) == s)
            .ok_or_else(|| format!("unknown inequality tag '{s}'"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for t in InequalityId::ALL {
            assert_eq!(t.as_str().parse::<InequalityId>().unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.as_str()));
            assert_eq!(serde_json::from_str::<InequalityId>(&json).unwrap(), t);
            assert_eq!(InequalityId::ALL[t.index()], t);
        }
    }

    #[test]
    fn short_names() {
        assert_eq!("bessel".parse::<InequalityId>().unwrap(), InequalityId::Bessel);
        assert_eq!("mpf".parse::<InequalityId>().unwrap(), InequalityId::Mpf);
        assert_eq!("thm".parse::<InequalityId>().unwrap(), InequalityId::Thm311);
        assert_eq!("bombieri".parse::<InequalityId>().unwrap(), InequalityId::Bombieri);
        assert_eq!(
            "bombieri_cor".parse::<InequalityId>().unwrap(),
            InequalityId::BombieriCor
        );
        assert!("nope".parse::<InequalityId>().is_err());
    }
}
