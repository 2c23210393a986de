//! Linguistic variables, the preference-weighted rule base and Mamdani-style
//! rank inference.
//!
//! Each criterion gets five terms; one rule per term maps it onto the rank
//! term of the same quality, weighted by the confidence factor derived from
//! the user's importance grade. A rule fires with strength
//! `degree(premise) × cf`, the consequent term is clipped at that strength,
//! clipped terms are combined by pointwise max and the result is reduced to a
//! crisp rank by its centroid on a fixed 1001-point grid over `[0, 100]`.

mod membership;
mod rules;
mod variable;

pub use membership::{membership, MembershipFunction};
pub use rules::{
    generate_rule_base, importance_to_cf, FuzzyRule, PreferenceProfile, RuleBase, UniverseScaling, RANK_GRID_POINTS,
};
pub use variable::{
    build_default_variables, rank_variable, LinguisticVariable, Term, Universes, VariableSet, RANK_UNIVERSE,
    TERMS_PER_VARIABLE,
};

/// Rank of `qos` under `rule_base`, in `[0, 100]`.
pub fn infer_rank(rule_base: &RuleBase, variables: &VariableSet, qos: &crate::qos::QosVector) -> f64 {
    rule_base.infer_rank(variables, qos)
}
