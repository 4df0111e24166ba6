//! Mixed-integer formulations of CDCs with exact rational data, LP-format
//! emission, and exact checks of validity, idealness, and branching
//! behaviour on small instances.
//!
//! Variable names follow a fixed scheme: `lam_<label>` for the simplex
//! multipliers, `z_<j>` (1-based) for binaries, `gam_<s>_<label>` for
//! disaggregated multipliers, `x_<i>`/`y_<i>` for embedded outputs, and
//! `x_<node>_<j>`, `y_<node>_<j>`, `z_<r>_<s>_<j>` in the cover-search model.

mod branching;
mod builders;
mod exact;
mod ideal;
mod lp;
mod projection;
mod scalar;

use std::collections::{BTreeMap, HashMap, HashSet};

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::json;
use thiserror::Error;

use crate::cdc::CdcError;
use crate::covers::{CoverError, CoverViolation};
use crate::nodeset::NodeSet;

pub use branching::{branching_report, forced_zeros, BranchDirection, BranchingReport, BranchingRow};
pub use builders::{
    adhoc_disaggregated, binary_codes, embed_data, encoded_extended, jeroslow, multiway_ib, pairwise_ideal,
};
pub use exact::{propagate, Bounds, Infeasible};
pub use ideal::{idealness_check, idealness_check_with_limit, Idealness, IDEALNESS_VAR_LIMIT};
pub use lp::{emit_lp, format_decimal};
pub use projection::{
    projection_check, projection_check_with_jobs, Counterexample, ProjectionReport, PROJECTION_NODE_LIMIT,
};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulationError {
    #[error("duplicate variable name {0:?}")]
    DuplicateName(String),
    #[error("constraint {0:?} references an undeclared variable")]
    UnknownVariable(String),
    #[error("binary codes are not distinct")]
    DuplicateCode,
    #[error("expected {expected} codes of equal width, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("invalid cover: {0:?}")]
    InvalidCover(Vec<CoverViolation>),
    #[error("the CDC is not pairwise representable")]
    NotPairwise,
    #[error("no value given for element {0:?}")]
    MissingValue(String),
    #[error("value for element {label:?} has dimension {found}, expected {expected}")]
    DimensionMismatch { label: String, expected: usize, found: usize },
    #[error("coefficient {0} has no finite decimal expansion; scale the data to integers")]
    NonRepresentableCoefficient(String),
    #[error("model has {vars} variables, limit is {limit}")]
    SizeLimit { vars: usize, limit: usize },
    #[error("model is not tagged as a pairwise independent-branching model")]
    NotIbModel,
    #[error("model has no simplex multipliers")]
    NotCdcModel,
    #[error("model ground set does not match the CDC")]
    GroundMismatch,
    #[error("arithmetic overflow during exact elimination")]
    Overflow,
    #[error(transparent)]
    Cdc(#[from] CdcError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Lambda,
    Z,
    Gamma,
    X,
    Y,
    Output,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Lambda => "lambda",
            Role::Z => "z",
            Role::Gamma => "gamma",
            Role::X => "x",
            Role::Y => "y",
            Role::Output => "output",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// `None` is minus infinity.
    pub lower: Option<Rational>,
    /// `None` is plus infinity.
    pub upper: Option<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Eq => lhs == rhs,
            Sense::Ge => lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// One level of a pairwise scheme: `sum_A lam <= z` and `sum_B lam <= 1 - z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IbLevelTag {
    pub z: usize,
    pub a: NodeSet,
    pub b: NodeSet,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MipModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, Rational)>,
    groups: BTreeMap<Role, Vec<usize>>,
    ground: Vec<String>,
    ib_levels: Option<Vec<IbLevelTag>>,
    index: HashMap<String, usize>,
}

pub(crate) fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

impl MipModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(usize, Rational)] {
        &self.objective
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn group(&self, role: Role) -> &[usize] {
        self.groups.get(&role).map_or(&[], Vec::as_slice)
    }

    /// Simplex multipliers in ground-set order.
    pub fn lambda(&self) -> &[usize] {
        self.group(Role::Lambda)
    }

    /// Labels of the ground set, aligned with [`MipModel::lambda`].
    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn ib_levels(&self) -> Option<&[IbLevelTag]> {
        self.ib_levels.as_deref()
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.variables.len()).filter(|&v| self.variables[v].kind == VarKind::Binary)
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: Option<Rational>,
        upper: Option<Rational>,
        role: Option<Role>,
    ) -> Result<usize, FormulationError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(FormulationError::DuplicateName(name));
        }
        let id = self.variables.len();
        self.index.insert(name.clone(), id);
        self.variables.push(Variable { name, kind, lower, upper });
        if let Some(r) = role {
            self.groups.entry(r).or_default().push(id);
        }
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, role: Role) -> Result<usize, FormulationError> {
        self.add_var(name, VarKind::Binary, Some(int(0)), Some(int(1)), Some(role))
    }

    /// Adds a row, merging repeated variables and dropping zero terms.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        sense: Sense,
        rhs: Rational,
    ) -> Result<(), FormulationError> {
        let name = name.into();
        let mut merged: BTreeMap<usize, Rational> = BTreeMap::new();
        for (v, c) in terms {
            if v >= self.variables.len() {
                return Err(FormulationError::UnknownVariable(name));
            }
            *merged.entry(v).or_insert_with(Rational::zero) += c;
        }
        let terms = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.constraints.push(Constraint { name, terms, sense, rhs });
        Ok(())
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, Rational)>) {
        self.objective = terms;
    }

    pub(crate) fn set_ground(&mut self, labels: Vec<String>) {
        self.ground = labels;
    }

    pub(crate) fn set_ib_levels(&mut self, levels: Vec<IbLevelTag>) {
        self.ib_levels = Some(levels);
    }

    /// Indices of rows violated by a full assignment, bounds and
    /// integrality included as pseudo-rows past the end.
    pub fn violations(&self, values: &[Rational]) -> Vec<usize> {
        assert_eq!(values.len(), self.variables.len());
        let mut bad: Vec<usize> = self
            .constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                let lhs: Rational = c.terms.iter().map(|(v, k)| k * &values[*v]).sum();
                !c.sense.holds(&lhs, &c.rhs)
            })
            .map(|(i, _)| i)
            .collect();
        for (i, (var, x)) in self.variables.iter().zip(values).enumerate() {
            let out_of_bounds = var.lower.as_ref().is_some_and(|l| x < l) || var.upper.as_ref().is_some_and(|u| x > u);
            let fractional = var.kind == VarKind::Binary && !x.is_integer();
            if out_of_bounds || fractional {
                bad.push(self.constraints.len() + i);
            }
        }
        bad
    }

    pub fn is_satisfied(&self, values: &[Rational]) -> bool {
        self.violations(values).is_empty()
    }

    pub fn size_report(&self) -> SizeReport {
        let lambda: HashSet<usize> = self.lambda().iter().copied().collect();
        let outputs: HashSet<usize> = self.group(Role::Output).iter().copied().collect();
        let binaries = self.binaries().count();
        let aux_continuous = (0..self.variables.len())
            .filter(|v| self.variables[*v].kind == VarKind::Continuous && !lambda.contains(v) && !outputs.contains(v))
            .count();
        let equalities = self.constraints.iter().filter(|c| c.sense == Sense::Eq).count();
        SizeReport {
            name: self.name.clone(),
            lambda: lambda.len(),
            binaries,
            aux_continuous,
            inequalities: self.constraints.len() - equalities,
            equalities,
        }
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let r = self.size_report();
        let groups: BTreeMap<&str, Vec<&str>> = self
            .groups
            .iter()
            .map(|(role, vs)| (role.name(), vs.iter().map(|&v| self.variables[v].name.as_str()).collect()))
            .collect();
        json!({
            "name": self.name,
            "variables": self.variables.len(),
            "constraints": self.constraints.len(),
            "lambda": r.lambda,
            "binaries": r.binaries,
            "aux_continuous": r.aux_continuous,
            "inequalities": r.inequalities,
            "equalities": r.equalities,
            "groups": groups,
            "ib_levels": self.ib_levels.as_ref().map(Vec::len),
        })
    }
}

/// Formulation size: bounds are not counted as constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub name: String,
    pub lambda: usize,
    pub binaries: usize,
    pub aux_continuous: usize,
    pub inequalities: usize,
    pub equalities: usize,
}

impl SizeReport {
    pub fn general_constraints(&self) -> usize {
        self.inequalities + self.equalities
    }

    pub const TSV_HEADER: &'static str = "formulation\tlambda\tbinaries\taux_continuous\tinequalities\tequalities";

    pub fn tsv_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.name, self.lambda, self.binaries, self.aux_continuous, self.inequalities, self.equalities
        )
    }
}

const LP_NAME_PUNCT: &str = "!\"#$%&()/,.;?@_`'{}|~";

/// Replaces characters not allowed in LP-format names with `_`.
pub fn sanitize_name(raw: &str) -> String {
    raw.chars().map(|c| if c.is_ascii_alphanumeric() || LP_NAME_PUNCT.contains(c) { c } else { '_' }).collect()
}

/// Name fragments for ground-set labels; 1-based indices if sanitizing
/// makes two labels collide.
pub(crate) fn label_fragments(labels: &[String]) -> Vec<String> {
    let cleaned: Vec<String> = labels.iter().map(|l| sanitize_name(l)).collect();
    let distinct: HashSet<&String> = cleaned.iter().collect();
    if distinct.len() == cleaned.len() && cleaned.iter().all(|s| !s.is_empty()) {
        cleaned
    } else {
        (1..=labels.len()).map(|i| i.to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_merges_terms() {
        let mut m = MipModel::new("t");
        let a = m.add_binary("a", Role::Z).unwrap();
        assert_eq!(m.add_binary("a", Role::Z), Err(FormulationError::DuplicateName("a".into())));
        m.add_constraint("r", [(a, int(1)), (a, int(2))], Sense::Le, int(3)).unwrap();
        assert_eq!(m.constraints()[0].terms, vec![(a, int(3))]);
        assert!(m.add_constraint("bad", [(7, int(1))], Sense::Le, int(0)).is_err());
        assert!(m.is_satisfied(&[int(1)]));
        assert_eq!(m.violations(&[Rational::new(1.into(), 2.into())]), vec![1]);
    }

    #[test]
    fn sanitizes_and_falls_back() {
        assert_eq!(sanitize_name("1, 2"), "1,_2");
        let labels: Vec<String> = ["a b", "a_b"].map(String::from).to_vec();
        assert_eq!(label_fragments(&labels), vec!["1", "2"]);
        let labels: Vec<String> = ["1,1", "1,2"].map(String::from).to_vec();
        assert_eq!(label_fragments(&labels), labels);
    }
}
