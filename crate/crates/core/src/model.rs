//! Decision problems: variables, frames, valuations and precedence.
//!
//! Variables are identified by their declaration position ([`VarId`]). Every
//! variable set ([`Domain`]) is kept sorted by that position, and every
//! valuation table is laid out row-major over its domain with the last
//! variable varying fastest.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::algebra::{self, OperationCounter};
use crate::error::{Error, Result};

/// Default absolute tolerance for the well-definedness sums.
pub const WELL_DEFINED_TOLERANCE: f64 = 1e-9;

/// Declaration position of a variable within its problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Decision,
    Random,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Decision => f.write_str("decision"),
            VarKind::Random => f.write_str("random"),
        }
    }
}

/// A decision or random variable with its frame of state labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, kind: VarKind, states: Vec<String>) -> Result<Self> {
        let name = name.into();
        if states.is_empty() {
            return Err(Error::EmptyFrame(name));
        }
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(Error::DuplicateState {
                    variable: name,
                    state: s.clone(),
                });
            }
        }
        Ok(Variable { name, kind, states })
    }

    pub fn frame_size(&self) -> usize {
        self.states.len()
    }

    pub fn is_decision(&self) -> bool {
        self.kind == VarKind::Decision
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// A set of variables in canonical (declaration) order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Domain(Vec<VarId>);

impl Domain {
    pub fn empty() -> Self {
        Domain(Vec::new())
    }

    pub fn from_ids(ids: impl IntoIterator<Item = VarId>) -> Self {
        let mut v: Vec<VarId> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Domain(v)
    }

    pub fn vars(&self) -> &[VarId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: VarId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn union(&self, other: &Domain) -> Domain {
        Domain::from_ids(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn without(&self, v: VarId) -> Domain {
        Domain(self.0.iter().copied().filter(|&x| x != v).collect())
    }

    pub fn is_subset(&self, other: &Domain) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    /// Number of configurations of this domain.
    pub fn frame_size(&self, variables: &[Variable]) -> usize {
        self.0.iter().map(|v| variables[v.0].frame_size()).product()
    }

    pub fn shape(&self, variables: &[Variable]) -> Vec<usize> {
        self.0.iter().map(|v| variables[v.0].frame_size()).collect()
    }
}

impl FromIterator<VarId> for Domain {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        Domain::from_ids(iter)
    }
}

/// One state per domain variable. The empty configuration is `Configuration::empty()`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Configuration {
    domain: Domain,
    states: Vec<usize>,
}

impl Configuration {
    /// Builds a configuration, checking each state against its frame.
    pub fn new(domain: Domain, states: Vec<usize>, variables: &[Variable]) -> Result<Self> {
        if states.len() != domain.len() {
            return Err(Error::NotASubset);
        }
        for (v, &s) in domain.vars().iter().zip(&states) {
            match variables.get(v.0) {
                Some(var) if s < var.frame_size() => {}
                _ => return Err(Error::VariableNotInDomain(*v)),
            }
        }
        Ok(Configuration { domain, states })
    }

    pub(crate) fn from_parts(domain: Domain, states: Vec<usize>) -> Self {
        debug_assert_eq!(domain.len(), states.len());
        Configuration { domain, states }
    }

    pub fn empty() -> Self {
        Configuration::default()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn state_of(&self, v: VarId) -> Option<usize> {
        self.domain.position(v).map(|i| self.states[i])
    }

    /// Renders as `B=b, G=~g`.
    pub fn describe(&self, variables: &[Variable]) -> String {
        self.domain
            .vars()
            .iter()
            .zip(&self.states)
            .map(|(v, &s)| {
                let var = &variables[v.0];
                format!("{}={}", var.name, var.states[s])
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Row-major enumeration of all state vectors of a shape, last axis fastest.
pub(crate) struct Odometer {
    shape: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Odometer {
    pub(crate) fn new(shape: Vec<usize>) -> Self {
        let done = shape.contains(&0);
        let current = vec![0; shape.len()];
        Odometer {
            shape,
            current,
            done,
        }
    }

    /// Advances in place; returns `false` once every state vector has been visited.
    pub(crate) fn advance(&mut self) -> bool {
        for axis in (0..self.shape.len()).rev() {
            self.current[axis] += 1;
            if self.current[axis] < self.shape[axis] {
                return true;
            }
            self.current[axis] = 0;
        }
        self.done = true;
        false
    }

    pub(crate) fn current(&self) -> &[usize] {
        &self.current
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.advance();
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValuationKind {
    Utility,
    Potential,
}

impl fmt::Display for ValuationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValuationKind::Utility => f.write_str("utility"),
            ValuationKind::Potential => f.write_str("potential"),
        }
    }
}

/// A dense real-valued table over the frame of a domain.
///
/// `shape[i]` is the frame size of `domain.vars()[i]`. Potentials coming from
/// user input are range-checked by [`check_well_defined`]; intermediate
/// potentials produced by marginalization may exceed 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Valuation {
    kind: ValuationKind,
    domain: Domain,
    shape: Vec<usize>,
    table: Vec<f64>,
}

impl Valuation {
    pub fn new(
        kind: ValuationKind,
        domain: Domain,
        variables: &[Variable],
        table: Vec<f64>,
    ) -> Result<Self> {
        let malformed = |reason: String| Error::MalformedValuation {
            name: String::new(),
            reason,
        };
        if let Some(v) = domain.vars().iter().find(|v| v.0 >= variables.len()) {
            return Err(malformed(format!("domain references variable #{}", v.0)));
        }
        let shape = domain.shape(variables);
        let expected: usize = shape.iter().product();
        if table.len() != expected {
            return Err(malformed(format!(
                "expected {expected} values, got {}",
                table.len()
            )));
        }
        if let Some(x) = table.iter().find(|x| !x.is_finite()) {
            return Err(malformed(format!("non-finite value {x}")));
        }
        Ok(Valuation {
            kind,
            domain,
            shape,
            table,
        })
    }

    pub(crate) fn from_parts(
        kind: ValuationKind,
        domain: Domain,
        shape: Vec<usize>,
        table: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(domain.len(), shape.len());
        debug_assert_eq!(table.len(), shape.iter().product::<usize>());
        Valuation {
            kind,
            domain,
            shape,
            table,
        }
    }

    /// The empty-domain potential with value 1.
    pub fn unit() -> Self {
        Valuation::from_parts(
            ValuationKind::Potential,
            Domain::empty(),
            Vec::new(),
            vec![1.0],
        )
    }

    pub fn kind(&self) -> ValuationKind {
        self.kind
    }

    pub fn is_utility(&self) -> bool {
        self.kind == ValuationKind::Utility
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn bears_on(&self, v: VarId) -> bool {
        self.domain.contains(v)
    }

    /// Row-major offset of a state vector over this valuation's domain.
    pub fn offset(&self, states: &[usize]) -> usize {
        debug_assert_eq!(states.len(), self.shape.len());
        states
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&s, &m)| acc * m + s)
    }

    /// Value at a configuration whose domain covers this valuation's domain.
    pub fn value_at(&self, x: &Configuration) -> Result<f64> {
        let y = algebra::project(x, &self.domain)?;
        Ok(self.table[self.offset(y.states())])
    }

    /// Value at a full assignment indexed by `VarId`.
    pub fn value_at_assignment(&self, assignment: &[usize]) -> f64 {
        let off = self
            .domain
            .vars()
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (v, &m)| acc * m + assignment[v.0]);
        self.table[off]
    }

    /// The only value of an empty-domain valuation.
    pub fn scalar(&self) -> Option<f64> {
        self.domain.is_empty().then(|| self.table[0])
    }
}

/// The declared arcs `X -> Y` ("X precedes Y").
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceRelation {
    arcs: BTreeSet<(VarId, VarId)>,
}

impl PrecedenceRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, from: VarId, to: VarId) {
        self.arcs.insert((from, to));
    }

    pub fn arcs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }
}

/// Transitive closure `>` of a precedence relation, as a dense reachability matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    n: usize,
    reach: Vec<bool>,
}

impl Closure {
    /// `x > y`.
    pub fn precedes(&self, x: VarId, y: VarId) -> bool {
        self.reach[x.0 * self.n + y.0]
    }

    pub fn comparable(&self, x: VarId, y: VarId) -> bool {
        self.precedes(x, y) || self.precedes(y, x)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (VarId, VarId)> + '_ {
        (0..self.n).flat_map(move |i| {
            (0..self.n)
                .filter(move |&j| self.reach[i * self.n + j])
                .map(move |j| (VarId(i), VarId(j)))
        })
    }

    /// Whether `x` is minimal in `set`: no `z` in `set` with `x > z`.
    pub fn is_minimal_in(&self, x: VarId, set: &[VarId]) -> bool {
        set.iter().all(|&z| !self.precedes(x, z))
    }
}

/// Warshall's algorithm over the `variable_count` declared variables.
pub fn transitive_closure(precedence: &PrecedenceRelation, variable_count: usize) -> Closure {
    let n = variable_count;
    let mut reach = vec![false; n * n];
    for (a, b) in precedence.arcs() {
        reach[a.0 * n + b.0] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i * n + k] {
                for j in 0..n {
                    if reach[k * n + j] {
                        reach[i * n + j] = true;
                    }
                }
            }
        }
    }
    Closure { n, reach }
}

/// Fails when some variable precedes itself. The reported cycle lists every
/// variable on a cycle through the first offending one, in declaration order.
pub fn validate_partial_order(closure: &Closure, variables: &[Variable]) -> Result<()> {
    let ids = (0..closure.len()).map(VarId);
    if let Some(x) = ids.clone().find(|&x| closure.precedes(x, x)) {
        let cycle = ids
            .filter(|&y| closure.precedes(x, y) && closure.precedes(y, x))
            .map(|y| variables[y.0].name.clone())
            .collect();
        return Err(Error::CyclicPrecedence { cycle });
    }
    Ok(())
}

pub fn check_perfect_recall(closure: &Closure, variables: &[Variable]) -> Result<()> {
    for (i, d) in variables.iter().enumerate() {
        if !d.is_decision() {
            continue;
        }
        for (j, r) in variables.iter().enumerate() {
            if r.is_decision() {
                continue;
            }
            if !closure.comparable(VarId(i), VarId(j)) {
                return Err(Error::PerfectRecallViolation {
                    decision: d.name.clone(),
                    random: r.name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// A validated decision problem.
///
/// Construction checks names, table shapes, the precedence order, perfect
/// recall and variable coverage. Normalization of the potentials is checked
/// separately by [`check_well_defined`].
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionProblem {
    variables: Vec<Variable>,
    valuations: Vec<Valuation>,
    names: Vec<String>,
    precedence: PrecedenceRelation,
    closure: Closure,
}

impl DecisionProblem {
    pub fn new(
        variables: Vec<Variable>,
        valuations: Vec<(String, Valuation)>,
        precedence: PrecedenceRelation,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for v in &variables {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
            Variable::new(v.name.clone(), v.kind, v.states.clone())?;
        }

        let n = variables.len();
        for (a, b) in precedence.arcs() {
            for v in [a, b] {
                if v.0 >= n {
                    return Err(Error::UnknownVariable(format!("#{}", v.0)));
                }
            }
            if a == b {
                return Err(Error::SelfArc(variables[a.0].name.clone()));
            }
        }
        for (name, val) in &valuations {
            let malformed = |reason: String| Error::MalformedValuation {
                name: name.clone(),
                reason,
            };
            if let Some(v) = val.domain().vars().iter().find(|v| v.0 >= n) {
                return Err(malformed(format!("domain references variable #{}", v.0)));
            }
            if val.shape() != val.domain().shape(&variables).as_slice() {
                return Err(malformed(
                    "table shape does not match declared frames".into(),
                ));
            }
        }
        if !valuations.iter().any(|(_, v)| v.is_utility()) {
            return Err(Error::NoUtility);
        }

        let closure = transitive_closure(&precedence, n);
        validate_partial_order(&closure, &variables)?;
        check_perfect_recall(&closure, &variables)?;

        let (names, valuations): (Vec<_>, Vec<_>) = valuations.into_iter().unzip();
        let problem = DecisionProblem {
            variables,
            valuations,
            names,
            precedence,
            closure,
        };

        let utility_domain = problem.joint_utility_domain();
        let potential_domain = problem.joint_potential_domain();
        for (i, v) in problem.variables.iter().enumerate() {
            match v.kind {
                VarKind::Decision if !utility_domain.contains(VarId(i)) => {
                    return Err(Error::DecisionOutsideUtility(v.name.clone()))
                }
                VarKind::Random if !potential_domain.contains(VarId(i)) => {
                    return Err(Error::RandomOutsidePotentials(v.name.clone()))
                }
                _ => {}
            }
        }
        Ok(problem)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: VarId) -> &Variable {
        &self.variables[v.0]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn valuation_names(&self) -> &[String] {
        &self.names
    }

    pub fn named_valuations(&self) -> impl Iterator<Item = (&str, &Valuation)> {
        self.names.iter().map(String::as_str).zip(&self.valuations)
    }

    pub fn precedence(&self) -> &PrecedenceRelation {
        &self.precedence
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn var_id(&self, name: &str) -> Result<VarId> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .map(VarId)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len()).map(VarId)
    }

    pub fn decision_vars(&self) -> Domain {
        self.ids()
            .filter(|v| self.variables[v.0].is_decision())
            .collect()
    }

    pub fn random_vars(&self) -> Domain {
        self.ids()
            .filter(|v| !self.variables[v.0].is_decision())
            .collect()
    }

    pub fn kind_of(&self, v: VarId) -> VarKind {
        self.variables[v.0].kind
    }

    pub fn utilities(&self) -> impl Iterator<Item = &Valuation> {
        self.valuations.iter().filter(|v| v.is_utility())
    }

    pub fn potentials(&self) -> impl Iterator<Item = &Valuation> {
        self.valuations.iter().filter(|v| !v.is_utility())
    }

    pub fn joint_utility_domain(&self) -> Domain {
        self.utilities()
            .flat_map(|v| v.domain().vars().iter().copied())
            .collect()
    }

    pub fn joint_potential_domain(&self) -> Domain {
        self.potentials()
            .flat_map(|v| v.domain().vars().iter().copied())
            .collect()
    }

    /// Decision variables in the joint potential's domain.
    pub fn q(&self) -> Domain {
        self.joint_potential_domain()
            .vars()
            .iter()
            .copied()
            .filter(|v| self.variables[v.0].is_decision())
            .collect()
    }

    /// Random variables in the joint utility's domain.
    pub fn p(&self) -> Domain {
        self.joint_utility_domain()
            .vars()
            .iter()
            .copied()
            .filter(|v| !self.variables[v.0].is_decision())
            .collect()
    }

    /// Builds a configuration from `(variable, state)` label pairs.
    pub fn configuration(&self, pairs: &[(&str, &str)]) -> Result<Configuration> {
        let mut assigned: Vec<(VarId, usize)> = Vec::with_capacity(pairs.len());
        for &(name, state) in pairs {
            let id = self.var_id(name)?;
            let s = self.variables[id.0]
                .state_index(state)
                .ok_or_else(|| Error::UnknownVariable(format!("{name}={state}")))?;
            assigned.push((id, s));
        }
        assigned.sort_unstable();
        assigned.dedup_by_key(|p| p.0);
        let domain = Domain(assigned.iter().map(|p| p.0).collect());
        let states = assigned.iter().map(|p| p.1).collect();
        Configuration::new(domain, states, &self.variables)
    }
}

/// Random predecessors `Pr(D)` of a decision.
pub fn predecessors(problem: &DecisionProblem, decision: VarId) -> Result<Domain> {
    match problem.variables().get(decision.0) {
        Some(v) if v.is_decision() => {}
        Some(v) => {
            return Err(Error::UnknownVariable(format!(
                "{} is not a decision",
                v.name
            )))
        }
        None => return Err(Error::UnknownVariable(format!("#{}", decision.0))),
    }
    Ok(problem
        .random_vars()
        .vars()
        .iter()
        .copied()
        .filter(|&r| problem.closure().precedes(r, decision))
        .collect())
}

/// Checks that the joint potential sums to one over the random variables
/// for every configuration of its decision variables, then that every
/// declared potential lies in `[0, 1]`.
///
/// The joint potential is materialized, so cost is exponential in the
/// number of variables it covers.
pub fn check_well_defined(problem: &DecisionProblem, tolerance: f64) -> Result<()> {
    let mut counter = OperationCounter::default();
    let potentials: Vec<Valuation> = problem.potentials().cloned().collect();
    let mut marginal = if potentials.is_empty() {
        Valuation::unit()
    } else {
        algebra::combine_many(potentials, &mut counter)
    };
    for r in problem.random_vars().vars() {
        if marginal.bears_on(*r) {
            marginal = algebra::marginalize_random(&marginal, *r, &mut counter)?;
        }
    }
    let mut odo = Odometer::new(marginal.shape().to_vec());
    for &sum in marginal.table() {
        if (sum - 1.0).abs() > tolerance {
            let x = Configuration::from_parts(marginal.domain().clone(), odo.current().to_vec());
            return Err(Error::NotWellDefined {
                configuration: x.describe(problem.variables()),
                sum,
            });
        }
        odo.advance();
    }

    for (name, val) in problem.named_valuations() {
        if val.is_utility() {
            continue;
        }
        if let Some(&value) = val.table().iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::PotentialOutOfRange {
                name: name.to_string(),
                value,
            });
        }
    }
    Ok(())
}

/// Incremental construction of a [`DecisionProblem`] by name.
#[derive(Default)]
pub struct ProblemBuilder {
    variables: Vec<Variable>,
    arcs: Vec<(String, String)>,
    valuations: Vec<(String, ValuationKind, Vec<String>, Vec<f64>)>,
    error: Option<Error>,
}

impl ProblemBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable(mut self, name: &str, kind: VarKind, states: &[&str]) -> Self {
        match Variable::new(name, kind, states.iter().map(|s| s.to_string()).collect()) {
            Ok(v) => self.variables.push(v),
            Err(e) => {
                self.error.get_or_insert(e);
            }
        }
        self
    }

    pub fn decision(self, name: &str, states: &[&str]) -> Self {
        self.variable(name, VarKind::Decision, states)
    }

    pub fn random(self, name: &str, states: &[&str]) -> Self {
        self.variable(name, VarKind::Random, states)
    }

    pub fn precede(mut self, from: &str, to: &str) -> Self {
        self.arcs.push((from.to_string(), to.to_string()));
        self
    }

    /// Adds a valuation. `over` may list variables in any order; the table is
    /// read in canonical order (declaration order, last variable fastest).
    pub fn valuation(
        mut self,
        name: &str,
        kind: ValuationKind,
        over: &[&str],
        table: Vec<f64>,
    ) -> Self {
        self.valuations.push((
            name.to_string(),
            kind,
            over.iter().map(|s| s.to_string()).collect(),
            table,
        ));
        self
    }

    pub fn utility(self, name: &str, over: &[&str], table: Vec<f64>) -> Self {
        self.valuation(name, ValuationKind::Utility, over, table)
    }

    pub fn potential(self, name: &str, over: &[&str], table: Vec<f64>) -> Self {
        self.valuation(name, ValuationKind::Potential, over, table)
    }

    pub fn build(self) -> Result<DecisionProblem> {
        if let Some(e) = self.error {
            return Err(e);
        }
        let index: HashMap<&str, VarId> = self
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), VarId(i)))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        };
        let mut precedence = PrecedenceRelation::new();
        for (a, b) in &self.arcs {
            precedence.add(lookup(a)?, lookup(b)?);
        }
        let mut valuations = Vec::with_capacity(self.valuations.len());
        for (name, kind, over, table) in self.valuations {
            let domain = over
                .iter()
                .map(|v| lookup(v))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .collect::<Domain>();
            let val =
                Valuation::new(kind, domain, &self.variables, table).map_err(|e| match e {
                    Error::MalformedValuation { reason, .. } => Error::MalformedValuation {
                        name: name.clone(),
                        reason,
                    },
                    other => other,
                })?;
            valuations.push((name, val));
        }
        DecisionProblem::new(self.variables, valuations, precedence)
    }
}
