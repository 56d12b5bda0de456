//! Fusion-based solver: variables are deleted one at a time, each deletion
//! combining only the valuations that bear on the deleted variable.

use crate::algebra::{self, OperationCounter, SolutionTable};
use crate::error::{Error, Result};
use crate::model::{DecisionProblem, Domain, Valuation, VarId, VarKind, Variable};

/// A total elimination order in which every variable is minimal, under the
/// precedence closure, among the variables not yet deleted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionSequence(Vec<VarId>);

impl DeletionSequence {
    pub fn new(problem: &DecisionProblem, order: Vec<VarId>) -> Result<Self> {
        let n = problem.variables().len();
        let mut seen = vec![false; n];
        for &v in &order {
            if v.0 >= n {
                return Err(Error::InvalidDeletionSequence(format!(
                    "unknown variable #{}",
                    v.0
                )));
            }
            if std::mem::replace(&mut seen[v.0], true) {
                return Err(Error::InvalidDeletionSequence(format!(
                    "`{}` appears twice",
                    problem.variable(v).name
                )));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidDeletionSequence(format!(
                "`{}` is missing",
                problem.variables()[missing].name
            )));
        }
        let closure = problem.closure();
        for (i, &v) in order.iter().enumerate() {
            if let Some(&blocker) = order[i + 1..].iter().find(|&&z| closure.precedes(v, z)) {
                return Err(Error::InvalidDeletionSequence(format!(
                    "`{}` precedes `{}` and must be deleted after it",
                    problem.variable(v).name,
                    problem.variable(blocker).name
                )));
            }
        }
        Ok(DeletionSequence(order))
    }

    pub fn from_names<S: AsRef<str>>(problem: &DecisionProblem, names: &[S]) -> Result<Self> {
        let order = names
            .iter()
            .map(|n| problem.var_id(n.as_ref().trim()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(problem, order)
    }

    pub fn order(&self) -> &[VarId] {
        &self.0
    }

    pub fn names(&self, problem: &DecisionProblem) -> Vec<String> {
        self.0
            .iter()
            .map(|v| problem.variable(*v).name.clone())
            .collect()
    }
}

/// One solution table per decision variable, in deletion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Strategy {
    tables: Vec<SolutionTable>,
}

impl Strategy {
    pub fn new(tables: Vec<SolutionTable>) -> Self {
        Strategy { tables }
    }

    pub fn tables(&self) -> &[SolutionTable] {
        &self.tables
    }

    pub fn table_for(&self, decision: VarId) -> Option<&SolutionTable> {
        self.tables.iter().find(|t| t.decision == decision)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub meu: f64,
    pub strategy: Strategy,
    pub sequence: DeletionSequence,
    pub counter: OperationCounter,
}

/// Result of one fusion step.
#[derive(Clone, Debug)]
pub struct Fusion {
    pub valuations: Vec<Valuation>,
    /// Present when the fused variable is a decision.
    pub solution: Option<SolutionTable>,
}

/// `Fus_X`: combines every valuation bearing on `x`, eliminates `x` from the
/// product and appends it after the untouched valuations.
pub fn fuse(
    valuations: Vec<Valuation>,
    x: VarId,
    variables: &[Variable],
    counter: &mut OperationCounter,
) -> Result<Fusion> {
    let (bearing, mut rest): (Vec<_>, Vec<_>) = valuations.into_iter().partition(|v| v.bears_on(x));
    let var = &variables[x.0];
    if bearing.is_empty() {
        return Err(Error::NothingBearsOn(var.name.clone()));
    }
    if var.kind == VarKind::Decision && !bearing.iter().any(Valuation::is_utility) {
        return Err(Error::DecisionUnderPotentialOnly(var.name.clone()));
    }
    let product = algebra::combine_many(bearing, counter);
    let (marginal, solution) = algebra::marginalize(&product, x, var.kind, counter)?;
    rest.push(marginal);
    Ok(Fusion {
        valuations: rest,
        solution,
    })
}

/// Minimal elements of `remaining` under the precedence closure, in declaration order.
pub fn candidate_next(problem: &DecisionProblem, remaining: &[VarId]) -> Vec<VarId> {
    let closure = problem.closure();
    let mut out: Vec<VarId> = remaining
        .iter()
        .copied()
        .filter(|&y| closure.is_minimal_in(y, remaining))
        .collect();
    out.sort_unstable();
    out
}

/// Valuation list the solver starts from: all utility factors multiplied into
/// one (placed where the first utility was), potentials unchanged.
fn initial_domains(problem: &DecisionProblem) -> Vec<Domain> {
    let utility = problem.joint_utility_domain();
    let mut out = Vec::new();
    let mut placed = false;
    for v in problem.valuations() {
        if v.is_utility() {
            if !placed {
                out.push(utility.clone());
                placed = true;
            }
        } else {
            out.push(v.domain().clone());
        }
    }
    out
}

fn initial_valuations(problem: &DecisionProblem, counter: &mut OperationCounter) -> Vec<Valuation> {
    let utilities: Vec<Valuation> = problem.utilities().cloned().collect();
    let mut joint = Some(algebra::combine_many(utilities, counter));
    let mut out = Vec::with_capacity(problem.valuations().len());
    for v in problem.valuations() {
        if v.is_utility() {
            if let Some(u) = joint.take() {
                out.push(u);
            }
        } else {
            out.push(v.clone());
        }
    }
    out
}

/// Frame size of the combination `fuse` would perform when deleting `x`.
fn fusion_frame(problem: &DecisionProblem, domains: &[Domain], x: VarId) -> usize {
    domains
        .iter()
        .filter(|d| d.contains(x))
        .fold(Domain::empty(), |acc, d| acc.union(d))
        .frame_size(problem.variables())
}

/// Greedy one-step-look-ahead ordering: among the deletable variables, take
/// the one whose fusion combines over the smallest frame. Ties go to the
/// lowest declaration index. Works on domains only.
pub fn one_step_look_ahead(problem: &DecisionProblem) -> DeletionSequence {
    let mut domains = initial_domains(problem);
    let mut remaining: Vec<VarId> = problem.ids().collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let candidates = candidate_next(problem, &remaining);
        let mut best: Option<(usize, VarId)> = None;
        for &c in &candidates {
            let cost = fusion_frame(problem, &domains, c);
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, c));
            }
        }
        let (_, x) = best.expect("a partial order always has a minimal element");
        let (bearing, mut rest): (Vec<Domain>, Vec<Domain>) =
            domains.into_iter().partition(|d| d.contains(x));
        let merged = bearing.iter().fold(Domain::empty(), |acc, d| acc.union(d));
        rest.push(merged.without(x));
        domains = rest;
        remaining.retain(|&v| v != x);
        order.push(x);
    }
    DeletionSequence(order)
}

/// Runs fusion along `sequence` (or the look-ahead sequence when `None`)
/// and returns the maximum expected utility with the recorded strategy.
pub fn solve(
    problem: &DecisionProblem,
    sequence: Option<&DeletionSequence>,
) -> Result<SolveReport> {
    let sequence = match sequence {
        Some(s) => DeletionSequence::new(problem, s.order().to_vec())?,
        None => one_step_look_ahead(problem),
    };
    let mut counter = OperationCounter::default();
    let mut valuations = initial_valuations(problem, &mut counter);
    let mut tables = Vec::new();
    for &x in sequence.order() {
        let step = fuse(valuations, x, problem.variables(), &mut counter)?;
        valuations = step.valuations;
        tables.extend(step.solution);
    }
    let root = algebra::combine_many(valuations, &mut counter);
    let meu = root.scalar().expect("every variable has been deleted");
    Ok(SolveReport {
        meu,
        strategy: Strategy::new(tables),
        sequence,
        counter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::ProblemBuilder;

    fn ids(p: &DecisionProblem, names: &[&str]) -> Vec<VarId> {
        names.iter().map(|n| p.var_id(n).unwrap()).collect()
    }

    fn names(p: &DecisionProblem, ids: &[VarId]) -> Vec<String> {
        ids.iter().map(|v| p.variable(*v).name.clone()).collect()
    }

    fn named(p: &DecisionProblem, name: &str) -> Valuation {
        let i = p.valuation_names().iter().position(|n| n == name).unwrap();
        p.valuations()[i].clone()
    }

    #[test]
    fn medical_first_fusion() {
        let p = fixtures::medical();
        let mut c = OperationCounter::default();
        let vals: Vec<Valuation> = ["pi", "nu", "rho", "mu"]
            .iter()
            .map(|n| named(&p, n))
            .collect();
        let d = p.var_id("D").unwrap();
        let out = fuse(vals, d, p.variables(), &mut c).unwrap();
        assert!(out.solution.is_none());
        assert_eq!(out.valuations.len(), 2);
        assert_eq!(out.valuations[0], named(&p, "mu"));
        assert_eq!(
            out.valuations[1].domain().vars(),
            ids(&p, &["T", "P"]).as_slice()
        );
        assert!(out.valuations[1].is_utility());
        assert_eq!(c.multiplications, 12);
        assert_eq!(c.additions, 4);
    }

    #[test]
    fn single_bearer_costs_no_multiplication() {
        let p = fixtures::medical();
        let mut c = OperationCounter::default();
        let s = p.var_id("S").unwrap();
        let out = fuse(
            vec![named(&p, "mu"), named(&p, "rho")],
            s,
            p.variables(),
            &mut c,
        )
        .unwrap();
        assert_eq!(c.multiplications, 0);
        assert_eq!(c.additions, 2);
        assert_eq!(out.valuations[0], named(&p, "rho"));
    }

    #[test]
    fn diabetes_fusion_at_d() {
        let p = fixtures::diabetes();
        let mut c = OperationCounter::default();
        let d = p.var_id("D").unwrap();
        let out = fuse(p.valuations().to_vec(), d, p.variables(), &mut c).unwrap();
        assert_eq!(out.valuations.len(), 1);
        let x = p
            .configuration(&[("B", "b"), ("G", "g"), ("T", "t")])
            .unwrap();
        assert!((out.valuations[0].value_at(&x).unwrap() - 0.01287).abs() < 1e-12);
    }

    #[test]
    fn fuse_errors() {
        let p = fixtures::diabetes();
        let mut c = OperationCounter::default();
        let t = p.var_id("T").unwrap();
        assert_eq!(
            fuse(vec![named(&p, "rho")], t, p.variables(), &mut c).unwrap_err(),
            Error::NothingBearsOn("T".into())
        );
        let q = ProblemBuilder::new()
            .decision("A", &["a0", "a1"])
            .random("R", &["r0", "r1"])
            .precede("A", "R")
            .utility("u", &["A", "R"], vec![1.0; 4])
            .potential("p", &["A", "R"], vec![0.5; 4])
            .build()
            .unwrap();
        let a = q.var_id("A").unwrap();
        assert_eq!(
            fuse(vec![named(&q, "p")], a, q.variables(), &mut c).unwrap_err(),
            Error::DecisionUnderPotentialOnly("A".into())
        );
    }

    #[test]
    fn candidates() {
        let m = fixtures::medical();
        let all: Vec<VarId> = m.ids().collect();
        assert_eq!(names(&m, &candidate_next(&m, &all)), vec!["P", "D"]);

        let d = fixtures::diabetes();
        let all: Vec<VarId> = d.ids().collect();
        assert_eq!(names(&d, &candidate_next(&d, &all)), vec!["D"]);
        assert_eq!(names(&d, &candidate_next(&d, &ids(&d, &["G"]))), vec!["G"]);
    }

    #[test]
    fn look_ahead_sequences() {
        let m = fixtures::medical();
        assert_eq!(one_step_look_ahead(&m).names(&m), vec!["D", "P", "T", "S"]);
        let d = fixtures::diabetes();
        assert_eq!(one_step_look_ahead(&d).names(&d), vec!["D", "T", "B", "G"]);
        let single = ProblemBuilder::new()
            .decision("A", &["a", "b"])
            .utility("u", &["A"], vec![10.0, 5.0])
            .build()
            .unwrap();
        assert_eq!(one_step_look_ahead(&single).names(&single), vec!["A"]);
    }

    #[test]
    fn diabetes_solve() {
        let p = fixtures::diabetes();
        let r = solve(&p, None).unwrap();
        assert!((r.meu - 9.855).abs() < 1e-9);
        assert_eq!(r.counter.to_string(), "add 11 mul 28 cmp 4 div 0");
        let psi = r.strategy.table_for(p.var_id("T").unwrap()).unwrap();
        assert_eq!(psi.domain.vars(), ids(&p, &["B", "G"]).as_slice());
        assert_eq!(psi.choices, vec![0, 1, 0, 1]);
    }

    #[test]
    fn medical_solve_counts() {
        let p = fixtures::medical();
        let seq = DeletionSequence::from_names(&p, &["D", "P", "T", "S"]).unwrap();
        let r = solve(&p, Some(&seq)).unwrap();
        assert_eq!(r.counter.to_string(), "add 9 mul 20 cmp 2 div 0");
        // PDTS combines over all four variables
        let worse = DeletionSequence::from_names(&p, &["P", "D", "T", "S"]).unwrap();
        let w = solve(&p, Some(&worse)).unwrap();
        assert!(w.counter.total() > r.counter.total());
        assert!((w.meu - r.meu).abs() < 1e-12);
    }

    #[test]
    fn pure_maximization() {
        let p = ProblemBuilder::new()
            .decision("A", &["a", "b"])
            .utility("u", &["A"], vec![10.0, 5.0])
            .build()
            .unwrap();
        let r = solve(&p, None).unwrap();
        assert_eq!(r.meu, 10.0);
        assert_eq!(r.strategy.tables()[0].choices, vec![0]);
        assert!(r.strategy.tables()[0].domain.is_empty());
    }

    #[test]
    fn invalid_sequences() {
        let p = fixtures::diabetes();
        for bad in [
            &["B", "G", "T", "D"][..],
            &["D", "T", "B"],
            &["D", "T", "B", "B"],
            &["D", "T", "B", "X"],
        ] {
            let err = DeletionSequence::from_names(&p, bad).unwrap_err();
            assert!(
                matches!(
                    err,
                    Error::InvalidDeletionSequence(_) | Error::UnknownVariable(_)
                ),
                "{bad:?}: {err:?}"
            );
        }
        let forged = DeletionSequence(ids(&p, &["T", "D", "B", "G"]));
        assert!(matches!(
            solve(&p, Some(&forged)),
            Err(Error::InvalidDeletionSequence(_))
        ));
    }

    #[test]
    fn multiplicative_utilities_are_combined_first() {
        let p = ProblemBuilder::new()
            .decision("A", &["a0", "a1"])
            .random("R", &["r0", "r1"])
            .precede("A", "R")
            .utility("u1", &["A"], vec![-1.0, 2.0])
            .utility("u2", &["R"], vec![-3.0, 1.0])
            .potential("p", &["R"], vec![0.5, 0.5])
            .build()
            .unwrap();
        // EU(a0) = -1 * (-1) = 1, EU(a1) = 2 * (-1) = -2
        let r = solve(&p, None).unwrap();
        assert!((r.meu - 1.0).abs() < 1e-12);
        assert_eq!(r.strategy.tables()[0].choices, vec![0]);
    }

    #[test]
    fn leftover_scalars_are_multiplied_in() {
        let p = ProblemBuilder::new()
            .decision("A", &["a0", "a1"])
            .random("R", &["r0", "r1"])
            .random("S", &["s0", "s1"])
            .precede("A", "R")
            .precede("A", "S")
            .utility("u", &["A", "R"], vec![1.0, 3.0, 2.0, 2.0])
            .utility("k", &[], vec![2.0])
            .potential("p", &["R"], vec![0.5, 0.5])
            .potential("q", &["S"], vec![0.25, 0.75])
            .build()
            .unwrap();
        let r = solve(&p, None).unwrap();
        assert!((r.meu - 4.0).abs() < 1e-12);
    }
}
