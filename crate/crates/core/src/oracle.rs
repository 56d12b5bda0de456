//! Reference solvers used to cross-check fusion.
//!
//! `brute_force_solve` enumerates every strategy and scores it by summing
//! over all random configurations, evaluating each declared valuation
//! pointwise. `global_solve` builds the full joint valuation and
//! marginalizes it in precedence order. Neither shares the fusion path.

use crate::algebra::{self, OperationCounter};
use crate::error::{Error, Result};
use crate::fusion::Strategy;
use crate::model::{
    predecessors, Configuration, DecisionProblem, Domain, Odometer, Valuation, VarId,
};

/// Default bound on the number of strategies brute force will enumerate.
pub const STRATEGY_CAP: u64 = 1_000_000;

/// `xi_D`: a total map from configurations of `Pr(D)` to acts of `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionRule {
    pub decision: VarId,
    pub inputs: Domain,
    pub shape: Vec<usize>,
    pub choices: Vec<usize>,
}

impl DecisionRule {
    fn offset(&self, assignment: &[usize]) -> usize {
        self.inputs
            .vars()
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (v, &m)| acc * m + assignment[v.0])
    }

    pub fn choice_at_assignment(&self, assignment: &[usize]) -> usize {
        self.choices[self.offset(assignment)]
    }
}

/// One decision rule per decision variable, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitStrategy {
    pub rules: Vec<DecisionRule>,
}

impl ExplicitStrategy {
    pub fn rule_for(&self, decision: VarId) -> Option<&DecisionRule> {
        self.rules.iter().find(|r| r.decision == decision)
    }

    /// The same act for every observation.
    pub fn constant(problem: &DecisionProblem, acts: &[(VarId, usize)]) -> Result<Self> {
        let mut template = rule_templates(problem)?;
        for rule in &mut template {
            let act = acts
                .iter()
                .find(|(d, _)| *d == rule.decision)
                .map(|(_, a)| *a)
                .unwrap_or(0);
            rule.choices.iter_mut().for_each(|c| *c = act);
        }
        Ok(ExplicitStrategy { rules: template })
    }
}

fn rule_templates(problem: &DecisionProblem) -> Result<Vec<DecisionRule>> {
    problem
        .decision_vars()
        .vars()
        .iter()
        .map(|&d| {
            let inputs = predecessors(problem, d)?;
            let shape = inputs.shape(problem.variables());
            let cells = shape.iter().product();
            Ok(DecisionRule {
                decision: d,
                inputs,
                shape,
                choices: vec![0; cells],
            })
        })
        .collect()
}

/// Number of distinct strategies, as a float since it overflows quickly.
pub fn strategy_space_size(problem: &DecisionProblem) -> Result<f64> {
    Ok(rule_templates(problem)?
        .iter()
        .map(|r| (problem.variable(r.decision).frame_size() as f64).powi(r.choices.len() as i32))
        .product())
}

/// Lazily enumerates strategies; the last cell of the last rule varies fastest.
pub struct StrategyIter {
    template: Vec<DecisionRule>,
    odometer: Odometer,
}

impl Iterator for StrategyIter {
    type Item = ExplicitStrategy;

    fn next(&mut self) -> Option<ExplicitStrategy> {
        let cells = self.odometer.next()?;
        let mut rules = self.template.clone();
        let mut it = cells.into_iter();
        for rule in &mut rules {
            for c in rule.choices.iter_mut() {
                *c = it.next().expect("one cell per choice");
            }
        }
        Some(ExplicitStrategy { rules })
    }
}

pub fn strategies(problem: &DecisionProblem, cap: u64) -> Result<StrategyIter> {
    let size = strategy_space_size(problem)?;
    if size > cap as f64 {
        return Err(Error::StrategySpaceTooLarge { size, cap });
    }
    let template = rule_templates(problem)?;
    let radices: Vec<usize> = template
        .iter()
        .flat_map(|r| {
            std::iter::repeat_n(problem.variable(r.decision).frame_size(), r.choices.len())
        })
        .collect();
    Ok(StrategyIter {
        template,
        odometer: Odometer::new(radices),
    })
}

pub fn enumerate_strategies(problem: &DecisionProblem) -> Result<Vec<ExplicitStrategy>> {
    Ok(strategies(problem, STRATEGY_CAP)?.collect())
}

/// The configuration of all decision variables selected by `strategy` when
/// the random variables take configuration `y`.
pub fn induced_decision_config(
    problem: &DecisionProblem,
    strategy: &ExplicitStrategy,
    y: &Configuration,
) -> Result<Configuration> {
    let mut assignment = vec![0; problem.variables().len()];
    for r in strategy.rules.iter().flat_map(|r| r.inputs.vars()) {
        assignment[r.0] = y.state_of(*r).ok_or(Error::NotASubset)?;
    }
    let decisions = problem.decision_vars();
    let states = decisions
        .vars()
        .iter()
        .map(|&d| {
            strategy
                .rule_for(d)
                .map(|rule| rule.choice_at_assignment(&assignment))
                .ok_or_else(|| Error::UnresolvableTable(problem.variable(d).name.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Configuration::new(decisions, states, problem.variables())
}

fn product_at(vals: &[&Valuation], assignment: &[usize]) -> f64 {
    vals.iter()
        .map(|v| v.value_at_assignment(assignment))
        .product()
}

/// Sums joint-potential times joint-utility over every random configuration,
/// with decisions filled in by `decide`.
fn score(problem: &DecisionProblem, mut decide: impl FnMut(&mut [usize])) -> f64 {
    let potentials: Vec<&Valuation> = problem.potentials().collect();
    let utilities: Vec<&Valuation> = problem.utilities().collect();
    let randoms = problem.random_vars();
    let mut assignment = vec![0; problem.variables().len()];
    let mut total = 0.0;
    for y in Odometer::new(randoms.shape(problem.variables())) {
        for (r, s) in randoms.vars().iter().zip(y) {
            assignment[r.0] = s;
        }
        decide(&mut assignment);
        total += product_at(&potentials, &assignment) * product_at(&utilities, &assignment);
    }
    total
}

pub fn expected_utility(problem: &DecisionProblem, strategy: &ExplicitStrategy) -> f64 {
    score(problem, |assignment| {
        for rule in &strategy.rules {
            assignment[rule.decision.0] = rule.choice_at_assignment(assignment);
        }
    })
}

/// Maximum expected utility by exhaustive strategy search. Ties keep the
/// earliest strategy in enumeration order.
pub fn brute_force_solve(problem: &DecisionProblem) -> Result<(f64, ExplicitStrategy)> {
    brute_force_solve_capped(problem, STRATEGY_CAP)
}

pub fn brute_force_solve_capped(
    problem: &DecisionProblem,
    cap: u64,
) -> Result<(f64, ExplicitStrategy)> {
    let mut best: Option<(f64, ExplicitStrategy)> = None;
    for s in strategies(problem, cap)? {
        let eu = expected_utility(problem, &s);
        if best.as_ref().is_none_or(|(b, _)| eu > *b) {
            best = Some((eu, s));
        }
    }
    Ok(best.expect("at least one strategy"))
}

/// The product of every valuation in the problem.
pub fn joint_valuation(problem: &DecisionProblem) -> Valuation {
    let mut counter = OperationCounter::default();
    algebra::combine_many(problem.valuations().to_vec(), &mut counter)
}

/// Marginalizes the joint valuation to the empty set in precedence order.
/// Memory is exponential in the number of variables.
pub fn global_solve(problem: &DecisionProblem) -> Result<f64> {
    let mut counter = OperationCounter::default();
    let tau = joint_valuation(problem);
    let root = algebra::ordered_marginal(
        &tau,
        &Domain::empty(),
        problem.variables(),
        problem.closure(),
        &mut counter,
    )?;
    Ok(root.scalar().expect("empty-domain marginal"))
}

/// Expected utility of a fusion-produced strategy. Decisions are resolved by
/// forward execution: a table is applied once every decision in its domain
/// has been fixed.
pub fn evaluate_strategy(problem: &DecisionProblem, strategy: &Strategy) -> Result<f64> {
    let decisions = problem.decision_vars();
    for &d in decisions.vars() {
        if strategy.table_for(d).is_none() {
            return Err(Error::UnresolvableTable(problem.variable(d).name.clone()));
        }
    }
    let mut pending: Vec<_> = decisions
        .vars()
        .iter()
        .map(|&d| strategy.table_for(d).expect("checked above"))
        .collect();
    let mut fixed: Vec<VarId> = Vec::new();
    let mut schedule = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let ready = pending.iter().position(|t| {
            t.domain
                .vars()
                .iter()
                .all(|&v| !problem.variable(v).is_decision() || fixed.contains(&v))
        });
        let Some(i) = ready else {
            return Err(Error::UnresolvableTable(
                problem.variable(pending[0].decision).name.clone(),
            ));
        };
        let table = pending.remove(i);
        fixed.push(table.decision);
        schedule.push(table);
    }
    Ok(score(problem, |assignment| {
        for table in &schedule {
            assignment[table.decision.0] = table.choice_at_assignment(assignment);
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SolutionTable;
    use crate::fixtures;
    use crate::fusion::solve;
    use crate::model::ProblemBuilder;

    fn treat_iff_glucose(p: &DecisionProblem) -> ExplicitStrategy {
        let t = p.var_id("T").unwrap();
        ExplicitStrategy {
            rules: vec![DecisionRule {
                decision: t,
                inputs: Domain::from_ids([p.var_id("B").unwrap(), p.var_id("G").unwrap()]),
                shape: vec![2, 2],
                choices: vec![0, 1, 0, 1],
            }],
        }
    }

    #[test]
    fn diabetes_strategy_count() {
        let p = fixtures::diabetes();
        let all = enumerate_strategies(&p).unwrap();
        assert_eq!(all.len(), 16);
        assert_eq!(all[0].rules[0].choices, vec![0; 4]);
        assert_eq!(all[1].rules[0].choices, vec![0, 0, 0, 1]);
        let distinct: std::collections::HashSet<_> =
            all.iter().map(|s| s.rules[0].choices.clone()).collect();
        assert_eq!(distinct.len(), 16);
    }

    #[test]
    fn strategy_counts_in_small_cases() {
        let none = ProblemBuilder::new()
            .random("R", &["r0", "r1"])
            .utility("u", &["R"], vec![1.0, 2.0])
            .potential("p", &["R"], vec![0.5, 0.5])
            .build()
            .unwrap();
        let all = enumerate_strategies(&none).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].rules.is_empty());

        let three = ProblemBuilder::new()
            .decision("A", &["a0", "a1", "a2"])
            .utility("u", &["A"], vec![1.0, 2.0, 3.0])
            .build()
            .unwrap();
        assert_eq!(enumerate_strategies(&three).unwrap().len(), 3);
    }

    #[test]
    fn strategy_cap_is_enforced() {
        let p = fixtures::diabetes();
        assert!(matches!(
            strategies(&p, 15),
            Err(Error::StrategySpaceTooLarge { size, cap: 15 }) if size == 16.0
        ));
    }

    #[test]
    fn induced_configs() {
        let p = fixtures::diabetes();
        let s = treat_iff_glucose(&p);
        let y = p
            .configuration(&[("B", "~b"), ("G", "g"), ("D", "d")])
            .unwrap();
        let a = induced_decision_config(&p, &s, &y).unwrap();
        assert_eq!(a, p.configuration(&[("T", "t")]).unwrap());

        let y2 = p
            .configuration(&[("B", "~b"), ("G", "g"), ("D", "~d")])
            .unwrap();
        assert_eq!(induced_decision_config(&p, &s, &y2).unwrap(), a);

        let t = p.var_id("T").unwrap();
        let never = ExplicitStrategy::constant(&p, &[(t, 1)]).unwrap();
        for y in [&y, &y2] {
            assert_eq!(
                induced_decision_config(&p, &never, y).unwrap(),
                p.configuration(&[("T", "~t")]).unwrap()
            );
        }
    }

    #[test]
    fn diabetes_expected_utilities() {
        let p = fixtures::diabetes();
        let t = p.var_id("T").unwrap();
        let always = ExplicitStrategy::constant(&p, &[(t, 0)]).unwrap();
        let never = ExplicitStrategy::constant(&p, &[(t, 1)]).unwrap();
        assert!((expected_utility(&p, &always) - 5.5).abs() < 1e-12);
        assert!((expected_utility(&p, &never) - 9.0).abs() < 1e-12);
        // g: treat, 10(.09) + 5(.009); ~g: wait, 10(.891)
        assert!((expected_utility(&p, &treat_iff_glucose(&p)) - 9.855).abs() < 1e-12);
    }

    #[test]
    fn diabetes_brute_force_and_global() {
        let p = fixtures::diabetes();
        let (meu, best) = brute_force_solve(&p).unwrap();
        assert!((meu - 9.855).abs() < 1e-12);
        assert_eq!(best, treat_iff_glucose(&p));
        assert!((global_solve(&p).unwrap() - 9.855).abs() < 1e-12);

        let tau = joint_valuation(&p);
        let x = p
            .configuration(&[("B", "~b"), ("G", "~g"), ("T", "~t"), ("D", "~d")])
            .unwrap();
        assert!((tau.value_at(&x).unwrap() - 8.85654).abs() < 1e-12);
    }

    #[test]
    fn no_random_variables() {
        let p = ProblemBuilder::new()
            .decision("A", &["a0", "a1"])
            .utility("u", &["A"], vec![10.0, 5.0])
            .build()
            .unwrap();
        assert_eq!(brute_force_solve(&p).unwrap().0, 10.0);
        assert_eq!(global_solve(&p).unwrap(), 10.0);
    }

    #[test]
    fn unit_potential_global_is_max_utility() {
        let p = ProblemBuilder::new()
            .decision("A", &["a0", "a1", "a2"])
            .random("R", &["r"])
            .precede("A", "R")
            .utility("u", &["A"], vec![1.0, 7.0, 3.0])
            .potential("one", &["R"], vec![1.0])
            .build()
            .unwrap();
        assert_eq!(global_solve(&p).unwrap(), 7.0);
    }

    #[test]
    fn fusion_strategy_scores_its_meu() {
        for p in [fixtures::diabetes(), fixtures::medical()] {
            let r = solve(&p, None).unwrap();
            assert!((evaluate_strategy(&p, &r.strategy).unwrap() - r.meu).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_tables_match_constant_strategy() {
        let p = fixtures::diabetes();
        let t = p.var_id("T").unwrap();
        let table = SolutionTable {
            decision: t,
            domain: Domain::empty(),
            shape: vec![],
            choices: vec![0],
        };
        let eu = evaluate_strategy(&p, &Strategy::new(vec![table])).unwrap();
        let always = ExplicitStrategy::constant(&p, &[(t, 0)]).unwrap();
        assert_eq!(eu, expected_utility(&p, &always));
    }

    #[test]
    fn unresolvable_tables() {
        let p = ProblemBuilder::new()
            .decision("A", &["a0", "a1"])
            .decision("B", &["b0", "b1"])
            .utility("u", &["A", "B"], vec![1.0, 2.0, 3.0, 4.0])
            .build()
            .unwrap();
        let (a, b) = (VarId(0), VarId(1));
        let circular = Strategy::new(vec![
            SolutionTable {
                decision: a,
                domain: Domain::from_ids([b]),
                shape: vec![2],
                choices: vec![0, 0],
            },
            SolutionTable {
                decision: b,
                domain: Domain::from_ids([a]),
                shape: vec![2],
                choices: vec![0, 0],
            },
        ]);
        assert!(matches!(
            evaluate_strategy(&p, &circular),
            Err(Error::UnresolvableTable(_))
        ));
        let missing = Strategy::new(vec![SolutionTable {
            decision: a,
            domain: Domain::empty(),
            shape: vec![],
            choices: vec![1],
        }]);
        assert_eq!(
            evaluate_strategy(&p, &missing).unwrap_err(),
            Error::UnresolvableTable("B".into())
        );
    }
}
