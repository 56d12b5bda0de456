//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use vbs_core::model::{
    DecisionProblem, Domain, PrecedenceRelation, Valuation, ValuationKind, VarId, VarKind, Variable,
};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform table entries in `[lo, hi)`.
pub fn random_table(rng: &mut StdRng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Binary variables `V0..Vn`, all of the given kind.
pub fn binary_vars(n: usize, kind: VarKind) -> Vec<Variable> {
    (0..n)
        .map(|i| Variable::new(format!("V{i}"), kind, vec!["s0".into(), "s1".into()]).unwrap())
        .collect()
}

pub fn valuation_over(
    rng: &mut StdRng,
    kind: ValuationKind,
    ids: &[usize],
    variables: &[Variable],
    lo: f64,
    hi: f64,
) -> Valuation {
    let domain = Domain::from_ids(ids.iter().map(|&i| VarId(i)));
    let len = domain.frame_size(variables);
    Valuation::new(kind, domain, variables, random_table(rng, len, lo, hi)).unwrap()
}

/// A conditional of `child` given `parents`: nonnegative, summing to one
/// along `child`'s axis for every parent configuration.
pub fn conditional(
    rng: &mut StdRng,
    child: VarId,
    parents: &[VarId],
    variables: &[Variable],
) -> Valuation {
    let domain = Domain::from_ids(parents.iter().copied().chain([child]));
    let shape = domain.shape(variables);
    let k = domain.position(child).unwrap();
    let m = shape[k];
    let inner: usize = shape[k + 1..].iter().product();
    let outer: usize = shape[..k].iter().product();
    let mut table = vec![0.0; outer * m * inner];
    for o in 0..outer {
        for i in 0..inner {
            let mut w: Vec<f64> = (0..m)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        0.0
                    } else {
                        rng.gen_range(0.0..1.0)
                    }
                })
                .collect();
            if w.iter().all(|&x| x == 0.0) {
                w[rng.gen_range(0..m)] = 1.0;
            }
            let total: f64 = w.iter().sum();
            for (s, x) in w.into_iter().enumerate() {
                table[o * m * inner + s * inner + i] = x / total;
            }
        }
    }
    Valuation::new(ValuationKind::Potential, domain, variables, table).unwrap()
}

fn subset(rng: &mut StdRng, pool: &[VarId], p: f64) -> Vec<VarId> {
    pool.iter().copied().filter(|_| rng.gen_bool(p)).collect()
}

/// A random well-defined problem with `n` binary variables (`1..=5`) and at
/// most two decisions.
///
/// Every variable gets a stage: randoms even, decisions odd. Arcs join every
/// variable of one nonempty stage to every variable of the next, so each
/// decision is comparable with each random (perfect recall) and variables
/// sharing a stage are incomparable. Each random gets a conditional potential
/// on a subset of earlier-staged variables; one or two utilities jointly
/// cover every decision. Declaration order is shuffled so canonical table
/// order and precedence order differ.
pub fn random_problem(rng: &mut StdRng, n: usize) -> DecisionProblem {
    assert!((1..=5).contains(&n));
    let decisions = rng.gen_range(0..=n.min(2));
    let mut kinds: Vec<VarKind> = (0..n)
        .map(|i| {
            if i < decisions {
                VarKind::Decision
            } else {
                VarKind::Random
            }
        })
        .collect();
    kinds.shuffle(rng);

    let max_decision_stage: usize = if decisions == 2 && rng.gen_bool(0.6) {
        3
    } else {
        1
    };
    let stages: Vec<usize> = kinds
        .iter()
        .map(|k| match k {
            VarKind::Decision => {
                if max_decision_stage == 3 && rng.gen_bool(0.5) {
                    3
                } else {
                    1
                }
            }
            VarKind::Random => 2 * rng.gen_range(0..=max_decision_stage.div_ceil(2)),
        })
        .collect();

    let variables: Vec<Variable> = kinds
        .iter()
        .enumerate()
        .map(|(i, &k)| Variable::new(format!("V{i}"), k, vec!["s0".into(), "s1".into()]).unwrap())
        .collect();

    let mut occupied: Vec<usize> = stages.clone();
    occupied.sort_unstable();
    occupied.dedup();
    let mut precedence = PrecedenceRelation::new();
    for w in occupied.windows(2) {
        for a in (0..n).filter(|&i| stages[i] == w[0]) {
            for b in (0..n).filter(|&i| stages[i] == w[1]) {
                precedence.add(VarId(a), VarId(b));
            }
        }
    }

    let mut valuations = Vec::new();
    let mut randoms: Vec<usize> = (0..n).filter(|&i| kinds[i] == VarKind::Random).collect();
    randoms.sort_by_key(|&i| stages[i]);
    for (pos, &r) in randoms.iter().enumerate() {
        let pool: Vec<VarId> = (0..n)
            .filter(|&i| {
                stages[i] < stages[r]
                    || (kinds[i] == VarKind::Random && randoms[..pos].contains(&i))
            })
            .map(VarId)
            .collect();
        let parents = subset(rng, &pool, 0.5);
        valuations.push((
            format!("p{r}"),
            conditional(rng, VarId(r), &parents, &variables),
        ));
    }

    let all: Vec<VarId> = (0..n).map(VarId).collect();
    let decision_ids: Vec<VarId> = all
        .iter()
        .copied()
        .filter(|v| kinds[v.0] == VarKind::Decision)
        .collect();
    let utilities = if rng.gen_bool(0.5) { 1 } else { 2 };
    let mut domains: Vec<Vec<VarId>> = (0..utilities).map(|_| subset(rng, &all, 0.4)).collect();
    for &d in &decision_ids {
        let u = rng.gen_range(0..utilities);
        if !domains[u].contains(&d) {
            domains[u].push(d);
        }
    }
    for (u, dom) in domains.iter_mut().enumerate() {
        if dom.is_empty() {
            dom.push(*all.choose(rng).unwrap());
        }
        let ids: Vec<usize> = dom.iter().map(|v| v.0).collect();
        valuations.push((
            format!("u{u}"),
            valuation_over(rng, ValuationKind::Utility, &ids, &variables, -5.0, 10.0),
        ));
    }
    valuations.shuffle(rng);

    DecisionProblem::new(variables, valuations, precedence).expect("generated problem is valid")
}

/// Variable count drawn uniformly from `1..=5`.
pub fn any_problem(seed: u64) -> DecisionProblem {
    let mut r = rng(seed);
    let n = r.gen_range(1..=5);
    random_problem(&mut r, n)
}
