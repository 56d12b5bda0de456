//! Combination and marginalization of valuations, with operation counting.
//!
//! Counting conventions: a pairwise combination costs one multiplication per
//! entry of its result; eliminating a variable with `m` states costs `m - 1`
//! additions (random) or comparisons (decision) per entry of the result.
//! Nothing here ever divides.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    Closure, Configuration, Domain, Valuation, ValuationKind, VarId, VarKind, Variable,
};

/// Tallies of arithmetic operations performed during one solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OperationCounter {
    pub additions: u64,
    pub multiplications: u64,
    pub comparisons: u64,
    pub divisions: u64,
}

impl OperationCounter {
    pub fn total(&self) -> u64 {
        self.additions + self.multiplications + self.comparisons + self.divisions
    }
}

impl fmt::Display for OperationCounter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "add {} mul {} cmp {} div {}",
            self.additions, self.multiplications, self.comparisons, self.divisions
        )
    }
}

/// The argmax table `Psi_D` recorded when a decision is maximized out.
///
/// `choices` is laid out like a valuation table over `domain`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionTable {
    pub decision: VarId,
    pub domain: Domain,
    pub shape: Vec<usize>,
    pub choices: Vec<usize>,
}

impl SolutionTable {
    /// Chosen act for a full assignment indexed by `VarId`.
    pub fn choice_at_assignment(&self, assignment: &[usize]) -> usize {
        let off = self
            .domain
            .vars()
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (v, &m)| acc * m + assignment[v.0]);
        self.choices[off]
    }

    /// Chosen act for a configuration covering this table's domain.
    pub fn choice_at(&self, x: &Configuration) -> Result<usize> {
        let y = project(x, &self.domain)?;
        let off = y
            .states()
            .iter()
            .zip(&self.shape)
            .fold(0, |acc, (&s, &m)| acc * m + s);
        Ok(self.choices[off])
    }
}

/// Restricts a configuration to `h`, which must be a subset of its domain.
pub fn project(x: &Configuration, h: &Domain) -> Result<Configuration> {
    let mut states = Vec::with_capacity(h.len());
    for &v in h.vars() {
        states.push(x.state_of(v).ok_or(Error::NotASubset)?);
    }
    Ok(Configuration::from_parts(h.clone(), states))
}

/// Frame size of `v` as recorded in `val`, if `val` bears on it.
fn frame_in(val: &Valuation, v: VarId) -> Option<usize> {
    val.domain().position(v).map(|i| val.shape()[i])
}

/// Stride of each `target` axis inside `val`'s table, 0 where `val` does not bear on it.
fn strides_over(val: &Valuation, target: &Domain) -> Vec<usize> {
    let shape = val.shape();
    let mut own = vec![0; shape.len()];
    let mut acc = 1;
    for i in (0..shape.len()).rev() {
        own[i] = acc;
        acc *= shape[i];
    }
    target
        .vars()
        .iter()
        .map(|&v| val.domain().position(v).map_or(0, |i| own[i]))
        .collect()
}

/// Pointwise product over the union domain. The result is a utility valuation
/// if either operand is one.
pub fn combine(a: &Valuation, b: &Valuation, counter: &mut OperationCounter) -> Valuation {
    let domain = a.domain().union(b.domain());
    let shape: Vec<usize> = domain
        .vars()
        .iter()
        .map(|&v| {
            frame_in(a, v)
                .or_else(|| frame_in(b, v))
                .expect("variable from union")
        })
        .collect();
    let kind = if a.is_utility() || b.is_utility() {
        ValuationKind::Utility
    } else {
        ValuationKind::Potential
    };
    let sa = strides_over(a, &domain);
    let sb = strides_over(b, &domain);
    let len: usize = shape.iter().product();
    let (ta, tb) = (a.table(), b.table());

    let mut table = Vec::with_capacity(len);
    let mut idx = vec![0usize; shape.len()];
    let (mut oa, mut ob) = (0usize, 0usize);
    for _ in 0..len {
        table.push(ta[oa] * tb[ob]);
        for axis in (0..shape.len()).rev() {
            idx[axis] += 1;
            oa += sa[axis];
            ob += sb[axis];
            if idx[axis] < shape[axis] {
                break;
            }
            oa -= sa[axis] * shape[axis];
            ob -= sb[axis] * shape[axis];
            idx[axis] = 0;
        }
    }
    counter.multiplications += len as u64;
    Valuation::from_parts(kind, domain, shape, table)
}

struct Split {
    outer: usize,
    m: usize,
    inner: usize,
    domain: Domain,
    shape: Vec<usize>,
}

fn split(a: &Valuation, v: VarId) -> Result<Split> {
    let k = a
        .domain()
        .position(v)
        .ok_or(Error::VariableNotInDomain(v))?;
    let shape = a.shape();
    let mut rest = shape.to_vec();
    rest.remove(k);
    Ok(Split {
        outer: shape[..k].iter().product(),
        m: shape[k],
        inner: shape[k + 1..].iter().product(),
        domain: a.domain().without(v),
        shape: rest,
    })
}

/// Sums a random variable out of `a`. The result keeps `a`'s kind.
pub fn marginalize_random(
    a: &Valuation,
    r: VarId,
    counter: &mut OperationCounter,
) -> Result<Valuation> {
    let s = split(a, r)?;
    let t = a.table();
    let mut out = Vec::with_capacity(s.outer * s.inner);
    for o in 0..s.outer {
        let base = o * s.m * s.inner;
        for i in 0..s.inner {
            let mut acc = t[base + i];
            for st in 1..s.m {
                acc += t[base + st * s.inner + i];
            }
            out.push(acc);
        }
    }
    counter.additions += (out.len() * (s.m - 1)) as u64;
    Ok(Valuation::from_parts(a.kind(), s.domain, s.shape, out))
}

/// Maximizes a decision variable out of a utility valuation, recording the
/// argmax. Ties go to the earliest state in frame order.
pub fn marginalize_decision(
    a: &Valuation,
    d: VarId,
    counter: &mut OperationCounter,
) -> Result<(Valuation, SolutionTable)> {
    if !a.is_utility() {
        return Err(Error::NotAUtilityValuation);
    }
    let s = split(a, d)?;
    let t = a.table();
    let mut out = Vec::with_capacity(s.outer * s.inner);
    let mut choices = Vec::with_capacity(s.outer * s.inner);
    for o in 0..s.outer {
        let base = o * s.m * s.inner;
        for i in 0..s.inner {
            let mut best = t[base + i];
            let mut arg = 0;
            for st in 1..s.m {
                let x = t[base + st * s.inner + i];
                if x > best {
                    best = x;
                    arg = st;
                }
            }
            out.push(best);
            choices.push(arg);
        }
    }
    counter.comparisons += (out.len() * (s.m - 1)) as u64;
    let table = SolutionTable {
        decision: d,
        domain: s.domain.clone(),
        shape: s.shape.clone(),
        choices,
    };
    Ok((
        Valuation::from_parts(a.kind(), s.domain, s.shape, out),
        table,
    ))
}

/// Eliminates one variable, summing or maximizing according to its kind.
pub fn marginalize(
    a: &Valuation,
    v: VarId,
    kind: VarKind,
    counter: &mut OperationCounter,
) -> Result<(Valuation, Option<SolutionTable>)> {
    match kind {
        VarKind::Random => marginalize_random(a, v, counter).map(|m| (m, None)),
        VarKind::Decision => marginalize_decision(a, v, counter).map(|(m, s)| (m, Some(s))),
    }
}

/// Eliminates the variables of `order` from `a` one by one. Each must be a
/// minimal element, under `closure`, of the variables still to be eliminated.
pub fn marginalize_sequence(
    a: &Valuation,
    order: &[VarId],
    variables: &[Variable],
    closure: &Closure,
    counter: &mut OperationCounter,
) -> Result<Valuation> {
    let mut pending: Vec<VarId> = order.to_vec();
    let mut current = a.clone();
    for &v in order {
        if !closure.is_minimal_in(v, &pending) {
            return Err(Error::InvalidDeletionSequence(format!(
                "`{}` is eliminated before a variable it precedes",
                variables[v.0].name
            )));
        }
        pending.retain(|&x| x != v);
        current = marginalize(&current, v, variables[v.0].kind, counter)?.0;
    }
    Ok(current)
}

/// Marginal of `a` for `g` with respect to the precedence order: variables of
/// `domain(a) - g` are eliminated minimal-first, lowest declaration index
/// among ties.
pub fn ordered_marginal(
    a: &Valuation,
    g: &Domain,
    variables: &[Variable],
    closure: &Closure,
    counter: &mut OperationCounter,
) -> Result<Valuation> {
    if !g.is_subset(a.domain()) {
        return Err(Error::NotASubset);
    }
    let mut pending: Vec<VarId> = a
        .domain()
        .vars()
        .iter()
        .copied()
        .filter(|v| !g.contains(*v))
        .collect();
    let mut order = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let next = *pending
            .iter()
            .find(|&&x| closure.is_minimal_in(x, &pending))
            .ok_or_else(|| {
                Error::InvalidDeletionSequence("no minimal element (cyclic order)".into())
            })?;
        order.push(next);
        pending.retain(|&x| x != next);
    }
    marginalize_sequence(a, &order, variables, closure, counter)
}

fn union_frame_size(a: &Valuation, b: &Valuation) -> usize {
    let extra: usize = b
        .domain()
        .vars()
        .iter()
        .zip(b.shape())
        .filter(|(v, _)| !a.bears_on(**v))
        .map(|(_, &m)| m)
        .product();
    a.table().len() * extra
}

/// Combines a non-empty list pairwise, always taking the pair whose union has
/// the smallest frame (first such pair in list order). The product replaces
/// the earlier operand of the pair.
pub fn combine_many(mut valuations: Vec<Valuation>, counter: &mut OperationCounter) -> Valuation {
    assert!(
        !valuations.is_empty(),
        "combine_many needs at least one valuation"
    );
    while valuations.len() > 1 {
        let mut best = (usize::MAX, 0, 1);
        for i in 0..valuations.len() {
            for j in i + 1..valuations.len() {
                let size = union_frame_size(&valuations[i], &valuations[j]);
                if size < best.0 {
                    best = (size, i, j);
                }
            }
        }
        let (_, i, j) = best;
        let b = valuations.remove(j);
        valuations[i] = combine(&valuations[i], &b, counter);
    }
    valuations.pop().expect("one valuation left")
}
