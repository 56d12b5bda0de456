//! Line-oriented text format for decision problems.
//!
//! ```text
//! # comment
//! variable B random b ~b
//! variable T decision t ~t
//! precede B T
//! utility pi over B T values 1 2 3 4
//! potential rho over B values
//!   0.3 0.7
//! ```
//!
//! A line that starts with whitespace continues the previous statement.
//! Valuation domains must be listed in declaration order; table values are
//! row-major with the last listed variable varying fastest.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    check_well_defined, DecisionProblem, Domain, PrecedenceRelation, Valuation, ValuationKind,
    VarId, VarKind, Variable,
};

const RESERVED: [&str; 2] = ["over", "values"];

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Run the well-definedness check with this tolerance after parsing.
    pub well_defined: Option<f64>,
}

struct Statement<'a> {
    line: usize,
    tokens: Vec<&'a str>,
}

fn statements(text: &str) -> Result<Vec<Statement<'_>>> {
    let mut out: Vec<Statement<'_>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let tokens = body.split_whitespace();
        if body.starts_with(char::is_whitespace) {
            match out.last_mut() {
                Some(st) => st.tokens.extend(tokens),
                None => return Err(Error::parse(line, "continuation line with no statement")),
            }
        } else {
            out.push(Statement {
                line,
                tokens: tokens.collect(),
            });
        }
    }
    Ok(out)
}

/// Parses and structurally validates a model.
pub fn parse_model(text: &str) -> Result<DecisionProblem> {
    parse_model_with(text, &ParseOptions::default())
}

pub fn parse_model_with(text: &str, options: &ParseOptions) -> Result<DecisionProblem> {
    let mut variables: Vec<Variable> = Vec::new();
    let mut index: HashMap<String, VarId> = HashMap::new();
    let mut precedence = PrecedenceRelation::new();
    let mut valuations: Vec<(String, Valuation)> = Vec::new();
    let mut valuation_names: HashSet<String> = HashSet::new();

    for st in statements(text)? {
        let line = st.line;
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::parse(line, format!("undeclared variable `{name}`")))
        };
        match st.tokens[0] {
            "variable" => {
                let [_, name, kind, states @ ..] = st.tokens.as_slice() else {
                    return Err(Error::parse(
                        line,
                        "expected `variable <id> decision|random <state>...`",
                    ));
                };
                let kind = match *kind {
                    "decision" => VarKind::Decision,
                    "random" => VarKind::Random,
                    other => {
                        return Err(Error::parse(
                            line,
                            format!("unknown variable kind `{other}`"),
                        ))
                    }
                };
                if RESERVED.contains(name) {
                    return Err(Error::parse(line, format!("`{name}` is a reserved word")));
                }
                if index.contains_key(*name) {
                    return Err(Error::parse(
                        line,
                        format!("variable `{name}` declared twice"),
                    ));
                }
                let var =
                    Variable::new(*name, kind, states.iter().map(|s| s.to_string()).collect())
                        .map_err(|e| Error::parse(line, e.to_string()))?;
                index.insert(name.to_string(), VarId(variables.len()));
                variables.push(var);
            }
            "precede" => {
                let [_, from, to] = st.tokens.as_slice() else {
                    return Err(Error::parse(line, "expected `precede <X> <Y>`"));
                };
                let (a, b) = (lookup(from)?, lookup(to)?);
                if a == b {
                    return Err(Error::parse(
                        line,
                        format!("`{from}` cannot precede itself"),
                    ));
                }
                precedence.add(a, b);
            }
            kw @ ("utility" | "potential") => {
                let kind = if kw == "utility" {
                    ValuationKind::Utility
                } else {
                    ValuationKind::Potential
                };
                let (name, domain, values) = parse_valuation(&st, &lookup)?;
                if !valuation_names.insert(name.to_string()) {
                    return Err(Error::parse(
                        line,
                        format!("valuation `{name}` declared twice"),
                    ));
                }
                let val =
                    Valuation::new(kind, domain, &variables, values).map_err(|e| match e {
                        Error::MalformedValuation { reason, .. } => {
                            Error::parse(line, format!("valuation `{name}`: {reason}"))
                        }
                        other => Error::parse(line, other.to_string()),
                    })?;
                valuations.push((name.to_string(), val));
            }
            other => return Err(Error::parse(line, format!("unknown statement `{other}`"))),
        }
    }

    let problem = DecisionProblem::new(variables, valuations, precedence)?;
    if let Some(tol) = options.well_defined {
        check_well_defined(&problem, tol)?;
    }
    Ok(problem)
}

fn parse_valuation<'a>(
    st: &Statement<'a>,
    lookup: &dyn Fn(&str) -> Result<VarId>,
) -> Result<(&'a str, Domain, Vec<f64>)> {
    let line = st.line;
    let usage = || {
        Error::parse(
            line,
            "expected `utility|potential <name> over <vars...> values <reals...>`",
        )
    };
    let tokens = &st.tokens;
    if tokens.len() < 4 || tokens[2] != "over" {
        return Err(usage());
    }
    let name = tokens[1];
    let values_at = tokens
        .iter()
        .position(|t| *t == "values")
        .ok_or_else(usage)?;
    let mut ids = Vec::new();
    for v in &tokens[3..values_at] {
        let id = lookup(v)?;
        if let Some(&prev) = ids.last() {
            if id <= prev {
                return Err(Error::parse(
                    line,
                    format!(
                        "valuation `{name}`: domain must list variables once, in declaration order"
                    ),
                ));
            }
        }
        ids.push(id);
    }
    let values = tokens[values_at + 1..]
        .iter()
        .map(|t| {
            t.parse::<f64>().map_err(|_| {
                Error::parse(line, format!("valuation `{name}`: `{t}` is not a number"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((name, Domain::from_ids(ids), values))
}

/// Writes a model that [`parse_model`] reads back to an equal problem.
pub fn serialize(problem: &DecisionProblem) -> String {
    let vars = problem.variables();
    let mut out = String::new();
    for v in vars {
        let _ = writeln!(out, "variable {} {} {}", v.name, v.kind, v.states.join(" "));
    }
    if !problem.precedence().is_empty() {
        out.push('\n');
    }
    for (a, b) in problem.precedence().arcs() {
        let _ = writeln!(out, "precede {} {}", vars[a.0].name, vars[b.0].name);
    }
    for (name, val) in problem.named_valuations() {
        out.push('\n');
        let _ = write!(out, "{} {} over", val.kind(), name);
        for v in val.domain().vars() {
            let _ = write!(out, " {}", vars[v.0].name);
        }
        out.push_str(" values\n");
        let row = val.shape().last().copied().unwrap_or(1).max(1);
        for chunk in val.table().chunks(row) {
            let cells: Vec<String> = chunk.iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
    }
    out
}
