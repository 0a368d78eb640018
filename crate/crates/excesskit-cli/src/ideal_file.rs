//! Ideal file loading.
//!
//! Two interchangeable formats:
//!
//! * plain text — a header line `vars: x,y,z,w` followed by one generator
//!   expression per line; blank lines and `#` comments are skipped;
//! * structured JSON — `{"vars": [...], "generators": [...]}` where each
//!   generator is either an expression string or an explicit term list
//!   `{"terms": [{"exps": [0,0,2,0], "coeff": [1.0, 0.0]}, ...]}`.

use anyhow::{bail, Context, Result};
use excesskit_core::{parse_polynomial, ExponentVector, IdealSpec, SparsePolynomial, VariableSet};
use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
struct JsonIdeal {
    vars: Vec<String>,
    generators: Vec<JsonGenerator>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonGenerator {
    Expression(String),
    Terms { terms: Vec<JsonTerm> },
}

#[derive(Deserialize)]
struct JsonTerm {
    exps: Vec<u32>,
    coeff: [f64; 2],
}

pub fn load_ideal(path: &Path) -> Result<IdealSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read ideal file {}", path.display()))?;
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        load_json(trimmed)
    } else {
        load_text(&text)
    }
}

fn load_json(text: &str) -> Result<IdealSpec> {
    let parsed: JsonIdeal = serde_json::from_str(text).context("invalid structured ideal file")?;
    let vars = VariableSet::new(parsed.vars)?;
    let width = vars.n_plus_one();
    let mut generators = Vec::with_capacity(parsed.generators.len());
    for (i, g) in parsed.generators.into_iter().enumerate() {
        let poly = match g {
            JsonGenerator::Expression(expr) => {
                parse_polynomial(&expr, &vars).with_context(|| format!("generator {}", i + 1))?
            }
            JsonGenerator::Terms { terms } => {
                let pairs = terms.into_iter().map(|t| {
                    (
                        ExponentVector::new(t.exps),
                        Complex64::new(t.coeff[0], t.coeff[1]),
                    )
                });
                SparsePolynomial::from_terms(width, pairs)
                    .with_context(|| format!("generator {}", i + 1))?
            }
        };
        generators.push(poly);
    }
    Ok(IdealSpec::new(generators, vars)?)
}

fn load_text(text: &str) -> Result<IdealSpec> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = match lines.next() {
        Some(h) => h,
        None => bail!("empty ideal file"),
    };
    let names = match header.strip_prefix("vars:") {
        Some(rest) => rest
            .split(',')
            .map(|s| s.trim().to_string())
            .collect::<Vec<_>>(),
        None => bail!("ideal file must start with a `vars:` header"),
    };
    let vars = VariableSet::new(names)?;
    let mut generators = Vec::new();
    for (i, line) in lines.enumerate() {
        let poly = parse_polynomial(line, &vars).with_context(|| format!("generator {}", i + 1))?;
        generators.push(poly);
    }
    Ok(IdealSpec::new(generators, vars)?)
}

/// Parse a comma-separated monomial list against the ideal's variables.
pub fn parse_monomials(spec: &str, vars: &VariableSet) -> Result<IdealSpec> {
    let mut gens = Vec::new();
    for (i, part) in spec.split(',').enumerate() {
        let poly =
            parse_polynomial(part.trim(), vars).with_context(|| format!("monomial {}", i + 1))?;
        if poly.num_terms() != 1 {
            bail!("entry {} of the monomial list is not a monomial", i + 1);
        }
        gens.push(poly);
    }
    Ok(IdealSpec::new(gens, vars.clone())?)
}
