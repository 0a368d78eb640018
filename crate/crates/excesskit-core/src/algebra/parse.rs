//! Recursive-descent parser for the textual polynomial grammar:
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := coeff? ('*'? var ('^' uint)?)*
//! coeff := int | decimal | int '/' int
//! ```
//!
//! Whitespace is insignificant. A leading sign on the first term is accepted
//! as a convenience so monomialized generators such as `-y*w` stay parseable.
//! Variable references are matched greedily against the declared names, so
//! adjacent single-letter variables multiply implicitly (`yw` = `y*w`).

use super::{AlgebraError, ExponentVector, SparsePolynomial, VariableSet};
use num_complex::Complex64;

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a VariableSet,
    // variable names sorted longest-first for greedy matching
    names_by_len: Vec<(usize, String)>,
}

/// Parse an expression into canonical sparse form.
pub fn parse_polynomial(text: &str, vars: &VariableSet) -> Result<SparsePolynomial, AlgebraError> {
    let mut names_by_len: Vec<(usize, String)> = vars
        .names()
        .iter()
        .enumerate()
        .map(|(i, n)| (i, n.clone()))
        .collect();
    names_by_len.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.1.cmp(&b.1)));
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        vars,
        names_by_len,
    };
    p.parse_expr()
}

impl Parser<'_> {
    fn parse_expr(&mut self) -> Result<SparsePolynomial, AlgebraError> {
        let width = self.vars.n_plus_one();
        let mut poly = SparsePolynomial::zero(width);
        self.skip_ws();
        let mut sign = 1.0;
        if let Some(c) = self.peek() {
            if c == '+' || c == '-' {
                self.pos += 1;
                if c == '-' {
                    sign = -1.0;
                }
            }
        }
        loop {
            let (exps, coeff) = self.parse_term()?;
            let term = SparsePolynomial::from_terms(
                width,
                [(ExponentVector::new(exps), Complex64::new(sign * coeff, 0.0))],
            )?;
            poly = poly.add(&term).unwrap();
            self.skip_ws();
            match self.peek() {
                None => break,
                Some('+') => {
                    sign = 1.0;
                    self.pos += 1;
                }
                Some('-') => {
                    sign = -1.0;
                    self.pos += 1;
                }
                Some(c) => {
                    return Err(self.syntax(format!("expected `+` or `-`, found `{c}`")));
                }
            }
        }
        Ok(poly)
    }

    /// Returns the exponent vector and real coefficient of one term.
    fn parse_term(&mut self) -> Result<(Vec<u32>, f64), AlgebraError> {
        self.skip_ws();
        let mut exps = vec![0u32; self.vars.n_plus_one()];
        let mut coeff = 1.0;
        let mut saw_anything = false;

        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            coeff = self.parse_coeff()?;
            saw_anything = true;
        }
        loop {
            self.skip_ws();
            let before_star = self.pos;
            let mut consumed_star = false;
            if self.peek() == Some('*') {
                self.pos += 1;
                self.skip_ws();
                consumed_star = true;
            }
            match self.peek() {
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let idx = self.parse_var()?;
                    let mut power = 1u32;
                    self.skip_ws();
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        power = self.parse_uint()?;
                    }
                    exps[idx] += power;
                    saw_anything = true;
                }
                _ if consumed_star => {
                    return Err(self.syntax("expected a variable after `*`".into()));
                }
                _ => {
                    self.pos = before_star;
                    break;
                }
            }
        }
        if !saw_anything {
            return Err(self.syntax("expected a term".into()));
        }
        Ok((exps, coeff))
    }

    fn parse_coeff(&mut self) -> Result<f64, AlgebraError> {
        let int_part = self.parse_digits()?;
        match self.peek() {
            Some('.') => {
                self.pos += 1;
                let start = self.pos;
                let frac = self.parse_digits()?;
                let _ = start;
                let text = format!("{int_part}.{frac}");
                text.parse::<f64>()
                    .map_err(|_| self.syntax(format!("bad decimal `{text}`")))
            }
            Some('/') => {
                self.pos += 1;
                self.skip_ws();
                let den = self.parse_digits()?;
                let n: f64 = int_part
                    .parse()
                    .map_err(|_| self.syntax(format!("bad integer `{int_part}`")))?;
                let d: f64 = den
                    .parse()
                    .map_err(|_| self.syntax(format!("bad integer `{den}`")))?;
                if d == 0.0 {
                    return Err(self.syntax("zero denominator".into()));
                }
                Ok(n / d)
            }
            _ => int_part
                .parse::<f64>()
                .map_err(|_| self.syntax(format!("bad integer `{int_part}`"))),
        }
    }

    fn parse_digits(&mut self) -> Result<String, AlgebraError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.syntax("expected digits".into()));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn parse_uint(&mut self) -> Result<u32, AlgebraError> {
        let digits = self.parse_digits()?;
        digits
            .parse::<u32>()
            .map_err(|_| self.syntax(format!("exponent `{digits}` out of range")))
    }

    /// Greedy longest match against the declared variable names.
    fn parse_var(&mut self) -> Result<usize, AlgebraError> {
        for (idx, name) in &self.names_by_len {
            if self.rest_starts_with(name) {
                self.pos += name.chars().count();
                return Ok(*idx);
            }
        }
        // collect the identifier run for the error message
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        Err(AlgebraError::UnknownVariable {
            name: self.chars[start..self.pos].iter().collect(),
            position: start + 1,
        })
    }

    fn rest_starts_with(&self, name: &str) -> bool {
        name.chars()
            .enumerate()
            .all(|(k, c)| self.chars.get(self.pos + k) == Some(&c))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: String) -> AlgebraError {
        AlgebraError::Syntax {
            position: self.pos + 1,
            message,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_variable_matching_prefers_longest() {
        let vars = VariableSet::new(vec!["x", "x1"]).unwrap();
        let p = parse_polynomial("x1^2*x", &vars).unwrap();
        let terms: Vec<_> = p.terms().collect();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0.exps(), &[1, 2]);
    }

    #[test]
    fn repeated_variables_accumulate() {
        let vars = VariableSet::new(vec!["x", "y"]).unwrap();
        let p = parse_polynomial("x*x*y", &vars).unwrap();
        let terms: Vec<_> = p.terms().collect();
        assert_eq!(terms[0].0.exps(), &[2, 1]);
    }

    #[test]
    fn cancelling_terms_vanish() {
        let vars = VariableSet::new(vec!["x", "y"]).unwrap();
        let p = parse_polynomial("x - x", &vars).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn number_after_variable_is_rejected() {
        let vars = VariableSet::new(vec!["x", "y"]).unwrap();
        assert!(parse_polynomial("x 2", &vars).is_err());
        assert!(parse_polynomial("x*2", &vars).is_err());
    }

    #[test]
    fn constants_parse() {
        let vars = VariableSet::new(vec!["x", "y"]).unwrap();
        let one = parse_polynomial("1", &vars).unwrap();
        assert_eq!(one.degree(), 0);
        let half = parse_polynomial("1/2", &vars).unwrap();
        assert_eq!(
            half.evaluate(&[Complex64::new(0.0, 0.0); 2]).unwrap(),
            Complex64::new(0.5, 0.0)
        );
    }
}
