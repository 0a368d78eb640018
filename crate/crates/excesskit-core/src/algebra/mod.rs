//! Multivariate complex polynomial arithmetic over a homogeneous variable set.
//!
//! Polynomials are stored sparsely as maps from exponent vectors to complex
//! coefficients. The canonical term order is graded lexicographic with the
//! *last* declared variable most significant, so for variables `x,y,z,w` the
//! generator `z^2 - y*w` keeps its terms in written order. Everything here is
//! immutable after construction and safe to share across threads.

mod parse;

pub use parse::parse_polynomial;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Errors raised by polynomial construction, parsing and evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },
    #[error("invalid variable set: {0}")]
    InvalidVariables(String),
    #[error("point has {got} coordinates, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("exponent vector has width {got}, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("{0}")]
    InvalidSystem(String),
}

/// The ordered variables of the ambient ring, `x_0` through `x_n`.
///
/// By convention index 0 is the homogenizing variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSet {
    names: Vec<String>,
}

impl VariableSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self, AlgebraError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(AlgebraError::InvalidVariables("no variables".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(AlgebraError::InvalidVariables("empty variable name".into()));
            }
            let mut chars = n.chars();
            let first = chars.next().unwrap();
            if !(first.is_alphabetic() || first == '_')
                || !n.chars().all(|c| c.is_alphanumeric() || c == '_')
            {
                return Err(AlgebraError::InvalidVariables(format!(
                    "`{n}` is not a valid identifier"
                )));
            }
            if names[..i].contains(n) {
                return Err(AlgebraError::InvalidVariables(format!(
                    "duplicate variable `{n}`"
                )));
            }
        }
        Ok(Self { names })
    }

    /// Number of variables, i.e. `n + 1` for the ring of projective n-space.
    pub fn n_plus_one(&self) -> usize {
        self.names.len()
    }

    /// Dimension of the ambient projective space.
    pub fn n(&self) -> usize {
        self.names.len() - 1
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// A monomial exponent tuple of fixed width.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExponentVector {
    exps: Vec<u32>,
}

impl ExponentVector {
    pub fn new(exps: Vec<u32>) -> Self {
        Self { exps }
    }

    pub fn zeros(width: usize) -> Self {
        Self {
            exps: vec![0; width],
        }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn width(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// Exponents with coordinate 0 removed (dehomogenization).
    pub fn drop_first(&self) -> Vec<i64> {
        self.exps[1..].iter().map(|&e| e as i64).collect()
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // Later variables are more significant, so `z^2` sorts before `y*w`
        // in x,y,z,w and printing matches the conventional written order.
        for (a, b) in self.exps.iter().rev().zip(other.exps.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse multivariate polynomial with complex coefficients.
///
/// Terms with coefficient exactly zero are never stored. The zero polynomial
/// has an empty term map and reports degree `-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsePolynomial {
    width: usize,
    terms: BTreeMap<ExponentVector, Complex64>,
}

impl SparsePolynomial {
    pub fn zero(width: usize) -> Self {
        Self {
            width,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(width: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (ExponentVector, Complex64)>,
    {
        let mut p = Self::zero(width);
        for (e, c) in terms {
            if e.width() != width {
                return Err(AlgebraError::WidthMismatch {
                    expected: width,
                    got: e.width(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Single-term constructor; convenient for monomials.
    pub fn monomial(width: usize, exps: Vec<u32>, coeff: Complex64) -> Result<Self, AlgebraError> {
        Self::from_terms(width, [(ExponentVector::new(exps), coeff)])
    }

    pub fn constant(width: usize, value: Complex64) -> Self {
        let mut p = Self::zero(width);
        p.add_term(ExponentVector::zeros(width), value);
        p
    }

    fn add_term(&mut self, e: ExponentVector, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in the canonical graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> {
        self.terms.iter()
    }

    /// Maximum total degree over the terms; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.total_degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    /// True when every term shares the same total degree (vacuously true for 0).
    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.total_degree());
        match degs.next() {
            None => true,
            Some(d0) => degs.all(|d| d == d0),
        }
    }

    /// Largest modulus among the coefficients' 1-norm; used to scale residuals.
    pub fn coeff_one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.width);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * s);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.width != other.width {
            return Err(AlgebraError::WidthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.width != other.width {
            return Err(AlgebraError::WidthMismatch {
                expected: self.width,
                got: other.width,
            });
        }
        let mut out = Self::zero(self.width);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea
                    .exps()
                    .iter()
                    .zip(eb.exps())
                    .map(|(a, b)| a + b)
                    .collect();
                out.add_term(ExponentVector::new(exps), ca * cb);
            }
        }
        Ok(out)
    }

    /// Partial derivative with respect to variable `j`.
    pub fn partial(&self, j: usize) -> Self {
        let mut out = Self::zero(self.width);
        for (e, c) in &self.terms {
            let ej = e.exps()[j];
            if ej == 0 {
                continue;
            }
            let mut exps = e.exps().to_vec();
            exps[j] -= 1;
            out.add_term(ExponentVector::new(exps), c * (ej as f64));
        }
        out
    }

    /// Term-by-term evaluation; linear in the number of terms.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, AlgebraError> {
        if point.len() != self.width {
            return Err(AlgebraError::LengthMismatch {
                expected: self.width,
                got: point.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for (x, &p) in point.iter().zip(e.exps()) {
                if p > 0 {
                    m *= x.powu(p);
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Render against a variable set; inverse of `parse_polynomial` for real
    /// coefficients (complex ones print in a non-grammar debug form).
    pub fn display<'a>(&'a self, vars: &'a VariableSet) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, vars }
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a SparsePolynomial,
    vars: &'a VariableSet,
}

fn fmt_real(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v.fract() == 0.0 && v.abs() < 9e15 {
        write!(f, "{}", v as i64)
    } else {
        write!(f, "{v}")
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.poly.terms().enumerate() {
            let negative = c.im == 0.0 && c.re < 0.0;
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = if negative { -c } else { *c };
            let monomial: Vec<String> = e
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(j, &p)| {
                    let name = &self.vars.names()[j];
                    if p == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            if monomial.is_empty() {
                if mag.im == 0.0 {
                    fmt_real(mag.re, f)?;
                } else {
                    write!(f, "({}{:+}i)", mag.re, mag.im)?;
                }
            } else {
                if mag.im != 0.0 {
                    write!(f, "({}{:+}i)*", mag.re, mag.im)?;
                } else if mag.re != 1.0 {
                    fmt_real(mag.re, f)?;
                    write!(f, "*")?;
                }
                write!(f, "{}", monomial.join("*"))?;
            }
        }
        Ok(())
    }
}

/// An ordered square-or-not list of polynomials over a shared variable set.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialSystem {
    polys: Vec<SparsePolynomial>,
    vars: VariableSet,
}

impl PolynomialSystem {
    pub fn new(polys: Vec<SparsePolynomial>, vars: VariableSet) -> Result<Self, AlgebraError> {
        for p in &polys {
            if p.width() != vars.n_plus_one() {
                return Err(AlgebraError::WidthMismatch {
                    expected: vars.n_plus_one(),
                    got: p.width(),
                });
            }
        }
        Ok(Self { polys, vars })
    }

    /// A square homogeneous system: n polynomials in n+1 variables.
    pub fn new_square(
        polys: Vec<SparsePolynomial>,
        vars: VariableSet,
    ) -> Result<Self, AlgebraError> {
        if polys.len() != vars.n() {
            return Err(AlgebraError::InvalidSystem(format!(
                "square system needs {} polynomials in {} variables, got {}",
                vars.n(),
                vars.n_plus_one(),
                polys.len()
            )));
        }
        if !polys.iter().all(|p| p.is_homogeneous()) {
            return Err(AlgebraError::InvalidSystem(
                "square system components must be homogeneous".into(),
            ));
        }
        Self::new(polys, vars)
    }

    /// Generic dense system of the given degrees; deterministic in the seed.
    pub fn random_dense(
        degrees: &[u32],
        vars: &VariableSet,
        seed: u64,
        real: bool,
    ) -> Result<Self, AlgebraError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let polys = degrees
            .iter()
            .map(|&d| random_form_with(d, vars, &mut rng, real))
            .collect();
        Self::new_square(polys, vars.clone())
    }

    pub fn polys(&self) -> &[SparsePolynomial] {
        &self.polys
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.polys.iter().map(|p| p.degree()).collect()
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Vec<Complex64>, AlgebraError> {
        self.polys.iter().map(|p| p.evaluate(point)).collect()
    }
}

/// Entry (i, j) is the partial of the i-th component by the j-th variable.
///
/// For homogeneous rows the Euler identity `sum_j x_j dF_i/dx_j = d_i F_i`
/// holds identically.
pub fn jacobian(sys: &PolynomialSystem) -> Vec<Vec<SparsePolynomial>> {
    sys.polys()
        .iter()
        .map(|p| (0..p.width()).map(|j| p.partial(j)).collect())
        .collect()
}

/// Dense homogeneous form of the given degree with all coefficients drawn
/// from the standard complex normal distribution (imaginary parts zeroed when
/// `real` is set). Deterministic for a fixed seed.
pub fn random_form(degree: u32, vars: &VariableSet, seed: u64, real: bool) -> SparsePolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_form_with(degree, vars, &mut rng, real)
}

pub(crate) fn random_form_with<R: Rng>(
    degree: u32,
    vars: &VariableSet,
    rng: &mut R,
    real: bool,
) -> SparsePolynomial {
    let width = vars.n_plus_one();
    let mut poly = SparsePolynomial::zero(width);
    let mut exps = vec![0u32; width];
    fill_monomials(&mut exps, 0, degree, &mut |e| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let c = if real {
            Complex64::new(re, 0.0)
        } else {
            Complex64::new(re, im)
        };
        poly.add_term(ExponentVector::new(e.to_vec()), c);
    });
    poly
}

/// Visit every exponent vector of the given total degree in a fixed order.
fn fill_monomials(exps: &mut [u32], pos: usize, remaining: u32, f: &mut impl FnMut(&[u32])) {
    if pos + 1 == exps.len() {
        exps[pos] = remaining;
        f(exps);
        exps[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        exps[pos] = e;
        fill_monomials(exps, pos + 1, remaining - e, f);
    }
    exps[pos] = 0;
}

/// A homogeneous ideal presented by explicit generators.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealSpec {
    generators: Vec<SparsePolynomial>,
    vars: VariableSet,
}

impl IdealSpec {
    pub fn new(generators: Vec<SparsePolynomial>, vars: VariableSet) -> Result<Self, AlgebraError> {
        if generators.is_empty() {
            return Err(AlgebraError::InvalidSystem(
                "an ideal needs at least one generator".into(),
            ));
        }
        for g in &generators {
            if g.width() != vars.n_plus_one() {
                return Err(AlgebraError::WidthMismatch {
                    expected: vars.n_plus_one(),
                    got: g.width(),
                });
            }
            if g.is_zero() {
                return Err(AlgebraError::InvalidSystem(
                    "ideal generators must be nonzero".into(),
                ));
            }
            if !g.is_homogeneous() {
                return Err(AlgebraError::InvalidSystem(
                    "ideal generators must be homogeneous".into(),
                ));
            }
        }
        Ok(Self { generators, vars })
    }

    /// Parse one generator expression per string.
    pub fn parse(texts: &[&str], vars: VariableSet) -> Result<Self, AlgebraError> {
        let gens = texts
            .iter()
            .map(|t| parse_polynomial(t, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(gens, vars)
    }

    pub fn generators(&self) -> &[SparsePolynomial] {
        &self.generators
    }

    pub fn vars(&self) -> &VariableSet {
        &self.vars
    }

    /// Generator degrees p_1..p_l.
    pub fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.degree() as u32).collect()
    }

    pub fn is_monomial(&self) -> bool {
        self.generators.iter().all(|g| g.num_terms() == 1)
    }

    /// Splits every generator into its scaled-monomial terms, preserving the
    /// generator order and the canonical term order within each generator.
    pub fn monomialize(&self) -> IdealSpec {
        let mut gens = Vec::new();
        for g in &self.generators {
            for (e, c) in g.terms() {
                let mut m = SparsePolynomial::zero(g.width());
                m.add_term(e.clone(), *c);
                gens.push(m);
            }
        }
        IdealSpec {
            generators: gens,
            vars: self.vars.clone(),
        }
    }
}
