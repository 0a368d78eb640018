//! Closed-form excess counts for ideals generated by powers of variables.
//!
//! For an ideal `(x_1^{p_1}, ..., x_k^{p_k})` and a square system of degrees
//! `d_1..d_n`, the count of isolated solutions off the variety satisfies
//!
//! ```text
//! excess + p_1..p_k * sum_{delta=0}^{n-k} (-1)^delta e_{n-k-delta}(d) h_delta(p)
//!        = d_1 d_2 .. d_n
//! ```
//!
//! where `e_m` is the elementary and `h_delta` the complete homogeneous
//! symmetric function. All arithmetic is exact over arbitrary-precision
//! integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FormulaError {
    #[error("symmetric function degree {m} out of range 0..={n}")]
    DegreeOutOfRange { m: usize, n: usize },
    #[error("powers list must be nonempty with all entries >= 1")]
    InvalidPowers,
    #[error("degree list must be nonempty with all entries >= 1")]
    InvalidDegrees,
    #[error("got {k} powers for {n} system degrees; need k <= n")]
    TooManyPowers { k: usize, n: usize },
    #[error("degree condition violated: min(d) = {min_d} < max(p) = {max_p}")]
    DegreeCondition { min_d: u32, max_p: u32 },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

/// The exponents (p_1, ..., p_k) of an ideal generated by variable powers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowersIdealSpec {
    p: Vec<u32>,
}

impl PowersIdealSpec {
    pub fn new(p: Vec<u32>) -> Result<Self, FormulaError> {
        if p.is_empty() || p.contains(&0) {
            return Err(FormulaError::InvalidPowers);
        }
        Ok(Self { p })
    }

    pub fn powers(&self) -> &[u32] {
        &self.p
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn max(&self) -> u32 {
        *self.p.iter().max().unwrap()
    }
}

/// The degrees (d_1, ..., d_n) of a square system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeVector {
    d: Vec<u32>,
}

impl DegreeVector {
    pub fn new(d: Vec<u32>) -> Result<Self, FormulaError> {
        if d.is_empty() || d.contains(&0) {
            return Err(FormulaError::InvalidDegrees);
        }
        Ok(Self { d })
    }

    pub fn degrees(&self) -> &[u32] {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    pub fn min(&self) -> u32 {
        *self.d.iter().min().unwrap()
    }

    pub fn bezout(&self) -> BigInt {
        self.d.iter().fold(BigInt::one(), |acc, &v| acc * v)
    }
}

/// Which computation produced an excess count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    Formula,
    MixedVolume,
    Hup,
    Hit,
}

/// An excess count together with its complement against the Bezout bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcessResult {
    pub excess: BigInt,
    pub equivalence: BigInt,
    pub bezout: BigInt,
    pub method: MethodTag,
}

/// e_m(values): elementary symmetric function, exact.
pub fn elementary_symmetric(m: usize, values: &[i64]) -> Result<BigInt, FormulaError> {
    if m > values.len() {
        return Err(FormulaError::DegreeOutOfRange { m, n: values.len() });
    }
    // coefficients of prod (1 + v_i t) up to degree m
    let mut e = vec![BigInt::zero(); m + 1];
    e[0] = BigInt::one();
    for &v in values {
        for j in (1..=m).rev() {
            let add = &e[j - 1] * v;
            e[j] += add;
        }
    }
    Ok(e.pop().unwrap())
}

/// h_delta(values): complete homogeneous symmetric function, exact.
pub fn complete_homogeneous(delta: usize, values: &[i64]) -> Result<BigInt, FormulaError> {
    // series expansion of prod 1/(1 - v_i t) up to degree delta
    let mut h = vec![BigInt::zero(); delta + 1];
    h[0] = BigInt::one();
    for &v in values {
        for j in 1..=delta {
            let add = &h[j - 1] * v;
            h[j] += add;
        }
    }
    Ok(h.pop().unwrap())
}

fn check_pairing(p: &PowersIdealSpec, d: &DegreeVector) -> Result<(), FormulaError> {
    if p.k() > d.n() {
        return Err(FormulaError::TooManyPowers { k: p.k(), n: d.n() });
    }
    if d.min() < p.max() {
        return Err(FormulaError::DegreeCondition {
            min_d: d.min(),
            max_p: p.max(),
        });
    }
    Ok(())
}

/// The count consumed by the variety of the powers ideal:
/// `p_1..p_k * sum_{delta=0}^{n-k} (-1)^delta e_{n-k-delta}(d) h_delta(p)`.
pub fn correction_term(p: &PowersIdealSpec, d: &DegreeVector) -> Result<BigInt, FormulaError> {
    check_pairing(p, d)?;
    let k = p.k();
    let n = d.n();
    let dv: Vec<i64> = d.degrees().iter().map(|&v| v as i64).collect();
    let pv: Vec<i64> = p.powers().iter().map(|&v| v as i64).collect();
    let mut sum = BigInt::zero();
    for delta in 0..=(n - k) {
        let term = elementary_symmetric(n - k - delta, &dv)? * complete_homogeneous(delta, &pv)?;
        if delta % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let p_prod = pv.iter().fold(BigInt::one(), |acc, &v| acc * v);
    Ok(p_prod * sum)
}

/// Exact excess count for a powers ideal.
pub fn excess_powers(p: &PowersIdealSpec, d: &DegreeVector) -> Result<ExcessResult, FormulaError> {
    let equivalence = correction_term(p, d)?;
    let bezout = d.bezout();
    let excess = &bezout - &equivalence;
    if excess.is_negative() || equivalence.is_negative() {
        return Err(FormulaError::Invariant(format!(
            "negative count: excess = {excess}, equivalence = {equivalence}"
        )));
    }
    Ok(ExcessResult {
        excess,
        equivalence,
        bezout,
        method: MethodTag::Formula,
    })
}

/// Principal-ideal shortcut: `prod (d_i - p)`.
pub fn excess_principal(p: u32, d: &DegreeVector) -> Result<BigInt, FormulaError> {
    if p > d.min() {
        return Err(FormulaError::DegreeCondition {
            min_d: d.min(),
            max_p: p,
        });
    }
    Ok(d.degrees()
        .iter()
        .fold(BigInt::one(), |acc, &v| acc * (v as i64 - p as i64)))
}

/// Exact value of the integral of `(x_1 + .. + x_k)^delta` over the simplex
/// with vertices `0, L*p_1*e_1, ..., L*p_k*e_k`:
/// `L^{k+delta} p_1..p_k (delta! / (delta+k)!) h_delta(p)`.
///
/// For k = 1 this reduces to the elementary antiderivative `(L p)^{delta+1} / (delta+1)`.
pub fn simplex_integral_check(
    delta: usize,
    p: &[u32],
    lambda: &BigRational,
) -> Result<BigRational, FormulaError> {
    if p.is_empty() || p.contains(&0) {
        return Err(FormulaError::InvalidPowers);
    }
    let k = p.len();
    let pv: Vec<i64> = p.iter().map(|&v| v as i64).collect();
    let mut value = BigRational::from(complete_homogeneous(delta, &pv)?);
    for &pi in p {
        value *= BigRational::from(BigInt::from(pi));
    }
    // delta! / (delta + k)! = 1 / ((delta+1) .. (delta+k))
    for f in (delta + 1)..=(delta + k) {
        value /= BigRational::from(BigInt::from(f));
    }
    let mut pow = BigRational::one();
    for _ in 0..(k + delta) {
        pow *= lambda;
    }
    Ok(value * pow)
}
