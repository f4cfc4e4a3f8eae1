//! Prime-by-prime verification over `Q`.
//!
//! A family of monic squarefree polynomials has a `Q_p`-root at a prime `p`
//! not dividing any discriminant exactly when some member has a root mod
//! `p`: such roots are simple and lift by Hensel's lemma, and monicity
//! keeps every `Q_p`-root integral. Counting these primes over a range
//! estimates the density predicted by the group-theoretic side.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

/// Primes up to this bound are handled by scanning every residue.
pub const RESIDUE_SCAN_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("polynomial must have degree at least 1")]
    Constant,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial {0} is not squarefree (zero discriminant)")]
    NotSquarefree(IntPoly),
    #[error("a family needs at least one member")]
    EmptyFamily,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} divides a discriminant of the family; exclude it")]
    BadPrime(u64),
    #[error("invalid prime range [{0}, {1}]")]
    BadRange(u64, u64),
}

/// Integer polynomial, coefficients from the constant term up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntPoly(Vec<i64>);

impl IntPoly {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.0.last() == Some(&1)
    }

    fn derivative(&self) -> Vec<BigInt> {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| BigInt::from(c) * BigInt::from(i))
            .collect()
    }

    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        let mut acc: u128 = 0;
        for &c in self.0.iter().rev() {
            acc = (acc * x as u128 + c.rem_euclid(p as i64) as u128) % p as u128;
        }
        acc as u64
    }

    fn reduce_mod(&self, p: u64) -> Vec<u64> {
        self.0
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect()
    }
}

impl std::fmt::Display for IntPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate().rev() {
            if c == 0 && self.0.len() > 1 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.unsigned_abs();
            match (i, a) {
                (0, _) => write!(f, "{a}")?,
                (1, 1) => write!(f, "X")?,
                (1, _) => write!(f, "{a}X")?,
                (_, 1) => write!(f, "X^{i}")?,
                _ => write!(f, "{a}X^{i}")?,
            }
        }
        Ok(())
    }
}

/// Fraction-free (Bareiss) determinant over the integers.
fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut sign = 1i32;
    let mut prev = BigInt::from(1);
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Resultant of two polynomials (constant term first) via the Sylvester matrix.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let m = f.len() - 1;
    let n = g.len() - 1;
    let size = m + n;
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (k, c) in f.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in g.iter().rev().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    bareiss_det(rows)
}

/// Discriminant of a monic polynomial: `(-1)^{n(n-1)/2} Res(f, f')`.
pub fn discriminant(f: &IntPoly) -> Result<BigInt, OracleError> {
    if f.degree() == 0 {
        return Err(OracleError::Constant);
    }
    if !f.is_monic() {
        return Err(OracleError::NotMonic);
    }
    let n = f.degree();
    if n == 1 {
        return Ok(BigInt::from(1));
    }
    let fb: Vec<BigInt> = f.0.iter().map(|&c| BigInt::from(c)).collect();
    let r = resultant(&fb, &f.derivative());
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}

/// A nonempty list of monic squarefree integer polynomials.
#[derive(Clone, Debug)]
pub struct PolynomialFamily {
    members: Vec<IntPoly>,
    discriminants: Vec<BigInt>,
}

impl PolynomialFamily {
    pub fn new(members: Vec<IntPoly>) -> Result<Self, OracleError> {
        if members.is_empty() {
            return Err(OracleError::EmptyFamily);
        }
        let discriminants = members
            .iter()
            .map(|f| {
                let d = discriminant(f)?;
                if d.is_zero() {
                    Err(OracleError::NotSquarefree(f.clone()))
                } else {
                    Ok(d)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolynomialFamily {
            members,
            discriminants,
        })
    }

    pub fn members(&self) -> &[IntPoly] {
        &self.members
    }

    pub fn discriminants(&self) -> &[BigInt] {
        &self.discriminants
    }

    pub fn is_bad(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.discriminants.iter().any(|d| (d % &p).is_zero())
    }

    /// Primes dividing some discriminant, by trial division.
    pub fn bad_primes(&self) -> Vec<u64> {
        let mut out = vec![];
        for d in &self.discriminants {
            let mut n = d.abs();
            let mut q = BigInt::from(2u32);
            while &q * &q <= n {
                if (&n % &q).is_zero() {
                    out.push(q.to_u64().expect("small factor"));
                    while (&n % &q).is_zero() {
                        n /= &q;
                    }
                }
                q += 1;
            }
            if n > BigInt::from(1) {
                out.push(n.to_u64().expect("discriminant prime factor fits in u64"));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Sieve of Eratosthenes: the primes in `[lower, upper]`.
pub fn primes_in(lower: u64, upper: u64) -> Vec<u64> {
    if upper < 2 || lower > upper {
        return vec![];
    }
    let n = upper as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (lower.max(2) as usize..=n)
        .filter(|&k| !composite[k])
        .map(|k| k as u64)
        .collect()
}

pub fn has_root_mod_p_scan(f: &IntPoly, p: u64) -> bool {
    (0..p).any(|x| f.eval_mod(x, p) == 0)
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `a * b mod (f, p)` for a monic modulus `f` of degree `n >= 1`.
fn polymulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    let n = f.len() - 1;
    let mut prod = vec![0u64; (a.len() + b.len()).max(1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mulmod(x, y, p)) % p;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for (i, &fi) in f.iter().enumerate().take(n) {
            let idx = k - n + i;
            prod[idx] = (prod[idx] + p - mulmod(c, fi, p)) % p;
        }
        prod[k] = 0;
    }
    prod.truncate(n);
    trim(&mut prod);
    prod
}

fn polygcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let inv = powmod(*b.last().unwrap(), p - 2, p);
        while a.len() >= b.len() {
            let c = mulmod(*a.last().unwrap(), inv, p);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - mulmod(c, bi, p)) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Root test through `deg gcd(X^p - X, f mod p) >= 1`.
pub fn has_root_mod_p_gcd(f: &IntPoly, p: u64) -> bool {
    let fm = f.reduce_mod(p);
    if fm.len() < 2 {
        return false;
    }
    if fm.len() == 2 {
        return true;
    }
    // X^p mod f by repeated squaring
    let mut result = vec![1u64];
    let mut base = polymulmod(&[0, 1], &[1], &fm, p);
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = polymulmod(&result, &base, &fm, p);
        }
        base = polymulmod(&base, &base, &fm, p);
        e >>= 1;
    }
    // X^p - X
    if result.len() < 2 {
        result.resize(2, 0);
    }
    result[1] = (result[1] + p - 1) % p;
    trim(&mut result);
    if result.is_empty() {
        // f divides X^p - X: all roots are in F_p
        return true;
    }
    polygcd(fm, result, p).len() >= 2
}

/// Does some member have a root mod `p`?
pub fn has_root_mod_p(fam: &PolynomialFamily, p: u64) -> bool {
    fam.members.iter().any(|f| {
        if p <= RESIDUE_SCAN_LIMIT {
            has_root_mod_p_scan(f, p)
        } else {
            has_root_mod_p_gcd(f, p)
        }
    })
}

/// `Q_p`-root existence at a good prime.
pub fn has_qp_root(fam: &PolynomialFamily, p: u64) -> Result<bool, OracleError> {
    if !is_prime(p) {
        return Err(OracleError::NotPrime(p));
    }
    if fam.is_bad(p) {
        return Err(OracleError::BadPrime(p));
    }
    Ok(has_root_mod_p(fam, p))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub lower: u64,
    pub upper: u64,
    pub good_primes: u64,
    pub successes: u64,
    #[serde(with = "rational::serde_str")]
    pub ratio: Rational,
    /// Advisory only; `ratio` is exact.
    pub ratio_decimal: String,
    pub excluded: Vec<u64>,
}

impl DensityEstimate {
    fn from_counts(lower: u64, upper: u64, good: u64, successes: u64, excluded: Vec<u64>) -> Self {
        let ratio = if good == 0 {
            Rational::zero()
        } else {
            Rational::new(BigInt::from(successes), BigInt::from(good))
        };
        DensityEstimate {
            lower,
            upper,
            good_primes: good,
            successes,
            ratio_decimal: format!("{:.6}", rational::to_f64(&ratio)),
            ratio,
            excluded,
        }
    }

    /// Combines estimates over adjacent ranges `[a, b]` and `[b + 1, c]`.
    pub fn merge(&self, other: &DensityEstimate) -> DensityEstimate {
        let mut excluded = self.excluded.clone();
        excluded.extend(&other.excluded);
        excluded.sort_unstable();
        excluded.dedup();
        Self::from_counts(
            self.lower.min(other.lower),
            self.upper.max(other.upper),
            self.good_primes + other.good_primes,
            self.successes + other.successes,
            excluded,
        )
    }

    pub fn ratio_f64(&self) -> f64 {
        rational::to_f64(&self.ratio)
    }
}

fn count_range(fam: &PolynomialFamily, lower: u64, upper: u64) -> DensityEstimate {
    let mut good = 0;
    let mut successes = 0;
    let mut excluded = vec![];
    for p in primes_in(lower, upper) {
        if fam.is_bad(p) {
            excluded.push(p);
            continue;
        }
        good += 1;
        if has_root_mod_p(fam, p) {
            successes += 1;
        }
    }
    DensityEstimate::from_counts(lower, upper, good, successes, excluded)
}

pub fn empirical_density(
    fam: &PolynomialFamily,
    lower: u64,
    upper: u64,
) -> Result<DensityEstimate, OracleError> {
    empirical_density_parallel(fam, lower, upper, 1)
}

/// Splits `[lower, upper]` into `workers` consecutive ranges counted on
/// separate threads; the merged counts equal the single-thread result.
pub fn empirical_density_parallel(
    fam: &PolynomialFamily,
    lower: u64,
    upper: u64,
    workers: usize,
) -> Result<DensityEstimate, OracleError> {
    if lower < 2 || lower > upper {
        return Err(OracleError::BadRange(lower, upper));
    }
    let workers = workers.max(1) as u64;
    let span = upper - lower + 1;
    let step = span.div_ceil(workers);
    let ranges: Vec<(u64, u64)> = (0..workers)
        .map(|k| (lower + k * step, (lower + (k + 1) * step - 1).min(upper)))
        .filter(|(a, b)| a <= b)
        .collect();
    let parts: Vec<DensityEstimate> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(a, b)| scope.spawn(move || count_range(fam, a, b)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        out = out.merge(p);
    }
    out.lower = lower;
    out.upper = upper;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub estimate: DensityEstimate,
    #[serde(with = "rational::serde_str")]
    pub predicted: Rational,
    #[serde(with = "rational::serde_str")]
    pub deviation: Rational,
    pub deviation_decimal: String,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare_with_prediction(
    fam: &PolynomialFamily,
    predicted: &Rational,
    lower: u64,
    upper: u64,
    tolerance: f64,
) -> Result<ComparisonReport, OracleError> {
    let estimate = empirical_density(fam, lower, upper)?;
    let deviation = rational::abs_diff(&estimate.ratio, predicted);
    let tol = Rational::from_float(tolerance).unwrap_or_else(Rational::zero);
    let pass = tolerance > 0.0 && deviation <= tol;
    Ok(ComparisonReport {
        deviation_decimal: format!("{:.6}", rational::to_f64(&deviation)),
        estimate,
        predicted: predicted.clone(),
        deviation,
        tolerance,
        pass,
    })
}
