//! Polynomials in `q` with exponents in `(1/2)Z`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::half::Half;

/// A finite sum `sum c_e q^e` kept in canonical form (no zero coefficients).
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct QPoly {
    terms: BTreeMap<i64, i64>,
}

impl QPoly {
    pub fn zero() -> QPoly {
        QPoly::default()
    }

    pub fn one() -> QPoly {
        QPoly::monomial(Half::ZERO, 1)
    }

    /// `coeff * q^exp`.
    pub fn monomial(exp: Half, coeff: i64) -> QPoly {
        let mut p = QPoly::zero();
        p.add_term(exp, coeff);
        p
    }

    pub fn q_pow(exp: Half) -> QPoly {
        QPoly::monomial(exp, 1)
    }

    pub fn add_term(&mut self, exp: Half, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let c = self.terms.entry(exp.doubled()).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&exp.doubled());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: Half) -> i64 {
        self.terms.get(&exp.doubled()).copied().unwrap_or(0)
    }

    /// Terms as `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (Half, i64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (Half(e), c))
    }

    pub fn min_exp(&self) -> Option<Half> {
        self.terms.keys().next().map(|&e| Half(e))
    }

    pub fn max_exp(&self) -> Option<Half> {
        self.terms.keys().next_back().map(|&e| Half(e))
    }

    /// Value at `q = 1`.
    pub fn eval_one(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Substitute `q -> q^{-1}`.
    pub fn invert_q(&self) -> QPoly {
        QPoly { terms: self.terms.iter().map(|(&e, &c)| (-e, c)).collect() }
    }

    /// Substitute `q -> q^t`.
    pub fn scale_exponents(&self, t: i64) -> QPoly {
        assert!(t > 0);
        QPoly { terms: self.terms.iter().map(|(&e, &c)| (e * t, c)).collect() }
    }

    /// Multiply by `q^shift`.
    pub fn shift(&self, shift: Half) -> QPoly {
        QPoly { terms: self.terms.iter().map(|(&e, &c)| (e + shift.doubled(), c)).collect() }
    }

    /// True when every coefficient is nonnegative.
    pub fn is_nonneg(&self) -> bool {
        self.terms.values().all(|&c| c > 0)
    }

    /// Coefficients read the same from both ends.
    pub fn is_palindromic(&self) -> bool {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else { return true };
        self.terms.iter().all(|(&e, &c)| self.coeff(Half(lo.doubled() + hi.doubled() - e)) == c)
    }

    /// `[(doubled_exp, coeff)]`, ascending.
    pub fn to_pairs(&self) -> Vec<(i64, i64)> {
        self.terms.iter().map(|(&e, &c)| (e, c)).collect()
    }

    pub fn from_pairs<I: IntoIterator<Item = (i64, i64)>>(pairs: I) -> QPoly {
        let mut p = QPoly::zero();
        for (e, c) in pairs {
            p.add_term(Half(e), c);
        }
        p
    }
}

/// Gaussian binomial `[p+m choose m]` in the variable `q^t`.
pub fn qbinom(p: i64, m: i64, t: i64) -> QPoly {
    assert!(p >= 0 && m >= 0 && t > 0, "qbinom({p},{m},{t}) out of range");
    // Pascal recursion [n,k] = [n-1,k-1] + q^k [n-1,k], carried out in q and rescaled at the end.
    let n = (p + m) as usize;
    let k = m.min(p) as usize;
    let mut row: Vec<QPoly> = vec![QPoly::one()];
    for nn in 1..=n {
        let mut next = Vec::with_capacity(nn.min(k) + 1);
        for kk in 0..=nn.min(k) {
            let mut v = QPoly::zero();
            if kk >= 1 {
                v += &row[kk - 1];
            }
            if kk < row.len() && kk < nn {
                v += &row[kk].shift(Half::int(kk as i64));
            }
            next.push(v);
        }
        row = next;
    }
    row[k].scale_exponents(t)
}

impl AddAssign<&QPoly> for QPoly {
    fn add_assign(&mut self, rhs: &QPoly) {
        for (&e, &c) in &rhs.terms {
            self.add_term(Half(e), c);
        }
    }
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(mut self, rhs: QPoly) -> QPoly {
        self += &rhs;
        self
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly { terms: self.terms.iter().map(|(&e, &c)| (e, -c)).collect() }
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        self + &(-rhs)
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        let mut out = QPoly::zero();
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &rhs.terms {
                out.add_term(Half(e1 + e2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for QPoly {
    type Output = QPoly;
    fn mul(self, rhs: QPoly) -> QPoly {
        &self * &rhs
    }
}

impl std::iter::Sum for QPoly {
    fn sum<I: Iterator<Item = QPoly>>(iter: I) -> QPoly {
        iter.fold(QPoly::zero(), |acc, p| acc + p)
    }
}

fn fmt_power(f: &mut fmt::Formatter<'_>, e: Half) -> fmt::Result {
    if e == Half::ONE {
        write!(f, "q")
    } else if e.is_integer() && e >= Half::ZERO {
        write!(f, "q^{e}")
    } else {
        write!(f, "q^({e})")
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            }
            if e == Half::ZERO {
                write!(f, "{mag}")?;
            } else {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                fmt_power(f, e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for QPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<QPoly, D::Error> {
        Ok(QPoly::from_pairs(Vec::<(i64, i64)>::deserialize(d)?))
    }
}
