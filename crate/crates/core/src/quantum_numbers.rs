//! Sector labels `(l, s, m_j, k)` of the circular problem.
//!
//! Half-odd-integers are stored through their doubled value so every relation
//! between the labels is checked in exact integer arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multiple of one half, stored as its numerator over 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn is_half_odd(self) -> bool {
        self.0 % 2 != 0
    }

    pub fn abs(self) -> Self {
        HalfInt(self.0.abs())
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Parses `"3/2"`, `"-1/2"`, or an integer such as `"2"`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        let bad = || Error::Config(format!("cannot read `{t}` as a multiple of 1/2"));
        match t.split_once('/') {
            Some((num, den)) => {
                if den.trim() != "2" {
                    return Err(bad());
                }
                num.trim().parse::<i64>().map(HalfInt).map_err(|_| bad())
            }
            None => t.parse::<i64>().map(|v| HalfInt(2 * v)).map_err(|_| bad()),
        }
    }
}

impl fmt::Display for HalfInt {
    /// Renders as `p/2` for half-odd values and as a plain integer otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half_odd() {
            write!(f, "{}/2", self.0)
        } else {
            write!(f, "{}", self.0 / 2)
        }
    }
}

/// Eigenvalue of `𝒮_z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.value() as f64
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

/// The quartet `(l, s, m_j, k)` of eigenvalues of `𝓛_z`, `𝒮_z`, `J_z` and `K`.
///
/// Only two labels are independent: `m_j = l + s/2` and `k = s·m_j = l·s + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    l: i64,
    s: Sign,
    mj: HalfInt,
    k: HalfInt,
}

impl QuantumNumbers {
    pub fn from_ls(l: i64, s: Sign) -> Self {
        let mj2 = 2 * l + s.value();
        QuantumNumbers { l, s, mj: HalfInt(mj2), k: HalfInt(s.value() * mj2) }
    }

    pub fn from_kmj(k: HalfInt, mj: HalfInt) -> Result<Self> {
        if !k.is_half_odd() {
            return Err(Error::NotHalfOdd(format!("k = {k}")));
        }
        if !mj.is_half_odd() {
            return Err(Error::NotHalfOdd(format!("m_j = {mj}")));
        }
        if k.abs() != mj.abs() {
            return Err(Error::InconsistentSector { k: k.abs(), mj: mj.abs() });
        }
        let s = if k == mj { Sign::Plus } else { Sign::Minus };
        // l = m_j - s/2, exact because m_j is half-odd.
        let l = (mj.twice() - s.value()) / 2;
        Ok(QuantumNumbers { l, s, mj, k })
    }

    pub fn l(&self) -> i64 {
        self.l
    }

    pub fn s(&self) -> Sign {
        self.s
    }

    pub fn mj(&self) -> HalfInt {
        self.mj
    }

    pub fn k(&self) -> HalfInt {
        self.k
    }

    /// Orbital label of the lower spinor component, `l + s`.
    pub fn lower_l(&self) -> i64 {
        self.l + self.s.value()
    }

    /// Checks both label relations in integer arithmetic.
    pub fn is_consistent(&self) -> bool {
        self.mj.twice() == 2 * self.l + self.s.value()
            && self.k.twice() == self.s.value() * self.mj.twice()
            && self.k.twice() == 2 * self.l * self.s.value() + 1
            && self.k.is_half_odd()
    }

    /// Centrifugal coefficient `k(k-1)` of the upper radial equation.
    pub fn upper_centrifugal(&self) -> f64 {
        let k = self.k.to_f64();
        k * (k - 1.0)
    }

    /// Centrifugal coefficient `k(k+1)` of the lower radial equation.
    pub fn lower_centrifugal(&self) -> f64 {
        let k = self.k.to_f64();
        k * (k + 1.0)
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, m_j={}, l={}, s={:+})", self.k, self.mj, self.l, self.s.value())
    }
}

/// All sectors with `|l| <= l_max`, sorted by `(2k, 2m_j)`.
pub fn enumerate_sectors(l_max: u32) -> Vec<QuantumNumbers> {
    let l_max = l_max as i64;
    let mut out: Vec<QuantumNumbers> = (-l_max..=l_max)
        .flat_map(|l| [Sign::Minus, Sign::Plus].into_iter().map(move |s| QuantumNumbers::from_ls(l, s)))
        .collect();
    out.sort_by_key(|q| (q.k.twice(), q.mj.twice()));
    out.dedup();
    out
}

/// Parses a `"k,mj"` label such as `"3/2,-3/2"`.
pub fn parse_sector(text: &str) -> Result<QuantumNumbers> {
    let (k, mj) = text
        .split_once(',')
        .ok_or_else(|| Error::Config(format!("sector `{text}` must read \"k,mj\"")))?;
    QuantumNumbers::from_kmj(HalfInt::parse(k)?, HalfInt::parse(mj)?)
}
