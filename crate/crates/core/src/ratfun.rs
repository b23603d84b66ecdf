//! Exact rational functions of the modulus z.
//!
//! Every denominator that appears in the special-geometry ring is a product
//! of powers of z and of the discriminant factor (1 - 3125 z), so rational
//! functions are stored as a numerator polynomial over that fixed
//! denominator shape.  Field elements additionally carry a sqrt(z)-odd part
//! to accommodate the half-integer weights of the open-sector generators.

use crate::series::{Series, Var};
use crate::{rat, Error, Rat, Result};
use num_traits::{One, Zero};

pub const DISC_SLOPE: i64 = 3125;

/// Dense polynomial in z with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<Rat>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() { Poly::zero() } else { Poly(vec![c]) }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    /// 1 - 3125 z.
    pub fn disc() -> Self {
        Poly(vec![rat(1), rat(-DISC_SLOPE)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.len() as i64 - 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.0.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    fn trim(mut self) -> Self {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect()).trim()
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly(out).trim()
    }

    /// Multiply by z^k.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); k];
        out.extend(self.0.iter().cloned());
        Poly(out)
    }

    /// z d/dz.
    pub fn theta(&self) -> Poly {
        Poly(self.0.iter().enumerate().map(|(i, c)| c * rat(i as i64)).collect()).trim()
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact division by z, if the constant term vanishes.
    fn div_z(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if self.coeff(0).is_zero() {
            Some(Poly(self.0[1..].to_vec()))
        } else {
            None
        }
    }

    /// Exact division by (1 - 3125 z), if it divides.
    fn div_disc(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        // Synthetic division from the top: self = q * (1 - 3125 z) + r, so
        // self[i] = q[i] - 3125 q[i-1], solved downward from the top degree.
        let n = self.0.len();
        if n < 2 {
            return None;
        }
        let mut q = vec![Rat::zero(); n - 1];
        q[n - 2] = &self.0[n - 1] / rat(-DISC_SLOPE);
        for i in (1..n - 1).rev() {
            q[i - 1] = (&q[i] - &self.0[i]) / rat(DISC_SLOPE);
        }
        if self.0[0] == q[0] {
            Some(Poly(q).trim())
        } else {
            None
        }
    }

    pub fn to_series(&self, trunc2: i64) -> Series {
        Series::from_coeffs(Var::Z, 0, self.0.clone(), trunc2)
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// num / (z^pow_z (1 - 3125 z)^pow_disc), kept with the denominator powers
/// minimal (the numerator shares no factor with the denominator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub pow_z: u32,
    pub pow_disc: u32,
}

impl RatFunc {
    pub fn new(num: Poly, pow_z: u32, pow_disc: u32) -> Self {
        RatFunc { num, pow_z, pow_disc }.reduce()
    }

    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), pow_z: 0, pow_disc: 0 }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), pow_z: 0, pow_disc: 0 }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc { num: Poly::constant(c), pow_z: 0, pow_disc: 0 }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, pow_z: 0, pow_disc: 0 }
    }

    /// The coordinate z.
    pub fn z() -> Self {
        RatFunc::from_poly(Poly(vec![rat(0), rat(1)]))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.pow_z = 0;
            self.pow_disc = 0;
            return self;
        }
        while self.pow_z > 0 {
            match self.num.div_z() {
                Some(q) => {
                    self.num = q;
                    self.pow_z -= 1;
                }
                None => break,
            }
        }
        while self.pow_disc > 0 {
            match self.num.div_disc() {
                Some(q) => {
                    self.num = q;
                    self.pow_disc -= 1;
                }
                None => break,
            }
        }
        self
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let pz = self.pow_z.max(other.pow_z);
        let pd = self.pow_disc.max(other.pow_disc);
        let lift = |r: &RatFunc| {
            r.num
                .shift((pz - r.pow_z) as usize)
                .mul(&Poly::disc().pow(pd - r.pow_disc))
        };
        RatFunc::new(lift(self).add(&lift(other)), pz, pd)
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), ..self.clone() }
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), ..self.clone() }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&other.num),
            self.pow_z + other.pow_z,
            self.pow_disc + other.pow_disc,
        )
    }

    /// If the numerator is c z^k (1 - 3125 z)^m, return (c, k, m).
    pub fn monomial_class(&self) -> Option<(Rat, u32, u32)> {
        let mut p = self.num.clone();
        if p.is_zero() {
            return None;
        }
        let mut k = 0u32;
        while let Some(q) = p.div_z() {
            if q.is_zero() {
                break;
            }
            p = q;
            k += 1;
        }
        let mut m = 0u32;
        while p.degree() > 0 {
            match p.div_disc() {
                Some(q) => {
                    p = q;
                    m += 1;
                }
                None => return None,
            }
        }
        Some((p.coeff(0), k, m))
    }

    /// Exact division; the divisor must be of monomial class.
    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        let (c, k, m) = other.monomial_class().ok_or(Error::NonUnitField)?;
        // self / (c z^{k-a'} (1-3125z)^{m-b'}) with the divisor's denominator
        // powers moving to the numerator.
        let num = self
            .num
            .mul(&Poly::disc().pow(other.pow_disc))
            .shift(other.pow_z as usize)
            .scale(&(Rat::one() / c));
        Ok(RatFunc::new(num, self.pow_z + k, self.pow_disc + m))
    }

    /// z d/dz by the quotient rule; the denominator shape is preserved with
    /// the discriminant power rising by at most one.
    pub fn theta(&self) -> RatFunc {
        if self.is_zero() {
            return RatFunc::zero();
        }
        let a = rat(self.pow_z as i64);
        let b = rat(self.pow_disc as i64);
        // theta(den)/den = a - 3125 b z / (1 - 3125 z)
        let t1 = self.num.theta().mul(&Poly::disc());
        let t2 = self
            .num
            .mul(&Poly::disc())
            .scale(&a)
            .add(&self.num.mul(&Poly(vec![rat(0), rat(-DISC_SLOPE)])).scale(&b));
        RatFunc::new(t1.sub(&t2), self.pow_z, self.pow_disc + 1)
    }

    pub fn to_series(&self, trunc2: i64) -> Result<Series> {
        let num2 = trunc2 + 2 * self.pow_z as i64;
        let n = self.num.to_series(num2.max(0));
        let mut s = n.shift(-2 * (self.pow_z as i64));
        if self.pow_disc > 0 {
            let d = Poly::disc()
                .pow(self.pow_disc)
                .to_series(trunc2 - s.val2().min(0) + 2 * self.pow_z as i64);
            s = s.div(&d)?;
        }
        Ok(s.truncate_to(trunc2))
    }

    /// Canonical text form `pow_z;pow_disc;c0,c1,...`.
    pub fn serialize(&self) -> String {
        format!("{};{};{}", self.pow_z, self.pow_disc, self.num)
    }

    pub fn parse(s: &str) -> Result<RatFunc> {
        let mut it = s.splitn(3, ';');
        let bad = || Error::Parse(format!("bad rational function `{s}`"));
        let pz: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let pd: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let body = it.next().ok_or_else(bad)?;
        let num = if body == "0" {
            Poly::zero()
        } else {
            Poly(
                body.split(',')
                    .map(|t| t.parse::<Rat>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?,
            )
            .trim()
        };
        Ok(RatFunc::new(num, pz, pd))
    }
}

/// even(z) + sqrt(z) * odd(z).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    pub even: RatFunc,
    pub odd: RatFunc,
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement { even: RatFunc::zero(), odd: RatFunc::zero() }
    }

    pub fn one() -> Self {
        FieldElement { even: RatFunc::one(), odd: RatFunc::zero() }
    }

    pub fn constant(c: Rat) -> Self {
        FieldElement { even: RatFunc::constant(c), odd: RatFunc::zero() }
    }

    pub fn from_even(r: RatFunc) -> Self {
        FieldElement { even: r, odd: RatFunc::zero() }
    }

    pub fn from_odd(r: RatFunc) -> Self {
        FieldElement { even: RatFunc::zero(), odd: r }
    }

    pub fn z() -> Self {
        FieldElement::from_even(RatFunc::z())
    }

    pub fn sqrt_z() -> Self {
        FieldElement::from_odd(RatFunc::one())
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        FieldElement { even: self.even.add(&other.even), odd: self.odd.add(&other.odd) }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        FieldElement { even: self.even.sub(&other.even), odd: self.odd.sub(&other.odd) }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement { even: self.even.neg(), odd: self.odd.neg() }
    }

    pub fn scale(&self, c: &Rat) -> FieldElement {
        FieldElement { even: self.even.scale(c), odd: self.odd.scale(c) }
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        let z = RatFunc::z();
        FieldElement {
            even: self
                .even
                .mul(&other.even)
                .add(&self.odd.mul(&other.odd).mul(&z)),
            odd: self.even.mul(&other.odd).add(&self.odd.mul(&other.even)),
        }
    }

    /// z d/dz, with theta(sqrt(z) f) = sqrt(z)(f/2 + theta f).
    pub fn theta(&self) -> FieldElement {
        FieldElement {
            even: self.even.theta(),
            odd: self.odd.theta().add(&self.odd.scale(&Rat::new(1.into(), 2.into()))),
        }
    }

    /// Exact division.  The divisor must be purely even or purely odd with a
    /// monomial-class numerator; that covers every division the ring needs.
    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        match (other.even.is_zero(), other.odd.is_zero()) {
            (false, true) => Ok(FieldElement {
                even: self.even.div(&other.even)?,
                odd: self.odd.div(&other.even)?,
            }),
            (true, false) => {
                // (a + sqrt(z) b) / (sqrt(z) m) = b/m + sqrt(z) a/(z m)
                let zm = other.odd.mul(&RatFunc::z());
                Ok(FieldElement {
                    even: self.odd.div(&other.odd)?,
                    odd: self.even.div(&zm)?,
                })
            }
            _ => Err(Error::NonUnitField),
        }
    }

    pub fn to_series(&self, trunc2: i64) -> Result<Series> {
        let e = self.even.to_series(trunc2)?;
        let o = self.odd.to_series(trunc2 - 1)?.shift(1);
        e.add(&o)
    }

    /// Canonical text form `even|odd` of the two rational-function parts.
    pub fn serialize(&self) -> String {
        format!("{}|{}", self.even.serialize(), self.odd.serialize())
    }

    pub fn parse(s: &str) -> Result<FieldElement> {
        let (e, o) = s
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("bad field element `{s}`")))?;
        Ok(FieldElement { even: RatFunc::parse(e)?, odd: RatFunc::parse(o)? })
    }
}
