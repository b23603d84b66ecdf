//! Truncated Puiseux series with a log grading, over exact rationals.
//!
//! Exponents live on the half-integer grid (stored in half-units, so the
//! monomial x^{e2/2} is indexed by the integer `e2`).  Each series carries
//! up to four components, component `k` multiplying (log x)^k; grades
//! above 3 are rejected.  Truncation orders are exclusive upper bounds and
//! are propagated pessimistically through every operation: consumers that
//! need more terms than are tracked get a hard error, never a silently
//! short series.

use crate::{rat, Error, Rat, Result};
use num_traits::{One, Zero};

pub const MAX_LOG_GRADE: usize = 3;

/// Formal variable tag.  Series in different variables never mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Z,
    Q,
    Gs,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::Z => "z",
            Var::Q => "q",
            Var::Gs => "g_s",
        }
    }
}

/// A truncated series sum_{e2, k} c_{e2,k} x^{e2/2} (log x)^k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    pub var: Var,
    /// Exponent (in half-units) of the first tracked coefficient.
    off2: i64,
    /// Exclusive truncation bound, in half-units.
    trunc2: i64,
    /// comps[k][i] is the coefficient of x^{(off2+i)/2} (log x)^k.
    comps: Vec<Vec<Rat>>,
}

impl Series {
    pub fn zero(var: Var, trunc2: i64) -> Self {
        Series { var, off2: trunc2, trunc2, comps: vec![Vec::new()] }
    }

    pub fn constant(var: Var, c: Rat, trunc2: i64) -> Self {
        Self::monomial(var, c, 0, trunc2)
    }

    pub fn one(var: Var, trunc2: i64) -> Self {
        Self::constant(var, Rat::one(), trunc2)
    }

    /// c * x^{e2/2}.
    pub fn monomial(var: Var, c: Rat, e2: i64, trunc2: i64) -> Self {
        if e2 >= trunc2 || c.is_zero() {
            return Self::zero(var, trunc2);
        }
        let mut coeffs = vec![Rat::zero(); (trunc2 - e2) as usize];
        coeffs[0] = c;
        Series { var, off2: e2, trunc2, comps: vec![coeffs] }
    }

    /// c * x^{e2/2} (log x)^k.
    pub fn log_monomial(var: Var, c: Rat, e2: i64, k: usize, trunc2: i64) -> Result<Self> {
        if k > MAX_LOG_GRADE {
            return Err(Error::LogOverflow(k));
        }
        let mut s = Self::monomial(var, c, e2, trunc2);
        if k > 0 && !s.is_zero() {
            let coeffs = std::mem::take(&mut s.comps[0]);
            s.comps = vec![Vec::new(); k + 1];
            for c in s.comps[..k].iter_mut() {
                *c = vec![Rat::zero(); coeffs.len()];
            }
            s.comps[k] = coeffs;
        }
        Ok(s)
    }

    /// Build a log-free series with integer exponent spacing: coeffs[i]
    /// multiplies x^{(off2 + 2i)/2}.
    pub fn from_coeffs(var: Var, off2: i64, coeffs: Vec<Rat>, trunc2: i64) -> Self {
        assert!(
            off2 + 2 * (coeffs.len() as i64 - 1) < trunc2 || coeffs.is_empty(),
            "coefficients beyond truncation"
        );
        let mut padded = vec![Rat::zero(); (trunc2 - off2).max(0) as usize];
        for (i, c) in coeffs.into_iter().enumerate() {
            padded[2 * i] = c;
        }
        let mut s = Series { var, off2, trunc2, comps: vec![padded] };
        s.normalize();
        s
    }

    pub fn trunc2(&self) -> i64 {
        self.trunc2
    }

    /// Leading tracked exponent in half-units (trunc2 if identically zero).
    pub fn val2(&self) -> i64 {
        for i in 0..self.len() {
            if self.comps.iter().any(|c| !c[i].is_zero()) {
                return self.off2 + i as i64;
            }
        }
        self.trunc2
    }

    fn len(&self) -> usize {
        (self.trunc2 - self.off2) as usize
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|x| x.is_zero()))
    }

    pub fn max_log_grade(&self) -> usize {
        for k in (0..self.comps.len()).rev() {
            if self.comps[k].iter().any(|x| !x.is_zero()) {
                return k;
            }
        }
        0
    }

    pub fn is_log_free(&self) -> bool {
        self.max_log_grade() == 0
    }

    /// Coefficient of x^{e2/2} (log x)^k, zero-padded inside the tracked window.
    /// Asks for a coefficient at or beyond the truncation bound -> error.
    pub fn coeff(&self, e2: i64, k: usize) -> Result<Rat> {
        if e2 >= self.trunc2 {
            return Err(Error::InsufficientTruncation { need2: e2 + 1, have2: self.trunc2 });
        }
        if k >= self.comps.len() || e2 < self.off2 {
            return Ok(Rat::zero());
        }
        Ok(self.comps[k][(e2 - self.off2) as usize].clone())
    }

    /// Drop leading all-zero columns (tightens the offset, never the truncation).
    fn normalize(&mut self) {
        let lead = self.val2();
        if lead > self.off2 {
            let skip = (lead - self.off2) as usize;
            for c in &mut self.comps {
                c.drain(..skip);
            }
            self.off2 = lead;
        }
        while self.comps.len() > 1 && self.comps.last().unwrap().iter().all(|x| x.is_zero()) {
            self.comps.pop();
        }
    }

    fn check_var(&self, other: &Series) -> Result<()> {
        if self.var != other.var {
            return Err(Error::VarMismatch(self.var.name(), other.var.name()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_var(other)?;
        let trunc2 = self.trunc2.min(other.trunc2);
        let off2 = self.off2.min(other.off2).min(trunc2);
        let kmax = self.comps.len().max(other.comps.len());
        let mut comps = vec![vec![Rat::zero(); (trunc2 - off2) as usize]; kmax];
        for src in [self, other] {
            for (k, col) in src.comps.iter().enumerate() {
                for (i, c) in col.iter().enumerate() {
                    let e2 = src.off2 + i as i64;
                    if e2 < trunc2 && !c.is_zero() {
                        comps[k][(e2 - off2) as usize] += c;
                    }
                }
            }
        }
        let mut s = Series { var: self.var, off2, trunc2, comps };
        s.normalize();
        Ok(s)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series {
        self.map_coeffs(|c| -c.clone())
    }

    pub fn scale(&self, c: &Rat) -> Series {
        if c.is_zero() {
            return Series::zero(self.var, self.trunc2);
        }
        self.map_coeffs(|x| x * c)
    }

    fn map_coeffs(&self, f: impl Fn(&Rat) -> Rat) -> Series {
        let comps = self
            .comps
            .iter()
            .map(|col| col.iter().map(&f).collect())
            .collect();
        Series { var: self.var, off2: self.off2, trunc2: self.trunc2, comps }
    }

    /// Multiply by x^{de2/2}: shifts offset and truncation together.
    pub fn shift(&self, de2: i64) -> Series {
        let mut s = self.clone();
        s.off2 += de2;
        s.trunc2 += de2;
        s
    }

    /// Restrict the truncation bound (no-op if already tighter).
    pub fn truncate_to(&self, trunc2: i64) -> Series {
        if trunc2 >= self.trunc2 {
            return self.clone();
        }
        let off2 = self.off2.min(trunc2);
        let keep = (trunc2 - off2) as usize;
        let comps = self
            .comps
            .iter()
            .map(|col| col.iter().take(keep).cloned().collect())
            .collect();
        let mut s = Series { var: self.var, off2, trunc2, comps };
        s.normalize();
        s
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_var(other)?;
        if self.is_zero() || other.is_zero() {
            // 0 * b is exactly 0, but the tracked window still shrinks.
            let trunc2 = (self.trunc2 + other.val2()).min(other.trunc2 + self.val2());
            return Ok(Series::zero(self.var, trunc2));
        }
        let (a, b) = (self, other);
        let (oa, ob) = (a.val2(), b.val2());
        let trunc2 = (a.trunc2 + ob).min(b.trunc2 + oa);
        let off2 = oa + ob;
        let ka = a.max_log_grade();
        let kb = b.max_log_grade();
        if ka + kb > MAX_LOG_GRADE {
            // Products of two log-bearing series never arise in any stored
            // quantity; reject rather than track grades above the bound.
            return Err(Error::LogOverflow(ka + kb));
        }
        let n = (trunc2 - off2).max(0) as usize;
        let mut comps = vec![vec![Rat::zero(); n]; ka + kb + 1];
        for (k1, col1) in a.comps.iter().enumerate().take(ka + 1) {
            for (i, c1) in col1.iter().enumerate() {
                if c1.is_zero() {
                    continue;
                }
                let e1 = a.off2 + i as i64;
                for (k2, col2) in b.comps.iter().enumerate().take(kb + 1) {
                    for (j, c2) in col2.iter().enumerate() {
                        let e = e1 + b.off2 + j as i64;
                        if e >= trunc2 {
                            break;
                        }
                        if e < off2 || c2.is_zero() {
                            continue;
                        }
                        comps[k1 + k2][(e - off2) as usize] += c1 * c2;
                    }
                }
            }
        }
        let mut s = Series { var: self.var, off2, trunc2, comps };
        s.normalize();
        Ok(s)
    }

    /// Exact long division a/b.  The divisor must be log-free with a nonzero
    /// leading coefficient; the dividend may carry logs.
    pub fn div(&self, other: &Series) -> Result<Series> {
        self.check_var(other)?;
        if !other.is_log_free() {
            return Err(Error::DivByZeroSeries);
        }
        let ob = other.val2();
        if ob >= other.trunc2 {
            return Err(Error::DivByZeroSeries);
        }
        let b: Vec<Rat> = (0..(other.trunc2 - ob) as usize)
            .map(|i| other.comps[0][(ob - other.off2) as usize + i].clone())
            .collect();
        if self.is_zero() {
            return Ok(Series::zero(self.var, self.trunc2 - ob));
        }
        let oa = self.val2();
        let n = ((self.trunc2 - oa).min(other.trunc2 - ob)).max(0) as usize;
        let off2 = oa - ob;
        let mut comps = Vec::new();
        for col in &self.comps {
            let a: Vec<Rat> = (0..n)
                .map(|i| {
                    let idx = (oa - self.off2) as usize + i;
                    if idx < col.len() { col[idx].clone() } else { Rat::zero() }
                })
                .collect();
            let mut c = vec![Rat::zero(); n];
            for i in 0..n {
                let mut acc = a[i].clone();
                for j in 0..i {
                    if !c[j].is_zero() && !b[i - j].is_zero() {
                        acc -= &c[j] * &b[i - j];
                    }
                }
                c[i] = acc / &b[0];
            }
            comps.push(c);
        }
        let mut s = Series { var: self.var, off2, trunc2: off2 + n as i64, comps };
        s.normalize();
        Ok(s)
    }

    /// The logarithmic derivative x d/dx, acting termwise:
    /// x^{e}(log x)^k -> e x^{e}(log x)^k + k x^{e}(log x)^{k-1}.
    pub fn theta(&self) -> Series {
        let n = self.len();
        let kmax = self.comps.len();
        let mut comps = vec![vec![Rat::zero(); n]; kmax];
        for (k, col) in self.comps.iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = Rat::new((self.off2 + i as i64).into(), 2.into());
                comps[k][i] += c * e;
                if k > 0 {
                    comps[k - 1][i] += c * rat(k as i64);
                }
            }
        }
        let mut s = Series { var: self.var, off2: self.off2, trunc2: self.trunc2, comps };
        s.normalize();
        s
    }

    /// Integer power, negative exponents via reciprocal.
    pub fn powi(&self, e: i64) -> Result<Series> {
        let guess = self.trunc2 + self.val2().abs() * (e.abs() + 1);
        let mut acc = Series::one(self.var, guess);
        let base = if e < 0 {
            Series::one(self.var, self.trunc2 - self.val2() + self.val2().abs())
                .div(self)?
        } else {
            self.clone()
        };
        for _ in 0..e.abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// exp of a log-free series with positive valuation.
    pub fn exp(&self) -> Result<Series> {
        if !self.is_log_free() || self.val2() <= 0 {
            return Err(Error::BadComposition(" (exp needs positive valuation, log-free)"));
        }
        let mut result = Series::one(self.var, self.trunc2);
        let mut term = Series::one(self.var, self.trunc2);
        let mut k: i64 = 1;
        loop {
            term = term.mul(self)?.truncate_to(self.trunc2);
            term = term.scale(&Rat::new(1.into(), k.into()));
            if term.is_zero() && term.val2() >= term.trunc2() {
                break;
            }
            if k as i64 * self.val2() >= self.trunc2 {
                break;
            }
            result = result.add(&term)?;
            k += 1;
        }
        // exp is exactly known wherever the argument is: restore the bound
        // that the pessimistic products shrank.
        let mut r = result;
        r.trunc2 = r.trunc2.max(self.trunc2);
        let want = (r.trunc2 - r.off2) as usize;
        for col in &mut r.comps {
            col.resize(want, Rat::zero());
        }
        Ok(r)
    }

    /// Square root of a series with leading term x^{e} (e even in half-units)
    /// and leading coefficient 1.
    pub fn sqrt(&self) -> Result<Series> {
        let v = self.val2();
        if v % 2 != 0 {
            return Err(Error::OffGrid);
        }
        if !self.is_log_free() || self.coeff(v, 0)? != Rat::one() {
            return Err(Error::BadComposition(" with coefficient 1 for half-powers"));
        }
        let u = self.shift(-v); // constant term 1
        // Newton iteration x <- (x + u/x)/2.
        let mut x = Series::one(self.var, u.trunc2());
        let half = Rat::new(1.into(), 2.into());
        loop {
            let next = x.add(&u.div(&x)?)?.scale(&half).truncate_to(u.trunc2());
            if next == x {
                break;
            }
            x = next;
        }
        let mut r = x;
        r.trunc2 = r.trunc2.max(u.trunc2());
        let want = (r.trunc2 - r.off2) as usize;
        for col in &mut r.comps {
            col.resize(want, Rat::zero());
        }
        Ok(r.shift(v / 2))
    }

    /// Composition outer(inner).  The outer series must be log-free; the
    /// inner series must have leading exponent 1.  Half-integer exponents of
    /// the outer series use the principal square root of the inner series
    /// (leading coefficient 1 required); negative exponents use its
    /// reciprocal.
    pub fn substitute(&self, inner: &Series) -> Result<Series> {
        if !self.is_log_free() {
            return Err(Error::BadComposition(" and a log-free outer series"));
        }
        if inner.val2() != 2 {
            return Err(Error::BadComposition(""));
        }
        let out_trunc2 = self.trunc2;
        if self.is_zero() {
            return Ok(Series::zero(inner.var, out_trunc2.min(inner.trunc2())));
        }
        let oa = self.val2();
        let col = &self.comps[0];
        let need_half = col
            .iter()
            .enumerate()
            .any(|(i, c)| !c.is_zero() && (self.off2 + i as i64) % 2 != 0);
        // Base series B with B^{e2} = inner^{e2/2}.
        let (base, step) = if need_half {
            (inner.sqrt()?, 1i64)
        } else {
            (inner.clone(), 2i64)
        };
        let start = if need_half { oa } else { oa.div_euclid(2) * 2 };
        debug_assert!(start == oa || !need_half);
        let mut power = base.powi(if need_half { oa } else { oa / 2 })?;
        let mut acc: Option<Series> = None;
        let mut e2 = start;
        while e2 < self.trunc2 {
            let c = col.get((e2 - self.off2) as usize);
            if let Some(c) = c {
                if !c.is_zero() {
                    let term = power.scale(c);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term)?,
                    });
                }
            }
            e2 += step;
            if e2 < self.trunc2 {
                power = power.mul(&base)?;
            }
        }
        let mut s = acc.unwrap_or_else(|| Series::zero(inner.var, inner.trunc2()));
        // Unknown outer tail at x^{T_out/2} maps to q^{T_out/2}(1+...);
        // unknown inner tail enters first through the lowest outer term.
        let bound = out_trunc2.min(inner.trunc2() + oa - 2);
        s = s.truncate_to(bound);
        s.var = inner.var;
        Ok(s)
    }

    /// Compositional inverse of an integer-exponent series with leading term
    /// x (coefficient 1): returns the series w(q) with self(w(q)) = q.
    pub fn reversion(&self) -> Result<Series> {
        let ok = self.is_log_free()
            && self.val2() == 2
            && self.coeff(2, 0)? == Rat::one()
            && self
                .comps[0]
                .iter()
                .enumerate()
                .all(|(i, c)| c.is_zero() || (self.off2 + i as i64) % 2 == 0);
        if !ok {
            return Err(Error::BadReversionInput);
        }
        let trunc2 = self.trunc2;
        let mut outer = self.clone();
        outer.var = Var::Q; // relabel for the composition below
        let q = Series::monomial(Var::Q, Rat::one(), 2, trunc2);
        let mut inv = q.clone();
        loop {
            // self - id has valuation >= 2, so inv <- q - (self(inv) - inv)
            // gains at least one order per pass.
            let err = outer.substitute(&inv)?.sub(&inv)?;
            let next = q.sub(&err)?;
            let next = lift_trunc(next, trunc2);
            if next == inv {
                break;
            }
            inv = next;
        }
        let mut r = inv;
        r.var = self.reversion_var();
        Ok(r)
    }

    fn reversion_var(&self) -> Var {
        match self.var {
            Var::Z => Var::Q,
            Var::Q => Var::Z,
            Var::Gs => Var::Gs,
        }
    }

    /// The log-free series multiplying (log x)^k.
    pub fn log_component(&self, k: usize) -> Series {
        let col = self.comps.get(k).cloned().unwrap_or_default();
        let mut padded = col;
        padded.resize(self.len(), Rat::zero());
        let mut s = Series { var: self.var, off2: self.off2, trunc2: self.trunc2, comps: vec![padded] };
        s.normalize();
        s
    }

    /// All (e2, k, coefficient) triples with nonzero coefficient.
    pub fn terms(&self) -> Vec<(i64, usize, Rat)> {
        let mut out = Vec::new();
        for (k, col) in self.comps.iter().enumerate() {
            for (i, c) in col.iter().enumerate() {
                if !c.is_zero() {
                    out.push((self.off2 + i as i64, k, c.clone()));
                }
            }
        }
        out.sort();
        out
    }
}

/// Extend the tracked window of an exactly-known series (used only where the
/// algorithm guarantees the extra coefficients: fixed points of contractions).
fn lift_trunc(mut s: Series, trunc2: i64) -> Series {
    if s.trunc2 < trunc2 {
        let want = (trunc2 - s.off2) as usize;
        for col in &mut s.comps {
            col.resize(want, Rat::zero());
        }
        s.trunc2 = trunc2;
    }
    s
}

impl std::fmt::Display for Series {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            write!(f, "0")?;
        }
        for (n, (e2, k, c)) in terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c)?;
            if *e2 != 0 {
                if e2 % 2 == 0 {
                    write!(f, "*{}^{}", self.var.name(), e2 / 2)?;
                } else {
                    write!(f, "*{}^({}/2)", self.var.name(), e2)?;
                }
            }
            if *k > 0 {
                write!(f, "*log({})^{}", self.var.name(), k)?;
            }
        }
        write!(f, " + O({}^{}/2)", self.var.name(), self.trunc2)
    }
}
