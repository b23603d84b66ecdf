//! Mirror geometry of the quintic at the large complex structure point.
//!
//! Provides the Picard-Fuchs operator, the Frobenius basis of periods with
//! their log structure, the open-sector potential and its inhomogeneous
//! equation, the mirror map and its inverse, and the holomorphic limits of
//! the special-geometry generators that seed the amplitude ring.

use crate::series::{Series, Var};
use crate::{rat, ratio, Error, Rat, Result};
use num_traits::{One, Zero};

/// Euler characteristic of the quintic threefold.
pub const EULER_CHI: i64 = -200;
/// Number of branes in the open-sector background.
pub const BRANE_N: i64 = 1;

/// 5 theta s + k s.
fn five_theta_plus(s: &Series, k: i64) -> Series {
    s.theta().scale(&rat(5)).add(&s.scale(&rat(k))).expect("same var")
}

/// The Picard-Fuchs operator theta^4 - 5z (5theta+1)(5theta+2)(5theta+3)(5theta+4).
pub fn pf_apply(s: &Series) -> Series {
    let t4 = s.theta().theta().theta().theta();
    let mut p = s.clone();
    for k in [4, 3, 2, 1] {
        p = five_theta_plus(&p, k);
    }
    let zp = p.shift(2).scale(&rat(5));
    t4.sub(&zp).expect("same var")
}

/// Rational-coefficient polynomial in rho, truncated at rho^3.
#[derive(Clone, Debug)]
struct RhoPoly([Rat; 4]);

impl RhoPoly {
    fn one() -> Self {
        RhoPoly([Rat::one(), Rat::zero(), Rat::zero(), Rat::zero()])
    }

    /// Multiply by (a + b rho).
    fn mul_linear(&self, a: &Rat, b: &Rat) -> Self {
        let c = &self.0;
        RhoPoly([
            &c[0] * a,
            &c[1] * a + &c[0] * b,
            &c[2] * a + &c[1] * b,
            &c[3] * a + &c[2] * b,
        ])
    }

    /// Divide by (n + rho): multiply by (1/n)(1 - rho/n + rho^2/n^2 - rho^3/n^3).
    fn div_linear(&self, n: i64) -> Self {
        assert!(n != 0);
        let inv = Rat::new(1.into(), n.into());
        let mut acc = self.mul_scalar(&inv);
        // acc *= 1 - rho/n + rho^2/n^2 - rho^3/n^3
        let c = acc.0.clone();
        let i1 = -inv.clone();
        let i2 = &inv * &inv;
        let i3 = -&i2 * &inv;
        acc.0[1] = &c[1] + &c[0] * &i1;
        acc.0[2] = &c[2] + &c[1] * &i1 + &c[0] * &i2;
        acc.0[3] = &c[3] + &c[2] * &i1 + &c[1] * &i2 + &c[0] * &i3;
        acc
    }

    fn mul_scalar(&self, s: &Rat) -> Self {
        RhoPoly([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s, &self.0[3] * s])
    }
}

/// All geometric input series, tracked modulo z^order.
pub struct Geometry {
    pub order: usize,
    /// Frobenius periods omega_0..omega_3; omega_i carries (log z)^i.
    pub omega: [Series; 4],
    /// Open-sector potential (section of L^*), odd half-integer exponents.
    pub tcal: Series,
    /// t(z) - log z: the holomorphic part of the flat coordinate.
    pub t_minus_logz: Series,
    /// q(z) = exp t(z) as a series in z (leading term z).
    pub q_of_z: Series,
    /// Inverse mirror map z(q) (leading term q).
    pub z_of_q: Series,
}

/// Holomorphic limit taken for the generator R_2 (its antiholomorphic
/// building block makes the limit convention-dependent; the choice is fixed
/// empirically against known enumerative output).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R2Choice {
    /// R_2 -> z^{7/2} C 𝒯 / omega_0.
    Potential,
    /// R_2 -> 0.
    Zero,
}

/// Holomorphic limits of the ring generators, as z-series.
pub struct Generators {
    pub a1: Series,
    /// b[p-1] = theta^p(omega_0)/omega_0 for p = 1..3.
    pub b: [Series; 3],
    /// q[p] = z^{1/2} theta^p(tcal) for p = 0..3 (integer exponents).
    pub q: [Series; 4],
    pub r1: Series,
    pub r2: Series,
    pub omega0: Series,
    pub tcal: Series,
}

impl Geometry {
    pub fn new(order: usize) -> Result<Geometry> {
        assert!(order >= 4, "need at least a few orders to be useful");
        let trunc2 = 2 * order as i64;
        // Frobenius coefficients c_n(rho) = prod_{m=1}^{5n}(5 rho + m)
        //                                 / prod_{m=1}^{n}(rho + m)^5,
        // expanded through rho^3.
        let mut c = RhoPoly::one();
        let mut cs: Vec<RhoPoly> = vec![c.clone()];
        for n in 1..order as i64 {
            for m in (5 * n - 4)..=(5 * n) {
                c = c.mul_linear(&rat(m), &rat(5));
            }
            for _ in 0..5 {
                c = c.div_linear(n);
            }
            cs.push(c.clone());
        }
        // omega_i = sum_n z^n sum_{k<=i} (i!/k!) c_{n,i-k} (log z)^k
        let fact = [1i64, 1, 2, 6];
        let mut omega: Vec<Series> = Vec::new();
        for i in 0..4usize {
            let mut s = Series::zero(Var::Z, trunc2);
            for k in 0..=i {
                let coeffs: Vec<Rat> = cs
                    .iter()
                    .map(|cn| {
                        &cn.0[i - k] * ratio(fact[i], fact[k])
                    })
                    .collect();
                let comp = Series::from_coeffs(Var::Z, 0, coeffs, trunc2);
                let lk = Series::log_monomial(Var::Z, Rat::one(), 0, k, trunc2)?;
                s = s.add(&comp.mul(&lk)?)?;
            }
            omega.push(s);
        }
        let omega: [Series; 4] = omega.try_into().unwrap();

        // tau(z) = sum_n (7/2)_{5n} / ((3/2)_n)^5 z^{n+1/2};  tcal = 60 tau.
        let mut tau_coeffs = vec![Rat::one()];
        let mut cn = Rat::one();
        for n in 1..order as i64 {
            for m in 0..5 {
                cn *= ratio(7, 2) + rat(5 * (n - 1) + m);
            }
            let d = ratio(3, 2) + rat(n - 1);
            cn /= d.clone() * d.clone() * d.clone() * d.clone() * d;
            tau_coeffs.push(cn.clone());
        }
        let tcal = Series::from_coeffs(Var::Z, 1, tau_coeffs, trunc2 + 1).scale(&rat(60));

        // Mirror map: t - log z = omega_1^{(log-free part)} / omega_0.
        let holo1 = omega[1].log_component(0);
        let t_minus_logz = holo1.div(&omega[0])?;
        let q_of_z = Series::monomial(Var::Z, Rat::one(), 2, trunc2)
            .mul(&t_minus_logz.exp()?)?;
        let z_of_q = q_of_z.reversion()?;

        Ok(Geometry { order, omega, tcal, t_minus_logz, q_of_z, z_of_q })
    }

    pub fn trunc2(&self) -> i64 {
        2 * self.order as i64
    }

    /// Re-expand a z-series in the flat coordinate q.
    pub fn to_q(&self, s: &Series) -> Result<Series> {
        if s.var != Var::Z {
            return Err(Error::VarMismatch(s.var.name(), "z"));
        }
        s.substitute(&self.z_of_q)
    }

    /// The Yukawa coupling C(z) = 5 / ((1 - 3125 z) z^3) as a z-series.
    pub fn yukawa(&self) -> Result<Series> {
        crate::ratfun::RatFunc::new(crate::ratfun::Poly::constant(rat(5)), 3, 1)
            .to_series(self.trunc2() - 6)
    }

    /// Holomorphic limits of the propagator-ring generators.
    pub fn generators(&self, r2: R2Choice) -> Result<Generators> {
        let omega0 = &self.omega[0];
        let mut b = Vec::new();
        let mut th = omega0.clone();
        for _ in 0..3 {
            th = th.theta();
            b.push(th.div(omega0)?);
        }
        // A_1 = theta(theta t)/(theta t) - 1 with theta t = 1 + theta(t - log z).
        let g1 = Series::one(Var::Z, self.trunc2()).add(&self.t_minus_logz.theta())?;
        let a1 = g1.theta().div(&g1)?.sub(&Series::one(Var::Z, g1.trunc2()))?;
        let mut q = Vec::new();
        let mut tq = self.tcal.clone();
        for _ in 0..4 {
            q.push(tq.shift(1));
            tq = tq.theta();
        }
        let r1 = Series::zero(Var::Z, self.trunc2());
        let r2s = match r2 {
            R2Choice::Zero => Series::zero(Var::Z, self.trunc2()),
            R2Choice::Potential => {
                // z^{7/2} C tcal / omega_0 = 5 z^{1/2} tcal / ((1-3125z) omega_0)
                let disc = crate::ratfun::Poly::disc().to_series(self.trunc2());
                self.tcal
                    .shift(1)
                    .scale(&rat(5))
                    .div(&disc.mul(omega0)?)?
            }
        };
        Ok(Generators {
            a1,
            b: b.try_into().unwrap(),
            q: q.try_into().unwrap(),
            r1,
            r2: r2s,
            omega0: omega0.clone(),
            tcal: self.tcal.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geo() -> Geometry {
        Geometry::new(8).unwrap()
    }

    #[test]
    fn fundamental_period_head() {
        let g = geo();
        let w0 = &g.omega[0];
        assert_eq!(w0.coeff(0, 0).unwrap(), rat(1));
        assert_eq!(w0.coeff(2, 0).unwrap(), rat(120));
        assert_eq!(w0.coeff(4, 0).unwrap(), rat(113400));
        assert_eq!(w0.coeff(6, 0).unwrap(), rat(168168000));
        assert!(w0.is_log_free());
    }

    #[test]
    fn log_structure_of_periods() {
        let g = geo();
        // omega_i has top log grade i, and its (log z)^i part is omega_0.
        for i in 0..4 {
            assert_eq!(g.omega[i].max_log_grade(), i);
            let top = g.omega[i].log_component(i);
            let w0 = &g.omega[0];
            assert_eq!(top.coeff(0, 0).unwrap(), w0.coeff(0, 0).unwrap());
            assert_eq!(top.coeff(2, 0).unwrap(), w0.coeff(2, 0).unwrap());
        }
        // c_{1,1} = 770: the z^1 log-free coefficient of omega_1.
        assert_eq!(g.omega[1].log_component(0).coeff(2, 0).unwrap(), rat(770));
    }

    #[test]
    fn picard_fuchs_annihilates_periods() {
        let g = geo();
        for w in &g.omega {
            let r = pf_apply(w);
            assert!(r.is_zero(), "PF residue: {}", r);
        }
    }

    #[test]
    fn extended_equation_for_potential() {
        let g = geo();
        let r = pf_apply(&g.tcal);
        // D tcal = (60/16) sqrt(z)
        assert_eq!(r.coeff(1, 0).unwrap(), ratio(60, 16));
        let rest = r.sub(&Series::monomial(Var::Z, ratio(60, 16), 1, r.trunc2())).unwrap();
        assert!(rest.is_zero(), "residue: {}", rest);
    }

    #[test]
    fn mirror_map_heads() {
        let g = geo();
        let t = &g.t_minus_logz;
        assert_eq!(t.coeff(2, 0).unwrap(), rat(770));
        assert_eq!(t.coeff(4, 0).unwrap(), ratio(1435650, 2));
        assert_eq!(t.coeff(6, 0).unwrap(), ratio(3225308000, 3));
        let zq = &g.z_of_q;
        assert_eq!(zq.coeff(2, 0).unwrap(), rat(1));
        assert_eq!(zq.coeff(4, 0).unwrap(), rat(-770));
        assert_eq!(zq.coeff(6, 0).unwrap(), rat(171525));
    }

    #[test]
    fn mirror_roundtrip() {
        let g = geo();
        let comp = g.to_q(&g.q_of_z).unwrap();
        assert_eq!(comp.coeff(2, 0).unwrap(), rat(1));
        for e2 in (4..comp.trunc2()).step_by(2) {
            assert!(comp.coeff(e2, 0).unwrap().is_zero(), "residue at q^{}", e2 / 2);
        }
    }

    #[test]
    fn generator_heads() {
        let g = geo();
        let gens = g.generators(R2Choice::Zero).unwrap();
        // A_1(0) = -1
        assert_eq!(gens.a1.coeff(0, 0).unwrap(), rat(-1));
        // B_1 = 120 z + ...
        assert_eq!(gens.b[0].coeff(0, 0).unwrap(), rat(0));
        assert_eq!(gens.b[0].coeff(2, 0).unwrap(), rat(120));
        // Q_0 = z^{1/2} tcal = 60 z + ...
        assert_eq!(gens.q[0].coeff(2, 0).unwrap(), rat(60));
        assert_eq!(gens.q[0].val2(), 2);
        assert!(gens.r1.is_zero());
        let gens2 = g.generators(R2Choice::Potential).unwrap();
        // z^{7/2} C tcal / omega_0 = 5 z^{1/2} tcal / ((1-3125z) omega_0) = 300 z + ...
        assert_eq!(gens2.r2.coeff(2, 0).unwrap(), rat(300));
    }
}
