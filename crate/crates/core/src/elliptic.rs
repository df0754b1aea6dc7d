//! Complete elliptic integral of the first kind and Jacobi `sn`/`cn`.
//!
//! Both are computed from the arithmetic-geometric mean of `1` and the
//! complementary modulus `k' = sqrt(1 - k^2)`. The functions take the modulus
//! `k`, not the parameter `m = k^2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const AGM_MAX_ITER: usize = 40;

/// Elliptic modulus `k` restricted to `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && (0.0..1.0).contains(&k) {
            Ok(Self(k))
        } else {
            Err(Error::ModulusDomain(k))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `sqrt(1 - k^2)`, evaluated without cancellation near `k = 1`.
    pub fn complement(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

impl TryFrom<f64> for EllipticModulus {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

/// Runs the AGM of `(1, k')` and records the `a_n` and `c_n` sequences.
fn agm_sequence(k: EllipticModulus) -> (Vec<f64>, Vec<f64>) {
    let mut a = 1.0_f64;
    let mut b = k.complement();
    let mut aa = vec![a];
    let mut cc = vec![k.value()];
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let c = 0.5 * (a - b);
        let a_next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a_next;
        aa.push(a);
        cc.push(c);
    }
    (aa, cc)
}

/// `K(k) = pi / (2 agm(1, k'))`.
pub fn complete_elliptic_k(k: EllipticModulus) -> f64 {
    quarter_period_dd(k).hi
}

/// Double-double number `hi + lo`, used where a single `f64` rounding of the
/// period would be amplified by argument reduction.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const FRAC_PI_2: Dd = Dd {
        hi: FRAC_PI_2,
        lo: 6.123_233_995_736_766e-17,
    };

    fn from(hi: f64) -> Self {
        Self { hi, lo: 0.0 }
    }

    fn quick_two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        Self {
            hi: s,
            lo: b - (s - a),
        }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self {
            hi: s,
            lo: (a - (s - bb)) + (b - bb),
        }
    }

    fn two_prod(a: f64, b: f64) -> Self {
        let p = a * b;
        Self {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        let t = Self::two_sum(self.lo, o.lo);
        let r = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(r.hi, r.lo + t.lo)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    fn mul(self, o: Self) -> Self {
        let p = Self::two_prod(self.hi, o.hi);
        Self::quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = Self::two_prod(self.hi, b);
        Self::quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    /// Exact for powers of two.
    fn scale(self, s: f64) -> Self {
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        Self::quick_two_sum(q1, q2).add(Self::from(q3))
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(0.0);
        }
        let x = self.hi.sqrt();
        let r = self.sub(Self::two_prod(x, x));
        Self::quick_two_sum(x, r.hi / (2.0 * x))
    }
}

/// `K(k)` to about 30 digits.
fn quarter_period_dd(k: EllipticModulus) -> Dd {
    let mut a = Dd::from(1.0);
    let mut b = Dd::from(1.0).sub(Dd::two_prod(k.0, k.0)).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if a.sub(b).hi.abs() <= 1e-31 * a.hi {
            break;
        }
        let next = a.add(b).scale(0.5);
        b = a.mul(b).sqrt();
        a = next;
    }
    Dd::FRAC_PI_2.div(a)
}

/// Evaluator for `sn(x; k)` and `cn(x; k)` at a fixed modulus.
///
/// The AGM sequence and the quarter period are computed once, so sampling a
/// field of many phases costs one descending-Landen back-substitution per
/// point.
#[derive(Debug, Clone)]
pub struct Jacobi {
    modulus: EllipticModulus,
    quarter_period: f64,
    quarter: Dd,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl Jacobi {
    pub fn new(modulus: EllipticModulus) -> Self {
        let (a, c) = agm_sequence(modulus);
        let quarter = quarter_period_dd(modulus);
        Self {
            modulus,
            quarter_period: quarter.hi,
            quarter,
            a,
            c,
        }
    }

    pub fn modulus(&self) -> EllipticModulus {
        self.modulus
    }

    /// `K(k)`.
    pub fn quarter_period(&self) -> f64 {
        self.quarter_period
    }

    /// `sn` and `cn` on the reduced interval `[0, K]`.
    fn sn_cn_reduced(&self, u: f64) -> (f64, f64) {
        let n = self.a.len() - 1;
        let mut phi = (1u64 << n) as f64 * self.a[n] * u;
        for j in (1..=n).rev() {
            let s = (self.c[j] / self.a[j] * phi.sin()).clamp(-1.0, 1.0);
            phi = 0.5 * (phi + s.asin());
        }
        (phi.sin(), phi.cos())
    }

    /// Returns `(sn(x; k), cn(x; k))`.
    ///
    /// The phase is reduced modulo the real period `4K` and folded onto
    /// `[0, K]` before the Landen recursion. The reduction carries the period
    /// in double-double precision, so the result stays accurate to a few ulps
    /// for phases of many thousands of periods.
    pub fn sn_cn(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        let mut sn_sign = x.signum();
        let mut cn_sign = 1.0;
        let (sn, cn) = if ax <= self.quarter_period {
            self.sn_cn_reduced(ax)
        } else {
            let quarter = self.quarter;
            let half = quarter.scale(2.0);
            let period = quarter.scale(4.0);
            let n = (ax / period.hi).floor();
            let mut r = Dd::from(ax).sub(period.mul_f64(n));
            if r.hi < 0.0 {
                r = r.add(period);
            } else if r.hi >= period.hi {
                r = r.sub(period);
            }
            if r.hi > half.hi {
                r = period.sub(r);
                sn_sign = -sn_sign;
            }
            if r.hi > quarter.hi {
                r = half.sub(r);
                cn_sign = -1.0;
            }
            self.sn_cn_reduced(r.hi.clamp(0.0, self.quarter_period))
        };
        (sn_sign * sn, cn_sign * cn)
    }

    pub fn cn(&self, x: f64) -> f64 {
        self.sn_cn(x).1
    }

    pub fn sn(&self, x: f64) -> f64 {
        self.sn_cn(x).0
    }
}

/// `cn(x; k)` for a single phase. Prefer [`Jacobi`] when sampling many points.
pub fn jacobi_cn(x: f64, k: EllipticModulus) -> f64 {
    Jacobi::new(k).cn(x)
}
