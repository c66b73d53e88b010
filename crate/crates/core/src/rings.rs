//! Coefficient rings: Laurent polynomials in v = q^{1/2}, their localization
//! at cyclotomic factors, and the nilpotent deformation rings R_l, R̃_l.

use crate::lattice::{fmt_q, q, Q};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// A Laurent polynomial Σ c_e v^e with rational coefficients, stored densely
/// from the lowest exponent.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentV {
    low: i32,
    c: Vec<Q>,
}

impl LaurentV {
    pub fn zero() -> Self {
        LaurentV { low: 0, c: Vec::new() }
    }
    pub fn one() -> Self {
        Self::constant(Q::one())
    }
    pub fn constant(x: Q) -> Self {
        Self::monomial(0, x)
    }
    pub fn monomial(e: i32, x: Q) -> Self {
        if x.is_zero() {
            Self::zero()
        } else {
            LaurentV { low: e, c: vec![x] }
        }
    }
    /// v^e.
    pub fn v(e: i32) -> Self {
        Self::monomial(e, Q::one())
    }
    pub fn from_terms<I: IntoIterator<Item = (i32, Q)>>(it: I) -> Self {
        let mut m: BTreeMap<i32, Q> = BTreeMap::new();
        for (e, x) in it {
            *m.entry(e).or_insert_with(Q::zero) += x;
        }
        Self::from_map(&m)
    }
    fn from_map(m: &BTreeMap<i32, Q>) -> Self {
        let nz: Vec<(&i32, &Q)> = m.iter().filter(|(_, x)| !x.is_zero()).collect();
        if nz.is_empty() {
            return Self::zero();
        }
        let low = *nz[0].0;
        let high = *nz[nz.len() - 1].0;
        let mut c = vec![Q::zero(); (high - low + 1) as usize];
        for (e, x) in nz {
            c[(e - low) as usize] = x.clone();
        }
        LaurentV { low, c }
    }
    fn normalize(mut self) -> Self {
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        let lead = self.c.iter().take_while(|x| x.is_zero()).count();
        if lead == self.c.len() {
            return Self::zero();
        }
        if lead > 0 {
            self.c.drain(..lead);
            self.low += lead as i32;
        }
        self
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.low == 0 && self.c.len() == 1 && self.c[0].is_one()
    }
    /// The constant value, when this is a constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_zero() {
            Some(Q::zero())
        } else if self.low == 0 && self.c.len() == 1 {
            Some(self.c[0].clone())
        } else {
            None
        }
    }
    pub fn low(&self) -> i32 {
        self.low
    }
    pub fn high(&self) -> i32 {
        self.low + self.c.len() as i32 - 1
    }
    pub fn coeff(&self, e: i32) -> Q {
        if e < self.low || e > self.high() {
            Q::zero()
        } else {
            self.c[(e - self.low) as usize].clone()
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Q)> {
        self.c.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(i, x)| (self.low + i as i32, x))
    }
    pub fn add(&self, o: &LaurentV) -> LaurentV {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![Q::zero(); (high - low + 1) as usize];
        for (i, x) in self.c.iter().enumerate() {
            c[(self.low - low) as usize + i] += x;
        }
        for (i, x) in o.c.iter().enumerate() {
            c[(o.low - low) as usize + i] += x;
        }
        LaurentV { low, c }.normalize()
    }
    pub fn neg(&self) -> LaurentV {
        LaurentV { low: self.low, c: self.c.iter().map(|x| -x).collect() }
    }
    pub fn sub(&self, o: &LaurentV) -> LaurentV {
        self.add(&o.neg())
    }
    pub fn scale(&self, x: &Q) -> LaurentV {
        if x.is_zero() {
            return Self::zero();
        }
        LaurentV { low: self.low, c: self.c.iter().map(|y| y * x).collect() }
    }
    pub fn shift(&self, e: i32) -> LaurentV {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentV { low: self.low + e, c: self.c.clone() }
    }
    pub fn mul(&self, o: &LaurentV) -> LaurentV {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if let Some(x) = o.as_constant() {
            return self.scale(&x);
        }
        if let Some(x) = self.as_constant() {
            return o.scale(&x);
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        LaurentV { low: self.low + o.low, c }.normalize()
    }
    pub fn pow(&self, k: u32) -> LaurentV {
        let mut r = Self::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }
    /// Substitute v ↦ v^{-1}.
    pub fn bar(&self) -> LaurentV {
        LaurentV::from_terms(self.terms().map(|(e, x)| (-e, x.clone())))
    }
    /// Exact division by a monic integer polynomial with nonzero constant
    /// term (ascending coefficients). None if it does not divide.
    fn div_exact_poly(&self, p: &[i64]) -> Option<LaurentV> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dp = p.len() - 1;
        if self.c.len() <= dp {
            return None;
        }
        let mut rem = self.c.clone();
        let qlen = rem.len() - dp;
        let mut quo = vec![Q::zero(); qlen];
        for k in (0..qlen).rev() {
            let lead = rem[k + dp].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, &pc) in p.iter().enumerate() {
                if pc != 0 {
                    rem[k + i] -= &lead * q(pc);
                }
            }
            quo[k] = lead;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(LaurentV { low: self.low, c: quo }.normalize())
    }
    /// (v^n − v^{−n})/(v − v^{−1}).
    pub fn quantum_integer(n: i64) -> LaurentV {
        if n == 0 {
            return Self::zero();
        }
        let s = if n < 0 { -Q::one() } else { Q::one() };
        let a = n.unsigned_abs() as i32;
        LaurentV::from_terms((0..a).map(|k| (a - 1 - 2 * k, s.clone())))
    }
    /// v^n − v^{−n}.
    pub fn v_difference(n: i64) -> LaurentV {
        LaurentV::from_terms([(n as i32, Q::one()), (-(n as i32), -Q::one())])
    }
}

impl fmt::Debug for LaurentV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(e, x)| if e == 0 { fmt_q(x) } else { format!("{}*v^{}", fmt_q(x), e) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Coefficients of Φ_d(v), ascending.
pub fn cyclotomic(d: u32) -> Vec<i64> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Vec<i64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&d) {
        return p.clone();
    }
    // v^d − 1 divided by Φ_e for proper divisors e of d.
    let mut num = vec![0i64; d as usize + 1];
    num[0] = -1;
    num[d as usize] = 1;
    for e in 1..d {
        if d.is_multiple_of(e) {
            let p = cyclotomic(e);
            num = poly_div_int(&num, &p);
        }
    }
    cache.lock().unwrap().insert(d, num.clone());
    num
}

fn poly_div_int(a: &[i64], p: &[i64]) -> Vec<i64> {
    let dp = p.len() - 1;
    let mut rem = a.to_vec();
    let qlen = rem.len() - dp;
    let mut quo = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let lead = rem[k + dp];
        for (i, &pc) in p.iter().enumerate() {
            rem[k + i] -= lead * pc;
        }
        quo[k] = lead;
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quo
}

fn cyclotomic_lv(d: u32) -> LaurentV {
    LaurentV::from_terms(cyclotomic(d).into_iter().enumerate().map(|(i, c)| (i as i32, q(c))))
}

/// An element of ℚ(v) whose denominator is a product of cyclotomic
/// polynomials, kept in lowest terms. This covers every coefficient the
/// library produces, e.g. 1/(j(v^j − v^{−j})).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RatV {
    num: LaurentV,
    den: BTreeMap<u32, u32>,
}

impl fmt::Debug for RatV {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            write!(f, "{:?}", self.num)
        } else {
            write!(f, "({:?})/{:?}", self.num, self.den)
        }
    }
}

impl From<LaurentV> for RatV {
    fn from(num: LaurentV) -> Self {
        RatV { num, den: BTreeMap::new() }
    }
}

impl RatV {
    pub fn zero() -> Self {
        RatV::default()
    }
    pub fn one() -> Self {
        LaurentV::one().into()
    }
    pub fn constant(x: Q) -> Self {
        LaurentV::constant(x).into()
    }
    pub fn num(&self) -> &LaurentV {
        &self.num
    }
    /// Cyclotomic exponents of the denominator.
    pub fn den_factors(&self) -> &BTreeMap<u32, u32> {
        &self.den
    }
    pub fn den_poly(&self) -> LaurentV {
        factors_poly(&self.den)
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num.is_one()
    }
    pub fn as_laurent(&self) -> Option<&LaurentV> {
        if self.den.is_empty() {
            Some(&self.num)
        } else {
            None
        }
    }
    pub fn as_constant(&self) -> Option<Q> {
        self.as_laurent().and_then(|l| l.as_constant())
    }
    fn reduce(mut self) -> Self {
        if self.num.is_zero() {
            self.den.clear();
            return self;
        }
        let ds: Vec<u32> = self.den.keys().copied().collect();
        for d in ds {
            let p = cyclotomic(d);
            while self.den[&d] > 0 {
                match self.num.div_exact_poly(&p) {
                    Some(qt) => {
                        self.num = qt;
                        *self.den.get_mut(&d).unwrap() -= 1;
                    }
                    None => break,
                }
            }
            if self.den[&d] == 0 {
                self.den.remove(&d);
            }
        }
        self
    }
    /// num / Π Φ_d^{e_d}.
    pub fn from_parts(num: LaurentV, den: BTreeMap<u32, u32>) -> Self {
        RatV { num, den: den.into_iter().filter(|(_, e)| *e > 0).collect() }.reduce()
    }
    /// num / den for a denominator that factors into a monomial times
    /// cyclotomic polynomials; None otherwise.
    pub fn from_fraction(num: &LaurentV, den: &LaurentV) -> Option<Self> {
        let (shift, scale, factors) = factor_cyclotomic(den)?;
        Some(RatV::from_parts(num.shift(-shift).scale(&(Q::one() / scale)), factors))
    }
    /// 1/(v^n − v^{−n}) for n ≠ 0.
    pub fn inv_v_difference(n: i64) -> Self {
        let d = LaurentV::v_difference(n);
        Self::from_fraction(&LaurentV::one(), &d).expect("cyclotomic")
    }
    pub fn add(&self, o: &RatV) -> RatV {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatV { num: self.num.add(&o.num), den: self.den.clone() }.reduce();
        }
        let mut l = self.den.clone();
        for (d, e) in &o.den {
            let x = l.entry(*d).or_insert(0);
            *x = (*x).max(*e);
        }
        let fa = factors_poly(&diff_factors(&l, &self.den));
        let fb = factors_poly(&diff_factors(&l, &o.den));
        RatV { num: self.num.mul(&fa).add(&o.num.mul(&fb)), den: l }.reduce()
    }
    pub fn neg(&self) -> RatV {
        RatV { num: self.num.neg(), den: self.den.clone() }
    }
    pub fn sub(&self, o: &RatV) -> RatV {
        self.add(&o.neg())
    }
    pub fn mul(&self, o: &RatV) -> RatV {
        if self.is_zero() || o.is_zero() {
            return RatV::zero();
        }
        if self.den.is_empty() && o.den.is_empty() {
            return RatV { num: self.num.mul(&o.num), den: BTreeMap::new() };
        }
        let mut den = self.den.clone();
        for (d, e) in &o.den {
            *den.entry(*d).or_insert(0) += e;
        }
        RatV { num: self.num.mul(&o.num), den }.reduce()
    }
    pub fn scale(&self, x: &Q) -> RatV {
        if x.is_zero() {
            return RatV::zero();
        }
        RatV { num: self.num.scale(x), den: self.den.clone() }
    }
    pub fn mul_laurent(&self, l: &LaurentV) -> RatV {
        self.mul(&RatV::from(l.clone()))
    }
    /// Inverse when the numerator is itself a unit times cyclotomic factors.
    pub fn try_inv(&self) -> Option<RatV> {
        if self.is_zero() {
            return None;
        }
        let (shift, scale, factors) = factor_cyclotomic(&self.num)?;
        let num = factors_poly(&self.den).shift(-shift).scale(&(Q::one() / scale));
        Some(RatV::from_parts(num, factors))
    }
    /// Substitute v ↦ v^{-1}.
    pub fn bar(&self) -> RatV {
        let nb = self.num.bar();
        let db = factors_poly(&self.den).bar();
        RatV::from_fraction(&nb, &db).expect("bar of cyclotomic denominator")
    }
}

fn diff_factors(a: &BTreeMap<u32, u32>, b: &BTreeMap<u32, u32>) -> BTreeMap<u32, u32> {
    a.iter().map(|(d, e)| (*d, e - b.get(d).copied().unwrap_or(0))).filter(|(_, e)| *e > 0).collect()
}

fn factors_poly(f: &BTreeMap<u32, u32>) -> LaurentV {
    let mut r = LaurentV::one();
    for (d, e) in f {
        r = r.mul(&cyclotomic_lv(*d).pow(*e));
    }
    r
}

/// Write p = c·v^s·Π Φ_d^{e_d}; None if some other factor remains.
fn factor_cyclotomic(p: &LaurentV) -> Option<(i32, Q, BTreeMap<u32, u32>)> {
    if p.is_zero() {
        return None;
    }
    let shift = p.low();
    let mut rest = p.shift(-shift);
    let mut out = BTreeMap::new();
    let mut d = 1u32;
    while rest.high() > 0 {
        // φ(d) ≥ √(d/2), so divisors beyond this bound cannot occur.
        if (d as i64) > 2 * (rest.high() as i64).pow(2) + 2 {
            return None;
        }
        let cp = cyclotomic(d);
        if cp.len() - 1 <= rest.high() as usize {
            while let Some(qt) = rest.div_exact_poly(&cp) {
                *out.entry(d).or_insert(0) += 1;
                rest = qt;
                if rest.high() == 0 {
                    break;
                }
            }
        }
        d += 1;
    }
    let c = rest.as_constant()?;
    Some((shift, c, out))
}

/// A formal variable of the deformation rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// t_i
    T(u32),
    /// u_{ij}
    U(u32, u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T(i) => write!(f, "t{i}"),
            Var::U(i, j) => write!(f, "u{i}_{j}"),
        }
    }
}

impl Var {
    pub fn parse(s: &str) -> Option<Var> {
        if let Some(r) = s.strip_prefix('t') {
            return r.parse().ok().map(Var::T);
        }
        let r = s.strip_prefix('u')?;
        let (a, b) = r.split_once('_')?;
        Some(Var::U(a.parse().ok()?, b.parse().ok()?))
    }
}

/// Exponent vector in the t and u variables, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NilMono(pub Vec<(Var, u32)>);

impl NilMono {
    pub fn one() -> Self {
        NilMono(Vec::new())
    }
    pub fn var(v: Var) -> Self {
        NilMono(vec![(v, 1)])
    }
    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }
    pub fn degree_in(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }
    /// Product, or None when a nilpotency relation kills it.
    pub fn mul(&self, o: &NilMono, ring: &Ring) -> Option<NilMono> {
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            let next = if j >= o.0.len() || (i < self.0.len() && self.0[i].0 < o.0[j].0) {
                i += 1;
                self.0[i - 1]
            } else if i >= self.0.len() || o.0[j].0 < self.0[i].0 {
                j += 1;
                o.0[j - 1]
            } else {
                i += 1;
                j += 1;
                (self.0[i - 1].0, self.0[i - 1].1 + o.0[j - 1].1)
            };
            if !ring.allows(next.0, next.1) {
                return None;
            }
            out.push(next);
        }
        Some(NilMono(out))
    }
    /// Sorted list of variable names with repetition.
    pub fn names(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (x, e) in &self.0 {
            for _ in 0..*e {
                v.push(x.to_string());
            }
        }
        v
    }
}

/// The nilpotency data of a coefficient ring: t_i^{l+1} = 0 when `t_cap`
/// is `Some(l)`, and u_{ij}^2 = 0 always.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Ring {
    pub t_cap: Option<u32>,
}

impl Ring {
    pub fn free() -> Self {
        Ring { t_cap: None }
    }
    pub fn truncated(l: u32) -> Self {
        Ring { t_cap: Some(l) }
    }
    pub fn allows(&self, v: Var, e: u32) -> bool {
        match v {
            Var::T(_) => self.t_cap.is_none_or(|l| e <= l),
            Var::U(..) => e <= 1,
        }
    }
}

/// Σ_μ c_μ(v)·μ over nilpotent monomials μ.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Coefficient(pub BTreeMap<NilMono, RatV>);

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| if m.is_one() { format!("{c:?}") } else { format!("{c:?}*{}", m.names().join("*")) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient(BTreeMap::new())
    }
    pub fn one() -> Self {
        Self::scalar(RatV::one())
    }
    pub fn scalar(x: RatV) -> Self {
        Self::term(NilMono::one(), x)
    }
    pub fn rational(x: Q) -> Self {
        Self::scalar(RatV::constant(x))
    }
    pub fn int(n: i64) -> Self {
        Self::rational(q(n))
    }
    pub fn laurent(l: LaurentV) -> Self {
        Self::scalar(l.into())
    }
    pub fn var(v: Var) -> Self {
        Self::term(NilMono::var(v), RatV::one())
    }
    pub fn term(m: NilMono, x: RatV) -> Self {
        let mut c = BTreeMap::new();
        if !x.is_zero() {
            c.insert(m, x);
        }
        Coefficient(c)
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    pub fn add_assign(&mut self, o: &Coefficient) {
        for (m, x) in &o.0 {
            match self.0.get_mut(m) {
                Some(y) => {
                    *y = y.add(x);
                    if y.is_zero() {
                        self.0.remove(m);
                    }
                }
                None => {
                    self.0.insert(m.clone(), x.clone());
                }
            }
        }
    }
    pub fn add(&self, o: &Coefficient) -> Coefficient {
        let mut r = self.clone();
        r.add_assign(o);
        r
    }
    pub fn neg(&self) -> Coefficient {
        Coefficient(self.0.iter().map(|(m, x)| (m.clone(), x.neg())).collect())
    }
    pub fn sub(&self, o: &Coefficient) -> Coefficient {
        self.add(&o.neg())
    }
    pub fn scale(&self, x: &Q) -> Coefficient {
        if x.is_zero() {
            return Coefficient::zero();
        }
        Coefficient(self.0.iter().map(|(m, y)| (m.clone(), y.scale(x))).collect())
    }
    pub fn scale_int(&self, k: i64) -> Coefficient {
        self.scale(&q(k))
    }
    pub fn scale_ratv(&self, x: &RatV) -> Coefficient {
        if x.is_zero() {
            return Coefficient::zero();
        }
        let mut out = BTreeMap::new();
        for (m, y) in &self.0 {
            let p = y.mul(x);
            if !p.is_zero() {
                out.insert(m.clone(), p);
            }
        }
        Coefficient(out)
    }
    pub fn mul(&self, o: &Coefficient, ring: &Ring) -> Coefficient {
        let mut r = Coefficient::zero();
        for (ma, xa) in &self.0 {
            for (mb, xb) in &o.0 {
                if let Some(m) = ma.mul(mb, ring) {
                    r.add_assign(&Coefficient::term(m, xa.mul(xb)));
                }
            }
        }
        r
    }
    /// The scalar part when only the empty monomial occurs.
    pub fn as_scalar(&self) -> Option<RatV> {
        match self.0.len() {
            0 => Some(RatV::zero()),
            1 => self.0.get(&NilMono::one()).cloned(),
            _ => None,
        }
    }
    /// If self = x·o for a scalar x ∈ ℚ(v), return x.
    pub fn ratio(&self, o: &Coefficient) -> Option<RatV> {
        if o.is_zero() {
            return if self.is_zero() { Some(RatV::zero()) } else { None };
        }
        let (m0, x0) = o.0.iter().next().unwrap();
        let s = self.0.get(m0).cloned().unwrap_or_default();
        let inv = x0.try_inv()?;
        let r = s.mul(&inv);
        if o.scale_ratv(&r) == *self {
            Some(r)
        } else {
            None
        }
    }
    pub fn bar(&self) -> Coefficient {
        Coefficient(self.0.iter().map(|(m, x)| (m.clone(), x.bar())).collect())
    }
}

/// t_i ↦ Σ_{j=1}^l u_{ij}, expanded with u_{ij}^2 = 0.
pub fn perturbation_substitute(c: &Coefficient, l: u32) -> Coefficient {
    let ring = Ring::free();
    let mut out = Coefficient::zero();
    for (m, x) in &c.0 {
        let mut acc = Coefficient::scalar(x.clone());
        for (v, e) in &m.0 {
            let i = match v {
                Var::T(i) => *i,
                Var::U(..) => panic!("perturbation_substitute expects t-variables only"),
            };
            let mut sum = Coefficient::zero();
            for j in 1..=l {
                sum.add_assign(&Coefficient::var(Var::U(i, j)));
            }
            for _ in 0..*e {
                acc = acc.mul(&sum, &ring);
            }
        }
        out.add_assign(&acc);
    }
    out
}

/// Exact rational n! as an integer.
pub fn factorial(n: u32) -> Q {
    (1..=n as i64).fold(Q::one(), |a, k| a * q(k))
}

/// Bernoulli numbers B_0..B_n with B_1 = −1/2.
pub fn bernoulli(n: usize) -> Vec<Q> {
    let mut b = vec![Q::zero(); n + 1];
    b[0] = Q::one();
    for m in 1..=n {
        let mut s = Q::zero();
        for k in 0..m {
            s += binom(m as u32 + 1, k as u32) * &b[k];
        }
        b[m] = -s / q(m as i64 + 1);
    }
    b
}

pub fn binom(n: u32, k: u32) -> Q {
    if k > n {
        return Q::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Sign of the leading coefficient, used for canonical normalizations.
pub fn leading_sign(c: &Coefficient) -> i32 {
    match c.0.values().next() {
        None => 0,
        Some(x) => {
            let t = x.num().terms().next().map(|(_, y)| y.clone()).unwrap_or_else(Q::zero);
            if t.is_negative() {
                -1
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::qf;

    #[test]
    fn quantum_integers() {
        assert_eq!(LaurentV::quantum_integer(1), LaurentV::one());
        assert_eq!(LaurentV::quantum_integer(0), LaurentV::zero());
        assert_eq!(LaurentV::quantum_integer(2), LaurentV::from_terms([(1, q(1)), (-1, q(1))]));
        assert_eq!(LaurentV::quantum_integer(3), LaurentV::from_terms([(2, q(1)), (0, q(1)), (-2, q(1))]));
        for n in -6..=6 {
            let a = LaurentV::quantum_integer(n);
            assert_eq!(a, LaurentV::quantum_integer(-n).neg());
            assert_eq!(a, a.bar());
            // Oracle: [n](v − v^{-1}) = v^n − v^{-n}.
            assert_eq!(a.mul(&LaurentV::v_difference(1)), LaurentV::v_difference(n));
        }
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(2), vec![1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn rational_functions() {
        let a = RatV::inv_v_difference(1);
        let b = RatV::inv_v_difference(2);
        // 1/(v−v^{-1}) − (v+v^{-1})/(v²−v^{-2}) = 0.
        let c = b.mul_laurent(&LaurentV::quantum_integer(2));
        assert!(a.sub(&c).is_zero());
        let x = a.add(&b);
        let back = x.sub(&b);
        assert_eq!(back, a);
        assert_eq!(a.mul(&a.try_inv().unwrap()), RatV::one());
        assert_eq!(a.bar(), a.neg());
        let poly = LaurentV::from_terms([(2, q(1)), (0, q(3))]);
        assert!(RatV::from_fraction(&LaurentV::one(), &poly).is_none());
    }

    #[test]
    fn ring_examples() {
        let r = Ring::free();
        let v = Coefficient::laurent(LaurentV::v(1));
        let vi = Coefficient::laurent(LaurentV::v(-1));
        assert_eq!(v.mul(&vi, &r), Coefficient::one());
        let u = Coefficient::var(Var::U(1, 1));
        assert!(u.mul(&u, &r).is_zero());
        let t = Coefficient::var(Var::T(1));
        let r1 = Ring::truncated(1);
        let a = Coefficient::one().add(&t);
        let b = Coefficient::one().sub(&t);
        assert_eq!(a.mul(&b, &r1), Coefficient::one());
        assert!(!a.mul(&b, &r).eq(&Coefficient::one()));
    }

    #[test]
    fn perturbation_examples() {
        let r = Ring::free();
        let t1 = Coefficient::var(Var::T(1));
        let u11 = Coefficient::var(Var::U(1, 1));
        let u12 = Coefficient::var(Var::U(1, 2));
        assert_eq!(perturbation_substitute(&t1, 2), u11.add(&u12));
        let t1sq = t1.mul(&t1, &r);
        assert_eq!(perturbation_substitute(&t1sq, 2), u11.mul(&u12, &r).scale_int(2));
        assert!(perturbation_substitute(&t1sq.mul(&t1, &r), 2).is_zero());
    }

    #[test]
    fn bernoulli_numbers() {
        let b = bernoulli(8);
        assert_eq!(b[1], qf(-1, 2));
        assert_eq!(b[2], qf(1, 6));
        assert_eq!(b[4], qf(-1, 30));
        assert_eq!(b[6], qf(1, 42));
        assert_eq!(b[8], qf(-1, 30));
        assert!(b[3].is_zero());
    }
}
