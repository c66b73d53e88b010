//! Lattice vectors, pairings, gradings, skew forms and exact rank-2 geometry.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(Q::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn sgn(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// An element of M or N. Coordinates are machine integers with checked
/// arithmetic; every vector arising at a fixed truncation order is small.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatVec(pub Vec<i64>);

impl fmt::Debug for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for LatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl LatVec {
    pub fn new(c: &[i64]) -> Self {
        LatVec(c.to_vec())
    }
    pub fn zero(r: usize) -> Self {
        LatVec(vec![0; r])
    }
    pub fn basis(r: usize, i: usize) -> Self {
        let mut v = vec![0; r];
        v[i] = 1;
        LatVec(v)
    }
    pub fn rank(&self) -> usize {
        self.0.len()
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
    pub fn add(&self, o: &LatVec) -> LatVec {
        debug_assert_eq!(self.rank(), o.rank());
        LatVec(self.0.iter().zip(&o.0).map(|(a, b)| a.checked_add(*b).expect("lattice overflow")).collect())
    }
    pub fn sub(&self, o: &LatVec) -> LatVec {
        debug_assert_eq!(self.rank(), o.rank());
        LatVec(self.0.iter().zip(&o.0).map(|(a, b)| a.checked_sub(*b).expect("lattice overflow")).collect())
    }
    pub fn neg(&self) -> LatVec {
        LatVec(self.0.iter().map(|a| -a).collect())
    }
    pub fn scale(&self, k: i64) -> LatVec {
        LatVec(self.0.iter().map(|a| a.checked_mul(k).expect("lattice overflow")).collect())
    }
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }
    /// Primitive vector on the same ray; zero stays zero.
    pub fn primitive(&self) -> LatVec {
        let g = self.content();
        if g == 0 {
            self.clone()
        } else {
            LatVec(self.0.iter().map(|c| c / g).collect())
        }
    }
    /// Sign normalization: the first nonzero coordinate is positive.
    pub fn lex_positive(&self) -> (LatVec, i64) {
        match self.0.iter().find(|&&c| c != 0) {
            Some(&c) if c < 0 => (self.neg(), -1),
            _ => (self.clone(), 1),
        }
    }
    /// If `self = k·other` for an integer k, return k.
    pub fn multiple_of(&self, other: &LatVec) -> Option<i64> {
        let i = other.0.iter().position(|&c| c != 0)?;
        if self.0[i] % other.0[i] != 0 {
            return None;
        }
        let k = self.0[i] / other.0[i];
        if other.scale(k) == *self {
            Some(k)
        } else {
            None
        }
    }
    pub fn to_q(&self) -> Vec<Q> {
        self.0.iter().map(|&c| q(c)).collect()
    }
    /// Rank-2 determinant with `o`.
    pub fn cross(&self, o: &LatVec) -> i64 {
        self.0[0] * o.0[1] - self.0[1] * o.0[0]
    }
}

/// ⟨m, n⟩.
pub fn pairing(m: &LatVec, n: &LatVec) -> Result<i64> {
    if m.rank() != n.rank() {
        return Err(Error::RankMismatch { expected: m.rank(), got: n.rank() });
    }
    let mut s: i64 = 0;
    for (a, b) in m.0.iter().zip(&n.0) {
        s = a.checked_mul(*b).and_then(|p| s.checked_add(p)).ok_or(Error::Overflow)?;
    }
    Ok(s)
}

/// Infallible pairing for vectors known to share a rank.
pub fn pair(m: &LatVec, n: &LatVec) -> i64 {
    pairing(m, n).expect("pairing")
}

/// Pairing of an integer vector with a rational point.
pub fn pair_q(m: &LatVec, x: &[Q]) -> Q {
    m.0.iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + b * q(*a))
}

/// A positive linear functional d on M defining the truncation filtration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grading {
    pub weights: Vec<i64>,
}

impl Grading {
    pub fn standard(r: usize) -> Self {
        Grading { weights: vec![1; r] }
    }
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.iter().any(|&w| w <= 0) {
            return Err(Error::Precondition("grading weights must be positive".into()));
        }
        Ok(Grading { weights })
    }
    pub fn rank(&self) -> usize {
        self.weights.len()
    }
    /// d(m) without cone checks; may be nonpositive.
    pub fn eval(&self, m: &LatVec) -> i64 {
        m.0.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
    /// d(m) for m in M_σ^+ (nonnegative coordinates, nonzero).
    pub fn degree(&self, m: &LatVec) -> Result<i64> {
        if m.rank() != self.rank() {
            return Err(Error::RankMismatch { expected: self.rank(), got: m.rank() });
        }
        if m.is_zero() {
            return Err(Error::NotInCone(m.to_string()));
        }
        let d = self.eval(m);
        if d < 1 {
            return Err(Error::NotInCone(m.to_string()));
        }
        Ok(d)
    }
}

/// A rational polyhedral cone given by generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeData {
    pub generators: Vec<LatVec>,
    pub strict: bool,
}

impl ConeData {
    pub fn new(generators: Vec<LatVec>) -> Result<Self> {
        if generators.iter().any(|g| g.is_zero()) {
            return Err(Error::Precondition("cone generators must be nonzero".into()));
        }
        let strict = strictly_convex(&generators);
        Ok(ConeData { generators, strict })
    }
    pub fn standard(r: usize) -> Self {
        ConeData { generators: (0..r).map(|i| LatVec::basis(r, i)).collect(), strict: true }
    }
}

/// Exact in rank 2. In higher rank, reports strictness when some
/// coordinate-sign pattern functional is positive on every generator.
fn strictly_convex(gens: &[LatVec]) -> bool {
    if gens.is_empty() {
        return true;
    }
    let r = gens[0].rank();
    if r == 2 {
        // Strict iff all generators lie in an open half-plane.
        for g in gens {
            for h in gens {
                if g.cross(h) == 0 && pair(g, h) < 0 {
                    return false;
                }
            }
        }
        // Check each candidate normal taken from generator perpendiculars.
        let mut cands: Vec<LatVec> = Vec::new();
        for g in gens {
            cands.push(LatVec(vec![-g.0[1], g.0[0]]));
            cands.push(LatVec(vec![g.0[1], -g.0[0]]));
            cands.push(g.clone());
        }
        for a in &cands {
            for b in &cands {
                let f = a.add(b);
                if gens.iter().all(|g| pair(g, &f) > 0) {
                    return true;
                }
            }
        }
        return false;
    }
    for mask in 0u32..(1 << r) {
        let f = LatVec((0..r).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect());
        if gens.iter().all(|g| pair(g, &f) > 0) {
            return true;
        }
    }
    false
}

/// The skew form ω on M.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SkewForm {
    pub mat: Vec<Vec<i64>>,
}

impl SkewForm {
    pub fn new(mat: Vec<Vec<i64>>) -> Result<Self> {
        let r = mat.len();
        for (i, row) in mat.iter().enumerate() {
            if row.len() != r {
                return Err(Error::Precondition("skew form must be square".into()));
            }
            for j in 0..r {
                if row[j] != -mat[j][i] {
                    return Err(Error::Precondition("skew form must be antisymmetric".into()));
                }
            }
        }
        Ok(SkewForm { mat })
    }
    pub fn rank(&self) -> usize {
        self.mat.len()
    }
    pub fn eval(&self, a: &LatVec, b: &LatVec) -> i64 {
        let mut s = 0i64;
        for i in 0..self.rank() {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.rank() {
                s += a.0[i] * self.mat[i][j] * b.0[j];
            }
        }
        s
    }
    /// The map p: M → N with ⟨m', p(m)⟩ = ω(m', m).
    pub fn p(&self, m: &LatVec) -> LatVec {
        let r = self.rank();
        LatVec((0..r).map(|i| (0..r).map(|j| self.mat[i][j] * m.0[j]).sum()).collect())
    }
    pub fn determinant(&self) -> BigInt {
        let n = self.rank();
        let mut a: Vec<Vec<Q>> = self.mat.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
                return BigInt::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            let piv = a[c][c].clone();
            det *= &piv;
            for i in c + 1..n {
                let f = &a[i][c] / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let t = &a[c][j] * &f;
                    a[i][j] -= t;
                }
            }
        }
        det.to_integer()
    }
    pub fn is_nondegenerate(&self) -> bool {
        !self.determinant().is_zero()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SupportKind {
    Line,
    Ray,
}

/// A line or ray in a rank-2 real vector space with rational base point and
/// primitive integral direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SupportR2 {
    pub kind: SupportKind,
    pub base: Vec<Q>,
    pub dir: LatVec,
}

/// Where a point sits relative to a support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    Off,
    Interior,
    Base,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intersection {
    Empty,
    Point(Vec<Q>),
    Overlap,
}

fn cross_q(a: &[Q], b: &[Q]) -> Q {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn dot_q(a: &[Q], b: &[Q]) -> Q {
    &a[0] * &b[0] + &a[1] * &b[1]
}

fn sub_q(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl SupportR2 {
    pub fn line(base: Vec<Q>, dir: LatVec) -> Self {
        SupportR2 { kind: SupportKind::Line, base, dir: dir.primitive() }
    }
    pub fn ray(base: Vec<Q>, dir: LatVec) -> Self {
        SupportR2 { kind: SupportKind::Ray, base, dir: dir.primitive() }
    }
    pub fn dir_q(&self) -> Vec<Q> {
        self.dir.to_q()
    }
    /// Integer normal (−d_y, d_x).
    pub fn normal(&self) -> LatVec {
        LatVec(vec![-self.dir.0[1], self.dir.0[0]])
    }
    /// Signed offset of x from the underlying line, measured by the normal.
    pub fn side(&self, x: &[Q]) -> Q {
        pair_q(&self.normal(), &sub_q(x, &self.base))
    }
    /// Parameter s with x = base + s·dir, assuming x is on the line.
    pub fn param(&self, x: &[Q]) -> Q {
        let d = self.dir_q();
        dot_q(&sub_q(x, &self.base), &d) / dot_q(&d, &d)
    }
    pub fn point_at(&self, s: &Q) -> Vec<Q> {
        self.base.iter().zip(self.dir.0.iter()).map(|(b, &d)| b + s * q(d)).collect()
    }
    pub fn position(&self, x: &[Q]) -> Position {
        if !self.side(x).is_zero() {
            return Position::Off;
        }
        match self.kind {
            SupportKind::Line => Position::Interior,
            SupportKind::Ray => match sgn(&self.param(x)) {
                1 => Position::Interior,
                0 => Position::Base,
                _ => Position::Off,
            },
        }
    }
    pub fn contains(&self, x: &[Q]) -> bool {
        self.position(x) != Position::Off
    }
    pub fn same_line(&self, o: &SupportR2) -> bool {
        self.dir.cross(&o.dir) == 0 && self.side(&o.base).is_zero()
    }
    /// Parameter interval on this support's line as (lo, hi), None = unbounded.
    fn interval_on(&self, line: &SupportR2) -> (Option<Q>, Option<Q>) {
        match self.kind {
            SupportKind::Line => (None, None),
            SupportKind::Ray => {
                let s0 = line.param(&self.base);
                if pair(&self.dir, &line.dir) > 0 {
                    (Some(s0), None)
                } else {
                    (None, Some(s0))
                }
            }
        }
    }
}

/// Exact intersection of two rank-2 supports.
pub fn intersect_supports(a: &SupportR2, b: &SupportR2) -> Intersection {
    let da = a.dir_q();
    let db = b.dir_q();
    let den = cross_q(&da, &db);
    let w = sub_q(&b.base, &a.base);
    if den.is_zero() {
        if !cross_q(&w, &da).is_zero() {
            return Intersection::Empty;
        }
        let (alo, ahi) = a.interval_on(a);
        let (blo, bhi) = b.interval_on(a);
        let lo = match (alo, blo) {
            (Some(x), Some(y)) => Some(if x > y { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        };
        let hi = match (ahi, bhi) {
            (Some(x), Some(y)) => Some(if x < y { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        };
        return match (lo, hi) {
            (Some(l), Some(h)) => match l.cmp(&h) {
                Ordering::Less => Intersection::Overlap,
                Ordering::Equal => Intersection::Point(a.point_at(&l)),
                Ordering::Greater => Intersection::Empty,
            },
            _ => Intersection::Overlap,
        };
    }
    let s = cross_q(&w, &db) / &den;
    let t = cross_q(&w, &da) / &den;
    if a.kind == SupportKind::Ray && s.is_negative() {
        return Intersection::Empty;
    }
    if b.kind == SupportKind::Ray && t.is_negative() {
        return Intersection::Empty;
    }
    Intersection::Point(a.point_at(&s))
}

/// Solve a square rational linear system; None when singular.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = b.len();
    let mut m: Vec<Vec<Q>> = a.iter().zip(b).map(|(r, x)| {
        let mut r = r.clone();
        r.push(x.clone());
        r
    }).collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(p, c);
        let piv = m[c][c].clone();
        for j in c..=n {
            m[c][j] = &m[c][j] / &piv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let t = &m[c][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i64]) -> LatVec {
        LatVec::new(c)
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&v(&[1, 0]), &v(&[0, 1])).unwrap(), 0);
        assert_eq!(pairing(&v(&[2, 3]), &v(&[1, 1])).unwrap(), 5);
        assert_eq!(pairing(&v(&[1, 0]), &v(&[-1, 0])).unwrap(), -1);
        assert!(pairing(&v(&[1, 0]), &v(&[1, 0, 0])).is_err());
    }

    #[test]
    fn degree_examples() {
        let d = Grading::standard(2);
        assert_eq!(d.degree(&v(&[1, 0])).unwrap(), 1);
        assert_eq!(d.degree(&v(&[2, 3])).unwrap(), 5);
        assert_eq!(Grading::new(vec![2, 1]).unwrap().degree(&v(&[1, 1])).unwrap(), 3);
        assert!(d.degree(&v(&[0, 0])).is_err());
        assert!(d.degree(&v(&[-1, 0])).is_err());
    }

    #[test]
    fn intersections() {
        let x = SupportR2::line(vec![q(0), q(0)], v(&[1, 0]));
        let y = SupportR2::line(vec![q(0), q(0)], v(&[0, 1]));
        assert_eq!(intersect_supports(&x, &y), Intersection::Point(vec![q(0), q(0)]));
        let r1 = SupportR2::ray(vec![q(0), q(0)], v(&[1, 1]));
        let r2 = SupportR2::ray(vec![q(1), q(0)], v(&[1, 1]));
        assert_eq!(intersect_supports(&r1, &r2), Intersection::Empty);
        let l = SupportR2::line(vec![q(0), q(1)], v(&[1, 0]));
        assert_eq!(intersect_supports(&l, &r1), Intersection::Point(vec![q(1), q(1)]));
        // Opposite collinear rays touching at a point.
        let r3 = SupportR2::ray(vec![q(0), q(0)], v(&[-1, -1]));
        assert_eq!(intersect_supports(&r1, &r3), Intersection::Point(vec![q(0), q(0)]));
        let r4 = SupportR2::ray(vec![q(2), q(2)], v(&[-1, -1]));
        assert_eq!(intersect_supports(&r1, &r4), Intersection::Overlap);
        assert_eq!(intersect_supports(&x, &l), Intersection::Empty);
    }

    #[test]
    fn skew_form_p_map() {
        let w = SkewForm::new(vec![vec![0, -1], vec![1, 0]]).unwrap();
        let m = v(&[1, 1]);
        let p = w.p(&m);
        for mp in [v(&[1, 0]), v(&[0, 1]), v(&[2, -3])] {
            assert_eq!(pair(&mp, &p), w.eval(&mp, &m));
        }
        assert!(w.is_nondegenerate());
        assert!(!SkewForm::new(vec![vec![0; 3]; 3]).unwrap().is_nondegenerate());
    }

    #[test]
    fn cones() {
        assert!(ConeData::standard(2).strict);
        assert!(!ConeData::new(vec![v(&[1, 0]), v(&[-1, 0])]).unwrap().strict);
        assert!(ConeData::new(vec![v(&[1, 2]), v(&[3, -1])]).unwrap().strict);
        assert!(!ConeData::new(vec![v(&[1, 0]), v(&[0, 1]), v(&[-1, -1])]).unwrap().strict);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_q("3/6").unwrap(), qf(1, 2));
        assert_eq!(fmt_q(&qf(-4, 2)), "-2");
        assert!(parse_q("1/0").is_none());
    }
}
