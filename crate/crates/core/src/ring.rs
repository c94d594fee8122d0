//! Exact Laurent-polynomial rings over the rationals.
//!
//! A [`RingDesc`] names an ordered list of variables and marks some of them
//! invertible; exponents of invertible variables may be negative. Elements are
//! kept in a normal form (no zero coefficients, terms keyed by exponent vector
//! in lexicographic order), so equality is structural.
//!
//! The zero ring (ring of sections of the empty scheme) is a separate
//! descriptor in which every element normalizes to `0 = 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Shared handle to a ring descriptor.
pub type Ring = Arc<RingDesc>;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingDesc {
    variables: Vec<String>,
    invertible: Vec<bool>,
    zero: bool,
}

impl RingDesc {
    /// Builds `Q[vars]` localized at the listed invertible variables.
    pub fn new<S: AsRef<str>>(variables: &[S], invertible: &[S]) -> Result<Ring> {
        let variables: Vec<String> = variables.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, v) in variables.iter().enumerate() {
            if v.is_empty() || !v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
                return Err(Error::InvalidRing(format!("bad variable name `{v}`")));
            }
            if !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '/') {
                return Err(Error::InvalidRing(format!("bad variable name `{v}`")));
            }
            if variables[..i].contains(v) {
                return Err(Error::InvalidRing(format!("duplicate variable `{v}`")));
            }
        }
        let mut inv = vec![false; variables.len()];
        for name in invertible {
            let name = name.as_ref();
            match variables.iter().position(|v| v == name) {
                Some(i) => inv[i] = true,
                None => return Err(Error::InvalidRing(format!("invertible variable `{name}` is not a variable"))),
            }
        }
        Ok(Arc::new(RingDesc { variables, invertible: inv, zero: false }))
    }

    /// The rationals themselves.
    pub fn rationals() -> Ring {
        Arc::new(RingDesc { variables: Vec::new(), invertible: Vec::new(), zero: false })
    }

    pub fn zero_ring() -> Ring {
        Arc::new(RingDesc { variables: Vec::new(), invertible: Vec::new(), zero: true })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn invertible_mask(&self) -> &[bool] {
        &self.invertible
    }

    pub fn is_invertible(&self, var: usize) -> bool {
        self.invertible[var]
    }

    pub fn invertible_names(&self) -> Vec<&str> {
        self.variables.iter().zip(&self.invertible).filter(|(_, &i)| i).map(|(v, _)| v.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    pub fn is_zero_ring(&self) -> bool {
        self.zero
    }
}

impl fmt::Display for RingDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0");
        }
        write!(f, "Q[")?;
        for (i, v) in self.variables.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if self.invertible[i] {
                write!(f, "{v}^±1")?;
            } else {
                write!(f, "{v}")?;
            }
        }
        write!(f, "]")
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn check_same(a: &Ring, b: &Ring) -> Result<()> {
    if same_ring(a, b) {
        Ok(())
    } else {
        Err(Error::RingMismatch(format!("{a} vs {b}")))
    }
}

/// An element of a Laurent-polynomial ring in normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElem {
    ring: Ring,
    terms: BTreeMap<Vec<i32>, Rational>,
}

impl RingElem {
    pub fn zero(ring: &Ring) -> Self {
        RingElem { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn constant(ring: &Ring, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !ring.zero && !c.is_zero() {
            terms.insert(vec![0; ring.nvars()], c);
        }
        RingElem { ring: ring.clone(), terms }
    }

    pub fn integer(ring: &Ring, n: i64) -> Self {
        Self::constant(ring, rat(n))
    }

    pub fn var(ring: &Ring, name: &str) -> Result<Self> {
        let i = ring.index_of(name).ok_or_else(|| Error::Parse(format!("unknown variable `{name}` in {ring}")))?;
        let mut e = vec![0; ring.nvars()];
        e[i] = 1;
        Self::monomial(ring, Rational::one(), e)
    }

    pub fn monomial(ring: &Ring, coeff: Rational, exps: Vec<i32>) -> Result<Self> {
        if ring.zero {
            return Ok(Self::zero(ring));
        }
        if exps.len() != ring.nvars() {
            return Err(Error::Dimension(format!("exponent vector of length {} for {ring}", exps.len())));
        }
        for (i, &e) in exps.iter().enumerate() {
            if e < 0 && !ring.invertible[i] {
                return Err(Error::NotAUnit(format!("negative power of non-invertible `{}`", ring.variables[i])));
            }
        }
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exps, coeff);
        }
        Ok(RingElem { ring: ring.clone(), terms })
    }

    /// Builds an element from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(ring: &Ring, terms: impl IntoIterator<Item = (Vec<i32>, Rational)>) -> Result<Self> {
        let mut acc = RingElem::zero(ring);
        for (e, c) in terms {
            let m = RingElem::monomial(ring, c, e)?;
            acc = acc.try_add(&m)?;
        }
        Ok(acc)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        if self.ring.zero {
            return true;
        }
        self.terms.len() == 1 && self.terms.iter().all(|(e, c)| c.is_one() && e.iter().all(|&x| x == 0))
    }

    /// Coefficient of the given exponent vector (zero when absent).
    pub fn coeff(&self, exps: &[i32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max_abs_exponent(&self) -> i32 {
        self.terms.keys().flat_map(|e| e.iter().map(|x| x.abs())).max().unwrap_or(0)
    }

    pub fn try_add(&self, other: &RingElem) -> Result<RingElem> {
        check_same(&self.ring, &other.ring)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&mut terms, e.clone(), c.clone());
        }
        Ok(RingElem { ring: self.ring.clone(), terms })
    }

    pub fn try_sub(&self, other: &RingElem) -> Result<RingElem> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &RingElem) -> Result<RingElem> {
        check_same(&self.ring, &other.ring)?;
        let mut terms = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                accumulate(&mut terms, e, c1 * c2);
            }
        }
        Ok(RingElem { ring: self.ring.clone(), terms })
    }

    fn neg_ref(&self) -> RingElem {
        RingElem { ring: self.ring.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, c: &Rational) -> RingElem {
        if c.is_zero() {
            return RingElem::zero(&self.ring);
        }
        RingElem { ring: self.ring.clone(), terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect() }
    }

    /// True iff the element is a nonzero rational times a monomial in
    /// invertible variables. Every element of the zero ring is a unit.
    pub fn is_unit(&self) -> bool {
        if self.ring.zero {
            return true;
        }
        if self.terms.len() != 1 {
            return false;
        }
        let (e, _) = self.terms.iter().next().unwrap();
        e.iter().enumerate().all(|(i, &x)| x == 0 || self.ring.invertible[i])
    }

    pub fn inverse(&self) -> Result<RingElem> {
        if self.ring.zero {
            return Ok(self.clone());
        }
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        let (e, c) = self.terms.iter().next().unwrap();
        RingElem::monomial(&self.ring, c.recip(), e.iter().map(|x| -x).collect())
    }

    /// Integer power; negative exponents require a unit.
    pub fn pow(&self, n: i64) -> Result<RingElem> {
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = RingElem::one(&self.ring);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.try_mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.try_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Reinterprets the element in a ring whose variable list extends this
    /// ring's list by a (possibly empty) suffix or arbitrary reordering; each
    /// variable is located by name.
    pub fn embed(&self, target: &Ring) -> Result<RingElem> {
        if target.zero {
            return Ok(RingElem::zero(target));
        }
        let mut idx = Vec::with_capacity(self.ring.nvars());
        for v in &self.ring.variables {
            idx.push(
                target
                    .index_of(v)
                    .ok_or_else(|| Error::RingMismatch(format!("variable `{v}` missing from {target}")))?,
            );
        }
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut ne = vec![0; target.nvars()];
            for (i, &x) in e.iter().enumerate() {
                ne[idx[i]] = x;
            }
            terms.insert(ne, c.clone());
        }
        RingElem::from_terms(target, terms)
    }

    /// Parses the canonical text form (see [`fmt::Display`]).
    pub fn parse(ring: &Ring, text: &str) -> Result<RingElem> {
        let mut p = Parser { ring, chars: text.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
        let e = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("trailing input in `{text}`")));
        }
        Ok(e)
    }
}

fn accumulate(terms: &mut BTreeMap<Vec<i32>, Rational>, e: Vec<i32>, c: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(e) {
        Entry::Occupied(mut o) => {
            let v = o.get_mut();
            *v += c;
            if v.is_zero() {
                o.remove();
            }
        }
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
    }
}

impl<'a> Add<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn add(self, rhs: &'a RingElem) -> RingElem {
        self.try_add(rhs).expect("ring mismatch in +")
    }
}

impl<'a> Sub<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn sub(self, rhs: &'a RingElem) -> RingElem {
        self.try_sub(rhs).expect("ring mismatch in -")
    }
}

impl<'a> Mul<&'a RingElem> for &'a RingElem {
    type Output = RingElem;
    fn mul(self, rhs: &'a RingElem) -> RingElem {
        self.try_mul(rhs).expect("ring mismatch in *")
    }
}

impl Neg for &RingElem {
    type Output = RingElem;
    fn neg(self) -> RingElem {
        self.neg_ref()
    }
}

/// Canonical text: terms in lexicographic exponent order, each term
/// `coeff*var^exp*...`, coefficient `1` omitted before variables.
impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            for (i, &x) in e.iter().enumerate() {
                if x == 1 {
                    factors.push(self.ring.variables[i].clone());
                } else if x != 0 {
                    factors.push(format!("{}^{}", self.ring.variables[i], x));
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{a}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct Parser<'r> {
    ring: &'r Ring,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RingElem> {
        let mut acc = RingElem::zero(self.ring);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    1
                }
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = if sign < 0 { acc.try_sub(&t)? } else { acc.try_add(&t)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElem> {
        let mut acc = self.power()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            let f = self.power()?;
            acc = acc.try_mul(&f)?;
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<RingElem> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let neg = if self.peek() == Some('-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let n = self.digits()?;
            let n: i64 = n.parse().map_err(|_| Error::Parse(format!("bad exponent `{n}`")))?;
            return base.pow(if neg { -n } else { n });
        }
        Ok(base)
    }

    fn digits(&mut self) -> Result<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected digits at {}", self.pos)));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn atom(&mut self) -> Result<RingElem> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("unbalanced parenthesis".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.digits()?;
                let mut q = Rational::from_integer(num.parse::<BigInt>().unwrap());
                if self.peek() == Some('/') {
                    self.pos += 1;
                    let den = self.digits()?;
                    let den: BigInt = den.parse().unwrap();
                    if den.is_zero() {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    q /= Rational::from_integer(den);
                }
                Ok(RingElem::constant(self.ring, q))
            }
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '/') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                RingElem::var(self.ring, &name)
            }
            other => Err(Error::Parse(format!("unexpected {other:?} at {}", self.pos))),
        }
    }
}

/// A ring homomorphism given by the images of the source variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingHom {
    source: Ring,
    target: Ring,
    images: Vec<RingElem>,
}

impl RingHom {
    pub fn new(source: &Ring, target: &Ring, images: Vec<RingElem>) -> Result<Self> {
        if source.zero && !target.zero {
            return Err(Error::InvalidHom("no homomorphism out of the zero ring into a nonzero ring".into()));
        }
        if images.len() != source.nvars() {
            return Err(Error::InvalidHom(format!("{} images for {} variables", images.len(), source.nvars())));
        }
        for (i, img) in images.iter().enumerate() {
            check_same(img.ring(), target)?;
            if source.invertible[i] && !img.is_unit() {
                return Err(Error::InvalidHom(format!(
                    "invertible variable `{}` maps to non-unit {img}",
                    source.variables[i]
                )));
            }
        }
        Ok(RingHom { source: source.clone(), target: target.clone(), images })
    }

    /// Parses images from canonical strings, one per source variable.
    pub fn from_strings<S: AsRef<str>>(source: &Ring, target: &Ring, images: &[S]) -> Result<Self> {
        let imgs = images.iter().map(|s| RingElem::parse(target, s.as_ref())).collect::<Result<Vec<_>>>()?;
        Self::new(source, target, imgs)
    }

    pub fn identity(ring: &Ring) -> Self {
        let images = (0..ring.nvars())
            .map(|i| {
                let mut e = vec![0; ring.nvars()];
                e[i] = 1;
                RingElem::monomial(ring, Rational::one(), e).unwrap()
            })
            .collect();
        RingHom { source: ring.clone(), target: ring.clone(), images }
    }

    /// The map into the zero ring.
    pub fn to_zero(source: &Ring) -> Self {
        let z = RingDesc::zero_ring();
        let images = (0..source.nvars()).map(|_| RingElem::zero(&z)).collect();
        RingHom { source: source.clone(), target: z, images }
    }

    pub fn source(&self) -> &Ring {
        &self.source
    }

    pub fn target(&self) -> &Ring {
        &self.target
    }

    pub fn images(&self) -> &[RingElem] {
        &self.images
    }

    pub fn apply(&self, a: &RingElem) -> Result<RingElem> {
        check_same(a.ring(), &self.source)?;
        let mut cache: HashMap<(usize, i32), RingElem> = HashMap::new();
        let mut acc = RingElem::zero(&self.target);
        for (e, c) in a.terms() {
            let mut t = RingElem::constant(&self.target, c.clone());
            for (i, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let p = match cache.get(&(i, x)) {
                    Some(p) => p.clone(),
                    None => {
                        let p = self.images[i].pow(x as i64)?;
                        cache.insert((i, x), p.clone());
                        p
                    }
                };
                t = t.try_mul(&p)?;
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &RingHom) -> Result<RingHom> {
        check_same(&first.target, &self.source)?;
        let images = first.images.iter().map(|x| self.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(RingHom { source: first.source.clone(), target: self.target.clone(), images })
    }
}

impl fmt::Debug for RingHom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {{", self.source, self.target)?;
        for (v, img) in self.source.variables.iter().zip(&self.images) {
            write!(f, " {v} ↦ {img};")?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring_t() -> Ring {
        RingDesc::new(&["t", "s"], &["t"]).unwrap()
    }

    fn p(r: &Ring, s: &str) -> RingElem {
        RingElem::parse(r, s).unwrap()
    }

    #[test]
    fn additive_examples() {
        let r = ring_t();
        assert!((&p(&r, "t") + &p(&r, "-t")).is_zero());
        assert_eq!(&p(&r, "1") + &RingElem::zero(&r), p(&r, "1"));
        assert_eq!(&p(&r, "t + 1") + &p(&r, "t - 1"), p(&r, "2*t"));
    }

    #[test]
    fn multiplicative_examples() {
        let r = ring_t();
        assert!((&p(&r, "t") * &p(&r, "t^-1")).is_one());
        assert_eq!(&p(&r, "1 + t") * &p(&r, "1 - t"), p(&r, "1 - t^2"));
        assert!((&RingElem::zero(&r) * &p(&r, "3*t*s + 1")).is_zero());
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = p(&ring_t(), "t");
        let b = p(&RingDesc::new(&["u"], &[]).unwrap(), "u");
        assert!(matches!(a.try_add(&b), Err(Error::RingMismatch(_))));
        assert!(matches!(a.try_mul(&b), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn units() {
        let r = ring_t();
        let u = p(&r, "3*t^2");
        assert!(u.is_unit());
        assert_eq!(u.inverse().unwrap(), p(&r, "1/3*t^-2"));
        assert!(!p(&r, "s").is_unit());
        assert!(!p(&r, "1 + t").is_unit());
        assert!(matches!(p(&r, "1 + t").inverse(), Err(Error::NotAUnit(_))));
        assert!(RingElem::monomial(&r, rat(1), vec![0, -1]).is_err());
    }

    #[test]
    fn homomorphism_examples() {
        let r = ring_t();
        let a = p(&r, "t^-3*s + 7");
        assert_eq!(RingHom::identity(&r).apply(&a).unwrap(), a);

        let x = RingDesc::new(&["x"], &[]).unwrap();
        let uv = RingDesc::new(&["u", "v"], &[]).unwrap();
        let h = RingHom::from_strings(&x, &uv, &["u*v"]).unwrap();
        assert_eq!(h.apply(&p(&x, "x^2")).unwrap(), p(&uv, "u^2*v^2"));

        let t = RingDesc::new(&["t"], &["t"]).unwrap();
        let s = RingDesc::new(&["s"], &["s"]).unwrap();
        let h = RingHom::from_strings(&t, &s, &["s^-1"]).unwrap();
        assert_eq!(h.apply(&p(&t, "t^-1")).unwrap(), p(&s, "s"));
    }

    #[test]
    fn invertible_variable_needs_unit_image() {
        let t = RingDesc::new(&["t"], &["t"]).unwrap();
        let s = RingDesc::new(&["s"], &[]).unwrap();
        assert!(matches!(RingHom::from_strings(&t, &s, &["s"]), Err(Error::InvalidHom(_))));
        assert!(RingHom::from_strings(&t, &s, &["1 + s"]).is_err());
        assert!(RingHom::from_strings(&t, &s, &["-2"]).is_ok());
    }

    #[test]
    fn display_round_trips() {
        let r = RingDesc::new(&["x0/x1", "b"], &["x0/x1"]).unwrap();
        for s in ["0", "1", "-1/2*x0/x1^-2 + b", "x0/x1 - 3*b^4", "2*x0/x1*b"] {
            let e = p(&r, s);
            assert_eq!(p(&r, &e.to_string()), e, "{s}");
        }
        assert_eq!(p(&r, "(1 + b)^2").to_string(), "1 + 2*b + b^2");
    }

    #[test]
    fn zero_ring_collapses() {
        let z = RingDesc::zero_ring();
        assert!(RingElem::one(&z).is_zero());
        assert!(RingElem::zero(&z).is_unit());
        assert!(RingElem::zero(&z).is_one());
        let r = ring_t();
        let h = RingHom::to_zero(&r);
        assert!(h.apply(&p(&r, "t + s")).unwrap().is_zero());
    }

    #[test]
    fn duplicate_variable_rejected() {
        assert!(RingDesc::new(&["a", "a"], &[]).is_err());
        assert!(RingDesc::new(&["a"], &["b"]).is_err());
    }
}
