//! Galois rings `GR(p, c, lambda) = (Z/p^c)[x]/(g)` with `g` monic of degree
//! `lambda` and irreducible mod `p`, plus the Hensel embedding of a Galois
//! ring into a finite local ring of matching characteristic.

use serde::{Deserialize, Serialize};

use crate::abelian::Elem;
use crate::arith::{ipow, is_prime};
use crate::error::{Error, Result};
use crate::finite_ring::FiniteCommRing;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaloisRingSpec {
    pub p: u64,
    pub lambda: u32,
    pub c: u32,
    /// Coefficients of the modulus from degree 0 up to the leading 1.
    pub modulus: Vec<u64>,
}

/// Coordinates in the basis `1, xi, ..., xi^(lambda-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RingElement {
    pub coeffs: Vec<u64>,
}

impl RingElement {
    pub fn new(coeffs: Vec<u64>) -> Self {
        RingElement { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Polynomial remainder over F_p; `divisor` is monic.
fn poly_rem_mod_p(a: &[u64], divisor: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.iter().map(|&x| x % p).collect();
    let d = divisor.len() - 1;
    while r.len() > d {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let off = r.len() - d;
            for (i, &q) in divisor[..d].iter().enumerate() {
                r[off + i] = (r[off + i] + (p - lead) * q % p) % p;
            }
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// All monic polynomials of degree `d` over F_p, low-to-high coefficients.
fn monic_polys(p: u64, d: u32) -> impl Iterator<Item = Vec<u64>> {
    let count = ipow(p, d);
    (0..count).map(move |mut k| {
        let mut coeffs = vec![0; d as usize + 1];
        // most significant digit is the degree d-1 coefficient
        for i in 0..d as usize {
            coeffs[i] = k % p;
            k /= p;
        }
        coeffs[d as usize] = 1;
        coeffs
    })
}

pub fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    let deg = f.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    (1..=deg / 2).all(|d| monic_polys(p, d).all(|g| !poly_rem_mod_p(f, &g, p).is_empty()))
}

impl GaloisRingSpec {
    /// Builds `GR(p, c, lambda)` with the lexicographically smallest monic
    /// irreducible modulus, where coefficients are compared from degree
    /// `lambda - 1` down to degree 0.
    pub fn construct(p: u64, lambda: u32, c: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if lambda == 0 || c == 0 {
            return Err(Error::InvalidParameter("lambda and c must be positive".into()));
        }
        if (c as u64) * (lambda as u64) * (64 - p.leading_zeros() as u64) > 60 {
            return Err(Error::InvalidParameter("ring too large for exact indexing".into()));
        }
        let modulus = if lambda == 1 {
            vec![0, 1]
        } else {
            // monic_polys enumerates with the degree lambda-1 coefficient varying
            // fastest; reorder so it is the most significant key instead.
            let mut best: Option<Vec<u64>> = None;
            for f in monic_polys(p, lambda) {
                if !is_irreducible_mod_p(&f, p) {
                    continue;
                }
                let key = |v: &Vec<u64>| v[..lambda as usize].iter().rev().copied().collect::<Vec<_>>();
                if best.as_ref().is_none_or(|b| key(&f) < key(b)) {
                    best = Some(f);
                }
            }
            best.expect("irreducible polynomials exist in every degree")
        };
        Ok(GaloisRingSpec { p, lambda, c, modulus })
    }

    /// Same ring structure at a different precision.
    pub fn with_precision(&self, c: u32) -> Self {
        let q = ipow(self.p, c);
        let mut modulus: Vec<u64> = self.modulus.iter().map(|&m| m % q).collect();
        *modulus.last_mut().unwrap() = 1 % q.max(2);
        GaloisRingSpec { p: self.p, lambda: self.lambda, c, modulus }
    }

    /// Checks the stored invariants (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::NotPrime(self.p));
        }
        if self.lambda == 0 || self.c == 0 || self.modulus.len() != self.lambda as usize + 1 {
            return Err(Error::InvalidParameter("modulus must be monic of degree lambda".into()));
        }
        if self.modulus[self.lambda as usize] != 1 || self.modulus.iter().any(|&m| m >= self.q()) {
            return Err(Error::InvalidParameter("modulus must be monic with reduced coefficients".into()));
        }
        if !is_irreducible_mod_p(&self.modulus, self.p) {
            return Err(Error::InvalidParameter("modulus is reducible mod p".into()));
        }
        Ok(())
    }

    /// Characteristic `p^c`.
    pub fn q(&self) -> u64 {
        ipow(self.p, self.c)
    }

    pub fn residue_size(&self) -> u64 {
        ipow(self.p, self.lambda)
    }

    pub fn size(&self) -> usize {
        ipow(self.q(), self.lambda) as usize
    }

    fn len(&self) -> usize {
        self.lambda as usize
    }

    fn check(&self, a: &RingElement) -> Result<()> {
        if a.coeffs.len() != self.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                self.lambda,
                a.coeffs.len()
            )));
        }
        Ok(())
    }

    pub fn zero(&self) -> RingElement {
        RingElement::new(vec![0; self.len()])
    }

    pub fn from_int(&self, k: i64) -> RingElement {
        let mut e = self.zero();
        e.coeffs[0] = k.rem_euclid(self.q() as i64) as u64;
        e
    }

    pub fn one(&self) -> RingElement {
        self.from_int(1)
    }

    /// The class of the indeterminate.
    pub fn xi(&self) -> RingElement {
        if self.lambda == 1 {
            // x reduces to the constant term of -(modulus - x)
            let q = self.q();
            return RingElement::new(vec![(q - self.modulus[0] % q) % q]);
        }
        let mut e = self.zero();
        e.coeffs[1] = 1;
        e
    }

    pub fn reduce(&self, coeffs: &[i128]) -> RingElement {
        let q = self.q() as i128;
        RingElement::new(coeffs.iter().map(|&c| c.rem_euclid(q) as u64).collect())
    }

    pub fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let q = self.q();
        RingElement::new(a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % q).collect())
    }

    pub fn neg(&self, a: &RingElement) -> RingElement {
        let q = self.q();
        RingElement::new(a.coeffs.iter().map(|&x| (q - x) % q).collect())
    }

    pub fn sub(&self, a: &RingElement, b: &RingElement) -> RingElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        let q = self.q() as u128;
        let l = self.len();
        let mut prod = vec![0u128; 2 * l - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % q;
            }
        }
        for k in (l..2 * l - 1).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in self.modulus[..l].iter().enumerate() {
                let off = k - l + i;
                prod[off] = (prod[off] + (q - lead) * (m as u128 % q)) % q;
            }
        }
        if l == 1 {
            // modulus x: the ring is Z/q and the product is already reduced
            return RingElement::new(vec![prod[0] as u64]);
        }
        RingElement::new(prod[..l].iter().map(|&v| v as u64).collect())
    }

    pub fn checked_mul(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn checked_add(&self, a: &RingElement, b: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn scale_int(&self, k: i128, a: &RingElement) -> RingElement {
        let q = self.q() as i128;
        RingElement::new(a.coeffs.iter().map(|&x| (k * x as i128).rem_euclid(q) as u64).collect())
    }

    pub fn pow(&self, a: &RingElement, mut e: u64) -> RingElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Coefficients reduced to precision `p^c'` for `c' <= c`.
    pub fn truncate(&self, a: &RingElement, c: u32) -> RingElement {
        let q = ipow(self.p, c);
        RingElement::new(a.coeffs.iter().map(|&x| x % q).collect())
    }

    /// `p`-adic valuation of `a`; `c` for zero.
    pub fn valuation(&self, a: &RingElement) -> u32 {
        a.coeffs
            .iter()
            .filter(|&&x| x != 0)
            .map(|&x| crate::arith::valuation(x, self.p))
            .min()
            .unwrap_or(self.c)
            .min(self.c)
    }

    pub fn is_unit(&self, a: &RingElement) -> bool {
        a.coeffs.iter().any(|&x| x % self.p != 0)
    }

    /// Inverse by exponentiation in the residue field followed by Newton
    /// iteration `b <- b(2 - ab)`, which doubles the precision each step.
    pub fn inverse(&self, a: &RingElement) -> Result<RingElement> {
        self.check(a)?;
        if !self.is_unit(a) {
            return Err(Error::NotUnit(format!("{:?}", a.coeffs)));
        }
        let field = self.with_precision(1);
        let abar = field.truncate(a, 1);
        let b0 = field.pow(&abar, self.residue_size() - 2);
        let mut b = b0;
        let two = self.from_int(2);
        let mut prec = 1;
        while prec < self.c {
            b = self.mul(&b, &self.sub(&two, &self.mul(a, &b)));
            prec *= 2;
        }
        debug_assert_eq!(self.mul(a, &b), self.one());
        Ok(b)
    }

    /// Element index: coefficient 0 is the most significant digit.
    pub fn index(&self, a: &RingElement) -> Elem {
        let q = self.q();
        a.coeffs.iter().fold(0u64, |acc, &x| acc * q + x) as Elem
    }

    pub fn element(&self, idx: Elem) -> RingElement {
        let q = self.q();
        let mut idx = idx as u64;
        let mut coeffs = vec![0; self.len()];
        for slot in coeffs.iter_mut().rev() {
            *slot = idx % q;
            idx /= q;
        }
        RingElement::new(coeffs)
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElement> + '_ {
        (0..self.size() as Elem).map(move |i| self.element(i))
    }

    /// The ring as structure constants on the basis `1, xi, ...`.
    pub fn to_finite_ring(&self) -> FiniteCommRing {
        let l = self.len();
        let basis: Vec<RingElement> = (0..l)
            .map(|i| {
                let mut e = self.zero();
                e.coeffs[i] = 1;
                e
            })
            .collect();
        let mul = basis
            .iter()
            .map(|a| basis.iter().map(|b| self.mul(a, b).coeffs).collect())
            .collect();
        let orders = vec![self.q(); l];
        FiniteCommRing::new(orders, mul, self.one().coeffs).expect("Galois ring tables are valid")
    }
}

/// A unital ring homomorphism `GR(p, c, lambda) -> S`.
#[derive(Debug, Clone)]
pub struct RingEmbedding {
    pub source: GaloisRingSpec,
    pub target: FiniteCommRing,
    /// Image of `xi` in `S`.
    pub xi_image: Elem,
    /// Image of every element of the source, by source index.
    pub table: Vec<Elem>,
}

impl RingEmbedding {
    pub fn apply(&self, a: &RingElement) -> Elem {
        self.table[self.source.index(a) as usize]
    }

    /// Checks `phi(1) = 1`, additivity and multiplicativity on all pairs.
    pub fn verify_exhaustive(&self) -> Result<()> {
        let d = &self.source;
        let s = &self.target;
        if self.apply(&d.one()) != s.one() {
            return Err(Error::NotAHomomorphism("phi(1) != 1".into()));
        }
        let elems: Vec<RingElement> = d.elements().collect();
        for a in &elems {
            for b in &elems {
                let (fa, fb) = (self.apply(a), self.apply(b));
                if self.apply(&d.add(a, b)) != s.add(fa, fb) {
                    return Err(Error::NotAHomomorphism(format!("sum of {:?} and {:?}", a.coeffs, b.coeffs)));
                }
                if self.apply(&d.mul(a, b)) != s.mul(fa, fb) {
                    return Err(Error::NotAHomomorphism(format!(
                        "product of {:?} and {:?}",
                        a.coeffs, b.coeffs
                    )));
                }
            }
        }
        Ok(())
    }
}

fn eval_poly(s: &FiniteCommRing, coeffs: &[u64], x: Elem) -> Elem {
    let mut acc = 0;
    for &c in coeffs.iter().rev() {
        acc = s.add(s.mul(acc, x), s.from_int(c as i128));
    }
    acc
}

/// Embeds `GR(p, c, lambda)` into the local ring `S` by lifting a residue
/// root of the modulus with Newton's method.
pub fn embed_into_local_ring(spec: &GaloisRingSpec, s: &FiniteCommRing) -> Result<RingEmbedding> {
    let local = s.local_info()?;
    if !local.is_local {
        return Err(Error::NotLocal);
    }
    let (p_s, lambda_s) = local.residue;
    let char_s = s.characteristic();
    let c_s = crate::arith::exact_log(char_s, spec.p);
    if p_s != spec.p || c_s.is_none() {
        return Err(Error::CharacteristicMismatch { p: spec.p, expected: spec.c, found: 0 });
    }
    let c_s = c_s.unwrap();
    if c_s != spec.c {
        return Err(Error::CharacteristicMismatch { p: spec.p, expected: spec.c, found: c_s });
    }
    if lambda_s % spec.lambda != 0 {
        return Err(Error::DegreeMismatch { lambda: spec.lambda, residue_degree: lambda_s });
    }
    let in_m = crate::abelian::indicator(s.size(), &local.maximal_ideal);
    let g = &spec.modulus;
    let dg: Vec<u64> = (1..g.len()).map(|i| (g[i] * i as u64) % spec.q()).collect();
    let mut xi = (0..s.size() as Elem)
        .find(|&x| in_m[eval_poly(s, g, x) as usize])
        .ok_or_else(|| Error::Precondition("no residue root of the modulus".into()))?;
    let units = (s.size() - local.maximal_ideal.len()) as u64;
    let mut steps = 0;
    loop {
        let gx = eval_poly(s, g, xi);
        if gx == 0 {
            break;
        }
        let u = eval_poly(s, &dg, xi);
        let u_inv = s.pow(u, units - 1);
        xi = s.sub(xi, s.mul(gx, u_inv));
        steps += 1;
        if steps > 64 {
            return Err(Error::Precondition("Hensel iteration did not terminate".into()));
        }
    }
    let mut powers = vec![s.one()];
    for _ in 1..spec.lambda {
        powers.push(s.mul(*powers.last().unwrap(), xi));
    }
    let table = spec
        .elements()
        .map(|a| {
            a.coeffs
                .iter()
                .zip(&powers)
                .fold(0, |acc, (&k, &pw)| s.add(acc, s.mul_int(k as i128, pw)))
        })
        .collect();
    let emb = RingEmbedding { source: spec.clone(), target: s.clone(), xi_image: xi, table };
    // products of basis elements, including the reduction by the modulus
    let basis: Vec<RingElement> = (0..spec.lambda as usize)
        .map(|i| {
            let mut e = spec.zero();
            e.coeffs[i] = 1;
            e
        })
        .collect();
    if emb.apply(&spec.one()) != s.one() {
        return Err(Error::NotAHomomorphism("phi(1) != 1".into()));
    }
    for a in &basis {
        for b in &basis {
            if emb.apply(&spec.mul(a, b)) != s.mul(emb.apply(a), emb.apply(b)) {
                return Err(Error::NotAHomomorphism("basis products".into()));
            }
        }
    }
    Ok(emb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(c: &[u64]) -> RingElement {
        RingElement::new(c.to_vec())
    }

    #[test]
    fn moduli() {
        assert_eq!(GaloisRingSpec::construct(2, 1, 3).unwrap().modulus, vec![0, 1]);
        assert_eq!(GaloisRingSpec::construct(2, 2, 1).unwrap().modulus, vec![1, 1, 1]);
        assert_eq!(GaloisRingSpec::construct(3, 2, 2).unwrap().modulus, vec![1, 0, 1]);
        assert!(matches!(GaloisRingSpec::construct(4, 1, 1), Err(Error::NotPrime(4))));
    }

    #[test]
    fn modulus_is_first_irreducible_in_scan_order() {
        // oracle: walk (a_{l-1}, ..., a_0) lexicographically and stop at the first irreducible
        for (p, l) in [(2, 3), (2, 4), (3, 3), (5, 2)] {
            let spec = GaloisRingSpec::construct(p, l, 1).unwrap();
            let mut first = None;
            'scan: for k in 0..ipow(p, l) {
                let mut digits = vec![0; l as usize];
                let mut r = k;
                for d in digits.iter_mut().rev() {
                    *d = r % p;
                    r /= p;
                }
                // digits[0] is the degree l-1 coefficient
                let mut f: Vec<u64> = digits.iter().rev().copied().collect();
                f.push(1);
                if is_irreducible_mod_p(&f, p) {
                    first = Some(f);
                    break 'scan;
                }
            }
            assert_eq!(Some(spec.modulus), first);
        }
    }

    #[test]
    fn arithmetic_examples() {
        let d = GaloisRingSpec::construct(3, 2, 2).unwrap();
        assert_eq!(d.mul(&d.xi(), &d.xi()), el(&[8, 0]));
        assert!(!d.is_unit(&el(&[3, 0])));
        assert_eq!(d.inverse(&d.xi()).unwrap(), el(&[0, 8]));
        let z8 = GaloisRingSpec::construct(2, 1, 3).unwrap();
        assert_eq!(z8.mul(&el(&[3]), &el(&[5])), el(&[7]));
        assert_eq!(z8.inverse(&el(&[3])).unwrap(), el(&[3]));
        assert!(z8.inverse(&el(&[2])).is_err());
        assert!(d.checked_mul(&el(&[1]), &el(&[1, 0])).is_err());
    }

    #[test]
    fn ring_axioms_exhaustive() {
        for (p, l, c) in [(3, 2, 2), (2, 2, 2), (2, 3, 1), (3, 1, 3)] {
            let d = GaloisRingSpec::construct(p, l, c).unwrap();
            let elems: Vec<RingElement> = d.elements().collect();
            for a in &elems {
                assert_eq!(d.add(a, &d.neg(a)), d.zero());
                assert_eq!(d.is_unit(a), d.valuation(a) == 0);
                if d.is_unit(a) {
                    assert_eq!(d.mul(a, &d.inverse(a).unwrap()), d.one());
                }
                for b in &elems {
                    assert_eq!(d.mul(a, b), d.mul(b, a));
                }
            }
            // associativity and distributivity on a stride of triples
            for a in elems.iter().step_by(3) {
                for b in elems.iter().step_by(2) {
                    for cc in &elems {
                        assert_eq!(d.mul(&d.mul(a, b), cc), d.mul(a, &d.mul(b, cc)));
                        assert_eq!(d.mul(a, &d.add(b, cc)), d.add(&d.mul(a, b), &d.mul(a, cc)));
                    }
                }
            }
        }
    }

    #[test]
    fn non_units_form_an_ideal() {
        let d = GaloisRingSpec::construct(2, 2, 2).unwrap();
        let nonunits: Vec<RingElement> = d.elements().filter(|a| !d.is_unit(a)).collect();
        assert_eq!(nonunits.len(), 4);
        for a in &nonunits {
            for b in d.elements() {
                assert!(!d.is_unit(&d.mul(a, &b)));
            }
            for b in &nonunits {
                assert!(!d.is_unit(&d.add(a, b)));
            }
        }
    }

    #[test]
    fn index_round_trip() {
        let d = GaloisRingSpec::construct(3, 2, 2).unwrap();
        for i in 0..d.size() as Elem {
            assert_eq!(d.index(&d.element(i)), i);
        }
        assert_eq!(d.index(&el(&[1, 0])), 9);
    }

    #[test]
    fn degree_one_matches_integers() {
        let d = GaloisRingSpec::construct(5, 1, 2).unwrap();
        for a in 0..25u64 {
            for b in 0..25u64 {
                assert_eq!(d.mul(&el(&[a]), &el(&[b])), el(&[a * b % 25]));
                assert_eq!(d.add(&el(&[a]), &el(&[b])), el(&[(a + b) % 25]));
            }
        }
    }

    #[test]
    fn hensel_identity_case() {
        let spec = GaloisRingSpec::construct(2, 2, 2).unwrap();
        let s = FiniteCommRing::polynomial_quotient(4, &[1, 1, 1]).unwrap();
        let emb = embed_into_local_ring(&spec, &s).unwrap();
        assert_eq!(s.decode(emb.xi_image), vec![0, 1]);
        emb.verify_exhaustive().unwrap();
    }

    #[test]
    fn hensel_one_step() {
        let spec = GaloisRingSpec::construct(2, 2, 2).unwrap();
        let s = FiniteCommRing::polynomial_quotient(4, &[3, 1, 1]).unwrap();
        let emb = embed_into_local_ring(&spec, &s).unwrap();
        let t_plus_2 = s.encode(&[2, 1]);
        assert_eq!(emb.xi_image, t_plus_2);
        // oracle: g(t+2) = (t+2)^2 + (t+2) + 1 computed by hand in S
        let t = s.encode(&[0, 1]);
        let sq = s.mul(t_plus_2, t_plus_2);
        assert_eq!(s.add(s.add(sq, t_plus_2), s.one()), 0);
        assert_ne!(s.add(s.add(s.mul(t, t), t), s.one()), 0);
        emb.verify_exhaustive().unwrap();
    }

    #[test]
    fn hensel_degree_mismatch() {
        let spec = GaloisRingSpec::construct(2, 2, 2).unwrap();
        let s = FiniteCommRing::polynomial_quotient(4, &[0, 0, 1]).unwrap();
        assert!(matches!(
            embed_into_local_ring(&spec, &s),
            Err(Error::DegreeMismatch { lambda: 2, residue_degree: 1 })
        ));
    }

    #[test]
    fn hensel_into_larger_residue_field() {
        // GR(2,1,2) = F_4 embeds into F_16
        let spec = GaloisRingSpec::construct(2, 2, 1).unwrap();
        let big = GaloisRingSpec::construct(2, 4, 1).unwrap().to_finite_ring();
        let emb = embed_into_local_ring(&spec, &big).unwrap();
        emb.verify_exhaustive().unwrap();
        let wrong_char = GaloisRingSpec::construct(2, 4, 2).unwrap().to_finite_ring();
        assert!(matches!(
            embed_into_local_ring(&spec, &wrong_char),
            Err(Error::CharacteristicMismatch { .. })
        ));
    }
}
