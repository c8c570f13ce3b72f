//! Coefficient rings: rationals, Gaussian rationals, and polynomials in a central formal `hbar`.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact commutative coefficient ring used by [`super::Poly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rat(r: Rat) -> Self;
    /// The imaginary unit, if the ring contains it.
    fn imag_unit() -> Option<Self> {
        None
    }
    /// The formal parameter, if the ring contains it.
    fn hbar() -> Option<Self> {
        None
    }
    /// True when `Display` needs parentheses inside a product.
    fn is_compound(&self) -> bool {
        false
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Coeff for Rat {
    fn zero() -> Self {
        rint(0)
    }
    fn one() -> Self {
        rint(1)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
}

/// Gaussian rational `re + im*i`.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Gauss {
    pub re: Rat,
    pub im: Rat,
}

impl Gauss {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gauss { re, im }
    }
    pub fn real(re: Rat) -> Self {
        Gauss { re, im: rint(0) }
    }
    pub fn i() -> Self {
        Gauss { re: rint(0), im: rint(1) }
    }
}

impl fmt::Display for Gauss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re0 = self.re.is_zero();
        let im0 = self.im.is_zero();
        match (re0, im0) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write_imag(f, &self.im),
            (false, false) => {
                write!(f, "{} + ", self.re)?;
                write_imag(f, &self.im)
            }
        }
    }
}

fn write_imag(f: &mut fmt::Formatter<'_>, im: &Rat) -> fmt::Result {
    if im.is_one() {
        write!(f, "i")
    } else if *im == rint(-1) {
        write!(f, "-i")
    } else {
        write!(f, "{}*i", im)
    }
}

impl Coeff for Gauss {
    fn zero() -> Self {
        Gauss::real(rint(0))
    }
    fn one() -> Self {
        Gauss::real(rint(1))
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_assign(&mut self, o: &Self) {
        self.re += &o.re;
        self.im += &o.im;
    }
    fn mul(&self, o: &Self) -> Self {
        Gauss {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
    fn neg(&self) -> Self {
        Gauss { re: -&self.re, im: -&self.im }
    }
    fn from_rat(r: Rat) -> Self {
        Gauss::real(r)
    }
    fn imag_unit() -> Option<Self> {
        Some(Gauss::i())
    }
    fn is_compound(&self) -> bool {
        !self.re.is_zero() && !self.im.is_zero()
    }
}

/// Polynomial in the formal central parameter `hbar` with Gaussian rational coefficients.
/// `c[k]` is the coefficient of `hbar^k`; trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct QiH {
    c: Vec<Gauss>,
}

impl QiH {
    pub fn from_coeffs(mut c: Vec<Gauss>) -> Self {
        while c.last().map_or(false, |g| g.is_zero()) {
            c.pop();
        }
        QiH { c }
    }
    pub fn gauss(g: Gauss) -> Self {
        QiH::from_coeffs(vec![g])
    }
    /// `g * hbar^k`
    pub fn monomial(g: Gauss, k: usize) -> Self {
        let mut c = vec![<Gauss as Coeff>::zero(); k];
        c.push(g);
        QiH::from_coeffs(c)
    }
    /// `-i * hbar`, the factor attached to each quantised fibre derivative.
    pub fn minus_i_hbar() -> Self {
        QiH::monomial(Gauss::new(rint(0), rint(-1)), 1)
    }
    pub fn coeffs(&self) -> &[Gauss] {
        &self.c
    }
    /// `self / hbar`, if there is no `hbar^0` part.
    pub fn lower_hbar(&self) -> Option<QiH> {
        match self.c.first() {
            None => Some(QiH::zero()),
            Some(g) if g.is_zero() => Some(QiH::from_coeffs(self.c[1..].to_vec())),
            _ => None,
        }
    }
    pub fn hbar_degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }
}

impl fmt::Display for QiH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .c
            .iter()
            .enumerate()
            .filter(|(_, g)| !g.is_zero())
            .map(|(k, g)| {
                let base = if g.is_compound() { format!("({})", g) } else { g.to_string() };
                match k {
                    0 => base,
                    1 => format!("{}*hbar", base),
                    _ => format!("{}*hbar^{}", base, k),
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl Coeff for QiH {
    fn zero() -> Self {
        QiH { c: Vec::new() }
    }
    fn one() -> Self {
        QiH::gauss(<Gauss as Coeff>::one())
    }
    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        if o.c.len() > self.c.len() {
            self.c.resize(o.c.len(), <Gauss as Coeff>::zero());
        }
        for (a, b) in self.c.iter_mut().zip(o.c.iter()) {
            a.add_assign(b);
        }
        while self.c.last().map_or(false, |g| g.is_zero()) {
            self.c.pop();
        }
    }
    fn mul(&self, o: &Self) -> Self {
        if self.c.is_empty() || o.c.is_empty() {
            return Self::zero();
        }
        let mut out = vec![<Gauss as Coeff>::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j].add_assign(&a.mul(b));
            }
        }
        QiH::from_coeffs(out)
    }
    fn neg(&self) -> Self {
        QiH { c: self.c.iter().map(|g| g.neg()).collect() }
    }
    fn from_rat(r: Rat) -> Self {
        QiH::gauss(Gauss::real(r))
    }
    fn imag_unit() -> Option<Self> {
        Some(QiH::gauss(Gauss::i()))
    }
    fn hbar() -> Option<Self> {
        Some(QiH::monomial(<Gauss as Coeff>::one(), 1))
    }
    fn is_compound(&self) -> bool {
        let nz = self.c.iter().filter(|g| !g.is_zero()).count();
        nz > 1 || self.c.iter().any(|g| g.is_compound())
    }
}

/// Lossless embedding of one coefficient ring into a larger one.
pub trait Embed<T> {
    fn embed(&self) -> T;
}

impl Embed<QiH> for Rat {
    fn embed(&self) -> QiH {
        QiH::from_rat(self.clone())
    }
}

impl Embed<Rat> for Rat {
    fn embed(&self) -> Rat {
        self.clone()
    }
}

impl Embed<QiH> for QiH {
    fn embed(&self) -> QiH {
        self.clone()
    }
}

/// Best-effort float value of a rational, used only for residual norms in reports.
pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(if num_traits::Signed::is_negative(r) { f64::NEG_INFINITY } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qih_arithmetic() {
        let i = QiH::imag_unit().unwrap();
        let h = QiH::hbar().unwrap();
        let mi_h = QiH::minus_i_hbar();
        assert_eq!(i.mul(&h).neg(), mi_h);
        // (-i hbar)^2 = -hbar^2
        let sq = mi_h.mul(&mi_h);
        assert_eq!(sq, QiH::monomial(Gauss::real(rint(-1)), 2));
        let mut z = mi_h.clone();
        z.add_assign(&mi_h.neg());
        assert!(z.is_zero());
    }

    #[test]
    fn gauss_display() {
        assert_eq!(Gauss::new(rat(1, 2), rint(-1)).to_string(), "1/2 + -i");
        assert_eq!(QiH::minus_i_hbar().to_string(), "-i*hbar");
    }
}
