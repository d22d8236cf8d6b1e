//! Truncated multivariate Taylor polynomials in the four bundle coordinates
//! `(x¹, x², y¹, y²)`.
//!
//! A [`Jet`] of degree `d` stores the Taylor coefficients `c_α` of a scalar
//! field around a base point for every multi-index `|α| ≤ d`. Arithmetic is
//! exact up to truncation, so a partial derivative `∂^α f = α! c_α` carries
//! no discretisation error. Differentiating a jet lowers its degree by one,
//! which is how nested geometric constructions (metric → spray → connection
//! → curvature → derivatives of curvature) keep track of how much
//! information is left.
//!
//! Coefficients are laid out in graded order, so the coefficients of all
//! monomials of degree `≤ k` form a prefix of the coefficient vector. That
//! makes truncation a slice operation.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

/// Number of bundle coordinates.
pub const NVARS: usize = 4;

/// Largest supported truncation degree.
pub const MAX_DEGREE: usize = 7;

/// Degree tag used for constants; constants never limit the degree of a result.
const CONSTANT: usize = usize::MAX;

struct Layout {
    exponents: Vec<[u8; NVARS]>,
    /// `prefix[d]` = number of monomials of degree `≤ d`.
    prefix: Vec<usize>,
    /// `(i, j, k)` with `mono[i] * mono[j] = mono[k]`, sorted by degree of `k`.
    products: Vec<(u32, u32, u32)>,
    /// `product_end[d]` = number of product triples whose result has degree `≤ d`.
    product_end: Vec<usize>,
    /// `lowered[v][i]` = `(index of mono[i] / x_v, exponent of x_v in mono[i])`.
    lowered: [Vec<Option<(u32, f64)>>; NVARS],
    lookup: Vec<u32>,
}

const BASE: usize = MAX_DEGREE + 1;

fn encode(e: &[u8; NVARS]) -> usize {
    e.iter().fold(0, |acc, &k| acc * BASE + k as usize)
}

fn layout() -> &'static Layout {
    static LAYOUT: OnceLock<Layout> = OnceLock::new();
    LAYOUT.get_or_init(|| {
        let mut exponents = Vec::new();
        let mut prefix = Vec::with_capacity(MAX_DEGREE + 1);
        for d in 0..=MAX_DEGREE {
            for a in (0..=d).rev() {
                for b in (0..=d - a).rev() {
                    for c in (0..=d - a - b).rev() {
                        let e = d - a - b - c;
                        exponents.push([a as u8, b as u8, c as u8, e as u8]);
                    }
                }
            }
            prefix.push(exponents.len());
        }

        let mut lookup = vec![u32::MAX; BASE.pow(NVARS as u32)];
        for (i, e) in exponents.iter().enumerate() {
            lookup[encode(e)] = i as u32;
        }

        let degree = |e: &[u8; NVARS]| e.iter().map(|&k| k as usize).sum::<usize>();
        let mut products = Vec::new();
        for (i, a) in exponents.iter().enumerate() {
            for (j, b) in exponents.iter().enumerate() {
                if degree(a) + degree(b) > MAX_DEGREE {
                    continue;
                }
                let mut s = [0u8; NVARS];
                for v in 0..NVARS {
                    s[v] = a[v] + b[v];
                }
                products.push((i as u32, j as u32, lookup[encode(&s)]));
            }
        }
        products.sort_by_key(|&(_, _, k)| k);
        let mut product_end = vec![0; MAX_DEGREE + 1];
        for (d, end) in product_end.iter_mut().enumerate() {
            *end = products.partition_point(|&(_, _, k)| (k as usize) < prefix[d]);
        }

        let lowered = std::array::from_fn(|v| {
            exponents
                .iter()
                .map(|e| {
                    if e[v] == 0 {
                        None
                    } else {
                        let mut lower = *e;
                        lower[v] -= 1;
                        Some((lookup[encode(&lower)], e[v] as f64))
                    }
                })
                .collect()
        });

        Layout {
            exponents,
            prefix,
            products,
            product_end,
            lowered,
            lookup,
        }
    })
}

/// Number of monomials in four variables of total degree `≤ degree`.
pub fn monomial_count(degree: usize) -> usize {
    layout().prefix[degree]
}

/// A truncated Taylor polynomial around a fixed base point of the slit bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Jet {
    /// A constant; it adapts to the degree of whatever it is combined with.
    pub fn constant(value: f64) -> Self {
        Jet {
            degree: CONSTANT,
            coeffs: vec![value],
        }
    }

    /// The coordinate function `z_var` expanded around `value`.
    pub fn variable(value: f64, var: usize, degree: usize) -> Self {
        assert!(var < NVARS, "variable index {var} out of range");
        assert!(degree <= MAX_DEGREE, "jet degree {degree} exceeds {MAX_DEGREE}");
        let mut coeffs = vec![0.0; monomial_count(degree)];
        coeffs[0] = value;
        if degree >= 1 {
            // Degree-one monomials follow the constant term in the order x¹, x², y¹, y².
            coeffs[1 + var] = 1.0;
        }
        Jet { degree, coeffs }
    }

    /// Seeds the four coordinate functions at `z`.
    pub fn seed(z: [f64; NVARS], degree: usize) -> [Jet; NVARS] {
        std::array::from_fn(|v| Jet::variable(z[v], v, degree))
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn is_constant(&self) -> bool {
        self.degree == CONSTANT
    }

    /// Truncation degree, or `None` for constants.
    pub fn degree(&self) -> Option<usize> {
        (!self.is_constant()).then_some(self.degree)
    }

    /// Taylor coefficient of the monomial with exponents `alpha`.
    pub fn coefficient(&self, alpha: [u8; NVARS]) -> f64 {
        let order: usize = alpha.iter().map(|&a| a as usize).sum();
        if self.is_constant() {
            return if order == 0 { self.coeffs[0] } else { 0.0 };
        }
        if order > self.degree {
            return f64::NAN;
        }
        self.coeffs[layout().lookup[encode(&alpha)] as usize]
    }

    /// Mixed partial derivative `∂^α f` at the base point.
    pub fn derivative(&self, alpha: [u8; NVARS]) -> f64 {
        let factorial: f64 = alpha.iter().map(|&a| (1..=a as u32).product::<u32>() as f64).product();
        self.coefficient(alpha) * factorial
    }

    /// Iterates `(α, ∂^α f)` over every multi-index carried by the jet.
    pub fn derivatives(&self) -> impl Iterator<Item = ([u8; NVARS], f64)> + '_ {
        let lay = layout();
        let n = if self.is_constant() { 1 } else { self.coeffs.len() };
        lay.exponents[..n]
            .iter()
            .map(move |&alpha| (alpha, self.derivative(alpha)))
    }

    /// Partial derivative with respect to coordinate `var` as a jet of one degree less.
    pub fn partial(&self, var: usize) -> Jet {
        if self.is_constant() {
            return Jet::constant(0.0);
        }
        assert!(
            self.degree > 0,
            "cannot differentiate a degree-0 jet; raise the evaluation degree"
        );
        let lay = layout();
        let n = lay.prefix[self.degree - 1];
        let mut out = vec![0.0; n];
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            if let Some((low, k)) = lay.lowered[var][i] {
                out[low as usize] += k * c;
            }
        }
        Jet {
            degree: self.degree - 1,
            coeffs: out,
        }
    }

    /// Drops every coefficient above `degree`.
    pub fn truncate(&self, degree: usize) -> Jet {
        if self.is_constant() || degree >= self.degree {
            return self.clone();
        }
        Jet {
            degree,
            coeffs: self.coeffs[..monomial_count(degree)].to_vec(),
        }
    }

    pub fn scale(&self, k: f64) -> Jet {
        Jet {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn joint_degree(&self, other: &Jet) -> usize {
        self.degree.min(other.degree)
    }

    /// Evaluates `Σ_k taylor[k] · (self − self(0))^k`, i.e. composes a
    /// univariate function, given its Taylor coefficients at the base value,
    /// with this jet.
    pub fn compose(&self, taylor: &[f64]) -> Jet {
        if self.is_constant() {
            return Jet::constant(taylor[0]);
        }
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = self.degree.min(taylor.len() - 1);
        let mut acc = Jet::constant(taylor[top]);
        for k in (0..top).rev() {
            acc = &acc * &h;
            acc.coeffs[0] += taylor[k];
        }
        if acc.is_constant() {
            // Degree-0 input: the loop above never ran.
            let mut out = self.clone();
            out.coeffs[0] = taylor[0];
            return out;
        }
        acc
    }

    fn taylor_len(&self) -> usize {
        if self.is_constant() {
            1
        } else {
            self.degree + 1
        }
    }

    pub fn recip(&self) -> Jet {
        let a = self.value();
        let t: Vec<f64> = (0..self.taylor_len())
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / a.powi(k as i32 + 1)
            })
            .collect();
        self.compose(&t)
    }

    pub fn powf(&self, p: f64) -> Jet {
        let a = self.value();
        let mut t = Vec::with_capacity(self.taylor_len());
        let mut binom = 1.0;
        for k in 0..self.taylor_len() {
            t.push(binom * a.powf(p - k as f64));
            binom *= (p - k as f64) / (k as f64 + 1.0);
        }
        self.compose(&t)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Jet::constant(1.0);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn exp(&self) -> Jet {
        let ea = self.value().exp();
        let mut t = Vec::with_capacity(self.taylor_len());
        let mut fact = 1.0;
        for k in 0..self.taylor_len() {
            if k > 0 {
                fact *= k as f64;
            }
            t.push(ea / fact);
        }
        self.compose(&t)
    }

    pub fn ln(&self) -> Jet {
        let a = self.value();
        let t: Vec<f64> = (0..self.taylor_len())
            .map(|k| {
                if k == 0 {
                    a.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    sign / (k as f64 * a.powi(k as i32))
                }
            })
            .collect();
        self.compose(&t)
    }

    fn trig(&self, phase: f64) -> Jet {
        let a = self.value();
        let mut fact = 1.0;
        let t: Vec<f64> = (0..self.taylor_len())
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                (a + phase + k as f64 * std::f64::consts::FRAC_PI_2).sin() / fact
            })
            .collect();
        self.compose(&t)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0.0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(std::f64::consts::FRAC_PI_2)
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

fn add_into(dst: &mut [f64], src: &[f64], sign: f64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += sign * s;
    }
}

fn combine(a: &Jet, b: &Jet, sign: f64) -> Jet {
    if a.is_constant() && b.is_constant() {
        return Jet::constant(a.coeffs[0] + sign * b.coeffs[0]);
    }
    let degree = a.joint_degree(b);
    let n = monomial_count(degree);
    let mut coeffs = vec![0.0; n];
    add_into(&mut coeffs, &a.coeffs[..a.coeffs.len().min(n)], 1.0);
    add_into(&mut coeffs, &b.coeffs[..b.coeffs.len().min(n)], sign);
    Jet { degree, coeffs }
}

fn multiply(a: &Jet, b: &Jet) -> Jet {
    if a.is_constant() {
        return b.scale(a.coeffs[0]);
    }
    if b.is_constant() {
        return a.scale(b.coeffs[0]);
    }
    let degree = a.joint_degree(b);
    let lay = layout();
    let mut coeffs = vec![0.0; lay.prefix[degree]];
    let (ac, bc) = (&a.coeffs, &b.coeffs);
    for &(i, j, k) in &lay.products[..lay.product_end[degree]] {
        coeffs[k as usize] += ac[i as usize] * bc[j as usize];
    }
    Jet { degree, coeffs }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        combine(self, rhs, 1.0)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        combine(self, rhs, -1.0)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        multiply(self, rhs)
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        if rhs.is_constant() {
            return self.scale(1.0 / rhs.coeffs[0]);
        }
        multiply(self, &rhs.recip())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { (&self).$m(&rhs) }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $m(self, rhs: &Jet) -> Jet { (&self).$m(rhs) }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet { self.$m(&rhs) }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet { (&self).$m(&Jet::constant(rhs)) }
        }
        impl $tr<f64> for &Jet {
            type Output = Jet;
            fn $m(self, rhs: f64) -> Jet { self.$m(&Jet::constant(rhs)) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = &*self + &rhs;
    }
}

/// `Σ_i a_i b_i` over paired jets.
pub fn dot<'a>(a: impl IntoIterator<Item = &'a Jet>, b: impl IntoIterator<Item = &'a Jet>) -> Jet {
    a.into_iter().zip(b).fold(Jet::constant(0.0), |acc, (x, y)| acc + x * y)
}
