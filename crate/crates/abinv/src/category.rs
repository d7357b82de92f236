//! The braided category of Z_N charges and its Gauss sums.
//!
//! Simple objects are labels p in Z_N. The braiding of two charges p, q is
//! the phase (e^{2 pi i/N})^{pq}, the twist is theta_p = eps^p c^{p^2} with
//! eps = +-1, and the S-matrix entry is eps^{p+q} c^{2pq}. All of these are
//! roots of unity of order dividing 2N, so they are tracked as exact
//! exponents mod 2N; working mod 2N instead of N is what lets eps = -1 and
//! odd N coexist without leaving exact arithmetic.
//!
//! The category is modular exactly when N is odd: invertibility of the
//! S-matrix reduces, through the Vandermonde factorization, to the N phases
//! c^{2p} being pairwise distinct, which happens iff 2 is invertible mod N.

use crate::report::Report;
use serde::Serialize;
use std::collections::HashSet;
use std::f64::consts::PI;

/// Errors from category construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CategoryError {
    /// The label group Z_N needs N >= 1.
    #[error("category order must be a positive integer")]
    InvalidOrder,
}

/// A complex number as two f64 components.
///
/// This is the only inexact type in the crate; it appears when a sum of
/// phases is finally evaluated. Comparisons use an absolute tolerance scaled
/// by magnitude, `1e-9 * (1 + |z|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl ComplexValue {
    pub const ZERO: ComplexValue = ComplexValue { re: 0.0, im: 0.0 };
    pub const ONE: ComplexValue = ComplexValue { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        ComplexValue { re, im }
    }

    pub fn real(x: f64) -> Self {
        ComplexValue { re: x, im: 0.0 }
    }

    pub fn add(self, other: ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re + other.re, self.im + other.im)
    }

    pub fn sub(self, other: ComplexValue) -> ComplexValue {
        ComplexValue::new(self.re - other.re, self.im - other.im)
    }

    pub fn mul(self, other: ComplexValue) -> ComplexValue {
        ComplexValue::new(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )
    }

    pub fn scale(self, factor: f64) -> ComplexValue {
        ComplexValue::new(self.re * factor, self.im * factor)
    }

    pub fn conj(self) -> ComplexValue {
        ComplexValue::new(self.re, -self.im)
    }

    pub fn abs_squared(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.abs_squared().sqrt()
    }

    pub fn inverse(self) -> ComplexValue {
        let d = self.abs_squared();
        ComplexValue::new(self.re / d, -self.im / d)
    }

    /// Integer power by repeated squaring; negative exponents go through the
    /// inverse.
    pub fn powi(self, k: i64) -> ComplexValue {
        if k < 0 {
            return self.inverse().powi(-k);
        }
        let mut base = self;
        let mut exp = k as u64;
        let mut acc = ComplexValue::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            exp >>= 1;
        }
        acc
    }

    pub fn approx_eq(self, other: ComplexValue) -> bool {
        let scale = 1.0 + self.abs().max(other.abs());
        self.sub(other).abs() <= 1e-9 * scale
    }

    pub fn approx_eq_with(self, other: ComplexValue, tol: f64) -> bool {
        let scale = 1.0 + self.abs().max(other.abs());
        self.sub(other).abs() <= tol * scale
    }
}

impl std::fmt::Display for ComplexValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.im >= 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

/// An exact root of unity `e^{2 pi i num / order}` with `0 <= num < order`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseExponent {
    pub num: u64,
    pub order: u64,
}

impl PhaseExponent {
    /// Reduces `num` into `[0, order)`. Panics if `order` is zero.
    pub fn new(num: i64, order: u64) -> Self {
        assert!(order > 0, "phase order must be positive");
        PhaseExponent {
            num: num.rem_euclid(order as i64) as u64,
            order,
        }
    }

    pub fn one(order: u64) -> Self {
        PhaseExponent::new(0, order)
    }

    /// Product of two roots of unity, at the lcm of the orders.
    pub fn mul(self, other: PhaseExponent) -> PhaseExponent {
        let order = lcm_u64(self.order, other.order);
        let a = (self.num as u128) * ((order / self.order) as u128);
        let b = (other.num as u128) * ((order / other.order) as u128);
        PhaseExponent {
            num: ((a + b) % order as u128) as u64,
            order,
        }
    }

    /// k-th power, with negative k meaning conjugation.
    pub fn pow(self, k: i64) -> PhaseExponent {
        let num = (self.num as i128) * (k as i128);
        PhaseExponent {
            num: num.rem_euclid(self.order as i128) as u64,
            order: self.order,
        }
    }

    pub fn conj(self) -> PhaseExponent {
        self.pow(-1)
    }

    pub fn value(self) -> ComplexValue {
        unit_phase(self.num, self.order)
    }
}

impl PartialEq for PhaseExponent {
    /// Equality as complex numbers, independent of the representation order.
    fn eq(&self, other: &Self) -> bool {
        (self.num as u128) * (other.order as u128) == (other.num as u128) * (self.order as u128)
    }
}

impl Eq for PhaseExponent {}

impl std::fmt::Display for PhaseExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e^(2*pi*i*{}/{})", self.num, self.order)
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / gcd_u64(a, b) * b
}

fn unit_phase(num: u64, order: u64) -> ComplexValue {
    let theta = 2.0 * PI * (num as f64) / (order as f64);
    ComplexValue::new(theta.cos(), theta.sin())
}

/// Exact tally of roots of unity of one fixed order: counts per exponent
/// class stay integers, and the collapse to a complex number happens once,
/// in a fixed traversal order, so results are reproducible bit for bit.
#[derive(Debug, Clone)]
pub struct PhaseSum {
    order: u64,
    counts: Vec<i64>,
}

impl PhaseSum {
    pub fn new(order: u64) -> Self {
        assert!(order > 0, "phase order must be positive");
        PhaseSum {
            order,
            counts: vec![0; order as usize],
        }
    }

    pub fn add_exponent(&mut self, num: u64) {
        self.counts[(num % self.order) as usize] += 1;
    }

    pub fn value(&self) -> ComplexValue {
        let mut acc = ComplexValue::ZERO;
        for (e, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            acc = acc.add(unit_phase(e as u64, self.order).scale(c as f64));
        }
        acc
    }
}

/// Sign choice for the twist, theta_1 = eps * c_{1,1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    fn bit(self) -> u64 {
        match self {
            Epsilon::Plus => 0,
            Epsilon::Minus => 1,
        }
    }
}

impl std::fmt::Display for Epsilon {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Epsilon::Plus => write!(f, "+1"),
            Epsilon::Minus => write!(f, "-1"),
        }
    }
}

/// The braided category with label group Z_N and twist sign eps.
#[derive(Debug, Clone, Copy)]
pub struct CategoryZn {
    n: u64,
    epsilon: Epsilon,
}

impl CategoryZn {
    pub fn new(n: u64, epsilon: Epsilon) -> Result<Self, CategoryError> {
        if n == 0 {
            return Err(CategoryError::InvalidOrder);
        }
        Ok(CategoryZn { n, epsilon })
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    /// Braiding phase of charges p and q: exponent `2pq mod 2N`.
    pub fn braiding(&self, p: u64, q: u64) -> PhaseExponent {
        let p = (p % self.n) as u128;
        let q = (q % self.n) as u128;
        let order = 2 * self.n;
        PhaseExponent {
            num: ((2 * p * q) % order as u128) as u64,
            order,
        }
    }

    /// Twist of charge p: theta_p = eps^p c^{p^2}, exponent
    /// `N*[eps]*p + 2 p^2 mod 2N`.
    pub fn twist(&self, p: u64) -> PhaseExponent {
        self.twist_at((p % self.n) as i64)
    }

    /// The twist formula evaluated at an arbitrary integer argument. The
    /// defining equations of the category are identities of this function,
    /// so the axiom checks use it on unreduced sums of labels.
    fn twist_at(&self, s: i64) -> PhaseExponent {
        let order = 2 * self.n;
        let s = s as i128;
        let num = (self.epsilon.bit() as i128) * (self.n as i128) * s + 2 * s * s;
        PhaseExponent {
            num: num.rem_euclid(order as i128) as u64,
            order,
        }
    }

    /// Quantum dimension of charge p: eps^p.
    pub fn quantum_dimension(&self, p: u64) -> PhaseExponent {
        let order = 2 * self.n;
        let p = (p % self.n) as u128;
        PhaseExponent {
            num: ((self.epsilon.bit() as u128 * self.n as u128 * p) % order as u128) as u64,
            order,
        }
    }

    /// S-matrix entry: eps^{p+q} c^{2pq}, exponent `N*[eps]*(p+q) + 4pq mod 2N`.
    pub fn s_matrix_entry(&self, p: u64, q: u64) -> PhaseExponent {
        let p = (p % self.n) as u128;
        let q = (q % self.n) as u128;
        let order = 2 * self.n;
        let num = (self.epsilon.bit() as u128) * (self.n as u128) * (p + q) + 4 * p * q;
        PhaseExponent {
            num: (num % order as u128) as u64,
            order,
        }
    }

    /// Whether the S-matrix is invertible, i.e. the category is modular.
    ///
    /// Checked by pairwise distinctness of the N phases c^{2p} (the nodes of
    /// the Vandermonde factorization of S), which holds iff N is odd.
    pub fn is_modular(&self) -> bool {
        let mut seen = HashSet::new();
        let distinct = (0..self.n).all(|p| seen.insert((2 * p) % self.n));
        debug_assert_eq!(distinct, self.n % 2 == 1);
        distinct
    }
}

/// The Gauss sum `Delta_n = sum_{p=0}^{n-1} e^{-2 pi i p^2 / n}`.
///
/// For n = 2 mod 4 the terms cancel exactly in pairs, and the function
/// returns a bitwise-zero result rather than a rounding residue; in every
/// other case the value is the evaluated sum. |Delta_n|^2 is n for odd n and
/// 2n for n = 0 mod 4.
pub fn gauss_delta(n: u64) -> ComplexValue {
    assert!(n >= 1, "gauss sum needs n >= 1");
    if n % 4 == 2 {
        return ComplexValue::ZERO;
    }
    let mut sum = PhaseSum::new(n);
    for p in 0..n {
        let sq = ((p as u128) * (p as u128)) % (n as u128);
        let neg = (n as u128 - sq) % (n as u128);
        sum.add_exponent(neg as u64);
    }
    sum.value()
}

/// The half Gauss sum `Delta'_k = sum_{p=0}^{2k-1} e^{-2 pi i p^2 / 4k}`,
/// the normalization constant of the reduced surgery formula at level 4k.
/// Satisfies 2 Delta' = Delta_{4k} and |Delta'|^2 = 2k.
pub fn gauss_delta_half(k: u64) -> ComplexValue {
    assert!(k >= 1, "half gauss sum needs k >= 1");
    let order = 4 * k;
    let mut sum = PhaseSum::new(order);
    for p in 0..2 * k {
        let sq = ((p as u128) * (p as u128)) % (order as u128);
        let neg = (order as u128 - sq) % (order as u128);
        sum.add_exponent(neg as u64);
    }
    sum.value()
}

/// Exhaustively verifies the defining relations of the braided structure:
/// bilinearity of the braiding, the twist composition law, duality
/// invariance of the twist, and the S-matrix relations. All comparisons are
/// exact exponent arithmetic; nothing is evaluated to floating point.
pub fn verify_ribbon_axioms(cat: &CategoryZn) -> Report {
    let n = cat.order();
    let mut report = Report::new(format!(
        "ribbon relations for Z_{} with eps = {}",
        n,
        cat.epsilon()
    ));

    let mut check_all = |label: &str, fail: Option<String>, cases: u64| {
        let pass = fail.is_none();
        report.push(
            label,
            fail.unwrap_or_else(|| format!("{cases} cases, no violation")),
            format!("{cases} cases, no violation"),
            pass,
        );
    };

    let mut first_fail = None;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                let lhs = cat.braiding((p + q) % n, r);
                let rhs = cat.braiding(p, r).mul(cat.braiding(q, r));
                if lhs != rhs {
                    first_fail = Some(format!("p={p} q={q} r={r}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    check_all("braiding additive in the first label", first_fail, n * n * n);

    let mut first_fail = None;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                let lhs = cat.braiding(p, (q + r) % n);
                let rhs = cat.braiding(p, q).mul(cat.braiding(p, r));
                if lhs != rhs {
                    first_fail = Some(format!("p={p} q={q} r={r}: {lhs} vs {rhs}"));
                }
            }
        }
    }
    check_all("braiding additive in the second label", first_fail, n * n * n);

    let mut first_fail = None;
    for p in 0..n {
        for q in 0..n {
            let lhs = cat.twist_at((p + q) as i64);
            let rhs = cat
                .braiding(q, p)
                .mul(cat.braiding(p, q))
                .mul(cat.twist(p))
                .mul(cat.twist(q));
            if lhs != rhs {
                first_fail = Some(format!("p={p} q={q}: {lhs} vs {rhs}"));
            }
        }
    }
    check_all("twist composition law", first_fail, n * n);

    let mut first_fail = None;
    for p in 0..n {
        let lhs = cat.twist_at(-(p as i64));
        let rhs = cat.twist(p);
        if lhs != rhs {
            first_fail = Some(format!("p={p}: {lhs} vs {rhs}"));
        }
    }
    check_all("twist invariant under duality", first_fail, n);

    let mut first_fail = None;
    for p in 0..n {
        for q in 0..n {
            if cat.s_matrix_entry(p, q) != cat.s_matrix_entry(q, p) {
                first_fail = Some(format!("p={p} q={q}"));
            }
        }
    }
    check_all("s-matrix symmetric", first_fail, n * n);

    let mut first_fail = None;
    for p in 0..n {
        let lhs = cat.s_matrix_entry(p, 0);
        let rhs = cat.quantum_dimension(p);
        if lhs != rhs {
            first_fail = Some(format!("p={p}: {lhs} vs {rhs}"));
        }
    }
    check_all("s-matrix first row equals quantum dimensions", first_fail, n);

    let mut first_fail = None;
    for p in 0..n {
        for q in 0..n {
            let lhs = cat.s_matrix_entry(p, q);
            let eps_factor = PhaseExponent {
                num: ((cat.epsilon.bit() as u128 * n as u128 * (p + q) as u128)
                    % (2 * n) as u128) as u64,
                order: 2 * n,
            };
            let rhs = eps_factor
                .mul(cat.twist_at((p + q) as i64))
                .mul(cat.twist(p).conj())
                .mul(cat.twist(q).conj());
            if lhs != rhs {
                first_fail = Some(format!("p={p} q={q}: {lhs} vs {rhs}"));
            }
        }
    }
    check_all("s-matrix equals twisted theta ratio", first_fail, n * n);

    report
}
