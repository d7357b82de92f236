//! First-homology data of closed oriented 3-manifolds: the free rank and
//! torsion divisor chain, the torsion linking form, and the parity
//! bookkeeping that governs when the squared Chern-Simons magnitude
//! vanishes.
//!
//! The linking form is carried exactly: entry (i, j) is the rational
//! q[i][j] / p[i] reduced mod 1, stored as the integer numerator q[i][j] in
//! [0, p[i]). Construction enforces symmetry, unit self-linking on the
//! diagonal, and nondegeneracy, so every downstream phase sum can trust the
//! form it is handed.

use crate::linalg::{smith_normal_form, IntegerMatrix};
use crate::tv::CellComplex;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Above this torsion subgroup order, nondegeneracy is decided from Smith
/// divisors instead of enumerating the group.
pub const NONDEGENERACY_BRUTE_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("torsion divisors must be >= 2 and each must divide the next")]
    InvalidTorsionChain,
    #[error("dimensions do not match the torsion rank")]
    DimensionMismatch,
    #[error("linking numerators must satisfy q[i][j] / p[i] = q[j][i] / p[j]")]
    NonSymmetricForm,
    #[error("diagonal numerator q[i][i] must be a unit mod p[i]")]
    DiagonalNotUnit,
    #[error("linking form is degenerate")]
    DegenerateForm,
    #[error("modulus must be a positive integer")]
    InvalidModulus,
    #[error("coupling constant must be a positive integer")]
    InvalidCoupling,
}

/// Isomorphism type of H_1: free rank `b1` plus the invariant-factor chain
/// of the torsion subgroup (each entry >= 2, each dividing the next).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyProfile {
    b1: usize,
    torsion: Vec<BigInt>,
}

fn valid_chain(torsion: &[BigInt]) -> bool {
    let two = BigInt::from(2);
    torsion.iter().all(|p| *p >= two)
        && torsion.windows(2).all(|w| (&w[1] % &w[0]).is_zero())
}

impl HomologyProfile {
    pub fn new(b1: usize, torsion: Vec<BigInt>) -> Result<Self, TopologyError> {
        if !valid_chain(&torsion) {
            return Err(TopologyError::InvalidTorsionChain);
        }
        Ok(HomologyProfile { b1, torsion })
    }

    /// The profile of a homology sphere: b1 = 0, no torsion.
    pub fn trivial() -> Self {
        HomologyProfile { b1: 0, torsion: Vec::new() }
    }

    /// Builds a profile from raw Smith divisors, dropping units. The
    /// divisor-chain property of Smith normal form makes this infallible.
    pub fn from_snf_divisors(b1: usize, divisors: &[BigInt]) -> Self {
        let torsion: Vec<BigInt> = divisors
            .iter()
            .filter(|d| d.abs() > BigInt::one())
            .map(|d| d.abs())
            .collect();
        debug_assert!(valid_chain(&torsion));
        HomologyProfile { b1, torsion }
    }

    pub fn b1(&self) -> usize {
        self.b1
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn torsion_rank(&self) -> usize {
        self.torsion.len()
    }

    /// Order of the torsion subgroup, the product of the divisors.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

/// `|H^1(M, Z_n)| = n^b1 * prod_i gcd(n, p_i)`, the size of the n-torsion
/// character lattice.
pub fn h1_order_mod_n(profile: &HomologyProfile, n: u64) -> Result<BigInt, TopologyError> {
    if n == 0 {
        return Err(TopologyError::InvalidModulus);
    }
    let n = BigInt::from(n);
    let mut order = n.pow(profile.b1 as u32);
    for p in &profile.torsion {
        order *= n.gcd(p);
    }
    Ok(order)
}

/// The torsion linking form: a symmetric nondegenerate Q/Z-valued pairing on
/// the torsion subgroup, entry (i, j) equal to q[i][j] / p[i] mod 1 on the
/// chain generators. Self-linkings are units mod their divisor, which keeps
/// every diagonal phase a primitive p_i-th root contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingForm {
    torsion: Vec<BigInt>,
    q: IntegerMatrix,
}

impl LinkingForm {
    /// Validates the divisor chain, shape, symmetry across denominators,
    /// unit diagonal, and nondegeneracy; numerators are normalized into
    /// [0, p_i) first.
    pub fn new(torsion: Vec<BigInt>, q: IntegerMatrix) -> Result<Self, TopologyError> {
        if !valid_chain(&torsion) {
            return Err(TopologyError::InvalidTorsionChain);
        }
        let d = torsion.len();
        if q.rows() != d || q.cols() != d {
            return Err(TopologyError::DimensionMismatch);
        }
        let mut norm = IntegerMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                norm.set(i, j, q.get(i, j).mod_floor(&torsion[i]));
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                if norm.get(i, j) * &torsion[j] != norm.get(j, i) * &torsion[i] {
                    return Err(TopologyError::NonSymmetricForm);
                }
            }
        }
        for i in 0..d {
            if !norm.get(i, i).gcd(&torsion[i]).is_one() {
                return Err(TopologyError::DiagonalNotUnit);
            }
        }
        let order: BigInt = torsion.iter().product();
        let nondegenerate = if order <= BigInt::from(NONDEGENERACY_BRUTE_CAP) {
            nondegenerate_brute(&torsion, &norm)
        } else {
            nondegenerate_structural(&torsion, &norm)
        };
        if !nondegenerate {
            return Err(TopologyError::DegenerateForm);
        }
        Ok(LinkingForm { torsion, q: norm })
    }

    /// The empty form on a trivial torsion subgroup.
    pub fn empty() -> Self {
        LinkingForm { torsion: Vec::new(), q: IntegerMatrix::zeros(0, 0) }
    }

    pub fn rank(&self) -> usize {
        self.torsion.len()
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    /// Normalized numerator matrix, q[i][j] in [0, p_i).
    pub fn numerators(&self) -> &IntegerMatrix {
        &self.q
    }

    /// Entry (i, j) as the exact rational q[i][j] / p[i] in [0, 1).
    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.q.get(i, j).clone(), self.torsion[i].clone())
    }
}

/// Evaluates the pairing on torsion classes expressed in chain coordinates:
/// `sum_{i,j} kappa_i tau_j q[i][j] / p[i]` reduced into [0, 1). Coordinates
/// only matter mod their divisor.
pub fn linking_eval(
    form: &LinkingForm,
    kappa: &[BigInt],
    tau: &[BigInt],
) -> Result<BigRational, TopologyError> {
    let d = form.rank();
    if kappa.len() != d || tau.len() != d {
        return Err(TopologyError::DimensionMismatch);
    }
    let mut total = BigRational::zero();
    for i in 0..d {
        for j in 0..d {
            let num = &kappa[i] * &tau[j] * form.q.get(i, j);
            total += BigRational::new(num, form.torsion[i].clone());
        }
    }
    let frac = &total - total.floor();
    Ok(frac)
}

/// Enumerates the torsion subgroup and checks that only zero pairs
/// integrally with everything. Only used when the order fits the cap.
pub(crate) fn nondegenerate_brute(torsion: &[BigInt], q: &IntegerMatrix) -> bool {
    let d = torsion.len();
    if d == 0 {
        return true;
    }
    let p: Vec<u64> = torsion
        .iter()
        .map(|t| t.to_u64().expect("order under brute cap"))
        .collect();
    let big = *p.last().expect("nonempty");
    // Scaled numerators a[i][j] = q[i][j] * (p_d / p_i), so the pairing with
    // e_j is integral exactly when sum_i kappa_i a[i][j] = 0 mod p_d.
    let mut a = vec![vec![0u64; d]; d];
    for i in 0..d {
        for j in 0..d {
            let scale = big / p[i];
            a[i][j] = (q.get(i, j).to_u64().expect("normalized numerator") * scale) % big;
        }
    }
    let mut kappa = vec![0u64; d];
    'outer: loop {
        // Advance first so the zero vector is skipped.
        for (digit, modulus) in kappa.iter_mut().zip(&p) {
            *digit += 1;
            if *digit < *modulus {
                let pairs_trivially = (0..d).all(|j| {
                    let mut acc: u128 = 0;
                    for i in 0..d {
                        acc += (kappa[i] as u128) * (a[i][j] as u128);
                    }
                    acc % (big as u128) == 0
                });
                if pairs_trivially {
                    return false;
                }
                continue 'outer;
            }
            *digit = 0;
        }
        // All digits wrapped: only the zero vector remains.
        return true;
    }
}

/// Decides nondegeneracy from Smith divisors: the radical size is the
/// solution count of the scaled numerator system mod p_d divided by the
/// index of the torsion subgroup in (Z_{p_d})^d.
pub(crate) fn nondegenerate_structural(torsion: &[BigInt], q: &IntegerMatrix) -> bool {
    let d = torsion.len();
    if d == 0 {
        return true;
    }
    let big = torsion.last().expect("nonempty").clone();
    let mut a = IntegerMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            a.set(i, j, q.get(i, j) * (&big / &torsion[i]));
        }
    }
    // Solutions of A^T kappa = 0 mod p_d over (Z_{p_d})^d, counted from the
    // Smith divisors with a big modulus.
    let snf = smith_normal_form(&a.transpose());
    let mut count = big.pow((d - snf.rank) as u32);
    for divisor in &snf.d[..snf.rank] {
        count *= divisor.gcd(&big);
    }
    let mut index = BigInt::one();
    for p in torsion {
        index *= &big / p;
    }
    let (radical, rem) = count.div_rem(&index);
    debug_assert!(rem.is_zero(), "radical count must divide evenly");
    radical.is_one()
}

/// Degree-one homology of a validated cell complex: free rank
/// `edges - rank d1 - rank d2`, torsion from the nonunit Smith divisors of
/// the face boundary.
pub fn homology_from_complex(complex: &CellComplex) -> HomologyProfile {
    let rank1 = smith_normal_form(complex.boundary1()).rank;
    let snf2 = smith_normal_form(complex.boundary2());
    let b1 = complex.edges() - rank1 - snf2.rank;
    HomologyProfile::from_snf_divisors(b1, &snf2.d[..snf2.rank])
}

/// Torsion divisors split by the parity of their reduced parts
/// `p' = p / gcd(k, p)`: `alpha` counts odd p', `beta` counts p' = 2 mod 4,
/// `gamma` counts p' = 0 mod 4. The squared Chern-Simons magnitude at
/// coupling k vanishes exactly when `beta > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityClassification {
    pairs: Vec<(BigInt, BigInt)>,
    alpha: usize,
    beta: usize,
    gamma: usize,
}

impl ParityClassification {
    /// Reduced pairs (p'_j, k'_j) = (p_j, k) / gcd(k, p_j), one per divisor.
    pub fn pairs(&self) -> &[(BigInt, BigInt)] {
        &self.pairs
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }
}

/// Splits each torsion divisor by the parity of its reduced part at
/// coupling k >= 1.
pub fn classify_parity(
    profile: &HomologyProfile,
    k: u64,
) -> Result<ParityClassification, TopologyError> {
    if k == 0 {
        return Err(TopologyError::InvalidCoupling);
    }
    let k = BigInt::from(k);
    let mut pairs = Vec::with_capacity(profile.torsion_rank());
    let (mut alpha, mut beta, mut gamma) = (0, 0, 0);
    let four = BigInt::from(4);
    for p in &profile.torsion {
        let g = p.gcd(&k);
        let p_red = p / &g;
        let k_red = &k / &g;
        match p_red.mod_floor(&four).to_u64().expect("residue mod 4") {
            1 | 3 => alpha += 1,
            2 => beta += 1,
            _ => gamma += 1,
        }
        pairs.push((p_red, k_red));
    }
    debug_assert_eq!(alpha + beta + gamma, profile.torsion_rank());
    Ok(ParityClassification { pairs, alpha, beta, gamma })
}

/// Whether the obstruction class pairing is trivial at this coupling, which
/// happens exactly when no reduced divisor is 2 mod 4.
pub fn cup_obstruction_vanishes(classification: &ParityClassification) -> bool {
    classification.beta == 0
}
