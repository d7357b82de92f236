//! Partition functions of the two abelian topological gauge theories on a
//! closed oriented 3-manifold, computed from first homology together with the
//! torsion linking pairing.
//!
//! Both theories localise on the torsion subgroup `T` of first homology:
//!
//! * the chiral ("CS") partition function is a single Gauss-type sum
//!   `Σ_{κ ∈ T} exp(+2πi k Q(κ, κ))`,
//! * the doubled ("BF") partition function is the bilinear double sum
//!   `Σ_{κ, τ ∈ T} exp(−2πi k Q(κ, τ))`,
//!
//! where `Q` is the linking pairing and `k ≥ 1` the integer coupling.  The
//! double sum collapses to the manifestly positive integer
//! `Π_j gcd(k, p_j) · p_j`, and the squared modulus of the single sum has a
//! closed evaluation controlled by the parity classification of the torsion
//! chain.  This module computes the brute-force sums exactly (as phase sums
//! with integer multiplicities), the closed-form integers, and a verification
//! report that cross-checks every advertised identity relating them.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::category::{ComplexValue, PhaseSum};
use crate::report::{rel_close, Report};
use crate::topology::{classify_parity, HomologyProfile, LinkingForm};
use crate::VERIFY_TOLERANCE;

/// Largest torsion-subgroup order enumerated by the single Gauss sum.
pub const CS_ENUMERATION_CAP: u64 = 10_000_000;

/// Largest number of summands enumerated by the bilinear double sum: the
/// square of the torsion order is checked against this cap.
pub const BF_ENUMERATION_CAP: u64 = 100_000_000;

/// Errors surfaced by the partition-function evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    /// The torsion subgroup has too many elements for brute-force summation.
    #[error("torsion subgroup too large to enumerate: {states} summands exceeds cap {cap}")]
    TorsionTooLarge { states: BigInt, cap: u64 },
    /// The coupling constant must be a positive integer.
    #[error("coupling constant must be a positive integer")]
    InvalidCoupling,
}

/// Result of a partition-function evaluation.
///
/// `value` is the numerically evaluated sum.  `closed_form` is present when
/// the quantity itself is known in closed form as an exact integer (the
/// doubled theory); for the chiral theory the value is genuinely complex and
/// the closed evaluation instead covers its squared modulus, exposed through
/// [`cs_abs_squared_closed`].
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    /// Evaluated partition sum.
    pub value: ComplexValue,
    /// Exact integer the value is known to equal, when available.
    pub closed_form: Option<BigInt>,
    /// Coupling constant the sum was evaluated at.
    pub k: u64,
}

/// Torsion orders of a linking form as machine integers, together with the
/// final (largest) order which serves as the common phase denominator.
fn torsion_orders(form: &LinkingForm) -> Vec<u64> {
    form.torsion()
        .iter()
        .map(|p| {
            p.to_u64()
                .expect("torsion order fits in u64 once the enumeration cap was checked")
        })
        .collect()
}

/// Pairing numerators rescaled to the common denominator `p_d`: entry
/// `(i, j)` holds `q_ij · p_d / p_i`, so that
/// `Q(κ, τ) · p_d = Σ_ij κ_i τ_j A_ij (mod p_d)`.
fn scaled_numerators(form: &LinkingForm, orders: &[u64], p_d: u64) -> Vec<Vec<u64>> {
    let d = form.rank();
    let mut table = vec![vec![0u64; d]; d];
    for (i, row) in table.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let q = form
                .numerators()
                .get(i, j)
                .to_u64()
                .expect("normalized numerator is small and nonnegative");
            *cell = q * (p_d / orders[i]);
        }
    }
    table
}

/// Advances a mixed-radix odometer; returns `false` once it wraps to zero.
fn advance(digits: &mut [u64], radices: &[u64]) -> bool {
    for (digit, radix) in digits.iter_mut().zip(radices) {
        *digit += 1;
        if *digit < *radix {
            return true;
        }
        *digit = 0;
    }
    false
}

/// `Σ_ij a_i b_j A_ij mod p_d` evaluated in modular arithmetic.
fn scaled_pairing(a: &[u64], b: &[u64], table: &[Vec<u64>], p_d: u64) -> u64 {
    let modulus = p_d as u128;
    let mut acc: u128 = 0;
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let term = (ai as u128 * bj as u128) % modulus * table[i][j] as u128 % modulus;
            acc = (acc + term) % modulus;
        }
    }
    acc as u64
}

/// Chiral partition sum `Σ_{κ ∈ T} exp(+2πi k Q(κ, κ))`.
///
/// The sector of free (non-torsion) cycles contributes the trivial factor 1,
/// so the sum depends on the linking pairing alone.  Fails with
/// [`PartitionError::TorsionTooLarge`] when the torsion order exceeds
/// [`CS_ENUMERATION_CAP`] and with [`PartitionError::InvalidCoupling`] when
/// `k = 0`.
pub fn cs_partition(form: &LinkingForm, k: u64) -> Result<PartitionResult, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidCoupling);
    }
    let order: BigInt = form.torsion().iter().product();
    if order > BigInt::from(CS_ENUMERATION_CAP) {
        return Err(PartitionError::TorsionTooLarge {
            states: order,
            cap: CS_ENUMERATION_CAP,
        });
    }
    if form.rank() == 0 {
        return Ok(PartitionResult {
            value: ComplexValue::ONE,
            closed_form: Some(BigInt::one()),
            k,
        });
    }
    let orders = torsion_orders(form);
    let p_d = *orders.last().expect("rank checked nonzero");
    let table = scaled_numerators(form, &orders, p_d);
    let k_mod = (k % p_d) as u128;

    let mut sum = PhaseSum::new(p_d);
    let mut kappa = vec![0u64; orders.len()];
    loop {
        let q_scaled = scaled_pairing(&kappa, &kappa, &table, p_d) as u128;
        let exponent = (k_mod * q_scaled % p_d as u128) as u64;
        sum.add_exponent(exponent);
        if !advance(&mut kappa, &orders) {
            break;
        }
    }
    Ok(PartitionResult {
        value: sum.value(),
        closed_form: None,
        k,
    })
}

/// Doubled partition sum `Σ_{κ, τ ∈ T} exp(−2πi k Q(κ, τ))`, evaluated by
/// brute force with the closed integer evaluation attached.
///
/// The result is always a real nonnegative integer; the numerical value is
/// returned alongside the exact closed form so callers can cross-check.
pub fn bf_partition_bruteforce(
    form: &LinkingForm,
    k: u64,
) -> Result<PartitionResult, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidCoupling);
    }
    let order: BigInt = form.torsion().iter().product();
    let states = &order * &order;
    if states > BigInt::from(BF_ENUMERATION_CAP) {
        return Err(PartitionError::TorsionTooLarge {
            states,
            cap: BF_ENUMERATION_CAP,
        });
    }
    let closed = gcd_order_product(form.torsion(), k);
    if form.rank() == 0 {
        return Ok(PartitionResult {
            value: ComplexValue::ONE,
            closed_form: Some(closed),
            k,
        });
    }
    let orders = torsion_orders(form);
    let p_d = *orders.last().expect("rank checked nonzero");
    let table = scaled_numerators(form, &orders, p_d);
    let k_mod = (k % p_d) as u128;

    let mut sum = PhaseSum::new(p_d);
    let mut kappa = vec![0u64; orders.len()];
    loop {
        let mut tau = vec![0u64; orders.len()];
        loop {
            let q_scaled = scaled_pairing(&kappa, &tau, &table, p_d) as u128;
            let positive = (k_mod * q_scaled % p_d as u128) as u64;
            // The doubled theory weights by the conjugate phase.
            sum.add_exponent((p_d - positive) % p_d);
            if !advance(&mut tau, &orders) {
                break;
            }
        }
        if !advance(&mut kappa, &orders) {
            break;
        }
    }
    let value = sum.value();
    debug_assert!(
        rel_close(
            value.re,
            closed.to_f64().unwrap_or(f64::INFINITY),
            VERIFY_TOLERANCE
        ) && value.im.abs() <= VERIFY_TOLERANCE * (1.0 + value.re.abs()),
        "double sum must collapse to its closed integer evaluation"
    );
    Ok(PartitionResult {
        value,
        closed_form: Some(closed),
        k,
    })
}

/// `Π_j gcd(k, p_j) · p_j` over a torsion chain.
fn gcd_order_product(torsion: &[BigInt], k: u64) -> BigInt {
    let k = BigInt::from(k);
    torsion.iter().map(|p| k.gcd(p) * p).product()
}

/// Closed integer evaluation of the doubled partition function:
/// `Z = Π_j gcd(k, p_j) · p_j` over the torsion chain.  Free cycles
/// contribute the trivial factor 1.
pub fn bf_partition_closed(profile: &HomologyProfile, k: u64) -> Result<BigInt, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidCoupling);
    }
    Ok(gcd_order_product(profile.torsion(), k))
}

/// Closed integer evaluation of the squared modulus of the chiral partition
/// function: `|Z|² = δ_{β,0} · 2^γ · Π_j gcd(k, p_j) · p_j`, where `β` and
/// `γ` count reduced torsion orders congruent to 2 and 0 modulo 4.
pub fn cs_abs_squared_closed(profile: &HomologyProfile, k: u64) -> Result<BigInt, PartitionError> {
    if k == 0 {
        return Err(PartitionError::InvalidCoupling);
    }
    let parity = classify_parity(profile, k).expect("coupling checked positive");
    if parity.beta() > 0 {
        return Ok(BigInt::ZERO);
    }
    let two_gamma = BigInt::one() << parity.gamma();
    Ok(two_gamma * gcd_order_product(profile.torsion(), k))
}

/// Converts an exact integer to `f64` for tolerance comparisons.
fn as_f64(value: &BigInt) -> f64 {
    value.to_f64().unwrap_or(f64::INFINITY)
}

/// Cross-checks every identity relating the brute-force partition sums and
/// their closed evaluations at coupling `k`:
///
/// 1. the squared modulus of the chiral sum matches its closed form,
/// 2. the doubled sum matches its closed form,
/// 3. the chiral squared modulus equals `δ_{β,0} 2^γ` times the doubled sum
///    at the same coupling,
/// 4. the chiral squared modulus equals `δ_{β,0} 2^{−β}` times the doubled
///    sum at the doubled coupling `2k`,
/// 5. both closed forms are insensitive to replacing `k` by any coupling
///    with the same gcd pattern against the torsion chain.
///
/// The profile and form must describe the same torsion chain.
pub fn verify_lemma2(
    profile: &HomologyProfile,
    form: &LinkingForm,
    k: u64,
) -> Result<Report, PartitionError> {
    if profile.torsion() != form.torsion() {
        // A mismatched pairing would silently verify the wrong manifold.
        return Err(PartitionError::InvalidCoupling);
    }
    let mut report = Report::new(format!("partition-function identities at k = {k}"));
    let parity = classify_parity(profile, k).map_err(|_| PartitionError::InvalidCoupling)?;

    let cs = cs_partition(form, k)?;
    let cs_closed = cs_abs_squared_closed(profile, k)?;
    report.push(
        "brute-force |Z_cs|^2 equals closed form",
        format!("{:.9}", cs.value.abs_squared()),
        cs_closed.to_string(),
        rel_close(cs.value.abs_squared(), as_f64(&cs_closed), VERIFY_TOLERANCE),
    );

    let bf = bf_partition_bruteforce(form, k)?;
    let bf_closed = bf_partition_closed(profile, k)?;
    let bf_is_real = bf.value.im.abs() <= VERIFY_TOLERANCE * (1.0 + bf.value.re.abs());
    report.push(
        "brute-force Z_bf equals closed form",
        format!("{:.9}", bf.value.re),
        bf_closed.to_string(),
        bf_is_real && rel_close(bf.value.re, as_f64(&bf_closed), VERIFY_TOLERANCE),
    );

    let delta = if parity.beta() == 0 { 1.0 } else { 0.0 };
    let same_coupling = delta * (1u64 << parity.gamma()) as f64 * bf.value.re;
    report.push(
        "|Z_cs|^2 equals delta 2^gamma Z_bf at the same coupling",
        format!("{:.9}", cs.value.abs_squared()),
        format!("{same_coupling:.9}"),
        rel_close(cs.value.abs_squared(), same_coupling, VERIFY_TOLERANCE),
    );

    let bf_doubled = bf_partition_bruteforce(form, 2 * k)?;
    let doubled_coupling = delta * 0.5f64.powi(parity.beta() as i32) * bf_doubled.value.re;
    report.push(
        "|Z_cs|^2 equals delta 2^-beta Z_bf at the doubled coupling",
        format!("{:.9}", cs.value.abs_squared()),
        format!("{doubled_coupling:.9}"),
        rel_close(cs.value.abs_squared(), doubled_coupling, VERIFY_TOLERANCE),
    );

    // Shifting k by the exponent of the torsion group preserves every gcd.
    let exponent = profile
        .torsion()
        .last()
        .and_then(BigInt::to_u64)
        .unwrap_or(1);
    for shifted in [k + exponent, k + 2 * exponent] {
        let same_gcds = profile
            .torsion()
            .iter()
            .all(|p| BigInt::from(shifted).gcd(p) == BigInt::from(k).gcd(p));
        assert!(same_gcds, "shift by the group exponent must preserve gcds");
        let pass = bf_partition_closed(profile, shifted)? == bf_closed
            && cs_abs_squared_closed(profile, shifted)? == cs_closed;
        report.push(
            format!("closed forms depend on the coupling only through gcds (k' = {shifted})"),
            format!("({cs_closed}, {bf_closed})"),
            format!(
                "({}, {})",
                cs_abs_squared_closed(profile, shifted)?,
                bf_partition_closed(profile, shifted)?
            ),
            pass,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{connected_sum, lens_space};
    use crate::topology::HomologyProfile;
    use num_bigint::BigInt;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn trivial_homology_gives_unit_partition_functions() {
        let (profile, form) = lens_space(1, 0).unwrap();
        for k in 1..=4 {
            let cs = cs_partition(&form, k).unwrap();
            assert!(cs.value.approx_eq(ComplexValue::ONE));
            let bf = bf_partition_bruteforce(&form, k).unwrap();
            assert!(bf.value.approx_eq(ComplexValue::ONE));
            assert_eq!(bf.closed_form, Some(BigInt::one()));
            assert_eq!(bf_partition_closed(&profile, k).unwrap(), BigInt::one());
            assert_eq!(cs_abs_squared_closed(&profile, k).unwrap(), BigInt::one());
        }
    }

    #[test]
    fn free_cycles_contribute_trivially() {
        let profile = HomologyProfile::new(1, vec![]).unwrap();
        let form = LinkingForm::empty();
        let cs = cs_partition(&form, 3).unwrap();
        assert!(cs.value.approx_eq(ComplexValue::ONE));
        assert_eq!(bf_partition_closed(&profile, 3).unwrap(), BigInt::one());
        assert_eq!(cs_abs_squared_closed(&profile, 3).unwrap(), BigInt::one());
        assert!(verify_lemma2(&profile, &form, 5).unwrap().passed());
    }

    #[test]
    fn order_two_torsion_at_unit_coupling() {
        let (profile, form) = lens_space(2, 1).unwrap();
        let cs = cs_partition(&form, 1).unwrap();
        assert!(cs.value.approx_eq(ComplexValue::ZERO));
        assert_eq!(cs_abs_squared_closed(&profile, 1).unwrap(), BigInt::ZERO);
        let bf = bf_partition_bruteforce(&form, 1).unwrap();
        assert!(bf.value.approx_eq(ComplexValue::real(2.0)));
        assert_eq!(bf.closed_form, Some(bi(2)));
    }

    #[test]
    fn order_four_torsion_quadrature() {
        // Self-linking 1/4 on a cyclic group of order four: the quadratic
        // Gauss sum evaluates to 2 + 2i at unit coupling.
        let (profile, form) = lens_space(4, 1).unwrap();
        let cs = cs_partition(&form, 1).unwrap();
        assert!(cs.value.approx_eq(ComplexValue::new(2.0, 2.0)));
        assert!(rel_close(cs.value.abs_squared(), 8.0, VERIFY_TOLERANCE));
        assert_eq!(cs_abs_squared_closed(&profile, 1).unwrap(), bi(8));

        let bf = bf_partition_bruteforce(&form, 2).unwrap();
        assert!(bf.value.approx_eq(ComplexValue::real(8.0)));
        assert_eq!(bf_partition_closed(&profile, 2).unwrap(), bi(8));
    }

    #[test]
    fn chiral_sum_is_periodic_in_the_coupling() {
        for (p, q) in [(5, 2), (4, 1), (12, 5), (9, 2)] {
            let (profile, form) = lens_space(p, q).unwrap();
            let period = profile.torsion().last().unwrap().to_u64().unwrap();
            for k in 1..=6 {
                let base = cs_partition(&form, k).unwrap();
                let shifted = cs_partition(&form, k + period).unwrap();
                // Identical phase multisets collapse to identical floats.
                assert_eq!(base.value, shifted.value);
            }
        }
    }

    #[test]
    fn chiral_closed_form_is_bounded_by_doubled_closed_form() {
        for p in 1..=12i64 {
            for q in (1..=p).filter(|q| bi(*q).gcd(&bi(p)).is_one()) {
                let (profile, _) = lens_space(p, q).unwrap();
                for k in 1..=8 {
                    let cs = cs_abs_squared_closed(&profile, k).unwrap();
                    let bf = bf_partition_closed(&profile, 2 * k).unwrap();
                    assert!(cs <= bf, "p = {p}, k = {k}: {cs} > {bf}");
                }
            }
        }
    }

    #[test]
    fn identity_report_passes_on_lens_spaces() {
        for p in 1..=6i64 {
            for q in (1..=p).filter(|q| bi(*q).gcd(&bi(p)).is_one()) {
                let (profile, form) = lens_space(p, q).unwrap();
                for k in 1..=5 {
                    let report = verify_lemma2(&profile, &form, k).unwrap();
                    assert!(report.passed(), "L({p},{q}) at k = {k}:\n{}", report.render_table());
                }
            }
        }
    }

    #[test]
    fn identity_report_passes_on_connected_sums() {
        let pairs = [((2, 1), (4, 1)), ((3, 1), (3, 2)), ((2, 1), (2, 1)), ((4, 3), (6, 1))];
        for ((p1, q1), (p2, q2)) in pairs {
            let sum = connected_sum(&[lens_space(p1, q1).unwrap(), lens_space(p2, q2).unwrap()])
                .unwrap();
            for k in 1..=4 {
                let report = verify_lemma2(&sum.0, &sum.1, k).unwrap();
                assert!(
                    report.passed(),
                    "L({p1},{q1}) # L({p2},{q2}) at k = {k}:\n{}",
                    report.render_table()
                );
            }
        }
    }

    #[test]
    fn enumeration_caps_are_enforced() {
        let big = 1 << 24; // 16777216 exceeds the single-sum cap
        let (_, form) = lens_space(big, 1).unwrap();
        assert!(matches!(
            cs_partition(&form, 1),
            Err(PartitionError::TorsionTooLarge { .. })
        ));

        let medium = 1 << 14; // square exceeds the double-sum cap only
        let (_, form) = lens_space(medium, 1).unwrap();
        assert!(cs_partition(&form, 1).is_ok());
        assert!(matches!(
            bf_partition_bruteforce(&form, 1),
            Err(PartitionError::TorsionTooLarge { .. })
        ));
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let (profile, form) = lens_space(3, 1).unwrap();
        assert_eq!(cs_partition(&form, 0), Err(PartitionError::InvalidCoupling));
        assert_eq!(
            bf_partition_bruteforce(&form, 0),
            Err(PartitionError::InvalidCoupling)
        );
        assert_eq!(
            bf_partition_closed(&profile, 0),
            Err(PartitionError::InvalidCoupling)
        );
        assert_eq!(
            cs_abs_squared_closed(&profile, 0),
            Err(PartitionError::InvalidCoupling)
        );
    }

    #[test]
    fn doubled_sum_is_real_and_nonnegative() {
        for p in 2..=10i64 {
            for q in (1..=p).filter(|q| bi(*q).gcd(&bi(p)).is_one()) {
                let (_, form) = lens_space(p, q).unwrap();
                for k in 1..=6 {
                    let bf = bf_partition_bruteforce(&form, k).unwrap();
                    assert!(bf.value.im.abs() < 1e-6, "L({p},{q}) k={k}");
                    assert!(bf.value.re > -1e-6, "L({p},{q}) k={k}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn identities_hold_on_random_lens_spaces(p in 1i64..=30, q_seed in 0i64..100, k in 1u64..=12) {
            let candidates: Vec<i64> = (1..=p)
                .filter(|q| bi(*q).gcd(&bi(p)).is_one())
                .collect();
            let q = candidates[(q_seed as usize) % candidates.len()];
            let (profile, form) = lens_space(p, q).unwrap();
            let report = verify_lemma2(&profile, &form, k).unwrap();
            prop_assert!(report.passed(), "L({},{}) at k = {}:\n{}", p, q, k, report.render_table());
        }

        #[test]
        fn doubled_closed_form_divides_group_order_square(p in 1i64..=24, k in 1u64..=16) {
            let (profile, _) = lens_space(p, 1).unwrap();
            let closed = bf_partition_closed(&profile, k).unwrap();
            let order = profile.torsion_order();
            // gcd(k, p) | p, so the closed form divides p².
            prop_assert!((&order * &order % &closed).is_zero());
        }
    }
}
