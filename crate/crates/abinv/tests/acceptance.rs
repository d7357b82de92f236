//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`; the same line is the panic
//! message on failure).  Tolerances are pinned here and never loosened:
//! floating-point comparisons use 1e-6 relative unless a value is exact by
//! construction, in which case equality is asserted outright.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use abinv::category::{gauss_delta, verify_ribbon_axioms, CategoryZn, ComplexValue, Epsilon};
use abinv::linalg::{smith_normal_form, solution_count_mod_n, IntegerMatrix};
use abinv::manifolds::{
    connected_sum, lens_chain, lens_space, resolve_named, ManifoldPresentation, SurgeryLink,
};
use abinv::partition::{bf_partition_bruteforce, cs_partition, verify_lemma2};
use abinv::report::rel_close;
use abinv::rt::{
    charge_sum, kirby_blowup_check, rt_even, rt_odd, tau_abs_squared_closed, verify_lemma3_part1,
    Normalization,
};
use abinv::topology::h1_order_mod_n;
use abinv::tv::{tv_algebraic, tv_bruteforce, verify_lemma3_tv};

const TOL: f64 = 1e-6;

/// Prints the criterion's verdict line and asserts it.
fn conclude(criterion: &str, failure: Option<String>, detail: &str) {
    let line = match &failure {
        None => format!("PASS [{criterion}] {detail}"),
        Some(what) => format!("FAIL [{criterion}] {detail}: {what}"),
    };
    println!("{line}");
    assert!(failure.is_none(), "{line}");
}

fn coprime_residues(p: i64) -> Vec<i64> {
    (1..=p).filter(|q| q.gcd(&p) == 1).collect()
}

#[test]
fn criterion_1_surgery_invariant_worked_examples() {
    let mut failure = None;

    // The empty link: the invariant is the exact floating-point unit.
    let empty = SurgeryLink::empty();
    for k in 1..=6 {
        let tau = rt_even(&empty, k).expect("empty link evaluates");
        if tau.value.re != 1.0 || tau.value.im != 0.0 {
            failure.get_or_insert(format!("tau_4k of the empty link at k={k} is {}", tau.value));
        }
    }

    // The zero-framed unknot: squared modulus 2k.
    let zero_framed = SurgeryLink::new(IntegerMatrix::from_rows(&[vec![0]])).expect("symmetric");
    for k in 1..=6 {
        let got = rt_even(&zero_framed, k).expect("evaluates").value.abs_squared();
        if !rel_close(got, 2.0 * k as f64, TOL) {
            failure.get_or_insert(format!("|tau_4k|^2 of the zero-framed unknot at k={k} is {got}"));
        }
    }

    // The 2-framed unknot: squared modulus 2 at even k, 0 at odd k.
    let two_framed = lens_chain(2, 1).expect("valid lens parameters");
    for k in 1..=6u64 {
        let got = rt_even(&two_framed, k).expect("evaluates").value.abs_squared();
        let want = if k % 2 == 0 { 2.0 } else { 0.0 };
        if !rel_close(got, want, TOL) {
            failure.get_or_insert(format!(
                "|tau_4k|^2 of the 2-framed unknot at k={k} is {got}, expected {want}"
            ));
        }
    }

    conclude(
        "1",
        failure,
        "surgery invariant worked examples: unit on the empty link (exact), 2k on the \
         zero-framed unknot, 2/0 alternation on the 2-framed unknot, k <= 6",
    );
}

#[test]
fn criterion_2_state_sum_worked_examples() {
    let mut failure = None;
    let sphere = abinv::tv::sphere_complex();
    let s1xs2 = abinv::tv::s1xs2_complex();
    let rp3 = abinv::tv::rp3_heegaard_complex();
    for n in 1..=12u64 {
        let cases = [
            ("sphere", &sphere, BigInt::from(1)),
            ("s1xs2", &s1xs2, BigInt::from(n)),
            ("rp3", &rp3, BigInt::from(n.gcd(&2))),
        ];
        for (name, complex, expected) in cases {
            let brute = tv_bruteforce(complex, n).expect("within cap");
            let algebraic = tv_algebraic(complex, n).expect("valid level");
            if brute != expected || algebraic != expected {
                failure.get_or_insert(format!(
                    "{name} at level {n}: brute {brute}, algebraic {algebraic}, expected {expected}"
                ));
            }
        }
    }
    conclude(
        "2",
        failure,
        "state sum worked examples on sphere / s1xs2 / rp3 fixtures, both enumeration and \
         algebraic routes, exact integers, levels 1..12",
    );
}

#[test]
fn criterion_3_partition_function_identity_grid() {
    let mut failure = None;
    let mut cells = 0usize;

    for p in 1..=10i64 {
        for q in coprime_residues(p) {
            let (profile, form) = lens_space(p, q).expect("valid lens parameters");
            for k in 1..=10 {
                let report = verify_lemma2(&profile, &form, k).expect("within caps");
                cells += 1;
                if !report.passed() {
                    failure.get_or_insert(format!("L({p},{q}) at k={k}:\n{}", report.render_table()));
                }
            }
        }
    }

    let mut parts = Vec::new();
    for p in 1..=6i64 {
        for q in coprime_residues(p) {
            parts.push(lens_space(p, q).expect("valid lens parameters"));
        }
    }
    for (i, left) in parts.iter().enumerate() {
        for right in &parts[i..] {
            let (profile, form) =
                connected_sum(&[left.clone(), right.clone()]).expect("compatible parts");
            for k in 1..=10 {
                let report = verify_lemma2(&profile, &form, k).expect("within caps");
                cells += 1;
                if !report.passed() {
                    failure.get_or_insert(format!(
                        "connected sum at k={k}:\n{}",
                        report.render_table()
                    ));
                }
            }
        }
    }

    conclude(
        "3",
        failure,
        &format!(
            "partition-function identities (brute force vs closed forms, both chiral/doubled \
             relations) on {cells} grid cells: lens spaces p <= 10, connected sums p <= 6, k <= 10"
        ),
    );
}

#[test]
fn criterion_4_surgery_vs_chiral_partition_grid() {
    let mut failure = None;
    let mut cells = 0usize;
    for p in 1..=8i64 {
        for q in coprime_residues(p) {
            let chain = lens_chain(p, q).expect("valid lens parameters");
            for k in 1..=6 {
                let report = verify_lemma3_part1(&chain, k).expect("within caps");
                cells += 1;
                if !report.passed() {
                    failure.get_or_insert(format!(
                        "chain({p},{q}) at k={k}:\n{}",
                        report.render_table()
                    ));
                }
            }
        }
    }
    conclude(
        "4",
        failure,
        &format!(
            "|tau|^2 equals the rescaled chiral partition function and its closed form on \
             {cells} cells: chain presentations p <= 8, k <= 6, 1e-6 relative"
        ),
    );
}

/// The named fixtures every state-sum criterion runs over.
fn fixture_manifolds() -> Vec<(String, ManifoldPresentation)> {
    let mut fixtures: Vec<(String, ManifoldPresentation)> =
        ["s3", "s1xs2", "rp3", "rp3-heegaard"]
            .iter()
            .map(|name| {
                (
                    name.to_string(),
                    resolve_named(name).expect("valid name").expect("known name"),
                )
            })
            .collect();
    for (p, q) in [(5, 1), (6, 1), (8, 3)] {
        fixtures.push((
            format!("lens({p},{q})"),
            ManifoldPresentation::lens(p, q).expect("valid lens parameters"),
        ));
    }
    fixtures
}

#[test]
fn criterion_5_state_sum_counts_cohomology() {
    let mut failure = None;
    let mut cells = 0usize;
    for (name, manifold) in fixture_manifolds() {
        for n in 1..=12 {
            let report = verify_lemma3_tv(&manifold, n).expect("within caps");
            cells += 1;
            if !report.passed() {
                failure.get_or_insert(format!("{name} at level {n}:\n{}", report.render_table()));
            }
        }
        // At odd levels the squared surgery invariant gives the same count.
        if let Some(link) = manifold.surgery_link() {
            let complex = manifold.cell_complex().expect("fixtures carry cells");
            for n in [1u64, 3, 5, 7, 9, 11] {
                let upsilon = tv_algebraic(&complex, n).expect("valid level");
                let tau_sq = rt_odd(&link, n).expect("odd level").value.abs_squared();
                cells += 1;
                if !rel_close(tau_sq, upsilon.to_f64().expect("small"), TOL) {
                    failure.get_or_insert(format!(
                        "{name} at odd level {n}: |tau|^2 = {tau_sq}, state sum = {upsilon}"
                    ));
                }
            }
        }
    }
    conclude(
        "5",
        failure,
        &format!(
            "state sum == cohomology count == rescaled doubled partition function on all \
             fixtures ({cells} cells, levels 1..12, exact integers; odd levels also match \
             |tau|^2)"
        ),
    );
}

#[test]
fn criterion_6_even_level_state_sum_and_surgery_invariant_disagree() {
    let mut failure = None;
    let rp3_cells = abinv::tv::rp3_heegaard_complex();
    let upsilon = tv_algebraic(&rp3_cells, 2).expect("valid level");
    if upsilon != BigInt::from(2) {
        failure.get_or_insert(format!("state sum at level 2 is {upsilon}, expected 2"));
    }
    let chain = lens_chain(2, 1).expect("valid lens parameters");
    let closed = tau_abs_squared_closed(&chain.homology(), 1).expect("valid coupling");
    if !closed.is_zero() {
        failure.get_or_insert(format!("closed |tau_4|^2 is {closed}, expected 0"));
    }
    let tau_sq = rt_even(&chain, 1).expect("evaluates").value.abs_squared();
    if tau_sq > 1e-12 {
        failure.get_or_insert(format!("|tau_4|^2 evaluates to {tau_sq}, expected 0"));
    }
    conclude(
        "6",
        failure,
        "the level-2 state sum (= 2) differs from the squared level-4 surgery invariant (= 0) \
         on the 2-framed unknot manifold, exactly",
    );
}

#[test]
fn criterion_7_gauss_sums_and_modularity() {
    let mut failure = None;

    for n in 1..=200u64 {
        for epsilon in [Epsilon::Plus, Epsilon::Minus] {
            let modular = CategoryZn::new(n, epsilon).expect("positive order").is_modular();
            if modular != (n % 2 == 1) {
                failure.get_or_insert(format!("is_modular({n}) = {modular} with eps {epsilon}"));
            }
        }
    }

    for n in 1..=100u64 {
        let delta = gauss_delta(n);
        if n % 4 == 2 {
            if delta != ComplexValue::ZERO {
                failure.get_or_insert(format!("gauss sum at {n} is {delta}, expected exact zero"));
            }
        } else if delta.abs_squared() < 0.5 {
            failure.get_or_insert(format!("gauss sum at {n} nearly vanishes: {delta}"));
        }
        if n % 2 == 1 && !rel_close(delta.abs_squared(), n as f64, TOL) {
            failure.get_or_insert(format!(
                "odd |gauss sum|^2 at {n} is {}, expected {n}",
                delta.abs_squared()
            ));
        }
        // At multiples of four the squared modulus is 2n, not n.
        if n % 4 == 0 && !rel_close(delta.abs_squared(), 2.0 * n as f64, TOL) {
            failure.get_or_insert(format!(
                "|gauss sum|^2 at {n} is {}, expected {}",
                delta.abs_squared(),
                2 * n
            ));
        }
    }

    conclude(
        "7",
        failure,
        "modularity holds exactly at odd orders (n <= 200); the gauss sum vanishes exactly \
         iff n = 2 mod 4, |sum|^2 = n at odd n, and |sum|^2 = 2n at multiples of 4 (n <= 100)",
    );
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntegerMatrix {
    let data: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-bound..=bound)).collect())
        .collect();
    IntegerMatrix::from_rows(&data)
}

fn random_link(rng: &mut ChaCha8Rng, max_components: usize) -> SurgeryLink {
    let m = rng.random_range(0..=max_components);
    let mut rows = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let entry = rng.random_range(-6..=6);
            rows[i][j] = entry;
            rows[j][i] = entry;
        }
    }
    SurgeryLink::new(IntegerMatrix::from_rows(&rows)).expect("symmetric by construction")
}

/// Exhaustive count of `x` in `(Z_n)^cols` with `m x = 0 mod n`.
fn kernel_count_exhaustive(m: &IntegerMatrix, n: u64) -> BigInt {
    let cols = m.cols();
    let mut x = vec![0u64; cols];
    let mut count = BigInt::ZERO;
    loop {
        let solves = (0..m.rows()).all(|r| {
            let s: i128 = (0..cols)
                .map(|c| m.get(r, c).to_i128().expect("small entry") * x[c] as i128)
                .sum();
            s.rem_euclid(n as i128) == 0
        });
        if solves {
            count += 1;
        }
        let mut done = true;
        for digit in x.iter_mut() {
            *digit += 1;
            if *digit < n {
                done = false;
                break;
            }
            *digit = 0;
        }
        if done {
            break;
        }
    }
    count
}

#[test]
fn criterion_8a_smith_normal_form_oracle() {
    let mut failure = None;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for case in 0..200 {
        let rows = rng.random_range(1..=5);
        let cols = rng.random_range(1..=5);
        let m = random_matrix(&mut rng, rows, cols, 9);
        let snf = smith_normal_form(&m);

        let product = snf.u.mul(&m).mul(&snf.v);
        let diagonal = snf.diagonal_matrix(rows, cols);
        let mut ok = true;
        for i in 0..rows {
            for j in 0..cols {
                ok &= product.get(i, j) == diagonal.get(i, j);
            }
        }
        for d in &snf.d {
            ok &= !d.is_negative();
        }
        for w in snf.d.windows(2) {
            if !w[0].is_zero() && !w[1].is_zero() {
                ok &= (&w[1] % &w[0]).is_zero();
            } else {
                ok &= w[1].is_zero() || !w[0].is_zero();
            }
        }
        ok &= snf.u.determinant().abs() == BigInt::from(1);
        ok &= snf.v.determinant().abs() == BigInt::from(1);
        if !ok {
            failure.get_or_insert(format!("case {case}: u m v != diag or invalid chain"));
        }
    }
    conclude(
        "8a",
        failure,
        "smith normal form on 200 seeded random matrices up to 5x5: u m v = diag exactly, \
         nonnegative divisor chain, unimodular transforms",
    );
}

#[test]
fn criterion_8b_kernel_count_oracle() {
    let mut failure = None;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for case in 0..60 {
        let rows = rng.random_range(1..=3);
        let cols = rng.random_range(1..=3);
        let m = random_matrix(&mut rng, rows, cols, 6);
        for n in 1..=12u64 {
            let fast = solution_count_mod_n(&m, n).expect("valid modulus");
            let slow = kernel_count_exhaustive(&m, n);
            if fast != slow {
                failure.get_or_insert(format!(
                    "case {case} at modulus {n}: algebraic {fast}, exhaustive {slow}"
                ));
            }
        }
    }
    conclude(
        "8b",
        failure,
        "algebraic kernel count equals exhaustive enumeration on 60 seeded random matrices \
         (cols <= 3) at every modulus n <= 12",
    );
}

#[test]
fn criterion_8c_ribbon_axioms_exhaustive() {
    let mut failure = None;
    for n in 1..=24u64 {
        for epsilon in [Epsilon::Plus, Epsilon::Minus] {
            let report =
                verify_ribbon_axioms(&CategoryZn::new(n, epsilon).expect("positive order"));
            if !report.passed() {
                failure.get_or_insert(format!(
                    "order {n}, eps {epsilon}:\n{}",
                    report.render_table()
                ));
            }
        }
    }
    conclude(
        "8c",
        failure,
        "braiding/twist/duality axioms hold exhaustively for cyclic label groups n <= 24, \
         both twist signs",
    );
}

#[test]
fn criterion_8d_blowup_stability() {
    let mut failure = None;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for case in 0..50 {
        let link = random_link(&mut rng, 2);
        for level in [3u64, 5, 8, 12] {
            let report = kirby_blowup_check(&link, level, Normalization::Moo)
                .expect("levels avoid 2 mod 4");
            if !report.passed() {
                failure.get_or_insert(format!(
                    "case {case} at level {level}:\n{}",
                    report.render_table()
                ));
            }
        }
    }
    conclude(
        "8d",
        failure,
        "blow-up stability of the reduced invariant on 50 seeded random links (m <= 2) at \
         levels 3, 5, 8, 12, both handedness signs",
    );
}

#[test]
fn criterion_8e_charge_range_reduction() {
    let mut failure = None;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    for case in 0..50 {
        let link = random_link(&mut rng, 2);
        let k = rng.random_range(1..=6u64);
        let half = charge_sum(&link, 4 * k, 2 * k).expect("within cap");
        let full = charge_sum(&link, 4 * k, 4 * k).expect("within cap");
        let doubled = half.scale((1u64 << link.components()) as f64);
        if !full.approx_eq(doubled) {
            failure.get_or_insert(format!(
                "case {case} at coupling {k}: full-range {full}, 2^m x half-range {doubled}"
            ));
        }
    }
    conclude(
        "8e",
        failure,
        "full-range charge sum equals 2^m times the half-range sum on 50 seeded random links",
    );
}

#[test]
fn criterion_8f_invariants_ignore_the_lens_parameter_q() {
    let mut failure = None;
    for p in 1..=8i64 {
        let qs = coprime_residues(p);
        let mut reference: Option<(Vec<f64>, Vec<f64>, Vec<BigInt>, Vec<BigInt>)> = None;
        for &q in &qs {
            let (_, form) = lens_space(p, q).expect("valid lens parameters");
            let chain = lens_chain(p, q).expect("valid lens parameters");
            let complex = ManifoldPresentation::lens(p, q)
                .expect("valid lens parameters")
                .cell_complex()
                .expect("lens spaces carry cells");

            let tau: Vec<f64> = (1..=3)
                .map(|k| rt_even(&chain, k).expect("within cap").value.abs_squared())
                .collect();
            let cs: Vec<f64> = (1..=3)
                .map(|k| cs_partition(&form, k).expect("within cap").value.abs_squared())
                .collect();
            let bf: Vec<BigInt> = (1..=3)
                .map(|k| {
                    bf_partition_bruteforce(&form, k)
                        .expect("within cap")
                        .closed_form
                        .expect("doubled sum has a closed form")
                })
                .collect();
            let upsilon: Vec<BigInt> = [2u64, 3, 4, 6, 12]
                .iter()
                .map(|&n| {
                    let count = tv_algebraic(&complex, n).expect("valid level");
                    let from_chain = h1_order_mod_n(&chain.homology(), n).expect("valid level");
                    if count != from_chain {
                        failure.get_or_insert(format!(
                            "L({p},{q}) at level {n}: state sum {count} vs chain count {from_chain}"
                        ));
                    }
                    count
                })
                .collect();

            match &reference {
                None => reference = Some((tau, cs, bf, upsilon)),
                Some((tau0, cs0, bf0, upsilon0)) => {
                    let floats_match = tau
                        .iter()
                        .zip(tau0)
                        .chain(cs.iter().zip(cs0))
                        .all(|(a, b)| rel_close(*a, *b, TOL));
                    if !floats_match || &bf != bf0 || &upsilon != upsilon0 {
                        failure.get_or_insert(format!(
                            "L({p},{q}) disagrees with L({p},{}) on some invariant",
                            qs[0]
                        ));
                    }
                }
            }
        }
    }
    conclude(
        "8f",
        failure,
        "|tau|^2, the squared chiral and doubled partition functions, and the state sum \
         depend only on p across L(p,q), p <= 8, all coprime q",
    );
}

#[test]
fn criterion_9_scope_note() {
    println!(
        "NOTE [9] the continuum functional-integral derivation is not mechanized; its \
         end-result formulas are exactly the quantities verified by criteria 1-8"
    );
}
