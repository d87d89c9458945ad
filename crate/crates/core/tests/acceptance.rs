//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Every expected value is either a literal from the criterion or recomputed
//! here by a brute-force oracle that only uses element enumeration, `mul`,
//! `add` and equality.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cnc_core::cnc::CncCondition;
use cnc_core::exponent::{check_lifting_identity, residue_class_exponent};
use cnc_core::{
    euler_lcm, exponent_member, fermat_bounds, galois_ring, lift_chain_group, lift_chain_matrix,
    power_chain, ring_order, sample_polynomial_units, verify_cnc, CncChain, GroupDescriptor, Ideal,
    Ring, RingElement, Verdict, WMode,
};

type Outcome = Result<(), String>;

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- oracles

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u128, b: u128) -> u128 {
    a / gcd(a, b) * b
}

fn totient(n: u128) -> u128 {
    (1..=n).filter(|&k| gcd(k, n) == 1).count() as u128
}

/// Units by searching every candidate two-sided inverse.
fn oracle_units(ring: &Ring) -> Vec<RingElement> {
    let all = ring.elements().expect("enumerable");
    all.iter()
        .filter(|x| {
            all.iter()
                .any(|y| x.mul(y).unwrap().is_one() && y.mul(x).unwrap().is_one())
        })
        .cloned()
        .collect()
}

/// Order by repeated multiplication.
fn oracle_order(x: &RingElement) -> u128 {
    let mut acc = x.clone();
    let mut m = 1;
    while !acc.is_one() {
        acc = acc.mul(x).unwrap();
        m += 1;
        assert!(m < 1 << 20, "{x} has no finite order");
    }
    m
}

fn oracle_orders(ring: &Ring) -> Vec<u128> {
    let mut v: Vec<u128> = oracle_units(ring).iter().map(oracle_order).collect();
    v.sort_unstable();
    v
}

fn oracle_exponent(ring: &Ring) -> u128 {
    oracle_orders(ring).into_iter().fold(1, lcm)
}

fn all_units_satisfy(ring: &Ring, m: u128) -> bool {
    oracle_units(ring).iter().all(|u| naive_pow(u, m).is_one())
}

fn naive_pow(x: &RingElement, m: u128) -> RingElement {
    let mut acc = x.ring().one();
    for _ in 0..m {
        acc = acc.mul(x).unwrap();
    }
    acc
}

fn int(ring: &Ring, v: i64) -> RingElement {
    ring.element(&[v]).unwrap()
}

fn modular(n: u64) -> Ring {
    Ring::modular(n).unwrap()
}

fn chain_of(ring: &Ring, gens: &[RingElement]) -> Result<CncChain, String> {
    ok(ok(power_chain(ring, gens))?.into_chain())
}

// ------------------------------------------------------------- criteria

fn baseline_z12() -> Outcome {
    let r = modular(12);
    let units: Vec<u64> = ok(r.units())?.iter().map(|u| u.coords()[0]).collect();
    check!(units == vec![1, 5, 7, 11], "units {units:?}");
    let oracle: Vec<u64> = oracle_units(&r).iter().map(|u| u.coords()[0]).collect();
    check!(oracle == units, "oracle units {oracle:?}");
    check!(ok(r.unit_count())? == 4 && totient(12) == 4, "unit count");
    check!(
        ok(ring_order(&r))? == 2,
        "ring_order {}",
        ok(ring_order(&r))?
    );
    check!(oracle_exponent(&r) == 2, "oracle exponent");
    check!(ok(exponent_member(&r, 2))?, "2 not in E(Z/12)");
    Ok(())
}

fn coset_z25() -> Outcome {
    let r = modular(25);
    let chain = chain_of(&r, &[int(&r, 5)])?;
    let report = ok(residue_class_exponent(&r, &chain, &int(&r, 4), 2))?;
    check!(report.exponent == 10, "exponent {}", report.exponent);
    let members: Vec<u64> = report.members.iter().map(|(x, _)| x.coords()[0]).collect();
    check!(members == vec![4, 9, 14, 19, 24], "members {members:?}");
    check!(report.all_satisfy, "some member fails x^10 = 1");
    for (x, _) in &report.members {
        check!(naive_pow(x, 10).is_one(), "oracle: {x}^10 != 1");
    }
    check!(
        report.orders() == vec![2, 10, 10, 10, 10],
        "orders {:?}",
        report.orders()
    );
    let mut oracle: Vec<u128> = report
        .members
        .iter()
        .map(|(x, _)| oracle_order(x))
        .collect();
    oracle.sort_unstable();
    check!(oracle == report.orders(), "oracle orders {oracle:?}");
    Ok(())
}

fn prime_powers() -> Outcome {
    for (p, k) in [(2u64, 3u32), (3, 2), (5, 2)] {
        let n = p.pow(k);
        let r = modular(n);
        let chain = chain_of(&r, &[int(&r, p as i64)])?;
        let steps = (k - 1) as usize;
        check!(
            chain.nilpotency_indexes() == vec![2; steps].as_slice(),
            "Z/{n}: t = {:?}",
            chain.nilpotency_indexes()
        );
        check!(
            chain.characteristics() == vec![p as u128; steps].as_slice(),
            "Z/{n}: s = {:?}",
            chain.characteristics()
        );
        let b = ok(fermat_bounds(&r, &chain, WMode::RingOrder))?;
        let phi = totient(n as u128);
        check!(phi == (p as u128 - 1) * (p as u128).pow(k - 1), "totient");
        check!(
            b.m1 == Some(phi) && b.m2 == Some(phi) && b.m3 == Some(phi),
            "Z/{n}: M = {:?} {:?} {:?}, phi = {phi}",
            b.m1,
            b.m2,
            b.m3
        );
        check!(b.all_verified(), "Z/{n}: verdicts {:?}", b.verdicts);
        check!(
            all_units_satisfy(&r, phi),
            "oracle: Z/{n} fails x^{phi} = 1"
        );
    }
    let z8 = modular(8);
    check!(
        ok(ring_order(&z8))? == 2 && oracle_exponent(&z8) == 2,
        "o(Z/8)"
    );
    check!(totient(8) == 4, "phi(8)");
    Ok(())
}

fn dual_numbers_z4() -> Outcome {
    let r = ok(Ring::poly_quotient(&modular(4), "u", &[0, 0, 1]))?;
    let gens = [ok(r.element(&[2]))?, ok(r.element(&[0, 1]))?];
    let chain = chain_of(&r, &gens)?;
    let b = ok(fermat_bounds(&r, &chain, WMode::RingOrder))?;
    check!(
        b.m1 == Some(4) && b.m2 == Some(4),
        "M1, M2 = {:?}, {:?}",
        b.m1,
        b.m2
    );
    check!(b.m3 == Some(8), "M3 = {:?}", b.m3);
    check!(b.all_verified(), "verdicts {:?}", b.verdicts);
    check!(
        all_units_satisfy(&r, 4) && all_units_satisfy(&r, 8),
        "oracle exponent"
    );
    let count = oracle_units(&r).len();
    check!(count == 8 && ok(r.unit_count())? == 8, "|R*| = {count}");
    Ok(())
}

fn matrix_m2_z4() -> Outcome {
    let z4 = modular(4);
    let m = ok(Ring::matrix(&z4, 2))?;
    check!(ok(m.elements())?.len() == 256, "enumeration size");
    let units = oracle_units(&m);
    check!(units.len() == 96, "oracle unit count {}", units.len());
    check!(ok(m.unit_count())? == 96, "library unit count");
    check!(96 == 6 * 2u32.pow(4), "factorization");
    let bound = (4 - 1) * (4 - 2) * 2u128.pow(1);
    check!(bound == 12, "bound");
    for u in &units {
        check!(naive_pow(u, 12).is_one(), "{u}^12 != I");
    }
    let base = chain_of(&z4, &[int(&z4, 2)])?;
    let lifted = ok(lift_chain_matrix(&base, 2))?;
    check!(lifted.parameters_match(), "lifted parameters differ");
    check!(
        lifted.lifted.nilpotency_indexes() == [2] && lifted.lifted.characteristics() == [2],
        "lifted t, s"
    );
    Ok(())
}

fn group_ring_z9_c2() -> Outcome {
    let c2 = ok(GroupDescriptor::cyclic(2))?;
    let r = ok(Ring::group_ring(&modular(9), c2.clone()))?;
    check!(ok(r.elements())?.len() == 81, "enumeration size");
    let units = oracle_units(&r);
    check!(
        units.len() == 36 && ok(r.unit_count())? == 36,
        "unit count {}",
        units.len()
    );
    check!(36 == 2u32.pow(2) * 3u32.pow(2), "factorization");
    let w_oracle = oracle_exponent(&ok(Ring::group_ring(&modular(3), c2.clone()))?);
    check!(w_oracle == 2, "oracle o(Z/3[C2]) = {w_oracle}");

    let chain = chain_of(&r, &[ok(r.element(&[3, 0]))?])?;
    let b = ok(fermat_bounds(&r, &chain, WMode::RingOrder))?;
    check!(b.w == w_oracle, "w = {}", b.w);
    check!(
        b.m1 == Some(6) && b.m2 == Some(12) && b.m3 == Some(36),
        "M = {:?} {:?} {:?}",
        b.m1,
        b.m2,
        b.m3
    );
    check!(b.m1 < b.m2 && b.m2 < b.m3, "not strictly increasing");
    check!(b.all_verified(), "verdicts {:?}", b.verdicts);
    for u in &units {
        check!(naive_pow(u, 6).is_one(), "{u}^6 != 1");
    }
    let base = chain_of(&modular(9), &[int(&modular(9), 3)])?;
    check!(
        ok(lift_chain_group(&base, &c2))?.parameters_match(),
        "group lift parameters"
    );
    Ok(())
}

fn galois_rings() -> Outcome {
    let gr = ok(galois_ring(2, 2, &[1, 1, 1]))?;
    let units = oracle_units(&gr.ring);
    check!(
        units.len() == 12 && ok(gr.ring.unit_count())? == 12,
        "GR(2,2) units {}",
        units.len()
    );
    let e = (2u128.pow(2) - 1) * 2;
    check!(
        e == 6 && gr.exponent_bound == 6,
        "GR(2,2) bound {}",
        gr.exponent_bound
    );
    for u in &units {
        check!(naive_pow(u, 6).is_one(), "GR(2,2): {u}^6 != 1");
    }
    check!(ok(exponent_member(&gr.ring, 6))?, "6 not in E(GR(2,2))");

    let gr = ok(galois_ring(3, 2, &[1, 0, 1]))?;
    let units = oracle_units(&gr.ring);
    check!(
        units.len() == 72 && ok(gr.ring.unit_count())? == 72,
        "GR(3,2) units {}",
        units.len()
    );
    check!(
        gr.exponent_bound == 24,
        "GR(3,2) bound {}",
        gr.exponent_bound
    );
    for u in &units {
        check!(naive_pow(u, 24).is_one(), "GR(3,2): {u}^24 != 1");
    }
    check!(ok(exponent_member(&gr.ring, 24))?, "24 not in E(GR(3,2))");
    Ok(())
}

fn euler_z4_z9() -> Outcome {
    let z4 = modular(4);
    let z9 = modular(9);
    let c4 = chain_of(&z4, &[int(&z4, 2)])?;
    let c9 = chain_of(&z9, &[int(&z9, 3)])?;
    let report = ok(euler_lcm(&[(z4.clone(), c4), (z9.clone(), c9)]))?;

    let product = ok(Ring::direct_product(&[z4, z9]))?;
    let z36 = modular(36);
    let product_orders = oracle_orders(&product);
    let z36_orders = oracle_orders(&z36);
    check!(
        product_orders.len() == 12,
        "{} unit tuples",
        product_orders.len()
    );
    check!(z36_orders.len() == 12, "{} units of Z/36", z36_orders.len());
    check!(
        all_units_satisfy(&product, 12),
        "12 not an exponent of Z/4 x Z/9"
    );
    check!(all_units_satisfy(&z36, 12), "12 not an exponent of Z/36");
    check!(product_orders == z36_orders, "order multisets differ");
    check!(
        report.unit_tuples == Some(12),
        "unit tuples {:?}",
        report.unit_tuples
    );
    check!(
        report.verdict == Verdict::Verified,
        "verdict {:?}",
        report.verdict
    );

    check!(
        report.m == 12,
        "euler_lcm returned M = {} (parts {:?}, product {}), expected 12",
        report.m,
        report.parts,
        report.product
    );
    Ok(())
}

fn cnc_failure_certificate() -> Outcome {
    let r = ok(Ring::poly_quotient(&modular(2), "x", &[0, 0, 0, 1]))?;
    let x = ok(r.element(&[0, 1]))?;
    let n = ok(Ideal::generated(&r, std::slice::from_ref(&x)))?;
    let zero = Ideal::zero(&r);
    let ideals = vec![n.clone(), zero.clone()];

    // Oracle nilpotency index: least t with every t-fold product of N zero.
    let members = n.elements();
    let mut products = members.clone();
    let mut t = 1;
    while products.iter().any(|p| !p.is_zero()) {
        products = products
            .iter()
            .flat_map(|p| members.iter().map(move |m| p.mul(m).unwrap()))
            .collect();
        t += 1;
    }
    check!(t == 3, "oracle t = {t}");
    let kills = |s: u128| members.iter().all(|m| m.scale(s).is_zero());
    let min_s = (1..=8).find(|&s| kills(s));
    check!(min_s == Some(2), "minimal s = {min_s:?}");
    let smallest_prime = |s: u128| (2..=s).find(|q| s.is_multiple_of(*q));
    let qualifying: Vec<u128> = (1..=8u128)
        .filter(|&s| kills(s) && smallest_prime(s).is_none_or(|q| q >= t))
        .collect();
    check!(qualifying.is_empty(), "qualifying s {qualifying:?}");

    let verdict = ok(verify_cnc(&r, &ideals))?;
    let failure = verdict.failure().ok_or("chain (<x>, 0) verified")?;
    check!(
        failure.condition == CncCondition::Characteristic,
        "condition {}",
        failure.condition
    );
    check!(failure.step == 1, "step {}", failure.step);
    check!(ok(failure.recheck(&ideals))?, "witness does not recheck");

    let x2 = ok(Ideal::generated(&r, &[x.mul(&x).unwrap()]))?;
    let refined = ok(ok(verify_cnc(&r, &[n, x2, zero]))?.into_chain())?;
    check!(
        refined.nilpotency_indexes() == [2, 2],
        "t = {:?}",
        refined.nilpotency_indexes()
    );
    check!(
        refined.characteristics() == [2, 2],
        "s = {:?}",
        refined.characteristics()
    );
    let b = ok(fermat_bounds(&r, &refined, WMode::RingOrder))?;
    check!(b.all_verified(), "verdicts {:?}", b.verdicts);
    for m in [b.m1, b.m2, b.m3].into_iter().flatten() {
        check!(all_units_satisfy(&r, m), "oracle rejects M = {m}");
    }
    Ok(())
}

/// Independent sampler: unit constant term, other coefficients multiples
/// of `p`, powered with schoolbook polynomial arithmetic over `Z/p^k`.
fn oracle_polynomial_units(p: u64, k: u32, deg: usize, count: usize, exponent: u128) -> bool {
    let q = p.pow(k);
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mul = |a: &[u64], b: &[u64]| {
        let mut c = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + x * y) % q;
            }
        }
        while c.len() > 1 && c.last() == Some(&0) {
            c.pop();
        }
        c
    };
    for _ in 0..count {
        let mut g = vec![0u64; deg + 1];
        g[0] = loop {
            let c = next() % q;
            if !c.is_multiple_of(p) {
                break c;
            }
        };
        for c in g.iter_mut().skip(1) {
            *c = p * (next() % q) % q;
        }
        let mut acc = vec![1u64];
        for _ in 0..exponent {
            acc = mul(&acc, &g);
        }
        if acc != [1] {
            return false;
        }
    }
    true
}

fn polynomial_sampling() -> Outcome {
    let a = ok(sample_polynomial_units(2, 2, 5, 1000, 2024))?;
    check!(
        a.exponent == 2 && a.sample_count == 1000,
        "Z/4[x]: exponent {}",
        a.exponent
    );
    check!(a.failures.is_empty(), "Z/4[x] failures {:?}", a.failures);
    let b = ok(sample_polynomial_units(3, 2, 4, 500, 2024))?;
    check!(
        b.exponent == 6 && b.sample_count == 500,
        "Z/9[x]: exponent {}",
        b.exponent
    );
    check!(b.failures.is_empty(), "Z/9[x] failures {:?}", b.failures);
    check!(oracle_polynomial_units(2, 2, 5, 1000, 2), "oracle: Z/4[x]");
    check!(oracle_polynomial_units(3, 2, 4, 500, 6), "oracle: Z/9[x]");
    Ok(())
}

fn corpus() -> Result<Vec<(Ring, CncChain)>, String> {
    let mut out = Vec::new();
    for (n, g) in [
        (12u64, 6i64),
        (8, 2),
        (9, 3),
        (25, 5),
        (49, 7),
        (36, 6),
        (4, 2),
    ] {
        let r = modular(n);
        out.push((r.clone(), chain_of(&r, &[int(&r, g)])?));
    }
    let dual = ok(Ring::poly_quotient(&modular(4), "u", &[0, 0, 1]))?;
    out.push((
        dual.clone(),
        chain_of(
            &dual,
            &[ok(dual.element(&[2]))?, ok(dual.element(&[0, 1]))?],
        )?,
    ));

    let z4 = modular(4);
    let lifted = ok(lift_chain_matrix(&chain_of(&z4, &[int(&z4, 2)])?, 2))?;
    out.push((lifted.lifted.ring().clone(), lifted.lifted));

    let g = ok(Ring::group_ring(
        &modular(9),
        ok(GroupDescriptor::cyclic(2))?,
    ))?;
    out.push((g.clone(), chain_of(&g, &[ok(g.element(&[3, 0]))?])?));

    for (p, k, q) in [(2u64, 2u32, vec![1i64, 1, 1]), (3, 2, vec![1, 0, 1])] {
        let gr = ok(galois_ring(p, k, &q))?;
        out.push((gr.ring, gr.chain));
    }

    let cube = ok(Ring::poly_quotient(&modular(2), "x", &[0, 0, 0, 1]))?;
    let x = ok(cube.element(&[0, 1]))?;
    out.push((cube.clone(), chain_of(&cube, &[x])?));

    let prod = ok(Ring::direct_product(&[modular(4), modular(9)]))?;
    out.push((
        prod.clone(),
        chain_of(&prod, &[ok(prod.element(&[2, 3]))?])?,
    ));

    // The length-one chain {0}: M1 = o(R), M2 = M3 = |R*|.
    out.push((modular(5), CncChain::trivial(&modular(5))));
    Ok(out)
}

fn property_suites() -> Outcome {
    for (ring, chain) in corpus()? {
        let orders = oracle_orders(&ring);
        let unit_count = orders.len() as u128;
        let b = ok(fermat_bounds(&ring, &chain, WMode::RingOrder))?;
        check!(!b.any_failed(), "{ring}: verdicts {:?}", b.verdicts);
        for (name, m) in [("M1", b.m1), ("M2", b.m2), ("M3", b.m3)] {
            let m = m.ok_or(format!("{ring}: {name} undefined"))?;
            check!(
                b.verdicts[name] == Verdict::Verified,
                "{ring}: {name} not verified"
            );
            if let Some(o) = orders.iter().find(|&&o| m % o != 0) {
                return Err(format!(
                    "{ring}: unit order {o} does not divide {name} = {m}"
                ));
            }
        }
        check!(
            ok(exponent_member(&ring, unit_count))?,
            "{ring}: |R*| = {unit_count} not in E(R)"
        );
        check!(
            b.unit_count == Some(unit_count),
            "{ring}: unit count {:?}",
            b.unit_count
        );
        check!(b.is_ordered() == Some(true), "{ring}: M1 <= M2 <= M3 fails");
    }

    let z49 = modular(49);
    let n = ok(Ideal::generated(&z49, &[int(&z49, 7)]))?;
    check!(n.len() == 7, "<7> has {} elements", n.len());
    for x in n.elements() {
        check!(
            ok(check_lifting_identity(&z49, &n, 7, &x))?,
            "lifting identity fails at n = {x}"
        );
        // Independent scan: (1+n)^7 - 1 = 7 n r for some r.
        let lhs = naive_pow(&z49.one().add(&x).unwrap(), 7)
            .sub(&z49.one())
            .unwrap();
        let found = ok(z49.elements())?
            .iter()
            .any(|r| x.scale(7).mul(r).unwrap() == lhs);
        check!(found, "oracle: no r for n = {x}");
    }
    Ok(())
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "Z/12 baseline",
            limit: secs(1),
            run: baseline_z12,
        },
        Criterion {
            id: 2,
            name: "Z/25 coset of 4",
            limit: secs(1),
            run: coset_z25,
        },
        Criterion {
            id: 3,
            name: "prime power equality",
            limit: secs(1),
            run: prime_powers,
        },
        Criterion {
            id: 4,
            name: "Z/4[u]/(u^2) bounds",
            limit: secs(1),
            run: dual_numbers_z4,
        },
        Criterion {
            id: 5,
            name: "M2(Z/4) units",
            limit: secs(5),
            run: matrix_m2_z4,
        },
        Criterion {
            id: 6,
            name: "Z/9[C2] bounds",
            limit: secs(1),
            run: group_ring_z9_c2,
        },
        Criterion {
            id: 7,
            name: "Galois rings",
            limit: secs(2),
            run: galois_rings,
        },
        Criterion {
            id: 8,
            name: "Euler lcm over Z/4 x Z/9",
            limit: secs(1),
            run: euler_z4_z9,
        },
        Criterion {
            id: 9,
            name: "CNC failure certificate",
            limit: secs(1),
            run: cnc_failure_certificate,
        },
        Criterion {
            id: 10,
            name: "polynomial unit sampling",
            limit: secs(5),
            run: polynomial_sampling,
        },
        Criterion {
            id: 11,
            name: "property suites",
            limit: secs(10),
            run: property_suites,
        },
    ];

    let mut results = BTreeMap::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed <= c.limit {
                Ok(())
            } else {
                Err(format!("took {elapsed:?}, limit {:?}", c.limit))
            }
        });
        match &outcome {
            Ok(()) => println!("PASS {:>2} {} ({:.0?})", c.id, c.name, elapsed),
            Err(why) => println!("FAIL {:>2} {} ({:.0?}): {why}", c.id, c.name, elapsed),
        }
        results.insert(c.id, outcome.is_ok());
    }
    let passed = results.values().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
