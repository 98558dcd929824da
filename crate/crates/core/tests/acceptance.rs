//! Acceptance criteria 1-12. Each test prints one `criterion N: PASS|FAIL`
//! line (visible with `--nocapture`) and then asserts.

use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fixdiv::fixdiv::{fixdiv_int_dense, fixdiv_int_sparse, fixdiv_matrix_exact, fixdiv_matrix_sampled};
use fixdiv::search::{bound_b_norm, search_b, search_tuples, SearchConfig};
use fixdiv::selfridge::{base_b_pairs, selfridge_pairs};
use fixdiv::{
    fixdiv_int, fixdiv_matrix, fixdiv_ring, FixdivMode, Ideal, MatR, MatrixPoly, Ring, RingElem, ScalarPoly,
    SpectralClass,
};

const FOURTEEN: [(u64, u64); 14] = [
    (1, 0),
    (2, 1),
    (3, 1),
    (4, 2),
    (5, 1),
    (5, 3),
    (6, 2),
    (7, 3),
    (8, 2),
    (8, 4),
    (9, 3),
    (14, 2),
    (15, 3),
    (16, 4),
];

fn verdict(n: u32, name: &str, ok: bool, detail: impl std::fmt::Display) {
    println!(
        "criterion {n:>2}: {} {name} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {n} failed: {name} ({detail})");
}

fn first<T: std::fmt::Debug>(bad: &[T]) -> String {
    bad.first().map(|b| format!(", first {b:?}")).unwrap_or_default()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fixdiv"))
}

fn cli_pairs(args: &[&str]) -> Vec<(u64, u64)> {
    let out = bin()
        .args(args)
        .args(["--format", "json"])
        .output()
        .expect("run binary");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json");
    let mut pairs: Vec<(u64, u64)> = v["pairs"]
        .as_array()
        .expect("pairs")
        .iter()
        .map(|p| (p["m"].as_u64().unwrap(), p["n"].as_u64().unwrap()))
        .collect();
    pairs.sort();
    pairs
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5e1f_0000 + tag)
}

fn random_elem(r: &mut ChaCha8Rng, ring: Ring, bound: i64) -> RingElem {
    let a = r.random_range(-bound..=bound);
    if ring.is_integers() {
        RingElem::from_int(ring, a)
    } else {
        RingElem::from_coords(ring, a, r.random_range(-bound..=bound))
    }
}

fn random_matrix(r: &mut ChaCha8Rng, ring: Ring, n: usize, bound: i64) -> MatR {
    MatR::from_entries(ring, n, (0..n * n).map(|_| random_elem(r, ring, bound)).collect()).unwrap()
}

fn random_matrix_poly(r: &mut ChaCha8Rng, ring: Ring, n: usize, max_exp: u64, bound: i64) -> MatrixPoly {
    loop {
        let k = r.random_range(1..=3);
        let terms: Vec<(MatR, u64)> = (0..k)
            .map(|_| (random_matrix(r, ring, n, bound), r.random_range(0..=max_exp)))
            .collect();
        let f = MatrixPoly::new(ring, n, terms).unwrap();
        if !f.is_zero() {
            return f;
        }
    }
}

fn criterion_01_selfridge_reproduction() {
    let start = Instant::now();
    let cli = cli_pairs(&["selfridge", "--max-m", "64"]);
    let mut lib = selfridge_pairs(64).unwrap().pair_list();
    lib.sort();
    let elapsed = start.elapsed();
    let ok = cli == FOURTEEN && lib == FOURTEEN && elapsed < Duration::from_secs(60);
    verdict(
        1,
        "selfridge --max-m 64 gives exactly the fourteen pairs",
        ok,
        format!("{} pairs, {elapsed:.2?}", cli.len()),
    );
}

fn criterion_02_other_bases() {
    let start = Instant::now();
    let mut found = Vec::new();
    for b in [3, 4, 5, 6, 10] {
        let cli = cli_pairs(&["selfridge", "--base", &b.to_string(), "--max-m", "30"]);
        let lib = base_b_pairs(b, 30).unwrap().pairs;
        if !cli.is_empty() || !lib.is_empty() {
            found.push(b);
        }
    }
    let elapsed = start.elapsed();
    let ok = found.is_empty() && elapsed < Duration::from_secs(300);
    verdict(
        2,
        "bases 3, 4, 5, 6, 10 have no pairs up to m = 30",
        ok,
        format!("nonempty bases {found:?}, {elapsed:.2?}"),
    );
}

/// gcd of `g(a)` for `a` in `[-100, 100]`.
fn window_gcd(g: &ScalarPoly) -> BigInt {
    (-100i64..=100).fold(BigInt::zero(), |acc, a| {
        acc.gcd(g.eval(&RingElem::from_int(Ring::Integers, a)).a())
    })
}

fn criterion_03_fixdiv_oracle_integers() {
    let mut r = rng(3);
    let z = Ring::Integers;
    let mut bad = Vec::new();
    let mut nontrivial = 0;
    for case in 0..200 {
        let k = r.random_range(1..=4);
        let terms: Vec<(i64, u64)> = (0..k)
            .map(|_| {
                let mut c = 0;
                while c == 0 {
                    c = r.random_range(-50..=50);
                }
                (c, r.random_range(0..=64))
            })
            .collect();
        let g = ScalarPoly::from_ints(z, &terms);
        let oracle = window_gcd(&g);
        let d = fixdiv_int(&g).unwrap();
        let dense = fixdiv_int_dense(&g).unwrap();
        let sparse = fixdiv_int_sparse(&g, 10_000_000).unwrap();
        nontrivial += (oracle > BigInt::one()) as u32;
        if d != oracle || dense != oracle || sparse != oracle {
            bad.push(format!(
                "case {case}: {g}: oracle {oracle}, fixdiv {d}, dense {dense}, sparse {sparse}"
            ));
        }
    }
    verdict(
        3,
        "fixdiv over Z equals the brute-force gcd; dense and sparse agree",
        bad.is_empty(),
        format!(
            "200 cases, {nontrivial} with d > 1, {} mismatches{}",
            bad.len(),
            first(&bad)
        ),
    );
}

fn criterion_04_fixdiv_oracle_quadratic() {
    let mut r = rng(4);
    let mut bad = Vec::new();
    let mut cases = 0;
    let mut nontrivial = 0;
    for ring in [Ring::gaussian(), Ring::quadratic(2).unwrap()] {
        for case in 0..50 {
            let k = r.random_range(1..=3);
            let terms: Vec<(RingElem, u64)> = (0..k)
                .map(|_| (random_elem(&mut r, ring, 6), r.random_range(0..=12)))
                .collect();
            let g = ScalarPoly::new(ring, terms).unwrap();
            if g.is_zero() {
                continue;
            }
            cases += 1;
            let mut values = Vec::new();
            for a in -10..=10 {
                for b in -10..=10 {
                    values.push(g.eval(&RingElem::from_coords(ring, a, b)));
                }
            }
            let oracle = Ideal::from_generators(ring, &values);
            let d = fixdiv_ring(&g).unwrap();
            nontrivial += !oracle.is_unit() as u32;
            if d != oracle {
                bad.push(format!("{ring} case {case}: {g}: box {oracle}, fixdiv {d}"));
            }
        }
    }
    verdict(
        4,
        "fixdiv over Z[i] and Z[sqrt(-2)] equals the box ideal",
        bad.is_empty(),
        format!(
            "{cases} cases, {nontrivial} proper, {} mismatches{}",
            bad.len(),
            first(&bad)
        ),
    );
}

fn criterion_05_matrix_fixdiv_consistency() {
    let mut r = rng(5);
    let z = Ring::Integers;
    let mut bad = Vec::new();
    let mut nontrivial = 0;
    // (x^4 - x)(x^2 - x) vanishes on M_2(F_2).
    let h = MatrixPoly::from_scalar(&ScalarPoly::parse(z, "x^6 - x^5 - x^3 + x^2").unwrap(), 2);
    for case in 0..30 {
        let base = random_matrix_poly(&mut r, z, 2, 6, 3);
        let f = match case % 3 {
            0 => base,
            1 => {
                let k = RingElem::from_int(z, [2, 3, 6][r.random_range(0..3)]);
                MatrixPoly::new(z, 2, base.terms().iter().map(|(a, e)| (a.scale(&k), *e))).unwrap()
            }
            _ => {
                let two = RingElem::from_int(z, 2);
                let terms = h
                    .terms()
                    .iter()
                    .cloned()
                    .chain(base.terms().iter().map(|(a, e)| (a.scale(&two), *e)));
                MatrixPoly::new(z, 2, terms).unwrap()
            }
        };
        if f.is_zero() {
            continue;
        }
        let exact = fixdiv_matrix_exact(&f, 10_000_000).unwrap();
        let sampled = fixdiv_matrix_sampled(&f, 10_000, case);
        nontrivial += !exact.is_unit() as u32;
        if exact != sampled {
            bad.push(format!("n=2 case {case}: {f}: exact {exact}, sampled {sampled}"));
        }
    }
    for case in 0..30 {
        let f = random_matrix_poly(&mut r, z, 1, 6, 20);
        let g = f.entry_poly(0, 0).unwrap();
        let exact = fixdiv_matrix(&f, FixdivMode::Exact, 10_000_000).unwrap().ideal;
        let scalar = Ideal::from_int_generator(z, fixdiv_int(&g).unwrap());
        if exact != scalar {
            bad.push(format!("n=1 case {case}: {g}: matrix {exact}, scalar {scalar}"));
        }
    }
    verdict(
        5,
        "exact matrix fixdiv equals 10^4 samples (n=2) and fixdiv_int (n=1)",
        bad.is_empty(),
        format!(
            "60 cases, {nontrivial} proper at n=2, {} mismatches{}",
            bad.len(),
            first(&bad)
        ),
    );
}

fn criterion_06_containment_chain() {
    let mut r = rng(6);
    let mut bad = Vec::new();
    let mut proper = 0;
    for case in 0..100 {
        let ring = if case % 2 == 0 {
            Ring::Integers
        } else {
            Ring::gaussian()
        };
        let mut f = random_matrix_poly(&mut r, ring, 2, 5, 3);
        if case % 4 >= 2 {
            // A common scalar factor makes d(M_n(R), f) proper.
            let k = if ring.is_integers() {
                RingElem::from_int(ring, 6)
            } else {
                RingElem::from_coords(ring, 1, 1)
            };
            f = MatrixPoly::new(ring, 2, f.terms().iter().map(|(a, e)| (a.scale(&k), *e))).unwrap();
        }
        let dm = fixdiv_matrix(&f, FixdivMode::Exact, 10_000_000).unwrap().ideal;
        proper += !dm.is_unit() as u32;
        for p in 0..2 {
            for q in 0..2 {
                let dr = fixdiv_ring(&f.entry_poly(p, q).unwrap()).unwrap();
                if !dm.contains_ideal(&dr) {
                    bad.push(format!(
                        "case {case} ({p},{q}): matrix {dm} does not contain {dr}"
                    ));
                }
            }
        }
    }
    verdict(
        6,
        "d(M_n(R), f) contains d(R, entry_poly(f, p, q))",
        bad.is_empty(),
        format!(
            "100 cases, {proper} proper, {} violations{}",
            bad.len(),
            first(&bad)
        ),
    );
}

fn random_ideal(r: &mut ChaCha8Rng, ring: Ring) -> Ideal {
    loop {
        let k = r.random_range(1..=2);
        let gens: Vec<RingElem> = (0..k).map(|_| random_elem(r, ring, 15)).collect();
        let i = Ideal::from_generators(ring, &gens);
        if !i.is_zero() {
            return i;
        }
    }
}

fn criterion_07_ideal_laws() {
    let mut r = rng(7);
    let rings: Vec<Ring> = [1, 2, 3, 5, 7, 11, 15]
        .iter()
        .map(|&d| Ring::quadratic(d).unwrap())
        .collect();
    let mut bad = Vec::new();
    for case in 0..200 {
        let ring = rings[case % rings.len()];
        let i = random_ideal(&mut r, ring);
        let j = random_ideal(&mut r, ring);
        let lhs = i.product(&j).norm().unwrap();
        let rhs = i.norm().unwrap() * j.norm().unwrap();
        if lhs != rhs {
            bad.push(format!("norm case {case}: N({i} * {j}) = {lhs} != {rhs}"));
        }
    }
    for case in 0..100 {
        let ring = rings[case % rings.len()];
        let i = random_ideal(&mut r, ring);
        let x = loop {
            let x = i
                .basis_elems()
                .iter()
                .fold(ring.zero(), |acc, b| &acc + &(b * &random_elem(&mut r, ring, 5)));
            if !x.is_zero() {
                break x;
            }
        };
        let q = Ideal::quotient(&x, &i).unwrap();
        if i.product(&q) != Ideal::principal(&x) {
            bad.push(format!("quotient case {case}: {i} * ({x} : {i}) != ({x})"));
        }
    }
    verdict(
        7,
        "N(IJ) = N(I)N(J) and I * (x : I) = (x)",
        bad.is_empty(),
        format!("300 cases, {} violations{}", bad.len(), first(&bad)),
    );
}

fn criterion_08_membership() {
    let mut r = rng(8);
    let mut bad = Vec::new();
    for case in 0..200 {
        let ring = if case % 2 == 0 {
            Ring::Integers
        } else {
            Ring::gaussian()
        };
        let n = r.random_range(1..=3);
        let f = random_matrix_poly(&mut r, ring, n, 5, 4);
        let b = random_matrix(&mut r, ring, n, 3);
        let fb = f.eval(&b).unwrap();
        let norm = RingElem::from_int(ring, fb.frob_norm_sq());
        if !fb.entry_ideal().contains(&norm) {
            bad.push(format!(
                "case {case}: ||f(B)||^2 = {norm} not in {}",
                fb.entry_ideal()
            ));
        }
    }
    verdict(
        8,
        "||f(B)||^2 lies in I_f(B)",
        bad.is_empty(),
        format!("200 cases, {} violations{}", bad.len(), first(&bad)),
    );
}

fn criterion_09_n1_collapse() {
    let z = Ring::Integers;
    let coeffs = [MatR::from_ints(z, 1, &[1]), MatR::from_ints(z, 1, &[-1])];
    let r = search_tuples(
        &coeffs,
        &MatR::from_ints(z, 1, &[2]),
        20,
        &SearchConfig::default(),
    )
    .unwrap();
    let mut matrix: Vec<(u64, u64)> = r.hits.iter().map(|h| (h.tuple[0], h.tuple[1])).collect();
    matrix.sort();
    let mut scalar = selfridge_pairs(20).unwrap().pair_list();
    scalar.sort();
    let ok = matrix == scalar && matrix == FOURTEEN;
    verdict(
        9,
        "search_tuples at n = 1 equals selfridge_pairs(20)",
        ok,
        format!("{} vs {} tuples", matrix.len(), scalar.len()),
    );
}

/// Eigenvalues of `B*B` in floating point.
fn float_spectrum(b: &MatR) -> Vec<f64> {
    let n = b.n();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let (re, im) = b.get(i, j).to_complex();
        Complex::new(re, im)
    });
    let h = m.adjoint() * &m;
    h.symmetric_eigenvalues().iter().copied().collect()
}

fn float_class(eigs: &[f64]) -> SpectralClass {
    if eigs.iter().all(|&l| l > 1.0) {
        SpectralClass::AllAboveOne
    } else if eigs.iter().all(|&l| l < 1.0) {
        SpectralClass::AllBelowOne
    } else {
        SpectralClass::Mixed
    }
}

fn criterion_10_spectral_classifier() {
    let mut r = rng(10);
    let mut bad = Vec::new();
    let mut compared = 0;
    let mut skipped = 0;
    for case in 0..200 {
        let ring = if case % 2 == 0 {
            Ring::Integers
        } else {
            Ring::gaussian()
        };
        let n = 2 + case % 2;
        let b = random_matrix(&mut r, ring, n, 2);
        let exact = b.spectral_class();
        let eigs = float_spectrum(&b);
        if eigs.iter().any(|&l| l.abs() < 1e-9 || (l - 1.0).abs() < 1e-9) {
            // Float spectrum is too close to call; the exact minors decide.
            skipped += 1;
            assert!(matches!(
                exact,
                SpectralClass::Singular
                    | SpectralClass::Boundary
                    | SpectralClass::AllAboveOne
                    | SpectralClass::Mixed
            ));
            continue;
        }
        compared += 1;
        if exact != float_class(&eigs) {
            bad.push(format!("case {case}: B = {b}: exact {exact}, float {eigs:?}"));
        }
    }
    verdict(
        10,
        "exact spectral class agrees with float eigenvalues",
        bad.is_empty(),
        format!(
            "{compared} compared, {skipped} near 0 or 1, {} disagreements{}",
            bad.len(),
            first(&bad)
        ),
    );
}

fn criterion_11_growth_shape() {
    let z = Ring::Integers;
    let coeffs = [MatR::from_ints(z, 1, &[1]), MatR::from_ints(z, 1, &[-1])];
    let r = search_tuples(
        &coeffs,
        &MatR::from_ints(z, 1, &[2]),
        40,
        &SearchConfig::default(),
    )
    .unwrap();
    let mut bad = Vec::new();
    for m in 2..=40u64 {
        let row = r.growth.iter().find(|g| g.m == m);
        let min = row.and_then(|g| g.min_frob_norm_sq.clone());
        // Independent minimum over f = x^m - x^n, n < m.
        let direct = (0..m)
            .map(|n| {
                let v = (BigInt::one() << m) - (BigInt::one() << n);
                &v * &v
            })
            .min()
            .unwrap();
        let floor = BigInt::one() << (2 * (m - 1));
        if min.as_ref() != Some(&direct) || direct < floor {
            bad.push(format!("m = {m}: report {min:?}, direct {direct}, floor {floor}"));
        }
    }
    verdict(
        11,
        "stratum minimum of ||f(B)||^2 is at least 4^(m-1), 2 <= m <= 40",
        bad.is_empty(),
        format!("{} violations{}", bad.len(), first(&bad)),
    );
}

fn criterion_12_bound_and_b_search() {
    let start = Instant::now();
    let z = Ring::Integers;
    let coeffs = [MatR::from_ints(z, 1, &[1]), MatR::from_ints(z, 1, &[-1])];
    let bound = bound_b_norm(&coeffs).unwrap();
    let t_ok = bound.t == BigRational::from_integer(BigInt::from(8)) && bound.exact;
    let report = search_b(&coeffs, 16, 8, &SearchConfig::default()).unwrap();
    let mut found: Vec<(i64, Vec<(u64, u64)>)> = report
        .hits
        .iter()
        .map(|h| {
            let b: i64 = h.b.get(0, 0).a().try_into().unwrap();
            let mut ts: Vec<(u64, u64)> = h.tuples.iter().map(|t| (t.tuple[0], t.tuple[1])).collect();
            ts.sort();
            (b, ts)
        })
        .collect();
    found.sort();
    // Independent sweep: every b in the box that passes A.1 and A.2.
    let mut sweep = Vec::new();
    for b in -8i64..=8 {
        if b.abs() < 2 {
            continue;
        }
        let mut ts = base_b_pairs(b, 16).unwrap().pair_list();
        ts.sort();
        if !ts.is_empty() {
            sweep.push((b, ts));
        }
    }
    let elapsed = start.elapsed();
    let ok = t_ok
        && report.box_covers_bound
        && found == sweep
        && report.hits.iter().all(|h| h.vandermonde_ok)
        && elapsed < Duration::from_secs(600);
    let bs: Vec<i64> = found.iter().map(|(b, _)| *b).collect();
    verdict(
        12,
        "T = 8 and search_B (box 8, m <= 16) matches the per-b sweep",
        ok,
        format!("T = {}, B with solutions {bs:?}, {elapsed:.2?}", bound.t),
    );
}

fn main() {
    let criteria: [(&str, fn()); 12] = [
        ("selfridge_reproduction", criterion_01_selfridge_reproduction),
        ("other_bases", criterion_02_other_bases),
        ("fixdiv_oracle_integers", criterion_03_fixdiv_oracle_integers),
        ("fixdiv_oracle_quadratic", criterion_04_fixdiv_oracle_quadratic),
        (
            "matrix_fixdiv_consistency",
            criterion_05_matrix_fixdiv_consistency,
        ),
        ("containment_chain", criterion_06_containment_chain),
        ("ideal_laws", criterion_07_ideal_laws),
        ("membership", criterion_08_membership),
        ("n1_collapse", criterion_09_n1_collapse),
        ("spectral_classifier", criterion_10_spectral_classifier),
        ("growth_shape", criterion_11_growth_shape),
        ("bound_and_b_search", criterion_12_bound_and_b_search),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        if std::panic::catch_unwind(run).is_err() {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
