//! Conditions A.1, A.2, B.1, B.2 for `f = sum A_i x^{m_i}` and `B`, the
//! windowed search over exponent tuples, the norm cutoff for `B`, and the
//! search over a box of candidate matrices `B`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fixdiv::{fixdiv_matrix, matrix_starter_ideal, Certification, FixdivMode, MatrixFixdiv};
use crate::ideal::{Ideal, DEFAULT_RESIDUE_CAP};
use crate::matrix::{MatR, SpectralClass};
use crate::par;
use crate::poly::MatrixPoly;
use crate::ring::{Ring, RingElem};

pub const DEFAULT_SUBSET_CAP: usize = 20;

/// Bits of precision for square roots that are not exact.
const SQRT_BITS: u32 = 32;

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub mode: FixdivMode,
    /// Cap on residue scans and on enumeration sizes.
    pub residue_cap: u64,
    pub subset_cap: usize,
    /// Scan every tuple in `[0, max_m]^k` instead of nonincreasing ones.
    pub all_orders: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: FixdivMode::Exact,
            residue_cap: DEFAULT_RESIDUE_CAP,
            subset_cap: DEFAULT_SUBSET_CAP,
            all_orders: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AReport {
    pub a1: bool,
    pub a2: bool,
    pub spectral_class: SpectralClass,
}

impl AReport {
    pub fn holds(&self) -> bool {
        self.a1 && self.a2
    }

    fn require(&self) -> Result<()> {
        if !self.a1 {
            return Err(Error::HypothesisFailed(
                "A.1 (entry ideal of B is the whole ring)",
            ));
        }
        if !self.a2 {
            return Err(Error::HypothesisFailed(
                "A.2 (spectrum of B*B not separated from 1)",
            ));
        }
        Ok(())
    }
}

/// A.1: the entries of `B` generate a proper ideal. A.2: the eigenvalues of
/// `B*B` are all above 1 or all below 1.
pub fn check_a(b: &MatR) -> AReport {
    let spectral_class = b.spectral_class();
    AReport {
        a1: !b.entry_ideal().is_unit(),
        a2: spectral_class.is_admissible(),
        spectral_class,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct B1Report {
    pub holds: bool,
    /// Vanishing subsets, as sorted 1-based term indices.
    pub failures: Vec<Vec<usize>>,
}

fn validate(coeffs: &[MatR], exps: &[u64], b: &MatR) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::Invalid("no coefficients".into()));
    }
    if coeffs.len() != exps.len() {
        return Err(Error::Invalid(format!(
            "{} coefficients but {} exponents",
            coeffs.len(),
            exps.len()
        )));
    }
    for a in coeffs {
        if a.ring() != b.ring() {
            return Err(Error::RingMismatch(b.ring().to_string(), a.ring().to_string()));
        }
        if a.n() != b.n() {
            return Err(Error::DimensionMismatch(b.n(), a.n()));
        }
    }
    Ok(())
}

/// B.1 from the term values `A_i B^{m_i}`, visiting subsets in Gray-code
/// order so each step is one matrix addition.
fn b1_from_terms(terms: &[MatR], cap: usize) -> Result<B1Report> {
    let k = terms.len();
    if k > cap || k >= 64 {
        return Err(Error::SubsetExplosion { k, cap });
    }
    let mut sum = MatR::zero(terms[0].ring(), terms[0].n());
    let mut mask = 0u64;
    let mut failures = Vec::new();
    for g in 1..(1u64 << k) {
        let bit = g.trailing_zeros() as usize;
        mask ^= 1 << bit;
        sum = if mask & (1 << bit) != 0 {
            &sum + &terms[bit]
        } else {
            &sum - &terms[bit]
        };
        if sum.is_zero() {
            failures.push(
                (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| i + 1)
                    .collect::<Vec<_>>(),
            );
        }
    }
    failures.sort();
    Ok(B1Report {
        holds: failures.is_empty(),
        failures,
    })
}

pub fn check_b1(coeffs: &[MatR], exps: &[u64], b: &MatR, subset_cap: usize) -> Result<B1Report> {
    validate(coeffs, exps, b)?;
    let mut powers = PowerCache::new(b);
    let terms: Vec<MatR> = coeffs.iter().zip(exps).map(|(a, &e)| a * powers.get(e)).collect();
    b1_from_terms(&terms, subset_cap)
}

struct PowerCache<'a> {
    b: &'a MatR,
    powers: BTreeMap<u64, MatR>,
}

impl<'a> PowerCache<'a> {
    fn new(b: &'a MatR) -> Self {
        PowerCache {
            b,
            powers: BTreeMap::new(),
        }
    }

    fn get(&mut self, e: u64) -> &MatR {
        if !self.powers.contains_key(&e) {
            let p = self.b.pow(e);
            self.powers.insert(e, p);
        }
        &self.powers[&e]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum B2Verdict {
    Holds,
    /// Only a sampled lower bound of the fixed divisor is known to lie in
    /// `I_{f(B)}`.
    HoldsUncertified,
    Fails,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct B2Report {
    pub verdict: B2Verdict,
    pub f_of_b_entry_ideal: Ideal,
    pub fixdiv: Ideal,
    pub certification: Certification,
}

fn verdict(i_fb: &Ideal, fx: &MatrixFixdiv) -> B2Verdict {
    match (i_fb.contains_ideal(&fx.ideal), fx.is_certified()) {
        (false, _) => B2Verdict::Fails,
        (true, true) => B2Verdict::Holds,
        (true, false) => B2Verdict::HoldsUncertified,
    }
}

/// B.2: `I_{f(B)}` contains `d(M_n(R), f)`.
pub fn check_b2(f: &MatrixPoly, b: &MatR, mode: FixdivMode, cap: u64) -> Result<B2Report> {
    let i_fb = f.eval(b)?.entry_ideal();
    let fx = fixdiv_matrix(f, mode, cap)?;
    Ok(B2Report {
        verdict: verdict(&i_fb, &fx),
        f_of_b_entry_ideal: i_fb,
        fixdiv: fx.ideal,
        certification: fx.certification,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub tuple: Vec<u64>,
    pub a1: bool,
    pub a2: bool,
    pub spectral_class: SpectralClass,
    pub b1: bool,
    pub b1_failures: Vec<Vec<usize>>,
    pub b2: B2Verdict,
    pub f_of_b_entry_ideal: Ideal,
    pub fixdiv: Ideal,
    pub certification: Certification,
    #[serde(serialize_with = "crate::io::ser_bigint")]
    pub frob_norm_sq: BigInt,
    /// Whether `||A_1|| ||B||^{m_1} / 2 <= ||f(B)||` held, when `||B||` is
    /// large enough for that estimate to be claimed; `None` otherwise.
    pub lower_bound_check: Option<bool>,
}

impl ConditionReport {
    pub fn is_hit(&self) -> bool {
        self.b1 && self.b2 == B2Verdict::Holds
    }
}

/// All four conditions for one tuple.
pub fn check(coeffs: &[MatR], exps: &[u64], b: &MatR, config: &SearchConfig) -> Result<ConditionReport> {
    validate(coeffs, exps, b)?;
    let a = check_a(b);
    let b1 = check_b1(coeffs, exps, b, config.subset_cap)?;
    let f = MatrixPoly::from_tuple(coeffs, exps)?;
    let fb = f.eval(b)?;
    let b2 = check_b2(&f, b, config.mode, config.residue_cap)?;
    let frob = fb.frob_norm_sq();
    Ok(ConditionReport {
        tuple: exps.to_vec(),
        a1: a.a1,
        a2: a.a2,
        spectral_class: a.spectral_class,
        b1: b1.holds,
        b1_failures: b1.failures,
        b2: b2.verdict,
        f_of_b_entry_ideal: b2.f_of_b_entry_ideal,
        fixdiv: b2.fixdiv,
        certification: b2.certification,
        lower_bound_check: lower_bound_check(&f, b, &frob),
        frob_norm_sq: frob,
    })
}

/// `floor(sqrt(x) * 2^SQRT_BITS)` and the matching ceiling.
fn sqrt_scaled(x: &BigInt) -> (BigInt, BigInt) {
    let scaled = x << (2 * SQRT_BITS);
    let lo = scaled.sqrt();
    let hi = if &lo * &lo == scaled { lo.clone() } else { &lo + 1 };
    (lo, hi)
}

fn is_square(x: &BigInt) -> bool {
    let r = x.sqrt();
    &r * &r == *x
}

/// Tests the estimate from the norm argument on this instance. It is only
/// claimed when `||A_1|| ||B|| >= 2 sum_{i>=2} ||A_i||`, with `A_1` the
/// coefficient of the largest exponent.
fn lower_bound_check(f: &MatrixPoly, b: &MatR, frob_fb: &BigInt) -> Option<bool> {
    let (lead, m1) = f.terms().last().map(|(a, e)| (a.frob_norm_sq(), *e))?;
    let frob_b = b.frob_norm_sq();
    let rest_hi: BigInt = f.terms()[..f.terms().len() - 1]
        .iter()
        .map(|(a, _)| sqrt_scaled(&a.frob_norm_sq()).1)
        .sum();
    let (lhs_lo, _) = sqrt_scaled(&(&lead * &frob_b));
    if lhs_lo < rest_hi * 2 {
        return None;
    }
    let claimed = lead * num_traits::pow(frob_b, m1 as usize);
    Some(claimed <= frob_fb * 4)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    /// Largest exponent of the stratum.
    pub m: u64,
    /// Tuples in the stratum that satisfy B.1.
    pub tuples: u64,
    #[serde(serialize_with = "crate::io::ser_opt_bigint")]
    pub min_frob_norm_sq: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedTuple {
    pub tuple: Vec<u64>,
    /// Contained in the fixed divisor and inside `I_{f(B)}`, so B.2 is open.
    pub partial: Ideal,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub tuples_scanned: u64,
    pub b1_failures: u64,
    /// B.2 refuted by the starter ideal alone.
    pub pruned_by_starter_ideal: u64,
    pub fixdiv_evaluations: u64,
    pub uncertified: Vec<Vec<u64>>,
    pub truncated: Vec<TruncatedTuple>,
    pub lower_bound_checked: u64,
    pub lower_bound_failures: Vec<Vec<u64>>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub ring: Ring,
    pub n: usize,
    #[serde(rename = "B")]
    pub b: MatR,
    pub window: u64,
    pub all_orders: bool,
    pub hypotheses: AReport,
    pub hits: Vec<ConditionReport>,
    pub growth: Vec<GrowthRow>,
    pub diagnostics: Diagnostics,
}

impl SearchReport {
    pub fn hit_tuples(&self) -> Vec<Vec<u64>> {
        self.hits.iter().map(|h| h.tuple.clone()).collect()
    }

    /// Some tuple was left undecided because a scan cap was hit.
    pub fn is_truncated(&self) -> bool {
        !self.diagnostics.truncated.is_empty()
    }
}

/// Exponent tuples: nonincreasing ones by default, all of `[0, max_m]^k`
/// with `all_orders`.
pub fn tuples(k: usize, max_m: u64, all_orders: bool) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(k: usize, max_m: u64, all: bool, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        let hi = if all {
            max_m
        } else {
            cur.last().copied().unwrap_or(max_m)
        };
        for e in (0..=hi).rev() {
            cur.push(e);
            rec(k, max_m, all, cur, out);
            cur.pop();
        }
    }
    rec(k, max_m, all_orders, &mut cur, &mut out);
    out
}

fn tuple_count(k: usize, max_m: u64, all_orders: bool) -> BigInt {
    let w = BigInt::from(max_m) + 1;
    if all_orders {
        num_traits::pow(w, k)
    } else {
        // Multisets of size k from max_m + 1 values.
        let mut c = BigInt::one();
        for i in 0..k {
            c = c * (&w + i) / (i + 1);
        }
        c
    }
}

#[derive(Clone, Debug)]
enum CachedFixdiv {
    Done(MatrixFixdiv),
    Capped(Ideal),
}

/// Fixed divisors by tuple. `f` does not depend on `B`, so one cache serves
/// a whole `B` search. Entries are deterministic, so racing writers agree.
#[derive(Default)]
struct FixdivCache {
    map: Mutex<HashMap<Vec<u64>, CachedFixdiv>>,
}

impl FixdivCache {
    fn get(&self, tuple: &[u64], f: &MatrixPoly, config: &SearchConfig) -> Result<(CachedFixdiv, bool)> {
        if let Some(c) = self.map.lock().expect("cache lock").get(tuple) {
            return Ok((c.clone(), false));
        }
        let value = match fixdiv_matrix(f, config.mode, config.residue_cap) {
            Ok(fx) => CachedFixdiv::Done(fx),
            Err(Error::ScanCap { partial, .. }) => CachedFixdiv::Capped(*partial),
            Err(e) => return Err(e),
        };
        self.map
            .lock()
            .expect("cache lock")
            .insert(tuple.to_vec(), value.clone());
        Ok((value, true))
    }
}

enum Outcome {
    B1Fail,
    Pruned {
        frob: BigInt,
    },
    Decided {
        report: ConditionReport,
        computed: bool,
    },
    Truncated {
        frob: BigInt,
        partial: Ideal,
        computed: bool,
    },
}

struct TupleCtx<'a> {
    coeffs: &'a [MatR],
    b: &'a MatR,
    a: AReport,
    powers: &'a [MatR],
    config: &'a SearchConfig,
    cache: &'a FixdivCache,
}

impl TupleCtx<'_> {
    fn run(&self, tuple: &[u64]) -> Result<Outcome> {
        let terms: Vec<MatR> = self
            .coeffs
            .iter()
            .zip(tuple)
            .map(|(a, &e)| a * &self.powers[e as usize])
            .collect();
        let b1 = b1_from_terms(&terms, self.config.subset_cap)?;
        if !b1.holds {
            return Ok(Outcome::B1Fail);
        }
        let fb = terms.iter().skip(1).fold(terms[0].clone(), |acc, t| &acc + t);
        let frob = fb.frob_norm_sq();
        let f = MatrixPoly::from_tuple(self.coeffs, tuple)?;
        let i_fb = fb.entry_ideal();
        if !i_fb.contains_ideal(&matrix_starter_ideal(&f)) {
            return Ok(Outcome::Pruned { frob });
        }
        let (fx, computed) = self.cache.get(tuple, &f, self.config)?;
        let fx = match fx {
            CachedFixdiv::Done(fx) => fx,
            CachedFixdiv::Capped(partial) => {
                if !i_fb.contains_ideal(&partial) {
                    return Ok(Outcome::Pruned { frob });
                }
                return Ok(Outcome::Truncated {
                    frob,
                    partial,
                    computed,
                });
            }
        };
        let report = ConditionReport {
            tuple: tuple.to_vec(),
            a1: self.a.a1,
            a2: self.a.a2,
            spectral_class: self.a.spectral_class,
            b1: true,
            b1_failures: Vec::new(),
            b2: verdict(&i_fb, &fx),
            f_of_b_entry_ideal: i_fb,
            fixdiv: fx.ideal,
            certification: fx.certification,
            lower_bound_check: lower_bound_check(&f, self.b, &frob),
            frob_norm_sq: frob,
        };
        Ok(Outcome::Decided { report, computed })
    }
}

/// All tuples with entries in `[0, max_m]` satisfying B.1 and B.2 for `B`.
/// Requires A.1 and A.2.
pub fn search_tuples(coeffs: &[MatR], b: &MatR, max_m: u64, config: &SearchConfig) -> Result<SearchReport> {
    let a = check_a(b);
    a.require()?;
    scan(coeffs, b, a, max_m, config, &FixdivCache::default(), false)
}

fn scan(
    coeffs: &[MatR],
    b: &MatR,
    a: AReport,
    max_m: u64,
    config: &SearchConfig,
    cache: &FixdivCache,
    skip_zero_tuple: bool,
) -> Result<SearchReport> {
    validate(coeffs, &vec![0; coeffs.len()], b)?;
    let k = coeffs.len();
    if k > config.subset_cap {
        return Err(Error::SubsetExplosion {
            k,
            cap: config.subset_cap,
        });
    }
    let count = tuple_count(k, max_m, config.all_orders);
    if count > BigInt::from(config.residue_cap) {
        return Err(Error::ResidueCap {
            count: count.to_string(),
            cap: config.residue_cap,
        });
    }
    let mut all = tuples(k, max_m, config.all_orders);
    if skip_zero_tuple {
        all.retain(|t| t.iter().any(|&e| e != 0));
    }
    let mut powers = vec![MatR::identity(b.ring(), b.n())];
    for _ in 0..max_m {
        let next = powers.last().expect("nonempty") * b;
        powers.push(next);
    }
    let ctx = TupleCtx {
        coeffs,
        b,
        a,
        powers: &powers,
        config,
        cache,
    };
    let outcomes = par::map(&all, |t| ctx.run(t));

    let mut diagnostics = Diagnostics {
        tuples_scanned: all.len() as u64,
        ..Default::default()
    };
    let mut growth: BTreeMap<u64, GrowthRow> = BTreeMap::new();
    let mut hits = Vec::new();
    for (tuple, outcome) in all.iter().zip(outcomes) {
        let m = tuple.iter().copied().max().unwrap_or(0);
        let frob = match outcome? {
            Outcome::B1Fail => {
                diagnostics.b1_failures += 1;
                continue;
            }
            Outcome::Pruned { frob } => {
                diagnostics.pruned_by_starter_ideal += 1;
                frob
            }
            Outcome::Truncated {
                frob,
                partial,
                computed,
            } => {
                diagnostics.fixdiv_evaluations += computed as u64;
                diagnostics.truncated.push(TruncatedTuple {
                    tuple: tuple.clone(),
                    partial,
                });
                frob
            }
            Outcome::Decided { report, computed } => {
                diagnostics.fixdiv_evaluations += computed as u64;
                let frob = report.frob_norm_sq.clone();
                if let Some(ok) = report.lower_bound_check {
                    diagnostics.lower_bound_checked += 1;
                    if !ok {
                        diagnostics.lower_bound_failures.push(tuple.clone());
                    }
                }
                match report.b2 {
                    B2Verdict::Holds => hits.push(report),
                    B2Verdict::HoldsUncertified => diagnostics.uncertified.push(tuple.clone()),
                    B2Verdict::Fails => {}
                }
                frob
            }
        };
        let row = growth.entry(m).or_insert(GrowthRow {
            m,
            tuples: 0,
            min_frob_norm_sq: None,
        });
        row.tuples += 1;
        if row.min_frob_norm_sq.as_ref().is_none_or(|x| &frob < x) {
            row.min_frob_norm_sq = Some(frob);
        }
    }
    if a.spectral_class == SpectralClass::AllBelowOne {
        diagnostics.notes.push(
            "all eigenvalues of B*B are below 1; over these rings this cannot happen for a nonzero integral B".into(),
        );
    }
    if matches!(config.mode, FixdivMode::Sampled { .. }) {
        diagnostics.notes.push(
            "sampled fixed divisors: tuples passing B.2 only on a lower bound are listed as uncertified"
                .into(),
        );
    }
    Ok(SearchReport {
        ring: b.ring(),
        n: b.n(),
        b: b.clone(),
        window: max_m,
        all_orders: config.all_orders,
        hypotheses: a,
        hits,
        growth: growth.into_values().collect(),
        diagnostics,
    })
}

fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

/// Norm cutoff for `B`: any `B` with `||B|| > t` contradicts B.2 for every
/// tuple whose largest exponent carries the leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    /// Index (0-based) of the coefficient treated as leading.
    pub leading: usize,
    /// `2 sum_{i>=2} ||A_i|| / ||A_1||`, or an upper bound for it.
    #[serde(serialize_with = "ser_rational")]
    pub ratio_term: BigRational,
    /// `2^k sqrt(n) sum_i ||A_i|| / ||A_1||`, or an upper bound for it.
    #[serde(serialize_with = "ser_rational")]
    pub growth_term: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub t: BigRational,
    /// `floor(t^2)`: candidates need `||B||^2 <= t_sq_floor`.
    #[serde(serialize_with = "crate::io::ser_bigint")]
    pub t_sq_floor: BigInt,
    /// All square roots involved were exact.
    pub exact: bool,
}

impl BoundReport {
    pub fn t_f64(&self) -> f64 {
        self.t.numer().to_f64().unwrap_or(f64::INFINITY) / self.t.denom().to_f64().unwrap_or(1.0)
    }
}

/// Cutoff with `coeffs[0]` as the leading coefficient.
pub fn bound_b_norm(coeffs: &[MatR]) -> Result<BoundReport> {
    bound_with_leading(coeffs, 0)
}

/// Largest cutoff over every choice of nonzero leading coefficient.
pub fn bound_b_norm_any_leading(coeffs: &[MatR]) -> Result<BoundReport> {
    let mut best: Option<BoundReport> = None;
    for i in 0..coeffs.len() {
        if coeffs[i].is_zero() {
            continue;
        }
        let r = bound_with_leading(coeffs, i)?;
        if best.as_ref().is_none_or(|b| r.t > b.t) {
            best = Some(r);
        }
    }
    best.ok_or(Error::ZeroCoefficients)
}

fn bound_with_leading(coeffs: &[MatR], leading: usize) -> Result<BoundReport> {
    let first = coeffs.first().ok_or(Error::ZeroCoefficients)?;
    if coeffs.iter().all(MatR::is_zero) {
        return Err(Error::ZeroCoefficients);
    }
    if coeffs[leading].is_zero() {
        return Err(Error::Invalid(format!(
            "leading coefficient {} is zero",
            leading + 1
        )));
    }
    let n = first.n();
    let k = coeffs.len();
    // Divide out the common factor of the squared norms so the result is
    // exactly invariant under scaling.
    let sq: Vec<BigInt> = coeffs.iter().map(MatR::frob_norm_sq).collect();
    let g = sq.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let sq: Vec<BigInt> = sq.iter().map(|x| x / &g).collect();
    let n_big = BigInt::from(n);
    let exact = sq.iter().all(is_square) && is_square(&n_big);

    let scale = BigInt::one() << SQRT_BITS;
    let up = |x: &BigInt| BigRational::new(sqrt_scaled(x).1, scale.clone());
    let lead_lo = BigRational::new(sqrt_scaled(&sq[leading]).0, scale.clone());
    let rest: BigRational = sq
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != leading)
        .map(|(_, x)| up(x))
        .fold(BigRational::zero(), |a, b| a + b);
    let all = &rest + up(&sq[leading]);
    let two = BigRational::from_integer(BigInt::from(2));
    let ratio_term = &two * &rest / &lead_lo;
    let pow2k = BigRational::from_integer(BigInt::one() << k);
    let growth_term = pow2k * up(&n_big) * all / &lead_lo;
    let t = if ratio_term > growth_term {
        ratio_term.clone()
    } else {
        growth_term.clone()
    };
    let t_sq = &t * &t;
    let t_sq_floor = t_sq.numer().div_floor(t_sq.denom());
    Ok(BoundReport {
        leading,
        ratio_term,
        growth_term,
        t,
        t_sq_floor,
        exact,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BHit {
    #[serde(rename = "B")]
    pub b: MatR,
    pub tuples: Vec<ConditionReport>,
    /// Some `f(2^j I)`, `0 <= j < k`, is nonzero for every hit tuple.
    pub vandermonde_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BSearchReport {
    pub ring: Ring,
    pub n: usize,
    pub window: u64,
    pub entry_box: i64,
    pub bound: BoundReport,
    pub box_covers_bound: bool,
    pub warnings: Vec<String>,
    pub candidates_in_box: u64,
    pub candidates_within_bound: u64,
    pub excluded_a1: u64,
    pub excluded_a2: u64,
    pub searched: u64,
    pub hits: Vec<BHit>,
    pub uncertified: Vec<(MatR, Vec<u64>)>,
    pub truncated: Vec<(MatR, TruncatedTuple)>,
    pub lower_bound_checked: u64,
    pub lower_bound_failures: u64,
}

impl BSearchReport {
    pub fn is_truncated(&self) -> bool {
        !self.truncated.is_empty()
    }
}

/// Largest coordinate magnitudes `(a, b)` of any `a + b*w` with squared
/// modulus at most `t_sq`.
fn coordinate_reach(ring: Ring, t_sq: &BigInt) -> (BigInt, BigInt) {
    match ring {
        Ring::Integers => (t_sq.sqrt(), BigInt::zero()),
        Ring::Quadratic { .. } => {
            // |a + b w|^2 = (a + t b / 2)^2 + (4 s - t^2) b^2 / 4.
            let t = BigInt::from(ring.omega_trace());
            let disc = BigInt::from(4 * ring.omega_norm()) - &t * &t;
            let b_max = (t_sq * BigInt::from(4) / &disc).sqrt();
            let a_max = t_sq.sqrt() + (&t * &b_max + 1) / 2;
            (a_max, b_max)
        }
    }
}

fn int_sign(x: i64) -> BigInt {
    BigInt::from(x)
}

fn box_matrix(ring: Ring, n: usize, entry_box: i64, mut idx: u64) -> MatR {
    let base = (2 * entry_box + 1) as u64;
    let mut digit = || {
        let d = (idx % base) as i64 - entry_box;
        idx /= base;
        d
    };
    let entries = (0..n * n)
        .map(|_| {
            let a = digit();
            if ring.is_integers() {
                RingElem::from_int(ring, a)
            } else {
                RingElem::new(ring, int_sign(a), int_sign(digit()))
            }
        })
        .collect();
    MatR::from_entries(ring, n, entries).expect("square")
}

/// Every `B` with coordinates in `[-entry_box, entry_box]` and
/// `||B||^2 <= floor(T^2)`, and for each the tuples (not all zero) with
/// entries in `[0, max_m]` satisfying B.1 and B.2.
pub fn search_b(coeffs: &[MatR], max_m: u64, entry_box: i64, config: &SearchConfig) -> Result<BSearchReport> {
    let first = coeffs.first().ok_or(Error::ZeroCoefficients)?;
    let (ring, n) = (first.ring(), first.n());
    if entry_box < 0 {
        return Err(Error::Invalid("entry box must be nonnegative".into()));
    }
    let bound = bound_b_norm_any_leading(coeffs)?;
    let mut warnings = Vec::new();
    let (reach_a, reach_b) = coordinate_reach(ring, &bound.t_sq_floor);
    let eb = BigInt::from(entry_box);
    let box_covers_bound = eb >= reach_a && eb >= reach_b;
    if !box_covers_bound {
        warnings.push(format!(
            "box does not cover certified bound: entry box {entry_box}, coordinates up to ({reach_a}, {reach_b}) are possible"
        ));
    }
    let digits = (n * n * ring.rank()) as u32;
    let total = num_traits::pow(BigInt::from(2 * entry_box + 1), digits as usize);
    let count = match total.to_u64() {
        Some(c) if c <= config.residue_cap => c,
        _ => {
            return Err(Error::ResidueCap {
                count: total.to_string(),
                cap: config.residue_cap,
            })
        }
    };
    let cache = FixdivCache::default();
    let candidates: Vec<MatR> = (0..count)
        .map(|i| box_matrix(ring, n, entry_box, i))
        .filter(|b| b.frob_norm_sq() <= bound.t_sq_floor)
        .collect();
    let mut report = BSearchReport {
        ring,
        n,
        window: max_m,
        entry_box,
        box_covers_bound,
        warnings,
        candidates_in_box: count,
        candidates_within_bound: candidates.len() as u64,
        excluded_a1: 0,
        excluded_a2: 0,
        searched: 0,
        hits: Vec::new(),
        uncertified: Vec::new(),
        truncated: Vec::new(),
        lower_bound_checked: 0,
        lower_bound_failures: 0,
        bound,
    };
    let results = par::map(&candidates, |b| {
        let a = check_a(b);
        if !a.holds() {
            return Ok((a, None));
        }
        scan(coeffs, b, a, max_m, config, &cache, true).map(|r| (a, Some(r)))
    });
    for (b, res) in candidates.iter().zip(results) {
        let (a, sr) = res?;
        let Some(sr) = sr else {
            if !a.a1 {
                report.excluded_a1 += 1;
            } else {
                report.excluded_a2 += 1;
            }
            continue;
        };
        report.searched += 1;
        report.lower_bound_checked += sr.diagnostics.lower_bound_checked;
        report.lower_bound_failures += sr.diagnostics.lower_bound_failures.len() as u64;
        report
            .uncertified
            .extend(sr.diagnostics.uncertified.iter().map(|t| (b.clone(), t.clone())));
        report
            .truncated
            .extend(sr.diagnostics.truncated.into_iter().map(|t| (b.clone(), t)));
        if !sr.hits.is_empty() {
            let vandermonde_ok = sr
                .hits
                .iter()
                .all(|h| vandermonde_nonzero(coeffs, &h.tuple).unwrap_or(false));
            report.hits.push(BHit {
                b: b.clone(),
                tuples: sr.hits,
                vandermonde_ok,
            });
        }
    }
    Ok(report)
}

/// Some `f(2^j I)`, `0 <= j < k`, is nonzero.
pub fn vandermonde_nonzero(coeffs: &[MatR], exps: &[u64]) -> Result<bool> {
    let f = MatrixPoly::from_tuple(coeffs, exps)?;
    let (ring, n) = (f.ring(), f.n());
    for j in 0..coeffs.len() {
        let c = MatR::scalar(&RingElem::from_int(ring, BigInt::one() << j), n);
        if !f.eval(&c)?.is_zero() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `det [2^{j m_i}]_{i, j < k}` computed exactly.
pub fn vandermonde_det(exps: &[u64]) -> BigInt {
    let k = exps.len();
    let entries: Vec<RingElem> = exps
        .iter()
        .flat_map(|&m| {
            (0..k).map(move |j| RingElem::from_int(Ring::Integers, BigInt::one() << (m as usize * j)))
        })
        .collect();
    MatR::from_entries(Ring::Integers, k, entries)
        .expect("square")
        .det()
        .a()
        .clone()
}

/// `prod_{i<j} (2^{m_j} - 2^{m_i})`, the closed form of `vandermonde_det`.
pub fn vandermonde_product(exps: &[u64]) -> BigInt {
    let mut p = BigInt::one();
    for i in 0..exps.len() {
        for j in i + 1..exps.len() {
            p *= (BigInt::one() << exps[j] as usize) - (BigInt::one() << exps[i] as usize);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z1(v: i64) -> MatR {
        MatR::from_ints(Ring::Integers, 1, &[v])
    }

    fn z2(d: &[i64]) -> MatR {
        MatR::from_ints(Ring::Integers, 2, d)
    }

    #[test]
    fn hypotheses_a() {
        assert!(!check_a(&z2(&[1, 0, 0, 1])).a1);
        let r = check_a(&z2(&[2, 0, 0, 3]));
        assert!(!r.a1 && r.a2);
        let r = check_a(&z2(&[2, 0, 0, 2]));
        assert!(r.a1 && r.a2 && r.holds());
        let r = check_a(&z1(0));
        assert!(r.a1 && !r.a2);
    }

    #[test]
    fn b1_examples() {
        let r = check_b1(&[z1(1), z1(-1)], &[2, 1], &z1(2), 20).unwrap();
        assert!(r.holds);
        let a1 = z2(&[1, 0, 0, 0]);
        let a2 = z2(&[-1, 0, 0, 0]);
        let r = check_b1(&[a1, a2], &[3, 1], &z2(&[1, 0, 0, 1]), 20).unwrap();
        assert_eq!(r.failures, vec![vec![1, 2]]);
        let many = vec![z1(1); 21];
        assert!(matches!(
            check_b1(&many, &[1; 21], &z1(2), 20),
            Err(Error::SubsetExplosion { k: 21, cap: 20 })
        ));
    }

    #[test]
    fn b1_matches_direct_subsets() {
        let coeffs = [z1(1), z1(-1), z1(2), z1(-2)];
        let r = check_b1(&coeffs, &[1, 1, 0, 0], &z1(3), 20).unwrap();
        let mut direct = Vec::new();
        for mask in 1u32..16 {
            let s: i64 = [3, -3, 2, -2]
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| v)
                .sum();
            if s == 0 {
                direct.push(
                    (0..4)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| i + 1)
                        .collect::<Vec<_>>(),
                );
            }
        }
        direct.sort();
        assert_eq!(r.failures, direct);
    }

    #[test]
    fn b2_examples() {
        let z = Ring::Integers;
        let f = MatrixPoly::from_tuple(&[z1(1), z1(-1)], &[2, 1]).unwrap();
        let r = check_b2(&f, &z1(2), FixdivMode::Exact, DEFAULT_RESIDUE_CAP).unwrap();
        assert_eq!(r.verdict, B2Verdict::Holds);
        assert_eq!(r.fixdiv, Ideal::from_int_generator(z, 2.into()));
        let f2 = MatrixPoly::from_tuple(&[z2(&[1, 0, 0, 1]), z2(&[-1, 0, 0, -1])], &[2, 1]).unwrap();
        let r = check_b2(&f2, &z2(&[2, 0, 0, 2]), FixdivMode::Exact, DEFAULT_RESIDUE_CAP).unwrap();
        assert_eq!(r.verdict, B2Verdict::Fails);
        assert!(r.fixdiv.is_unit());
        let f3 = MatrixPoly::from_tuple(&[z1(1), z1(-1)], &[1, 0]).unwrap();
        let r = check_b2(&f3, &z1(2), FixdivMode::Exact, DEFAULT_RESIDUE_CAP).unwrap();
        assert_eq!(r.verdict, B2Verdict::Holds);
        assert!(r.f_of_b_entry_ideal.is_unit());
    }

    #[test]
    fn tuple_enumeration() {
        assert_eq!(
            tuples(2, 2, false).len() as u64,
            tuple_count(2, 2, false).to_u64().unwrap()
        );
        assert_eq!(
            tuples(3, 4, true).len() as u64,
            tuple_count(3, 4, true).to_u64().unwrap()
        );
        assert!(tuples(3, 5, false)
            .iter()
            .all(|t| t.windows(2).all(|w| w[0] >= w[1])));
    }

    #[test]
    fn collapse_and_scaled_identity() {
        let c = SearchConfig::default();
        let r = search_tuples(&[z1(1), z1(-1)], &z1(2), 16, &c).unwrap();
        assert_eq!(r.hits.len(), 14);
        assert!(r.hits.iter().all(|h| h.lower_bound_check != Some(false)));
        let r = search_tuples(&[z1(1), z1(-1)], &z1(3), 20, &c).unwrap();
        assert!(r.hits.is_empty());
        let i2 = z2(&[1, 0, 0, 1]);
        // Only the boundary tuple: f(2I) = I there.
        let r = search_tuples(&[i2.clone(), -&i2], &z2(&[2, 0, 0, 2]), 10, &c).unwrap();
        assert_eq!(r.hit_tuples(), vec![vec![1, 0]]);
        assert!(matches!(
            search_tuples(&[z1(1)], &z1(1), 3, &c),
            Err(Error::HypothesisFailed(_))
        ));
    }

    #[test]
    fn growth_rows() {
        let r = search_tuples(&[z1(1), z1(-1)], &z1(2), 12, &SearchConfig::default()).unwrap();
        for row in &r.growth {
            if row.m >= 1 {
                let expect = BigInt::from(2).pow(row.m as u32 - 1);
                assert_eq!(row.min_frob_norm_sq, Some(&expect * &expect), "m = {}", row.m);
            }
        }
    }

    #[test]
    fn bound_examples() {
        let b = bound_b_norm(&[z1(1), z1(-1)]).unwrap();
        assert_eq!(b.t, BigRational::from_integer(8.into()));
        assert!(b.exact);
        assert_eq!(b.t_sq_floor, BigInt::from(64));
        let single = bound_b_norm(&[z2(&[1, 0, 0, 0])]).unwrap();
        assert!(single.ratio_term.is_zero());
        assert!(!single.exact);
        // 2 sqrt(2), rounded up.
        let t = single.t_f64();
        assert!(t >= 2.0 * 2f64.sqrt() && t < 2.0 * 2f64.sqrt() + 1e-6);
        let scaled = bound_b_norm(&[z2(&[3, 1, 0, 2]), z2(&[1, 1, 1, 5])]).unwrap();
        let scaled2 = bound_b_norm(&[z2(&[6, 2, 0, 4]), z2(&[2, 2, 2, 10])]).unwrap();
        assert_eq!(scaled, scaled2);
        assert!(matches!(
            bound_b_norm(&[z1(0), z1(0)]),
            Err(Error::ZeroCoefficients)
        ));
    }

    #[test]
    fn vandermonde() {
        for exps in [vec![0, 1, 2], vec![5, 3, 1], vec![7, 2]] {
            let d = vandermonde_det(&exps);
            assert_eq!(d.magnitude(), vandermonde_product(&exps).magnitude());
            assert!(!d.is_zero());
        }
        assert!(vandermonde_nonzero(&[z1(1), z1(2), z1(-3)], &[0, 1, 2]).unwrap());
    }

    #[test]
    fn b_search_small() {
        let r = search_b(&[z1(1), z1(-1)], 8, 8, &SearchConfig::default()).unwrap();
        assert!(r.box_covers_bound);
        let found: Vec<(MatR, Vec<Vec<u64>>)> = r
            .hits
            .iter()
            .map(|h| (h.b.clone(), h.tuples.iter().map(|t| t.tuple.clone()).collect()))
            .collect();
        let mut expect = Vec::new();
        for b in [-2, 2] {
            let pairs = crate::selfridge::base_b_pairs(b, 8).unwrap();
            let mut ts: Vec<Vec<u64>> = pairs.pairs.iter().map(|w| vec![w.m, w.n]).collect();
            ts.sort_by(|a, b| b.cmp(a));
            expect.push((z1(b), ts));
        }
        assert_eq!(found, expect);
        assert!(r.hits.iter().all(|h| h.vandermonde_ok));
        let r = search_b(&[z1(1), z1(-1)], 4, 3, &SearchConfig::default()).unwrap();
        assert!(!r.box_covers_bound);
        assert!(r.warnings[0].contains("box does not cover certified bound"));
    }
}
