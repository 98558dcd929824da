//! Report assembly and rendering for the command-line front end.

use std::fmt::Write as _;
use std::path::PathBuf;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fixdiv::{fixdiv_int_with_cap, fixdiv_matrix, fixdiv_ring_with_cap, Certification, FixdivMode};
use crate::ideal::{Ideal, DEFAULT_RESIDUE_CAP};
use crate::io::{self, ProblemSpec};
use crate::matrix::MatR;
use crate::poly::{MatrixPoly, ScalarPoly};
use crate::ring::Ring;
use crate::search::{
    self, BSearchReport, BoundReport, ConditionReport, SearchConfig, SearchReport, DEFAULT_SUBSET_CAP,
};
use crate::selfridge::{self, PairReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Common {
    pub format: Format,
    pub residue_cap: u64,
    pub subset_cap: usize,
    pub samples: Option<u64>,
    pub seed: u64,
}

impl Default for Common {
    fn default() -> Self {
        Common {
            format: Format::Table,
            residue_cap: DEFAULT_RESIDUE_CAP,
            subset_cap: DEFAULT_SUBSET_CAP,
            samples: None,
            seed: 0,
        }
    }
}

/// Problem data given inline or in a spec file. Inline values win.
#[derive(Clone, Debug, Default)]
pub struct ProblemArgs {
    pub spec: Option<PathBuf>,
    pub ring: Option<String>,
    pub n: Option<usize>,
    pub poly: Option<String>,
    pub coeffs: Option<String>,
    pub exps: Option<String>,
    pub b: Option<String>,
    pub max_m: Option<u64>,
    pub entry_box: Option<i64>,
    pub all_orders: bool,
}

/// Resolved problem after merging the spec file and flags.
struct Problem {
    ring: Ring,
    spec: ProblemSpec,
    common: Common,
}

fn inline_err(flag: &str, e: Error) -> Error {
    Error::Spec {
        location: format!("--{flag}"),
        message: e.to_string(),
    }
}

impl Problem {
    fn resolve(args: &ProblemArgs, common: &Common) -> Result<Problem> {
        let mut spec = match &args.spec {
            Some(p) => io::load_spec(p)?,
            None => ProblemSpec::default(),
        };
        let ring = match &args.ring {
            Some(r) => r.parse().map_err(|e| inline_err("ring", e))?,
            None => spec.ring.unwrap_or(Ring::Integers),
        };
        if args.spec.is_some()
            && args.ring.is_some()
            && spec.ring.is_some_and(|r| r != ring)
            && !spec.coeffs.is_empty()
        {
            return Err(inline_err(
                "ring",
                Error::Invalid("differs from the ring of the spec file".into()),
            ));
        }
        spec.ring = Some(ring);
        if let Some(n) = args.n {
            spec.n = Some(n);
        }
        if let Some(p) = &args.poly {
            spec.poly = Some(p.clone());
        }
        if let Some(c) = &args.coeffs {
            spec.coeffs = c
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| io::parse_matrix(ring, s))
                .collect::<Result<_>>()
                .map_err(|e| inline_err("coeffs", e))?;
        }
        if let Some(e) = &args.exps {
            spec.exps = Some(
                e.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<u64>()
                            .map_err(|_| inline_err("exps", Error::Invalid(format!("bad exponent {x:?}"))))
                    })
                    .collect::<Result<_>>()?,
            );
        }
        if let Some(b) = &args.b {
            spec.b = Some(io::parse_matrix(ring, b).map_err(|e| inline_err("b", e))?);
        }
        if args.max_m.is_some() {
            spec.max_m = args.max_m;
        }
        if args.entry_box.is_some() {
            spec.entry_box = args.entry_box;
        }
        if args.all_orders {
            spec.all_orders = Some(true);
        }
        let mut common = common.clone();
        if let Some(c) = spec.residue_cap {
            common.residue_cap = c;
        }
        if let Some(c) = spec.subset_cap {
            common.subset_cap = c;
        }
        if common.samples.is_none() && spec.mode.as_deref() == Some("sampled") {
            common.samples = Some(spec.samples.unwrap_or(10_000));
        }
        if let Some(s) = spec.seed {
            common.seed = s;
        }
        Ok(Problem { ring, spec, common })
    }

    fn mode(&self) -> FixdivMode {
        match self.common.samples {
            Some(count) => FixdivMode::Sampled {
                count,
                seed: self.common.seed,
            },
            None => FixdivMode::Exact,
        }
    }

    fn config(&self) -> SearchConfig {
        SearchConfig {
            mode: self.mode(),
            residue_cap: self.common.residue_cap,
            subset_cap: self.common.subset_cap,
            all_orders: self.spec.all_orders.unwrap_or(false),
        }
    }

    fn coeffs(&self) -> Result<&[MatR]> {
        if self.spec.coeffs.is_empty() {
            return Err(Error::Spec {
                location: "--coeffs".into(),
                message: "coefficient matrices are required".into(),
            });
        }
        Ok(&self.spec.coeffs)
    }

    fn b(&self) -> Result<&MatR> {
        self.spec.b.as_ref().ok_or_else(|| Error::Spec {
            location: "--b".into(),
            message: "matrix B is required".into(),
        })
    }

    fn exps(&self) -> Result<&[u64]> {
        self.spec.exps.as_deref().ok_or_else(|| Error::Spec {
            location: "--exps".into(),
            message: "exponent tuple is required".into(),
        })
    }

    fn poly(&self) -> Result<ScalarPoly> {
        let p = self.spec.poly.as_ref().ok_or_else(|| Error::Spec {
            location: "--poly".into(),
            message: "polynomial is required".into(),
        })?;
        ScalarPoly::parse(self.ring, p).map_err(|e| inline_err("poly", e))
    }
}

/// A finished command: text to print and whether a cap left it incomplete.
pub struct Output {
    pub text: String,
    pub truncated: bool,
}

fn emit<T: Serialize>(
    common: &Common,
    report: &T,
    table: impl FnOnce() -> String,
    truncated: bool,
) -> Result<Output> {
    let text = match common.format {
        Format::Json => {
            serde_json::to_string_pretty(report).map_err(|e| Error::Invalid(e.to_string()))? + "\n"
        }
        Format::Table => table(),
    };
    Ok(Output { text, truncated })
}

#[derive(Serialize)]
struct FixdivReport {
    ring: Ring,
    n: Option<usize>,
    poly: String,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "io::ser_opt_bigint"
    )]
    value: Option<BigInt>,
    fixdiv: Ideal,
    certification: Certification,
}

fn ideal_text(ring: Ring, i: &Ideal) -> String {
    match (ring, i.int_generator()) {
        (Ring::Integers, Some(g)) => g.to_string(),
        (Ring::Integers, None) => "0".into(),
        _ => i.to_string(),
    }
}

/// `fixdiv`: scalar (`d(Z, g)` or `d(R, g)`) without `n`, matrix with `n`.
pub fn run_fixdiv(args: &ProblemArgs, common: &Common) -> Result<Output> {
    let pr = Problem::resolve(args, common)?;
    let ring = pr.ring;
    let (n, f, poly_text) = match (pr.spec.n, pr.spec.poly.is_some()) {
        (None, true) => (None, None, pr.poly()?.to_string()),
        (n, _) if !pr.spec.coeffs.is_empty() => {
            let f = MatrixPoly::from_tuple(pr.coeffs()?, pr.exps()?)?;
            let text = f.to_string();
            (Some(n.unwrap_or(f.n())), Some(f), text)
        }
        (Some(n), true) => {
            let g = pr.poly()?;
            (Some(n), Some(MatrixPoly::from_scalar(&g, n)), g.to_string())
        }
        _ => {
            return Err(Error::Spec {
                location: "--poly".into(),
                message: "give --poly, or --coeffs with --exps".into(),
            })
        }
    };
    let (fixdiv, certification) = match f {
        None => {
            let g = pr.poly()?;
            let ideal = if ring.is_integers() {
                Ideal::from_int_generator(ring, fixdiv_int_with_cap(&g, pr.common.residue_cap)?)
            } else {
                fixdiv_ring_with_cap(&g, pr.common.residue_cap)?
            };
            (ideal, Certification::Certified)
        }
        Some(f) => {
            let r = fixdiv_matrix(&f, pr.mode(), pr.common.residue_cap)?;
            (r.ideal, r.certification)
        }
    };
    let report = FixdivReport {
        ring,
        n,
        poly: poly_text,
        value: fixdiv.int_generator().cloned().filter(|_| ring.is_integers()),
        fixdiv,
        certification,
    };
    emit(
        common,
        &report,
        || {
            let mut s = ideal_text(ring, &report.fixdiv);
            if report.certification == Certification::LowerBound {
                s.push_str("  (sampled: contained in the fixed divisor)");
            }
            s + "\n"
        },
        false,
    )
}

fn pair_table(r: &PairReport) -> String {
    let mut s = String::new();
    let what = match r.kind {
        "ruderman" => "(2^m - 2^n) | (3^m - 3^n)".to_string(),
        _ => format!("({0}^m - {0}^n) | x^m - x^n for all x", r.base),
    };
    let _ = writeln!(s, "{what}; m <= {}: {} pair(s)", r.window, r.pairs.len());
    if !r.pairs.is_empty() {
        let head = if r.kind == "ruderman" {
            "3^m - 3^n"
        } else {
            "fixdiv"
        };
        let _ = writeln!(
            s,
            "{:>4} {:>4}  {:>24}  {:>24}  {:>12}",
            "m", "n", "modulus", head, "quotient"
        );
        for w in &r.pairs {
            let _ = writeln!(
                s,
                "{:>4} {:>4}  {:>24}  {:>24}  {:>12}",
                w.m, w.n, w.modulus, w.fixdiv, w.quotient
            );
        }
    }
    s
}

pub fn run_selfridge(base: i64, max_m: u64, common: &Common) -> Result<Output> {
    let r = if base == 2 {
        selfridge::selfridge_pairs(max_m)?
    } else {
        selfridge::base_b_pairs(base, max_m)?
    };
    emit(common, &r, || pair_table(&r), false)
}

pub fn run_ruderman(max_m: u64, common: &Common) -> Result<Output> {
    let r = selfridge::ruderman_pairs(max_m);
    emit(common, &r, || pair_table(&r), false)
}

fn condition_table(r: &ConditionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "tuple {:?}", r.tuple);
    let _ = writeln!(s, "  A.1 {}  (entry ideal of B proper)", pass(r.a1));
    let _ = writeln!(s, "  A.2 {}  (spectral class {})", pass(r.a2), r.spectral_class);
    let _ = writeln!(s, "  B.1 {}  vanishing subsets {:?}", pass(r.b1), r.b1_failures);
    let _ = writeln!(s, "  B.2 {:?}", r.b2);
    let _ = writeln!(s, "  I_f(B) = {}", r.f_of_b_entry_ideal);
    let _ = writeln!(s, "  fixdiv = {}  ({:?})", r.fixdiv, r.certification);
    let _ = writeln!(s, "  ||f(B)||^2 = {}", r.frob_norm_sq);
    let _ = writeln!(s, "  lower bound check: {}", tri(r.lower_bound_check));
    s
}

fn pass(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

fn tri(x: Option<bool>) -> &'static str {
    match x {
        Some(true) => "held",
        Some(false) => "FAILED",
        None => "not applicable",
    }
}

pub fn run_check(args: &ProblemArgs, common: &Common) -> Result<Output> {
    let pr = Problem::resolve(args, common)?;
    let r = search::check(pr.coeffs()?, pr.exps()?, pr.b()?, &pr.config())?;
    emit(common, &r, || condition_table(&r), false)
}

fn search_table(r: &SearchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "B = {} over {}, window m <= {}{}",
        r.b,
        r.ring,
        r.window,
        if r.all_orders { ", all orders" } else { "" }
    );
    let _ = writeln!(
        s,
        "A.1 {}  A.2 {} ({})",
        pass(r.hypotheses.a1),
        pass(r.hypotheses.a2),
        r.hypotheses.spectral_class
    );
    let _ = writeln!(s, "{} hit(s)", r.hits.len());
    for h in &r.hits {
        let _ = writeln!(
            s,
            "  {:?}  I_f(B) = {}  fixdiv = {}  ||f(B)||^2 = {}",
            h.tuple, h.f_of_b_entry_ideal, h.fixdiv, h.frob_norm_sq
        );
    }
    let _ = writeln!(s, "growth (B.1 tuples):");
    for g in &r.growth {
        let min = g
            .min_frob_norm_sq
            .as_ref()
            .map(|x| x.to_string())
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            s,
            "  m = {:>3}  tuples {:>6}  min ||f(B)||^2 = {min}",
            g.m, g.tuples
        );
    }
    let d = &r.diagnostics;
    let _ = writeln!(
        s,
        "scanned {}, B.1 failures {}, pruned {}, fixdiv evaluations {}",
        d.tuples_scanned, d.b1_failures, d.pruned_by_starter_ideal, d.fixdiv_evaluations
    );
    let _ = writeln!(
        s,
        "lower bound checked {}, failed {:?}",
        d.lower_bound_checked, d.lower_bound_failures
    );
    if !d.uncertified.is_empty() {
        let _ = writeln!(s, "uncertified: {:?}", d.uncertified);
    }
    for t in &d.truncated {
        let _ = writeln!(s, "truncated: {:?} (partial ideal {})", t.tuple, t.partial);
    }
    for note in &d.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

pub fn run_search_tuples(args: &ProblemArgs, common: &Common) -> Result<Output> {
    let pr = Problem::resolve(args, common)?;
    let max_m = pr.spec.max_m.unwrap_or(16);
    let r = search::search_tuples(pr.coeffs()?, pr.b()?, max_m, &pr.config())?;
    let truncated = r.is_truncated();
    emit(common, &r, || search_table(&r), truncated)
}

fn bound_table(b: &BoundReport) -> String {
    format!(
        "T = {}{} (~{:.6}), leading coefficient {}\n  ratio term {}\n  growth term {}\n  floor(T^2) = {}\n",
        b.t,
        if b.exact { "" } else { " (upper bound)" },
        b.t_f64(),
        b.leading + 1,
        b.ratio_term,
        b.growth_term,
        b.t_sq_floor
    )
}

pub fn run_bound(args: &ProblemArgs, common: &Common) -> Result<Output> {
    let pr = Problem::resolve(args, common)?;
    let r = search::bound_b_norm(pr.coeffs()?)?;
    emit(common, &r, || bound_table(&r), false)
}

fn b_search_table(r: &BSearchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n = {} over {}, window m <= {}, entry box {}",
        r.n, r.ring, r.window, r.entry_box
    );
    s.push_str(&bound_table(&r.bound));
    for w in &r.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(
        s,
        "candidates: {} in box, {} within bound, {} fail A.1, {} fail A.2, {} searched",
        r.candidates_in_box, r.candidates_within_bound, r.excluded_a1, r.excluded_a2, r.searched
    );
    let _ = writeln!(s, "{} B with solutions", r.hits.len());
    for h in &r.hits {
        let ts: Vec<_> = h.tuples.iter().map(|t| t.tuple.clone()).collect();
        let _ = writeln!(
            s,
            "  B = {}  vandermonde {}  tuples {:?}",
            h.b,
            pass(h.vandermonde_ok),
            ts
        );
    }
    let _ = writeln!(
        s,
        "lower bound checked {}, failed {}",
        r.lower_bound_checked, r.lower_bound_failures
    );
    for (b, t) in &r.uncertified {
        let _ = writeln!(s, "uncertified: B = {b} {t:?}");
    }
    for (b, t) in &r.truncated {
        let _ = writeln!(
            s,
            "truncated: B = {b} {:?} (partial ideal {})",
            t.tuple, t.partial
        );
    }
    s
}

pub fn run_search_b(args: &ProblemArgs, common: &Common) -> Result<Output> {
    let pr = Problem::resolve(args, common)?;
    let max_m = pr.spec.max_m.unwrap_or(16);
    let entry_box = pr.spec.entry_box.unwrap_or(8);
    let r = search::search_b(pr.coeffs()?, max_m, entry_box, &pr.config())?;
    let truncated = r.is_truncated();
    emit(common, &r, || b_search_table(&r), truncated)
}

#[derive(Serialize)]
struct ReproItem {
    name: String,
    pass: bool,
    detail: Value,
}

/// Canned reproduction: the fourteen pairs, emptiness for other bases and
/// the `n = 1` agreement of the matrix search with the scalar search.
pub fn run_repro(common: &Common) -> Result<(Output, bool)> {
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
    let mut items = Vec::new();
    let mut pairs = selfridge::selfridge_pairs(64)?.pair_list();
    pairs.sort();
    items.push(ReproItem {
        name: "base 2, m <= 64: exactly fourteen pairs".into(),
        pass: pairs == FOURTEEN,
        detail: serde_json::json!(pairs),
    });
    for b in [3, 4, 5, 6] {
        let r = selfridge::base_b_pairs(b, 30)?;
        items.push(ReproItem {
            name: format!("base {b}, m <= 30: no pairs"),
            pass: r.pairs.is_empty(),
            detail: serde_json::json!(r.pair_list()),
        });
    }
    let z = Ring::Integers;
    let coeffs = [MatR::from_ints(z, 1, &[1]), MatR::from_ints(z, 1, &[-1])];
    let sr = search::search_tuples(
        &coeffs,
        &MatR::from_ints(z, 1, &[2]),
        20,
        &SearchConfig {
            subset_cap: common.subset_cap,
            residue_cap: common.residue_cap,
            ..Default::default()
        },
    )?;
    let mut via_matrix: Vec<(u64, u64)> = sr.hits.iter().map(|h| (h.tuple[0], h.tuple[1])).collect();
    via_matrix.sort();
    let mut via_scalar = selfridge::selfridge_pairs(20)?.pair_list();
    via_scalar.sort();
    items.push(ReproItem {
        name: "n = 1, B = [2], m <= 20: matrix search equals scalar search".into(),
        pass: via_matrix == via_scalar && via_matrix.len() == 14,
        detail: serde_json::json!({"matrix": via_matrix, "scalar": via_scalar}),
    });
    let all = items.iter().all(|i| i.pass);
    let out = emit(
        common,
        &items,
        || {
            items
                .iter()
                .map(|i| format!("{} {}\n", if i.pass { "PASS" } else { "FAIL" }, i.name))
                .collect()
        },
        false,
    )?;
    Ok((out, all))
}
