//! Family sweeps: exhaustive code enumeration for m <= 4, seeded
//! sampling beyond, with per-family invariant checks, cheap bracket
//! assembly, an index histogram, and an optional full record dump.

use crate::output::Doc;
use crate::pool;
use crate::{usage, CliError, Ctx};
use clap::ValueEnum;
use nestedorders::index::DirectResult;
use nestedorders::{classify4, contains_cycle, nestbound_check, no_direct, no_rec};
use nestedorders::{Family, Memo};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFilter {
    All,
    Closed,
}

impl SweepFilter {
    fn name(self) -> &'static str {
        match self {
            SweepFilter::All => "all",
            SweepFilter::Closed => "closed",
        }
    }
}

pub struct SweepArgs {
    pub m: u8,
    pub filter: SweepFilter,
    pub sample: Option<u64>,
    pub out: Option<PathBuf>,
}

const FINDING_CAP: usize = 50;

#[derive(Default)]
struct Agg {
    families: u64,
    class_checked: u64,
    histogram: BTreeMap<i32, u64>,
    findings: Vec<Value>,
    findings_total: u64,
    records: Vec<Value>,
}

impl Agg {
    fn absorb(&mut self, other: Agg) {
        self.families += other.families;
        self.class_checked += other.class_checked;
        for (v, n) in other.histogram {
            *self.histogram.entry(v).or_default() += n;
        }
        self.findings_total += other.findings_total;
        for f in other.findings {
            if self.findings.len() < FINDING_CAP {
                self.findings.push(f);
            }
        }
        self.records.extend(other.records);
    }
}

/// Least upper bound from the certificates that cost nothing: chains,
/// a missing co-singleton, and the full cube.
fn cheap_upper(f: &Family) -> (Option<i32>, Vec<&'static str>) {
    let m = f.m() as i32;
    let mut upper = None;
    let mut kinds = Vec::new();
    let push = |kinds: &mut Vec<&'static str>, upper: &mut Option<i32>, k, b: i32| {
        kinds.push(k);
        *upper = Some(upper.map_or(b, |u: i32| u.min(b)));
    };
    if f.is_chain() {
        push(&mut kinds, &mut upper, "chain", 0);
    }
    if m >= 2 {
        let full = f.ground().full();
        if (0..f.m()).any(|i| !f.contains(full & !(1u32 << i))) {
            push(&mut kinds, &mut upper, "proper", m - 2);
        }
        if f.len() as u64 == 1 << f.m() {
            push(&mut kinds, &mut upper, "full-cube", m - 1);
        }
    }
    (upper, kinds)
}

/// Runs every cheap invariant check against one family; returns its
/// index value, any findings, and the record row when requested.
fn check_family(
    f: &Family,
    code: Option<u64>,
    memo: &mut Memo,
    oracle: bool,
    want_record: bool,
) -> (i32, u64, Vec<Value>, Option<Value>) {
    let mut findings = Vec::new();
    let no = no_rec(f, memo);
    let mut finding = |kind: &str, detail: Value| {
        findings.push(json!({ "kind": kind, "family": f.to_string(), "detail": detail }));
    };

    let chain_expected = f.is_chain() && !f.subset_of_top();
    if (no == 0) != chain_expected {
        finding("chain-characterization", json!({ "no": no, "chain": chain_expected }));
    }
    if let Some(w) = contains_cycle(f) {
        if no < 2 {
            finding("cycle-bound", json!({ "no": no, "cycle": w.cycle }));
        }
    }
    let nb = nestbound_check(f, no);
    if !nb.derived_ok() {
        finding("count-bound", serde_json::to_value(&nb).unwrap());
    }

    let mut class_checked = 0;
    let mut class_label = None;
    if f.m() == 4 {
        let c = f.intersection_closure();
        let label = classify4(&c).expect("closures on four points classify");
        class_label = Some(format!("{label:?}"));
        class_checked = 1;
        // max(no, 0) bridges the -1 convention for the closure {X}.
        if label.value() != no_rec(&c, memo).max(0) {
            finding(
                "classification",
                json!({ "closure": c.to_string(), "label": label, "no": no_rec(&c, memo) }),
            );
        }
    }

    let (upper, kinds) = cheap_upper(f);
    let status = match upper {
        Some(u) if u < no.max(0) => "contradiction",
        Some(u) if u == no.max(0) => "tight",
        _ => "gap",
    };
    if status == "contradiction" {
        finding("bracket-inversion", json!({ "lower": no, "upper": upper }));
    }

    if oracle && f.m() <= 6 {
        let n_max = (f.m() as i32 - 1).min(3);
        match no_direct(f, n_max, false).expect("guard checked") {
            DirectResult::Found { n, .. } if n == no => {}
            DirectResult::Exceeds { n_max } if no > n_max => {}
            DirectResult::Found { n, .. } => {
                finding("oracle-disagreement", json!({ "recursive": no, "direct": n }));
            }
            DirectResult::Exceeds { n_max } => {
                finding("oracle-disagreement", json!({ "recursive": no, "direct_exceeds": n_max }));
            }
        }
    }

    let record = want_record.then(|| {
        json!({
            "code": code,
            "family": f.to_string(),
            "key": f.canonical_key(),
            "no": no,
            "class": class_label,
            "lower": no,
            "upper": upper,
            "status": status,
            "certificates": kinds,
        })
    });
    (no, class_checked, findings, record)
}

fn total_codes(m: u8) -> u64 {
    1u64 << (1u64 << m)
}

fn absorb_one(agg: &mut Agg, f: &Family, code: Option<u64>, memo: &mut Memo, oracle: bool, record: bool) {
    let (no, class_checked, findings, rec) = check_family(f, code, memo, oracle, record);
    agg.families += 1;
    agg.class_checked += class_checked;
    *agg.histogram.entry(no).or_default() += 1;
    agg.findings_total += findings.len() as u64;
    for fd in findings {
        if agg.findings.len() < FINDING_CAP {
            agg.findings.push(fd);
        }
    }
    if let Some(r) = rec {
        agg.records.push(r);
    }
}

pub fn cmd_sweep(ctx: &Ctx, memo: &mut Memo, args: &SweepArgs) -> Result<(Doc, u8), CliError> {
    if args.m == 0 {
        return Err(usage("sweeps need a ground set with at least one element"));
    }
    if args.m > 5 {
        return Err(CliError::Resource(format!(
            "sweeps support ground sets of at most 5 elements, got m = {}",
            args.m
        )));
    }
    if args.m == 5 && args.sample.is_none() {
        return Err(usage("m = 5 is too large to enumerate; give a --sample budget"));
    }
    let m = args.m;
    let want_records = args.out.is_some();
    let oracle = ctx.oracle;

    let mut total = Agg::default();
    if let Some(budget) = args.sample {
        if budget > 1_000_000 {
            return Err(CliError::Resource(format!(
                "sample budgets above 1000000 are not supported, got {budget}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let codes: Vec<u64> =
            (0..budget).map(|_| rng.gen_range(0..total_codes(m))).collect();
        let parts = pool::scan(codes.len() as u64, ctx.jobs, memo, |range, memo| {
            let mut agg = Agg::default();
            for i in range {
                let mut f = Family::from_code(m, codes[i as usize]);
                if args.filter == SweepFilter::Closed {
                    f = f.intersection_closure();
                }
                absorb_one(&mut agg, &f, Some(codes[i as usize]), memo, oracle, want_records);
            }
            agg
        });
        for part in parts {
            total.absorb(part);
        }
    } else {
        let parts = pool::scan(total_codes(m), ctx.jobs, memo, |range, memo| {
            let mut agg = Agg::default();
            for code in range {
                let f = Family::from_code(m, code);
                if args.filter == SweepFilter::Closed && f.intersection_closure() != f {
                    continue;
                }
                absorb_one(&mut agg, &f, Some(code), memo, oracle, want_records);
            }
            agg
        });
        for part in parts {
            total.absorb(part);
        }
    }

    let mut histogram = serde_json::Map::new();
    for (v, n) in &total.histogram {
        histogram.insert(v.to_string(), json!(n));
    }
    let parameters = json!({
        "m": m,
        "filter": args.filter.name(),
        "sample": args.sample,
        "seed": ctx.seed,
        "jobs": ctx.jobs,
        "oracle": oracle,
    });
    let json = json!({
        "command": "sweep",
        "parameters": parameters,
        "families": total.families,
        "histogram": histogram,
        "class_checked": total.class_checked,
        "findings": total.findings,
        "findings_total": total.findings_total,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
    });

    if let Some(path) = &args.out {
        let mut report = json.clone();
        report["records"] = Value::Array(total.records);
        let body = serde_json::to_string_pretty(&report).expect("report is plain data");
        std::fs::write(path, body + "\n")
            .map_err(|e| usage(format!("out {}: {e}", path.display())))?;
    }

    let mut doc = Doc::new(json!(null));
    doc.para(format!(
        "sweep m={m} filter={}{}: {} families, {} findings",
        args.filter.name(),
        match args.sample {
            Some(n) => format!(" sample={n} seed={}", ctx.seed),
            None => String::new(),
        },
        total.families,
        total.findings_total
    ));
    doc.table(
        "index histogram",
        &["no", "families"],
        total.histogram.iter().map(|(v, n)| vec![v.to_string(), n.to_string()]).collect(),
    );
    if total.findings_total > 0 {
        let shown = total.findings.len();
        doc.table(
            "findings",
            &["kind", "family", "detail"],
            total
                .findings
                .iter()
                .map(|f| {
                    vec![
                        f["kind"].as_str().unwrap_or("").to_string(),
                        f["family"].as_str().unwrap_or("").to_string(),
                        crate::output::compact(&f["detail"]),
                    ]
                })
                .collect(),
        );
        if (total.findings_total as usize) > shown {
            doc.para(format!(
                "({} further findings truncated)",
                total.findings_total as usize - shown
            ));
        }
    } else {
        doc.para("no findings: every checked invariant held");
    }
    if let Some(path) = &args.out {
        doc.para(format!("full record list written to {}", path.display()));
    }
    doc.json = json;
    Ok((doc, u8::from(total.findings_total > 0)))
}
