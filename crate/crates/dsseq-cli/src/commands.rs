use std::collections::HashMap;
use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use dsseq::bounds::{growth_check, m0, Family, PqTable, RTable, Tuning};
use dsseq::constructions::{
    build_s_even, build_z, build_z_interpolated, check_even, check_z, multiplicity, EvenStatsTable, ZStatsTable,
};
use dsseq::formations::{build_aff_extremal, contains_formation, embed_pattern, is_aff, Formation};
use dsseq::oracles::{
    oracle_ads_symbols, oracle_aff_symbols, oracle_ex, oracle_f, oracle_lambda, oracle_psi, OracleCache, OracleResult,
};
use dsseq::sequence::{canonicalize, is_ds, is_r_sparse, max_alternation, parse_symbols, remove_adjacent_repeats};
use dsseq::{ackermann, BlockedSequence, Symbol};
use serde_json::{json, Value};

use crate::args::{AckermannCmd, Command, ConstantsCmd, Construction, FormationsCmd, OracleCmd, Span, StatsTarget};
use crate::{suite, Output, RunConfig, Status};

pub(crate) fn execute(cmd: &Command, cfg: &RunConfig) -> Result<Output> {
    match cmd {
        Command::Generate(c) => generate(c, cfg),
        Command::Stats(t) => stats(t, cfg),
        Command::Verify(v) => verify(&v.file, &v.props),
        Command::Oracle(o) => oracle(o, cfg),
        Command::Constants(c) => constants(c),
        Command::Ackermann(a) => ackermann_cmd(a, cfg),
        Command::Formations(f) => formations(f),
        Command::Suite(s) => {
            let only: Option<Vec<String>> = s
                .only
                .as_ref()
                .map(|o| o.split(',').map(|t| t.trim().to_string()).collect());
            suite::run_report(cfg, only.as_deref())
        }
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    dsseq::Error::InvalidInput(msg.into()).into()
}

fn sequence_output(kind: &str, params: Value, seq: &BlockedSequence, extra: Option<(&str, Value)>) -> Output {
    let mut json = json!({ "kind": kind, "params": params, "sequence": seq.to_json() });
    if let Some((key, v)) = extra {
        json[key] = v;
    }
    Output::ok(json, seq.render_text())
}

fn generate(c: &Construction, cfg: &RunConfig) -> Result<Output> {
    match *c {
        Construction::Z { d, m } => {
            if d == 0 || m == 0 {
                return Err(usage("Z_d(m) needs d, m >= 1"));
            }
            let st = ZStatsTable::new(cfg.bits).stats(d, m)?;
            let seq = build_z(d, m, cfg.length_budget)?;
            Ok(sequence_output(
                "z",
                json!({"d": d, "m": m}),
                &seq,
                Some(("stats", st.to_json())),
            ))
        }
        Construction::Even { s, k, m } => {
            let st = EvenStatsTable::new(cfg.bits).stats(s, k, m)?;
            let seq = build_s_even(s, k, m, cfg.length_budget)?;
            let params = json!({"s": s, "k": k, "m": m});
            Ok(sequence_output("even", params, &seq, Some(("stats", st.to_json()))))
        }
        Construction::Interpolated { n } => {
            let (syms, plan) = build_z_interpolated(n, cfg.length_budget)?;
            let seq = BlockedSequence::single(&syms);
            let plan = json!({"d": plan.d, "copies": plan.copies, "copy_len": plan.copy_len});
            Ok(sequence_output(
                "interpolated",
                json!({"n": n}),
                &seq,
                Some(("plan", plan)),
            ))
        }
        Construction::Aff { r, m } => {
            let seq = build_aff_extremal(r, m)?;
            Ok(sequence_output("aff", json!({"r": r, "m": m}), &seq, None))
        }
    }
}

fn stats(t: &StatsTarget, cfg: &RunConfig) -> Result<Output> {
    let (json, text) = match *t {
        StatsTarget::Z { d, m } => {
            if d == 0 || m == 0 {
                return Err(usage("Z_d(m) needs d, m >= 1"));
            }
            let st = ZStatsTable::new(cfg.bits).stats(d, m)?;
            let text = format!(
                "Z_{d}({m}): S={} N={} L={} M={} X={} V={}",
                st.special, st.symbols, st.length, st.blocks, st.block_ratio, st.mean_block_len
            );
            (
                json!({"kind": "z", "params": {"d": d, "m": m}, "stats": st.to_json()}),
                text,
            )
        }
        StatsTarget::Even { s, k, m } => {
            let st = EvenStatsTable::new(cfg.bits).stats(s, k, m)?;
            let text = format!(
                "S^{s}_{k}({m}): mu={} N={} F={} length={}",
                st.mu, st.symbols, st.blocks, st.length
            );
            (
                json!({"kind": "even", "params": {"s": s, "k": k, "m": m}, "stats": st.to_json()}),
                text,
            )
        }
    };
    Ok(Output::ok(json, text))
}

fn param(params: &Value, key: &str) -> Result<u64> {
    params[key]
        .as_u64()
        .ok_or_else(|| usage(format!("sequence file lacks numeric params.{key}")))
}

fn prop_arg<T: std::str::FromStr>(prop: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| usage(format!("bad argument {raw:?} for property {prop}")))
}

fn verify(path: &std::path::Path, props: &str) -> Result<Output> {
    let raw = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&raw).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let (seq_json, kind, params) = match doc.get("sequence") {
        Some(s) => (s, doc["kind"].as_str(), &doc["params"]),
        None => (&doc, None, &Value::Null),
    };
    let seq = BlockedSequence::from_json(seq_json)?;
    let syms = seq.symbols();
    let mut counts: HashMap<Symbol, u64> = HashMap::new();
    for &a in syms {
        *counts.entry(a).or_default() += 1;
    }

    let mut results = Vec::new();
    for prop in props.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, arg) = prop.split_once('=').unwrap_or((prop, ""));
        let (pass, detail) = match name {
            _ if name.starts_with("ds") && arg.is_empty() => {
                let order: usize = prop_arg(prop, &name[2..])?;
                let stripped = remove_adjacent_repeats(&seq);
                let alt = max_alternation(&stripped).0;
                (is_ds(&stripped, order), json!({"max_alternation": alt}))
            }
            "sparse" => {
                let r: usize = prop_arg(prop, arg)?;
                (is_r_sparse(syms, r), Value::Null)
            }
            "multiplicity" | "min-multiplicity" => {
                let k: u64 = prop_arg(prop, arg)?;
                let lo = counts.values().copied().min().unwrap_or(0);
                let hi = counts.values().copied().max().unwrap_or(0);
                let pass = if name == "multiplicity" {
                    lo == k && hi == k
                } else {
                    lo >= k
                };
                (pass, json!({"min": lo, "max": hi}))
            }
            "blocks-distinct" => (seq.blocks_distinct(), Value::Null),
            "formation-free" => {
                let (r, s) = arg.split_once(':').ok_or_else(|| usage("formation-free takes R:S"))?;
                let (r, s): (usize, usize) = (prop_arg(prop, r)?, prop_arg(prop, s)?);
                let w = contains_formation(syms, r, s)?;
                let detail = w
                    .as_ref()
                    .map_or(Value::Null, |w| json!({"symbols": w.symbols, "windows": w.windows}));
                (w.is_none(), detail)
            }
            "construction" => construction_invariants(&seq, kind, params)?,
            _ => return Err(usage(format!("unknown property {prop:?}"))),
        };
        results.push((prop.to_string(), pass, detail));
    }
    if results.is_empty() {
        return Err(usage("no properties given"));
    }

    let all = results.iter().all(|r| r.1);
    let mut text = String::new();
    for (p, pass, _) in &results {
        let _ = writeln!(text, "{} {p}", if *pass { "PASS" } else { "FAIL" });
    }
    let json = json!({
        "file": path.display().to_string(),
        "props": results.iter().map(|(p, pass, d)| json!({"prop": p, "pass": pass, "detail": d})).collect::<Vec<_>>(),
        "pass": all,
    });
    Ok(Output {
        json,
        text,
        status: if all { Status::Ok } else { Status::Failed },
    })
}

fn construction_invariants(seq: &BlockedSequence, kind: Option<&str>, params: &Value) -> Result<(bool, Value)> {
    Ok(match kind {
        Some("z") => {
            let (d, m) = (param(params, "d")?, param(params, "m")?);
            let c = check_z(seq, d, m, &ZStatsTable::default().stats(d, m)?);
            let detail = json!({
                "multiplicity": c.multiplicity_ok,
                "max_alternation": c.max_alternation,
                "special_blocks": c.special_blocks_ok,
                "flanking": c.flanking_ok,
                "counts": c.counts_match,
            });
            (c.passed(), detail)
        }
        Some("even") => {
            let (s, k, m) = (param(params, "s")?, param(params, "k")?, param(params, "m")?);
            let c = check_even(seq, s, m, &EvenStatsTable::default().stats(s, k, m)?);
            let detail = json!({
                "block_len": c.block_len_ok,
                "multiplicity": c.multiplicity_ok,
                "max_alternation": c.max_alternation,
                "sparse": c.sparse_ok,
                "fixed_depth": c.fixed_depth_ok,
                "co_block": c.co_block_ok,
                "counts": c.counts_match,
                "identity": c.identity_ok,
            });
            (c.passed(s), detail)
        }
        Some("interpolated") => {
            let n = param(params, "n")?;
            let ok = is_ds(seq.symbols(), 3) && seq.alphabet_size() as u64 <= n;
            (ok, json!({"symbols": seq.alphabet_size()}))
        }
        Some("aff") => {
            let (r, m) = (param(params, "r")? as usize, param(params, "m")? as usize);
            let expected = (r - 1) * (m - 1);
            let ok = is_aff(seq, r, 2, 2)? && seq.alphabet_size() == expected && seq.block_count() == m;
            (ok, json!({"symbols": seq.alphabet_size(), "expected": expected}))
        }
        Some(other) => return Err(usage(format!("unknown construction kind {other:?}"))),
        None => return Err(usage("the construction property needs a file written by generate")),
    })
}

/// Runs `compute` through the cache when one is configured.
pub(crate) fn cached(
    cache: &mut Option<OracleCache>,
    func: &str,
    params: Value,
    compute: impl FnOnce() -> dsseq::Result<OracleResult>,
) -> dsseq::Result<OracleResult> {
    match cache {
        Some(c) => c.get_or_run(func, params, compute),
        None => compute(),
    }
}

fn oracle(o: &OracleCmd, cfg: &RunConfig) -> Result<Output> {
    let mut cache = cfg.cache.as_ref().map(OracleCache::open).transpose()?;
    let b = &cfg.budget;
    let (func, params, result) = match o {
        &OracleCmd::Lambda { s, n } => {
            let p = json!({"s": s, "n": n});
            (
                "lambda",
                p.clone(),
                cached(&mut cache, "lambda", p, || oracle_lambda(s, n, b))?,
            )
        }
        &OracleCmd::Psi { s, m, n } => {
            let p = json!({"s": s, "m": m, "n": n});
            (
                "psi",
                p.clone(),
                cached(&mut cache, "psi", p, || oracle_psi(s, m, n, b))?,
            )
        }
        &OracleCmd::Ads { s, k, m } => {
            let p = json!({"s": s, "k": k, "m": m});
            (
                "ads",
                p.clone(),
                cached(&mut cache, "ads", p, || oracle_ads_symbols(s, k, m, b))?,
            )
        }
        &OracleCmd::Aff { r, s, k, m } => {
            let p = json!({"r": r, "s": s, "k": k, "m": m});
            (
                "aff",
                p.clone(),
                cached(&mut cache, "aff", p, || oracle_aff_symbols(r, s, k, m, b))?,
            )
        }
        OracleCmd::Ex { pattern, n } => {
            let u = canonicalize(&parse_symbols(pattern)?);
            let p = json!({"pattern": u, "n": n});
            ("ex", p.clone(), cached(&mut cache, "ex", p, || oracle_ex(&u, *n, b))?)
        }
        &OracleCmd::F { r, s, n } => {
            let p = json!({"r": r, "s": s, "n": n});
            ("f", p.clone(), cached(&mut cache, "f", p, || oracle_f(r, s, n, b))?)
        }
    };
    let mut json = result.to_json();
    json["fn"] = json!(func);
    json["params"] = params.clone();
    let mut text = format!("{func} {params} = {}", result.value);
    if !result.exact {
        let upper = result.upper.map_or("unknown".to_string(), |u| u.to_string());
        let _ = write!(text, " (lower bound; upper bound {upper})");
    }
    let status = if result.exact { Status::Ok } else { Status::Incomplete };
    Ok(Output { json, text, status })
}

fn span(s: Span) -> std::ops::RangeInclusive<u32> {
    s.lo..=s.hi
}

fn table_output(name: &str, rows: Vec<Value>, columns: &[&str]) -> Output {
    let mut text = columns.join("\t");
    for r in &rows {
        text.push('\n');
        let cells: Vec<String> = columns
            .iter()
            .map(|c| match &r[*c] {
                Value::String(s) => s.clone(),
                v => v.to_string(),
            })
            .collect();
        text.push_str(&cells.join("\t"));
    }
    Output::ok(json!({ "table": name, "rows": rows }), text)
}

fn constants(c: &ConstantsCmd) -> Result<Output> {
    match *c {
        ConstantsCmd::Pq { s, k, d_s, d_prime_s } => {
            if s.lo < 1 || k.lo < 2 {
                return Err(usage("P, Q need s >= 1 and k >= 2"));
            }
            let mut t = PqTable::new(Tuning { d_s, d_prime_s });
            let mut rows = Vec::new();
            for s in span(s) {
                for k in span(k) {
                    let (p, q) = t.get(s, k);
                    rows.push(json!({"s": s, "k": k, "P": p.to_string(), "Q": q.to_string()}));
                }
            }
            Ok(table_output("pq", rows, &["s", "k", "P", "Q"]))
        }
        ConstantsCmd::R { s, d } => {
            if s.lo < 1 || d.lo < 2 {
                return Err(usage("R needs s >= 1 and d >= 2"));
            }
            let mut t = RTable::default();
            let mut rows = Vec::new();
            for s in span(s) {
                for d in span(d) {
                    rows.push(json!({"s": s, "d": d, "R": t.get(s, d).to_string()}));
                }
            }
            Ok(table_output("r", rows, &["s", "d", "R"]))
        }
        ConstantsCmd::Mu { s, k } => {
            let mut rows = Vec::new();
            for s in span(s) {
                if s < 2 || s % 2 == 1 {
                    return Err(usage("multiplicities exist only for even s >= 2"));
                }
                for k in span(k) {
                    rows.push(json!({"s": s, "k": k, "mu": multiplicity(s as u64, k as u64).to_string()}));
                }
            }
            Ok(table_output("mu", rows, &["s", "k", "mu"]))
        }
        ConstantsCmd::M0 { s } => {
            if s.lo < 3 || s.hi > 12 {
                return Err(usage("m0 is tabulated for 3 <= s <= 12"));
            }
            let rows = span(s).map(|s| json!({"s": s, "m0": m0(s)})).collect();
            Ok(table_output("m0", rows, &["s", "m0"]))
        }
        ConstantsCmd::Growth { ref family, s, index } => {
            let family: Family = family.parse()?;
            if s < 1 || (family != Family::Mu && index.hi < 2) {
                return Err(usage("growth needs s >= 1 and indices reaching 2"));
            }
            let report = growth_check(family, s, span(index))?;
            let mut text = format!("{family:?} s={s} t={}\nindex\tlog2\tnormalized\tsecond_diff", report.t);
            for r in &report.rows {
                let sd = r.second_diff.map_or("-".to_string(), |x| format!("{x:.12}"));
                let _ = write!(text, "\n{}\t{:.6}\t{:.6}\t{sd}", r.index, r.log2, r.normalized);
            }
            Ok(Output::ok(serde_json::to_value(&report)?, text))
        }
    }
}

fn ackermann_cmd(a: &AckermannCmd, cfg: &RunConfig) -> Result<Output> {
    let (json, text) = match *a {
        AckermannCmd::Eval { n, k } => {
            let (mag, label) = match k {
                Some(0) => return Err(usage("hierarchy levels start at 1")),
                Some(k) => (ackermann::ackermann_magnitude(k, n, cfg.bits), format!("A_{k}({n})")),
                None => {
                    let n32 = u32::try_from(n).map_err(|_| usage("n is too large"))?;
                    if n32 == 0 {
                        return Err(usage("A(n) needs n >= 1"));
                    }
                    (
                        ackermann::ackermann_function_magnitude(n32, cfg.bits),
                        format!("A({n})"),
                    )
                }
            };
            let mut json = mag.to_json();
            json["fn"] = json!(label);
            (json, mag.to_string())
        }
        AckermannCmd::Alpha { x, k } => {
            let (v, label) = match k {
                Some(0) => return Err(usage("hierarchy levels start at 1")),
                Some(k) => (ackermann::alpha_level(k, x), format!("alpha_{k}({x})")),
                None => (ackermann::alpha(x), format!("alpha({x})")),
            };
            (json!({"fn": label, "value": v}), v.to_string())
        }
        AckermannCmd::Ahat { k, m } => {
            if m == 0 {
                return Err(usage("Â_k(m) needs m >= 1"));
            }
            let mag = ackermann::a_hat(k, m, cfg.bits);
            let mut json = mag.to_json();
            json["fn"] = json!(format!("Ahat_{k}({m})"));
            (json, mag.to_string())
        }
    };
    Ok(Output::ok(json, text))
}

fn formations(f: &FormationsCmd) -> Result<Output> {
    match f {
        FormationsCmd::Embed { pattern, formation } => {
            let u = canonicalize(&parse_symbols(pattern)?);
            let raw: Value = serde_json::from_str(formation).map_err(|e| usage(format!("formation json: {e}")))?;
            let form = Formation::from_json(&raw)?;
            let sigma = embed_pattern(&u, &form)?;
            let image: Vec<Symbol> = u.iter().map(|&a| sigma[a as usize]).collect();
            let text = format!(
                "sigma = {}",
                sigma.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            );
            let json = json!({"pattern": u, "sigma": sigma, "image": image, "flattened": form.flatten()});
            Ok(Output::ok(json, text))
        }
        &FormationsCmd::Check { ref seq, r, s } => {
            if r == 0 || s == 0 {
                bail!(usage("need r, s >= 1"));
            }
            let syms = parse_symbols(seq)?;
            let w = contains_formation(&syms, r, s)?;
            let (json, text) = match w {
                Some(w) => (
                    json!({"contains": true, "symbols": w.symbols, "windows": w.windows}),
                    format!(
                        "({r},{s})-formation on symbols {:?} in windows {:?}",
                        w.symbols, w.windows
                    ),
                ),
                None => (json!({"contains": false}), format!("no ({r},{s})-formation")),
            };
            Ok(Output::ok(json, text))
        }
    }
}
