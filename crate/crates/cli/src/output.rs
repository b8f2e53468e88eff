use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use immunet::{Graph, Item, RemovalKind, RemovalPlan};

use crate::Failure;

/// `x` with 12 significant digits, like C's `%.12g`.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Round first so the exponent accounts for carries such as 9.99…→10.
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn item_label(graph: &Graph, item: &Item) -> String {
    match item {
        Item::Edge(e) => format!("{}-{}", graph.label(e.u), graph.label(e.v)),
        Item::Node(v) => graph.label(*v).to_string(),
    }
}

fn universe(graph: &Graph, kind: RemovalKind) -> usize {
    match kind {
        RemovalKind::EdgeRemoval => graph.edge_count(),
        RemovalKind::NodeRemoval => graph.present_node_count(),
    }
}

/// One row per prefix of the plan, starting with the untouched graph.
pub fn plan_csv(graph: &Graph, plan: &RemovalPlan) -> String {
    let total = universe(graph, plan.kind).max(1) as f64;
    let mut out = String::from("step,item,cost,cumulative_cost,fraction_removed,lambda1\n");
    let _ = writeln!(out, "0,,0,0,0,{}", sig12(plan.lambda_trajectory[0]));
    for (i, item) in plan.sequence.iter().enumerate() {
        let cum = plan.cumulative_cost[i];
        let prev = if i == 0 { 0.0 } else { plan.cumulative_cost[i - 1] };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            i + 1,
            item_label(graph, item),
            sig12(cum - prev),
            sig12(cum),
            sig12((i + 1) as f64 / total),
            sig12(plan.lambda_trajectory[i + 1])
        );
    }
    out
}

/// λ₁ per algorithm on the shared grid of removal counts; blank once a plan
/// has ended.
pub fn compare_csv(graph: &Graph, names: &[&str], plans: &[RemovalPlan]) -> String {
    let kind = plans.first().map_or(RemovalKind::EdgeRemoval, |p| p.kind);
    let total = universe(graph, kind).max(1) as f64;
    let steps = plans.iter().map(RemovalPlan::len).max().unwrap_or(0);
    let mut out = String::from("step,fraction_removed");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for s in 0..=steps {
        let _ = write!(out, "{s},{}", sig12(s as f64 / total));
        for p in plans {
            out.push(',');
            if s <= p.len() {
                out.push_str(&sig12(p.lambda_trajectory[s]));
            }
        }
        out.push('\n');
    }
    out
}

/// Writes `text` to `out`, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `results.csv` → `results.csv.manifest.json`.
pub fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes the manifest next to `out`, or to stderr without one.
pub fn emit_manifest(out: Option<&Path>, manifest: &serde_json::Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    match out {
        Some(p) => {
            let path = sidecar(p);
            std::fs::write(&path, text + "\n").map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}
