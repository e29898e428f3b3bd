//! Command-line front end for the subsurface solver: argument model, commands and JSON reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use subsurf_core::complex::{
    classify_surface, format_summaries, hasse_diagram, parse_boundary, parse_complex, surface_violations, write_complex, Simplex,
    SimplicialComplex, SurfaceSummary,
};
use subsurf_core::decomp::{close_td, heuristic_td, make_nice_closed, parse_pace_td, validate_td, write_pace_td};
use subsurf_core::dpengine::{solve, DpError, Instance, ProblemSpec, SolveOptions};
use subsurf_core::hardgen::reduce_dcp;
use subsurf_core::oracle::{brute_force_subsurfaces, dcp_bruteforce, Digraph, DCP_VERTEX_CAP, DEFAULT_TRIANGLE_CAP};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "subsurf", version, about = "Decide whether a 2-complex contains a prescribed surface")]
pub struct Cli {
    /// Include wall time in the JSON report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the tree-decomposition solver.
    Solve(SolveArgs),
    /// Classify a complex that is itself a surface.
    Classify(ClassifyArgs),
    /// Answer a problem by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Compute or validate a tree decomposition of the Hasse diagram.
    Td(TdArgs),
    /// Generate a hard instance from a digraph.
    GenHard(GenHardArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Sr,
    Csr,
    Sog,
    Sp,
}

#[derive(Args, Debug)]
pub struct ProblemArgs {
    #[arg(long)]
    pub complex: PathBuf,
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// Cycles the surface boundary must equal, one per line.
    #[arg(long)]
    pub boundary: Option<PathBuf>,
    #[arg(long)]
    pub genus: Option<u32>,
    #[arg(long)]
    pub components: Option<u32>,
    #[arg(long)]
    pub orientable: Option<bool>,
    /// SR targets as `or:g:b,...` with `or` one of `o`, `n`.
    #[arg(long)]
    pub targets: Option<String>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Tree decomposition of the Hasse diagram in PACE format.
    #[arg(long)]
    pub td: Option<PathBuf>,
    #[arg(long)]
    pub witness: bool,
    #[arg(long, default_value_t = 1 << 22)]
    pub table_cap: usize,
    /// Tie-break seed for the min-fill heuristic; 0 is deterministic lowest-id.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub complex: PathBuf,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Largest triangle count the enumeration accepts.
    #[arg(long, default_value_t = DEFAULT_TRIANGLE_CAP)]
    pub cap: usize,
}

#[derive(Args, Debug)]
pub struct TdArgs {
    #[arg(long)]
    pub complex: PathBuf,
    /// Validate this PACE decomposition instead of computing one.
    #[arg(long)]
    pub validate: Option<PathBuf>,
    /// Write the computed decomposition here in PACE format.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct GenHardArgs {
    /// Digraph file: header `n m`, then `u v` per edge.
    #[arg(long)]
    pub digraph: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    /// Output directory for `instance.complex` and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the construction-order decomposition as `instance.td`.
    #[arg(long)]
    pub pace: bool,
}

/// Result of one command: the JSON report, the exit code and a line for humans.
pub struct Outcome {
    pub report: Value,
    pub code: i32,
    pub summary: String,
}

/// Canonical serialization: sorted keys, compact, trailing newline.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_complex(path: &Path, inputs: &mut serde_json::Map<String, Value>, key: &str) -> Result<SimplicialComplex> {
    let f = read(path)?;
    inputs.insert(key.into(), json!(digest(&f)));
    let text = String::from_utf8(f).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let parse = if key == "boundary" { parse_boundary } else { parse_complex };
    parse(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_targets(spec: &str) -> Result<Vec<SurfaceSummary>> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|entry| {
            let parts: Vec<&str> = entry.trim().split(':').collect();
            if parts.len() != 3 {
                bail!("target `{entry}` is not of the form or:g:b");
            }
            let orientable = match parts[0] {
                "o" | "orientable" => true,
                "n" | "non-orientable" => false,
                other => bail!("unknown orientability `{other}`, expected o or n"),
            };
            let g = parts[1].parse().with_context(|| format!("bad genus in `{entry}`"))?;
            let b = parts[2].parse().with_context(|| format!("bad boundary count in `{entry}`"))?;
            Ok(SurfaceSummary::new(orientable, g, b))
        })
        .collect()
}

fn build_spec(a: &ProblemArgs) -> Result<ProblemSpec> {
    let need = |v: Option<u32>, name: &str| v.ok_or_else(|| anyhow!("--{name} is required for this problem"));
    let spec = match a.problem {
        Problem::Sp => ProblemSpec::Sp { components: need(a.components, "components")? },
        Problem::Sog => ProblemSpec::Sog { genus: need(a.genus, "genus")?, components: need(a.components, "components")? },
        Problem::Csr => ProblemSpec::Csr { orientable: a.orientable.unwrap_or(true), genus: need(a.genus, "genus")? },
        Problem::Sr => {
            let t = a.targets.as_deref().ok_or_else(|| anyhow!("--targets is required for sr"))?;
            let mut targets = parse_targets(t)?;
            targets.sort();
            ProblemSpec::Sr { targets }
        }
    };
    spec.validate()?;
    Ok(spec)
}

fn problem_json(spec: &ProblemSpec) -> Value {
    match spec {
        ProblemSpec::Sp { components } => json!({"kind": "sp", "components": components}),
        ProblemSpec::Sog { genus, components } => json!({"kind": "sog", "genus": genus, "components": components}),
        ProblemSpec::Csr { orientable, genus } => json!({"kind": "csr", "orientable": orientable, "genus": genus}),
        ProblemSpec::Sr { targets } => json!({"kind": "sr", "targets": targets}),
    }
}

fn triangles_json(tris: &[Simplex]) -> Value {
    Value::Array(tris.iter().map(|t| json!(t.vertices())).collect())
}

struct LoadedInstance {
    inst: Instance,
    inputs: serde_json::Map<String, Value>,
}

fn load_instance(a: &ProblemArgs) -> Result<LoadedInstance> {
    let mut inputs = serde_json::Map::new();
    let complex = load_complex(&a.complex, &mut inputs, "complex")?;
    let boundary = match &a.boundary {
        Some(p) => load_complex(p, &mut inputs, "boundary")?,
        None => SimplicialComplex::new(),
    };
    let spec = build_spec(a)?;
    Ok(LoadedInstance { inst: Instance { complex, boundary, spec }, inputs })
}

fn threads_from_env() -> Result<usize> {
    match std::env::var("SUBSURF_THREADS") {
        Ok(v) if !v.trim().is_empty() => v.trim().parse().with_context(|| format!("SUBSURF_THREADS=`{v}` is not a count")),
        _ => Ok(0),
    }
}

fn answer_code(answer: bool) -> i32 {
    if answer {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

pub fn cmd_solve(a: &SolveArgs) -> Result<Outcome> {
    let LoadedInstance { inst, mut inputs } = load_instance(&a.problem)?;
    let td = match &a.td {
        Some(p) => {
            let f = read(p)?;
            inputs.insert("td".into(), json!(digest(&f)));
            Some(parse_pace_td(&String::from_utf8_lossy(&f)).with_context(|| format!("in {}", p.display()))?)
        }
        None => None,
    };
    let opts = SolveOptions { want_witness: a.witness, table_cap: a.table_cap, threads: threads_from_env()?, td, td_seed: a.seed };
    let r = solve(&inst, &opts).map_err(|e| match e {
        DpError::Decomposition(d) => anyhow!("tree decomposition is invalid for the complex: {d}"),
        e => anyhow!(e),
    })?;
    let classification = r.classification.as_ref().map(|s| json!(format_summaries(s))).unwrap_or(Value::Null);
    let report = json!({
        "command": "solve",
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "problem": problem_json(&inst.spec),
        "answer": r.answer,
        "witness": r.witness.as_ref().map(|w| triangles_json(&w.triangles())),
        "classification": classification,
        "stats": r.stats,
    });
    let summary = format!(
        "{}: {} (width {}, closed width {}, {} nice nodes, max table {})",
        inst.spec,
        if r.answer { "yes" } else { "no" },
        r.stats.width,
        r.stats.closed_width,
        r.stats.nice_nodes,
        r.stats.max_table
    );
    Ok(Outcome { report, code: answer_code(r.answer), summary })
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<Outcome> {
    let mut inputs = serde_json::Map::new();
    let k = load_complex(&a.complex, &mut inputs, "complex")?;
    let violations = surface_violations(&k);
    if violations.is_empty() {
        let s = classify_surface(&k)?;
        let text = format_summaries(&s);
        let report = json!({
            "command": "classify",
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": inputs,
            "surface": true,
            "classification": text,
            "components": s,
        });
        Ok(Outcome { report, code: EXIT_YES, summary: text })
    } else {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        let report = json!({
            "command": "classify",
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": inputs,
            "surface": false,
            "violations": lines,
        });
        Ok(Outcome { report, code: EXIT_NO, summary: format!("not a surface: {}", lines.join("; ")) })
    }
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<Outcome> {
    let LoadedInstance { inst, inputs } = load_instance(&a.problem)?;
    subsurf_core::complex::validate_boundary_spec(&inst.complex, &inst.boundary)?;
    let found = brute_force_subsurfaces(&inst.complex, &inst.boundary, &inst.spec, a.cap)?;
    let answer = found.is_some();
    let report = json!({
        "command": "oracle",
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "problem": problem_json(&inst.spec),
        "answer": answer,
        "witness": found.as_ref().map(|s| triangles_json(&s.triangles)),
        "classification": found.as_ref().map(|s| format_summaries(&s.summary)),
    });
    let summary = format!("{}: {} (brute force)", inst.spec, if answer { "yes" } else { "no" });
    Ok(Outcome { report, code: answer_code(answer), summary })
}

pub fn cmd_td(a: &TdArgs) -> Result<Outcome> {
    let mut inputs = serde_json::Map::new();
    let k = load_complex(&a.complex, &mut inputs, "complex")?;
    let h = hasse_diagram(&k);
    let (td, source) = match &a.validate {
        Some(p) => {
            let f = read(p)?;
            inputs.insert("td".into(), json!(digest(&f)));
            let td = parse_pace_td(&String::from_utf8_lossy(&f)).with_context(|| format!("in {}", p.display()))?;
            validate_td(&h.adj, &td).context("tree decomposition is invalid for the complex")?;
            (td, "validated")
        }
        None => (heuristic_td(&h.adj, a.seed), "min-fill"),
    };
    let pace = write_pace_td(&td, h.node_count());
    if let Some(out) = &a.out {
        fs::write(out, &pace).with_context(|| format!("cannot write {}", out.display()))?;
    }
    let closed = close_td(&h, &td);
    let nice = make_nice_closed(&h, &closed, true);
    let report = json!({
        "command": "td",
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": inputs,
        "source": source,
        "hasse_nodes": h.node_count(),
        "hasse_edges": h.edge_count(),
        "bags": td.bags.len(),
        "width": td.width(),
        "closed_width": closed.width(),
        "nice_nodes": nice.nodes.len(),
        "pace": pace,
    });
    let summary = format!("{source} decomposition: {} bags, width {}, closed width {}", td.bags.len(), td.width(), closed.width());
    Ok(Outcome { report, code: EXIT_YES, summary })
}

pub fn cmd_gen_hard(a: &GenHardArgs) -> Result<Outcome> {
    let f = read(&a.digraph)?;
    let d = Digraph::parse(&String::from_utf8_lossy(&f)).with_context(|| format!("in {}", a.digraph.display()))?;
    let h = reduce_dcp(&d, None, a.ell)?;
    fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
    let complex_text = write_complex(&h.complex);
    let complex_path = a.out.join("instance.complex");
    fs::write(&complex_path, &complex_text).with_context(|| format!("cannot write {}", complex_path.display()))?;
    let mut files = vec![json!("instance.complex")];
    if a.pace {
        let hd = hasse_diagram(&h.complex);
        let td_path = a.out.join("instance.td");
        fs::write(&td_path, write_pace_td(&h.path_decomposition, hd.node_count()))
            .with_context(|| format!("cannot write {}", td_path.display()))?;
        files.push(json!("instance.td"));
    }
    let max_cycles = if d.n <= DCP_VERTEX_CAP { Some(dcp_bruteforce(&d)?) } else { None };
    let manifest = json!({
        "digraph": {"vertices": d.n, "edges": d.edges, "sha256": digest(&f)},
        "ell": a.ell,
        "npd": h.npd,
        "npd_width": h.npd.width(),
        "triangles": h.complex.triangles().len(),
        "complex_sha256": digest(complex_text.as_bytes()),
        "edge_gadget_triangles": h.edge_gadgets.iter().map(Vec::len).collect::<Vec<_>>(),
        "vertex_gadget_triangles": h.vertex_gadgets.iter().map(Vec::len).collect::<Vec<_>>(),
        "path_decomposition_width": h.path_decomposition.width(),
        "max_disjoint_cycles": max_cycles,
        "problems": [problem_json(&h.sp_spec()), problem_json(&h.sog_spec()), problem_json(&h.sr_spec())],
    });
    let manifest_path = a.out.join("manifest.json");
    fs::write(&manifest_path, canonical_json(&manifest)).with_context(|| format!("cannot write {}", manifest_path.display()))?;
    files.push(json!("manifest.json"));
    let summary = format!("{} triangles written to {}", h.complex.triangles().len(), a.out.display());
    let report = json!({
        "command": "gen-hard",
        "version": env!("CARGO_PKG_VERSION"),
        "files": files,
        "manifest": manifest,
    });
    Ok(Outcome { report, code: EXIT_YES, summary })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve(_) => "solve",
        Command::Classify(_) => "classify",
        Command::Oracle(_) => "oracle",
        Command::Td(_) => "td",
        Command::GenHard(_) => "gen-hard",
    }
}

/// Runs a parsed command line; errors become a report with exit code 2.
pub fn execute(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let res = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Td(a) => cmd_td(a),
        Command::GenHard(a) => cmd_gen_hard(a),
    };
    let elapsed = start.elapsed();
    let mut out = res.unwrap_or_else(|e| {
        let msg = format!("{e:#}");
        Outcome {
            report: json!({"command": command_name(&cli.command), "version": env!("CARGO_PKG_VERSION"), "error": msg}),
            code: EXIT_ERROR,
            summary: format!("error: {msg}"),
        }
    });
    if cli.timing {
        if let Value::Object(m) = &mut out.report {
            m.insert("timing_us".into(), json!(elapsed.as_micros() as u64));
        }
    }
    out.summary = format!("{} [{:.3}s]", out.summary, elapsed.as_secs_f64());
    out
}
