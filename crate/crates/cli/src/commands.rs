//! Command implementations. Every command writes deterministic files (no
//! timestamps, stable ordering) so identical configs produce identical bytes.

use crate::config::default_out_dir;
use crate::formats::{
    diagram_to_file, load_graph, resolve_map, resolve_vertex, sig12, write_json, Csv,
};
use anyhow::{anyhow, bail, Result};
use entromap_core::analysis::{self, BoundsParams};
use entromap_core::graphs::{self, TaggedGraph};
use entromap_core::hofbauer::{build_diagram, in_e_nk};
use entromap_core::maps::{BranchFn, PiecewiseMonotoneMap};
use entromap_core::perturb::{self, TangencySearch};
use entromap_core::poly::Poly;
use entromap_core::scalar::{Interval, Scalar};
use std::path::{Path, PathBuf};

/// Demotes every exact scalar to f64 (float mode).
fn to_float_mode(map: &PiecewiseMonotoneMap) -> Result<PiecewiseMonotoneMap> {
    let pieces = map
        .pieces()
        .iter()
        .map(|p| {
            let f = match &p.f {
                BranchFn::Poly(poly) => BranchFn::Poly(Poly::new(
                    poly.coeffs.iter().map(|c| Scalar::Float(c.to_f64())).collect(),
                )),
                other => other.clone(),
            };
            (
                Interval::new(
                    Scalar::Float(p.iv.lo.to_f64()),
                    Scalar::Float(p.iv.hi.to_f64()),
                ),
                f,
            )
        })
        .collect();
    Ok(PiecewiseMonotoneMap::from_pieces(
        pieces,
        map.smoothness_order(),
        map.name(),
    )?)
}

pub fn load_map_in_mode(spec: &str, mode: Option<&str>) -> Result<PiecewiseMonotoneMap> {
    let map = resolve_map(spec)?;
    match mode {
        None | Some("exact") => Ok(map),
        Some("float") => to_float_mode(&map),
        Some(other) => bail!("unknown mode `{other}` (use exact|float)"),
    }
}

fn out_path(dir: &Option<PathBuf>, name: &str) -> PathBuf {
    dir.clone().unwrap_or_else(default_out_dir).join(name)
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

pub struct EntropyArgs {
    pub map: String,
    pub method: String,
    pub depth: usize,
    pub nmax: usize,
    pub pmax: usize,
    pub qmax: usize,
    pub r: f64,
    pub mode: Option<String>,
    pub out: Option<PathBuf>,
}

pub fn cmd_entropy(args: &EntropyArgs) -> Result<i32> {
    if !["lap", "hofbauer", "gurevic", "all"].contains(&args.method.as_str()) {
        bail!("usage: unknown method `{}`", args.method);
    }
    let map = load_map_in_mode(&args.map, args.mode.as_deref())?;
    let params = BoundsParams {
        n_max: args.nmax,
        depth: args.depth,
        p_max: args.pmax,
        q_max: args.qmax,
        ..BoundsParams::default()
    };
    let rep = analysis::bounds_report(&map, args.r, &params)?;

    let mut bounds = Csv::new("map,r,h_lap,h_hofbauer,h,R,yomdin_bound,main_theorem_bound,beta,lambda_p,flags");
    let field = |o: &Option<analysis::EntropyEstimate>| {
        o.as_ref().map(|e| sig12(e.value)).unwrap_or_default()
    };
    let lambdas = rep
        .periodic
        .iter()
        .map(|&(_, _, _, l)| sig12(l))
        .collect::<Vec<_>>()
        .join(";");
    bounds.row(&[
        map.name().to_string(),
        sig12(args.r),
        field(&rep.h_lap),
        field(&rep.h_hofbauer),
        sig12(rep.h),
        sig12(rep.r_growth),
        sig12(rep.yomdin_bound),
        sig12(rep.main_theorem_bound),
        rep.beta.map(sig12).unwrap_or_default(),
        lambdas,
        rep.flags.join(";"),
    ]);
    bounds.write(&out_path(&args.out, "bounds.csv"))?;

    for (est, name) in [
        (&rep.h_lap, "convergence_lap.csv"),
        (&rep.h_hofbauer, "convergence_hofbauer.csv"),
    ] {
        if let Some(e) = est {
            let mut csv = Csv::new("n,estimate");
            for &(n, v) in &e.sequence {
                csv.row(&[n.to_string(), sig12(v)]);
            }
            csv.write(&out_path(&args.out, name))?;
        }
    }

    println!(
        "h={} R={} bound={}",
        sig12(rep.h),
        sig12(rep.r_growth),
        sig12(rep.main_theorem_bound)
    );
    Ok(if rep.flags.is_empty() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// diagram
// ---------------------------------------------------------------------------

pub struct DiagramArgs {
    pub map: String,
    pub depth: usize,
    pub out: Option<PathBuf>,
    pub stats: bool,
    pub mode: Option<String>,
}

pub fn cmd_diagram(args: &DiagramArgs) -> Result<i32> {
    if args.depth == 0 {
        bail!("usage: truncation depth must be at least 1");
    }
    let map = load_map_in_mode(&args.map, args.mode.as_deref())?;
    let partition = map.natural_partition()?;
    let diagram = build_diagram(&map, &partition, args.depth)?;
    let file = diagram_to_file(&diagram, map.name());
    write_json(&out_path(&args.out, "diagram.json"), &file)?;
    if args.stats {
        println!(
            "vertices={} edges={}",
            diagram.vertex_count(),
            diagram.edge_count()
        );
        for k in [1u32, 2, 4, 8, 16] {
            let count = diagram
                .vertices
                .iter()
                .filter(|v| in_e_nk(v, args.depth, k))
                .count();
            println!("E[N={},K={}]={}", args.depth, k, count);
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// markov
// ---------------------------------------------------------------------------

pub struct MarkovArgs {
    pub action: String,
    pub graph: PathBuf,
    pub vertex: Option<String>,
    pub pmax: usize,
    pub p: Option<usize>,
    pub m: usize,
    pub limit: Option<PathBuf>,
    pub seq: Vec<PathBuf>,
    pub out: Option<PathBuf>,
}

pub fn cmd_markov(args: &MarkovArgs) -> Result<i32> {
    match args.action.as_str() {
        "counts" => {
            let (graph, labels, _) = load_graph(&args.graph)?;
            let vspec = args.vertex.as_deref().unwrap_or("0");
            let u = resolve_vertex(vspec, &labels)?;
            let counts = graphs::count_closed_upto(&graph, u, args.pmax);
            let mut csv = Csv::new("p,count,log_count_over_p");
            let mut stdout_cells = Vec::new();
            for (i, c) in counts.iter().enumerate() {
                let p = i + 1;
                let logc = if c > &num_bigint::BigUint::from(0u32) {
                    sig12(big_ln(c) / p as f64)
                } else {
                    String::new()
                };
                csv.row(&[p.to_string(), c.to_string(), logc]);
                stdout_cells.push(c.to_string());
            }
            csv.write(&out_path(&args.out, "counts.csv"))?;
            println!("{}", stdout_cells.join(","));
            Ok(0)
        }
        "entropy" => {
            let (graph, labels, _) = load_graph(&args.graph)?;
            let vspec = args.vertex.as_deref().unwrap_or("0");
            let u = resolve_vertex(vspec, &labels)?;
            let est = graphs::gurevic_entropy(&graph, u, args.pmax)?;
            let spectral = graphs::spectral_entropy(&graph);
            let mut csv = Csv::new("p,estimate");
            for &(p, v) in &est.sequence {
                csv.row(&[p.to_string(), sig12(v)]);
            }
            csv.write(&out_path(&args.out, "entropy.csv"))?;
            println!(
                "gurevic={} spectral={}",
                sig12(est.value),
                spectral.map(sig12).unwrap_or_else(|| "no-cycle".into())
            );
            Ok(0)
        }
        "parry" => {
            let (graph, _, _) = load_graph(&args.graph)?;
            let measure = graphs::parry_measure(&graph)
                .map_err(|e| anyhow!("connectivity: {e}"))?;
            let mut csv = Csv::new("vertex,probability");
            for (v, p) in measure.vertex_probs.iter().enumerate() {
                csv.row(&[v.to_string(), sig12(*p)]);
            }
            csv.write(&out_path(&args.out, "parry.csv"))?;
            println!("entropy={}", sig12(measure.entropy));
            Ok(0)
        }
        "bowen" => {
            let (graph, _, _) = load_graph(&args.graph)?;
            let p = args
                .p
                .ok_or_else(|| anyhow!("usage: bowen needs --p <length>"))?;
            let dist = graphs::bowen_empirical(&graph, p)?;
            let mut csv = Csv::new("vertex,mass");
            for (v, m) in dist.iter().enumerate() {
                csv.row(&[v.to_string(), sig12(*m)]);
            }
            csv.write(&out_path(&args.out, "bowen.csv"))?;
            Ok(0)
        }
        "convergence" => {
            let limit_path = args
                .limit
                .as_ref()
                .ok_or_else(|| anyhow!("usage: convergence needs --limit <graph>"))?;
            if args.seq.is_empty() {
                bail!("usage: convergence needs --seq <graph,...>");
            }
            let (limit, _, _) = load_graph(limit_path)?;
            let mut sequence = Vec::new();
            for path in &args.seq {
                let (graph, _, tagged) = load_graph(path)?;
                let tagged = tagged.unwrap_or_else(|| (0..graph.vertex_count()).collect());
                sequence.push(TaggedGraph { graph, tagged });
            }
            let report = graphs::check_convergence(&sequence, &limit, None, args.m, args.pmax)?;
            let mut text = format!(
                "ok={} uniformity_bound={} M={} p_max={}\n",
                report.ok, report.uniformity_bound, report.m, report.p_max
            );
            for v in &report.violations {
                text.push_str(&format!(
                    "violation graph={} vertex={} p={}\n",
                    v.graph_index, v.vertex, v.p
                ));
            }
            crate::formats::write_atomic(&out_path(&args.out, "convergence.txt"), &text)?;
            print!("{text}");
            Ok(0)
        }
        other => bail!("usage: unknown markov action `{other}`"),
    }
}

fn big_ln(n: &num_bigint::BigUint) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits();
    if bits <= 64 {
        (n.to_u64().unwrap() as f64).ln()
    } else {
        let shift = bits - 53;
        ((n >> shift).to_u64().unwrap() as f64).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

// ---------------------------------------------------------------------------
// perturb
// ---------------------------------------------------------------------------

pub struct PerturbArgs {
    pub map: String,
    pub r: f64,
    pub delta: f64,
    pub l_list: Vec<u32>,
    pub amp_const: f64,
    pub out: Option<PathBuf>,
    pub mode: Option<String>,
}

pub fn cmd_perturb(args: &PerturbArgs) -> Result<i32> {
    if args.l_list.is_empty() {
        bail!("usage: --l-list must not be empty");
    }
    if !(args.delta > 0.0 && args.delta <= 0.1) {
        bail!("usage: delta must lie in (0, 0.1]");
    }
    let map = load_map_in_mode(&args.map, args.mode.as_deref())?;
    let tangency = perturb::find_tangency(&map, &TangencySearch::default())?
        .ok_or_else(|| anyhow!("map has no flat critical connection to perturb"))?;
    let table = perturb::jump_experiment(
        &map,
        &tangency,
        args.r,
        &args.l_list,
        args.delta,
        args.amp_const,
    )?;
    let mut csv = Csv::new(
        "l,delta,a,N,cr_distance,certified_entropy,theoretical_chain,lambda_over_r,error",
    );
    let mut failures = 0;
    for row in &table.rows {
        if row.error.is_some() {
            failures += 1;
        }
        csv.row(&[
            row.l.to_string(),
            sig12(row.delta),
            sig12(row.amplitude),
            row.n_oscillations.to_string(),
            row.cr_distance.map(sig12).unwrap_or_default(),
            row.certified_entropy.map(sig12).unwrap_or_default(),
            sig12(row.theoretical_chain),
            sig12(row.lambda_over_r),
            row.error.clone().unwrap_or_default(),
        ]);
    }
    csv.write(&out_path(&args.out, "jump.csv"))?;
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    println!(
        "lambda={} rows={} failures={failures}",
        sig12(table.lambda),
        table.rows.len()
    );
    Ok(if failures == 0 { 0 } else { 1 })
}

/// Shared by tests: writes the golden-mean fixture file.
pub fn golden_mean_file(path: &Path) -> Result<()> {
    let file = crate::formats::DiagramFile {
        vertices: vec![
            crate::formats::VertexRepr {
                id: 0,
                label: Some("a".into()),
                base: None,
                interval: None,
                depth: None,
            },
            crate::formats::VertexRepr {
                id: 1,
                label: Some("b".into()),
                base: None,
                interval: None,
                depth: None,
            },
        ],
        edges: vec![[0, 0], [0, 1], [1, 0]],
        meta: None,
        tagged: None,
    };
    write_json(path, &file)
}
