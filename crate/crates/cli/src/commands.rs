use std::fmt;
use std::io::Write;

use netwit::experiments::{
    asymptotic_scan, sweep, write_sweep_csv, Family, SweepConfig,
};
use netwit::graph::{
    cactus_decomposition, compare_topologies, cut_size_histogram, CactusDecomposition,
};
use netwit::lp::{
    build_feasibility_lp, build_negativity_lp, build_reduced_lp, certify_witness, SswProgram,
};
use netwit::oracle::{isotropic_edge, verify_fully_decomposable};
use netwit::sampling::{simulate_fidelity, simulate_witness_estimate};
use netwit::witness::{
    bg_ssw, bg_ssw_certificates, critical_visibility_bg, critical_visibility_tree,
    critical_visibility_triangle, e_ssw, e_ssw_certificates, fidelity_witness,
    fidelity_witness_threshold, is_triangle, tree_negativity, triangle_certificates,
    triangle_ssw, visibility_of_fidelity, CutCertificate, NetworkState, StateSpec, Witness,
};
use netwit::{Caps, EdgeSubset, Error, Network};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::manifest::ManifestBuilder;
use crate::{
    Command, ExperimentCommand, FamilyName, GraphArgs, OptimizeArgs, SampleArgs, SampleTarget,
    ScanArgs, ScanFamily, StateArgs, SweepArgs, VerifyArgs, WitnessArgs,
};

/// Expectation values below this count as detection.
const GME_TOL: f64 = 1e-12;

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
    Usage(String),
    /// The report was printed; only the exit status remains.
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(Error::CapExceeded { .. }) => 3,
            CliError::Lib(
                Error::Infeasible | Error::Unbounded | Error::IterationLimit(_),
            ) => 1,
            CliError::Lib(_) | CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::VerificationFailed => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Usage(m) => f.write_str(m),
            CliError::VerificationFailed => f.write_str("verification failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(command: Command, argv: Vec<String>) -> CliResult<()> {
    let caps = Caps::from_env()?;
    match command {
        Command::Graph(a) => cmd_graph(a, argv, &caps),
        Command::Witness(a) => cmd_witness(a, argv, &caps),
        Command::Optimize(a) => cmd_optimize(a, argv, &caps),
        Command::Verify(a) => cmd_verify(a, argv, &caps),
        Command::Sample(a) => cmd_sample(a, argv),
        Command::Experiment(ExperimentCommand::Sweep(a)) => cmd_sweep(a, argv, &caps),
        Command::Experiment(ExperimentCommand::Scan(a)) => cmd_scan(a, argv, &caps),
    }
}

fn read_input(path: &str, manifest: &mut ManifestBuilder) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {path}: {e}")))?;
    manifest.input(path, &bytes);
    String::from_utf8(bytes).map_err(|_| CliError::Io(format!("{path} is not valid UTF-8")))
}

fn load_graph(path: &str, manifest: &mut ManifestBuilder) -> CliResult<Network> {
    let text = read_input(path, manifest)?;
    Network::parse(&text).map_err(|e| match e {
        Error::Parse { .. } => CliError::Usage(format!("{path}: {e}")),
        other => CliError::Lib(other),
    })
}

fn load_state(
    args: &StateArgs,
    edges: usize,
    manifest: &mut ManifestBuilder,
) -> CliResult<NetworkState> {
    let spec = match (&args.state, args.p) {
        (Some(path), _) => {
            let text = read_input(path, manifest)?;
            serde_json::from_str::<StateSpec>(&text)
                .map_err(|e| CliError::Usage(format!("{path}: {e}")))?
        }
        (None, Some(p)) => StateSpec {
            d: args.d,
            p: Some(p),
            ..StateSpec::default()
        },
        (None, None) => return Err(CliError::Usage("need --state FILE or --p VALUE".into())),
    };
    Ok(spec.into_state(edges)?)
}

fn emit(manifest: ManifestBuilder, result: Value) -> CliResult<()> {
    let out = json!({ "manifest": manifest.finish(), "result": result });
    let text = serde_json::to_string_pretty(&out).expect("JSON output");
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "{text}").map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable output")
}

fn cactus_json(dec: &CactusDecomposition) -> Value {
    json!({
        "cyclomatic": dec.cyclomatic_number,
        "acyclic_class": dec.acyclic_class,
        "cycle_classes": dec.cycle_classes,
    })
}

fn cmd_graph(args: GraphArgs, argv: Vec<String>, caps: &Caps) -> CliResult<()> {
    let mut manifest = ManifestBuilder::new("graph", argv);
    let net = load_graph(&args.path, &mut manifest)?;
    let hist = cut_size_histogram(&net, caps)?;
    let cuts: u64 = hist.iter().sum();
    let min_cut = hist.iter().position(|&c| c > 0);
    let cactus = match cactus_decomposition(&net) {
        Ok(dec) => cactus_json(&dec),
        Err(Error::NotCactus(_)) => Value::Null,
        Err(e) => return Err(e.into()),
    };
    let mut result = json!({
        "vertices": net.vertex_count(),
        "edges": net.edge_count(),
        "cyclomatic": net.cyclomatic_number(),
        "cuts": cuts,
        "min_cut": min_cut,
        "cut_histogram": hist,
        "cactus": cactus,
    });
    if let Some(other) = &args.compare {
        let second = load_graph(other, &mut manifest)?;
        result["compare"] = to_value(&compare_topologies(&net, &second)?);
    }
    emit(manifest, result)
}

struct FamilyWitness {
    witness: Witness,
    certificates: Option<Vec<CutCertificate>>,
    critical_visibility: f64,
}

fn family_witness(
    family: FamilyName,
    net: &Network,
    d: u32,
    caps: &Caps,
    with_certificates: bool,
) -> CliResult<FamilyWitness> {
    let edges = net.edge_count();
    let (witness, certificates, critical_visibility) = match family {
        FamilyName::ESsw => (
            e_ssw(edges, d, caps)?,
            with_certificates.then(|| e_ssw_certificates(net, d, caps)).transpose()?,
            critical_visibility_tree(d, edges),
        ),
        FamilyName::BgSsw => (
            bg_ssw(net, d, caps)?,
            with_certificates.then(|| bg_ssw_certificates(net, d, caps)).transpose()?,
            critical_visibility_bg(net, d, caps)?,
        ),
        FamilyName::Triangle => {
            if !is_triangle(net) {
                return Err(CliError::Usage(
                    "the triangle family needs the triangle network".into(),
                ));
            }
            (
                triangle_ssw(d)?,
                with_certificates.then(|| triangle_certificates(net, d, caps)).transpose()?,
                critical_visibility_triangle(d),
            )
        }
        FamilyName::Fidelity => (
            fidelity_witness(net, d, caps)?,
            None,
            fidelity_witness_threshold(net, d, caps)?,
        ),
    };
    Ok(FamilyWitness {
        witness,
        certificates,
        critical_visibility,
    })
}

fn family_name(family: FamilyName) -> &'static str {
    match family {
        FamilyName::ESsw => "e-ssw",
        FamilyName::BgSsw => "bg-ssw",
        FamilyName::Triangle => "triangle",
        FamilyName::Fidelity => "fidelity",
    }
}

/// Common visibility of an isotropic product state.
fn uniform_visibility(state: &NetworkState) -> Option<f64> {
    let f = state.fidelities()?;
    let first = *f.first()?;
    f.iter()
        .all(|&x| x == first)
        .then(|| visibility_of_fidelity(state.local_dim(), first))
}

fn cmd_witness(args: WitnessArgs, argv: Vec<String>, caps: &Caps) -> CliResult<()> {
    let mut manifest = ManifestBuilder::new("witness", argv);
    let net = load_graph(&args.graph, &mut manifest)?;
    let state = load_state(&args.state, net.edge_count(), &mut manifest)?;
    let d = state.local_dim();
    let fw = family_witness(args.family, &net, d, caps, args.emit_witness)?;
    let expectation = fw.witness.expectation(&state)?;
    let mut result = json!({
        "family": family_name(args.family),
        "d": d,
        "edges": net.edge_count(),
        "expectation": expectation,
        "verdict": if expectation < -GME_TOL { "GME" } else { "not-detected" },
        "critical_visibility": fw.critical_visibility,
    });
    if args.family == FamilyName::ESsw && net.is_tree() {
        if let Some(p) = uniform_visibility(&state) {
            result["negativity"] = json!(tree_negativity(d, p, net.edge_count()));
        }
    }
    if args.emit_witness {
        let certificates = match fw.certificates {
            Some(c) => Some(c),
            None => certify_witness(&net, &fw.witness, caps)?,
        };
        result["witness"] = to_value(&fw.witness);
        result["certificates"] = to_value(&certificates);
    }
    emit(manifest, result)
}

fn write_mps(path: &str, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))
}

fn cmd_optimize(args: OptimizeArgs, argv: Vec<String>, caps: &Caps) -> CliResult<()> {
    let mut manifest = ManifestBuilder::new("optimize", argv);
    let net = load_graph(&args.graph, &mut manifest)?;
    let state = load_state(&args.state, net.edge_count(), &mut manifest)?;
    let d = state.local_dim();
    let mut result = if args.reduced {
        let dec = cactus_decomposition(&net)?;
        let program = build_reduced_lp(&dec, d, &state, caps)?;
        if let Some(path) = &args.dump_mps {
            write_mps(path, &program.lp.to_mps("REDUCED"))?;
        }
        let sol = program.solve()?;
        json!({
            "program": "reduced",
            "bound": sol.bound,
            "class_sizes": program.class_sizes(),
            "coefficients": sol.coefficients,
            "stats": sol.stats,
        })
    } else {
        let caps_ok = caps.enumeration_bits as usize >= net.edge_count();
        let p = if caps_ok { state.p_vector() } else { Vec::new() };
        let program: SswProgram = if args.feasibility {
            build_feasibility_lp(&net, d, &p, caps)?
        } else {
            build_negativity_lp(&net, d, &p, caps)?
        };
        if let Some(path) = &args.dump_mps {
            write_mps(path, &program.lp.to_mps("SSW"))?;
        }
        let sol = program.solve()?;
        json!({
            "program": sol.kind,
            "bound": sol.bound,
            "detected": sol.detected,
            "witness": sol.witness,
            "certificates": sol.certificates,
            "stats": sol.stats,
        })
    };
    if net.is_tree() && !args.feasibility {
        if let Some(p) = uniform_visibility(&state) {
            result["tree_negativity"] = json!(tree_negativity(d, p, net.edge_count()));
        }
    }
    emit(manifest, result)
}

#[derive(Deserialize)]
struct WitnessFile {
    d: Option<u32>,
    coeffs: Vec<f64>,
}

#[derive(Deserialize)]
struct CertificateFile {
    cut: EdgeSubset,
    q: WitnessFile,
}

/// Accepts a bare witness, `{"witness", "certificates"}`, or a full command
/// output with those fields under `result`.
fn parse_witness_file(
    text: &str,
    default_d: u32,
    edges: usize,
) -> CliResult<(Witness, Option<Vec<CutCertificate>>)> {
    let usage = |m: String| CliError::Usage(m);
    let mut root: Value = serde_json::from_str(text).map_err(|e| usage(format!("witness file: {e}")))?;
    if let Some(inner) = root.get_mut("result") {
        root = inner.take();
    }
    let (w_value, certs_value) = match root.get("witness") {
        Some(w) => (w.clone(), root.get("certificates").cloned()),
        None => (root.clone(), root.get("certificates").cloned()),
    };
    let wf: WitnessFile =
        serde_json::from_value(w_value).map_err(|e| usage(format!("witness file: {e}")))?;
    let d = wf.d.unwrap_or(default_d);
    let witness = Witness::new(d, wf.coeffs)?;
    let certificates = match certs_value {
        None | Some(Value::Null) => None,
        Some(v) => {
            let files: Vec<CertificateFile> =
                serde_json::from_value(v).map_err(|e| usage(format!("certificates: {e}")))?;
            let certs = files
                .into_iter()
                .map(|c| {
                    let cut = c
                        .cut
                        .with_universe(edges)
                        .ok_or_else(|| usage("certificate cut references a missing edge".into()))?;
                    Ok(CutCertificate {
                        cut,
                        q: Witness::new(c.q.d.unwrap_or(d), c.q.coeffs)?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            Some(certs)
        }
    };
    Ok((witness, certificates))
}

fn cmd_verify(args: VerifyArgs, argv: Vec<String>, caps: &Caps) -> CliResult<()> {
    let mut manifest = ManifestBuilder::new("verify", argv);
    let net = load_graph(&args.graph, &mut manifest)?;
    let (source, witness, certificates) = match (&args.witness, args.family) {
        (Some(path), _) => {
            let text = read_input(path, &mut manifest)?;
            let (w, c) = parse_witness_file(&text, args.d, net.edge_count())?;
            (path.clone(), w, c)
        }
        (None, Some(family)) => {
            let fw = family_witness(family, &net, args.d, caps, true)?;
            (family_name(family).to_string(), fw.witness, fw.certificates)
        }
        (None, None) => return Err(CliError::Usage("need --witness or --family".into())),
    };
    let (certificates, searched) = match certificates {
        Some(c) => (Some(c), false),
        None => (certify_witness(&net, &witness, caps)?, true),
    };
    let result = match &certificates {
        Some(certs) => {
            let report =
                verify_fully_decomposable(&witness, &net, certs, args.require_upper, caps)?;
            json!({
                "witness": source,
                "certificates_searched": searched,
                "passed": report.passed,
                "min_margin": report.min_margin,
                "require_upper": report.require_upper,
                "cuts": report.cuts,
            })
        }
        None => json!({
            "witness": source,
            "certificates_searched": searched,
            "passed": false,
            "reason": "no cut certificates satisfy the decomposition constraints",
        }),
    };
    let passed = result["passed"].as_bool().unwrap_or(false);
    emit(manifest, result)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn cmd_sample(args: SampleArgs, argv: Vec<String>) -> CliResult<()> {
    let mut manifest = ManifestBuilder::new("sample", argv);
    manifest.seed(args.seed);
    if !(0.0..=1.0).contains(&args.p) {
        return Err(CliError::Usage(format!("visibility {} outside [0, 1]", args.p)));
    }
    let rho = isotropic_edge(args.d, args.p);
    let (target, estimate) = match args.target {
        SampleTarget::Fidelity => ("fidelity", simulate_fidelity(args.d, &rho, args.shots, args.seed)?),
        SampleTarget::Witness => (
            "witness",
            simulate_witness_estimate(args.d, &vec![rho; args.edges], args.shots, args.seed)?,
        ),
    };
    let mut result = to_value(&estimate);
    result["target"] = json!(target);
    result["d"] = json!(args.d);
    result["p"] = json!(args.p);
    if args.target == SampleTarget::Witness {
        result["edges"] = json!(args.edges);
    }
    emit(manifest, result)
}

/// `a..b` (inclusive) or a comma-separated list.
pub fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Usage(format!("cannot parse vertex counts {text:?}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

fn parse_densities(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("cannot parse density {s:?}")))
        })
        .collect()
}

fn cmd_sweep(args: SweepArgs, argv: Vec<String>, caps: &Caps) -> CliResult<()> {
    let mut manifest = ManifestBuilder::new("experiment sweep", argv);
    manifest.seed(args.seed);
    let config = SweepConfig {
        n_values: parse_sizes(&args.n)?,
        densities: parse_densities(&args.density)?,
        d: args.d,
        samples: args.samples,
        seed: args.seed,
    };
    let out = sweep(&config, caps)?;
    let mut csv = Vec::new();
    write_sweep_csv(&config, &out.records, &mut csv)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)
                .map_err(|e| CliError::Io(format!("cannot write {path}: {e}")))?;
            emit(
                manifest,
                json!({
                    "csv": path,
                    "records": out.records.len(),
                    "skipped": out.skipped,
                }),
            )
        }
        None => {
            for cell in &out.skipped {
                eprintln!("skipped n = {}, D = {}: {}", cell.n, cell.density, cell.reason);
            }
            std::io::stdout()
                .lock()
                .write_all(&csv)
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn cmd_scan(args: ScanArgs, argv: Vec<String>, caps: &Caps) -> CliResult<()> {
    let manifest = ManifestBuilder::new("experiment scan", argv);
    let family = match args.family {
        ScanFamily::Complete => Family::Complete,
        ScanFamily::Path => Family::Path,
        ScanFamily::Circulant => Family::Circulant { c: args.c },
    };
    let sizes = parse_sizes(&args.n)?;
    let out = asymptotic_scan(family, args.d, &sizes, caps)?;
    emit(manifest, to_value(&out))
}
