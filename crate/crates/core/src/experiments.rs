//! Random-graph threshold sweeps and asymptotic scans.

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{cut_size_histogram, Network};
use crate::numeric::binomial;
use crate::witness::{
    critical_visibility_bg_from_histogram, critical_visibility_tree,
    fidelity_threshold_from_min_cut,
};

pub const MAX_REJECTIONS: u64 = 10_000_000;

/// Text written before the CSV header.
pub const ENSEMBLE_NOTE: &str = "# ensemble: uniform N-edge graphs on n labeled vertices, \
rejection-sampled until connected; p_ssw = B(G)-SSW critical visibility, \
p_fidelity = fidelity witness alpha*I - (x)Phi with alpha = d^-mincut";

/// Uniform random connected graph with `n` vertices and `edges` edges.
pub fn random_connected_graph(n: usize, edges: usize, seed: u64) -> Result<Network> {
    if !(2..=crate::graph::MAX_VERTICES).contains(&n) {
        return Err(Error::InvalidArgs(format!("vertex count {n} outside 2..=64")));
    }
    let pairs_total = n * (n - 1) / 2;
    if edges + 1 < n || edges > pairs_total {
        return Err(Error::InvalidArgs(format!(
            "a connected simple graph on {n} vertices has {} to {pairs_total} edges, got {edges}",
            n - 1
        )));
    }
    let all_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let mut chosen = sample(&mut rng, pairs_total, edges).into_vec();
        chosen.sort_unstable();
        let pairs: Vec<(usize, usize)> = chosen.iter().map(|&i| all_pairs[i]).collect();
        match Network::from_pairs(n, &pairs) {
            Ok(net) => return Ok(net),
            Err(Error::NotConnected) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::InvalidArgs(format!(
        "no connected graph after {MAX_REJECTIONS} draws for n = {n}, N = {edges}"
    )))
}

/// Short SHA-256 fingerprint of the vertex count and ordered edge list.
pub fn graph_hash(net: &Network) -> String {
    let mut h = Sha256::new();
    h.update(format!("{}", net.vertex_count()));
    for &(u, v) in net.edges() {
        h.update(format!(";{u}-{v}"));
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Per-sample seed derived from the master seed and the cell coordinates.
pub fn derive_seed(master: u64, n: usize, density_index: usize, sample_index: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((n as u64).to_le_bytes());
    h.update((density_index as u64).to_le_bytes());
    h.update((sample_index as u64).to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub densities: Vec<f64>,
    pub d: u32,
    pub samples: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub edges: usize,
    #[serde(rename = "D")]
    pub density: f64,
    pub d: u32,
    pub seed: u64,
    pub graph_hash: String,
    pub p_ssw: f64,
    pub p_fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkippedCell {
    pub n: usize,
    pub density: f64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutput {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<SkippedCell>,
}

/// Edge count for a target density, clamped to the connected range.
pub fn edges_for_density(n: usize, density: f64) -> usize {
    let total = n * (n - 1) / 2;
    ((density * total as f64).round() as usize).clamp(n - 1, total)
}

fn sample_record(n: usize, edges: usize, d: u32, seed: u64, caps: &Caps) -> Result<SweepRecord> {
    let net = random_connected_graph(n, edges, seed)?;
    let hist = cut_size_histogram(&net, caps)?;
    let min_cut = hist.iter().position(|&c| c > 0).expect("connected graphs have cuts");
    Ok(SweepRecord {
        n,
        edges,
        density: edges as f64 / binomial(n, 2),
        d,
        seed,
        graph_hash: graph_hash(&net),
        p_ssw: critical_visibility_bg_from_histogram(&hist, d),
        p_fidelity: fidelity_threshold_from_min_cut(d, edges, min_cut),
    })
}

/// One record per sampled graph, ordered by `(n, density, sample)`. Cells
/// whose graphs exceed the caps are skipped and listed.
pub fn sweep(config: &SweepConfig, caps: &Caps) -> Result<SweepOutput> {
    if config.d < 2 {
        return Err(Error::InvalidArgs(format!("local dimension {} < 2", config.d)));
    }
    if let Some(bad) = config.densities.iter().find(|x| !(**x > 0.0 && **x <= 1.0)) {
        return Err(Error::InvalidArgs(format!("density {bad} outside (0, 1]")));
    }
    if let Some(bad) = config.n_values.iter().find(|&&n| !(2..=crate::graph::MAX_VERTICES).contains(&n)) {
        return Err(Error::InvalidArgs(format!("vertex count {bad} outside 2..=64")));
    }
    let mut records = Vec::new();
    let mut skipped = Vec::new();
    for &n in &config.n_values {
        for (di, &density) in config.densities.iter().enumerate() {
            let edges = edges_for_density(n, density);
            let cell: Vec<Result<SweepRecord>> = (0..config.samples)
                .into_par_iter()
                .map(|s| sample_record(n, edges, config.d, derive_seed(config.seed, n, di, s), caps))
                .collect();
            match cell.into_iter().collect::<Result<Vec<_>>>() {
                Ok(rows) => records.extend(rows),
                Err(err @ Error::CapExceeded { .. }) => skipped.push(SkippedCell {
                    n,
                    density,
                    reason: err.to_string(),
                }),
                Err(err) => return Err(err),
            }
        }
    }
    Ok(SweepOutput { records, skipped })
}

/// CSV with columns `n,N,D,d,seed,graph_hash,p_ssw,p_fidelity`, preceded by
/// comment lines describing the ensemble and the configuration.
pub fn write_sweep_csv<W: Write>(
    config: &SweepConfig,
    records: &[SweepRecord],
    mut out: W,
) -> Result<()> {
    let io = |e: std::io::Error| Error::InvalidArgs(format!("write failed: {e}"));
    writeln!(out, "{ENSEMBLE_NOTE}").map_err(io)?;
    let list = |v: Vec<String>| v.join(",");
    writeln!(
        out,
        "# config: n={} densities={} d={} samples={} seed={}",
        list(config.n_values.iter().map(ToString::to_string).collect()),
        list(config.densities.iter().map(ToString::to_string).collect()),
        config.d,
        config.samples,
        config.seed
    )
    .map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)
            .map_err(|e| Error::InvalidArgs(format!("csv write failed: {e}")))?;
    }
    if records.is_empty() {
        w.write_record(["n", "N", "D", "d", "seed", "graph_hash", "p_ssw", "p_fidelity"])
            .map_err(|e| Error::InvalidArgs(format!("csv write failed: {e}")))?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Parse {
                line: i + 2,
                column: 1,
                message: e.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Complete,
    /// Each vertex joined to the `round(c (n-1)/2)` nearest vertices on each
    /// side of a ring, so a fraction of about `c` of the others.
    Circulant { c: f64 },
    Path,
}

impl Family {
    pub fn build(&self, n: usize) -> Result<Network> {
        match *self {
            Family::Complete => Ok(Network::complete(n)),
            Family::Path => Ok(Network::path(n - 1)),
            Family::Circulant { c } => {
                let reach = ((c * (n - 1) as f64 / 2.0).round() as usize).clamp(1, n / 2);
                Network::circulant(n, reach)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub n: usize,
    #[serde(rename = "N")]
    pub edges: usize,
    pub p_ssw: f64,
    /// `p_ssw - 1/(d+1)`.
    pub gap: f64,
    pub p_fidelity: f64,
    /// Exact tree threshold, for tree families.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_tree: Option<f64>,
    /// `N (1 - p_tree)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scaled_tree_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanOutput {
    pub family: Family,
    pub d: u32,
    pub records: Vec<ScanRecord>,
    pub p_ssw_strictly_decreasing: bool,
    pub p_fidelity_strictly_increasing: bool,
}

/// Thresholds along a graph family, from cut-size histograms only.
pub fn asymptotic_scan(family: Family, d: u32, sizes: &[usize], caps: &Caps) -> Result<ScanOutput> {
    let records = sizes
        .iter()
        .map(|&n| {
            let net = family.build(n)?;
            let hist = cut_size_histogram(&net, caps)?;
            let min_cut = hist.iter().position(|&c| c > 0).expect("connected graphs have cuts");
            let edges = net.edge_count();
            let p_ssw = critical_visibility_bg_from_histogram(&hist, d);
            let p_tree = net.is_tree().then(|| critical_visibility_tree(d, edges));
            Ok(ScanRecord {
                n,
                edges,
                p_ssw,
                gap: p_ssw - 1.0 / f64::from(d + 1),
                p_fidelity: fidelity_threshold_from_min_cut(d, edges, min_cut),
                p_tree,
                scaled_tree_gap: p_tree.map(|p| edges as f64 * (1.0 - p)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let dec = records.windows(2).all(|w| w[1].p_ssw < w[0].p_ssw);
    let inc = records.windows(2).all(|w| w[1].p_fidelity > w[0].p_fidelity);
    Ok(ScanOutput {
        family,
        d,
        records,
        p_ssw_strictly_decreasing: dec,
        p_fidelity_strictly_increasing: inc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_draw_needs_no_rejection() {
        let net = random_connected_graph(5, 10, 1).unwrap();
        assert_eq!(net.edges(), Network::complete(5).edges());
    }

    #[test]
    fn tree_draws_are_trees() {
        for seed in 0..20 {
            assert!(random_connected_graph(7, 6, seed).unwrap().is_tree());
        }
    }

    #[test]
    fn argument_checks() {
        assert!(random_connected_graph(5, 3, 0).is_err());
        assert!(random_connected_graph(5, 11, 0).is_err());
        assert!(random_connected_graph(1, 0, 0).is_err());
    }

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(1, 5, 0, 0), derive_seed(1, 5, 0, 0));
        assert_ne!(derive_seed(1, 5, 0, 0), derive_seed(1, 5, 0, 1));
        assert_ne!(derive_seed(1, 5, 0, 0), derive_seed(2, 5, 0, 0));
    }

    #[test]
    fn csv_round_trip() {
        let config = SweepConfig {
            n_values: vec![4, 5],
            densities: vec![0.5, 1.0],
            d: 2,
            samples: 3,
            seed: 11,
        };
        let out = sweep(&config, &Caps::default()).unwrap();
        assert_eq!(out.records.len(), 12);
        let mut buf = Vec::new();
        write_sweep_csv(&config, &out.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# ensemble"));
        assert!(text.lines().nth(2).unwrap() == "n,N,D,d,seed,graph_hash,p_ssw,p_fidelity");
        assert_eq!(read_sweep_csv(&text).unwrap(), out.records);
    }

    #[test]
    fn circulant_family_degrees() {
        let net = Family::Circulant { c: 0.25 }.build(9).unwrap();
        assert!((0..9).all(|v| net.degree(v) == 2));
        let net = Family::Circulant { c: 1.0 }.build(9).unwrap();
        assert_eq!(net.edge_count(), 36);
    }
}
