//! Subcommand bodies.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use molcurate::analytics::dataset_summary;
use molcurate::descriptors::compute_descriptors;
use molcurate::diversity::{diverse_subset, ncircles, pair_distance_stats, DEFAULT_NCIRCLES_T, DEFAULT_SUBSET_T};
use molcurate::filters::{catalog_names, filter_profile, lookup, SUBSTRUCTURE_FILTERS};
use molcurate::fingerprint::{ecfp, Fingerprint, DEFAULT_RADIUS, DEFAULT_WIDTH};
use molcurate::molgraph::{parse_smiles, CanonicalKey, Molecule};
use molcurate::pipeline::{
    merge_files, read_rows, run_source, write_json, write_quarantine, write_records, MoleculeRecord, RecordReader,
    RunOptions, Stage, Status, CHUNK_ROWS,
};
use molcurate::tables::tables;

use crate::config::Config;
use crate::{Command, FpArgs, StageArgs};

const EXIT_OK: u8 = 0;
const EXIT_PARTIAL: u8 = 2;

pub fn version_text() -> String {
    let mut s = format!("molcurate {}\n", env!("CARGO_PKG_VERSION"));
    for t in tables() {
        s.push_str(&format!("{}\tversion {}\tsha256 {}\n", t.name, t.version.as_deref().unwrap_or("-"), t.sha256));
    }
    s
}

pub fn run(command: Command, cfg: &Config) -> Result<u8> {
    match command {
        Command::Ingest(a) => stage(a, Stage::Preprocessing, cfg),
        Command::Run(a) => stage(a, Stage::Filtering, cfg),
        Command::Merge { inputs, out, gain, by_size } => merge(inputs, &out, gain.as_deref(), by_size),
        Command::Subset { input, m, t, seed, out, report, fp } => {
            let Some(m) = cfg.optional(m, "m")? else {
                bail!("--m is required");
            };
            let t = cfg.resolve(t, "t", DEFAULT_SUBSET_T)?;
            subset(&input, m, t, seed, &out, report.as_deref(), fp_params(&fp, cfg)?)
        }
        Command::Ncircles { input, t, report, fp } => {
            let t = cfg.resolve(t, "t", DEFAULT_NCIRCLES_T)?;
            circles(&input, t, report.as_deref(), fp_params(&fp, cfg)?)
        }
        Command::Stats { a, b, pairs, seed, report, fp } => {
            let pairs = cfg.resolve(pairs, "pairs", 100_000usize)?;
            stats(&a, &b, pairs, seed, report.as_deref(), fp_params(&fp, cfg)?)
        }
        Command::Filters { input, filters, report, out } => filters_cmd(&input, filters, report.as_deref(), out.as_deref()),
        Command::Summary { input, report } => summary(&input, report.as_deref()),
    }
}

fn fp_params(fp: &FpArgs, cfg: &Config) -> Result<(u32, usize)> {
    let radius = cfg.resolve(fp.radius, "radius", DEFAULT_RADIUS)?;
    let width = cfg.resolve(fp.width, "width", DEFAULT_WIDTH)?;
    if !width.is_power_of_two() || width < 64 {
        bail!("--width must be a power of two of at least 64, got {width}");
    }
    Ok((radius, width))
}

fn quarantine_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".quarantine.tsv");
    PathBuf::from(s)
}

fn stage(a: StageArgs, until: Stage, cfg: &Config) -> Result<u8> {
    let chunk_rows = cfg.resolve(a.chunk_rows, "chunk_rows", CHUNK_ROWS)?;
    if chunk_rows == 0 {
        bail!("--chunk-rows must be positive");
    }
    let out = run_source(&a.input, RunOptions { until, chunk_rows })?;
    write_records(&a.out, &out.kept)?;
    if let Some(l) = &a.ledger {
        write_json(l, &out.ledger)?;
    }
    let q = a.quarantine.unwrap_or_else(|| quarantine_path(&a.out));
    write_quarantine(&q, &out.quarantine)?;
    for row in &out.ledger.sources {
        eprintln!(
            "{}\tinitial {}\tpreprocessing -{}\tstandardization -{}\tfiltering -{}\tfinal {}",
            row.source,
            row.initial,
            row.removed.preprocessing,
            row.removed.standardization,
            row.removed.filtering,
            row.final_count
        );
    }
    let failures = out.failures();
    if failures > 0 {
        eprintln!("{failures} records failed processing; see {}", q.display());
        return Ok(EXIT_PARTIAL);
    }
    Ok(EXIT_OK)
}

fn count_rows(path: &Path) -> Result<u64> {
    let mut n = 0;
    for row in RecordReader::open(path)? {
        let _ = row?;
        n += 1;
    }
    Ok(n)
}

fn merge(mut inputs: Vec<PathBuf>, out: &Path, gain: Option<&Path>, by_size: bool) -> Result<u8> {
    if by_size {
        let mut sized: Vec<(u64, usize, PathBuf)> = Vec::new();
        for (i, p) in inputs.into_iter().enumerate() {
            sized.push((count_rows(&p)?, i, p));
        }
        sized.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        inputs = sized.into_iter().map(|(_, _, p)| p).collect();
    }
    let paths: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let merged = merge_files(&paths)?;
    write_records(out, &merged.records)?;
    if let Some(g) = gain {
        write_json(g, &merged.gain)?;
    }
    for row in &merged.gain.sources {
        eprintln!("{}\tinput {}\tnew {}\tduplicates {}", row.source, row.input, row.new, row.duplicates);
    }
    Ok(EXIT_OK)
}

/// Records of a kept file with their parsed structures.
fn load_molecules(path: &Path) -> Result<(Vec<MoleculeRecord>, Vec<Molecule>)> {
    let rows = read_rows(path)?;
    let parsed: Vec<Result<(MoleculeRecord, Molecule)>> = rows
        .into_par_iter()
        .map(|r| {
            let r = r.map_err(|m| anyhow::anyhow!("{}:{}: malformed row {:?}", path.display(), m.line, m.text))?;
            let mol = parse_smiles(&r.smiles).map_err(|e| anyhow::anyhow!("{}:{}: {e}", path.display(), r.line))?;
            let rec = MoleculeRecord {
                key: Some(CanonicalKey::from_canonical_string(r.smiles.clone())),
                source: r.source,
                source_id: r.source_id,
                smiles: r.smiles,
                status: Status::Ok,
            };
            Ok((rec, mol))
        })
        .collect();
    let mut recs = Vec::with_capacity(parsed.len());
    let mut mols = Vec::with_capacity(parsed.len());
    for p in parsed {
        let (r, m) = p?;
        recs.push(r);
        mols.push(m);
    }
    Ok((recs, mols))
}

fn fingerprints(mols: &[Molecule], (radius, width): (u32, usize)) -> Vec<Fingerprint> {
    mols.par_iter().map(|m| ecfp(m, radius, width)).collect()
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        bail!("--t must be a non-negative number, got {t}");
    }
    Ok(())
}

fn subset(input: &Path, m: usize, t: f64, seed: u64, out: &Path, report: Option<&Path>, fp: (u32, usize)) -> Result<u8> {
    check_t(t)?;
    let (recs, mols) = load_molecules(input)?;
    let fps = fingerprints(&mols, fp);
    let s = diverse_subset(&fps, m, t, seed).with_context(|| format!("subset of {}", input.display()))?;
    write_records(out, s.indices.iter().map(|&i| &recs[i]))?;
    if let Some(r) = report {
        let centers: Vec<&str> = s.centers.iter().map(|&i| recs[i].source_id.as_str()).collect();
        write_json(
            r,
            &json!({
                "m": m, "t": t, "seed": seed, "radius": fp.0, "width": fp.1,
                "n": recs.len(), "centers": s.centers.len(), "per_cluster": s.per_cluster,
                "top_up": s.top_up, "center_ids": centers,
            }),
        )?;
    }
    eprintln!("{} records selected, {} centers", s.indices.len(), s.centers.len());
    Ok(EXIT_OK)
}

fn circles(input: &Path, t: f64, report: Option<&Path>, fp: (u32, usize)) -> Result<u8> {
    check_t(t)?;
    let (_, mols) = load_molecules(input)?;
    let nc = ncircles(&fingerprints(&mols, fp), t)?;
    let value = json!({
        "t": nc.t, "n": nc.n, "raw": nc.count, "normalized": nc.normalized,
        "greedy_raw": nc.greedy_count, "radius": fp.0, "width": fp.1,
    });
    if let Some(r) = report {
        write_json(r, &value)?;
    }
    println!("{value}");
    Ok(EXIT_OK)
}

fn stats(a: &Path, b: &Path, pairs: usize, seed: u64, report: Option<&Path>, fp: (u32, usize)) -> Result<u8> {
    if pairs == 0 {
        bail!("--pairs must be positive");
    }
    let (_, ma) = load_molecules(a)?;
    let (_, mb) = load_molecules(b)?;
    let s = pair_distance_stats(&fingerprints(&ma, fp), &fingerprints(&mb, fp), pairs, seed)?;
    if let Some(r) = report {
        write_json(r, &s)?;
    }
    println!("{}", serde_json::to_string(&s)?);
    Ok(EXIT_OK)
}

fn filters_cmd(input: &Path, mut names: Vec<String>, report: Option<&Path>, out: Option<&Path>) -> Result<u8> {
    if names.is_empty() {
        names = catalog_names().into_iter().filter(|n| !SUBSTRUCTURE_FILTERS.contains(n)).map(String::from).collect();
    }
    let specs = names.iter().map(|n| lookup(n)).collect::<Result<Vec<_>, _>>()?;
    let (recs, mols) = load_molecules(input)?;
    let sets: Vec<_> = mols.par_iter().map(compute_descriptors).collect();
    let spec_names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    let rates = filter_profile(&sets, &spec_names)?;
    if let Some(r) = report {
        write_json(r, &rates)?;
    }
    if let Some(o) = out {
        let mut w = std::io::BufWriter::new(std::fs::File::create(o).with_context(|| format!("creating {}", o.display()))?);
        writeln!(w, "source\tsource_id\t{}", spec_names.join("\t"))?;
        for (r, d) in recs.iter().zip(&sets) {
            let cells: Vec<&str> =
                specs.iter().map(|s| if molcurate::filters::evaluate(s, d, &[]).passed { "pass" } else { "fail" }).collect();
            writeln!(w, "{}\t{}\t{}", r.source, r.source_id, cells.join("\t"))?;
        }
        w.flush()?;
    }
    for r in &rates {
        println!("{}\t{}/{}\t{:.4}", r.filter, r.passed, r.total, r.fraction);
    }
    Ok(EXIT_OK)
}

fn summary(input: &Path, report: Option<&Path>) -> Result<u8> {
    let (_, mols) = load_molecules(input)?;
    let r = dataset_summary(&mols);
    if let Some(p) = report {
        write_json(p, &r)?;
    }
    println!(
        "molecules {}\tunique scaffolds {}\tsalts {}",
        r.molecules, r.unique_scaffolds, r.salts
    );
    Ok(EXIT_OK)
}
