//! `srctool` command-line frontend.
//!
//! Exit codes: 0 success, 1 other failure, 2 usage or invalid parameters,
//! 3 not enough data to proceed, 4 integrity failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codec::{encode, reconstruct};
use crate::error::{Error, Result};
use crate::format::{decode_shard, encode_shard, sha256_hex, shard_file_name, Manifest, ShardEntry};
use crate::layout::SrcParams;
use crate::metrics::{asymptotic_report, comparison_table, render_asymptotic_csv, render_csv, render_table, DegreeRule};
use crate::reliability::{self, ReliabilityConfig, HOURS_PER_YEAR};
use crate::repair::{node_repair_plan, repair_node};
use crate::scheme::Scheme;
use crate::sim::{self, ClusterConfig, ReadWorkload};
use crate::store::ShardStore;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INSUFFICIENT: i32 = 3;
pub const EXIT_INTEGRITY: i32 = 4;

/// Parameter sweep used by `simulate --sweep` and `reliability`.
pub const SWEEP: [(usize, usize); 3] = [(10, 6), (20, 16), (50, 46)];

#[derive(Parser, Debug)]
#[command(name = "srctool", version, about = "Encode, repair and decode files with simple regenerating codes, and simulate their repair behaviour")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Split a file into n shard files plus a manifest.
    Encode(EncodeArgs),
    /// Rebuild one node's shard from the others.
    Repair(RepairArgs),
    /// Recover the original file from any k shards.
    Decode(DecodeArgs),
    /// Run the cluster repair simulator.
    Simulate(SimulateArgs),
    /// Print storage and repair metrics.
    Metrics(MetricsArgs),
    /// Print Markov-model MTTF estimates.
    Reliability(ReliabilityArgs),
}

#[derive(Args, Debug)]
struct EncodeArgs {
    input: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    f: usize,
    #[arg(long, default_value_t = 64 * 1024)]
    chunk_size: usize,
    /// Output directory for shards and manifest.toml.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RepairArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Shard directory; defaults to the manifest's directory.
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Node to rebuild, 1-based.
    #[arg(long)]
    node: usize,
    /// Print the repair plan and write nothing.
    #[arg(long)]
    dry_run: bool,
    /// Where to write the rebuilt shard; defaults to its manifest path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Comma-separated nodes to decode from; defaults to every shard present.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeKind {
    Replication,
    Rs,
    Src,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Repair,
    Degraded,
    Both,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// TOML cluster config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    f: usize,
    #[arg(long, default_value_t = 3)]
    copies: usize,
    #[arg(long)]
    machines: Option<usize>,
    #[arg(long)]
    data_per_machine: Option<u64>,
    #[arg(long)]
    chunk_size: Option<u64>,
    #[arg(long)]
    network_bps: Option<f64>,
    #[arg(long)]
    disk_bytes_per_sec: Option<f64>,
    #[arg(long)]
    parallelism: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Machine to fail; defaults to a seeded random choice.
    #[arg(long)]
    failed: Option<usize>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Compare replication, SRC and RS over (10,6), (20,16) and (50,46).
    #[arg(long)]
    sweep: bool,
    /// Directory for report.toml, cdf.csv and sweep.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RuleArg {
    Log2,
    CeilLog2,
    Ln,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    f: usize,
    #[arg(long)]
    csv: bool,
    /// Also print SRC/MSR bandwidth and rate as k grows at rate k/n.
    #[arg(long)]
    asymptotic: bool,
    #[arg(long, value_enum, default_value_t = RuleArg::Log2)]
    rule: RuleArg,
    /// Largest k is 2^max_exp.
    #[arg(long, default_value_t = 20)]
    max_exp: u32,
}

#[derive(Args, Debug)]
struct ReliabilityArgs {
    #[arg(long)]
    csv: bool,
    #[arg(long, default_value_t = 2)]
    f: usize,
    #[arg(long, default_value_t = 5.0)]
    disk_mttf_years: f64,
    #[arg(long, default_value_t = 1e15)]
    system_bytes: f64,
    #[arg(long, default_value_t = (64u64 << 20) as f64)]
    chunk_size: f64,
    #[arg(long, default_value_t = 0.25)]
    repair_hours_replication: f64,
    #[arg(long, default_value_t = 0.5)]
    repair_hours_src: f64,
    /// RS repair time at k = 6; scaled linearly in k.
    #[arg(long, default_value_t = 0.5)]
    repair_hours_rs_k6: f64,
    /// Measured repair time overriding a default, e.g. `rs:10,6=0.8`.
    #[arg(long = "measured", value_parser = parse_measured)]
    measured: Vec<(Scheme, f64)>,
}

fn parse_measured(s: &str) -> std::result::Result<(Scheme, f64), String> {
    let (scheme, hours) = s.split_once('=').ok_or_else(|| format!("expected <scheme>=<hours>, got {s:?}"))?;
    let scheme: Scheme = scheme.parse().map_err(|e: Error| e.to_string())?;
    let hours: f64 = hours.parse().map_err(|_| format!("bad hours {hours:?}"))?;
    if !(hours > 0.0) {
        return Err("repair hours must be positive".into());
    }
    Ok((scheme, hours))
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParams(_) | Error::Placement(_) => EXIT_USAGE,
        Error::InsufficientData(_) | Error::RepairFailed { .. } => EXIT_INSUFFICIENT,
        Error::Integrity(_) => EXIT_INTEGRITY,
        _ => EXIT_OTHER,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Encode(a) => cmd_encode(&a),
        Command::Repair(a) => cmd_repair(&a),
        Command::Decode(a) => cmd_decode(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Metrics(a) => cmd_metrics(&a),
        Command::Reliability(a) => cmd_reliability(&a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn cmd_encode(a: &EncodeArgs) -> Result<String> {
    let params = SrcParams::new(a.n, a.k, a.f, a.chunk_size)?;
    let file = fs::read(&a.input)?;
    let coded = encode(&file, &params);
    fs::create_dir_all(&a.out)?;
    let mut manifest = Manifest::new(params, coded.file_size(), coded.stripe_count(), sha256_hex(&file));
    let mut out = String::new();
    for (node, shard) in coded.shards() {
        let bytes = encode_shard(&manifest.header_for(node), shard)?;
        let name = shard_file_name(node);
        fs::write(a.out.join(&name), &bytes)?;
        let _ = writeln!(out, "wrote {name} ({} bytes)", bytes.len());
        manifest.shards.push(ShardEntry {
            node,
            file: name,
            digest: sha256_hex(&bytes),
        });
    }
    fs::write(a.out.join("manifest.toml"), manifest.to_toml())?;
    let _ = writeln!(
        out,
        "encoded {} bytes as {params}-SRC: {} stripes, {} bytes stored",
        coded.file_size(),
        coded.stripe_count(),
        coded.total_stored_bytes()
    );
    Ok(out)
}

fn shard_dir(manifest: &Path, dir: &Option<PathBuf>) -> PathBuf {
    match dir {
        Some(d) => d.clone(),
        None => manifest.parent().map(Path::to_path_buf).unwrap_or_default(),
    }
}

/// Shards found on disk, each checked against the manifest. Missing files are
/// skipped; present but damaged ones are an integrity error.
fn load_shards(manifest: &Manifest, dir: &Path, nodes: &[usize]) -> Result<Vec<(usize, Vec<u8>)>> {
    let mut found = Vec::new();
    for &node in nodes {
        let entry = manifest
            .entry(node)
            .ok_or_else(|| Error::params(format!("node {node} is not in the manifest")))?;
        let path = dir.join(&entry.file);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
            Err(e) => return Err(e.into()),
        };
        if sha256_hex(&bytes) != entry.digest {
            return Err(Error::Integrity(format!("{} does not match its manifest digest", path.display())));
        }
        let (header, data) = decode_shard(&bytes)?;
        if header != manifest.header_for(node) {
            return Err(Error::Integrity(format!("{} header disagrees with the manifest", path.display())));
        }
        found.push((node, data));
    }
    Ok(found)
}

fn cmd_repair(a: &RepairArgs) -> Result<String> {
    let manifest = Manifest::load(&a.manifest)?;
    let params = manifest.params;
    let plan = node_repair_plan(&params, a.node)?;
    let mut out = String::new();
    if a.dry_run {
        out.push_str(&plan.report(manifest.stripe_count));
        return Ok(out);
    }
    let dir = shard_dir(&a.manifest, &a.dir);
    let others: Vec<usize> = (1..=params.n()).filter(|&x| x != a.node).collect();
    let shards = load_shards(&manifest, &dir, &others)?;
    let mut store: ShardStore<Vec<u8>> = ShardStore::new(params, manifest.stripe_count);
    let mut present = Vec::new();
    for (node, data) in shards {
        present.push(node);
        store.insert(node, data);
    }
    let missing: Vec<String> = others
        .iter()
        .filter(|n| !present.contains(n))
        .map(|&n| format!("node {n} ({})", manifest.entry(n).expect("listed").file))
        .collect();
    if present.len() < params.k() {
        return Err(Error::InsufficientData(format!(
            "cannot rebuild node {}: missing helper shards {}; {} of the required {} remain",
            a.node,
            missing.join(", "),
            present.len(),
            params.k()
        )));
    }
    let rebuilt = repair_node(&store, a.node)?;
    let bytes = encode_shard(&manifest.header_for(a.node), &rebuilt.shard)?;
    let entry = manifest.entry(a.node).expect("validated manifest lists every node");
    if sha256_hex(&bytes) != entry.digest {
        return Err(Error::Integrity(format!("rebuilt shard for node {} does not match the manifest digest", a.node)));
    }
    let target = a.out.clone().unwrap_or_else(|| dir.join(&entry.file));
    fs::write(&target, &bytes)?;
    let _ = writeln!(out, "rebuilt node {} -> {}", a.node, target.display());
    let _ = writeln!(out, "method = {}", if rebuilt.fallback_used { "fallback (decode from k nodes)" } else { "look-up (xor)" });
    if !missing.is_empty() {
        let _ = writeln!(out, "missing = {}", missing.join(", "));
    }
    let _ = writeln!(out, "chunk_reads = {}", rebuilt.stats.chunk_reads);
    let _ = writeln!(out, "bytes_read = {}", rebuilt.stats.bytes_read);
    let disks: Vec<String> = rebuilt.stats.disks.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "disks = {} [{}]", disks.len(), disks.join(", "));
    let _ = writeln!(out, "digest = ok");
    Ok(out)
}

fn cmd_decode(a: &DecodeArgs) -> Result<String> {
    let manifest = Manifest::load(&a.manifest)?;
    let params = manifest.params;
    let dir = shard_dir(&a.manifest, &a.dir);
    let wanted: Vec<usize> = match &a.nodes {
        Some(list) => list.clone(),
        None => (1..=params.n()).collect(),
    };
    let shards = load_shards(&manifest, &dir, &wanted)?;
    if let Some(list) = &a.nodes {
        if let Some(gone) = list.iter().find(|n| !shards.iter().any(|(m, _)| m == *n)) {
            return Err(Error::InsufficientData(format!("shard for node {gone} is missing")));
        }
    }
    let views: Vec<(usize, &[u8])> = shards.iter().map(|(n, d)| (*n, d.as_slice())).collect();
    let file = reconstruct(&params, manifest.file_size, &views)?;
    if sha256_hex(&file) != manifest.file_digest {
        return Err(Error::Integrity("decoded file does not match the manifest digest".into()));
    }
    fs::write(&a.out, &file)?;
    let used: Vec<String> = views.iter().map(|(n, _)| n.to_string()).take(params.k()).collect();
    Ok(format!(
        "decoded {} bytes from nodes [{}] -> {}\ndigest = ok\n",
        file.len(),
        used.join(", "),
        a.out.display()
    ))
}

fn cluster_config(a: &SimulateArgs) -> Result<ClusterConfig> {
    let mut cfg = match &a.config {
        Some(path) => toml::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Format {
            what: "simulator config",
            reason: e.to_string(),
        })?,
        None => ClusterConfig::default(),
    };
    if let Some(kind) = a.scheme {
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| Error::params(format!("--scheme needs --{name}")));
        cfg.scheme = match kind {
            SchemeKind::Replication => Scheme::Replication { copies: a.copies },
            SchemeKind::Rs => Scheme::ReedSolomon {
                n: need(a.n, "n")?,
                k: need(a.k, "k")?,
            },
            SchemeKind::Src => Scheme::Src {
                n: need(a.n, "n")?,
                k: need(a.k, "k")?,
                f: a.f,
            },
        };
    }
    macro_rules! set {
        ($field:ident, $value:expr) => {
            if let Some(v) = $value {
                cfg.$field = v;
            }
        };
    }
    set!(machines, a.machines);
    set!(data_per_machine, a.data_per_machine);
    set!(chunk_size, a.chunk_size);
    set!(network_bps, a.network_bps);
    set!(disk_bytes_per_sec, a.disk_bytes_per_sec);
    set!(repair_parallelism, a.parallelism);
    set!(seed, a.seed);
    cfg.validate()?;
    Ok(cfg)
}

fn summary(out: &mut String, r: &sim::SimReport) {
    let _ = writeln!(
        out,
        "{:<22} {:<13} jobs {:>5}  elapsed {:>9.3} s  throughput {:>9.1} MB/s  read {} B",
        r.scheme.to_string(),
        format!("{:?}", r.mode),
        r.jobs,
        r.elapsed_seconds,
        r.throughput_mb_per_sec(),
        r.bytes_read
    );
}

fn cmd_simulate(a: &SimulateArgs) -> Result<String> {
    let cfg = cluster_config(a)?;
    let failed = a.failed.unwrap_or_else(|| sim::random_failed_machine(&cfg));
    let mut out = String::new();
    let _ = writeln!(out, "# seed = {}, failed machine = {failed}", cfg.seed);

    if a.sweep {
        let mut schemes = vec![Scheme::replication3()];
        for (n, k) in SWEEP {
            schemes.push(Scheme::Src { n, k, f: a.f });
            schemes.push(Scheme::ReedSolomon { n, k });
        }
        let rows = sim::sweep(&cfg, &schemes, failed)?;
        let csv = sim::render_sweep_csv(&rows);
        if let Some(dir) = &a.out {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("sweep.csv"), &csv)?;
        }
        out.push_str(&csv);
        return Ok(out);
    }

    let cluster = sim::build_cluster(&cfg)?;
    let mut reports = Vec::new();
    if a.mode != ModeArg::Degraded {
        reports.push(("repair", sim::run_node_failure(&cluster, failed)?));
    }
    if a.mode != ModeArg::Repair {
        reports.push(("degraded_read", sim::run_degraded_read(&cluster, failed, ReadWorkload::AllLost)?));
    }
    for (_, r) in &reports {
        summary(&mut out, r);
    }
    let mut doc = toml::Table::new();
    doc.insert(
        "config".into(),
        toml::Value::try_from(&cfg).expect("config serializes"),
    );
    for (name, r) in &reports {
        doc.insert((*name).into(), toml::Value::try_from(r).expect("report serializes"));
    }
    let text = toml::to_string(&doc).expect("report serializes");
    match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("report.toml"), &text)?;
            let cdf = sim::repair_time_cdf(&reports[0].1);
            fs::write(dir.join("cdf.csv"), sim::render_cdf_csv(&cdf))?;
            let _ = writeln!(out, "wrote {}", dir.display());
        }
        None => out.push_str(&text),
    }
    Ok(out)
}

fn cmd_metrics(a: &MetricsArgs) -> Result<String> {
    SrcParams::new(a.n, a.k, a.f, 1)?;
    let rows = comparison_table(a.n, a.k, a.f);
    let mut out = if a.csv { render_csv(&rows) } else { render_table(&rows) };
    if a.asymptotic {
        let rule = match a.rule {
            RuleArg::Log2 => DegreeRule::Log2,
            RuleArg::CeilLog2 => DegreeRule::CeilLog2,
            RuleArg::Ln => DegreeRule::Ln,
        };
        let ks: Vec<f64> = (1..=a.max_exp).map(|e| 2f64.powi(e as i32)).collect();
        out.push('\n');
        out.push_str(&render_asymptotic_csv(&asymptotic_report(&ks, a.k as f64 / a.n as f64, rule), rule));
    }
    Ok(out)
}

fn cmd_reliability(a: &ReliabilityArgs) -> Result<String> {
    if !(a.disk_mttf_years > 0.0 && a.system_bytes > 0.0 && a.chunk_size > 0.0) {
        return Err(Error::params("disk MTTF, system size and chunk size must be positive"));
    }
    let config = ReliabilityConfig {
        disk_mttf_hours: a.disk_mttf_years * HOURS_PER_YEAR,
        system_bytes: a.system_bytes,
        chunk_size: a.chunk_size,
        replication_repair_hours: a.repair_hours_replication,
        src_repair_hours: a.repair_hours_src,
        rs_reference_hours: a.repair_hours_rs_k6,
        rs_reference_k: 6,
        measured_repair_hours: a.measured.clone(),
    };
    let mut schemes = vec![Scheme::replication3()];
    for (n, k) in SWEEP {
        let src = Scheme::Src { n, k, f: a.f };
        src.validate()?;
        schemes.push(src);
        schemes.push(Scheme::ReedSolomon { n, k });
    }
    let rows = reliability::mttf_table(&config, &schemes);
    Ok(if a.csv { reliability::render_csv(&rows) } else { reliability::render_table(&rows) })
}
