//! swelint command-line interface.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use swelint::config::{parse_advisories, LanguageFilter, OutputFormat, ScanConfig};
use swelint::engine::{render, run_scan, Language, ScanInput};
use swelint::registry::{
    self, Blockchain, Detectability, EntryFilter, Severity, SourceLanguage, Status, SweId,
};
use swelint::rules::solidity::selector;

const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "swelint",
    version,
    about = "Registry-driven static analysis for Solidity contracts and Fabric Go chaincode"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan source files or directories and report findings.
    Scan(ScanArgs),
    /// Query the SWE weakness registry.
    Registry(RegistryArgs),
    /// Print the 4-byte selector of a canonical function signature.
    Selector {
        /// Canonical signature, e.g. "transfer(address,uint256)".
        signature: String,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// Files or directories to scan (.sol and .go are recognized).
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Lowest severity that makes the scan exit nonzero.
    #[arg(long, value_name = "SEVERITY")]
    fail_on: Option<String>,
    /// Only run these rules (comma-separated SWE ids; repeatable).
    #[arg(long, value_name = "SWE-N[,..]")]
    enable: Vec<String>,
    /// Skip these rules (comma-separated SWE ids; repeatable).
    #[arg(long, value_name = "SWE-N[,..]")]
    disable: Vec<String>,
    /// Validate and use this registry file instead of the bundled one.
    #[arg(long, value_name = "PATH")]
    registry: Option<PathBuf>,
    /// Advisory database for SWE-153 (TOML).
    #[arg(long, value_name = "PATH")]
    advisories: Option<PathBuf>,
    /// Chaincode import allowlist override, one prefix per line.
    #[arg(long, value_name = "PATH")]
    allowlist: Option<PathBuf>,
    /// Report findings even when a suppression comment covers them.
    #[arg(long)]
    no_suppressions: bool,
    /// Language filter; auto routes by file extension.
    #[arg(long, value_enum)]
    lang: Option<LangArg>,
    /// Optional configuration file mirroring these flags (flags win).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RegistryArgs {
    #[command(subcommand)]
    command: RegistryCommand,
    /// Operate on this registry file instead of the bundled one.
    #[arg(long, value_name = "PATH", global = true)]
    registry: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RegistryCommand {
    /// Print a table of entries, optionally filtered.
    List {
        #[arg(long, value_enum)]
        status: Option<StatusArg>,
        #[arg(long, value_enum)]
        blockchain: Option<BlockchainArg>,
        #[arg(long, value_enum)]
        lang: Option<SourceLangArg>,
    },
    /// Print the full entry for an id, name, or alias.
    Show { key: String },
    /// Emit the registry file bytes verbatim.
    Export,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum LangArg {
    Sol,
    Go,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatusArg {
    Active,
    Eliminated,
    Reserved,
}

#[derive(Clone, Copy, ValueEnum)]
enum BlockchainArg {
    Ethereum,
    HyperledgerFabric,
    Eosio,
    VntChain,
    Generic,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceLangArg {
    Solidity,
    GoChaincode,
    CppEosio,
    Any,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Scan(args) => cmd_scan(args),
        Command::Registry(args) => cmd_registry(args),
        Command::Selector { signature } => cmd_selector(&signature),
    }
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

/// Optional configuration file; every field mirrors a flag.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    format: Option<String>,
    fail_on: Option<String>,
    #[serde(default)]
    enable: Vec<String>,
    #[serde(default)]
    disable: Vec<String>,
    lang: Option<String>,
    no_suppressions: Option<bool>,
    advisories: Option<PathBuf>,
    allowlist: Option<PathBuf>,
}

fn parse_id_list(values: &[String]) -> Result<BTreeSet<SweId>, String> {
    let mut out = BTreeSet::new();
    for value in values {
        for part in value.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            match SweId::parse(part) {
                Some(id) => {
                    out.insert(id);
                }
                None => return Err(format!("invalid rule id {part:?}")),
            }
        }
    }
    Ok(out)
}

fn build_config(args: &ScanArgs) -> Result<ScanConfig, String> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let mut config = ScanConfig::default();

    let format_text = match args.format {
        Some(FormatArg::Text) => Some("text".to_string()),
        Some(FormatArg::Json) => Some("json".to_string()),
        None => file.format.clone(),
    };
    if let Some(f) = format_text {
        config.format = f.parse::<OutputFormat>()?;
    }

    let fail_on = args.fail_on.clone().or(file.fail_on);
    if let Some(text) = fail_on {
        config.fail_on =
            Severity::parse(&text).ok_or_else(|| format!("invalid severity {text:?}"))?;
    }

    let lang_text = match args.lang {
        Some(LangArg::Sol) => Some("sol".to_string()),
        Some(LangArg::Go) => Some("go".to_string()),
        Some(LangArg::Auto) => Some("auto".to_string()),
        None => file.lang.clone(),
    };
    if let Some(l) = lang_text {
        config.language = l.parse::<LanguageFilter>()?;
    }

    config.enabled = if args.enable.is_empty() {
        parse_id_list(&file.enable)?
    } else {
        parse_id_list(&args.enable)?
    };
    config.disabled = if args.disable.is_empty() {
        parse_id_list(&file.disable)?
    } else {
        parse_id_list(&args.disable)?
    };

    config.honor_suppressions = if args.no_suppressions {
        false
    } else {
        !file.no_suppressions.unwrap_or(false)
    };

    if let Some(path) = args.advisories.as_ref().or(file.advisories.as_ref()) {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read advisories {}: {e}", path.display()))?;
        config.advisories =
            parse_advisories(&text).map_err(|e| format!("bad advisories {}: {e}", path.display()))?;
    }

    if let Some(path) = args.allowlist.as_ref().or(file.allowlist.as_ref()) {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read allowlist {}: {e}", path.display()))?;
        config.allowlist = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
    }

    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn language_of(path: &Path, filter: LanguageFilter) -> Option<Language> {
    let ext = path.extension()?.to_str()?;
    match (ext, filter) {
        ("sol", LanguageFilter::Auto | LanguageFilter::Solidity) => Some(Language::Solidity),
        ("go", LanguageFilter::Auto | LanguageFilter::GoChaincode) => Some(Language::GoChaincode),
        _ => None,
    }
}

fn discover(paths: &[PathBuf], filter: LanguageFilter) -> (Vec<(PathBuf, Language)>, Vec<String>) {
    let mut files = Vec::new();
    let mut problems = Vec::new();
    for path in paths {
        if path.is_dir() {
            for entry in walkdir::WalkDir::new(path).sort_by_file_name() {
                match entry {
                    Ok(entry) if entry.file_type().is_file() => {
                        if let Some(lang) = language_of(entry.path(), filter) {
                            files.push((entry.into_path(), lang));
                        }
                    }
                    Ok(_) => {}
                    Err(e) => problems.push(e.to_string()),
                }
            }
        } else if path.is_file() {
            match language_of(path, filter) {
                Some(lang) => files.push((path.clone(), lang)),
                None => problems.push(format!(
                    "{}: unrecognized extension for the selected language",
                    path.display()
                )),
            }
        } else {
            problems.push(format!("{}: no such file or directory", path.display()));
        }
    }
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files.dedup_by(|a, b| a.0 == b.0);
    (files, problems)
}

fn cmd_scan(args: ScanArgs) -> ExitCode {
    if let Some(path) = &args.registry {
        // an explicit registry must validate before any scanning happens
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return usage_error(format!("cannot read registry {}: {e}", path.display())),
        };
        if let Err(e) = registry::load_registry(&text) {
            return usage_error(e);
        }
    }
    let config = match build_config(&args) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    let (files, problems) = discover(&args.paths, config.language);
    for p in &problems {
        eprintln!("warning: {p}");
    }
    if files.is_empty() {
        return usage_error("no scannable files found (expected .sol or .go inputs)");
    }
    let mut inputs = Vec::new();
    for (path, language) in files {
        match std::fs::read_to_string(&path) {
            Ok(source) => inputs.push(ScanInput {
                path: path.display().to_string(),
                source,
                language,
            }),
            Err(e) => eprintln!("warning: {}: {e}", path.display()),
        }
    }
    if inputs.is_empty() {
        return usage_error("none of the matched files could be read");
    }
    let report = run_scan(&inputs, &config);
    let (bytes, code) = render(&report, config.format, config.fail_on);
    std::io::stdout().write_all(&bytes).ok();
    ExitCode::from(code as u8)
}

fn load_registry_arg(path: &Option<PathBuf>) -> Result<(registry::Registry, String), String> {
    match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read registry {}: {e}", path.display()))?;
            let reg = registry::load_registry(&text).map_err(|e| e.to_string())?;
            Ok((reg, text))
        }
        None => Ok((
            registry::load_bundled(),
            registry::BUNDLED_REGISTRY.to_string(),
        )),
    }
}

fn cmd_registry(args: RegistryArgs) -> ExitCode {
    let (reg, raw) = match load_registry_arg(&args.registry) {
        Ok(pair) => pair,
        Err(e) => return usage_error(e),
    };
    match args.command {
        RegistryCommand::List {
            status,
            blockchain,
            lang,
        } => {
            let filter = EntryFilter {
                status: status.map(|s| match s {
                    StatusArg::Active => Status::Active,
                    StatusArg::Eliminated => Status::Eliminated,
                    StatusArg::Reserved => Status::Reserved,
                }),
                blockchain: blockchain.map(|b| match b {
                    BlockchainArg::Ethereum => Blockchain::Ethereum,
                    BlockchainArg::HyperledgerFabric => Blockchain::HyperledgerFabric,
                    BlockchainArg::Eosio => Blockchain::Eosio,
                    BlockchainArg::VntChain => Blockchain::VntChain,
                    BlockchainArg::Generic => Blockchain::Generic,
                }),
                language: lang.map(|l| match l {
                    SourceLangArg::Solidity => SourceLanguage::Solidity,
                    SourceLangArg::GoChaincode => SourceLanguage::GoChaincode,
                    SourceLangArg::CppEosio => SourceLanguage::CppEosio,
                    SourceLangArg::Any => SourceLanguage::Any,
                }),
                detectability: None,
            };
            for entry in registry::list_entries(&reg, &filter) {
                let name = if entry.status == Status::Reserved {
                    "(reserved)"
                } else {
                    entry.name.as_str()
                };
                println!("{}\t{}", entry.id, name);
            }
            ExitCode::SUCCESS
        }
        RegistryCommand::Show { key } => match registry::lookup_entry(&reg, &key) {
            Ok(entry) => {
                print_entry(entry);
                ExitCode::SUCCESS
            }
            Err(e) => usage_error(e),
        },
        RegistryCommand::Export => {
            print!("{raw}");
            ExitCode::SUCCESS
        }
    }
}

fn print_entry(entry: &registry::RegistryEntry) {
    println!("id: {}", entry.id);
    println!("name: {}", entry.name);
    if !entry.aliases.is_empty() {
        println!("aliases: {}", entry.aliases.join(", "));
    }
    let fmt_set = |items: Vec<String>| items.join(", ");
    if !entry.blockchains.is_empty() {
        println!(
            "blockchains: {}",
            fmt_set(entry.blockchains.iter().map(|b| format!("{b:?}")).collect())
        );
    }
    if !entry.source_languages.is_empty() {
        println!(
            "source languages: {}",
            fmt_set(
                entry
                    .source_languages
                    .iter()
                    .map(|l| format!("{l:?}"))
                    .collect()
            )
        );
    }
    println!(
        "status: {}",
        match entry.status {
            Status::Active => "active",
            Status::Eliminated => "eliminated",
            Status::Reserved => "reserved",
        }
    );
    if let Some(d) = entry.detectability {
        println!(
            "detectability: {}",
            match d {
                Detectability::Automated => "automated",
                Detectability::Heuristic => "heuristic",
                Detectability::CrossRef => "cross-ref",
                Detectability::Manual => "manual",
                Detectability::PlatformOutOfScope => "platform-out-of-scope",
                Detectability::Deprecated => "deprecated",
            }
        );
    }
    if let Some(s) = entry.default_severity {
        println!("default severity: {s}");
    }
    if !entry.cross_refs.is_empty() {
        println!("cross refs: {}", entry.cross_refs.join(", "));
    }
    if !entry.cross_ref_target.is_empty() {
        let targets: Vec<String> = entry.cross_ref_target.iter().map(|t| t.to_string()).collect();
        println!("cross-ref targets: {}", targets.join(", "));
    }
    if !entry.description.is_empty() {
        println!("description: {}", entry.description);
    }
    if let Some(reason) = &entry.elimination_reason {
        println!("elimination reason: {reason}");
    }
}

fn cmd_selector(signature: &str) -> ExitCode {
    match selector(signature) {
        Ok(entry) => {
            println!("{}", entry.selector_hex());
            ExitCode::SUCCESS
        }
        Err(e) => usage_error(e),
    }
}
