//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use swelint::config::{parse_advisories, OutputFormat, ScanConfig};
use swelint::engine::{render, run_scan, Language, ScanInput, ScanReport};
use swelint::keccak::keccak256;
use swelint::registry::{self, Severity, Status, SweId};
use swelint::rules::solidity::selector;

/// Reference Keccak-256, written directly from the sponge definition with
/// round constants and rotation offsets derived programmatically. It shares
/// no code with the implementation under test.
mod oracle {
    fn rc_bit(t: usize) -> u64 {
        // LFSR over x^8 + x^6 + x^5 + x^4 + 1
        let mut r: u16 = 1;
        for _ in 0..(t % 255) {
            r <<= 1;
            if r & 0x100 != 0 {
                r ^= 0x171;
            }
        }
        (r & 1) as u64
    }

    fn round_constants() -> [u64; 24] {
        let mut rcs = [0u64; 24];
        for (ir, rc) in rcs.iter_mut().enumerate() {
            for j in 0..7 {
                *rc |= rc_bit(j + 7 * ir) << ((1usize << j) - 1);
            }
        }
        rcs
    }

    fn rotation_offsets() -> [[u32; 5]; 5] {
        let mut off = [[0u32; 5]; 5];
        let (mut x, mut y) = (1usize, 0usize);
        for t in 0..24u32 {
            off[x][y] = ((t + 1) * (t + 2) / 2) % 64;
            let next = (y, (2 * x + 3 * y) % 5);
            x = next.0;
            y = next.1;
        }
        off
    }

    fn keccak_f(a: &mut [[u64; 5]; 5]) {
        let rcs = round_constants();
        let off = rotation_offsets();
        for rc in rcs {
            // theta
            let mut c = [0u64; 5];
            for x in 0..5 {
                c[x] = a[x][0] ^ a[x][1] ^ a[x][2] ^ a[x][3] ^ a[x][4];
            }
            for x in 0..5 {
                let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
                for y in 0..5 {
                    a[x][y] ^= d;
                }
            }
            // rho + pi
            let mut b = [[0u64; 5]; 5];
            for x in 0..5 {
                for y in 0..5 {
                    b[y][(2 * x + 3 * y) % 5] = a[x][y].rotate_left(off[x][y]);
                }
            }
            // chi
            for x in 0..5 {
                for y in 0..5 {
                    a[x][y] = b[x][y] ^ (!b[(x + 1) % 5][y] & b[(x + 2) % 5][y]);
                }
            }
            // iota
            a[0][0] ^= rc;
        }
    }

    pub fn keccak256(data: &[u8]) -> [u8; 32] {
        const RATE: usize = 136;
        let mut padded = data.to_vec();
        padded.push(0x01);
        while padded.len() % RATE != 0 {
            padded.push(0x00);
        }
        let last = padded.len() - 1;
        padded[last] |= 0x80;

        let mut state = [[0u64; 5]; 5];
        for block in padded.chunks(RATE) {
            for (i, lane) in block.chunks(8).enumerate() {
                let (x, y) = (i % 5, i / 5);
                state[x][y] ^= u64::from_le_bytes(lane.try_into().unwrap());
            }
            keccak_f(&mut state);
        }
        let mut out = [0u8; 32];
        for i in 0..4 {
            let (x, y) = (i % 5, i / 5);
            out[i * 8..i * 8 + 8].copy_from_slice(&state[x][y].to_le_bytes());
        }
        out
    }
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

fn base_config() -> ScanConfig {
    let mut config = ScanConfig::default();
    let advisories = std::fs::read_to_string(corpus_dir().join("advisories.toml")).unwrap();
    config.advisories = parse_advisories(&advisories).unwrap();
    config
}

fn language_for(path: &Path) -> Language {
    match path.extension().and_then(|e| e.to_str()) {
        Some("go") => Language::GoChaincode,
        _ => Language::Solidity,
    }
}

fn input_for(path: &Path) -> ScanInput {
    ScanInput {
        path: path.file_name().unwrap().to_string_lossy().into_owned(),
        source: std::fs::read_to_string(path).unwrap(),
        language: language_for(path),
    }
}

fn scan_file(path: &Path) -> ScanReport {
    run_scan(&[input_for(path)], &base_config())
}

fn sol_files(subdir: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir().join(subdir))
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().map_or(false, |e| e == "sol" || e == "go"))
        .collect();
    files.sort();
    files
}

fn rule_ids(report: &ScanReport) -> BTreeSet<u32> {
    report.findings.iter().map(|f| f.rule_id.0).collect()
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

type CriterionResult = Result<(), String>;

fn criterion_1_registry() -> CriterionResult {
    let started = Instant::now();
    let reg = registry::load_bundled();
    let violations = registry::validate_registry(&reg);
    if !violations.is_empty() {
        return Err(format!("bundled registry is invalid: {violations:?}"));
    }
    let count = |status: Status| reg.entries.iter().filter(|e| e.status == status).count();
    if reg.entries.len() != 88 {
        return Err(format!("expected 88 entries, found {}", reg.entries.len()));
    }
    if count(Status::Active) != 72 {
        return Err(format!("expected 72 active entries, found {}", count(Status::Active)));
    }
    if count(Status::Reserved) != 5 {
        return Err(format!("expected 5 reserved entries, found {}", count(Status::Reserved)));
    }
    if count(Status::Eliminated) != 11 {
        return Err(format!(
            "expected 11 eliminated entries, found {}",
            count(Status::Eliminated)
        ));
    }
    for (alias, want) in [
        ("time manipulation", 116),
        ("TOD", 114),
        ("front-running", 114),
        ("recursive call attack", 107),
        ("call stack depth attack", 139),
    ] {
        let entry = registry::lookup_entry(&reg, alias)
            .map_err(|e| format!("alias {alias:?}: {e}"))?;
        if entry.id != SweId(want) {
            return Err(format!("alias {alias:?} resolved to {}, want SWE-{want}", entry.id));
        }
    }
    if registry::lookup_entry(&reg, "SWE-105").is_ok() {
        return Err("reserved id SWE-105 should not resolve to an entry".to_string());
    }
    if started.elapsed() > Duration::from_secs(1) {
        return Err(format!("registry checks took {:?} (budget 1s)", started.elapsed()));
    }
    Ok(())
}

fn golden_for(report: &ScanReport) -> String {
    let (bytes, _) = render(report, OutputFormat::Text, Severity::High);
    String::from_utf8(bytes).unwrap()
}

fn compare_golden(fixture: &Path, expected_rel: &Path) -> CriterionResult {
    let got = golden_for(&scan_file(fixture));
    let want_path = corpus_dir().join("expected").join(expected_rel);
    let want = std::fs::read_to_string(&want_path)
        .map_err(|e| format!("missing golden {}: {e}", want_path.display()))?;
    if got != want {
        return Err(format!(
            "{} diverges from its golden:\n--- expected\n{want}--- actual\n{got}",
            fixture.display()
        ));
    }
    Ok(())
}

fn criterion_2_solidity_corpus() -> CriterionResult {
    let started = Instant::now();
    for fixture in sol_files("solidity") {
        let rel = Path::new("solidity").join(fixture.file_stem().unwrap()).with_extension("txt");
        compare_golden(&fixture, &rel)?;
    }
    for fixture in sol_files("solidity/derived") {
        let rel = Path::new("solidity/derived")
            .join(fixture.file_stem().unwrap())
            .with_extension("txt");
        compare_golden(&fixture, &rel)?;
    }
    let fixed = sol_files("fixed");
    if fixed.len() != 50 {
        return Err(format!("expected 50 fixed variants, found {}", fixed.len()));
    }
    for fixture in fixed {
        let report = scan_file(&fixture);
        let highs: Vec<String> = report
            .findings
            .iter()
            .filter(|f| f.severity == Severity::High)
            .map(|f| format!("{} {}", f.rule_id, f.message))
            .collect();
        if !highs.is_empty() {
            return Err(format!(
                "{} raises high findings: {}",
                fixture.display(),
                highs.join("; ")
            ));
        }
    }
    if started.elapsed() > Duration::from_secs(5) {
        return Err(format!("corpus scan took {:?} (budget 5s)", started.elapsed()));
    }
    Ok(())
}

fn criterion_3_chaincode() -> CriterionResult {
    for (fixture, want) in [
        ("fig34.go", Some(166)),
        ("fig35.go", Some(167)),
        ("fig36.go", Some(173)),
        ("fig37.go", Some(175)),
        ("clean.go", None),
    ] {
        let path = corpus_dir().join("chaincode").join(fixture);
        let report = scan_file(&path);
        match want {
            Some(id) => {
                if !rule_ids(&report).contains(&id) {
                    return Err(format!("{fixture} should raise SWE-{id}, got {:?}", rule_ids(&report)));
                }
            }
            None => {
                if !report.findings.is_empty() {
                    return Err(format!(
                        "{fixture} should be clean, got {} findings",
                        report.findings.len()
                    ));
                }
            }
        }
        let rel = Path::new("chaincode").join(Path::new(fixture).file_stem().unwrap()).with_extension("txt");
        compare_golden(&path, &rel)?;
    }
    Ok(())
}

fn criterion_4_keccak() -> CriterionResult {
    let published = [
        ("", "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"),
        ("abc", "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"),
    ];
    for (input, want) in published {
        let got = hex(&keccak256(input.as_bytes()));
        if got != want {
            return Err(format!("keccak256({input:?}) = {got}, want {want}"));
        }
        let oracle_hex = hex(&oracle::keccak256(input.as_bytes()));
        if oracle_hex != want {
            return Err(format!("oracle disagrees with published vector for {input:?}"));
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5745_4c49_4e54);
    for round in 0..1000 {
        let len = rng.gen_range(0..300);
        let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let got = keccak256(&data);
        let want = oracle::keccak256(&data);
        if got != want {
            return Err(format!(
                "round {round}: keccak256 mismatch on {} bytes: {} vs oracle {}",
                data.len(),
                hex(&got),
                hex(&want)
            ));
        }
    }
    let entry = selector("transfer(address,uint256)").map_err(|e| e.to_string())?;
    if entry.selector_hex() != "a9059cbb" {
        return Err(format!(
            "selector of transfer(address,uint256) is {}, want a9059cbb",
            entry.selector_hex()
        ));
    }
    let clash = scan_file(&corpus_dir().join("solidity/derived/swe158.sol"));
    if !rule_ids(&clash).contains(&158) {
        return Err("selector collision fixture did not raise SWE-158".to_string());
    }
    Ok(())
}

fn criterion_5_determinism() -> CriterionResult {
    let mut paths: Vec<PathBuf> = Vec::new();
    for sub in ["solidity", "solidity/derived", "fixed", "chaincode", "suppression"] {
        paths.extend(sol_files(sub));
    }
    let config = base_config();
    // keep full relative paths distinct across subdirectories
    let inputs: Vec<ScanInput> = paths
        .iter()
        .map(|p| ScanInput {
            path: p.strip_prefix(corpus_dir()).unwrap().to_string_lossy().into_owned(),
            source: std::fs::read_to_string(p).unwrap(),
            language: language_for(p),
        })
        .collect();
    let (baseline, _) = render(&run_scan(&inputs, &config), OutputFormat::Json, Severity::High);
    let mut rng = StdRng::seed_from_u64(7);
    let mut shuffled = inputs;
    for i in (1..shuffled.len()).rev() {
        shuffled.swap(i, rng.gen_range(0..=i));
    }
    let (reordered, _) = render(&run_scan(&shuffled, &config), OutputFormat::Json, Severity::High);
    if baseline != reordered {
        return Err("shuffled corpus scan is not byte-identical".to_string());
    }
    Ok(())
}

fn criterion_6_version_gating() -> CriterionResult {
    let fig3 = std::fs::read_to_string(corpus_dir().join("solidity/fig03.sol")).unwrap();
    let scan_source = |source: String, name: &str| {
        run_scan(
            &[ScanInput {
                path: name.to_string(),
                source,
                language: Language::Solidity,
            }],
            &base_config(),
        )
    };
    let old = scan_source(fig3.clone(), "fig03_old.sol");
    if !rule_ids(&old).contains(&101) {
        return Err("fig03 under ^0.4.19 should raise SWE-101".to_string());
    }
    let modern = scan_source(
        fig3.replace("pragma solidity ^0.4.19;", "pragma solidity 0.8.0;"),
        "fig03_v8.sol",
    );
    if rule_ids(&modern).contains(&101) {
        return Err("fig03 under 0.8.0 should not raise SWE-101".to_string());
    }

    let fig4 = scan_file(&corpus_dir().join("solidity/fig04.sol"));
    let floating: Vec<u32> = fig4
        .findings
        .iter()
        .filter(|f| f.rule_id == SweId(103))
        .map(|f| f.span.line)
        .collect();
    if floating.len() != 14 || floating != (1..=14).collect::<Vec<u32>>() {
        return Err(format!("fig04 should raise SWE-103 on lines 1-14, got {floating:?}"));
    }
    let pinned = scan_source(
        "pragma solidity 0.8.0;\ncontract C { }\n".to_string(),
        "pinned.sol",
    );
    if rule_ids(&pinned).contains(&103) {
        return Err("a pinned pragma should not raise SWE-103".to_string());
    }
    Ok(())
}

fn criterion_7_precedence() -> CriterionResult {
    let fig33 = scan_file(&corpus_dir().join("solidity/fig33.sol"));
    let ids = rule_ids(&fig33);
    if !ids.contains(&113) || ids.contains(&157) {
        return Err(format!("fig33 loop should raise SWE-113 and not SWE-157, got {ids:?}"));
    }
    let fig17 = scan_file(&corpus_dir().join("solidity/fig17.sol"));
    let ids = rule_ids(&fig17);
    if !ids.contains(&126) || ids.contains(&104) {
        return Err(format!("fig17 should raise SWE-126 and not SWE-104, got {ids:?}"));
    }
    Ok(())
}

fn criterion_8_suppression() -> CriterionResult {
    let plain = scan_file(&corpus_dir().join("solidity/fig12.sol"));
    let suppressed_path = corpus_dir().join("suppression/fig12.sol");
    let suppressed = scan_file(&suppressed_path);
    if !rule_ids(&plain).contains(&116) {
        return Err("fig12 should raise SWE-116 without a suppression".to_string());
    }
    if rule_ids(&suppressed).contains(&116) {
        return Err("suppression comment did not remove the SWE-116 finding".to_string());
    }
    let others: Vec<u32> = suppressed
        .findings
        .iter()
        .map(|f| f.rule_id.0)
        .filter(|id| *id != 116)
        .collect();
    let plain_others: Vec<u32> = plain
        .findings
        .iter()
        .map(|f| f.rule_id.0)
        .filter(|id| *id != 116)
        .collect();
    if others != plain_others {
        return Err(format!(
            "suppression changed unrelated findings: {others:?} vs {plain_others:?}"
        ));
    }
    // rule_stats are counted before suppression
    if suppressed.rule_stats.get(&SweId(116)).copied().unwrap_or(0) != 1 {
        return Err("rule_stats should still count the suppressed SWE-116 finding".to_string());
    }
    let mut no_suppression = base_config();
    no_suppression.honor_suppressions = false;
    let forced = run_scan(&[input_for(&suppressed_path)], &no_suppression);
    if !rule_ids(&forced).contains(&116) {
        return Err("honor_suppressions=false should restore the SWE-116 finding".to_string());
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> CriterionResult); 8] = [
        ("criterion 1: registry integrity, census and alias resolution", criterion_1_registry),
        ("criterion 2: Solidity corpus goldens and fixed variants", criterion_2_solidity_corpus),
        ("criterion 3: chaincode corpus", criterion_3_chaincode),
        ("criterion 4: keccak oracle agreement and selector collision", criterion_4_keccak),
        ("criterion 5: shuffled corpus determinism", criterion_5_determinism),
        ("criterion 6: compiler version gating", criterion_6_version_gating),
        ("criterion 7: finding precedence", criterion_7_precedence),
        ("criterion 8: suppression comments", criterion_8_suppression),
    ];
    let mut failures = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(reason) => {
                println!("FAIL {name}: {reason}");
                failures.push(format!("{name}: {reason}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
