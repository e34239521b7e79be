//! Compares full-corpus scan throughput between the data-parallel engine and
//! a sequential run of the same code path.
//!
//! With the default `parallel` feature the sequential baseline is obtained by
//! pinning rayon to a single worker thread; built with
//! `--no-default-features` only the serial fallback is measured.

use std::path::{Path, PathBuf};

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use swelint::config::ScanConfig;
use swelint::engine::{run_scan, Language, ScanInput};

fn corpus_inputs() -> Vec<ScanInput> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut inputs = Vec::new();
    for sub in ["solidity", "solidity/derived", "fixed", "chaincode"] {
        let mut files: Vec<PathBuf> = std::fs::read_dir(root.join(sub))
            .unwrap()
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().map_or(false, |e| e == "sol" || e == "go"))
            .collect();
        files.sort();
        for path in files {
            let language = if path.extension().map_or(false, |e| e == "go") {
                Language::GoChaincode
            } else {
                Language::Solidity
            };
            inputs.push(ScanInput {
                path: path.strip_prefix(&root).unwrap().to_string_lossy().into_owned(),
                source: std::fs::read_to_string(&path).unwrap(),
                language,
            });
        }
    }
    inputs
}

/// Repeat the corpus to the requested file count, renaming each copy so the
/// engine treats every input as a distinct file.
fn scaled_corpus(base: &[ScanInput], files: usize) -> Vec<ScanInput> {
    (0..files)
        .map(|i| {
            let template = &base[i % base.len()];
            ScanInput {
                path: format!("copy{:04}/{}", i / base.len(), template.path),
                source: template.source.clone(),
                language: template.language,
            }
        })
        .collect()
}

fn bench_scan(c: &mut Criterion) {
    let base = corpus_inputs();
    let config = ScanConfig::default();
    let mut group = c.benchmark_group("scan_corpus");
    for files in [base.len(), base.len() * 4] {
        let inputs = scaled_corpus(&base, files);
        group.throughput(Throughput::Elements(files as u64));

        #[cfg(feature = "parallel")]
        {
            group.bench_with_input(BenchmarkId::new("parallel", files), &inputs, |b, inputs| {
                b.iter(|| run_scan(inputs, &config))
            });
            let single = rayon::ThreadPoolBuilder::new()
                .num_threads(1)
                .build()
                .unwrap();
            group.bench_with_input(
                BenchmarkId::new("sequential", files),
                &inputs,
                |b, inputs| b.iter(|| single.install(|| run_scan(inputs, &config))),
            );
        }

        #[cfg(not(feature = "parallel"))]
        group.bench_with_input(
            BenchmarkId::new("serial_fallback", files),
            &inputs,
            |b, inputs| b.iter(|| run_scan(inputs, &config)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_scan);
criterion_main!(benches);
