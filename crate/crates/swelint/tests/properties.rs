//! Property-based invariants over the tokenizer, parser, keccak front door,
//! registry keys, and the scan pipeline.

use proptest::prelude::*;

use swelint::config::ScanConfig;
use swelint::engine::{render, run_scan, Language, ScanInput};
use swelint::config::OutputFormat;
use swelint::keccak::keccak256;
use swelint::registry::{Severity, SweId};
use swelint::rules::solidity::selector;
use swelint::solidity::{parse_pragma, parse_source, tokenize, Version};

fn ident_strategy() -> impl Strategy<Value = String> {
    "[a-zA-Z_][a-zA-Z0-9_]{0,15}"
}

fn type_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("uint256".to_string()),
        Just("uint8".to_string()),
        Just("address".to_string()),
        Just("bool".to_string()),
        Just("bytes32".to_string()),
        Just("string".to_string()),
    ]
}

proptest! {
    #[test]
    fn tokenizer_never_panics(source in "\\PC{0,400}") {
        let _ = tokenize(&source);
    }

    #[test]
    fn parser_never_panics(source in "\\PC{0,400}") {
        let _ = parse_source(&source, "fuzz.sol");
    }

    #[test]
    fn keccak_is_deterministic_and_injective_on_prefixes(data in proptest::collection::vec(any::<u8>(), 0..200)) {
        let digest = keccak256(&data);
        prop_assert_eq!(digest, keccak256(&data));
        // appending the padding byte changes the message, so the digest moves
        let mut extended = data.clone();
        extended.push(0x01);
        prop_assert_ne!(digest, keccak256(&extended));
    }

    #[test]
    fn selector_matches_keccak_prefix(name in ident_strategy(), args in proptest::collection::vec(type_strategy(), 0..4)) {
        let signature = format!("{}({})", name, args.join(","));
        let entry = selector(&signature).unwrap();
        let digest = keccak256(signature.as_bytes());
        prop_assert_eq!(&entry.selector[..], &digest[..4]);
        prop_assert_eq!(entry.selector_hex().len(), 8);
    }

    #[test]
    fn swe_id_display_parse_round_trip(n in 100u32..=999) {
        let id = SweId(n);
        prop_assert_eq!(SweId::parse(&id.to_string()), Some(id));
    }

    #[test]
    fn caret_pragma_admits_patch_releases(minor in 0u32..12, patch in 0u32..30) {
        // Solidity compilers are all 0.x, where caret pins the minor version
        let (constraint, _) = parse_pragma(&format!("pragma solidity ^0.{minor}.{patch};"));
        prop_assert!(constraint.admits(Version::new(0, minor, patch)));
        prop_assert!(!constraint.admits(Version::new(0, minor + 1, 0)));
        if patch > 0 {
            prop_assert!(!constraint.admits(Version::new(0, minor, patch - 1)));
        }
    }

    #[test]
    fn pragma_intersection_is_symmetric(a_minor in 0u32..10, b_minor in 0u32..10) {
        let (a, _) = parse_pragma(&format!("pragma solidity ^0.{a_minor}.0;"));
        let (b, _) = parse_pragma(&format!("pragma solidity ^0.{b_minor}.0;"));
        prop_assert_eq!(a.intersects(&b), b.intersects(&a));
        prop_assert_eq!(a.intersects(&b), a_minor == b_minor);
    }

    #[test]
    fn scan_is_stable_and_text_render_is_one_line_per_finding(body in "\\PC{0,200}") {
        let source = format!("pragma solidity 0.8.0;\ncontract Fuzz {{\n{body}\n}}\n");
        let input = ScanInput {
            path: "fuzz.sol".to_string(),
            source,
            language: Language::Solidity,
        };
        let config = ScanConfig::default();
        let first = run_scan(std::slice::from_ref(&input), &config);
        let second = run_scan(std::slice::from_ref(&input), &config);
        let (text_a, code_a) = render(&first, OutputFormat::Text, Severity::High);
        let (text_b, code_b) = render(&second, OutputFormat::Text, Severity::High);
        prop_assert_eq!(&text_a, &text_b);
        prop_assert_eq!(code_a, code_b);
        let lines = String::from_utf8(text_a).unwrap().lines().count();
        prop_assert_eq!(lines, first.findings.len());
        // severities on findings never exceed the range of the threshold logic
        for f in &first.findings {
            prop_assert!(f.severity <= Severity::High);
        }
    }
}
