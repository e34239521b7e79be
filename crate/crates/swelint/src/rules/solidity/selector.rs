//! 4-byte function selector computation and selector-clash search over a
//! set of canonical signatures.

use crate::keccak::keccak256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorEntry {
    pub signature: String,
    pub selector: [u8; 4],
}

impl SelectorEntry {
    pub fn selector_hex(&self) -> String {
        self.selector.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Compute the selector of a canonical signature like
/// `transfer(address,uint256)`. Rejects malformed signatures: the name must
/// be a valid identifier, the parameter list parenthesized and free of
/// whitespace, and parentheses balanced.
pub fn selector(signature: &str) -> Result<SelectorEntry, String> {
    validate_signature(signature)?;
    let hash = keccak256(signature.as_bytes());
    Ok(SelectorEntry {
        signature: signature.to_string(),
        selector: [hash[0], hash[1], hash[2], hash[3]],
    })
}

fn validate_signature(signature: &str) -> Result<(), String> {
    let Some(open) = signature.find('(') else {
        return Err(format!("{signature:?}: missing parameter list"));
    };
    let name = &signature[..open];
    if name.is_empty() {
        return Err(format!("{signature:?}: empty function name"));
    }
    let mut chars = name.chars();
    let first = chars.next().unwrap();
    if !(first.is_ascii_alphabetic() || first == '_' || first == '$') {
        return Err(format!("{signature:?}: invalid function name {name:?}"));
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$') {
        return Err(format!("{signature:?}: invalid function name {name:?}"));
    }
    if !signature.ends_with(')') {
        return Err(format!("{signature:?}: parameter list must end with ')'"));
    }
    if signature.contains(char::is_whitespace) {
        return Err(format!(
            "{signature:?}: canonical signatures contain no whitespace"
        ));
    }
    let mut depth = 0i32;
    for c in signature[open..].chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(format!("{signature:?}: unbalanced parentheses"));
                }
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(format!("{signature:?}: unbalanced parentheses"));
    }
    Ok(())
}

/// All pairs of distinct signatures that share a selector. Pairs come back
/// sorted by (selector, first signature, second signature).
pub fn find_selector_clashes(signatures: &[String]) -> Vec<(SelectorEntry, SelectorEntry)> {
    let mut entries: Vec<SelectorEntry> = Vec::new();
    for sig in signatures {
        if let Ok(entry) = selector(sig) {
            if !entries.iter().any(|e| e.signature == entry.signature) {
                entries.push(entry);
            }
        }
    }
    entries.sort_by(|a, b| (a.selector, &a.signature).cmp(&(b.selector, &b.signature)));
    let mut clashes = Vec::new();
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if entries[i].selector != entries[j].selector {
                break;
            }
            clashes.push((entries[i].clone(), entries[j].clone()));
        }
    }
    clashes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_selectors() {
        assert_eq!(
            selector("transfer(address,uint256)").unwrap().selector_hex(),
            "a9059cbb"
        );
        assert_eq!(selector("createUser()").unwrap().selector_hex(), "25ad91ce");
    }

    #[test]
    fn known_collision_pair() {
        let a = selector("burn(uint256)").unwrap();
        let b = selector("collate_propagate_storage(bytes16)").unwrap();
        assert_eq!(a.selector, b.selector);
        assert_eq!(a.selector_hex(), "42966c68");
    }

    #[test]
    fn rejects_malformed() {
        assert!(selector("").is_err());
        assert!(selector("noparens").is_err());
        assert!(selector("(uint256)").is_err());
        assert!(selector("f(uint256").is_err());
        assert!(selector("f (uint256)").is_err());
        assert!(selector("9f(uint256)").is_err());
    }

    #[test]
    fn clash_search() {
        let sigs: Vec<String> = [
            "burn(uint256)",
            "collate_propagate_storage(bytes16)",
            "transfer(address,uint256)",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let clashes = find_selector_clashes(&sigs);
        assert_eq!(clashes.len(), 1);
        assert_eq!(clashes[0].0.signature, "burn(uint256)");
        assert_eq!(
            clashes[0].1.signature,
            "collate_propagate_storage(bytes16)"
        );
    }
}
