//! Hyperledger Fabric Go chaincode analysis: a line-oriented parser that is
//! robust to listing fragments, plus the 14 chaincode detectors.

use crate::config::{import_allowed, ScanConfig};
use crate::engine::{Applicability, Confidence, DetectorRule, Emitter, Language};
use crate::registry::{Severity, SweId};
use crate::solidity::token::Span;

/// One function (or fragment) region, by line numbers (1-based, inclusive).
#[derive(Debug, Clone)]
pub struct FuncRegion {
    pub name: String,
    /// Receiver type name for methods (`func (t *T) Invoke(...)` -> `T`).
    pub receiver: Option<String>,
    pub start_line: u32,
    pub end_line: u32,
}

#[derive(Debug, Clone)]
pub struct GoStruct {
    pub name: String,
    pub line: u32,
    /// Field name and declaration line.
    pub fields: Vec<(String, u32)>,
}

/// A chaincode source file reduced to the views the detectors need.
#[derive(Debug, Clone)]
pub struct ChaincodeFile {
    pub path: String,
    /// Comments stripped, string contents kept (for format strings and keys).
    pub no_comments: Vec<String>,
    /// Comments and string contents stripped (for structural matching).
    pub code_only: Vec<String>,
    pub imports: Vec<(String, u32)>,
    pub regions: Vec<FuncRegion>,
    pub package_vars: Vec<(String, u32)>,
    pub map_typed_names: Vec<String>,
    pub structs: Vec<GoStruct>,
    line_offsets: Vec<usize>,
    line_lens: Vec<(u32, usize)>,
}

impl ChaincodeFile {
    /// Span of a whole (trimmed) source line.
    pub fn line_span(&self, line: u32) -> Span {
        let idx = line.saturating_sub(1) as usize;
        let offset = self.line_offsets.get(idx).copied().unwrap_or(0);
        let (column, len) = self.line_lens.get(idx).copied().unwrap_or((1, 0));
        Span {
            line,
            column,
            offset: offset + (column as usize - 1),
            len,
        }
    }

    fn region_lines(&self, region: &FuncRegion) -> impl Iterator<Item = (u32, &str, &str)> {
        let start = region.start_line.saturating_sub(1) as usize;
        let end = (region.end_line as usize).min(self.code_only.len());
        (start..end).map(move |i| {
            (
                i as u32 + 1,
                self.code_only[i].as_str(),
                self.no_comments[i].as_str(),
            )
        })
    }
}

fn first_token(line: &str) -> Option<&str> {
    line.trim_start()
        .split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .next()
        .filter(|t| !t.is_empty())
}

fn is_ident(text: &str) -> bool {
    !text.is_empty()
        && text
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !text.starts_with(|c: char| c.is_ascii_digit())
}

/// Strip comments (and optionally string contents) from one pass over the
/// source. Both derived views keep the line structure intact.
fn strip(source: &str) -> (Vec<String>, Vec<String>, Vec<(u32, String)>) {
    let mut no_comments = Vec::new();
    let mut code_only = Vec::new();
    let mut diagnostics = Vec::new();
    let mut in_block_comment = false;
    let mut in_raw_string = false;
    for (idx, line) in source.lines().enumerate() {
        let mut keep_strings = String::new();
        let mut drop_strings = String::new();
        let mut chars = line.chars().peekable();
        let mut in_string = false;
        while let Some(c) = chars.next() {
            if in_block_comment {
                if c == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    in_block_comment = false;
                }
                continue;
            }
            if in_raw_string {
                if c == '`' {
                    in_raw_string = false;
                    keep_strings.push(c);
                    drop_strings.push('`');
                } else {
                    keep_strings.push(c);
                }
                continue;
            }
            if in_string {
                keep_strings.push(c);
                if c == '\\' {
                    if let Some(next) = chars.next() {
                        keep_strings.push(next);
                    }
                } else if c == '"' {
                    in_string = false;
                    drop_strings.push('"');
                }
                continue;
            }
            match c {
                '/' if chars.peek() == Some(&'/') => break,
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    in_block_comment = true;
                }
                '"' => {
                    in_string = true;
                    keep_strings.push(c);
                    drop_strings.push('"');
                }
                '`' => {
                    in_raw_string = true;
                    keep_strings.push(c);
                    drop_strings.push('`');
                }
                _ => {
                    keep_strings.push(c);
                    drop_strings.push(c);
                }
            }
        }
        if in_string {
            diagnostics.push((idx as u32 + 1, "unterminated string literal".to_string()));
        }
        no_comments.push(keep_strings);
        code_only.push(drop_strings);
    }
    if in_block_comment {
        diagnostics.push((
            source.lines().count() as u32,
            "unterminated block comment".to_string(),
        ));
    }
    if in_raw_string {
        diagnostics.push((
            source.lines().count() as u32,
            "unterminated raw string literal".to_string(),
        ));
    }
    (no_comments, code_only, diagnostics)
}

fn parse_func_header(line: &str) -> Option<(String, Option<String>)> {
    let rest = line.trim_start().strip_prefix("func")?;
    let rest = rest.trim_start();
    let (receiver, rest) = if let Some(inner) = rest.strip_prefix('(') {
        let close = inner.find(')')?;
        let recv = inner[..close]
            .trim()
            .trim_start_matches(|c: char| c.is_ascii_alphanumeric() || c == '_')
            .trim()
            .trim_start_matches('*')
            .trim()
            .to_string();
        (
            if recv.is_empty() { None } else { Some(recv) },
            inner[close + 1..].trim_start(),
        )
    } else {
        (None, rest)
    };
    let name: String = rest
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    if name.is_empty() {
        return None;
    }
    Some((name, receiver))
}

fn quoted(line: &str) -> Option<String> {
    let start = line.find('"')?;
    let end = line[start + 1..].find('"')?;
    Some(line[start + 1..start + 1 + end].to_string())
}

/// Parse one chaincode file. Figure-style fragments without any `func`
/// declaration are treated as a single whole-file region.
pub fn parse_chaincode(source: &str, path: &str) -> (ChaincodeFile, Vec<(u32, String)>) {
    let (no_comments, code_only, diagnostics) = strip(source);
    let line_count = no_comments.len() as u32;

    let mut line_offsets = Vec::with_capacity(no_comments.len());
    let mut line_lens = Vec::with_capacity(no_comments.len());
    let mut offset = 0usize;
    for line in source.lines() {
        line_offsets.push(offset);
        let trimmed_start = line.len() - line.trim_start().len();
        line_lens.push((trimmed_start as u32 + 1, line.trim().len()));
        offset += line.len() + 1;
    }

    // imports
    let mut imports = Vec::new();
    let mut in_import_block = false;
    for (idx, line) in code_only.iter().enumerate() {
        let trimmed = line.trim();
        let lineno = idx as u32 + 1;
        if in_import_block {
            if trimmed.starts_with(')') {
                in_import_block = false;
            } else if !trimmed.is_empty() {
                if let Some(p) = quoted(&no_comments[idx]) {
                    imports.push((p, lineno));
                }
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("import") {
            if rest.trim_start().starts_with('(') {
                in_import_block = true;
            } else if let Some(p) = quoted(&no_comments[idx]) {
                imports.push((p, lineno));
            }
        }
    }

    // function regions
    let mut regions: Vec<FuncRegion> = Vec::new();
    let func_lines: Vec<(usize, String, Option<String>)> = code_only
        .iter()
        .enumerate()
        .filter_map(|(idx, line)| {
            parse_func_header(line).map(|(name, recv)| (idx, name, recv))
        })
        .collect();
    for (pos, (idx, name, receiver)) in func_lines.iter().enumerate() {
        let next_start = func_lines
            .get(pos + 1)
            .map(|(i, _, _)| *i)
            .unwrap_or(code_only.len());
        // region closes at the first top-level `}` before the next func
        let end = (idx + 1..next_start)
            .find(|&i| code_only[i].starts_with('}'))
            .map(|i| i + 1)
            .unwrap_or(next_start);
        regions.push(FuncRegion {
            name: name.clone(),
            receiver: receiver.clone(),
            start_line: *idx as u32 + 1,
            end_line: end as u32,
        });
    }
    if regions.is_empty() && line_count > 0 {
        regions.push(FuncRegion {
            name: "<fragment>".to_string(),
            receiver: None,
            start_line: 1,
            end_line: line_count,
        });
    }
    let synthesized = regions.len() == 1 && regions[0].name == "<fragment>";

    // package-level vars (outside every real region)
    let mut package_vars = Vec::new();
    if !synthesized {
        let in_region = |lineno: u32| {
            regions
                .iter()
                .any(|r| lineno >= r.start_line && lineno <= r.end_line)
        };
        let mut in_var_block = false;
        for (idx, line) in code_only.iter().enumerate() {
            let lineno = idx as u32 + 1;
            if in_region(lineno) {
                continue;
            }
            let trimmed = line.trim();
            if in_var_block {
                if trimmed.starts_with(')') {
                    in_var_block = false;
                } else if let Some(name) = first_token(trimmed) {
                    package_vars.push((name.to_string(), lineno));
                }
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix("var ") {
                if let Some(name) = first_token(rest) {
                    package_vars.push((name.to_string(), lineno));
                }
            } else if trimmed == "var (" {
                in_var_block = true;
            }
        }
    }

    // names with a map type anywhere in the file
    let mut map_typed_names = Vec::new();
    for line in &code_only {
        let trimmed = line.trim();
        if !trimmed.contains("map[")
            || trimmed.starts_with("func")
            || trimmed.starts_with("type")
            || trimmed.starts_with("return")
        {
            continue;
        }
        let candidate = trimmed.strip_prefix("var ").unwrap_or(trimmed);
        if let Some(name) = first_token(candidate) {
            if is_ident(name) && !map_typed_names.contains(&name.to_string()) {
                map_typed_names.push(name.to_string());
            }
        }
    }

    // struct definitions
    let mut structs = Vec::new();
    let mut idx = 0usize;
    while idx < code_only.len() {
        let trimmed = code_only[idx].trim();
        if let Some(rest) = trimmed.strip_prefix("type ") {
            if rest.contains("struct") && rest.trim_end().ends_with('{') {
                if let Some(name) = first_token(rest) {
                    let mut fields = Vec::new();
                    let mut j = idx + 1;
                    while j < code_only.len() && !code_only[j].trim_start().starts_with('}') {
                        let field_line = code_only[j].trim();
                        if let Some(fname) = first_token(field_line) {
                            if is_ident(fname) && field_line.len() > fname.len() {
                                fields.push((fname.to_string(), j as u32 + 1));
                            }
                        }
                        j += 1;
                    }
                    structs.push(GoStruct {
                        name: name.to_string(),
                        line: idx as u32 + 1,
                        fields,
                    });
                    idx = j;
                }
            }
        }
        idx += 1;
    }

    (
        ChaincodeFile {
            path: path.to_string(),
            no_comments,
            code_only,
            imports,
            regions,
            package_vars,
            map_typed_names,
            structs,
            line_offsets,
            line_lens,
        },
        diagnostics,
    )
}

pub struct ChaincodeRule {
    pub meta: DetectorRule,
    pub run: fn(&ChaincodeFile, &ScanConfig, &mut Emitter),
}

fn meta(
    id: u32,
    name: &'static str,
    trigger: &'static str,
    default_severity: Severity,
    confidence: Confidence,
) -> DetectorRule {
    DetectorRule {
        id: SweId(id),
        name,
        trigger,
        applicability: Applicability::Always,
        default_severity,
        confidence,
        language: Language::GoChaincode,
    }
}

/// The 14 chaincode detectors, id order.
pub fn rules() -> Vec<ChaincodeRule> {
    use Confidence as C;
    use Severity as S;
    let r = |meta, run| ChaincodeRule { meta, run };
    vec![
        r(
            meta(162, "Non-determinism arising from Global Variable",
                "package-level variable written inside a handler",
                S::Medium, C::Medium),
            swe_162,
        ),
        r(
            meta(163, "Non-determinism arising from KVS structure iteration",
                "range over a map-typed value",
                S::High, C::High),
            swe_163,
        ),
        r(
            meta(164, "Non-determinism arising from Reified Object Addresses",
                "pointer value observed as data",
                S::Medium, C::Medium),
            swe_164,
        ),
        r(
            meta(165, "Non-determinism arising from Concurrency of Program",
                "goroutine launch or channel creation",
                S::Medium, C::Medium),
            swe_165,
        ),
        r(
            meta(166, "Non-determinism arising from Generating Random Number",
                "math/rand import or rand.* call",
                S::High, C::High),
            swe_166,
        ),
        r(
            meta(167, "Non-determinism arising from System Timestamp",
                "wall-clock read",
                S::High, C::High),
            swe_167,
        ),
        r(
            meta(168, "Non-determinism arising from Web service",
                "net/http import or http client call",
                S::High, C::High),
            swe_168,
        ),
        r(
            meta(169, "Non-determinism arising from System Command Execution",
                "os/exec import or exec.Command call",
                S::High, C::High),
            swe_169,
        ),
        r(
            meta(170, "Non-determinism arising from External File Accessing",
                "filesystem access call",
                S::Medium, C::High),
            swe_170,
        ),
        r(
            meta(171, "Non-determinism arising from External Library Calling",
                "import outside the deterministic allowlist",
                S::Info, C::Low),
            swe_171,
        ),
        r(
            meta(172, "Phantom read from range query",
                "range query and state write in one handler",
                S::Medium, C::Medium),
            swe_172,
        ),
        r(
            meta(173, "Field Declarations in chaincode structure",
                "field on the chaincode receiver struct",
                S::High, C::High),
            swe_173,
        ),
        r(
            meta(174, "Cross Channel Chaincode Invocation",
                "InvokeChaincode with a non-empty channel argument",
                S::Info, C::Low),
            swe_174,
        ),
        r(
            meta(175, "Read-Write Conflict",
                "GetState of a key written earlier in the same handler",
                S::Medium, C::Medium),
            swe_175,
        ),
    ]
}

/// Complete chaincode catalog metadata.
pub fn chaincode_rule_set() -> Vec<DetectorRule> {
    rules().into_iter().map(|r| r.meta).collect()
}

fn assigns_to(line: &str, name: &str) -> bool {
    let trimmed = line.trim_start();
    let Some(rest) = trimmed.strip_prefix(name) else {
        return false;
    };
    let rest = rest.trim_start();
    if rest.starts_with("++") || rest.starts_with("--") {
        return true;
    }
    for op in ["+=", "-=", "*=", "/="] {
        if rest.starts_with(op) {
            return true;
        }
    }
    // plain `=` but not `==` and not `:=` (a new local of the same name)
    rest.starts_with('=') && !rest.starts_with("==")
}

fn swe_162(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            for (name, _) in &file.package_vars {
                if assigns_to(code, name) {
                    em.emit(
                        file.line_span(lineno),
                        region.name.clone(),
                        format!(
                            "package-level variable '{name}' is written here; its value \
                             is per-process, not part of the ledger state"
                        ),
                    );
                }
            }
        }
    }
}

fn swe_163(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            let Some(pos) = code.find("range ") else { continue };
            let Some(target) = first_token(&code[pos + "range ".len()..]) else {
                continue;
            };
            if file.map_typed_names.iter().any(|n| n == target) {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    format!(
                        "iteration order over map '{target}' differs between peers \
                         and breaks endorsement"
                    ),
                );
            }
        }
    }
}

fn swe_164(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        for (lineno, code, with_strings) in file.region_lines(region) {
            if with_strings.contains("%p") || code.contains("uintptr(") {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "pointer addresses differ between peers; never use them as data"
                        .to_string(),
                );
            }
        }
    }
}

fn swe_165(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            let trimmed = code.trim_start();
            if trimmed.starts_with("go ") || code.contains("go func(") || code.contains("make(chan")
            {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "concurrent execution interleaves differently on each peer"
                        .to_string(),
                );
            }
        }
    }
}

fn swe_166(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for (path, line) in &file.imports {
        if path == "math/rand" || path.starts_with("math/rand/") || path == "crypto/rand" {
            em.emit(
                file.line_span(*line),
                "import",
                format!("random number source '{path}' yields different values per peer"),
            );
        }
    }
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            if code.contains("rand.") {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "random value differs on every endorsing peer".to_string(),
                );
            }
        }
    }
}

fn swe_167(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            if code.contains("time.Now(") || code.contains(".Unix()") || code.contains(".UnixNano()")
            {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "wall-clock reads differ between peers; use the transaction \
                     timestamp from the stub instead"
                        .to_string(),
                );
            }
        }
    }
}

fn swe_168(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for (path, line) in &file.imports {
        if path == "net/http" || path.starts_with("net/http/") {
            em.emit(
                file.line_span(*line),
                "import",
                "web requests from chaincode return different answers per peer and \
                 re-centralize the application"
                    .to_string(),
            );
        }
    }
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            if ["http.Get(", "http.Post(", "http.PostForm(", "http.Head("]
                .iter()
                .any(|p| code.contains(p))
            {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "web requests from chaincode return different answers per peer"
                        .to_string(),
                );
            }
        }
    }
}

fn swe_169(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for (path, line) in &file.imports {
        if path == "os/exec" {
            em.emit(
                file.line_span(*line),
                "import",
                "system command output is peer-specific".to_string(),
            );
        }
    }
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            if code.contains("exec.Command(") {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "system command output is peer-specific".to_string(),
                );
            }
        }
    }
}

fn swe_170(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    const FILE_CALLS: [&str; 7] = [
        "os.Open(",
        "os.Create(",
        "os.ReadFile(",
        "os.WriteFile(",
        "os.Remove(",
        "ioutil.ReadFile(",
        "ioutil.WriteFile(",
    ];
    for region in &file.regions {
        for (lineno, code, _) in file.region_lines(region) {
            if FILE_CALLS.iter().any(|p| code.contains(p)) {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "local filesystem contents differ between peers".to_string(),
                );
            }
        }
    }
}

fn swe_171(file: &ChaincodeFile, config: &ScanConfig, em: &mut Emitter) {
    for (path, line) in &file.imports {
        if !import_allowed(&config.allowlist, path) {
            em.emit(
                file.line_span(*line),
                "import",
                format!(
                    "import '{path}' is outside the deterministic allowlist; audit it \
                     for peer-dependent behavior"
                ),
            );
        }
    }
}

fn swe_172(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    const RANGE_QUERIES: [&str; 3] = [
        "GetQueryResult(",
        "GetHistoryForKey(",
        "GetPrivateDataQueryResult(",
    ];
    for region in &file.regions {
        let mut query_line = None;
        let mut writes = false;
        for (lineno, code, _) in file.region_lines(region) {
            if query_line.is_none() && RANGE_QUERIES.iter().any(|p| code.contains(p)) {
                query_line = Some(lineno);
            }
            if code.contains("PutState(") || code.contains("DelState(") {
                writes = true;
            }
        }
        if let (Some(lineno), true) = (query_line, writes) {
            em.emit(
                file.line_span(lineno),
                region.name.clone(),
                "range query results are not re-validated at commit; writes derived \
                 from them can capture phantom reads"
                    .to_string(),
            );
        }
    }
}

fn swe_173(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    let receiver_types: Vec<&str> = file
        .regions
        .iter()
        .filter(|r| r.name == "Invoke" || r.name == "Init")
        .filter_map(|r| r.receiver.as_deref())
        .collect();
    for st in &file.structs {
        if !receiver_types.contains(&st.name.as_str()) {
            continue;
        }
        for (field, line) in &st.fields {
            em.emit(
                file.line_span(*line),
                format!("{}.{}", st.name, field),
                format!(
                    "field '{field}' on the chaincode struct holds per-peer state \
                     that is not part of the ledger"
                ),
            );
        }
    }
}

fn swe_174(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        for (lineno, _, with_strings) in file.region_lines(region) {
            let Some(pos) = with_strings.find("InvokeChaincode(") else {
                continue;
            };
            let rest = &with_strings[pos + "InvokeChaincode(".len()..];
            let args = rest.rfind(')').map(|end| &rest[..end]).unwrap_or(rest);
            let last = args.rsplit(',').next().unwrap_or("").trim();
            if last != "\"\"" {
                em.emit(
                    file.line_span(lineno),
                    region.name.clone(),
                    "cross-channel invocation commits nothing on the other channel; \
                     only the return value is visible"
                        .to_string(),
                );
            }
        }
    }
}

fn call_key<'a>(line: &'a str, call: &str) -> Option<&'a str> {
    let pos = line.find(call)?;
    let rest = &line[pos + call.len()..];
    let end = rest.find([',', ')'])?;
    let key = rest[..end].trim();
    (!key.is_empty()).then_some(key)
}

fn swe_175(file: &ChaincodeFile, _config: &ScanConfig, em: &mut Emitter) {
    for region in &file.regions {
        let mut written: Vec<(String, u32)> = Vec::new();
        for (lineno, _, with_strings) in file.region_lines(region) {
            if let Some(key) = call_key(with_strings, "PutState(") {
                written.push((key.to_string(), lineno));
            }
            if let Some(key) = call_key(with_strings, "GetState(") {
                if written.iter().any(|(k, l)| k == key && *l < lineno) {
                    em.emit(
                        file.line_span(lineno),
                        region.name.clone(),
                        format!(
                            "GetState({key}) returns the committed value, not the one \
                             written earlier in this transaction"
                        ),
                    );
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fragment_without_funcs_gets_one_region() {
        let (file, diags) = parse_chaincode("a := 1\nb := a\n", "frag.go");
        assert!(diags.is_empty());
        assert_eq!(file.regions.len(), 1);
        assert_eq!(file.regions[0].name, "<fragment>");
        assert_eq!(file.regions[0].end_line, 2);
    }

    #[test]
    fn parses_imports_and_regions() {
        let src = r#"package main

import (
    "fmt"
    "math/rand"
)

import "time"

func (t *SimpleChaincode) Invoke(stub shim.ChaincodeStubInterface) peer.Response {
    fmt.Println(rand.Intn(10))
    return shim.Success(nil)
}

func helper() int {
    return 1
}
"#;
        let (file, diags) = parse_chaincode(src, "cc.go");
        assert!(diags.is_empty());
        let paths: Vec<&str> = file.imports.iter().map(|(p, _)| p.as_str()).collect();
        assert_eq!(paths, ["fmt", "math/rand", "time"]);
        assert_eq!(file.regions.len(), 2);
        assert_eq!(file.regions[0].name, "Invoke");
        assert_eq!(file.regions[0].receiver.as_deref(), Some("SimpleChaincode"));
        assert_eq!(file.regions[1].name, "helper");
    }

    #[test]
    fn strings_and_comments_are_separated() {
        let src = "x := \"rand.Intn(5) // not code\" // rand.Intn(6)\n";
        let (file, _) = parse_chaincode(src, "s.go");
        assert!(!file.code_only[0].contains("rand."));
        assert!(file.no_comments[0].contains("rand.Intn(5)"));
        assert!(!file.no_comments[0].contains("rand.Intn(6)"));
    }

    #[test]
    fn struct_fields_and_receivers() {
        let src = "type BadChaincode struct {\n    globalValue string\n}\nfunc (t *BadChaincode) Invoke(stub shim.ChaincodeStubInterface) peer.Response {\n    return shim.Success(nil)\n}\n";
        let (file, _) = parse_chaincode(src, "s.go");
        assert_eq!(file.structs.len(), 1);
        assert_eq!(file.structs[0].fields, [("globalValue".to_string(), 2)]);
        assert_eq!(
            file.regions[0].receiver.as_deref(),
            Some("BadChaincode")
        );
    }

    #[test]
    fn catalog_has_fourteen_rules() {
        let metas = chaincode_rule_set();
        assert_eq!(metas.len(), 14);
        let ids: Vec<u32> = metas.iter().map(|m| m.id.0).collect();
        assert_eq!(ids, (162..=175).collect::<Vec<u32>>());
    }
}
