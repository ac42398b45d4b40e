use std::path::Path;

use algco::io::load;
use algco::par::{self, Exec};
use serde::Deserialize;
use serde_json::json;

use crate::commands::{Outcome, Settings, EXIT_FAILED, EXIT_OK};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    runs: Vec<Entry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    name: String,
    /// Command line after the program name; paths relative to the manifest.
    args: Vec<String>,
    #[serde(default)]
    expect: i32,
}

pub fn verify_all(s: &Settings, manifest: &Path, exec: Exec) -> Outcome {
    let path = s.path(manifest);
    let m: Manifest = match load(&path) {
        Ok(m) => m,
        Err(e) => return Outcome::from_error(&e),
    };
    let inner = Settings {
        base: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        ..s.clone()
    };
    // each run is independent; results come back in manifest order
    let results: Vec<(Entry, i32)> = par::map(exec, m.runs, |e| {
        let code = crate::run_args(&e.args, &inner).code;
        (e, code)
    });
    let mut lines = Vec::new();
    let mut runs = Vec::new();
    let mut failed = 0;
    for (e, code) in &results {
        let ok = *code == e.expect;
        if !ok {
            failed += 1;
        }
        lines.push(format!(
            "{} {} (exit {code}, expected {})",
            if ok { "ok  " } else { "FAIL" },
            e.name,
            e.expect
        ));
        runs.push(json!({ "name": e.name, "exit_code": code, "expected": e.expect, "ok": ok }));
    }
    lines.push(format!("{} of {} runs as expected", results.len() - failed, results.len()));
    let code = if failed == 0 { EXIT_OK } else { EXIT_FAILED };
    Outcome {
        report: json!({ "runs": runs, "failed": failed }),
        text: lines.join("\n"),
        code,
    }
}
