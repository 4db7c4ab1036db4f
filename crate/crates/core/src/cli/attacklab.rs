// Copyright 2026 The splitauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Offline adversary report.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

use crate::harness::run_comparison_report;

/// One candidate password per line; blank lines are skipped.
pub fn load_dictionary(path: &Path) -> anyhow::Result<Vec<String>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading dictionary {}", path.display()))?;
    let words: Vec<String> = text
        .lines()
        .map(|l| l.trim_end_matches('\r'))
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    anyhow::ensure!(
        !words.is_empty(),
        "dictionary {} has no entries",
        path.display()
    );
    Ok(words)
}

pub fn attacklab<W: Write>(
    seed: u64,
    dict: &Path,
    csv: Option<&Path>,
    output: &mut W,
) -> anyhow::Result<()> {
    let words = load_dictionary(dict)?;
    let report = run_comparison_report(seed, &words)?;
    output.write_all(report.render_text().as_bytes())?;
    if let Some(path) = csv {
        let file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        report.write_csv(file)?;
    }
    Ok(())
}
