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

//! Runs every adversary across the standard deployments and tabulates the
//! measured success rates.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io;

use rand::Rng;
use thiserror::Error;

use super::attacks::{
    compromise_attack, eavesdrop_dictionary_attack, impersonation_attack, replay_attack,
    AttackKind, AttackReport,
};
use super::sim::{SimCluster, SimError};
use crate::crypto::SplitMode;
use crate::protocol::ClientEvent;
use crate::rng;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("dictionary is empty")]
    EmptyDictionary,
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("scripted {0} did not succeed")]
    Script(&'static str),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// Deployments compared by the report: the single-server baseline, the
/// two-server case in both split modes, and three-way xor.
pub const CONFIGURATIONS: [(usize, SplitMode); 4] = [
    (1, SplitMode::Segment),
    (2, SplitMode::Segment),
    (2, SplitMode::Xor),
    (3, SplitMode::Xor),
];

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub replay_trials: usize,
    pub impersonation_trials: usize,
    pub username: String,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            replay_trials: 100,
            impersonation_trials: 1000,
            username: "Alex".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub seed: u64,
    pub dictionary_size: usize,
    pub username: String,
    pub rows: Vec<AttackReport>,
}

pub fn run_comparison_report(
    seed: u64,
    dictionary: &[String],
) -> Result<ComparisonReport, HarnessError> {
    run_comparison_report_with(seed, dictionary, &ReportConfig::default())
}

pub fn run_comparison_report_with(
    seed: u64,
    dictionary: &[String],
    config: &ReportConfig,
) -> Result<ComparisonReport, HarnessError> {
    let mut seen = HashSet::new();
    let words: Vec<String> = dictionary
        .iter()
        .filter(|w| !w.is_empty() && seen.insert(w.as_str()))
        .cloned()
        .collect();
    if words.is_empty() {
        return Err(HarnessError::EmptyDictionary);
    }
    let mut adversary = rng::harness_rng(seed);
    let truth = words[adversary.gen_range(0..words.len())].clone();
    let user = config.username.as_str();

    let mut rows = Vec::new();
    for (i, (n, mode)) in CONFIGURATIONS.into_iter().enumerate() {
        let mut sim = SimCluster::new(n, mode, seed.wrapping_add(i as u64))?;
        let mut conn = sim.connect();
        let registration = sim.register(&mut conn, user, &truth)?;
        if registration.event != Some(ClientEvent::Registered) {
            return Err(HarnessError::Script("registration"));
        }
        let login = sim.login(&mut conn, user, &truth)?;
        if login.event != Some(ClientEvent::LoginSucceeded) {
            return Err(HarnessError::Script("login"));
        }

        rows.push(replay_attack(
            &mut sim,
            &login.transcript,
            config.replay_trials,
        ));
        rows.push(impersonation_attack(
            &mut sim,
            user,
            config.impersonation_trials,
            &mut adversary,
        ));
        for k in 1..=n {
            let nodes: Vec<usize> = (0..k).collect();
            rows.push(compromise_attack(&sim, user, &nodes, &words, &truth));
        }
        rows.push(
            eavesdrop_dictionary_attack(&login.transcript, &words, &truth).for_config(n, mode),
        );
        rows.push(
            eavesdrop_dictionary_attack(&registration.transcript, &words, &truth)
                .for_config(n, mode),
        );
    }

    Ok(ComparisonReport {
        seed,
        dictionary_size: words.len(),
        username: user.to_owned(),
        rows,
    })
}

impl ComparisonReport {
    pub fn row(
        &self,
        attack: AttackKind,
        n: usize,
        mode: SplitMode,
        compromised: usize,
    ) -> Option<&AttackReport> {
        self.rows.iter().find(|r| {
            r.attack == attack && r.n == n && r.mode == mode && r.compromised == compromised
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "attack lab: split-verifier password authentication");
        let _ = writeln!(
            out,
            "seed {}, dictionary {} words, target user {}",
            self.seed, self.dictionary_size, self.username
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<20} {:>2} {:<8} {:>11} {:>7} {:>9} {:>8}",
            "attack", "n", "mode", "compromised", "trials", "successes", "rate"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<20} {:>2} {:<8} {:>11} {:>7} {:>9} {:>7.2}%",
                r.attack.as_str(),
                r.n,
                r.mode.as_str(),
                r.compromised,
                r.trials,
                r.successes,
                100.0 * r.rate()
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "notes:");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "  {} n={} {} compromised={}: {}",
                r.attack, r.n, r.mode, r.compromised, r.notes
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "findings:");
        for line in self.findings() {
            let _ = writeln!(out, "  - {line}");
        }
        out
    }

    /// Plain-language comparisons drawn from the measured rows.
    pub fn findings(&self) -> Vec<String> {
        let rate = |attack, n, mode, k| self.row(attack, n, mode, k).map(|r| 100.0 * r.rate());
        let mut lines = Vec::new();
        if let (Some(seg), Some(xor)) = (
            rate(AttackKind::Compromise, 2, SplitMode::Segment, 1),
            rate(AttackKind::Compromise, 2, SplitMode::Xor, 1),
        ) {
            lines.push(format!(
                "one of two servers compromised: segment split {seg:.0}% identified, xor split {xor:.0}% identified"
            ));
        }
        if let Some(base) = rate(AttackKind::Compromise, 1, SplitMode::Segment, 1) {
            lines.push(format!(
                "single-server baseline, store compromised: {base:.0}% identified"
            ));
        }
        let partial_xor: Vec<_> = self
            .rows
            .iter()
            .filter(|r| {
                r.attack == AttackKind::Compromise
                    && r.mode == SplitMode::Xor
                    && r.compromised < r.n
            })
            .collect();
        if !partial_xor.is_empty() {
            let hits: usize = partial_xor.iter().map(|r| r.successes).sum();
            lines.push(format!(
                "xor split with fewer than n servers compromised: {hits} identifications across {} configurations",
                partial_xor.len()
            ));
        }
        let eaves: Vec<_> = self
            .rows
            .iter()
            .filter(|r| r.attack == AttackKind::EavesdropLogin)
            .collect();
        if !eaves.is_empty() {
            let hits: usize = eaves.iter().map(|r| r.successes).sum();
            lines.push(format!(
                "passive login capture checked offline against the dictionary: {hits}/{} identified",
                eaves.len()
            ));
        }
        let online: usize = self
            .rows
            .iter()
            .filter(|r| matches!(r.attack, AttackKind::Replay | AttackKind::Impersonation))
            .map(|r| r.successes)
            .sum();
        lines.push(format!(
            "replay and impersonation: {online} successful logins"
        ));
        lines
    }

    /// Columns: attack, n, mode, compromised, trials, successes.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), HarnessError> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["attack", "n", "mode", "compromised", "trials", "successes"])?;
        for r in &self.rows {
            csv.write_record([
                r.attack.as_str().to_owned(),
                r.n.to_string(),
                r.mode.as_str().to_owned(),
                r.compromised.to_string(),
                r.trials.to_string(),
                r.successes.to_string(),
            ])?;
        }
        csv.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}
