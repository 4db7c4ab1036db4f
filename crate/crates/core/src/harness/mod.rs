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

//! Deterministic simulation of a full deployment and the measured attack
//! experiments run against it.

pub mod attacks;
pub mod report;
pub mod sim;

pub use attacks::{
    compromise_attack, eavesdrop_dictionary_attack, impersonation_attack, replay_attack,
    shares_consistent, AttackKind, AttackReport,
};
pub use report::{
    run_comparison_report, run_comparison_report_with, ComparisonReport, HarnessError,
    ReportConfig, CONFIGURATIONS,
};
pub use sim::{ClientRun, Link, LogEntry, SimCluster, SimConnection, SimError, Transcript};
