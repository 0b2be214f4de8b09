//! CSV renderings. Comma separator, LF line endings, header row first.

use serde::Serialize;

use crate::analysis::{ComparisonRow, ExactAnalysis, MonteCarloStats};
use crate::protocol::TrialRecord;
use crate::statevector::Outcome;

fn write_rows<R: Serialize>(rows: impl IntoIterator<Item = R>) -> csv::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct TrialRow {
    outcome: Outcome,
    probability: f64,
    message: String,
    fidelity: f64,
    success: bool,
    bits_sent: usize,
}

/// Bob's state is left out; use JSON for the amplitudes.
pub fn trial_csv(record: &TrialRecord) -> csv::Result<String> {
    write_rows([TrialRow {
        outcome: record.outcome,
        probability: record.probability,
        message: record.message.to_string(),
        fidelity: record.fidelity,
        success: record.success,
        bits_sent: record.bits_sent,
    }])
}

#[derive(Serialize)]
struct BranchRow {
    outcome: Outcome,
    probability: f64,
    bits: usize,
    fidelity: f64,
    p_success: f64,
    expected_bits: f64,
}

/// One row per branch; the aggregate columns repeat on every row.
pub fn exact_csv(analysis: &ExactAnalysis) -> csv::Result<String> {
    write_rows(analysis.per_branch.iter().map(|b| BranchRow {
        outcome: b.outcome,
        probability: b.probability,
        bits: b.bits,
        fidelity: b.fidelity,
        p_success: analysis.p_success,
        expected_bits: analysis.expected_bits,
    }))
}

pub fn stats_csv(stats: &MonteCarloStats) -> csv::Result<String> {
    write_rows([stats])
}

pub fn table_csv(rows: &[ComparisonRow]) -> csv::Result<String> {
    write_rows(rows)
}
