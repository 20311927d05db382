use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::backend::{Shot, ShotBatch, SignMode};
use crate::error::{Error, Result};
use crate::wigner::DisplacementPoint;

/// One line of a shot log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub operator: Option<String>,
    /// Index of the batch within the log.
    pub batch: usize,
    pub point: DisplacementPoint,
    pub phase: f64,
    pub weight: f64,
    pub sign_mode: SignMode,
    /// `+1` for the `φ` branch, `−1` for `φ + π`.
    pub branch: i8,
    /// `A = ±1`.
    pub outcome: i8,
    pub shot: usize,
}

/// Write every recorded shot of `batches` as newline-delimited JSON.
pub fn write_shot_log<W: Write>(mut out: W, batches: &[ShotBatch]) -> Result<()> {
    for (b, batch) in batches.iter().enumerate() {
        if batch.shots.len() != batch.total_shots() {
            return Err(Error::Precondition(format!(
                "batch {b} was run without recording shots"
            )));
        }
        for (shot, s) in batch.shots.iter().enumerate() {
            let rec = ShotRecord {
                operator: batch.operator.clone(),
                batch: b,
                point: batch.point.clone(),
                phase: batch.phase,
                weight: batch.weight,
                sign_mode: batch.sign_mode,
                branch: s.branch,
                outcome: if s.ground { 1 } else { -1 },
                shot,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Rebuild batches from a shot log.
pub fn read_shot_log<R: BufRead>(input: R) -> Result<Vec<ShotBatch>> {
    let mut batches: Vec<ShotBatch> = Vec::new();
    let mut current: Option<usize> = None;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ShotRecord = serde_json::from_str(&line)?;
        if current != Some(rec.batch) {
            current = Some(rec.batch);
            batches.push(ShotBatch {
                operator: rec.operator.clone(),
                point: rec.point.clone(),
                phase: rec.phase,
                weight: rec.weight,
                sign_mode: rec.sign_mode,
                plus_shots: 0,
                plus_ground: 0,
                minus_shots: 0,
                minus_ground: 0,
                shots: Vec::new(),
            });
        }
        let b = batches.last_mut().expect("batch opened");
        let ground = rec.outcome > 0;
        if rec.branch > 0 {
            b.plus_shots += 1;
            b.plus_ground += ground as usize;
        } else {
            b.minus_shots += 1;
            b.minus_ground += ground as usize;
        }
        b.shots.push(Shot {
            branch: rec.branch,
            ground,
        });
    }
    Ok(batches)
}
