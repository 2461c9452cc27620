//! Simulated paths and their CSV form.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm_sq;

/// A reflection applied to the simulated state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    /// Index of the positive root whose reflection was applied to the output state.
    pub root: usize,
    /// Lift layer (1-based) whose clock fired.
    pub level: usize,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Horizon,
    /// The first wall-hitting time was reached.
    HitWall { time: f64 },
    /// Step halvings were exhausted.
    StepFailure { time: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rejected_steps: u64,
    /// Wall contact recorded where theory says the wall is never reached.
    pub wall_artifact: bool,
    /// Grid times at which a lifted level left its region `C_i`.
    pub region_violations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub path_id: u64,
    pub dimension: usize,
    pub times: Vec<f64>,
    states: Vec<f64>,
    pub jumps: Vec<JumpEvent>,
    pub termination: Termination,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn new(path_id: u64, dimension: usize) -> Self {
        Self {
            path_id,
            dimension,
            times: Vec::new(),
            states: Vec::new(),
            jumps: Vec::new(),
            termination: Termination::Horizon,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn push(&mut self, t: f64, x: &[f64]) {
        debug_assert_eq!(x.len(), self.dimension);
        self.times.push(t);
        self.states.extend_from_slice(x);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks(self.dimension)
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one point")
    }

    pub fn reached_horizon(&self) -> bool {
        self.termination == Termination::Horizon
    }

    pub fn hit_wall(&self) -> bool {
        matches!(self.termination, Termination::HitWall { .. })
    }
}

/// `(t, ‖x_t‖²)` at the recorded times.
pub fn squared_norm_series(trajectory: &Trajectory) -> Vec<(f64, f64)> {
    trajectory
        .times
        .iter()
        .zip(trajectory.states())
        .map(|(&t, x)| (t, norm_sq(x)))
        .collect()
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write trajectories as `path_id,t,x_1,...,x_n,event`.
///
/// Jump events become extra rows holding the post-jump state; the last row of
/// a path stopped at the wall carries `T0`.
pub fn write_csv<W: Write>(mut w: W, trajectories: &[Trajectory]) -> Result<()> {
    let n = trajectories.first().map_or(0, |t| t.dimension);
    let mut header = String::from("path_id,t");
    for i in 1..=n {
        header.push_str(&format!(",x_{i}"));
    }
    header.push_str(",event");
    writeln!(w, "{header}")?;
    for tr in trajectories {
        if tr.dimension != n {
            return Err(Error::DimensionMismatch { expected: n, got: tr.dimension });
        }
        let mut row = |t: f64, x: &[f64], event: &str| -> std::io::Result<()> {
            let coords: Vec<String> = x.iter().map(|&v| fmt_f(v)).collect();
            writeln!(w, "{},{},{},{}", tr.path_id, fmt_f(t), coords.join(","), event)
        };
        let last = tr.len().saturating_sub(1);
        let mut jumps = tr.jumps.iter().peekable();
        for (i, (&t, x)) in tr.times.iter().zip(tr.states()).enumerate() {
            while let Some(j) = jumps.next_if(|j| j.time <= t) {
                row(j.time, &j.post, &format!("jump:{}", j.root))?;
            }
            let event = if i == last && tr.hit_wall() { "T0" } else { "" };
            row(t, x, event)?;
        }
        for j in jumps {
            row(j.time, &j.post, &format!("jump:{}", j.root))?;
        }
    }
    Ok(())
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub path_id: u64,
    pub t: f64,
    pub x: Vec<f64>,
    pub event: String,
}

/// Read rows written by [`write_csv`].
pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<CsvRow>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty CSV".into()))??;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "path_id" || cols[1] != "t" || cols[cols.len() - 1] != "event" {
        return Err(Error::InvalidArgument(format!("unexpected CSV header: {header}")));
    }
    let n = cols.len() - 3;
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != n + 3 {
            return Err(Error::InvalidArgument(format!("line {}: expected {} fields", lineno + 2, n + 3)));
        }
        let bad = |e: &dyn std::fmt::Display| Error::InvalidArgument(format!("line {}: {e}", lineno + 2));
        let path_id = f[0].parse().map_err(|e| bad(&e))?;
        let t = f[1].parse().map_err(|e| bad(&e))?;
        let x = f[2..2 + n]
            .iter()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(&e))?;
        out.push(CsvRow {
            path_id,
            t,
            x,
            event: f[n + 2].to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut a = Trajectory::new(0, 2);
        a.push(0.0, &[1.0, 0.5]);
        a.push(0.1, &[1.0 / 3.0, -0.25]);
        a.jumps.push(JumpEvent {
            time: 0.05,
            root: 2,
            level: 1,
            pre: vec![1.0, 0.5],
            post: vec![-1.0, 0.5],
        });
        let mut b = Trajectory::new(1, 2);
        b.push(0.0, &[0.2, 0.1]);
        b.push(0.07, &[0.0, 0.1]);
        b.termination = Termination::HitWall { time: 0.07 };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[a, b]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("path_id,t,x_1,x_2,event\n"));
        let rows = read_csv(&buf[..]).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[1].event, "jump:2");
        assert_eq!(rows[2].x[0], 1.0 / 3.0);
        assert_eq!(rows[4].event, "T0");
    }

    #[test]
    fn constant_path_has_constant_norm_series() {
        let mut t = Trajectory::new(0, 3);
        for i in 0..5 {
            t.push(i as f64, &[1.0, 2.0, 2.0]);
        }
        assert!(squared_norm_series(&t).iter().all(|&(_, v)| v == 9.0));
    }
}
