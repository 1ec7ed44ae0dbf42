//! Time-gridded per-node state probabilities and their CSV forms.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Per-node probabilities of the four states on a time grid, indexed
/// `[time][node]`, plus the population fractions of rumor-spreaders and
/// truth-believers.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tgrid: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub t: Vec<Vec<f64>>,
    pub r_frac: Vec<f64>,
    pub t_frac: Vec<f64>,
}

/// Marginals of the exact chain share the same layout.
pub type MarginalTrajectory = Trajectory;

impl Trajectory {
    pub fn new(
        tgrid: Vec<f64>,
        u: Vec<Vec<f64>>,
        r: Vec<Vec<f64>>,
        q: Vec<Vec<f64>>,
        t: Vec<Vec<f64>>,
    ) -> Self {
        let r_frac = r.iter().map(|row| mean(row)).collect();
        let t_frac = t.iter().map(|row| mean(row)).collect();
        Trajectory {
            tgrid,
            u,
            r,
            q,
            t,
            r_frac,
            t_frac,
        }
    }

    pub fn n(&self) -> usize {
        self.r.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.tgrid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tgrid.is_empty()
    }

    /// Node-level CSV: `t,node,U,R,Q,T`.
    pub fn to_node_csv(&self) -> String {
        let mut s = String::from("t,node,U,R,Q,T\n");
        for (k, &time) in self.tgrid.iter().enumerate() {
            for node in 0..self.n() {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    fmt_sig(time),
                    node,
                    fmt_sig(self.u[k][node]),
                    fmt_sig(self.r[k][node]),
                    fmt_sig(self.q[k][node]),
                    fmt_sig(self.t[k][node]),
                )
                .unwrap();
            }
        }
        s
    }

    /// Aggregate CSV: `t,R_frac,T_frac`.
    pub fn to_aggregate_csv(&self) -> String {
        Aggregate::from(self).to_csv()
    }

    pub fn write_node_csv(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_node_csv())
    }

    pub fn write_aggregate_csv(&self, path: &Path) -> Result<()> {
        write_file(path, &self.to_aggregate_csv())
    }
}

/// The `(R_frac, T_frac)` series of a trajectory.
pub fn aggregate_fractions(traj: &Trajectory) -> (Vec<f64>, Vec<f64>) {
    (traj.r_frac.clone(), traj.t_frac.clone())
}

/// Population fractions on a time grid, as read back from either CSV schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub tgrid: Vec<f64>,
    pub r_frac: Vec<f64>,
    pub t_frac: Vec<f64>,
}

impl From<&Trajectory> for Aggregate {
    fn from(t: &Trajectory) -> Self {
        Aggregate {
            tgrid: t.tgrid.clone(),
            r_frac: t.r_frac.clone(),
            t_frac: t.t_frac.clone(),
        }
    }
}

impl Aggregate {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,R_frac,T_frac\n");
        for k in 0..self.tgrid.len() {
            writeln!(
                s,
                "{},{},{}",
                fmt_sig(self.tgrid[k]),
                fmt_sig(self.r_frac[k]),
                fmt_sig(self.t_frac[k])
            )
            .unwrap();
        }
        s
    }

    /// Accepts `t,R_frac,T_frac` directly, or `t,node,U,R,Q,T` which is
    /// averaged over nodes.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::param("empty CSV"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let rows: Vec<Vec<f64>> = lines
            .enumerate()
            .map(|(k, l)| {
                l.split(',')
                    .map(|c| {
                        c.trim()
                            .parse::<f64>()
                            .map_err(|_| Error::param(format!("row {}: bad number `{c}`", k + 2)))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        if rows.iter().any(|r| r.len() != cols.len()) {
            return Err(Error::param("ragged CSV rows"));
        }
        match cols[..] {
            ["t", "R_frac", "T_frac"] => Ok(Aggregate {
                tgrid: rows.iter().map(|r| r[0]).collect(),
                r_frac: rows.iter().map(|r| r[1]).collect(),
                t_frac: rows.iter().map(|r| r[2]).collect(),
            }),
            ["t", "node", "U", "R", "Q", "T"] => {
                let mut agg = Aggregate {
                    tgrid: Vec::new(),
                    r_frac: Vec::new(),
                    t_frac: Vec::new(),
                };
                let mut counts: Vec<usize> = Vec::new();
                for r in &rows {
                    if agg.tgrid.last() != Some(&r[0]) {
                        agg.tgrid.push(r[0]);
                        agg.r_frac.push(0.0);
                        agg.t_frac.push(0.0);
                        counts.push(0);
                    }
                    *agg.r_frac.last_mut().unwrap() += r[3];
                    *agg.t_frac.last_mut().unwrap() += r[5];
                    *counts.last_mut().unwrap() += 1;
                }
                for (k, c) in counts.iter().enumerate() {
                    agg.r_frac[k] /= *c as f64;
                    agg.t_frac[k] /= *c as f64;
                }
                Ok(agg)
            }
            _ => Err(Error::param(format!("unrecognised CSV header `{header}`"))),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Formats with 9 significant digits, like C's `%.9g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa.to_string()),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt_sig(-(-1.0f64).exp()), "-0.367879441");
        assert_eq!(fmt_sig(1.5e-7), "1.5e-07");
        assert_eq!(fmt_sig(123456789012.0), "1.23456789e+11");
        assert_eq!(fmt_sig(0.00012345678912), "0.000123456789");
    }

    #[test]
    fn fractions_are_node_means() {
        let tr = Trajectory::new(
            vec![0.0],
            vec![vec![0.8, 0.6]],
            vec![vec![0.2, 0.4]],
            vec![vec![0.0, 0.0]],
            vec![vec![0.0, 0.0]],
        );
        assert!((tr.r_frac[0] - 0.3).abs() < 1e-15);
        assert_eq!(tr.t_frac[0], 0.0);
    }

    #[test]
    fn node_csv_aggregates_on_read() {
        let tr = Trajectory::new(
            vec![0.0, 0.5],
            vec![vec![0.5, 0.5], vec![0.25, 0.5]],
            vec![vec![0.25, 0.5], vec![0.5, 0.25]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![0.25, 0.0], vec![0.25, 0.25]],
        );
        let from_nodes = Aggregate::from_csv(&tr.to_node_csv()).unwrap();
        let direct = Aggregate::from_csv(&tr.to_aggregate_csv()).unwrap();
        assert_eq!(from_nodes, direct);
        assert_eq!(direct.r_frac, vec![0.375, 0.375]);
        assert!(Aggregate::from_csv("a,b\n1,2\n").is_err());
    }
}
