use std::fmt::Write as _;

use crate::{RdaError, Result};

/// One row of a convergence study.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorRecord {
    pub m: usize,
    pub d: usize,
    pub h: f64,
    pub n_elem: usize,
    pub dofs: usize,
    pub eta: f64,
    pub patch_s: usize,
    pub err_l2: f64,
    pub err_energy: f64,
    pub err_energy_ext: f64,
    pub rate_l2: Option<f64>,
    pub rate_energy: Option<f64>,
    pub lambda_m: f64,
    pub solve_iters: usize,
    pub wall_ms: u128,
}

/// `log(e_prev / e_cur) / log(h_prev / h_cur)`.
pub fn rate(e_prev: f64, e_cur: f64, h_prev: f64, h_cur: f64) -> Result<f64> {
    if h_prev == h_cur {
        return Err(RdaError::DegenerateH(h_cur));
    }
    Ok((e_prev / e_cur).ln() / (h_prev / h_cur).ln())
}

/// Fills in pairwise rates; the first record gets none.
pub fn observed_rates(records: &mut [ErrorRecord]) -> Result<()> {
    if let Some(first) = records.first_mut() {
        first.rate_l2 = None;
        first.rate_energy = None;
    }
    for i in 1..records.len() {
        let (prev, cur) = (&records[i - 1], &records[i]);
        let rl2 = rate(prev.err_l2, cur.err_l2, prev.h, cur.h)?;
        let ren = rate(prev.err_energy, cur.err_energy, prev.h, cur.h)?;
        records[i].rate_l2 = Some(rl2);
        records[i].rate_energy = Some(ren);
    }
    Ok(())
}

pub const CSV_HEADER: &str =
    "m,d,h,n_elem,dofs,eta,patch_S,err_l2,rate_l2,err_energy,rate_energy,lambda_m,solve_iters,wall_ms";

fn opt(v: Option<f64>) -> String {
    v.map(|r| format!("{r:.6}")).unwrap_or_default()
}

/// CSV text for a study. `wall_ms` is left empty unless `with_timing`, so
/// reruns of the same configuration are byte-identical.
pub fn records_to_csv(records: &[ErrorRecord], with_timing: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let wall = if with_timing { r.wall_ms.to_string() } else { String::new() };
        let _ = writeln!(
            s,
            "{},{},{:.10e},{},{},{},{},{:.10e},{},{:.10e},{},{:.10e},{},{}",
            r.m,
            r.d,
            r.h,
            r.n_elem,
            r.dofs,
            r.eta,
            r.patch_s,
            r.err_l2,
            opt(r.rate_l2),
            r.err_energy,
            opt(r.rate_energy),
            r.lambda_m,
            r.solve_iters,
            wall
        );
    }
    s
}
