//! Batch pi_0 scans: one CSV row per discriminant, with the log-ratio
//! log(pi_0) / log(sqrt(|N(D)| D_F)).

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use log::info;
use serde::Serialize;
use serde_json::json;

use qmpolar::arith::small_primes;
use qmpolar::field::BaseField;
use qmpolar::{Error, Result};

use crate::cache::{Cache, Kind};
use crate::commands::{Context, Report};
use crate::spec::parse_field;
use crate::ContextArgs;

pub const CSV_HEADER: &str = "D,pi0,norm_disc,ratio,seconds";

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    #[serde(rename = "D")]
    pub d: String,
    /// None when the row was skipped
    pub pi0: Option<u64>,
    pub norm_disc: String,
    pub ratio: Option<f64>,
    pub seconds: Option<f64>,
}

impl ScanRow {
    fn csv(&self) -> String {
        let pi0 = self.pi0.map_or_else(|| "skipped".to_string(), |v| v.to_string());
        let ratio = self.ratio.map(|r| format!("{r:.6}")).unwrap_or_default();
        let secs = self.seconds.map(|s| format!("{s:.3}")).unwrap_or_default();
        format!("{},{pi0},{},{ratio},{secs}", self.d, self.norm_disc)
    }
}

pub struct ScanPlan<'a> {
    pub field: &'a str,
    pub discs: Option<&'a str>,
    pub primorial_pairs: Option<u32>,
    pub max_norm: f64,
    pub timing: bool,
    pub plot: Option<&'a Path>,
}

/// D_k = product of the first 2k primes, k = 1..=k_max.
pub fn primorial_pairs(k_max: u32) -> Vec<u128> {
    (1..=k_max as usize)
        .map(|k| small_primes()[..2 * k].iter().map(|&p| p as u128).product())
        .collect()
}

fn disc_list(plan: &ScanPlan, base: &BaseField) -> Result<Vec<String>> {
    match (plan.discs, plan.primorial_pairs) {
        (Some(list), None) => Ok(list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()),
        (None, Some(k)) => {
            if !base.is_rational() {
                return Err(Error::Unsupported("the primorial rule is defined over Q only".into()));
            }
            if k > 8 {
                return Err(Error::Domain("at most 8 primorial pairs".into()));
            }
            Ok(primorial_pairs(k).into_iter().map(|d| d.to_string()).collect())
        }
        _ => Err(Error::Domain("give exactly one of --discs or --primorial-pairs".into())),
    }
}

pub fn log_ratio(pi0: u64, norm_disc: f64) -> f64 {
    (pi0 as f64).ln() / norm_disc.sqrt().ln()
}

fn scan_one(d: &str, plan: &ScanPlan, cache: &Cache) -> Result<ScanRow> {
    let args = ContextArgs { field: plan.field.to_string(), disc: d.to_string(), level: 1, ideal_norm: "1".into(), tau: None };
    let c = Context::build(&args)?;
    let norm = c.disc.norm().to_integer().magnitude() * c.ctx.base.disc;
    let norm_f: f64 = norm.to_string().parse().unwrap_or(f64::INFINITY);
    let mut row = ScanRow { d: c.disc.to_string(), pi0: None, norm_disc: norm.to_string(), ratio: None, seconds: None };
    if norm_f > plan.max_norm {
        info!("D = {d}: norm {norm} beyond the desk-scale bound, skipped");
        return Ok(row);
    }
    let start = Instant::now();
    let v = match cache.integer(Kind::Pi0, c.key(), || qmpolar::polar::pi_zero(&c.ctx)) {
        Ok(v) => v,
        Err(Error::DeskScaleExceeded(msg)) => {
            info!("D = {d}: {msg}, skipped");
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    row.pi0 = Some(v);
    row.ratio = Some(log_ratio(v, norm_f));
    if plan.timing {
        row.seconds = Some(start.elapsed().as_secs_f64());
    }
    Ok(row)
}

pub fn scan(plan: &ScanPlan, cache: &Cache) -> Result<Report> {
    let base = parse_field(plan.field)?;
    let discs = disc_list(plan, &base)?;
    let rows = discs.iter().map(|d| scan_one(d, plan, cache)).collect::<Result<Vec<_>>>()?;
    let mut text = format!("{CSV_HEADER}\n");
    for r in &rows {
        text.push_str(&r.csv());
        text.push('\n');
    }
    if let Some(path) = plan.plot {
        let mut data = String::from("# D log_sqrt_norm_disc log_pi0 ratio\n");
        for r in rows.iter().filter(|r| r.pi0.is_some()) {
            let n: f64 = r.norm_disc.parse().unwrap_or(f64::NAN);
            let _ = writeln!(
                data,
                "{} {:.6} {:.6} {:.6}",
                r.d,
                n.sqrt().ln(),
                (r.pi0.unwrap() as f64).ln(),
                r.ratio.unwrap()
            );
        }
        std::fs::write(path, data).map_err(|e| Error::Domain(format!("cannot write plot data {}: {e}", path.display())))?;
    }
    Ok(Report { text, json: json!({"field": base.name(), "rows": rows}) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primorials() {
        assert_eq!(primorial_pairs(4), vec![6, 210, 30030, 9699690]);
    }

    #[test]
    fn row_format() {
        let r = ScanRow { d: "6".into(), pi0: Some(1), norm_disc: "6".into(), ratio: Some(0.0), seconds: None };
        assert_eq!(r.csv(), "6,1,6,0.000000,");
        let s = ScanRow { pi0: None, ratio: None, ..r };
        assert_eq!(s.csv(), "6,skipped,6,,");
    }
}
