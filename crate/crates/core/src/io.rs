//! Trial CSV and distribution-parameter CSV.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::behavioral::{Response, TrialRecord};
use crate::cases::fernandes::TrialDistribution;
use crate::error::{Error, Result};
use crate::generative::BoxCoxT;

pub const TRIAL_COLUMNS: [&str; 6] = ["trial_id", "strategy", "signal", "state", "response_kind", "response"];
pub const DISTRIBUTION_COLUMNS: [&str; 5] = ["trial_id", "mu", "sigma", "nu", "tau"];

#[derive(Debug, Serialize, Deserialize)]
struct TrialRow {
    trial_id: String,
    strategy: String,
    signal: String,
    state: String,
    response_kind: String,
    response: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct DistributionRow {
    trial_id: String,
    mu: f64,
    sigma: f64,
    nu: f64,
    tau: f64,
}

fn check_header(found: &csv::StringRecord, want: &[&str]) -> Result<()> {
    let got: Vec<&str> = found.iter().map(str::trim).collect();
    if got != want {
        return Err(Error::InvalidParameter(format!(
            "expected columns {}, found {}",
            want.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

pub fn read_trials<R: Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() {
        return Ok(Vec::new());
    }
    check_header(&headers, &TRIAL_COLUMNS)?;
    let mut out = Vec::new();
    let mut bad = Vec::new();
    for (i, row) in rdr.deserialize::<TrialRow>().enumerate() {
        let row = row?;
        let response = match row.response_kind.as_str() {
            "action" => Response::Action(row.response),
            "probability" => match row.response.parse::<f64>() {
                Ok(p) => Response::Probability(p),
                Err(_) => {
                    bad.push(format!("row {}: `{}` is not a number", i + 2, row.response));
                    continue;
                }
            },
            other => {
                bad.push(format!("row {}: unknown response_kind `{other}`", i + 2));
                continue;
            }
        };
        out.push(TrialRecord {
            trial_id: row.trial_id,
            strategy: row.strategy,
            signal: row.signal,
            state: row.state,
            response,
        });
    }
    if bad.is_empty() {
        Ok(out)
    } else {
        Err(Error::Invalid(bad))
    }
}

pub fn write_trials<W: Write>(writer: W, records: &[TrialRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TRIAL_COLUMNS)?;
    for r in records {
        let (kind, value) = match &r.response {
            Response::Action(a) => ("action", a.clone()),
            Response::Probability(p) => ("probability", p.to_string()),
        };
        w.write_record([
            r.trial_id.as_str(),
            &r.strategy,
            &r.signal,
            &r.state,
            kind,
            &value,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trials_file(path: &Path) -> Result<Vec<TrialRecord>> {
    read_trials(File::open(path)?)
}

pub fn write_trials_file(path: &Path, records: &[TrialRecord]) -> Result<()> {
    write_trials(File::create(path)?, records)
}

pub fn read_distributions<R: Read>(reader: R) -> Result<Vec<TrialDistribution>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    check_header(&rdr.headers()?.clone(), &DISTRIBUTION_COLUMNS)?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<DistributionRow>() {
        let r = row?;
        let dist = BoxCoxT::new(r.mu, r.sigma, r.nu, r.tau).map_err(|e| {
            Error::InvalidParameter(format!("trial `{}`: {e}", r.trial_id))
        })?;
        out.push(TrialDistribution { trial_id: r.trial_id, dist });
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("distribution file has no rows".into()));
    }
    Ok(out)
}

pub fn write_distributions<W: Write>(writer: W, dists: &[TrialDistribution]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for t in dists {
        w.serialize(DistributionRow {
            trial_id: t.trial_id.clone(),
            mu: t.dist.mu,
            sigma: t.dist.sigma,
            nu: t.dist.nu,
            tau: t.dist.tau,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_distributions_file(path: &Path) -> Result<Vec<TrialDistribution>> {
    let file = File::open(path).map_err(|e| {
        Error::InvalidParameter(format!("distribution file {}: {e}", path.display()))
    })?;
    read_distributions(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records() -> Vec<TrialRecord> {
        vec![
            TrialRecord {
                trial_id: "1".into(),
                strategy: "ci".into(),
                signal: "2".into(),
                state: "freezing".into(),
                response: Response::Action("salt".into()),
            },
            TrialRecord {
                trial_id: "2".into(),
                strategy: "hops".into(),
                signal: "5".into(),
                state: "not_freezing".into(),
                response: Response::Probability(0.1 + 0.2),
            },
        ]
    }

    #[test]
    fn trial_round_trip() {
        let mut buf = Vec::new();
        write_trials(&mut buf, &records()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("trial_id,strategy,signal,state,response_kind,response\n"));
        assert_eq!(read_trials(buf.as_slice()).unwrap(), records());
    }

    #[test]
    fn empty_inputs() {
        assert!(read_trials("".as_bytes()).unwrap().is_empty());
        let header_only = "trial_id,strategy,signal,state,response_kind,response\n";
        assert!(read_trials(header_only.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn bad_rows_are_reported() {
        let text = "trial_id,strategy,signal,state,response_kind,response\n1,ci,2,freezing,guess,x\n2,ci,2,freezing,probability,abc\n";
        match read_trials(text.as_bytes()) {
            Err(Error::Invalid(v)) => assert_eq!(v.len(), 2),
            other => panic!("{other:?}"),
        }
        assert!(read_trials("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn distribution_round_trip() {
        let text = "trial_id,mu,sigma,nu,tau\nt1,10.5,0.2,0.5,8\nt2,7,0.3,-0.2,12\n";
        let d = read_distributions(text.as_bytes()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[1].dist.nu, -0.2);
        let mut buf = Vec::new();
        write_distributions(&mut buf, &d).unwrap();
        assert_eq!(read_distributions(buf.as_slice()).unwrap(), d);
        assert!(read_distributions("trial_id,mu,sigma,nu,tau\nx,-1,0.2,0,5\n".as_bytes()).is_err());
        assert!(read_distributions_file(Path::new("/nonexistent/file.csv")).is_err());
    }
}
