use std::io::Write;

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::harness::TrialReport;

pub const TOOL_NAME: &str = "qsig";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    /// Parses back into the config that produced the run.
    pub config: ExperimentConfig,
}

impl RunHeader {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            tool: TOOL_NAME,
            version: env!("CARGO_PKG_VERSION"),
            seed: config.spec.seed,
            config: config.clone(),
        }
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Header line followed by one line per report.
pub fn write_jsonl<W: Write>(mut w: W, header: &RunHeader, reports: &[TrialReport]) -> Result<()> {
    serde_json::to_writer(&mut w, header).map_err(io)?;
    w.write_all(b"\n").map_err(io)?;
    for r in reports {
        serde_json::to_writer(&mut w, r).map_err(io)?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

const STAT_COLUMNS: [&str; 9] = [
    "trials",
    "successes",
    "empirical",
    "sigma",
    "oracle",
    "bound",
    "bound_tag",
    "bound_vacuous",
    "injections",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per report: the named parameter columns, then the statistics.
/// An empty report list writes the header row only.
pub fn emit_sweep_plotdata<W: Write>(
    w: W,
    columns: &[String],
    reports: &[TrialReport],
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let header: Vec<&str> = columns
        .iter()
        .map(String::as_str)
        .chain(STAT_COLUMNS)
        .collect();
    out.write_record(&header).map_err(io)?;
    for r in reports {
        let tag = r.bound_tag.map(|t| {
            serde_json::to_value(t)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        });
        let row: Vec<String> = columns
            .iter()
            .map(|c| opt(r.parameters.get(c)))
            .chain([
                r.trials.to_string(),
                r.successes.to_string(),
                r.empirical.to_string(),
                r.sigma().to_string(),
                opt(r.oracle),
                opt(r.bound),
                tag.unwrap_or_default(),
                r.bound_vacuous.to_string(),
                opt(r.injections),
            ])
            .collect();
        out.write_record(&row).map_err(io)?;
    }
    out.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_attack, AttackKind, AttackSpec, P2Params, ProtocolParams, Strategy};

    #[test]
    fn empty_sweep_writes_header_only() {
        let mut buf = Vec::new();
        emit_sweep_plotdata(&mut buf, &["L".into(), "s_v".into()], &[]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with("L,s_v,trials,successes,empirical,sigma,oracle,bound,bound_tag"));
    }

    #[test]
    fn jsonl_schema() {
        let spec = AttackSpec {
            params: ProtocolParams::P2(P2Params {
                l: 16,
                s_a: 0.0,
                s_v: 0.1,
            }),
            attack: AttackKind::Repudiate,
            strategy: Strategy::default(),
            trials: 50,
            seed: 9,
        };
        let cfg = ExperimentConfig::single(spec.clone());
        let r = run_attack(&spec).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &RunHeader::new(&cfg), &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<serde_json::Value> = text
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 2);
        let echoed: ExperimentConfig = serde_json::from_value(lines[0]["config"].clone()).unwrap();
        assert_eq!(echoed, cfg);
        for key in [
            "protocol",
            "attack",
            "parameters",
            "empirical",
            "bound",
            "bound_tag",
            "seed",
        ] {
            assert!(lines[1].get(key).is_some(), "missing {key}");
        }
        assert_eq!(lines[1]["bound_tag"], "p2-repudiation");
    }
}
