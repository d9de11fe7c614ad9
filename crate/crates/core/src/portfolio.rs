//! Portfolio CSV ingestion and per-tariff reports.
//!
//! Input schema (UTF-8, header required):
//!
//! ```text
//! year,tariff,contracts,affected
//! 2011,A,8805,327
//! ```
//!
//! With [`Locale::De`] the integer columns may carry dot thousands separators
//! (`8.805`), so tables in German number formatting can be pasted directly.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::distributions::{BetaParams, RngSeed};
use crate::error::{Error, Result};
use crate::estimation::{empirical_proportions, fit_beta_mom, PortfolioYear};
use crate::gof::{mc_test, McConfig, McMode, TnSummary};

pub const CSV_HEADER: [&str; 4] = ["year", "tariff", "contracts", "affected"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Locale {
    #[default]
    En,
    De,
}

/// Observation history of one tariff, in file order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TariffHistory {
    pub tariff_id: String,
    pub years: Vec<PortfolioYear>,
}

/// Groups the rows of a portfolio CSV by tariff.
///
/// Tariffs appear in order of first occurrence, years within a tariff in file
/// order.
pub fn parse_portfolio_csv(text: &str, locale: Locale) -> Result<Vec<TariffHistory>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| csv_error(&e, 1))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut histories: Vec<TariffHistory> = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |message: String| Error::Parse { line, message };
        if record.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", record.len())));
        }
        let year: i32 = record[0]
            .parse()
            .map_err(|_| err(format!("year `{}` is not an integer", &record[0])))?;
        let tariff = record[1].to_string();
        if tariff.is_empty() {
            return Err(err("empty tariff label".into()));
        }
        let contracts = parse_count(&record[2], locale).ok_or_else(|| {
            err(format!(
                "contracts `{}` is not a non-negative integer",
                &record[2]
            ))
        })?;
        let affected = parse_count(&record[3], locale).ok_or_else(|| {
            err(format!(
                "affected `{}` is not a non-negative integer",
                &record[3]
            ))
        })?;
        if contracts == 0 {
            return Err(err("contracts must be at least 1".into()));
        }
        if affected > contracts {
            return Err(err(format!(
                "affected ({affected}) exceeds contracts ({contracts})"
            )));
        }
        if !seen.insert((tariff.clone(), year)) {
            return Err(err(format!("duplicate year {year} for tariff {tariff}")));
        }
        let row = PortfolioYear::new(year, contracts, affected).map_err(|e| err(e.to_string()))?;
        match histories.iter_mut().find(|h| h.tariff_id == tariff) {
            Some(h) => h.years.push(row),
            None => histories.push(TariffHistory {
                tariff_id: tariff,
                years: vec![row],
            }),
        }
    }
    Ok(histories)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map_or(fallback_line, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_count(field: &str, locale: Locale) -> Option<u64> {
    let digits = match locale {
        Locale::En => field.to_string(),
        Locale::De => {
            let groups: Vec<&str> = field.split('.').collect();
            let well_formed = groups.len() == 1
                || (!groups[0].is_empty()
                    && groups[0].len() <= 3
                    && groups[1..].iter().all(|g| g.len() == 3));
            if !well_formed {
                return None;
            }
            groups.concat()
        }
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Canonical CSV form: header, then each tariff's rows in order.
pub fn serialize_portfolio_csv(histories: &[TariffHistory]) -> String {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for h in histories {
        for y in &h.years {
            out.push_str(&format!(
                "{},{},{},{}\n",
                y.year, h.tariff_id, y.contracts, y.affected
            ));
        }
    }
    out
}

/// Half-up rounding to `decimals` places.
pub fn round_half_up(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale + 0.5).floor() / scale
}

/// Proportion as a percentage rounded half-up to two decimals.
pub fn percent_display(x: f64) -> f64 {
    round_half_up(x * 100.0, 2)
}

/// Moment fit of one tariff with its table-style display roundings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TariffFit {
    pub tariff: String,
    pub inputs: Vec<PortfolioYear>,
    pub proportions: Vec<f64>,
    pub proportions_pct: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub mean_pct: f64,
    pub sd_pct: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `alpha` rounded up to the next integer, as shown in summary tables.
    pub alpha_display: f64,
    pub beta_display: f64,
}

impl TariffFit {
    pub fn params(&self) -> BetaParams {
        BetaParams::new(self.alpha, self.beta).expect("fit produced valid parameters")
    }
}

/// Proportions and method-of-moments fit, no simulation.
pub fn fit_tariff(h: &TariffHistory) -> Result<TariffFit> {
    let tag = |e: Error| e.in_tariff(&h.tariff_id);
    let sample = empirical_proportions(&h.years).map_err(tag)?;
    let params = fit_beta_mom(&sample).map_err(tag)?;
    let sd = sample.sd().expect("fit requires a variance");
    Ok(TariffFit {
        tariff: h.tariff_id.clone(),
        inputs: h.years.clone(),
        proportions: sample.proportions().to_vec(),
        proportions_pct: sample
            .proportions()
            .iter()
            .map(|&p| percent_display(p))
            .collect(),
        mean: sample.mean(),
        sd,
        mean_pct: percent_display(sample.mean()),
        sd_pct: percent_display(sd),
        alpha: params.alpha(),
        beta: params.beta(),
        alpha_display: params.alpha().ceil(),
        beta_display: params.beta().ceil(),
    })
}

/// Full analysis of one tariff: fit, Q-Q statistic and Monte-Carlo test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TariffReport {
    #[serde(flatten)]
    pub fit: TariffFit,
    pub sorted_obs: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub rho: f64,
    /// `null` when the fit is perfect (`rho = 1`).
    pub tn: f64,
    pub perfect_fit: bool,
    pub p_value: f64,
    pub replicates: usize,
    pub seed: RngSeed,
    pub mode: McMode,
    pub redraws: u64,
    pub tn_simulated: TnSummary,
}

pub fn analyze_tariff(h: &TariffHistory, config: &McConfig) -> Result<TariffReport> {
    let fit = fit_tariff(h)?;
    let sample = empirical_proportions(&h.years).map_err(|e| e.in_tariff(&h.tariff_id))?;
    let mc = mc_test(&sample, config).map_err(|e| e.in_tariff(&h.tariff_id))?;
    Ok(TariffReport {
        fit,
        sorted_obs: mc.qq.sorted_obs,
        quantiles: mc.qq.quantiles,
        rho: mc.qq.rho,
        tn: mc.tn_observed,
        perfect_fit: mc.qq.perfect_fit,
        p_value: mc.p_value,
        replicates: mc.replicates,
        seed: mc.seed,
        mode: mc.mode,
        redraws: mc.redraws,
        tn_simulated: mc.tn_simulated_summary,
    })
}

/// Analyses every tariff; tariff `i` (file order) uses stream `i` of `seed`.
///
/// The result vector is aligned with `histories`.
pub fn analyze_portfolio(
    histories: &[TariffHistory],
    replicates: usize,
    seed: u64,
    mode: McMode,
) -> Vec<Result<TariffReport>> {
    histories
        .par_iter()
        .enumerate()
        .map(|(i, h)| {
            let config = McConfig::new(replicates, RngSeed::new(seed, i as u64)).with_mode(mode);
            analyze_tariff(h, &config)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FitDocument {
    pub command: &'static str,
    pub tariffs: Vec<TariffFit>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GofDocument {
    pub command: &'static str,
    pub replicates: usize,
    pub seed: u64,
    pub mode: McMode,
    /// Small statistics indicate poor fit; see `p_value_rule`.
    pub rejection_region: &'static str,
    pub p_value_rule: &'static str,
    pub tariffs: Vec<TariffReport>,
}

impl GofDocument {
    pub fn new(replicates: usize, seed: u64, mode: McMode, tariffs: Vec<TariffReport>) -> Self {
        Self {
            command: "gof",
            replicates,
            seed,
            mode,
            rejection_region: "lower-tail",
            p_value_rule: "(1 + #{replicates with tn <= tn_observed}) / (replicates + 1)",
            tariffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1: &str = include_str!("../data/table1.csv");
    const TABLE1_DE: &str = include_str!("../data/table1_de.csv");

    #[test]
    fn parses_reference_table() {
        let h = parse_portfolio_csv(TABLE1, Locale::En).unwrap();
        assert_eq!(h.len(), 4);
        assert!(h.iter().all(|t| t.years.len() == 5));
        assert_eq!(h[0].tariff_id, "A");
        assert_eq!(
            h[3].years[4],
            PortfolioYear::new(2015, 33751, 1192).unwrap()
        );
    }

    #[test]
    fn german_thousands_separators() {
        let de = parse_portfolio_csv(TABLE1_DE, Locale::De).unwrap();
        let en = parse_portfolio_csv(TABLE1, Locale::En).unwrap();
        assert_eq!(de, en);
        // without the locale the dotted numbers are rejected
        assert!(parse_portfolio_csv(TABLE1_DE, Locale::En).is_err());
        assert_eq!(parse_count("1.2", Locale::De), None);
        assert_eq!(parse_count("1.2345", Locale::De), None);
        assert_eq!(parse_count(".345", Locale::De), None);
        assert_eq!(parse_count("12.345.678", Locale::De), Some(12_345_678));
    }

    #[test]
    fn empty_data_section() {
        assert!(
            parse_portfolio_csv("year,tariff,contracts,affected\n", Locale::En)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn affected_above_contracts_names_line() {
        let text = "year,tariff,contracts,affected\n2011,A,8805,327\n2012,A,8805,9000\n";
        match parse_portfolio_csv(text, Locale::En) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("exceeds"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_rows() {
        let cases = [
            (
                "year,tariff,contracts,affected\n2011,A,88x5,3\n",
                "contracts",
            ),
            ("year,tariff,contracts,affected\n2011,A,-5,3\n", "contracts"),
            (
                "year,tariff,contracts,affected\n2011,A,10,3.5\n",
                "affected",
            ),
            ("year,tariff,contracts,affected\nabc,A,10,3\n", "year"),
            ("year,tariff,contracts,affected\n2011,A,0,0\n", "at least 1"),
            (
                "year,tariff,contracts,affected\n2011,A,10,3\n2011,A,12,3\n",
                "duplicate",
            ),
            ("year,tariff,contracts,affected\n2011,A,10\n", "line 2"),
            ("tariff,year,contracts,affected\n", "header"),
        ];
        for (text, needle) in cases {
            let e = parse_portfolio_csv(text, Locale::En).unwrap_err();
            assert!(e.to_string().contains(needle), "{text:?}: {e}");
        }
    }

    #[test]
    fn same_year_in_different_tariffs_is_fine() {
        let text = "year,tariff,contracts,affected\n2011,A,10,3\n2011,B,12,3\n";
        assert_eq!(parse_portfolio_csv(text, Locale::En).unwrap().len(), 2);
    }

    #[test]
    fn canonical_round_trip() {
        let h = parse_portfolio_csv(TABLE1, Locale::En).unwrap();
        assert_eq!(serialize_portfolio_csv(&h), TABLE1);
        let de = parse_portfolio_csv(TABLE1_DE, Locale::De).unwrap();
        assert_eq!(serialize_portfolio_csv(&de), TABLE1);
    }

    #[test]
    fn fit_table_display_rows() {
        let h = parse_portfolio_csv(TABLE1, Locale::En).unwrap();
        let rows: Vec<_> = h
            .iter()
            .map(|t| {
                let f = fit_tariff(t).unwrap();
                (f.mean_pct, f.sd_pct, f.alpha_display, f.beta_display)
            })
            .collect();
        assert_eq!(
            rows,
            vec![
                (3.92, 0.16, 572.0, 14007.0),
                (3.17, 0.55, 32.0, 967.0),
                (3.02, 0.84, 13.0, 402.0),
                (3.51, 0.22, 249.0, 6838.0),
            ]
        );
    }

    #[test]
    fn degenerate_tariff_is_named() {
        let text = "year,tariff,contracts,affected\n2011,Z,100,4\n2012,Z,200,8\n";
        let h = parse_portfolio_csv(text, Locale::En).unwrap();
        let e = fit_tariff(&h[0]).unwrap_err();
        assert!(
            matches!(&e, Error::Tariff { tariff, source } if tariff == "Z" && **source == Error::DegenerateSample)
        );
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(round_half_up(2.5, 0), 3.0);
        assert_eq!(round_half_up(571.79, 0), 572.0);
        assert_eq!(percent_display(0.0371), 3.71);
        assert_eq!(percent_display(0.041006), 4.10);
    }

    #[test]
    fn analysis_is_deterministic() {
        let h = parse_portfolio_csv(TABLE1, Locale::En).unwrap();
        let cfg = McConfig::new(200, RngSeed::new(42, 2));
        let a = analyze_tariff(&h[2], &cfg).unwrap();
        let b = analyze_tariff(&h[2], &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fit.tariff, "C");
        assert_eq!(a.replicates, 200);
    }
}
