//! Plot data for figures 1 to 5.

use serde::Deserialize;

use crate::error::Error;
use crate::ghost::{self, GHOST_THRESHOLD};
use crate::numtheory::Natural;
use crate::output::{render_rows, OutputError, OutputFormat, ResultRow, Table};
use crate::rng::sample_without_replacement;
use crate::sums::{curlicue_term, CompensatedSum, SumSpec};

/// The shipped defaults.
pub const DEFAULT_CONFIG: &str = include_str!("../config/figures.toml");

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub version: u32,
    pub figure1: Figure1,
    pub figure2: Figure2,
    pub figure3: Figure3,
    pub figure4: Figure4,
    pub figure5: Figure5,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure1 {
    pub epsilons: Vec<f64>,
    pub order: u32,
    pub m_max: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure2 {
    pub epsilon: f64,
    pub truncations: Vec<u64>,
    pub random_count: u64,
    pub random_m_max: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure3 {
    pub n: Natural,
    pub l_min: Natural,
    pub l_max: Natural,
    pub upper_truncation: u64,
    pub random_count: u64,
    pub random_m_max: u64,
    pub seed: u64,
    pub lower_order: u32,
    pub lower_truncation: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure4 {
    pub n: Natural,
    pub l_min: Natural,
    pub l_max: Natural,
    pub random_count: u64,
    pub random_m_max: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Figure5 {
    pub epsilon: f64,
    pub orders: Vec<u32>,
    pub m_max: u64,
}

impl FigureConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("shipped figure config parses")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FigureError {
    #[error("unknown figure {0}; expected 1 to 5")]
    UnknownFigure(u8),
    #[error("figure {figure}: {source}")]
    Numeric { figure: u8, source: Error },
    #[error(transparent)]
    Output(#[from] OutputError),
}

/// One output file of a figure reproduction.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureFile {
    pub name: String,
    pub contents: String,
}

fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

/// Generates every data file for `figure`.
pub fn reproduce(figure: u8, config: &FigureConfig, format: OutputFormat) -> Result<Vec<FigureFile>, FigureError> {
    let numeric = |source: Error| FigureError::Numeric { figure, source };
    let tables: Vec<(String, String)> = match figure {
        1 => figure1(&config.figure1).map_err(numeric)?,
        2 => figure2(&config.figure2).map_err(numeric)?,
        3 => return figure3(&config.figure3, format).map_err(|e| lift(e, figure)),
        4 => return figure4(&config.figure4, format).map_err(|e| lift(e, figure)),
        5 => figure5(&config.figure5).map_err(numeric)?,
        other => return Err(FigureError::UnknownFigure(other)),
    }
    .into_iter()
    .map(|(name, table)| table.render(format).map(|text| (name, text)))
    .collect::<Result<_, _>>()?;

    Ok(tables
        .into_iter()
        .map(|(name, contents)| FigureFile {
            name: format!("{name}.{}", extension(format)),
            contents,
        })
        .collect())
}

fn lift(e: FigureError, figure: u8) -> FigureError {
    match e {
        FigureError::Numeric { source, .. } => FigureError::Numeric { figure, source },
        other => other,
    }
}

/// Magnitude of `s_M(ε)` for every `M` in `0..=m_max`.
fn curve(epsilon: f64, order: u32, m_max: u64) -> Vec<f64> {
    let mut acc = CompensatedSum::default();
    (0..=m_max)
        .map(|m| {
            acc.add(curlicue_term(epsilon, m, order));
            acc.normalized().magnitude
        })
        .collect()
}

fn figure1(cfg: &Figure1) -> Result<Vec<(String, Table)>, Error> {
    let mut curves = Table::new(vec!["epsilon", "m", "magnitude"]);
    let mut suppression = Table::new(vec!["epsilon", "required_m", "inverse_sqrt_epsilon"]);
    for &eps in &cfg.epsilons {
        crate::sums::curlicue(eps, cfg.order, 0)?;
        for (m, mag) in curve(eps, cfg.order, cfg.m_max).into_iter().enumerate() {
            curves.push(vec![eps.into(), (m as u64).into(), mag.into()]);
        }
        let required = ghost::min_suppression_m(eps, cfg.order, GHOST_THRESHOLD, ghost::DEFAULT_M_CAP)?;
        suppression.push(vec![eps.into(), required.into(), (1.0 / eps.abs().sqrt()).into()]);
    }
    Ok(vec![
        ("figure1".to_string(), curves),
        ("figure1_suppression".to_string(), suppression),
    ])
}

fn figure2(cfg: &Figure2) -> Result<Vec<(String, Table)>, Error> {
    crate::sums::curlicue(cfg.epsilon, 2, 0)?;
    let mut series: Vec<(String, Vec<u64>)> = cfg
        .truncations
        .iter()
        .map(|&m| (format!("M={m}"), (0..=m).collect()))
        .collect();
    series.push((
        "random".to_string(),
        sample_without_replacement(cfg.random_count, cfg.random_m_max, cfg.seed)?,
    ));

    let mut terms = Table::new(vec!["series", "m", "phase", "re", "im"]);
    let mut sums = Table::new(vec!["series", "term_count", "re", "im", "magnitude"]);
    for (label, ms) in &series {
        let mut acc = CompensatedSum::default();
        for &m in ms {
            let z = curlicue_term(cfg.epsilon, m, 2);
            acc.add(z);
            terms.push(vec![
                label.as_str().into(),
                m.into(),
                z.arg().into(),
                z.re.into(),
                z.im.into(),
            ]);
        }
        let s = acc.normalized();
        sums.push(vec![
            label.as_str().into(),
            s.term_count.into(),
            s.re.into(),
            s.im.into(),
            s.magnitude.into(),
        ]);
    }
    Ok(vec![
        ("figure2_terms".to_string(), terms),
        ("figure2_sums".to_string(), sums),
    ])
}

fn scan_rows(n: &Natural, l_min: &Natural, l_max: &Natural, spec: &SumSpec) -> Result<Vec<ResultRow>, Error> {
    Ok(ghost::scan_window(n, l_min, l_max, spec)?
        .iter()
        .map(ResultRow::from_trial)
        .collect())
}

fn figure3(cfg: &Figure3, format: OutputFormat) -> Result<Vec<FigureFile>, FigureError> {
    let numeric = |source| FigureError::Numeric { figure: 3, source };
    let traces = [
        ("figure3_upper", SumSpec::full(2, cfg.upper_truncation)),
        (
            "figure3_middle",
            SumSpec::randomized(2, cfg.random_count, cfg.random_m_max, cfg.seed),
        ),
        ("figure3_lower", SumSpec::full(cfg.lower_order, cfg.lower_truncation)),
    ];
    traces
        .into_iter()
        .map(|(name, spec)| {
            let spec = spec.map_err(numeric)?;
            let rows = scan_rows(&cfg.n, &cfg.l_min, &cfg.l_max, &spec).map_err(numeric)?;
            Ok(FigureFile {
                name: format!("{name}.{}", extension(format)),
                contents: render_rows(&rows, format)?,
            })
        })
        .collect()
}

fn figure4(cfg: &Figure4, format: OutputFormat) -> Result<Vec<FigureFile>, FigureError> {
    let numeric = |source| FigureError::Numeric { figure: 4, source };
    let spec = SumSpec::randomized(2, cfg.random_count, cfg.random_m_max, cfg.seed).map_err(numeric)?;
    let rows = scan_rows(&cfg.n, &cfg.l_min, &cfg.l_max, &spec).map_err(numeric)?;
    Ok(vec![FigureFile {
        name: format!("figure4.{}", extension(format)),
        contents: render_rows(&rows, format)?,
    }])
}

fn figure5(cfg: &Figure5) -> Result<Vec<(String, Table)>, Error> {
    let mut curves = Table::new(vec!["order", "m", "magnitude"]);
    let mut suppression = Table::new(vec!["order", "required_m"]);
    for &order in &cfg.orders {
        crate::sums::curlicue(cfg.epsilon, order, 0)?;
        for (m, mag) in curve(cfg.epsilon, order, cfg.m_max).into_iter().enumerate() {
            curves.push(vec![u64::from(order).into(), (m as u64).into(), mag.into()]);
        }
        let required = ghost::min_suppression_m(cfg.epsilon, order, GHOST_THRESHOLD, ghost::DEFAULT_M_CAP)?;
        suppression.push(vec![u64::from(order).into(), required.into()]);
    }
    Ok(vec![
        ("figure5".to_string(), curves),
        ("figure5_suppression".to_string(), suppression),
    ])
}
