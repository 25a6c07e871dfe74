//! Eruption-duration catalogs: parsing, validation and summaries.
//!
//! The CSV layout is
//!
//! ```text
//! volcano,start_year,duration_yr,status,class,silica_pct
//! SINABUNG,2013.71,1.49,ongoing,intermediate,58.0
//! ```
//!
//! `status` is `completed` or `ongoing` (the latter marks a right-censored
//! duration), `class` is `mafic`, `intermediate` or `evolved`, and
//! `silica_pct` may be left empty. Lines starting with `#` are comments; a
//! comment of the form `# as_of: <date>` records the date the statuses refer
//! to.

mod fixture;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fixture::{load_fixture_long_durations, LongDuration};

pub const CSV_HEADER: [&str; 6] = [
    "volcano",
    "start_year",
    "duration_yr",
    "status",
    "class",
    "silica_pct",
];

/// Plausible silica range, in percent SiO₂.
pub const SILICA_BOUNDS: (f64, f64) = (30.0, 90.0);

pub const DAYS_PER_YEAR: f64 = 365.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompositionClass {
    Mafic,
    Intermediate,
    Evolved,
}

impl CompositionClass {
    pub const ALL: [CompositionClass; 3] = [
        CompositionClass::Mafic,
        CompositionClass::Intermediate,
        CompositionClass::Evolved,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CompositionClass::Mafic => "mafic",
            CompositionClass::Intermediate => "intermediate",
            CompositionClass::Evolved => "evolved",
        }
    }
}

impl fmt::Display for CompositionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompositionClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mafic" => Ok(CompositionClass::Mafic),
            "intermediate" => Ok(CompositionClass::Intermediate),
            "evolved" => Ok(CompositionClass::Evolved),
            other => Err(format!("unknown composition class {other:?}")),
        }
    }
}

/// One catalog row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EruptionRecord {
    pub volcano_name: String,
    pub start_year: f64,
    /// Years. For a censored record this is only a lower bound.
    pub duration: f64,
    /// True when the eruption was still ongoing at the catalog date.
    pub censored: bool,
    pub composition_class: CompositionClass,
    pub silica_pct: Option<f64>,
}

impl EruptionRecord {
    pub fn new(
        volcano_name: impl Into<String>,
        start_year: f64,
        duration: f64,
        censored: bool,
        composition_class: CompositionClass,
        silica_pct: Option<f64>,
    ) -> Result<Self> {
        let record = EruptionRecord {
            volcano_name: volcano_name.into(),
            start_year,
            duration,
            censored,
            composition_class,
            silica_pct,
        };
        record.validate().map_err(Error::InvalidRecord)?;
        Ok(record)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(format!("duration must be positive, got {}", self.duration));
        }
        if !self.start_year.is_finite() {
            return Err(format!("start_year must be finite, got {}", self.start_year));
        }
        if let Some(x) = self.silica_pct {
            if !(SILICA_BOUNDS.0..=SILICA_BOUNDS.1).contains(&x) {
                return Err(format!(
                    "silica_pct {x} outside [{}, {}]",
                    SILICA_BOUNDS.0, SILICA_BOUNDS.1
                ));
            }
        }
        Ok(())
    }

    /// 1 for a completed eruption, 0 for an ongoing one.
    pub fn uncensored_indicator(&self) -> f64 {
        if self.censored {
            0.0
        } else {
            1.0
        }
    }
}

/// An immutable, non-empty, ordered collection of eruption records.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    records: Vec<EruptionRecord>,
    as_of_date: Option<String>,
}

impl Catalog {
    pub fn new(records: Vec<EruptionRecord>, as_of_date: Option<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        Ok(Catalog {
            records,
            as_of_date,
        })
    }

    pub fn records(&self) -> &[EruptionRecord] {
        &self.records
    }

    pub fn as_of_date(&self) -> Option<&str> {
        self.as_of_date.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// n₁, the number of completed (uncensored) records.
    pub fn n_uncensored(&self) -> usize {
        self.records.iter().filter(|r| !r.censored).count()
    }

    /// n₀, the number of ongoing (censored) records.
    pub fn n_censored(&self) -> usize {
        self.records.iter().filter(|r| r.censored).count()
    }

    fn filtered(&self, keep: impl Fn(&EruptionRecord) -> bool) -> Result<Catalog> {
        Catalog::new(
            self.records.iter().filter(|r| keep(r)).cloned().collect(),
            self.as_of_date.clone(),
        )
    }

    /// Records of one composition class; `EmptyCatalog` if there are none.
    pub fn for_class(&self, class: CompositionClass) -> Result<Catalog> {
        self.filtered(|r| r.composition_class == class)
    }

    pub fn completed_only(&self) -> Result<Catalog> {
        self.filtered(|r| !r.censored)
    }

    pub fn concat(&self, other: &Catalog) -> Catalog {
        let mut records = self.records.clone();
        records.extend(other.records.iter().cloned());
        Catalog {
            records,
            as_of_date: self.as_of_date.clone(),
        }
    }

    /// Silica values in record order, or the first record lacking one.
    pub fn silica(&self) -> Result<Vec<f64>> {
        self.records
            .iter()
            .enumerate()
            .map(|(index, r)| {
                r.silica_pct.ok_or_else(|| Error::MissingSilica {
                    index,
                    volcano: r.volcano_name.clone(),
                })
            })
            .collect()
    }

    /// Rescales every duration from days to years.
    pub fn durations_in_days_to_years(&self) -> Catalog {
        let records = self
            .records
            .iter()
            .map(|r| EruptionRecord {
                duration: r.duration / DAYS_PER_YEAR,
                ..r.clone()
            })
            .collect();
        Catalog {
            records,
            as_of_date: self.as_of_date.clone(),
        }
    }

    pub fn summarize(&self) -> CatalogSummary {
        summarize(self)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut out = writer;
        if let Some(date) = &self.as_of_date {
            writeln!(out, "# as_of: {date}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.volcano_name.clone(),
                r.start_year.to_string(),
                r.duration.to_string(),
                if r.censored { "ongoing" } else { "completed" }.to_string(),
                r.composition_class.to_string(),
                r.silica_pct.map(|x| x.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing a catalog to memory cannot fail");
        String::from_utf8(buf).expect("catalog CSV is UTF-8")
    }
}

/// Parses catalog CSV text. Row order is preserved.
pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let as_of_date = text.lines().find_map(|line| {
        line.trim_start()
            .strip_prefix('#')
            .and_then(|rest| rest.trim().strip_prefix("as_of:"))
            .map(|d| d.trim().to_string())
    });

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());

    let header_line = reader.position().line();
    let headers = reader.headers()?.clone();
    let header: Vec<&str> = headers.iter().collect();
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: header_line.max(1),
            message: format!("expected header {:?}, found {:?}", CSV_HEADER.join(","), header.join(",")),
        });
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let err = |message: String| Error::Parse { line, message };
        if row.len() != CSV_HEADER.len() {
            return Err(err(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                row.len()
            )));
        }
        let number = |field: &str, name: &str| {
            field
                .parse::<f64>()
                .map_err(|_| err(format!("{name}: not a number: {field:?}")))
        };
        let start_year = number(&row[1], "start_year")?;
        let duration = number(&row[2], "duration_yr")?;
        let censored = match row[3].to_ascii_lowercase().as_str() {
            "completed" => false,
            "ongoing" => true,
            other => return Err(err(format!("status must be completed or ongoing, got {other:?}"))),
        };
        let composition_class = row[4].parse::<CompositionClass>().map_err(err)?;
        let silica_pct = if row[5].is_empty() {
            None
        } else {
            Some(number(&row[5], "silica_pct")?)
        };
        let record = EruptionRecord {
            volcano_name: row[0].to_string(),
            start_year,
            duration,
            censored,
            composition_class,
            silica_pct,
        };
        record.validate().map_err(err)?;
        records.push(record);
    }
    Catalog::new(records, as_of_date)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub class: CompositionClass,
    pub total: usize,
    pub completed: usize,
    pub ongoing: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogSummary {
    pub total: usize,
    pub completed: usize,
    pub ongoing: usize,
    pub by_class: Vec<ClassCounts>,
}

pub fn summarize(catalog: &Catalog) -> CatalogSummary {
    let by_class = CompositionClass::ALL
        .iter()
        .map(|&class| {
            let (mut completed, mut ongoing) = (0, 0);
            for r in catalog.records().iter().filter(|r| r.composition_class == class) {
                if r.censored {
                    ongoing += 1;
                } else {
                    completed += 1;
                }
            }
            ClassCounts {
                class,
                total: completed + ongoing,
                completed,
                ongoing,
            }
        })
        .collect();
    CatalogSummary {
        total: catalog.len(),
        completed: catalog.n_uncensored(),
        ongoing: catalog.n_censored(),
        by_class,
    }
}
