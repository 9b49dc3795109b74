use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use super::PipelineError;
use crate::asymptotics::{default_windows, Window};
use crate::recognition::{default_symbols, unit_entry_default, SearchSchedule, Symbol};

/// Numeric parameters of one per-degree run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeParams {
    pub max_order: usize,
    pub dps: u32,
    pub richardson_order: usize,
    pub pslq_maxcoeff: u64,
}

/// Production parameters for `M = 2 … 11`; larger `M` reuse the `M = 11` row.
pub fn standard_params(m: u32) -> DegreeParams {
    let (max_order, dps, richardson_order, pslq_maxcoeff) = match m {
        2 => (500, 200, 40, 200),
        3 => (500, 200, 60, 200),
        4 => (1200, 300, 100, 2000),
        5 => (600, 200, 80, 200),
        6 => (500, 200, 80, 200),
        7 => (400, 180, 80, 200),
        8 | 9 => (300, 180, 60, 200),
        10 => (250, 160, 50, 300),
        _ => (250, 160, 50, 200),
    };
    DegreeParams {
        max_order,
        dps,
        richardson_order,
        pslq_maxcoeff,
    }
}

/// Reduced parameters for quick runs: orders / 4 and dps / 2 with floors of
/// 50 orders and 60 digits, except `M = 2, 3` (300 orders, 150 digits) and
/// `M = 4` (400 orders, 200 digits), which keep enough orders to resolve
/// the multiplier well past 15 digits. The Richardson order is capped at a
/// quarter of the orders.
pub fn desk_params(m: u32) -> DegreeParams {
    let p = standard_params(m);
    let (max_order, dps) = match m {
        2 | 3 => (300, 150),
        4 => (400, 200),
        _ => ((p.max_order / 4).max(50), (p.dps / 2).max(60)),
    };
    DegreeParams {
        max_order,
        dps,
        richardson_order: p.richardson_order.min(max_order / 4),
        pslq_maxcoeff: p.pslq_maxcoeff,
    }
}

/// `(2K/3, N)` and `(4K/5, N)`, each pulled back to `K - N` if it overruns.
pub fn desk_windows(k_max: usize, n: usize) -> Vec<Window> {
    let mut out: Vec<Window> = Vec::new();
    for k0 in [2 * k_max / 3, 4 * k_max / 5] {
        let w = Window::new(k0.min(k_max.saturating_sub(n)), n);
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// Optional per-degree settings; unset fields fall through to the next layer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Overrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dps: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub richardson_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pslq_maxcoeff: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start_indices: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub include_unit: Option<bool>,
}

impl Overrides {
    fn merge(&mut self, other: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if other.$f.is_some() {
                    self.$f = other.$f.clone();
                }
            )*};
        }
        take!(
            max_order,
            dps,
            richardson_order,
            pslq_maxcoeff,
            start_indices,
            include_unit
        );
    }

    fn set(&mut self, key: &str, value: &toml::Value, at: &str) -> Result<(), PipelineError> {
        let bad =
            |what: &str| PipelineError::Config(format!("{at}{key}: expected {what}, got {value}"));
        let int = || {
            value
                .as_integer()
                .filter(|v| *v >= 0)
                .ok_or_else(|| bad("a non-negative integer"))
        };
        match key {
            "max_order" => self.max_order = Some(int()? as usize),
            "dps" => self.dps = Some(u32::try_from(int()?).map_err(|_| bad("a digit count"))?),
            "richardson_order" => self.richardson_order = Some(int()? as usize),
            "pslq_maxcoeff" => self.pslq_maxcoeff = Some(int()? as u64),
            "include_unit" => {
                self.include_unit = Some(value.as_bool().ok_or_else(|| bad("a boolean"))?)
            }
            "start_indices" => {
                let arr = value
                    .as_array()
                    .ok_or_else(|| bad("an array of integers"))?;
                let v = arr
                    .iter()
                    .map(|x| x.as_integer().filter(|v| *v >= 1).map(|v| v as usize))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad("an array of positive integers"))?;
                self.start_indices = Some(v);
            }
            _ => return Err(PipelineError::Config(format!("{at}unknown key {key:?}"))),
        }
        Ok(())
    }
}

/// Everything `run_pipeline` needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub m_range: Vec<u32>,
    /// Applied to every degree, before `per_m`.
    pub global: Overrides,
    pub per_m: BTreeMap<u32, Overrides>,
    pub out_dir: PathBuf,
    pub parallelism: usize,
    pub desk_scale: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            m_range: (2..=11).collect(),
            global: Overrides::default(),
            per_m: BTreeMap::new(),
            out_dir: PathBuf::from("stokes-out"),
            parallelism: 1,
            desk_scale: false,
        }
    }
}

/// Parses `"2-11"`, `"2,3,5"` or a single degree.
pub fn parse_m_range(s: &str) -> Result<Vec<u32>, PipelineError> {
    let bad = || PipelineError::Config(format!("bad M range {s:?}"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once('-') {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

impl RunConfig {
    /// Reads a config file: top-level keys plus `[M4]`-style sections, e.g.
    ///
    /// ```toml
    /// M_range = "2-5"
    /// desk_scale = true
    /// parallelism = 2
    /// dps = 120
    ///
    /// [M4]
    /// max_order = 600
    /// start_indices = [300, 360]
    /// ```
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| PipelineError::Config(e.to_string()))?;
        let mut cfg = RunConfig::default();
        for (key, value) in &table {
            let bad =
                |what: &str| PipelineError::Config(format!("{key}: expected {what}, got {value}"));
            match key.as_str() {
                "M_range" => {
                    cfg.m_range = match value {
                        toml::Value::String(s) => parse_m_range(s)?,
                        toml::Value::Array(a) => a
                            .iter()
                            .map(|v| v.as_integer().and_then(|i| u32::try_from(i).ok()))
                            .collect::<Option<Vec<_>>>()
                            .ok_or_else(|| bad("integers"))?,
                        toml::Value::Integer(i) => {
                            vec![u32::try_from(*i).map_err(|_| bad("a degree"))?]
                        }
                        _ => return Err(bad("a range string or an array")),
                    }
                }
                "out_dir" => {
                    cfg.out_dir = PathBuf::from(value.as_str().ok_or_else(|| bad("a path"))?)
                }
                "parallelism" => {
                    cfg.parallelism = value
                        .as_integer()
                        .filter(|v| *v >= 1)
                        .ok_or_else(|| bad("a positive integer"))?
                        as usize
                }
                "desk_scale" => cfg.desk_scale = value.as_bool().ok_or_else(|| bad("a boolean"))?,
                k if k.starts_with('M') && value.is_table() => {
                    let m: u32 = k[1..]
                        .parse()
                        .map_err(|_| PipelineError::Config(format!("bad section name [{k}]")))?;
                    let entry = cfg.per_m.entry(m).or_default();
                    for (sub, v) in value.as_table().expect("checked") {
                        entry.set(sub, v, &format!("[{k}] "))?;
                    }
                }
                _ => cfg.global.set(key, value, "")?,
            }
        }
        Ok(cfg)
    }

    /// Resolved parameters for every degree in range, validated.
    pub fn resolve(&self) -> Result<Vec<ResolvedParams>, PipelineError> {
        if self.parallelism == 0 {
            return Err(PipelineError::Config(
                "parallelism must be at least 1".into(),
            ));
        }
        self.m_range.iter().map(|&m| self.resolve_one(m)).collect()
    }

    pub fn resolve_one(&self, m: u32) -> Result<ResolvedParams, PipelineError> {
        let err = |msg: String| PipelineError::Config(format!("M={m}: {msg}"));
        if m < 2 {
            return Err(err("M must be at least 2".into()));
        }
        let base = if self.desk_scale {
            desk_params(m)
        } else {
            standard_params(m)
        };
        let mut o = self.global.clone();
        if let Some(p) = self.per_m.get(&m) {
            o.merge(p);
        }
        let params = DegreeParams {
            max_order: o.max_order.unwrap_or(base.max_order),
            dps: o.dps.unwrap_or(base.dps),
            richardson_order: o.richardson_order.unwrap_or(base.richardson_order),
            pslq_maxcoeff: o.pslq_maxcoeff.unwrap_or(base.pslq_maxcoeff),
        };
        if params.dps < 15 {
            return Err(err(format!("dps must be at least 15, got {}", params.dps)));
        }
        if params.max_order < 10 {
            return Err(err(format!(
                "max_order must be at least 10, got {}",
                params.max_order
            )));
        }
        if params.richardson_order == 0 {
            return Err(err("richardson_order must be positive".into()));
        }
        if params.pslq_maxcoeff == 0 {
            return Err(err("pslq_maxcoeff must be positive".into()));
        }
        let (k, n) = (params.max_order, params.richardson_order);
        let windows = match &o.start_indices {
            Some(starts) => starts.iter().map(|&k0| Window::new(k0, n)).collect(),
            None if self.desk_scale => desk_windows(k, n),
            None => {
                let w = default_windows(k, n, 1);
                if w.len() >= 2 {
                    w
                } else {
                    desk_windows(k, n)
                }
            }
        };
        if windows.len() < 2 {
            return Err(err(
                "at least two distinct Richardson windows are needed".into()
            ));
        }
        if let Some(w) = windows.iter().find(|w| w.k0 < 2 || w.k0 + w.n > k) {
            return Err(err(format!(
                "window k0={} N={} does not fit orders 2..={k}",
                w.k0, w.n
            )));
        }
        let include_unit = o.include_unit.unwrap_or_else(|| unit_entry_default(m));
        let symbols = default_symbols(m, include_unit);
        Ok(ResolvedParams {
            m,
            params,
            windows,
            basis: symbols.iter().map(Symbol::log_label).collect(),
            symbols,
            schedule: schedule_for(params.pslq_maxcoeff),
        })
    }
}

/// Coefficient ladder `200, 500, 1000, 2000` up to `maxcoeff`, always ending
/// at `maxcoeff` itself, over working precisions 30, 35 and 40 digits.
pub fn schedule_for(maxcoeff: u64) -> SearchSchedule {
    let mut maxcoeffs: Vec<u64> = SearchSchedule::default()
        .maxcoeffs
        .into_iter()
        .filter(|&c| c < maxcoeff)
        .collect();
    maxcoeffs.push(maxcoeff);
    SearchSchedule {
        maxcoeffs,
        ..SearchSchedule::default()
    }
}

/// Fully resolved settings for one degree; embedded verbatim in reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResolvedParams {
    #[serde(rename = "M")]
    pub m: u32,
    #[serde(flatten)]
    pub params: DegreeParams,
    pub windows: Vec<Window>,
    pub basis: Vec<String>,
    #[serde(skip)]
    pub symbols: Vec<Symbol>,
    pub schedule: SearchSchedule,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_m_range("2-5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_m_range("7, 3,3").unwrap(), vec![3, 7]);
        assert!(parse_m_range("").unwrap().is_empty());
        assert!(parse_m_range("5-2").is_err());
        assert!(parse_m_range("x").is_err());
    }

    #[test]
    fn desk_scale_rules() {
        assert_eq!(desk_params(2).max_order, 300);
        assert_eq!(desk_params(2).richardson_order, 40);
        assert_eq!(
            desk_params(4),
            DegreeParams {
                max_order: 400,
                dps: 200,
                richardson_order: 100,
                pslq_maxcoeff: 2000
            }
        );
        assert_eq!(
            desk_params(10),
            DegreeParams {
                max_order: 62,
                dps: 80,
                richardson_order: 15,
                pslq_maxcoeff: 300
            }
        );
        assert_eq!(
            desk_windows(300, 40),
            vec![Window::new(200, 40), Window::new(240, 40)]
        );
        assert_eq!(
            desk_windows(400, 100),
            vec![Window::new(266, 100), Window::new(300, 100)]
        );
    }

    #[test]
    fn toml_layers() {
        let cfg = RunConfig::from_toml(
            "M_range = \"2-4\"\ndesk_scale = true\ndps = 120\n[M4]\nmax_order = 600\nstart_indices = [300, 360]\ninclude_unit = true\n",
        )
        .unwrap();
        let r = cfg.resolve().unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(r[0].params.dps, 120);
        assert_eq!(r[2].params.max_order, 600);
        assert_eq!(
            r[2].windows,
            vec![Window::new(300, 100), Window::new(360, 100)]
        );
        assert_eq!(r[2].basis.last().map(String::as_str), Some("1"));
    }

    #[test]
    fn invalid_configs() {
        assert!(RunConfig::from_toml("bogus = 1").is_err());
        assert!(RunConfig::from_toml("[M4]\ndps = \"high\"").is_err());
        let low = RunConfig::from_toml("M_range = [2]\ndps = 10").unwrap();
        assert!(low.resolve().is_err());
        let m1 = RunConfig::from_toml("M_range = [1]").unwrap();
        assert!(m1.resolve().is_err());
        let short = RunConfig::from_toml("M_range = [2]\nmax_order = 5").unwrap();
        assert!(short.resolve().is_err());
        let overrun =
            RunConfig::from_toml("M_range = [2]\nmax_order = 100\nstart_indices = [50, 90]")
                .unwrap();
        assert!(overrun.resolve().is_err());
    }

    #[test]
    fn standard_windows() {
        let cfg = RunConfig {
            m_range: vec![4],
            ..RunConfig::default()
        };
        let r = cfg.resolve_one(4).unwrap();
        assert_eq!(
            r.windows,
            vec![
                Window::new(600, 100),
                Window::new(720, 100),
                Window::new(740, 100)
            ]
        );
        assert_eq!(r.schedule.maxcoeffs, vec![200, 500, 1000, 2000]);
        assert_eq!(schedule_for(300).maxcoeffs, vec![200, 300]);
        assert_eq!(schedule_for(200).maxcoeffs, vec![200]);
    }
}
