//! Experiment configuration in TOML.
//!
//! ```toml
//! [grid]
//! nx = 64          # ny, nz default to nx
//! lx = 32.0
//! pitch = 1.0
//!
//! [physics]
//! a = 1.0
//! c0 = 1.0
//!
//! [initial]
//! kind = "perturbed-oseen"   # oseen-only | shear | lamb2d | perturbed-oseen
//! seed = 1
//! amplitude = 0.1
//! modes = [0, 1, 2]
//! sigma = 2.0
//! m = 1.5
//!
//! [time]
//! t_end = 1.0
//! cfl = 0.4
//! dt_max = 0.05
//! output_dt = 0.1
//! # dt = 0.01      # fixed step instead of CFL control
//!
//! [output]
//! csv = "diagnostics.csv"
//! snapshot_every = 0   # outputs between snapshots; 0 disables them
//! snapshot_dir = "snapshots"
//!
//! [study]
//! preset = "theorem-trend"
//! m_list = [1.5, 1.2]
//! seed_count = 100
//! ```
//!
//! Every section and key is optional. Parsing reports every problem at
//! once: unknown sections and keys, type mismatches and out-of-range values.

use toml::{Table, Value};

use crate::analytic::{PerturbationSpec, MIN_CELLS_PER_SIGMA};
use crate::error::{ConfigIssue, Error, Result};
use crate::grid::{GridSpec, MIN_POINTS};
use crate::solver::{DtPolicy, SolverConfig};

/// Largest accepted sample count per axis.
pub const MAX_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    OseenOnly,
    Shear,
    Lamb2d,
    PerturbedOseen,
}

impl InitialKind {
    pub const ALL: [InitialKind; 4] = [
        InitialKind::OseenOnly,
        InitialKind::Shear,
        InitialKind::Lamb2d,
        InitialKind::PerturbedOseen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitialKind::OseenOnly => "oseen-only",
            InitialKind::Shear => "shear",
            InitialKind::Lamb2d => "lamb2d",
            InitialKind::PerturbedOseen => "perturbed-oseen",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub lx: f64,
    pub pitch: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicsSection {
    pub a: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialSection {
    pub kind: InitialKind,
    pub seed: u64,
    pub amplitude: f64,
    pub modes: Vec<u32>,
    /// Envelope width of the perturbation; core width for `lamb2d`.
    pub sigma: f64,
    /// Weight exponent of `L²_m`.
    pub m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSection {
    pub t_end: f64,
    pub cfl: f64,
    pub dt_max: f64,
    pub dt: Option<f64>,
    pub output_dt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSection {
    pub csv: String,
    pub snapshot_every: usize,
    pub snapshot_dir: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudySection {
    pub preset: Option<String>,
    pub m_list: Vec<f64>,
    pub seed_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub physics: PhysicsSection,
    pub initial: InitialSection,
    pub time: TimeSection,
    pub output: OutputSection,
    pub study: StudySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridSection { nx: 64, ny: 64, nz: 64, lx: 32.0, pitch: 1.0 },
            physics: PhysicsSection { a: 1.0, c0: 1.0 },
            initial: InitialSection {
                kind: InitialKind::PerturbedOseen,
                seed: 1,
                amplitude: 0.1,
                modes: vec![0, 1, 2],
                sigma: 2.0,
                m: 1.5,
            },
            time: TimeSection { t_end: 1.0, cfl: 0.4, dt_max: 0.05, dt: None, output_dt: 0.1 },
            output: OutputSection {
                csv: "diagnostics.csv".into(),
                snapshot_every: 0,
                snapshot_dir: "snapshots".into(),
            },
            study: StudySection { preset: None, m_list: vec![1.5, 1.2], seed_count: 100 },
        }
    }
}

const SECTIONS: [&str; 6] = ["grid", "physics", "initial", "time", "output", "study"];

/// Pulls typed values out of one section, recording every problem.
struct Section<'a> {
    name: &'static str,
    table: Table,
    issues: &'a mut Vec<ConfigIssue>,
}

impl<'a> Section<'a> {
    fn issue(&mut self, key: &str, message: String) {
        self.issues.push(ConfigIssue { section: self.name.into(), key: key.into(), message });
    }

    fn float(&mut self, key: &str, default: f64) -> f64 {
        match self.table.remove(key) {
            None => default,
            Some(Value::Float(x)) => x,
            Some(Value::Integer(i)) => i as f64,
            Some(v) => {
                self.issue(key, format!("expected a number, found {}", v.type_str()));
                default
            }
        }
    }

    fn opt_float(&mut self, key: &str) -> Option<f64> {
        if self.table.contains_key(key) {
            Some(self.float(key, f64::NAN))
        } else {
            None
        }
    }

    fn int(&mut self, key: &str, default: i64) -> i64 {
        match self.table.remove(key) {
            None => default,
            Some(Value::Integer(i)) => i,
            Some(v) => {
                self.issue(key, format!("expected an integer, found {}", v.type_str()));
                default
            }
        }
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        match self.table.remove(key) {
            None => default.into(),
            Some(Value::String(s)) => s,
            Some(v) => {
                self.issue(key, format!("expected a string, found {}", v.type_str()));
                default.into()
            }
        }
    }

    fn floats(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.table.remove(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) => {
                let mut out = Vec::with_capacity(a.len());
                for v in a {
                    match v {
                        Value::Float(x) => out.push(x),
                        Value::Integer(i) => out.push(i as f64),
                        other => {
                            self.issue(key, format!("expected numbers, found {}", other.type_str()));
                            return default.to_vec();
                        }
                    }
                }
                out
            }
            Some(v) => {
                self.issue(key, format!("expected an array, found {}", v.type_str()));
                default.to_vec()
            }
        }
    }

    fn ints(&mut self, key: &str, default: &[i64]) -> Vec<i64> {
        match self.table.remove(key) {
            None => default.to_vec(),
            Some(Value::Array(a)) => {
                let mut out = Vec::with_capacity(a.len());
                for v in a {
                    match v {
                        Value::Integer(i) => out.push(i),
                        other => {
                            self.issue(key, format!("expected integers, found {}", other.type_str()));
                            return default.to_vec();
                        }
                    }
                }
                out
            }
            Some(v) => {
                self.issue(key, format!("expected an array, found {}", v.type_str()));
                default.to_vec()
            }
        }
    }

    fn check(&mut self, key: &str, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            let m = message();
            self.issue(key, m);
        }
    }

    fn finish(self) {
        let Section { name, table, issues } = self;
        for key in table.keys() {
            issues.push(ConfigIssue {
                section: name.into(),
                key: key.clone(),
                message: "unknown key".into(),
            });
        }
    }
}

fn count(s: &mut Section, key: &str, default: usize) -> usize {
    let v = s.int(key, default as i64);
    s.check(key, v >= MIN_POINTS as i64 && v <= MAX_POINTS as i64 && v % 2 == 0, || {
        format!("{key} = {v}: grid sample counts must be even and in [{MIN_POINTS}, {MAX_POINTS}]")
    });
    v.clamp(0, MAX_POINTS as i64) as usize
}

impl ExperimentConfig {
    /// Parses and validates, reporting every violation.
    pub fn parse(text: &str) -> Result<Self> {
        let mut root: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(format!("TOML syntax: {e}")))?;
        let mut issues = Vec::new();
        let d = ExperimentConfig::default();

        let mut take = |name: &'static str, issues: &mut Vec<ConfigIssue>| -> Table {
            match root.remove(name) {
                None => Table::new(),
                Some(Value::Table(t)) => t,
                Some(v) => {
                    issues.push(ConfigIssue {
                        section: name.into(),
                        key: String::new(),
                        message: format!("expected a table, found {}", v.type_str()),
                    });
                    Table::new()
                }
            }
        };
        let tables: Vec<Table> = SECTIONS.iter().map(|s| take(s, &mut issues)).collect();
        for key in root.keys() {
            issues.push(ConfigIssue {
                section: key.clone(),
                key: String::new(),
                message: format!("unknown section (expected one of {})", SECTIONS.join(", ")),
            });
        }
        let mut tables = tables.into_iter();

        // [grid]
        let mut s = Section { name: "grid", table: tables.next().unwrap(), issues: &mut issues };
        let nx = count(&mut s, "nx", d.grid.nx);
        let ny = count(&mut s, "ny", nx);
        let nz = count(&mut s, "nz", nx);
        let lx = s.float("lx", d.grid.lx);
        s.check("lx", lx.is_finite() && lx > 0.0, || format!("lx = {lx} must be > 0"));
        let pitch = s.float("pitch", d.grid.pitch);
        s.check("pitch", pitch.is_finite() && pitch > 0.0, || format!("pitch = {pitch} must be > 0"));
        s.finish();
        let grid = GridSection { nx, ny, nz, lx, pitch };

        // [physics]
        let mut s = Section { name: "physics", table: tables.next().unwrap(), issues: &mut issues };
        let a = s.float("a", d.physics.a);
        s.check("a", a.is_finite(), || format!("a = {a} must be finite"));
        let c0 = s.float("c0", d.physics.c0);
        s.check("c0", c0.is_finite() && c0 > 0.0, || format!("c0 = {c0} must be > 0"));
        s.finish();
        let physics = PhysicsSection { a, c0 };

        // [initial]
        let mut s = Section { name: "initial", table: tables.next().unwrap(), issues: &mut issues };
        let kind_name = s.string("kind", d.initial.kind.name());
        let kind = InitialKind::parse(&kind_name).unwrap_or_else(|| {
            let names: Vec<_> = InitialKind::ALL.iter().map(|k| k.name()).collect();
            s.issue("kind", format!("unknown kind {kind_name:?} (expected one of {})", names.join(", ")));
            d.initial.kind
        });
        let seed = s.int("seed", d.initial.seed as i64);
        s.check("seed", seed >= 0, || format!("seed = {seed} must be ≥ 0"));
        let amplitude = s.float("amplitude", d.initial.amplitude);
        s.check("amplitude", amplitude.is_finite() && amplitude >= 0.0, || {
            format!("amplitude = {amplitude} must be ≥ 0")
        });
        let default_modes: Vec<i64> = d.initial.modes.iter().map(|&m| m as i64).collect();
        let modes = s.ints("modes", &default_modes);
        s.check("modes", modes.iter().all(|&m| (0..=16).contains(&m)), || {
            format!("modes {modes:?} must lie in [0, 16]")
        });
        s.check("modes", !modes.is_empty() || amplitude == 0.0, || {
            "at least one mode is needed for a nonzero amplitude".into()
        });
        let sigma = s.float("sigma", d.initial.sigma);
        s.check("sigma", sigma.is_finite() && sigma > 0.0 && sigma <= lx / 16.0, || {
            format!("sigma = {sigma} must lie in (0, lx/16 = {}]", lx / 16.0)
        });
        let min_sigma = MIN_CELLS_PER_SIGMA * lx / nx.min(ny) as f64;
        if kind == InitialKind::PerturbedOseen {
            s.check("sigma", sigma >= min_sigma, || {
                format!("sigma = {sigma} is under-resolved: needs ≥ {MIN_CELLS_PER_SIGMA} cells, i.e. ≥ {min_sigma}")
            });
        }
        let m = s.float("m", d.initial.m);
        s.check("m", m.is_finite() && m > 1.0, || {
            format!("m = {m}: the weighted space needs m > 1 for integrable vorticity")
        });
        s.finish();
        let initial = InitialSection {
            kind,
            seed: seed.max(0) as u64,
            amplitude,
            modes: modes.iter().map(|&m| m.clamp(0, 16) as u32).collect(),
            sigma,
            m,
        };

        // [time]
        let mut s = Section { name: "time", table: tables.next().unwrap(), issues: &mut issues };
        let t_end = s.float("t_end", d.time.t_end);
        s.check("t_end", t_end.is_finite() && t_end >= 0.0, || format!("t_end = {t_end} must be ≥ 0"));
        let cfl = s.float("cfl", d.time.cfl);
        s.check("cfl", cfl > 0.0 && cfl < 1.0, || format!("cfl = {cfl} must lie in (0, 1)"));
        let dt_max = s.float("dt_max", d.time.dt_max);
        s.check("dt_max", dt_max.is_finite() && dt_max > 0.0, || format!("dt_max = {dt_max} must be > 0"));
        let dt = s.opt_float("dt");
        if let Some(x) = dt {
            s.check("dt", x.is_finite() && x > 0.0, || format!("dt = {x} must be > 0"));
        }
        let output_dt = s.float("output_dt", d.time.output_dt);
        s.check("output_dt", output_dt.is_finite() && output_dt > 0.0, || {
            format!("output_dt = {output_dt} must be > 0")
        });
        s.finish();
        let time = TimeSection { t_end, cfl, dt_max, dt, output_dt };

        // [output]
        let mut s = Section { name: "output", table: tables.next().unwrap(), issues: &mut issues };
        let csv = s.string("csv", &d.output.csv);
        s.check("csv", !csv.is_empty(), || "csv path must not be empty".into());
        let every = s.int("snapshot_every", 0);
        s.check("snapshot_every", every >= 0, || format!("snapshot_every = {every} must be ≥ 0"));
        let snapshot_dir = s.string("snapshot_dir", &d.output.snapshot_dir);
        s.finish();
        let output = OutputSection { csv, snapshot_every: every.max(0) as usize, snapshot_dir };

        // [study]
        let mut s = Section { name: "study", table: tables.next().unwrap(), issues: &mut issues };
        let preset = s.table.contains_key("preset").then(|| s.string("preset", ""));
        if let Some(p) = &preset {
            s.check("preset", crate::presets::Preset::parse(p).is_some(), || {
                format!("unknown preset {p:?} (expected one of {})", crate::presets::Preset::names().join(", "))
            });
        }
        let m_list = s.floats("m_list", &d.study.m_list);
        let seed_count = s.int("seed_count", d.study.seed_count as i64);
        s.check("seed_count", (1..=100_000).contains(&seed_count), || {
            format!("seed_count = {seed_count} must lie in [1, 100000]")
        });
        if preset.as_deref() == Some("rate-study") {
            for &mm in m_list.iter().chain([m].iter()) {
                s.check("m_list", mm > 1.0 && mm < 2.0, || {
                    format!("m = {mm}: the rate study requires m > 1 (and m < 2)")
                });
            }
        } else {
            s.check("m_list", m_list.iter().all(|&x| x > 1.0), || {
                format!("m_list {m_list:?}: every m must exceed 1")
            });
        }
        s.finish();
        let study = StudySection { preset, m_list, seed_count: seed_count.max(1) as usize };

        if issues.is_empty() {
            Ok(ExperimentConfig { grid, physics, initial, time, output, study })
        } else {
            Err(Error::ConfigIssues(issues))
        }
    }

    /// Canonical TOML with every field present; parsing it returns `self`.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        let mut t = Table::new();
        t.insert("nx".into(), Value::Integer(self.grid.nx as i64));
        t.insert("ny".into(), Value::Integer(self.grid.ny as i64));
        t.insert("nz".into(), Value::Integer(self.grid.nz as i64));
        t.insert("lx".into(), Value::Float(self.grid.lx));
        t.insert("pitch".into(), Value::Float(self.grid.pitch));
        root.insert("grid".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("a".into(), Value::Float(self.physics.a));
        t.insert("c0".into(), Value::Float(self.physics.c0));
        root.insert("physics".into(), Value::Table(t));

        let i = &self.initial;
        let mut t = Table::new();
        t.insert("kind".into(), Value::String(i.kind.name().into()));
        t.insert("seed".into(), Value::Integer(i.seed as i64));
        t.insert("amplitude".into(), Value::Float(i.amplitude));
        t.insert(
            "modes".into(),
            Value::Array(i.modes.iter().map(|&m| Value::Integer(m as i64)).collect()),
        );
        t.insert("sigma".into(), Value::Float(i.sigma));
        t.insert("m".into(), Value::Float(i.m));
        root.insert("initial".into(), Value::Table(t));

        let tm = &self.time;
        let mut t = Table::new();
        t.insert("t_end".into(), Value::Float(tm.t_end));
        t.insert("cfl".into(), Value::Float(tm.cfl));
        t.insert("dt_max".into(), Value::Float(tm.dt_max));
        if let Some(dt) = tm.dt {
            t.insert("dt".into(), Value::Float(dt));
        }
        t.insert("output_dt".into(), Value::Float(tm.output_dt));
        root.insert("time".into(), Value::Table(t));

        let mut t = Table::new();
        t.insert("csv".into(), Value::String(self.output.csv.clone()));
        t.insert("snapshot_every".into(), Value::Integer(self.output.snapshot_every as i64));
        t.insert("snapshot_dir".into(), Value::String(self.output.snapshot_dir.clone()));
        root.insert("output".into(), Value::Table(t));

        let st = &self.study;
        let mut t = Table::new();
        if let Some(p) = &st.preset {
            t.insert("preset".into(), Value::String(p.clone()));
        }
        t.insert("m_list".into(), Value::Array(st.m_list.iter().map(|&m| Value::Float(m)).collect()));
        t.insert("seed_count".into(), Value::Integer(st.seed_count as i64));
        root.insert("study".into(), Value::Table(t));

        toml::to_string(&root).expect("config tables serialize")
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = &self.grid;
        GridSpec::with_shape(g.nx, g.ny, g.nz, g.lx, g.pitch)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let dt = match self.time.dt {
            Some(dt) => DtPolicy::Fixed(dt),
            None => DtPolicy::Cfl { cfl: self.time.cfl, dt_max: self.time.dt_max },
        };
        SolverConfig {
            t_end: self.time.t_end,
            dt,
            output_dt: self.time.output_dt,
            a: self.physics.a,
            c0: self.physics.c0,
            require_helical: true,
        }
    }

    pub fn perturbation_spec(&self) -> PerturbationSpec {
        PerturbationSpec {
            seed: self.initial.seed,
            amplitude: self.initial.amplitude,
            modes: self.initial.modes.clone(),
            sigma: self.initial.sigma,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issues(text: &str) -> Vec<ConfigIssue> {
        match ExperimentConfig::parse(text) {
            Err(Error::ConfigIssues(v)) => v,
            other => panic!("expected issues, got {other:?}"),
        }
    }

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn echo_is_a_fixed_point() {
        let c = ExperimentConfig::parse("[grid]\nnx = 48\nlx = 24\n[initial]\nsigma = 1.5\n[time]\ndt = 0.01\n[study]\npreset = \"lemma2\"\n")
            .unwrap();
        let text = c.to_toml();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn odd_nz_names_the_grid_invariant() {
        let v = issues("[grid]\nnz = 33\n");
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].section.as_str(), v[0].key.as_str()), ("grid", "nz"));
        assert!(v[0].message.contains("even"));
    }

    #[test]
    fn narrow_envelope_is_under_resolved() {
        let v = issues("[grid]\nnx = 32\n[initial]\nsigma = 2.0\n");
        assert_eq!(v.len(), 1);
        assert!(v[0].message.contains("under-resolved"));
        assert!(ExperimentConfig::parse("[grid]\nnx = 32\n[initial]\nkind = \"shear\"\n").is_ok());
    }

    #[test]
    fn every_problem_is_reported() {
        let v = issues("[grid]\nnx = 7\nfoo = 1\n[time]\ncfl = 1.5\n[extra]\n");
        let keys: Vec<_> = v.iter().map(|i| format!("{}.{}", i.section, i.key)).collect();
        for k in ["grid.nx", "grid.foo", "time.cfl", "extra."] {
            assert!(keys.contains(&k.to_string()), "{k} missing from {keys:?}");
        }
    }

    #[test]
    fn rate_study_needs_m_above_one() {
        let v = issues("[initial]\nm = 0.9\n[study]\npreset = \"rate-study\"\n");
        assert!(v.iter().any(|i| i.message.contains("m > 1")), "{v:?}");
    }
}
