//! One-dimensional parameter sweeps and their CSV output.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::comparators::semiclassical_split;
use crate::dipole_field::coupling;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::{SystemParams, ValidityFlags, PERTURBATIVE_CUTOFF_K0R};
use crate::response::{
    absorption_terms, ret_rate, sigma_sc, spontaneous_emission, strong_pump_extinction_limit, Split,
    QUOTED_STRONG_PUMP_EXTINCTION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Detuning,
    Pump,
    Distance,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Detuning => "detuning",
            Axis::Pump => "pump",
            Axis::Distance => "distance",
        }
    }

    fn column(self) -> &'static str {
        match self {
            Axis::Detuning => "detuning",
            Axis::Pump => "pump_P",
            Axis::Distance => "k0R",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRange {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub n: usize,
}

impl SweepRange {
    /// Evenly spaced grid; the end points are hit exactly.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * (i as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    SigmaSc,
    SigmaAbs,
    SigmaExt,
    Gamma0Rate,
    RetRate,
    Semiclassical,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::SigmaSc,
        Quantity::SigmaAbs,
        Quantity::SigmaExt,
        Quantity::Gamma0Rate,
        Quantity::RetRate,
        Quantity::Semiclassical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::SigmaSc => "sigma_sc",
            Quantity::SigmaAbs => "sigma_abs",
            Quantity::SigmaExt => "sigma_ext",
            Quantity::Gamma0Rate => "gamma0_rate",
            Quantity::RetRate => "ret_rate",
            Quantity::Semiclassical => "semiclassical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Single,
    Collective,
    Total,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::Single, Part::Collective, Part::Total];

    fn suffix(self) -> &'static str {
        match self {
            Part::Single => "single",
            Part::Collective => "coll",
            Part::Total => "total",
        }
    }

    fn pick(self, s: Split) -> f64 {
        match self {
            Part::Single => s.single,
            Part::Collective => s.collective,
            Part::Total => s.total(),
        }
    }
}

/// An output selector: a quantity with every part, or one `quantity.part`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Output {
    pub quantity: Quantity,
    pub part: Option<Part>,
}

impl Output {
    pub fn columns(&self) -> Vec<(Quantity, Part)> {
        match self.part {
            Some(p) => vec![(self.quantity, p)],
            None => Part::ALL.iter().map(|&p| (self.quantity, p)).collect(),
        }
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.part {
            None => f.write_str(self.quantity.name()),
            Some(Part::Single) => write!(f, "{}.single", self.quantity.name()),
            Some(Part::Collective) => write!(f, "{}.collective", self.quantity.name()),
            Some(Part::Total) => write!(f, "{}.total", self.quantity.name()),
        }
    }
}

impl FromStr for Output {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (q, p) = match s.split_once('.') {
            Some((q, p)) => (q, Some(p)),
            None => (s, None),
        };
        let quantity = Quantity::ALL
            .into_iter()
            .find(|x| x.name() == q)
            .ok_or_else(|| Error::UnknownOutput(s.to_string()))?;
        let part = match p {
            None => None,
            Some("single") => Some(Part::Single),
            Some("collective") | Some("coll") => Some(Part::Collective),
            Some("total") => Some(Part::Total),
            Some(_) => return Err(Error::UnknownOutput(s.to_string())),
        };
        Ok(Output { quantity, part })
    }
}

impl TryFrom<String> for Output {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Output> for String {
    fn from(o: Output) -> String {
        o.to_string()
    }
}

fn default_outputs() -> Vec<Output> {
    [Quantity::SigmaSc, Quantity::SigmaAbs, Quantity::SigmaExt]
        .into_iter()
        .map(|quantity| Output { quantity, part: None })
        .collect()
}

fn default_k0r() -> f64 {
    PERTURBATIVE_CUTOFF_K0R
}

fn default_pol_overlap() -> f64 {
    1.0
}

/// A sweep configuration, as read from and written to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub gamma_nr: f64,
    #[serde(rename = "pump_P", default)]
    pub pump: f64,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default)]
    pub rabi0: f64,
    #[serde(rename = "k0R", default = "default_k0r")]
    pub k0r: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default = "default_pol_overlap")]
    pub pol_overlap: f64,
    #[serde(rename = "Ne0", default, skip_serializing_if = "Option::is_none")]
    pub ne0: Option<f64>,
    pub sweep: SweepRange,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
}

impl SweepSpec {
    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sweep spec serialises")
    }

    /// Parameters at a given axis value.
    pub fn params_at(&self, x: f64) -> Result<SystemParams> {
        let mut b = SystemParams::builder()
            .gamma_nr(self.gamma_nr)
            .pump(self.pump)
            .detuning(self.detuning)
            .rabi0(self.rabi0)
            .k0r(self.k0r)
            .theta(self.theta)
            .pol_overlap(self.pol_overlap);
        if let Some(ne0) = self.ne0 {
            b = b.ne0(ne0);
        }
        b = match self.sweep.axis {
            Axis::Detuning => b.detuning(x),
            Axis::Pump => b.pump(x),
            Axis::Distance => b.k0r(x),
        };
        b.build()
    }

    pub fn validate(&self) -> Result<()> {
        let r = &self.sweep;
        if r.n < 2 {
            return Err(Error::InvalidSweep(format!("n = {} must be at least 2", r.n)));
        }
        if !(r.start.is_finite() && r.stop.is_finite() && r.start < r.stop) {
            return Err(Error::InvalidSweep(format!(
                "need finite start < stop, got start = {}, stop = {}",
                r.start, r.stop
            )));
        }
        if self.outputs.is_empty() {
            return Err(Error::InvalidSweep("no outputs requested".into()));
        }
        // Both end points must give valid parameters; the grid is monotone.
        self.params_at(r.start)?;
        self.params_at(r.stop)?;
        Ok(())
    }

    pub fn columns(&self) -> Vec<(Quantity, Part)> {
        let mut cols: Vec<(Quantity, Part)> = Vec::new();
        for o in &self.outputs {
            for c in o.columns() {
                if !cols.contains(&c) {
                    cols.push(c);
                }
            }
        }
        cols
    }
}

pub fn column_name(q: Quantity, p: Part) -> String {
    format!("{}_{}", q.name(), p.suffix())
}

/// All quantities at one parameter point.
#[derive(Debug, Clone, Copy)]
struct PointValues {
    sc: Split,
    abs: Split,
    gamma0: Split,
    ret: f64,
    semiclassical: Split,
}

impl PointValues {
    fn compute(p: &SystemParams) -> Result<Self> {
        let c = coupling(p)?;
        Ok(Self {
            sc: sigma_sc(p, &c),
            abs: absorption_terms(p, &c).split(),
            gamma0: spontaneous_emission(p, &c),
            ret: ret_rate(p, &c),
            semiclassical: semiclassical_split(p, &c),
        })
    }

    fn get(&self, q: Quantity, part: Part) -> f64 {
        let split = match q {
            Quantity::SigmaSc => self.sc,
            Quantity::SigmaAbs => self.abs,
            Quantity::SigmaExt => Split {
                single: self.sc.single + self.abs.single,
                collective: self.sc.collective + self.abs.collective,
            },
            Quantity::Gamma0Rate => self.gamma0,
            Quantity::RetRate => Split { single: 0.0, collective: self.ret },
            Quantity::Semiclassical => self.semiclassical,
        };
        match (q, part) {
            // Totals are reported as the sum of the two reported parts.
            (Quantity::SigmaExt, Part::Total) => self.sc.total() + self.abs.total(),
            _ => part.pick(split),
        }
    }
}

/// Tabulated sweep results with their metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    /// Axis column followed by one column per requested output.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

pub fn run_sweep(spec: &SweepSpec, exec: Execution) -> Result<SweepTable> {
    spec.validate()?;
    let cols = spec.columns();
    let grid = spec.sweep.grid();
    let axis = spec.sweep.axis;

    let rows: Vec<Result<(Vec<f64>, ValidityFlags)>> = exec.map(&grid, |&x| {
        let p = spec.params_at(x)?;
        let v = PointValues::compute(&p)?;
        let mut row = Vec::with_capacity(cols.len() + 1);
        row.push(x);
        for &(q, part) in &cols {
            let y = v.get(q, part);
            if !y.is_finite() {
                return Err(Error::NonFinite {
                    column: column_name(q, part),
                    axis: axis.name(),
                    axis_value: x,
                });
            }
            row.push(y);
        }
        Ok((row, p.validity()))
    });

    let mut table_rows = Vec::with_capacity(grid.len());
    let mut flags = ValidityFlags::default();
    for r in rows {
        let (row, f) = r?;
        flags = flags.union(f);
        table_rows.push(row);
    }
    let mut warnings: Vec<String> = flags.messages().into_iter().map(String::from).collect();
    let pumped = spec.pump > 0.0 || (axis == Axis::Pump && spec.sweep.stop > 0.0);
    if pumped && cols.iter().any(|(q, _)| *q == Quantity::Semiclassical) {
        warnings.push("semiclassical columns ignore the pump".into());
    }
    let mut columns = vec![axis.column().to_string()];
    columns.extend(cols.iter().map(|&(q, p)| column_name(q, p)));
    Ok(SweepTable {
        spec: spec.clone(),
        columns,
        rows: table_rows,
        warnings,
        notes: Vec::new(),
    })
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub const UNITS: &str =
    "cross-sections in sigma0; rates, detuning and pump in gamma0; distance as k0R";

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# dimer-response {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# axis: {}", self.spec.sweep.axis.name())?;
        writeln!(w, "# params: {}", self.spec.to_json())?;
        if self.warnings.is_empty() {
            writeln!(w, "# warnings: none")?;
        } else {
            writeln!(w, "# warnings: {}", self.warnings.join("; "))?;
        }
        for n in &self.notes {
            writeln!(w, "# note: {n}")?;
        }
        writeln!(w, "# units: {UNITS}")?;
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }
}

/// Pump rates of the figure presets.
pub const FIGURE_PUMPS: [f64; 3] = [0.0, 1.2, 7.5];
pub const FIGURE_GAMMA_NR: f64 = 0.2;
pub const FIGURE_K0R: f64 = 2.0;

fn figure_spec(pump: f64, detuning: f64, k0r: f64, sweep: SweepRange) -> SweepSpec {
    SweepSpec {
        gamma_nr: FIGURE_GAMMA_NR,
        pump,
        detuning,
        rabi0: 0.0,
        k0r,
        theta: 0.0,
        pol_overlap: 1.0,
        ne0: None,
        sweep,
        outputs: default_outputs(),
    }
}

/// A named figure grid: file stem and sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureGrid {
    pub stem: String,
    pub spec: SweepSpec,
}

fn pump_label(p: f64) -> String {
    format!("p{}", format_float(p))
}

/// Cross-sections against detuning on `[-5, 5]` at `k0R = 2` for each pump.
pub fn fig3() -> Vec<FigureGrid> {
    FIGURE_PUMPS
        .iter()
        .map(|&p| FigureGrid {
            stem: format!("fig3_{}", pump_label(p)),
            spec: figure_spec(
                p,
                0.0,
                FIGURE_K0R,
                SweepRange { axis: Axis::Detuning, start: -5.0, stop: 5.0, n: 201 },
            ),
        })
        .collect()
}

/// Cross-sections against pump on `[0, 20]` at resonance and `k0R = 2`.
pub fn fig4() -> Vec<FigureGrid> {
    vec![FigureGrid {
        stem: "fig4".into(),
        spec: figure_spec(
            0.0,
            0.0,
            FIGURE_K0R,
            SweepRange { axis: Axis::Pump, start: 0.0, stop: 20.0, n: 201 },
        ),
    }]
}

/// Cross-sections against `k0R` on `[2, 20]` at resonance for each pump.
pub fn fig5() -> Vec<FigureGrid> {
    FIGURE_PUMPS
        .iter()
        .map(|&p| FigureGrid {
            stem: format!("fig5_{}", pump_label(p)),
            spec: figure_spec(
                p,
                0.0,
                FIGURE_K0R,
                SweepRange { axis: Axis::Distance, start: 2.0, stop: 20.0, n: 361 },
            ),
        })
        .collect()
}

/// Strong-pump extinction limit from the closed forms next to the quoted value.
pub fn strong_pump_note(spec: &SweepSpec) -> Result<String> {
    let p = spec.params_at(spec.sweep.start)?;
    let limit = strong_pump_extinction_limit(&p);
    let verdict = if (limit - QUOTED_STRONG_PUMP_EXTINCTION).abs() > 1e-9 {
        "DISAGREE"
    } else {
        "agree"
    };
    Ok(format!(
        "strong-pump sigma_ext_total limit gamma0/gamma = {} sigma0; quoted asymptote = {} sigma0; {verdict}",
        format_float(limit),
        format_float(QUOTED_STRONG_PUMP_EXTINCTION)
    ))
}

/// Runs a figure preset, attaching the strong-pump note to pump sweeps.
pub fn run_figure(grid: &FigureGrid, exec: Execution) -> Result<SweepTable> {
    let mut t = run_sweep(&grid.spec, exec)?;
    if grid.spec.sweep.axis == Axis::Pump {
        t.notes.push(strong_pump_note(&grid.spec)?);
    }
    Ok(t)
}

/// Maximum `|y|` over consecutive windows of width `window` in `x`, starting
/// at the first sample. Incomplete trailing windows are dropped.
pub fn window_maxima(x: &[f64], y: &[f64], window: f64) -> Vec<f64> {
    let Some(&x0) = x.first() else { return Vec::new() };
    let x_end = *x.last().expect("non-empty");
    let n_windows = ((x_end - x0) / window).floor() as usize;
    let mut out = vec![0.0f64; n_windows];
    for (&xi, &yi) in x.iter().zip(y) {
        let k = ((xi - x0) / window).floor() as usize;
        if k < n_windows {
            out[k] = out[k].max(yi.abs());
        }
    }
    out
}
