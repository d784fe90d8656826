//! Structured result output.
//!
//! Every real number is written with 17 significant digits, enough to
//! round-trip an `f64`. Complex entries are `[re, im]` pairs.

use std::fmt::Write as _;

use rowortho_core::{ColumnVector, ComplexMatrix, PenroseReport, C64};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Real number serialized as `d.dddddddddddddddde±x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawValue::from_string(fmt17(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

pub type Pair = [Num; 2];

pub fn pair(z: C64) -> Pair {
    [Num(z.re), Num(z.im)]
}

pub fn vector(v: &ColumnVector) -> Vec<Pair> {
    v.as_slice().iter().copied().map(pair).collect()
}

pub fn matrix(m: &ComplexMatrix) -> Vec<Vec<Pair>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().copied().map(pair).collect())
        .collect()
}

/// `x_p` is a vector for a single right-hand side, a matrix for several.
#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Solution {
    Vector(Vec<Pair>),
    Matrix(Vec<Vec<Pair>>),
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionDoc {
    pub holds: bool,
    pub residual: Num,
}

#[derive(Clone, Debug, Serialize)]
pub struct PenroseDoc {
    pub p1: ConditionDoc,
    pub p2: ConditionDoc,
    pub p3: ConditionDoc,
    pub p4: ConditionDoc,
    pub tol: Num,
    pub inferred_class: Vec<u8>,
}

impl From<&PenroseReport> for PenroseDoc {
    fn from(r: &PenroseReport) -> Self {
        let doc = |c: rowortho_core::Condition| ConditionDoc {
            holds: c.holds,
            residual: Num(c.residual),
        };
        Self {
            p1: doc(r.p1),
            p2: doc(r.p2),
            p3: doc(r.p3),
            p4: doc(r.p4),
            tol: Num(r.tol),
            inferred_class: r.inferred_class(),
        }
    }
}

/// One streamed row.
#[derive(Clone, Debug, Serialize)]
pub struct IncrementDoc {
    /// 1-based arrival index.
    pub row: usize,
    pub x_p_inc: Vec<Pair>,
    pub norm: Num,
    pub rank: usize,
    pub was_zero_row: bool,
    pub inconsistency_detected: bool,
}

impl IncrementDoc {
    pub fn text(&self) -> String {
        let entries: Vec<String> = self.x_p_inc.iter().map(|p| fmt_pair(*p)).collect();
        format!(
            "row {}: x_p_inc = [{}] norm = {} rank = {} zero_row = {} inconsistent = {}",
            self.row,
            entries.join(", "),
            fmt17(self.norm.0),
            self.rank,
            self.was_zero_row,
            self.inconsistency_detected
        )
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ResultDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_p: Option<Solution>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
    /// 1-based row of `A'` that revealed an inconsistency.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offending_row: Option<usize>,
    /// Per-column consistency for a multi-column right-hand side.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent_columns: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_x_p: Option<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projector: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_factor: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_basis: Option<Vec<Vec<Pair>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penrose: Option<PenroseDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub increments: Option<Vec<IncrementDoc>>,
}

fn fmt_pair([re, im]: Pair) -> String {
    format!("{},{}", fmt17(re.0), fmt17(im.0))
}

fn text_matrix(out: &mut String, name: &str, rows: &[Vec<Pair>]) {
    let _ = writeln!(out, "{name}:");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|p| fmt_pair(*p)).collect();
        let _ = writeln!(out, "  {}", cells.join("  "));
    }
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result document serializes")
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("result document serializes")
    }

    /// Human-readable rendering. Entries are `re,im`, as in matrix files.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match &self.x_p {
            Some(Solution::Vector(v)) => {
                let _ = writeln!(out, "x_p:");
                for p in v {
                    let _ = writeln!(out, "  {}", fmt_pair(*p));
                }
            }
            Some(Solution::Matrix(m)) => text_matrix(&mut out, "x_p", m),
            None => {}
        }
        if let Some(r) = self.rank {
            let _ = writeln!(out, "rank: {r}");
        }
        if let Some(c) = self.consistent {
            let _ = writeln!(out, "consistent: {c}");
        }
        if let Some(r) = self.offending_row {
            let _ = writeln!(out, "offending_row: {r}");
        }
        if let Some(cols) = &self.consistent_columns {
            let _ = writeln!(out, "consistent_columns: {cols:?}");
        }
        if let Some(n) = self.norm_x_p {
            let _ = writeln!(out, "norm_x_p: {}", fmt17(n.0));
        }
        for (name, m) in [
            ("projector", &self.projector),
            ("g", &self.g),
            ("m_factor", &self.m_factor),
            ("null_basis", &self.null_basis),
        ] {
            if let Some(m) = m {
                text_matrix(&mut out, name, m);
            }
        }
        if let Some(log) = &self.log {
            let _ = writeln!(out, "log:");
            for (s, l) in log.iter().enumerate() {
                let _ = writeln!(out, "  {}. {l}", s + 1);
            }
        }
        if let Some(p) = &self.penrose {
            let _ = writeln!(out, "penrose (tol {}):", fmt17(p.tol.0));
            for (k, c) in [&p.p1, &p.p2, &p.p3, &p.p4].into_iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  P{}: {} residual {}",
                    k + 1,
                    if c.holds { "holds" } else { "fails" },
                    fmt17(c.residual.0)
                );
            }
            let _ = writeln!(out, "inferred_class: {:?}", p.inferred_class);
        }
        out
    }
}
