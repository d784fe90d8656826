//! Subcommand implementations.
//!
//! Exit codes: 0 success, 1 usage/parse/dimension error, 2 inconsistent
//! system (`solve`, `stream`), 3 Penrose conditions 1, 2, 4 not all met
//! (`check`).

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rowortho_core::{
    null_space_basis, penrose_check, solve, solve_matrix_rhs, ComplexMatrix, OnlineSolver,
    Variation, DEFAULT_EPS_REL,
};
use thiserror::Error;

use crate::document::{matrix, vector, IncrementDoc, Num, PenroseDoc, ResultDocument, Solution};
use crate::format::{parse_matrix, parse_stream_header, parse_stream_line, ParseError, StreamLine};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INCONSISTENT: u8 = 2;
pub const EXIT_NOT_124: u8 = 3;

/// Tolerance for the idempotence check behind `--emit nullbasis`.
const NULL_BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("stdin: {0}")]
    Stream(ParseError),
    #[error("{0}")]
    Solver(#[from] rowortho_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("output: {0}")]
    Output(std::io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "rowortho",
    version,
    about = "Minimum-norm solutions of complex linear systems by row orthonormalization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve A x = b (or A X = B) from matrix files
    Solve(SolveArgs),
    /// Solve from rows of [A | b] streamed on stdin
    Stream(StreamArgs),
    /// Check the Penrose conditions for a candidate inverse G of A
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariationArg {
    TransformRhs,
    AccumulateM,
}

impl From<VariationArg> for Variation {
    fn from(v: VariationArg) -> Self {
        match v {
            VariationArg::TransformRhs => Variation::TransformRhs,
            VariationArg::AccumulateM => Variation::AccumulateM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Xp,
    Proj,
    Ginv,
    Nullbasis,
    M,
    Log,
    Penrose,
}

impl Emit {
    fn needs_m(self) -> bool {
        matches!(self, Emit::Ginv | Emit::M | Emit::Penrose)
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Right-hand side; more than one column solves A X = B
    #[arg(long)]
    pub rhs: PathBuf,
    #[arg(long, value_enum, default_value = "transform-rhs")]
    pub variation: VariationArg,
    /// Relative rank threshold; 0 normalizes every nonzero residual row
    #[arg(long, default_value_t = DEFAULT_EPS_REL)]
    pub eps: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "xp")]
    pub emit: Vec<Emit>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, clap::Args)]
pub struct StreamArgs {
    #[arg(long, default_value_t = DEFAULT_EPS_REL)]
    pub eps: f64,
    /// Also accumulate the generalized inverse G
    #[arg(long)]
    pub track_g: bool,
    /// Repeat the orthogonalization pass for each row
    #[arg(long)]
    pub reorth: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub ginv: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

/// Rendered stdout plus exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: u8,
    pub stdout: String,
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_matrix(&text).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

fn render(doc: &ResultDocument, json: bool) -> String {
    if json {
        let mut s = doc.to_json();
        s.push('\n');
        s
    } else {
        doc.to_text()
    }
}

pub fn run_solve(args: &SolveArgs) -> Result<Output, CliError> {
    let a = read_matrix(&args.matrix)?;
    let b = read_matrix(&args.rhs)?;
    if b.rows() != a.rows() {
        return Err(CliError::Usage(format!(
            "dimension mismatch: matrix has {} rows, rhs has {}",
            a.rows(),
            b.rows()
        )));
    }
    let emits = |e: Emit| args.emit.contains(&e);
    let multi = b.cols() > 1;
    if !multi && args.variation == VariationArg::TransformRhs {
        if let Some(e) = args.emit.iter().find(|e| e.needs_m()) {
            return Err(CliError::Usage(
                format!("--emit {e:?} needs --variation accumulate-m",).to_lowercase(),
            ));
        }
    }

    let mut doc = ResultDocument::default();
    let projector;
    let consistent;
    if multi {
        let r = solve_matrix_rhs(&a, &b, args.eps)?;
        consistent = r.consistent();
        doc.rank = Some(r.rank);
        doc.consistent = Some(consistent);
        doc.consistent_columns = Some(r.columns.iter().map(|c| c.consistent).collect());
        doc.norm_x_p = Some(Num(r.x_p.frobenius_norm()));
        if emits(Emit::Xp) {
            doc.x_p = Some(Solution::Matrix(matrix(&r.x_p)));
        }
        if emits(Emit::Ginv) {
            doc.g = Some(matrix(&r.g));
        }
        if emits(Emit::M) {
            doc.m_factor = Some(matrix(&r.m_factor));
        }
        if emits(Emit::Log) {
            doc.log = Some(r.log.ops().iter().map(ToString::to_string).collect());
        }
        if emits(Emit::Penrose) {
            doc.penrose = Some(PenroseDoc::from(&penrose_check(&a, &r.g, 1e-8)?));
        }
        projector = r.projector;
    } else {
        let r = solve(&a, &b.column(0), args.variation.into(), args.eps)?;
        consistent = r.consistent;
        doc.rank = Some(r.rank);
        doc.consistent = Some(r.consistent);
        doc.offending_row = r.offending_row.map(|i| i + 1);
        doc.norm_x_p = Some(Num(r.x_p.norm()));
        if emits(Emit::Xp) {
            doc.x_p = Some(Solution::Vector(vector(&r.x_p)));
        }
        if let Some(g) = &r.g {
            if emits(Emit::Ginv) {
                doc.g = Some(matrix(g));
            }
            if emits(Emit::Penrose) {
                doc.penrose = Some(PenroseDoc::from(&penrose_check(&a, g, 1e-8)?));
            }
        }
        if emits(Emit::M) {
            doc.m_factor = r.m_factor.as_ref().map(matrix);
        }
        if emits(Emit::Log) {
            doc.log = Some(r.log.ops().iter().map(ToString::to_string).collect());
        }
        projector = r.projector;
    }
    if emits(Emit::Proj) {
        doc.projector = Some(matrix(&projector));
    }
    if emits(Emit::Nullbasis) {
        let basis = null_space_basis(&projector, NULL_BASIS_TOL)?;
        doc.null_basis = Some(basis.iter().map(vector).collect());
    }

    Ok(Output {
        code: if consistent {
            EXIT_OK
        } else {
            EXIT_INCONSISTENT
        },
        stdout: render(&doc, args.json),
    })
}

/// Reads the stream protocol from `input`, writing one line per row as it
/// arrives and the final document after `END`. Returns the exit code.
pub fn run_stream<R: BufRead, W: Write>(
    args: &StreamArgs,
    input: R,
    out: &mut W,
) -> Result<u8, CliError> {
    let mut lines = input.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next_line = || -> Result<Option<(usize, String)>, CliError> {
        match lines.next() {
            None => Ok(None),
            Some((no, Ok(l))) => Ok(Some((no, l))),
            Some((_, Err(e))) => Err(CliError::Io {
                path: PathBuf::from("stdin"),
                source: e,
            }),
        }
    };

    let mut last = 0;
    let n = loop {
        let Some((no, line)) = next_line()? else {
            return Err(CliError::Stream(ParseError {
                line: last + 1,
                column: 1,
                message: "missing header 'n <count>'".into(),
            }));
        };
        last = no;
        if let Some(n) = parse_stream_header(no, &line).map_err(CliError::Stream)? {
            break n;
        }
    };

    let mut solver = OnlineSolver::new(n, args.eps, args.track_g, args.reorth)?;
    let mut increments = Vec::new();
    let mut any_inconsistent = false;
    loop {
        let Some((no, line)) = next_line()? else {
            return Err(CliError::Stream(ParseError {
                line: last + 1,
                column: 1,
                message: "unexpected end of input, missing END".into(),
            }));
        };
        last = no;
        match parse_stream_line(no, &line, n).map_err(CliError::Stream)? {
            StreamLine::Skip => continue,
            StreamLine::End => break,
            StreamLine::Row { a, b } => {
                let inc = solver.ingest_row(&a, b)?;
                any_inconsistent |= inc.inconsistency_detected;
                let est = solver.current_estimate();
                let doc = IncrementDoc {
                    row: inc.index + 1,
                    x_p_inc: vector(&inc.x_p_inc),
                    norm: Num(est.norm),
                    rank: est.rank,
                    was_zero_row: inc.was_zero_row,
                    inconsistency_detected: inc.inconsistency_detected,
                };
                let line = if args.json {
                    serde_json::to_string(&doc).expect("increment serializes")
                } else {
                    doc.text()
                };
                writeln!(out, "{line}").map_err(CliError::Output)?;
                increments.push(doc);
            }
        }
    }

    let r = solver.finalize();
    let consistent = r.consistent && !any_inconsistent;
    let doc = ResultDocument {
        x_p: Some(Solution::Vector(vector(&r.x_p))),
        rank: Some(r.rank),
        consistent: Some(consistent),
        offending_row: r.offending_row.map(|i| i + 1),
        norm_x_p: Some(Num(r.x_p.norm())),
        g: r.g.as_ref().map(matrix),
        m_factor: r.m_factor.as_ref().map(matrix),
        increments: args.json.then_some(increments),
        ..Default::default()
    };
    if args.json {
        writeln!(out, "{}", doc.to_json_line()).map_err(CliError::Output)?;
    } else {
        write!(out, "{}", doc.to_text()).map_err(CliError::Output)?;
    }
    Ok(if consistent {
        EXIT_OK
    } else {
        EXIT_INCONSISTENT
    })
}

pub fn run_check(args: &CheckArgs) -> Result<Output, CliError> {
    let a = read_matrix(&args.matrix)?;
    let g = read_matrix(&args.ginv)?;
    let report = penrose_check(&a, &g, args.tol)?;
    let doc = ResultDocument {
        penrose: Some(PenroseDoc::from(&report)),
        ..Default::default()
    };
    Ok(Output {
        code: if report.is_124() {
            EXIT_OK
        } else {
            EXIT_NOT_124
        },
        stdout: render(&doc, args.json),
    })
}
