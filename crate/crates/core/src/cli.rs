//! Command line front end and the JSON collection document.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::blockcalc::{format_word, parse_word, Collection};
use crate::catalog;
use crate::error::{Error, Result};
use crate::kclass::KClass;
use crate::markov::{enumerate_equations, EquationId, MarkovEquation, Triple};
use crate::picard::{enumerate_classes, ClassKind, DivisorClass, SurfaceId};
use crate::weyl;

/// Exit status for bad input.
pub const EXIT_USER: i32 = 2;
/// Exit status for a failed internal consistency check.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceDoc {
    PlaneBlowup { points: u8 },
    Quadric,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub rank: i64,
    pub c1: Vec<i64>,
    pub ch2x2: i64,
}

/// On-disk form of a block collection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectionDocument {
    pub surface: SurfaceDoc,
    pub blocks: Vec<Vec<ClassDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

impl CollectionDocument {
    pub fn from_collection(c: &Collection, provenance: Option<String>) -> Self {
        let surface = match c.surface() {
            SurfaceId::PlaneBlowup(points) => SurfaceDoc::PlaneBlowup { points },
            SurfaceId::Quadric => SurfaceDoc::Quadric,
        };
        let blocks = c
            .blocks()
            .iter()
            .map(|b| {
                b.members()
                    .iter()
                    .map(|m| ClassDoc { rank: m.rank, c1: m.c1.coords().to_vec(), ch2x2: m.ch2x2 })
                    .collect()
            })
            .collect();
        CollectionDocument { surface, blocks, provenance }
    }

    pub fn surface_id(&self) -> Result<SurfaceId> {
        match self.surface {
            SurfaceDoc::PlaneBlowup { points } if points <= 8 => Ok(SurfaceId::PlaneBlowup(points)),
            SurfaceDoc::PlaneBlowup { points } => {
                Err(Error::Document(format!("cannot blow up {points} points")))
            }
            SurfaceDoc::Quadric => Ok(SurfaceId::Quadric),
        }
    }

    /// Validate and convert.
    pub fn to_collection(&self) -> Result<Collection> {
        let s = self.surface_id()?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|m| Ok(KClass::new(m.rank, DivisorClass::new(s, m.c1.clone())?, m.ch2x2)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Collection::new(blocks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }

    /// Pretty JSON with one class per line.
    pub fn to_json(&self) -> String {
        let mut s = format!("{{\n  \"surface\": {},\n  \"blocks\": [\n", compact(&self.surface));
        for (i, b) in self.blocks.iter().enumerate() {
            s += "    [\n";
            for (j, m) in b.iter().enumerate() {
                let sep = if j + 1 < b.len() { "," } else { "" };
                let _ = writeln!(s, "      {}{sep}", compact(m));
            }
            s += if i + 1 < self.blocks.len() { "    ],\n" } else { "    ]\n" };
        }
        match &self.provenance {
            Some(p) => {
                let _ = write!(s, "  ],\n  \"provenance\": {}\n}}\n", compact(p));
            }
            None => s += "  ]\n}\n",
        }
        s
    }
}

#[derive(Parser, Debug)]
#[command(name = "triblock", version, about = "Block exceptional collections on Del Pezzo surfaces")]
pub struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "TRIBLOCK_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    MinusOne,
    Root,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the Markov-type equations with their minimum solutions.
    Equations {
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Reduce a solution to a minimum one by solution mutations.
    Reduce {
        equation: String,
        x: i64,
        y: i64,
        z: i64,
    },
    /// Emit the solution graph of an equation.
    Graph {
        equation: String,
        #[arg(long, default_value_t = 100)]
        sum_bound: i64,
        #[arg(long, value_enum, default_value = "dot")]
        format: GraphFormat,
    },
    /// Validate a collection document and report its invariants.
    Verify { file: PathBuf },
    /// Apply a mutation word (moves in application order, e.g. "L1,R2").
    Mutate { file: PathBuf, word: String },
    /// Export the catalog collection of an equation.
    Catalog {
        equation: String,
        /// Minimum solution as x,y,z (defaults to the first one).
        #[arg(long)]
        solution: Option<String>,
        /// Print the recorded checks instead of the document.
        #[arg(long)]
        checks: bool,
    },
    /// Weyl orbit sizes of the minimum collections.
    Orbits {
        /// Equation id, or "all".
        #[arg(long = "eq", default_value = "all")]
        equation: String,
        #[arg(long)]
        check_recursion: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
    },
    /// Enumerate (-1)-classes or roots of a surface.
    Curves {
        surface: String,
        #[arg(long, value_enum, default_value = "minus-one")]
        kind: CurveKind,
    },
    /// Count sets of pairwise disjoint (-1)-curves.
    DisjointSets { surface: String, m: usize },
}

/// Parse arguments, run, and return the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USER } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::Unsupported(format!("cannot start {n} threads: {e}"))),
        },
        None => execute(&cli.command),
    };
    match result {
        Ok(Outcome { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_internal() {
                EXIT_INTERNAL
            } else {
                EXIT_USER
            }
        }
    }
}

/// Output of a command together with its exit status.
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Equations { format } => cmd_equations(*format).map(Outcome::ok),
        Command::Reduce { equation, x, y, z } => {
            cmd_reduce(equation.parse()?, [*x, *y, *z]).map(Outcome::ok)
        }
        Command::Graph { equation, sum_bound, format } => {
            let g = equation.parse::<EquationId>()?.equation().solution_graph(*sum_bound)?;
            Ok(Outcome::ok(match format {
                GraphFormat::Dot => g.to_dot(),
                GraphFormat::Json => pretty(&g.to_json()),
            }))
        }
        Command::Verify { file } => cmd_verify(&read_file(file)?),
        Command::Mutate { file, word } => {
            let doc = CollectionDocument::from_json(&read_file(file)?)?;
            cmd_mutate(&doc, word).map(|d| Outcome::ok(d.to_json()))
        }
        Command::Catalog { equation, solution, checks } => {
            let id: EquationId = equation.parse()?;
            if *checks {
                return cmd_catalog_checks(id);
            }
            let sol = solution.as_deref().map(parse_triple).transpose()?;
            cmd_catalog(id, sol).map(|d| Outcome::ok(d.to_json()))
        }
        Command::Orbits { equation, check_recursion, format } => {
            let ids = if equation == "all" {
                EquationId::ALL.to_vec()
            } else {
                vec![equation.parse()?]
            };
            cmd_orbits(&ids, *check_recursion, *format).map(Outcome::ok)
        }
        Command::Curves { surface, kind } => {
            let kind = match kind {
                CurveKind::MinusOne => ClassKind::MinusOne,
                CurveKind::Root => ClassKind::Root,
            };
            cmd_curves(surface.parse()?, kind).map(Outcome::ok)
        }
        Command::DisjointSets { surface, m } => {
            let n = weyl::count_disjoint_sets(surface.parse()?, *m)?;
            Ok(Outcome::ok(format!("{n}\n")))
        }
    }
}

fn compact<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).expect("documents serialize")
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("cannot read {}: {e}", path.display())))
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn parse_triple(s: &str) -> Result<Triple> {
    let parts: Vec<i64> = s
        .trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Unsupported(format!("cannot parse solution {s:?}")))?;
    match parts.as_slice() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(Error::Unsupported(format!("expected three numbers, got {s:?}"))),
    }
}

fn fmt_triple(t: &Triple) -> String {
    format!("({},{},{})", t[0], t[1], t[2])
}

/// `x^2 + 2y^2 + 6z^2 = 6xyz`
pub fn equation_text(e: &MarkovEquation) -> String {
    let term = |c: i64, v: &str| if c == 1 { format!("{v}^2") } else { format!("{c}{v}^2") };
    format!(
        "{} + {} + {} = {}xyz",
        term(e.alpha, "x"),
        term(e.beta, "y"),
        term(e.gamma, "z"),
        e.coeff
    )
}

/// One row of the equation table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationRow {
    pub id: String,
    pub surface: String,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub k_squared: i64,
    pub coeff: i64,
    pub minimum_solutions: Vec<Triple>,
}

pub fn equation_rows() -> Result<Vec<EquationRow>> {
    Ok(enumerate_equations()?
        .iter()
        .map(|e| EquationRow {
            id: e.id.to_string(),
            surface: e.surface().to_string(),
            alpha: e.alpha,
            beta: e.beta,
            gamma: e.gamma,
            k_squared: e.k_squared,
            coeff: e.coeff,
            minimum_solutions: e.minimum_solutions(),
        })
        .collect())
}

pub fn cmd_equations(format: TableFormat) -> Result<String> {
    let rows = equation_rows()?;
    if format == TableFormat::Json {
        return Ok(pretty(&serde_json::to_value(&rows).expect("rows serialize")));
    }
    let mut s = format!("{:<5} {:<7} {:<4} {:<28} {}\n", "id", "surface", "K^2", "equation", "minimum");
    for (row, e) in rows.iter().zip(enumerate_equations()?) {
        let minima: Vec<String> = row.minimum_solutions.iter().map(fmt_triple).collect();
        let _ = writeln!(
            s,
            "{:<5} {:<7} {:<4} {:<28} {}",
            row.id,
            row.surface,
            row.k_squared,
            equation_text(&e),
            minima.join(" ")
        );
    }
    Ok(s)
}

pub fn cmd_reduce(id: EquationId, t: Triple) -> Result<String> {
    let path = id.equation().reduce_to_minimum(&t)?;
    let mut s = format!("{}\n", fmt_triple(&t));
    if path.is_empty() {
        s += "already minimum\n";
    }
    for (v, n) in path {
        let _ = writeln!(s, "-{v}-> {}", fmt_triple(&n));
    }
    Ok(s)
}

/// Equation whose block lengths and degree match a 3-block collection.
fn matching_equation(c: &Collection) -> Option<MarkovEquation> {
    let mut ty: Vec<i64> = c.type_vector().iter().map(|&n| n as i64).collect();
    ty.sort();
    EquationId::ALL
        .iter()
        .map(|id| id.equation())
        .find(|e| e.lengths().to_vec() == ty && e.k_squared == c.surface().k_squared())
}

pub fn cmd_verify(text: &str) -> Result<Outcome> {
    let doc = CollectionDocument::from_json(text)?;
    let mut s = String::new();
    let c = match doc.to_collection() {
        Ok(c) => c,
        Err(e) if !e.is_internal() => {
            let _ = writeln!(s, "FAIL structure: {e}");
            return Ok(Outcome { text: s, code: EXIT_USER });
        }
        Err(e) => return Err(e),
    };
    let mut failed = false;
    let mut line = |ok: bool, what: String| {
        failed |= !ok;
        let _ = writeln!(s, "{} {what}", if ok { "ok  " } else { "FAIL" });
    };
    line(true, format!("structure: {} blocks of type {:?} on {}", c.block_count(), c.type_vector(), c.surface()));
    let complete = c.is_complete();
    line(complete, "complete: classes form a basis of K0".into());
    if complete {
        line(c.dual_basis().is_ok(), "dual basis: chi(A_i, A_j^v) = delta_ij".into());
    }
    if c.block_count() == 3 && complete {
        let ranks = c.ranks();
        let lens: Vec<i64> = c.type_vector().iter().map(|&n| n as i64).collect();
        match matching_equation(&c) {
            Some(e) => {
                let lhs: i64 = (0..3).map(|i| lens[i] * ranks[i] * ranks[i]).sum();
                let holds = lhs == e.coeff * ranks.iter().product::<i64>();
                line(holds, format!("ranks {ranks:?} solve equation {}", e.id));
            }
            None => line(false, "no equation matches the block lengths".into()),
        }
        match c.abc() {
            Ok(abc) => line(true, format!("abc = ({},{},{})", abc.a, abc.b, abc.c)),
            Err(e) => line(false, format!("abc: {e}")),
        }
    }
    for (i, b) in c.blocks().iter().enumerate() {
        let slopes: Vec<String> = b.members().iter().map(|m| m.slope().to_string()).collect();
        let _ = writeln!(s, "     block {} slopes {}", i + 1, slopes.join(" "));
    }
    let code = if failed { EXIT_USER } else { 0 };
    Ok(Outcome { text: s, code })
}

pub fn cmd_mutate(doc: &CollectionDocument, word: &str) -> Result<CollectionDocument> {
    let c = doc.to_collection()?;
    let moves = parse_word(word)?;
    let (m, types) = c.apply_word(&moves)?;
    let kinds: Vec<String> = types.iter().map(|t| t.to_string()).collect();
    let provenance = format!("{} ({})", format_word(&moves), kinds.join(", "));
    Ok(CollectionDocument::from_collection(&m, Some(provenance)))
}

pub fn cmd_catalog(id: EquationId, sol: Option<Triple>) -> Result<CollectionDocument> {
    let (c, sol) = match sol {
        Some(t) => (catalog::build_for_solution(id, &t)?, t),
        None => {
            let c = catalog::build(id)?;
            let t = catalog::solution_of(id, &c)?;
            (c, t)
        }
    };
    let provenance = match catalog::recipe(id) {
        Ok(r) => format!("equation {id}, solution {}, word {}", fmt_triple(&sol), format_word(&r.word)),
        Err(_) => format!("equation {id}, solution {}, standard", fmt_triple(&sol)),
    };
    Ok(CollectionDocument::from_collection(&c, Some(provenance)))
}

fn cmd_catalog_checks(id: EquationId) -> Result<Outcome> {
    let mut s = String::new();
    let mut failed = false;
    for o in catalog::verify_entry(id)? {
        failed |= !o.passed;
        let _ = writeln!(s, "{} {}", if o.passed { "ok  " } else { "FAIL" }, o.name);
    }
    Ok(Outcome { text: s, code: if failed { EXIT_INTERNAL } else { 0 } })
}

pub fn cmd_orbits(ids: &[EquationId], check_recursion: bool, format: TableFormat) -> Result<String> {
    let rows = ids.iter().map(|&id| weyl::orbit_row(id)).collect::<Result<Vec<_>>>()?;
    let checks = if check_recursion {
        ids.iter()
            .filter_map(|&id| match weyl::recursion_check(id) {
                Err(Error::Unsupported(_)) => None,
                other => Some(other),
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    if format == TableFormat::Json {
        let mut v = serde_json::json!({ "rows": rows });
        if check_recursion {
            v["recursion"] = serde_json::to_value(&checks).expect("reports serialize");
        }
        return Ok(pretty(&v));
    }
    let mut s = format!("{:<5} {:<7} {:<9} {:>6} {:>2} {:>6}\n", "eq", "surface", "type", "N", "C", "orbits");
    for r in &rows {
        let ty = fmt_triple(&r.block_type);
        let _ = writeln!(s, "{:<5} {:<7} {:<9} {:>6} {:>2} {:>6}", r.equation.to_string(), r.surface, ty, r.n, r.c, r.orbits);
    }
    for c in &checks {
        let _ = writeln!(
            s,
            "recursion {}: {} * C({},{}) = {} vs {} = N' * #disjoint {}-sets: {}",
            c.equation,
            c.n,
            c.block,
            c.split,
            c.lhs,
            c.rhs,
            c.curves,
            if c.holds { "ok" } else { "FAIL" }
        );
    }
    if checks.iter().any(|c| !c.holds) {
        return Err(Error::Invariant(format!("recursion check failed\n{s}")));
    }
    Ok(s)
}

pub fn cmd_curves(surface: SurfaceId, kind: ClassKind) -> Result<String> {
    let classes = enumerate_classes(surface, kind)?;
    let mut s = String::new();
    for c in &classes {
        let _ = writeln!(s, "{c}");
    }
    let _ = writeln!(s, "count {}", classes.len());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["triblock"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn equations_table_has_fourteen_rows() {
        let (code, out, _) = run_args(&["equations"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 15);
        assert!(out.contains("x^2 + 2y^2 + 6z^2 = 6xyz"));
    }

    #[test]
    fn equations_json_reparses() {
        let (_, out, _) = run_args(&["equations", "--format", "json"]);
        let rows: Vec<EquationRow> = serde_json::from_str(&out).unwrap();
        assert_eq!(rows, equation_rows().unwrap());
    }

    #[test]
    fn reduce_outputs() {
        let (code, out, _) = run_args(&["reduce", "1", "2", "5", "29"]);
        assert_eq!(code, 0);
        assert!(out.trim_end().ends_with("(1,1,1)"));
        let (_, out, _) = run_args(&["reduce", "1", "1", "1", "1"]);
        assert!(out.contains("already minimum"));
        let (code, _, err) = run_args(&["reduce", "1", "1", "1", "4"]);
        assert_eq!(code, EXIT_USER);
        assert!(err.contains("not a solution"));
    }

    #[test]
    fn unknown_inputs_are_user_errors() {
        assert_eq!(run_args(&["reduce", "9", "1", "1", "1"]).0, EXIT_USER);
        assert_eq!(run_args(&["curves", "X12"]).0, EXIT_USER);
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_USER);
    }

    #[test]
    fn curves_and_disjoint_sets() {
        let (_, out, _) = run_args(&["curves", "X3"]);
        assert!(out.ends_with("count 6\n"));
        let (_, out, _) = run_args(&["curves", "X8", "--kind", "root"]);
        assert!(out.ends_with("count 240\n"));
        let (_, out, _) = run_args(&["disjoint-sets", "X3", "3", "--threads", "2"]);
        assert_eq!(out, "2\n");
    }

    #[test]
    fn document_round_trip() {
        let c = catalog::build(EquationId::X6_2).unwrap();
        let doc = CollectionDocument::from_collection(&c, None);
        let back = CollectionDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_collection().unwrap(), c);
        assert!(!doc.to_json().contains("provenance"));
    }

    #[test]
    fn mutate_then_inverse() {
        let doc = cmd_catalog(EquationId::X3, None).unwrap();
        let m = cmd_mutate(&doc, "L1").unwrap();
        let back = cmd_mutate(&m, "R1").unwrap();
        assert_eq!(back.blocks, doc.blocks);
        assert!(matches!(cmd_mutate(&doc, "L7"), Err(Error::MutationIndex { .. })));
        assert!(matches!(cmd_mutate(&doc, "X1"), Err(Error::BraidWord(_))));
    }

    #[test]
    fn verify_reports() {
        let doc = cmd_catalog(EquationId::X3, None).unwrap();
        let good = cmd_verify(&doc.to_json()).unwrap();
        assert_eq!(good.code, 0);
        assert!(!good.text.contains("FAIL"));
        let mut bad = doc.clone();
        bad.blocks[1][0].rank = 2;
        let report = cmd_verify(&bad.to_json()).unwrap();
        assert_eq!(report.code, EXIT_USER);
        assert!(report.text.starts_with("FAIL"));
    }

    #[test]
    fn orbit_rows_print() {
        let s = cmd_orbits(&[EquationId::X1, EquationId::X5], false, TableFormat::Text).unwrap();
        assert!(s.contains("5     X5      (2,2,4)       20  2     10"));
    }
}
