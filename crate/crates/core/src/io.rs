//! Text formats.
//!
//! Graph files: first non-comment line `n m`, then `m` lines `u v`
//! (0-indexed, whitespace-separated); `#` starts a comment.
//!
//! Schedule directories hold a `manifest.toml`:
//!
//! ```toml
//! kind = "sequence"          # or "static", or "adaptive:<family>"
//! files = ["g0000.txt", "g0001.txt"]
//! seed = 7                   # adaptive only
//! [params]                   # adaptive only, e.g. n = 64, rho = 0.5
//! ```
//!
//! A sequence repeats its last graph forever.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Family;
use crate::graph::Graph;
use crate::schedule::{static_schedule, DynamicSchedule, SequenceSchedule};

pub const MANIFEST: &str = "manifest.toml";

pub fn graph_to_string(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.num_edges());
    for (u, v) in g.edges() {
        writeln!(s, "{u} {v}").expect("writing to a String");
    }
    s
}

pub fn parse_graph(text: &str, path: &Path) -> Result<Graph> {
    let err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let pair = |line: usize, l: &str| -> Result<(usize, usize)> {
        let mut it = l.split_whitespace();
        let mut next = || -> Result<usize> {
            let tok = it.next().ok_or_else(|| err(line, "expected two integers".into()))?;
            tok.parse().map_err(|_| err(line, format!("not a non-negative integer: {tok:?}")))
        };
        let p = (next()?, next()?);
        if it.next().is_some() {
            return Err(err(line, "trailing tokens".into()));
        }
        Ok(p)
    };
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing `n m` header".into()))?;
    let (n, m) = pair(hline, header)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let (u, v) = pair(line, l)?;
        if u >= n || v >= n {
            return Err(err(line, format!("endpoint out of range 0..{n}")));
        }
        if u == v {
            return Err(err(line, format!("self-loop on {u}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(err(hline, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::from_edges(n, &edges)
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text, path)
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    fs::write(path, graph_to_string(g)).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
    pub params: toml::Table,
}

/// A schedule as described on disk.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleSource {
    Static(Graph),
    Sequence(Vec<Graph>),
    Adaptive { family: Family, seed: u64 },
}

impl ScheduleSource {
    pub fn n(&self) -> usize {
        match self {
            ScheduleSource::Static(g) => g.n(),
            ScheduleSource::Sequence(gs) => gs[0].n(),
            ScheduleSource::Adaptive { family, .. } => family.vertex_count(),
        }
    }

    /// Builds a fresh schedule; adaptive families are reseeded with
    /// `seed` when given.
    pub fn build(&self, seed: Option<u64>) -> Result<Box<dyn DynamicSchedule>> {
        Ok(match self {
            ScheduleSource::Static(g) => Box::new(static_schedule(g.clone())),
            ScheduleSource::Sequence(gs) => Box::new(SequenceSchedule::new(gs.clone())?),
            ScheduleSource::Adaptive { family, seed: s } => family.build(seed.unwrap_or(*s))?,
        })
    }

    pub fn default_source(&self) -> usize {
        match self {
            ScheduleSource::Adaptive { family, .. } => family.default_source(),
            _ => 0,
        }
    }
}

pub fn family_params(family: &Family) -> Result<toml::Table> {
    let mut t = toml::Table::try_from(family).map_err(|e| Error::Config(e.to_string()))?;
    t.remove("family");
    Ok(t)
}

pub fn family_from_params(code: &str, params: &toml::Table) -> Result<Family> {
    let mut t = params.clone();
    t.insert("family".into(), toml::Value::String(code.into()));
    toml::Value::Table(t).try_into().map_err(|e| Error::Config(format!("family {code}: {e}")))
}

/// Reads a graph file (static schedule) or a schedule directory.
pub fn load_schedule(path: &Path) -> Result<ScheduleSource> {
    if path.is_file() {
        return Ok(ScheduleSource::Static(read_graph(path)?));
    }
    let mpath = path.join(MANIFEST);
    let text = fs::read_to_string(&mpath).map_err(|e| Error::io(&mpath, e))?;
    let m: Manifest = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", mpath.display())))?;
    let graphs = || -> Result<Vec<Graph>> { m.files.iter().map(|f| read_graph(&path.join(f))).collect() };
    match m.kind.as_str() {
        "static" => {
            let mut gs = graphs()?;
            if gs.len() != 1 {
                return Err(Error::Config(format!("static manifest lists {} files, expected 1", gs.len())));
            }
            Ok(ScheduleSource::Static(gs.remove(0)))
        }
        "sequence" => {
            let gs = graphs()?;
            SequenceSchedule::new(gs.clone())?;
            Ok(ScheduleSource::Sequence(gs))
        }
        kind => match kind.strip_prefix("adaptive:") {
            Some(code) => {
                Ok(ScheduleSource::Adaptive { family: family_from_params(code, &m.params)?, seed: m.seed.unwrap_or(0) })
            }
            None => Err(Error::Config(format!("unknown schedule kind {kind:?}"))),
        },
    }
}

fn write_manifest(dir: &Path, m: &Manifest) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let text = toml::to_string(m).map_err(|e| Error::Config(e.to_string()))?;
    let p = dir.join(MANIFEST);
    fs::write(&p, text).map_err(|e| Error::io(p, e))
}

/// Writes `g0000.txt, g0001.txt, …` plus a manifest; one graph makes a
/// static schedule.
pub fn write_graph_schedule(dir: &Path, graphs: &[Graph]) -> Result<Vec<PathBuf>> {
    if graphs.is_empty() {
        return Err(Error::Config("no graphs to write".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    let mut paths = Vec::new();
    for (i, g) in graphs.iter().enumerate() {
        let name = format!("g{i:04}.txt");
        let p = dir.join(&name);
        write_graph(&p, g)?;
        files.push(name);
        paths.push(p);
    }
    let kind = if graphs.len() == 1 { "static" } else { "sequence" };
    write_manifest(dir, &Manifest { kind: kind.into(), files, seed: None, params: toml::Table::new() })?;
    Ok(paths)
}

pub fn write_adaptive_schedule(dir: &Path, family: &Family, seed: u64) -> Result<()> {
    let m = Manifest {
        kind: format!("adaptive:{}", family.code()),
        files: Vec::new(),
        seed: Some(seed),
        params: family_params(family)?,
    };
    write_manifest(dir, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexSet;

    #[test]
    fn graph_round_trip() {
        let g = Graph::from_edges(5, &[(0, 1), (3, 1), (4, 2)]).unwrap();
        let text = graph_to_string(&g);
        assert_eq!(text, "5 3\n0 1\n1 3\n2 4\n");
        assert_eq!(parse_graph(&text, Path::new("x")).unwrap(), g);
    }

    #[test]
    fn parse_comments_and_errors() {
        let p = Path::new("g.txt");
        let g = parse_graph("# header next\n3 2 # n m\n0 1\n\n1 2 # tail\n", p).unwrap();
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert!(matches!(parse_graph("3 1\n0 0\n", p), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("3 1\n0 3\n", p), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("3 2\n0 1\n", p), Err(Error::Parse { line: 1, .. })));
        assert!(parse_graph("3 1\n0 x\n", p).is_err());
        assert!(parse_graph("", p).is_err());
    }

    #[test]
    fn schedule_directories() {
        let dir = tempfile::tempdir().unwrap();
        let seq = dir.path().join("seq");
        write_graph_schedule(&seq, &[Graph::path(4).unwrap(), Graph::complete(4).unwrap()]).unwrap();
        let src = load_schedule(&seq).unwrap();
        let mut s = src.build(None).unwrap();
        assert_eq!(s.graph_at(5, &VertexSet::new(4)).unwrap().num_edges(), 6);

        let ad = dir.path().join("ad");
        let fam = Family::GbarNRho { n: 60, rho: 0.5 };
        write_adaptive_schedule(&ad, &fam, 9).unwrap();
        assert_eq!(load_schedule(&ad).unwrap(), ScheduleSource::Adaptive { family: fam, seed: 9 });

        let single = dir.path().join("one.txt");
        write_graph(&single, &Graph::star(4, 0).unwrap()).unwrap();
        assert_eq!(load_schedule(&single).unwrap(), ScheduleSource::Static(Graph::star(4, 0).unwrap()));
    }
}
