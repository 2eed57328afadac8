//! Plain-text file formats.
//!
//! Every reader reports the 1-based line number of a malformed line. Reals are
//! written with Rust's shortest round-trip formatting, so a written value
//! parses back to the identical `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use tagtopic_core::eval::{FeatureRow, TagRecResult};
use tagtopic_core::ttm::CreditRecord;
use tagtopic_core::{Corpus, Matrix, TagGraph, TraceRow};

use crate::error::{CliError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io(path, e))
}

/// Non-blank lines with `#` comments stripped, paired with their line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn field<T: FromStr>(path: &Path, line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| CliError::parse(path, line, format!("missing {what}")))?;
    tok.parse().map_err(|_| CliError::parse(path, line, format!("bad {what} {tok:?}")))
}

fn no_more(path: &Path, line: usize, mut toks: std::str::SplitWhitespace<'_>) -> Result<()> {
    match toks.next() {
        Some(t) => Err(CliError::parse(path, line, format!("unexpected trailing field {t:?}"))),
        None => Ok(()),
    }
}

/// Sparse triples: header `D W nnz`, then one `d w n` line per entry.
pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let text = read_text(path)?;
    let mut it = lines(&text);
    let (hl, header) = it.next().ok_or_else(|| CliError::parse(path, 1, "missing header \"D W nnz\""))?;
    let mut toks = header.split_whitespace();
    let docs: usize = field(path, hl, toks.next(), "document count")?;
    let vocab: usize = field(path, hl, toks.next(), "vocabulary size")?;
    let nnz: usize = field(path, hl, toks.next(), "entry count")?;
    no_more(path, hl, toks)?;
    let mut triples = Vec::with_capacity(nnz);
    for (ln, l) in it {
        let mut toks = l.split_whitespace();
        let d: usize = field(path, ln, toks.next(), "document id")?;
        let w: usize = field(path, ln, toks.next(), "word id")?;
        let n: u32 = field(path, ln, toks.next(), "count")?;
        no_more(path, ln, toks)?;
        triples.push((d, w, n));
    }
    if triples.len() != nnz {
        return Err(CliError::parse(path, hl, format!("header declares {nnz} entries, found {}", triples.len())));
    }
    Ok(Corpus::new(docs, vocab, triples)?)
}

pub fn write_corpus(path: &Path, corpus: &Corpus) -> Result<()> {
    let mut s = format!("{} {} {}\n", corpus.num_docs(), corpus.num_vocab(), corpus.nnz());
    for e in corpus.entries() {
        writeln!(s, "{} {} {}", e.doc, e.word, e.count).unwrap();
    }
    write_text(path, &s)
}

/// Lines `d t1 t2 …`; documents without a line have no tags. `T` defaults to
/// one past the largest tag id.
pub fn read_tags(path: &Path, num_docs: usize, num_tags: Option<usize>) -> Result<TagGraph> {
    let text = read_text(path)?;
    let mut lists: Vec<Option<Vec<usize>>> = vec![None; num_docs];
    for (ln, l) in lines(&text) {
        let mut toks = l.split_whitespace();
        let d: usize = field(path, ln, toks.next(), "document id")?;
        if d >= num_docs {
            return Err(CliError::parse(path, ln, format!("document id {d} out of range (D = {num_docs})")));
        }
        if lists[d].is_some() {
            return Err(CliError::parse(path, ln, format!("document {d} listed twice")));
        }
        let tags = toks
            .map(|t| t.parse().map_err(|_| CliError::parse(path, ln, format!("bad tag id {t:?}"))))
            .collect::<Result<Vec<usize>>>()?;
        let mut sorted = tags.clone();
        sorted.sort_unstable();
        if let Some(p) = sorted.windows(2).find(|p| p[0] == p[1]) {
            return Err(CliError::parse(path, ln, format!("tag {} repeated", p[0])));
        }
        lists[d] = Some(tags);
    }
    let lists: Vec<Vec<usize>> = lists.into_iter().map(Option::unwrap_or_default).collect();
    Ok(match num_tags {
        Some(t) => TagGraph::new(t, &lists)?,
        None => TagGraph::from_doc_tags(&lists)?,
    })
}

pub fn write_tags(path: &Path, tags: &TagGraph) -> Result<()> {
    let mut s = String::new();
    for d in 0..tags.num_docs() {
        let ne = tags.tags_of(d);
        if ne.is_empty() {
            continue;
        }
        write!(s, "{d}").unwrap();
        for t in ne {
            write!(s, " {t}").unwrap();
        }
        s.push('\n');
    }
    write_text(path, &s)
}

/// Lines `d label`; unlisted documents are unlabelled.
pub fn read_labels(path: &Path, num_docs: usize) -> Result<Vec<Option<String>>> {
    let text = read_text(path)?;
    let mut labels = vec![None; num_docs];
    for (ln, l) in lines(&text) {
        let mut toks = l.split_whitespace();
        let d: usize = field(path, ln, toks.next(), "document id")?;
        let label: String = field(path, ln, toks.next(), "label")?;
        no_more(path, ln, toks)?;
        let slot = labels
            .get_mut(d)
            .ok_or_else(|| CliError::parse(path, ln, format!("document id {d} out of range (D = {num_docs})")))?;
        if slot.replace(label).is_some() {
            return Err(CliError::parse(path, ln, format!("document {d} labelled twice")));
        }
    }
    Ok(labels)
}

/// One word per line; line `i` names word `i`.
pub fn read_vocab(path: &Path) -> Result<Vec<String>> {
    Ok(read_text(path)?.lines().map(|l| l.trim().to_string()).collect())
}

/// Header `rows cols`, then one whitespace-separated row per line.
pub fn write_matrix(path: &Path, m: &Matrix) -> Result<()> {
    let mut s = format!("{} {}\n", m.rows(), m.cols());
    for row in m.iter_rows() {
        push_row(&mut s, row, ' ');
    }
    write_text(path, &s)
}

fn push_row(s: &mut String, row: &[f64], sep: char) {
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            s.push(sep);
        }
        write!(s, "{x}").unwrap();
    }
    s.push('\n');
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = read_text(path)?;
    let mut it = lines(&text);
    let (hl, header) = it.next().ok_or_else(|| CliError::parse(path, 1, "missing header \"rows cols\""))?;
    let mut toks = header.split_whitespace();
    let rows: usize = field(path, hl, toks.next(), "row count")?;
    let cols: usize = field(path, hl, toks.next(), "column count")?;
    no_more(path, hl, toks)?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (ln, l) in it {
        let before = data.len();
        for tok in l.split_whitespace() {
            data.push(field::<f64>(path, ln, Some(tok), "value")?);
        }
        if data.len() - before != cols {
            return Err(CliError::parse(path, ln, format!("expected {cols} values, found {}", data.len() - before)));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(CliError::parse(path, hl, format!("header declares {rows} rows, found {seen}")));
    }
    Ok(Matrix::from_vec(rows, cols, data).expect("shape checked"))
}

pub fn write_trace(path: &Path, trace: &[TraceRow]) -> Result<()> {
    let mut s = String::from("iteration,max_delta,train_perplexity\n");
    for r in trace {
        writeln!(s, "{},{},{}", r.iteration, r.max_delta, r.perplexity).unwrap();
    }
    write_text(path, &s)
}

/// Whitespace triples `d t score`.
pub fn read_scores(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let text = read_text(path)?;
    lines(&text)
        .map(|(ln, l)| {
            let mut toks = l.split_whitespace();
            let d = field(path, ln, toks.next(), "document id")?;
            let t = field(path, ln, toks.next(), "tag id")?;
            let s = field(path, ln, toks.next(), "score")?;
            no_more(path, ln, toks)?;
            Ok((d, t, s))
        })
        .collect()
}

pub fn write_scores(path: &Path, scores: &[(usize, usize, f64)]) -> Result<()> {
    let mut s = String::new();
    for (d, t, y) in scores {
        writeln!(s, "{d} {t} {y}").unwrap();
    }
    write_text(path, &s)
}

/// Lines `d d' label` with label `0` or `1`.
pub fn read_link_pairs(path: &Path) -> Result<Vec<(usize, usize, bool)>> {
    let text = read_text(path)?;
    lines(&text)
        .map(|(ln, l)| {
            let mut toks = l.split_whitespace();
            let a = field(path, ln, toks.next(), "document id")?;
            let b = field(path, ln, toks.next(), "document id")?;
            let label: u8 = field(path, ln, toks.next(), "label")?;
            no_more(path, ln, toks)?;
            match label {
                0 | 1 => Ok((a, b, label == 1)),
                _ => Err(CliError::parse(path, ln, format!("label must be 0 or 1, got {label}"))),
            }
        })
        .collect()
}

/// CSV with header `topic_0,…,topic_{J-1},label`.
pub fn write_features(path: &Path, topics: usize, rows: &[FeatureRow]) -> Result<()> {
    let mut s = String::new();
    for j in 0..topics {
        write!(s, "topic_{j},").unwrap();
    }
    s.push_str("label\n");
    for r in rows {
        for x in &r.features {
            write!(s, "{x},").unwrap();
        }
        s.push_str(&r.label);
        s.push('\n');
    }
    write_text(path, &s)
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let text = read_text(path)?;
    let mut it = text.lines().enumerate();
    let cols = match it.next() {
        Some((_, h)) => h.split(',').count(),
        None => return Err(CliError::parse(path, 1, "missing header")),
    };
    it.filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let toks: Vec<&str> = l.split(',').collect();
            if toks.len() != cols {
                return Err(CliError::parse(path, i + 1, format!("expected {cols} fields, found {}", toks.len())));
            }
            let (label, values) = toks.split_last().expect("header has a label column");
            let features = values.iter().map(|t| field(path, i + 1, Some(t), "value")).collect::<Result<Vec<f64>>>()?;
            Ok(FeatureRow { features, label: label.to_string() })
        })
        .collect()
}

/// Lines `d w t p`.
pub fn write_credit(path: &Path, records: &[CreditRecord]) -> Result<()> {
    let mut s = String::new();
    for r in records {
        writeln!(s, "{} {} {} {}", r.doc, r.word, r.tag, r.p).unwrap();
    }
    write_text(path, &s)
}

pub fn read_credit(path: &Path) -> Result<Vec<CreditRecord>> {
    let text = read_text(path)?;
    lines(&text)
        .map(|(ln, l)| {
            let mut toks = l.split_whitespace();
            let doc = field(path, ln, toks.next(), "document id")?;
            let word = field(path, ln, toks.next(), "word id")?;
            let tag = field(path, ln, toks.next(), "tag id")?;
            let p = field(path, ln, toks.next(), "probability")?;
            no_more(path, ln, toks)?;
            Ok(CreditRecord { doc, word, tag, p })
        })
        .collect()
}

/// Lines `d t1 t2 …`, one per document, in rank order.
pub fn write_suggestions(path: &Path, ranked: &[Vec<(usize, f64)>]) -> Result<()> {
    let mut s = String::new();
    for (d, tags) in ranked.iter().enumerate() {
        write!(s, "{d}").unwrap();
        for (t, _) in tags {
            write!(s, " {t}").unwrap();
        }
        s.push('\n');
    }
    write_text(path, &s)
}

/// Per-tag CSV; absent rates are left empty.
pub fn write_metrics(path: &Path, result: &TagRecResult) -> Result<()> {
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    let mut s = String::from("tag,n_h,n_s,n_c,recall,precision\n");
    for m in &result.per_tag {
        writeln!(s, "{},{},{},{},{},{}", m.tag, m.n_h, m.n_s, m.n_c, opt(m.recall), opt(m.precision)).unwrap();
    }
    write_text(path, &s)
}

/// `Recall Precision Rate+` as percentages.
pub fn metrics_summary(result: &TagRecResult) -> String {
    format!(
        "recall {:.2}% precision {:.2}% rate+ {:.2}%",
        100.0 * result.mean_recall,
        100.0 * result.mean_precision,
        100.0 * result.rate_plus
    )
}

/// One block per topic: a `Topic j` heading, then `word  φ` lines.
pub fn topic_table(top: &[Vec<(usize, f64)>], vocab: Option<&[String]>) -> String {
    let name = |w: usize| match vocab.and_then(|v| v.get(w)) {
        Some(s) => s.clone(),
        None => format!("w{w}"),
    };
    let mut s = String::new();
    for (j, words) in top.iter().enumerate() {
        if j > 0 {
            s.push('\n');
        }
        writeln!(s, "Topic {}", j + 1).unwrap();
        for &(w, p) in words {
            writeln!(s, "{:<20} {p:.6}", name(w)).unwrap();
        }
    }
    s
}
