//! Text checkpoints: the training configuration, progress counters, every
//! word message and, for TTM, the full tag-model state. Aggregates are not
//! stored; they are rebuilt from the messages on load, exactly as the
//! trainer rebuilds them after every sweep.

use std::fmt::Write as _;
use std::path::Path;

use tagtopic_core::lda::LdaTrainer;
use tagtopic_core::ttm::{TtmStateParts, TtmTrainer};
use tagtopic_core::{Corpus, MessageState, NeighborMode, Schedule, TagGraph, TrainConfig, TtmConfig, TtmState};

use crate::error::{CliError, Result};
use crate::formats::{read_text, write_text};

const MAGIC: &str = "tagtopic-checkpoint 1";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub config: TrainConfig,
    /// Present for tag-topic runs.
    pub ttm: Option<(TtmConfig, TtmStateParts)>,
    pub iteration: usize,
    pub converged: bool,
    pub messages: Vec<f64>,
}

impl Checkpoint {
    pub fn from_lda(config: &TrainConfig, trainer: &LdaTrainer<'_>) -> Self {
        Checkpoint {
            config: config.clone(),
            ttm: None,
            iteration: trainer.iteration(),
            converged: trainer.converged(),
            messages: trainer.state().messages().to_vec(),
        }
    }

    pub fn from_ttm(config: &TrainConfig, ttm_config: &TtmConfig, trainer: &TtmTrainer<'_>) -> Self {
        Checkpoint {
            config: config.clone(),
            ttm: Some((ttm_config.clone(), trainer.ttm_state().to_parts())),
            iteration: trainer.iteration(),
            converged: trainer.converged(),
            messages: trainer.messages().messages().to_vec(),
        }
    }

    fn messages(&self, corpus: &Corpus) -> Result<MessageState> {
        Ok(MessageState::from_messages(corpus, self.config.topics, self.config.seed, self.messages.clone())?)
    }

    /// Resumes LDA training; `max_iters` and `tol` come from `config`, everything else from the checkpoint.
    pub fn resume_lda<'a>(&self, corpus: &'a Corpus, config: &mut TrainConfig) -> Result<LdaTrainer<'a>> {
        if self.ttm.is_some() {
            return Err(CliError::Config("checkpoint holds a tag-topic model".into()));
        }
        *config = TrainConfig { max_iters: config.max_iters, tol: config.tol, ..self.config.clone() };
        Ok(LdaTrainer::resume(corpus, config.clone(), self.messages(corpus)?, self.iteration, self.converged)?)
    }

    /// Resumes TTM training; `max_iters` and `tol` come from `config`, everything else from the checkpoint.
    pub fn resume_ttm<'a>(
        &self,
        corpus: &'a Corpus,
        tags: &'a TagGraph,
        config: &mut TrainConfig,
        ttm_config: &mut TtmConfig,
    ) -> Result<TtmTrainer<'a>> {
        let Some((saved, parts)) = &self.ttm else {
            return Err(CliError::Config("checkpoint holds an LDA model".into()));
        };
        *config = TrainConfig { max_iters: config.max_iters, tol: config.tol, ..self.config.clone() };
        *ttm_config = saved.clone();
        let ttm = TtmState::from_parts(corpus, tags, config.topics, parts.clone())?;
        Ok(TtmTrainer::resume(
            corpus,
            tags,
            config.clone(),
            saved.clone(),
            self.messages(corpus)?,
            ttm,
            self.iteration,
            self.converged,
        )?)
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut s = format!("{MAGIC}\n");
        let mut kv = |k: &str, v: String| writeln!(s, "{k} {v}").unwrap();
        kv("model", if self.ttm.is_some() { "ttm" } else { "lda" }.into());
        kv("topics", c.topics.to_string());
        kv("alpha", c.alpha.to_string());
        kv("beta", c.beta.to_string());
        kv("max_iters", c.max_iters.to_string());
        kv("tol", c.tol.to_string());
        kv("schedule", schedule_name(c.schedule).into());
        kv("seed", c.seed.to_string());
        kv("iteration", self.iteration.to_string());
        kv("converged", self.converged.to_string());
        if let Some((t, parts)) = &self.ttm {
            kv("omega1", t.omega1.to_string());
            kv("omega2", t.omega2.to_string());
            kv("order", t.order.to_string());
            kv("tuple_cap", t.tuple_cap.map_or("none".into(), |n| n.to_string()));
            kv("neighbor_mode", neighbor_name(t.neighbor_mode).into());
            kv("warmup", t.warmup.to_string());
            kv("gamma_ready", parts.gamma_ready.to_string());
        }
        let k = c.topics.max(1);
        push_array(&mut s, "messages", &self.messages, k);
        if let Some((_, p)) = &self.ttm {
            push_array(&mut s, "credit", &p.credit, k);
            push_array(&mut s, "doc_tag", &p.doc_tag, k);
            push_array(&mut s, "pairwise", &p.pairwise, k);
            push_array(&mut s, "hyper", &p.hyper, k);
            push_array(&mut s, "gamma", &p.gamma, k);
            push_array(&mut s, "delta", &p.delta, k);
        }
        s.push_str("end\n");
        s
    }

    pub fn from_text(path: &Path, text: &str) -> Result<Self> {
        let mut r = Reader { path, lines: text.lines().enumerate().peekable() };
        let (ln, first) = r.line()?;
        if first.trim() != MAGIC {
            return Err(CliError::parse(path, ln, "not a tagtopic checkpoint"));
        }
        let model = r.value("model")?;
        let config = TrainConfig {
            topics: r.parsed("topics")?,
            alpha: r.parsed("alpha")?,
            beta: r.parsed("beta")?,
            max_iters: r.parsed("max_iters")?,
            tol: r.parsed("tol")?,
            schedule: {
                let (ln, v) = r.value_at("schedule")?;
                parse_schedule(&v).ok_or_else(|| CliError::parse(path, ln, format!("unknown schedule {v:?}")))?
            },
            seed: r.parsed("seed")?,
        };
        let iteration = r.parsed("iteration")?;
        let converged = r.parsed("converged")?;
        let ttm_config = match model.as_str() {
            "lda" => None,
            "ttm" => {
                let omega1 = r.parsed("omega1")?;
                let omega2 = r.parsed("omega2")?;
                let order = r.parsed("order")?;
                let (ln, cap) = r.value_at("tuple_cap")?;
                let tuple_cap = match cap.as_str() {
                    "none" => None,
                    n => Some(n.parse().map_err(|_| CliError::parse(path, ln, format!("bad tuple cap {n:?}")))?),
                };
                let (ln, mode) = r.value_at("neighbor_mode")?;
                let neighbor_mode = parse_neighbor(&mode)
                    .ok_or_else(|| CliError::parse(path, ln, format!("unknown neighbour mode {mode:?}")))?;
                let warmup = r.parsed("warmup")?;
                let gamma_ready: bool = r.parsed("gamma_ready")?;
                Some((TtmConfig { omega1, omega2, order, tuple_cap, neighbor_mode, warmup }, gamma_ready))
            }
            other => return Err(CliError::parse(path, ln + 1, format!("unknown model {other:?}"))),
        };
        let messages = r.array("messages")?;
        let ttm = match ttm_config {
            None => None,
            Some((t, gamma_ready)) => Some((
                t,
                TtmStateParts {
                    credit: r.array("credit")?,
                    doc_tag: r.array("doc_tag")?,
                    pairwise: r.array("pairwise")?,
                    hyper: r.array("hyper")?,
                    gamma: r.array("gamma")?,
                    delta: r.array("delta")?,
                    gamma_ready,
                },
            )),
        };
        // a cut-off file can still end in a parseable number
        let (ln, last) = r.line()?;
        if last.trim() != "end" {
            return Err(CliError::parse(path, ln, "expected end marker"));
        }
        Ok(Checkpoint { config, ttm, iteration, converged, messages })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(path, &read_text(path)?)
    }
}

pub fn schedule_name(s: Schedule) -> &'static str {
    match s {
        Schedule::Sequential => "sequential",
        Schedule::Synchronous => "synchronous",
    }
}

pub fn parse_schedule(s: &str) -> Option<Schedule> {
    match s {
        "sequential" => Some(Schedule::Sequential),
        "synchronous" => Some(Schedule::Synchronous),
        _ => None,
    }
}

pub fn neighbor_name(m: NeighborMode) -> &'static str {
    match m {
        NeighborMode::CrossProduct => "cross",
        NeighborMode::Joint => "joint",
    }
}

pub fn parse_neighbor(s: &str) -> Option<NeighborMode> {
    match s {
        "cross" => Some(NeighborMode::CrossProduct),
        "joint" => Some(NeighborMode::Joint),
        _ => None,
    }
}

fn push_array(s: &mut String, name: &str, values: &[f64], per_line: usize) {
    writeln!(s, "{name} {}", values.len()).unwrap();
    for chunk in values.chunks(per_line) {
        let row: Vec<String> = chunk.iter().map(f64::to_string).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
}

struct Reader<'a> {
    path: &'a Path,
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Reader<'a> {
    fn line(&mut self) -> Result<(usize, &'a str)> {
        self.lines
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| CliError::parse(self.path, 0, "unexpected end of checkpoint"))
    }

    fn value_at(&mut self, key: &str) -> Result<(usize, String)> {
        let (ln, l) = self.line()?;
        match l.split_once(' ') {
            Some((k, v)) if k == key => Ok((ln, v.trim().to_string())),
            _ => Err(CliError::parse(self.path, ln, format!("expected \"{key} <value>\""))),
        }
    }

    fn value(&mut self, key: &str) -> Result<String> {
        self.value_at(key).map(|(_, v)| v)
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (ln, v) = self.value_at(key)?;
        v.parse().map_err(|_| CliError::parse(self.path, ln, format!("bad {key} {v:?}")))
    }

    fn array(&mut self, key: &str) -> Result<Vec<f64>> {
        let (ln, n): (usize, usize) = {
            let (ln, v) = self.value_at(key)?;
            (ln, v.parse().map_err(|_| CliError::parse(self.path, ln, format!("bad {key} length {v:?}")))?)
        };
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let (ln, l) = self.line()?;
            for tok in l.split_whitespace() {
                out.push(tok.parse().map_err(|_| CliError::parse(self.path, ln, format!("bad value {tok:?}")))?);
            }
        }
        if out.len() != n {
            return Err(CliError::parse(self.path, ln, format!("{key}: expected {n} values, found {}", out.len())));
        }
        Ok(out)
    }
}
