//! Input parsing and checkpoint persistence.
//!
//! Four TSV formats feed the pipeline:
//!
//! * vocabulary: `id<TAB>name<TAB>domain` with `domain` one of
//!   `source`/`target`; ids must be the contiguous range `0..n-1`.
//! * relations: `source_name<TAB>target_name<TAB>label` with label `1` or `0`.
//! * embeddings: `name<TAB>v1<TAB>...<TAB>vd`, one line per concept name.
//! * co-occurrence: a `#docs=N` header, then `nameA<TAB>nameB<TAB>count`
//!   lines; a line with `nameA == nameB` carries that concept's marginal
//!   document count.
//!
//! Concept names are matched case-insensitively after whitespace trimming,
//! since lecture-slide vocabularies capitalize inconsistently. Blank lines
//! and `#`-prefixed comment lines are skipped everywhere.
//!
//! Checkpoints use a little-endian binary layout (see [`checkpoint`]) so a
//! save/load round trip reproduces every parameter bit for bit.

mod checkpoint;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

/// Errors from the loaders and checkpoint codec.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, DataError>;

/// Which domain a concept belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainTag {
    Source,
    Target,
}

impl DomainTag {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainTag::Source => "source",
            DomainTag::Target => "target",
        }
    }
}

impl std::fmt::Display for DomainTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One vocabulary entry.
#[derive(Debug, Clone)]
pub struct Concept {
    pub id: usize,
    pub name: String,
    pub domain: DomainTag,
}

/// Ordered concept vocabulary covering both domains.
///
/// Ids are contiguous `0..len`; names are unique within each domain under
/// case-insensitive trimmed comparison.
#[derive(Debug, Clone)]
pub struct ConceptVocab {
    concepts: Vec<Concept>,
    by_key: HashMap<(DomainTag, String), usize>,
}

/// Normalized form used for all name lookups.
pub fn normalize_name(raw: &str) -> String {
    raw.trim().to_lowercase()
}

impl ConceptVocab {
    /// Assemble a vocabulary from `(name, domain)` pairs in id order.
    pub fn from_entries(entries: Vec<(String, DomainTag)>) -> std::result::Result<Self, String> {
        let mut concepts = Vec::with_capacity(entries.len());
        let mut by_key = HashMap::new();
        for (id, (name, domain)) in entries.into_iter().enumerate() {
            let key = (domain, normalize_name(&name));
            if key.1.is_empty() {
                return Err(format!("concept {id} has an empty name"));
            }
            if by_key.insert(key, id).is_some() {
                return Err(format!("duplicate concept name '{}' in {domain} domain", name.trim()));
            }
            concepts.push(Concept { id, name, domain });
        }
        Ok(Self { concepts, by_key })
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn get(&self, id: usize) -> Option<&Concept> {
        self.concepts.get(id)
    }

    /// Concept id for `name` within `domain`.
    pub fn lookup(&self, domain: DomainTag, name: &str) -> Option<usize> {
        self.by_key.get(&(domain, normalize_name(name))).copied()
    }

    /// Concept id for `name` in either domain, preferring the target one.
    ///
    /// Shared surface names (e.g. fundamentals present in both domains)
    /// resolve to the target concept because prediction queries are about
    /// the target domain.
    pub fn lookup_any(&self, name: &str) -> Option<usize> {
        self.lookup(DomainTag::Target, name)
            .or_else(|| self.lookup(DomainTag::Source, name))
    }

    /// Ids of all concepts in `domain`, in vocabulary order.
    pub fn domain_ids(&self, domain: DomainTag) -> Vec<usize> {
        self.concepts
            .iter()
            .filter(|c| c.domain == domain)
            .map(|c| c.id)
            .collect()
    }

    pub fn domain_len(&self, domain: DomainTag) -> usize {
        self.concepts.iter().filter(|c| c.domain == domain).count()
    }
}

/// One directed labeled concept pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Relation {
    pub from: usize,
    pub to: usize,
    /// 1 when `from` is a prerequisite of `to`, 0 otherwise.
    pub label: u8,
}

/// Directed labeled pairs with no self-pairs and no duplicate `(p, q)` keys.
#[derive(Debug, Clone, Default)]
pub struct RelationSet {
    relations: Vec<Relation>,
}

impl RelationSet {
    pub fn from_relations(relations: Vec<Relation>) -> std::result::Result<Self, String> {
        let mut seen = std::collections::HashSet::new();
        for r in &relations {
            if r.from == r.to {
                return Err(format!("self-pair on concept id {}", r.from));
            }
            if !seen.insert((r.from, r.to)) {
                return Err(format!("duplicate pair ({}, {})", r.from, r.to));
            }
            if r.label > 1 {
                return Err(format!("label must be 0 or 1, got {}", r.label));
            }
        }
        Ok(Self { relations })
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Only the label-1 pairs.
    pub fn positives(&self) -> Vec<Relation> {
        self.relations.iter().copied().filter(|r| r.label == 1).collect()
    }
}

/// Embedding vectors for every vocabulary concept, uniform dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Vector for concept `id`.
    pub fn vector(&self, id: usize) -> &[f64] {
        &self.vectors[id]
    }

    /// Build directly from per-concept vectors (synthetic data path).
    pub fn from_vectors(vectors: Vec<Vec<f64>>) -> std::result::Result<Self, String> {
        let dim = vectors.first().map_or(0, |v| v.len());
        if dim == 0 {
            return Err("embedding table needs at least one non-empty vector".into());
        }
        for (id, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(format!(
                    "concept {id} has dimension {} but expected {dim}",
                    v.len()
                ));
            }
            let norm2: f64 = v.iter().map(|x| x * x).sum();
            if norm2 == 0.0 {
                return Err(format!("concept {id} has a zero-norm embedding"));
            }
            if !norm2.is_finite() {
                return Err(format!("concept {id} has a non-finite embedding"));
            }
        }
        Ok(Self { dim, vectors })
    }
}

/// Document co-occurrence counts keyed by normalized concept name.
///
/// `pair(a, b)` is unordered; `marginal(a)` is the number of documents that
/// mention `a` at all; `total_docs` is the corpus size.
#[derive(Debug, Clone)]
pub struct CooccurrenceCounts {
    total_docs: u64,
    marginals: HashMap<String, u64>,
    pairs: HashMap<(String, String), u64>,
}

impl CooccurrenceCounts {
    pub fn total_docs(&self) -> u64 {
        self.total_docs
    }

    pub fn marginal(&self, name: &str) -> Option<u64> {
        self.marginals.get(&normalize_name(name)).copied()
    }

    pub fn pair(&self, a: &str, b: &str) -> u64 {
        let (ka, kb) = ordered_key(&normalize_name(a), &normalize_name(b));
        self.pairs.get(&(ka, kb)).copied().unwrap_or(0)
    }

    pub fn from_counts(
        total_docs: u64,
        marginals: HashMap<String, u64>,
        pairs: HashMap<(String, String), u64>,
    ) -> std::result::Result<Self, String> {
        for (name, &m) in &marginals {
            if m > total_docs {
                return Err(format!(
                    "marginal of '{name}' ({m}) exceeds total documents ({total_docs})"
                ));
            }
        }
        for ((a, b), &c) in &pairs {
            let ma = *marginals
                .get(a)
                .ok_or_else(|| format!("pair ({a}, {b}) lacks a marginal for '{a}'"))?;
            let mb = *marginals
                .get(b)
                .ok_or_else(|| format!("pair ({a}, {b}) lacks a marginal for '{b}'"))?;
            if c > ma.min(mb) {
                return Err(format!(
                    "pair count for ({a}, {b}) is {c}, above min marginal {}",
                    ma.min(mb)
                ));
            }
        }
        Ok(Self {
            total_docs,
            marginals,
            pairs,
        })
    }
}

fn ordered_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> DataError {
    DataError::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// Load a concept vocabulary from `id<TAB>name<TAB>domain` lines.
pub fn load_vocab(path: &Path) -> Result<ConceptVocab> {
    let text = read_to_string(path)?;
    let mut rows: Vec<(usize, usize, String, DomainTag)> = Vec::new();
    for (line_no, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let id: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid concept id '{}'", fields[0])))?;
        let domain = match normalize_name(fields[2]).as_str() {
            "source" => DomainTag::Source,
            "target" => DomainTag::Target,
            other => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("domain must be 'source' or 'target', got '{other}'"),
                ))
            }
        };
        rows.push((line_no, id, fields[1].to_string(), domain));
    }
    let n = rows.len();
    let mut ordered: Vec<Option<(usize, String, DomainTag)>> = vec![None; n];
    for (line_no, id, name, domain) in rows {
        if id >= n {
            return Err(parse_err(
                path,
                line_no,
                format!("concept id {id} is outside the contiguous range 0..{n}"),
            ));
        }
        if ordered[id].is_some() {
            return Err(parse_err(path, line_no, format!("duplicate concept id {id}")));
        }
        ordered[id] = Some((line_no, name, domain));
    }
    let mut entries = Vec::with_capacity(n);
    let mut line_of = Vec::with_capacity(n);
    for slot in ordered {
        // None is impossible here: n slots, n unique in-range ids.
        let (line_no, name, domain) = slot.expect("contiguity established above");
        entries.push((name, domain));
        line_of.push(line_no);
    }
    ConceptVocab::from_entries(entries).map_err(|message| {
        // Attribute duplicate-name errors to the later of the two lines.
        let line = line_of.last().copied().unwrap_or(0);
        parse_err(path, line, message)
    })
}

/// Load directed relations whose names resolve within `domain`.
pub fn load_relations(path: &Path, vocab: &ConceptVocab, domain: DomainTag) -> Result<RelationSet> {
    let text = read_to_string(path)?;
    let mut relations = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line_no, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let from = vocab.lookup(domain, fields[0]).ok_or_else(|| {
            parse_err(
                path,
                line_no,
                format!("unknown {domain}-domain concept '{}'", fields[0].trim()),
            )
        })?;
        let to = vocab.lookup(domain, fields[1]).ok_or_else(|| {
            parse_err(
                path,
                line_no,
                format!("unknown {domain}-domain concept '{}'", fields[1].trim()),
            )
        })?;
        let label: u8 = match fields[2].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("label must be 0 or 1, got '{other}'"),
                ))
            }
        };
        if from == to {
            return Err(parse_err(
                path,
                line_no,
                format!("self-pair on concept '{}'", fields[0].trim()),
            ));
        }
        if !seen.insert((from, to)) {
            return Err(parse_err(
                path,
                line_no,
                format!("duplicate pair ('{}', '{}')", fields[0].trim(), fields[1].trim()),
            ));
        }
        relations.push(Relation { from, to, label });
    }
    Ok(RelationSet { relations })
}

/// Load embeddings for every vocabulary concept.
///
/// Each line assigns its vector to every concept (in either domain) whose
/// name matches, so a shared surface name needs only one line.
pub fn load_embeddings(path: &Path, vocab: &ConceptVocab) -> Result<EmbeddingTable> {
    let text = read_to_string(path)?;
    let mut vectors: Vec<Option<Vec<f64>>> = vec![None; vocab.len()];
    let mut dim: Option<usize> = None;
    for (line_no, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            return Err(parse_err(path, line_no, "expected a name and at least one value"));
        }
        let name = fields[0];
        let mut vector = Vec::with_capacity(fields.len() - 1);
        for raw in &fields[1..] {
            let v: f64 = raw.trim().parse().map_err(|_| {
                parse_err(path, line_no, format!("invalid float '{}'", raw.trim()))
            })?;
            if !v.is_finite() {
                return Err(parse_err(path, line_no, "non-finite embedding value"));
            }
            vector.push(v);
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("embedding dimension {} does not match earlier dimension {d}", vector.len()),
                ))
            }
            _ => {}
        }
        if vector.iter().map(|v| v * v).sum::<f64>() == 0.0 {
            return Err(parse_err(
                path,
                line_no,
                format!("zero-norm embedding for concept '{}'", name.trim()),
            ));
        }
        let mut matched = false;
        for domain in [DomainTag::Source, DomainTag::Target] {
            if let Some(id) = vocab.lookup(domain, name) {
                if vectors[id].is_some() {
                    return Err(parse_err(
                        path,
                        line_no,
                        format!("duplicate embedding for concept '{}'", name.trim()),
                    ));
                }
                vectors[id] = Some(vector.clone());
                matched = true;
            }
        }
        if !matched {
            return Err(parse_err(
                path,
                line_no,
                format!("embedding for unknown concept '{}'", name.trim()),
            ));
        }
    }
    let mut complete = Vec::with_capacity(vocab.len());
    for (id, slot) in vectors.into_iter().enumerate() {
        match slot {
            Some(v) => complete.push(v),
            None => {
                return Err(DataError::Invalid {
                    path: path.display().to_string(),
                    message: format!(
                        "missing embedding for concept '{}'",
                        vocab.get(id).map(|c| c.name.as_str()).unwrap_or("?")
                    ),
                })
            }
        }
    }
    EmbeddingTable::from_vectors(complete).map_err(|message| DataError::Invalid {
        path: path.display().to_string(),
        message,
    })
}

/// Load co-occurrence counts: a `#docs=N` header, then pair-count lines.
/// A line whose two names are equal sets that concept's marginal count.
pub fn load_cooccurrence(path: &Path) -> Result<CooccurrenceCounts> {
    let text = read_to_string(path)?;
    let mut total_docs: Option<u64> = None;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("#docs=") {
            total_docs = Some(rest.trim().parse().map_err(|_| {
                parse_err(path, i + 1, format!("invalid document count '{}'", rest.trim()))
            })?);
        }
        break;
    }
    let total_docs = total_docs.ok_or_else(|| DataError::Invalid {
        path: path.display().to_string(),
        message: "missing '#docs=N' header line".to_string(),
    })?;
    let mut marginals = HashMap::new();
    let mut pairs = HashMap::new();
    for (line_no, line) in content_lines(&text) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                path,
                line_no,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let count: u64 = fields[2].trim().parse().map_err(|_| {
            parse_err(path, line_no, format!("invalid count '{}'", fields[2].trim()))
        })?;
        let a = normalize_name(fields[0]);
        let b = normalize_name(fields[1]);
        if a == b {
            if marginals.insert(a.clone(), count).is_some() {
                return Err(parse_err(path, line_no, format!("duplicate marginal for '{a}'")));
            }
        } else {
            let key = ordered_key(&a, &b);
            if pairs.insert(key, count).is_some() {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("duplicate pair count for ('{a}', '{b}')"),
                ));
            }
        }
    }
    CooccurrenceCounts::from_counts(total_docs, marginals, pairs).map_err(|message| {
        DataError::Invalid {
            path: path.display().to_string(),
            message,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_small_vocab() {
        let f = write_temp("0\tneural networks\tsource\n1\tparsing\tsource\n2\tdna\ttarget\n");
        let vocab = load_vocab(f.path()).unwrap();
        assert_eq!(vocab.len(), 3);
        assert_eq!(vocab.lookup(DomainTag::Source, "Parsing "), Some(1));
        assert_eq!(vocab.lookup(DomainTag::Target, "DNA"), Some(2));
        assert_eq!(vocab.domain_len(DomainTag::Source), 2);
    }

    #[test]
    fn vocab_rejects_duplicate_name_with_line_number() {
        let f = write_temp("0\talpha\tsource\n1\tAlpha\tsource\n");
        let err = load_vocab(f.path()).unwrap_err();
        assert!(err.to_string().contains("duplicate concept name"), "{err}");
    }

    #[test]
    fn vocab_rejects_non_contiguous_ids() {
        let f = write_temp("0\ta\tsource\n2\tb\tsource\n");
        let err = load_vocab(f.path()).unwrap_err();
        assert!(err.to_string().contains("contiguous"), "{err}");
    }

    #[test]
    fn vocab_allows_same_name_across_domains() {
        let f = write_temp("0\tmachine learning\tsource\n1\tmachine learning\ttarget\n");
        let vocab = load_vocab(f.path()).unwrap();
        assert_eq!(vocab.lookup(DomainTag::Source, "machine learning"), Some(0));
        assert_eq!(vocab.lookup(DomainTag::Target, "machine learning"), Some(1));
        assert_eq!(vocab.lookup_any("machine learning"), Some(1));
    }

    #[test]
    fn loads_relations_and_rejects_self_pair() {
        let vf = write_temp("0\ta\tsource\n1\tb\tsource\n");
        let vocab = load_vocab(vf.path()).unwrap();
        let rf = write_temp("a\tb\t1\n");
        let rels = load_relations(rf.path(), &vocab, DomainTag::Source).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels.relations()[0], Relation { from: 0, to: 1, label: 1 });

        let bad = write_temp("a\ta\t1\n");
        let err = load_relations(bad.path(), &vocab, DomainTag::Source).unwrap_err();
        assert!(err.to_string().contains("self-pair"), "{err}");
    }

    #[test]
    fn relations_reject_duplicates_and_unknown_names() {
        let vf = write_temp("0\ta\tsource\n1\tb\tsource\n");
        let vocab = load_vocab(vf.path()).unwrap();
        let dup = write_temp("a\tb\t1\na\tb\t0\n");
        assert!(load_relations(dup.path(), &vocab, DomainTag::Source)
            .unwrap_err()
            .to_string()
            .contains("duplicate pair"));
        let unk = write_temp("a\tc\t1\n");
        assert!(load_relations(unk.path(), &vocab, DomainTag::Source)
            .unwrap_err()
            .to_string()
            .contains("unknown"));
    }

    #[test]
    fn loads_embeddings_with_uniform_dimension() {
        let vf = write_temp("0\ta\tsource\n1\tb\ttarget\n");
        let vocab = load_vocab(vf.path()).unwrap();
        let ef = write_temp("a\t1.0\t0.0\t0.5\nb\t0.0\t2.0\t-1.0\n");
        let table = load_embeddings(ef.path(), &vocab).unwrap();
        assert_eq!(table.dim(), 3);
        assert_eq!(table.vector(1), &[0.0, 2.0, -1.0]);
    }

    #[test]
    fn embeddings_reject_missing_concept_by_name() {
        let vf = write_temp("0\ta\tsource\n1\tb\ttarget\n");
        let vocab = load_vocab(vf.path()).unwrap();
        let ef = write_temp("a\t1.0\t0.0\n");
        let err = load_embeddings(ef.path(), &vocab).unwrap_err();
        assert!(err.to_string().contains("'b'"), "{err}");
    }

    #[test]
    fn embeddings_reject_ragged_and_zero_norm() {
        let vf = write_temp("0\ta\tsource\n1\tb\ttarget\n");
        let vocab = load_vocab(vf.path()).unwrap();
        let ragged = write_temp("a\t1.0\t0.0\nb\t1.0\n");
        assert!(load_embeddings(ragged.path(), &vocab)
            .unwrap_err()
            .to_string()
            .contains("dimension"));
        let zero = write_temp("a\t0.0\t0.0\nb\t1.0\t1.0\n");
        assert!(load_embeddings(zero.path(), &vocab)
            .unwrap_err()
            .to_string()
            .contains("zero-norm"));
    }

    #[test]
    fn cooccurrence_header_marginals_and_pairs() {
        let f = write_temp("#docs=100\na\ta\t40\nb\tb\t30\na\tb\t10\n");
        let counts = load_cooccurrence(f.path()).unwrap();
        assert_eq!(counts.total_docs(), 100);
        assert_eq!(counts.marginal("A"), Some(40));
        assert_eq!(counts.pair("b", "a"), 10);
        assert_eq!(counts.pair("a", "missing"), 0);
    }

    #[test]
    fn cooccurrence_rejects_pair_above_marginal() {
        let f = write_temp("#docs=100\na\ta\t5\nb\tb\t30\na\tb\t10\n");
        let err = load_cooccurrence(f.path()).unwrap_err();
        assert!(err.to_string().contains("above min marginal"), "{err}");
    }

    #[test]
    fn cooccurrence_requires_docs_header() {
        let f = write_temp("a\ta\t5\n");
        assert!(load_cooccurrence(f.path())
            .unwrap_err()
            .to_string()
            .contains("#docs"));
    }
}
