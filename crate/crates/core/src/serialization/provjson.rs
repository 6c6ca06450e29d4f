//! PROV-JSON profile.
//!
//! Top-level buckets are `prefix`, `entity`, `activity`, `agent` and one per
//! relation kind (`wasGeneratedBy`, `hadMember`, ...). Relation records are
//! keyed `_:r1`, `_:r2`, ... in document order.

use std::cell::Cell;

use serde_json::{Map, Value};

use super::types::{self, KindBuilder, TypeTerm};
use super::{position_after, vocab_of, FormatId, ParseError, Vocab};
use crate::model::{
    check_url, is_reserved_term, Category, Element, ProvenanceDocument, QualifiedName, Relation, RelationKind,
    Timestamp,
};
use crate::vocab;

fn error(pos: (usize, usize), expected: impl Into<String>, found: impl Into<String>) -> ParseError {
    ParseError {
        format: FormatId::ProvJson,
        line: pos.0,
        column: pos.1,
        expected: expected.into(),
        found: found.into(),
    }
}

fn bucket_category(key: &str) -> Option<Category> {
    match key {
        "entity" => Some(Category::Entity),
        "activity" => Some(Category::Activity),
        "agent" => Some(Category::Agent),
        _ => None,
    }
}

fn bucket_key(category: Category) -> &'static str {
    match category {
        Category::Entity => "entity",
        Category::Activity => "activity",
        Category::Agent => "agent",
    }
}

fn describe(value: &Value) -> String {
    match value {
        Value::Null => "null".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => format!("number {n}"),
        Value::String(s) => format!("string \"{s}\""),
        Value::Array(_) => "an array".into(),
        Value::Object(_) => "an object".into(),
    }
}

/// Finds keys in the source text in visiting order, so semantic errors can be
/// reported at a position.
struct Locator<'a> {
    text: &'a str,
    offset: usize,
    key_len: usize,
    /// Last resolved (offset, line, column); lookups mostly move forward.
    cursor: Cell<(usize, usize, usize)>,
}

impl<'a> Locator<'a> {
    fn new(text: &'a str) -> Self {
        Self { text, offset: 0, key_len: 0, cursor: Cell::new((0, 1, 1)) }
    }

    fn at(&self, offset: usize) -> (usize, usize) {
        let (from, line, column) = self.cursor.get();
        let pos = if offset >= from {
            match position_after(&self.text[from..offset]) {
                (1, c) => (line, column + c - 1),
                (l, c) => (line + l - 1, c),
            }
        } else {
            position_after(&self.text[..offset])
        };
        self.cursor.set((offset, pos.0, pos.1));
        pos
    }

    fn key(&mut self, key: &str) -> (usize, usize) {
        let needle = serde_json::to_string(key).expect("strings serialize");
        if let Some(i) = self.text[self.offset..].find(&needle) {
            self.offset += i;
            self.key_len = needle.len();
        } else {
            self.key_len = 0;
        }
        self.at(self.offset)
    }

    /// Position of the value belonging to the last located key.
    fn value(&self) -> (usize, usize) {
        let rest = &self.text[self.offset + self.key_len..];
        let skip = rest
            .find(':')
            .map(|colon| colon + 1 + rest[colon + 1..].len() - rest[colon + 1..].trim_start().len())
            .unwrap_or(0);
        self.at(self.offset + self.key_len + skip)
    }
}

fn syntax_error(text: &str, err: &serde_json::Error) -> ParseError {
    let line = err.line().max(1);
    let line_text = text.split('\n').nth(line - 1).unwrap_or("");
    let mut byte_col = err.column().min(line_text.len());
    while !line_text.is_char_boundary(byte_col) {
        byte_col -= 1;
    }
    let column = line_text[..byte_col].chars().count().max(1);
    let message = err.to_string();
    let found = message.split(" at line").next().unwrap_or(&message).to_string();
    let found = if err.is_eof() { "end of input".to_string() } else { found };
    error((line, column), "well-formed JSON", found)
}

pub(super) fn parse(text: &str) -> Result<ProvenanceDocument, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| syntax_error(text, &e))?;
    let Value::Object(top) = value else {
        return Err(error((1, 1), "a JSON object", describe(&value)));
    };
    let mut doc = ProvenanceDocument::new();

    // Prefixes are needed before any name resolves, wherever the bucket sits.
    if let Some(prefixes) = top.get("prefix") {
        let mut loc = Locator::new(text);
        loc.key("prefix");
        let Value::Object(prefixes) = prefixes else {
            return Err(error(loc.value(), "an object of prefix bindings", describe(prefixes)));
        };
        for (prefix, iri) in prefixes {
            let pos = loc.key(prefix);
            let Value::String(iri) = iri else {
                return Err(error(loc.value(), "a namespace IRI string", describe(iri)));
            };
            doc.declare_prefix(prefix, iri).map_err(|e| error(pos, "a valid, consistent prefix binding", e.to_string()))?;
        }
    }

    let mut loc = Locator::new(text);
    let mut relations: Vec<(u64, usize, Relation)> = Vec::new();
    for (bucket, content) in &top {
        let pos = loc.key(bucket);
        if bucket == "prefix" {
            continue;
        }
        let Value::Object(content) = content else {
            return Err(error(loc.value(), format!("an object for `{bucket}`"), describe(content)));
        };
        if let Some(category) = bucket_category(bucket) {
            for (id, attrs) in content {
                let (element, id_pos) = parse_element(&doc, &mut loc, category, id, attrs)?;
                doc.insert_element_unvalidated(element)
                    .map_err(|e| error(id_pos, "a valid, unique element", e.to_string()))?;
            }
        } else if let Some(kind) = RelationKind::from_term(bucket) {
            for (rid, record) in content {
                let order = relations.len();
                let relation = parse_record(&doc, &mut loc, kind, rid, record)?;
                let rank = rid.strip_prefix("_:r").and_then(|n| n.parse::<u64>().ok()).unwrap_or(u64::MAX);
                relations.push((rank, order, relation));
            }
        } else {
            return Err(error(pos, "one of `prefix`, `entity`, `activity`, `agent` or a relation bucket", format!("`{bucket}`")));
        }
    }
    relations.sort_by_key(|(rank, order, _)| (*rank, *order));
    for (_, _, relation) in relations {
        doc.push_relation_unvalidated(relation)
            .map_err(|e| error((1, 1), "a valid relation", e.to_string()))?;
    }
    Ok(doc)
}

fn name(doc: &ProvenanceDocument, s: &str, pos: (usize, usize)) -> Result<QualifiedName, ParseError> {
    let q: QualifiedName = s
        .parse()
        .map_err(|_| error(pos, "a prefixed name such as `ex:name`", format!("\"{s}\"")))?;
    if !doc.is_declared(&q) {
        return Err(error(pos, format!("a declared prefix for `{}`", q.prefix()), format!("\"{s}\"")));
    }
    Ok(q)
}

/// A string, a `{"$": ..}` typed literal, or an array of either.
fn strings(value: &Value, pos: (usize, usize), what: &str) -> Result<Vec<String>, ParseError> {
    let one = |v: &Value| match v {
        Value::String(s) => Ok(s.clone()),
        Value::Object(m) => match m.get("$") {
            Some(Value::String(s)) => Ok(s.clone()),
            _ => Err(error(pos, what.to_string(), describe(v))),
        },
        other => Err(error(pos, what.to_string(), describe(other))),
    };
    match value {
        Value::Array(items) if !items.is_empty() => items.iter().map(one).collect(),
        Value::Array(_) => Err(error(pos, what.to_string(), "an empty array")),
        other => Ok(vec![one(other)?]),
    }
}

fn single(mut values: Vec<String>, pos: (usize, usize), key: &str) -> Result<String, ParseError> {
    if values.len() != 1 {
        return Err(error(pos, format!("a single value for `{key}`"), format!("{} values", values.len())));
    }
    Ok(values.pop().expect("one value"))
}

fn timestamp(value: String, pos: (usize, usize)) -> Result<Timestamp, ParseError> {
    Timestamp::parse(&value)
        .map_err(|_| error(pos, "an ISO-8601 date-time with offset or a YYYY-MM-DD date", format!("\"{value}\"")))
}

fn is_reserved(vocab: Vocab, local: &str) -> bool {
    let canonical = match vocab {
        Vocab::Prov => vocab::PROV_PREFIX,
        Vocab::Dash => vocab::DASH_PREFIX,
        _ => return false,
    };
    QualifiedName::new(canonical, local).is_ok_and(|q| is_reserved_term(&q))
}

fn parse_element(
    doc: &ProvenanceDocument,
    loc: &mut Locator<'_>,
    category: Category,
    id: &str,
    attrs: &Value,
) -> Result<(Element, (usize, usize)), ParseError> {
    let id_pos = loc.key(id);
    let id = name(doc, id, id_pos)?;
    let Value::Object(attrs) = attrs else {
        return Err(error(loc.value(), "an object of attributes", describe(attrs)));
    };

    let mut builder = KindBuilder::default();
    builder.add(TypeTerm::Category(category)).expect("first term");
    if let Some(types_value) = attrs.get("prov:type") {
        loc.key("prov:type");
        let pos = loc.value();
        for term in strings(types_value, pos, "type names")? {
            let q = name(doc, &term, pos)?;
            let t = types::lookup(doc, &q)
                .ok_or_else(|| error(pos, "a known element type", format!("\"{term}\"")))?;
            builder.add(t).map_err(|expected| error(pos, expected, format!("\"{term}\"")))?;
        }
    }
    let kind = builder.build(None).expect("category is set");
    let mut element = Element::new(id, kind);

    for (key, value) in attrs {
        if key == "prov:type" {
            continue;
        }
        let key_pos = loc.key(key);
        let pos = loc.value();
        let q = name(doc, key, key_pos)?;
        let vocab = vocab_of(doc, &q);
        if vocab == Vocab::Dash {
            if let Some(attr) = vocab::canonical_dash_attribute(q.local()) {
                let values = strings(value, pos, "a string")?;
                let d = &mut element.dash;
                let slot = match attr {
                    vocab::DASH_ROLE => {
                        d.roles.extend(values);
                        continue;
                    }
                    vocab::DASH_ANNOTATIONS => {
                        d.annotations.extend(values);
                        continue;
                    }
                    vocab::DASH_NAME => &mut d.name,
                    vocab::DASH_VERSION => &mut d.version,
                    vocab::DASH_DESCRIPTION => &mut d.description,
                    vocab::DASH_CONTACT_INFORMATION => &mut d.contact_information,
                    vocab::DASH_TRUSTWORTHINESS => &mut d.trustworthiness,
                    vocab::DASH_URL => &mut d.url,
                    _ => unreachable!("all dash attributes are covered"),
                };
                if slot.is_some() {
                    return Err(error(key_pos, format!("a single `dash:{attr}` attribute"), "a repeated key"));
                }
                let v = single(values, pos, key)?;
                if attr == vocab::DASH_URL {
                    check_url(&v).map_err(|_| error(pos, "an absolute URL with scheme and host", format!("\"{v}\"")))?;
                }
                *slot = Some(v);
                continue;
            }
        }
        if vocab == Vocab::Prov {
            let slot = match q.local() {
                vocab::PROV_GENERATED_AT_TIME if category == Category::Entity => Some(&mut element.generated_at),
                vocab::PROV_STARTED_AT_TIME if category == Category::Activity => Some(&mut element.started_at),
                vocab::PROV_ENDED_AT_TIME if category == Category::Activity => Some(&mut element.ended_at),
                _ => None,
            };
            if let Some(slot) = slot {
                let v = single(strings(value, pos, "a date-time string")?, pos, key)?;
                *slot = Some(timestamp(v, pos)?);
                continue;
            }
        }
        if is_reserved(vocab, q.local()) {
            return Err(error(key_pos, format!("an attribute allowed on a {category}"), format!("\"{key}\"")));
        }
        for v in strings(value, pos, "a string")? {
            element.dash.extensions.push((q.clone(), v));
        }
    }
    Ok((element, id_pos))
}

fn parse_record(
    doc: &ProvenanceDocument,
    loc: &mut Locator<'_>,
    kind: RelationKind,
    rid: &str,
    record: &Value,
) -> Result<Relation, ParseError> {
    let rid_pos = loc.key(rid);
    if !rid.starts_with("_:") {
        return Err(error(rid_pos, "a relation identifier such as `_:r1`", format!("\"{rid}\"")));
    }
    let Value::Object(record) = record else {
        return Err(error(loc.value(), "an object describing the relation", describe(record)));
    };
    let (subject_role, object_role) = kind.roles();
    let mut subject = None;
    let mut object = None;
    let mut at_time = None;
    let mut attributes = Vec::new();
    for (key, value) in record {
        let key_pos = loc.key(key);
        let pos = loc.value();
        let q = name(doc, key, key_pos)?;
        let vocab = vocab_of(doc, &q);
        if vocab == Vocab::Prov && (q.local() == subject_role || q.local() == object_role) {
            let s = single(strings(value, pos, "an element identifier")?, pos, key)?;
            let endpoint = name(doc, &s, pos)?;
            if q.local() == subject_role {
                subject = Some(endpoint);
            } else {
                object = Some(endpoint);
            }
            continue;
        }
        if vocab == Vocab::Prov && q.local() == vocab::PROV_TIME {
            let v = single(strings(value, pos, "a date-time string")?, pos, key)?;
            at_time = Some(timestamp(v, pos)?);
            continue;
        }
        if is_reserved(vocab, q.local()) {
            return Err(error(key_pos, format!("a key allowed in a {} record", kind.term()), format!("\"{key}\"")));
        }
        for v in strings(value, pos, "a string")? {
            attributes.push((q.clone(), v));
        }
    }
    let subject = subject.ok_or_else(|| error(rid_pos, format!("a `prov:{subject_role}` key"), "a record without it"))?;
    let object = object.ok_or_else(|| error(rid_pos, format!("a `prov:{object_role}` key"), "a record without it"))?;
    Ok(Relation { kind, subject, object, at_time, attributes })
}

fn one_or_many(values: Vec<String>) -> Value {
    if values.len() == 1 {
        Value::String(values.into_iter().next().expect("one value"))
    } else {
        Value::Array(values.into_iter().map(Value::String).collect())
    }
}

fn group_by_key(pairs: &[(QualifiedName, String)], out: &mut Map<String, Value>) {
    let mut grouped: Vec<(String, Vec<String>)> = Vec::new();
    for (key, value) in pairs {
        let key = key.to_string();
        match grouped.iter_mut().find(|(k, _)| *k == key) {
            Some((_, values)) => values.push(value.clone()),
            None => grouped.push((key, vec![value.clone()])),
        }
    }
    for (key, values) in grouped {
        out.insert(key, one_or_many(values));
    }
}

fn element_json(element: &Element) -> Value {
    let mut out = Map::new();
    let terms = types::refinement_terms(&element.kind);
    if !terms.is_empty() {
        out.insert("prov:type".into(), one_or_many(terms.into_iter().map(String::from).collect()));
    }
    let d = &element.dash;
    let scalar = |out: &mut Map<String, Value>, term: &str, v: &Option<String>| {
        if let Some(v) = v {
            out.insert(format!("dash:{term}"), Value::String(v.clone()));
        }
    };
    let list = |out: &mut Map<String, Value>, term: &str, v: &[String]| {
        if !v.is_empty() {
            out.insert(format!("dash:{term}"), one_or_many(v.to_vec()));
        }
    };
    scalar(&mut out, vocab::DASH_NAME, &d.name);
    scalar(&mut out, vocab::DASH_VERSION, &d.version);
    list(&mut out, vocab::DASH_ROLE, &d.roles);
    scalar(&mut out, vocab::DASH_DESCRIPTION, &d.description);
    list(&mut out, vocab::DASH_ANNOTATIONS, &d.annotations);
    scalar(&mut out, vocab::DASH_CONTACT_INFORMATION, &d.contact_information);
    scalar(&mut out, vocab::DASH_TRUSTWORTHINESS, &d.trustworthiness);
    scalar(&mut out, vocab::DASH_URL, &d.url);
    for (term, ts) in [
        (vocab::PROV_GENERATED_AT_TIME, &element.generated_at),
        (vocab::PROV_STARTED_AT_TIME, &element.started_at),
        (vocab::PROV_ENDED_AT_TIME, &element.ended_at),
    ] {
        if let Some(ts) = ts {
            out.insert(format!("prov:{term}"), Value::String(ts.to_string()));
        }
    }
    group_by_key(&d.extensions, &mut out);
    Value::Object(out)
}

pub(super) fn write(doc: &ProvenanceDocument) -> String {
    let mut top = Map::new();
    top.insert(
        "prefix".into(),
        Value::Object(doc.prefixes().map(|(p, iri)| (p.to_string(), Value::String(iri.to_string()))).collect()),
    );
    for category in Category::ALL {
        let bucket: Map<String, Value> = doc.elements_of(category).map(|e| (e.id.to_string(), element_json(e))).collect();
        if !bucket.is_empty() {
            top.insert(bucket_key(category).into(), Value::Object(bucket));
        }
    }
    for kind in RelationKind::ALL {
        let mut bucket = Map::new();
        for (index, r) in doc.relations().iter().enumerate().filter(|(_, r)| r.kind == kind) {
            let (subject_role, object_role) = kind.roles();
            let mut record = Map::new();
            record.insert(format!("prov:{subject_role}"), Value::String(r.subject.to_string()));
            record.insert(format!("prov:{object_role}"), Value::String(r.object.to_string()));
            if let Some(ts) = &r.at_time {
                record.insert(format!("prov:{}", vocab::PROV_TIME), Value::String(ts.to_string()));
            }
            group_by_key(&r.attributes, &mut record);
            bucket.insert(format!("_:r{}", index + 1), Value::Object(record));
        }
        if !bucket.is_empty() {
            top.insert(kind.term().into(), Value::Object(bucket));
        }
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
    text.push('\n');
    text
}
