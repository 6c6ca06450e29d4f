//! The constrained Turtle profile.
//!
//! Grammar:
//!
//! ```text
//! document  := (directive | block)*
//! directive := '@prefix' PNAME_NS IRIREF '.'
//! block     := subject 'a' typeList (';' pair)* ';'? '.'
//! subject   := PNAME | '_:' label
//! pair      := PNAME object (',' object)*
//! object    := PNAME | STRING ('^^' PNAME)?
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Element blocks use a
//! prefixed-name subject; `_:` subjects hold one relation that carries a time
//! or extra attributes (or whose subject is not an element of the document).

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use super::types::{self, KindBuilder};
use super::{vocab_of, FormatId, ParseError, Vocab};
use crate::model::{
    check_url, is_local_continue, is_reserved_term, is_valid_local, is_valid_prefix, Category, Element,
    ProvenanceDocument, QualifiedName, Relation, RelationKind, Timestamp,
};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

fn error(pos: Pos, expected: impl Into<String>, found: impl Into<String>) -> ParseError {
    ParseError {
        format: FormatId::TurtleProfile,
        line: pos.line,
        column: pos.col,
        expected: expected.into(),
        found: found.into(),
    }
}

fn describe_char(c: Option<char>) -> String {
    match c {
        None => "end of input".into(),
        Some('\n') | Some('\r') => "end of line".into(),
        Some(c) => format!("'{c}'"),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixKeyword,
    Iri(String),
    Name(QualifiedName),
    Namespace(String),
    Blank(String),
    Literal(String),
    Datatype,
    A,
    Dot,
    Semi,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::PrefixKeyword => "'@prefix'".into(),
            Tok::Iri(iri) => format!("<{iri}>"),
            Tok::Name(q) => format!("`{q}`"),
            Tok::Namespace(p) => format!("`{p}:`"),
            Tok::Blank(l) => format!("`_:{l}`"),
            Tok::Literal(s) => format!("string \"{s}\""),
            Tok::Datatype => "'^^'".into(),
            Tok::A => "'a'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: Pos,
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Self { chars: text.chars().collect(), i: 0, line: 1, col: 1 }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    // Only used to give back trailing '.' characters, never newlines.
    fn unbump(&mut self, n: usize) {
        self.i -= n;
        self.col -= n;
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while !matches!(self.peek(), None | Some('\n')) {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek().filter(|c| pred(*c)) {
            out.push(c);
            self.bump();
        }
        out
    }

    fn next_token(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let pos = self.pos();
        let tok = match self.peek() {
            None => Tok::Eof,
            Some('@') => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphabetic());
                if word != "prefix" {
                    return Err(error(pos, "'@prefix'", format!("'@{word}'")));
                }
                Tok::PrefixKeyword
            }
            Some('<') => {
                self.bump();
                let mut iri = String::new();
                loop {
                    let at = self.pos();
                    match self.peek() {
                        Some('>') => {
                            self.bump();
                            break;
                        }
                        Some(c) if !c.is_whitespace() && !matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') => {
                            iri.push(c);
                            self.bump();
                        }
                        other => return Err(error(at, "'>' closing the IRI", describe_char(other))),
                    }
                }
                Tok::Iri(iri)
            }
            Some('"') => Tok::Literal(self.string(pos)?),
            Some('^') => {
                self.bump();
                if self.peek() != Some('^') {
                    return Err(error(pos, "'^^'", format!("'^' followed by {}", describe_char(self.peek()))));
                }
                self.bump();
                Tok::Datatype
            }
            Some('.') => {
                self.bump();
                Tok::Dot
            }
            Some(';') => {
                self.bump();
                Tok::Semi
            }
            Some(',') => {
                self.bump();
                Tok::Comma
            }
            Some('_') if self.peek_at(1) == Some(':') => {
                self.bump();
                self.bump();
                let label = self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-'));
                if label.is_empty() {
                    return Err(error(self.pos(), "a blank node label", describe_char(self.peek())));
                }
                Tok::Blank(label)
            }
            Some(c) if c == ':' || c.is_ascii_alphabetic() => self.prefixed_name(pos)?,
            other => return Err(error(pos, "a prefixed name, string, or punctuation", describe_char(other))),
        };
        Ok(Token { tok, pos })
    }

    fn prefixed_name(&mut self, start: Pos) -> Result<Tok, ParseError> {
        let prefix = self.take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if self.peek() != Some(':') {
            if prefix == "a" {
                return Ok(Tok::A);
            }
            return Err(error(start, "a prefixed name such as `ex:name`", format!("`{prefix}`")));
        }
        if !is_valid_prefix(&prefix) {
            return Err(error(start, "a valid prefix", format!("`{prefix}`")));
        }
        self.bump();
        let local_pos = self.pos();
        let mut local = self.take_while(is_local_continue);
        let trailing = local.len() - local.trim_end_matches('.').len();
        if trailing > 0 {
            local.truncate(local.len() - trailing);
            self.unbump(trailing);
        }
        if local.is_empty() {
            if self.peek().is_some_and(|c| !c.is_whitespace() && !matches!(c, '<' | '#')) {
                return Err(error(local_pos, "a local name", describe_char(self.peek())));
            }
            return Ok(Tok::Namespace(prefix));
        }
        if !is_valid_local(&local) {
            return Err(error(local_pos, "a local name starting with a letter, digit or '_'", format!("`{local}`")));
        }
        Ok(Tok::Name(QualifiedName::new(prefix, local).expect("validated above")))
    }

    fn string(&mut self, open: Pos) -> Result<String, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            let at = self.pos();
            match self.peek() {
                Some('"') => {
                    self.bump();
                    return Ok(out);
                }
                None | Some('\n') | Some('\r') => {
                    return Err(error(open, "a closing '\"' for the string opened here", describe_char(self.peek())));
                }
                Some('\\') => {
                    self.bump();
                    let escaped = match self.bump() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some(u @ ('u' | 'U')) => {
                            let len = if u == 'u' { 4 } else { 8 };
                            let hex: String = (0..len).filter_map(|_| self.bump()).collect();
                            u32::from_str_radix(&hex, 16)
                                .ok()
                                .filter(|_| hex.len() == len)
                                .and_then(char::from_u32)
                                .ok_or_else(|| error(at, "a valid unicode escape", format!("\\{u}{hex}")))?
                        }
                        other => {
                            return Err(error(at, "an escape sequence", format!("'\\{}'", other.map(String::from).unwrap_or_default())));
                        }
                    };
                    out.push(escaped);
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }
}

#[derive(Debug)]
enum Object {
    Ref(QualifiedName),
    Literal { value: String, datatype: Option<(QualifiedName, Pos)> },
}

#[derive(Debug)]
struct Pair {
    verb: QualifiedName,
    verb_pos: Pos,
    objects: Vec<(Object, Pos)>,
}

/// Type terms after `a`, the predicate-object pairs, and the closing `.`.
type BlockBody = (Vec<(QualifiedName, Pos)>, Vec<Pair>, Pos);

struct Parser {
    lexer: Lexer,
    peeked: Option<Token>,
    doc: ProvenanceDocument,
    labels: HashSet<String>,
}

pub(super) fn parse(text: &str) -> Result<ProvenanceDocument, ParseError> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        peeked: None,
        doc: ProvenanceDocument::new(),
        labels: HashSet::new(),
    };
    parser.document()?;
    Ok(parser.doc)
}

impl Parser {
    fn next(&mut self) -> Result<Token, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    fn declared(&self, name: QualifiedName, pos: Pos) -> Result<QualifiedName, ParseError> {
        if self.doc.is_declared(&name) {
            Ok(name)
        } else {
            Err(error(pos, format!("a declared prefix (add `@prefix {}: <...> .`)", name.prefix()), format!("`{name}`")))
        }
    }

    fn document(&mut self) -> Result<(), ParseError> {
        loop {
            let t = self.next()?;
            match t.tok {
                Tok::Eof => return Ok(()),
                Tok::PrefixKeyword => self.prefix_directive()?,
                Tok::Name(subject) => {
                    let subject = self.declared(subject, t.pos)?;
                    self.element_block(subject, t.pos)?;
                }
                Tok::Blank(label) => self.record_block(label, t.pos)?,
                other => return Err(error(t.pos, "'@prefix' or a subject", other.describe())),
            }
        }
    }

    fn prefix_directive(&mut self) -> Result<(), ParseError> {
        let t = self.next()?;
        let Tok::Namespace(prefix) = t.tok else {
            return Err(error(t.pos, "a prefix declaration such as `ex:`", t.tok.describe()));
        };
        let t = self.next()?;
        let Tok::Iri(iri) = t.tok else {
            return Err(error(t.pos, "an IRI in angle brackets", t.tok.describe()));
        };
        self.doc.declare_prefix(&prefix, &iri).map_err(|e| match self.doc.prefix_iri(&prefix) {
            Some(existing) => error(t.pos, format!("<{existing}> for prefix `{prefix}`"), format!("<{iri}>")),
            None => error(t.pos, "a valid namespace IRI", e.to_string()),
        })?;
        let t = self.next()?;
        if t.tok != Tok::Dot {
            return Err(error(t.pos, "'.' after the prefix declaration", t.tok.describe()));
        }
        Ok(())
    }

    /// `'a' typeList (';' pair)* ';'? '.'`, returning the types and pairs.
    fn block_body(&mut self) -> Result<BlockBody, ParseError> {
        let t = self.next()?;
        if t.tok != Tok::A {
            return Err(error(t.pos, "'a' followed by the element types", t.tok.describe()));
        }
        let mut types = Vec::new();
        for (object, pos) in self.object_list()? {
            match object {
                Object::Ref(q) => types.push((q, pos)),
                Object::Literal { value, .. } => {
                    return Err(error(pos, "a type name", format!("string \"{value}\"")));
                }
            }
        }
        let mut pairs = Vec::new();
        loop {
            let t = self.next()?;
            match t.tok {
                Tok::Dot => return Ok((types, pairs, t.pos)),
                Tok::Semi => {
                    let t = self.next()?;
                    match t.tok {
                        Tok::Dot => return Ok((types, pairs, t.pos)),
                        Tok::Semi => {
                            self.peeked = Some(t);
                            continue;
                        }
                        Tok::Name(verb) => {
                            let verb = self.declared(verb, t.pos)?;
                            let objects = self.object_list()?;
                            pairs.push(Pair { verb, verb_pos: t.pos, objects });
                        }
                        other => return Err(error(t.pos, "a predicate or '.'", other.describe())),
                    }
                }
                other => return Err(error(t.pos, "';' or '.'", other.describe())),
            }
        }
    }

    fn object_list(&mut self) -> Result<Vec<(Object, Pos)>, ParseError> {
        let mut out = vec![self.object()?];
        while self.peek()?.tok == Tok::Comma {
            self.next()?;
            out.push(self.object()?);
        }
        Ok(out)
    }

    fn object(&mut self) -> Result<(Object, Pos), ParseError> {
        let t = self.next()?;
        match t.tok {
            Tok::Name(q) => Ok((Object::Ref(self.declared(q, t.pos)?), t.pos)),
            Tok::Literal(value) => {
                let datatype = if self.peek()?.tok == Tok::Datatype {
                    self.next()?;
                    let d = self.next()?;
                    match d.tok {
                        Tok::Name(q) => Some((self.declared(q, d.pos)?, d.pos)),
                        other => return Err(error(d.pos, "a datatype name", other.describe())),
                    }
                } else {
                    None
                };
                Ok((Object::Literal { value, datatype }, t.pos))
            }
            other => Err(error(t.pos, "a prefixed name or a quoted string", other.describe())),
        }
    }

    fn element_block(&mut self, subject: QualifiedName, subject_pos: Pos) -> Result<(), ParseError> {
        let (type_names, pairs, _) = self.block_body()?;
        let mut builder = KindBuilder::default();
        for (name, pos) in &type_names {
            let term = types::lookup(&self.doc, name).ok_or_else(|| {
                error(*pos, "a known element type such as prov:Entity, prov:Agent or prov:Activity", format!("`{name}`"))
            })?;
            builder.add(term).map_err(|expected| error(*pos, expected, format!("`{name}`")))?;
        }
        let kind = builder.build(None).expect("at least one type term");
        let mut element = Element::new(subject.clone(), kind);
        let mut relations = Vec::new();

        for pair in pairs {
            let vocab = vocab_of(&self.doc, &pair.verb);
            let local = pair.verb.local();
            if vocab == Vocab::Dash {
                if let Some(attr) = vocab::canonical_dash_attribute(local) {
                    let values = literals(&pair)?;
                    assign_dash(&mut element, attr, values)?;
                    continue;
                }
            }
            if vocab == Vocab::Prov {
                if let Some(slot) = time_slot(local) {
                    let (ts, pos) = single_timestamp(&self.doc, &pair)?;
                    let allowed = match slot {
                        TimeSlot::Generated => element.category() == Category::Entity,
                        TimeSlot::Started | TimeSlot::Ended => element.category() == Category::Activity,
                    };
                    if !allowed {
                        return Err(error(
                            pair.verb_pos,
                            format!("a property allowed on a {}", element.category()),
                            format!("`{}`", pair.verb),
                        ));
                    }
                    let target = match slot {
                        TimeSlot::Generated => &mut element.generated_at,
                        TimeSlot::Started => &mut element.started_at,
                        TimeSlot::Ended => &mut element.ended_at,
                    };
                    if target.is_some() {
                        return Err(error(pos, format!("a single value for `{}`", pair.verb), "a second value"));
                    }
                    *target = Some(ts);
                    continue;
                }
                if let Some(kind) = RelationKind::from_term(local) {
                    for (object, pos) in &pair.objects {
                        match object {
                            Object::Ref(q) => relations.push(Relation::new(kind, subject.clone(), q.clone())),
                            Object::Literal { value, .. } => {
                                return Err(error(*pos, "an element reference", format!("string \"{value}\"")));
                            }
                        }
                    }
                    continue;
                }
            }
            if is_reserved(vocab, local) {
                return Err(error(pair.verb_pos, "a property allowed on an element", format!("`{}`", pair.verb)));
            }
            for (value, _) in literals(&pair)? {
                element.dash.extensions.push((pair.verb.clone(), value));
            }
        }

        self.doc
            .insert_element_unvalidated(element)
            .map_err(|e| error(subject_pos, "a valid, unique element", e.to_string()))?;
        for r in relations {
            self.doc
                .push_relation_unvalidated(r)
                .map_err(|e| error(subject_pos, "a valid relation", e.to_string()))?;
        }
        Ok(())
    }

    fn record_block(&mut self, label: String, label_pos: Pos) -> Result<(), ParseError> {
        if !self.labels.insert(label.clone()) {
            return Err(error(label_pos, "a fresh relation label", format!("`_:{label}` used twice")));
        }
        let (type_names, pairs, end) = self.block_body()?;
        let kind = match type_names.as_slice() {
            [(name, pos)] => {
                if vocab_of(&self.doc, name) != Vocab::Prov {
                    return Err(error(*pos, "a relation type such as prov:WasGeneratedBy", format!("`{name}`")));
                }
                RelationKind::from_record_type(name.local()).ok_or_else(|| {
                    error(*pos, "a relation type such as prov:WasGeneratedBy", format!("`{name}`"))
                })?
            }
            [_, (name, pos), ..] => return Err(error(*pos, "exactly one relation type", format!("`{name}`"))),
            [] => unreachable!("object lists are non-empty"),
        };
        let (subject_role, object_role) = kind.roles();
        let mut subject = None;
        let mut object = None;
        let mut at_time = None;
        let mut attributes = Vec::new();
        for pair in pairs {
            let vocab = vocab_of(&self.doc, &pair.verb);
            let local = pair.verb.local();
            if vocab == Vocab::Prov && (local == subject_role || local == object_role) {
                let slot = if local == subject_role { &mut subject } else { &mut object };
                match pair.objects.as_slice() {
                    [(Object::Ref(q), pos)] => {
                        if slot.is_some() {
                            return Err(error(*pos, format!("a single `{}`", pair.verb), "a second value"));
                        }
                        *slot = Some(q.clone());
                    }
                    [(Object::Literal { value, .. }, pos)] => {
                        return Err(error(*pos, "an element reference", format!("string \"{value}\"")));
                    }
                    [_, (_, pos), ..] => return Err(error(*pos, format!("a single `{}`", pair.verb), "a second value")),
                    [] => unreachable!(),
                }
                continue;
            }
            if vocab == Vocab::Prov && local == vocab::PROV_TIME {
                if at_time.is_some() {
                    return Err(error(pair.verb_pos, "a single `prov:time`", "a second value"));
                }
                at_time = Some(single_timestamp(&self.doc, &pair)?.0);
                continue;
            }
            if is_reserved(vocab, local) {
                return Err(error(pair.verb_pos, format!("a property allowed on a {} record", kind.record_type()), format!("`{}`", pair.verb)));
            }
            for (value, _) in literals(&pair)? {
                attributes.push((pair.verb.clone(), value));
            }
        }
        let subject = subject.ok_or_else(|| error(end, format!("a `prov:{subject_role}` property"), "end of block"))?;
        let object = object.ok_or_else(|| error(end, format!("a `prov:{object_role}` property"), "end of block"))?;
        let relation = Relation { kind, subject, object, at_time, attributes };
        self.doc
            .push_relation_unvalidated(relation)
            .map_err(|e| error(label_pos, "a valid relation", e.to_string()))
    }
}

fn is_reserved(vocab: Vocab, local: &str) -> bool {
    let canonical = match vocab {
        Vocab::Prov => vocab::PROV_PREFIX,
        Vocab::Dash => vocab::DASH_PREFIX,
        _ => return false,
    };
    QualifiedName::new(canonical, local).is_ok_and(|q| is_reserved_term(&q))
}

#[derive(Clone, Copy)]
enum TimeSlot {
    Generated,
    Started,
    Ended,
}

fn time_slot(local: &str) -> Option<TimeSlot> {
    match local {
        vocab::PROV_GENERATED_AT_TIME => Some(TimeSlot::Generated),
        vocab::PROV_STARTED_AT_TIME => Some(TimeSlot::Started),
        vocab::PROV_ENDED_AT_TIME => Some(TimeSlot::Ended),
        _ => None,
    }
}

fn single_timestamp(doc: &ProvenanceDocument, pair: &Pair) -> Result<(Timestamp, Pos), ParseError> {
    let (value, datatype, pos) = match pair.objects.as_slice() {
        [(Object::Literal { value, datatype }, pos)] => (value, datatype, *pos),
        [(Object::Ref(q), pos)] => return Err(error(*pos, "a date-time string", format!("`{q}`"))),
        [_, (_, pos), ..] => return Err(error(*pos, format!("a single value for `{}`", pair.verb), "a second value")),
        [] => unreachable!(),
    };
    if let Some((dt, dt_pos)) = datatype {
        if vocab_of(doc, dt) != Vocab::Xsd || dt.local() != vocab::XSD_DATE_TIME {
            return Err(error(*dt_pos, "the datatype xsd:dateTime", format!("`{dt}`")));
        }
    }
    let ts = Timestamp::parse(value).map_err(|_| {
        error(pos, "an ISO-8601 date-time with offset or a YYYY-MM-DD date", format!("\"{value}\""))
    })?;
    Ok((ts, pos))
}

fn literals(pair: &Pair) -> Result<Vec<(String, Pos)>, ParseError> {
    pair.objects
        .iter()
        .map(|(object, pos)| match object {
            Object::Literal { value, datatype: None } => Ok((value.clone(), *pos)),
            Object::Literal { datatype: Some((dt, dt_pos)), .. } => {
                Err(error(*dt_pos, format!("a plain string for `{}`", pair.verb), format!("datatype `{dt}`")))
            }
            Object::Ref(q) => Err(error(*pos, format!("a quoted string for `{}`", pair.verb), format!("`{q}`"))),
        })
        .collect()
}

fn assign_dash(element: &mut Element, attr: &str, values: Vec<(String, Pos)>) -> Result<(), ParseError> {
    let dash = &mut element.dash;
    let multi = match attr {
        vocab::DASH_ROLE => Some(&mut dash.roles),
        vocab::DASH_ANNOTATIONS => Some(&mut dash.annotations),
        _ => None,
    };
    if let Some(list) = multi {
        list.extend(values.into_iter().map(|(v, _)| v));
        return Ok(());
    }
    let slot = match attr {
        vocab::DASH_NAME => &mut dash.name,
        vocab::DASH_VERSION => &mut dash.version,
        vocab::DASH_DESCRIPTION => &mut dash.description,
        vocab::DASH_CONTACT_INFORMATION => &mut dash.contact_information,
        vocab::DASH_TRUSTWORTHINESS => &mut dash.trustworthiness,
        vocab::DASH_URL => &mut dash.url,
        _ => unreachable!("all dash attributes are covered"),
    };
    for (value, pos) in values {
        if slot.is_some() {
            return Err(error(pos, format!("a single value for `dash:{attr}`"), format!("another value \"{value}\"")));
        }
        if attr == vocab::DASH_URL {
            check_url(&value).map_err(|_| error(pos, "an absolute URL with scheme and host", format!("\"{value}\"")))?;
        }
        *slot = Some(value);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Writer

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn time_literal(ts: &Timestamp) -> String {
    format!("{}^^xsd:dateTime", quote(&ts.to_string()))
}

fn block(out: &mut String, subject: &str, lines: &[String]) {
    out.push('\n');
    out.push_str(subject);
    out.push('\n');
    for (i, line) in lines.iter().enumerate() {
        out.push_str("    ");
        out.push_str(line);
        out.push_str(if i + 1 == lines.len() { " .\n" } else { " ;\n" });
    }
}

pub(super) fn write(doc: &ProvenanceDocument) -> String {
    let mut out = String::new();
    for (prefix, iri) in doc.prefixes() {
        let _ = writeln!(out, "@prefix {prefix}: <{iri}> .");
    }

    // A (subject, kind) group is written as standalone records when any of
    // its relations is qualified or its subject has no element block.
    let record_groups: BTreeSet<(&QualifiedName, RelationKind)> = doc
        .relations()
        .iter()
        .filter(|r| r.is_qualified() || !doc.contains(&r.subject))
        .map(|r| (&r.subject, r.kind))
        .collect();
    let is_record = |r: &Relation| record_groups.contains(&(&r.subject, r.kind));

    for category in Category::ALL {
        for element in doc.elements_of(category) {
            let mut lines = Vec::new();
            let mut type_terms = vec![types::category_term(category)];
            type_terms.extend(types::refinement_terms(&element.kind));
            lines.push(format!("a {}", type_terms.join(", ")));

            let d = &element.dash;
            let single = [
                (vocab::DASH_NAME, &d.name),
                (vocab::DASH_VERSION, &d.version),
            ];
            for (term, value) in single {
                if let Some(v) = value {
                    lines.push(format!("dash:{term} {}", quote(v)));
                }
            }
            if !d.roles.is_empty() {
                lines.push(format!("dash:role {}", join_quoted(&d.roles)));
            }
            if let Some(v) = &d.description {
                lines.push(format!("dash:description {}", quote(v)));
            }
            if !d.annotations.is_empty() {
                lines.push(format!("dash:annotations {}", join_quoted(&d.annotations)));
            }
            let rest = [
                (vocab::DASH_CONTACT_INFORMATION, &d.contact_information),
                (vocab::DASH_TRUSTWORTHINESS, &d.trustworthiness),
                (vocab::DASH_URL, &d.url),
            ];
            for (term, value) in rest {
                if let Some(v) = value {
                    lines.push(format!("dash:{term} {}", quote(v)));
                }
            }
            let times = [
                (vocab::PROV_GENERATED_AT_TIME, &element.generated_at),
                (vocab::PROV_STARTED_AT_TIME, &element.started_at),
                (vocab::PROV_ENDED_AT_TIME, &element.ended_at),
            ];
            for (term, value) in times {
                if let Some(ts) = value {
                    lines.push(format!("prov:{term} {}", time_literal(ts)));
                }
            }
            for (key, value) in &d.extensions {
                lines.push(format!("{key} {}", quote(value)));
            }

            // Consecutive relations of one kind share a line.
            let mut run: Option<(RelationKind, Vec<String>)> = None;
            for r in doc.relations().iter().filter(|r| r.subject == element.id && !is_record(r)) {
                match &mut run {
                    Some((kind, objects)) if *kind == r.kind => objects.push(r.object.to_string()),
                    _ => {
                        if let Some((kind, objects)) = run.take() {
                            lines.push(format!("prov:{kind} {}", objects.join(", ")));
                        }
                        run = Some((r.kind, vec![r.object.to_string()]));
                    }
                }
            }
            if let Some((kind, objects)) = run {
                lines.push(format!("prov:{kind} {}", objects.join(", ")));
            }
            block(&mut out, &element.id.to_string(), &lines);
        }
    }

    for (index, r) in doc.relations().iter().enumerate() {
        if !is_record(r) {
            continue;
        }
        let (subject_role, object_role) = r.kind.roles();
        let mut lines = vec![
            format!("a prov:{}", r.kind.record_type()),
            format!("prov:{subject_role} {}", r.subject),
            format!("prov:{object_role} {}", r.object),
        ];
        if let Some(ts) = &r.at_time {
            lines.push(format!("prov:{} {}", vocab::PROV_TIME, time_literal(ts)));
        }
        for (key, value) in &r.attributes {
            lines.push(format!("{key} {}", quote(value)));
        }
        block(&mut out, &format!("_:r{}", index + 1), &lines);
    }
    out
}

fn join_quoted(values: &[String]) -> String {
    values.iter().map(|v| quote(v)).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActivityRefinement, AgentRefinement, EntityRefinement};

    fn q(s: &str) -> QualifiedName {
        s.parse().unwrap()
    }

    const HEADER: &str = "@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\
                          @prefix dash: <http://dash.com/dash#> .\n\
                          @prefix prov: <http://www.w3.org/ns/prov#> .\n\
                          @prefix ex: <http://example.org/covid#> .\n";

    fn parse_ok(body: &str) -> ProvenanceDocument {
        parse(&format!("{HEADER}{body}")).unwrap_or_else(|e| panic!("{e}"))
    }

    fn parse_err(body: &str) -> ParseError {
        parse(&format!("{HEADER}{body}")).unwrap_err()
    }

    #[test]
    fn declaration_only_input() {
        let doc = parse("@prefix prov: <http://www.w3.org/ns/prov#> .").unwrap();
        assert_eq!(doc, ProvenanceDocument::new());
    }

    #[test]
    fn element_block_with_mixed_case_dash_terms() {
        let doc = parse_ok(
            "ex:SUS # the health system\n\
             a prov:Agent, prov:Organization;\n\
             dash:Name \"Sistema Único de Saúde\";\n\
             dash:Role \"demanding\";\n\
             dash:trustworthiness \"gov.br\";\n\
             dash:url \"https://www.gov.br/saude/pt-br\"\n\
             ;\n.\n",
        );
        let sus = doc.element(&q("ex:SUS")).unwrap();
        assert_eq!(sus.kind, crate::model::ElementKind::Agent(AgentRefinement::Organization));
        assert_eq!(sus.name(), Some("Sistema Único de Saúde"));
        assert_eq!(sus.dash.roles, ["demanding"]);
        assert_eq!(sus.dash.trustworthiness.as_deref(), Some("gov.br"));
    }

    #[test]
    fn forward_and_dangling_references_are_kept() {
        let doc = parse_ok(
            "ex:chart a prov:Entity ; prov:wasDerivedFrom ex:data, ex:missing .\n\
             ex:data a prov:Entity, dash:DataEntity .\n",
        );
        assert_eq!(doc.relations().len(), 2);
        assert_eq!(doc.relations()[1].object, q("ex:missing"));
    }

    #[test]
    fn record_blocks_carry_time_and_attributes() {
        let doc = parse_ok(
            "ex:d a prov:Entity .\n\
             ex:run a prov:Activity, dash:DataUpdate .\n\
             _:r1 a prov:WasGeneratedBy ;\n\
                 prov:entity ex:d ;\n\
                 prov:activity ex:run ;\n\
                 prov:time \"2023-03-03T10:00:00-03:00\"^^xsd:dateTime ;\n\
                 ex:note \"nightly\" .\n",
        );
        let r = &doc.relations()[0];
        assert_eq!(r.kind, RelationKind::WasGeneratedBy);
        assert_eq!(r.at_time.unwrap().to_string(), "2023-03-03T10:00:00-03:00");
        assert_eq!(r.attributes, vec![(q("ex:note"), "nightly".to_string())]);
    }

    #[test]
    fn timestamps_and_escapes() {
        let doc = parse_ok(
            "ex:a a prov:Activity ;\n\
               prov:startedAtTime \"2020-02-25\"^^xsd:dateTime ;\n\
               prov:endedAtTime \"2023-03-03T00:00:00Z\" ;\n\
               dash:description \"line\\nbreak \\\"quoted\\\" \\u00D3bitos\" .\n",
        );
        let a = doc.element(&q("ex:a")).unwrap();
        assert_eq!(a.started_at.unwrap().to_string(), "2020-02-25T00:00:00Z");
        assert_eq!(a.dash.description.as_deref(), Some("line\nbreak \"quoted\" Óbitos"));
    }

    #[test]
    fn unclosed_quote_points_at_the_quote() {
        let err = parse_err("ex:a a prov:Entity ;\n    dash:name \"COVID-19 NO BRASIL ;\n.\n");
        assert_eq!((err.line, err.column), (6, 15));
        assert!(err.expected.contains("closing"));
        assert_eq!(err.found, "end of line");
    }

    #[test]
    fn lexical_and_grammar_errors_are_positioned() {
        let cases: &[(&str, (usize, usize))] = &[
            ("ex:a a prov:Entity ; dash:Version Beta .", (5, 35)),
            ("ex:a a prov:Entity ; dash:\"1.0.0.0\" .", (5, 27)),
            ("ex:a a prov:Entity ; prov:hadMember: ex:b .", (5, 36)),
            ("ex:a a prov:Entity ; prov:wasAttributedTo ex:CORONAVIRUS COVID-19 .", (5, 58)),
            ("ex:a a prov:Entity", (5, 19)),
            ("ex:a prov:Entity .", (5, 6)),
            ("ex:a a foo:Entity .", (5, 8)),
            ("ex:a a prov:Entity, prov:Agent .", (5, 21)),
            ("ex:a a prov:Entity ; dash:name \"x\", \"y\" .", (5, 37)),
            ("ex:a a prov:Entity ; dash:url \"not a url\" .", (5, 31)),
            ("ex:a a prov:Agent ; prov:generatedAtTime \"2023-03-03\" .", (5, 21)),
            ("ex:a a prov:Entity ; prov:generatedAtTime \"yesterday\" .", (5, 43)),
            ("ex:a a prov:Entity ; dash:name ex:b .", (5, 32)),
            ("ex:a a prov:Entity ; prov:wasDerivedFrom \"b\" .", (5, 42)),
            ("ex:a a prov:Entity ; prov:type \"x\" .", (5, 22)),
            ("ex:a a prov:Entity .\nex:a a prov:Entity .", (6, 1)),
            ("_:r1 a prov:Used ; prov:activity ex:a .", (5, 39)),
            ("@prefix prov: <http://other/> .", (5, 15)),
            ("@base <http://x/> .", (5, 1)),
        ];
        for (body, (line, col)) in cases {
            let err = parse_err(body);
            assert_eq!((err.line, err.column), (*line, *col), "{body}: {err}");
        }
    }

    #[test]
    fn writer_output_shape() {
        let mut doc = ProvenanceDocument::new();
        doc.declare_prefix("ex", "http://example.org/covid#").unwrap();
        let mut d = Element::entity(q("ex:dashboard"), EntityRefinement::Dashboard).with_name("COVID-19 NO BRASIL");
        d.dash.version = Some("Beta".into());
        doc.add_element(d).unwrap();
        doc.add_element(Element::entity(q("ex:Casos"), EntityRefinement::SubtopicCollection)).unwrap();
        doc.add_element(Element::activity(q("ex:make"), ActivityRefinement::CreationMaintenance)).unwrap();
        for (kind, o) in [
            (RelationKind::HadMember, "ex:Casos"),
            (RelationKind::HadMember, "ex:Casos"),
            (RelationKind::WasGeneratedBy, "ex:make"),
        ] {
            doc.add_relation(Relation::new(kind, q("ex:dashboard"), q(o))).unwrap();
        }
        let text = write(&doc);
        let expected = "@prefix dash: <http://dash.com/dash#> .\n\
@prefix ex: <http://example.org/covid#> .\n\
@prefix prov: <http://www.w3.org/ns/prov#> .\n\
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .\n\
\n\
ex:Casos\n    a prov:Entity, prov:Collection, dash:SubtopicCollection .\n\
\n\
ex:dashboard\n    a prov:Entity, prov:Collection, dash:Dashboard ;\n    dash:name \"COVID-19 NO BRASIL\" ;\n    dash:version \"Beta\" ;\n    prov:hadMember ex:Casos, ex:Casos ;\n    prov:wasGeneratedBy ex:make .\n\
\n\
ex:make\n    a prov:Activity, dash:CreationMaintenance .\n";
        assert_eq!(text, expected);
        assert_eq!(parse(&text).unwrap(), doc);
    }
}
