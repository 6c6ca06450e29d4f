//! A checker for the subset of the DOT language a digraph writer needs:
//!
//! ```text
//! graph     : 'digraph' ID? '{' stmt* '}'
//! stmt      : (attr_stmt | edge_stmt | node_stmt | ID '=' ID | subgraph) ';'?
//! attr_stmt : ('graph' | 'node' | 'edge') attr_list
//! edge_stmt : ID '->' ID ('->' ID)* attr_list?
//! node_stmt : ID attr_list?
//! subgraph  : 'subgraph' ID? '{' stmt* '}'
//! attr_list : '[' (ID '=' ID (',' | ';')?)* ']'
//! ```
//!
//! IDs are bare identifiers, numerals or double-quoted strings in which only
//! `\"` is an escape the lexer must honour.

use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Id(String),
    Arrow,
    Punct(char),
}

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct DotSummary {
    pub nodes: BTreeSet<String>,
    pub node_statements: usize,
    pub edges: Vec<(String, String)>,
    pub clusters: Vec<String>,
}

fn lex(text: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '{' | '}' | '[' | ']' | ';' | ',' | '=' => {
                out.push(Tok::Punct(c));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Tok::Arrow);
                i += 2;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err("unterminated string".into()),
                        Some('"') => break,
                        Some('\\') if chars.get(i + 1) == Some(&'"') => {
                            s.push('"');
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                out.push(Tok::Id(s));
            }
            c if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                    i += 1;
                }
                if i == start {
                    return Err(format!("stray `{c}`"));
                }
                let word: String = chars[start..i].iter().collect();
                let numeral = word.chars().all(|c| c.is_ascii_digit() || c == '.');
                let ident = word.chars().next().is_some_and(|c| !c.is_ascii_digit()) && !word.contains('.');
                if !numeral && !ident {
                    return Err(format!("bad identifier `{word}`"));
                }
                out.push(Tok::Id(word));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    at: usize,
    summary: DotSummary,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).cloned();
        self.at += 1;
        t
    }

    fn punct(&mut self, c: char) -> Result<(), String> {
        match self.next() {
            Some(Tok::Punct(p)) if p == c => Ok(()),
            other => Err(format!("expected `{c}`, found {other:?}")),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Id(s)) => Ok(s),
            other => Err(format!("expected an ID, found {other:?}")),
        }
    }

    fn attr_list(&mut self) -> Result<(), String> {
        self.punct('[')?;
        loop {
            match self.peek() {
                Some(Tok::Punct(']')) => {
                    self.at += 1;
                    return Ok(());
                }
                Some(Tok::Id(_)) => {
                    self.id()?;
                    self.punct('=')?;
                    self.id()?;
                    if matches!(self.peek(), Some(Tok::Punct(',' | ';'))) {
                        self.at += 1;
                    }
                }
                other => return Err(format!("bad attribute list at {other:?}")),
            }
        }
    }

    fn stmts(&mut self) -> Result<(), String> {
        loop {
            match self.peek() {
                Some(Tok::Punct('}')) => {
                    self.at += 1;
                    return Ok(());
                }
                None => return Err("missing `}`".into()),
                _ => self.stmt()?,
            }
            if matches!(self.peek(), Some(Tok::Punct(';'))) {
                self.at += 1;
            }
        }
    }

    fn stmt(&mut self) -> Result<(), String> {
        let first = self.id()?;
        match (first.as_str(), self.peek()) {
            ("subgraph", _) => {
                if let Some(Tok::Id(_)) = self.peek() {
                    let name = self.id()?;
                    self.summary.clusters.push(name);
                }
                self.punct('{')?;
                self.stmts()
            }
            ("graph" | "node" | "edge", Some(Tok::Punct('['))) => self.attr_list(),
            (_, Some(Tok::Punct('='))) => {
                self.at += 1;
                self.id().map(drop)
            }
            (_, Some(Tok::Arrow)) => {
                let mut from = first;
                while matches!(self.peek(), Some(Tok::Arrow)) {
                    self.at += 1;
                    let to = self.id()?;
                    self.summary.edges.push((from, to.clone()));
                    from = to;
                }
                if matches!(self.peek(), Some(Tok::Punct('['))) {
                    self.attr_list()?;
                }
                Ok(())
            }
            _ => {
                self.summary.node_statements += 1;
                self.summary.nodes.insert(first);
                if matches!(self.peek(), Some(Tok::Punct('['))) {
                    self.attr_list()?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `text` as a digraph. Every edge endpoint must be declared as a node.
pub fn check(text: &str) -> Result<DotSummary, String> {
    let mut p = Parser { toks: lex(text)?, at: 0, summary: DotSummary::default() };
    if p.id()? != "digraph" {
        return Err("expected `digraph`".into());
    }
    if let Some(Tok::Id(_)) = p.peek() {
        p.at += 1;
    }
    p.punct('{')?;
    p.stmts()?;
    if p.at != p.toks.len() {
        return Err("trailing input after the graph".into());
    }
    for (s, o) in &p.summary.edges {
        for end in [s, o] {
            if !p.summary.nodes.contains(end) {
                return Err(format!("edge endpoint `{end}` is not declared as a node"));
            }
        }
    }
    Ok(p.summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_clusters_and_escapes() {
        let s = check("digraph g {\n subgraph cluster_a { label=\"x\"; \"a\\\"b\" [shape=box]; }\n c;\n \"a\\\"b\" -> c [label=\"e\"];\n}\n").unwrap();
        assert_eq!(s.node_statements, 2);
        assert_eq!(s.edges, vec![("a\"b".to_string(), "c".to_string())]);
        assert_eq!(s.clusters, vec!["cluster_a".to_string()]);
    }

    #[test]
    fn rejects_broken_input() {
        assert!(check("digraph { a -> }").is_err());
        assert!(check("digraph { \"a }").is_err());
        assert!(check("digraph { a -> b; }").is_err());
        assert!(check("graph { a; }").is_err());
        assert!(check("digraph { a; } }").is_err());
    }
}
