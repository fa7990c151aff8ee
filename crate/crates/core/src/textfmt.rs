//! The `.mech` mechanism description format.
//!
//! One directive per line; `#` starts a comment that runs to the end of the
//! line. A file describes either a topology (links and joints) or, with the
//! `counts` header flag, a bare patch census:
//!
//! ```text
//! mechanism four_bar
//! class planar
//! link l1
//! link l4 ground
//! joint j1 dof=1 kind=revolute connects=l4,l1
//!
//! mechanism staircase counts
//! class planar_bw
//! B 16
//! W 12
//! Nw 7
//! Jf 2
//! ```
//!
//! Link lines accept `ground`, `platform legs=<k>` and
//! `group=<id> equal=<true|false>` in any order. Joint lines need `dof`,
//! `kind` and `connects`, also in any order. [`serialize`] writes the
//! canonical form: header, class, links sorted by id, joints sorted by id,
//! single spaces, a trailing newline and nothing else.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{natural_cmp, Joint, Link, LinkGroup, Mechanism, MechanismClass};

/// Class of a counts record; it also selects the formula branch directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountsClass {
    Open,
    PlanarBw,
    PlanarGrey,
    Spatial,
}

impl CountsClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CountsClass::Open => "open",
            CountsClass::PlanarBw => "planar_bw",
            CountsClass::PlanarGrey => "planar_grey",
            CountsClass::Spatial => "spatial",
        }
    }
}

impl fmt::Display for CountsClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A patch census supplied directly instead of derived from a topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountsRecord {
    pub name: String,
    pub class: CountsClass,
    pub black: u32,
    pub grey: u32,
    pub white: u32,
    pub white_between: u32,
    pub patches_between: Option<u32>,
    pub ground_joints: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Topology(Mechanism),
    Counts(CountsRecord),
}

impl Document {
    pub fn name(&self) -> &str {
        match self {
            Document::Topology(m) => &m.name,
            Document::Counts(c) => &c.name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateId(String),
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("missing `mechanism <id>` header")]
    MissingMechanismHeader,
    #[error("`{0}` is not allowed in {1} mode")]
    MixedModes(String, &'static str),
    #[error("duplicate `{0}` directive")]
    DuplicateDirective(String),
    #[error("missing `{0}` directive")]
    MissingDirective(&'static str),
    #[error("inconsistent counts: {0}")]
    InvalidCounts(String),
}

/// A rejected token; `line` and `col` are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

/// All errors found in a document, in line order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct ParseErrors(pub Vec<ParseError>);

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    col: usize,
    text: &'a str,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in content.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    col: s + 1,
                    text: &content[s..i],
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            col: s + 1,
            text: &content[s..],
        });
    }
    out
}

pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| matches!(b, b'a'..=b'z' | b'0'..=b'9' | b'_'))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Topology,
    Counts,
}

impl Mode {
    fn label(self) -> &'static str {
        match self {
            Mode::Topology => "topology",
            Mode::Counts => "counts",
        }
    }
}

struct Parser {
    errors: Vec<ParseError>,
    line: usize,
}

impl Parser {
    fn err(&mut self, col: usize, kind: ParseErrorKind) {
        self.errors.push(ParseError {
            line: self.line,
            col,
            kind,
        });
    }

    fn syntax(&mut self, col: usize, msg: impl Into<String>) {
        self.err(col, ParseErrorKind::Syntax(msg.into()));
    }

    fn ident(&mut self, tok: Token<'_>, what: &str) -> Option<String> {
        if is_identifier(tok.text) {
            Some(tok.text.to_string())
        } else {
            self.syntax(tok.col, format!("invalid {what} `{}`", tok.text));
            None
        }
    }

    fn number(&mut self, tok: Token<'_>) -> Option<u32> {
        match tok.text.parse::<u32>() {
            Ok(n) if tok.text.bytes().all(|b| b.is_ascii_digit()) => Some(n),
            _ => {
                self.syntax(
                    tok.col,
                    format!("expected a non-negative integer, found `{}`", tok.text),
                );
                None
            }
        }
    }
}

#[derive(Default)]
struct CountsDraft {
    class: Option<CountsClass>,
    values: HashMap<&'static str, (u32, usize)>,
}

/// Parses a `.mech` document, collecting every error instead of stopping at
/// the first one.
pub fn parse(text: &str) -> Result<Document, ParseErrors> {
    let mut p = Parser {
        errors: Vec::new(),
        line: 0,
    };
    let mut header: Option<(String, Mode, usize)> = None;
    let mut topo_class: Option<MechanismClass> = None;
    let mut class_seen = false;
    let mut links: Vec<Link> = Vec::new();
    let mut joints: Vec<Joint> = Vec::new();
    let mut ids: HashSet<String> = HashSet::new();
    let mut counts = CountsDraft::default();

    for (i, raw) in text.lines().enumerate() {
        p.line = i + 1;
        let toks = tokens(raw);
        let Some(&head) = toks.first() else { continue };
        let args = &toks[1..];

        if head.text == "mechanism" {
            if header.is_some() {
                p.err(
                    head.col,
                    ParseErrorKind::DuplicateDirective("mechanism".into()),
                );
                continue;
            }
            let name = match args.first() {
                Some(&t) => p.ident(t, "mechanism id").unwrap_or_default(),
                None => {
                    p.syntax(head.col + head.text.len(), "expected mechanism id");
                    String::new()
                }
            };
            let mode = match args.get(1) {
                None => Mode::Topology,
                Some(t) if t.text == "counts" => Mode::Counts,
                Some(&t) => {
                    p.syntax(t.col, format!("expected `counts`, found `{}`", t.text));
                    Mode::Topology
                }
            };
            if let Some(t) = args.get(2) {
                p.syntax(t.col, format!("unexpected `{}`", t.text));
            }
            header = Some((name, mode, p.line));
            continue;
        }

        let Some((_, mode, _)) = header.as_ref().map(|(n, m, l)| (n.clone(), *m, *l)) else {
            p.err(head.col, ParseErrorKind::MissingMechanismHeader);
            // nothing below can be interpreted without a header
            return Err(ParseErrors(p.errors));
        };

        match head.text {
            "class" => {
                if class_seen {
                    p.err(head.col, ParseErrorKind::DuplicateDirective("class".into()));
                    continue;
                }
                class_seen = true;
                let Some(&t) = args.first() else {
                    p.syntax(head.col + head.text.len(), "expected a class");
                    continue;
                };
                if let Some(extra) = args.get(1) {
                    p.syntax(extra.col, format!("unexpected `{}`", extra.text));
                }
                match mode {
                    Mode::Topology => {
                        topo_class = match t.text {
                            "open" => Some(MechanismClass::Open),
                            "planar" => Some(MechanismClass::Planar),
                            "spatial" => Some(MechanismClass::Spatial),
                            "planar_bw" | "planar_grey" => {
                                p.err(
                                    t.col,
                                    ParseErrorKind::MixedModes(
                                        format!("class {}", t.text),
                                        "topology",
                                    ),
                                );
                                None
                            }
                            other => {
                                p.syntax(t.col, format!("unknown class `{other}`"));
                                None
                            }
                        }
                    }
                    Mode::Counts => {
                        counts.class = match t.text {
                            "open" => Some(CountsClass::Open),
                            "planar_bw" => Some(CountsClass::PlanarBw),
                            "planar_grey" => Some(CountsClass::PlanarGrey),
                            "spatial" => Some(CountsClass::Spatial),
                            "planar" => {
                                p.syntax(t.col, "counts mode needs `planar_bw` or `planar_grey`");
                                None
                            }
                            other => {
                                p.syntax(t.col, format!("unknown class `{other}`"));
                                None
                            }
                        }
                    }
                }
            }
            "link" | "joint" if mode == Mode::Counts => {
                p.err(
                    head.col,
                    ParseErrorKind::MixedModes(head.text.into(), mode.label()),
                );
            }
            "link" => {
                if let Some(link) = parse_link(&mut p, head, args) {
                    if ids.insert(link.id.clone()) {
                        links.push(link);
                    } else {
                        p.err(args[0].col, ParseErrorKind::DuplicateId(link.id));
                    }
                }
            }
            "joint" => {
                if let Some(joint) = parse_joint(&mut p, head, args) {
                    if ids.insert(joint.id.clone()) {
                        joints.push(joint);
                    } else {
                        p.err(args[0].col, ParseErrorKind::DuplicateId(joint.id));
                    }
                }
            }
            "B" | "G" | "W" | "Nw" | "Ns" | "Jf" if mode == Mode::Topology => {
                p.err(
                    head.col,
                    ParseErrorKind::MixedModes(head.text.into(), mode.label()),
                );
            }
            "B" | "G" | "W" | "Nw" | "Ns" | "Jf" => {
                let key: &'static str = match head.text {
                    "B" => "B",
                    "G" => "G",
                    "W" => "W",
                    "Nw" => "Nw",
                    "Ns" => "Ns",
                    _ => "Jf",
                };
                let Some(&t) = args.first() else {
                    p.syntax(
                        head.col + head.text.len(),
                        format!("expected a value for `{key}`"),
                    );
                    continue;
                };
                if let Some(extra) = args.get(1) {
                    p.syntax(extra.col, format!("unexpected `{}`", extra.text));
                }
                if let Some(n) = p.number(t) {
                    if counts.values.insert(key, (n, p.line)).is_some() {
                        p.err(head.col, ParseErrorKind::DuplicateDirective(key.into()));
                    }
                }
            }
            other => p.err(
                head.col,
                ParseErrorKind::UnknownDirective(other.to_string()),
            ),
        }
    }

    let Some((name, mode, header_line)) = header else {
        p.line = 1;
        p.err(1, ParseErrorKind::MissingMechanismHeader);
        return Err(ParseErrors(p.errors));
    };
    p.line = header_line;
    if !class_seen {
        p.err(1, ParseErrorKind::MissingDirective("class"));
    }

    let doc = match mode {
        Mode::Topology => topo_class.map(|class| {
            Document::Topology(Mechanism {
                name,
                class,
                links,
                joints,
            })
        }),
        Mode::Counts => finish_counts(&mut p, name, counts).map(Document::Counts),
    };
    match doc {
        Some(doc) if p.errors.is_empty() => Ok(doc),
        _ => {
            p.errors.sort_by_key(|e| (e.line, e.col));
            Err(ParseErrors(p.errors))
        }
    }
}

fn parse_link(p: &mut Parser, head: Token<'_>, args: &[Token<'_>]) -> Option<Link> {
    let Some(&id_tok) = args.first() else {
        p.syntax(head.col + head.text.len(), "expected link id");
        return None;
    };
    let id = p.ident(id_tok, "link id");
    let mut link = Link::new(id.clone().unwrap_or_default());
    let mut ok = id.is_some();
    let mut group: Option<(String, usize)> = None;
    let mut equal: Option<bool> = None;
    let mut rest = args[1..].iter().copied().peekable();
    while let Some(t) = rest.next() {
        match t.text.split_once('=') {
            None if t.text == "ground" => {
                if link.is_ground {
                    p.syntax(t.col, "repeated `ground`");
                    ok = false;
                }
                link.is_ground = true;
            }
            None if t.text == "platform" => {
                let legs = rest.next_if(|n| n.text.starts_with("legs="));
                match legs {
                    Some(n) => {
                        let value = Token {
                            col: n.col + 5,
                            text: &n.text[5..],
                        };
                        match p.number(value) {
                            Some(k) if k >= 2 => link.platform_legs = Some(k),
                            Some(_) => {
                                p.syntax(value.col, "platform legs must be at least 2");
                                ok = false;
                            }
                            None => ok = false,
                        }
                    }
                    None => {
                        p.syntax(t.col + t.text.len(), "expected `legs=<k>` after `platform`");
                        ok = false;
                    }
                }
            }
            Some(("group", g)) => {
                let value = Token {
                    col: t.col + 6,
                    text: g,
                };
                match p.ident(value, "group id") {
                    Some(g) if group.is_none() => group = Some((g, t.col)),
                    Some(_) => {
                        p.syntax(t.col, "repeated `group`");
                        ok = false;
                    }
                    None => ok = false,
                }
            }
            Some(("equal", v)) => {
                let parsed = match v {
                    "true" => Some(true),
                    "false" => Some(false),
                    _ => None,
                };
                match parsed {
                    Some(b) if equal.is_none() => equal = Some(b),
                    Some(_) => {
                        p.syntax(t.col, "repeated `equal`");
                        ok = false;
                    }
                    None => {
                        p.syntax(
                            t.col + 6,
                            format!("expected `true` or `false`, found `{v}`"),
                        );
                        ok = false;
                    }
                }
            }
            _ => {
                p.syntax(t.col, format!("unexpected `{}` in link directive", t.text));
                ok = false;
            }
        }
    }
    match (group, equal) {
        (Some((id, _)), Some(equal_lengths)) => link.group = Some(LinkGroup { id, equal_lengths }),
        (Some((_, col)), None) => {
            p.syntax(col, "`group=` requires `equal=<true|false>`");
            ok = false;
        }
        (None, Some(_)) => {
            p.syntax(head.col, "`equal=` requires `group=<id>`");
            ok = false;
        }
        (None, None) => {}
    }
    ok.then_some(link)
}

fn parse_joint(p: &mut Parser, head: Token<'_>, args: &[Token<'_>]) -> Option<Joint> {
    let Some(&id_tok) = args.first() else {
        p.syntax(head.col + head.text.len(), "expected joint id");
        return None;
    };
    let id = p.ident(id_tok, "joint id");
    let mut ok = id.is_some();
    let mut dof = None;
    let mut kind = None;
    let mut ends = None;
    for &t in &args[1..] {
        let Some((key, value)) = t.text.split_once('=') else {
            p.syntax(t.col, format!("expected `key=value`, found `{}`", t.text));
            ok = false;
            continue;
        };
        let vcol = t.col + key.len() + 1;
        let repeated = match key {
            "dof" => dof.is_some(),
            "kind" => kind.is_some(),
            "connects" => ends.is_some(),
            _ => false,
        };
        if repeated {
            p.syntax(t.col, format!("repeated `{key}`"));
            ok = false;
            continue;
        }
        match key {
            "dof" => match value {
                "1" | "2" | "3" => dof = Some(value.as_bytes()[0] - b'0'),
                _ => {
                    p.syntax(vcol, format!("dof must be 1, 2 or 3, found `{value}`"));
                    ok = false;
                }
            },
            "kind" => {
                kind = p.ident(
                    Token {
                        col: vcol,
                        text: value,
                    },
                    "joint kind",
                );
                ok &= kind.is_some();
            }
            "connects" => match value.split_once(',') {
                Some((a, b)) => {
                    let a = p.ident(Token { col: vcol, text: a }, "link id");
                    let b = p.ident(
                        Token {
                            col: vcol + value.find(',').unwrap() + 1,
                            text: b,
                        },
                        "link id",
                    );
                    match (a, b) {
                        (Some(a), Some(b)) => ends = Some((a, b)),
                        _ => ok = false,
                    }
                }
                None => {
                    p.syntax(vcol, "expected `connects=<id>,<id>`");
                    ok = false;
                }
            },
            _ => {
                p.syntax(t.col, format!("unknown joint attribute `{key}`"));
                ok = false;
            }
        }
    }
    for (missing, name) in [
        (dof.is_none(), "dof"),
        (kind.is_none(), "kind"),
        (ends.is_none(), "connects"),
    ] {
        if missing && ok {
            p.syntax(head.col, format!("joint is missing `{name}=`"));
            ok = false;
        }
    }
    if !ok {
        return None;
    }
    Some(Joint {
        id: id?,
        dof: dof?,
        kind: kind?,
        endpoints: ends?,
    })
}

fn finish_counts(p: &mut Parser, name: String, draft: CountsDraft) -> Option<CountsRecord> {
    let class = draft.class?;
    let mut get = |key: &'static str, required: bool| match draft.values.get(key) {
        Some(&(v, _)) => Some(v),
        None if required => {
            p.err(1, ParseErrorKind::MissingDirective(key));
            None
        }
        None => None,
    };
    let black = get("B", true);
    let grey = get("G", false).unwrap_or(0);
    let white = get("W", true);
    let white_between = get("Nw", true);
    let patches_between = get("Ns", false);
    let ground_joints = get("Jf", true);
    let black = black?;
    if grey > black {
        let line = draft.values["G"].1;
        p.errors.push(ParseError {
            line,
            col: 1,
            kind: ParseErrorKind::InvalidCounts(format!("G = {grey} exceeds B = {black}")),
        });
        return None;
    }
    Some(CountsRecord {
        name,
        class,
        black,
        grey,
        white: white?,
        white_between: white_between?,
        patches_between,
        ground_joints: ground_joints?,
    })
}

/// Canonical text of a document.
pub fn serialize(doc: &Document) -> String {
    match doc {
        Document::Topology(m) => serialize_mechanism(m),
        Document::Counts(c) => serialize_counts(c),
    }
}

pub fn serialize_mechanism(m: &Mechanism) -> String {
    let mut out = format!("mechanism {}\nclass {}\n", m.name, m.class);
    let mut links: Vec<&Link> = m.links.iter().collect();
    links.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for l in links {
        out.push_str("link ");
        out.push_str(&l.id);
        if l.is_ground {
            out.push_str(" ground");
        }
        if let Some(k) = l.platform_legs {
            out.push_str(&format!(" platform legs={k}"));
        }
        if let Some(g) = &l.group {
            out.push_str(&format!(" group={} equal={}", g.id, g.equal_lengths));
        }
        out.push('\n');
    }
    let mut joints: Vec<&Joint> = m.joints.iter().collect();
    joints.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    for j in joints {
        out.push_str(&format!(
            "joint {} dof={} kind={} connects={},{}\n",
            j.id, j.dof, j.kind, j.endpoints.0, j.endpoints.1
        ));
    }
    out
}

pub fn serialize_counts(c: &CountsRecord) -> String {
    let mut out = format!(
        "mechanism {} counts\nclass {}\nB {}\nG {}\nW {}\nNw {}\n",
        c.name, c.class, c.black, c.grey, c.white, c.white_between
    );
    if let Some(ns) = c.patches_between {
        out.push_str(&format!("Ns {ns}\n"));
    }
    out.push_str(&format!("Jf {}\n", c.ground_joints));
    out
}

/// Links and joints sorted by id, the form [`serialize`] writes.
pub fn sorted(m: &Mechanism) -> Mechanism {
    let mut m = m.clone();
    m.links.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    m.joints.sort_by(|a, b| natural_cmp(&a.id, &b.id));
    m
}

/// Equality up to declaration order.
pub fn same_structure(a: &Document, b: &Document) -> bool {
    match (a, b) {
        (Document::Topology(x), Document::Topology(y)) => sorted(x) == sorted(y),
        (Document::Counts(x), Document::Counts(y)) => x == y,
        _ => false,
    }
}
