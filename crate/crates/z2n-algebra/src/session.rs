//! File formats: session files (signature header plus named series),
//! morphism files (two signature headers plus one series per target
//! coordinate) and atlas files (charts, transitions referencing morphism
//! files, optional witness sections).
//!
//! All formats are line oriented; blank lines and `#` comments are
//! ignored. A signature header is a block of `key = value` lines with
//! keys `n`, `p`, `q`, `T`, one `sigma.k = b1 .. bn` line per formal
//! variable, and an optional `box = lo1 hi1 .. lop hip` line.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, ParseError, Result};
use crate::grading::DegreeVector;
use crate::morphism::{DomainBox, Morphism, SuperdomainSignature};
use crate::parse::{parse_series_with_env, parse_series};
use crate::series::{FormalSignature, Series};
use crate::Rational;

/// The serialized form of a formal signature, with fixed variable naming:
/// base variables `x1..xp`, formal variables `t1..tq`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionHeader {
    pub grading_len: usize,
    pub base_vars: usize,
    pub formal_vars: usize,
    pub order: usize,
    pub degrees: Vec<DegreeVector>,
    pub domain: Option<DomainBox>,
}

impl SessionHeader {
    pub fn signature(&self) -> Result<FormalSignature> {
        FormalSignature::new(
            self.grading_len,
            self.base_vars,
            self.degrees.clone(),
            self.order,
        )
    }

    pub fn superdomain(&self) -> Result<SuperdomainSignature> {
        let formal = self.signature()?;
        match &self.domain {
            None => Ok(SuperdomainSignature::new(formal)),
            Some(b) => SuperdomainSignature::with_domain(formal, b.clone()),
        }
    }
}

/// A parsed session: signature plus named definitions, in file order.
#[derive(Debug, Clone)]
pub struct Session {
    pub header: SessionHeader,
    pub signature: FormalSignature,
    pub definitions: Vec<(String, Series)>,
}

impl Session {
    pub fn lookup(&self, name: &str) -> Option<&Series> {
        self.definitions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
    }

    fn env(&self) -> BTreeMap<String, Series> {
        self.definitions.iter().cloned().collect()
    }

    /// Resolves an operand: a defined name, or an inline expression that
    /// may reference the defined names.
    pub fn operand(&self, text: &str) -> Result<Series> {
        if let Some(s) = self.lookup(text.trim()) {
            return Ok(s.clone());
        }
        Ok(parse_series_with_env(&self.signature, &self.env(), text)?)
    }
}

/// Numbered, trimmed, comment-stripped lines.
fn content_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim().to_string()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

fn parse_rational(line: usize, field: &str) -> Result<Rational> {
    let mk = |m: String| -> Error { ParseError::new(line, 1, m).into() };
    match field.split_once('/') {
        None => field
            .parse::<num::BigInt>()
            .map(Rational::from_integer)
            .map_err(|_| mk(format!("bad rational `{field}`"))),
        Some((n, d)) => {
            let n = n
                .parse::<num::BigInt>()
                .map_err(|_| mk(format!("bad rational `{field}`")))?;
            let d = d
                .parse::<num::BigInt>()
                .map_err(|_| mk(format!("bad rational `{field}`")))?;
            if d == 0.into() {
                return Err(mk(format!("zero denominator in `{field}`")));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Parses one signature-header block of `key = value` lines.
fn parse_header(lines: &[(usize, String)], order_override: Option<usize>) -> Result<SessionHeader> {
    let mut n = None;
    let mut p = None;
    let mut q = None;
    let mut t = None;
    let mut sigma: BTreeMap<usize, (usize, Vec<u8>)> = BTreeMap::new();
    let mut domain_fields: Option<(usize, Vec<Rational>)> = None;
    let first_line = lines.first().map(|(l, _)| *l).unwrap_or(1);

    for (line, text) in lines {
        let (key, value) = text.split_once('=').ok_or_else(|| {
            ParseError::new(*line, 1, format!("expected `key = value`, found `{text}`"))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_usize = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| ParseError::new(*line, 1, format!("bad integer `{v}`")).into())
        };
        match key {
            "n" => n = Some(parse_usize(value)?),
            "p" => p = Some(parse_usize(value)?),
            "q" => q = Some(parse_usize(value)?),
            "T" => t = Some(parse_usize(value)?),
            "box" => {
                let fields = value
                    .split_whitespace()
                    .map(|f| parse_rational(*line, f))
                    .collect::<Result<Vec<_>>>()?;
                domain_fields = Some((*line, fields));
            }
            _ => {
                if let Some(k) = key.strip_prefix("sigma.") {
                    let k: usize = k.parse().map_err(|_| {
                        ParseError::new(*line, 1, format!("bad degree index `{key}`"))
                    })?;
                    let bits = value
                        .split_whitespace()
                        .map(|b| {
                            b.parse::<u8>().ok().filter(|&b| b <= 1).ok_or_else(|| {
                                ParseError::new(*line, 1, format!("bad degree bit `{b}`"))
                            })
                        })
                        .collect::<std::result::Result<Vec<u8>, ParseError>>()?;
                    if sigma.insert(k, (*line, bits)).is_some() {
                        return Err(ParseError::new(*line, 1, format!("duplicate {key}")).into());
                    }
                } else {
                    return Err(
                        ParseError::new(*line, 1, format!("unknown header key `{key}`")).into(),
                    );
                }
            }
        }
    }

    let missing = |what: &str| ParseError::new(first_line, 1, format!("missing header key `{what}`"));
    let n = n.ok_or_else(|| missing("n"))?;
    let p = p.ok_or_else(|| missing("p"))?;
    let q = q.ok_or_else(|| missing("q"))?;
    let t = t.ok_or_else(|| missing("T"))?;
    let mut degrees = Vec::with_capacity(q);
    for a in 1..=q {
        let (line, bits) = sigma
            .remove(&a)
            .ok_or_else(|| missing(&format!("sigma.{a}")))?;
        if bits.len() != n {
            return Err(ParseError::new(
                line,
                1,
                format!("sigma.{a} has {} bits, expected n = {n}", bits.len()),
            )
            .into());
        }
        degrees.push(DegreeVector::new(bits));
    }
    if let Some((line, extra)) = sigma.into_iter().next() {
        let _ = line;
        return Err(ParseError::new(extra.0, 1, "degree index beyond q").into());
    }
    let domain = match domain_fields {
        None => None,
        Some((line, fields)) => {
            if fields.len() != 2 * p {
                return Err(ParseError::new(
                    line,
                    1,
                    format!("box needs {} bounds, found {}", 2 * p, fields.len()),
                )
                .into());
            }
            let bounds = fields.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect();
            Some(DomainBox::new(bounds)?)
        }
    };
    Ok(SessionHeader {
        grading_len: n,
        base_vars: p,
        formal_vars: q,
        order: order_override.unwrap_or(t),
        degrees,
        domain,
    })
}

/// Parses a session file: header block, then `let name = expression`
/// lines. Later definitions may reference earlier ones.
pub fn parse_session(text: &str, order_override: Option<usize>) -> Result<Session> {
    let lines = content_lines(text);
    let split = lines
        .iter()
        .position(|(_, l)| l.starts_with("let "))
        .unwrap_or(lines.len());
    let header = parse_header(&lines[..split], order_override)?;
    let signature = header.signature()?;
    let mut session = Session {
        header,
        signature,
        definitions: Vec::new(),
    };
    for (line, text) in &lines[split..] {
        let rest = text.strip_prefix("let ").ok_or_else(|| {
            ParseError::new(*line, 1, "expected `let name = expression` after the header")
        })?;
        let (name, expr) = rest
            .split_once('=')
            .ok_or_else(|| ParseError::new(*line, 1, "expected `=` in definition"))?;
        let name = name.trim().to_string();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ParseError::new(*line, 1, format!("bad name `{name}`")).into());
        }
        if session.lookup(&name).is_some() {
            return Err(ParseError::new(*line, 1, format!("duplicate name `{name}`")).into());
        }
        let series = parse_series_with_env(&session.signature, &session.env(), expr)
            .map_err(|e| ParseError::new(*line, e.col, e.message))?;
        session.definitions.push((name, series));
    }
    Ok(session)
}

/// One `[name args..]` block: header line, header words, body lines.
type Section = (usize, Vec<String>, Vec<(usize, String)>);

/// Splits a file into `[section args..]` blocks.
fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (line, text) in content_lines(text) {
        if let Some(inner) = text.strip_prefix('[') {
            let inner = inner
                .strip_suffix(']')
                .ok_or_else(|| ParseError::new(line, 1, "unterminated section header"))?;
            let words: Vec<String> = inner.split_whitespace().map(str::to_string).collect();
            if words.is_empty() {
                return Err(ParseError::new(line, 1, "empty section header").into());
            }
            out.push((line, words, Vec::new()));
        } else {
            match out.last_mut() {
                Some((_, _, body)) => body.push((line, text)),
                None => {
                    return Err(ParseError::new(
                        line,
                        1,
                        "expected a `[section]` header before content",
                    )
                    .into())
                }
            }
        }
    }
    Ok(out)
}

fn key_value_lines(body: &[(usize, String)]) -> Result<Vec<(usize, String, String)>> {
    body.iter()
        .map(|(line, text)| {
            text.split_once('=')
                .map(|(k, v)| (*line, k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| {
                    ParseError::new(*line, 1, format!("expected `key = value`, found `{text}`"))
                        .into()
                })
        })
        .collect()
}

/// Parses a morphism file: `[source]` and `[target]` signature headers and
/// a `[pullbacks]` section with one series per target coordinate, written
/// in the source variables.
pub fn parse_morphism(text: &str, order_override: Option<usize>) -> Result<Morphism> {
    let secs = sections(text)?;
    let mut source = None;
    let mut target = None;
    let mut pullbacks = None;
    for (line, words, body) in secs {
        match words[0].as_str() {
            "source" => source = Some(parse_header(&body, order_override)?),
            "target" => target = Some(parse_header(&body, order_override)?),
            "pullbacks" => pullbacks = Some((line, body)),
            other => {
                return Err(ParseError::new(
                    line,
                    1,
                    format!("unknown section `{other}` in morphism file"),
                )
                .into())
            }
        }
    }
    let missing = |what: &str| ParseError::new(1, 1, format!("missing `[{what}]` section"));
    let source = source.ok_or_else(|| missing("source"))?;
    let target = target.ok_or_else(|| missing("target"))?;
    let (_, body) = pullbacks.ok_or_else(|| missing("pullbacks"))?;

    let src_formal = source.signature()?;
    let mut base: BTreeMap<usize, Series> = BTreeMap::new();
    let mut formal: BTreeMap<usize, Series> = BTreeMap::new();
    for (line, key, value) in key_value_lines(&body)? {
        let series = parse_series(&src_formal, &value)
            .map_err(|e| ParseError::new(line, e.col, e.message))?;
        let store = |map: &mut BTreeMap<usize, Series>, idx: usize, max: usize| -> Result<()> {
            if idx == 0 || idx > max {
                return Err(
                    ParseError::new(line, 1, format!("coordinate `{key}` out of range")).into(),
                );
            }
            if map.insert(idx, series.clone()).is_some() {
                return Err(
                    ParseError::new(line, 1, format!("duplicate coordinate `{key}`")).into(),
                );
            }
            Ok(())
        };
        if let Some(i) = key.strip_prefix('x').and_then(|r| r.parse::<usize>().ok()) {
            store(&mut base, i, target.base_vars)?;
        } else if let Some(a) = key.strip_prefix('t').and_then(|r| r.parse::<usize>().ok()) {
            store(&mut formal, a, target.formal_vars)?;
        } else {
            return Err(ParseError::new(
                line,
                1,
                format!("pullback key must name a target coordinate, found `{key}`"),
            )
            .into());
        }
    }
    let collect = |map: BTreeMap<usize, Series>, count: usize, prefix: &str| -> Result<Vec<Series>> {
        (1..=count)
            .map(|i| {
                map.get(&i).cloned().ok_or_else(|| {
                    ParseError::new(1, 1, format!("missing pullback for {prefix}{i}")).into()
                })
            })
            .collect()
    };
    let base = collect(base, target.base_vars, "x")?;
    let formal = collect(formal, target.formal_vars, "t")?;
    Morphism::from_coordinate_pullbacks(source.superdomain()?, target.superdomain()?, base, formal)
}

/// Parses an atlas file and loads the referenced morphism files relative
/// to `base_dir`. Returns the atlas and any witness sections.
pub fn parse_atlas(
    text: &str,
    base_dir: &Path,
    order_override: Option<usize>,
) -> Result<(crate::atlas::Atlas, Vec<crate::atlas::SectionWitness>)> {
    use crate::atlas::{Atlas, Chart, SectionWitness, Transition};
    let mut charts: Vec<Chart> = Vec::new();
    let mut transitions = Vec::new();
    let mut witnesses = Vec::new();

    for (line, words, body) in sections(text)? {
        match words[0].as_str() {
            "chart" => {
                let id = words
                    .get(1)
                    .ok_or_else(|| ParseError::new(line, 1, "chart needs an id"))?
                    .clone();
                let header = parse_header(&body, order_override)?;
                charts.push(Chart {
                    id,
                    signature: header.superdomain()?,
                });
            }
            "transition" => {
                let (from, to) = match (words.get(1), words.get(2)) {
                    (Some(a), Some(b)) => (a.clone(), b.clone()),
                    _ => {
                        return Err(
                            ParseError::new(line, 1, "transition needs two chart ids").into()
                        )
                    }
                };
                let mut forward = None;
                let mut backward = None;
                for (l, key, value) in key_value_lines(&body)? {
                    let path = base_dir.join(&value);
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    let m = parse_morphism(&text, order_override)?;
                    match key.as_str() {
                        "forward" => forward = Some(m),
                        "backward" => backward = Some(m),
                        other => {
                            return Err(ParseError::new(
                                l,
                                1,
                                format!("unknown transition key `{other}`"),
                            )
                            .into())
                        }
                    }
                }
                let forward = forward
                    .ok_or_else(|| ParseError::new(line, 1, "transition needs `forward = path`"))?;
                let backward = backward
                    .ok_or_else(|| ParseError::new(line, 1, "transition needs `backward = path`"))?;
                transitions.push(Transition {
                    from,
                    to,
                    forward,
                    backward,
                });
            }
            "witness" => {
                let name = words
                    .get(1)
                    .ok_or_else(|| ParseError::new(line, 1, "witness needs a name"))?
                    .clone();
                let mut locals = BTreeMap::new();
                for (l, key, value) in key_value_lines(&body)? {
                    let chart = charts
                        .iter()
                        .find(|c| c.id == key)
                        .ok_or_else(|| Error::MissingChart { id: key.clone() })?;
                    let series = parse_series(chart.signature.formal(), &value)
                        .map_err(|e| ParseError::new(l, e.col, e.message))?;
                    locals.insert(key, series);
                }
                witnesses.push(SectionWitness { name, locals });
            }
            other => {
                return Err(ParseError::new(
                    line,
                    1,
                    format!("unknown section `{other}` in atlas file"),
                )
                .into())
            }
        }
    }
    Ok((Atlas::new(charts, transitions)?, witnesses))
}
