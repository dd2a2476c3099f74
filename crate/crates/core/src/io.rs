//! Model and gamble files (JSON) and vertex tables (CSV).
//!
//! Rationals are written as strings, `"p/q"` or `"p"`; plain JSON integers
//! are accepted as well. Non-integer JSON numbers are rejected because
//! their text is not guaranteed to survive a round trip.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::chains2mono::{LowerProbability, MAX_OUTCOMES as MAX_TABLE_OUTCOMES};
use crate::credal::{Event, Gamble, LowerPrevision, OutcomeSpace};
use crate::exactla::{format_rat, parse_rat, to_decimal, Rat};
use crate::pri::PriModel;

/// Input files larger than this are refused before parsing.
pub const MAX_INPUT_BYTES: usize = 16 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InputError {
    #[error("input exceeds {MAX_INPUT_BYTES} bytes")]
    TooLarge,
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    LowerPrevision(LowerPrevision),
    LowerProbability(LowerProbability),
    Pri(PriModel),
}

impl Model {
    pub fn space(&self) -> &OutcomeSpace {
        match self {
            Model::LowerPrevision(m) => m.space(),
            Model::LowerProbability(m) => m.space(),
            Model::Pri(m) => m.space(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::LowerPrevision(_) => "lower_prevision",
            Model::LowerProbability(_) => "lower_probability",
            Model::Pri(_) => "pri",
        }
    }

    pub fn to_lower_prevision(&self) -> LowerPrevision {
        match self {
            Model::LowerPrevision(m) => m.clone(),
            Model::LowerProbability(m) => m.to_lower_prevision(),
            Model::Pri(m) => m.to_lower_prevision(),
        }
    }
}

fn parse_json(text: &str) -> Result<Value, InputError> {
    if text.len() > MAX_INPUT_BYTES {
        return Err(InputError::TooLarge);
    }
    serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn rational(v: &Value, path: &str) -> Result<Rat, InputError> {
    match v {
        Value::String(s) => parse_rat(s).map_err(|e| field(path, e.to_string())),
        Value::Number(n) if n.is_i64() => {
            Ok(Rat::from_integer(n.as_i64().expect("checked").into()))
        }
        Value::Number(_) => Err(field(
            path,
            "non-integer numbers must be written as strings",
        )),
        _ => Err(field(path, "expected a rational string")),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object()
        .ok_or_else(|| field(path, "expected an object"))
}

fn parse_space(root: &Map<String, Value>) -> Result<OutcomeSpace, InputError> {
    let list = root
        .get("space")
        .ok_or_else(|| field("space", "missing"))?
        .as_array()
        .ok_or_else(|| field("space", "expected an array of labels"))?;
    let mut labels = Vec::with_capacity(list.len());
    for (i, v) in list.iter().enumerate() {
        let s = v
            .as_str()
            .ok_or_else(|| field(format!("space[{i}]"), "expected a string"))?;
        if s.is_empty() || s.contains('|') {
            return Err(field(
                format!("space[{i}]"),
                "labels must be nonempty and free of '|'",
            ));
        }
        labels.push(s.to_string());
    }
    OutcomeSpace::new(labels).map_err(|e| field("space", e.to_string()))
}

fn label_index(space: &OutcomeSpace, label: &str, path: &str) -> Result<usize, InputError> {
    space
        .index(label)
        .ok_or_else(|| field(path, format!("unknown outcome {label:?}")))
}

fn gamble_value(v: &Value, space: &OutcomeSpace, path: &str) -> Result<Gamble, InputError> {
    let n = space.len();
    match v {
        Value::Array(items) => {
            if items.len() != n {
                return Err(field(
                    path,
                    format!("expected {n} values, got {}", items.len()),
                ));
            }
            items
                .iter()
                .enumerate()
                .map(|(i, x)| rational(x, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>, _>>()
                .map(Gamble::new)
        }
        Value::Object(map) => {
            let mut values = vec![Rat::default(); n];
            for (label, x) in map {
                let i = label_index(space, label, &format!("{path}.{label}"))?;
                values[i] = rational(x, &format!("{path}.{label}"))?;
            }
            Ok(Gamble::new(values))
        }
        _ => Err(field(
            path,
            "expected an object of outcome values or an array",
        )),
    }
}

fn event_list(v: &Value, space: &OutcomeSpace, path: &str) -> Result<Event, InputError> {
    let items = v
        .as_array()
        .ok_or_else(|| field(path, "expected an array of labels"))?;
    let mut e = Event::EMPTY;
    for (i, x) in items.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let label = x.as_str().ok_or_else(|| field(&p, "expected a label"))?;
        e = e.with(label_index(space, label, &p)?);
    }
    Ok(e)
}

fn parse_lower_prevision(
    root: &Map<String, Value>,
    space: OutcomeSpace,
) -> Result<LowerPrevision, InputError> {
    let n = space.len();
    let mut lp = LowerPrevision::new(space.clone());
    let Some(list) = root.get("assessments") else {
        return Ok(lp);
    };
    let list = list
        .as_array()
        .ok_or_else(|| field("assessments", "expected an array"))?;
    for (i, a) in list.iter().enumerate() {
        let path = format!("assessments[{i}]");
        let obj = object(a, &path)?;
        let gamble = match (obj.get("gamble"), obj.get("event")) {
            (Some(g), None) => gamble_value(g, &space, &format!("{path}.gamble"))?,
            (None, Some(e)) => {
                Gamble::indicator(n, event_list(e, &space, &format!("{path}.event"))?)
            }
            _ => return Err(field(&path, "needs exactly one of \"gamble\" or \"event\"")),
        };
        let lower = obj
            .get("lower")
            .map(|v| rational(v, &format!("{path}.lower")))
            .transpose()?;
        let upper = obj
            .get("upper")
            .map(|v| rational(v, &format!("{path}.upper")))
            .transpose()?;
        if lower.is_none() && upper.is_none() {
            return Err(field(&path, "needs \"lower\" or \"upper\""));
        }
        if let Some(l) = lower {
            lp.add_lower(gamble.clone(), l).expect("length checked");
        }
        if let Some(u) = upper {
            lp.add_upper(gamble, u).expect("length checked");
        }
    }
    Ok(lp)
}

fn parse_lower_probability(
    root: &Map<String, Value>,
    space: OutcomeSpace,
) -> Result<LowerProbability, InputError> {
    let n = space.len();
    if n > MAX_TABLE_OUTCOMES {
        return Err(field(
            "space",
            format!("lower probability tables allow at most {MAX_TABLE_OUTCOMES} outcomes"),
        ));
    }
    let values = object(
        root.get("values")
            .ok_or_else(|| field("values", "missing"))?,
        "values",
    )?;
    let full = Event::full(n);
    let mut table: Vec<Option<Rat>> = vec![None; 1 << n];
    table[0] = Some(Rat::default());
    table[full.0 as usize] = Some(Rat::from_integer(1.into()));
    for (key, v) in values {
        let path = format!("values.{key}");
        let mut e = Event::EMPTY;
        for label in key.split('|') {
            e = e.with(label_index(&space, label, &path)?);
        }
        if e == full || e.is_empty() {
            return Err(field(&path, "only proper nonempty events are listed"));
        }
        if table[e.0 as usize].is_some() {
            return Err(field(&path, "event listed twice"));
        }
        table[e.0 as usize] = Some(rational(v, &path)?);
    }
    if let Some(missing) = table.iter().position(Option::is_none) {
        return Err(field(
            "values",
            format!("missing event {:?}", Event(missing as u64).label(&space)),
        ));
    }
    LowerProbability::new(
        space,
        table.into_iter().map(|v| v.expect("filled")).collect(),
    )
    .map_err(|e| field("values", e.to_string()))
}

fn parse_pri(root: &Map<String, Value>, space: OutcomeSpace) -> Result<PriModel, InputError> {
    let n = space.len();
    let bounds = |key: &str| -> Result<Vec<Rat>, InputError> {
        let map = object(root.get(key).ok_or_else(|| field(key, "missing"))?, key)?;
        let mut out: Vec<Option<Rat>> = vec![None; n];
        for (label, v) in map {
            let path = format!("{key}.{label}");
            out[label_index(&space, label, &path)?] = Some(rational(v, &path)?);
        }
        out.into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| field(key, format!("missing outcome {:?}", space.label(i))))
            })
            .collect()
    };
    let lower = bounds("lower")?;
    let upper = bounds("upper")?;
    PriModel::new(space, lower, upper).map_err(|e| field("lower", e.to_string()))
}

/// Parses a model file of type `lower_prevision` (the default),
/// `lower_probability` or `pri`.
pub fn parse_model(text: &str) -> Result<Model, InputError> {
    let root = parse_json(text)?;
    let root = object(&root, "$")?;
    let space = parse_space(root)?;
    let kind = match root.get("type") {
        None => "lower_prevision",
        Some(Value::String(s)) => s.as_str(),
        Some(_) => return Err(field("type", "expected a string")),
    };
    match kind {
        "lower_prevision" => parse_lower_prevision(root, space).map(Model::LowerPrevision),
        "lower_probability" => parse_lower_probability(root, space).map(Model::LowerProbability),
        "pri" => parse_pri(root, space).map(Model::Pri),
        other => Err(field("type", format!("unknown model type {other:?}"))),
    }
}

/// Parses a gamble file: a JSON object keyed by outcome label (missing
/// outcomes are zero) or an array in space order.
pub fn parse_gamble(text: &str, space: &OutcomeSpace) -> Result<Gamble, InputError> {
    let v = parse_json(text)?;
    gamble_value(&v, space, "$")
}

/// How rationals are rendered in tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rendering {
    Exact,
    /// Rounded decimals with the given number of digits.
    Decimal(usize),
}

pub fn render(r: &Rat, how: Rendering) -> String {
    match how {
        Rendering::Exact => format_rat(r),
        Rendering::Decimal(d) => to_decimal(r, d),
    }
}

/// Header of outcome labels, then one row per point in lexicographic order.
pub fn vertices_csv(space: &OutcomeSpace, points: &[Vec<Rat>], how: Rendering) -> String {
    let mut out = space.names().join(",");
    out.push('\n');
    let sorted: BTreeSet<&Vec<Rat>> = points.iter().collect();
    for p in sorted {
        let cells: Vec<String> = p.iter().map(|x| render(x, how)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, rat};

    #[test]
    fn lower_prevision_file() {
        let text = r#"{
            "space": ["a", "b", "c"],
            "assessments": [
                {"gamble": {"a": "1", "b": "-1/2"}, "lower": "-1/4"},
                {"event": ["a", "b"], "lower": "1/3", "upper": "2/3"},
                {"gamble": [1, 2, 3], "upper": "5/2"}
            ]
        }"#;
        let Model::LowerPrevision(lp) = parse_model(text).unwrap() else {
            panic!("wrong type");
        };
        assert_eq!(lp.assessments().len(), 4);
        assert_eq!(
            lp.assessments()[0].gamble.0,
            vec![int(1), rat(-1, 2), int(0)]
        );
        assert_eq!(lp.assessments()[2].lower, rat(-2, 3));
    }

    #[test]
    fn lower_probability_file() {
        let text = r#"{"space": ["x", "y"], "type": "lower_probability",
                       "values": {"x": "1/4", "y": "1/2"}}"#;
        let Model::LowerProbability(l) = parse_model(text).unwrap() else {
            panic!("wrong type");
        };
        assert_eq!(*l.value(Event(0b10)), rat(1, 2));
        let missing =
            r#"{"space": ["x", "y"], "type": "lower_probability", "values": {"x": "1/4"}}"#;
        assert_eq!(
            parse_model(missing),
            Err(field("values", "missing event \"y\""))
        );
    }

    #[test]
    fn pri_file() {
        let text = r#"{"space": ["a", "b", "c"], "type": "pri",
                       "lower": {"a": "1/6", "b": "1/6", "c": "1/6"},
                       "upper": {"a": "1/2", "b": "1/2", "c": "1/2"}}"#;
        let Model::Pri(m) = parse_model(text).unwrap() else {
            panic!("wrong type");
        };
        assert_eq!(m.upper()[2], rat(1, 2));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let cases = [
            (r#"{"space": ["a"]}"#, "space"),
            (
                r#"{"space": ["a", "b"], "assessments": [{"event": ["z"], "lower": "0"}]}"#,
                "assessments[0].event[0]",
            ),
            (
                r#"{"space": ["a", "b"], "assessments": [{"event": ["a"], "lower": 0.5}]}"#,
                "assessments[0].lower",
            ),
            (
                r#"{"space": ["a", "b"], "type": "pri", "lower": {"a": "0"}, "upper": {"a": "1", "b": "1"}}"#,
                "lower",
            ),
            (r#"{"space": ["a", "b"], "type": "other"}"#, "type"),
        ];
        for (text, path) in cases {
            match parse_model(text) {
                Err(InputError::Field { path: p, .. }) => assert_eq!(p, path, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_model("{\n  \"space\": [,]}"),
            Err(InputError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn gamble_files() {
        let s = OutcomeSpace::new(["a", "b", "c"]).unwrap();
        assert_eq!(
            parse_gamble(r#"{"b": "2/3"}"#, &s).unwrap().0,
            vec![int(0), rat(2, 3), int(0)]
        );
        assert_eq!(
            parse_gamble("[1, 2, \"3\"]", &s).unwrap(),
            Gamble::from_ints(&[1, 2, 3])
        );
        assert!(parse_gamble("[1, 2]", &s).is_err());
    }

    #[test]
    fn csv_rows_are_sorted() {
        let s = OutcomeSpace::new(["a", "b"]).unwrap();
        let csv = vertices_csv(
            &s,
            &[vec![int(1), int(0)], vec![int(0), int(1)]],
            Rendering::Exact,
        );
        assert_eq!(csv, "a,b\n0,1\n1,0\n");
        let csv = vertices_csv(&s, &[vec![rat(1, 3), rat(2, 3)]], Rendering::Decimal(3));
        assert_eq!(csv, "a,b\n0.333,0.667\n");
    }
}
