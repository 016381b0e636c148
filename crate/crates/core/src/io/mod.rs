//! JSON documents, diagram rendering and the command-line front end.
//!
//! Rationals cross the JSON boundary as strings (`"145/3"`). Input also
//! accepts decimal numerals, quoted or bare, which are converted exactly.

mod cli;
mod render;

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::axioms::{AxiomReport, Verdict, WitnessDetail};
use crate::error::{Error, Result};
use crate::exemplars::{ExemplarProfile, GapSequence, InducedVocabulary};
use crate::strategic::ManipulationWitness;
use crate::vocab::{
    decode_with_words, default_words, encode_vocabulary, Domain, EndpointMultiset, Extent, Profile, Rational,
    Vocabulary,
};

pub use cli::{cli_main, run};
pub use render::{render_diagram, Diagram, Format};

/// Parses `"p/q"`, an integer, or a decimal numeral with optional exponent.
pub fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    let t = text.trim();
    if let Some((num, den)) = t.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| format!("bad numerator in `{t}`"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| format!("bad denominator in `{t}`"))?;
        if den == BigInt::from(0) {
            return Err(format!("zero denominator in `{t}`"));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(t).ok_or_else(|| format!("`{t}` is not a finite rational numeral"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], i64::from_str(&t[i + 1..]).ok()?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int_part.len() + frac_part.len() == 0 || !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let mut value = BigInt::from_str(&format!("{int_part}{frac_part}0")).ok()? / BigInt::from(10);
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 10_000 {
        return None;
    }
    let power = BigInt::from(10).pow(scale.unsigned_abs() as u32);
    Some(if scale >= 0 {
        Rational::from_integer(value * power)
    } else {
        Rational::new(value, power)
    })
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}

fn rational_at(v: &Value, location: &str) -> Result<Rational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::parse(location, "expected a number or a numeral string")),
    };
    parse_rational(&text).map_err(|msg| Error::parse(location, msg))
}

fn array_at<'a>(v: &'a Value, location: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(location, "expected an array"))
}

fn field<'a>(v: &'a Value, key: &str, location: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::parse(location, format!("missing field `{key}`")))
}

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
}

fn parse_domain(doc: &Value) -> Result<Domain> {
    let d = field(doc, "domain", "document")?;
    let lower = rational_at(field(d, "lower", "domain")?, "domain.lower")?;
    let upper = rational_at(field(d, "upper", "domain")?, "domain.upper")?;
    Domain::new(lower, upper)
}

fn parse_words(doc: &Value) -> Result<Option<Vec<String>>> {
    let Some(words) = doc.get("words") else {
        return Ok(None);
    };
    array_at(words, "words")?
        .iter()
        .enumerate()
        .map(|(i, w)| {
            w.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::parse(format!("words[{i}]"), "expected a string label"))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// The three input shapes a profile document can take.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedInput {
    /// Every agent listed endpoints.
    Endpoints(Profile),
    /// Every agent listed word extents; `profile` holds their encodings.
    Extents {
        vocabularies: Vec<Vocabulary>,
        profile: Profile,
    },
    /// Every agent labeled the shared exemplars.
    Exemplars(ExemplarProfile),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileDocument {
    pub domain: Domain,
    pub words: Vec<String>,
    pub input: ParsedInput,
}

impl ProfileDocument {
    /// The endpoint profile, unless the document holds exemplars.
    pub fn profile(&self) -> Result<&Profile> {
        match &self.input {
            ParsedInput::Endpoints(p) | ParsedInput::Extents { profile: p, .. } => Ok(p),
            ParsedInput::Exemplars(_) => Err(Error::Precondition(
                "exemplar documents have no endpoint profile; use the induce pipeline".into(),
            )),
        }
    }
}

/// Parses a profile document:
///
/// ```json
/// { "domain": {"lower": "0", "upper": "1"},
///   "words": ["w1", "w2", "w3"],
///   "agents": [ {"endpoints": ["0.3", "7/10"]},
///               {"extents": {"w1": ["0", "0.5"], "w3": ["0.5", "1"]}} ] }
/// ```
///
/// Exemplar documents add `"exemplars": [...]` and give each agent
/// `"exemplar_labels"` (word labels or 1-based indices). All agents must use
/// the same form.
pub fn parse_profile(text: &str) -> Result<ProfileDocument> {
    let doc = parse_json(text)?;
    let domain = parse_domain(&doc)?;
    let words = parse_words(&doc)?;
    let agents = array_at(field(&doc, "agents", "document")?, "agents")?;
    if agents.is_empty() {
        return Err(Error::parse("agents", "at least one agent is required"));
    }
    let form = ["endpoints", "extents", "exemplar_labels"]
        .into_iter()
        .find(|k| agents[0].get(*k).is_some())
        .ok_or_else(|| Error::parse("agents[0]", "expected `endpoints`, `extents` or `exemplar_labels`"))?;
    if let Some(i) = agents.iter().position(|a| a.get(form).is_none()) {
        return Err(Error::parse(
            format!("agents[{i}]"),
            format!("every agent must give `{form}`"),
        ));
    }
    match form {
        "endpoints" => {
            let rows = agents
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let loc = format!("agents[{i}].endpoints");
                    let values = array_at(&a[form], &loc)?
                        .iter()
                        .enumerate()
                        .map(|(j, v)| rational_at(v, &format!("{loc}[{j}]")))
                        .collect::<Result<Vec<_>>>()?;
                    EndpointMultiset::new(domain.clone(), values).map_err(|e| Error::parse(loc, e.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            let profile = Profile::new(domain.clone(), rows)?;
            let words = match words {
                Some(w) if w.len() != profile.m() + 1 => {
                    return Err(Error::ShapeMismatch(format!(
                        "{} words for {} endpoints",
                        w.len(),
                        profile.m()
                    )))
                }
                Some(w) => w,
                None => default_words(profile.m() + 1),
            };
            Ok(ProfileDocument {
                domain,
                words,
                input: ParsedInput::Endpoints(profile),
            })
        }
        "extents" => {
            let words = words.ok_or_else(|| Error::parse("words", "extent documents must list the words"))?;
            let vocabularies = agents
                .iter()
                .enumerate()
                .map(|(i, a)| parse_extents(&a[form], &domain, &words, i))
                .collect::<Result<Vec<_>>>()?;
            let rows = vocabularies.iter().map(encode_vocabulary).collect::<Result<Vec<_>>>()?;
            let profile = Profile::new(domain.clone(), rows)?;
            Ok(ProfileDocument {
                domain,
                words,
                input: ParsedInput::Extents { vocabularies, profile },
            })
        }
        _ => {
            let words = words.ok_or_else(|| Error::parse("words", "exemplar documents must list the words"))?;
            let exemplars = array_at(field(&doc, "exemplars", "document")?, "exemplars")?
                .iter()
                .enumerate()
                .map(|(j, v)| rational_at(v, &format!("exemplars[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let labels = agents
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let loc = format!("agents[{i}].exemplar_labels");
                    array_at(&a[form], &loc)?
                        .iter()
                        .enumerate()
                        .map(|(j, v)| word_index(v, &words, &format!("{loc}[{j}]")))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            if words.is_empty() {
                return Err(Error::parse("words", "at least one word is required"));
            }
            let profile = ExemplarProfile::new(domain.clone(), words.len() - 1, exemplars, labels)?;
            Ok(ProfileDocument {
                domain,
                words,
                input: ParsedInput::Exemplars(profile),
            })
        }
    }
}

fn word_index(v: &Value, words: &[String], location: &str) -> Result<usize> {
    match v {
        Value::String(s) => words
            .iter()
            .position(|w| w == s)
            .map(|i| i + 1)
            .ok_or_else(|| Error::parse(location, format!("unknown word `{s}`"))),
        Value::Number(n) => n
            .as_u64()
            .filter(|&k| k >= 1 && (k as usize) <= words.len())
            .map(|k| k as usize)
            .ok_or_else(|| Error::parse(location, format!("word index {n} outside 1..={}", words.len()))),
        _ => Err(Error::parse(location, "expected a word label or index")),
    }
}

fn parse_extents(v: &Value, domain: &Domain, words: &[String], agent: usize) -> Result<Vocabulary> {
    let loc = format!("agents[{agent}].extents");
    let map = v
        .as_object()
        .ok_or_else(|| Error::parse(&loc, "expected an object from word to [left, right]"))?;
    if let Some(unknown) = map.keys().find(|k| !words.contains(k)) {
        return Err(Error::parse(&loc, format!("unknown word `{unknown}`")));
    }
    let extents = words
        .iter()
        .map(|w| match map.get(w) {
            None | Some(Value::Null) => Ok(None),
            Some(pair) => {
                let here = format!("{loc}.{w}");
                let pair = array_at(pair, &here)?;
                if pair.len() != 2 {
                    return Err(Error::parse(&here, "expected [left, right]"));
                }
                let left = rational_at(&pair[0], &format!("{here}[0]"))?;
                let right = rational_at(&pair[1], &format!("{here}[1]"))?;
                if !domain.contains_closed(&left) || !domain.contains_closed(&right) {
                    return Err(Error::DomainMismatch(format!(
                        "{here} = [{left}, {right}] leaves the domain"
                    )));
                }
                Ok(Some(Extent::new(left, right)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Vocabulary::new(domain.clone(), words.to_vec(), extents)
}

/// Reads a phantom matrix document: `{"phantoms": [[q¹₁, …], [q²₁, …], …]}`,
/// one inner list of `n − 1` values per endpoint.
pub fn parse_phantoms(text: &str) -> Result<Vec<Vec<Rational>>> {
    let doc = parse_json(text)?;
    array_at(field(&doc, "phantoms", "document")?, "phantoms")?
        .iter()
        .enumerate()
        .map(|(k, col)| {
            let loc = format!("phantoms[{k}]");
            array_at(col, &loc)?
                .iter()
                .enumerate()
                .map(|(l, v)| rational_at(v, &format!("{loc}[{l}]")))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainDto {
    pub lower: String,
    pub upper: String,
}

impl DomainDto {
    pub fn from_domain(d: &Domain) -> Self {
        DomainDto {
            lower: format_rational(d.lower()),
            upper: format_rational(d.upper()),
        }
    }

    pub fn to_domain(&self) -> Result<Domain> {
        let lower = parse_rational(&self.lower).map_err(|m| Error::parse("domain.lower", m))?;
        let upper = parse_rational(&self.upper).map_err(|m| Error::parse("domain.upper", m))?;
        Domain::new(lower, upper)
    }
}

/// One word of a decoded vocabulary; `extent` is `None` for inactive words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordDto {
    pub word: String,
    pub extent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDto {
    pub kind: String,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transformed: Option<Vec<Vec<String>>>,
    pub expected: Vec<String>,
    pub actual: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDto {
    pub axiom: String,
    pub rule: String,
    pub seed: Option<u64>,
    pub samples: usize,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManipulationDto {
    pub rule: String,
    pub agent: usize,
    pub truthful: Vec<Vec<String>>,
    pub misreport: Vec<String>,
    pub weights: Vec<String>,
    pub truthful_outcome: Vec<String>,
    pub manipulated_outcome: Vec<String>,
    pub gain: String,
}

/// Gap pipeline output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InductionDto {
    pub gap_matrix: Vec<Vec<[String; 2]>>,
    pub collective_gaps: Vec<[String; 2]>,
    pub attributed: Vec<WordDto>,
}

/// Output of every CLI subcommand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<Vec<WordDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induction: Option<InductionDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<ReportDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<ManipulationDto>,
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

fn profile_strings(p: &Profile) -> Vec<Vec<String>> {
    p.rows().iter().map(|r| strings(r.values())).collect()
}

fn detail_string(d: &WitnessDetail) -> (String, String) {
    let join = |xs: &[usize]| xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
    match d {
        WitnessDetail::Ordering { position } => {
            ("ordering".into(), format!("endpoints {position} and {}", position + 1))
        }
        WitnessDetail::ConstantColumns(cols) => ("constant_columns".into(), format!("columns {}", join(cols))),
        WitnessDetail::Permutation(perm) => {
            let one_based: Vec<usize> = perm.iter().map(|i| i + 1).collect();
            ("permutation".into(), format!("rows reordered as {}", join(&one_based)))
        }
        WitnessDetail::Map(phi) => ("map".into(), phi.to_string()),
        WitnessDetail::Perturbation { epsilon } => ("perturbation".into(), format!("epsilon {epsilon}")),
        WitnessDetail::InactiveWord { word, supporters } => (
            "inactive_word".into(),
            format!("w{word} active for {supporters} agents"),
        ),
        WitnessDetail::Extent {
            word,
            a,
            b,
            supporters,
            weak,
        } => (
            "extent".into(),
            format!(
                "({a}, {b}) inside w{word} for {supporters} agents{}",
                if *weak { " (weak majority)" } else { "" }
            ),
        ),
        WitnessDetail::Responsiveness { column } => ("responsiveness".into(), format!("column {column} raised")),
        WitnessDetail::SharedColumn { column } => ("shared_column".into(), format!("column {column} shared")),
        WitnessDetail::Deviation { agent, column } => {
            ("deviation".into(), format!("agent {agent} deviates, endpoint {column}"))
        }
    }
}

impl ReportDto {
    pub fn from_report(r: &AxiomReport) -> Self {
        ReportDto {
            axiom: r.axiom.name().to_string(),
            rule: r.rule.clone(),
            seed: r.seed,
            samples: r.samples,
            verdict: match r.verdict {
                Verdict::HoldsOnSample => "holds_on_sample".into(),
                Verdict::Violated => "violated".into(),
            },
            witness: r.witness.as_ref().map(|w| {
                let (kind, detail) = detail_string(&w.detail);
                WitnessDto {
                    kind,
                    detail,
                    profile: w.profile.as_ref().map(profile_strings),
                    transformed: w.transformed.as_ref().map(profile_strings),
                    expected: strings(&w.expected),
                    actual: strings(&w.actual),
                }
            }),
        }
    }
}

impl ManipulationDto {
    pub fn from_witness(w: &ManipulationWitness) -> Self {
        ManipulationDto {
            rule: w.rule.clone(),
            agent: w.agent,
            truthful: profile_strings(&w.truthful),
            misreport: strings(w.misreport.values()),
            weights: strings(w.preference.weights()),
            truthful_outcome: strings(&w.truthful_outcome),
            manipulated_outcome: strings(&w.manipulated_outcome),
            gain: format_rational(&w.gain),
        }
    }
}

pub fn vocabulary_dto(v: &Vocabulary) -> Vec<WordDto> {
    v.words()
        .iter()
        .zip(v.extents())
        .map(|(w, e)| WordDto {
            word: w.clone(),
            extent: e.as_ref().map(|e| e.describe(v.domain())),
        })
        .collect()
}

fn gap_pairs(g: &GapSequence) -> Vec<[String; 2]> {
    g.gaps()
        .iter()
        .map(|g| [format_rational(&g.left), format_rational(&g.right)])
        .collect()
}

impl InductionDto {
    pub fn new(
        matrix: &[GapSequence],
        collective: &GapSequence,
        vocabulary: &InducedVocabulary,
        words: &[String],
    ) -> Self {
        InductionDto {
            gap_matrix: matrix.iter().map(gap_pairs).collect(),
            collective_gaps: gap_pairs(collective),
            attributed: words
                .iter()
                .zip(vocabulary.spans())
                .map(|(w, s)| WordDto {
                    word: w.clone(),
                    extent: s.as_ref().map(ToString::to_string),
                })
                .collect(),
        }
    }
}

impl ResultDocument {
    /// An aggregation result: collective endpoints plus their decoding.
    pub fn aggregation(rule: &str, domain: &Domain, values: &[Rational], words: &[String]) -> Result<Self> {
        let endpoints = EndpointMultiset::new(domain.clone(), values.to_vec())?;
        let vocabulary = decode_with_words(&endpoints, words.to_vec())?;
        Ok(ResultDocument {
            rule: rule.to_string(),
            domain: Some(DomainDto::from_domain(domain)),
            endpoints: Some(strings(values)),
            vocabulary: Some(vocabulary_dto(&vocabulary)),
            ..ResultDocument::default()
        })
    }

    /// The collective endpoints as exact rationals.
    pub fn endpoint_values(&self) -> Result<Vec<Rational>> {
        self.endpoints
            .iter()
            .flatten()
            .enumerate()
            .map(|(i, s)| parse_rational(s).map_err(|m| Error::parse(format!("endpoints[{i}]"), m)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {}, column {}", e.line(), e.column()), e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::{int, rat};

    #[test]
    fn numerals() {
        assert_eq!(parse_rational("145/3").unwrap(), rat(145, 3));
        assert_eq!(parse_rational("0.45").unwrap(), rat(9, 20));
        assert_eq!(parse_rational("-2.5e1").unwrap(), int(-25));
        assert_eq!(parse_rational("1E-2").unwrap(), rat(1, 100));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        for bad in ["1/0", "inf", "NaN", "", "1.2.3", "e5", "0x10", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn bare_json_numbers_are_exact() {
        let doc = r#"{"domain": {"lower": 0, "upper": 1}, "agents": [{"endpoints": [0.1, 0.7]}]}"#;
        let parsed = parse_profile(doc).unwrap();
        assert_eq!(parsed.profile().unwrap().row(0).values(), &[rat(1, 10), rat(7, 10)]);
        assert_eq!(parsed.words, default_words(3));
    }

    #[test]
    fn extents_document_encodes() {
        let doc = r#"{"domain": {"lower": "0", "upper": "1"},
            "words": ["w1", "w2", "w3", "w4"],
            "agents": [{"extents": {"w1": ["0", "0.3"], "w2": ["0.3", "0.7"], "w4": ["0.7", "1"]}}]}"#;
        let parsed = parse_profile(doc).unwrap();
        assert_eq!(
            parsed.profile().unwrap().row(0).values(),
            &[rat(3, 10), rat(7, 10), rat(7, 10)]
        );
    }

    #[test]
    fn parse_errors_carry_locations() {
        let doc = r#"{"domain": {"lower": "0", "upper": "1"}, "agents": [{"endpoints": ["1/0"]}]}"#;
        match parse_profile(doc) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "agents[0].endpoints[0]"),
            other => panic!("unexpected {other:?}"),
        }
        let unbounded = r#"{"domain": {"lower": "-inf", "upper": "1"}, "agents": [{"endpoints": []}]}"#;
        assert!(matches!(parse_profile(unbounded), Err(Error::Parse { .. })));
        assert!(matches!(parse_profile("{"), Err(Error::Parse { .. })));
        let mixed = r#"{"domain": {"lower": "0", "upper": "1"},
            "agents": [{"endpoints": ["0.5"]}, {"extents": {}}]}"#;
        assert!(parse_profile(mixed).is_err());
        let gap = r#"{"domain": {"lower": "0", "upper": "1"}, "words": ["a", "b"],
            "agents": [{"extents": {"a": ["0", "0.3"], "b": ["0.4", "1"]}}]}"#;
        assert!(matches!(parse_profile(gap), Err(Error::InvalidVocabulary(_))));
    }

    #[test]
    fn result_document_round_trip() {
        let d = Domain::new(int(0), int(100)).unwrap();
        let values = vec![int(20), int(35), rat(145, 3), rat(200, 3)];
        let doc = ResultDocument::aggregation("mean", &d, &values, &default_words(5)).unwrap();
        let back = ResultDocument::from_json(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.endpoint_values().unwrap(), values);
    }
}
