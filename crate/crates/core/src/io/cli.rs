use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::axioms::{check_consistency, check_core_axioms, check_stability_sampled, fixture_rule, Direction, Fixture};
use crate::error::{Error, Result};
use crate::exemplars::{aggregate_gaps, collective_incomplete, ExemplarProfile};
use crate::io::render::{render_diagram, Diagram, Format};
use crate::io::{
    parse_phantoms, parse_profile, DomainDto, InductionDto, ManipulationDto, ParsedInput, ProfileDocument, ReportDto,
    ResultDocument,
};
use crate::rules::{median_positions, Aggregator, PhantomMatrix, PositionVector, Rule};
use crate::sample::ProfileSampler;
use crate::strategic::{sp_fuzz, uncompromising_fuzz};
use crate::vocab::{decode_with_words, Domain, EndpointMultiset, Profile, Rational};

const EXIT_OK: i32 = 0;
const EXIT_VIOLATION: i32 = 1;
const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "vocagg",
    version,
    about = "Aggregate interval-partition vocabularies exactly"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Aggregate a profile document and print the collective vocabulary.
    Aggregate {
        /// median | mean | multiset | dictator:I | p:P1,P2,… | emed:FILE | fixture:NAME
        #[arg(long)]
        rule: String,
        /// Profile document; standard input when omitted or `-`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Sample unanimity, anonymity, stability and continuity.
    Axioms {
        #[arg(long)]
        rule: String,
        /// Profile document fixing the domain and shape; defaults to (0, 1).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        endpoints: usize,
    },
    /// Search for profitable misreports and uncompromisingness violations.
    SpCheck {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Lattice steps for candidate misreports.
        #[arg(long, default_value_t = 12)]
        grid: u64,
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        endpoints: usize,
    },
    /// Run the gap pipeline on an exemplar document.
    Induce {
        /// median or p:P1,P2,…
        #[arg(long, default_value = "median")]
        rule: String,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Draw the agents' vocabularies, or the collective one when a rule is given.
    Render {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        rule: Option<String>,
        #[arg(long, value_enum, default_value_t = RenderFormat::Ascii)]
        format: RenderFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Ascii,
    Svg,
}

/// A parsed `--rule` descriptor, before the profile shape is known.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Descriptor {
    Median,
    Mean,
    Multiset,
    Dictator(usize),
    Positions(PositionVector),
    Emed(PathBuf),
    Fixture(Fixture),
}

fn parse_descriptor(text: &str) -> Result<Descriptor> {
    let bad = |msg: String| Error::parse("--rule", msg);
    let (head, arg) = text.split_once(':').unwrap_or((text, ""));
    match (head, arg.is_empty()) {
        ("median", true) => Ok(Descriptor::Median),
        ("mean", true) => Ok(Descriptor::Mean),
        ("multiset", true) => Ok(Descriptor::Multiset),
        ("dictator", false) => arg
            .parse()
            .map(Descriptor::Dictator)
            .map_err(|_| bad(format!("bad agent index `{arg}`"))),
        ("p", false) => {
            let positions = arg
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("bad position list `{arg}`")))?;
            Ok(Descriptor::Positions(PositionVector::new(positions)?))
        }
        ("emed", false) => Ok(Descriptor::Emed(PathBuf::from(arg))),
        ("fixture", false) => Ok(Descriptor::Fixture(fixture_rule(arg)?)),
        _ => Err(bad(format!("unknown rule `{text}`"))),
    }
}

/// A rule ready to evaluate.
#[derive(Debug, Clone)]
enum Resolved {
    Rule(Rule),
    Fixture(Fixture),
}

impl Aggregator for Resolved {
    fn describe(&self) -> String {
        match self {
            Resolved::Rule(r) => r.describe(),
            Resolved::Fixture(f) => f.describe(),
        }
    }

    fn evaluate(&self, profile: &Profile) -> Result<Vec<Rational>> {
        match self {
            Resolved::Rule(r) => r.evaluate(profile),
            Resolved::Fixture(f) => f.evaluate(profile),
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn resolve(desc: &Descriptor, n: usize, m: usize, domain: &Domain) -> Result<Resolved> {
    Ok(match desc {
        Descriptor::Median => Resolved::Rule(Rule::median(n, m)?),
        Descriptor::Mean => Resolved::Rule(Rule::Mean),
        Descriptor::Multiset => Resolved::Rule(Rule::Multiset),
        Descriptor::Dictator(i) => Resolved::Rule(Rule::Dictator(*i)),
        Descriptor::Positions(p) => Resolved::Rule(Rule::PRule(p.clone())),
        Descriptor::Emed(path) => {
            let columns = parse_phantoms(&read_file(path)?)?;
            Resolved::Rule(Rule::ExtendedMedian(PhantomMatrix::new(domain.clone(), columns)?))
        }
        Descriptor::Fixture(f) => Resolved::Fixture(*f),
    })
}

struct Context<'a> {
    env_seed: Option<String>,
    stdin: &'a mut dyn Read,
}

impl Context<'_> {
    fn read_input(&mut self, input: &Option<PathBuf>) -> Result<String> {
        match input {
            Some(p) if p.as_os_str() != "-" => read_file(p),
            _ => {
                let mut text = String::new();
                self.stdin
                    .read_to_string(&mut text)
                    .map_err(|e| Error::parse("stdin", e.to_string()))?;
                Ok(text)
            }
        }
    }

    fn document(&mut self, input: &Option<PathBuf>) -> Result<ProfileDocument> {
        parse_profile(&self.read_input(input)?)
    }

    fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(seed) = flag {
            return Ok(seed);
        }
        match &self.env_seed {
            Some(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::parse("VOCAGG_SEED", format!("`{s}` is not a decimal integer"))),
            None => Ok(0),
        }
    }
}

/// Runs the CLI with the process environment's `VOCAGG_SEED`.
pub fn cli_main<I, S>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    run(args, std::env::var("VOCAGG_SEED").ok(), stdin, stdout, stderr)
}

/// Runs the CLI. `args` includes the program name. Returns the exit code:
/// 0 on success, 1 when a violation witness was found, 2 on bad input.
pub fn run<I, S>(
    args: I,
    env_seed: Option<String>,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut ctx = Context { env_seed, stdin };
    match dispatch(cli.command, &mut ctx) {
        Ok((text, code)) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn json_line(doc: &ResultDocument) -> String {
    let mut text = doc.to_json();
    text.push('\n');
    text
}

fn sampler_for(doc: Option<&ProfileDocument>, agents: usize, endpoints: usize) -> Result<ProfileSampler> {
    match doc {
        Some(d) => {
            let p = d.profile()?;
            Ok(ProfileSampler::new(d.domain.clone(), p.n(), p.m()))
        }
        None => Ok(ProfileSampler::new(Domain::unit(), agents, endpoints)),
    }
}

fn positions_for(rule: &str, n: usize, m: usize) -> Result<PositionVector> {
    match parse_descriptor(rule)? {
        Descriptor::Median => median_positions(n, m),
        Descriptor::Positions(p) => Ok(p),
        other => Err(Error::RuleNotApplicable(format!(
            "gap aggregation needs positions, not {other:?}"
        ))),
    }
}

fn dispatch(command: Command, ctx: &mut Context<'_>) -> Result<(String, i32)> {
    match command {
        Command::Aggregate { rule, input } => {
            let desc = parse_descriptor(&rule)?;
            let doc = ctx.document(&input)?;
            let profile = doc.profile()?;
            let resolved = resolve(&desc, profile.n(), profile.m(), &doc.domain)?;
            let values = resolved.evaluate(profile)?;
            let out = ResultDocument::aggregation(&resolved.describe(), &doc.domain, &values, &doc.words)?;
            Ok((json_line(&out), EXIT_OK))
        }
        Command::Axioms {
            rule,
            input,
            seed,
            trials,
            agents,
            endpoints,
        } => {
            let desc = parse_descriptor(&rule)?;
            let seed = ctx.seed(seed)?;
            let doc = match input {
                Some(_) => Some(ctx.document(&input)?),
                None => None,
            };
            let sampler = sampler_for(doc.as_ref(), agents, endpoints)?;
            let resolved = resolve(&desc, sampler.n, sampler.m, &sampler.domain)?;
            let mut reports = check_core_axioms(&resolved, &sampler, trials, seed)?;
            reports.push(check_stability_sampled(
                &resolved,
                &sampler,
                Direction::Decreasing,
                trials,
                seed,
            )?);
            if let Some(doc) = &doc {
                let mut c = check_consistency(&resolved.evaluate(doc.profile()?)?, false);
                c.rule = resolved.describe();
                reports.push(c);
            }
            let violated = reports.iter().any(|r| r.is_violated());
            let out = ResultDocument {
                rule: resolved.describe(),
                domain: Some(DomainDto::from_domain(&sampler.domain)),
                reports: reports.iter().map(ReportDto::from_report).collect(),
                ..ResultDocument::default()
            };
            Ok((json_line(&out), if violated { EXIT_VIOLATION } else { EXIT_OK }))
        }
        Command::SpCheck {
            rule,
            input,
            seed,
            trials,
            grid,
            agents,
            endpoints,
        } => {
            let desc = parse_descriptor(&rule)?;
            let seed = ctx.seed(seed)?;
            let doc = match input {
                Some(_) => Some(ctx.document(&input)?),
                None => None,
            };
            let sampler = sampler_for(doc.as_ref(), agents, endpoints)?;
            let Resolved::Rule(rule) = resolve(&desc, sampler.n, sampler.m, &sampler.domain)? else {
                return Err(Error::RuleNotApplicable(
                    "sp-check needs a declarative rule, not a fixture".into(),
                ));
            };
            rule.check_shape(sampler.n, sampler.m)?;
            let witness = sp_fuzz(&rule, &sampler, trials, seed, grid)?;
            let uncompromising = uncompromising_fuzz(&rule, &sampler, trials, seed)?;
            let violated = witness.is_some() || uncompromising.is_violated();
            let out = ResultDocument {
                rule: rule.describe(),
                domain: Some(DomainDto::from_domain(&sampler.domain)),
                reports: vec![ReportDto::from_report(&uncompromising)],
                witnesses: witness.iter().map(ManipulationDto::from_witness).collect(),
                ..ResultDocument::default()
            };
            Ok((json_line(&out), if violated { EXIT_VIOLATION } else { EXIT_OK }))
        }
        Command::Induce { rule, input } => {
            let doc = ctx.document(&input)?;
            let ParsedInput::Exemplars(ex) = &doc.input else {
                return Err(Error::Precondition("induce needs an exemplar document".into()));
            };
            let p = positions_for(&rule, ex.n(), ex.m())?;
            let out = ResultDocument {
                rule: Rule::PRule(p.clone()).describe(),
                domain: Some(DomainDto::from_domain(&doc.domain)),
                induction: Some(induction(ex, &p, &doc.words)?),
                ..ResultDocument::default()
            };
            Ok((json_line(&out), EXIT_OK))
        }
        Command::Render { input, rule, format } => {
            let doc = ctx.document(&input)?;
            let format = match format {
                RenderFormat::Ascii => Format::Ascii,
                RenderFormat::Svg => Format::Svg,
            };
            let text = match &doc.input {
                ParsedInput::Exemplars(ex) => {
                    let p = positions_for(rule.as_deref().unwrap_or("median"), ex.n(), ex.m())?;
                    let gaps = aggregate_gaps(&ex.gap_matrix()?, &p)?;
                    let v = collective_incomplete(&gaps)?;
                    render_diagram(
                        &Diagram::Induced {
                            vocabulary: &v,
                            words: &doc.words,
                        },
                        format,
                    )
                }
                _ => {
                    let profile = doc.profile()?;
                    let rows: Vec<EndpointMultiset> = match &rule {
                        Some(r) => {
                            let resolved = resolve(&parse_descriptor(r)?, profile.n(), profile.m(), &doc.domain)?;
                            vec![EndpointMultiset::new(doc.domain.clone(), resolved.evaluate(profile)?)?]
                        }
                        None => profile.rows().to_vec(),
                    };
                    let mut text = String::new();
                    for (i, row) in rows.iter().enumerate() {
                        if i > 0 && format == Format::Ascii {
                            text.push('\n');
                        }
                        let v = decode_with_words(row, doc.words.clone())?;
                        text.push_str(&render_diagram(&Diagram::Vocabulary(&v), format));
                    }
                    text
                }
            };
            Ok((text, EXIT_OK))
        }
    }
}

fn induction(ex: &ExemplarProfile, p: &PositionVector, words: &[String]) -> Result<InductionDto> {
    let matrix = ex.gap_matrix()?;
    let gaps = aggregate_gaps(&matrix, p)?;
    let v = collective_incomplete(&gaps)?;
    Ok(InductionDto::new(&matrix, &gaps, &v, words))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors() {
        assert_eq!(parse_descriptor("median").unwrap(), Descriptor::Median);
        assert_eq!(parse_descriptor("dictator:2").unwrap(), Descriptor::Dictator(2));
        assert_eq!(
            parse_descriptor("p:2,3,4").unwrap(),
            Descriptor::Positions(PositionVector::new(vec![2, 3, 4]).unwrap())
        );
        assert_eq!(
            parse_descriptor("fixture:inf_rule").unwrap(),
            Descriptor::Fixture(Fixture::InfRule)
        );
        for bad in ["", "median:1", "dictator:x", "p:3,2", "fixture:nope", "max"] {
            assert!(parse_descriptor(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn seed_precedence() {
        let mut empty: &[u8] = &[];
        let ctx = Context {
            env_seed: Some("17".into()),
            stdin: &mut empty,
        };
        assert_eq!(ctx.seed(Some(3)).unwrap(), 3);
        assert_eq!(ctx.seed(None).unwrap(), 17);
        let bad = Context {
            env_seed: Some("x".into()),
            stdin: &mut empty,
        };
        assert!(bad.seed(None).is_err());
    }
}
