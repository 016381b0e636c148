//! Drives the command-line front end in-process with in-memory streams.

use serde_json::Value;
use vocagg::io::run;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

fn vocagg(args: &[&str], stdin: &str, env_seed: Option<&str>) -> Outcome {
    let argv = std::iter::once("vocagg").chain(args.iter().copied());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(
        argv,
        env_seed.map(String::from),
        &mut stdin.as_bytes(),
        &mut out,
        &mut err,
    );
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_owned())
        .collect()
}

#[test]
fn aggregate_median_on_the_worked_example() {
    let o = vocagg(
        &["aggregate", "--rule", "median", "--input", &data("four_words.json")],
        "",
        None,
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let doc = o.json();
    assert_eq!(strings(&doc["endpoints"]), ["20", "40", "55", "70"]);
    assert_eq!(doc["vocabulary"][4]["extent"], "[70, 100)");
}

#[test]
fn aggregate_reads_standard_input() {
    let text = std::fs::read_to_string(data("four_words.json")).unwrap();
    let o = vocagg(&["aggregate", "--rule", "mean"], &text, None);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(strings(&o.json()["endpoints"]), ["20", "35", "145/3", "200/3"]);
}

#[test]
fn extent_documents_use_their_own_word_labels() {
    let o = vocagg(
        &["aggregate", "--rule", "median", "--input", &data("extents.json")],
        "",
        None,
    );
    assert_eq!(o.code, 0, "{}", o.stderr);
    let doc = o.json();
    assert_eq!(strings(&doc["endpoints"]), ["3/10", "7/10"]);
    assert_eq!(doc["vocabulary"][1]["word"], "mild");
}

#[test]
fn extended_median_reads_a_phantom_file() {
    let rule = format!("emed:{}", data("phantoms.json"));
    let o = vocagg(
        &["aggregate", "--rule", &rule, "--input", &data("four_words.json")],
        "",
        None,
    );
    assert_eq!(o.code, 2, "two phantom rows cannot serve four columns");
    assert!(o.stderr.starts_with("error:"), "{}", o.stderr);

    let doc = r#"{"domain": {"lower": "0", "upper": "100"},
                  "agents": [{"endpoints": ["10", "90"]}, {"endpoints": ["40", "60"]},
                             {"endpoints": ["30", "70"]}]}"#;
    let o = vocagg(&["aggregate", "--rule", &rule], doc, None);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(strings(&o.json()["endpoints"]), ["30", "70"]);
}

#[test]
fn mean_fails_the_axiom_battery_with_a_witness() {
    let o = vocagg(&["axioms", "--rule", "mean", "--trials", "50", "--seed", "7"], "", None);
    assert_eq!(o.code, 1, "{}", o.stderr);
    let doc = o.json();
    let stability = doc["reports"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["axiom"] == "stability")
        .unwrap();
    assert_eq!(stability["verdict"], "violated");
    assert!(stability["witness"].is_object());
}

#[test]
fn median_passes_the_axiom_battery() {
    let o = vocagg(
        &[
            "axioms",
            "--rule",
            "median",
            "--trials",
            "60",
            "--input",
            &data("four_words.json"),
        ],
        "",
        None,
    );
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert!(o.json()["reports"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["verdict"] == "holds_on_sample"));
}

#[test]
fn seeds_come_from_the_flag_before_the_environment() {
    let args = ["axioms", "--rule", "fixture:inf_rule", "--trials", "40"];
    let from_env = vocagg(&args, "", Some("11"));
    let from_flag = vocagg(&[&args[..], &["--seed", "11"]].concat(), "", Some("99"));
    assert_eq!(from_env.stdout, from_flag.stdout);
    assert_eq!(from_env.json()["reports"][0]["seed"], 11);
    let o = vocagg(&args, "", Some("not-a-number"));
    assert_eq!(o.code, 2);
}

#[test]
fn sp_check_finds_the_mean_manipulable() {
    let o = vocagg(
        &["sp-check", "--rule", "mean", "--trials", "200", "--seed", "3"],
        "",
        None,
    );
    assert_eq!(o.code, 1, "{}", o.stderr);
    let again = vocagg(
        &["sp-check", "--rule", "mean", "--trials", "200", "--seed", "3"],
        "",
        None,
    );
    assert_eq!(o.stdout, again.stdout);
    let o = vocagg(
        &["sp-check", "--rule", "median", "--trials", "200", "--seed", "3"],
        "",
        None,
    );
    assert_eq!(o.code, 0, "{}", o.stdout);
}

#[test]
fn induce_runs_the_gap_pipeline() {
    let o = vocagg(&["induce", "--input", &data("exemplars.json")], "", None);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let doc = o.json();
    let attributed = doc["induction"]["attributed"].as_array().unwrap();
    assert_eq!(attributed[0]["extent"], "(0, 1/5]");
    assert!(attributed[1]["extent"].is_null());
    assert_eq!(attributed[2]["extent"], "[1/2, 7/10]");
    assert!(attributed[3]["extent"].is_null());
}

#[test]
fn rendering_is_deterministic() {
    for format in ["ascii", "svg"] {
        let args = [
            "render",
            "--input",
            &data("extents.json"),
            "--rule",
            "median",
            "--format",
            format,
        ];
        let first = vocagg(&args, "", None);
        assert_eq!(first.code, 0, "{}", first.stderr);
        assert_eq!(first.stdout, vocagg(&args, "", None).stdout);
    }
    let ascii = vocagg(&["render", "--input", &data("extents.json")], "", None).stdout;
    assert!(ascii.lines().all(|l| l.chars().count() <= 80));
    let svg = vocagg(
        &["render", "--input", &data("four_words.json"), "--format", "svg"],
        "",
        None,
    )
    .stdout;
    assert!(svg.starts_with("<svg"));
}

#[test]
fn input_errors_exit_with_two() {
    let cases: [(&[&str], &str); 5] = [
        (
            &["aggregate", "--rule", "multiset"],
            r#"{"domain": {"lower": "0", "upper": "1"}, "agents": [{"endpoints": ["0.2"]}, {"endpoints": ["0.4"]}]}"#,
        ),
        (&["aggregate", "--rule", "median"], "{ not json"),
        (
            &["aggregate", "--rule", "median"],
            r#"{"domain": {"lower": "0", "upper": "1"}, "agents": [{"endpoints": ["1/0"]}]}"#,
        ),
        (
            &["aggregate", "--rule", "borda"],
            r#"{"domain": {"lower": "0", "upper": "1"}, "agents": [{"endpoints": ["0.5"]}]}"#,
        ),
        (&["sp-check", "--rule", "fixture:mean"], ""),
    ];
    for (args, stdin) in cases {
        let o = vocagg(args, stdin, None);
        assert_eq!(o.code, 2, "{args:?}: {}", o.stdout);
        assert!(o.stdout.is_empty());
        assert!(!o.stderr.is_empty());
    }
    let o = vocagg(
        &["aggregate", "--rule", "median"],
        r#"{"domain": {"lower": "0", "upper": "1"}, "agents": [{"endpoints": ["0.3", "oops"]}]}"#,
        None,
    );
    assert!(o.stderr.contains("agents[0].endpoints[1]"), "{}", o.stderr);
}

#[test]
fn result_fields_are_declared_in_the_shipped_schema() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(format!("{}/schemas/result.schema.json", env!("CARGO_MANIFEST_DIR"))).unwrap(),
    )
    .unwrap();
    let declared = schema["properties"].as_object().unwrap();
    let runs: [&[&str]; 3] = [
        &["aggregate", "--rule", "median", "--input", &data("four_words.json")],
        &["induce", "--input", &data("exemplars.json")],
        &["sp-check", "--rule", "mean", "--trials", "200", "--seed", "3"],
    ];
    for args in runs {
        let doc = vocagg(args, "", None).json();
        for key in doc.as_object().unwrap().keys() {
            assert!(declared.contains_key(key), "{args:?} emits undeclared field `{key}`");
        }
    }
    for name in ["profile.schema.json", "phantoms.schema.json"] {
        let text = std::fs::read_to_string(format!("{}/schemas/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap();
        serde_json::from_str::<Value>(&text).unwrap();
    }
}
