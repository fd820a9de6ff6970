//! The documented JSON schema and the binary's actual JSON output must
//! not drift apart. A small validator for the schema subset the
//! document uses (types, const, required, additionalProperties, items,
//! minimum, $ref into definitions, oneOf) checks every command's
//! output, with and without --trace, against the schema file.

use std::process::Command;

use serde_json::Value;

fn schema() -> Value {
    let path = format!("{}/../../docs/output-schema.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    serde_json::from_str(&text).unwrap()
}

fn kb_path(name: &str) -> String {
    format!("{}/../../kbs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run_json(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_hylog"))
        .args(args)
        .arg("--format")
        .arg("json")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Resolve `{"$ref": "#/definitions/<name>"}` against the root schema.
fn resolve<'a>(root: &'a Value, schema: &'a Value) -> &'a Value {
    match schema.get("$ref").and_then(Value::as_str) {
        Some(r) => {
            let name = r
                .strip_prefix("#/definitions/")
                .unwrap_or_else(|| panic!("unsupported reference {r}"));
            &root["definitions"][name]
        }
        None => schema,
    }
}

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "integer" => value.is_i64() || value.is_u64(),
        "number" => value.is_number(),
        "null" => value.is_null(),
        other => panic!("unsupported type name {other}"),
    }
}

fn check(root: &Value, schema: &Value, value: &Value, path: &str, errors: &mut Vec<String>) {
    let schema = resolve(root, schema);
    if let Some(alternatives) = schema.get("oneOf").and_then(Value::as_array) {
        let mut matched = 0;
        let mut attempts = Vec::new();
        for alt in alternatives {
            let mut local = Vec::new();
            check(root, alt, value, path, &mut local);
            if local.is_empty() {
                matched += 1;
            } else {
                attempts.push(local.join("; "));
            }
        }
        if matched != 1 {
            errors.push(format!(
                "{path}: matched {matched} of {} alternatives ({})",
                alternatives.len(),
                attempts.join(" / "),
            ));
        }
        return;
    }
    if let Some(expected) = schema.get("const") {
        if value != expected {
            errors.push(format!("{path}: expected {expected}, found {value}"));
        }
    }
    if let Some(t) = schema.get("type") {
        let names: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(Value::as_str).collect(),
            other => panic!("unsupported type clause {other}"),
        };
        if !names.iter().any(|n| type_matches(n, value)) {
            errors.push(format!("{path}: not of type {names:?}"));
            return;
        }
        // A nullable value that is null satisfies the schema with
        // nothing further to look inside.
        if value.is_null() {
            return;
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_i64) {
        if value.as_i64().is_some_and(|v| v < min) {
            errors.push(format!("{path}: {value} is below the minimum {min}"));
        }
    }
    if let Some(obj) = value.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required.iter().filter_map(Value::as_str) {
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required key {key}"));
                }
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in obj.keys() {
                if props.is_none_or(|p| !p.contains_key(key)) {
                    errors.push(format!("{path}: unexpected key {key}"));
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    check(root, sub, v, &format!("{path}.{key}"), errors);
                }
            }
        }
    }
    if let Some(list) = value.as_array() {
        if let Some(item_schema) = schema.get("items") {
            for (i, v) in list.iter().enumerate() {
                check(root, item_schema, v, &format!("{path}[{i}]"), errors);
            }
        }
    }
}

fn assert_conforms(doc: &Value) {
    let root = schema();
    let mut errors = Vec::new();
    check(&root, &root, doc, "$", &mut errors);
    assert!(errors.is_empty(), "{}\nagainst document {doc:#}", errors.join("\n"));
}

#[test]
fn every_command_output_conforms_to_the_documented_schema() {
    let campus = kb_path("campus.hkb");
    let celebs = kb_path("celebrities.hkb");
    let courses = kb_path("courses.hkb");
    let celebs_bias = kb_path("celebrities.bias");
    let celebs_ex = kb_path("celebrities.ex");
    let courses_bias = kb_path("courses.bias");
    let learn: Vec<&str> = vec![
        "learn-view",
        "--kb",
        &celebs,
        "--bias",
        &celebs_bias,
        "--examples",
        &celebs_ex,
    ];
    let mut learn_trace = learn.clone();
    learn_trace.push("--trace");
    let runs: Vec<Vec<&str>> = vec![
        vec!["check-sat", "--kb", &campus],
        vec!["check-sat", "--kb", &campus, "--trace"],
        vec!["query", "--kb", &campus, "MALE(paul), girl(mary)"],
        vec!["query", "--kb", &campus, "girl(paul)"],
        learn,
        learn_trace,
        vec!["discover", "--kb", &courses, "--bias", &courses_bias],
        vec!["discover", "--kb", &courses, "--bias", &courses_bias, "--trace"],
    ];
    for args in runs {
        assert_conforms(&run_json(&args));
    }
}

#[test]
fn the_checker_itself_rejects_malformed_documents() {
    let root = schema();
    let cases = [
        serde_json::json!({ "command": "query", "entailed": true }),
        serde_json::json!({ "command": "check-sat", "satisfiable": "yes",
            "units": 0, "partitions_tested": 0, "witness": null }),
        serde_json::json!({ "command": "query", "query": [], "entailed": true,
            "extra": 1 }),
        serde_json::json!({ "command": "discover",
            "theory": { "rules": [], "provenance": [] }, "warnings": [],
            "tested": [{ "rule": ":- boy(X).", "accepted": "yes" }] }),
        serde_json::json!({ "command": "check-sat", "satisfiable": true,
            "units": -1, "partitions_tested": 0, "witness": null }),
    ];
    for doc in cases {
        let mut errors = Vec::new();
        check(&root, &root, &doc, "$", &mut errors);
        assert!(!errors.is_empty(), "accepted malformed document {doc:#}");
    }
}
