//! End-to-end checks of the C interface: every call goes through the
//! extern functions exactly as a C caller would use them, including the
//! free functions, the error channel, and the status codes.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hylog_capi::{
    hylog_check_sat, hylog_default_limits, hylog_discover, hylog_kb_free, hylog_kb_parse,
    hylog_last_error, hylog_learn_view, hylog_query, hylog_string_free, HylogKb, HylogStatus,
};

fn read_kbs(name: &str) -> CString {
    let path = format!("{}/../../kbs/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    CString::new(text).unwrap()
}

fn parse(text: &CStr) -> *mut HylogKb {
    let mut kb = ptr::null_mut();
    let status = unsafe { hylog_kb_parse(text.as_ptr(), &mut kb) };
    assert_eq!(status, HylogStatus::Ok, "{}", last_error_text());
    assert!(!kb.is_null());
    kb
}

fn last_error_text() -> String {
    let msg = unsafe { hylog_last_error() };
    if msg.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(msg) }.to_string_lossy().into_owned()
    }
}

fn take_string(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let text = unsafe { CStr::from_ptr(s) }.to_string_lossy().into_owned();
    unsafe { hylog_string_free(s) };
    text
}

#[test]
fn status_codes_match_the_command_line_exit_codes() {
    assert_eq!(HylogStatus::Ok as i32, 0);
    assert_eq!(HylogStatus::InvalidInput as i32, 2);
    assert_eq!(HylogStatus::ResourceLimit as i32, 3);
    assert_eq!(HylogStatus::InconsistentInput as i32, 4);
}

#[test]
fn campus_base_parses_is_satisfiable_and_answers_queries() {
    let kb = parse(&read_kbs("campus.hkb"));
    let mut sat = false;
    assert_eq!(unsafe { hylog_check_sat(kb, ptr::null(), &mut sat) }, HylogStatus::Ok);
    assert!(sat);
    assert!(unsafe { hylog_last_error() }.is_null());

    for (query, want) in [
        ("boy(paul), MALE(paul)", true),
        ("girl(mary)", true),
        ("MALE(mary)", false),
    ] {
        let query = CString::new(query).unwrap();
        let mut entailed = false;
        let limits = hylog_default_limits();
        let status = unsafe { hylog_query(kb, query.as_ptr(), &limits, &mut entailed) };
        assert_eq!(status, HylogStatus::Ok, "{}", last_error_text());
        assert_eq!(entailed, want, "{query:?}");
    }
    unsafe { hylog_kb_free(kb) };
}

#[test]
fn malformed_text_and_null_pointers_are_invalid_input() {
    let mut kb = ptr::null_mut();
    let garbage = CString::new("rules { broken").unwrap();
    assert_eq!(
        unsafe { hylog_kb_parse(garbage.as_ptr(), &mut kb) },
        HylogStatus::InvalidInput,
    );
    assert!(!last_error_text().is_empty());
    assert_eq!(
        unsafe { hylog_kb_parse(ptr::null(), &mut kb) },
        HylogStatus::InvalidInput,
    );
    assert!(last_error_text().contains("null"));

    let kb = parse(&read_kbs("campus.hkb"));
    let mut entailed = false;
    let open = CString::new("boy(X)").unwrap();
    let status = unsafe { hylog_query(kb, open.as_ptr(), ptr::null(), &mut entailed) };
    assert_eq!(status, HylogStatus::InvalidInput);
    assert!(last_error_text().contains("variable"), "{}", last_error_text());
    assert_eq!(
        unsafe { hylog_check_sat(kb, ptr::null(), ptr::null_mut()) },
        HylogStatus::InvalidInput,
    );
    unsafe { hylog_kb_free(kb) };
    unsafe { hylog_kb_free(ptr::null_mut()) };
    unsafe { hylog_string_free(ptr::null_mut()) };
}

#[test]
fn tight_limits_report_a_resource_bound() {
    let kb = parse(&read_kbs("campus.hkb"));
    let mut limits = hylog_default_limits();
    limits.max_herbrand = 3;
    let mut sat = false;
    assert_eq!(
        unsafe { hylog_check_sat(kb, &limits, &mut sat) },
        HylogStatus::ResourceLimit,
    );
    assert!(last_error_text().contains("resource bound"), "{}", last_error_text());
    unsafe { hylog_kb_free(kb) };
}

#[test]
fn view_induction_returns_the_loved_rule() {
    let kb = parse(&read_kbs("celebrities.hkb"));
    let bias = read_kbs("celebrities.bias");
    let examples = read_kbs("celebrities.ex");
    let mut theory = ptr::null_mut();
    let status = unsafe {
        hylog_learn_view(kb, bias.as_ptr(), examples.as_ptr(), ptr::null(), &mut theory)
    };
    assert_eq!(status, HylogStatus::Ok, "{}", last_error_text());
    let text = take_string(theory);
    assert!(text.contains("happy(X) :- famous(X), LOVES(Y,X)."), "{text}");
    unsafe { hylog_kb_free(kb) };
}

#[test]
fn discovery_returns_rules_and_minimization_prunes_them() {
    let kb = parse(&read_kbs("courses.hkb"));
    let bias = CString::new(
        "bias {\n\
         datalog_pos: enrolled(_,c1), enrolled(_,c2).\n\
         concepts: PERSON.\n\
         max_body_literals: 2.\n\
         }\n",
    )
    .unwrap();
    let mut full = ptr::null_mut();
    let status = unsafe { hylog_discover(kb, bias.as_ptr(), ptr::null(), false, &mut full) };
    assert_eq!(status, HylogStatus::Ok, "{}", last_error_text());
    let full = take_string(full);

    let mut lean = ptr::null_mut();
    let status = unsafe { hylog_discover(kb, bias.as_ptr(), ptr::null(), true, &mut lean) };
    assert_eq!(status, HylogStatus::Ok, "{}", last_error_text());
    let lean = take_string(lean);

    assert!(full.contains("PERSON(X) :- enrolled(X,c1)."), "{full}");
    assert!(lean.contains("PERSON(X) :- enrolled(X,c1)."), "{lean}");
    assert!(lean.lines().count() < full.lines().count(), "{full}\nversus\n{lean}");
    unsafe { hylog_kb_free(kb) };
}

#[test]
fn inconsistent_background_is_its_own_status() {
    let text = CString::new(
        "tbox { FEMALE subClassOf not MALE. MALE subClassOf PERSON. \
         FEMALE subClassOf PERSON. }\n\
         rules { FEMALE(X) :- girl(X). MALE(X) :- boy(X). }\n\
         facts { girl(a). boy(a). enrolled(a,c1). enrolled(a,c2). enrolled(a,c3). }\n",
    )
    .unwrap();
    let kb = parse(&text);
    let mut sat = true;
    assert_eq!(unsafe { hylog_check_sat(kb, ptr::null(), &mut sat) }, HylogStatus::Ok);
    assert!(!sat, "an unsatisfiable base is still a completed check");

    let bias = read_kbs("courses.bias");
    let mut theory = ptr::null_mut();
    let status = unsafe { hylog_discover(kb, bias.as_ptr(), ptr::null(), false, &mut theory) };
    assert_eq!(status, HylogStatus::InconsistentInput);
    assert!(last_error_text().contains("inconsistent input"), "{}", last_error_text());
    unsafe { hylog_kb_free(kb) };
}
