use proptest::prelude::*;
use rvw_cli::parse::{format_int_poly, parse_poly, parse_poly_in};
use rvw_cli::run;
use serde_json::{json, Value};

fn rvw(args: &[&str]) -> (i32, Value, String) {
    let out = run(std::iter::once("rvw").chain(args.iter().copied()));
    let v = if out.stdout.is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&out.stdout).expect("stdout is JSON")
    };
    (out.code, v, out.stderr)
}

#[test]
fn mbound_example() {
    let (code, v, _) = rvw(&["mbound", "--bins", "3,3,2", "--balls", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["m"], json!(6));
    assert_eq!(v["greedy"], json!([3, 2, 1]));
    assert_eq!(v["bins"], json!([3, 3, 2]));
}

#[test]
fn mbound_outside_range_has_no_distribution() {
    let (code, v, _) = rvw(&["mbound", "--bins", "2,2", "--balls", "-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["m"], json!(1));
    assert_eq!(v["greedy"], Value::Null);
}

#[test]
fn delta_example() {
    let (code, v, _) = rvw(&["delta", "--p", "2", "--box", "0,1", "--poly", "t1+t2"]);
    assert_eq!(code, 0);
    assert_eq!(v["delta_text"], json!("t1*t2"));
    assert_eq!(v["delta"], json!([["1", [1, 1]]]));
}

#[test]
fn davenport_example() {
    let (code, v, _) = rvw(&["davenport", "--group", "2:1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["D"], json!(3));
    assert_eq!(v["d"], json!(3));
    assert_eq!(v["witness"], json!([[1, 0], [0, 1]]));
}

#[test]
fn sharp_parity_report() {
    let (code, v, err) = rvw(&[
        "verify", "rvw2", "--p", "2", "--box", "0,1", "--poly", "t1+t2+t3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["count"], json!(4));
    assert_eq!(v["bound"], json!(4));
    assert_eq!(v["verdict"], json!("HOLDS"));
    assert!(err.contains("HOLDS"));
}

#[test]
fn field_polynomials_accept_the_generator() {
    let (code, v, _) = rvw(&[
        "verify",
        "warning2",
        "--field",
        "2,2",
        "--poly",
        "t1^2 + g*t2 + t3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["p_divides_count"], json!(true));
    assert_eq!(v["count"], json!(16));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["frobnicate"][..],
        &["mbound", "--bins", "3,x", "--balls", "2"],
        &["verify", "rvw2", "--p", "2", "--poly", "t1 +"],
        &[
            "verify", "brink", "--p", "4", "--box", "0,1", "--poly", "t1",
        ],
        &["verify", "rvw2", "--p", "2", "--box", "0,2", "--poly", "t1"],
        &["davenport", "--group", "2:1,1", "--max-nodes", "2"],
        &[
            "verify",
            "rvw2",
            "--workers",
            "0",
            "--p",
            "2",
            "--box",
            "0,1",
            "--poly",
            "t1",
        ],
    ] {
        let (code, v, err) = rvw(args);
        assert_eq!(code, 1, "{args:?}");
        assert_eq!(v, Value::Null);
        assert!(!err.is_empty());
    }
}

#[test]
fn parse_errors_report_position() {
    let (_, _, err) = rvw(&[
        "verify",
        "rvw2",
        "--p",
        "2",
        "--box",
        "0,1",
        "--poly",
        "t1 + * t2",
    ]);
    assert!(err.contains("1:6"), "{err}");
}

#[test]
fn instance_files_and_json_out() {
    let dir = std::env::temp_dir().join(format!("rvw-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let inst = dir.join("inst.json");
    std::fs::write(
        &inst,
        r#"{"prime": 3, "polys": [[["1", [1, 0]], ["1", [0, 1]]], "t1*t2 - 1"], "exps": [1, 1], "box": [[0, 1, 2]]}"#,
    )
    .unwrap();
    let out = dir.join("report.json");
    let (code, v, _) = rvw(&[
        "verify",
        "rvw2",
        "--instance",
        inst.to_str().unwrap(),
        "--json-out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v, Value::Null);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // t1 + t2 = 0 and t1 t2 = 1 mod 3 have no common root.
    assert_eq!(written["count"], json!(0));
    assert_eq!(written["verdict"], json!("VACUOUS"));
    assert_eq!(written["exps"], json!([1, 1]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn seeded_sweeps_repeat() {
    let args = ["verify", "rvw2", "--random", "25", "--seed", "42"];
    let a = run(std::iter::once("rvw").chain(args));
    let b = run(std::iter::once("rvw").chain(args).chain(["--workers", "4"]));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["instances"][3]["seed"], json!(45));
    assert_eq!(v["failures"], json!(0));
}

#[test]
fn every_subcommand_holds_on_small_inputs() {
    let cases: &[&[&str]] = &[
        &[
            "verify",
            "chevalley",
            "--p",
            "3",
            "--box",
            "0,1",
            "--poly",
            "t1+t2+t3",
        ],
        &[
            "verify", "brink", "--p", "3", "--box", "0,1", "--poly", "t1+t2+t3",
        ],
        &[
            "verify",
            "schanuel",
            "--p",
            "2",
            "--poly",
            "t1*t2 + 2*t1",
            "--v",
            "2",
            "--caps",
            "2,3",
        ],
        &[
            "verify",
            "alonfuredi",
            "--p",
            "5",
            "--box",
            "0,1,2",
            "--poly",
            "t1*t2 - 1",
        ],
        &["ngsum", "--group", "3:1", "--seq", "1,1,2,2"],
        &[
            "gensub",
            "--group",
            "2:1,1",
            "--seq",
            "1,0;0,1;1,1",
            "--box",
            "0,1",
        ],
        &[
            "dags",
            "--group",
            "3:1",
            "--seq",
            "1,2,1,1,2",
            "--box",
            "0,1",
        ],
        &[
            "egz",
            "--group",
            "3:1",
            "--seq",
            "1,2,1,1,2",
            "--box",
            "0,1",
            "--k",
            "1",
        ],
        &["egz", "--classic", "3"],
        &["setsystem", "--sets", "0,1;1,2;2,3", "--modulus", "2"],
        &["setsystem", "--extremal", "2", "--modulus", "3"],
        &["dags", "--random", "10"],
    ];
    for args in cases {
        let (code, v, _) = rvw(args);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_ne!(v["verdict"], json!("VIOLATED"));
    }
}

proptest! {
    #[test]
    fn parse_format_parse_is_idempotent(
        terms in prop::collection::vec((-20i64..=20, prop::collection::vec(0u32..4, 3)), 0..6)
    ) {
        let text = terms
            .iter()
            .map(|(c, e)| format!("({c})*t1^{}*t2^{}*t3^{}", e[0], e[1], e[2]))
            .collect::<Vec<_>>()
            .join(" + ");
        let text = if text.is_empty() { "0".to_string() } else { text };
        let f = parse_poly_in(&text, 3).unwrap();
        let canonical = format_int_poly(&f);
        let g = parse_poly_in(&canonical, 3).unwrap();
        prop_assert_eq!(&g, &f);
        prop_assert_eq!(format_int_poly(&g), canonical);
    }

    #[test]
    fn expression_arithmetic_matches_polynomial_arithmetic(a in -9i64..9, b in -9i64..9, k in 0u32..5) {
        let z = rvw_core::ring::IntegerRing;
        let lhs = parse_poly(&format!("({a}*t1 + {b})^{k}")).unwrap();
        let base = parse_poly_in(&format!("{a}*t1 + {b}"), 1).unwrap();
        let rhs = base.pow(u64::from(k), &z);
        if lhs.is_zero() {
            prop_assert!(rhs.is_zero());
        } else {
            prop_assert_eq!(lhs.widen(1).unwrap(), rhs);
        }
    }
}
