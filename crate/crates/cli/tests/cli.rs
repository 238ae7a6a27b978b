use std::path::PathBuf;

use polylab_cli::run;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn polylab(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("polylab").chain(args.iter().copied());
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn construct_writes_canonical_files() {
    let (code, text) = polylab(&["construct", "projective-plane", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(text, std::fs::read_to_string(fixture("pg22.ig")).unwrap());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w2.ig");
    let (code, text) = polylab(&["construct", "w", "--q", "2", "-o", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.starts_with("CHECK construct PASS 15 points, 15 lines, sha256:"));
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(fixture("w2.ig")).unwrap());
    let (code, text) = polylab(&["construct", "t2", "--q", "4"]);
    assert_eq!(code, 0);
    assert_eq!(text, std::fs::read_to_string(fixture("t2_conic4.ig")).unwrap());
}

#[test]
fn construct_usage_errors() {
    assert_eq!(polylab(&["construct", "grid", "--r", "3"]).0, 2);
    assert_eq!(polylab(&["construct", "projective-plane", "--q", "6"]).0, 2);
    assert_eq!(polylab(&["construct", "t2", "--q", "3"]).0, 2);
    assert_eq!(polylab(&["construct", "no-such-family"]).0, 2);
    assert_eq!(polylab(&["frobnicate"]).0, 2);
}

#[test]
fn validate_reports_the_class() {
    let (code, text) = polylab(&["validate", &fixture("h2.ig")]);
    assert_eq!(code, 0);
    assert!(text.contains("6-gon"), "{text}");
    let (code, text) = polylab(&["validate", &fixture("grid34.ig")]);
    assert_eq!(code, 0);
    assert!(text.contains("without order"), "{text}");
    let (code, text) = polylab(&["validate", &fixture("digon33.ig")]);
    assert_eq!(code, 0, "{text}");
    assert_eq!(polylab(&["validate", "/nonexistent/file.ig"]).0, 2);
}

#[test]
fn validate_rejects_non_polygons() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.ig");
    // two lines sharing a point: a tree, not a polygon
    std::fs::write(&path, "ig 1\npoints 3\nlines 2\n0 1\n1 2\n").unwrap();
    let (code, text) = polylab(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 1, "{text}");
    assert!(text.starts_with("CHECK validate FAIL"));
    std::fs::write(&path, "ig 1\npoints 3\nlines 1\n0 7\n").unwrap();
    let (code, text) = polylab(&["validate", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(text.contains("line 4"), "{text}");
}

#[test]
fn epi_search_and_classify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("maps");
    let (code, text) =
        polylab(&["epi", "search", &fixture("pg22.ig"), &fixture("triangle.ig"), "-o", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("CHECK epi.search PASS 126 epimorphism(s)"), "{text}");
    let mut files: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 126);
    assert!(files[0].ends_with("map_000000.igmap"));
    for f in files.iter().step_by(25) {
        let (code, text) = polylab(&["epi", "classify", &fixture("pg22.ig"), f.to_str().unwrap()]);
        assert_eq!(code, 0, "{text}");
        assert!(text.starts_with("CHECK epi.classify PASS GT case"), "{text}");
    }
    let (code, text) = polylab(&["epi", "classify", &fixture("w2.ig"), &fixture("w2_grid22.igmap")]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("JATGQ"));
}

#[test]
fn epi_search_options() {
    let (code, text) =
        polylab(&["epi", "search", &fixture("w2.ig"), &fixture("grid22.ig"), "--up-to-target-auto"]);
    assert_eq!(code, 0);
    assert!(text.contains("PASS 45 epimorphism(s)"), "{text}");
    let (code, text) = polylab(&["epi", "search", &fixture("pg22.ig"), &fixture("triangle.ig"), "--limit", "5"]);
    assert_eq!(code, 1);
    assert!(text.starts_with("CHECK run FAIL"), "{text}");
    let (code, text) = polylab(&["epi", "search", &fixture("w2.ig"), &fixture("grid33.ig")]);
    assert_eq!(code, 0);
    assert!(text.contains("PASS 0 epimorphism(s)"));
}

#[test]
fn classify_rejects_mismatched_maps() {
    // the map was written for PG(2,2), not W(2)
    let (code, _) = polylab(&["epi", "classify", &fixture("w2.ig"), &fixture("pg22_triangle.igmap")]);
    assert_eq!(code, 2);
}

#[test]
fn theorems() {
    let (code, text) = polylab(&["theorem", "gt", &fixture("pg22.ig")]);
    assert_eq!(code, 0, "{text}");
    assert!(text.lines().all(|l| l.starts_with("CHECK ") && l.contains(" PASS")));
    assert!(text.contains("GT.search"));
    let (code, text) = polylab(&["theorem", "jatgq", &fixture("w2.ig")]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("none_onto_grid3x3 PASS"), "{text}");
    assert_eq!(polylab(&["theorem", "gt", &fixture("w2.ig")]).0, 2);
    let (code, text) = polylab(&["thin-theorem", "--m", "4", "--s", "2", "--sp", "1"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("thin4.search_equals_doubled PASS"));
}

#[test]
fn free_run_is_deterministic_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "2", "8"] {
        let out = dir.path().join(format!("free{jobs}"));
        let (code, text) = polylab(&[
            "--jobs",
            jobs,
            "free",
            "run",
            &fixture("grid33.ig"),
            "--stages",
            "100",
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{text}");
        assert!(text.contains("CHECK free.journal PASS 100 step(s), sha256:"));
        let journal = std::fs::read(out.join("journal.txt")).unwrap();
        assert_eq!(String::from_utf8_lossy(&journal).lines().count(), 100);
        assert!(out.join("stage.ig").exists() && out.join("stage.igmap").exists());
        outputs.push((text, journal));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let stage = dir.path().join("free1/stage.ig");
    let (code, text) = polylab(&["validate", stage.to_str().unwrap()]);
    // a finite free stage has no polygon structure yet
    assert_eq!(code, 1, "{text}");
    assert_eq!(polylab(&["free", "run", &fixture("grid22.ig"), "--stages", "3"]).0, 2);
}

#[test]
fn hyperplanes() {
    let (code, text) = polylab(&["hyperplane", "enum", &fixture("w2.ig")]);
    assert_eq!(code, 0);
    assert!(text.contains("31 hyperplane(s): A 6 B 15 C 10"), "{text}");
    let (code, text) = polylab(&["hyperplane", "classify", &fixture("w2.ig"), "--points", "0"]);
    assert_eq!(code, 1);
    assert!(text.contains("not a hyperplane"));
    let (code, _) = polylab(&["hyperplane", "classify", &fixture("w2.ig"), "--points", "99"]);
    assert_eq!(code, 2);
    assert_eq!(polylab(&["hyperplane", "enum", &fixture("pg22.ig")]).0, 2);
}

#[test]
fn output_does_not_depend_on_jobs() {
    for args in [
        vec!["epi", "search", "W", "G", "--up-to-target-auto"],
        vec!["theorem", "jatgq", "W"],
        vec!["hyperplane", "enum", "W"],
    ] {
        let w2 = fixture("w2.ig");
        let g22 = fixture("grid22.ig");
        let base: Vec<&str> = args
            .iter()
            .map(|&a| match a {
                "W" => w2.as_str(),
                "G" => g22.as_str(),
                x => x,
            })
            .collect();
        let one = polylab(&[&["--jobs", "1"][..], &base].concat());
        let many = polylab(&[&["--jobs", "4"][..], &base].concat());
        assert_eq!(one, many, "{args:?}");
    }
}
