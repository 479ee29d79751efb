use quadrics::cli::report::Status;
use quadrics::cli::{execute, main_with, Command, JobSpec, Scenario};

fn job(command: Command, form: &str) -> JobSpec {
    let mut j = JobSpec::new(command);
    j.form = Some(form.to_string());
    j
}

fn run(args: &[&str]) -> i32 {
    main_with(std::iter::once("quadrics").chain(args.iter().copied()))
}

#[test]
fn exit_codes_follow_status() {
    assert_eq!(run(&["analyze", "--form", "field=Fp:5; n=4; q=diag(1,1,1,0)"]), 0);
    assert_eq!(run(&["analyze", "--form", "field=Q; n=2; q=diag(1,y)"]), 2);
    assert_eq!(run(&["reduce", "--form", "field=Q; n=3; q=diag(1,1,-3)"]), 1);
    assert_eq!(run(&["selftest", "--fault-inject", "nonsense"]), 2);
    assert_eq!(run(&["pencil"]), 2);
    assert_eq!(run(&["--help"]), 0);
    assert_eq!(run(&["frobnicate"]), 2);
}

#[test]
fn report_input_block_reproduces_the_job() {
    let mut jobs = vec![
        job(Command::Analyze, "field=Q; n=3; q=diag(1,2,3)"),
        job(Command::Reduce, "field=Fp:3; n=4; q=H(2)"),
        job(Command::Lagrangian, "field=Fp:3; n=4; q=diag(1,1,1,1)"),
    ];
    let mut p = JobSpec::new(Command::Pencil);
    p.scenario = Some(Scenario::Elliptic);
    p.pencil = Some(Scenario::Elliptic.default_pencil().to_string());
    p.budget.height = 7;
    jobs.push(p);
    for j in jobs {
        let first = execute(&j).machine();
        let back = JobSpec::from_report(&first).unwrap();
        assert_eq!(back, j);
        assert_eq!(execute(&back).machine(), first);
    }
}

#[test]
fn parse_errors_point_at_the_problem() {
    let r = execute(&job(Command::Analyze, "field=Q; n=2; q=diag(1,y)"));
    assert_eq!(r.status, Status::Invalid);
    let v: serde_json::Value = serde_json::from_str(&r.machine()).unwrap();
    assert_eq!(v["result"]["position"], "23");
    let r = execute(&job(Command::Analyze, "field=Q; n=3; q=diag(1,2)"));
    assert_eq!(r.status, Status::Invalid);
}

#[test]
fn documented_examples() {
    let r = execute(&job(Command::Analyze, "field=Fp:5; n=4; q=diag(1,1,1,0)"));
    let v: serde_json::Value = serde_json::from_str(&r.machine()).unwrap();
    assert_eq!(v["result"]["radical"]["dim"], "1");
    assert_eq!(v["result"]["even_clifford"]["center_shape"], "dual-numbers");

    let r = execute(&job(Command::Analyze, "field=Q; n=3; q=diag(1,2,3)"));
    let v: serde_json::Value = serde_json::from_str(&r.machine()).unwrap();
    assert_eq!(v["result"]["discriminant"]["value"], "24");

    let r = execute(&job(Command::Analyze, "field=Q; n=4; q=H(2)"));
    let v: serde_json::Value = serde_json::from_str(&r.machine()).unwrap();
    assert_eq!(v["result"]["even_clifford"]["center_split"], true);
}

#[test]
fn form_files_are_expanded() {
    let path = std::env::temp_dir().join(format!("quadrics-form-{}.txt", std::process::id()));
    std::fs::write(&path, "field=Fp:3; n=3; q=diag(1,1,1)\n").unwrap();
    let arg = format!("@{}", path.display());
    assert_eq!(run(&["--format", "machine", "reduce", "--form", &arg]), 0);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(run(&["reduce", "--form", &arg]), 2);
}

#[test]
fn scenarios_run() {
    for s in [Scenario::Elliptic, Scenario::Delpezzo, Scenario::Fourfold] {
        let mut j = JobSpec::new(Command::Pencil);
        j.scenario = Some(s);
        j.pencil = Some(s.default_pencil().to_string());
        assert_eq!(execute(&j).status, Status::Ok, "{s:?}");
    }
}
