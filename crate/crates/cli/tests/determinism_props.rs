use std::process::Command;

use proptest::prelude::*;

fn run(args: &[String]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_trace-lab")).args(args).output().unwrap();
    (out.status.code(), out.stdout)
}

/// Cheap randomized invocations, as (global flags, subcommand and its flags).
fn invocation() -> impl Strategy<Value = (u64, bool, Vec<(String, String)>, &'static str)> {
    let ft = (prop::sample::select(vec!["2^1", "3^1", "2^2", "5^1"]), 1u32..=2)
        .prop_map(|(f, l)| ("ft", vec![("field".to_string(), f.to_string()), ("levels".into(), l.to_string())]));
    let witt = (prop::sample::select(vec![2u32, 3]), 1u32..=3)
        .prop_map(|(p, n)| ("witt", vec![("p".to_string(), p.to_string()), ("n".into(), n.to_string())]));
    let local = (prop::sample::select(vec![2u32, 3, 4]), 0u32..=2, 0u32..=2)
        .prop_map(|(q, n, m)| ("localft", vec![("q".to_string(), q.to_string()), ("window".into(), format!("{n},{m}"))]));
    (any::<u64>(), any::<bool>(), prop_oneof![ft, witt, local]).prop_map(|(seed, csv, (cmd, flags))| (seed, csv, flags, cmd))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn same_run_settings_give_the_same_bytes((seed, csv, flags, cmd) in invocation()) {
        let format = if csv { "csv" } else { "json" };
        let mut args = vec!["--seed".to_string(), seed.to_string(), "--format".into(), format.into(), cmd.into()];
        for (k, v) in &flags {
            args.push(format!("--{k}"));
            args.push(v.clone());
        }
        let (code, first) = run(&args);
        prop_assert_eq!(code, Some(0));
        let (_, second) = run(&args);
        prop_assert_eq!(&first, &second);
        let text = String::from_utf8(first.clone()).unwrap();
        prop_assert!(text.contains(&seed.to_string()));

        // the same settings given through a run file
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        let mut body = format!("seed = {seed}\nformat = {format}\n");
        for (k, v) in &flags {
            body.push_str(&format!("{k} = \"{v}\"\n"));
        }
        std::fs::write(&path, body).unwrap();
        let (code, via_file) = run(&["--config".into(), path.to_string_lossy().into_owned(), cmd.into()]);
        prop_assert_eq!(code, Some(0));
        prop_assert_eq!(via_file, first);
    }
}
