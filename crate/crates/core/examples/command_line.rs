//! Driving the command-line front end in-process.
//!
//! ```text
//! cargo run -p foxh --example command_line
//! ```

fn run(args: &[&str]) -> i32 {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = foxh::cli::run(std::iter::once("foxh").chain(args.iter().copied()), &mut out, &mut err);
    print!("$ foxh {}\n{}{}", args.join(" "), String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
    println!("[exit {code}]\n");
    code
}

fn main() -> std::io::Result<()> {
    let dir = std::env::temp_dir().join("foxh-cli-example");
    std::fs::create_dir_all(&dir)?;
    let spec = dir.join("exp.json");
    std::fs::write(&spec, r#"{"m": 0, "n": 1, "upper": [[0, 1]], "lower": []}"#)?;
    let spec = spec.to_string_lossy().into_owned();

    run(&["eval", "h", "--spec", &spec, "--z", "1"]);
    run(&["eval", "ml", "--alpha", "1", "--beta", "1", "--z", "1"]);
    run(&["classify", "--spec", &spec]);
    run(&["transform", "laplace", "--spec", &spec]);
    run(&["list-theorems"]);
    run(&["classify", "--spec", "/nonexistent.json"]);
    Ok(())
}
