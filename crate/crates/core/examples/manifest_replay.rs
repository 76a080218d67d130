//! Runs the command line in-process, then replays the run from its manifest.

use alphamachine::cli::dispatch;

fn main() {
    let dir = std::env::temp_dir().join("alphactl-example");
    let out = dir.to_str().unwrap();
    let spec = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/shared.net.toml");
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let code = dispatch(
        ["alphactl", "--out-dir", out, "net", "run", "--spec", spec, "--rounds", "400", "--seed", "2"],
        &mut stdout,
        &mut stderr,
    );
    print!("{}{}", String::from_utf8_lossy(&stdout), String::from_utf8_lossy(&stderr));
    println!("exit {code}");

    let manifest = dir.join("net-run.manifest.json");
    let mut stdout = Vec::new();
    let code = dispatch(
        ["alphactl", "replay", "--manifest", manifest.to_str().unwrap(), "--times", "3"],
        &mut stdout,
        &mut stderr,
    );
    print!("{}{}", String::from_utf8_lossy(&stdout), String::from_utf8_lossy(&stderr));
    println!("exit {code}");
}
