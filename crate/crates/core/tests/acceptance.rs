use std::process::ExitCode;
use std::time::Instant;

use hardy_core::identities::EvalConfig;
use hardy_core::suite::run_all;

fn main() -> ExitCode {
    let start = Instant::now();
    let outcomes = run_all(&EvalConfig::default(), 7);
    for o in &outcomes {
        println!("{}", o.line());
        for f in o.failures.iter().take(5) {
            println!("    {f}");
        }
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!(
        "acceptance: {passed}/{} criteria passed in {:.1}s",
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if passed == outcomes.len() && outcomes.len() == 8 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
