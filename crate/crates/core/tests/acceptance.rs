use std::process::ExitCode;

use topent_core::acceptance::run_all;

fn main() -> ExitCode {
    let results = run_all();
    for r in &results {
        println!("{}", r.line());
        for d in &r.details {
            println!("      {d}");
        }
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
