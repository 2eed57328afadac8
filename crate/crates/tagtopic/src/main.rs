use std::process::ExitCode;

fn main() -> ExitCode {
    match tagtopic::cli::run(std::env::args_os()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string();
            eprint!("{}", if msg.ends_with('\n') { msg } else { format!("error: {msg}\n") });
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
