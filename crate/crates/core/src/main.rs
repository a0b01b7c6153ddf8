use std::ffi::OsString;
use std::io;

fn main() {
    let args: Vec<OsString> = std::env::args_os().collect();
    env_logger::Builder::new()
        .filter_level(mnt_params::cli::log_level(&args))
        .parse_default_env()
        .init();
    let code = mnt_params::cli::run(args, &mut io::stdin().lock(), &mut io::stdout().lock(), &mut io::stderr());
    std::process::exit(code);
}
