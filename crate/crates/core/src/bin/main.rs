use dunkl_spectra::cli;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let code = match cli::RunConfig::parse(&args).and_then(|config| cli::run(&config)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            cli::exit_code(&err)
        }
    };
    std::process::exit(code);
}
