use clap::Parser;

fn main() {
    // Reports are often piped into pagers or head; die quietly on a
    // closed pipe instead of panicking mid-write.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = relg::cli::Cli::parse();
    std::process::exit(relg::cli::dispatch(cli));
}
