fn main() {
    // Die quietly on a closed pipe (`autoequiv ... | head`) instead of
    // panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(autoequiv::cli::run());
}
