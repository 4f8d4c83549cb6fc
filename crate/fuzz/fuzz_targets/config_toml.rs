#![no_main]

use libfuzzer_sys::fuzz_target;

use darboux_cli::config::Config;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = Config::from_toml(text) {
        assert_eq!(cfg.hash().len(), 64);
    }
});
