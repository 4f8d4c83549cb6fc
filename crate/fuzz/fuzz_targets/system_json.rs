#![no_main]

use libfuzzer_sys::fuzz_target;

use darboux_core::system::PlanarSystem;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sys) = PlanarSystem::from_json(text) {
        let _ = sys.describe();
        let _ = sys.eval_f64(0.5, -0.25);
    }
});
