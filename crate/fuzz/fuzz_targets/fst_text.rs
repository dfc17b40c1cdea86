#![no_main]

use ctxbias::fstlib::{enumerate_language, rmepsilon, PhiExpansion, Wfst};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(fst) = Wfst::from_text(text) else { return };
    let written = fst.to_text();
    let back = Wfst::from_text(&written).expect("written text parses");
    assert_eq!(back.to_text(), written);
    if fst.num_states() <= 16 {
        let a = enumerate_language(&fst, 4, PhiExpansion::Opaque);
        assert_eq!(a, enumerate_language(&back, 4, PhiExpansion::Opaque));
        let _ = rmepsilon(&fst);
    }
});
