#![no_main]

use ctxbias::g2g::{decode_variants, G2GMap};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(map) = G2GMap::load(data) else { return };
    let Ok(text) = std::str::from_utf8(data) else { return };
    for word in text.split_whitespace().take(8) {
        let v = decode_variants(word, &map, 2);
        assert_eq!(v[0], word);
    }
});
