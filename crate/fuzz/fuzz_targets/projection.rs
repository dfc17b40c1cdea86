#![no_main]

use ctxbias::plm::{BiasVector, PlmProjection};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(proj) = PlmProjection::load(data) {
        let zero = BiasVector::zeros(proj.vocab_size());
        let h = proj.apply([&zero, &zero, &zero]).expect("matching shapes");
        assert_eq!(h.len(), proj.dim());
    }
});
