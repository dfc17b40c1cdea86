#![no_main]

use ctxbias::biasing::ContactList;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(list) = ContactList::load(data) {
        assert!(list.spellings().count() >= list.len());
    }
});
