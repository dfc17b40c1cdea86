#![no_main]

use ctxbias::fstlib::SymbolTable;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = SymbolTable::load(data) {
        let again = SymbolTable::load(table.to_text().as_bytes()).expect("written table parses");
        assert_eq!(again.len(), table.len());
    }
});
