// Every example runs as a test.

macro_rules! example {
    ($m:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $m {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $m() {
            $m::run_example().unwrap();
        }
    };
}

example!(hessian_identities, "hessian_identities.rs");
example!(forward_invariants, "forward_invariants.rs");
example!(oracle_check, "oracle_check.rs");
example!(spectrum, "spectrum.rs");
example!(trace_extraction, "trace_extraction.rs");
example!(calibration, "calibration.rs");
example!(inversion, "inversion.rs");
example!(end_to_end, "end_to_end.rs");
