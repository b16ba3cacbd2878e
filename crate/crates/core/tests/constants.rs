mod common;

use common::translate_snippet;
use sumo_tff::check::check_tff_text;

#[test]
fn numeric_constants_get_native_sorts() {
    let t = translate_snippet(
        "consts.kif",
        "(instance N5 PositiveInteger)
         (instance Pi PositiveRealNumber)
         (domain foo 1 Integer)
         (foo N5)
         (=> (greaterThan ?X Pi) (greaterThan ?X 3))",
    );
    let tff = t.to_tff().unwrap();
    assert!(!t.has_errors(), "{:?}", t.diagnostics);
    assert_eq!(t.summary.dropped, 0);
    for want in [
        "s__N5: $int",
        "s__Pi: $real",
        "$greater(s__N5,0)",
        "$greater(s__Pi,0.0)",
        "s__foo(s__N5)",
        "($greater(V__X,s__Pi) => $greater(V__X,3.0))",
    ] {
        assert!(tff.contains(want), "missing {want}:\n{tff}");
    }
    let diags = check_tff_text(&tff, &Default::default()).unwrap();
    assert!(diags.iter().all(|d| !d.is_error()), "{diags:?}");
}
