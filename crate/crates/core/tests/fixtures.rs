use std::path::PathBuf;

use rigidity::certify::{certify_universal_rigidity, Path, Verdict};
use rigidity::gale::{gale_matrix, general_position_check};
use rigidity::lateration::{find_lateration_order, purify};
use rigidity::{fixtures, parse_framework, Budget, Framework32, Tolerances};

fn shipped(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn shipped_fixture_files_match_the_library() {
    for (name, text) in fixtures::all_texts() {
        assert_eq!(shipped(name), text, "{name} is stale; regenerate with `rigidity fixtures fixtures`");
    }
}

#[test]
fn fixture_verdicts() {
    let tol = Tolerances::default();
    let budget = Budget::default();
    let expected = [
        ("square.fw", Verdict::NotUniversallyRigid, Path::EquivalentFramework),
        ("counterexample.fw", Verdict::Inconclusive, Path::None),
        ("lateration.fw", Verdict::UniversallyRigid, Path::GeneralPositionStress),
        ("simplex.fw", Verdict::UniversallyRigid, Path::CompleteGraph),
    ];
    for (name, verdict, path) in expected {
        let f = parse_framework(&shipped(name)).unwrap();
        let cert = certify_universal_rigidity(&f, 0, &budget, &tol).unwrap();
        assert_eq!((cert.verdict, cert.path), (verdict, path), "{name}");
        cert.reverify(&f, &tol).unwrap();
    }
}

#[test]
fn single_precision_pipeline_on_the_fixtures() {
    let tol = Tolerances::single_precision();
    let lat: Framework32 = fixtures::lateration().cast();
    let gale = gale_matrix(lat.config(), &tol).unwrap();
    assert_eq!(gale.dim(), 2);
    let order = find_lateration_order(lat.graph(), 2, 1000).unwrap().unwrap();
    let p = purify(&lat, &order, &gale, &tol).unwrap();
    assert!(p.report.psd && p.report.passes);
    assert_eq!(p.report.rank, 2);

    let ce: Framework32 = fixtures::counterexample().cast();
    let gp = general_position_check(ce.config(), &tol);
    assert!(!gp.in_general_position);
    assert_eq!(gp.dependent_subsets, vec![vec![1, 3, 4]]);
}
