mod common;

use common::{int_vec, load, read, CORPUS};
use toricmld::hyperplane::find_hyperplane;
use toricmld::instance::{load_instance, CertificateFile, InstanceFile};
use toricmld::num::rat;
use toricmld::toric::{box_square, lct_pullback, oracle_mld};
use toricmld::Error;

#[test]
fn canonical_serializer_is_byte_identical() {
    for (name, _) in CORPUS {
        let text = read(name);
        let file = InstanceFile::parse(&text).unwrap();
        assert_eq!(file.to_canonical_json(), text, "{name}");
    }
}

#[test]
fn from_parts_reproduces_the_instance() {
    for (name, _) in CORPUS {
        let (_, tc, pair) = load(name);
        let again = InstanceFile::from_parts(&tc, &pair, None).to_canonical_json();
        let (_, tc2, pair2) = load_instance(&again).unwrap();
        assert_eq!((tc, pair), (tc2, pair2), "{name}");
    }
}

#[test]
fn quadrant_over_diagonal_fails_support() {
    let text = read("a2_identity.json").replace("\"pi\": [[1, 0], [0, 1]]", "\"pi\": [[1, 1]]");
    let err = load_instance(&text).unwrap_err();
    assert!(err.to_string().contains("support condition"), "{err}");
}

#[test]
fn coefficient_above_one_rejected_at_parse() {
    let text = read("a2_identity.json").replace("\"B\": {}", "\"B\": {\"1\": \"3/2\"}");
    assert!(matches!(InstanceFile::parse(&text), Err(Error::Parse { .. })));
}

#[test]
fn oracle_points() {
    let (_, tc, pair) = load("a2_identity.json");
    let bd = box_square(&tc, &pair).unwrap();
    assert_eq!(oracle_mld(&tc, &bd, 3).unwrap(), Some((rat(2, 1), int_vec(&[1, 1]))));
    assert_eq!(lct_pullback(&tc, &bd, &int_vec(&[1, 0])).unwrap(), rat(1, 1));

    let (_, tc, pair) = load("halfplane.json");
    let bd = box_square(&tc, &pair).unwrap();
    assert_eq!(oracle_mld(&tc, &bd, 3).unwrap(), Some((rat(1, 1), int_vec(&[0, 1]))));
}

#[test]
fn hand_traced_certificates() {
    let (_, tc, pair) = load("a2_identity.json");
    let c = find_hyperplane(&tc, &pair).unwrap();
    assert_eq!((c.phi_bar, c.gamma), (int_vec(&[1, 0]), rat(1, 1)));

    let (_, tc, pair) = load("halfplane.json");
    let c = find_hyperplane(&tc, &pair).unwrap();
    assert_eq!((c.phi_bar.clone(), c.gamma.clone()), (int_vec(&[1]), rat(1, 1)));
    assert_eq!(c.transcript[0].phi, int_vec(&[1, 1]));

    let file = CertificateFile::from_certificate(&c);
    let back = CertificateFile::parse(&file.to_json()).unwrap();
    assert_eq!(back, file);
}
