use thdist_core::network::TheoryClass;
use thdist_core::semantics::semantic_profile;
use thdist_core::workbench::{verify_all, verify_each, Catalog, DiskCache, PAPER_EXAMPLES};
use thdist_core::enumerate_models;

fn report_text(cat: &Catalog) -> String {
    serde_json::to_string_pretty(&verify_all(cat, cat.policy.bound).to_json()).unwrap()
}

#[test]
fn reports_are_byte_identical() {
    let a = Catalog::parse(PAPER_EXAMPLES).unwrap();
    let b = Catalog::parse(PAPER_EXAMPLES).unwrap();
    assert_eq!(a.to_json().to_string(), b.to_json().to_string());
    assert_eq!(report_text(&a), report_text(&b));
    for decl in &a.networks {
        let net = a.build_network(&decl.name, None).unwrap();
        assert_eq!(net.to_json().to_string(), b.build_network(&decl.name, None).unwrap().to_json().to_string());
        assert_eq!(net.to_dot(), b.build_network(&decl.name, None).unwrap().to_dot());
        for x in &decl.nodes {
            for y in &decl.nodes {
                let d1 = a.distance(&decl.name, x, y, false).unwrap().to_json().to_string();
                let d2 = b.distance(&decl.name, x, y, false).unwrap().to_json().to_string();
                assert_eq!(d1, d2, "{} {x} {y}", decl.name);
            }
        }
    }
}

#[test]
fn disk_cache_is_transparent() {
    let cat = Catalog::paper_examples();
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::new(dir.path()).unwrap();
    let bound = 3;
    cache.warm(&cat.theories, bound, &cat.policy).unwrap();
    let mut entries = 0;
    for t in &cat.theories {
        for k in 1..=bound {
            if cat.policy.admits(t, k).is_err() {
                continue;
            }
            let stored = cache.load(t, k, &cat.policy).unwrap().expect("warmed entry");
            assert_eq!(*stored, *enumerate_models(t, k, &cat.policy).unwrap(), "{} at size {k}", t.name());
            entries += 1;
        }
        assert_eq!(
            cache.profile(t, bound, &cat.policy).unwrap().to_json(),
            semantic_profile(t, bound, &cat.policy).unwrap().to_json()
        );
    }
    assert!(entries > cat.theories.len());
    // a second cache over the same directory answers from disk
    let again = DiskCache::new(dir.path()).unwrap();
    let class = TheoryClass::new(cat.theories.clone(), cat.certificates.clone(), bound, cat.policy).unwrap();
    let with: Vec<String> = verify_each(&cat.certificates, &class, bound, &cat.policy)
        .into_iter()
        .map(|s| s.unwrap().to_string())
        .collect();
    assert_eq!(again.warm(&cat.theories, bound, &cat.policy).unwrap(), 0, "entries already in memory");
    let fresh = TheoryClass::new(cat.theories.clone(), cat.certificates.clone(), bound, cat.policy).unwrap();
    let without: Vec<String> = verify_each(&cat.certificates, &fresh, bound, &cat.policy)
        .into_iter()
        .map(|s| s.unwrap().to_string())
        .collect();
    assert_eq!(with, without);
}
