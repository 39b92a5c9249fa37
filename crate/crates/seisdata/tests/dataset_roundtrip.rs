//! End-to-end dataset pipeline: build, split, persist, reload, corrupt.

use seisdata::{build_dataset, load_batch, load_split, read_manifest, DataError};
use velmodel::GenConfig;

fn small_cfg(seed: u64) -> GenConfig {
    GenConfig::st(seed)
}

#[test]
fn build_split_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_cfg(404);
    let manifest = build_dataset(&cfg, 10, (6, 2, 2), dir.path()).unwrap();

    assert_eq!(manifest.n_train(), 6);
    assert_eq!(manifest.n_val(), 2);
    assert_eq!(manifest.n_test(), 2);

    // splits partition 0..10
    let mut all: Vec<usize> = ["train", "val", "test"]
        .iter()
        .flat_map(|s| manifest.split(s).unwrap().indices.clone())
        .collect();
    all.sort_unstable();
    assert_eq!(all, (0..10).collect::<Vec<_>>());

    // manifest file parses back to the same content
    let parsed = read_manifest(&dir.path().join("manifest.txt")).unwrap();
    assert_eq!(parsed.gen_config, manifest.gen_config);
    assert_eq!(parsed.acquisition, manifest.acquisition);
    assert_eq!(parsed.normalization, manifest.normalization);
    assert_eq!(parsed.shards, manifest.shards);

    // every stored value obeys the (-1, 1) normalization contract
    for split in ["train", "val", "test"] {
        for s in load_split(&parsed, split).unwrap() {
            assert!(s.seismic.iter().all(|x| (-1.0..=1.0).contains(x)));
            assert!(s.label.iter().all(|x| (-1.0..=1.0).contains(x)));
            assert_eq!(s.n_receivers, 32);
            assert_eq!(s.n_time, 1000);
            assert_eq!((s.nz, s.nx), (100, 100));
        }
    }

    // batch loading returns the requested snapshots byte-identically
    let want = manifest.split("val").unwrap().indices.clone();
    let batch = load_batch(&parsed, "val", &want).unwrap();
    let whole = load_split(&parsed, "val").unwrap();
    assert_eq!(batch, whole);

    // out-of-split index is rejected outright
    let bad = load_batch(&parsed, "val", &[want[0], 9999]);
    assert!(matches!(bad, Err(DataError::InvalidArgument(_))));
}

#[test]
fn same_seed_reproduces_shards_bit_for_bit() {
    let cfg = small_cfg(777);
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let ma = build_dataset(&cfg, 6, (4, 1, 1), dir_a.path()).unwrap();
    let mb = build_dataset(&cfg, 6, (4, 1, 1), dir_b.path()).unwrap();

    assert_eq!(ma.normalization, mb.normalization);
    for split in ["train", "val", "test"] {
        let ea = ma.split(split).unwrap();
        let eb = mb.split(split).unwrap();
        assert_eq!(ea.crc32, eb.crc32, "split {split} checksums differ");
        assert_eq!(ea.indices, eb.indices);
        let bytes_a = std::fs::read(ma.shard_path(ea)).unwrap();
        let bytes_b = std::fs::read(mb.shard_path(eb)).unwrap();
        assert_eq!(bytes_a, bytes_b, "split {split} bytes differ");
    }
    // manifests byte-identical too
    let ta = std::fs::read(dir_a.path().join("manifest.txt")).unwrap();
    let tb = std::fs::read(dir_b.path().join("manifest.txt")).unwrap();
    assert_eq!(ta, tb);

    // and a different seed changes the data
    let dir_c = tempfile::tempdir().unwrap();
    let mc = build_dataset(&small_cfg(778), 6, (4, 1, 1), dir_c.path()).unwrap();
    assert_ne!(ma.split("train").unwrap().crc32, mc.split("train").unwrap().crc32);
}

#[test]
fn corrupted_shard_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = build_dataset(&small_cfg(5), 4, (2, 1, 1), dir.path()).unwrap();
    let entry = manifest.split("train").unwrap();
    let path = manifest.shard_path(entry);
    let mut bytes = std::fs::read(&path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    std::fs::write(&path, bytes).unwrap();
    let err = load_split(&manifest, "train").unwrap_err();
    assert!(matches!(err, DataError::Corrupt { .. }), "got {err:?}");
}

#[test]
fn split_sum_must_match_n() {
    let dir = tempfile::tempdir().unwrap();
    let err = build_dataset(&small_cfg(1), 10, (5, 2, 2), dir.path()).unwrap_err();
    assert!(matches!(err, DataError::InvalidArgument(_)));
}
