//! Frozen outputs. Set `ARCRING_BLESS=1` to rewrite the files under
//! `tests/golden/` after an intended change.

use std::path::PathBuf;

use arcring::arc_ring::ArcRing;
use arcring::bimodule::Bimodule;
use arcring::braid::{differential_matrix, sigma_complex, SigmaComplex};
use arcring::k0::transition_det_at_one;
use arcring::planar::{enumerate_matchings, glue_closed, Endpoint, FlatTangle, PointSeq};
use arcring::{Laurent, LaurentPoly};
use serde_json::{json, Value};

fn golden(name: &str, value: Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = serde_json::to_string_pretty(&value).unwrap() + "\n";
    if std::env::var_os("ARCRING_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "{name} differs from the frozen copy");
}

#[test]
fn ring_tables() {
    for m in 0..=2 {
        let dump = ArcRing::get(m).unwrap().dump();
        golden(&format!("ring_m{m}.json"), serde_json::to_value(dump).unwrap());
    }
}

#[test]
fn ring_graded_dims() {
    let mut out = serde_json::Map::new();
    for m in 1..=3 {
        let d: Laurent = ArcRing::get(m).unwrap().graded_dim();
        out.insert(m.to_string(), json!(d.to_string()));
    }
    assert_eq!(out["1"], json!("q^2 + 1"));
    golden("graded_dims.json", Value::Object(out));
}

/// A flat (2,1)-tangle: bottom 1 runs to top 1, bottom 2 to top 4, a cup
/// joins top 2 and 3, and one free circle.
fn two_one_tangle() -> FlatTangle {
    use Endpoint::*;
    FlatTangle::new(
        PointSeq::standard(2),
        PointSeq::standard(4),
        &[(Bottom(0), Top(0)), (Bottom(1), Top(3)), (Top(1), Top(2))],
        1,
    )
    .unwrap()
}

#[test]
fn two_one_tangle_blocks() {
    let bm = Bimodule::from_tangle(two_one_tangle()).unwrap();
    let mut blocks = Vec::new();
    for b in 0..bm.left_ring().matchings().len() {
        for a in 0..bm.right_ring().matchings().len() {
            let d: LaurentPoly<i64> = bm.graded_dim_block(b, a);
            blocks.push(json!({
                "b": bm.left_ring().matchings()[b],
                "a": bm.right_ring().matchings()[a],
                "circles": bm.circles(b, a),
                "graded_dim": d.to_string(),
            }));
        }
    }
    // the free circle is counted in every block
    assert!(blocks.iter().all(|x| x["circles"].as_u64().unwrap() >= 2));
    golden("two_one_tangle_blocks.json", json!({ "dim": bm.dim(), "blocks": blocks }));
}

/// Determinant by exact fraction elimination, as an independent check.
fn det_fractions(rows: Vec<Vec<i128>>) -> i128 {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let n = rows.len();
    let mut a: Vec<Vec<(i128, i128)>> = rows.into_iter().map(|r| r.into_iter().map(|x| (x, 1)).collect()).collect();
    let norm = |(p, q): (i128, i128)| {
        let g = gcd(p, q).max(1);
        let s = if q < 0 { -1 } else { 1 };
        (s * p / g, s * q / g)
    };
    let mut det = (1i128, 1i128);
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c].0 != 0) else { return 0 };
        if piv != c {
            a.swap(piv, c);
            det.0 = -det.0;
        }
        let (pp, pq) = a[c][c];
        det = norm((det.0 * pp, det.1 * pq));
        for r in c + 1..n {
            let (fp, fq) = norm((a[r][c].0 * pq, a[r][c].1 * pp));
            for k in c..n {
                let (xp, xq) = a[c][k];
                let (yp, yq) = a[r][k];
                a[r][k] = norm((yp * fq * xq - fp * xp * yq, yq * fq * xq));
            }
        }
    }
    assert_eq!(det.1, 1);
    det.0
}

#[test]
fn transition_determinants() {
    let mut out = serde_json::Map::new();
    for m in 0..=4 {
        let ms = enumerate_matchings(m).unwrap();
        let rows = ms.iter().map(|b| ms.iter().map(|a| 1i128 << glue_closed(b, a).unwrap().count).collect()).collect();
        let oracle = det_fractions(rows);
        let got = transition_det_at_one(m).unwrap();
        assert_eq!(got.to_string(), oracle.to_string(), "m={m}");
        out.insert(m.to_string(), json!(got.to_string()));
    }
    assert_eq!(out["1"], json!("2"));
    assert_eq!(out["2"], json!("12"));
    golden("transition_determinants.json", Value::Object(out));
}

#[test]
fn braid_differential_m1() {
    let SigmaComplex::Complex(c) = sigma_complex(1, &"11".parse().unwrap()).unwrap() else { panic!() };
    golden("braid_differential_m1.json", json!(differential_matrix(&c, 0)));
}
