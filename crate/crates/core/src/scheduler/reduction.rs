use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Capacity, PairSpec, QsspInstance, SatelliteSpec, StationSpec, WeightSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThreeDmError {
    #[error("hyperedge {edge} uses {vertex:?}, which is not in V{set}")]
    UnknownVertex { edge: usize, set: u8, vertex: String },
    #[error("hyperedge {0} repeats an earlier hyperedge")]
    DuplicateEdge(usize),
    #[error("duplicate vertex {vertex:?} in V{set}")]
    DuplicateVertex { set: u8, vertex: String },
    #[error("brute force limited to {limit} hyperedges, got {got}")]
    TooLarge { got: usize, limit: usize },
}

/// Tripartite hypergraph. JSON: `{"v1": [..], "v2": [..], "v3": [..], "edges": [[a, b, c], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreeDmInstance {
    pub v1: Vec<String>,
    pub v2: Vec<String>,
    pub v3: Vec<String>,
    pub edges: Vec<(String, String, String)>,
}

impl ThreeDmInstance {
    pub fn validate(&self) -> Result<(), ThreeDmError> {
        let sets = [&self.v1, &self.v2, &self.v3];
        let mut lookup = Vec::new();
        for (s, set) in sets.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for v in set.iter() {
                if !seen.insert(v.as_str()) {
                    return Err(ThreeDmError::DuplicateVertex {
                        set: s as u8 + 1,
                        vertex: v.clone(),
                    });
                }
            }
            lookup.push(seen);
        }
        let mut edges = BTreeSet::new();
        for (e, (a, b, c)) in self.edges.iter().enumerate() {
            for (s, v) in [a, b, c].into_iter().enumerate() {
                if !lookup[s].contains(v.as_str()) {
                    return Err(ThreeDmError::UnknownVertex {
                        edge: e,
                        set: s as u8 + 1,
                        vertex: v.clone(),
                    });
                }
            }
            if !edges.insert((a, b, c)) {
                return Err(ThreeDmError::DuplicateEdge(e));
            }
        }
        Ok(())
    }
}

/// Hyperedge `edge` became the connection `(satellite, pair)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionLink {
    pub edge: usize,
    pub satellite: String,
    pub pair: String,
}

/// Builds the scheduling instance whose optimum equals the maximum 3D matching.
///
/// Each V1 vertex on some hyperedge becomes a satellite, each V2 or V3 vertex
/// on some hyperedge a station, and each `(v2, v3)` combination a pair. Every
/// weight and capacity is 1.
pub fn reduce_3dm_to_qssp(h: &ThreeDmInstance) -> Result<(QsspInstance, Vec<ReductionLink>), ThreeDmError> {
    h.validate()?;
    let mut sats = BTreeSet::new();
    let mut stations = BTreeSet::new();
    let mut pairs = BTreeSet::new();
    let mut weights = Vec::new();
    let mut links = Vec::new();
    for (e, (u, v, w)) in h.edges.iter().enumerate() {
        let sat = format!("v1:{u}");
        let (ga, gb) = (format!("v2:{v}"), format!("v3:{w}"));
        let pair = format!("{ga}|{gb}");
        sats.insert(sat.clone());
        stations.insert(ga.clone());
        stations.insert(gb.clone());
        pairs.insert((pair.clone(), ga, gb));
        weights.push(WeightSpec {
            satellite: sat.clone(),
            pair: pair.clone(),
            weight: 1.0,
        });
        links.push(ReductionLink {
            edge: e,
            satellite: sat,
            pair,
        });
    }
    let inst = QsspInstance::new(
        sats.into_iter().map(|id| SatelliteSpec { id, capacity: 1 }).collect(),
        stations
            .into_iter()
            .map(|id| StationSpec {
                id,
                receivers: Capacity::Finite(1),
            })
            .collect(),
        pairs
            .into_iter()
            .map(|(id, a, b)| PairSpec {
                id,
                a,
                b,
                max_connections: Capacity::Finite(1),
            })
            .collect(),
        weights,
    )
    .expect("reduction output is well formed");
    Ok((inst, links))
}

pub const BRUTE_FORCE_3DM_LIMIT: usize = 20;

/// Largest set of pairwise component-disjoint hyperedges, by subset search.
pub fn brute_force_3dm(h: &ThreeDmInstance) -> Result<usize, ThreeDmError> {
    h.validate()?;
    if h.edges.len() > BRUTE_FORCE_3DM_LIMIT {
        return Err(ThreeDmError::TooLarge {
            got: h.edges.len(),
            limit: BRUTE_FORCE_3DM_LIMIT,
        });
    }
    let n = h.edges.len();
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut used = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
        let disjoint = (0..n).filter(|e| mask >> e & 1 == 1).all(|e| {
            let (a, b, c) = &h.edges[e];
            used[0].insert(a) & used[1].insert(b) & used[2].insert(c)
        });
        if disjoint {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::super::solve_exact;
    use super::*;
    use crate::rng::SplitMix64;

    fn h(edges: &[(&str, &str, &str)]) -> ThreeDmInstance {
        let mut v = [BTreeSet::new(), BTreeSet::new(), BTreeSet::new()];
        for (a, b, c) in edges {
            v[0].insert(a.to_string());
            v[1].insert(b.to_string());
            v[2].insert(c.to_string());
        }
        let [v1, v2, v3] = v.map(|s| s.into_iter().collect());
        ThreeDmInstance {
            v1,
            v2,
            v3,
            edges: edges.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect(),
        }
    }

    #[test]
    fn empty_hypergraph() {
        let g = h(&[]);
        let (inst, links) = reduce_3dm_to_qssp(&g).unwrap();
        assert!(inst.connections().is_empty() && links.is_empty());
        assert_eq!(solve_exact(&inst).unwrap().objective, 0.0);
        assert_eq!(brute_force_3dm(&g).unwrap(), 0);
    }

    #[test]
    fn single_edge() {
        let (inst, links) = reduce_3dm_to_qssp(&h(&[("u", "v", "w")])).unwrap();
        assert_eq!(inst.connections().len(), 1);
        assert_eq!(links[0].satellite, "v1:u");
        assert_eq!(links[0].pair, "v2:v|v3:w");
        assert_eq!(solve_exact(&inst).unwrap().objective, 1.0);
    }

    #[test]
    fn shared_first_vertex() {
        let g = h(&[("u", "v", "w"), ("u", "v2", "w2")]);
        let (inst, _) = reduce_3dm_to_qssp(&g).unwrap();
        assert_eq!(solve_exact(&inst).unwrap().objective, 1.0);
        assert_eq!(brute_force_3dm(&g).unwrap(), 1);
    }

    #[test]
    fn disjoint_edges() {
        let g = h(&[("a", "b", "c"), ("d", "e", "f")]);
        assert_eq!(brute_force_3dm(&g).unwrap(), 2);
    }

    #[test]
    fn same_names_across_parts_stay_distinct() {
        let g = h(&[("x", "x", "x"), ("y", "y", "y")]);
        let (inst, _) = reduce_3dm_to_qssp(&g).unwrap();
        assert_eq!(inst.stations().len(), 4);
        assert_eq!(solve_exact(&inst).unwrap().objective, 2.0);
    }

    #[test]
    fn invalid_hypergraphs() {
        let mut g = h(&[("a", "b", "c")]);
        g.edges.push(("a".into(), "b".into(), "c".into()));
        assert_eq!(g.validate(), Err(ThreeDmError::DuplicateEdge(1)));
        let mut g = h(&[("a", "b", "c")]);
        g.edges[0].2 = "zz".into();
        assert!(matches!(g.validate(), Err(ThreeDmError::UnknownVertex { set: 3, .. })));
        let many: Vec<(String, String, String)> = (0..21).map(|k| (k.to_string(), k.to_string(), k.to_string())).collect();
        let refs: Vec<(&str, &str, &str)> = many.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        assert!(matches!(brute_force_3dm(&h(&refs)), Err(ThreeDmError::TooLarge { .. })));
    }

    #[test]
    fn equivalence_on_random_hypergraphs() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..200 {
            let n: [usize; 3] = [1 + rng.next_index(5), 1 + rng.next_index(5), 1 + rng.next_index(5)];
            let names = |k: usize, p: &str| (0..n[k]).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
            let (v1, v2, v3) = (names(0, "a"), names(1, "b"), names(2, "c"));
            let mut edges = BTreeSet::new();
            for _ in 0..rng.next_index(9) {
                edges.insert((
                    v1[rng.next_index(n[0])].clone(),
                    v2[rng.next_index(n[1])].clone(),
                    v3[rng.next_index(n[2])].clone(),
                ));
            }
            let g = ThreeDmInstance {
                v1,
                v2,
                v3,
                edges: edges.into_iter().collect(),
            };
            let (inst, _) = reduce_3dm_to_qssp(&g).unwrap();
            assert_eq!(solve_exact(&inst).unwrap().objective, brute_force_3dm(&g).unwrap() as f64);
        }
    }

    #[test]
    fn json_shape() {
        let g: ThreeDmInstance = serde_json::from_str(r#"{"v1": ["a"], "v2": ["b"], "v3": ["c"], "edges": [["a", "b", "c"]]}"#).unwrap();
        assert_eq!(g.edges[0], ("a".into(), "b".into(), "c".into()));
    }
}
