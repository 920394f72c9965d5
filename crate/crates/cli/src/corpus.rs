//! The built-in example corpus: small sanity graphs with fully known local
//! data plus the four default construction triples, each carrying the
//! values its report must reproduce.

use serde::Serialize;
use symx_core::construction::ParamsJson;
use symx_core::coset_graph::{CosetSpecJson, ExplicitGraphJson};
use symx_core::group_props::invariant_signature;
use symx_core::local_analysis::{AnalysisReport, Conformance, Status};
use symx_core::Perm;

pub enum Source {
    Coset(CosetSpecJson),
    Explicit(ExplicitGraphJson),
    Params(ParamsJson),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConformanceKind {
    Pass,
    Skip,
    Fail,
}

impl ConformanceKind {
    pub fn of(c: &Conformance) -> ConformanceKind {
        match c {
            Conformance::Pass => ConformanceKind::Pass,
            Conformance::Skip(_) => ConformanceKind::Skip,
            Conformance::Fail(_) => ConformanceKind::Fail,
        }
    }
}

/// Expected values for a corpus entry; every populated field becomes one
/// named check against the analysis report.
#[derive(Default)]
pub struct Expected {
    pub valency: Option<usize>,
    pub order_gx: Option<u64>,
    pub order_gx1: Option<u64>,
    pub order_arc_kernel: Option<u64>,
    /// "trivial", a prime as decimal text, or "not a p-group".
    pub arc_kernel_p: Option<&'static str>,
    pub local_action_order: Option<u64>,
    pub local_primitive: Option<bool>,
    pub local_semiprimitive: Option<bool>,
    /// Sizes of proper non-trivial minimal blocks of the local action.
    pub local_block_sizes: Option<Vec<usize>>,
    pub cond_i: Option<Status>,
    pub conformance: Option<ConformanceKind>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl Expected {
    pub fn run_checks(
        &self,
        report: &AnalysisReport,
        local_action: &symx_core::PermGroup,
        enum_bound: u64,
    ) -> Vec<Check> {
        let mut checks = Vec::new();
        let mut push = |name: &'static str, ok: bool, detail: String| {
            checks.push(Check { name, ok, detail });
        };
        if let Some(v) = self.valency {
            push("valency", report.local.valency == v, format!("{} vs {}", report.local.valency, v));
        }
        if let Some(o) = self.order_gx {
            let found = report.local.order_gx.to_string();
            push("order_gx", found == o.to_string(), format!("{found} vs {o}"));
        }
        if let Some(o) = self.order_gx1 {
            let found = report.local.order_kernels.gx1.to_string();
            push("order_gx1", found == o.to_string(), format!("{found} vs {o}"));
        }
        if let Some(o) = self.order_arc_kernel {
            let found = report.local.order_arc_kernel.to_string();
            push("order_arc_kernel", found == o.to_string(), format!("{found} vs {o}"));
        }
        if let Some(p) = self.arc_kernel_p {
            let found = report.local.arc_kernel_p.to_string();
            push("arc_kernel_p", found == p, format!("{found} vs {p}"));
        }
        if let Some(o) = self.local_action_order {
            let found = report.local.local_action_order.to_string();
            push("local_action_order", found == o.to_string(), format!("{found} vs {o}"));
        }
        if let Some(b) = self.local_primitive {
            let found = report.local.local_action_class.primitive;
            push("local_primitive", found == b, format!("{found} vs {b}"));
        }
        if let Some(b) = self.local_semiprimitive {
            let found = report.local.local_action_class.semiprimitive
                == if b { symx_core::group_props::Flag::Yes } else { symx_core::group_props::Flag::No };
            push("local_semiprimitive", found, format!("{:?}", report.local.local_action_class.semiprimitive));
        }
        if let Some(sizes) = &self.local_block_sizes {
            let domain: Vec<usize> = (0..local_action.degree()).collect();
            let found = invariant_signature(local_action, &domain, enum_bound)
                .map(|sig| sig.minimal_block_sizes)
                .unwrap_or_default();
            push("local_block_sizes", &found == sizes, format!("{found:?} vs {sizes:?}"));
        }
        if let Some(status) = self.cond_i {
            let found = report.hypothesis.cond_i.status;
            push("hypothesis_cond_i", found == status, format!("{found:?} vs {status:?}"));
        }
        if let Some(kind) = self.conformance {
            let found = ConformanceKind::of(&report.conformance);
            push("conformance", found == kind, format!("{found:?} vs {kind:?}"));
        }
        checks
    }
}

pub struct CorpusEntry {
    pub name: &'static str,
    pub source: Source,
    pub expected: Expected,
}

fn cycles(texts: &[&str]) -> Vec<String> {
    texts.iter().map(|t| t.to_string()).collect()
}

/// Complete graph K_n as cosets of a point stabiliser in Sym(n), with
/// `a = (0, n-1)`.
fn complete_graph(n: usize) -> CosetSpecJson {
    let group_generators = cycles(&[
        "(0 1)",
        &Perm::from_images((1..n).chain(std::iter::once(0)).collect())
            .unwrap()
            .to_cycle_string(),
    ]);
    let subgroup_generators = if n == 3 {
        cycles(&["(0 1)"])
    } else {
        cycles(&[
            "(0 1)",
            &Perm::from_images(
                (1..n - 1).chain(std::iter::once(0)).chain(std::iter::once(n - 1)).collect(),
            )
            .unwrap()
            .to_cycle_string(),
        ])
    };
    CosetSpecJson {
        degree: n,
        group_generators,
        subgroup_generators,
        a: format!("(0 {})", n - 1),
    }
}

/// Cycle graph C_n with its dihedral group.
fn cycle_graph(n: usize) -> ExplicitGraphJson {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let rotation = Perm::from_images((1..n).chain(std::iter::once(0)).collect()).unwrap();
    let reflection =
        Perm::from_images((0..n).map(|i| (n - i) % n).collect()).unwrap();
    ExplicitGraphJson {
        vertices: n,
        edges,
        aut_generators: vec![rotation.to_cycle_string(), reflection.to_cycle_string()],
    }
}

/// Petersen graph on the 2-subsets of {0..4} with the induced Sym(5).
fn petersen() -> ExplicitGraphJson {
    let pairs: Vec<(usize, usize)> =
        (0..5).flat_map(|a| ((a + 1)..5).map(move |b| (a, b))).collect();
    let index = |a: usize, b: usize| {
        pairs.iter().position(|&(x, y)| (x, y) == (a.min(b), a.max(b))).unwrap()
    };
    let mut edges = Vec::new();
    for i in 0..pairs.len() {
        for j in (i + 1)..pairs.len() {
            let (a, b) = pairs[i];
            let (c, d) = pairs[j];
            if a != c && a != d && b != c && b != d {
                edges.push((i, j));
            }
        }
    }
    let induced = |s: &Perm| -> Perm {
        Perm::from_images(pairs.iter().map(|&(a, b)| index(s.image(a), s.image(b))).collect())
            .unwrap()
    };
    let s5_cycle = Perm::from_images((1..5).chain(std::iter::once(0)).collect()).unwrap();
    let s5_swap = Perm::from_cycle_string(5, "(0 1)").unwrap();
    ExplicitGraphJson {
        vertices: 10,
        edges,
        aut_generators: vec![
            induced(&s5_swap).to_cycle_string(),
            induced(&s5_cycle).to_cycle_string(),
        ],
    }
}

/// The 3-cube on {0..7} (vertices as bit triples) with its full group:
/// a bit flip plus the permutations of the three coordinates.
fn cube_q3() -> ExplicitGraphJson {
    let mut edges = Vec::new();
    for v in 0..8usize {
        for bit in [1usize, 2, 4] {
            let w = v ^ bit;
            if v < w {
                edges.push((v, w));
            }
        }
    }
    let xor1 = Perm::from_images((0..8).map(|v| v ^ 1).collect()).unwrap();
    let swap_bits = |p: usize, q: usize| -> Perm {
        Perm::from_images(
            (0..8usize)
                .map(|v| {
                    let bp = (v >> p) & 1;
                    let bq = (v >> q) & 1;
                    (v & !(1 << p) & !(1 << q)) | (bq << p) | (bp << q)
                })
                .collect(),
        )
        .unwrap()
    };
    ExplicitGraphJson {
        vertices: 8,
        edges,
        aut_generators: vec![
            xor1.to_cycle_string(),
            swap_bits(0, 1).to_cycle_string(),
            swap_bits(1, 2).to_cycle_string(),
        ],
    }
}

fn cyclic_params(r: usize, s: usize, m: usize) -> ParamsJson {
    let cyc = |k: usize| {
        vec![Perm::from_images((1..k).chain(std::iter::once(0)).collect())
            .unwrap()
            .to_cycle_string()]
    };
    ParamsJson {
        r_degree: r,
        r_generators: cyc(r),
        s_degree: s,
        s_generators: cyc(s),
        m,
    }
}

fn s3_c2_params(m: usize) -> ParamsJson {
    ParamsJson {
        r_degree: 3,
        r_generators: cycles(&["(0 1)", "(0 1 2)"]),
        s_degree: 2,
        s_generators: cycles(&["(0 1)"]),
        m,
    }
}

pub fn corpus_build() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry {
            name: "c2c2m3",
            source: Source::Params(cyclic_params(2, 2, 3)),
            expected: Expected {
                valency: Some(4),
                order_gx: Some(128),
                order_gx1: Some(16),
                order_arc_kernel: Some(8),
                arc_kernel_p: Some("2"),
                local_action_order: Some(8),
                local_semiprimitive: Some(false),
                cond_i: Some(Status::Fail),
                conformance: Some(ConformanceKind::Skip),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "c2c2m5",
            source: Source::Params(cyclic_params(2, 2, 5)),
            expected: Expected {
                valency: Some(4),
                order_arc_kernel: Some(128),
                arc_kernel_p: Some("2"),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "c3c3m3",
            source: Source::Params(cyclic_params(3, 3, 3)),
            expected: Expected {
                valency: Some(9),
                order_gx: Some(59_049),
                order_gx1: Some(729),
                order_arc_kernel: Some(81),
                arc_kernel_p: Some("3"),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "c5",
            source: Source::Explicit(cycle_graph(5)),
            expected: Expected {
                valency: Some(2),
                order_gx1: Some(1),
                order_arc_kernel: Some(1),
                arc_kernel_p: Some("trivial"),
                local_semiprimitive: Some(true),
                conformance: Some(ConformanceKind::Pass),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "c6",
            source: Source::Explicit(cycle_graph(6)),
            expected: Expected {
                valency: Some(2),
                order_arc_kernel: Some(1),
                local_semiprimitive: Some(true),
                conformance: Some(ConformanceKind::Pass),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "k4",
            source: Source::Coset(complete_graph(4)),
            expected: Expected {
                valency: Some(3),
                order_gx1: Some(1),
                order_arc_kernel: Some(1),
                arc_kernel_p: Some("trivial"),
                local_primitive: Some(true),
                conformance: Some(ConformanceKind::Pass),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "k5",
            source: Source::Coset(complete_graph(5)),
            expected: Expected {
                valency: Some(4),
                order_gx1: Some(1),
                order_arc_kernel: Some(1),
                arc_kernel_p: Some("trivial"),
                local_primitive: Some(true),
                conformance: Some(ConformanceKind::Pass),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "petersen",
            source: Source::Explicit(petersen()),
            expected: Expected {
                valency: Some(3),
                order_gx1: Some(2),
                order_arc_kernel: Some(1),
                arc_kernel_p: Some("trivial"),
                local_primitive: Some(true),
                conformance: Some(ConformanceKind::Pass),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "q3",
            source: Source::Explicit(cube_q3()),
            expected: Expected {
                valency: Some(3),
                order_gx1: Some(1),
                order_arc_kernel: Some(1),
                local_primitive: Some(true),
                conformance: Some(ConformanceKind::Pass),
                ..Expected::default()
            },
        },
        CorpusEntry {
            name: "s3c2m3",
            source: Source::Params(s3_c2_params(3)),
            expected: Expected {
                valency: Some(6),
                order_gx: Some(186_624),
                order_arc_kernel: Some(216),
                arc_kernel_p: Some("not a p-group"),
                local_action_order: Some(72),
                local_block_sizes: Some(vec![3]),
                cond_i: Some(Status::Fail),
                conformance: Some(ConformanceKind::Skip),
                ..Expected::default()
            },
        },
    ]
}
