//! The built-in catalog of objects, maps and limiting cones, elaborated
//! once from `catalog.weil`.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::algebra::AlgebraHom;
use crate::error::{Error, Result};
use crate::limits::{verify_cone, ConeVerdict, VerifiedLimit};
use crate::object::{InfinitesimalMap, InfinitesimalObject};
use crate::script::{elaborate, parse_script, Environment};

pub const CATALOG_SOURCE: &str = include_str!("catalog.weil");

/// One built-in cone with a human label.
#[derive(Clone, Copy, Debug)]
pub struct CatalogEntry {
    pub cone: &'static str,
    pub label: &'static str,
}

/// Every built-in cone, in the order the suite reports them.
pub const ENTRIES: [CatalogEntry; 10] = [
    CatalogEntry { cone: "tangent_pair_cone", label: "tangent pullback over W_1" },
    CatalogEntry { cone: "square_pair_cone", label: "microsquare pullback over D(2)" },
    CatalogEntry { cone: "square_triple_cone", label: "three microsquares over D(2)" },
    CatalogEntry { cone: "cube_pair1_cone", label: "microcube pullback, axis 1" },
    CatalogEntry { cone: "cube_pair2_cone", label: "microcube pullback, axis 2" },
    CatalogEntry { cone: "cube_pair3_cone", label: "microcube pullback, axis 3" },
    CatalogEntry { cone: "quad1_cone", label: "cube-pair pullback E[1]" },
    CatalogEntry { cone: "quad2_cone", label: "cube-pair pullback E[2]" },
    CatalogEntry { cone: "quad3_cone", label: "cube-pair pullback E[3]" },
    CatalogEntry { cone: "bracket_factor_cone", label: "bracket factorization" },
];

/// The sextuple cone over `G`, kept apart because it is the costly one.
pub const SEXTUPLE: CatalogEntry = CatalogEntry { cone: "sextuple_cone", label: "six microcubes over G" };

pub struct Catalog {
    env: Environment,
    limits: HashMap<String, std::result::Result<VerifiedLimit, Error>>,
    verdicts: HashMap<String, ConeVerdict>,
    homs: HashMap<String, AlgebraHom>,
}

impl Catalog {
    fn build() -> Catalog {
        let script = parse_script(CATALOG_SOURCE).expect("catalog parses");
        let env = elaborate(&script);
        assert!(env.failures.is_empty(), "catalog failures: {:?}", env.failures);
        let mut limits = HashMap::new();
        let mut verdicts = HashMap::new();
        for (name, (diagram, cone)) in &env.cones {
            let d = env.diagram(diagram).expect("cone diagram");
            if let Ok(v) = verify_cone(d, cone) {
                verdicts.insert(name.clone(), v);
            }
            limits.insert(name.clone(), VerifiedLimit::new(d.clone(), cone.clone()));
        }
        let homs = env.maps.iter().map(|(n, m)| (n.clone(), AlgebraHom::induced(m))).collect();
        Catalog { env, limits, verdicts, homs }
    }

    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn object(&self, name: &str) -> &InfinitesimalObject {
        self.env.object_named(name).unwrap_or_else(|| panic!("no catalog object `{name}`"))
    }

    pub fn map(&self, name: &str) -> &InfinitesimalMap {
        self.env.map_named(name).unwrap_or_else(|| panic!("no catalog map `{name}`"))
    }

    /// `W` of a catalog map.
    pub fn hom(&self, name: &str) -> &AlgebraHom {
        self.homs.get(name).unwrap_or_else(|| panic!("no catalog map `{name}`"))
    }

    pub fn limit(&self, cone: &str) -> Result<&VerifiedLimit> {
        match self.limits.get(cone) {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(e.clone()),
            None => Err(Error::MalformedCone(format!("no catalog cone `{cone}`"))),
        }
    }

    pub fn verdict(&self, cone: &str) -> Option<&ConeVerdict> {
        self.verdicts.get(cone)
    }
}

/// The shared catalog, built on first use.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::build)
}
