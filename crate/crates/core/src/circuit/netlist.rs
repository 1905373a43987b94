use std::collections::HashMap;

use crate::error::{Error, Result};

/// Index into a netlist's node table; `GROUND` is the reference node.
pub type NodeId = usize;

pub const GROUND: NodeId = 0;

#[derive(Debug, Clone, PartialEq)]
pub enum ElementKind {
    Resistor {
        a: NodeId,
        b: NodeId,
        r: f64,
    },
    Capacitor {
        a: NodeId,
        b: NodeId,
        c: f64,
    },
    Inductor {
        a: NodeId,
        b: NodeId,
        l: f64,
    },
    /// Magnetically coupled pair; branch `a` runs `a.0 -> a.1`, branch `b`
    /// runs `b.0 -> b.1`, dots on the first terminal of each.
    CoupledInductors {
        a: (NodeId, NodeId),
        b: (NodeId, NodeId),
        la: f64,
        lb: f64,
        m: f64,
    },
    /// Ideal lossless line between `a` and `b`, both referenced to ground.
    /// Electrical length is `theta_ref` radians at `f_ref` and scales
    /// linearly with frequency.
    TransmissionLine {
        a: NodeId,
        b: NodeId,
        z: f64,
        theta_ref: f64,
        f_ref: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub name: String,
    pub kind: ElementKind,
}

impl Element {
    pub fn terminals(&self) -> Vec<NodeId> {
        match self.kind {
            ElementKind::Resistor { a, b, .. }
            | ElementKind::Capacitor { a, b, .. }
            | ElementKind::Inductor { a, b, .. } => vec![a, b],
            ElementKind::TransmissionLine { a, b, .. } => vec![a, b, GROUND],
            ElementKind::CoupledInductors { a, b, .. } => vec![a.0, a.1, b.0, b.1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Port {
    pub node: NodeId,
    pub z_ref: f64,
}

/// Immutable two-port circuit description.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    nodes: Vec<String>,
    elements: Vec<Element>,
    ports: [Port; 2],
}

impl Netlist {
    pub fn builder() -> NetlistBuilder {
        NetlistBuilder::new()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn element(&self, name: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.name == name)
    }

    pub fn ports(&self) -> &[Port; 2] {
        &self.ports
    }

    pub fn z_ref(&self) -> f64 {
        self.ports[0].z_ref
    }

    /// True when no element dissipates power.
    pub fn is_lossless(&self) -> bool {
        !self
            .elements
            .iter()
            .any(|e| matches!(e.kind, ElementKind::Resistor { .. }))
    }
}

/// Incremental netlist construction by node name. `"0"` and `"gnd"` both
/// name the ground node.
#[derive(Debug, Clone, Default)]
pub struct NetlistBuilder {
    nodes: Vec<String>,
    index: HashMap<String, NodeId>,
    elements: Vec<Element>,
    ports: Vec<Port>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        let mut b = Self::default();
        b.nodes.push("0".into());
        b.index.insert("0".into(), GROUND);
        b.index.insert("gnd".into(), GROUND);
        b
    }

    pub fn node(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    fn push(&mut self, name: &str, kind: ElementKind) -> &mut Self {
        self.elements.push(Element {
            name: name.to_owned(),
            kind,
        });
        self
    }

    pub fn resistor(&mut self, name: &str, a: &str, b: &str, r: f64) -> &mut Self {
        let (a, b) = (self.node(a), self.node(b));
        self.push(name, ElementKind::Resistor { a, b, r })
    }

    pub fn capacitor(&mut self, name: &str, a: &str, b: &str, c: f64) -> &mut Self {
        let (a, b) = (self.node(a), self.node(b));
        self.push(name, ElementKind::Capacitor { a, b, c })
    }

    pub fn inductor(&mut self, name: &str, a: &str, b: &str, l: f64) -> &mut Self {
        let (a, b) = (self.node(a), self.node(b));
        self.push(name, ElementKind::Inductor { a, b, l })
    }

    /// Capacitor with an optional series resistance; a nonzero `r` inserts an
    /// internal node named `<name>.rs`.
    pub fn lossy_capacitor(&mut self, name: &str, a: &str, b: &str, c: f64, r: f64) -> &mut Self {
        if r > 0.0 {
            let mid = format!("{name}.rs");
            self.resistor(&format!("{name}.R"), a, &mid, r);
            self.capacitor(name, &mid, b, c)
        } else {
            self.capacitor(name, a, b, c)
        }
    }

    /// Inductor with an optional series resistance, as for [`Self::lossy_capacitor`].
    pub fn lossy_inductor(&mut self, name: &str, a: &str, b: &str, l: f64, r: f64) -> &mut Self {
        if r > 0.0 {
            let mid = format!("{name}.rs");
            self.resistor(&format!("{name}.R"), a, &mid, r);
            self.inductor(name, &mid, b, l)
        } else {
            self.inductor(name, a, b, l)
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn coupled_inductors(
        &mut self,
        name: &str,
        a: (&str, &str),
        b: (&str, &str),
        la: f64,
        lb: f64,
        m: f64,
    ) -> &mut Self {
        let a = (self.node(a.0), self.node(a.1));
        let b = (self.node(b.0), self.node(b.1));
        self.push(name, ElementKind::CoupledInductors { a, b, la, lb, m })
    }

    pub fn line(
        &mut self,
        name: &str,
        a: &str,
        b: &str,
        z: f64,
        theta_ref: f64,
        f_ref: f64,
    ) -> &mut Self {
        let (a, b) = (self.node(a), self.node(b));
        self.push(
            name,
            ElementKind::TransmissionLine {
                a,
                b,
                z,
                theta_ref,
                f_ref,
            },
        )
    }

    pub fn port(&mut self, node: &str, z_ref: f64) -> &mut Self {
        let node = self.node(node);
        self.ports.push(Port { node, z_ref });
        self
    }

    pub fn build(&self) -> Result<Netlist> {
        let invalid = |msg: String| Err(Error::InvalidNetlist(msg));
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let mut names = std::collections::HashSet::new();
        for e in &self.elements {
            if !names.insert(e.name.as_str()) {
                return invalid(format!("duplicate element name `{}`", e.name));
            }
            let ok = match e.kind {
                ElementKind::Resistor { a, b, r } => a != b && positive(r),
                ElementKind::Capacitor { a, b, c } => a != b && positive(c),
                ElementKind::Inductor { a, b, l } => a != b && positive(l),
                ElementKind::CoupledInductors { a, b, la, lb, m } => {
                    if !(positive(la) && positive(lb) && m.is_finite()) || a.0 == a.1 || b.0 == b.1
                    {
                        false
                    } else if m.abs() >= (la * lb).sqrt() {
                        return invalid(format!(
                            "`{}`: |M| = {} must stay below sqrt(La*Lb) = {}",
                            e.name,
                            m.abs(),
                            (la * lb).sqrt()
                        ));
                    } else {
                        true
                    }
                }
                ElementKind::TransmissionLine {
                    a,
                    b,
                    z,
                    theta_ref,
                    f_ref,
                } => {
                    a != b
                        && a != GROUND
                        && b != GROUND
                        && positive(z)
                        && positive(theta_ref)
                        && positive(f_ref)
                }
            };
            if !ok {
                return invalid(format!(
                    "element `{}` has invalid terminals or values",
                    e.name
                ));
            }
        }
        if self.ports.len() != 2 {
            return invalid(format!(
                "exactly two ports required, found {}",
                self.ports.len()
            ));
        }
        let (p1, p2) = (self.ports[0], self.ports[1]);
        if p1.node == GROUND || p2.node == GROUND || p1.node == p2.node {
            return invalid("ports must sit on two distinct non-ground nodes".into());
        }
        if !positive(p1.z_ref) || p1.z_ref != p2.z_ref {
            return invalid(format!(
                "both ports need the same positive reference impedance ({} vs {})",
                p1.z_ref, p2.z_ref
            ));
        }
        self.check_connectivity()?;
        Ok(Netlist {
            nodes: self.nodes.clone(),
            elements: self.elements.clone(),
            ports: [p1, p2],
        })
    }

    fn check_connectivity(&self) -> Result<()> {
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.elements {
            let t = e.terminals();
            let root = find(&mut parent, t[0]);
            for &n in &t[1..] {
                let r = find(&mut parent, n);
                parent[r] = root;
            }
        }
        // port terminations reach ground through z_ref
        for p in &self.ports {
            let r = find(&mut parent, p.node);
            let g = find(&mut parent, GROUND);
            parent[r] = g;
        }
        let ground = find(&mut parent, GROUND);
        for id in 1..self.nodes.len() {
            if find(&mut parent, id) != ground {
                return Err(Error::FloatingNode(self.nodes[id].clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_aliases() {
        let mut b = NetlistBuilder::new();
        assert_eq!(b.node("gnd"), GROUND);
        assert_eq!(b.node("0"), GROUND);
        assert_eq!(b.node("A"), 1);
        assert_eq!(b.node("A"), 1);
    }

    #[test]
    fn needs_two_ports() {
        let mut b = NetlistBuilder::new();
        b.resistor("R1", "A", "B", 50.0)
            .resistor("R2", "B", "0", 50.0)
            .port("A", 50.0);
        assert!(matches!(b.build(), Err(Error::InvalidNetlist(_))));
    }

    #[test]
    fn floating_node_is_named() {
        let mut b = NetlistBuilder::new();
        b.resistor("R1", "A", "0", 50.0)
            .resistor("R2", "B", "0", 50.0)
            .capacitor("C1", "island", "island2", 1e-12)
            .port("A", 50.0)
            .port("B", 50.0);
        match b.build() {
            Err(Error::FloatingNode(n)) => assert_eq!(n, "island"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_overcoupled_pair() {
        let mut b = NetlistBuilder::new();
        b.coupled_inductors("K", ("A", "0"), ("B", "0"), 1e-9, 1e-9, 1e-9)
            .port("A", 50.0)
            .port("B", 50.0);
        assert!(matches!(b.build(), Err(Error::InvalidNetlist(_))));
    }

    #[test]
    fn rejects_bad_values_and_duplicates() {
        let mut b = NetlistBuilder::new();
        b.resistor("R", "A", "B", -1.0)
            .port("A", 50.0)
            .port("B", 50.0);
        assert!(b.build().is_err());
        let mut b = NetlistBuilder::new();
        b.resistor("R", "A", "B", 1.0)
            .resistor("R", "B", "0", 1.0)
            .port("A", 50.0)
            .port("B", 50.0);
        assert!(b.build().is_err());
        let mut b = NetlistBuilder::new();
        b.resistor("R", "A", "B", 1.0)
            .port("A", 50.0)
            .port("B", 75.0);
        assert!(b.build().is_err());
    }

    #[test]
    fn lossy_helpers_insert_internal_nodes() {
        let mut b = NetlistBuilder::new();
        b.lossy_capacitor("Ca", "A", "B", 1e-12, 1.5)
            .lossy_capacitor("Cb", "A", "0", 1e-12, 0.0)
            .port("A", 50.0)
            .port("B", 50.0);
        let n = b.build().unwrap();
        assert!(n.node_id("Ca.rs").is_some());
        assert!(n.node_id("Cb.rs").is_none());
        assert!(!n.is_lossless());
    }
}
