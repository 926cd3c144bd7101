use crate::model::{Decision, InstanceSpec, Partition};

use super::{Observation, Policy};

/// The optimal static-threshold benchmark: accept exactly on Φ_H.
#[derive(Debug, Clone)]
pub struct OptimalPolicy {
    partition: Partition,
}

impl OptimalPolicy {
    pub fn new(instance: &InstanceSpec) -> Self {
        Self::from_partition(instance.partition())
    }

    pub fn from_partition(partition: Partition) -> Self {
        Self { partition }
    }
}

impl Policy for OptimalPolicy {
    fn name(&self) -> &str {
        "optimal"
    }

    fn decide(&mut self, bin: usize) -> Decision {
        self.partition.decide(bin)
    }

    fn update(&mut self, _: usize, _: Decision, _: Observation<'_>) {}

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(self.clone())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysOffload;

impl Policy for AlwaysOffload {
    fn name(&self) -> &str {
        "always-offload"
    }

    fn decide(&mut self, _: usize) -> Decision {
        Decision::Offload
    }

    fn update(&mut self, _: usize, _: Decision, _: Observation<'_>) {}

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(*self)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AlwaysAccept;

impl Policy for AlwaysAccept {
    fn name(&self) -> &str {
        "always-accept"
    }

    fn decide(&mut self, _: usize) -> Decision {
        Decision::Accept
    }

    fn update(&mut self, _: usize, _: Decision, _: Observation<'_>) {}

    fn box_clone(&self) -> Box<dyn Policy> {
        Box::new(*self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CostModel;

    #[test]
    fn optimal_follows_partition() {
        let inst = InstanceSpec::uniform(vec![0.3, 0.6, 0.9], CostModel::fixed(0.5).unwrap()).unwrap();
        let mut p = OptimalPolicy::new(&inst);
        assert_eq!(p.decide(0), Decision::Offload);
        assert_eq!(p.decide(1), Decision::Accept);
        assert_eq!(p.decide(2), Decision::Accept);

        let inst = InstanceSpec::uniform(vec![1.0; 4], CostModel::fixed(0.5).unwrap()).unwrap();
        let mut p = OptimalPolicy::new(&inst);
        assert!((0..4).all(|i| p.decide(i) == Decision::Accept));
    }
}
