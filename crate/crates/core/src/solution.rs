use serde::{Deserialize, Serialize};

pub type Arc = (usize, usize);

/// Where vehicles end their routes. Node 0 is always the start depot and
/// customer `i` (0-based) is node `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepotConvention {
    /// Tours return to node 0.
    Closed,
    /// Routes end at node `|C| + 1`, a copy of the depot.
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutedSolution {
    pub num_customers: usize,
    pub convention: DepotConvention,
    /// One arc list per vehicle.
    pub routes: Vec<Vec<Arc>>,
}

impl RoutedSolution {
    pub fn new(num_customers: usize, convention: DepotConvention) -> Self {
        Self {
            num_customers,
            convention,
            routes: Vec::new(),
        }
    }

    /// Closed solution from node sequences such as `[0, 3, 1, 0]`.
    pub fn from_paths(num_customers: usize, paths: &[Vec<usize>]) -> Self {
        let routes = paths
            .iter()
            .map(|p| p.windows(2).map(|w| (w[0], w[1])).collect())
            .collect();
        Self {
            num_customers,
            convention: DepotConvention::Closed,
            routes,
        }
    }

    pub fn starting_depot(&self) -> usize {
        0
    }

    pub fn ending_depot(&self) -> usize {
        match self.convention {
            DepotConvention::Closed => 0,
            DepotConvention::Open => self.num_customers + 1,
        }
    }

    pub fn is_depot(&self, node: usize) -> bool {
        node == 0 || node == self.ending_depot()
    }

    pub fn num_vehicles(&self) -> usize {
        self.routes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_to_arcs() {
        let s = RoutedSolution::from_paths(3, &[vec![0, 2, 1, 0], vec![0, 3, 0]]);
        assert_eq!(s.routes[0], vec![(0, 2), (2, 1), (1, 0)]);
        assert_eq!(s.num_arcs(), 5);
        assert_eq!(s.ending_depot(), 0);
        let open = RoutedSolution::new(3, DepotConvention::Open);
        assert_eq!(open.ending_depot(), 4);
        assert!(open.is_depot(4));
    }
}
