from qvfdag.graph.dag import Dag, TopologicalLayers, is_acyclic, layers_of, parents

__all__ = ["Dag", "TopologicalLayers", "is_acyclic", "layers_of", "parents"]
