"""Multi-level graph embedding.

Fuse node attributes with topology, spectrally coarsen the fused graph, embed
the coarsest graph with any unsupervised kernel, then project and filter the
embeddings back to the original nodes.
"""

from . import _backend as backend
from .coarsening import CoarsenConfig, Hierarchy, MappingOperator, build_hierarchy, coarsen_once
from .embedding import DeepWalkConfig, deepwalk_embed, get_kernel, spectral_embed
from .errors import DegenerateNodeError, ParseError, ValidationError
from .evaluation import EvalReport
from .fusion import FusionConfig, graph_fusion
from .graph import Graph, build_graph, laplacian
from .io import Dataset, SbmSpec, generate_sbm, load_dataset
from .pipeline import PipelineConfig, PipelineError, run_pipeline
from .refinement import FilterConfig, filter_refine, refine_all

__version__ = "0.1.0"

__all__ = [
    "CoarsenConfig", "Dataset", "DeepWalkConfig", "DegenerateNodeError", "EvalReport",
    "FilterConfig", "FusionConfig", "Graph", "Hierarchy", "MappingOperator", "ParseError",
    "PipelineConfig", "PipelineError", "SbmSpec", "ValidationError", "backend",
    "build_graph", "build_hierarchy", "coarsen_once", "deepwalk_embed", "filter_refine",
    "generate_sbm", "get_kernel", "graph_fusion", "laplacian", "load_dataset",
    "refine_all", "run_pipeline", "spectral_embed",
]
