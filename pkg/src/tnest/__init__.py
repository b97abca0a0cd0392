"""Temporal color refinement and t-NeSt sampling of temporal networks."""
__version__ = "0.1.0"

from .graph import (GraphError, ParseError, TemporalGraph, TemporalNode, causal_completion,
                    from_contacts, parse_edge_list, read_edge_list, successors, write_edge_list)
from .measures import (CentralityParams, MeasureReport, burstiness, causal_triangles,
                       communicability, edge_persistence, measure_report, sae, temporal_katz,
                       triangles)
from .refinement import ColorAssignment, complete_colors, refine_active, stable_depth
from .sampler import (SamplerConfig, SamplingError, count_rewirings, dss_sample, rc_sample,
                      re_sample, rt_sample, sample, tnest_sample)

__all__ = [
    "GraphError", "ParseError", "TemporalGraph", "TemporalNode", "causal_completion",
    "from_contacts", "parse_edge_list", "read_edge_list", "successors", "write_edge_list",
    "CentralityParams", "MeasureReport", "burstiness", "causal_triangles", "communicability",
    "edge_persistence", "measure_report", "sae", "temporal_katz", "triangles",
    "ColorAssignment", "complete_colors", "refine_active", "stable_depth",
    "SamplerConfig", "SamplingError", "count_rewirings", "dss_sample", "rc_sample",
    "re_sample", "rt_sample", "sample", "tnest_sample",
]
