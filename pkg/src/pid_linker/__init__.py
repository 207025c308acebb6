"""Turn detected P&ID primitives into merged lines and a symbol connectivity graph."""

__version__ = "0.1.0"

from .config import DedupConfig, MergeConfig, load_config
from .dedup import DedupReport, suppress_duplicates
from .evaluation import GroundTruth, Metrics, batch_evaluate, pairwise_metrics
from .geometry import (
    Orientation,
    Point,
    Segment,
    axial_overlap,
    classify_orientation,
    endpoint_gap,
    point_segment_distance,
    proper_crossing,
    snap_segment,
)
from .graph import (
    Attachment,
    ConnectivityGraph,
    attach_symbols,
    build_graph,
    detect_cycles,
    find_route,
    prune_unattached,
    reachable_set,
)
from .merge import (
    MergedLineMap,
    MergePair,
    PairKind,
    close_merge_relation,
    find_step1_pairs,
    find_step2_pairs,
    merge_pipeline,
)
from .pipeline import Digitization, digitize
from .render import render_svg
from .scene import (
    DetectedSymbol,
    DiagramScene,
    normalize_resolution,
    parse_scene,
    prepare_scene,
    validate_scene,
)
from .synthetic import SynthSpec, difficulty_sweep, generate
