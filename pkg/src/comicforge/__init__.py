"""comicforge: comic-style data narratives from an ensemble of chart specs."""

from .chart_model import (
    ChannelBinding,
    ChartEnsemble,
    ChartSpec,
    Dataset,
    Transformation,
    attribute_set,
    parse_ensemble,
    serialize_ensemble,
)
from .compose import (
    EditCaptionText,
    IncludeCharts,
    ReorderPieces,
    SelectFacts,
    SetParams,
    SetStyle,
    SwapCharts,
    apply_edit,
    compose,
    ranked_facts_for,
)
from .distance import CostTable, diff_specs, distance, distance_matrix
from .document import (
    STYLE_PRESETS,
    ComicDocument,
    EngineParams,
    StoryPiece,
    StyleConfig,
    export_json,
    import_json,
    style_preset,
)
from .facts import DataFact, extract_facts, fact_weight, rank_and_select
from .captions import Caption, plan_stitches, realize, term_context
from .backbone import BackboneShape, StoryBackbone, build_backbone, classify_shape
from .layout import LayoutPattern, StoryOrder, TierLayout, assign_layout, order_pieces
from .partition import Partition, default_threshold, partition
from .render import export_html

__version__ = "0.1.0"

__all__ = [
    "ChannelBinding",
    "ChartEnsemble",
    "ChartSpec",
    "Dataset",
    "Transformation",
    "attribute_set",
    "parse_ensemble",
    "serialize_ensemble",
    "CostTable",
    "diff_specs",
    "distance",
    "distance_matrix",
    "Partition",
    "default_threshold",
    "partition",
    "BackboneShape",
    "StoryBackbone",
    "build_backbone",
    "classify_shape",
    "LayoutPattern",
    "StoryOrder",
    "TierLayout",
    "assign_layout",
    "order_pieces",
    "DataFact",
    "extract_facts",
    "fact_weight",
    "rank_and_select",
    "Caption",
    "plan_stitches",
    "realize",
    "term_context",
    "ComicDocument",
    "EngineParams",
    "StoryPiece",
    "StyleConfig",
    "STYLE_PRESETS",
    "style_preset",
    "export_json",
    "import_json",
    "compose",
    "apply_edit",
    "ranked_facts_for",
    "SwapCharts",
    "ReorderPieces",
    "SelectFacts",
    "EditCaptionText",
    "SetStyle",
    "SetParams",
    "IncludeCharts",
    "export_html",
    "__version__",
]
