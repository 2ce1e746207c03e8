"""Classification and statistical evaluation of food-safety regulation provisions.

Thin Python surface over the C++ core: taxonomy queries, segmentation,
keyword classification, prompt round-trips and the statistics toolbox.
"""

try:  # installed layout: the extension lives inside the package
    from . import _provclass as _core
except ImportError:  # build-tree layout: extension directory on PYTHONPATH
    import _provclass as _core

BackendError = _core.BackendError
IoError = _core.IoError
ParseError = _core.ParseError
ValidationError = _core.ValidationError

classify_keywords = _core.classify_keywords
close_labels = _core.close_labels
cohen_kappa = _core.cohen_kappa
detect_list_items = _core.detect_list_items
load_corpus = _core.load_corpus
make_annotation_batches = _core.make_annotation_batches
mock_classify = _core.mock_classify
parse_model_output = _core.parse_model_output
precision_recall_f1 = _core.precision_recall_f1
registry = _core.registry
render_labelled_sentences = _core.render_labelled_sentences
segment = _core.segment
split_sentences = _core.split_sentences
summarize_runs = _core.summarize_runs
vargha_delaney_a12 = _core.vargha_delaney_a12
wilcoxon_rank_sum = _core.wilcoxon_rank_sum

__all__ = [
    "BackendError",
    "IoError",
    "ParseError",
    "ValidationError",
    "classify_keywords",
    "close_labels",
    "cohen_kappa",
    "detect_list_items",
    "load_corpus",
    "make_annotation_batches",
    "mock_classify",
    "parse_model_output",
    "precision_recall_f1",
    "registry",
    "render_labelled_sentences",
    "segment",
    "split_sentences",
    "summarize_runs",
    "vargha_delaney_a12",
    "wilcoxon_rank_sum",
]

__version__ = "0.1.0"
