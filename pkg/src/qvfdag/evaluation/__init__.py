from qvfdag.evaluation.aggregate import summarize, summarize_frame
from qvfdag.evaluation.metrics import HmNormalization, Metrics, hm_divisor, structural_metrics

__all__ = ["HmNormalization", "Metrics", "hm_divisor", "structural_metrics", "summarize", "summarize_frame"]
