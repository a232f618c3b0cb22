from .normalize import load_synonyms, default_synonyms, normalize_answer
from .scoring import (UnknownTrialError, load_answer_key, build_answer_key,
                      score_freeform, score_response, topk_accuracy)
from .stats import (EXACT_RANKSUM_LIMIT, RankSumResult, AnovaResult,
                    pearson_r, ranksum_test, anova_oneway)
from .reports import (GROUP_FIELDS, ConditionReport, condition_report,
                      correlate_human_model, paired_accuracies,
                      model_records_from_results,
                      human_records_from_responses, summary_table,
                      write_condition_csv, write_summary_csv, format_summary)

__all__ = [
    "load_synonyms", "default_synonyms", "normalize_answer",
    "UnknownTrialError", "load_answer_key", "build_answer_key",
    "score_freeform", "score_response", "topk_accuracy",
    "EXACT_RANKSUM_LIMIT", "RankSumResult", "AnovaResult", "pearson_r",
    "ranksum_test", "anova_oneway", "GROUP_FIELDS", "ConditionReport",
    "condition_report", "correlate_human_model", "paired_accuracies",
    "model_records_from_results", "human_records_from_responses",
    "summary_table", "write_condition_csv", "write_summary_csv",
    "format_summary",
]
