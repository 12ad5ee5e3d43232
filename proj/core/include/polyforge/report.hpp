#pragma once

#include <string>

#include "polyforge/metrics.hpp"

namespace polyforge {

/// JSON report: {"images": [...], "aggregate": {...}} with the exact
/// field names iou, b_iou, c_iou, n_ratio, polis, s_iou, sf, scr, apls,
/// n_pred, n_gt. Undefined optional metrics serialize as null.
std::string report_to_json(const EvalReport& report);

/// CSV report: one row per image plus a final "aggregate" row; undefined
/// metrics print as nan.
std::string report_to_csv(const EvalReport& report);

/// SfParams as JSON {"k": ..., "n1": ..., "n2": ..., "n3": ...}.
std::string sf_params_to_json(const SfParams& params);
SfParams sf_params_from_json(const std::string& text);

}  // namespace polyforge
