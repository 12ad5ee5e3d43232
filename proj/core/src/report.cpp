#include "polyforge/report.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polyforge {

namespace {

using nlohmann::json;

json opt_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

json image_to_json(const ImageEval& rec) {
  json j = {{"iou", rec.iou},
            {"b_iou", rec.b_iou},
            {"c_iou", rec.c_iou},
            {"n_ratio", rec.n_ratio},
            {"polis", rec.polis},
            {"s_iou", opt_to_json(rec.s_iou)},
            {"sf", opt_to_json(rec.sf)},
            {"scr", opt_to_json(rec.scr)},
            {"apls", opt_to_json(rec.apls)},
            {"n_pred", rec.n_pred},
            {"n_gt", rec.n_gt},
            {"unmatched_pred", rec.unmatched_pred},
            {"unmatched_truth", rec.unmatched_truth}};
  if (!rec.notes.empty()) j["notes"] = rec.notes;
  return j;
}

void append_csv_value(std::ostringstream& out, double v) { out << "," << v; }

void append_csv_value(std::ostringstream& out, const std::optional<double>& v) {
  out << ",";
  if (v) {
    out << *v;
  } else {
    out << "nan";
  }
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  json images = json::array();
  for (const auto& [name, rec] : report.images) {
    json j = image_to_json(rec);
    j["name"] = name;
    images.push_back(j);
  }
  const AggregateEval agg = report.aggregate();
  json aggregate = {{"iou", agg.iou},
                    {"b_iou", agg.b_iou},
                    {"c_iou", agg.c_iou},
                    {"n_ratio", agg.n_ratio},
                    {"polis", agg.polis},
                    {"s_iou", opt_to_json(agg.s_iou)},
                    {"sf", opt_to_json(agg.sf)},
                    {"scr", opt_to_json(agg.scr)},
                    {"apls", opt_to_json(agg.apls)},
                    {"n_pred", agg.n_pred},
                    {"n_gt", agg.n_gt},
                    {"unmatched_pred", agg.unmatched_pred},
                    {"unmatched_truth", agg.unmatched_truth},
                    {"images", agg.images}};
  json doc = {{"images", images}, {"aggregate", aggregate}};
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "name,iou,b_iou,c_iou,n_ratio,polis,s_iou,sf,scr,apls,n_pred,n_gt\n";
  auto row = [&out](const std::string& name, double iou_v, double b_iou_v, double c_iou_v,
                    double n_ratio_v, double polis_v, const std::optional<double>& s_iou_v,
                    const std::optional<double>& sf_v, const std::optional<double>& scr_v,
                    const std::optional<double>& apls_v, double n_pred_v, double n_gt_v) {
    out << name;
    append_csv_value(out, iou_v);
    append_csv_value(out, b_iou_v);
    append_csv_value(out, c_iou_v);
    append_csv_value(out, n_ratio_v);
    append_csv_value(out, polis_v);
    append_csv_value(out, s_iou_v);
    append_csv_value(out, sf_v);
    append_csv_value(out, scr_v);
    append_csv_value(out, apls_v);
    append_csv_value(out, n_pred_v);
    append_csv_value(out, n_gt_v);
    out << "\n";
  };
  for (const auto& [name, rec] : report.images) {
    row(name, rec.iou, rec.b_iou, rec.c_iou, rec.n_ratio, rec.polis, rec.s_iou, rec.sf, rec.scr,
        rec.apls, static_cast<double>(rec.n_pred), static_cast<double>(rec.n_gt));
  }
  const AggregateEval agg = report.aggregate();
  row("aggregate", agg.iou, agg.b_iou, agg.c_iou, agg.n_ratio, agg.polis, agg.s_iou, agg.sf,
      agg.scr, agg.apls, agg.n_pred, agg.n_gt);
  return out.str();
}

std::string sf_params_to_json(const SfParams& params) {
  json doc = {{"k", params.k}, {"n1", params.n1}, {"n2", params.n2}, {"n3", params.n3}};
  return doc.dump(2) + "\n";
}

SfParams sf_params_from_json(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw std::invalid_argument("invalid SfParams JSON");
  }
  for (const char* key : {"k", "n1", "n2", "n3"}) {
    if (!doc.contains(key) || !doc[key].is_number()) {
      throw std::invalid_argument(std::string("SfParams JSON missing numeric \"") + key + "\"");
    }
  }
  SfParams params{doc["k"].get<double>(), doc["n1"].get<double>(), doc["n2"].get<double>(),
                  doc["n3"].get<double>()};
  params.validate();
  return params;
}

}  // namespace polyforge
