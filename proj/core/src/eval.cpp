#include "landuse/eval.hpp"

#include "landuse/geo.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

namespace landuse::eval {

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

Metrics prf1(const ConfusionMatrix& cm) {
  Metrics m;
  const std::size_t total = cm.total();
  std::size_t trace = 0;
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    const std::size_t tp = cm.counts[c][c];
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t k = 0; k < kNumLandUseClasses; ++k) {
      predicted += cm.counts[k][c];
      actual += cm.counts[c][k];
    }
    auto& pc = m.per_class[c];
    pc.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    pc.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    pc.f1 = f1_score(pc.precision, pc.recall);
    m.macro.precision += pc.precision;
    m.macro.recall += pc.recall;
    m.macro.f1 += pc.f1;
    trace += tp;
  }
  const double n = static_cast<double>(kNumLandUseClasses);
  m.macro.precision /= n;
  m.macro.recall /= n;
  m.macro.f1 /= n;
  m.accuracy = total ? static_cast<double>(trace) / static_cast<double>(total) : 0.0;
  return m;
}

double image_accuracy(const std::map<std::string, LandUseClass>& truth,
                      const std::map<std::string, LandUseClass>& predicted) {
  if (truth.size() != predicted.size())
    throw Error(ErrorCode::IdMismatch,
                fmt::format("{} ground-truth ids vs {} predictions", truth.size(), predicted.size()));
  if (truth.empty()) throw Error(ErrorCode::EmptyInput, "no images to evaluate");
  std::size_t correct = 0;
  auto p = predicted.begin();
  for (const auto& [id, cls] : truth) {
    if (p->first != id) throw Error(ErrorCode::IdMismatch, fmt::format("no prediction for '{}'", id));
    correct += p->second == cls;
    ++p;
  }
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

std::vector<RegionPrediction> region_vote(std::span<const Vote> votes, std::span<const std::string> region_ids) {
  std::vector<RegionPrediction> out(region_ids.size());
  std::unordered_map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < region_ids.size(); ++i) {
    out[i].region_id = region_ids[i];
    slot.emplace(out[i].region_id, i);
  }
  for (const auto& v : votes) {
    auto it = slot.find(v.region_id);
    if (it == slot.end()) it = slot.find(geo::parent_region_id(v.region_id));
    if (it == slot.end()) throw Error(ErrorCode::UnknownRegion, fmt::format("vote for unknown region '{}'", v.region_id));
    auto& rp = out[it->second];
    const auto c = static_cast<std::size_t>(v.predicted);
    ++rp.votes[c];
    rp.score_sums[c] += v.score;
    ++rp.n_images;
  }
  for (auto& rp : out) {
    if (rp.n_images == 0) continue;
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
      if (rp.votes[c] == 0) continue;
      if (!best) {
        best = c;
        continue;
      }
      const auto b = *best;
      const bool wins = rp.votes[c] > rp.votes[b] ||
                        (rp.votes[c] == rp.votes[b] &&
                         (rp.score_sums[c] > rp.score_sums[b] ||
                          (rp.score_sums[c] == rp.score_sums[b] &&
                           to_string(kAllLandUseClasses[c]) < to_string(kAllLandUseClasses[b]))));
      if (wins) best = c;
    }
    rp.label = kAllLandUseClasses[*best];
  }
  return out;
}

RegionAccuracy region_accuracy(std::span<const RegionPrediction> preds,
                               const std::map<std::string, LandUseClass>& truth) {
  RegionAccuracy ra;
  for (const auto& p : preds) {
    if (!p.label) continue;
    auto it = truth.find(p.region_id);
    if (it == truth.end())
      throw Error(ErrorCode::UnknownRegion, fmt::format("no ground truth for region '{}'", p.region_id));
    ++ra.evaluated;
    ra.correct += it->second == *p.label;
  }
  ra.accuracy = ra.evaluated ? static_cast<double>(ra.correct) / static_cast<double>(ra.evaluated)
                             : std::numeric_limits<double>::quiet_NaN();
  return ra;
}

std::string format_percent(double accuracy) {
  if (std::isnan(accuracy)) return "n/a";
  return fmt::format("{:.2f}%", accuracy * 100.0);
}

std::string format_metrics_csv(const Metrics& m) {
  std::string out = "class,precision,recall,f1\n";
  for (std::size_t c = 0; c < kNumLandUseClasses; ++c) {
    const auto& pc = m.per_class[c];
    out += fmt::format("{},{:.4f},{:.4f},{:.4f}\n", to_string(kAllLandUseClasses[c]), pc.precision, pc.recall, pc.f1);
  }
  out += fmt::format("average,{:.4f},{:.4f},{:.4f}\n", m.macro.precision, m.macro.recall, m.macro.f1);
  out += fmt::format("accuracy,{:.4f},,\n", m.accuracy);
  return out;
}

std::string format_region_report(std::span<const RegionPrediction> preds,
                                 const std::map<std::string, LandUseClass>& truth) {
  std::string out = "region_id,true_class,predicted_class,n_images,correct\n";
  for (const auto& p : preds) {
    auto it = truth.find(p.region_id);
    const std::string_view true_name = it == truth.end() ? std::string_view("unknown") : to_string(it->second);
    if (!p.label) {
      out += fmt::format("{},{},unlabeled,{},n/a\n", p.region_id, true_name, p.n_images);
    } else {
      const bool ok = it != truth.end() && it->second == *p.label;
      out += fmt::format("{},{},{},{},{}\n", p.region_id, true_name, to_string(*p.label), p.n_images, ok ? 1 : 0);
    }
  }
  return out;
}

std::vector<RegionReportRow> parse_region_report(std::string_view csv) {
  std::vector<RegionReportRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    auto line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line_no == 1) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 5) throw Error(ErrorCode::Malformed, fmt::format("region report line {}: expected 5 columns", line_no));
    RegionReportRow row{std::string(cells[0]), std::nullopt};
    if (cells[2] != "unlabeled") row.predicted = parse_land_use(cells[2]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace landuse::eval
