#include "probes/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>
#include <vector>

namespace egan::probes {

namespace {

using nlohmann::ordered_json;

const char* orientation_name(FlipOrientation o) {
  switch (o) {
    case FlipOrientation::kLowToHigh: return "low_to_high";
    case FlipOrientation::kHighToLow: return "high_to_low";
    case FlipOrientation::kNone: break;
  }
  return "none";
}

ordered_json config_json(const SweepConfig& c) {
  return {{"n_seeds", c.n_seeds}, {"range_lo", c.range_lo}, {"range_hi", c.range_hi},
          {"step", c.step}, {"seed", c.seed}};
}

ordered_json histogram_json(const Histogram& h) {
  return {{"lo", h.lo}, {"width", h.width}, {"counts", h.counts}};
}

struct Series {
  std::string name;
  const Histogram* hist;
  const char* color;
};

// Grouped bar chart, one group per bin.
std::string bar_chart(const std::string& title, const std::string& x_label,
                      const std::vector<Series>& series) {
  constexpr double kW = 720, kH = 360, kLeft = 60, kRight = 20, kTop = 40, kBottom = 60;
  const std::size_t bins = series.front().hist->counts.size();
  std::size_t peak = 1;
  for (const auto& s : series)
    for (auto c : s.hist->counts) peak = std::max(peak, c);

  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  const double group_w = plot_w / static_cast<double>(bins);
  const double bar_w = group_w * 0.8 / static_cast<double>(series.size());

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_number(kW) << "\" height=\""
    << format_number(kH) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << format_number(kW / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << title << "</text>\n";
  o << "<line x1=\"" << format_number(kLeft) << "\" y1=\"" << format_number(kTop + plot_h) << "\" x2=\""
    << format_number(kLeft + plot_w) << "\" y2=\"" << format_number(kTop + plot_h)
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << format_number(kLeft) << "\" y1=\"" << format_number(kTop) << "\" x2=\""
    << format_number(kLeft) << "\" y2=\"" << format_number(kTop + plot_h) << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << format_number(kLeft - 6) << "\" y=\"" << format_number(kTop + 4)
    << "\" text-anchor=\"end\">" << peak << "</text>\n";
  o << "<text x=\"" << format_number(kLeft - 6) << "\" y=\"" << format_number(kTop + plot_h)
    << "\" text-anchor=\"end\">0</text>\n";

  for (std::size_t b = 0; b < bins; ++b) {
    const double gx = kLeft + group_w * static_cast<double>(b) + group_w * 0.1;
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto c = series[s].hist->counts[b];
      const double h = plot_h * static_cast<double>(c) / static_cast<double>(peak);
      o << "<rect x=\"" << format_number(gx + bar_w * static_cast<double>(s)) << "\" y=\""
        << format_number(kTop + plot_h - h) << "\" width=\"" << format_number(bar_w) << "\" height=\""
        << format_number(h) << "\" fill=\"" << series[s].color << "\"/>\n";
    }
    const std::size_t label_every = bins > 12 ? 2 : 1;
    if (b % label_every == 0) {
      o << "<text x=\"" << format_number(kLeft + group_w * static_cast<double>(b)) << "\" y=\""
        << format_number(kTop + plot_h + 14) << "\" text-anchor=\"middle\">"
        << format_number(series.front().hist->edge(b)) << "</text>\n";
    }
  }
  o << "<text x=\"" << format_number(kLeft + plot_w / 2) << "\" y=\"" << format_number(kH - 22)
    << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double lx = kLeft + 10 + 150 * static_cast<double>(s);
    o << "<rect x=\"" << format_number(lx) << "\" y=\"" << format_number(kH - 14)
      << "\" width=\"10\" height=\"10\" fill=\"" << series[s].color << "\"/>\n";
    o << "<text x=\"" << format_number(lx + 14) << "\" y=\"" << format_number(kH - 5) << "\">"
      << series[s].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string histogram_rows(const std::vector<Series>& series) {
  std::ostringstream o;
  o << "bin_lo,bin_hi";
  for (const auto& s : series) o << ',' << s.name;
  o << '\n';
  const Histogram& h0 = *series.front().hist;
  for (std::size_t b = 0; b < h0.counts.size(); ++b) {
    o << format_number(h0.edge(b)) << ',' << format_number(h0.edge(b + 1));
    for (const auto& s : series) o << ',' << s.hist->counts[b];
    o << '\n';
  }
  return o.str();
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string flip_records_csv(const FlipSweepReport& r) {
  std::ostringstream o;
  o << "seed_index,flip_point,orientation,flip_count\n";
  for (const auto& rec : r.records) {
    o << rec.seed_index << ',' << (rec.flip_point ? format_number(*rec.flip_point) : std::string())
      << ',' << orientation_name(rec.orientation) << ',' << rec.flip_count << '\n';
  }
  return o.str();
}

std::string flip_histogram_csv(const FlipSweepReport& r) {
  return histogram_rows({{"low_to_high", &r.low_to_high, ""}, {"high_to_low", &r.high_to_low, ""}});
}

std::string flip_summary_json(const FlipSweepReport& r) {
  ordered_json j;
  j["kind"] = "flip";
  j["direction"] = r.direction;
  j["config"] = config_json(r.config);
  j["seeds"] = r.records.size();
  j["flipped"] = r.flipped();
  j["flipped_fraction"] = r.flipped_fraction();
  j["low_to_high_fraction"] = r.fraction(FlipOrientation::kLowToHigh);
  j["high_to_low_fraction"] = r.fraction(FlipOrientation::kHighToLow);
  j["multi_flip_seeds"] = r.multi_flip_seeds;
  j["bin_width"] = kFlipBinWidth;
  j["histogram_low_to_high"] = histogram_json(r.low_to_high);
  j["histogram_high_to_low"] = histogram_json(r.high_to_low);
  if (r.multi_flip_seeds > 0) {
    j["warnings"] = {std::to_string(r.multi_flip_seeds) +
                     " seeds changed prediction more than once; only the first flip is reported"};
  } else {
    j["warnings"] = ordered_json::array();
  }
  return j.dump(2) + "\n";
}

std::string flip_histogram_svg(const FlipSweepReport& r) {
  return bar_chart("Flip points along direction " + std::to_string(r.direction), "offset",
                   {{"low to high", &r.low_to_high, "#3b6fb6"}, {"high to low", &r.high_to_low, "#d9822b"}});
}

std::string range_records_csv(const RangeSweepReport& r) {
  std::ostringstream o;
  o << "seed_index,min,max,range\n";
  for (const auto& rec : r.records) {
    o << rec.seed_index << ',' << format_number(rec.min) << ',' << format_number(rec.max) << ','
      << format_number(rec.range) << '\n';
  }
  return o.str();
}

std::string range_histogram_csv(const RangeSweepReport& r) {
  return histogram_rows({{"min", &r.min_hist, ""}, {"max", &r.max_hist, ""}, {"range", &r.range_hist, ""}});
}

std::string range_summary_json(const RangeSweepReport& r) {
  ordered_json j;
  j["kind"] = "range";
  j["direction"] = r.direction;
  j["config"] = config_json(r.config);
  j["seeds"] = r.records.size();
  j["mean_range"] = r.mean_range();
  j["bin_width"] = kRangeBinWidth;
  j["histogram_min"] = histogram_json(r.min_hist);
  j["histogram_max"] = histogram_json(r.max_hist);
  j["histogram_range"] = histogram_json(r.range_hist);
  return j.dump(2) + "\n";
}

std::string range_histogram_svg(const RangeSweepReport& r) {
  return bar_chart("Score min, max and range along direction " + std::to_string(r.direction),
                   "probe score",
                   {{"min", &r.min_hist, "#3b6fb6"}, {"max", &r.max_hist, "#d9822b"},
                    {"range", &r.range_hist, "#4a9b5a"}});
}

std::string audit_records_csv(const PrivacyAuditReport& r) {
  std::ostringstream o;
  o << "index,nearest,max_similarity,nearest_l2,flagged,duplicate\n";
  for (const auto& rec : r.records) {
    o << rec.index << ',' << rec.nearest << ',' << format_number(rec.max_similarity) << ','
      << format_number(rec.nearest_l2) << ',' << (rec.flagged ? 1 : 0) << ',' << (rec.duplicate ? 1 : 0)
      << '\n';
  }
  return o.str();
}

std::string audit_summary_json(const PrivacyAuditReport& r) {
  ordered_json j;
  j["generated"] = r.generated;
  j["threshold"] = r.threshold;
  j["threshold_source"] = r.calibration ? "calibrated" : "fixed";
  if (r.calibration) {
    const auto& c = *r.calibration;
    j["calibration"] = {{"equal_error_rate", c.equal_error_rate},
                        {"false_positive_rate", c.false_positive_rate},
                        {"false_negative_rate", c.false_negative_rate},
                        {"same_pairs", c.same_pairs},
                        {"cross_pairs", c.cross_pairs}};
  }
  j["error_rate_percent"] = r.error_rate;
  j["flagged"] = r.flagged;
  j["duplicates"] = r.duplicates;
  j["duplicate_tolerance"] = kDuplicateTolerance;
  const auto& s = r.nearest_neighbor;
  j["nearest_neighbor_similarity"] = {{"min", s.min}, {"p05", s.p05}, {"p25", s.p25},
                                      {"median", s.median}, {"p75", s.p75}, {"p95", s.p95},
                                      {"max", s.max}, {"mean", s.mean}};
  return j.dump(2) + "\n";
}

}  // namespace egan::probes
