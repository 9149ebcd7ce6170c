#pragma once

#include <string>

#include "probes/audit.hpp"
#include "probes/sweep.hpp"

namespace egan::probes {

// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_number(double v);

std::string flip_records_csv(const FlipSweepReport& r);
std::string flip_histogram_csv(const FlipSweepReport& r);
std::string flip_summary_json(const FlipSweepReport& r);
std::string flip_histogram_svg(const FlipSweepReport& r);

std::string range_records_csv(const RangeSweepReport& r);
std::string range_histogram_csv(const RangeSweepReport& r);
std::string range_summary_json(const RangeSweepReport& r);
std::string range_histogram_svg(const RangeSweepReport& r);

std::string audit_records_csv(const PrivacyAuditReport& r);
std::string audit_summary_json(const PrivacyAuditReport& r);

}  // namespace egan::probes
