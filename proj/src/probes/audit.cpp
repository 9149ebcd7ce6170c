#include "probes/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "common/error.hpp"
#include "ndmath/rng.hpp"

namespace egan::probes {

namespace {

// Rows scaled to unit length in double; zero rows stay zero.
std::vector<double> unit_rows(const nd::Matrix& x) {
  const std::size_t d = x.cols();
  std::vector<double> out(x.rows() * d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double n2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) n2 += double{x(i, j)} * x(i, j);
    const double inv = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 0.0;
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = x(i, j) * inv;
  }
  return out;
}

double dot_rows(const std::vector<double>& a, std::size_t i, const std::vector<double>& b,
                std::size_t j, std::size_t d) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) s += a[i * d + t] * b[j * d + t];
  return s;
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  require(a.size() == b.size(), ErrorKind::kShape, "cosine_similarity: length mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += double{a[i]} * b[i];
    aa += double{a[i]} * a[i];
    bb += double{b[i]} * b[i];
  }
  if (aa <= 0.0 || bb <= 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

ThresholdCalibration calibrate_threshold(const corpus::EmbeddingCorpus& c) {
  require(c.speakers().has_value(), ErrorKind::kContract,
          "calibrate_threshold: corpus has no speaker labels");
  const auto& spk = *c.speakers();
  std::map<std::uint32_t, std::size_t> counts;
  for (auto s : spk) ++counts[s];
  const auto usable = std::count_if(counts.begin(), counts.end(),
                                    [](const auto& kv) { return kv.second >= 2; });
  require(usable >= 2, ErrorKind::kContract,
          "calibrate_threshold: need at least 2 speakers with at least 2 utterances each");

  const std::size_t n = c.count(), d = c.dim();
  const auto u = unit_rows(c.embeddings());
  std::vector<double> same, cross;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = dot_rows(u, i, u, j, d);
      (spk[i] == spk[j] ? same : cross).push_back(s);
    }
  std::sort(same.begin(), same.end());
  std::sort(cross.begin(), cross.end());

  // Candidate thresholds: midpoints between consecutive distinct scores plus
  // the two outer ends. A pair is accepted when its similarity exceeds t.
  std::vector<double> all;
  all.reserve(same.size() + cross.size());
  std::merge(same.begin(), same.end(), cross.begin(), cross.end(), std::back_inserter(all));
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<double> candidates;
  candidates.reserve(all.size() + 1);
  candidates.push_back(all.front() - 1e-9);
  for (std::size_t i = 0; i + 1 < all.size(); ++i) candidates.push_back(0.5 * (all[i] + all[i + 1]));
  candidates.push_back(all.back() + 1e-9);

  const auto ns = static_cast<double>(same.size()), nc = static_cast<double>(cross.size());
  ThresholdCalibration best;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_sum = best_gap;
  for (double t : candidates) {
    const auto rejected_same = std::upper_bound(same.begin(), same.end(), t) - same.begin();
    const auto accepted_cross = cross.end() - std::upper_bound(cross.begin(), cross.end(), t);
    const double fnr = static_cast<double>(rejected_same) / ns;
    const double fpr = static_cast<double>(accepted_cross) / nc;
    const double gap = std::abs(fpr - fnr), sum = fpr + fnr;
    if (gap < best_gap || (gap == best_gap && sum < best_sum)) {
      best_gap = gap;
      best_sum = sum;
      best.threshold = t;
      best.false_positive_rate = fpr;
      best.false_negative_rate = fnr;
    }
  }
  best.equal_error_rate = 0.5 * (best.false_positive_rate + best.false_negative_rate);
  best.same_pairs = same.size();
  best.cross_pairs = cross.size();
  return best;
}

PrivacyAuditReport audit_embeddings(const nd::Matrix& generated, const corpus::EmbeddingCorpus& train,
                                    const ThresholdPolicy& policy) {
  require(train.count() >= 1, ErrorKind::kContract, "privacy_audit: training corpus is empty");
  require(generated.rows() >= 1, ErrorKind::kContract, "privacy_audit: nothing to audit");
  require(generated.cols() == train.dim(), ErrorKind::kShape,
          "privacy_audit: embedding dimension mismatch");

  PrivacyAuditReport rep;
  rep.generated = generated.rows();
  if (policy.fixed) {
    require(std::isfinite(*policy.fixed), ErrorKind::kContract, "privacy_audit: threshold not finite");
    rep.threshold = *policy.fixed;
  } else {
    rep.calibration = calibrate_threshold(train);
    rep.threshold = rep.calibration->threshold;
  }

  const std::size_t d = train.dim();
  const auto& real = train.embeddings();
  const auto ur = unit_rows(real);
  const auto ug = unit_rows(generated);
  std::vector<double> best_sims;
  best_sims.reserve(rep.generated);
  for (std::size_t i = 0; i < rep.generated; ++i) {
    AuditRecord r;
    r.index = i;
    r.max_similarity = -std::numeric_limits<double>::infinity();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < real.rows(); ++j) {
      const double s = dot_rows(ug, i, ur, j, d);
      if (s > r.max_similarity) {
        r.max_similarity = s;
        r.nearest = j;
      }
      double d2 = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = double{generated(i, t)} - real(j, t);
        d2 += diff * diff;
      }
      best_d2 = std::min(best_d2, d2);
    }
    r.nearest_l2 = std::sqrt(best_d2);
    r.duplicate = r.nearest_l2 <= kDuplicateTolerance;
    r.flagged = r.max_similarity > rep.threshold || r.duplicate;
    rep.flagged += r.flagged;
    rep.duplicates += r.duplicate;
    best_sims.push_back(r.max_similarity);
    rep.records.push_back(r);
  }
  rep.error_rate = 100.0 * static_cast<double>(rep.flagged) / static_cast<double>(rep.generated);

  std::sort(best_sims.begin(), best_sims.end());
  auto& s = rep.nearest_neighbor;
  s.min = best_sims.front();
  s.max = best_sims.back();
  s.p05 = quantile(best_sims, 0.05);
  s.p25 = quantile(best_sims, 0.25);
  s.median = quantile(best_sims, 0.5);
  s.p75 = quantile(best_sims, 0.75);
  s.p95 = quantile(best_sims, 0.95);
  double total = 0.0;
  for (double v : best_sims) total += v;
  s.mean = total / static_cast<double>(best_sims.size());
  return rep;
}

PrivacyAuditReport privacy_audit(const gan::GeneratorParams& g, const corpus::EmbeddingCorpus& train,
                                 std::size_t n_generated, const ThresholdPolicy& policy,
                                 std::uint64_t seed) {
  require(n_generated >= 1, ErrorKind::kContract, "privacy_audit: n_generated must be at least 1");
  require(train.count() >= 1, ErrorKind::kContract, "privacy_audit: training corpus is empty");
  nd::Matrix z(n_generated, g.latent_dim());
  for (std::size_t i = 0; i < n_generated; ++i) {
    auto rng = nd::SeededRng::derive(seed, i);
    const auto l = gan::sample_latent(rng, g.latent_dim());
    std::copy(l.values.begin(), l.values.end(), z.row(i).begin());
  }
  return audit_embeddings(gan::generate_batch(g, z), train, policy);
}

}  // namespace egan::probes
