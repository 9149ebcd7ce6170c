#include "probes/probe.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "common/error.hpp"
#include "ndmath/linalg.hpp"
#include "ndmath/rng.hpp"

namespace egan::probes {

namespace {

using nlohmann::json;

double dot(std::span<const double> w, std::span<const float> e) {
  require(w.size() == e.size(), ErrorKind::kShape,
          "probe expects " + std::to_string(w.size()) + "-dim embeddings, got " +
              std::to_string(e.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * e[i];
  return s;
}

double sigmoid(double t) {
  // Kept strictly inside (0, 1).
  const double s = 1.0 / (1.0 + std::exp(-std::clamp(t, -36.0, 36.0)));
  return s;
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldout;
};

Split split_rows(std::size_t n, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction < 1.0, ErrorKind::kContract,
          "held-out fraction must lie in (0, 1)");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  nd::SeededRng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_index(i)]);
  const auto h = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n))), 1, n - 1);
  Split s;
  s.heldout.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(h), idx.end());
  std::sort(s.heldout.begin(), s.heldout.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

json meta_json(const ProbeMetadata& m) {
  return {{"attribute", m.attribute},
          {"corpus_fingerprint", m.corpus_fingerprint},
          {"heldout_accuracy", m.heldout_accuracy},
          {"heldout_r2", m.heldout_r2},
          {"train_count", m.train_count},
          {"heldout_count", m.heldout_count}};
}

ProbeMetadata meta_from(const json& j) {
  ProbeMetadata m;
  m.attribute = j.at("attribute").get<std::string>();
  m.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
  m.heldout_accuracy = j.at("heldout_accuracy").get<double>();
  m.heldout_r2 = j.at("heldout_r2").get<double>();
  m.train_count = j.at("train_count").get<std::size_t>();
  m.heldout_count = j.at("heldout_count").get<std::size_t>();
  return m;
}

template <typename Probe>
std::string probe_json(const Probe& p, const char* kind) {
  json j = {{"kind", kind}, {"weights", p.weights}, {"bias", p.bias}, {"meta", meta_json(p.meta)}};
  return j.dump(2) + "\n";
}

template <typename Probe>
Probe probe_from(const std::string& text, const char* kind) {
  try {
    const json j = json::parse(text);
    if (j.at("kind").get<std::string>() != kind)
      fail(ErrorKind::kFormat, std::string("probe file is not a ") + kind + " probe");
    Probe p;
    p.weights = j.at("weights").get<std::vector<double>>();
    p.bias = j.at("bias").get<double>();
    p.meta = meta_from(j.at("meta"));
    for (double w : p.weights)
      if (!std::isfinite(w)) fail(ErrorKind::kFormat, "probe weight not finite");
    return p;
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed probe file: ") + e.what());
  }
}

}  // namespace

double BinaryProbe::logit(std::span<const float> e) const { return dot(weights, e) + bias; }
double BinaryProbe::score(std::span<const float> e) const { return sigmoid(logit(e)); }

double ScalarProbe::linear(std::span<const float> e) const { return dot(weights, e) + bias; }
double ScalarProbe::score(std::span<const float> e) const { return std::clamp(linear(e), 0.0, 1.0); }

BinaryProbe fit_binary_probe(const nd::Matrix& x, std::span<const float> labels,
                             const ProbeFitOptions& opts) {
  const std::size_t n = x.rows(), d = x.cols();
  require(labels.size() == n, ErrorKind::kShape, "fit_binary_probe: label count mismatch");
  require(n >= 20, ErrorKind::kContract, "fit_binary_probe: need at least 20 labelled rows");
  const auto ones = std::count(labels.begin(), labels.end(), 1.0f);
  require(ones > 0 && static_cast<std::size_t>(ones) < n, ErrorKind::kContract,
          "fit_binary_probe: both classes must be present");
  const Split split = split_rows(n, opts.heldout_fraction, opts.seed);

  std::vector<double> mu(d, 0.0), sd(d, 0.0);
  for (auto i : split.train)
    for (std::size_t j = 0; j < d; ++j) mu[j] += x(i, j);
  for (auto& m : mu) m /= static_cast<double>(split.train.size());
  for (auto i : split.train)
    for (std::size_t j = 0; j < d; ++j) sd[j] += (x(i, j) - mu[j]) * (x(i, j) - mu[j]);
  for (auto& s : sd) {
    s = std::sqrt(s / static_cast<double>(split.train.size()));
    if (!(s > 0.0)) s = 1.0;
  }

  const std::size_t m = split.train.size();
  std::vector<double> xs(m * d), ys(m);
  for (std::size_t r = 0; r < m; ++r) {
    const auto i = split.train[r];
    for (std::size_t j = 0; j < d; ++j) xs[r * d + j] = (x(i, j) - mu[j]) / sd[j];
    ys[r] = labels[i];
  }

  std::vector<double> w(d, 0.0), gw(d);
  double b = 0.0;
  for (std::size_t it = 0; it < opts.iterations; ++it) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      double t = b;
      for (std::size_t j = 0; j < d; ++j) t += w[j] * xs[r * d + j];
      const double err = sigmoid(t) - ys[r];
      gb += err;
      for (std::size_t j = 0; j < d; ++j) gw[j] += err * xs[r * d + j];
    }
    for (std::size_t j = 0; j < d; ++j)
      w[j] -= opts.learning_rate * (gw[j] / static_cast<double>(m) + opts.l2 * w[j]);
    b -= opts.learning_rate * gb / static_cast<double>(m);
  }

  BinaryProbe p;
  p.weights.resize(d);
  p.bias = b;
  for (std::size_t j = 0; j < d; ++j) {
    p.weights[j] = w[j] / sd[j];
    p.bias -= w[j] * mu[j] / sd[j];
  }
  std::size_t correct = 0;
  for (auto i : split.heldout)
    if (p.predict(x.row(i)) == (labels[i] > 0.5f)) ++correct;
  p.meta.heldout_accuracy = static_cast<double>(correct) / static_cast<double>(split.heldout.size());
  p.meta.train_count = split.train.size();
  p.meta.heldout_count = split.heldout.size();
  return p;
}

BinaryProbe fit_binary_probe(const corpus::EmbeddingCorpus& c, const std::string& attribute,
                             const ProbeFitOptions& opts) {
  const auto& col = c.attribute(attribute);
  require(col.kind == corpus::AttributeKind::kBinary, ErrorKind::kContract,
          "attribute '" + attribute + "' is not binary");
  BinaryProbe p = fit_binary_probe(c.embeddings(), col.values, opts);
  p.meta.attribute = attribute;
  p.meta.corpus_fingerprint = to_hex(c.content_hash());
  return p;
}

ScalarProbe fit_scalar_probe(const nd::Matrix& x, std::span<const float> labels,
                             const ProbeFitOptions& opts) {
  const std::size_t n = x.rows(), d = x.cols();
  require(labels.size() == n, ErrorKind::kShape, "fit_scalar_probe: label count mismatch");
  require(n >= 20, ErrorKind::kContract, "fit_scalar_probe: need at least 20 labelled rows");
  const Split split = split_rows(n, opts.heldout_fraction, opts.seed);

  nd::Matrix design(split.train.size(), d + 1);
  nd::Matrix target(split.train.size(), 1);
  for (std::size_t r = 0; r < split.train.size(); ++r) {
    const auto i = split.train[r];
    std::copy_n(x.row(i).begin(), d, design.row(r).begin());
    design(r, d) = 1.0f;
    target(r, 0) = labels[i];
  }
  const nd::Matrix u = nd::least_squares(design, target);  // 1 x (d + 1)

  ScalarProbe p;
  p.weights.resize(d);
  for (std::size_t j = 0; j < d; ++j) p.weights[j] = u(0, j);
  p.bias = u(0, d);

  double abs_err = 0.0, ss_res = 0.0, mean = 0.0, ss_tot = 0.0;
  for (auto i : split.heldout) mean += labels[i];
  mean /= static_cast<double>(split.heldout.size());
  for (auto i : split.heldout) {
    const double e = p.score(x.row(i)) - labels[i];
    abs_err += std::abs(e);
    ss_res += e * e;
    ss_tot += (labels[i] - mean) * (labels[i] - mean);
  }
  p.meta.heldout_accuracy = 1.0 - abs_err / static_cast<double>(split.heldout.size());
  p.meta.heldout_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  p.meta.train_count = split.train.size();
  p.meta.heldout_count = split.heldout.size();
  return p;
}

ScalarProbe fit_scalar_probe(const corpus::EmbeddingCorpus& c, const std::string& attribute,
                             const ProbeFitOptions& opts) {
  const auto& col = c.attribute(attribute);
  require(col.kind == corpus::AttributeKind::kScalar, ErrorKind::kContract,
          "attribute '" + attribute + "' is not scalar");
  ScalarProbe p = fit_scalar_probe(c.embeddings(), col.values, opts);
  p.meta.attribute = attribute;
  p.meta.corpus_fingerprint = to_hex(c.content_hash());
  return p;
}

std::string to_json(const BinaryProbe& p) { return probe_json(p, "binary"); }
std::string to_json(const ScalarProbe& p) { return probe_json(p, "scalar"); }
BinaryProbe binary_probe_from_json(const std::string& text) { return probe_from<BinaryProbe>(text, "binary"); }
ScalarProbe scalar_probe_from_json(const std::string& text) { return probe_from<ScalarProbe>(text, "scalar"); }

}  // namespace egan::probes
