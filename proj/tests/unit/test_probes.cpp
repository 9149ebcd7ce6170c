#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <json.hpp>

#include "corpus/corpus.hpp"
#include "gan/network.hpp"
#include "ganspace/directions.hpp"
#include "oracles.hpp"
#include "probes/audit.hpp"
#include "probes/probe.hpp"
#include "probes/report.hpp"
#include "probes/sweep.hpp"
#include "support.hpp"

using egan::ErrorKind;
using egan::nd::Matrix;
using egan::nd::SeededRng;
namespace gan = egan::gan;
namespace gs = egan::ganspace;
namespace pr = egan::probes;
namespace corpus = egan::corpus;

namespace {

// Generator that is affine in z: first-layer pre-activations stay positive and
// the residual blocks are zeroed.
gan::GeneratorParams affine_generator(std::uint64_t seed) {
  SeededRng rng(seed);
  auto g = gan::init_generator({4, 8, 1}, rng);
  for (auto& b : g.net.input.b.values()) b = 100.0f;
  for (auto& blk : g.net.blocks)
    for (Matrix* m : {&blk.first.w, &blk.first.b, &blk.second.w, &blk.second.b})
      std::fill(m->values().begin(), m->values().end(), 0.0f);
  return g;
}

struct Fixture {
  gan::GeneratorParams g = affine_generator(1);
  gs::DirectionBasis basis = gs::fit_generator_directions(g, 1000, 3, 2);

  gan::LatentVector seed_latent(const pr::SweepConfig& cfg, std::size_t s) const {
    auto rng = SeededRng::derive(cfg.seed, s);
    return gan::sample_latent(rng, 4);
  }
  // Embedding shift per unit offset along direction k.
  std::vector<double> unit_shift(std::size_t k) const {
    const gan::LatentVector z{std::vector<float>(4, 0.0f)};
    const auto e0 = gan::generate(g, z);
    const auto e1 = gan::generate(g, gs::edit_latent(z, basis, gs::single_offset(basis, k, 1.0f)));
    std::vector<double> d(64);
    for (std::size_t i = 0; i < 64; ++i) d[i] = double{e1.values[i]} - e0.values[i];
    return d;
  }
  // Bias that puts the probe output at `at` for the zero latent.
  double bias_for(const std::vector<double>& w, double at) const {
    const auto e0 = gan::generate(g, gan::LatentVector{std::vector<float>(4, 0.0f)});
    double s = 0.0;
    for (std::size_t i = 0; i < 64; ++i) s += w[i] * e0.values[i];
    return at - s;
  }
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

pr::SweepConfig small_sweep() {
  pr::SweepConfig cfg;
  cfg.n_seeds = 40;
  cfg.seed = 5;
  return cfg;
}

// Two speakers on orthogonal axes with small jitter.
corpus::EmbeddingCorpus two_speaker_corpus(std::size_t per, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 0.05);
  Matrix x(2 * per, 64);
  std::vector<std::uint32_t> spk(2 * per);
  for (std::size_t i = 0; i < 2 * per; ++i) {
    spk[i] = static_cast<std::uint32_t>(i / per);
    for (std::size_t j = 0; j < 64; ++j) x(i, j) = static_cast<float>(nd(gen));
    x(i, spk[i]) += 1.0f;
  }
  corpus::EmbeddingCorpus c(x);
  c.set_speakers(spk);
  return c;
}

}  // namespace

TEST_SUITE("probes.fit") {
  TEST_CASE("separable binary labels give a perfect held-out probe") {
    std::mt19937_64 gen(1);
    Matrix x = oracle::random_matrix(400, 64, gen);
    std::vector<float> y(400);
    for (std::size_t i = 0; i < 400; ++i) {
      y[i] = i % 2 == 0 ? 1.0f : 0.0f;
      x(i, 3) += y[i] > 0.5f ? 4.0f : -4.0f;
    }
    const auto p = pr::fit_binary_probe(x, y);
    CHECK(p.meta.heldout_accuracy == 1.0);
    CHECK(p.meta.train_count + p.meta.heldout_count == 400);
    CHECK(p.meta.heldout_count == 80);
    for (std::size_t i = 0; i < 400; ++i) CHECK(p.predict(x.row(i)) == (y[i] > 0.5f));
    CHECK(p.score(x.row(0)) == doctest::Approx(1.0 / (1.0 + std::exp(-p.logit(x.row(0))))));
  }

  TEST_CASE("linear scalar labels are recovered exactly") {
    std::mt19937_64 gen(2);
    const Matrix x = oracle::random_matrix(300, 64, gen, 0.01);
    std::vector<float> y(300);
    for (std::size_t i = 0; i < 300; ++i) y[i] = static_cast<float>(0.5 + 10.0 * x(i, 0) - 5.0 * x(i, 7));
    const auto p = pr::fit_scalar_probe(x, y);
    CHECK(p.weights[0] == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(p.weights[7] == doctest::Approx(-5.0).epsilon(1e-3));
    CHECK(p.bias == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(p.meta.heldout_r2 > 0.999);
  }

  TEST_CASE("scalar score clamps the linear output") {
    pr::ScalarProbe p;
    p.weights.assign(64, 0.0);
    p.weights[0] = 1.0;
    std::vector<float> e(64, 0.0f);
    e[0] = 3.0f;
    CHECK(p.linear(e) == 3.0);
    CHECK(p.score(e) == 1.0);
    e[0] = -2.0f;
    CHECK(p.score(e) == 0.0);
  }

  TEST_CASE("same options give the same probe") {
    std::mt19937_64 gen(3);
    const Matrix x = oracle::random_matrix(100, 64, gen);
    std::vector<float> y(100);
    for (std::size_t i = 0; i < 100; ++i) y[i] = x(i, 0) > 0 ? 1.0f : 0.0f;
    CHECK(pr::fit_binary_probe(x, y) == pr::fit_binary_probe(x, y));
  }

  TEST_CASE("bad inputs are rejected") {
    std::mt19937_64 gen(4);
    const Matrix x = oracle::random_matrix(30, 64, gen);
    CHECK_ERROR_KIND(pr::fit_binary_probe(x, std::vector<float>(30, 1.0f)), ErrorKind::kContract);
    CHECK_ERROR_KIND(pr::fit_binary_probe(x, std::vector<float>(29, 1.0f)), ErrorKind::kShape);
    CHECK_ERROR_KIND(pr::fit_scalar_probe(oracle::random_matrix(10, 64, gen), std::vector<float>(10)),
                     ErrorKind::kContract);
    pr::ProbeFitOptions bad;
    bad.heldout_fraction = 1.0;
    std::vector<float> y(30, 0.0f);
    y[0] = 1.0f;
    CHECK_ERROR_KIND(pr::fit_binary_probe(x, y, bad), ErrorKind::kContract);
  }

  TEST_CASE("corpus attributes must have the matching kind") {
    std::mt19937_64 gen(5);
    corpus::EmbeddingCorpus c(oracle::random_matrix(40, 64, gen));
    std::vector<float> v(40, 0.0f);
    for (std::size_t i = 0; i < 20; ++i) v[i] = 1.0f;
    c.add_attribute({"b", corpus::AttributeKind::kBinary, v});
    c.add_attribute({"s", corpus::AttributeKind::kScalar, std::vector<float>(40, 0.25f)});
    const auto p = pr::fit_binary_probe(c, "b");
    CHECK(p.meta.attribute == "b");
    CHECK(p.meta.corpus_fingerprint == egan::to_hex(c.content_hash()));
    CHECK_ERROR_KIND(pr::fit_binary_probe(c, "s"), ErrorKind::kContract);
    CHECK_ERROR_KIND(pr::fit_scalar_probe(c, "b"), ErrorKind::kContract);
    CHECK_ERROR_KIND(pr::fit_scalar_probe(c, "missing"), ErrorKind::kContract);
  }

  TEST_CASE("json round trip and malformed files") {
    std::mt19937_64 gen(6);
    const Matrix x = oracle::random_matrix(200, 64, gen);
    std::vector<float> y(200);
    for (std::size_t i = 0; i < 200; ++i) y[i] = x(i, 0) > 0 ? 1.0f : 0.0f;
    const auto p = pr::fit_binary_probe(x, y);
    CHECK(pr::binary_probe_from_json(pr::to_json(p)) == p);
    const auto s = pr::fit_scalar_probe(x, y);
    CHECK(pr::scalar_probe_from_json(pr::to_json(s)) == s);
    CHECK_ERROR_KIND(pr::scalar_probe_from_json(pr::to_json(p)), ErrorKind::kFormat);
    CHECK_ERROR_KIND(pr::binary_probe_from_json("{"), ErrorKind::kFormat);
    CHECK_ERROR_KIND(pr::binary_probe_from_json(R"({"kind":"binary","weights":"x"})"), ErrorKind::kFormat);
  }
}

TEST_SUITE("probes.sweep") {
  TEST_CASE("offset grid is inclusive") {
    pr::SweepConfig cfg;
    const auto o = cfg.offsets();
    CHECK(o.size() == 21);
    CHECK(o.front() == -50.0);
    CHECK(o.back() == 50.0);
    cfg.step = 0.0;
    CHECK_ERROR_KIND(cfg.offsets(), ErrorKind::kContract);
    cfg.step = 1.0;
    cfg.range_hi = -60.0;
    CHECK_ERROR_KIND(cfg.offsets(), ErrorKind::kContract);
  }

  TEST_CASE("affine generator and probe: single flips at the analytic crossing") {
    const Fixture f;
    const auto shift = f.unit_shift(0);
    pr::BinaryProbe p;
    const double n2 = norm2(shift);
    for (double v : shift) p.weights.push_back(v / n2 * 0.2);  // logit slope 0.2 per unit offset
    p.bias = f.bias_for(p.weights, 0.0);
    const auto cfg = small_sweep();
    const auto rep = pr::flip_sweep(f.g, f.basis, 0, p, cfg);
    CHECK(rep.records.size() == 40);
    CHECK(rep.multi_flip_seeds == 0);
    CHECK(rep.fraction(pr::FlipOrientation::kHighToLow) == 0.0);

    const auto grid = cfg.offsets();
    std::size_t checked = 0;
    for (const auto& r : rep.records) {
      const auto z = f.seed_latent(cfg, r.seed_index);
      const double l0 = p.logit(gan::generate(f.g, z).values);
      const double crossing = -l0 / 0.2;
      const auto it = std::find_if(grid.begin(), grid.end(), [&](double t) { return t >= crossing; });
      const bool near_grid = std::any_of(grid.begin(), grid.end(), [&](double t) { return std::abs(t - crossing) < 1e-2; });
      if (near_grid) continue;
      ++checked;
      CHECK(r.flip_count <= 1);
      if (crossing <= grid.front() || it == grid.end()) {
        CHECK(!r.flip_point.has_value());
        CHECK(r.orientation == pr::FlipOrientation::kNone);
      } else {
        REQUIRE(r.flip_point.has_value());
        CHECK(*r.flip_point == *it);
        CHECK(r.orientation == pr::FlipOrientation::kLowToHigh);
      }
    }
    CHECK(checked > 30);
    CHECK(rep.flipped() > 20);
    CHECK(rep.low_to_high.total() == rep.flipped());
    CHECK(rep.low_to_high.counts.size() == 21);
    CHECK(rep.low_to_high.width == 5.0);
  }

  TEST_CASE("negated probe flips high to low") {
    const Fixture f;
    const auto shift = f.unit_shift(0);
    pr::BinaryProbe p;
    const double n2 = norm2(shift);
    for (double v : shift) p.weights.push_back(-v / n2 * 0.2);
    p.bias = f.bias_for(p.weights, 0.0);
    const auto rep = pr::flip_sweep(f.g, f.basis, 0, p, small_sweep());
    CHECK(rep.fraction(pr::FlipOrientation::kLowToHigh) == 0.0);
    CHECK(rep.fraction(pr::FlipOrientation::kHighToLow) > 0.5);
    CHECK(rep.high_to_low.total() == rep.flipped());
  }

  TEST_CASE("range sweep matches clamped affine scores") {
    const Fixture f;
    const auto shift = f.unit_shift(1);
    pr::ScalarProbe p;
    const double n2 = norm2(shift);
    for (double v : shift) p.weights.push_back(v / n2 * 0.004);
    p.bias = f.bias_for(p.weights, 0.5);
    const auto cfg = small_sweep();
    const auto rep = pr::range_sweep(f.g, f.basis, 1, p, cfg);
    for (const auto& r : rep.records) {
      const double l0 = p.linear(gan::generate(f.g, f.seed_latent(cfg, r.seed_index)).values);
      const double lo = std::clamp(l0 - 50.0 * 0.004, 0.0, 1.0), hi = std::clamp(l0 + 50.0 * 0.004, 0.0, 1.0);
      CHECK(r.min == doctest::Approx(lo).epsilon(1e-3).scale(1.0));
      CHECK(r.max == doctest::Approx(hi).epsilon(1e-3).scale(1.0));
      CHECK(r.range == r.max - r.min);
    }
    CHECK(rep.range_hist.counts.size() == 20);
    CHECK(rep.range_hist.width == 0.05);
    CHECK(rep.min_hist.total() == 40);
    CHECK(rep.max_hist.total() == 40);
    CHECK(rep.range_hist.total() == 40);
  }

  TEST_CASE("a range of exactly one lands in the last bin") {
    const Fixture f;
    const auto shift = f.unit_shift(0);
    pr::ScalarProbe p;
    const double n2 = norm2(shift);
    for (double v : shift) p.weights.push_back(v / n2);
    p.bias = f.bias_for(p.weights, 0.5);
    const auto rep = pr::range_sweep(f.g, f.basis, 0, p, small_sweep());
    CHECK(rep.range_hist.counts.back() == 40);
    CHECK(rep.mean_range() == 1.0);
  }

  TEST_CASE("direction effects rank the planted direction first") {
    const Fixture f;
    const auto shift = f.unit_shift(2);
    const double n2 = norm2(shift);
    pr::ScalarProbe p;
    for (double v : shift) p.weights.push_back(v / n2);
    auto cfg = small_sweep();
    cfg.n_seeds = 5;
    const pr::ProbeFn fn = [&](std::span<const float> e) { return p.linear(e); };
    const auto eff = pr::direction_effects(f.g, f.basis, fn, cfg);
    CHECK(eff.size() == 3);
    CHECK(eff[2] == doctest::Approx(100.0).epsilon(1e-3));
    CHECK(pr::strongest_direction(eff) == 2);
    CHECK_ERROR_KIND(pr::strongest_direction(std::vector<double>{}), ErrorKind::kContract);
  }

  TEST_CASE("sweeps are deterministic and validate their inputs") {
    const Fixture f;
    pr::BinaryProbe p;
    p.weights.assign(64, 0.01);
    const auto cfg = small_sweep();
    CHECK(pr::flip_records_csv(pr::flip_sweep(f.g, f.basis, 1, p, cfg)) ==
          pr::flip_records_csv(pr::flip_sweep(f.g, f.basis, 1, p, cfg)));
    CHECK_ERROR_KIND(pr::flip_sweep(f.g, f.basis, 3, p, cfg), ErrorKind::kContract);
    CHECK_ERROR_KIND(pr::flip_sweep(affine_generator(9), f.basis, 0, p, cfg), ErrorKind::kContract);
    pr::BinaryProbe shortp;
    shortp.weights.assign(10, 0.0);
    CHECK_ERROR_KIND(pr::flip_sweep(f.g, f.basis, 0, shortp, cfg), ErrorKind::kShape);
    auto none = cfg;
    none.n_seeds = 0;
    CHECK_ERROR_KIND(pr::flip_sweep(f.g, f.basis, 0, p, none), ErrorKind::kContract);
  }
}

TEST_SUITE("probes.audit") {
  TEST_CASE("cosine similarity") {
    const std::vector<float> a{1, 0, 0}, b{0, 2, 0}, c{3, 0, 0}, z{0, 0, 0};
    CHECK(pr::cosine_similarity(a, b) == 0.0);
    CHECK(pr::cosine_similarity(a, c) == doctest::Approx(1.0));
    CHECK(pr::cosine_similarity(a, z) == 0.0);
    CHECK_ERROR_KIND(pr::cosine_similarity(a, std::vector<float>(2)), ErrorKind::kShape);
  }

  TEST_CASE("separable speakers calibrate to zero equal error") {
    const auto c = two_speaker_corpus(10, 1);
    const auto cal = pr::calibrate_threshold(c);
    CHECK(cal.same_pairs == 2 * 45);
    CHECK(cal.cross_pairs == 100);
    CHECK(cal.equal_error_rate == 0.0);
    CHECK(cal.threshold > 0.1);
    CHECK(cal.threshold < 0.9);
  }

  TEST_CASE("equal error point matches a brute-force scan") {
    std::mt19937_64 gen(7);
    Matrix x = oracle::random_matrix(24, 64, gen);
    std::vector<std::uint32_t> spk(24);
    for (std::size_t i = 0; i < 24; ++i) {
      spk[i] = static_cast<std::uint32_t>(i % 3);
      x(i, spk[i]) += 4.0f;
    }
    corpus::EmbeddingCorpus c(x);
    c.set_speakers(spk);
    std::vector<std::pair<double, bool>> pairs;
    for (std::size_t i = 0; i < 24; ++i)
      for (std::size_t j = i + 1; j < 24; ++j)
        pairs.emplace_back(pr::cosine_similarity(x.row(i), x.row(j)), spk[i] == spk[j]);
    double best_gap = 1e9;
    for (const auto& [t, unused] : pairs) {
      for (double eps : {-1e-9, 1e-9}) {
        double fa = 0, fr = 0, ns = 0, nc = 0;
        for (const auto& [s, same] : pairs) {
          if (same) { ++ns; fr += s <= t + eps; }
          else { ++nc; fa += s > t + eps; }
        }
        best_gap = std::min(best_gap, std::abs(fa / nc - fr / ns));
      }
    }
    const auto cal = pr::calibrate_threshold(c);
    CHECK(std::abs(cal.false_positive_rate - cal.false_negative_rate) == doctest::Approx(best_gap).scale(1.0));
  }

  TEST_CASE("copies of training rows are duplicates with similarity one") {
    const auto c = two_speaker_corpus(10, 2);
    const std::vector<std::size_t> rows{3, 17};
    const Matrix gen = egan::nd::gather_rows(c.embeddings(), rows);
    const auto rep = pr::audit_embeddings(gen, c, {});
    CHECK(rep.generated == 2);
    CHECK(rep.duplicates == 2);
    CHECK(rep.flagged == 2);
    CHECK(rep.error_rate == 100.0);
    CHECK(rep.records[0].nearest == 3);
    CHECK(rep.records[1].nearest == 17);
    CHECK(rep.records[0].max_similarity == doctest::Approx(1.0));
    CHECK(rep.calibration.has_value());
  }

  TEST_CASE("fixed threshold is strict and overrides calibration") {
    const auto c = two_speaker_corpus(10, 3);
    Matrix gen(2, 64);
    gen(0, 0) = 1.0f;
    gen(0, 1) = 1.0f;  // cosine 1/sqrt(2) to the clean axis
    gen(1, 5) = 1.0f;  // orthogonal to both speakers, up to jitter
    const double s0 = pr::audit_embeddings(gen, c, {0.99}).records[0].max_similarity;
    auto rep = pr::audit_embeddings(gen, c, {s0});
    CHECK(!rep.calibration.has_value());
    CHECK(rep.threshold == s0);
    CHECK(!rep.records[0].flagged);
    rep = pr::audit_embeddings(gen, c, {s0 - 1e-9});
    CHECK(rep.records[0].flagged);
    CHECK(!rep.records[1].flagged);
    CHECK(rep.error_rate == 50.0);
    CHECK_ERROR_KIND(pr::audit_embeddings(gen, c, {NAN}), ErrorKind::kContract);
  }

  TEST_CASE("nearest-neighbour summary matches sorted similarities") {
    const auto c = two_speaker_corpus(10, 4);
    std::mt19937_64 g(5);
    const Matrix gen = oracle::random_matrix(41, 64, g);
    const auto rep = pr::audit_embeddings(gen, c, {0.5});
    std::vector<double> best;
    for (std::size_t i = 0; i < 41; ++i) {
      double b = -2.0;
      for (std::size_t j = 0; j < c.count(); ++j) b = std::max(b, pr::cosine_similarity(gen.row(i), c.embeddings().row(j)));
      best.push_back(b);
    }
    std::sort(best.begin(), best.end());
    CHECK(rep.nearest_neighbor.min == doctest::Approx(best.front()));
    CHECK(rep.nearest_neighbor.median == doctest::Approx(best[20]));
    CHECK(rep.nearest_neighbor.p25 == doctest::Approx(best[10]));
    CHECK(rep.nearest_neighbor.max == doctest::Approx(best.back()));
  }

  TEST_CASE("generator audit draws latents from derived streams") {
    SeededRng rng(8);
    const auto g = gan::init_generator({4, 8, 1}, rng);
    const auto c = two_speaker_corpus(10, 6);
    const auto rep = pr::privacy_audit(g, c, 5, {0.5}, 11);
    CHECK(rep.generated == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      auto r = SeededRng::derive(11, i);
      const auto e = gan::generate(g, gan::sample_latent(r, 4));
      double b = -2.0;
      for (std::size_t j = 0; j < c.count(); ++j) b = std::max(b, pr::cosine_similarity(e.values, c.embeddings().row(j)));
      CHECK(rep.records[i].max_similarity == doctest::Approx(b).epsilon(1e-5));
    }
    CHECK(pr::kDefaultAuditCount == 1000);
    CHECK_ERROR_KIND(pr::privacy_audit(g, c, 0, {}, 0), ErrorKind::kContract);
  }

  TEST_CASE("calibration needs speaker labels") {
    std::mt19937_64 g(9);
    const corpus::EmbeddingCorpus c(oracle::random_matrix(10, 64, g));
    CHECK_ERROR_KIND(pr::calibrate_threshold(c), ErrorKind::kContract);
  }
}

TEST_SUITE("probes.report") {
  TEST_CASE("numbers round-trip through their text form") {
    std::mt19937_64 g(10);
    std::uniform_real_distribution<double> ud(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double v = ud(g);
      const auto s = pr::format_number(v);
      double back = 0.0;
      std::from_chars(s.data(), s.data() + s.size(), back);
      CHECK(back == v);
    }
    CHECK(pr::format_number(0.0) == "0");
    CHECK(pr::format_number(-0.0) == "0");
    CHECK(pr::format_number(5.0) == "5");
  }

  TEST_CASE("flip outputs have the documented layout") {
    const Fixture f;
    const auto shift = f.unit_shift(0);
    pr::BinaryProbe p;
    const double n2 = norm2(shift);
    for (double v : shift) p.weights.push_back(v / n2 * 0.2);
    const auto rep = pr::flip_sweep(f.g, f.basis, 0, p, small_sweep());
    const auto rec = pr::flip_records_csv(rep);
    CHECK(rec.rfind("seed_index,flip_point,orientation,flip_count\n", 0) == 0);
    CHECK(std::count(rec.begin(), rec.end(), '\n') == 41);
    const auto hist = pr::flip_histogram_csv(rep);
    CHECK(hist.rfind("bin_lo,bin_hi,low_to_high,high_to_low\n-50,-45,", 0) == 0);
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 22);
    const auto j = nlohmann::json::parse(pr::flip_summary_json(rep));
    CHECK(j["seeds"] == 40);
    CHECK(j["bin_width"] == 5.0);
    CHECK(j["flipped"] == rep.flipped());
    const auto svg = pr::flip_histogram_svg(rep);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
  }

  TEST_CASE("range and audit outputs have the documented layout") {
    const Fixture f;
    pr::ScalarProbe p;
    p.weights.assign(64, 0.001);
    p.bias = 0.5;
    const auto rep = pr::range_sweep(f.g, f.basis, 0, p, small_sweep());
    const auto hist = pr::range_histogram_csv(rep);
    CHECK(hist.rfind("bin_lo,bin_hi,min,max,range\n0,0.05,", 0) == 0);
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 21);
    CHECK(pr::range_records_csv(rep).rfind("seed_index,min,max,range\n", 0) == 0);
    CHECK(nlohmann::json::parse(pr::range_summary_json(rep))["bin_width"] == 0.05);
    CHECK(pr::range_histogram_svg(rep).rfind("<svg", 0) == 0);

    const auto c = two_speaker_corpus(10, 7);
    const auto audit = pr::audit_embeddings(egan::nd::gather_rows(c.embeddings(), std::vector<std::size_t>{1}), c, {});
    const auto j = nlohmann::json::parse(pr::audit_summary_json(audit));
    CHECK(j["generated"] == 1);
    CHECK(j["duplicates"] == 1);
    const auto csv = pr::audit_records_csv(audit);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  }
}
