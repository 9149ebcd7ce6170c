#include "egan/egan.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <json.hpp>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common/binio.hpp"
#include "common/digest.hpp"
#include "common/error.hpp"
#include "corpus/corpus.hpp"
#include "corpus/synthetic.hpp"
#include "gan/checkpoint.hpp"
#include "gan/trainer.hpp"
#include "ganspace/directions.hpp"
#include "ganspace/registry.hpp"
#include "ndmath/rng.hpp"
#include "probes/audit.hpp"
#include "probes/probe.hpp"
#include "probes/report.hpp"
#include "probes/sweep.hpp"
#include "twins/twins.hpp"

using namespace egan;

struct egan_corpus {
  corpus::EmbeddingCorpus value;
};

struct egan_model {
  gan::Checkpoint value;
};

struct egan_basis {
  ganspace::DirectionBasis value;
};

struct egan_probe {
  egan_probe_kind kind;
  probes::BinaryProbe binary;
  probes::ScalarProbe scalar;
};

struct egan_flip_report {
  probes::FlipSweepReport value;
};

struct egan_range_report {
  probes::RangeSweepReport value;
};

struct egan_audit_report {
  probes::PrivacyAuditReport value;
};

struct egan_registry {
  ganspace::DirectionRegistry value;
};

namespace {

constexpr const char* kVersion = "0.1.0";

thread_local std::string g_last_error;

egan_status to_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::kShape: return EGAN_ERR_SHAPE;
    case ErrorKind::kContract: return EGAN_ERR_CONTRACT;
    case ErrorKind::kDegenerate: return EGAN_ERR_DEGENERATE;
    case ErrorKind::kSingular: return EGAN_ERR_SINGULAR;
    case ErrorKind::kFormat: return EGAN_ERR_FORMAT;
    case ErrorKind::kIo: return EGAN_ERR_IO;
    case ErrorKind::kDivergence: return EGAN_ERR_DIVERGENCE;
  }
  return EGAN_ERR_INTERNAL;
}

template <typename F>
egan_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return EGAN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return EGAN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return EGAN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return EGAN_ERR_INTERNAL;
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) fail(ErrorKind::kContract, std::string(name) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void copy_hex(const Digest& d, char* out) {
  const std::string hex = to_hex(d);
  std::memcpy(out, hex.c_str(), hex.size() + 1);
}

gan::TrainConfig from_c(const egan_train_config& c) {
  gan::TrainConfig t;
  t.arch.latent_dim = c.latent_dim;
  t.arch.hidden = c.hidden;
  t.arch.blocks = c.blocks;
  t.batch_size = c.batch_size;
  t.critic_updates = c.critic_updates;
  t.steps = c.steps;
  t.seed = c.seed;
  t.log_interval = c.log_interval;
  t.lr_generator = c.lr_generator;
  t.lr_critic = c.lr_critic;
  t.beta1 = c.beta1;
  t.beta2 = c.beta2;
  t.cost_scale = c.cost_scale;
  return t;
}

egan_train_config to_c(const gan::TrainConfig& t) {
  egan_train_config c{};
  c.latent_dim = static_cast<uint32_t>(t.arch.latent_dim);
  c.hidden = static_cast<uint32_t>(t.arch.hidden);
  c.blocks = static_cast<uint32_t>(t.arch.blocks);
  c.batch_size = static_cast<uint32_t>(t.batch_size);
  c.critic_updates = static_cast<uint32_t>(t.critic_updates);
  c.steps = t.steps;
  c.seed = t.seed;
  c.log_interval = t.log_interval;
  c.lr_generator = t.lr_generator;
  c.lr_critic = t.lr_critic;
  c.beta1 = t.beta1;
  c.beta2 = t.beta2;
  c.cost_scale = t.cost_scale;
  return c;
}

probes::SweepConfig from_c(const egan_sweep_config& c) {
  probes::SweepConfig s;
  s.n_seeds = c.n_seeds;
  s.range_lo = c.range_lo;
  s.range_hi = c.range_hi;
  s.step = c.step;
  s.seed = c.seed;
  return s;
}

probes::ThresholdPolicy policy_from(const egan_audit_config& c) {
  probes::ThresholdPolicy p;
  if (c.use_fixed_threshold) p.fixed = c.threshold;
  return p;
}

probes::ProbeFn probe_fn(const egan_probe* p) {
  if (p->kind == EGAN_PROBE_BINARY)
    return [p](std::span<const float> e) { return p->binary.score(e); };
  return [p](std::span<const float> e) { return p->scalar.score(e); };
}

probes::ProbeFn raw_probe_fn(const egan_probe* p) {
  if (p->kind == EGAN_PROBE_BINARY)
    return [p](std::span<const float> e) { return p->binary.logit(e); };
  return [p](std::span<const float> e) { return p->scalar.linear(e); };
}

nd::Matrix rows_of(const float* data, std::size_t n, std::size_t cols) {
  return nd::Matrix(n, cols, std::vector<float>(data, data + n * cols));
}

}  // namespace

extern "C" {

const char* egan_last_error(void) { return g_last_error.c_str(); }

const char* egan_status_name(egan_status status) {
  switch (status) {
    case EGAN_OK: return "ok";
    case EGAN_ERR_SHAPE: return "shape error";
    case EGAN_ERR_CONTRACT: return "contract error";
    case EGAN_ERR_DEGENERATE: return "degenerate input";
    case EGAN_ERR_SINGULAR: return "singular system";
    case EGAN_ERR_FORMAT: return "format error";
    case EGAN_ERR_IO: return "i/o error";
    case EGAN_ERR_DIVERGENCE: return "training diverged";
    case EGAN_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* egan_version(void) { return kVersion; }

void egan_string_free(char* s) { std::free(s); }

/* corpus */

void egan_synth_config_default(egan_synth_config* cfg) {
  if (cfg == nullptr) return;
  const corpus::SyntheticCorpusSpec d;
  cfg->speakers = static_cast<uint32_t>(d.speakers);
  cfg->utterances_per_speaker = static_cast<uint32_t>(d.utterances_per_speaker);
  cfg->mean_scale = d.mean_scale;
  cfg->noise_scale = d.noise_scale;
  cfg->margin = d.margin;
  cfg->slope = d.slope;
  cfg->seed = d.seed;
}

egan_status egan_corpus_synthesize(const egan_synth_config* cfg, egan_corpus** out) {
  return guarded([&] {
    need(cfg, "cfg");
    need(out, "out");
    corpus::SyntheticCorpusSpec spec;
    spec.speakers = cfg->speakers;
    spec.utterances_per_speaker = cfg->utterances_per_speaker;
    spec.mean_scale = cfg->mean_scale;
    spec.noise_scale = cfg->noise_scale;
    spec.margin = cfg->margin;
    spec.slope = cfg->slope;
    spec.seed = cfg->seed;
    *out = new egan_corpus{corpus::generate_synthetic_corpus(spec).corpus};
  });
}

egan_status egan_corpus_load(const char* path, egan_corpus** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new egan_corpus{corpus::load_corpus(path)};
  });
}

egan_status egan_corpus_import_csv(const char* path, egan_corpus** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new egan_corpus{corpus::import_csv(path)};
  });
}

egan_status egan_corpus_save(const egan_corpus* c, const char* path) {
  return guarded([&] {
    need(c, "corpus");
    need(path, "path");
    corpus::save_corpus(c->value, path);
  });
}

egan_status egan_corpus_subset(const egan_corpus* c, const size_t* rows, size_t n, egan_corpus** out) {
  return guarded([&] {
    need(c, "corpus");
    need(out, "out");
    if (n > 0) need(rows, "rows");
    for (size_t i = 0; i < n; ++i)
      require(rows[i] < c->value.count(), ErrorKind::kContract, "subset: row index out of range");
    *out = new egan_corpus{c->value.subset(std::span<const std::size_t>(rows, n))};
  });
}

void egan_corpus_free(egan_corpus* c) { delete c; }
size_t egan_corpus_count(const egan_corpus* c) { return c ? c->value.count() : 0; }
size_t egan_corpus_dim(const egan_corpus* c) { return c ? c->value.dim() : 0; }

egan_status egan_corpus_row(const egan_corpus* c, size_t i, float* out) {
  return guarded([&] {
    need(c, "corpus");
    need(out, "out");
    require(i < c->value.count(), ErrorKind::kContract, "row index out of range");
    const auto r = c->value.embeddings().row(i);
    std::copy(r.begin(), r.end(), out);
  });
}

egan_status egan_corpus_speaker(const egan_corpus* c, size_t i, uint32_t* out) {
  return guarded([&] {
    need(c, "corpus");
    need(out, "out");
    require(c->value.speakers().has_value(), ErrorKind::kContract, "corpus has no speaker labels");
    require(i < c->value.count(), ErrorKind::kContract, "row index out of range");
    *out = (*c->value.speakers())[i];
  });
}

egan_status egan_corpus_hash(const egan_corpus* c, char out_hex[EGAN_HEX_DIGEST_LEN]) {
  return guarded([&] {
    need(c, "corpus");
    need(out_hex, "out_hex");
    copy_hex(c->value.content_hash(), out_hex);
  });
}

egan_status egan_corpus_stats_json(const egan_corpus* c, char** out_json) {
  return guarded([&] {
    need(c, "corpus");
    need(out_json, "out_json");
    const auto s = corpus::corpus_stats(c->value);
    nlohmann::ordered_json j;
    j["count"] = c->value.count();
    j["dim"] = c->value.dim();
    j["mean"] = s.mean;
    j["variance"] = s.variance;
    j["norms"] = {{"min", s.norms.min}, {"max", s.norms.max}, {"mean", s.norms.mean},
                  {"stddev", s.norms.stddev}};
    nlohmann::ordered_json spk = nlohmann::ordered_json::object();
    for (const auto& [id, n] : s.speaker_counts) spk[std::to_string(id)] = n;
    j["speaker_counts"] = spk;
    std::vector<std::string> attrs;
    for (const auto& a : c->value.attributes()) attrs.push_back(a.name);
    j["attributes"] = attrs;
    *out_json = dup_string(j.dump(2) + "\n");
  });
}

/* training */

void egan_train_config_default(egan_train_config* cfg) {
  if (cfg != nullptr) *cfg = to_c(gan::TrainConfig{});
}

egan_status egan_train_config_validate(const egan_train_config* cfg) {
  return guarded([&] {
    need(cfg, "cfg");
    from_c(*cfg).validate();
  });
}

egan_status egan_train(const egan_corpus* corpus, const egan_train_config* cfg,
                       egan_metrics_fn on_log, void* user, egan_model** out) {
  return guarded([&] {
    need(corpus, "corpus");
    need(cfg, "cfg");
    need(out, "out");
    gan::MetricsSink sink;
    if (on_log != nullptr) {
      sink = [on_log, user](const gan::StepMetrics& m) {
        const egan_metrics cm{m.step, m.transport_cost, m.critic_loss, m.generator_loss};
        on_log(&cm, user);
      };
    }
    auto ck = gan::train(corpus->value.embeddings(), corpus->value.content_hash(), from_c(*cfg), sink);
    *out = new egan_model{std::move(ck)};
  });
}

egan_status egan_model_load(const char* path, egan_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new egan_model{gan::load_checkpoint(path)};
  });
}

egan_status egan_model_save(const egan_model* m, const char* path) {
  return guarded([&] {
    need(m, "model");
    need(path, "path");
    gan::save_checkpoint(m->value, path);
  });
}

void egan_model_free(egan_model* m) { delete m; }

size_t egan_model_latent_dim(const egan_model* m) {
  return m ? m->value.state.gen.latent_dim() : 0;
}

void egan_model_train_config(const egan_model* m, egan_train_config* out) {
  if (m != nullptr && out != nullptr) *out = to_c(m->value.config);
}

egan_status egan_model_fingerprint(const egan_model* m, char out_hex[EGAN_HEX_DIGEST_LEN]) {
  return guarded([&] {
    need(m, "model");
    need(out_hex, "out_hex");
    copy_hex(gan::fingerprint(m->value.state.gen), out_hex);
  });
}

egan_status egan_model_corpus_hash(const egan_model* m, char out_hex[EGAN_HEX_DIGEST_LEN]) {
  return guarded([&] {
    need(m, "model");
    need(out_hex, "out_hex");
    copy_hex(m->value.corpus_fingerprint, out_hex);
  });
}

egan_status egan_sample_latent(uint64_t seed, uint64_t index, size_t latent_dim, float* out) {
  return guarded([&] {
    need(out, "out");
    auto rng = nd::SeededRng::derive(seed, index);
    const auto z = gan::sample_latent(rng, latent_dim);
    std::copy(z.values.begin(), z.values.end(), out);
  });
}

egan_status egan_generate(const egan_model* m, const float* z, size_t n, float* out) {
  return guarded([&] {
    need(m, "model");
    need(z, "z");
    need(out, "out");
    const auto& g = m->value.state.gen;
    const nd::Matrix e = gan::generate_batch(g, rows_of(z, n, g.latent_dim()));
    std::copy(e.values().begin(), e.values().end(), out);
  });
}

egan_status egan_first_layer(const egan_model* m, const float* z, float* out_hidden) {
  return guarded([&] {
    need(m, "model");
    need(z, "z");
    need(out_hidden, "out_hidden");
    const auto& g = m->value.state.gen;
    gan::LatentVector lz{std::vector<float>(z, z + g.latent_dim())};
    const auto a = gan::first_layer_activations(g, lz);
    std::copy(a.begin(), a.end(), out_hidden);
  });
}

egan_status egan_critic_score(const egan_model* m, const float* embedding, double* out) {
  return guarded([&] {
    need(m, "model");
    need(embedding, "embedding");
    need(out, "out");
    gan::EmbeddingVector e{std::vector<float>(embedding, embedding + gan::kEmbeddingDim)};
    *out = gan::critic_score(m->value.state.critic, e);
  });
}

/* directions */

void egan_directions_config_default(egan_directions_config* cfg) {
  if (cfg == nullptr) return;
  cfg->samples = ganspace::kDefaultSampleCount;
  cfg->directions = static_cast<uint32_t>(ganspace::kDefaultDirections);
  cfg->seed = 0;
}

egan_status egan_basis_fit(const egan_model* m, const egan_directions_config* cfg, egan_basis** out) {
  return guarded([&] {
    need(m, "model");
    need(cfg, "cfg");
    need(out, "out");
    *out = new egan_basis{ganspace::fit_generator_directions(m->value.state.gen, cfg->samples,
                                                             cfg->directions, cfg->seed)};
  });
}

egan_status egan_basis_load(const char* path, egan_basis** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new egan_basis{ganspace::load_basis(path)};
  });
}

egan_status egan_basis_save(const egan_basis* b, const char* path) {
  return guarded([&] {
    need(b, "basis");
    need(path, "path");
    ganspace::save_basis(b->value, path);
  });
}

void egan_basis_free(egan_basis* b) { delete b; }
size_t egan_basis_directions(const egan_basis* b) { return b ? b->value.directions() : 0; }
size_t egan_basis_latent_dim(const egan_basis* b) { return b ? b->value.latent_dim() : 0; }

egan_status egan_basis_variances(const egan_basis* b, double* out) {
  return guarded([&] {
    need(b, "basis");
    need(out, "out");
    std::copy(b->value.variances.begin(), b->value.variances.end(), out);
  });
}

egan_status egan_edit(const egan_model* m, const egan_basis* b, const float* z, const float* offsets,
                      float* out_latent, float* out_embedding) {
  return guarded([&] {
    need(m, "model");
    need(b, "basis");
    need(z, "z");
    need(offsets, "offsets");
    const auto& g = m->value.state.gen;
    require(b->value.latent_dim() == g.latent_dim(), ErrorKind::kShape,
            "edit: basis latent dimension does not match the generator");
    gan::LatentVector lz{std::vector<float>(z, z + g.latent_dim())};
    ganspace::EditOffsets x{std::vector<float>(offsets, offsets + b->value.directions())};
    const auto edited = ganspace::edit_latent(lz, b->value, x);
    const auto e = ganspace::edit_and_generate(g, lz, b->value, x);
    if (out_latent != nullptr) std::copy(edited.values.begin(), edited.values.end(), out_latent);
    if (out_embedding != nullptr) std::copy(e.values.begin(), e.values.end(), out_embedding);
  });
}

/* probes */

void egan_probe_config_default(egan_probe_config* cfg) {
  if (cfg == nullptr) return;
  const probes::ProbeFitOptions d;
  cfg->heldout_fraction = d.heldout_fraction;
  cfg->seed = d.seed;
  cfg->iterations = static_cast<uint32_t>(d.iterations);
  cfg->learning_rate = d.learning_rate;
  cfg->l2 = d.l2;
}

egan_status egan_probe_fit(const egan_corpus* c, const char* attribute, const egan_probe_config* cfg,
                           egan_probe** out) {
  return guarded([&] {
    need(c, "corpus");
    need(attribute, "attribute");
    need(cfg, "cfg");
    need(out, "out");
    probes::ProbeFitOptions o;
    o.heldout_fraction = cfg->heldout_fraction;
    o.seed = cfg->seed;
    o.iterations = cfg->iterations;
    o.learning_rate = cfg->learning_rate;
    o.l2 = cfg->l2;
    auto p = std::make_unique<egan_probe>();
    if (c->value.attribute(attribute).kind == corpus::AttributeKind::kBinary) {
      p->kind = EGAN_PROBE_BINARY;
      p->binary = probes::fit_binary_probe(c->value, attribute, o);
    } else {
      p->kind = EGAN_PROBE_SCALAR;
      p->scalar = probes::fit_scalar_probe(c->value, attribute, o);
    }
    *out = p.release();
  });
}

egan_status egan_probe_load(const char* path, egan_probe** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    const auto bytes = read_file(path);
    const std::string text(bytes.begin(), bytes.end());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::kFormat, std::string("malformed probe file: ") + e.what());
    }
    auto p = std::make_unique<egan_probe>();
    if (j.is_object() && j.value("kind", "") == "scalar") {
      p->kind = EGAN_PROBE_SCALAR;
      p->scalar = probes::scalar_probe_from_json(text);
    } else {
      p->kind = EGAN_PROBE_BINARY;
      p->binary = probes::binary_probe_from_json(text);
    }
    *out = p.release();
  });
}

egan_status egan_probe_save(const egan_probe* p, const char* path) {
  return guarded([&] {
    need(p, "probe");
    need(path, "path");
    write_text_atomic(path, p->kind == EGAN_PROBE_BINARY ? probes::to_json(p->binary)
                                                         : probes::to_json(p->scalar));
  });
}

void egan_probe_free(egan_probe* p) { delete p; }
egan_probe_kind egan_probe_get_kind(const egan_probe* p) { return p ? p->kind : EGAN_PROBE_BINARY; }

double egan_probe_heldout_accuracy(const egan_probe* p) {
  if (p == nullptr) return 0.0;
  return p->kind == EGAN_PROBE_BINARY ? p->binary.meta.heldout_accuracy
                                      : p->scalar.meta.heldout_accuracy;
}

egan_status egan_probe_score(const egan_probe* p, const float* embedding, double* out) {
  return guarded([&] {
    need(p, "probe");
    need(embedding, "embedding");
    need(out, "out");
    *out = probe_fn(p)(std::span<const float>(embedding, gan::kEmbeddingDim));
  });
}

/* sweeps */

void egan_sweep_config_default(egan_sweep_config* cfg) {
  if (cfg == nullptr) return;
  const probes::SweepConfig d;
  cfg->n_seeds = static_cast<uint32_t>(d.n_seeds);
  cfg->range_lo = d.range_lo;
  cfg->range_hi = d.range_hi;
  cfg->step = d.step;
  cfg->seed = d.seed;
}

egan_status egan_direction_effects(const egan_model* m, const egan_basis* b, const egan_probe* p,
                                   const egan_sweep_config* cfg, double* out) {
  return guarded([&] {
    need(m, "model");
    need(b, "basis");
    need(p, "probe");
    need(cfg, "cfg");
    need(out, "out");
    const auto e = probes::direction_effects(m->value.state.gen, b->value, raw_probe_fn(p), from_c(*cfg));
    std::copy(e.begin(), e.end(), out);
  });
}

egan_status egan_flip_sweep(const egan_model* m, const egan_basis* b, size_t k, const egan_probe* p,
                            const egan_sweep_config* cfg, egan_flip_report** out) {
  return guarded([&] {
    need(m, "model");
    need(b, "basis");
    need(p, "probe");
    need(cfg, "cfg");
    need(out, "out");
    require(p->kind == EGAN_PROBE_BINARY, ErrorKind::kContract, "flip sweep needs a binary probe");
    *out = new egan_flip_report{
        probes::flip_sweep(m->value.state.gen, b->value, k, p->binary, from_c(*cfg))};
  });
}

void egan_flip_report_free(egan_flip_report* r) { delete r; }

void egan_flip_report_summary(const egan_flip_report* r, egan_flip_summary* out) {
  if (r == nullptr || out == nullptr) return;
  const auto& v = r->value;
  *out = egan_flip_summary{};
  out->seeds = static_cast<uint32_t>(v.records.size());
  out->flipped = static_cast<uint32_t>(v.flipped());
  out->multi_flip = static_cast<uint32_t>(v.multi_flip_seeds);
  const double span = v.config.range_hi - v.config.range_lo;
  const double lo = v.config.range_lo + 0.25 * span, hi = v.config.range_hi - 0.25 * span;
  for (const auto& rec : v.records) {
    if (rec.flip_count == 1) ++out->flipped_once;
    if (rec.flip_point && *rec.flip_point >= lo && *rec.flip_point <= hi) ++out->central;
  }
  out->low_to_high_fraction = v.fraction(probes::FlipOrientation::kLowToHigh);
  out->high_to_low_fraction = v.fraction(probes::FlipOrientation::kHighToLow);
}

egan_status egan_flip_report_render(const egan_flip_report* r, egan_report_part part, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    switch (part) {
      case EGAN_REPORT_RECORDS_CSV: *out = dup_string(probes::flip_records_csv(r->value)); return;
      case EGAN_REPORT_HISTOGRAM_CSV: *out = dup_string(probes::flip_histogram_csv(r->value)); return;
      case EGAN_REPORT_SUMMARY_JSON: *out = dup_string(probes::flip_summary_json(r->value)); return;
      case EGAN_REPORT_HISTOGRAM_SVG: *out = dup_string(probes::flip_histogram_svg(r->value)); return;
    }
    fail(ErrorKind::kContract, "unknown report part");
  });
}

egan_status egan_range_sweep(const egan_model* m, const egan_basis* b, size_t k, const egan_probe* p,
                             const egan_sweep_config* cfg, egan_range_report** out) {
  return guarded([&] {
    need(m, "model");
    need(b, "basis");
    need(p, "probe");
    need(cfg, "cfg");
    need(out, "out");
    require(p->kind == EGAN_PROBE_SCALAR, ErrorKind::kContract, "range sweep needs a scalar probe");
    *out = new egan_range_report{
        probes::range_sweep(m->value.state.gen, b->value, k, p->scalar, from_c(*cfg))};
  });
}

void egan_range_report_free(egan_range_report* r) { delete r; }

void egan_range_report_summary(const egan_range_report* r, egan_range_summary* out) {
  if (r == nullptr || out == nullptr) return;
  out->seeds = static_cast<uint32_t>(r->value.records.size());
  out->mean_range = r->value.mean_range();
}

egan_status egan_range_report_render(const egan_range_report* r, egan_report_part part, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    switch (part) {
      case EGAN_REPORT_RECORDS_CSV: *out = dup_string(probes::range_records_csv(r->value)); return;
      case EGAN_REPORT_HISTOGRAM_CSV: *out = dup_string(probes::range_histogram_csv(r->value)); return;
      case EGAN_REPORT_SUMMARY_JSON: *out = dup_string(probes::range_summary_json(r->value)); return;
      case EGAN_REPORT_HISTOGRAM_SVG: *out = dup_string(probes::range_histogram_svg(r->value)); return;
    }
    fail(ErrorKind::kContract, "unknown report part");
  });
}

/* audit */

void egan_audit_config_default(egan_audit_config* cfg) {
  if (cfg == nullptr) return;
  cfg->n_generated = static_cast<uint32_t>(probes::kDefaultAuditCount);
  cfg->use_fixed_threshold = 0;
  cfg->threshold = 0.0;
  cfg->seed = 0;
}

egan_status egan_calibrate_threshold(const egan_corpus* c, egan_calibration* out) {
  return guarded([&] {
    need(c, "corpus");
    need(out, "out");
    const auto cal = probes::calibrate_threshold(c->value);
    *out = egan_calibration{cal.threshold, cal.equal_error_rate, cal.false_positive_rate,
                            cal.false_negative_rate};
  });
}

egan_status egan_privacy_audit(const egan_model* m, const egan_corpus* train,
                               const egan_audit_config* cfg, egan_audit_report** out) {
  return guarded([&] {
    need(m, "model");
    need(train, "train");
    need(cfg, "cfg");
    need(out, "out");
    *out = new egan_audit_report{probes::privacy_audit(m->value.state.gen, train->value,
                                                       cfg->n_generated, policy_from(*cfg), cfg->seed)};
  });
}

egan_status egan_audit_embeddings(const float* embeddings, size_t n, const egan_corpus* train,
                                  const egan_audit_config* cfg, egan_audit_report** out) {
  return guarded([&] {
    need(embeddings, "embeddings");
    need(train, "train");
    need(cfg, "cfg");
    need(out, "out");
    *out = new egan_audit_report{probes::audit_embeddings(
        rows_of(embeddings, n, train->value.dim()), train->value, policy_from(*cfg))};
  });
}

void egan_audit_report_free(egan_audit_report* r) { delete r; }

void egan_audit_report_summary(const egan_audit_report* r, egan_audit_summary* out) {
  if (r == nullptr || out == nullptr) return;
  const auto& v = r->value;
  out->generated = static_cast<uint32_t>(v.generated);
  out->threshold = v.threshold;
  out->error_rate_percent = v.error_rate;
  out->flagged = static_cast<uint32_t>(v.flagged);
  out->duplicates = static_cast<uint32_t>(v.duplicates);
  out->nn_median = v.nearest_neighbor.median;
  out->nn_max = v.nearest_neighbor.max;
}

egan_status egan_audit_report_render(const egan_audit_report* r, egan_report_part part, char** out) {
  return guarded([&] {
    need(r, "report");
    need(out, "out");
    if (part == EGAN_REPORT_RECORDS_CSV) {
      *out = dup_string(probes::audit_records_csv(r->value));
    } else if (part == EGAN_REPORT_SUMMARY_JSON) {
      *out = dup_string(probes::audit_summary_json(r->value));
    } else {
      fail(ErrorKind::kContract, "audit reports have no histogram output");
    }
  });
}

/* registry */

egan_status egan_registry_new(size_t directions, egan_registry** out) {
  return guarded([&] {
    need(out, "out");
    *out = new egan_registry{ganspace::DirectionRegistry(directions)};
  });
}

egan_status egan_registry_load(const char* path, size_t directions, egan_registry** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new egan_registry{ganspace::DirectionRegistry::load(path, directions)};
  });
}

egan_status egan_registry_save(const egan_registry* r, const char* path) {
  return guarded([&] {
    need(r, "registry");
    need(path, "path");
    r->value.save(path);
  });
}

void egan_registry_free(egan_registry* r) { delete r; }

egan_status egan_registry_register(egan_registry* r, size_t k, const char* label,
                                   const char* provenance) {
  return guarded([&] {
    need(r, "registry");
    need(label, "label");
    r->value.register_label(k, label, provenance ? provenance : "");
  });
}

egan_status egan_registry_lookup(const egan_registry* r, size_t k, char** out_label,
                                 char** out_provenance) {
  return guarded([&] {
    need(r, "registry");
    need(out_label, "out_label");
    require(k < r->value.directions(), ErrorKind::kContract, "direction index out of range");
    const auto hit = r->value.lookup(k);
    *out_label = hit ? dup_string(hit->label) : nullptr;
    if (out_provenance != nullptr) *out_provenance = hit ? dup_string(hit->provenance) : nullptr;
  });
}

/* twins */

egan_status egan_twins_loss(const float* a, const float* b, size_t n, size_t f, double lambda,
                            double* out_loss, float* grad_a, float* grad_b) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out_loss, "out_loss");
    const auto r = twins::barlow_twins_loss_and_grad(rows_of(a, n, f), rows_of(b, n, f), lambda);
    *out_loss = r.value;
    if (grad_a != nullptr) std::copy(r.grad_a.values().begin(), r.grad_a.values().end(), grad_a);
    if (grad_b != nullptr) std::copy(r.grad_b.values().begin(), r.grad_b.values().end(), grad_b);
  });
}

/* files */

egan_status egan_file_sha256(const char* path, char out_hex[EGAN_HEX_DIGEST_LEN]) {
  return guarded([&] {
    need(path, "path");
    need(out_hex, "out_hex");
    copy_hex(sha256(read_file(path)), out_hex);
  });
}

egan_status egan_write_file_atomic(const char* path, const void* data, size_t len) {
  return guarded([&] {
    need(path, "path");
    if (len > 0) need(data, "data");
    write_file_atomic(path, std::span<const std::uint8_t>(static_cast<const std::uint8_t*>(data), len));
  });
}

}  // extern "C"
