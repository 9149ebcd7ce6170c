#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "egan/egan.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitDivergence = 3;

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kConfigName = "config.json";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(egan_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  egan_status status;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(egan_status s, const std::string& what) {
  if (s != EGAN_OK) throw ApiError(s, what + ": " + egan_last_error());
}

using Corpus = std::unique_ptr<egan_corpus, decltype(&egan_corpus_free)>;
using Model = std::unique_ptr<egan_model, decltype(&egan_model_free)>;
using Basis = std::unique_ptr<egan_basis, decltype(&egan_basis_free)>;
using Probe = std::unique_ptr<egan_probe, decltype(&egan_probe_free)>;

std::string take(char* s) {
  std::string out(s);
  egan_string_free(s);
  return out;
}

std::string num(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sha256_of(const fs::path& p) {
  char hex[EGAN_HEX_DIGEST_LEN];
  check(egan_file_sha256(p.string().c_str(), hex), "hash " + p.string());
  return hex;
}

Corpus load_corpus(const fs::path& p) {
  egan_corpus* c = nullptr;
  const auto s = p.extension() == ".csv" ? egan_corpus_import_csv(p.string().c_str(), &c)
                                         : egan_corpus_load(p.string().c_str(), &c);
  check(s, "load corpus " + p.string());
  return {c, egan_corpus_free};
}

Model load_model(const fs::path& p) {
  egan_model* m = nullptr;
  check(egan_model_load(p.string().c_str(), &m), "load checkpoint " + p.string());
  return {m, egan_model_free};
}

Basis load_basis(const fs::path& p) {
  egan_basis* b = nullptr;
  check(egan_basis_load(p.string().c_str(), &b), "load basis " + p.string());
  return {b, egan_basis_free};
}

// ---- configuration ----

ordered_json default_config() {
  egan_synth_config sc;
  egan_synth_config_default(&sc);
  egan_train_config tc;
  egan_train_config_default(&tc);
  egan_directions_config dc;
  egan_directions_config_default(&dc);
  egan_sweep_config wc;
  egan_sweep_config_default(&wc);
  egan_probe_config pc;
  egan_probe_config_default(&pc);
  egan_audit_config ac;
  egan_audit_config_default(&ac);

  ordered_json j;
  j["seed"] = std::uint64_t{0};
  j["corpus"] = {{"speakers", sc.speakers},
                 {"utterances_per_speaker", sc.utterances_per_speaker},
                 {"mean_scale", sc.mean_scale},
                 {"noise_scale", sc.noise_scale},
                 {"margin", sc.margin},
                 {"slope", sc.slope}};
  j["train"] = {{"steps", tc.steps},
                {"batch_size", tc.batch_size},
                {"critic_updates", tc.critic_updates},
                {"latent_dim", tc.latent_dim},
                {"hidden", tc.hidden},
                {"blocks", tc.blocks},
                {"lr_generator", tc.lr_generator},
                {"lr_critic", tc.lr_critic},
                {"beta1", tc.beta1},
                {"beta2", tc.beta2},
                {"cost_scale", tc.cost_scale},
                {"log_interval", tc.log_interval}};
  j["ganspace"] = {{"samples", dc.samples}, {"directions", dc.directions}};
  j["sweep"] = {{"n_seeds", wc.n_seeds},
                {"range_lo", wc.range_lo},
                {"range_hi", wc.range_hi},
                {"step", wc.step},
                {"direction", nullptr},
                {"selection_seeds", std::uint32_t{60}},
                {"attribute", nullptr},
                {"probe_heldout_fraction", pc.heldout_fraction},
                {"probe_iterations", pc.iterations},
                {"probe_learning_rate", pc.learning_rate},
                {"probe_l2", pc.l2}};
  j["audit"] = {{"n_generated", ac.n_generated}, {"threshold", nullptr}};
  return j;
}

enum class FieldKind { kUnsigned, kNumber, kString };

// Kinds of fields whose default is null.
const std::map<std::string, FieldKind> kNullableKinds = {
    {"sweep.direction", FieldKind::kUnsigned},
    {"sweep.attribute", FieldKind::kString},
    {"audit.threshold", FieldKind::kNumber},
};

FieldKind kind_of(const std::string& key, const ordered_json& def) {
  if (def.is_null()) return kNullableKinds.at(key);
  if (def.is_number_unsigned() || def.is_number_integer()) return FieldKind::kUnsigned;
  if (def.is_number()) return FieldKind::kNumber;
  return FieldKind::kString;
}

void check_value(const std::string& key, const ordered_json& def, const ordered_json& v) {
  if (v.is_null() && def.is_null()) return;
  bool ok = false;
  switch (kind_of(key, def)) {
    case FieldKind::kUnsigned: ok = v.is_number_unsigned(); break;
    case FieldKind::kNumber: ok = v.is_number(); break;
    case FieldKind::kString: ok = v.is_string(); break;
  }
  if (!ok) throw UsageError("config key '" + key + "' has the wrong type");
}

// Defaults overlaid with `user`; unknown keys are rejected by name.
ordered_json merge_config(const ordered_json& user) {
  ordered_json eff = default_config();
  if (!user.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [section, body] : user.items()) {
    if (!eff.contains(section)) throw UsageError("unknown config key '" + section + "'");
    if (section == "seed") {
      check_value("seed", eff["seed"], body);
      eff["seed"] = body;
      continue;
    }
    if (!body.is_object()) throw UsageError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : body.items()) {
      const std::string full = section + "." + key;
      if (!eff[section].contains(key)) throw UsageError("unknown config key '" + full + "'");
      check_value(full, eff[section][key], value);
      eff[section][key] = value;
    }
  }
  return eff;
}

ordered_json read_json_file(const fs::path& p, const char* what) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ApiError(EGAN_ERR_IO, std::string("cannot open ") + what + " " + p.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed ") + what + " " + p.string() + ": " + e.what());
  }
}

template <typename T>
T get_uint(const ordered_json& cfg, const char* section, const char* key) {
  const auto v = cfg.at(section).at(key).get<std::uint64_t>();
  if (v > std::numeric_limits<T>::max())
    throw UsageError(std::string("config key '") + section + "." + key + "' is out of range");
  return static_cast<T>(v);
}

double get_num(const ordered_json& cfg, const char* section, const char* key) {
  return cfg.at(section).at(key).get<double>();
}

std::uint64_t seed_of(const ordered_json& cfg) { return cfg.at("seed").get<std::uint64_t>(); }

egan_synth_config synth_config(const ordered_json& c) {
  egan_synth_config s;
  egan_synth_config_default(&s);
  s.speakers = get_uint<std::uint32_t>(c, "corpus", "speakers");
  s.utterances_per_speaker = get_uint<std::uint32_t>(c, "corpus", "utterances_per_speaker");
  s.mean_scale = get_num(c, "corpus", "mean_scale");
  s.noise_scale = get_num(c, "corpus", "noise_scale");
  s.margin = get_num(c, "corpus", "margin");
  s.slope = get_num(c, "corpus", "slope");
  s.seed = seed_of(c);
  return s;
}

egan_train_config train_config(const ordered_json& c) {
  egan_train_config t;
  egan_train_config_default(&t);
  t.steps = get_uint<std::uint64_t>(c, "train", "steps");
  t.batch_size = get_uint<std::uint32_t>(c, "train", "batch_size");
  t.critic_updates = get_uint<std::uint32_t>(c, "train", "critic_updates");
  t.latent_dim = get_uint<std::uint32_t>(c, "train", "latent_dim");
  t.hidden = get_uint<std::uint32_t>(c, "train", "hidden");
  t.blocks = get_uint<std::uint32_t>(c, "train", "blocks");
  t.lr_generator = get_num(c, "train", "lr_generator");
  t.lr_critic = get_num(c, "train", "lr_critic");
  t.beta1 = get_num(c, "train", "beta1");
  t.beta2 = get_num(c, "train", "beta2");
  t.cost_scale = get_num(c, "train", "cost_scale");
  t.log_interval = get_uint<std::uint64_t>(c, "train", "log_interval");
  t.seed = seed_of(c);
  return t;
}

egan_directions_config directions_config(const ordered_json& c) {
  egan_directions_config d;
  egan_directions_config_default(&d);
  d.samples = get_uint<std::uint64_t>(c, "ganspace", "samples");
  d.directions = get_uint<std::uint32_t>(c, "ganspace", "directions");
  d.seed = seed_of(c);
  return d;
}

egan_sweep_config sweep_config(const ordered_json& c) {
  egan_sweep_config s;
  egan_sweep_config_default(&s);
  s.n_seeds = get_uint<std::uint32_t>(c, "sweep", "n_seeds");
  s.range_lo = get_num(c, "sweep", "range_lo");
  s.range_hi = get_num(c, "sweep", "range_hi");
  s.step = get_num(c, "sweep", "step");
  s.seed = seed_of(c);
  return s;
}

egan_probe_config probe_config(const ordered_json& c) {
  egan_probe_config p;
  egan_probe_config_default(&p);
  p.heldout_fraction = get_num(c, "sweep", "probe_heldout_fraction");
  p.iterations = get_uint<std::uint32_t>(c, "sweep", "probe_iterations");
  p.learning_rate = get_num(c, "sweep", "probe_learning_rate");
  p.l2 = get_num(c, "sweep", "probe_l2");
  p.seed = seed_of(c);
  return p;
}

egan_audit_config audit_config(const ordered_json& c) {
  egan_audit_config a;
  egan_audit_config_default(&a);
  a.n_generated = get_uint<std::uint32_t>(c, "audit", "n_generated");
  const auto& t = c.at("audit").at("threshold");
  a.use_fixed_threshold = t.is_null() ? 0 : 1;
  if (!t.is_null()) a.threshold = t.get<double>();
  a.seed = seed_of(c);
  return a;
}

// ---- runs ----

// Everything a command needs; recorded in the manifest for replay.
struct Invocation {
  std::string command;
  ordered_json config;
  std::map<std::string, std::string> inputs;  // role -> absolute path
  ordered_json options = ordered_json::object();
};

class Run {
 public:
  Run(const Invocation& inv, fs::path out) : inv_(inv), out_(std::move(out)) {
    fs::create_directories(out_);
    start_ = Clock::now();
  }

  const fs::path& dir() const { return out_; }
  fs::path path(const std::string& name) const { return out_ / name; }

  void write(const std::string& name, const std::string& bytes) {
    check(egan_write_file_atomic(path(name).string().c_str(), bytes.data(), bytes.size()),
          "write " + name);
    produced(name);
  }

  void produced(const std::string& name) { outputs_.push_back(name); }

  void stage(const std::string& name, double seconds) { timings_[name + "_seconds"] = seconds; }

  void finish() {
    write(kConfigName, inv_.config.dump(2) + "\n");
    ordered_json m;
    m["tool"] = "egan";
    m["version"] = egan_version();
    m["invocation"] = {{"command", inv_.command}, {"inputs", inv_.inputs}, {"options", inv_.options}};
    m["config"] = inv_.config;
    ordered_json inputs = ordered_json::object();
    for (const auto& [role, p] : inv_.inputs) inputs[role] = {{"path", p}, {"sha256", sha256_of(p)}};
    m["inputs"] = inputs;
    std::map<std::string, std::string> hashes;
    for (const auto& name : outputs_) hashes[name] = sha256_of(path(name));
    m["outputs"] = hashes;
    timings_["total_seconds"] = seconds_since(start_);
    m["timings"] = timings_;
    const std::string bytes = m.dump(2) + "\n";
    check(egan_write_file_atomic(path(kManifestName).string().c_str(), bytes.data(), bytes.size()),
          "write manifest");
  }

  using Clock = std::chrono::steady_clock;
  static double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
  }

 private:
  const Invocation& inv_;
  fs::path out_;
  Clock::time_point start_;
  std::vector<std::string> outputs_;
  ordered_json timings_ = ordered_json::object();
};

const std::string& input(const Invocation& inv, const std::string& role) {
  const auto it = inv.inputs.find(role);
  if (it == inv.inputs.end()) throw UsageError("missing --" + role);
  return it->second;
}

void cmd_synth_corpus(const Invocation& inv, Run& run) {
  const auto cfg = synth_config(inv.config);
  egan_corpus* raw = nullptr;
  check(egan_corpus_synthesize(&cfg, &raw), "synthesize corpus");
  const Corpus c(raw, egan_corpus_free);
  check(egan_corpus_save(c.get(), run.path("corpus.bin").string().c_str()), "save corpus");
  run.produced("corpus.bin");
  char* stats = nullptr;
  check(egan_corpus_stats_json(c.get(), &stats), "corpus statistics");
  run.write("corpus_stats.json", take(stats));
  std::cout << "corpus: " << egan_corpus_count(c.get()) << " embeddings -> "
            << run.path("corpus.bin").string() << "\n";
}

struct MetricsSink {
  std::ostringstream csv;
  std::size_t rows = 0;
};

void on_metrics(const egan_metrics* m, void* user) {
  auto* sink = static_cast<MetricsSink*>(user);
  sink->csv << m->step << ',' << num(m->transport_cost) << ',' << num(m->critic_loss) << ','
            << num(m->generator_loss) << '\n';
  ++sink->rows;
}

void cmd_train(const Invocation& inv, Run& run) {
  const auto corpus = load_corpus(input(inv, "corpus"));
  const auto cfg = train_config(inv.config);
  check(egan_train_config_validate(&cfg), "train config");
  MetricsSink sink;
  sink.csv << "step,transport_cost,critic_loss,generator_loss\n";
  egan_model* raw = nullptr;
  const auto t0 = Run::Clock::now();
  const auto status = egan_train(corpus.get(), &cfg, on_metrics, &sink, &raw);
  const std::string error = egan_last_error();
  run.stage("train", Run::seconds_since(t0));
  run.write("metrics.csv", sink.csv.str());
  if (status != EGAN_OK) throw ApiError(status, "train: " + error);
  const Model m(raw, egan_model_free);
  check(egan_model_save(m.get(), run.path("checkpoint.bin").string().c_str()), "save checkpoint");
  run.produced("checkpoint.bin");
  std::cout << "trained " << cfg.steps << " steps, " << sink.rows << " metric rows -> "
            << run.path("checkpoint.bin").string() << "\n";
}

void cmd_directions(const Invocation& inv, Run& run) {
  const auto m = load_model(input(inv, "checkpoint"));
  const auto cfg = directions_config(inv.config);
  egan_basis* raw = nullptr;
  check(egan_basis_fit(m.get(), &cfg, &raw), "fit directions");
  const Basis b(raw, egan_basis_free);
  check(egan_basis_save(b.get(), run.path("basis.bin").string().c_str()), "save basis");
  run.produced("basis.bin");
  std::vector<double> var(egan_basis_directions(b.get()));
  check(egan_basis_variances(b.get(), var.data()), "basis variances");
  double total = 0.0;
  for (double v : var) total += v;
  std::ostringstream csv;
  csv << "direction,variance,fraction\n";
  for (std::size_t k = 0; k < var.size(); ++k)
    csv << k << ',' << num(var[k]) << ',' << num(total > 0.0 ? var[k] / total : 0.0) << '\n';
  run.write("variances.csv", csv.str());
  std::cout << var.size() << " directions -> " << run.path("basis.bin").string() << "\n";
}

std::pair<std::size_t, double> parse_offset(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == text.size())
    throw UsageError("offset '" + text + "' is not of the form k=value");
  std::size_t k = 0;
  const auto* kb = text.data();
  const auto kr = std::from_chars(kb, kb + eq, k);
  if (kr.ec != std::errc() || kr.ptr != kb + eq)
    throw UsageError("offset '" + text + "' has a bad direction index");
  double v = 0.0;
  const auto* vb = text.data() + eq + 1;
  const auto* ve = text.data() + text.size();
  const auto vr = std::from_chars(vb, ve, v);
  if (vr.ec != std::errc() || vr.ptr != ve || !std::isfinite(v))
    throw UsageError("offset '" + text + "' has a bad value");
  return {k, v};
}

// Dense offset vector over `directions` entries from "k=value" strings.
std::vector<float> dense_offsets(const std::vector<std::string>& specs, std::size_t directions) {
  std::vector<float> out(directions, 0.0f);
  std::vector<bool> seen(directions, false);
  for (const auto& s : specs) {
    const auto [k, v] = parse_offset(s);
    if (k >= directions)
      throw UsageError("offset direction " + std::to_string(k) + " out of range (basis has " +
                       std::to_string(directions) + " directions)");
    if (seen[k]) throw UsageError("offset direction " + std::to_string(k) + " given twice");
    seen[k] = true;
    out[k] = static_cast<float>(v);
  }
  return out;
}

std::string join(const std::vector<float>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) s += ',';
    s += num(v[i]);
  }
  return s;
}

void cmd_edit(const Invocation& inv, Run& run) {
  const auto m = load_model(input(inv, "checkpoint"));
  const auto b = load_basis(input(inv, "basis"));
  const auto specs = inv.options.at("offsets").get<std::vector<std::string>>();
  const auto index = inv.options.at("index").get<std::uint64_t>();
  const auto offsets = dense_offsets(specs, egan_basis_directions(b.get()));
  const std::size_t dz = egan_model_latent_dim(m.get());
  std::vector<float> z(dz), edited(dz), emb(EGAN_EMBEDDING_DIM);
  check(egan_sample_latent(seed_of(inv.config), index, dz, z.data()), "sample latent");
  check(egan_edit(m.get(), b.get(), z.data(), offsets.data(), edited.data(), emb.data()), "edit");

  ordered_json j;
  j["seed"] = seed_of(inv.config);
  j["index"] = index;
  j["offsets"] = offsets;
  j["latent"] = z;
  j["edited_latent"] = edited;
  j["embedding"] = emb;
  run.write("edit.json", j.dump(2) + "\n");
  const std::string line = join(emb);
  run.write("embedding.csv", line + "\n");
  std::cout << line << "\n";
}

void cmd_sweep(const Invocation& inv, Run& run) {
  const auto kind = inv.options.at("kind").get<std::string>();
  const bool flip = kind == "flip";
  const auto m = load_model(input(inv, "checkpoint"));
  const auto b = load_basis(input(inv, "basis"));
  const auto& sw = inv.config.at("sweep");

  egan_probe* raw = nullptr;
  if (inv.inputs.count("probe")) {
    check(egan_probe_load(inv.inputs.at("probe").c_str(), &raw), "load probe");
  } else if (inv.inputs.count("corpus")) {
    const auto corpus = load_corpus(inv.inputs.at("corpus"));
    const std::string attribute = sw.at("attribute").is_null()
                                      ? (flip ? "planted_binary" : "planted_scalar")
                                      : sw.at("attribute").get<std::string>();
    const auto pc = probe_config(inv.config);
    check(egan_probe_fit(corpus.get(), attribute.c_str(), &pc, &raw), "fit probe on " + attribute);
  } else {
    throw UsageError("sweep needs --probe or --corpus");
  }
  const Probe probe(raw, egan_probe_free);
  const auto want = flip ? EGAN_PROBE_BINARY : EGAN_PROBE_SCALAR;
  if (egan_probe_get_kind(probe.get()) != want)
    throw UsageError(kind + " sweep needs a " + (flip ? "binary" : "scalar") + " probe");
  if (!inv.inputs.count("probe")) {
    check(egan_probe_save(probe.get(), run.path("probe.json").string().c_str()), "save probe");
    run.produced("probe.json");
  }

  auto cfg = sweep_config(inv.config);
  const std::size_t directions = egan_basis_directions(b.get());
  std::size_t k = 0;
  if (sw.at("direction").is_null()) {
    auto sel = cfg;
    sel.n_seeds = sw.at("selection_seeds").get<std::uint32_t>();
    std::vector<double> effects(directions);
    const auto t0 = Run::Clock::now();
    check(egan_direction_effects(m.get(), b.get(), probe.get(), &sel, effects.data()),
          "direction effects");
    run.stage("selection", Run::seconds_since(t0));
    std::ostringstream csv;
    csv << "direction,effect\n";
    for (std::size_t i = 0; i < directions; ++i) {
      csv << i << ',' << num(effects[i]) << '\n';
      if (effects[i] > effects[k]) k = i;
    }
    run.write("effects.csv", csv.str());
  } else {
    k = sw.at("direction").get<std::size_t>();
    if (k >= directions)
      throw UsageError("direction " + std::to_string(k) + " out of range (basis has " +
                       std::to_string(directions) + " directions)");
  }

  const auto t0 = Run::Clock::now();
  const egan_report_part parts[] = {EGAN_REPORT_RECORDS_CSV, EGAN_REPORT_HISTOGRAM_CSV,
                                    EGAN_REPORT_SUMMARY_JSON, EGAN_REPORT_HISTOGRAM_SVG};
  const char* names[] = {"records.csv", "histogram.csv", "summary.json", "histogram.svg"};
  if (flip) {
    egan_flip_report* r = nullptr;
    check(egan_flip_sweep(m.get(), b.get(), k, probe.get(), &cfg, &r), "flip sweep");
    const std::unique_ptr<egan_flip_report, decltype(&egan_flip_report_free)> rep(r, egan_flip_report_free);
    for (std::size_t i = 0; i < 4; ++i) {
      char* s = nullptr;
      check(egan_flip_report_render(rep.get(), parts[i], &s), "render report");
      run.write(names[i], take(s));
    }
    egan_flip_summary sum;
    egan_flip_report_summary(rep.get(), &sum);
    std::cout << "flip sweep on direction " << k << ": " << sum.flipped << "/" << sum.seeds
              << " seeds flipped (low->high " << num(sum.low_to_high_fraction) << ", high->low "
              << num(sum.high_to_low_fraction) << ")\n";
  } else {
    egan_range_report* r = nullptr;
    check(egan_range_sweep(m.get(), b.get(), k, probe.get(), &cfg, &r), "range sweep");
    const std::unique_ptr<egan_range_report, decltype(&egan_range_report_free)> rep(r, egan_range_report_free);
    for (std::size_t i = 0; i < 4; ++i) {
      char* s = nullptr;
      check(egan_range_report_render(rep.get(), parts[i], &s), "render report");
      run.write(names[i], take(s));
    }
    egan_range_summary sum;
    egan_range_report_summary(rep.get(), &sum);
    std::cout << "range sweep on direction " << k << ": mean range " << num(sum.mean_range) << " over "
              << sum.seeds << " seeds\n";
  }
  run.stage("sweep", Run::seconds_since(t0));
}

void cmd_audit(const Invocation& inv, Run& run) {
  const auto m = load_model(input(inv, "checkpoint"));
  const auto corpus = load_corpus(input(inv, "corpus"));
  const auto cfg = audit_config(inv.config);
  egan_audit_report* r = nullptr;
  check(egan_privacy_audit(m.get(), corpus.get(), &cfg, &r), "privacy audit");
  const std::unique_ptr<egan_audit_report, decltype(&egan_audit_report_free)> rep(r, egan_audit_report_free);
  char* s = nullptr;
  check(egan_audit_report_render(rep.get(), EGAN_REPORT_SUMMARY_JSON, &s), "render audit");
  run.write("audit.json", take(s));
  check(egan_audit_report_render(rep.get(), EGAN_REPORT_RECORDS_CSV, &s), "render audit");
  run.write("audit.csv", take(s));
  egan_audit_summary sum;
  egan_audit_report_summary(rep.get(), &sum);
  std::cout << "audit: " << sum.generated << " generated, threshold " << num(sum.threshold)
            << ", error rate " << num(sum.error_rate_percent) << "%, duplicates " << sum.duplicates
            << "\n";
}

void execute(const Invocation& inv, const fs::path& out) {
  Run run(inv, out);
  if (inv.command == "synth-corpus") cmd_synth_corpus(inv, run);
  else if (inv.command == "train") cmd_train(inv, run);
  else if (inv.command == "directions") cmd_directions(inv, run);
  else if (inv.command == "edit") cmd_edit(inv, run);
  else if (inv.command == "sweep") cmd_sweep(inv, run);
  else if (inv.command == "audit") cmd_audit(inv, run);
  else throw UsageError("unknown command '" + inv.command + "'");
  run.finish();
}

int replay(const fs::path& manifest_path, std::optional<fs::path> out) {
  const auto m = read_json_file(manifest_path, "manifest");
  Invocation inv;
  std::map<std::string, std::string> recorded;
  try {
    const auto& call = m.at("invocation");
    inv.command = call.at("command").get<std::string>();
    inv.inputs = call.at("inputs").get<std::map<std::string, std::string>>();
    inv.options = call.at("options");
    inv.config = merge_config(m.at("config"));
    recorded = m.at("outputs").get<std::map<std::string, std::string>>();
    for (const auto& [role, rec] : m.at("inputs").items()) {
      const auto path = rec.at("path").get<std::string>();
      if (sha256_of(path) != rec.at("sha256").get<std::string>())
        throw DataError("input '" + role + "' (" + path + ") changed since the recorded run");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + manifest_path.string() + ": " + e.what());
  }

  const fs::path dir = out ? *out : manifest_path.parent_path() / "replay";
  if (fs::exists(dir) && fs::equivalent(dir, manifest_path.parent_path()))
    throw UsageError("replay output directory must differ from the recorded run");
  execute(inv, dir);

  const auto fresh = read_json_file(dir / kManifestName, "manifest")
                         .at("outputs")
                         .get<std::map<std::string, std::string>>();
  bool ok = fresh.size() == recorded.size();
  for (const auto& [name, hash] : recorded) {
    const auto it = fresh.find(name);
    const bool same = it != fresh.end() && it->second == hash;
    ok = ok && same;
    std::cout << (same ? "match    " : "MISMATCH ") << name << "\n";
  }
  for (const auto& [name, hash] : fresh)
    if (!recorded.count(name)) std::cout << "EXTRA    " << name << "\n";
  if (!ok) {
    std::cerr << "egan: replay outputs differ from " << manifest_path.string() << "\n";
    return kExitData;
  }
  std::cout << "replay verified " << recorded.size() << " outputs\n";
  return kExitOk;
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "global seed (overrides the config)");
  sub->add_option("--out", f.out, "output directory")->required();
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Embedding GAN toolkit: corpus, training, directions, edits, sweeps, audits"};
  app.require_subcommand(1);
  app.set_version_flag("--version", egan_version());

  CommonFlags flags;
  std::map<std::string, std::string> paths;
  std::vector<std::string> offsets;
  std::uint64_t index = 0;
  std::string kind;
  std::optional<std::size_t> direction;
  std::optional<double> threshold;
  std::optional<std::uint32_t> n_generated;
  std::string manifest;

  auto* synth = app.add_subcommand("synth-corpus", "write a synthetic labelled corpus");
  add_common(synth, flags);

  auto* train = app.add_subcommand("train", "train the generator and critic");
  add_common(train, flags);
  train->add_option("--corpus", paths["corpus"], "corpus file (.bin or .csv)")->required();

  auto* dirs = app.add_subcommand("directions", "fit control directions");
  add_common(dirs, flags);
  dirs->add_option("--checkpoint", paths["checkpoint"])->required();

  auto* edit = app.add_subcommand("edit", "generate an edited embedding");
  add_common(edit, flags);
  edit->add_option("--checkpoint", paths["checkpoint"])->required();
  edit->add_option("--basis", paths["basis"])->required();
  edit->add_option("--offset", offsets, "direction offset as k=value; repeatable");
  edit->add_option("--index", index, "latent index under the seed");

  auto* sweep = app.add_subcommand("sweep", "flip or range sweep along one direction");
  add_common(sweep, flags);
  sweep->add_option("--checkpoint", paths["checkpoint"])->required();
  sweep->add_option("--basis", paths["basis"])->required();
  sweep->add_option("--kind", kind)->required()->check(CLI::IsMember({"flip", "range"}));
  auto* probe_opt = sweep->add_option("--probe", paths["probe"], "fitted probe JSON");
  sweep->add_option("--corpus", paths["corpus"], "fit the probe on this corpus")->excludes(probe_opt);
  sweep->add_option("--direction", direction, "direction index (default: strongest)");

  auto* audit = app.add_subcommand("audit", "nearest-neighbour privacy audit");
  add_common(audit, flags);
  audit->add_option("--checkpoint", paths["checkpoint"])->required();
  audit->add_option("--corpus", paths["corpus"])->required();
  audit->add_option("--threshold", threshold, "fixed similarity threshold");
  audit->add_option("--n", n_generated, "number of generated embeddings");

  std::optional<std::string> replay_out;
  auto* rep = app.add_subcommand("replay", "re-run a recorded command and verify output hashes");
  rep->add_option("--manifest", manifest)->required()->check(CLI::ExistingFile);
  rep->add_option("--out", replay_out, "output directory (default: <run>/replay)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (rep->parsed()) {
    return replay(manifest, replay_out ? std::optional<fs::path>(*replay_out) : std::nullopt);
  }

  Invocation inv;
  CLI::App* sub = app.get_subcommands().front();
  inv.command = sub->get_name();
  inv.config = merge_config(flags.config.empty() ? ordered_json::object()
                                                 : read_json_file(flags.config, "config"));
  if (flags.seed) inv.config["seed"] = *flags.seed;
  for (const auto& [role, p] : paths)
    if (!p.empty()) inv.inputs[role] = absolute(p);
  if (sub == edit) inv.options = {{"offsets", offsets}, {"index", index}};
  if (sub == sweep) {
    inv.options = {{"kind", kind}};
    if (direction) inv.config["sweep"]["direction"] = *direction;
  }
  if (sub == audit) {
    if (threshold) inv.config["audit"]["threshold"] = *threshold;
    if (n_generated) inv.config["audit"]["n_generated"] = *n_generated;
  }
  execute(inv, flags.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "egan: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ApiError& e) {
    std::cerr << "egan: " << e.what() << "\n";
    return e.status == EGAN_ERR_DIVERGENCE ? kExitDivergence : kExitData;
  } catch (const DataError& e) {
    std::cerr << "egan: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "egan: " << e.what() << "\n";
    return kExitData;
  }
}
